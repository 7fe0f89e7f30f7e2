//! Quadrature on the unit sphere S^{d-1} for d = 1, 2, 3.

use crate::error::{invalid, Result};
use crate::quadrature::gauss_legendre;
use std::f64::consts::PI;

/// Directions and weights; the weights sum to the sphere area.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dim: usize,
    pub directions: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl SphereRule {
    /// Product rule: `n` Gauss points in cos(theta) times `2n` equispaced
    /// azimuths in 3D, `2n` equispaced angles in 2D, the two points +-1 in 1D.
    pub fn new(dim: usize, n: usize) -> Result<Self> {
        let mut directions = Vec::new();
        let mut weights = Vec::new();
        match dim {
            1 => {
                directions = vec![vec![-1.0], vec![1.0]];
                weights = vec![1.0, 1.0];
            }
            2 => {
                let m = 2 * n;
                for i in 0..m {
                    let phi = 2.0 * PI * (i as f64 + 0.5) / m as f64;
                    directions.push(vec![phi.cos(), phi.sin()]);
                    weights.push(2.0 * PI / m as f64);
                }
            }
            3 => {
                let (z, w) = gauss_legendre(n);
                let m = 2 * n;
                for (zi, wi) in z.iter().zip(&w) {
                    let s = (1.0 - zi * zi).sqrt();
                    for j in 0..m {
                        let phi = 2.0 * PI * (j as f64 + 0.5) / m as f64;
                        directions.push(vec![s * phi.cos(), s * phi.sin(), *zi]);
                        weights.push(wi * 2.0 * PI / m as f64);
                    }
                }
            }
            _ => {
                return invalid(format!(
                    "sphere quadrature supports d = 1, 2, 3 (got {dim})"
                ))
            }
        }
        Ok(Self {
            dim,
            directions,
            weights,
        })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Area of the unit sphere S^{d-1}.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * PI,
        3 => 4.0 * PI,
        d => {
            // 2 pi^{d/2} / Gamma(d/2) via the recursion |S^{d+1}| = 2 pi |S^{d-1}| / d
            2.0 * PI * sphere_area(d - 2) / (d - 2) as f64
        }
    }
}
