//! Discrete radial functions and their serialization.

use super::fem::FemSpace;
use crate::error::{invalid, Result};
use crate::io::{fmt_f64, parse_f64};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// A piecewise polynomial function of r on a finite element space.
#[derive(Debug, Clone)]
pub struct RadialField {
    pub space: Arc<FemSpace>,
    pub values: Vec<f64>,
}

/// Metadata header written in front of the CSV data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FieldMetadata {
    pub name: String,
    pub dim: usize,
    pub degree: usize,
    pub outer_radius: f64,
    pub grading: f64,
    pub cell_boundaries: Vec<f64>,
}

impl RadialField {
    pub fn new(space: Arc<FemSpace>, values: Vec<f64>) -> Result<Self> {
        if values.len() != space.n_dofs() {
            return invalid(format!(
                "field has {} values for {} degrees of freedom",
                values.len(),
                space.n_dofs()
            ));
        }
        Ok(Self { space, values })
    }

    pub fn from_fn(space: Arc<FemSpace>, f: impl Fn(f64) -> f64) -> Self {
        let values = space.interpolate(f);
        Self { space, values }
    }

    pub fn value(&self, r: f64) -> f64 {
        self.space.eval(&self.values, r).0
    }

    pub fn derivative(&self, r: f64) -> f64 {
        self.space.eval(&self.values, r).1
    }

    pub fn at_quad(&self) -> Vec<f64> {
        self.space.eval_at_quad(&self.values)
    }

    /// L^2(R^d) norm.
    pub fn l2_norm(&self) -> f64 {
        let q = self.at_quad();
        self.space
            .integrate(&q.iter().map(|v| v * v).collect::<Vec<_>>())
            .sqrt()
    }

    /// L^2(R^d) distance to a function of r, computed by quadrature.
    pub fn l2_distance(&self, f: impl Fn(f64) -> f64) -> f64 {
        let q = self.at_quad();
        let pts = self.space.quad_points();
        pts.iter()
            .zip(&q)
            .map(|((r, w), v)| w * (v - f(*r)).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn metadata(&self, name: &str) -> FieldMetadata {
        FieldMetadata {
            name: name.to_string(),
            dim: self.space.dim,
            degree: self.space.degree,
            outer_radius: self.space.outer_radius(),
            grading: self.space.grid.grading,
            cell_boundaries: self.space.grid.nodes.clone(),
        }
    }

    /// A `# {json metadata}` line followed by `r,value` rows at every node.
    pub fn to_csv(&self, name: &str) -> Result<String> {
        let mut s = format!(
            "# {}\nr,value\n",
            serde_json::to_string(&self.metadata(name))?
        );
        for (r, v) in self.space.node_coords().iter().zip(&self.values) {
            s.push_str(&format!("{},{}\n", fmt_f64(*r), fmt_f64(*v)));
        }
        Ok(s)
    }

    /// Inverse of [`RadialField::to_csv`].
    pub fn from_csv(text: &str) -> Result<(FieldMetadata, Self)> {
        let mut lines = text.lines();
        let header = lines
            .next()
            .and_then(|l| l.strip_prefix("# "))
            .ok_or_else(|| crate::Error::InvalidInput("missing metadata header".into()))?;
        let meta: FieldMetadata = serde_json::from_str(header)?;
        if lines.next() != Some("r,value") {
            return invalid("missing column header r,value");
        }
        let grid = super::grid::GradedRadialGrid {
            outer_radius: meta.outer_radius,
            grading: meta.grading,
            nodes: meta.cell_boundaries.clone(),
        };
        let space = Arc::new(FemSpace::new(grid, meta.degree, meta.dim)?);
        let values = lines
            .map(|l| {
                l.split(',')
                    .nth(1)
                    .and_then(parse_f64)
                    .ok_or_else(|| crate::Error::InvalidInput(format!("bad row {l:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok((meta, Self::new(space, values)?))
    }
}
