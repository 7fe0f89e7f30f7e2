//! Radial grids refined geometrically toward the origin.

use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

/// Cell boundaries 0 < nodes[0] < ... < nodes[n-1] = R; the first cell is
/// [0, nodes[0]].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GradedRadialGrid {
    pub outer_radius: f64,
    pub grading: f64,
    pub nodes: Vec<f64>,
}

impl GradedRadialGrid {
    /// Boundaries R sigma^{n-1}, ..., R sigma, R.
    pub fn build(outer_radius: f64, cells: usize, grading: f64) -> Result<Self> {
        if !(outer_radius > 0.0 && outer_radius.is_finite()) {
            return invalid(format!("outer radius must be positive, got {outer_radius}"));
        }
        if cells == 0 {
            return invalid("grid needs at least one cell");
        }
        if !(grading > 0.0 && grading < 1.0) {
            return invalid(format!("grading factor must lie in (0, 1), got {grading}"));
        }
        let nodes = (0..cells)
            .map(|i| outer_radius * grading.powi((cells - 1 - i) as i32))
            .collect();
        Ok(Self {
            outer_radius,
            grading,
            nodes,
        })
    }

    /// Splits every cell wider than `max_width` into equal parts.
    pub fn with_max_width(&self, max_width: f64) -> Result<Self> {
        if !(max_width > 0.0) {
            return invalid("maximum cell width must be positive");
        }
        let mut nodes = Vec::with_capacity(self.nodes.len());
        let mut left = 0.0;
        for &right in &self.nodes {
            let parts = ((right - left) / max_width).ceil().max(1.0) as usize;
            for k in 1..parts {
                nodes.push(left + (right - left) * k as f64 / parts as f64);
            }
            nodes.push(right);
            left = right;
        }
        Ok(Self {
            outer_radius: self.outer_radius,
            grading: self.grading,
            nodes,
        })
    }

    /// Splits every cell into `parts` equal pieces.
    pub fn subdivide(&self, parts: usize) -> Self {
        let mut nodes = Vec::with_capacity(self.nodes.len() * parts);
        let mut left = 0.0;
        for &right in &self.nodes {
            for k in 1..parts {
                nodes.push(left + (right - left) * k as f64 / parts as f64);
            }
            nodes.push(right);
            left = right;
        }
        Self {
            outer_radius: self.outer_radius,
            grading: self.grading,
            nodes,
        }
    }

    pub fn cells(&self) -> usize {
        self.nodes.len()
    }

    /// Cell boundaries including the origin.
    pub fn boundaries(&self) -> Vec<f64> {
        std::iter::once(0.0)
            .chain(self.nodes.iter().copied())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_nodes() {
        let g = GradedRadialGrid::build(1.0, 4, 0.5).unwrap();
        assert_eq!(g.nodes, vec![0.125, 0.25, 0.5, 1.0]);
        let h = g.with_max_width(0.3).unwrap();
        assert_eq!(h.nodes, vec![0.125, 0.25, 0.5, 0.75, 1.0]);
        assert!(GradedRadialGrid::build(1.0, 4, 1.5).is_err());
        assert_eq!(g.subdivide(2).cells(), 8);
    }
}
