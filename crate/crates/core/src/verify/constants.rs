//! Named constants of the regularity argument: closed forms, reference
//! combinations, and slots for numerically fitted values.

use crate::combinatorics::GOLDEN;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};
use std::f64::consts::{E, PI};

/// Where a constant's value comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// evaluated from a closed form
    Formula,
    /// smallest value covering a numerical test suite
    Fitted,
    /// classical constant without a closed form, estimated on test instances
    External,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

impl Constant {
    pub fn formula(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Formula,
        }
    }
}

/// All constants with their provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstantsLedger {
    pub dim: usize,
    pub p: f64,
    pub gamma: f64,
    pub c_interp: Constant,
    pub c_reg_p: Constant,
    pub c_s_p: Constant,
    pub c_phi: f64,
    pub c_v: f64,
    pub c_1: Constant,
    /// reference combination 4 pi C_Phi^2 + pi C_1 zeta(3/2) + 16 pi C_S C_Phi^2 + 4 pi C_Phi
    pub c_2_p: Constant,
    /// (d+1)/2 C_interp e^{theta+1} C_Phi C_2 + 4 pi C_Phi C_2 + 4 pi (d+1) C_interp e^theta C_Phi^2
    pub c_3_p: Constant,
    pub c_4: Constant,
    /// (2/3)(d/p)
    pub theta: f64,
    /// (2/3)(gamma - 2)
    pub gamma_tilde: f64,
    /// golden ratio
    pub frak_f: f64,
    pub zeta_3_2: f64,
}

/// (2/3)(d/p).
pub fn theta(dim: usize, p: f64) -> f64 {
    2.0 / 3.0 * dim as f64 / p
}

/// (2/3)(gamma - 2).
pub fn gamma_tilde(gamma: f64) -> f64 {
    2.0 / 3.0 * (gamma - 2.0)
}

/// ((d+1)^2/2) C_interp^2 e^{2 theta + 1} C_Phi^2
///   + 2 (d+1) (4 pi)^{1/(2d)} C_interp e^theta C_Phi^2.
pub fn c1_closed_form(c_interp: f64, c_phi: f64, dim: usize, p: f64) -> f64 {
    let d1 = dim as f64 + 1.0;
    let th = theta(dim, p);
    0.5 * d1 * d1 * c_interp * c_interp * (2.0 * th + 1.0).exp() * c_phi * c_phi
        + 2.0 * d1 * (4.0 * PI).powf(1.0 / (2.0 * dim as f64)) * c_interp * th.exp() * c_phi * c_phi
}

/// (e/(2 sqrt(2 pi)) + 4 pi e + 1) C_V C_Phi.
pub fn c4_closed_form(c_v: f64, c_phi: f64) -> f64 {
    (E / (2.0 * (2.0 * PI).sqrt()) + 4.0 * PI * E + 1.0) * c_v * c_phi
}

/// Reference value of C_2: the constant assembled at the end of the bound on
/// the pair potentials.
pub fn c2_reference(c_1: f64, c_s: f64, c_phi: f64) -> f64 {
    4.0 * PI * c_phi * c_phi
        + PI * c_1 * zeta_3_2()
        + 16.0 * PI * c_s * c_phi * c_phi
        + 4.0 * PI * c_phi
}

/// C_3 as assembled from C_2 in the bound on u_ab phi products.
pub fn c3_reference(c_interp: f64, c_phi: f64, c_2: f64, dim: usize, p: f64) -> f64 {
    let d1 = dim as f64 + 1.0;
    let th = theta(dim, p);
    0.5 * d1 * c_interp * (th + 1.0).exp() * c_phi * c_2
        + 4.0 * PI * c_phi * c_2
        + d1 * 4.0 * PI * c_interp * c_phi * th.exp() * c_phi
}

/// Terms summed directly before the tail correction.
const ZETA_TERMS: u32 = 2000;

/// zeta(3/2) by direct summation of n^{-3/2} for n < N plus the
/// Euler-Maclaurin tail  2/sqrt(N) + N^{-3/2}/2 + N^{-5/2}/8.
/// The neglected remainder is below N^{-9/2} / 100 < 1e-16.
pub fn zeta_3_2() -> f64 {
    let n = ZETA_TERMS as f64;
    // sum small terms first
    let head: f64 = (1..ZETA_TERMS).rev().map(|k| (k as f64).powf(-1.5)).sum();
    head + 2.0 / n.sqrt() + 0.5 * n.powf(-1.5) + 0.125 * n.powf(-2.5)
}

/// Fills the ledger. C_interp, C_reg and C_S are taken as given (normally the
/// fitted values from the inequality suites); C_1, C_4 are closed forms and
/// C_2, C_3 the reference combinations.
pub fn lemma_constants(
    c_interp: f64,
    c_phi: f64,
    c_v: f64,
    dim: usize,
    p: f64,
    gamma: f64,
) -> Result<ConstantsLedger> {
    if !(2..=3).contains(&dim) {
        return invalid(format!("dimension must be 2 or 3, got {dim}"));
    }
    if !(p.is_finite() && p >= 2.0 * dim as f64 / 3.0) {
        return invalid(format!("p must satisfy p >= 2d/3, got {p}"));
    }
    if !(c_interp > 0.0 && c_phi >= 1.0 && c_v > 0.0) {
        return invalid("need C_interp > 0, C_Phi >= 1 and C_V > 0");
    }
    if !gamma.is_finite() {
        return invalid("gamma must be finite");
    }
    let c_s = 1.0;
    let c_1 = c1_closed_form(c_interp, c_phi, dim, p);
    let c_2 = c2_reference(c_1, c_s, c_phi);
    Ok(ConstantsLedger {
        dim,
        p,
        gamma,
        c_interp: Constant {
            value: c_interp,
            provenance: Provenance::Fitted,
        },
        c_reg_p: Constant {
            value: 1.0,
            provenance: Provenance::Fitted,
        },
        c_s_p: Constant {
            value: c_s,
            provenance: Provenance::External,
        },
        c_phi,
        c_v,
        c_1: Constant::formula(c_1),
        c_2_p: Constant::formula(c_2),
        c_3_p: Constant::formula(c3_reference(c_interp, c_phi, c_2, dim, p)),
        c_4: Constant::formula(c4_closed_form(c_v, c_phi)),
        theta: theta(dim, p),
        gamma_tilde: gamma_tilde(gamma),
        frak_f: GOLDEN,
        zeta_3_2: zeta_3_2(),
    })
}

impl ConstantsLedger {
    /// Installs fitted C_reg (floored at 1) and the estimated C_S, and
    /// recomputes the reference combinations that depend on them.
    pub fn with_fitted(mut self, c_reg: f64, c_s: f64) -> Self {
        self.c_reg_p = Constant {
            value: c_reg.max(1.0),
            provenance: Provenance::Fitted,
        };
        self.c_s_p = Constant {
            value: c_s,
            provenance: Provenance::External,
        };
        let c_2 = c2_reference(self.c_1.value, c_s, self.c_phi);
        self.c_2_p = Constant::formula(c_2);
        self.c_3_p = Constant::formula(c3_reference(
            self.c_interp.value,
            self.c_phi,
            c_2,
            self.dim,
            self.p,
        ));
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zeta_matches_reference() {
        assert!((zeta_3_2() - 2.612_375_348_685_488).abs() < 1e-12);
    }

    #[test]
    fn theta_and_gamma_tilde() {
        assert!((theta(3, 6.0) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(gamma_tilde(2.0), 0.0);
    }
}
