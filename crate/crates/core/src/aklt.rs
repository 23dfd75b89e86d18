//! Two-site reduced density matrix of the generalized AKLT chain and its
//! coherence.
//!
//! The matrix has the fixed 9x9 sparsity pattern
//!
//! ```text
//! a . . . . . . . .
//! . G . m . . . . .
//! . . b . d . . . .
//! . m . G . . . . .
//! . . d . c . d . .
//! . . . . . G . m .
//! . . . . d . b . .
//! . . . . . m . G .
//! . . . . . . . . a
//! ```
//!
//! with `G = |g| c`. Two parameterizations are provided. [`RdmForm::Published`]
//! uses `lambda_{1,2} = 1 +- 2g` and `(g/Lambda_1)^r` verbatim; it only has
//! unit trace for `g >= 0` and loses positivity for large `g`, so it is
//! guarded. [`RdmForm::Consistent`] uses `1 +- 2|g|` and `(sgn g/Lambda_1)^r`,
//! which is a valid state for every `g` and reproduces both closed forms.
//! The two agree at the AKLT point `g = 1`.

use serde::{Deserialize, Serialize};

use crate::coherence::{report, CoherenceReport, Norm, NormChoice};
use crate::error::{Error, Result};
use crate::matcore::{real, trace, CMatrix, DensityMatrix};
use crate::opbasis::ObservableBasis;

/// Neighbourhood of `g = -1/2` rejected as singular.
pub const SINGULAR_EPS: f64 = 1e-6;
const TRACE_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AkltParams {
    pub g: f64,
    pub r: u32,
}

impl AkltParams {
    pub fn new(g: f64, r: u32) -> Result<Self> {
        if !g.is_finite() {
            return Err(Error::InvalidParams(format!("g = {g} is not finite")));
        }
        if r < 2 {
            return Err(Error::InvalidParams(format!("r = {r} must be at least 2")));
        }
        if (1.0 + 2.0 * g).abs() < SINGULAR_EPS {
            return Err(Error::InvalidParams(format!("g = {g} is at the singular point 1 + 2g = 0")));
        }
        Ok(Self { g, r })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RdmForm {
    #[default]
    Consistent,
    Published,
}

impl std::str::FromStr for RdmForm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "consistent" => Ok(RdmForm::Consistent),
            "published" => Ok(RdmForm::Published),
            other => Err(format!("unknown matrix form '{other}' (expected consistent or published)")),
        }
    }
}

/// Entries `(alpha, beta, gamma, delta, mu)` of the reduced density matrix.
pub fn aklt_entries(p: AkltParams, form: RdmForm) -> (f64, f64, f64, f64, f64) {
    let (g, r) = (p.g, p.r as i32);
    let big = 1.0 + 2.0 * g.abs();
    let (l1, l2, s) = match form {
        RdmForm::Published => (1.0 + 2.0 * g, 1.0 - 2.0 * g, (g / big).powi(r)),
        RdmForm::Consistent => {
            let sign = if g > 0.0 {
                1.0
            } else if g < 0.0 {
                -1.0
            } else {
                0.0
            };
            (big, 1.0 - 2.0 * g.abs(), (sign / big).powi(r))
        }
    };
    let alpha = g * g * (l1.powi(r - 2) - l2.powi(r - 2)) / l1.powi(r);
    let beta = g * g * (l1.powi(r - 2) + l2.powi(r - 2)) / l1.powi(r);
    let gamma = 1.0 / (big * big);
    let delta = -g * s;
    let mu = -g.abs() * s;
    (alpha, beta, gamma, delta, mu)
}

pub fn aklt_matrix(p: AkltParams, form: RdmForm) -> CMatrix {
    let (alpha, beta, gamma, delta, mu) = aklt_entries(p, form);
    let flip = p.g.abs() * gamma;
    let mut m = CMatrix::zeros(9, 9);
    for (i, v) in [alpha, flip, beta, flip, gamma, flip, beta, flip, alpha].into_iter().enumerate() {
        m[(i, i)] = real(v);
    }
    for (i, j, v) in [(1, 3, mu), (5, 7, mu), (2, 4, delta), (4, 6, delta)] {
        m[(i, j)] = real(v);
        m[(j, i)] = real(v);
    }
    m
}

/// The reduced density matrix with split `(3, 3)`. The published form fails
/// with [`Error::TraceMismatch`] or [`Error::NotPositive`] outside its range.
pub fn aklt_rdm(p: AkltParams, form: RdmForm) -> Result<DensityMatrix> {
    let m = aklt_matrix(p, form);
    let tr = trace(&m).re;
    if (tr - 1.0).abs() > TRACE_TOL {
        return Err(Error::TraceMismatch { trace: tr });
    }
    DensityMatrix::bipartite(m, 3, 3)
}

pub fn gell_mann_pair() -> ObservableBasis {
    ObservableBasis::product(
        ObservableBasis::gell_mann(3).expect("d = 3"),
        ObservableBasis::gell_mann(3).expect("d = 3"),
    )
}

pub fn spin_pair() -> ObservableBasis {
    ObservableBasis::product(
        ObservableBasis::spin_truncated(2).expect("n = 2"),
        ObservableBasis::spin_truncated(2).expect("n = 2"),
    )
}

pub fn aklt_coherence_numeric(
    p: AkltParams,
    form: RdmForm,
    basis: &ObservableBasis,
    choice: impl Into<NormChoice>,
) -> Result<CoherenceReport> {
    report(&aklt_rdm(p, form)?, basis, choice)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Estimate {
    /// `2(2 + sqrt2) |g| / (1 + 2|g|)^r`
    Full,
    /// `sqrt2 |g + |g|| / (1 + 2|g|)^r`
    Truncated,
}

pub fn aklt_coherence_analytic(p: AkltParams, which: Estimate) -> f64 {
    let denom = (1.0 + 2.0 * p.g.abs()).powi(p.r as i32);
    match which {
        Estimate::Full => 2.0 * (2.0 + std::f64::consts::SQRT_2) * (p.g / denom).abs(),
        Estimate::Truncated => std::f64::consts::SQRT_2 * ((p.g + p.g.abs()) / denom).abs(),
    }
}

/// One row of the coherence-versus-coupling table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AkltRow {
    pub g: f64,
    pub r: u32,
    #[serde(rename = "C_full")]
    pub c_full: f64,
    #[serde(rename = "C_truncated_frobenius")]
    pub c_truncated_frobenius: f64,
    #[serde(rename = "C_truncated_schatten1")]
    pub c_truncated_schatten1: f64,
    #[serde(rename = "C_analytic_full")]
    pub c_analytic_full: f64,
    #[serde(rename = "C_analytic_truncated")]
    pub c_analytic_truncated: f64,
}

pub fn aklt_row(p: AkltParams, form: RdmForm) -> Result<AkltRow> {
    let rho = aklt_rdm(p, form)?;
    let full = gell_mann_pair();
    let spin = spin_pair();
    let total = |b: &ObservableBasis, c: NormChoice| crate::coherence::coherence_total(&rho, b, c);
    Ok(AkltRow {
        g: p.g,
        r: p.r,
        c_full: total(&full, NormChoice::new(Norm::Schatten1))?,
        c_truncated_frobenius: total(&spin, NormChoice::new(Norm::Frobenius))?,
        c_truncated_schatten1: total(&spin, NormChoice::approximate(Norm::Schatten1))?,
        c_analytic_full: aklt_coherence_analytic(p, Estimate::Full),
        c_analytic_truncated: aklt_coherence_analytic(p, Estimate::Truncated),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const GRID: [f64; 8] = [-2.0, -1.0, -0.5, -0.1, 0.1, 0.5, 1.0, 2.0];

    #[test]
    fn aklt_point_entries() {
        let p = AkltParams::new(1.0, 2).unwrap();
        for form in [RdmForm::Consistent, RdmForm::Published] {
            assert_eq!(aklt_entries(p, form).0, 0.0);
        }
        let p3 = AkltParams::new(1.0, 3).unwrap();
        assert_abs_diff_eq!(aklt_entries(p3, RdmForm::Published).3, -1.0 / 27.0, epsilon = 1e-15);
        assert_abs_diff_eq!(aklt_entries(p3, RdmForm::Consistent).3, -1.0 / 27.0, epsilon = 1e-15);
    }

    #[test]
    fn singular_and_short_range_rejected() {
        assert!(matches!(AkltParams::new(-0.5, 2), Err(Error::InvalidParams(_))));
        assert!(matches!(AkltParams::new(-0.5 + 1e-7, 2), Err(Error::InvalidParams(_))));
        assert!(matches!(AkltParams::new(0.3, 1), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn consistent_form_is_a_state_on_the_grid() {
        for g in GRID.iter().filter(|g| **g != -0.5) {
            for r in [2, 3, 5] {
                let rho = aklt_rdm(AkltParams::new(*g, r).unwrap(), RdmForm::Consistent).unwrap();
                assert!(*rho.eigenvalues().unwrap().last().unwrap() >= -1e-9);
            }
        }
    }

    #[test]
    fn published_form_is_guarded_for_negative_g() {
        let p = AkltParams::new(-1.0, 3).unwrap();
        assert!(matches!(aklt_rdm(p, RdmForm::Published), Err(Error::TraceMismatch { .. })));
        let p = AkltParams::new(2.0, 2).unwrap();
        assert!(matches!(aklt_rdm(p, RdmForm::Published), Err(Error::NotPositive { .. })));
    }

    #[test]
    fn analytic_examples() {
        let p = AkltParams::new(1.0, 2).unwrap();
        assert_abs_diff_eq!(
            aklt_coherence_analytic(p, Estimate::Full),
            2.0 * (2.0 + 2f64.sqrt()) / 9.0,
            epsilon = 1e-15
        );
        for r in [2, 3, 7] {
            assert_eq!(aklt_coherence_analytic(AkltParams::new(-0.3, r).unwrap(), Estimate::Truncated), 0.0);
        }
        assert_eq!(aklt_coherence_analytic(AkltParams::new(0.0, 2).unwrap(), Estimate::Full), 0.0);
    }

    #[test]
    fn numeric_report_has_no_local_part() {
        let p = AkltParams::new(0.5, 3).unwrap();
        let r = aklt_coherence_numeric(p, RdmForm::Consistent, &gell_mann_pair(), Norm::Schatten1).unwrap();
        assert_eq!(r.c_l, 0.0);
        assert_abs_diff_eq!(r.delta, r.c, epsilon = 1e-12);
        assert_abs_diff_eq!(r.c, aklt_coherence_analytic(p, Estimate::Full), epsilon = 1e-10);
    }

    #[test]
    fn truncated_basis_vanishes_for_non_positive_g() {
        for g in [-2.0, -0.1, 0.0] {
            let p = AkltParams::new(g, 3).unwrap();
            let row = aklt_row(p, RdmForm::Consistent).unwrap();
            assert_eq!(row.c_truncated_frobenius, 0.0);
            assert_eq!(row.c_truncated_schatten1, 0.0);
        }
    }
}
