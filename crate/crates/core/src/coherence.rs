//! Coherence, local coherence, covariance and global correlation.
//!
//! Every quantity is a norm of `sum_l S_l x_l` where `x` is a difference of
//! expectation vectors, so the same code serves density matrices and raw
//! measurement data.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::{
    c, dephase, frobenius, partial_trace_matrix, product_of_marginals, schatten1, CMatrix, DensityMatrix,
    Subsystem, NORM_SLACK,
};
use crate::opbasis::ObservableBasis;

/// Reported values below this are returned as exactly zero.
pub const CLAMP: f64 = 1e-12;

fn clamp(v: f64) -> f64 {
    if v < CLAMP {
        0.0
    } else {
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Norm {
    Schatten1,
    Frobenius,
}

impl Norm {
    /// Schatten-1 for complete bases, Frobenius for truncated ones.
    pub fn default_for(basis: &ObservableBasis) -> Norm {
        if basis.is_complete() {
            Norm::Schatten1
        } else {
            Norm::Frobenius
        }
    }

    pub fn apply(self, m: &CMatrix) -> Result<f64> {
        match self {
            Norm::Schatten1 => schatten1(m),
            Norm::Frobenius => Ok(frobenius(m)),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Norm::Schatten1 => "schatten1",
            Norm::Frobenius => "frobenius",
        }
    }
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Norm {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "schatten1" | "schatten-1" | "trace" => Ok(Norm::Schatten1),
            "frobenius" | "hs" => Ok(Norm::Frobenius),
            other => Err(format!("unknown norm '{other}' (expected schatten1 or frobenius)")),
        }
    }
}

/// Norm selection for one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormChoice {
    pub norm: Norm,
    /// Allow Schatten-1 on a truncated basis, where it is not a guaranteed bound.
    pub approximate: bool,
}

impl NormChoice {
    pub fn new(norm: Norm) -> Self {
        Self {
            norm,
            approximate: false,
        }
    }

    pub fn approximate(norm: Norm) -> Self {
        Self {
            norm,
            approximate: true,
        }
    }

    pub fn default_for(basis: &ObservableBasis) -> Self {
        Self::new(Norm::default_for(basis))
    }

    fn check(self, basis: &ObservableBasis) -> Result<()> {
        if !basis.is_complete() && self.norm == Norm::Schatten1 && !self.approximate {
            return Err(Error::IncompatibleNormForBound);
        }
        Ok(())
    }
}

impl From<Norm> for NormChoice {
    fn from(norm: Norm) -> Self {
        NormChoice::new(norm)
    }
}

/// `values[l] = <S_l>` for a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpectationVector {
    pub basis_tag: String,
    pub values: Vec<f64>,
}

impl ExpectationVector {
    pub fn of(basis: &ObservableBasis, rho: &CMatrix) -> Result<Self> {
        Ok(Self {
            basis_tag: basis.tag().to_string(),
            values: basis.expectations(rho)?,
        })
    }

    fn check(&self, basis: &ObservableBasis) -> Result<()> {
        if self.values.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: self.values.len(),
            });
        }
        Ok(())
    }
}

/// `Omega = sum_l <S_l> S_l`, which is the state itself for a complete basis.
pub fn omega_matrix(basis: &ObservableBasis, ev: &ExpectationVector) -> Result<CMatrix> {
    if !basis.is_complete() {
        return Err(Error::IncompleteBasis);
    }
    ev.check(basis)?;
    basis.resum(&ev.values)
}

/// Observable matrix assembled entry by entry from standard-basis data:
/// `Omega_kk' = (e^{i pi/4} <M_kk'> + e^{-i pi/4} <M_k'k>) / (sqrt2 e^{i pi sgn(k'-k)/4})`.
///
/// `values` must be ordered like [`ObservableBasis::standard`].
pub fn omega_from_standard(d: usize, values: &[f64]) -> Result<CMatrix> {
    if values.len() != d * d {
        return Err(Error::DimensionMismatch {
            expected: d * d,
            found: values.len(),
        });
    }
    let q = std::f64::consts::FRAC_PI_4;
    let phase = |theta: f64| c(theta.cos(), theta.sin());
    Ok(CMatrix::from_fn(d, d, |k, kp| {
        let sgn = (kp as f64 - k as f64).signum() * if k == kp { 0.0 } else { 1.0 };
        let num = phase(q) * values[k * d + kp] + phase(-q) * values[kp * d + k];
        num / (phase(q * sgn) * std::f64::consts::SQRT_2)
    }))
}

fn diff(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn measure(basis: &ObservableBasis, coeffs: &[f64], choice: NormChoice) -> Result<f64> {
    Ok(clamp(choice.norm.apply(&basis.resum(coeffs)?)?))
}

fn check_dim(basis: &ObservableBasis, rho: &DensityMatrix) -> Result<()> {
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: basis.dim(),
            found: rho.dim(),
        });
    }
    Ok(())
}

/// `|| sum_l S_l (<S_l>_rho - <S_l>_rho_d) ||`.
pub fn coherence_total(rho: &DensityMatrix, basis: &ObservableBasis, choice: impl Into<NormChoice>) -> Result<f64> {
    let choice = choice.into();
    check_dim(basis, rho)?;
    choice.check(basis)?;
    let e = basis.expectations(rho.matrix())?;
    let ed = basis.expectations(dephase(rho).matrix())?;
    measure(basis, &diff(&e, &ed), choice)
}

/// Frobenius estimator on a truncated basis. A guaranteed lower bound on the
/// full Schatten-1 coherence.
pub fn truncated_coherence(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<f64> {
    if basis.is_complete() {
        return Err(Error::CompleteBasisGiven);
    }
    coherence_total(rho, basis, Norm::Frobenius)
}

/// Coherence of the product of the marginals.
pub fn coherence_local(rho: &DensityMatrix, basis: &ObservableBasis, choice: impl Into<NormChoice>) -> Result<f64> {
    basis.require_factors()?;
    rho.require_split()?;
    coherence_total(&product_of_marginals(rho)?, basis, choice)
}

/// `gamma_lm = <A_l (x) B_m> - <A_l><B_m>`.
#[derive(Clone, Debug, PartialEq)]
pub struct CovarianceMatrix(pub DMatrix<f64>);

impl CovarianceMatrix {
    pub fn from_expectations(joint: &[f64], ea: &[f64], eb: &[f64]) -> Self {
        let (na, nb) = (ea.len(), eb.len());
        Self(DMatrix::from_fn(na, nb, |l, m| joint[l * nb + m] - ea[l] * eb[m]))
    }

    /// Row-major flattening, matching the product basis order.
    pub fn flatten(&self) -> Vec<f64> {
        let (na, nb) = self.0.shape();
        (0..na * nb).map(|k| self.0[(k / nb, k % nb)]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |w, v| w.max(v.abs()))
    }
}

pub fn covariance(rho: &DensityMatrix, basis: &ObservableBasis) -> Result<CovarianceMatrix> {
    check_dim(basis, rho)?;
    let (a, b) = basis.require_factors()?;
    let (da, db) = rho.require_split()?;
    if (da, db) != (a.dim(), b.dim()) {
        return Err(Error::InvalidSplit {
            a: a.dim(),
            b: b.dim(),
            dim: rho.dim(),
        });
    }
    let joint = basis.expectations(rho.matrix())?;
    let ea = a.expectations(&partial_trace_matrix(rho.matrix(), da, db, Subsystem::A))?;
    let eb = b.expectations(&partial_trace_matrix(rho.matrix(), da, db, Subsystem::B))?;
    Ok(CovarianceMatrix::from_expectations(&joint, &ea, &eb))
}

/// `|| sum_lm S_lm (gamma_lm(rho) - gamma_lm(rho_d)) ||`.
pub fn global_correlation(rho: &DensityMatrix, basis: &ObservableBasis, choice: impl Into<NormChoice>) -> Result<f64> {
    let choice = choice.into();
    choice.check(basis)?;
    let g = covariance(rho, basis)?;
    let gd = covariance(&dephase(rho), basis)?;
    measure(basis, &diff(&g.flatten(), &gd.flatten()), choice)
}

/// `|| Omega(rho) - Omega(rho_d) - Omega(pi) + Omega(pi_d) ||`, the form
/// without covariance matrices. Agrees with [`global_correlation`].
pub fn global_correlation_omega(
    rho: &DensityMatrix,
    basis: &ObservableBasis,
    choice: impl Into<NormChoice>,
) -> Result<f64> {
    let choice = choice.into();
    check_dim(basis, rho)?;
    basis.require_factors()?;
    choice.check(basis)?;
    let pi = product_of_marginals(rho)?;
    let e = basis.expectations(rho.matrix())?;
    let ed = basis.expectations(dephase(rho).matrix())?;
    let ep = basis.expectations(pi.matrix())?;
    let epd = basis.expectations(dephase(&pi).matrix())?;
    let x: Vec<f64> = (0..e.len()).map(|l| e[l] - ed[l] - ep[l] + epd[l]).collect();
    measure(basis, &x, choice)
}

/// `C`, `C_L` and `delta` with the slack `C_L + delta - C` of the
/// decomposition inequality.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoherenceReport {
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_L")]
    pub c_l: f64,
    pub delta: f64,
    pub norm: Norm,
    pub truncated: bool,
    pub slack: f64,
}

impl CoherenceReport {
    fn assemble(c: f64, c_l: f64, delta: f64, norm: Norm, truncated: bool) -> Result<Self> {
        let slack = c_l + delta - c;
        if !truncated && norm == Norm::Schatten1 && slack < -NORM_SLACK {
            return Err(Error::DecompositionViolated { slack });
        }
        Ok(Self {
            c,
            c_l,
            delta,
            norm,
            truncated,
            slack,
        })
    }
}

impl fmt::Display for CoherenceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "C         = {:.12}", self.c)?;
        writeln!(f, "C_L       = {:.12}", self.c_l)?;
        writeln!(f, "delta     = {:.12}", self.delta)?;
        writeln!(f, "slack     = {:.12}", self.slack)?;
        writeln!(f, "norm      = {}", self.norm)?;
        write!(f, "truncated = {}", self.truncated)
    }
}

/// All three measures with a product basis.
pub fn report(rho: &DensityMatrix, basis: &ObservableBasis, choice: impl Into<NormChoice>) -> Result<CoherenceReport> {
    let choice = choice.into();
    let c_total = coherence_total(rho, basis, choice)?;
    let c_l = coherence_local(rho, basis, choice)?;
    let delta = global_correlation(rho, basis, choice)?;
    CoherenceReport::assemble(c_total, c_l, delta, choice.norm, !basis.is_complete())
}

/// Measurement data with no density matrix: expectations for the state and
/// for its decohered version.
#[derive(Clone, Debug)]
pub struct ExpectationData {
    pub values: Vec<f64>,
    pub decohered: Vec<f64>,
}

impl ExpectationData {
    /// Decohered expectations from the populations `<k|rho|k>`, using
    /// `<S_l>_rho_d = sum_k p_k <k|S_l|k>`.
    pub fn from_populations(basis: &ObservableBasis, values: Vec<f64>, populations: &[f64]) -> Result<Self> {
        if populations.len() != basis.dim() {
            return Err(Error::DimensionMismatch {
                expected: basis.dim(),
                found: populations.len(),
            });
        }
        let total: f64 = populations.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized { trace: total });
        }
        let d = basis.dim();
        let rho_d = CMatrix::from_fn(d, d, |i, j| c(if i == j { populations[i] } else { 0.0 }, 0.0));
        let decohered = basis.expectations(&rho_d)?;
        Ok(Self { values, decohered })
    }

    fn check(&self, basis: &ObservableBasis) -> Result<()> {
        for v in [&self.values, &self.decohered] {
            if v.len() != basis.len() {
                return Err(Error::DimensionMismatch {
                    expected: basis.len(),
                    found: v.len(),
                });
            }
        }
        Ok(())
    }

    pub fn coherence(&self, basis: &ObservableBasis, choice: impl Into<NormChoice>) -> Result<f64> {
        let choice = choice.into();
        self.check(basis)?;
        choice.check(basis)?;
        measure(basis, &diff(&self.values, &self.decohered), choice)
    }

    /// Full report for a product basis whose factors both span the identity,
    /// so that marginal expectations follow from joint ones.
    pub fn report(&self, basis: &ObservableBasis, choice: impl Into<NormChoice>) -> Result<CoherenceReport> {
        let choice = choice.into();
        self.check(basis)?;
        choice.check(basis)?;
        let (a, b) = basis.require_factors()?;
        let ia = a.identity_coeffs()?;
        let ib = b.identity_coeffs()?;
        let (na, nb) = (a.len(), b.len());
        let marginals = |joint: &[f64]| {
            let ea: Vec<f64> = (0..na).map(|l| (0..nb).map(|m| ib[m] * joint[l * nb + m]).sum()).collect();
            let eb: Vec<f64> = (0..nb).map(|m| (0..na).map(|l| ia[l] * joint[l * nb + m]).sum()).collect();
            (ea, eb)
        };
        let outer = |ea: &[f64], eb: &[f64]| -> Vec<f64> { (0..na * nb).map(|k| ea[k / nb] * eb[k % nb]).collect() };
        let (ea, eb) = marginals(&self.values);
        let (ead, ebd) = marginals(&self.decohered);
        let c_total = measure(basis, &diff(&self.values, &self.decohered), choice)?;
        let c_l = measure(basis, &diff(&outer(&ea, &eb), &outer(&ead, &ebd)), choice)?;
        let g = CovarianceMatrix::from_expectations(&self.values, &ea, &eb);
        let gd = CovarianceMatrix::from_expectations(&self.decohered, &ead, &ebd);
        let delta = measure(basis, &diff(&g.flatten(), &gd.flatten()), choice)?;
        CoherenceReport::assemble(c_total, c_l, delta, choice.norm, !basis.is_complete())
    }
}
