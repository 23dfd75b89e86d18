//! The separable/entangled mixture `(1-mu)|Psi_S><Psi_S| + mu |Psi_E><Psi_E|`
//! on two `d`-level systems, with `Psi_S` the uniform product state and
//! `Psi_E` the maximally entangled state.

use serde::{Deserialize, Serialize};

use crate::coherence::{report, Norm};
use crate::error::{Error, Result};
use crate::matcore::{real, DensityMatrix};
use crate::opbasis::ObservableBasis;

/// `(sum_k |k>)(sum_k |k>) / d`.
pub fn uniform_product(d: usize) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&vec![real(1.0); d * d])?.with_split(d, d)
}

/// `sum_k |k>|k> / sqrt(d)`.
pub fn max_entangled(d: usize) -> Result<DensityMatrix> {
    let mut psi = vec![real(0.0); d * d];
    for k in 0..d {
        psi[k * d + k] = real(1.0);
    }
    DensityMatrix::from_pure(&psi)?.with_split(d, d)
}

pub fn mixture_family(d: usize, mu: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::DomainError(format!("mu = {mu} must lie in [0, 1]")));
    }
    if d < 2 {
        return Err(Error::InvalidDimension(d));
    }
    DensityMatrix::mixture(&[(1.0 - mu, &uniform_product(d)?), (mu, &max_entangled(d)?)])
}

/// Full-basis report plus, for qutrits and larger, the truncated
/// collective-spin estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyRow {
    pub mu: f64,
    #[serde(rename = "C")]
    pub c: f64,
    #[serde(rename = "C_L")]
    pub c_l: f64,
    pub delta: f64,
    #[serde(rename = "C_trunc", skip_serializing_if = "Option::is_none")]
    pub c_trunc: Option<f64>,
    #[serde(rename = "C_L_trunc", skip_serializing_if = "Option::is_none")]
    pub c_l_trunc: Option<f64>,
    #[serde(rename = "delta_trunc", skip_serializing_if = "Option::is_none")]
    pub delta_trunc: Option<f64>,
}

/// Pauli (d = 2) or Gell-Mann product basis for the full report.
pub fn full_basis(d: usize) -> Result<ObservableBasis> {
    if d == 2 {
        Ok(ObservableBasis::product(ObservableBasis::pauli(), ObservableBasis::pauli()))
    } else {
        Ok(ObservableBasis::product(ObservableBasis::gell_mann(d)?, ObservableBasis::gell_mann(d)?))
    }
}

pub fn family_row(d: usize, mu: f64, with_truncated: bool) -> Result<FamilyRow> {
    let rho = mixture_family(d, mu)?;
    let full = report(&rho, &full_basis(d)?, Norm::Schatten1)?;
    let trunc = if with_truncated {
        let spin = ObservableBasis::spin_truncated(d - 1)?;
        let basis = ObservableBasis::product(spin.clone(), spin);
        Some(report(&rho, &basis, Norm::Frobenius)?)
    } else {
        None
    };
    Ok(FamilyRow {
        mu,
        c: full.c,
        c_l: full.c_l,
        delta: full.delta,
        c_trunc: trunc.as_ref().map(|r| r.c),
        c_l_trunc: trunc.as_ref().map(|r| r.c_l),
        delta_trunc: trunc.as_ref().map(|r| r.delta),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{partial_trace_matrix, product_of_marginals, schatten1, dephase, Subsystem};
    use approx::assert_abs_diff_eq;

    #[test]
    fn qubit_endpoints() {
        let a = family_row(2, 0.0, false).unwrap();
        assert_abs_diff_eq!(a.c, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(a.c_l, 1.5, epsilon = 1e-12);
        assert_eq!(a.delta, 0.0);
        let b = family_row(2, 1.0, false).unwrap();
        assert_abs_diff_eq!(b.c, 1.0, epsilon = 1e-12);
        assert_eq!(b.c_l, 0.0);
        assert_abs_diff_eq!(b.delta, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_matches_index_loops() {
        let rho = mixture_family(2, 0.5).unwrap();
        let m = rho.matrix();
        let fast = partial_trace_matrix(m, 2, 2, Subsystem::A);
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = real(0.0);
                for k in 0..2 {
                    acc += m[(2 * i + k, 2 * j + k)];
                }
                assert!((fast[(i, j)] - acc).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn local_coherence_matches_explicit_product_state() {
        let rho = mixture_family(2, 0.5).unwrap();
        let pi = product_of_marginals(&rho).unwrap();
        let direct = schatten1(&(pi.matrix() - dephase(&pi).matrix())).unwrap();
        assert_abs_diff_eq!(family_row(2, 0.5, false).unwrap().c_l, direct, epsilon = 1e-12);
    }

    #[test]
    fn qutrit_endpoints_and_ordering() {
        assert_abs_diff_eq!(family_row(3, 0.0, true).unwrap().c, 16.0 / 9.0, epsilon = 1e-10);
        assert_abs_diff_eq!(family_row(3, 1.0, true).unwrap().c, 4.0 / 3.0, epsilon = 1e-10);
        let row = family_row(3, 0.4, true).unwrap();
        assert!(row.c_trunc.unwrap() <= row.c + 1e-12);
    }
}
