//! Two collective spins under two-axis squeezing with `S^z` dephasing.
//!
//! The master equation is used in the form
//! `d rho/dt = -i[H, rho] - (Gamma/2) sum_O (rho O^dag O + O^dag O rho - 2 O rho O^dag)`,
//! which is the standard dissipator with rate `Gamma`. Jump operators are
//! diagonal in the Dicke basis, so the dissipator is an entrywise decay.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{report, CoherenceReport, NormChoice};
use crate::error::{Error, Result};
use crate::matcore::{c, hermiticity_residual, real, tensor, trace, CMatrix, DensityMatrix, C64};
use crate::opbasis::{collective_spin, ObservableBasis};

/// Trace drift beyond which integration is abandoned.
pub const MAX_TRACE_DRIFT: f64 = 1e-6;

/// Collective operators of one ensemble of `n` qubits in the symmetric subspace.
#[derive(Clone, Debug)]
pub struct DickeSystem {
    pub n: usize,
    pub sz: CMatrix,
    pub sp: CMatrix,
    pub sm: CMatrix,
}

impl DickeSystem {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        let (sz, sp) = collective_spin(n)?;
        let sm = sp.adjoint();
        Ok(Self { n, sz, sp, sm })
    }

    pub fn dim_local(&self) -> usize {
        self.n + 1
    }

    pub fn dim_joint(&self) -> usize {
        self.dim_local() * self.dim_local()
    }

    /// `H = S+_A S+_B + S-_A S-_B`.
    pub fn squeezing_hamiltonian(&self) -> CMatrix {
        tensor(&self.sp, &self.sp) + tensor(&self.sm, &self.sm)
    }

    /// Fully polarized `|S^z = n>|S^z = n>`.
    pub fn polarized_state(&self) -> DensityMatrix {
        let mut psi = vec![real(0.0); self.dim_joint()];
        psi[0] = real(1.0);
        DensityMatrix::from_pure(&psi)
            .and_then(|r| r.with_split(self.dim_local(), self.dim_local()))
            .expect("basis vector is a valid state")
    }

    pub fn jump_ops(&self, mode: DephaseMode) -> Vec<CMatrix> {
        let id = CMatrix::identity(self.dim_local(), self.dim_local());
        let a = tensor(&self.sz, &id);
        let b = tensor(&id, &self.sz);
        match mode {
            DephaseMode::Both => vec![a, b],
            DephaseMode::Joint => vec![a + b],
        }
    }
}

/// Dense right-hand side of the master equation.
pub fn lindblad_rhs(rho: &CMatrix, h: &CMatrix, jumps: &[CMatrix], gamma: f64) -> Result<CMatrix> {
    let d = rho.nrows();
    for m in std::iter::once(h).chain(jumps) {
        if m.nrows() != d || m.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: m.nrows(),
            });
        }
    }
    let mi = c(0.0, -1.0);
    let mut out = (h * rho - rho * h) * mi;
    for o in jumps {
        let od = o.adjoint();
        let odo = &od * o;
        let l = rho * &odo + &odo * rho - (o * rho * &od).scale(2.0);
        out -= l.scale(gamma / 2.0);
    }
    Ok(out)
}

/// Whether dephasing acts on each ensemble separately or on the total `S^z`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DephaseMode {
    #[default]
    Both,
    Joint,
}

impl fmt::Display for DephaseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DephaseMode::Both => "both",
            DephaseMode::Joint => "joint",
        })
    }
}

impl FromStr for DephaseMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "both" => Ok(DephaseMode::Both),
            "joint" => Ok(DephaseMode::Joint),
            other => Err(format!("unknown dephase mode '{other}' (expected both or joint)")),
        }
    }
}

/// Generator with a sparse Hamiltonian and diagonal jump operators.
struct DiagonalJumpGenerator {
    dim: usize,
    h: Vec<(usize, usize, C64)>,
    decay: Vec<f64>,
}

impl DiagonalJumpGenerator {
    fn new(h: &CMatrix, jumps: &[CMatrix], gamma: f64) -> Result<Self> {
        let dim = h.nrows();
        let mut entries = Vec::new();
        for i in 0..dim {
            for j in 0..dim {
                if h[(i, j)].norm() > 0.0 {
                    entries.push((i, j, h[(i, j)]));
                }
            }
        }
        let mut decay = vec![0.0; dim * dim];
        for o in jumps {
            if (0..dim).any(|i| (0..dim).any(|j| i != j && o[(i, j)].norm() > 0.0)) {
                return Err(Error::InvalidParams("jump operators must be diagonal".into()));
            }
            let diag: Vec<C64> = (0..dim).map(|i| o[(i, i)]).collect();
            for i in 0..dim {
                for j in 0..dim {
                    decay[i * dim + j] -= 0.5 * gamma * (diag[i] - diag[j]).norm_sqr();
                }
            }
        }
        Ok(Self { dim, h: entries, decay })
    }

    fn rhs(&self, rho: &CMatrix, out: &mut CMatrix) {
        let d = self.dim;
        for i in 0..d {
            for j in 0..d {
                out[(i, j)] = rho[(i, j)] * self.decay[i * d + j];
            }
        }
        let mi = c(0.0, -1.0);
        for &(i, k, hik) in &self.h {
            let f = mi * hik;
            // -i H rho: row i gains H_ik rho[k, :]; +i rho H: column k gains rho[:, i] H_ik.
            for j in 0..d {
                out[(i, j)] += f * rho[(k, j)];
                out[(j, k)] -= f * rho[(j, i)];
            }
        }
    }
}

/// Basis used for the coherence curves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SqueezeBasis {
    /// Complete Gell-Mann product basis on `(n+1) x (n+1)`.
    #[default]
    Full,
    /// Collective-spin product basis `{I, Sx, Sy, Sz}` per ensemble.
    Truncated,
}

impl SqueezeBasis {
    pub fn build(self, n: usize) -> Result<ObservableBasis> {
        let factor = || match self {
            SqueezeBasis::Full => ObservableBasis::gell_mann(n + 1),
            SqueezeBasis::Truncated => ObservableBasis::spin_truncated(n),
        };
        Ok(ObservableBasis::product(factor()?, factor()?))
    }
}

impl FromStr for SqueezeBasis {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "full" => Ok(SqueezeBasis::Full),
            "truncated" => Ok(SqueezeBasis::Truncated),
            other => Err(format!("unknown basis choice '{other}' (expected full or truncated)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SqueezingConfig {
    pub n: usize,
    pub gamma: f64,
    pub t_max: f64,
    pub dt: f64,
    pub sample_every: f64,
    pub dephase: DephaseMode,
    pub basis: SqueezeBasis,
    /// Defaults to Schatten-1 for the full basis and Frobenius otherwise.
    pub norm: Option<NormChoice>,
}

impl SqueezingConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            gamma: 1.0,
            t_max: 2.0,
            dt: 1e-3,
            sample_every: 0.01,
            dephase: DephaseMode::Both,
            basis: SqueezeBasis::Full,
            norm: None,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=10).contains(&self.n) {
            return Err(Error::InvalidParams(format!("n = {} outside 1..=10", self.n)));
        }
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if !(positive(self.dt) && positive(self.sample_every) && self.t_max.is_finite() && self.t_max >= 0.0) {
            return Err(Error::InvalidParams("dt, sample_every must be positive and t_max non-negative".into()));
        }
        if !(self.gamma.is_finite() && self.gamma >= 0.0) {
            return Err(Error::InvalidParams("gamma must be non-negative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    pub reports: Vec<CoherenceReport>,
    pub basis_tag: String,
    pub max_trace_drift: f64,
    pub max_hermiticity_residual: f64,
}

impl Trajectory {
    /// First sampled local maximum of `C(t)` after the initial rise.
    pub fn first_peak(&self) -> Option<(f64, f64)> {
        let c: Vec<f64> = self.reports.iter().map(|r| r.c).collect();
        (1..c.len().saturating_sub(1))
            .find(|&i| c[i] > 0.0 && c[i] >= c[i - 1] && c[i] > c[i + 1])
            .map(|i| (self.times[i], c[i]))
    }
}

/// Integrates the squeezing dynamics from the polarized state with classical
/// RK4 and evaluates coherence reports at the sample times.
pub fn evolve_squeezing(cfg: &SqueezingConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let sys = DickeSystem::new(cfg.n)?;
    let dl = sys.dim_local();
    let generator = DiagonalJumpGenerator::new(&sys.squeezing_hamiltonian(), &sys.jump_ops(cfg.dephase), cfg.gamma)?;
    let steps_per_sample = (cfg.sample_every / cfg.dt).round().max(1.0) as usize;
    let n_samples = (cfg.t_max / (cfg.dt * steps_per_sample as f64) + 1e-9).floor() as usize;
    let d = sys.dim_joint();

    let mut rho = sys.polarized_state().into_matrix();
    let mut k1 = CMatrix::zeros(d, d);
    let mut k2 = CMatrix::zeros(d, d);
    let mut k3 = CMatrix::zeros(d, d);
    let mut k4 = CMatrix::zeros(d, d);
    let mut times = vec![0.0];
    let mut raw = vec![rho.clone()];
    let (mut drift, mut herm) = (0.0f64, 0.0f64);
    let h = cfg.dt;
    for s in 1..=n_samples {
        for _ in 0..steps_per_sample {
            generator.rhs(&rho, &mut k1);
            generator.rhs(&(&rho + k1.scale(h / 2.0)), &mut k2);
            generator.rhs(&(&rho + k2.scale(h / 2.0)), &mut k3);
            generator.rhs(&(&rho + k3.scale(h)), &mut k4);
            rho += (&k1 + k2.scale(2.0) + k3.scale(2.0) + &k4).scale(h / 6.0);
        }
        drift = drift.max((trace(&rho) - real(1.0)).norm());
        herm = herm.max(hermiticity_residual(&rho));
        if drift > MAX_TRACE_DRIFT || !drift.is_finite() {
            return Err(Error::IntegrationUnstable { drift });
        }
        times.push(s as f64 * steps_per_sample as f64 * h);
        raw.push(rho.clone());
    }

    let basis = cfg.basis.build(cfg.n)?;
    let choice = cfg.norm.unwrap_or_else(|| NormChoice::default_for(&basis));
    let states: Vec<DensityMatrix> = raw
        .into_iter()
        .map(|m| DensityMatrix::from_trusted(m, Some((dl, dl))))
        .collect();
    let reports = states
        .par_iter()
        .map(|s| report(s, &basis, choice))
        .collect::<Result<Vec<_>>>()?;
    Ok(Trajectory {
        times,
        states,
        reports,
        basis_tag: basis.tag().to_string(),
        max_trace_drift: drift,
        max_hermiticity_residual: herm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::{partial_trace_matrix, Subsystem};
    use approx::assert_abs_diff_eq;

    fn max_abs(m: &CMatrix) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn dicke_small_cases() {
        let s1 = DickeSystem::new(1).unwrap();
        assert_eq!(s1.sz[(0, 0)], real(1.0));
        assert_eq!(s1.sz[(1, 1)], real(-1.0));
        assert_eq!(s1.sp[(0, 1)], real(1.0));
        let s2 = DickeSystem::new(2).unwrap();
        assert_eq!(
            (0..3).map(|i| s2.sz[(i, i)].re).collect::<Vec<_>>(),
            vec![2.0, 0.0, -2.0]
        );
        assert!(DickeSystem::new(0).is_err());
    }

    #[test]
    fn commutator_and_casimir() {
        for n in 1..=6 {
            let s = DickeSystem::new(n).unwrap();
            let comm = &s.sz * &s.sp - &s.sp * &s.sz;
            assert!(max_abs(&(comm - s.sp.scale(2.0))) < 1e-12);
            // S_x^2 + S_y^2 = 2(S+S- + S-S+) in the Pauli-sum convention.
            let casimir = (&s.sp * &s.sm + &s.sm * &s.sp).scale(2.0) + &s.sz * &s.sz;
            let target = CMatrix::identity(n + 1, n + 1).scale((n * (n + 2)) as f64);
            assert!(max_abs(&(casimir - target)) < 1e-12, "n = {n}");
        }
    }

    #[test]
    fn rhs_trivial_cases() {
        let rho = DensityMatrix::from_pure(&[real(0.6), c(0.0, 0.8)]).unwrap().into_matrix();
        let zero = CMatrix::zeros(2, 2);
        assert_eq!(lindblad_rhs(&rho, &zero, &[], 0.0).unwrap(), zero);
        let sz = DickeSystem::new(1).unwrap().sz;
        let diag = CMatrix::from_diagonal(&rho.diagonal());
        assert!(max_abs(&lindblad_rhs(&diag, &zero, &[sz], 1.0).unwrap()) < 1e-15);
    }

    #[test]
    fn rhs_is_trace_free_and_hermitian() {
        let sys = DickeSystem::new(2).unwrap();
        let mut rng = crate::random::trial_rng(3, 0);
        let rho = crate::random::random_density(9, 9, &mut rng).unwrap().into_matrix();
        let out = lindblad_rhs(&rho, &sys.squeezing_hamiltonian(), &sys.jump_ops(DephaseMode::Both), 1.3).unwrap();
        assert!(trace(&out).norm() < 1e-12);
        assert!(hermiticity_residual(&out) < 1e-12);
        let generator =
            DiagonalJumpGenerator::new(&sys.squeezing_hamiltonian(), &sys.jump_ops(DephaseMode::Both), 1.3).unwrap();
        let mut fast = CMatrix::zeros(9, 9);
        generator.rhs(&rho, &mut fast);
        assert!(max_abs(&(fast - out)) < 1e-12);
    }

    #[test]
    fn single_qubit_dephasing_decays_as_exp_minus_2t() {
        let sz = DickeSystem::new(1).unwrap().sz;
        let generator = DiagonalJumpGenerator::new(&CMatrix::zeros(2, 2), &[sz], 1.0).unwrap();
        let mut rho = CMatrix::from_element(2, 2, real(0.5));
        let h = 1e-3;
        let mut k = [CMatrix::zeros(2, 2), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2), CMatrix::zeros(2, 2)];
        for _ in 0..1000 {
            generator.rhs(&rho, &mut k[0]);
            generator.rhs(&(&rho + k[0].scale(h / 2.0)), &mut k[1]);
            generator.rhs(&(&rho + k[1].scale(h / 2.0)), &mut k[2]);
            generator.rhs(&(&rho + k[2].scale(h)), &mut k[3]);
            rho += (&k[0] + k[1].scale(2.0) + k[2].scale(2.0) + &k[3]).scale(h / 6.0);
        }
        assert_abs_diff_eq!(rho[(0, 1)].re, 0.5 * (-2.0f64).exp(), epsilon = 1e-12);
        assert_abs_diff_eq!(rho[(0, 0)].re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn two_qubit_rabi_without_dephasing() {
        let mut cfg = SqueezingConfig::new(1);
        cfg.gamma = 0.0;
        cfg.t_max = 1.0;
        cfg.sample_every = 0.1;
        let traj = evolve_squeezing(&cfg).unwrap();
        for (t, s) in traj.times.iter().zip(&traj.states) {
            // psi(t) = cos t |00> - i sin t |11>
            let psi = [real(t.cos()), real(0.0), real(0.0), c(0.0, -t.sin())];
            let exact = DensityMatrix::from_pure(&psi).unwrap();
            assert!(max_abs(&(s.matrix() - exact.matrix())) < 1e-12, "t = {t}");
        }
    }

    #[test]
    fn strong_dephasing_suppresses_coherence() {
        let mut cfg = SqueezingConfig::new(2);
        cfg.gamma = 200.0;
        cfg.dt = 1e-4;
        cfg.t_max = 0.05;
        let traj = evolve_squeezing(&cfg).unwrap();
        assert_eq!(traj.reports[0].c, 0.0);
        assert!(traj.reports.iter().all(|r| r.c < 0.05));
    }

    #[test]
    fn marginals_stay_diagonal() {
        let mut cfg = SqueezingConfig::new(3);
        cfg.t_max = 0.5;
        let traj = evolve_squeezing(&cfg).unwrap();
        for s in &traj.states {
            for keep in [Subsystem::A, Subsystem::B] {
                let r = partial_trace_matrix(s.matrix(), 4, 4, keep);
                let off = (0..4)
                    .flat_map(|i| (0..4).map(move |j| (i, j)))
                    .filter(|(i, j)| i != j)
                    .map(|(i, j)| r[(i, j)].norm())
                    .fold(0.0, f64::max);
                assert!(off < 1e-9);
            }
        }
    }

    #[test]
    fn halving_dt_changes_little() {
        let mut cfg = SqueezingConfig::new(2);
        cfg.t_max = 0.3;
        cfg.sample_every = 0.1;
        let coarse = evolve_squeezing(&cfg).unwrap();
        cfg.dt /= 2.0;
        let fine = evolve_squeezing(&cfg).unwrap();
        for (a, b) in coarse.reports.iter().zip(&fine.reports) {
            assert!((a.c - b.c).abs() < 1e-6);
        }
    }

    #[test]
    fn larger_ensembles_give_finite_reports() {
        // Early n = 8 states once tripped the eigensolver into NaN.
        let mut cfg = SqueezingConfig::new(8);
        cfg.t_max = 0.05;
        let t = evolve_squeezing(&cfg).unwrap();
        assert!(t.reports.iter().all(|r| r.c.is_finite() && r.delta.is_finite()));
        assert!(t.reports[1].c > 0.0);
    }

    #[test]
    fn bad_config_is_rejected() {
        assert!(evolve_squeezing(&SqueezingConfig::new(11)).is_err());
        let mut cfg = SqueezingConfig::new(2);
        cfg.dt = 0.0;
        assert!(matches!(evolve_squeezing(&cfg), Err(Error::InvalidParams(_))));
    }
}
