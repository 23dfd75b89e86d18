//! Kraus channels, incoherent operations and the randomized campaigns that
//! probe the coherence axioms and the truncated-basis bounds.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coherence::{coherence_total, global_correlation, Norm};
use crate::error::{Error, Result};
use crate::matcore::{c, dephase, real, trace, CMatrix, DensityMatrix, C64, TOL_TRACE};
use crate::opbasis::ObservableBasis;
use crate::random::{random_density, random_orthogonal, random_pure, random_unit_vector, trial_rng};

/// Outcomes with probability below this are dropped.
pub const Q_CUTOFF: f64 = 1e-14;
/// Slack allowed on `sum_n q_n C(sigma_n) <= C(rho)`.
pub const C2B_SLACK: f64 = 1e-9;
/// Tie tolerance for the truncation norm comparison.
pub const SCAN_TOL: f64 = 1e-12;

/// A channel given by Kraus operators `K_n` with `sum_n K_n^dagger K_n = I`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim: usize,
    ops: Vec<CMatrix>,
}

/// Result of applying a channel: the normalized post-measurement states
/// `sigma_n = K_n rho K_n^dagger / q_n` and their average.
#[derive(Clone, Debug)]
pub struct ChannelOutput {
    pub outcomes: Vec<(f64, DensityMatrix)>,
    pub averaged: DensityMatrix,
}

impl KrausChannel {
    pub fn new(ops: Vec<CMatrix>) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::DomainError("no Kraus operators".into()))?;
        let dim = first.nrows();
        let mut sum = CMatrix::zeros(dim, dim);
        for k in &ops {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: k.nrows().max(k.ncols()),
                });
            }
            sum += k.adjoint() * k;
        }
        let residual = (sum - CMatrix::identity(dim, dim)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if residual > 1e-10 {
            return Err(Error::NotTracePreserving { residual });
        }
        Ok(Self { dim, ops })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            ops: vec![CMatrix::identity(dim, dim)],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ops(&self) -> &[CMatrix] {
        &self.ops
    }

    /// Every Kraus operator maps each basis projector to a diagonal matrix,
    /// i.e. has at most one nonzero entry per column.
    pub fn is_incoherent(&self, tol: f64) -> bool {
        self.ops.iter().all(|k| (0..self.dim).all(|j| (0..self.dim).filter(|&i| k[(i, j)].norm() > tol).count() <= 1))
    }

    pub fn apply(&self, rho: &DensityMatrix) -> Result<ChannelOutput> {
        if rho.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim(),
            });
        }
        let mut outcomes = Vec::with_capacity(self.ops.len());
        let mut averaged = CMatrix::zeros(self.dim, self.dim);
        for k in &self.ops {
            let out = k * rho.matrix() * k.adjoint();
            averaged += &out;
            let q = trace(&out).re;
            if q < Q_CUTOFF {
                continue;
            }
            let sigma = out.unscale(q);
            let sigma = (&sigma + sigma.adjoint()).scale(0.5);
            outcomes.push((q, DensityMatrix::new(sigma)?));
        }
        let averaged = (&averaged + averaged.adjoint()).scale(0.5);
        let total: f64 = outcomes.iter().map(|(q, _)| q).sum();
        debug_assert!((total - 1.0).abs() < TOL_TRACE * 10.0);
        let averaged = match rho.split() {
            Some((a, b)) => DensityMatrix::new(averaged)?.with_split(a, b)?,
            None => DensityMatrix::new(averaged)?,
        };
        Ok(ChannelOutput { outcomes, averaged })
    }
}

/// `K_n = sum_l c_l^n |P_n(l)><l|` with `sum_n |c_l^n|^2 = 1` for every `l`.
#[derive(Clone, Debug, PartialEq)]
pub struct IncoherentKraus {
    dim: usize,
    permutations: Vec<Vec<usize>>,
    coeffs: Vec<Vec<C64>>,
}

impl IncoherentKraus {
    /// `permutations[n][l] = P_n(l)` and `coeffs[n][l] = c_l^n`.
    pub fn new(permutations: Vec<Vec<usize>>, coeffs: Vec<Vec<C64>>) -> Result<Self> {
        let dim = permutations.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || coeffs.len() != permutations.len() {
            return Err(Error::DomainError("need one coefficient row per permutation".into()));
        }
        for (n, p) in permutations.iter().enumerate() {
            let mut seen = vec![false; dim];
            if p.len() != dim || coeffs[n].len() != dim {
                return Err(Error::InvalidPermutation { index: n });
            }
            for &target in p {
                if target >= dim || seen[target] {
                    return Err(Error::InvalidPermutation { index: n });
                }
                seen[target] = true;
            }
        }
        for column in 0..dim {
            let sum: f64 = coeffs.iter().map(|row| row[column].norm_sqr()).sum();
            if (sum - 1.0).abs() > 1e-10 {
                return Err(Error::UnnormalizedCoefficients { column, sum });
            }
        }
        Ok(Self {
            dim,
            permutations,
            coeffs,
        })
    }

    /// Haar-random coefficient vectors per column and uniform permutations.
    pub fn random<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> Result<Self> {
        if n_kraus == 0 {
            return Err(Error::DomainError("n_kraus must be at least 1".into()));
        }
        if dim == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let permutations = (0..n_kraus)
            .map(|_| {
                let mut p: Vec<usize> = (0..dim).collect();
                p.shuffle(rng);
                p
            })
            .collect();
        // One unit vector per column l, spread across the n_kraus operators.
        let columns: Vec<Vec<C64>> = (0..dim).map(|_| random_unit_vector(n_kraus, rng)).collect();
        let coeffs = (0..n_kraus).map(|n| columns.iter().map(|c| c[n]).collect()).collect();
        Self::new(permutations, coeffs)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_kraus(&self) -> usize {
        self.permutations.len()
    }

    pub fn kraus_ops(&self) -> Vec<CMatrix> {
        self.permutations
            .iter()
            .zip(&self.coeffs)
            .map(|(p, cs)| {
                let mut k = CMatrix::zeros(self.dim, self.dim);
                for l in 0..self.dim {
                    k[(p[l], l)] = cs[l];
                }
                k
            })
            .collect()
    }

    pub fn to_channel(&self) -> Result<KrausChannel> {
        KrausChannel::new(self.kraus_ops())
    }
}

/// Both sides of `C(rho) >= sum_n q_n C(sigma_n)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct C2bCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub satisfied: bool,
}

/// Checks the average-coherence monotonicity with the standard basis and
/// the Schatten-1 norm.
pub fn verify_c2b(rho: &DensityMatrix, channel: &KrausChannel) -> Result<C2bCheck> {
    let basis = ObservableBasis::standard(rho.dim())?;
    let lhs = coherence_total(rho, &basis, Norm::Schatten1)?;
    let mut rhs = 0.0;
    for (q, sigma) in channel.apply(rho)?.outcomes {
        rhs += q * coherence_total(&sigma, &basis, Norm::Schatten1)?;
    }
    Ok(C2bCheck {
        lhs,
        rhs,
        satisfied: rhs <= lhs + C2B_SLACK,
    })
}

/// Distribution of random states used by the campaigns.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ensemble {
    /// Full-rank Ginibre density matrices.
    #[default]
    Ginibre,
    /// Ginibre density matrices with a rank drawn uniformly from `1..=D`.
    GinibreMixedRank,
    /// Haar-random pure states.
    HaarPure,
    /// Random X-states (diagonal plus anti-diagonal support).
    XState,
}

impl Ensemble {
    pub fn sample<R: Rng + ?Sized>(self, d: usize, rng: &mut R) -> Result<DensityMatrix> {
        match self {
            Ensemble::Ginibre => random_density(d, d, rng),
            Ensemble::GinibreMixedRank => {
                let rank = rng.random_range(1..=d);
                random_density(d, rank, rng)
            }
            Ensemble::HaarPure => random_pure(d, rng),
            Ensemble::XState => crate::random::random_x_state(d, rng),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Ensemble::Ginibre => "ginibre",
            Ensemble::GinibreMixedRank => "ginibre-mixed-rank",
            Ensemble::HaarPure => "haar-pure",
            Ensemble::XState => "x-state",
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Ensemble {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ginibre" => Ok(Ensemble::Ginibre),
            "ginibre-mixed-rank" => Ok(Ensemble::GinibreMixedRank),
            "haar-pure" => Ok(Ensemble::HaarPure),
            "x-state" => Ok(Ensemble::XState),
            other => Err(format!("unknown ensemble '{other}'")),
        }
    }
}

/// Violation count for one `(D, n_kraus)` cell of the monotonicity campaign.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct C2bSummary {
    pub dim: usize,
    pub n_kraus: usize,
    pub trials: usize,
    pub violations: usize,
    /// Largest `rhs - lhs` seen, negative when every trial passed with room.
    pub worst_excess: f64,
}

/// Runs [`verify_c2b`] on `trials` random (state, incoherent channel) pairs
/// per parameter cell. Deterministic in `seed`.
pub fn c2b_campaign(params: &[(usize, usize)], trials: usize, ensemble: Ensemble, seed: u64) -> Result<Vec<C2bSummary>> {
    params
        .iter()
        .enumerate()
        .map(|(cell, &(dim, n_kraus))| {
            let excess: Vec<f64> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let mut rng = trial_rng(seed, ((cell as u64) << 40) | t as u64);
                    let rho = ensemble.sample(dim, &mut rng)?;
                    let ch = IncoherentKraus::random(dim, n_kraus, &mut rng)?.to_channel()?;
                    let check = verify_c2b(&rho, &ch)?;
                    Ok(check.rhs - check.lhs)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(C2bSummary {
                dim,
                n_kraus,
                trials,
                violations: excess.iter().filter(|&&e| e > C2B_SLACK).count(),
                worst_excess: excess.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            })
        })
        .collect()
}

/// How the operator subset defining the truncation is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplitRule {
    /// Rotate the standard basis by a Haar-random orthogonal matrix, then keep
    /// each rotated operator with probability 1/2.
    #[default]
    RandomBasis,
    /// Keep each standard-basis operator with probability 1/2.
    Standard,
}

impl SplitRule {
    pub fn as_str(self) -> &'static str {
        match self {
            SplitRule::RandomBasis => "random-basis",
            SplitRule::Standard => "standard",
        }
    }
}

impl fmt::Display for SplitRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SplitRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "random-basis" => Ok(SplitRule::RandomBasis),
            "standard" => Ok(SplitRule::Standard),
            other => Err(format!("unknown split rule '{other}' (expected random-basis or standard)")),
        }
    }
}

/// Outcome of the truncation scan for one dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub dim: usize,
    pub trials: usize,
    pub violations: usize,
    pub violation_frequency: f64,
    /// Mean of `||P|| / ||P+Q||_1 - 1` over violating trials, 0 if none.
    pub mean_violation: f64,
}

/// Settings for [`truncation_violation_scan`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScanConfig {
    pub dim: usize,
    pub trials: usize,
    pub split_rule: SplitRule,
    pub ensemble: Ensemble,
    /// Norm applied to the truncated part `P`. The full part always uses Schatten-1.
    pub norm: Norm,
    pub seed: u64,
}

impl ScanConfig {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        Self {
            dim,
            trials,
            split_rule: SplitRule::default(),
            ensemble: Ensemble::Ginibre,
            norm: Norm::Schatten1,
            seed,
        }
    }
}

/// Ratio `||P|| / ||P+Q||_1` for one trial, where `P + Q = rho - rho_d` is
/// split along a random proper subset of an orthonormal basis.
fn scan_trial<R: Rng + ?Sized>(cfg: &ScanConfig, standard: &ObservableBasis, rng: &mut R) -> Result<Option<f64>> {
    let d = cfg.dim;
    let n = d * d;
    let rho = cfg.ensemble.sample(d, rng)?;
    let x_std: Vec<f64> = {
        let e = standard.expectations(rho.matrix())?;
        let ed = standard.expectations(dephase(&rho).matrix())?;
        e.iter().zip(&ed).map(|(a, b)| a - b).collect()
    };
    let rotation = match cfg.split_rule {
        SplitRule::RandomBasis => Some(random_orthogonal(n, rng)),
        SplitRule::Standard => None,
    };
    let mask = loop {
        let m: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
        let kept = m.iter().filter(|&&k| k).count();
        if kept != 0 && kept != n {
            break m;
        }
    };
    // With S'_l = sum_m O_lm S_m, the kept part sum_{l in mask} S'_l Tr(S'_l X)
    // has standard-basis coefficients y_m = sum_{l in mask} O_lm x'_l.
    let y: Vec<f64> = match &rotation {
        None => x_std.iter().zip(&mask).map(|(x, &k)| if k { *x } else { 0.0 }).collect(),
        Some(o) => {
            let xr: Vec<f64> = (0..n).map(|l| (0..n).map(|m| o[(l, m)] * x_std[m]).sum()).collect();
            (0..n)
                .map(|m| (0..n).filter(|&l| mask[l]).map(|l| o[(l, m)] * xr[l]).sum())
                .collect()
        }
    };
    let full = Norm::Schatten1.apply(&standard.resum(&x_std)?)?;
    let part = cfg.norm.apply(&standard.resum(&y)?)?;
    if part > full + SCAN_TOL {
        Ok(Some(part / full - 1.0))
    } else {
        Ok(None)
    }
}

/// Counts trials where the truncated part has a larger norm than the whole.
/// With `norm = Schatten1` this reproduces the violation table; with
/// `norm = Frobenius` it tests the proven bound and should report nothing.
pub fn truncation_violation_scan(cfg: &ScanConfig) -> Result<ScanResult> {
    if cfg.dim < 2 {
        return Err(Error::InvalidDimension(cfg.dim));
    }
    let standard = ObservableBasis::standard(cfg.dim)?;
    let outcomes: Vec<Option<f64>> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| scan_trial(cfg, &standard, &mut trial_rng(cfg.seed, t as u64)))
        .collect::<Result<_>>()?;
    let hits: Vec<f64> = outcomes.into_iter().flatten().collect();
    let violations = hits.len();
    Ok(ScanResult {
        dim: cfg.dim,
        trials: cfg.trials,
        violations,
        violation_frequency: if cfg.trials == 0 { 0.0 } else { violations as f64 / cfg.trials as f64 },
        mean_violation: if violations == 0 { 0.0 } else { hits.iter().sum::<f64>() / violations as f64 },
    })
}

/// `|+>|+>` mixed with the Bell state at weight `mu`: returns
/// `(delta(mixture), (1-mu) delta(|+>|+>) + mu delta(Bell))`, i.e. the two
/// sides of the convexity inequality that `delta` fails.
pub fn delta_convexity_counterexample(mu: f64) -> Result<(f64, f64)> {
    if !(mu > 0.0 && mu < 1.0) {
        return Err(Error::DomainError(format!("mu = {mu} must lie in (0, 1)")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let separable = DensityMatrix::from_pure(&[real(0.5); 4])?.with_split(2, 2)?;
    let entangled = DensityMatrix::from_pure(&[real(s), real(0.0), real(0.0), real(s)])?.with_split(2, 2)?;
    let basis = ObservableBasis::product(ObservableBasis::pauli(), ObservableBasis::pauli());
    let mix = DensityMatrix::mixture(&[(1.0 - mu, &separable), (mu, &entangled)])?;
    let lhs = global_correlation(&mix, &basis, Norm::Schatten1)?;
    let rhs = (1.0 - mu) * global_correlation(&separable, &basis, Norm::Schatten1)?
        + mu * global_correlation(&entangled, &basis, Norm::Schatten1)?;
    Ok((lhs, rhs))
}

/// Qutrit incoherent channel with `K1 = |0><1| + alpha |2><2|` and
/// `K2 = |0><0| + beta |1><2|`, where `|alpha|^2 + |beta|^2 = 1`.
pub fn baumgratz_channel(alpha: C64, beta: C64) -> Result<KrausChannel> {
    let z = real(0.0);
    let o = real(1.0);
    let k1 = CMatrix::from_row_slice(3, 3, &[z, o, z, z, z, z, z, z, alpha]);
    let k2 = CMatrix::from_row_slice(3, 3, &[o, z, z, z, z, beta, z, z, z]);
    KrausChannel::new(vec![k1, k2])
}

/// `mu |1><1| + (1-mu) |psi><psi|` with `psi = (|0> + |2>)/sqrt2`.
pub fn baumgratz_state(mu: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&mu) {
        return Err(Error::DomainError(format!("mu = {mu} must lie in [0, 1]")));
    }
    let h = 0.5 * (1.0 - mu);
    let z = real(0.0);
    DensityMatrix::new(CMatrix::from_row_slice(
        3,
        3,
        &[real(h), z, real(h), z, real(mu), z, real(h), z, real(h)],
    ))
}

/// Single Hadamard Kraus operator: a coherence-generating channel used as a
/// negative control.
pub fn hadamard_channel() -> KrausChannel {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let h = CMatrix::from_row_slice(2, 2, &[real(s), real(s), real(s), real(-s)]);
    KrausChannel::new(vec![h]).expect("Hadamard is unitary")
}

/// Phase for the i-th of `points` equally spaced points on the unit circle,
/// mapped to `(alpha, beta) = (cos t, e^{i t} sin t)`.
pub fn circle_point(i: usize, points: usize) -> (C64, C64) {
    let t = std::f64::consts::FRAC_PI_2 * (i as f64 + 0.5) / points as f64;
    (real(t.cos()), c(t.cos(), t.sin()) * t.sin())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn identity_channel_has_one_outcome() {
        let rho = random_density(3, 3, &mut trial_rng(1, 0)).unwrap();
        let out = KrausChannel::identity(3).apply(&rho).unwrap();
        assert_eq!(out.outcomes.len(), 1);
        assert_abs_diff_eq!(out.outcomes[0].0, 1.0, epsilon = 1e-12);
        assert!((out.outcomes[0].1.matrix() - rho.matrix()).iter().all(|z| z.norm() < 1e-12));
    }

    #[test]
    fn non_trace_preserving_is_rejected() {
        let k = CMatrix::identity(2, 2).scale(0.5);
        assert!(matches!(KrausChannel::new(vec![k]), Err(Error::NotTracePreserving { .. })));
    }

    #[test]
    fn baumgratz_example_sides() {
        for mu in [0.2, 0.5, 0.8] {
            for i in 0..5 {
                let (alpha, beta) = circle_point(i, 5);
                let ch = baumgratz_channel(alpha, beta).unwrap();
                assert!(ch.is_incoherent(1e-15));
                let check = verify_c2b(&baumgratz_state(mu).unwrap(), &ch).unwrap();
                assert_abs_diff_eq!(check.lhs, 1.0 - mu, epsilon = 1e-9);
                assert_abs_diff_eq!(check.rhs, (1.0 - mu) * beta.norm(), epsilon = 1e-9);
                assert!(check.satisfied);
            }
        }
    }

    #[test]
    fn single_kraus_is_diagonal_unitary() {
        let mut rng = trial_rng(3, 0);
        let ch = IncoherentKraus::new(vec![(0..4).collect()], vec![random_unit_phases(4, &mut rng)]).unwrap();
        let k = &ch.kraus_ops()[0];
        for i in 0..4 {
            for j in 0..4 {
                if i == j {
                    assert_abs_diff_eq!(k[(i, j)].norm(), 1.0, epsilon = 1e-15);
                } else {
                    assert_eq!(k[(i, j)], real(0.0));
                }
            }
        }
    }

    fn random_unit_phases<R: Rng>(n: usize, rng: &mut R) -> Vec<C64> {
        (0..n).map(|_| random_unit_vector(1, rng)[0]).collect()
    }

    #[test]
    fn random_incoherent_channels_are_trace_preserving() {
        let mut rng = trial_rng(4, 0);
        for (d, n) in [(2, 1), (3, 2), (5, 4), (8, 3)] {
            let ik = IncoherentKraus::random(d, n, &mut rng).unwrap();
            let ops = ik.kraus_ops();
            let mut sum = CMatrix::zeros(d, d);
            for k in &ops {
                sum += k.adjoint() * k;
            }
            assert!((sum - CMatrix::identity(d, d)).iter().all(|z| z.norm() < 1e-12));
            for l in 0..d {
                let s: f64 = ik.coeffs.iter().map(|row| row[l].norm_sqr()).sum();
                assert_abs_diff_eq!(s, 1.0, epsilon = 1e-12);
            }
            assert!(ik.to_channel().unwrap().is_incoherent(1e-15));
        }
    }

    #[test]
    fn incoherent_channels_keep_diagonal_states_diagonal() {
        let mut rng = trial_rng(5, 0);
        let rho = dephase(&random_density(4, 4, &mut rng).unwrap());
        let ch = IncoherentKraus::random(4, 3, &mut rng).unwrap().to_channel().unwrap();
        let out = ch.apply(&rho).unwrap();
        assert!(out.outcomes.iter().all(|(_, s)| s.is_diagonal(1e-12)));
        assert!(out.averaged.is_diagonal(1e-12));
    }

    #[test]
    fn invalid_incoherent_inputs() {
        assert_eq!(
            IncoherentKraus::new(vec![vec![0, 0]], vec![vec![real(1.0), real(1.0)]]),
            Err(Error::InvalidPermutation { index: 0 })
        );
        assert!(matches!(
            IncoherentKraus::new(vec![vec![0, 1]], vec![vec![real(1.0), real(0.5)]]),
            Err(Error::UnnormalizedCoefficients { column: 1, .. })
        ));
    }

    #[test]
    fn diagonal_state_c2b_is_trivial() {
        let mut rng = trial_rng(6, 0);
        let rho = dephase(&random_density(3, 3, &mut rng).unwrap());
        let ch = IncoherentKraus::random(3, 2, &mut rng).unwrap().to_channel().unwrap();
        let check = verify_c2b(&rho, &ch).unwrap();
        assert_eq!((check.lhs, check.rhs), (0.0, 0.0));
    }

    #[test]
    fn hadamard_is_a_negative_control() {
        let ch = hadamard_channel();
        assert!(!ch.is_incoherent(1e-12));
        let zero = DensityMatrix::from_pure(&[real(1.0), real(0.0)]).unwrap();
        let check = verify_c2b(&zero, &ch).unwrap();
        assert!(!check.satisfied);
        assert_abs_diff_eq!(check.rhs, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn delta_counterexample_values() {
        let (lhs, rhs) = delta_convexity_counterexample(0.5).unwrap();
        assert_abs_diff_eq!(lhs, 0.75, epsilon = 1e-9);
        assert_abs_diff_eq!(rhs, 0.5, epsilon = 1e-9);
        let (lhs, rhs) = delta_convexity_counterexample(0.9).unwrap();
        assert_abs_diff_eq!(lhs, 0.99, epsilon = 1e-9);
        assert_abs_diff_eq!(rhs, 0.9, epsilon = 1e-9);
        let (lhs, rhs) = delta_convexity_counterexample(1e-6).unwrap();
        assert!(lhs < 1e-5 && rhs < 1e-5);
        assert!(delta_convexity_counterexample(0.0).is_err());
        assert!(delta_convexity_counterexample(1.0).is_err());
    }

    #[test]
    fn small_campaign_is_deterministic_and_clean() {
        let a = c2b_campaign(&[(2, 2), (3, 4)], 200, Ensemble::GinibreMixedRank, 42).unwrap();
        let b = c2b_campaign(&[(2, 2), (3, 4)], 200, Ensemble::GinibreMixedRank, 42).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|s| s.violations == 0));
    }

    #[test]
    fn scan_d2_never_violates() {
        for rule in [SplitRule::RandomBasis, SplitRule::Standard] {
            let mut cfg = ScanConfig::new(2, 2000, 1);
            cfg.split_rule = rule;
            let r = truncation_violation_scan(&cfg).unwrap();
            assert_eq!(r.violations, 0);
        }
    }

    #[test]
    fn scan_is_deterministic() {
        let cfg = ScanConfig::new(3, 3000, 8);
        assert_eq!(truncation_violation_scan(&cfg).unwrap(), truncation_violation_scan(&cfg).unwrap());
    }
}
