//! Seeded random states, unitaries and orthogonal matrices.
//!
//! Campaigns derive one generator per trial from `(seed, trial_index)` so the
//! outcome does not depend on how trials are scheduled across threads.

use nalgebra::DMatrix;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matcore::{c, trace, CMatrix, DensityMatrix, C64};

pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c(re, im)
}

/// Complex Ginibre matrix with i.i.d. standard normal real and imaginary parts.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| complex_normal(rng))
}

/// `G G^dagger / Tr(G G^dagger)` with `G` of shape `d x rank`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    if rank == 0 || rank > d {
        return Err(Error::InvalidRank { rank, dim: d });
    }
    let g = ginibre(d, rank, rng);
    let w = &g * g.adjoint();
    let tr = trace(&w).re;
    let mut m = w.unscale(tr);
    // Clean the rounding asymmetry so the result is Hermitian to the last bit.
    m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::new(m)
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    random_density(d, 1, rng)
}

/// Haar-random unit vector in `C^n`.
pub fn random_unit_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<C64> {
    let v: Vec<C64> = (0..n).map(|_| complex_normal(rng)).collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / norm).collect()
}

/// Haar-random unitary from the QR decomposition of a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let qr = ginibre(d, d, rng).qr();
    let (q, r) = (qr.q(), qr.r());
    let mut u = q;
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            u[(i, j)] *= phase;
        }
    }
    u
}

/// Haar-random real orthogonal matrix.
pub fn random_orthogonal<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DMatrix<f64> {
    let g = DMatrix::<f64>::from_fn(n, n, |_, _| rng.sample(StandardNormal));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            for i in 0..n {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random Hermitian matrix `(G + G^dagger) / 2`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()).scale(0.5)
}

/// Random X-state: supported on the diagonal and anti-diagonal only, built
/// as a direct sum of random positive blocks on the pairs `(k, d-1-k)`.
pub fn random_x_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d.div_ceil(2) {
        let kk = d - 1 - k;
        if k == kk {
            m[(k, k)] = c(complex_normal(rng).norm_sqr(), 0.0);
            continue;
        }
        let g = ginibre(2, 2, rng);
        let block = &g * g.adjoint();
        let idx = [k, kk];
        for a in 0..2 {
            for b in 0..2 {
                m[(idx[a], idx[b])] = block[(a, b)];
            }
        }
    }
    let tr = trace(&m).re;
    let m = m.unscale(tr);
    DensityMatrix::new((&m + m.adjoint()).scale(0.5))
}
