//! Orthonormal Hermitian operator bases, `Tr(S_l S_m) = delta_lm`.
//!
//! Product bases keep their two factors instead of materializing every
//! `A_l (x) B_m`; on a 9x9 factor pair that would be 6561 dense 81x81
//! matrices. Expectations and resummations go through the factors instead.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::matcore::{c, hermiticity_residual, real, tensor, trace_product, CMatrix, C64, TOL_HERM};

/// Imaginary residue tolerated in `Tr(S_l H)` for Hermitian `H`.
const TOL_IMAG: f64 = 1e-12;
/// Tolerance used by the Gram identity and span checks.
pub const TOL_GRAM: f64 = 1e-10;

#[derive(Clone, Debug)]
enum Structure {
    Flat(Vec<CMatrix>),
    Product(Arc<ObservableBasis>, Arc<ObservableBasis>),
}

/// Ordered orthonormal set of Hermitian operators on a `dim`-dimensional space.
#[derive(Clone, Debug)]
pub struct ObservableBasis {
    dim: usize,
    structure: Structure,
    labels: Vec<String>,
    complete: bool,
    tag: String,
}

fn zero() -> C64 {
    real(0.0)
}

fn unit(d: usize, i: usize, j: usize, value: C64) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(i, j)] = value;
    m
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        Err(Error::InvalidDimension(d))
    } else {
        Ok(())
    }
}

/// Collective spin operators `(S^z, S^+)` for `n` qubits in the symmetric
/// subspace, with the Pauli-sum convention `S^z = sum_j sigma^z_j`.
///
/// The basis runs from the fully polarized state `S^z = n` down to `-n`.
pub fn collective_spin(n: usize) -> Result<(CMatrix, CMatrix)> {
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let d = n + 1;
    let j = n as f64 / 2.0;
    let m_of = |i: usize| j - i as f64;
    let sz = CMatrix::from_fn(d, d, |a, b| if a == b { real(2.0 * m_of(a)) } else { zero() });
    let mut sp = CMatrix::zeros(d, d);
    for i in 1..d {
        let m = m_of(i);
        sp[(i - 1, i)] = real((j * (j + 1.0) - m * (m + 1.0)).sqrt());
    }
    Ok((sz, sp))
}

impl ObservableBasis {
    fn flat(dim: usize, ops: Vec<CMatrix>, labels: Vec<String>, tag: String) -> Self {
        let complete = ops.len() == dim * dim;
        Self {
            dim,
            structure: Structure::Flat(ops),
            labels,
            complete,
            tag,
        }
    }

    /// The matrix-unit basis: `|k><k|`, symmetric pairs for `k' > k` and
    /// antisymmetric pairs for `k' < k`, in `(k, k')` row-major order.
    pub fn standard(d: usize) -> Result<Self> {
        check_dim(d)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut ops = Vec::with_capacity(d * d);
        let mut labels = Vec::with_capacity(d * d);
        for k in 0..d {
            for kp in 0..d {
                let op = if kp == k {
                    unit(d, k, k, real(1.0))
                } else if kp > k {
                    unit(d, k, kp, real(s)) + unit(d, kp, k, real(s))
                } else {
                    unit(d, k, kp, c(0.0, s)) + unit(d, kp, k, c(0.0, -s))
                };
                ops.push(op);
                labels.push(format!("M({k},{kp})"));
            }
        }
        Ok(Self::flat(d, ops, labels, format!("standard:{d}")))
    }

    /// `{I, sigma^x, sigma^y, sigma^z} / sqrt(2)`.
    pub fn pauli() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = |a: C64, b: C64, cc: C64, dd: C64| CMatrix::from_row_slice(2, 2, &[a, b, cc, dd]);
        let ops = vec![
            m(real(s), zero(), zero(), real(s)),
            m(zero(), real(s), real(s), zero()),
            m(zero(), c(0.0, -s), c(0.0, s), zero()),
            m(real(s), zero(), zero(), real(-s)),
        ];
        let labels = ["I", "X", "Y", "Z"].iter().map(|l| l.to_string()).collect();
        Self::flat(2, ops, labels, "pauli".into())
    }

    /// Generalized Gell-Mann matrices with unit Frobenius norm: identity,
    /// symmetric pairs, antisymmetric pairs, then diagonal generators.
    pub fn gell_mann(d: usize) -> Result<Self> {
        check_dim(d)?;
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut ops = vec![CMatrix::identity(d, d).scale(1.0 / (d as f64).sqrt())];
        let mut labels = vec!["I".to_string()];
        for j in 0..d {
            for k in j + 1..d {
                ops.push(unit(d, j, k, real(s)) + unit(d, k, j, real(s)));
                labels.push(format!("S({j},{k})"));
            }
        }
        for j in 0..d {
            for k in j + 1..d {
                ops.push(unit(d, j, k, c(0.0, -s)) + unit(d, k, j, c(0.0, s)));
                labels.push(format!("A({j},{k})"));
            }
        }
        for m in 1..d {
            let norm = ((m * (m + 1)) as f64).sqrt();
            let op = CMatrix::from_fn(d, d, |a, b| {
                if a != b {
                    zero()
                } else if a < m {
                    real(1.0 / norm)
                } else if a == m {
                    real(-(m as f64) / norm)
                } else {
                    zero()
                }
            });
            ops.push(op);
            labels.push(format!("D{m}"));
        }
        Ok(Self::flat(d, ops, labels, format!("gellmann:{d}")))
    }

    /// `{sqrt(n(n+2)/3) I, S^x, S^y, S^z} / sqrt(n(n+1)(n+2)/3)` on the
    /// spin-`n/2` representation. Complete only for `n = 1`.
    pub fn spin_truncated(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDimension(1));
        }
        let d = n + 1;
        let nf = n as f64;
        let norm = (nf * (nf + 1.0) * (nf + 2.0) / 3.0).sqrt();
        let (sz, sp) = collective_spin(n)?;
        let sm = sp.adjoint();
        let sx = &sp + &sm;
        let sy = (&sp - &sm) * c(0.0, -1.0);
        let id = CMatrix::identity(d, d).scale((nf * (nf + 2.0) / 3.0).sqrt());
        let ops = [id, sx, sy, sz].into_iter().map(|m| m.scale(1.0 / norm)).collect();
        let labels = ["I", "Sx", "Sy", "Sz"].iter().map(|l| l.to_string()).collect();
        Ok(Self::flat(d, ops, labels, format!("spin:{n}")))
    }

    /// `{A_l (x) B_m}` ordered with the A index major.
    pub fn product(a: ObservableBasis, b: ObservableBasis) -> Self {
        let mut labels = Vec::with_capacity(a.len() * b.len());
        for la in &a.labels {
            for lb in &b.labels {
                labels.push(format!("{la}*{lb}"));
            }
        }
        Self {
            dim: a.dim * b.dim,
            complete: a.complete && b.complete,
            tag: format!("prod({},{})", a.tag, b.tag),
            labels,
            structure: Structure::Product(Arc::new(a), Arc::new(b)),
        }
    }

    /// Parses `standard:D`, `pauli`, `gellmann:d`, `spin:n` or `prod(<tag>,<tag>)`.
    pub fn from_tag(tag: &str) -> Result<Self> {
        let t = tag.trim();
        let bad = |reason: &str| Error::BadBasisTag {
            tag: tag.to_string(),
            reason: reason.to_string(),
        };
        if let Some(inner) = t.strip_prefix("prod(").and_then(|r| r.strip_suffix(')')) {
            let mut depth = 0usize;
            let mut split = None;
            for (i, ch) in inner.char_indices() {
                match ch {
                    '(' => depth += 1,
                    ')' => depth = depth.checked_sub(1).ok_or_else(|| bad("unbalanced parentheses"))?,
                    ',' if depth == 0 => {
                        if split.is_some() {
                            return Err(bad("prod takes exactly two factors"));
                        }
                        split = Some(i);
                    }
                    _ => {}
                }
            }
            let i = split.ok_or_else(|| bad("prod takes exactly two factors"))?;
            let a = Self::from_tag(&inner[..i])?;
            let b = Self::from_tag(&inner[i + 1..])?;
            return Ok(Self::product(a, b));
        }
        if t == "pauli" {
            return Ok(Self::pauli());
        }
        let (name, arg) = t.split_once(':').ok_or_else(|| bad("expected <name>:<int>, pauli or prod(..)"))?;
        let value: usize = arg.trim().parse().map_err(|_| bad("argument is not a non-negative integer"))?;
        let built = match name.trim() {
            "standard" => Self::standard(value),
            "gellmann" => Self::gell_mann(value),
            "spin" => Self::spin_truncated(value),
            _ => return Err(bad("unknown basis name")),
        };
        built.map_err(|e| bad(&e.to_string()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn tag(&self) -> &str {
        &self.tag
    }

    pub fn factors(&self) -> Option<(&ObservableBasis, &ObservableBasis)> {
        match &self.structure {
            Structure::Product(a, b) => Some((a, b)),
            Structure::Flat(_) => None,
        }
    }

    pub fn require_factors(&self) -> Result<(&ObservableBasis, &ObservableBasis)> {
        self.factors().ok_or(Error::NotProductBasis)
    }

    /// The `l`-th operator as a dense matrix.
    pub fn op(&self, l: usize) -> CMatrix {
        match &self.structure {
            Structure::Flat(ops) => ops[l].clone(),
            Structure::Product(a, b) => tensor(&a.op(l / b.len()), &b.op(l % b.len())),
        }
    }

    /// Every operator as a dense matrix. Avoid on large product bases.
    pub fn ops(&self) -> Vec<CMatrix> {
        (0..self.len()).map(|l| self.op(l)).collect()
    }

    fn check_target(&self, m: &CMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.nrows() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: m.nrows(),
            });
        }
        Ok(())
    }

    fn complex_coeffs(&self, m: &CMatrix) -> Vec<C64> {
        match &self.structure {
            Structure::Flat(ops) => ops.iter().map(|s| trace_product(s, m)).collect(),
            Structure::Product(a, b) => {
                let (da, db) = (a.dim, b.dim);
                let mut out = Vec::with_capacity(a.len() * b.len());
                for l in 0..a.len() {
                    let al = a.op(l);
                    // X = Tr_A[(A_l (x) I) m], so <A_l (x) B_k> = Tr(B_k X).
                    let x = CMatrix::from_fn(db, db, |k, kp| {
                        let mut acc = zero();
                        for i in 0..da {
                            for j in 0..da {
                                let aji = al[(j, i)];
                                if aji != zero() {
                                    acc += aji * m[(i * db + k, j * db + kp)];
                                }
                            }
                        }
                        acc
                    });
                    out.extend(b.complex_coeffs(&x));
                }
                out
            }
        }
    }

    /// `Tr(S_l m)` for every operator, for Hermitian `m`.
    pub fn expansion_coeffs(&self, m: &CMatrix) -> Result<Vec<f64>> {
        self.check_target(m)?;
        let residual = hermiticity_residual(m);
        if residual > TOL_HERM {
            return Err(Error::NonHermitian { residual });
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let coeffs = self.complex_coeffs(m);
        debug_assert!(coeffs.iter().all(|z| z.im.abs() <= TOL_IMAG * scale * self.dim as f64));
        Ok(coeffs.into_iter().map(|z| z.re).collect())
    }

    /// Expectation values `<S_l> = Tr(S_l rho)`.
    pub fn expectations(&self, rho: &CMatrix) -> Result<Vec<f64>> {
        self.expansion_coeffs(rho)
    }

    /// `sum_l coeffs[l] S_l`.
    pub fn resum(&self, coeffs: &[f64]) -> Result<CMatrix> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: coeffs.len(),
            });
        }
        Ok(match &self.structure {
            Structure::Flat(ops) => {
                let mut out = CMatrix::zeros(self.dim, self.dim);
                for (s, &cl) in ops.iter().zip(coeffs) {
                    if cl != 0.0 {
                        out += s.scale(cl);
                    }
                }
                out
            }
            Structure::Product(a, b) => {
                let nb = b.len();
                let mut out = CMatrix::zeros(self.dim, self.dim);
                for l in 0..a.len() {
                    let row = &coeffs[l * nb..(l + 1) * nb];
                    if row.iter().all(|v| *v == 0.0) {
                        continue;
                    }
                    out += tensor(&a.op(l), &b.resum(row)?);
                }
                out
            }
        })
    }

    /// Gram matrix `Tr(S_l S_m)`.
    pub fn gram(&self) -> DMatrix<f64> {
        match &self.structure {
            Structure::Product(a, b) => a.gram().kronecker(&b.gram()),
            Structure::Flat(ops) => {
                let n = ops.len();
                DMatrix::from_fn(n, n, |i, j| trace_product(&ops[i], &ops[j]).re)
            }
        }
    }

    /// Largest deviation of every operator from Hermiticity and of the Gram
    /// matrix from the identity.
    pub fn orthonormality_residual(&self) -> f64 {
        let herm = match &self.structure {
            Structure::Flat(ops) => ops.iter().map(hermiticity_residual).fold(0.0, f64::max),
            Structure::Product(a, b) => {
                let (ra, rb) = (a.orthonormality_residual(), b.orthonormality_residual());
                ra.max(rb)
            }
        };
        let g = self.gram();
        let n = g.nrows();
        let mut worst = herm;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Keeps the operators where `mask` is true. The result is flat.
    pub fn subset(&self, mask: &[bool]) -> Result<Self> {
        if mask.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                found: mask.len(),
            });
        }
        let mut ops = Vec::new();
        let mut labels = Vec::new();
        for (l, keep) in mask.iter().enumerate() {
            if *keep {
                ops.push(self.op(l));
                labels.push(self.labels[l].clone());
            }
        }
        let tag = format!("subset({})", self.tag);
        Ok(Self::flat(self.dim, ops, labels, tag))
    }

    /// `S'_l = sum_m o[(l, m)] S_m` for a real orthogonal `o`.
    pub fn mixed(&self, o: &DMatrix<f64>) -> Result<Self> {
        let n = self.len();
        if o.nrows() != n || o.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: o.nrows(),
            });
        }
        let ops = (0..n)
            .map(|l| {
                let row: Vec<f64> = (0..n).map(|m| o[(l, m)]).collect();
                self.resum(&row)
            })
            .collect::<Result<Vec<_>>>()?;
        let labels = (0..n).map(|l| format!("O{l}")).collect();
        let mut out = Self::flat(self.dim, ops, labels, format!("mixed({})", self.tag));
        out.complete = self.complete;
        Ok(out)
    }

    /// Coefficients `b_m` with `sum_m b_m S_m = I`, if the identity is in the span.
    pub fn identity_coeffs(&self) -> Result<Vec<f64>> {
        let id = CMatrix::identity(self.dim, self.dim);
        let coeffs = self.expansion_coeffs(&id)?;
        let back = self.resum(&coeffs)?;
        let err = (back - id).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if err > TOL_GRAM {
            return Err(Error::IdentityNotInSpan);
        }
        Ok(coeffs)
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }
}

impl fmt::Display for ObservableBasis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.tag)
    }
}
