//! Quantum coherence from observable expectation values.
//!
//! The coherence of a state is read off an orthonormal Hermitian operator
//! basis: `C = || sum_l S_l (<S_l>_rho - <S_l>_rho_d) ||`. For bipartite
//! states it splits into a local part (coherence of the product of the
//! marginals) and a global-correlation part built from the covariance matrix
//! of the joint observables, with `C <= C_L + delta`.
//!
//! ```
//! use cohkit::{coherence::report, DensityMatrix, Norm, ObservableBasis, C64};
//!
//! let s = std::f64::consts::FRAC_1_SQRT_2;
//! let z = C64::new(0.0, 0.0);
//! let bell = DensityMatrix::from_pure(&[C64::new(s, 0.0), z, z, C64::new(s, 0.0)])?
//!     .with_split(2, 2)?;
//! let basis = ObservableBasis::from_tag("prod(pauli,pauli)")?;
//! let r = report(&bell, &basis, Norm::Schatten1)?;
//! assert!((r.c - 1.0).abs() < 1e-12 && r.c_l == 0.0);
//! # Ok::<(), cohkit::Error>(())
//! ```

pub mod aklt;
pub mod channels;
pub mod coherence;
pub mod dynamics;
pub mod error;
pub mod family;
pub mod io;
pub mod matcore;
pub mod opbasis;
pub mod random;

pub use coherence::{CoherenceReport, Norm, NormChoice};
pub use error::{Error, Result};
pub use matcore::{CMatrix, DensityMatrix, Subsystem, C64};
pub use opbasis::ObservableBasis;
