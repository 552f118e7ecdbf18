//! Minimum-error discrimination of two-qubit entangled states.
//!
//! The crate covers the full simulation chain for discriminating a pair of
//! bipartite two-qubit states with local measurements:
//!
//! * [`linalg`] fixed-size complex vectors and matrices, a Jacobi
//!   eigensolver for Hermitian matrices and the trace norm.
//! * [`states`] the orthogonal (`phi0`/`phi1`) and non-orthogonal
//!   (`psi_pair`) families, Werner noise, fidelity and tangle.
//! * [`discrimination`] the Walgate decomposition into a feed-forward
//!   protocol, exact success probabilities, the Helstrom bound and the best
//!   local projective strategy without feed-forward.
//! * [`measurement`] POVMs, seeded coincidence sampling and estimators.
//! * [`tomography`] maximum-likelihood reconstruction from 36-setting
//!   overcomplete tomography.
//!
//! The two-qubit basis order is fixed everywhere as `HH, HV, VH, VV` with
//! Alice's qubit first.

pub mod discrimination;
pub mod error;
pub mod io;
pub mod linalg;
pub mod measurement;
pub mod optim;
pub mod states;
pub mod tomography;

pub use error::{Error, Result};
