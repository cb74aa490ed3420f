//! Floquet simulation of drive-induced Lamb-shift engineering in a
//! transmon dispersively coupled to a resonator.
//!
//! Frequencies are linear (GHz) everywhere in the public API. The single
//! conversion to angular units happens inside the propagators
//! ([`floquet::monodromy`] and [`oracle::evolve`]), which integrate
//! `dU/dt = -2πi H(t) U` with `t` in nanoseconds.
//!
//! Module map:
//!
//! * [`model`]: device/drive descriptions and Hamiltonian builders.
//! * [`floquet`]: one-period propagators, quasi-energies, branch tracking
//!   and Fourier components of Floquet modes.
//! * [`renorm`]: renormalized couplings, effective models and observables
//!   (Lamb shift, pull, cross-nonlinearity, Stark ratios).
//! * [`dephasing`]: drive-induced dephasing and linewidth model.
//! * [`oracle`]: independent reference computations for cross-validation.

pub mod dephasing;
pub mod error;
pub mod floquet;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod renorm;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, C64};
