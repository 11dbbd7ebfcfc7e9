//! Numerics for photon-added quasi-Werner two-mode states: Wigner functions,
//! Wigner negativity, two-qubit correlation measures and continuous-variable
//! teleportation fidelity, together with a truncated Fock-space oracle that
//! cross-checks the closed forms.

pub mod correlations;
pub mod error;
pub mod fock_oracle;
pub mod phasespace;
pub mod quadrature;
pub mod specfun;
pub mod states;
pub mod teleport;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use specfun::Sign;
pub use states::{QuasiWernerParams, SchmidtAmplitudes};
