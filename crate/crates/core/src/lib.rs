//! Continuous-variable 1→2 cloning network built from three two-mode
//! squeezers, with a Gaussian (symplectic) backend and a truncated Fock
//! backend.

pub mod error;
pub mod fock;
pub mod gaussian;
pub mod measurement;
pub mod network;
pub mod quadrature;

pub use error::{Error, Result};
pub use gaussian::{GaussianState, SymplecticTransform};
pub use network::{
    network_from_lambda, run_cloner, Backend, BackendConfig, CloneInput, CloneResult, CloningNetworkSpec, Gains, ReducedState,
};
