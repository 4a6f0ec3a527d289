//! Measurement statistics of the clones.

pub mod moments;
pub mod povm;
pub mod sampling;
pub mod sigma;

pub use moments::{expected_moments, InputMoments, MomentReport};
pub use povm::{povm_density, povm_params, PovmDensity, PovmParams};
pub use sampling::{husimi_limit_check, sample_joint_quadratures, sample_moments};
pub use sigma::{sigma_variant_report, SigmaReport};
