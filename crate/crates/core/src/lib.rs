//! Hierarchical Kriging surrogates for bi-fidelity data.
//!
//! A low-fidelity Kriging model supplies the trend of a high-fidelity
//! correction model. Hyperparameters are tuned either by a genetic algorithm
//! over the full θ vector, or by the cheaper MIC-seeded route that reduces
//! each level to a scalar search followed by a local refinement.

pub mod benchlib;
pub mod cli;
pub mod correlation;
pub mod error;
pub mod harness;
pub mod hierarchical;
pub mod kriging;
pub mod mic;
pub mod sampling;
pub mod tuning;

pub use error::{Error, Result};
pub use hierarchical::{hk_log_likelihood, HkModel, HkObjective};
pub use kriging::{concentrated_log_likelihood, Fidelity, KrigingModel, KrigingObjective, SampleSet, Theta};
pub use mic::{mic_pairwise, mic_screen, MicResult};
pub use sampling::{derive_seed, lhs, Design, Domain};
pub use tuning::{tune, tune_hkc, tune_hkhd, Strategy, TunedHk, TuningConfig};
