pub mod dataset;
pub mod error;
pub mod harness;
pub mod registry;
pub mod rng;
pub mod scene;
pub mod seed;
pub mod tasks;
pub mod types;
pub mod vision;

pub use error::{Error, Result};
pub use registry::{difficulty_axes, generate, generate_with_params, list_tasks, PuzzleInstance, PuzzleMetadata};
pub use rng::RngStream;
pub use types::{Detail, Difficulty, DifficultyRange, Domain, ParamValue, Params, TaskKind, VerificationResult};
