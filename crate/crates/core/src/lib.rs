pub mod analytics;
pub mod error;
pub mod experiments;
pub mod rng;
pub mod sim1d;
pub mod sim2d;
pub mod stats;
pub mod sum;
pub mod trajectory;

pub use error::{Error, Result};
