pub mod baseline;
pub mod correlation;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod io;
pub mod numtheory;
pub mod plans;
pub mod sequences;
pub mod theory;

pub use error::{Error, Result};
