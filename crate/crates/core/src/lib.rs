pub mod calibration;
pub mod cli;
pub mod config;
pub mod distortion;
pub mod error;
pub mod gain;
pub mod io;
pub mod search;
pub mod squeezing;
pub mod model;
pub mod units;

pub use error::{Error, Result};
