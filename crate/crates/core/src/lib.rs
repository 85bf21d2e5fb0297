//! Fourier analysis on bounded Vilenkin groups at finite level.

pub mod error;
pub mod group;
pub mod hardy;
pub mod kernels;
pub mod lab;
pub mod par;
pub mod signal;
pub mod summability;
pub mod transform;

pub use error::{Error, Result};
pub use group::{GroupSpec, Interval, Point};
pub use signal::{Signal, Spectrum};
pub use num_complex::Complex64;
