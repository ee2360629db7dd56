//! Numerical toolkit for polyharmonic mappings of the unit disk.

pub mod analysis;
pub mod bounds;
pub mod error;
pub mod fft;
pub mod fixtures;
pub mod functions;
pub mod gauss;
pub mod identities;
pub mod kernels;
pub mod modal;
pub mod par;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use functions::{BoundaryFunction, DiskFunction};
pub use kernels::NormProfile;
pub use num_complex::Complex64;
pub use quadrature::{CircleGrid, DiskGrid, Integral};
