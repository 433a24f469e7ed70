//! Numerical machinery for periodic Fourier integral operators on the torus
//! `T^n`: toroidal Fourier analysis, lattice difference calculus, Hörmander
//! symbols and phases, operator application and kernels, and the
//! variable-exponent / weighted function spaces used to measure them.

pub mod error;
pub mod fio;
pub mod spaces;
pub mod symbol;
pub mod torus;

pub use error::{Error, Result};
