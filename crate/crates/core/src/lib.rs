//! Row sequences of type-II Hermite-Padé approximants in arbitrary precision.
//!
//! Layers, bottom up: [`series`] (lazy exact-or-float coefficients),
//! [`hp`] (denominators and numerators), [`roots`], [`trajectory`] (zeros
//! across n), [`incomplete`] (difference identity records) and [`detectors`].

// Elimination and recurrences read more plainly with explicit indices.
#![allow(clippy::needless_range_loop)]

pub mod detectors;
pub mod error;
pub mod fit;
pub mod hp;
pub mod incomplete;
pub mod linalg;
pub mod num;
pub mod poly;
pub mod roots;
pub mod series;
pub mod trajectory;

pub use error::{Error, Result};
pub use num::{Coefficient, Complex, GaussRational};
pub use poly::Poly;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");
