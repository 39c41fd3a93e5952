//! Exact exterior calculus for semi-flat mirror pairs of torus fibrations.
//!
//! The engine works with polynomial-coefficient differential forms over
//! Gaussian rationals, implements the fiberwise Fourier-Mukai transform
//! between a symplectic side `X` and a complex side `X̌`, checks Type IIA
//! and Type IIB SU(n) conditions, builds the nilmanifold mirror family and
//! computes invariant Bott-Chern and Tseng-Yau cohomology.
//!
//! All algorithms are generic over [`scalar::Scalar`]; the aliases below fix
//! the exact field used everywhere in verification.

pub mod calculus;
pub mod campaign;
pub mod coeffring;
pub mod cohomology;
pub mod error;
pub mod fourier;
pub mod json;
pub mod exterior;
pub mod linalg;
pub mod nilmanifold;
pub mod random;
pub mod report;
pub mod scalar;
pub mod sustruct;

pub use error::{Error, Result};
pub use exterior::{GenClass, Generator, Mask};
pub use scalar::{q, qi, GaussianRational, Scalar};

/// Exact scalars.
pub type Q = GaussianRational;
/// Polynomials over [`Q`].
pub type Poly = coeffring::Poly<Q>;
/// Forms over [`Q`].
pub type Form = exterior::Form<Q>;
/// Frames over [`Q`].
pub type FrameSpec = exterior::FrameSpec<Q>;
/// Shared frame handle.
pub type Frame = std::sync::Arc<FrameSpec>;

/// Floating point counterparts, for numerical sampling only.
pub type PolyF64 = coeffring::Poly<scalar::Complex64>;
pub type FormF64 = exterior::Form<scalar::Complex64>;
