//! Bilinear semiclassical moment functionals.
//!
//! From four polynomials `(A1, B1, A2, B2)` this crate builds the marginal
//! weights `W_i = exp(-V_i)` with `V_i' = (A_i + B_i')/B_i`, the integration
//! contours attached to their singularities, the `s1*s2` fundamental
//! functionals `L_ij(x^n | y^m) = ∫∫ W1(x) W2(y) e^{xy} x^n y^m`, their
//! bimoment tables, and the monic biorthogonal polynomials of any table.
//!
//! The algebraic layer ([`poly`], [`linalg`], [`bimoment`], [`favard`],
//! [`semiclassical`]) is generic over the real scalar; the analytic layer
//! ([`weight`], [`contour`], [`sdc`], [`quadrature`]) works in `f64`.

pub mod bimoment;
pub mod config;
pub mod contour;
pub mod error;
pub mod favard;
pub mod linalg;
pub mod poly;
pub mod quadrature;
pub mod scalar;
pub mod sdc;
pub mod semiclassical;
pub mod serde_complex;
pub mod weight;

pub mod cli;
mod gk;

pub use error::{Error, Result};
pub use scalar::{Real, C};

/// Double-precision aliases.
pub type Complex64 = num_complex::Complex<f64>;
pub type CPoly64 = poly::CPoly<f64>;
pub type RootMultiset64 = poly::RootMultiset<f64>;
pub type BimomentTable64 = bimoment::BimomentTable<f64>;
pub type BopPair64 = bimoment::BopPair<f64>;
pub type RecurrenceSystem64 = bimoment::RecurrenceSystem<f64>;
pub type SemiclassicalSpec64 = semiclassical::SemiclassicalSpec<f64>;

/// Single-precision aliases.
pub type CPoly32 = poly::CPoly<f32>;
pub type BimomentTable32 = bimoment::BimomentTable<f32>;
