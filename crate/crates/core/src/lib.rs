//! Exact arithmetic for curves over finite fields and the local algebra
//! attached to them: point counts and zeta numerators, Brauer invariants of
//! central simple algebras, block orders over truncated discrete valuation
//! rings, lattice chains and their stabilizers, truncated skew power series
//! and centralizers of formal-module embeddings, and Eichler-type mass
//! formulas with their corollaries.
//!
//! Everything is computed in exact arithmetic (finite-field elements,
//! truncated power series, big rationals); no operation rounds.

pub mod brauer;
pub mod curve;
pub mod dieudonne;
pub mod dvr;
pub mod field;
pub mod linalg;
pub mod mass;
pub mod order;
pub mod rational;
pub mod skew;
pub mod zeta;

pub use brauer::{AlgebraSpec, PlaceRef};
pub use curve::CurveModel;
pub use dvr::{DvrElement, DvrMatrix, Lattice, TruncatedDvr};
pub use field::{FieldElement, FieldSpec};
pub use mass::{MassConfig, MassReport};
pub use order::{BlockOrder, LatticeChain, TypeVector};
pub use rational::Rational;
pub use skew::{SkewContext, SkewMatrix, SkewSeries};
pub use zeta::ZetaData;
