//! Exact computations around orbit closures of finitely generated semigroups
//! of dominant rational self-maps of affine space.
//!
//! The crate is organized bottom-up:
//!
//! * [`exactla`]: dense exact linear algebra (fraction-free over Q, Gauss over F_p)
//! * [`poly`]: sparse multivariate polynomials and rational functions
//! * [`dynsys`]: self-maps, semigroup words and orbit sampling
//! * [`vanish`]: truncated vanishing ideals of finite point sets
//! * [`generic`]: generic rank of the symbolic orbit matrix and its exceptional locus
//! * [`separator`]: canonical truncated orbit-closure ideals used to separate points
//! * [`invariants`]: polynomial invariants and density evidence

pub mod dynsys;
pub mod error;
pub mod exactla;
pub mod generic;
pub mod invariants;
pub mod poly;
pub mod separator;
pub mod vanish;

pub use error::{Error, Result};
pub use exactla::{Field, FieldElem, Matrix};
pub use poly::{Monomial, Poly, RatFunc};

/// A point of affine space over the coefficient field.
pub type Point = Vec<FieldElem>;
