use thiserror::Error;

use crate::exactla::Field;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mixed coefficient fields: {0} and {1}")]
    MixedFields(Field, Field),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("minor selection is not square ({rows} rows, {cols} columns)")]
    NonSquareMinor { rows: usize, cols: usize },

    #[error("index out of range or not strictly increasing: {0}")]
    BadIndex(String),

    #[error("modulus {0} is not prime")]
    NotPrime(u64),

    #[error("the empty word is only valid in a monoid")]
    EmptyWordInSemigroup,

    #[error("semigroup needs at least one generator")]
    NoGenerators,

    #[error("random specialization failed after {attempts} draws (every candidate hit a denominator); retry with exact mode")]
    SpecializationExhausted { attempts: usize },

    #[error("minor budget must be positive")]
    ZeroBudget,

    #[error("operation requires a monoid (the identity must be part of the semigroup)")]
    NotMonoid,

    #[error("zero denominator")]
    ZeroDenominator,

    #[error("unknown strategy '{0}'")]
    UnknownStrategy(String),
}

pub type Result<T> = std::result::Result<T, Error>;
