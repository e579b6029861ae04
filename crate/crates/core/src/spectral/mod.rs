//! Discrete spectral model of positive L¹ elements: finitely many atoms
//! `(t, w)` with `w = τ(e({t}))`, plus analytic tail families for infinite
//! spectra.

pub mod density;
pub mod domain;
pub mod format;
pub mod monomial;
pub mod series;
pub mod tail;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use density::{fresh_grid_label, l1_distance, l1_distance_with, Atom, SpectralDensity};
pub use domain::IndexDomain;
pub use monomial::{Limit, LogGrowth, Monomial, SeriesClass};
pub use series::{SeriesEstimate, SumSettings};
pub use tail::{Tail, TailDeclaration, TailFamily};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("negative spectral value {0}")]
    NegativeValue(f64),
    #[error("nonpositive weight {weight} at value {value}")]
    NonPositiveWeight { value: f64, weight: f64 },
    #[error("duplicate spectral value {0}")]
    DuplicateValue(f64),
    #[error("non-finite number: {0}")]
    NonFinite(String),
    #[error("trace diverges: {0}")]
    TraceDivergence(String),
    #[error("declared {field} = {declared} but the family gives {computed}")]
    DeclarationMismatch {
        field: &'static str,
        declared: String,
        computed: String,
    },
    #[error("invalid tail: {0}")]
    InvalidTail(String),
    #[error("atom weights {weights} exceed the algebra trace {total}")]
    MassExceedsAlgebra { weights: f64, total: f64 },
    #[error("densities are not on a common grid: {0}")]
    NotAlignable(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl SpectralError {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            SpectralError::NegativeValue(_) => "negative_value",
            SpectralError::NonPositiveWeight { .. } => "nonpositive_weight",
            SpectralError::DuplicateValue(_) => "duplicate_value",
            SpectralError::NonFinite(_) => "non_finite",
            SpectralError::TraceDivergence(_) => "trace_divergence",
            SpectralError::DeclarationMismatch { .. } => "declaration_mismatch",
            SpectralError::InvalidTail(_) => "invalid_tail",
            SpectralError::MassExceedsAlgebra { .. } => "mass_exceeds_algebra",
            SpectralError::NotAlignable(_) => "not_alignable",
            SpectralError::Precondition(_) => "precondition",
            SpectralError::Parse { .. } => "parse",
            SpectralError::Numerical(_) => "numerical",
        }
    }
}

/// Qualitative entropy verdict without a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyClass {
    Finite,
    PlusInfinity,
    MinusInfinity,
    Undefined,
}

impl EntropyClass {
    pub const ALL: [EntropyClass; 4] = [
        EntropyClass::Finite,
        EntropyClass::PlusInfinity,
        EntropyClass::MinusInfinity,
        EntropyClass::Undefined,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntropyClass::Finite => "finite",
            EntropyClass::PlusInfinity => "+inf",
            EntropyClass::MinusInfinity => "-inf",
            EntropyClass::Undefined => "undefined",
        }
    }

    /// Verdict from one-sided parts: `positive ∈ [0, ∞]`, `negative ∈ [−∞, 0]`.
    pub fn from_parts(positive: f64, negative: f64) -> EntropyClass {
        match (positive.is_infinite(), negative.is_infinite()) {
            (false, false) => EntropyClass::Finite,
            (true, false) => EntropyClass::PlusInfinity,
            (false, true) => EntropyClass::MinusInfinity,
            (true, true) => EntropyClass::Undefined,
        }
    }
}

impl fmt::Display for EntropyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EntropyClass {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "finite" => Ok(EntropyClass::Finite),
            "+inf" | "plus_infinity" => Ok(EntropyClass::PlusInfinity),
            "-inf" | "minus_infinity" => Ok(EntropyClass::MinusInfinity),
            "undefined" => Ok(EntropyClass::Undefined),
            other => Err(format!("unknown entropy class `{other}`")),
        }
    }
}

/// Parse a real that may be written `inf`.
pub fn parse_extended(s: &str) -> Result<f64, String> {
    match s {
        "inf" | "+inf" => Ok(f64::INFINITY),
        _ => {
            let v: f64 = s.parse().map_err(|_| format!("invalid number `{s}`"))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(format!("invalid number `{s}`"))
            }
        }
    }
}
