//! Column reduction of boundary matrices over GF(2), GF(p) or the rationals.
//!
//! [`ReductionState`] works over any [`Field`]. [`Gf2Basis`] is the packed
//! GF(2) engine used by default. Both implement [`Basis`], the object-safe
//! interface the MSA, shadow and persistence code is written against.

mod field;
mod gf2;
mod sparse;

use std::fmt;
use std::str::FromStr;

pub use field::{Field, Gf2, GfP, Rationals};
pub use gf2::{Gf2Basis, Gf2Column};
pub use sparse::{rank_of, ReductionState, SparseColumn};

use crate::error::{Error, Result};

/// Outcome of adding one column to a basis.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Absorbed {
    pub independent: bool,
    pub pivot: Option<usize>,
}

/// Incremental column basis over some field.
pub trait Basis: Send {
    /// Reduces the signed column and stores it if it is independent.
    fn absorb_signed(&mut self, entries: &[(usize, i8)]) -> Absorbed;
    /// True iff the column lies in the span of the absorbed columns.
    fn is_dependent(&self, entries: &[(usize, i8)]) -> bool;
    fn rank(&self) -> usize;
    fn columns_absorbed(&self) -> usize;
}

/// Which coefficient field to reduce over.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FieldChoice {
    #[default]
    Gf2,
    /// The generic sparse engine over GF(2), mainly for cross-checking the
    /// packed one.
    Gf2Sparse,
    GfP(u32),
    Rational,
}

/// Environment variable overriding the default field.
pub const FIELD_ENV: &str = "MSALAB_FIELD";

impl FieldChoice {
    pub fn basis(self, nrows: usize) -> Box<dyn Basis> {
        match self {
            FieldChoice::Gf2 => Box::new(Gf2Basis::new(nrows)),
            FieldChoice::Gf2Sparse => Box::new(ReductionState::new(Gf2)),
            FieldChoice::GfP(p) => Box::new(ReductionState::new(
                GfP::new(p).expect("FieldChoice::GfP holds a validated prime"),
            )),
            FieldChoice::Rational => Box::new(ReductionState::new(Rationals)),
        }
    }

    /// `MSALAB_FIELD` if set, else GF(2).
    pub fn from_env() -> Result<Self> {
        match std::env::var(FIELD_ENV) {
            Ok(s) if !s.trim().is_empty() => s.parse(),
            _ => Ok(FieldChoice::Gf2),
        }
    }
}

impl FromStr for FieldChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gf2" => Ok(FieldChoice::Gf2),
            "gf2-sparse" => Ok(FieldChoice::Gf2Sparse),
            "rational" => Ok(FieldChoice::Rational),
            t => {
                let p = t
                    .strip_prefix("gfp:")
                    .and_then(|p| p.parse::<u32>().ok())
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!(
                            "unknown field {t:?} (expected gf2, gfp:P or rational)"
                        ))
                    })?;
                GfP::new(p)?;
                Ok(FieldChoice::GfP(p))
            }
        }
    }
}

impl fmt::Display for FieldChoice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldChoice::Gf2 => write!(f, "gf2"),
            FieldChoice::Gf2Sparse => write!(f, "gf2-sparse"),
            FieldChoice::GfP(p) => write!(f, "gfp:{p}"),
            FieldChoice::Rational => write!(f, "rational"),
        }
    }
}
