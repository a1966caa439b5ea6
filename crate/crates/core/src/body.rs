//! Which Okounkov body is being asked for.

use std::fmt;
use std::str::FromStr;

use crate::error::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BodyKind {
    /// Requires a big divisor.
    Big,
    /// Valuative body, from actual sections.
    Val,
    /// Limiting body, `∩_{ε>0} Δ(D + εA)`.
    Lim,
}

impl BodyKind {
    pub fn as_str(self) -> &'static str {
        match self {
            BodyKind::Big => "big",
            BodyKind::Val => "val",
            BodyKind::Lim => "lim",
        }
    }
}

impl fmt::Display for BodyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BodyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "big" => Ok(BodyKind::Big),
            "val" => Ok(BodyKind::Val),
            "lim" => Ok(BodyKind::Lim),
            other => Err(Error::Schema(format!("unknown body kind {other:?}"))),
        }
    }
}
