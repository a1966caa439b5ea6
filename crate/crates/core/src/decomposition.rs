//! Zariski-type decompositions `D = P + N` shared by the toric and surface
//! models.

use std::str::FromStr;

use num_traits::Zero;

use crate::error::Error;
use crate::exactgeom::rational::{sub, QVector, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecompositionKind {
    Sigma,
    S,
    Good,
}

impl DecompositionKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecompositionKind::Sigma => "sigma",
            DecompositionKind::S => "s",
            DecompositionKind::Good => "good",
        }
    }
}

impl FromStr for DecompositionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        match s {
            "sigma" => Ok(DecompositionKind::Sigma),
            "s" => Ok(DecompositionKind::S),
            "good" => Ok(DecompositionKind::Good),
            other => Err(Error::Schema(format!("unknown decomposition kind {other:?}"))),
        }
    }
}

/// One prime component of the negative part.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegativeComponent {
    /// Ray index (toric) or curve index (surface).
    pub index: usize,
    pub name: String,
    pub coeff: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZariskiDecomposition {
    /// Toric: coefficient vector over rays. Surface: class in the lattice basis.
    pub positive: QVector,
    /// Strictly positive coefficients, sorted by index.
    pub negative: Vec<NegativeComponent>,
    pub kind: DecompositionKind,
}

impl ZariskiDecomposition {
    pub fn coeff_of(&self, index: usize) -> Rational {
        self.negative
            .iter()
            .find(|c| c.index == index)
            .map_or_else(Rational::zero, |c| c.coeff.clone())
    }

    pub fn support(&self) -> Vec<usize> {
        self.negative.iter().map(|c| c.index).collect()
    }

    pub fn is_trivial(&self) -> bool {
        self.negative.is_empty()
    }

    /// Builds a toric-style decomposition from a coefficient vector `d` and
    /// per-ray negative coefficients.
    pub fn from_coefficients(
        d: &[Rational],
        negative: &[Rational],
        names: impl Fn(usize) -> String,
        kind: DecompositionKind,
    ) -> Self {
        let positive = sub(d, negative);
        let negative = negative
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| NegativeComponent {
                index: i,
                name: names(i),
                coeff: c.clone(),
            })
            .collect();
        ZariskiDecomposition {
            positive,
            negative,
            kind,
        }
    }

    /// Same parts, different kind tag.
    pub fn with_kind(mut self, kind: DecompositionKind) -> Self {
        self.kind = kind;
        self
    }

    /// Compares parts, ignoring the kind tag.
    pub fn same_parts(&self, other: &Self) -> bool {
        self.positive == other.positive && self.negative == other.negative
    }
}
