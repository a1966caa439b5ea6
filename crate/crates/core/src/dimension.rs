use std::fmt;

/// Iitaka-type dimension: `-∞` or a nonnegative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Dimension {
    NegInfinity,
    Finite(usize),
}

impl Dimension {
    pub fn finite(self) -> Option<usize> {
        match self {
            Dimension::Finite(k) => Some(k),
            Dimension::NegInfinity => None,
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "-inf" | "-∞" => Some(Dimension::NegInfinity),
            t => t.parse().ok().map(Dimension::Finite),
        }
    }
}

impl From<Option<usize>> for Dimension {
    fn from(d: Option<usize>) -> Self {
        d.map_or(Dimension::NegInfinity, Dimension::Finite)
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dimension::NegInfinity => write!(f, "-inf"),
            Dimension::Finite(k) => write!(f, "{k}"),
        }
    }
}
