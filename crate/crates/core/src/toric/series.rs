//! Graded linear series generated in degree one.

use std::collections::BTreeSet;

use num_traits::Zero;

use super::body::InvariantFlag;
use super::divisor::section_polytope;
use super::fan::ToricVariety;
use crate::error::{Error, Result};
use crate::exactgeom::polytope::Polytope;
use crate::exactgeom::rational::{add, QVector, Rational};

/// `W_k` is the `k`-fold Minkowski sum of the exponent set `W_1 ⊆ P_D ∩ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedSeries {
    pub divisor: QVector,
    pub w1: Vec<QVector>,
}

impl GradedSeries {
    pub fn new(x: &ToricVariety, divisor: QVector, w1: Vec<QVector>) -> Result<Self> {
        if divisor.iter().any(|c| !c.is_integer()) {
            return Err(Error::InvalidInput("graded series needs an integral divisor".into()));
        }
        if w1.is_empty() {
            return Err(Error::InvalidInput("W_1 is empty".into()));
        }
        let p = section_polytope(x, &divisor)?;
        for u in &w1 {
            if u.len() != x.n {
                return Err(Error::DimensionMismatch {
                    expected: x.n,
                    got: u.len(),
                });
            }
            if u.iter().any(|c| !c.is_integer()) || !p.contains_point(u) {
                return Err(Error::InvalidInput(format!(
                    "W_1 point {:?} is not a lattice point of P_D",
                    u.iter().map(crate::exactgeom::rational::format).collect::<Vec<_>>()
                )));
            }
        }
        Ok(GradedSeries { divisor, w1 })
    }

    /// The complete series `|D|`.
    pub fn complete(x: &ToricVariety, divisor: QVector) -> Result<Self> {
        let pts = crate::exactgeom::lattice::lattice_points(&section_polytope(x, &divisor)?)?;
        GradedSeries::new(x, divisor, pts)
    }
}

/// Exponents of degree `k`, in lexicographic order.
pub fn series_generate(w: &GradedSeries, k: usize) -> Vec<QVector> {
    let dim = w.w1[0].len();
    let mut current: BTreeSet<QVector> = BTreeSet::new();
    current.insert(vec![Rational::zero(); dim]);
    for _ in 0..k {
        current = current
            .iter()
            .flat_map(|a| w.w1.iter().map(move |b| add(a, b)))
            .collect();
    }
    current.into_iter().collect()
}

/// The body of a series generated in degree one is the hull of `ν(W_1)`.
pub fn series_body(x: &ToricVariety, w: &GradedSeries, flag: &InvariantFlag) -> Polytope {
    let pts: Vec<QVector> = w.w1.iter().map(|u| flag.valuation(x, &w.divisor, u)).collect();
    Polytope::hull_in(x.n, &pts)
}

/// Hull of `(1/k) ν(W_k)`; equals [`series_body`] for every `k`.
pub fn series_body_at(x: &ToricVariety, w: &GradedSeries, flag: &InvariantFlag, k: usize) -> Polytope {
    let m = Rational::from_integer(k.into());
    let dk: QVector = w.divisor.iter().map(|c| c * &m).collect();
    let pts: Vec<QVector> = series_generate(w, k)
        .iter()
        .map(|u| flag.valuation(x, &dk, u).into_iter().map(|c| c / &m).collect())
        .collect();
    Polytope::hull_in(x.n, &pts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::qvec;
    use crate::toric::models;

    #[test]
    fn full_series_of_hyperplane() {
        let p2 = models::p2();
        let w = GradedSeries::complete(&p2, qvec(&[0, 0, 1])).unwrap();
        assert_eq!(series_generate(&w, 2).len(), 6);
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let simplex = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]);
        assert!(series_body(&p2, &w, &flag).equals(&simplex));
        assert!(series_body_at(&p2, &w, &flag, 3).equals(&simplex));
    }

    #[test]
    fn segment_series_stays_on_a_line() {
        let p2 = models::p2();
        let w = GradedSeries::new(&p2, qvec(&[0, 0, 1]), vec![qvec(&[0, 0]), qvec(&[1, 0])]).unwrap();
        assert_eq!(series_generate(&w, 3).len(), 4);
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let body = series_body(&p2, &w, &flag);
        assert_eq!(body.affine_dim(), Some(1));
        assert!(body.equals(&series_body_at(&p2, &w, &flag, 4)));
    }

    #[test]
    fn points_outside_the_section_polytope_are_rejected() {
        let p2 = models::p2();
        assert!(GradedSeries::new(&p2, qvec(&[0, 0, 1]), vec![qvec(&[2, 0])]).is_err());
        assert!(GradedSeries::new(&p2, qvec(&[0, 0, 1]), vec![]).is_err());
    }
}
