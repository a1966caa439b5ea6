use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::rational::{add, dot, int, QVector, Rational};
use crate::toric::body::InvariantFlag;
use crate::toric::divisor::section_polytope;
use crate::toric::fan::ToricVariety;

/// A section of `mD`: a finite sum of characters `χ^u`, `u ∈ P_{mD} ∩ M`.
#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub level: u32,
    pub terms: BTreeMap<QVector, Rational>,
}

impl Section {
    pub fn new(x: &ToricVariety, d: &[Rational], level: u32, terms: BTreeMap<QVector, Rational>) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidInput("section level must be positive".into()));
        }
        let terms: BTreeMap<QVector, Rational> = terms.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        if terms.is_empty() {
            return Err(Error::InvalidInput("section has no terms".into()));
        }
        let md: QVector = d.iter().map(|c| c * int(level.into())).collect();
        let p = section_polytope(x, &md)?;
        for u in terms.keys() {
            if u.len() != x.n || u.iter().any(|c| !c.is_integer()) || !p.contains_point(u) {
                return Err(Error::InvalidInput(format!(
                    "exponent {u:?} is not a lattice point of P_mD"
                )));
            }
        }
        Ok(Section { level, terms })
    }

    pub fn monomial(x: &ToricVariety, d: &[Rational], level: u32, u: QVector) -> Result<Self> {
        Section::new(x, d, level, BTreeMap::from([(u, int(1))]))
    }

    /// Product of sections of `mD` and `m'D`, a section of `(m + m')D`.
    pub fn product(&self, other: &Section) -> Section {
        let mut terms: BTreeMap<QVector, Rational> = BTreeMap::new();
        for (u, a) in &self.terms {
            for (w, b) in &other.terms {
                *terms.entry(add(u, w)).or_insert_with(Rational::zero) += a * b;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Section {
            level: self.level + other.level,
            terms,
        }
    }
}

/// `ν(s)/m` with the level kept.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct ValuationVector {
    pub entries: QVector,
    pub level: u32,
}

impl ValuationVector {
    pub fn unnormalized(&self) -> QVector {
        self.entries.iter().map(|e| e * int(self.level.into())).collect()
    }
}

fn order_along(x: &ToricVariety, d: &[Rational], level: u32, ray: usize, u: &[Rational]) -> Rational {
    dot(&x.ray(ray), u) + &d[ray] * int(level.into())
}

/// For an invariant flag, `ν_i` is the minimum of `<u, v_i> + m a_i` over
/// the terms surviving the previous restrictions.
pub fn nu_invariant(x: &ToricVariety, d: &[Rational], s: &Section, flag: &InvariantFlag) -> ValuationVector {
    let mut alive: Vec<&QVector> = s.terms.keys().collect();
    let mut entries = Vec::with_capacity(x.n);
    for &j in &flag.order {
        let orders: Vec<Rational> = alive.iter().map(|u| order_along(x, d, s.level, j, u)).collect();
        let min = orders.iter().min().expect("sections have terms").clone();
        alive = alive
            .into_iter()
            .zip(&orders)
            .filter(|(_, o)| **o == min)
            .map(|(u, _)| u)
            .collect();
        entries.push(min / int(s.level.into()));
    }
    ValuationVector {
        entries,
        level: s.level,
    }
}

/// `z` with `<w, z> = 1` for the primitive vector `w = (-q, p)`.
fn transversal(v: &[Rational]) -> (QVector, QVector) {
    let p = v[0].to_integer();
    let q = v[1].to_integer();
    let w = [-q.clone(), p.clone()];
    let g = BigInt::extended_gcd(&w[0], &w[1]);
    // g.x * w0 + g.y * w1 = gcd = ±1
    let sign = if g.gcd.is_negative() {
        -BigInt::one()
    } else {
        BigInt::one()
    };
    let z = vec![Rational::from_integer(g.x * &sign), Rational::from_integer(g.y * &sign)];
    (w.iter().map(|c| Rational::from_integer(c.clone())).collect(), z)
}

/// Multiplicity of `x0` as a root of `Σ c_j T^j` (shifted to start at 0).
fn root_multiplicity(mut coeffs: Vec<Rational>, x0: &Rational) -> usize {
    while coeffs.last().is_some_and(Zero::is_zero) {
        coeffs.pop();
    }
    let mut k = 0;
    loop {
        // synthetic division by (T - x0), highest degree first
        let mut quotient = Vec::with_capacity(coeffs.len());
        let mut acc = Rational::zero();
        for c in coeffs.iter().rev() {
            acc = &acc * x0 + c;
            quotient.push(acc.clone());
        }
        let remainder = quotient.pop().unwrap_or_else(Rational::zero);
        if !remainder.is_zero() || quotient.is_empty() {
            return k;
        }
        quotient.reverse();
        coeffs = quotient;
        k += 1;
    }
}

/// Flag `(D_c, x)` on a toric surface with `x` the point of the orbit of
/// `D_c` with torus coordinate `x0`.
pub fn nu_general_surface(
    x: &ToricVariety,
    d: &[Rational],
    s: &Section,
    c: usize,
    x0: &Rational,
) -> Result<ValuationVector> {
    if x.n != 2 {
        return Err(Error::InvalidInput("general-point flags need a toric surface".into()));
    }
    if x0.is_zero() {
        return Err(Error::InvalidInput(
            "x0 = 0 is a torus-fixed point of the flag curve".into(),
        ));
    }
    let orders: Vec<Rational> = s.terms.keys().map(|u| order_along(x, d, s.level, c, u)).collect();
    let min = orders.iter().min().expect("sections have terms").clone();
    let (_, z) = transversal(&x.ray(c));
    let row: Vec<(BigInt, &Rational)> = s
        .terms
        .iter()
        .zip(&orders)
        .filter(|(_, o)| **o == min)
        .map(|((u, coeff), _)| (dot(u, &z).to_integer(), coeff))
        .collect();
    let lowest = row.iter().map(|(e, _)| e.clone()).min().expect("nonempty row");
    let degree = row.iter().map(|(e, _)| e - &lowest).max().expect("nonempty row");
    let len = usize::try_from(degree).expect("small degree") + 1;
    let mut poly = vec![Rational::zero(); len];
    for (e, coeff) in row {
        let i = usize::try_from(e - &lowest).expect("small exponent");
        poly[i] += coeff;
    }
    let m = int(s.level.into());
    Ok(ValuationVector {
        entries: vec![min / &m, int(root_multiplicity(poly, x0) as i64) / &m],
        level: s.level,
    })
}

/// Row direction `w` (spanning `v_c^⊥`) and a transversal `z` with `<w, z> = 1`.
pub(crate) fn row_direction(x: &ToricVariety, c: usize) -> (QVector, QVector) {
    transversal(&x.ray(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::{frac, qvec};
    use crate::toric::models;

    #[test]
    fn invariant_examples() {
        let p2 = models::p2();
        let h = qvec(&[0, 0, 1]);
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let s = Section::monomial(&p2, &h, 1, qvec(&[0, 0])).unwrap();
        assert_eq!(nu_invariant(&p2, &h, &s, &flag).entries, qvec(&[0, 0]));
        let s = Section::monomial(&p2, &h, 1, qvec(&[1, 0])).unwrap();
        assert_eq!(nu_invariant(&p2, &h, &s, &flag).entries, qvec(&[1, 0]));
        let s = Section::new(
            &p2,
            &h,
            1,
            BTreeMap::from([(qvec(&[1, 0]), int(1)), (qvec(&[0, 1]), int(1))]),
        )
        .unwrap();
        assert_eq!(nu_invariant(&p2, &h, &s, &flag).entries, qvec(&[0, 1]));
    }

    #[test]
    fn general_point_examples() {
        let p2 = models::p2();
        let h = qvec(&[0, 0, 1]);
        let s = Section::monomial(&p2, &h, 1, qvec(&[1, 0])).unwrap();
        assert_eq!(
            nu_general_surface(&p2, &h, &s, 0, &frac(3, 2)).unwrap().entries,
            qvec(&[1, 0])
        );
        // on D_0 the row <u, e1> = 0 contains (0,0) and (0,1); T - x0 vanishes once
        let x0 = frac(-2, 3);
        let (_, z) = row_direction(&p2, 0);
        let (hi, lo) = if dot(&qvec(&[0, 1]), &z) > dot(&qvec(&[0, 0]), &z) {
            (qvec(&[0, 1]), qvec(&[0, 0]))
        } else {
            (qvec(&[0, 0]), qvec(&[0, 1]))
        };
        let s = Section::new(&p2, &h, 1, BTreeMap::from([(hi, int(1)), (lo, -x0.clone())])).unwrap();
        assert_eq!(nu_general_surface(&p2, &h, &s, 0, &x0).unwrap().entries, qvec(&[0, 1]));
        assert!(nu_general_surface(&p2, &h, &s, 0, &int(0)).is_err());
    }

    #[test]
    fn multiplicities() {
        // (T - 2)^2 (T + 1) = T^3 - 3T^2 + 4
        let poly = vec![int(4), int(0), int(-3), int(1)];
        assert_eq!(root_multiplicity(poly.clone(), &int(2)), 2);
        assert_eq!(root_multiplicity(poly.clone(), &int(-1)), 1);
        assert_eq!(root_multiplicity(poly, &int(3)), 0);
    }

    #[test]
    fn sections_outside_the_polytope_are_rejected() {
        let p2 = models::p2();
        assert!(Section::monomial(&p2, &qvec(&[0, 0, 1]), 1, qvec(&[2, 0])).is_err());
        assert!(Section::new(&p2, &qvec(&[0, 0, 1]), 1, BTreeMap::new()).is_err());
    }
}
