//! Okounkov bodies for torus-invariant flags.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::divisor::{
    base_loci_with, classify, is_pseudoeffective, numerical_positive_polytope, section_face, section_polytope,
    LimitSettings,
};
use super::fan::ToricVariety;
use crate::body::BodyKind;
use crate::error::{Error, Result};
use crate::exactgeom::lattice::lattice_points;
use crate::exactgeom::polytope::Polytope;
use crate::exactgeom::rational::{dot, factorial, int, lcm_of_denominators, pow, QVector, Rational};
use crate::exactgeom::volume::volume;

/// `Y_i = D_{v_1} ∩ … ∩ D_{v_i}` for the ordered rays of a maximal cone.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantFlag {
    pub order: Vec<usize>,
}

impl InvariantFlag {
    pub fn new(x: &ToricVariety, order: Vec<usize>) -> Result<Self> {
        let mut sorted = order.clone();
        sorted.sort_unstable();
        if order.len() != x.n || !x.max_cones.contains(&sorted) {
            return Err(Error::InvalidInput(format!(
                "flag {order:?} is not an ordering of a maximal cone"
            )));
        }
        Ok(InvariantFlag { order })
    }

    /// The cone whose orbit closure is `Y_{n-k}`.
    pub fn cone_of(&self, codim: usize) -> Vec<usize> {
        let mut c = self.order[..codim].to_vec();
        c.sort_unstable();
        c
    }

    /// `ν(u) = (<u, v_j> + a_j)_j`, the valuation of the section `χ^u` of D.
    pub fn valuation(&self, x: &ToricVariety, d: &[Rational], u: &[Rational]) -> QVector {
        self.order.iter().map(|&j| dot(&x.ray(j), u) + &d[j]).collect()
    }

    fn image(&self, x: &ToricVariety, d: &[Rational], p: &Polytope) -> Result<Polytope> {
        let rows: Vec<QVector> = self.order.iter().map(|&j| x.ray(j)).collect();
        let shift: QVector = self.order.iter().map(|&j| d[j].clone()).collect();
        p.affine_image(&rows, &shift)
    }
}

pub fn okounkov_body(x: &ToricVariety, d: &[Rational], flag: &InvariantFlag, kind: BodyKind) -> Result<Polytope> {
    okounkov_body_with(x, d, flag, kind, &LimitSettings::reference(x)?)
}

pub fn okounkov_body_with(
    x: &ToricVariety,
    d: &[Rational],
    flag: &InvariantFlag,
    kind: BodyKind,
    limits: &LimitSettings,
) -> Result<Polytope> {
    let p = match kind {
        BodyKind::Big => {
            if !classify(x, d)?.big {
                return Err(Error::HypothesisUnmet("divisor is not big".into()));
            }
            section_polytope(x, d)?
        }
        BodyKind::Val => {
            let p = section_polytope(x, d)?;
            if p.is_empty() {
                return Err(Error::HypothesisUnmet("P_D is empty".into()));
            }
            p
        }
        BodyKind::Lim => {
            if !is_pseudoeffective(x, d) {
                return Err(Error::NotPseudoEffective);
            }
            numerical_positive_polytope(x, d, limits)?
        }
    };
    flag.image(x, d, &p)
}

/// Restricted volume along `V = Y_{n-k}`: `k! vol(slice(Δ(D), k))`, checked
/// against the `k`-th finite difference of `#(lattice points of the face of
/// P_{mD} over V)`.
pub fn restricted_volume(x: &ToricVariety, d: &[Rational], flag: &InvariantFlag, k: usize) -> Result<Rational> {
    restricted_volume_with(x, d, flag, k, &LimitSettings::reference(x)?)
}

pub fn restricted_volume_with(
    x: &ToricVariety,
    d: &[Rational],
    flag: &InvariantFlag,
    k: usize,
    limits: &LimitSettings,
) -> Result<Rational> {
    let n = x.n;
    if k > n {
        return Err(Error::InvalidInput(format!("k = {k} exceeds dimension {n}")));
    }
    let cone = flag.cone_of(n - k);
    if base_loci_with(x, d, limits)?.augmented_contains(&cone) {
        return Err(Error::HypothesisUnmet(
            "restricted volume undefined here: flag element lies in B+(D)".into(),
        ));
    }
    let body = okounkov_body_with(x, d, flag, BodyKind::Val, limits)?;
    let coords: Vec<usize> = (n - k..n).collect();
    let value = factorial(k) * volume(&body.slice(k)?, &coords)?;

    let face = section_face(x, d, &cone)?;
    let q = face
        .vertices()
        .iter()
        .map(|v| lcm_of_denominators(v))
        .fold(BigInt::one(), |acc, l| acc.lcm(&l));
    let q = Rational::from_integer(q);
    let counts = (1..=k + 1)
        .map(|t| {
            let scaled = face.dilate(&(&q * int(t as i64)));
            Ok(lattice_points(&scaled)?.len())
        })
        .collect::<Result<Vec<usize>>>()?;
    let mut diff = Rational::zero();
    for (j, c) in counts.iter().enumerate() {
        let sign = if (k - j).is_multiple_of(2) { 1 } else { -1 };
        diff += int(sign * binomial(k, j) * *c as i64);
    }
    let from_counts = diff / pow(&q, k);
    if from_counts != value {
        return Err(Error::Refuted(format!(
            "restricted volume {value} disagrees with section counts {from_counts}"
        )));
    }
    Ok(value)
}

fn binomial(n: usize, k: usize) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::qvec;
    use crate::toric::models;

    fn simplex2() -> Polytope {
        Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])])
    }

    #[test]
    fn p2_hyperplane_body_is_simplex() {
        let p2 = models::p2();
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        for kind in [BodyKind::Big, BodyKind::Val, BodyKind::Lim] {
            assert!(okounkov_body(&p2, &qvec(&[0, 0, 1]), &flag, kind)
                .unwrap()
                .equals(&simplex2()));
        }
    }

    #[test]
    fn fiber_val_body_is_segment() {
        let q = models::p1xp1();
        let flag = InvariantFlag::new(&q, vec![1, 0]).unwrap();
        let d = qvec(&[1, 0, 0, 0]);
        let val = okounkov_body(&q, &d, &flag, BodyKind::Val).unwrap();
        assert!(val.equals(&Polytope::hull(&[qvec(&[0, 0]), qvec(&[0, 1])])));
        assert_eq!(
            okounkov_body(&q, &d, &flag, BodyKind::Big).unwrap_err(),
            Error::HypothesisUnmet("divisor is not big".into())
        );
        let lim = okounkov_body(&q, &d, &flag, BodyKind::Lim).unwrap();
        assert!(lim.contains(&val));
    }

    #[test]
    fn bad_flags_are_rejected() {
        let p2 = models::p2();
        assert!(InvariantFlag::new(&p2, vec![0]).is_err());
        assert!(InvariantFlag::new(&models::p1xp1(), vec![0, 2]).is_err());
    }

    #[test]
    fn restricted_volumes() {
        let p2 = models::p2();
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let h = qvec(&[0, 0, 1]);
        assert_eq!(restricted_volume(&p2, &h, &flag, 1).unwrap(), int(1));
        assert_eq!(restricted_volume(&p2, &h, &flag, 2).unwrap(), int(1));
        let q = models::p1xp1();
        let flag = InvariantFlag::new(&q, vec![0, 1]).unwrap();
        assert_eq!(restricted_volume(&q, &qvec(&[0, 0, 1, 1]), &flag, 1).unwrap(), int(1));
        assert_eq!(restricted_volume(&q, &qvec(&[0, 0, 1, 1]), &flag, 2).unwrap(), int(2));
    }

    #[test]
    fn restricted_volume_inside_augmented_locus_is_an_error() {
        // F₂ with D = D₁ + D₀: the (-2)-curve D₁ sits in B+
        let f2 = models::hirzebruch(2);
        let d = qvec(&[0, 1, 1, 0]);
        let flag = InvariantFlag::new(&f2, vec![1, 0]).unwrap();
        assert!(matches!(
            restricted_volume(&f2, &d, &flag, 1),
            Err(Error::HypothesisUnmet(_))
        ));
    }

    #[test]
    fn big_volume_matches_section_polytope() {
        let x = models::bl_p3();
        let a = x.reference_ample().unwrap();
        let flag = InvariantFlag::new(&x, x.max_cones[0].clone()).unwrap();
        let body = okounkov_body(&x, &a, &flag, BodyKind::Big).unwrap();
        assert_eq!(
            crate::exactgeom::volume::full_volume(&body),
            crate::exactgeom::volume::full_volume(&section_polytope(&x, &a).unwrap())
        );
    }
}
