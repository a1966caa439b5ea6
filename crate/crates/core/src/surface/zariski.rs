//! Zariski decomposition by Bauer's support-growing iteration.
//!
//! Classes may carry an infinitesimal part: `d0 + δ d1` with δ > 0 smaller
//! than any positive rational. Comparisons are lexicographic, and since the
//! Gram matrix of a support set does not depend on δ, every solve stays
//! affine in δ. This gives exact one-sided limits such as `P_σ(D + δA)` and
//! the chamber to the right of a breakpoint.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};

use super::model::LatticeSurface;
use crate::decomposition::{DecompositionKind, NegativeComponent, ZariskiDecomposition};
use crate::error::{Error, Result};
use crate::exactgeom::linalg::{inertia, solve};
use crate::exactgeom::rational::{axpy, QMatrix, QVector, Rational};

/// `value + slope·δ`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lex {
    pub value: Rational,
    pub slope: Rational,
}

impl Lex {
    pub fn sign(&self) -> Ordering {
        match self.value.cmp(&Rational::zero()) {
            Ordering::Equal => self.slope.cmp(&Rational::zero()),
            other => other,
        }
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }
}

/// Result of the iteration on `d0 + δ d1`: `N = Σ (n0_i + δ n1_i) C_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct LexDecomposition {
    /// Sorted curve indices.
    pub support: Vec<usize>,
    /// Coefficients per curve index (zero off the support).
    pub n0: QVector,
    pub n1: QVector,
    pub p0: QVector,
    pub p1: QVector,
}

impl LexDecomposition {
    pub fn coeff(&self, i: usize) -> Lex {
        Lex {
            value: self.n0[i].clone(),
            slope: self.n1[i].clone(),
        }
    }
}

fn pair_lex(s: &LatticeSurface, a0: &[Rational], a1: &[Rational], c: &[Rational]) -> Lex {
    Lex {
        value: s.pairing(a0, c),
        slope: s.pairing(a1, c),
    }
}

pub fn gram(s: &LatticeSurface, support: &[usize]) -> QMatrix {
    support
        .iter()
        .map(|&i| {
            support
                .iter()
                .map(|&j| s.pairing(&s.curves[i].class, &s.curves[j].class))
                .collect()
        })
        .collect()
}

pub fn is_negative_definite(g: &QMatrix) -> bool {
    let (_, neg, _) = inertia(g);
    neg == g.len()
}

/// Coefficients `c` on `support` with `(D - Σ c_j C_j) · C_i = 0` for all i.
pub fn solve_on_support(s: &LatticeSurface, support: &[usize], d: &[Rational]) -> Result<QVector> {
    let g = gram(s, support);
    let rhs: QVector = support.iter().map(|&i| s.pairing(d, &s.curves[i].class)).collect();
    solve(&g, &rhs).ok_or(Error::SingularGram)
}

fn assemble(s: &LatticeSurface, support: &[usize], coeffs: &[Rational]) -> QVector {
    let mut n = vec![Rational::zero(); s.curves.len()];
    for (k, &i) in support.iter().enumerate() {
        n[i] = coeffs[k].clone();
    }
    n
}

fn class_of(s: &LatticeSurface, n: &[Rational]) -> QVector {
    n.iter()
        .zip(&s.curves)
        .fold(vec![Rational::zero(); s.rank], |acc, (c, curve)| {
            axpy(&acc, c, &curve.class)
        })
}

/// Zariski decomposition of `d0 + δ d1` (requires `d0` pseudoeffective and
/// `d0 + δ d1` pseudoeffective for small δ).
pub fn lex_decompose(s: &LatticeSurface, d0: &[Rational], d1: &[Rational]) -> Result<LexDecomposition> {
    s.check_class(d0)?;
    s.check_class(d1)?;
    if !s.is_pseudoeffective(d0) {
        return Err(Error::NotPseudoEffective);
    }
    let mut support: Vec<usize> = Vec::new();
    loop {
        let (n0, n1) = if support.is_empty() {
            (
                vec![Rational::zero(); s.curves.len()],
                vec![Rational::zero(); s.curves.len()],
            )
        } else {
            (
                assemble(s, &support, &solve_on_support(s, &support, d0)?),
                assemble(s, &support, &solve_on_support(s, &support, d1)?),
            )
        };
        let p0: QVector = d0.iter().zip(class_of(s, &n0)).map(|(a, b)| a - b).collect();
        let p1: QVector = d1.iter().zip(class_of(s, &n1)).map(|(a, b)| a - b).collect();
        let fresh: Vec<usize> = (0..s.curves.len())
            .filter(|i| !support.contains(i))
            .filter(|&i| pair_lex(s, &p0, &p1, &s.curves[i].class).is_negative())
            .collect();
        if fresh.is_empty() {
            if !support.is_empty() && !is_negative_definite(&gram(s, &support)) {
                return Err(Error::SingularGram);
            }
            let out = LexDecomposition {
                support,
                n0,
                n1,
                p0,
                p1,
            };
            if out.support.iter().any(|&i| !out.coeff(i).is_positive()) {
                return Err(Error::Refuted(
                    "Zariski iteration produced a nonpositive coefficient".into(),
                ));
            }
            return Ok(out);
        }
        support.extend(fresh);
        support.sort_unstable();
    }
}

pub fn zariski_decompose(s: &LatticeSurface, d: &[Rational], kind: DecompositionKind) -> Result<ZariskiDecomposition> {
    if kind != DecompositionKind::Sigma && !s.abundant {
        return Err(Error::HypothesisUnmet(format!(
            "{} decomposition needs the abundance flag",
            kind.as_str()
        )));
    }
    let zero = vec![Rational::zero(); s.rank];
    let lex = lex_decompose(s, d, &zero)?;
    let negative = lex
        .support
        .iter()
        .map(|&i| NegativeComponent {
            index: i,
            name: s.curves[i].name.clone(),
            coeff: lex.n0[i].clone(),
        })
        .collect();
    Ok(ZariskiDecomposition {
        positive: lex.p0,
        negative,
        kind,
    })
}

/// The decomposition invariants: P nef, P·N_i = 0, coefficients > 0,
/// negative-definite Gram, and D = P + N. Returns the first violation.
pub fn invariant_violation(s: &LatticeSurface, d: &[Rational], z: &ZariskiDecomposition) -> Option<String> {
    if !s.is_nef(&z.positive) {
        return Some("positive part is not nef".into());
    }
    let mut total = z.positive.clone();
    for c in &z.negative {
        if !c.coeff.is_positive() {
            return Some(format!("coefficient of {} is not positive", c.name));
        }
        if !s.pairing(&z.positive, &s.curves[c.index].class).is_zero() {
            return Some(format!("P · {} is not zero", c.name));
        }
        total = axpy(&total, &c.coeff, &s.curves[c.index].class);
    }
    if total != d {
        return Some("P + N differs from D".into());
    }
    if !z.negative.is_empty() && !is_negative_definite(&gram(s, &z.support())) {
        return Some("Gram matrix of the negative part is not negative definite".into());
    }
    None
}

/// `-∞` for non-psef classes, else 0, 1 or 2 from `P_σ`.
pub fn numerical_dim(s: &LatticeSurface, d: &[Rational]) -> Result<crate::dimension::Dimension> {
    use crate::dimension::Dimension;
    if !s.is_pseudoeffective(d) {
        return Ok(Dimension::NegInfinity);
    }
    let p = zariski_decompose(s, d, DecompositionKind::Sigma)?.positive;
    Ok(if s.self_intersection(&p).is_positive() {
        Dimension::Finite(2)
    } else if p.iter().all(Zero::is_zero) {
        Dimension::Finite(0)
    } else {
        Dimension::Finite(1)
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceClass {
    pub pseudoeffective: bool,
    pub big: bool,
    pub nef: bool,
}

pub fn classify(s: &LatticeSurface, d: &[Rational]) -> Result<SurfaceClass> {
    s.check_class(d)?;
    let pseudoeffective = s.is_pseudoeffective(d);
    let big = pseudoeffective && {
        let p = zariski_decompose(s, d, DecompositionKind::Sigma)?.positive;
        s.self_intersection(&p).is_positive()
    };
    Ok(SurfaceClass {
        pseudoeffective,
        big,
        nef: s.is_nef(d),
    })
}

/// `P_σ(D + δA)` for infinitesimal δ, as `(P_σ(D), d/dδ)`.
pub fn perturbed_positive(s: &LatticeSurface, d: &[Rational], a: &[Rational]) -> Result<(QVector, QVector)> {
    let lex = lex_decompose(s, d, a)?;
    Ok((lex.p0, lex.p1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimension::Dimension;
    use crate::exactgeom::rational::{int, qvec};
    use crate::surface::model;

    #[test]
    fn blowup_h_plus_e() {
        let s = model::bl1_p2();
        let z = zariski_decompose(&s, &qvec(&[1, 1]), DecompositionKind::Sigma).unwrap();
        assert_eq!(z.positive, qvec(&[1, 0]));
        assert_eq!(z.negative.len(), 1);
        assert_eq!(z.negative[0].name, "E");
        assert_eq!(z.negative[0].coeff, int(1));
        assert!(invariant_violation(&s, &qvec(&[1, 1]), &z).is_none());
    }

    #[test]
    fn nef_classes_have_no_negative_part() {
        let s = model::p1xp1();
        let z = zariski_decompose(&s, &qvec(&[1, 0]), DecompositionKind::Sigma).unwrap();
        assert!(z.is_trivial());
        assert_eq!(z.positive, qvec(&[1, 0]));
        let s = model::bl1_p2();
        assert!(zariski_decompose(&s, &qvec(&[3, -1]), DecompositionKind::Sigma)
            .unwrap()
            .is_trivial());
    }

    #[test]
    fn non_psef_is_an_error() {
        let s = model::bl1_p2();
        assert_eq!(
            zariski_decompose(&s, &qvec(&[1, -2]), DecompositionKind::Sigma).unwrap_err(),
            Error::NotPseudoEffective
        );
    }

    #[test]
    fn numerical_dimensions() {
        assert_eq!(
            numerical_dim(&model::p1xp1(), &qvec(&[1, 0])).unwrap(),
            Dimension::Finite(1)
        );
        assert_eq!(
            numerical_dim(&model::bl1_p2(), &qvec(&[1, 0])).unwrap(),
            Dimension::Finite(2)
        );
        assert_eq!(
            numerical_dim(&model::bl1_p2(), &qvec(&[0, 1])).unwrap(),
            Dimension::Finite(0)
        );
        assert_eq!(
            numerical_dim(&model::bl1_p2(), &qvec(&[1, -2])).unwrap(),
            Dimension::NegInfinity
        );
    }

    #[test]
    fn classification() {
        let s = model::bl1_p2();
        let h = classify(&s, &qvec(&[1, 0])).unwrap();
        assert!(h.pseudoeffective && h.nef && h.big);
        let he = classify(&s, &qvec(&[1, 1])).unwrap();
        assert!(he.pseudoeffective && he.big && !he.nef);
        assert!(!classify(&s, &qvec(&[1, -2])).unwrap().pseudoeffective);
    }

    #[test]
    fn infinitesimal_perturbation() {
        // E + δ(2H - E) = 2δH + (1 - δ)E, so P = 2δH
        let s = model::bl1_p2();
        let (p0, p1) = perturbed_positive(&s, &qvec(&[0, 1]), &qvec(&[2, -1])).unwrap();
        assert_eq!(p0, qvec(&[0, 0]));
        assert_eq!(p1, qvec(&[2, 0]));
    }

    #[test]
    fn f2_negative_section() {
        let s = model::f2();
        let z = zariski_decompose(&s, &qvec(&[1, 1]), DecompositionKind::Sigma).unwrap();
        // (B + F)·B = -1: N = (1/2) B, P = (1/2)B + F
        assert_eq!(z.coeff_of(0), crate::exactgeom::rational::frac(1, 2));
        assert!(invariant_violation(&s, &qvec(&[1, 1]), &z).is_none());
    }
}
