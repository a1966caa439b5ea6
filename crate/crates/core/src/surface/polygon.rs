//! Okounkov polygons for flags `(C, general point of C)`.

use num_traits::{Signed, Zero};

use super::model::LatticeSurface;
use super::zariski::{classify, lex_decompose, numerical_dim, solve_on_support, zariski_decompose};
use crate::body::BodyKind;
use crate::decomposition::DecompositionKind;
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exactgeom::limit::{extrapolate, EpsilonSchedule};
use crate::exactgeom::polytope::Polytope;
use crate::exactgeom::rational::{axpy, int, scale, QVector, Rational};

/// Flag `C ⊃ {x}` with `x` a general point of the curve `C`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfFlag {
    pub curve: usize,
}

/// One chamber `[start, end]` of `t ↦ D - tC`: fixed negative support,
/// `N(t) = n0 + t n1` and `β(t) = P_t · C = beta0 + t beta1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Chamber {
    pub start: Rational,
    pub end: Rational,
    pub support: Vec<usize>,
    pub n0: QVector,
    pub n1: QVector,
    pub beta0: Rational,
    pub beta1: Rational,
}

impl Chamber {
    pub fn beta(&self, t: &Rational) -> Rational {
        &self.beta0 + &self.beta1 * t
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Coefficient of C in `N_σ(D)`.
    pub a: Rational,
    pub mu: Rational,
    pub chambers: Vec<Chamber>,
}

impl Sweep {
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out = vec![self.a.clone()];
        out.extend(self.chambers.iter().map(|c| c.end.clone()));
        out
    }

    pub fn beta_at(&self, t: &Rational) -> Option<Rational> {
        self.chambers
            .iter()
            .find(|c| &c.start <= t && t <= &c.end)
            .map(|c| c.beta(t))
    }
}

/// Order of `C` in the negative part of the σ-decomposition.
pub fn ord_in_negative(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<Rational> {
    Ok(zariski_decompose(s, d, DecompositionKind::Sigma)?.coeff_of(c))
}

pub fn parametric_sweep(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<Sweep> {
    let cc = s.curves[c].class.clone();
    let a = ord_in_negative(s, d, c)?;
    let mu = s.mu(d, &cc)?;
    let minus_c: QVector = cc.iter().map(|x| -x).collect();
    let mut chambers = Vec::new();
    let mut t = a.clone();
    while t < mu {
        let dt = axpy(d, &-t.clone(), &cc);
        let right = lex_decompose(s, &dt, &minus_c)?;
        if right.support.contains(&c) {
            return Err(Error::Refuted(
                "flag curve entered the negative part past its order".into(),
            ));
        }
        let support = right.support.clone();
        // N(t) solved on the support, affine in t
        let (n0, n1) = if support.is_empty() {
            (
                vec![Rational::zero(); s.curves.len()],
                vec![Rational::zero(); s.curves.len()],
            )
        } else {
            let c0 = solve_on_support(s, &support, d)?;
            let c1 = solve_on_support(s, &support, &minus_c)?;
            let mut n0 = vec![Rational::zero(); s.curves.len()];
            let mut n1 = n0.clone();
            for (k, &i) in support.iter().enumerate() {
                n0[i] = c0[k].clone();
                n1[i] = c1[k].clone();
            }
            (n0, n1)
        };
        let neg_class = |n: &QVector| {
            n.iter()
                .zip(&s.curves)
                .fold(vec![Rational::zero(); s.rank], |acc, (x, cv)| axpy(&acc, x, &cv.class))
        };
        let p0: QVector = d.iter().zip(neg_class(&n0)).map(|(x, y)| x - y).collect();
        let p1: QVector = minus_c.iter().zip(neg_class(&n1)).map(|(x, y)| x - y).collect();
        let mut end = mu.clone();
        for &i in &support {
            if n1[i].is_negative() {
                let root = -&n0[i] / &n1[i];
                if root > t && root < end {
                    end = root;
                }
            }
        }
        for (i, cv) in s.curves.iter().enumerate() {
            if support.contains(&i) {
                continue;
            }
            let (v0, v1) = (s.pairing(&p0, &cv.class), s.pairing(&p1, &cv.class));
            if v1.is_negative() {
                let root = -&v0 / &v1;
                if root > t && root < end {
                    end = root;
                }
            }
        }
        chambers.push(Chamber {
            start: t.clone(),
            end: end.clone(),
            support,
            n0,
            n1,
            beta0: s.pairing(&p0, &cc),
            beta1: s.pairing(&p1, &cc),
        });
        t = end;
    }
    Ok(Sweep { a, mu, chambers })
}

/// `{(t, y) : a ≤ t ≤ μ, 0 ≤ y ≤ β(t)}` for big D.
fn big_polygon(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<Polytope> {
    Ok(Polytope::hull_in(
        2,
        &labelled_big_vertices(s, d, c)?
            .into_iter()
            .map(|(_, v)| v)
            .collect::<Vec<_>>(),
    ))
}

/// Corner points of the big polygon labelled by (breakpoint index, top?).
fn labelled_big_vertices(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<Vec<((usize, bool), QVector)>> {
    let sweep = parametric_sweep(s, d, c)?;
    let mut pts = Vec::new();
    for (k, t) in sweep.breakpoints().iter().enumerate() {
        let beta = if k == 0 {
            sweep.chambers.first().map_or_else(Rational::zero, |ch| ch.beta(t))
        } else {
            sweep.chambers[k - 1].beta(t)
        };
        pts.push(((k, false), vec![t.clone(), int(0)]));
        pts.push(((k, true), vec![t.clone(), beta]));
    }
    Ok(pts)
}

fn segment(from: QVector, to: QVector) -> Polytope {
    Polytope::hull_in(2, &[from, to])
}

/// `(F, d)` with `p = d F` for a declared fibration class F.
pub fn fibration_multiple(s: &LatticeSurface, p: &[Rational]) -> Option<(QVector, Rational)> {
    let k = p.iter().position(|x| !x.is_zero())?;
    s.fibrations.iter().find_map(|f| {
        if f[k].is_zero() {
            return None;
        }
        let dd = &p[k] / &f[k];
        (dd.is_positive() && scale(f, &dd) == p).then(|| (f.clone(), dd))
    })
}

pub fn okounkov_polygon(s: &LatticeSurface, d: &[Rational], flag: SurfFlag, kind: BodyKind) -> Result<Polytope> {
    s.check_class(d)?;
    let c = flag.curve;
    let cc = s
        .curves
        .get(c)
        .ok_or_else(|| Error::InvalidInput(format!("no curve with index {c}")))?
        .class
        .clone();
    let class = classify(s, d)?;
    if !class.pseudoeffective {
        return Err(Error::NotPseudoEffective);
    }
    if class.big {
        return big_polygon(s, d, c);
    }
    let z = zariski_decompose(s, d, DecompositionKind::Sigma)?;
    let origin = vec![z.coeff_of(c), int(0)];
    let p = z.positive.clone();
    let kappa_nu = numerical_dim(s, d)?;
    match kind {
        BodyKind::Big => Err(Error::HypothesisUnmet("divisor is not big".into())),
        BodyKind::Lim => match kappa_nu {
            Dimension::Finite(0) => Ok(Polytope::hull_in(2, &[origin])),
            _ => {
                let h = s.pairing(&p, &cc);
                if h.is_positive() {
                    Ok(segment(origin.clone(), vec![origin[0].clone(), h]))
                } else {
                    let width = s.mu(&p, &cc)?;
                    Ok(segment(origin.clone(), vec![&origin[0] + width, int(0)]))
                }
            }
        },
        BodyKind::Val => {
            if !s.abundant {
                return Err(Error::HypothesisUnmet(
                    "valuative body of a non-big class needs the abundance flag".into(),
                ));
            }
            match kappa_nu {
                Dimension::Finite(0) => Ok(Polytope::hull_in(2, &[origin])),
                _ => {
                    let (f, dd) = fibration_multiple(s, &p)
                        .ok_or_else(|| Error::HypothesisUnmet("fibration data required".into()))?;
                    if s.pairing(&cc, &f).is_positive() {
                        Ok(segment(origin.clone(), vec![origin[0].clone(), dd]))
                    } else if cc == f {
                        Ok(segment(origin.clone(), vec![&origin[0] + dd, int(0)]))
                    } else {
                        Err(Error::HypothesisUnmet(format!(
                            "flag curve {} is a proper fiber component",
                            s.curves[c].name
                        )))
                    }
                }
            }
        }
    }
}

/// `Δ(D + εA)` for the big class `D + εA`.
pub fn perturbed_polygon(
    s: &LatticeSurface,
    d: &[Rational],
    a: &[Rational],
    eps: &Rational,
    flag: SurfFlag,
) -> Result<Polytope> {
    big_polygon(s, &axpy(d, eps, a), flag.curve)
}

/// `lim_{ε→0} Δ(D + εA)` by extrapolating labelled polygon corners.
pub fn extrapolated_limit(
    s: &LatticeSurface,
    d: &[Rational],
    a: &[Rational],
    schedule: &EpsilonSchedule,
    flag: SurfFlag,
) -> Result<Polytope> {
    let pts = extrapolate(schedule, |eps| labelled_big_vertices(s, &axpy(d, eps, a), flag.curve))?;
    Ok(Polytope::hull_in(
        2,
        &pts.into_iter().map(|(_, v)| v).collect::<Vec<_>>(),
    ))
}

/// Divisorial parts of `B₋` and `B₊` as curve indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorialLoci {
    pub restricted: Vec<usize>,
    pub augmented: Option<Vec<usize>>,
}

pub fn base_loci_divisorial(s: &LatticeSurface, d: &[Rational]) -> Result<DivisorialLoci> {
    let z = zariski_decompose(s, d, DecompositionKind::Sigma)?;
    let restricted = z.support();
    let augmented = if classify(s, d)?.big {
        let mut b: Vec<usize> = (0..s.curves.len())
            .filter(|&i| restricted.contains(&i) || s.pairing(&z.positive, &s.curves[i].class).is_zero())
            .collect();
        b.sort_unstable();
        Some(b)
    } else {
        None
    };
    Ok(DivisorialLoci { restricted, augmented })
}

pub fn augmented_locus(s: &LatticeSurface, d: &[Rational]) -> Result<Vec<usize>> {
    base_loci_divisorial(s, d)?
        .augmented
        .ok_or_else(|| Error::HypothesisUnmet("B+ of a non-big class is the whole surface".into()))
}

/// `vol_{X|C}(D)`.
pub fn restricted_volume(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<Rational> {
    let cc = &s.curves[c].class;
    if classify(s, d)?.big {
        if augmented_locus(s, d)?.contains(&c) {
            return Err(Error::HypothesisUnmet(
                "restricted volume undefined here: C lies in B+(D)".into(),
            ));
        }
        let p = zariski_decompose(s, d, DecompositionKind::Sigma)?.positive;
        return Ok(s.pairing(&p, cc));
    }
    let z = zariski_decompose(s, d, DecompositionKind::Sigma)?;
    if z.support().contains(&c) {
        return Err(Error::HypothesisUnmet(
            "restricted volume undefined here: C lies in B-(D)".into(),
        ));
    }
    if z.positive.iter().all(Zero::is_zero) {
        return Ok(Rational::zero());
    }
    match fibration_multiple(s, &z.positive) {
        Some((f, dd)) if s.pairing(cc, &f).is_positive() => Ok(dd),
        _ => Err(Error::HypothesisUnmet("fibration data required".into())),
    }
}

/// `vol⁺_{X|C}(D) = lim_{δ→0} P_σ(D + δA) · C`.
pub fn augmented_restricted_volume(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<Rational> {
    let z = zariski_decompose(s, d, DecompositionKind::Sigma)?;
    if z.support().contains(&c) {
        return Err(Error::HypothesisUnmet(
            "augmented restricted volume undefined here: C lies in B-(D)".into(),
        ));
    }
    let a = s.ample()?;
    let lex = lex_decompose(s, d, &a)?;
    Ok(s.pairing(&lex.p0, &s.curves[c].class))
}

pub fn restricted_volumes(s: &LatticeSurface, d: &[Rational], c: usize) -> Result<(Rational, Rational)> {
    Ok((restricted_volume(s, d, c)?, augmented_restricted_volume(s, d, c)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::qvec;
    use crate::exactgeom::volume::full_volume;
    use crate::surface::model;

    fn hull(pts: &[[i64; 2]]) -> Polytope {
        Polytope::hull_in(2, &pts.iter().map(|p| qvec(p)).collect::<Vec<_>>())
    }

    #[test]
    fn sweep_examples() {
        let s = model::bl1_p2();
        let h = qvec(&[1, 0]);
        let sw = parametric_sweep(&s, &h, 1).unwrap();
        assert_eq!(sw.chambers.len(), 1);
        assert_eq!(sw.chambers[0].support, vec![0]);
        assert_eq!(sw.chambers[0].n1[0], int(1));
        assert_eq!(
            (sw.chambers[0].beta0.clone(), sw.chambers[0].beta1.clone()),
            (int(1), int(-1))
        );

        let sw = parametric_sweep(&s, &h, 0).unwrap();
        assert!(sw.chambers[0].support.is_empty());
        assert_eq!(
            (sw.chambers[0].beta0.clone(), sw.chambers[0].beta1.clone()),
            (int(0), int(1))
        );

        let sw = parametric_sweep(&s, &qvec(&[1, 1]), 0).unwrap();
        assert_eq!((sw.a.clone(), sw.mu.clone()), (int(1), int(2)));
        assert_eq!(sw.beta_at(&int(2)), Some(int(1)));
    }

    #[test]
    fn polygon_examples() {
        let s = model::bl1_p2();
        let flag = SurfFlag { curve: 1 };
        let tri = okounkov_polygon(&s, &qvec(&[1, 0]), flag, BodyKind::Big).unwrap();
        assert!(tri.equals(&hull(&[[0, 0], [1, 0], [0, 1]])));
        let shifted = okounkov_polygon(&s, &qvec(&[1, 1]), SurfFlag { curve: 0 }, BodyKind::Lim).unwrap();
        assert!(shifted.equals(&hull(&[[1, 0], [2, 0], [2, 1]])));
        // 2 area = P² = 1
        assert_eq!(full_volume(&shifted) * int(2), int(1));
    }

    #[test]
    fn fiber_class_bodies() {
        let s = model::p1xp1();
        let f1 = qvec(&[1, 0]);
        let lim = okounkov_polygon(&s, &f1, SurfFlag { curve: 1 }, BodyKind::Lim).unwrap();
        assert!(lim.equals(&hull(&[[0, 0], [0, 1]])));
        let c = s.curve("f1+2f2").unwrap();
        let val = okounkov_polygon(&s, &f1, SurfFlag { curve: c }, BodyKind::Val).unwrap();
        let lim = okounkov_polygon(&s, &f1, SurfFlag { curve: c }, BodyKind::Lim).unwrap();
        assert!(val.equals(&hull(&[[0, 0], [0, 1]])));
        assert!(lim.equals(&hull(&[[0, 0], [0, 2]])));
        assert_eq!(restricted_volumes(&s, &f1, c).unwrap(), (int(1), int(2)));
        assert_eq!(restricted_volumes(&s, &f1, 1).unwrap(), (int(1), int(1)));
    }

    #[test]
    fn extrapolated_limit_matches_closed_form() {
        let s = model::p1xp1();
        let a = qvec(&[1, 1]);
        let f1 = qvec(&[1, 0]);
        let c = s.curve("f1+2f2").unwrap();
        let limit = extrapolated_limit(&s, &f1, &a, &EpsilonSchedule::default(), SurfFlag { curve: c }).unwrap();
        assert!(limit.equals(&okounkov_polygon(&s, &f1, SurfFlag { curve: c }, BodyKind::Lim).unwrap()));
        // flag curve equal to the fiber: body lies on the first axis
        let limit = extrapolated_limit(&s, &f1, &a, &EpsilonSchedule::default(), SurfFlag { curve: 0 }).unwrap();
        assert!(limit.equals(&okounkov_polygon(&s, &f1, SurfFlag { curve: 0 }, BodyKind::Lim).unwrap()));
        let e = model::bl1_p2();
        let limit = extrapolated_limit(
            &e,
            &qvec(&[0, 1]),
            &qvec(&[2, -1]),
            &EpsilonSchedule::default(),
            SurfFlag { curve: 0 },
        )
        .unwrap();
        assert!(limit.equals(&hull(&[[1, 0]])));
    }

    #[test]
    fn divisorial_loci() {
        let s = model::bl1_p2();
        let h = base_loci_divisorial(&s, &qvec(&[1, 0])).unwrap();
        assert!(h.restricted.is_empty());
        assert_eq!(h.augmented, Some(vec![0]));
        let he = base_loci_divisorial(&s, &qvec(&[1, 1])).unwrap();
        assert_eq!((he.restricted.clone(), he.augmented.clone()), (vec![0], Some(vec![0])));
        let amp = base_loci_divisorial(&s, &qvec(&[2, -1])).unwrap();
        assert_eq!(amp.augmented, Some(vec![]));
        assert_eq!(restricted_volumes(&s, &qvec(&[1, 0]), 1).unwrap(), (int(1), int(1)));
    }
}
