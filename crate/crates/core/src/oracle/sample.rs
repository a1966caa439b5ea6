use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::section::{nu_general_surface, nu_invariant, row_direction, Section, ValuationVector};
use crate::error::{Error, Result};
use crate::exactgeom::lattice::lattice_points;
use crate::exactgeom::polytope::Polytope;
use crate::exactgeom::rational::{dot, frac, int, QVector, Rational};
use crate::exactgeom::volume::full_volume;
use crate::toric::body::InvariantFlag;
use crate::toric::divisor::section_polytope;
use crate::toric::fan::ToricVariety;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SampleConfig {
    pub degrees: Vec<u32>,
    pub samples: usize,
    pub seed: u64,
    pub pool: i64,
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            degrees: vec![1, 2, 4, 8],
            samples: 64,
            seed: 12345,
            pool: 3,
        }
    }
}

impl SampleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.degrees.is_empty() || self.degrees.contains(&0) || self.samples == 0 || self.pool < 1 {
            return Err(Error::InvalidInput(
                "sample config needs degrees ≥ 1, samples ≥ 1 and pool ≥ 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleFlag {
    Invariant(InvariantFlag),
    /// Invariant curve `D_c` of a toric surface and a general point on it.
    General {
        curve: usize,
    },
}

/// All valuation vectors produced at one level, and their hull.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledLevel {
    pub level: u32,
    pub x0: Option<Rational>,
    pub points: Vec<ValuationVector>,
    pub hull: Polytope,
}

fn coefficient(rng: &mut ChaCha8Rng, pool: i64) -> Rational {
    let k = rng.gen_range(1..=pool);
    int(if rng.gen_bool(0.5) { k } else { -k })
}

fn general_x0(rng: &mut ChaCha8Rng) -> Rational {
    let p = rng.gen_range(1..=5i64);
    let q = rng.gen_range(1..=5i64);
    frac(if rng.gen_bool(0.5) { p } else { -p }, q)
}

fn binomial(n: usize, k: usize) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// Coefficients of `(T - x0)^j · g(T)`.
fn vanishing_poly(x0: &Rational, j: usize, g: &[Rational]) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); j + g.len()];
    for (a, ga) in g.iter().enumerate() {
        for i in 0..=j {
            let sign = if (j - i).is_multiple_of(2) { int(1) } else { int(-1) };
            let c = Rational::from_integer(binomial(j, i)) * crate::exactgeom::rational::pow(x0, j - i) * sign;
            out[a + i] += c * ga;
        }
    }
    out
}

struct Rows {
    /// Order along the flag curve → exponents sorted along the row.
    rows: BTreeMap<Rational, Vec<QVector>>,
}

impl Rows {
    fn new(x: &ToricVariety, c: usize, pts: &[QVector]) -> Self {
        let (_, z) = row_direction(x, c);
        let v = x.ray(c);
        let mut rows: BTreeMap<Rational, Vec<QVector>> = BTreeMap::new();
        for u in pts {
            rows.entry(dot(u, &v)).or_default().push(u.clone());
        }
        for row in rows.values_mut() {
            row.sort_by_key(|u| dot(u, &z));
        }
        Rows { rows }
    }

    /// A section whose leading row restricts to `(T - x0)^j g(T)`.
    fn section_terms(row: &[QVector], poly: &[Rational]) -> BTreeMap<QVector, Rational> {
        row.iter()
            .zip(poly)
            .filter(|(_, c)| !c.is_zero())
            .map(|(u, c)| (u.clone(), c.clone()))
            .collect()
    }
}

/// Sampled inner approximations `Δ_m` for every configured level.
pub fn sample_body(
    x: &ToricVariety,
    d: &[Rational],
    flag: &OracleFlag,
    cfg: &SampleConfig,
) -> Result<Vec<SampledLevel>> {
    cfg.validate()?;
    if let OracleFlag::General { curve } = flag {
        if x.n != 2 || *curve >= x.num_rays() {
            return Err(Error::InvalidInput(
                "general-point flags need an invariant curve of a toric surface".into(),
            ));
        }
    }
    let mut out = Vec::new();
    for &m in &cfg.degrees {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        rng.set_stream(u64::from(m));
        let md: QVector = d.iter().map(|c| c * int(m.into())).collect();
        let pts = lattice_points(&section_polytope(x, &md)?)?;
        if pts.is_empty() {
            continue;
        }
        let x0 = matches!(flag, OracleFlag::General { .. }).then(|| general_x0(&mut rng));
        let nu = |s: &Section| -> Result<ValuationVector> {
            match flag {
                OracleFlag::Invariant(f) => Ok(nu_invariant(x, d, s, f)),
                OracleFlag::General { curve } => nu_general_surface(x, d, s, *curve, x0.as_ref().expect("drawn above")),
            }
        };
        let mut sections = Vec::new();
        for u in &pts {
            sections.push(Section::monomial(x, d, m, u.clone())?);
        }
        let rows = match flag {
            OracleFlag::General { curve } => Some(Rows::new(x, *curve, &pts)),
            OracleFlag::Invariant(_) => None,
        };
        if let (Some(rows), Some(x0)) = (&rows, &x0) {
            // maximal vanishing at x along every row
            for row in rows.rows.values() {
                let poly = vanishing_poly(x0, row.len() - 1, &[int(1)]);
                sections.push(Section::new(x, d, m, Rows::section_terms(row, &poly))?);
            }
        }
        for _ in 0..cfg.samples {
            let mut terms: BTreeMap<QVector, Rational> = BTreeMap::new();
            match (&rows, &x0) {
                (Some(rows), Some(x0)) if rng.gen_bool(0.5) => {
                    let keys: Vec<&Rational> = rows.rows.keys().collect();
                    let key = keys[rng.gen_range(0..keys.len())];
                    let row = &rows.rows[key];
                    let j = rng.gen_range(0..row.len());
                    let g: Vec<Rational> = (0..row.len() - j).map(|_| coefficient(&mut rng, cfg.pool)).collect();
                    terms = Rows::section_terms(row, &vanishing_poly(x0, j, &g));
                    // noise in rows of higher order leaves ν unchanged
                    for (k, other) in &rows.rows {
                        if k > key && rng.gen_bool(0.3) {
                            let u = other.choose(&mut rng).expect("rows are nonempty");
                            terms.insert(u.clone(), coefficient(&mut rng, cfg.pool));
                        }
                    }
                }
                _ => {
                    let size = rng.gen_range(1..=pts.len().min(6));
                    for u in pts.choose_multiple(&mut rng, size) {
                        terms.insert(u.clone(), coefficient(&mut rng, cfg.pool));
                    }
                }
            }
            if let Ok(s) = Section::new(x, d, m, terms) {
                sections.push(s);
            }
        }
        let points = sections.iter().map(&nu).collect::<Result<Vec<_>>>()?;
        let hull = Polytope::hull_in(x.n, &points.iter().map(|p| p.entries.clone()).collect::<Vec<_>>());
        out.push(SampledLevel {
            level: m,
            x0,
            points,
            hull,
        });
    }
    if out.is_empty() {
        return Err(Error::HypothesisUnmet(
            "P_mD is empty for every requested degree".into(),
        ));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelReport {
    pub level: u32,
    pub contained: bool,
    /// A sampled valuation vector outside the target, if any.
    pub witness: Option<QVector>,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelReport>,
    pub monotone: bool,
}

impl ConvergenceReport {
    pub fn all_contained(&self) -> bool {
        self.levels.iter().all(|l| l.contained)
    }

    pub fn final_ratio(&self) -> Rational {
        self.levels.last().map_or_else(Rational::zero, |l| l.ratio.clone())
    }

    pub fn passes(&self, threshold: &Rational) -> bool {
        self.all_contained() && &self.final_ratio() >= threshold
    }

    /// Error form of a containment failure.
    pub fn refutation(&self) -> Option<Error> {
        self.levels.iter().find(|l| !l.contained).map(|l| {
            let w: Vec<String> = l
                .witness
                .iter()
                .flatten()
                .map(crate::exactgeom::rational::format)
                .collect();
            Error::Refuted(format!("closed form refuted at level {}: ({})", l.level, w.join(", ")))
        })
    }
}

/// Volume of `p` measured in the coordinates along which `target` varies.
fn measure(p: &Polytope, target: &Polytope) -> Option<Rational> {
    let dim = target.affine_dim()?;
    let first = target.vertices().first()?;
    let coords: Vec<usize> = (0..target.ambient_dim())
        .filter(|&i| target.vertices().iter().any(|v| v[i] != first[i]))
        .collect();
    if coords.len() != dim {
        return None;
    }
    if p.is_empty() {
        return Some(Rational::zero());
    }
    let proj = |q: &Polytope| {
        Polytope::hull_in(
            dim,
            &q.vertices()
                .iter()
                .map(|v| coords.iter().map(|&i| v[i].clone()).collect())
                .collect::<Vec<QVector>>(),
        )
    };
    Some(if dim == 0 { int(1) } else { full_volume(&proj(p)) })
}

pub fn convergence_report(levels: &[SampledLevel], target: &Polytope) -> ConvergenceReport {
    let total = measure(target, target);
    let reports: Vec<LevelReport> = levels
        .iter()
        .map(|l| {
            let witness = l
                .points
                .iter()
                .find(|p| !target.contains_point(&p.entries))
                .map(|p| p.entries.clone());
            let ratio = match (&total, measure(&l.hull, target)) {
                (Some(t), Some(v)) if !t.is_zero() => v / t,
                _ => {
                    if l.hull.equals(target) {
                        int(1)
                    } else {
                        Rational::zero()
                    }
                }
            };
            LevelReport {
                level: l.level,
                contained: witness.is_none(),
                witness,
                ratio,
            }
        })
        .collect();
    let monotone = reports.windows(2).all(|w| w[0].ratio <= w[1].ratio);
    ConvergenceReport {
        levels: reports,
        monotone,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::body::BodyKind;
    use crate::exactgeom::rational::qvec;
    use crate::surface;
    use crate::toric::{models, okounkov_body};

    #[test]
    fn p2_hyperplane_is_exact_at_level_one() {
        let p2 = models::p2();
        let h = qvec(&[0, 0, 1]);
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let cfg = SampleConfig {
            degrees: vec![1, 3],
            ..SampleConfig::default()
        };
        let levels = sample_body(&p2, &h, &OracleFlag::Invariant(flag.clone()), &cfg).unwrap();
        let target = okounkov_body(&p2, &h, &flag, BodyKind::Big).unwrap();
        let report = convergence_report(&levels, &target);
        assert!(report.all_contained());
        assert_eq!(report.levels[0].ratio, int(1));
        assert!(levels[1].hull.equals(&target));
    }

    #[test]
    fn fiber_samples_stay_on_the_axis() {
        let q = models::p1xp1();
        let f = qvec(&[1, 0, 0, 0]);
        let flag = InvariantFlag::new(&q, vec![1, 0]).unwrap();
        let levels = sample_body(&q, &f, &OracleFlag::Invariant(flag.clone()), &SampleConfig::default()).unwrap();
        assert!(levels.iter().flat_map(|l| &l.points).all(|p| p.entries[0].is_zero()));
        let target = okounkov_body(&q, &f, &flag, BodyKind::Val).unwrap();
        let report = convergence_report(&levels, &target);
        assert!(report.passes(&int(1)));
    }

    #[test]
    fn general_flag_samples_lie_in_the_polygon() {
        let x = models::hirzebruch(1);
        let d = qvec(&[0, 0, 1, 1]);
        let s = surface::from_toric(&x).unwrap();
        let class = surface::toric_class(&x, &d).unwrap();
        let target = surface::okounkov_polygon(&s, &class, surface::SurfFlag { curve: 3 }, BodyKind::Big).unwrap();
        let cfg = SampleConfig::default();
        let levels = sample_body(&x, &d, &OracleFlag::General { curve: 3 }, &cfg).unwrap();
        let report = convergence_report(&levels, &target);
        assert!(report.all_contained(), "{report:?}");
        assert!(report.final_ratio() > frac(3, 4), "{report:?}");
        assert_eq!(
            levels,
            sample_body(&x, &d, &OracleFlag::General { curve: 3 }, &cfg).unwrap()
        );
    }

    #[test]
    fn refuted_target_reports_a_witness() {
        let p2 = models::p2();
        let h = qvec(&[0, 0, 1]);
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let levels = sample_body(&p2, &h, &OracleFlag::Invariant(flag), &SampleConfig::default()).unwrap();
        let wrong = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]).dilate(&frac(1, 2));
        let report = convergence_report(&levels, &wrong);
        assert!(!report.all_contained());
        assert!(matches!(report.refutation(), Some(Error::Refuted(_))));
    }

    #[test]
    fn products_add_valuations() {
        let p2 = models::p2();
        let h = qvec(&[0, 0, 1]);
        let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
        let a = Section::new(
            &p2,
            &h,
            1,
            BTreeMap::from([(qvec(&[1, 0]), int(1)), (qvec(&[0, 1]), int(2))]),
        )
        .unwrap();
        let b = Section::new(
            &p2,
            &h,
            1,
            BTreeMap::from([(qvec(&[0, 0]), int(-1)), (qvec(&[0, 1]), int(3))]),
        )
        .unwrap();
        let nab = nu_invariant(&p2, &h, &a.product(&b), &flag).unnormalized();
        let sum: QVector = nu_invariant(&p2, &h, &a, &flag)
            .unnormalized()
            .iter()
            .zip(nu_invariant(&p2, &h, &b, &flag).unnormalized())
            .map(|(x, y)| x + y)
            .collect();
        assert_eq!(nab, sum);
    }
}
