//! Exact ε → 0⁺ limits of families whose data is eventually affine in ε.
//!
//! Samples are taken at ε = r, r², r³, … . Each sample is a list of labeled
//! points (the label identifies a vertex combinatorially). Once four
//! consecutive samples carry the same labels and the affine fit through the
//! first two reproduces the other two exactly, the fit is evaluated at ε = 0.

use num_traits::{One, Zero};

use super::rational::{axpy, frac, sub, QVector, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct EpsilonSchedule {
    pub ratio: Rational,
    pub steps: usize,
}

impl Default for EpsilonSchedule {
    fn default() -> Self {
        EpsilonSchedule {
            ratio: frac(1, 2),
            steps: 40,
        }
    }
}

impl EpsilonSchedule {
    pub fn new(ratio: Rational, steps: usize) -> Result<Self> {
        if ratio <= Rational::zero() || ratio >= Rational::one() || steps < 4 {
            return Err(Error::InvalidInput(
                "epsilon schedule needs 0 < ratio < 1 and at least 4 steps".into(),
            ));
        }
        Ok(EpsilonSchedule { ratio, steps })
    }

    /// ε_k = ratio^k, k ≥ 1.
    pub fn eps(&self, k: usize) -> Rational {
        (0..k).fold(Rational::one(), |acc, _| acc * &self.ratio)
    }

    /// Parses `"p/q:steps"` or just `"p/q"`.
    pub fn parse(s: &str) -> Result<Self> {
        let (r, n) = match s.split_once(':') {
            Some((r, n)) => (
                r,
                n.trim()
                    .parse::<usize>()
                    .map_err(|_| Error::Schema(format!("bad epsilon schedule {s:?}")))?,
            ),
            None => (s, EpsilonSchedule::default().steps),
        };
        EpsilonSchedule::new(super::rational::parse(r)?, n)
    }
}

struct Sample<L> {
    eps: Rational,
    points: Vec<(L, QVector)>,
}

fn labels_match<L: Ord>(a: &[(L, QVector)], b: &[(L, QVector)]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.0 == y.0)
}

fn at<L: Clone>(s1: &Sample<L>, s2: &Sample<L>, eps: &Rational) -> Vec<QVector> {
    let t = (eps - &s1.eps) / (&s2.eps - &s1.eps);
    s1.points
        .iter()
        .zip(&s2.points)
        .map(|((_, p1), (_, p2))| axpy(p1, &t, &sub(p2, p1)))
        .collect()
}

/// Exact limit of a labeled point family as ε → 0⁺.
pub fn extrapolate<L, F>(schedule: &EpsilonSchedule, mut sample: F) -> Result<Vec<(L, QVector)>>
where
    L: Ord + Clone,
    F: FnMut(&Rational) -> Result<Vec<(L, QVector)>>,
{
    let mut window: Vec<Sample<L>> = Vec::new();
    for k in 1..=schedule.steps {
        let eps = schedule.eps(k);
        let mut points = sample(&eps)?;
        points.sort_by(|a, b| a.0.cmp(&b.0));
        window.push(Sample { eps, points });
        if window.len() > 4 {
            window.remove(0);
        }
        if window.len() < 4 {
            continue;
        }
        let stable = window.windows(2).all(|w| labels_match(&w[0].points, &w[1].points));
        if !stable {
            continue;
        }
        let (s1, s2) = (&window[0], &window[1]);
        let verified = window[2..]
            .iter()
            .all(|s| at(s1, s2, &s.eps).iter().zip(&s.points).all(|(fit, (_, p))| fit == p));
        if verified {
            let limit = at(s1, s2, &Rational::zero());
            return Ok(s1.points.iter().map(|(l, _)| l.clone()).zip(limit).collect());
        }
    }
    Err(Error::NoStabilization(schedule.steps))
}

/// Scalar version of [`extrapolate`].
pub fn extrapolate_scalar<F>(schedule: &EpsilonSchedule, mut sample: F) -> Result<Rational>
where
    F: FnMut(&Rational) -> Result<Rational>,
{
    let out = extrapolate(schedule, |eps| Ok(vec![((), vec![sample(eps)?])]))?;
    Ok(out[0].1[0].clone())
}
