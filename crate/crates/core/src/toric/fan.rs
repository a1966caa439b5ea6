//! Smooth complete fans: validation, walls and invariant curves, blowups.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::linalg::{determinant, solve, transpose};
use crate::exactgeom::lp::{LinearProgram, LpOutcome, Relation};
use crate::exactgeom::rational::{dot, int, QMatrix, QVector, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ToricVariety {
    pub n: usize,
    pub rays: Vec<Vec<i64>>,
    /// Each maximal cone as a sorted list of `n` ray indices.
    pub max_cones: Vec<Vec<usize>>,
}

/// One reason a fan is not smooth and complete.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FanViolation {
    WrongRayDimension {
        ray: usize,
    },
    NotPrimitive {
        ray: usize,
    },
    MalformedCone {
        cone: usize,
    },
    NotSmooth {
        cone: usize,
        det: i64,
    },
    /// A wall bounding only one cone; `witness` is a direction outside the fan.
    NotComplete {
        wall: Vec<usize>,
        witness: Vec<Rational>,
    },
    /// A wall shared by a number of cones other than two, or by two cones on
    /// the same side.
    BadWall {
        wall: Vec<usize>,
    },
    /// A generic direction lies in `count` cones instead of one.
    Overlap {
        count: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FanReport {
    pub violations: Vec<FanViolation>,
}

impl FanReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn describe(&self) -> Vec<String> {
        self.violations
            .iter()
            .map(|v| match v {
                FanViolation::WrongRayDimension { ray } => format!("ray {ray} has the wrong dimension"),
                FanViolation::NotPrimitive { ray } => format!("ray {ray} is not primitive"),
                FanViolation::MalformedCone { cone } => format!("cone {cone} is malformed"),
                FanViolation::NotSmooth { cone, det } => {
                    format!("not smooth: cone {cone} has determinant {det}")
                }
                FanViolation::NotComplete { wall, witness } => format!(
                    "not complete: wall {wall:?} bounds one cone; direction {} is uncovered",
                    witness
                        .iter()
                        .map(crate::exactgeom::rational::format)
                        .collect::<Vec<_>>()
                        .join(",")
                ),
                FanViolation::BadWall { wall } => format!("wall {wall:?} is not shared by two opposite cones"),
                FanViolation::Overlap { count } => format!("cones overlap: a generic direction lies in {count} cones"),
            })
            .collect()
    }
}

/// The invariant curve `V(τ)` for an `(n-1)`-cone τ shared by the maximal
/// cones `τ ∪ {left}` and `τ ∪ {right}`, with the wall relation
/// `v_left + v_right + Σ_{i∈τ} b_i v_i = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wall {
    pub rays: Vec<usize>,
    pub left: usize,
    pub right: usize,
    pub relation: Vec<(usize, Rational)>,
}

impl Wall {
    /// Intersection number `D · V(τ)`.
    pub fn degree(&self, d: &[Rational]) -> Rational {
        self.relation
            .iter()
            .fold(&d[self.left] + &d[self.right], |acc, (i, b)| acc + b * &d[*i])
    }

    /// `D_i · V(τ)` for every ray.
    pub fn curve_vector(&self, num_rays: usize) -> QVector {
        let mut v = vec![Rational::zero(); num_rays];
        v[self.left] += int(1);
        v[self.right] += int(1);
        for (i, b) in &self.relation {
            v[*i] += b;
        }
        v
    }
}

impl ToricVariety {
    pub fn new(rays: Vec<Vec<i64>>, mut max_cones: Vec<Vec<usize>>) -> Self {
        let n = rays.first().map_or(0, Vec::len);
        for c in max_cones.iter_mut() {
            c.sort_unstable();
        }
        ToricVariety { n, rays, max_cones }
    }

    pub fn num_rays(&self) -> usize {
        self.rays.len()
    }

    pub fn ray(&self, i: usize) -> QVector {
        self.rays[i].iter().map(|&x| int(x)).collect()
    }

    pub fn ray_name(i: usize) -> String {
        format!("D{i}")
    }

    fn cone_matrix(&self, cone: &[usize]) -> QMatrix {
        cone.iter().map(|&i| self.ray(i)).collect()
    }

    /// Coordinates of `w` in the basis of the cone's rays, if the cone is
    /// simplicial of full dimension.
    pub fn cone_coordinates(&self, cone: &[usize], w: &[Rational]) -> Option<QVector> {
        solve(&transpose(&self.cone_matrix(cone)), w)
    }

    fn in_cone(&self, cone: &[usize], w: &[Rational]) -> bool {
        self.cone_coordinates(cone, w)
            .is_some_and(|c| c.iter().all(|x| !x.is_negative()))
    }

    pub fn validate(&self) -> FanReport {
        let mut violations = Vec::new();
        let n = self.n;
        for (i, r) in self.rays.iter().enumerate() {
            if r.len() != n {
                violations.push(FanViolation::WrongRayDimension { ray: i });
                continue;
            }
            let g = r.iter().fold(0i64, |acc, &x| acc.gcd(&x));
            if g != 1 {
                violations.push(FanViolation::NotPrimitive { ray: i });
            }
        }
        if !violations.is_empty() {
            return FanReport { violations };
        }
        let mut full = true;
        for (ci, c) in self.max_cones.iter().enumerate() {
            let distinct: BTreeSet<_> = c.iter().collect();
            if c.len() != n || distinct.len() != n || c.iter().any(|&i| i >= self.num_rays()) {
                violations.push(FanViolation::MalformedCone { cone: ci });
                full = false;
                continue;
            }
            let det = determinant(&self.cone_matrix(c));
            if det.abs() != int(1) {
                let det_i = det.to_integer().try_into().unwrap_or(i64::MAX);
                violations.push(FanViolation::NotSmooth { cone: ci, det: det_i });
                if det.is_zero() {
                    full = false;
                }
            }
        }
        if !full {
            return FanReport { violations };
        }

        let mut walls: BTreeMap<Vec<usize>, Vec<(usize, usize)>> = BTreeMap::new();
        for (ci, c) in self.max_cones.iter().enumerate() {
            for &opp in c {
                let wall: Vec<usize> = c.iter().copied().filter(|&i| i != opp).collect();
                walls.entry(wall).or_default().push((ci, opp));
            }
        }
        for (wall, cones) in &walls {
            match cones.len() {
                1 => {
                    let witness = self.uncovered_direction(wall, cones[0].1);
                    violations.push(FanViolation::NotComplete {
                        wall: wall.clone(),
                        witness,
                    });
                }
                2 => {
                    if !self.opposite_sides(wall, cones[0].1, cones[1].1) {
                        violations.push(FanViolation::BadWall { wall: wall.clone() });
                    }
                }
                _ => violations.push(FanViolation::BadWall { wall: wall.clone() }),
            }
        }
        if violations.is_empty() {
            let g = self.generic_direction(walls.keys());
            let count = self.max_cones.iter().filter(|c| self.in_cone(c, &g)).count();
            if count != 1 {
                violations.push(FanViolation::Overlap { count });
            }
        }
        FanReport { violations }
    }

    fn hyperplane_side(&self, wall: &[usize], w: &[Rational]) -> Rational {
        let mut m = self.cone_matrix(wall);
        m.push(w.to_vec());
        determinant(&m)
    }

    fn opposite_sides(&self, wall: &[usize], a: usize, b: usize) -> bool {
        let sa = self.hyperplane_side(wall, &self.ray(a));
        let sb = self.hyperplane_side(wall, &self.ray(b));
        (sa.is_positive() && sb.is_negative()) || (sa.is_negative() && sb.is_positive())
    }

    fn uncovered_direction(&self, wall: &[usize], opp: usize) -> QVector {
        let sum = wall.iter().fold(vec![Rational::zero(); self.n], |acc, &i| {
            crate::exactgeom::rational::add(&acc, &self.ray(i))
        });
        let v = self.ray(opp);
        let mut candidate = v.iter().map(|x| -x).collect::<QVector>();
        for k in 1..=64 {
            candidate = sum.iter().zip(&v).map(|(s, x)| s * int(k) - x).collect();
            if !self.max_cones.iter().any(|c| self.in_cone(c, &candidate)) {
                break;
            }
        }
        candidate
    }

    fn generic_direction<'a>(&self, walls: impl Iterator<Item = &'a Vec<usize>> + Clone) -> QVector {
        let primes = [7919i64, 104729, 1299709, 15485863, 179424673, 2038074743];
        for shift in 0..64i64 {
            let g: QVector = (0..self.n)
                .map(|i| {
                    let sign = if i % 2 == 0 { 1 } else { -1 };
                    int(sign * primes[i % primes.len()] + shift * (i as i64 + 1))
                })
                .collect();
            if walls.clone().all(|w| !self.hyperplane_side(w, &g).is_zero()) {
                return g;
            }
        }
        vec![int(1); self.n]
    }

    /// All walls, each with its relation. Requires a valid fan.
    pub fn walls(&self) -> Vec<Wall> {
        let mut map: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for c in &self.max_cones {
            for &opp in c {
                let wall: Vec<usize> = c.iter().copied().filter(|&i| i != opp).collect();
                map.entry(wall).or_default().push(opp);
            }
        }
        map.into_iter()
            .filter(|(_, opp)| opp.len() == 2)
            .map(|(rays, opp)| {
                let (left, right) = (opp[0], opp[1]);
                let mut basis = rays.clone();
                basis.push(left);
                let coords = self
                    .cone_coordinates(&basis, &self.ray(right))
                    .expect("wall cone is simplicial");
                // v_right = Σ λ_i v_i + λ_left v_left, with λ_left = -1 for smooth fans
                let relation = rays.iter().zip(&coords).map(|(&i, l)| (i, -l.clone())).collect();
                Wall {
                    rays,
                    left,
                    right,
                    relation,
                }
            })
            .collect()
    }

    /// Every cone of the fan (faces of maximal cones), including the zero cone,
    /// as sorted index lists.
    pub fn all_cones(&self) -> Vec<Vec<usize>> {
        let mut out: BTreeSet<Vec<usize>> = BTreeSet::new();
        for c in &self.max_cones {
            for mask in 0u32..(1 << c.len()) {
                let face: Vec<usize> = c
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) != 0)
                    .map(|(_, &i)| i)
                    .collect();
                out.insert(face);
            }
        }
        out.into_iter().collect()
    }

    pub fn is_cone(&self, cone: &[usize]) -> bool {
        let mut c = cone.to_vec();
        c.sort_unstable();
        self.max_cones.iter().any(|m| c.iter().all(|i| m.contains(i)))
    }

    /// A divisor with `D · C > 0` on every invariant curve, found by LP
    /// (minimizing the coefficient sum subject to `D · C >= 1`). Errors when
    /// the fan is not projective.
    pub fn lp_ample(&self, weights: &[Rational]) -> Result<QVector> {
        let r = self.num_rays();
        let mut lp = LinearProgram::free_vars(r).maximize(weights.iter().map(|w| -w).collect());
        for wall in self.walls() {
            lp.constrain(wall.curve_vector(r), Relation::Ge, int(1));
        }
        // pin the linear-equivalence freedom: zero on the first maximal cone
        for &i in &self.max_cones[0] {
            let mut e = vec![Rational::zero(); r];
            e[i] = int(1);
            lp.constrain(e, Relation::Eq, int(0));
        }
        match lp.solve() {
            LpOutcome::Optimal { point, .. } => Ok(point),
            _ => Err(Error::InvalidInput("fan is not projective: no ample divisor".into())),
        }
    }

    pub fn is_ample(&self, d: &[Rational]) -> bool {
        self.walls().iter().all(|w| w.degree(d).is_positive())
    }

    /// Reference ample class: `Σ D_i` when ample, otherwise an LP-found ample.
    pub fn reference_ample(&self) -> Result<QVector> {
        let anti = vec![int(1); self.num_rays()];
        if self.is_ample(&anti) {
            Ok(anti)
        } else {
            self.lp_ample(&vec![int(1); self.num_rays()])
        }
    }

    /// A second ample class different from the reference one.
    pub fn alternate_ample(&self) -> Result<QVector> {
        let a = self.reference_ample()?;
        let weights: QVector = (1..=self.num_rays()).map(|i| int(i as i64)).collect();
        let b = self.lp_ample(&weights)?;
        Ok(a.iter().zip(&b).map(|(x, y)| x * int(2) + y).collect())
    }

    /// Star subdivision of a maximal cone at the sum of its rays.
    pub fn blowup_fixed_point(&self, cone: &[usize]) -> Result<Blowup> {
        let mut c = cone.to_vec();
        c.sort_unstable();
        let Some(idx) = self.max_cones.iter().position(|m| *m == c) else {
            return Err(Error::InvalidInput(format!("{cone:?} is not a maximal cone")));
        };
        let mut rays = self.rays.clone();
        let new_ray: Vec<i64> = (0..self.n).map(|k| c.iter().map(|&i| self.rays[i][k]).sum()).collect();
        rays.push(new_ray);
        let new_index = rays.len() - 1;
        let mut max_cones: Vec<Vec<usize>> = Vec::new();
        for (j, m) in self.max_cones.iter().enumerate() {
            if j == idx {
                for &drop in &c {
                    let mut sub: Vec<usize> = c.iter().copied().filter(|&i| i != drop).collect();
                    sub.push(new_index);
                    max_cones.push(sub);
                }
            } else {
                max_cones.push(m.clone());
            }
        }
        Ok(Blowup {
            variety: ToricVariety::new(rays, max_cones),
            center: c,
            new_ray: new_index,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Blowup {
    pub variety: ToricVariety,
    pub center: Vec<usize>,
    pub new_ray: usize,
}

impl Blowup {
    /// Pullback of an invariant divisor: the new ray gets the sum of the
    /// coefficients over the blown-up cone.
    pub fn pullback(&self, d: &[Rational]) -> QVector {
        let mut out = d.to_vec();
        out.push(self.center.iter().fold(Rational::zero(), |acc, &i| acc + &d[i]));
        out
    }

    pub fn touches(&self, cone: &[usize]) -> bool {
        let mut c = cone.to_vec();
        c.sort_unstable();
        c == self.center
    }
}

/// Dual basis of a unimodular cone: `m_j` with `<m_j, v_k> = δ_jk`.
pub fn dual_basis(x: &ToricVariety, cone: &[usize]) -> Option<QMatrix> {
    let n = x.n;
    let rows: QMatrix = cone.iter().map(|&i| x.ray(i)).collect();
    (0..n)
        .map(|j| {
            let mut e = vec![Rational::zero(); n];
            e[j] = int(1);
            solve(&rows, &e)
        })
        .collect()
}

pub fn pairing(u: &[Rational], v: &[Rational]) -> Rational {
    dot(u, v)
}
