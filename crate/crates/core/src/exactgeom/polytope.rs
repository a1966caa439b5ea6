//! Exact rational polytopes carrying both vertex and halfspace descriptions.

use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::dd::cone_from_inequalities;
use super::linalg::{rank, rref};
use super::lp::{LinearProgram, LpOutcome, Relation};
use super::rational::{add, dot, int, is_zero_vec, primitive, scale, sub, QMatrix, QVector, Rational};
use crate::error::{Error, Result};

/// The closed halfspace `{u : <normal, u> >= offset}`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Halfspace {
    pub normal: QVector,
    pub offset: Rational,
}

impl Halfspace {
    pub fn new(normal: QVector, offset: Rational) -> Self {
        Halfspace { normal, offset }
    }

    /// Same halfspace with a primitive integer normal.
    pub fn normalized(&self) -> Self {
        let p = primitive(&self.normal);
        let i = self.normal.iter().position(|x| !x.is_zero()).unwrap_or(0);
        if p.is_empty() || self.normal[i].is_zero() {
            return self.clone();
        }
        let factor = &p[i] / &self.normal[i];
        Halfspace::new(p, &self.offset * factor)
    }

    pub fn slack(&self, u: &[Rational]) -> Rational {
        dot(&self.normal, u) - &self.offset
    }

    pub fn contains(&self, u: &[Rational]) -> bool {
        !self.slack(u).is_negative()
    }

    pub fn is_tight(&self, u: &[Rational]) -> bool {
        self.slack(u).is_zero()
    }

    fn homogenized(&self) -> QVector {
        let mut row = self.normal.clone();
        row.push(-self.offset.clone());
        row
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

/// A bounded convex polytope with a minimal vertex list (sorted
/// lexicographically) and an irredundant halfspace description.
#[derive(Debug, Clone)]
pub struct Polytope {
    ambient_dim: usize,
    vertices: Vec<QVector>,
    halfspaces: Vec<Halfspace>,
    affine_dim: Option<usize>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.equals(other)
    }
}

impl Polytope {
    pub fn empty(ambient_dim: usize) -> Self {
        let halfspaces = if ambient_dim == 0 {
            Vec::new()
        } else {
            let mut e = vec![Rational::zero(); ambient_dim];
            e[0] = Rational::one();
            vec![
                Halfspace::new(e.clone(), int(1)),
                Halfspace::new(e.iter().map(|x| -x).collect(), int(0)),
            ]
        };
        Polytope {
            ambient_dim,
            vertices: Vec::new(),
            halfspaces,
            affine_dim: None,
        }
    }

    /// Convex hull of a finite point set. The ambient dimension is taken from
    /// the points; an empty input gives the empty polytope in dimension 0.
    pub fn hull(points: &[QVector]) -> Self {
        match points.first() {
            None => Polytope::empty(0),
            Some(p) => Polytope::hull_in(p.len(), points),
        }
    }

    pub fn hull_in(dim: usize, points: &[QVector]) -> Self {
        assert!(points.iter().all(|p| p.len() == dim), "hull: mixed dimensions");
        let points: Vec<QVector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
        if points.is_empty() {
            return Polytope::empty(dim);
        }
        let rows: QMatrix = points
            .iter()
            .map(|p| {
                let mut r = p.clone();
                r.push(Rational::one());
                r
            })
            .collect();
        let dual = cone_from_inequalities(&rows, dim + 1);

        let mut halfspaces: Vec<Halfspace> = Vec::new();
        if !dual.lineality.is_empty() {
            let (basis, _) = rref(&dual.lineality, dim + 1);
            for y in basis {
                let h = Halfspace::new(y[..dim].to_vec(), -y[dim].clone()).normalized();
                if is_zero_vec(&h.normal) {
                    continue;
                }
                let opposite = Halfspace::new(h.normal.iter().map(|x| -x).collect(), -h.offset.clone());
                halfspaces.push(h);
                halfspaces.push(opposite);
            }
        }
        for y in &dual.rays {
            let h = Halfspace::new(y[..dim].to_vec(), -y[dim].clone()).normalized();
            if is_zero_vec(&h.normal) || !points.iter().any(|p| h.is_tight(p)) {
                continue;
            }
            halfspaces.push(h);
        }
        halfspaces.sort();
        halfspaces.dedup();

        let vertices: Vec<QVector> = points
            .iter()
            .filter(|p| {
                let tight: QMatrix = halfspaces
                    .iter()
                    .filter(|h| h.is_tight(p))
                    .map(|h| h.normal.clone())
                    .collect();
                rank(&tight) == dim
            })
            .cloned()
            .collect();
        let affine_dim = Some(affine_rank(&vertices));
        Polytope {
            ambient_dim: dim,
            vertices,
            halfspaces,
            affine_dim,
        }
    }

    /// Builds the polytope `{u : <n_i, u> >= o_i}`; errors if it is unbounded.
    pub fn from_halfspaces(dim: usize, halfspaces: &[Halfspace]) -> Result<Self> {
        for h in halfspaces {
            if h.normal.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: h.normal.len(),
                });
            }
        }
        let mut rows: QMatrix = halfspaces.iter().map(Halfspace::homogenized).collect();
        let mut s_row = vec![Rational::zero(); dim + 1];
        s_row[dim] = Rational::one();
        rows.push(s_row);
        let cone = cone_from_inequalities(&rows, dim + 1);
        let mut vertices = Vec::new();
        let mut recession = !cone.lineality.is_empty();
        for r in &cone.rays {
            let s = &r[dim];
            if s.is_positive() {
                vertices.push(r[..dim].iter().map(|x| x / s).collect::<QVector>());
            } else {
                recession = true;
            }
        }
        if vertices.is_empty() {
            return Ok(Polytope::empty(dim));
        }
        if recession {
            return Err(Error::Unbounded);
        }
        Ok(Polytope::hull_in(dim, &vertices))
    }

    /// Rebuilds both descriptions from the vertex list.
    pub fn convert(&self) -> Self {
        if self.is_empty() {
            Polytope::empty(self.ambient_dim)
        } else {
            Polytope::hull_in(self.ambient_dim, &self.vertices)
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn vertices(&self) -> &[QVector] {
        &self.vertices
    }

    pub fn halfspaces(&self) -> &[Halfspace] {
        &self.halfspaces
    }

    /// `None` for the empty polytope.
    pub fn affine_dim(&self) -> Option<usize> {
        self.affine_dim
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn contains_point(&self, u: &[Rational]) -> bool {
        !self.is_empty() && self.halfspaces.iter().all(|h| h.contains(u))
    }

    /// Returns the first vertex of `other` lying outside `self`, if any.
    pub fn containment_witness(&self, other: &Polytope) -> Option<QVector> {
        other.vertices.iter().find(|v| !self.contains_point(v)).cloned()
    }

    pub fn contains(&self, other: &Polytope) -> bool {
        self.ambient_dim == other.ambient_dim && self.containment_witness(other).is_none()
    }

    /// Set equality. Minimal vertex lists are unique, so this compares them.
    pub fn equals(&self, other: &Polytope) -> bool {
        self.ambient_dim == other.ambient_dim && self.vertices == other.vertices
    }

    pub fn translate(&self, t: &[Rational]) -> Self {
        let pts: Vec<QVector> = self.vertices.iter().map(|v| add(v, t)).collect();
        Polytope::hull_in(self.ambient_dim, &pts)
    }

    pub fn dilate(&self, lambda: &Rational) -> Self {
        let pts: Vec<QVector> = self.vertices.iter().map(|v| scale(v, lambda)).collect();
        Polytope::hull_in(self.ambient_dim, &pts)
    }

    /// Image under `u -> M u + t` where `M` has `t.len()` rows.
    pub fn affine_image(&self, m: &[QVector], t: &[Rational]) -> Result<Self> {
        if m.len() != t.len() {
            return Err(Error::DimensionMismatch {
                expected: m.len(),
                got: t.len(),
            });
        }
        if let Some(bad) = m.iter().find(|row| row.len() != self.ambient_dim) {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: bad.len(),
            });
        }
        let pts: Vec<QVector> = self
            .vertices
            .iter()
            .map(|v| add(&m.iter().map(|row| dot(row, v)).collect::<QVector>(), t))
            .collect();
        Ok(Polytope::hull_in(t.len(), &pts))
    }

    pub fn minkowski_sum(&self, other: &Polytope) -> Result<Self> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: other.ambient_dim,
            });
        }
        let mut pts = Vec::new();
        for a in &self.vertices {
            for b in &other.vertices {
                pts.push(add(a, b));
            }
        }
        Ok(Polytope::hull_in(self.ambient_dim, &pts))
    }

    /// Intersection with further halfspaces.
    pub fn intersect(&self, extra: &[Halfspace]) -> Result<Self> {
        if self.is_empty() {
            return Ok(self.clone());
        }
        let mut hs = self.halfspaces.clone();
        hs.extend(extra.iter().cloned());
        Polytope::from_halfspaces(self.ambient_dim, &hs)
    }

    /// Intersection with the coordinate subspace where the first `n - k`
    /// coordinates vanish, kept in ambient coordinates.
    pub fn slice(&self, k: usize) -> Result<Self> {
        let n = self.ambient_dim;
        if k > n {
            return Err(Error::InvalidInput(format!("slice: k = {k} exceeds dimension {n}")));
        }
        let mut extra = Vec::new();
        for i in 0..n - k {
            let mut e = vec![Rational::zero(); n];
            e[i] = Rational::one();
            extra.push(Halfspace::new(e.clone(), int(0)));
            extra.push(Halfspace::new(e.iter().map(|x| -x).collect(), int(0)));
        }
        self.intersect(&extra)
    }

    /// Exact LP over the halfspace description. The value comes from the
    /// simplex method; the witness is the lexicographically smallest optimal
    /// vertex.
    pub fn lp_optimize(&self, objective: &[Rational], sense: Sense) -> Result<(Rational, QVector)> {
        if objective.len() != self.ambient_dim {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_dim,
                got: objective.len(),
            });
        }
        if self.is_empty() {
            return Err(Error::Infeasible);
        }
        let signed: QVector = match sense {
            Sense::Maximize => objective.to_vec(),
            Sense::Minimize => objective.iter().map(|x| -x).collect(),
        };
        let mut lp = LinearProgram::free_vars(self.ambient_dim).maximize(signed);
        for h in &self.halfspaces {
            lp.constrain(h.normal.clone(), Relation::Ge, h.offset.clone());
        }
        let value = match lp.solve() {
            LpOutcome::Optimal { value, .. } => match sense {
                Sense::Maximize => value,
                Sense::Minimize => -value,
            },
            LpOutcome::Infeasible => return Err(Error::Infeasible),
            LpOutcome::Unbounded => return Err(Error::Unbounded),
        };
        let witness = self
            .vertices
            .iter()
            .find(|v| dot(objective, v) == value)
            .cloned()
            .ok_or_else(|| Error::Refuted("simplex optimum not attained at a vertex".into()))?;
        Ok((value, witness))
    }

    /// Minimum of an affine function over the vertex list.
    pub fn min_over_vertices(&self, objective: &[Rational]) -> Option<Rational> {
        self.vertices.iter().map(|v| dot(objective, v)).min()
    }
}

/// Rank of the differences `p_i - p_0`; 0 for a single point or none.
pub fn affine_rank(points: &[QVector]) -> usize {
    match points.split_first() {
        None => 0,
        Some((p0, rest)) => {
            let diffs: QMatrix = rest.iter().map(|p| sub(p, p0)).collect();
            rank(&diffs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactgeom::rational::{frac, qvec};

    fn simplex2() -> Polytope {
        Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])])
    }

    fn unit_square() -> Polytope {
        Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])])
    }

    #[test]
    fn hull_absorbs_interior_points() {
        let p = Polytope::hull(&[
            qvec(&[0, 0]),
            qvec(&[1, 0]),
            qvec(&[0, 1]),
            vec![frac(1, 4), frac(1, 4)],
        ]);
        assert_eq!(p.vertices(), simplex2().vertices());
        assert_eq!(p.halfspaces().len(), 3);
        assert_eq!(p.affine_dim(), Some(2));
    }

    #[test]
    fn single_point_and_empty_hull() {
        let p = Polytope::hull(&[qvec(&[2, 3])]);
        assert_eq!(p.affine_dim(), Some(0));
        assert_eq!(p.vertices(), &[qvec(&[2, 3])]);
        assert!(p.contains_point(&qvec(&[2, 3])));
        assert!(!p.contains_point(&qvec(&[2, 4])));
        let e = Polytope::hull(&[]);
        assert!(e.is_empty());
        assert_eq!(e.affine_dim(), None);
    }

    #[test]
    fn hull_of_scaled_lattice_points_of_triple_simplex() {
        let mut pts = Vec::new();
        for i in 0..=3 {
            for j in 0..=3 - i {
                pts.push(vec![frac(i, 3), frac(j, 3)]);
            }
        }
        assert_eq!(pts.len(), 10);
        assert!(Polytope::hull(&pts).equals(&simplex2()));
    }

    #[test]
    fn convert_from_halfspaces() {
        let hs = vec![
            Halfspace::new(qvec(&[1, 0]), int(0)),
            Halfspace::new(qvec(&[0, 1]), int(0)),
            Halfspace::new(qvec(&[-1, -1]), int(-1)),
        ];
        let p = Polytope::from_halfspaces(2, &hs).unwrap();
        assert_eq!(p.vertices(), simplex2().vertices());

        assert_eq!(unit_square().halfspaces().len(), 4);

        let contradictory = vec![Halfspace::new(qvec(&[1]), int(1)), Halfspace::new(qvec(&[-1]), int(0))];
        assert!(Polytope::from_halfspaces(1, &contradictory).unwrap().is_empty());

        let unbounded = vec![Halfspace::new(qvec(&[1, 0]), int(0))];
        assert_eq!(Polytope::from_halfspaces(2, &unbounded).unwrap_err(), Error::Unbounded);
    }

    #[test]
    fn lower_dimensional_polytopes_get_equalities() {
        let seg = Polytope::hull(&[qvec(&[0, 0]), qvec(&[3, 0])]);
        assert_eq!(seg.affine_dim(), Some(1));
        assert!(seg.contains_point(&qvec(&[2, 0])));
        assert!(!seg.contains_point(&[int(1), frac(1, 100)]));
        let rebuilt = Polytope::from_halfspaces(2, seg.halfspaces()).unwrap();
        assert!(rebuilt.equals(&seg));
    }

    #[test]
    fn lp_examples() {
        let (v, w) = unit_square().lp_optimize(&qvec(&[1, 0]), Sense::Minimize).unwrap();
        assert_eq!(v, int(0));
        assert_eq!(w, qvec(&[0, 0]));

        let tri = Polytope::hull(&[qvec(&[1, 0]), qvec(&[0, 1]), qvec(&[1, 1])]);
        let (v, w) = tri.lp_optimize(&qvec(&[1, 1]), Sense::Minimize).unwrap();
        assert_eq!(v, int(1));
        assert_eq!(w, qvec(&[0, 1]));

        let tri = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[1, 1])]);
        let (v, w) = tri.lp_optimize(&qvec(&[0, 1]), Sense::Maximize).unwrap();
        assert_eq!((v, w), (int(1), qvec(&[1, 1])));

        assert_eq!(
            Polytope::empty(2)
                .lp_optimize(&qvec(&[1, 0]), Sense::Minimize)
                .unwrap_err(),
            Error::Infeasible
        );
    }

    #[test]
    fn slice_examples() {
        let s = simplex2().slice(1).unwrap();
        assert!(s.equals(&Polytope::hull(&[qvec(&[0, 0]), qvec(&[0, 1])])));
        let off = Polytope::hull(&[qvec(&[1, 0]), qvec(&[2, 0]), qvec(&[2, 1])]);
        assert!(off.slice(1).unwrap().is_empty());
        let pt = Polytope::hull(&[qvec(&[0, 3])]);
        assert!(pt.slice(1).unwrap().equals(&pt));
    }

    #[test]
    fn image_sum_and_equality() {
        let moved = simplex2()
            .affine_image(&[qvec(&[1, 0]), qvec(&[0, 1])], &qvec(&[1, 0]))
            .unwrap();
        assert!(moved.equals(&Polytope::hull(&[qvec(&[1, 0]), qvec(&[2, 0]), qvec(&[1, 1])])));

        let a = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0])]);
        let b = Polytope::hull(&[qvec(&[0, 0]), qvec(&[0, 1])]);
        assert!(a.minkowski_sum(&b).unwrap().equals(&unit_square()));

        let h = Polytope::from_halfspaces(2, simplex2().halfspaces()).unwrap();
        assert!(h.equals(&simplex2()));
        assert!(unit_square().contains(&simplex2()));
        assert!(!simplex2().contains(&unit_square()));
        assert!(a.minkowski_sum(&Polytope::hull(&[qvec(&[0])])).is_err());
    }
}
