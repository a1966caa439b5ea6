//! Néron–Severi lattice models of surfaces.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exactgeom::linalg::{bilinear, inertia};
use crate::exactgeom::lp::{LinearProgram, LpOutcome, Relation};
use crate::exactgeom::rational::{int, qvec, QMatrix, QVector, Rational};
use crate::toric::fan::{dual_basis, ToricVariety};

/// An irreducible curve, by name and numerical class.
#[derive(Debug, Clone, PartialEq)]
pub struct Curve {
    pub name: String,
    pub class: QVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSurface {
    pub rank: usize,
    pub q: Vec<Vec<i64>>,
    pub curves: Vec<Curve>,
    pub effective_generators: Vec<QVector>,
    /// Primitive fiber classes of morphisms to a rational curve.
    pub fibrations: Vec<QVector>,
    /// Every pseudoeffective class is abundant.
    pub abundant: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SurfaceReport {
    pub problems: Vec<String>,
}

impl SurfaceReport {
    pub fn is_valid(&self) -> bool {
        self.problems.is_empty()
    }
}

impl LatticeSurface {
    pub fn form(&self) -> QMatrix {
        self.q.iter().map(|row| row.iter().map(|&x| int(x)).collect()).collect()
    }

    pub fn pairing(&self, a: &[Rational], b: &[Rational]) -> Rational {
        bilinear(&self.form(), a, b)
    }

    pub fn self_intersection(&self, a: &[Rational]) -> Rational {
        self.pairing(a, a)
    }

    pub fn curve_index(&self, name: &str) -> Option<usize> {
        self.curves.iter().position(|c| c.name == name)
    }

    pub fn curve(&self, name: &str) -> Result<usize> {
        self.curve_index(name)
            .ok_or_else(|| Error::InvalidInput(format!("unknown curve {name:?}")))
    }

    pub fn curve_names(&self) -> Vec<String> {
        self.curves.iter().map(|c| c.name.clone()).collect()
    }

    pub fn check_class(&self, d: &[Rational]) -> Result<()> {
        if d.len() != self.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                got: d.len(),
            });
        }
        Ok(())
    }

    pub fn validate(&self) -> SurfaceReport {
        let mut problems = Vec::new();
        let rho = self.rank;
        if self.q.len() != rho || self.q.iter().any(|r| r.len() != rho) {
            problems.push(format!("intersection form is not {rho}x{rho}"));
            return SurfaceReport { problems };
        }
        if (0..rho).any(|i| (0..rho).any(|j| self.q[i][j] != self.q[j][i])) {
            problems.push("intersection form is not symmetric".into());
            return SurfaceReport { problems };
        }
        let (pos, neg, zero) = inertia(&self.form());
        if pos != 1 || neg + 1 != rho || zero != 0 {
            problems.push(format!(
                "signature not (1,ρ-1): got ({pos},{neg}) with {zero} null directions"
            ));
        }
        let bad_len = self
            .curves
            .iter()
            .map(|c| c.class.len())
            .chain(self.effective_generators.iter().map(Vec::len))
            .chain(self.fibrations.iter().map(Vec::len))
            .any(|l| l != rho);
        if bad_len {
            problems.push(format!("a class does not have length {rho}"));
            return SurfaceReport { problems };
        }
        for c in &self.curves {
            if self.self_intersection(&c.class).is_negative() && !self.effective_generators.contains(&c.class) {
                problems.push(format!(
                    "negative curve {} is missing from the effective generators",
                    c.name
                ));
            }
        }
        if !self.is_pointed() {
            problems.push("effective cone is not pointed".into());
        }
        for f in &self.fibrations {
            if !self.self_intersection(f).is_zero() {
                problems.push("fibration class has nonzero self-intersection".into());
            }
        }
        SurfaceReport { problems }
    }

    /// Some functional is ≥ 1 on every effective generator.
    fn is_pointed(&self) -> bool {
        let mut lp = LinearProgram::free_vars(self.rank);
        for g in &self.effective_generators {
            lp.constrain(g.clone(), Relation::Ge, int(1));
        }
        !self.effective_generators.is_empty() && lp.is_feasible()
    }

    /// Membership in the cone spanned by the effective generators.
    pub fn is_pseudoeffective(&self, d: &[Rational]) -> bool {
        let g = &self.effective_generators;
        let mut lp = LinearProgram::new(g.len());
        for k in 0..self.rank {
            lp.constrain(g.iter().map(|v| v[k].clone()).collect(), Relation::Eq, d[k].clone());
        }
        lp.is_feasible()
    }

    pub fn is_nef(&self, d: &[Rational]) -> bool {
        self.effective_generators
            .iter()
            .all(|g| !self.pairing(d, g).is_negative())
    }

    /// `max{t : D - tC psef}`.
    pub fn mu(&self, d: &[Rational], c: &[Rational]) -> Result<Rational> {
        self.check_class(d)?;
        let g = &self.effective_generators;
        let m = g.len();
        let mut lp = LinearProgram::new(m + 1);
        lp.free[m] = true;
        let mut obj = vec![Rational::zero(); m + 1];
        obj[m] = int(1);
        lp = lp.maximize(obj);
        for k in 0..self.rank {
            let mut row: QVector = g.iter().map(|v| v[k].clone()).collect();
            row.push(c[k].clone());
            lp.constrain(row, Relation::Eq, d[k].clone());
        }
        match lp.solve() {
            LpOutcome::Optimal { value, .. } => Ok(value),
            LpOutcome::Infeasible => Err(Error::NotPseudoEffective),
            LpOutcome::Unbounded => Err(Error::Unbounded),
        }
    }

    /// An ample class: interior of the nef cone, found by LP.
    pub fn ample(&self) -> Result<QVector> {
        let mut lp = LinearProgram::free_vars(self.rank);
        for g in &self.effective_generators {
            let row: QVector = (0..self.rank).map(|i| self.pairing(&unit(self.rank, i), g)).collect();
            lp.constrain(row, Relation::Ge, int(1));
        }
        let weights: QVector = self
            .effective_generators
            .iter()
            .fold(vec![Rational::zero(); self.rank], |acc, g| {
                (0..self.rank)
                    .map(|i| &acc[i] - self.pairing(&unit(self.rank, i), g))
                    .collect()
            });
        match lp.maximize(weights).solve() {
            LpOutcome::Optimal { point, .. } => Ok(point),
            _ => Err(Error::InvalidInput("surface model has no ample class".into())),
        }
    }

    /// Positive on every effective generator.
    pub fn is_ample(&self, d: &[Rational]) -> bool {
        self.effective_generators
            .iter()
            .all(|g| self.pairing(d, g).is_positive())
    }

    /// A second ample class, `2A + G` for the first effective generator G
    /// keeping it ample (or `2A` on Picard rank one).
    pub fn alternate_ample(&self) -> Result<QVector> {
        let a = self.ample()?;
        let doubled: QVector = a.iter().map(|x| x * int(2)).collect();
        Ok(self
            .effective_generators
            .iter()
            .map(|g| doubled.iter().zip(g).map(|(x, y)| x + y).collect::<QVector>())
            .find(|c| self.is_ample(c))
            .unwrap_or(doubled))
    }

    /// The same model with its curve list reordered.
    pub fn permuted(&self, order: &[usize]) -> LatticeSurface {
        let mut out = self.clone();
        out.curves = order.iter().map(|&i| self.curves[i].clone()).collect();
        out
    }
}

fn unit(n: usize, i: usize) -> QVector {
    let mut e = vec![Rational::zero(); n];
    e[i] = int(1);
    e
}

fn curve(name: &str, class: &[i64]) -> Curve {
    Curve {
        name: name.into(),
        class: qvec(class),
    }
}

/// Basis (H, E), curves E, H-E and a general line H.
pub fn bl1_p2() -> LatticeSurface {
    LatticeSurface {
        rank: 2,
        q: vec![vec![1, 0], vec![0, -1]],
        curves: vec![curve("E", &[0, 1]), curve("H-E", &[1, -1]), curve("H", &[1, 0])],
        effective_generators: vec![qvec(&[0, 1]), qvec(&[1, -1])],
        fibrations: vec![qvec(&[1, -1])],
        abundant: true,
    }
}

/// Basis (f1, f2) of the two rulings; general members of |f1+f2| and |f1+2f2|.
pub fn p1xp1() -> LatticeSurface {
    LatticeSurface {
        rank: 2,
        q: vec![vec![0, 1], vec![1, 0]],
        curves: vec![
            curve("f1", &[1, 0]),
            curve("f2", &[0, 1]),
            curve("f1+f2", &[1, 1]),
            curve("f1+2f2", &[1, 2]),
        ],
        effective_generators: vec![qvec(&[1, 0]), qvec(&[0, 1])],
        fibrations: vec![qvec(&[1, 0]), qvec(&[0, 1])],
        abundant: true,
    }
}

/// Basis (B, F): the (-2)-section and a fiber; S is a general section B+2F.
pub fn f2() -> LatticeSurface {
    LatticeSurface {
        rank: 2,
        q: vec![vec![-2, 1], vec![1, 0]],
        curves: vec![curve("B", &[1, 0]), curve("F", &[0, 1]), curve("S", &[1, 2])],
        effective_generators: vec![qvec(&[1, 0]), qvec(&[0, 1])],
        fibrations: vec![qvec(&[0, 1])],
        abundant: true,
    }
}

/// ρ = 1 with a general line.
pub fn p2() -> LatticeSurface {
    LatticeSurface {
        rank: 1,
        q: vec![vec![1]],
        curves: vec![curve("H", &[1])],
        effective_generators: vec![qvec(&[1])],
        fibrations: vec![],
        abundant: true,
    }
}

/// Rays outside the first maximal cone form the basis of the class group.
pub fn toric_basis(x: &ToricVariety) -> Vec<usize> {
    (0..x.num_rays()).filter(|i| !x.max_cones[0].contains(i)).collect()
}

/// Class of a toric divisor in the basis of [`toric_basis`], using
/// `D_j ~ -Σ_i <m_j, v_i> D_i` for the rays `j` of the first maximal cone.
pub fn toric_class(x: &ToricVariety, d: &[Rational]) -> Result<QVector> {
    if x.n != 2 {
        return Err(Error::InvalidInput(format!(
            "toric surface expected, got dimension {}",
            x.n
        )));
    }
    let basis = toric_basis(x);
    let cone = &x.max_cones[0];
    let duals = dual_basis(x, cone).ok_or_else(|| Error::InvalidInput("first cone is not unimodular".into()))?;
    let mut out: QVector = basis.iter().map(|&i| d[i].clone()).collect();
    for (j, &ray) in cone.iter().enumerate() {
        for (k, &i) in basis.iter().enumerate() {
            let pairing: Rational = duals[j].iter().zip(x.ray(i)).map(|(a, b)| a * b).sum();
            out[k] -= &d[ray] * pairing;
        }
    }
    Ok(out)
}

fn ray_class(x: &ToricVariety, i: usize) -> Result<QVector> {
    let mut e = vec![Rational::zero(); x.num_rays()];
    e[i] = int(1);
    toric_class(x, &e)
}

/// Lattice model of a smooth complete toric surface. Curve `i` is the
/// invariant curve `D_i`.
pub fn from_toric(x: &ToricVariety) -> Result<LatticeSurface> {
    if x.n != 2 {
        return Err(Error::InvalidInput(format!(
            "toric surface expected, got dimension {}",
            x.n
        )));
    }
    let basis = toric_basis(x);
    let r = x.num_rays();
    // intersection numbers of all invariant curves from the walls
    let mut full = vec![vec![Rational::zero(); r]; r];
    for w in x.walls() {
        let i = w.rays[0];
        let vec = w.curve_vector(r);
        full[i].clone_from_slice(&vec[..r]);
    }
    let q: Vec<Vec<i64>> = basis
        .iter()
        .map(|&i| {
            basis
                .iter()
                .map(|&k| i64::try_from(full[i][k].to_integer()).expect("small intersection number"))
                .collect()
        })
        .collect();
    let classes = (0..r).map(|i| ray_class(x, i)).collect::<Result<Vec<_>>>()?;
    let curves = classes
        .iter()
        .enumerate()
        .map(|(i, c)| Curve {
            name: ToricVariety::ray_name(i),
            class: c.clone(),
        })
        .collect();
    let mut fibrations: Vec<QVector> = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        if full[i][i].is_zero() && !fibrations.contains(c) {
            fibrations.push(c.clone());
        }
    }
    let mut effective_generators: Vec<QVector> = Vec::new();
    for c in &classes {
        if !effective_generators.contains(c) {
            effective_generators.push(c.clone());
        }
    }
    Ok(LatticeSurface {
        rank: basis.len(),
        q,
        curves,
        effective_generators,
        fibrations,
        abundant: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::toric::models;

    #[test]
    fn library_models_validate() {
        for s in [bl1_p2(), p1xp1(), f2(), p2()] {
            assert!(s.validate().is_valid(), "{:?}", s.validate());
        }
        let mut bad = p1xp1();
        bad.q = vec![vec![1, 0], vec![0, 1]];
        assert!(bad.validate().problems[0].contains("signature not (1,ρ-1)"));
    }

    #[test]
    fn pairing_and_classification() {
        let s = bl1_p2();
        assert_eq!(s.pairing(&qvec(&[1, 1]), &qvec(&[0, 1])), int(-1));
        assert!(s.is_pseudoeffective(&qvec(&[1, 1])));
        assert!(!s.is_pseudoeffective(&qvec(&[1, -2])));
        assert!(s.is_nef(&qvec(&[1, 0])));
        assert!(!s.is_nef(&qvec(&[1, 1])));
    }

    #[test]
    fn mu_examples() {
        let s = bl1_p2();
        let h = qvec(&[1, 0]);
        assert_eq!(s.mu(&h, &qvec(&[0, 1])).unwrap(), int(1));
        assert_eq!(s.mu(&h, &qvec(&[1, -1])).unwrap(), int(1));
        assert_eq!(s.mu(&qvec(&[1, 1]), &qvec(&[0, 1])).unwrap(), int(2));
    }

    #[test]
    fn toric_models() {
        let p2 = from_toric(&models::p2()).unwrap();
        assert_eq!(p2.q, vec![vec![1]]);
        let f1 = from_toric(&models::hirzebruch(1)).unwrap();
        assert!(f1.validate().is_valid());
        let self_ints: Vec<Rational> = f1.curves.iter().map(|c| f1.self_intersection(&c.class)).collect();
        assert_eq!(self_ints, vec![int(0), int(-1), int(0), int(1)]);
        let f2 = from_toric(&models::hirzebruch(2)).unwrap();
        assert!(f2.validate().is_valid());
        assert_eq!(f2.self_intersection(&f2.curves[1].class), int(-2));
        assert_eq!(f2.fibrations.len(), 1);
    }

    #[test]
    fn ample_class_is_ample() {
        for s in [bl1_p2(), p1xp1(), f2(), p2()] {
            let a = s.ample().unwrap();
            assert!(s.effective_generators.iter().all(|g| s.pairing(&a, g).is_positive()));
        }
    }
}
