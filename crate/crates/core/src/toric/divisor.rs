//! Section polytopes and asymptotic invariants of torus-invariant divisors.

use num_traits::Signed;

use super::fan::ToricVariety;
use crate::decomposition::{DecompositionKind, ZariskiDecomposition};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exactgeom::lattice::count_lattice_points;
use crate::exactgeom::limit::{extrapolate, extrapolate_scalar, EpsilonSchedule};
use crate::exactgeom::lp::{LinearProgram, Relation};
use crate::exactgeom::polytope::{Halfspace, Polytope, Sense};
use crate::exactgeom::rational::{axpy, floor, int, QVector, Rational};

/// Reference ample class and ε schedule used for every ε → 0⁺ limit.
#[derive(Debug, Clone)]
pub struct LimitSettings {
    pub ample: QVector,
    pub schedule: EpsilonSchedule,
}

impl LimitSettings {
    pub fn reference(x: &ToricVariety) -> Result<Self> {
        Ok(LimitSettings {
            ample: x.reference_ample()?,
            schedule: EpsilonSchedule::default(),
        })
    }

    pub fn with_ample(mut self, ample: QVector) -> Self {
        self.ample = ample;
        self
    }

    pub fn shifted(&self, d: &[Rational], eps: &Rational) -> QVector {
        axpy(d, eps, &self.ample)
    }
}

fn check_len(x: &ToricVariety, d: &[Rational]) -> Result<()> {
    if d.len() != x.num_rays() {
        return Err(Error::DimensionMismatch {
            expected: x.num_rays(),
            got: d.len(),
        });
    }
    Ok(())
}

pub fn section_halfspaces(x: &ToricVariety, d: &[Rational]) -> Vec<Halfspace> {
    (0..x.num_rays())
        .map(|i| Halfspace::new(x.ray(i), -d[i].clone()))
        .collect()
}

/// `P_D = {u : <u, v_i> >= -a_i}`.
pub fn section_polytope(x: &ToricVariety, d: &[Rational]) -> Result<Polytope> {
    check_len(x, d)?;
    Polytope::from_halfspaces(x.n, &section_halfspaces(x, d))
}

/// The face of `P_D` where every ray of `cone` is tight.
pub fn section_face(x: &ToricVariety, d: &[Rational], cone: &[usize]) -> Result<Polytope> {
    check_len(x, d)?;
    let mut hs = section_halfspaces(x, d);
    for &i in cone {
        hs.push(Halfspace::new(x.ray(i).iter().map(|c| -c).collect(), d[i].clone()));
    }
    Polytope::from_halfspaces(x.n, &hs)
}

fn face_nonempty(x: &ToricVariety, d: &[Rational], cone: &[usize]) -> bool {
    let mut lp = LinearProgram::free_vars(x.n);
    for (i, a) in d.iter().enumerate() {
        let rel = if cone.contains(&i) { Relation::Eq } else { Relation::Ge };
        lp.constrain(x.ray(i), rel, -a.clone());
    }
    lp.is_feasible()
}

/// Pseudoeffective ⟺ some effective ℝ-divisor is linearly equivalent to D
/// ⟺ `P_D` is nonempty (toric effective cones are generated by the `D_i`).
pub fn is_pseudoeffective(x: &ToricVariety, d: &[Rational]) -> bool {
    face_nonempty(x, d, &[])
}

pub fn iitaka_dim(x: &ToricVariety, d: &[Rational]) -> Result<Dimension> {
    Ok(section_polytope(x, d)?.affine_dim().into())
}

/// Nef ⟺ `D · C >= 0` for every invariant curve.
pub fn is_nef(x: &ToricVariety, d: &[Rational]) -> bool {
    x.walls().iter().all(|w| !w.degree(d).is_negative())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ToricClass {
    pub pseudoeffective: bool,
    pub big: bool,
    pub nef: bool,
    /// Nef implies semiample on a complete toric variety.
    pub semiample: bool,
}

pub fn classify(x: &ToricVariety, d: &[Rational]) -> Result<ToricClass> {
    check_len(x, d)?;
    let pseudoeffective = is_pseudoeffective(x, d);
    let big = pseudoeffective && section_polytope(x, d)?.affine_dim() == Some(x.n);
    let nef = is_nef(x, d);
    Ok(ToricClass {
        pseudoeffective,
        big,
        nef,
        semiample: nef,
    })
}

/// `vol_X(D) = n! vol(P_D)`.
pub fn volume(x: &ToricVariety, d: &[Rational]) -> Result<Rational> {
    let p = section_polytope(x, d)?;
    Ok(crate::exactgeom::volume::full_volume(&p) * crate::exactgeom::rational::factorial(x.n))
}

fn min_order(x: &ToricVariety, d: &[Rational], p: &Polytope, i: usize) -> Result<Rational> {
    let (v, _) = p.lp_optimize(&x.ray(i), Sense::Minimize)?;
    Ok(v + &d[i])
}

/// `ord_{D_i}(||D||)`. For big D this is `min_{u ∈ P_D} (a_i + <u, v_i>)`;
/// otherwise the ε → 0⁺ limit of the same quantity for `D + εA`.
pub fn asymptotic_order(x: &ToricVariety, d: &[Rational], i: usize) -> Result<Rational> {
    asymptotic_order_with(x, d, i, &LimitSettings::reference(x)?)
}

pub fn asymptotic_order_with(x: &ToricVariety, d: &[Rational], i: usize, limits: &LimitSettings) -> Result<Rational> {
    check_len(x, d)?;
    if !is_pseudoeffective(x, d) {
        return Err(Error::NotPseudoEffective);
    }
    let p = section_polytope(x, d)?;
    if p.affine_dim() == Some(x.n) {
        return min_order(x, d, &p, i);
    }
    extrapolate_scalar(&limits.schedule, |eps| {
        let de = limits.shifted(d, eps);
        let pe = section_polytope(x, &de)?;
        min_order(x, &de, &pe, i)
    })
}

/// σ-decomposition: `N_σ = Σ ord_{D_i}(||D||) D_i`.
pub fn sigma_decomposition(x: &ToricVariety, d: &[Rational], limits: &LimitSettings) -> Result<ZariskiDecomposition> {
    let orders = (0..x.num_rays())
        .map(|i| asymptotic_order_with(x, d, i, limits))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZariskiDecomposition::from_coefficients(
        d,
        &orders,
        ToricVariety::ray_name,
        DecompositionKind::Sigma,
    ))
}

/// s-decomposition: `N_s` has coefficients `min_{u ∈ P_D} (a_i + <u, v_i>)`,
/// the infimum over effective representatives.
pub fn s_decomposition(x: &ToricVariety, d: &[Rational]) -> Result<ZariskiDecomposition> {
    let p = section_polytope(x, d)?;
    if p.is_empty() {
        return Err(Error::HypothesisUnmet(
            "P_D is empty: no effective representative".into(),
        ));
    }
    let mins = (0..x.num_rays())
        .map(|i| min_order(x, d, &p, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(ZariskiDecomposition::from_coefficients(
        d,
        &mins,
        ToricVariety::ray_name,
        DecompositionKind::S,
    ))
}

/// Both decompositions. For effective D they must agree (toric abundance);
/// a mismatch is reported as a refutation.
pub fn sigma_s_decomposition(x: &ToricVariety, d: &[Rational]) -> Result<(ZariskiDecomposition, ZariskiDecomposition)> {
    let limits = LimitSettings::reference(x)?;
    let sigma = sigma_decomposition(x, d, &limits)?;
    let s = s_decomposition(x, d)?;
    if !sigma.same_parts(&s) {
        return Err(Error::Refuted(format!(
            "sigma and s decompositions differ for effective divisor {:?}",
            d.iter().map(crate::exactgeom::rational::format).collect::<Vec<_>>()
        )));
    }
    Ok((sigma, s))
}

/// Cones σ with `V(σ) ⊆ SB(D)`: the face of `P_D` cut out by σ is empty.
/// The zero cone stands for the whole variety.
pub fn stable_base_locus(x: &ToricVariety, d: &[Rational]) -> Vec<Vec<usize>> {
    x.all_cones().into_iter().filter(|c| !face_nonempty(x, d, c)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseLoci {
    pub stable: Vec<Vec<usize>>,
    pub augmented: Vec<Vec<usize>>,
    pub restricted: Vec<Vec<usize>>,
}

impl BaseLoci {
    pub fn augmented_contains(&self, cone: &[usize]) -> bool {
        let mut c = cone.to_vec();
        c.sort_unstable();
        self.augmented.contains(&c)
    }

    pub fn restricted_contains(&self, cone: &[usize]) -> bool {
        let mut c = cone.to_vec();
        c.sort_unstable();
        self.restricted.contains(&c)
    }

    pub fn is_nested(&self) -> bool {
        self.restricted.iter().all(|c| self.stable.contains(c))
            && self.stable.iter().all(|c| self.augmented.contains(c))
    }
}

fn stabilized_locus(x: &ToricVariety, d: &[Rational], limits: &LimitSettings, sign: i64) -> Result<Vec<Vec<usize>>> {
    let out = extrapolate(&limits.schedule, |eps| {
        let de = limits.shifted(d, &(eps * int(sign)));
        Ok(stable_base_locus(x, &de).into_iter().map(|c| (c, Vec::new())).collect())
    })?;
    Ok(out.into_iter().map(|(c, _)| c).collect())
}

/// `SB(D)`, `B₊(D) = SB(D - εA)` and `B₋(D) = ∪_ε SB(D + εA)`, with ε
/// stabilization.
pub fn base_loci(x: &ToricVariety, d: &[Rational]) -> Result<BaseLoci> {
    base_loci_with(x, d, &LimitSettings::reference(x)?)
}

pub fn base_loci_with(x: &ToricVariety, d: &[Rational], limits: &LimitSettings) -> Result<BaseLoci> {
    check_len(x, d)?;
    let loci = BaseLoci {
        stable: stable_base_locus(x, d),
        augmented: stabilized_locus(x, d, limits, -1)?,
        restricted: stabilized_locus(x, d, limits, 1)?,
    };
    if !loci.is_nested() {
        return Err(Error::Refuted("base loci are not nested B- ⊆ SB ⊆ B+".into()));
    }
    Ok(loci)
}

/// `∩_{ε>0} P_{D+εA}`, computed by extrapolating the vertices of
/// `P_{D+εA}` (labelled by their tight rays) to ε = 0.
pub fn numerical_positive_polytope(x: &ToricVariety, d: &[Rational], limits: &LimitSettings) -> Result<Polytope> {
    check_len(x, d)?;
    if !is_pseudoeffective(x, d) {
        return Err(Error::NotPseudoEffective);
    }
    let limit = extrapolate(&limits.schedule, |eps| {
        let de = limits.shifted(d, eps);
        let p = section_polytope(x, &de)?;
        let hs = section_halfspaces(x, &de);
        Ok(p.vertices()
            .iter()
            .map(|v| {
                let tight: Vec<usize> = hs
                    .iter()
                    .enumerate()
                    .filter(|(_, h)| h.is_tight(v))
                    .map(|(i, _)| i)
                    .collect();
                (tight, v.clone())
            })
            .collect())
    })?;
    let pts: Vec<QVector> = limit.into_iter().map(|(_, v)| v).collect();
    Ok(Polytope::hull_in(x.n, &pts))
}

/// Numerical dimension. Toric divisors are abundant, so this is the Iitaka
/// dimension, confirmed by the growth of `#P_{⌊mD⌋ + A}` for m ≤ 12.
pub fn numerical_dim(x: &ToricVariety, d: &[Rational]) -> Result<Dimension> {
    let kappa = iitaka_dim(x, d)?;
    let Dimension::Finite(k) = kappa else {
        return Ok(kappa);
    };
    let a = x.reference_ample()?;
    let count = |m: i64| -> Result<usize> {
        let floor_md: QVector = d.iter().map(|c| Rational::from_integer(floor(&(c * int(m))))).collect();
        let shifted: QVector = floor_md.iter().zip(&a).map(|(p, q)| p + q).collect();
        count_lattice_points(&section_polytope(x, &shifted)?)
    };
    let (c6, c12) = (count(6)?, count(12)?);
    // a degree-k growth has c12/c6 -> 2^k; anything ≥ 2^(k+1) means faster growth
    if c6 == 0 || c12 < c6 || c12 >= c6 << (k + 1) {
        return Err(Error::Refuted(format!(
            "section counts {c6} (m=6), {c12} (m=12) do not grow like m^{k}"
        )));
    }
    Ok(kappa)
}
