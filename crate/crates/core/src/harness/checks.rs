use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use super::{CheckKind, CheckReport, Instance, Status};
use crate::body::BodyKind;
use crate::decomposition::{DecompositionKind, ZariskiDecomposition};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exactgeom::polytope::Polytope;
use crate::exactgeom::rational::{factorial, format, frac, int, QVector, Rational};
use crate::exactgeom::volume::{full_volume, volume};
use crate::io::{polytope_to_json, vector_to_json, FlagSpec, Variety};
use crate::oracle::{convergence_report, sample_body, OracleFlag};
use crate::surface::model::{from_toric, toric_class, LatticeSurface};
use crate::surface::polygon::{
    augmented_locus, augmented_restricted_volume, extrapolated_limit, fibration_multiple, okounkov_polygon,
    perturbed_polygon, restricted_volume as surface_restricted_volume, SurfFlag,
};
use crate::surface::zariski::{self, invariant_violation, zariski_decompose};
use crate::toric::body::{okounkov_body_with, InvariantFlag};
use crate::toric::divisor::{
    base_loci_with, classify as toric_classify, iitaka_dim, is_nef, section_face, sigma_decomposition,
    sigma_s_decomposition, volume as toric_volume, LimitSettings,
};
use crate::toric::fan::ToricVariety;

type Outcome = Result<(Status, Value)>;

#[derive(Default)]
struct Recorder {
    notes: Vec<String>,
    counts: Vec<usize>,
}

impl Recorder {
    fn body(&mut self, p: Polytope) -> Polytope {
        self.counts.push(p.vertices().len());
        p
    }

    fn note(&mut self, n: impl Into<String>) {
        self.notes.push(n.into());
    }
}

fn gated(reason: impl Into<String>) -> Outcome {
    Ok((Status::Gated(reason.into()), Value::Null))
}

/// Pass when nothing failed and something was compared; gated when every
/// case was gated.
fn verdict(compared: usize, failures: Vec<Value>, gated_cases: Vec<Value>, gate_reason: &str) -> Outcome {
    if !failures.is_empty() {
        return Ok((Status::Fail, json!({"failures": failures, "gated": gated_cases})));
    }
    if compared == 0 {
        return Ok((Status::Gated(gate_reason.into()), json!({"gated": gated_cases})));
    }
    Ok((Status::Pass, json!({"compared": compared, "gated": gated_cases})))
}

pub fn run_check(inst: &Instance, check: CheckKind) -> CheckReport {
    let mut rec = Recorder::default();
    let outcome = inst.validate().and_then(|()| match check {
        CheckKind::Slicing => slicing(inst, &mut rec),
        CheckKind::DimVol => dim_vol(inst, &mut rec),
        CheckKind::Criteria => criteria(inst, &mut rec),
        CheckKind::PositivePart => positive_part(inst, &mut rec),
        CheckKind::Zariski => zariski_check(inst, &mut rec),
        CheckKind::Simplex => simplex(inst, &mut rec),
        CheckKind::LimitingLimit => limiting_limit(inst, &mut rec),
        CheckKind::Birational => birational(inst, &mut rec),
        CheckKind::Oracle => oracle(inst, &mut rec),
    });
    let (status, witness) = match outcome {
        Ok(x) => x,
        Err(Error::HypothesisUnmet(m)) => (Status::Gated(m), Value::Null),
        Err(Error::NotPseudoEffective) => (Status::Gated("divisor is not pseudoeffective".into()), Value::Null),
        Err(e) => (Status::Fail, json!({"error": e.to_string()})),
    };
    CheckReport {
        check,
        instance: inst.id.clone(),
        status,
        witness,
        notes: rec.notes,
        vertex_counts: rec.counts,
    }
}

// ---------- shared helpers ----------

fn toric_flags(x: &ToricVariety, inst: &Instance) -> Result<Vec<InvariantFlag>> {
    inst.flags
        .iter()
        .filter_map(|f| match f {
            FlagSpec::Invariant(order) => Some(InvariantFlag::new(x, order.clone())),
            FlagSpec::General { .. } => None,
        })
        .collect()
}

fn toric_limits(x: &ToricVariety, inst: &Instance) -> Result<LimitSettings> {
    let limits = LimitSettings::reference(x)?;
    Ok(match &inst.params.ample {
        Some(a) => limits.with_ample(a.clone()),
        None => limits,
    })
}

fn surface_flags(s: &LatticeSurface, inst: &Instance) -> Result<Vec<usize>> {
    inst.flags
        .iter()
        .map(|f| match f {
            FlagSpec::General { curve } => s.curve(curve),
            FlagSpec::Invariant(_) => Err(Error::InvalidInput("surface instances take general-point flags".into())),
        })
        .collect()
}

fn toric_curve_index(x: &ToricVariety, name: &str) -> Result<usize> {
    (0..x.num_rays())
        .find(|&i| ToricVariety::ray_name(i) == name)
        .ok_or_else(|| Error::InvalidInput(format!("unknown invariant curve {name:?}")))
}

fn flag_json(f: &InvariantFlag) -> Value {
    json!(f.order)
}

/// All vertices vanish in the first `n - k` coordinates.
fn in_coordinate_subspace(p: &Polytope, k: usize) -> bool {
    let n = p.ambient_dim();
    p.vertices().iter().all(|v| v[..n - k].iter().all(Zero::is_zero))
}

fn dim_of(p: &Polytope) -> Dimension {
    p.affine_dim().into()
}

fn segment(a: QVector, b: QVector) -> Polytope {
    Polytope::hull_in(2, &[a, b])
}

/// Surface-side data shared by several checks.
struct SurfaceData {
    sigma: ZariskiDecomposition,
    kappa_nu: Dimension,
    /// Equal to κ_ν when the model is abundant.
    kappa: Option<Dimension>,
    big: bool,
}

impl SurfaceData {
    fn new(s: &LatticeSurface, d: &[Rational]) -> Result<Self> {
        if !s.is_pseudoeffective(d) {
            return Err(Error::NotPseudoEffective);
        }
        let sigma = zariski_decompose(s, d, DecompositionKind::Sigma)?;
        let kappa_nu = zariski::numerical_dim(s, d)?;
        Ok(SurfaceData {
            big: kappa_nu == Dimension::Finite(2),
            kappa: s.abundant.then_some(kappa_nu),
            sigma,
            kappa_nu,
        })
    }

    fn in_b_minus(&self, c: usize) -> bool {
        self.sigma.support().contains(&c)
    }

    /// The flag `(C, x)` contains a Nakayama subvariety in dimension κ.
    fn nakayama(&self, s: &LatticeSurface, c: usize) -> bool {
        if self.in_b_minus(c) {
            return false;
        }
        match self.kappa {
            Some(Dimension::Finite(1)) => fibration_multiple(s, &self.sigma.positive)
                .is_some_and(|(f, _)| s.pairing(&s.curves[c].class, &f).is_positive()),
            Some(Dimension::Finite(_)) => true,
            _ => false,
        }
    }

    /// The flag contains a positive volume subvariety in dimension κ_ν.
    fn pvs(&self, s: &LatticeSurface, c: usize) -> bool {
        if self.in_b_minus(c) {
            return false;
        }
        match self.kappa_nu {
            Dimension::Finite(1) => s.pairing(&self.sigma.positive, &s.curves[c].class).is_positive(),
            Dimension::Finite(_) => true,
            Dimension::NegInfinity => false,
        }
    }
}

/// Expected tags that disagree with the computed ones.
fn tag_mismatches(inst: &Instance, psef: bool, big: bool, kappa: Option<Dimension>, kappa_nu: Dimension) -> Vec<Value> {
    let e = &inst.expected;
    let mut out = Vec::new();
    if e.psef.is_some_and(|b| b != psef) {
        out.push(json!({"tag": "psef", "computed": psef}));
    }
    if e.big.is_some_and(|b| b != big) {
        out.push(json!({"tag": "big", "computed": big}));
    }
    if let (Some(want), Some(got)) = (e.kappa, kappa) {
        if want != got {
            out.push(json!({"tag": "kappa", "computed": got.to_string()}));
        }
    }
    if e.kappa_nu.is_some_and(|k| k != kappa_nu) {
        out.push(json!({"tag": "kappa_nu", "computed": kappa_nu.to_string()}));
    }
    out
}

// ---------- slicing ----------

fn slicing(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let d = &inst.divisor;
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    match &inst.variety {
        Variety::Toric(x) => {
            if !toric_classify(x, d)?.big {
                return gated("divisor is not big");
            }
            let n = x.n;
            let limits = toric_limits(x, inst)?;
            let loci = base_loci_with(x, d, &limits)?;
            let ks: Vec<usize> = if inst.params.slicing_k.is_empty() {
                (1..n).collect()
            } else {
                inst.params.slicing_k.clone()
            };
            for flag in toric_flags(x, inst)? {
                let body = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Big, &limits)?);
                for &k in &ks {
                    let cone = flag.cone_of(n - k);
                    if loci.augmented_contains(&cone) {
                        gated_cases.push(json!({"flag": flag_json(&flag), "k": k, "reason": "Y_{n-k} lies in B+"}));
                        continue;
                    }
                    let slice = rec.body(body.slice(k)?);
                    // sections restricted to V = Y_{n-k}: the face of P_D over V,
                    // valued along the rest of the flag
                    let face = section_face(x, d, &cone)?;
                    let rows: Vec<QVector> = flag
                        .order
                        .iter()
                        .enumerate()
                        .map(|(j, &r)| if j < n - k { vec![Rational::zero(); n] } else { x.ray(r) })
                        .collect();
                    let shift: QVector = flag
                        .order
                        .iter()
                        .enumerate()
                        .map(|(j, &r)| if j < n - k { Rational::zero() } else { d[r].clone() })
                        .collect();
                    let restricted = rec.body(face.affine_image(&rows, &shift)?);
                    compared += 1;
                    if !restricted.equals(&slice) {
                        failures.push(json!({
                            "flag": flag_json(&flag), "k": k,
                            "slice": polytope_to_json(&slice), "restricted": polytope_to_json(&restricted),
                        }));
                    }
                }
            }
        }
        Variety::Surface(s) => {
            let data = SurfaceData::new(s, d)?;
            if !data.big {
                return gated("divisor is not big");
            }
            let bplus = augmented_locus(s, d)?;
            for c in surface_flags(s, inst)? {
                let name = &s.curves[c].name;
                if bplus.contains(&c) {
                    gated_cases.push(json!({"curve": name, "k": 1, "reason": "C lies in B+"}));
                    continue;
                }
                let body = rec.body(okounkov_polygon(s, d, SurfFlag { curve: c }, BodyKind::Big)?);
                let slice = rec.body(body.slice(1)?);
                let vol = surface_restricted_volume(s, d, c)?;
                let restricted = rec.body(segment(vec![int(0), int(0)], vec![int(0), vol]));
                compared += 1;
                if !restricted.equals(&slice) {
                    failures.push(json!({
                        "curve": name, "k": 1,
                        "slice": polytope_to_json(&slice), "restricted": polytope_to_json(&restricted),
                    }));
                }
            }
        }
    }
    verdict(compared, failures, gated_cases, "every flag element lies in B+(D)")
}

// ---------- dimensions and volumes ----------

fn dim_vol(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let d = &inst.divisor;
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    match &inst.variety {
        Variety::Toric(x) => {
            let class = toric_classify(x, d)?;
            let kappa = iitaka_dim(x, d)?;
            rec.note("toric abundance assumed: κ_ν = κ");
            failures.extend(tag_mismatches(
                inst,
                class.pseudoeffective,
                class.big,
                Some(kappa),
                kappa,
            ));
            if !class.pseudoeffective {
                return if failures.is_empty() {
                    gated("divisor is not pseudoeffective")
                } else {
                    verdict(0, failures, gated_cases, "")
                };
            }
            let limits = toric_limits(x, inst)?;
            for flag in toric_flags(x, inst)? {
                let val = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Val, &limits)?);
                let lim = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Lim, &limits)?);
                compared += 1;
                if dim_of(&val) != kappa || dim_of(&lim) != kappa {
                    failures.push(json!({
                        "flag": flag_json(&flag), "kappa": kappa.to_string(),
                        "dim_val": dim_of(&val).to_string(), "dim_lim": dim_of(&lim).to_string(),
                    }));
                }
                if class.big {
                    let lhs = factorial(x.n) * full_volume(&val);
                    let rhs = toric_volume(x, d)?;
                    if lhs != rhs {
                        failures
                            .push(json!({"flag": flag_json(&flag), "n!vol(Δ)": format(&lhs), "vol_X": format(&rhs)}));
                    }
                }
            }
        }
        Variety::Surface(s) => {
            let data = SurfaceData::new(s, d)?;
            failures.extend(tag_mismatches(inst, true, data.big, data.kappa, data.kappa_nu));
            for c in surface_flags(s, inst)? {
                let name = s.curves[c].name.clone();
                let flag = SurfFlag { curve: c };
                let mut any = false;
                if data.nakayama(s, c) {
                    let k = data.kappa.and_then(Dimension::finite).expect("nakayama flags need κ");
                    let val = rec.body(okounkov_polygon(
                        s,
                        d,
                        flag,
                        if data.big { BodyKind::Big } else { BodyKind::Val },
                    )?);
                    let target = match k {
                        2 => s.self_intersection(&data.sigma.positive),
                        1 => surface_restricted_volume(s, d, c)?,
                        _ => int(1),
                    };
                    compared += 1;
                    any = true;
                    let coords: Vec<usize> = (2 - k..2).collect();
                    let ok = dim_of(&val) == Dimension::Finite(k)
                        && volume(&val, &coords).is_ok_and(|v| factorial(k) * v == target);
                    if !ok {
                        failures.push(json!({"curve": name, "body": "val", "kappa": k, "Δ": polytope_to_json(&val), "vol_X|U": format(&target)}));
                    }
                }
                if data.pvs(s, c) {
                    let k = data.kappa_nu.finite().expect("psef");
                    let lim = rec.body(okounkov_polygon(s, d, flag, BodyKind::Lim)?);
                    let target = match k {
                        2 => s.self_intersection(&data.sigma.positive),
                        1 => augmented_restricted_volume(s, d, c)?,
                        _ => int(1),
                    };
                    compared += 1;
                    any = true;
                    let coords: Vec<usize> = (2 - k..2).collect();
                    let ok = dim_of(&lim) == Dimension::Finite(k)
                        && volume(&lim, &coords).is_ok_and(|v| factorial(k) * v == target);
                    if !ok {
                        failures.push(json!({"curve": name, "body": "lim", "kappa_nu": k, "Δ": polytope_to_json(&lim), "vol+_X|V": format(&target)}));
                    }
                }
                if !any {
                    gated_cases.push(
                        json!({"curve": name, "reason": "flag contains no Nakayama or positive volume subvariety"}),
                    );
                }
            }
        }
    }
    verdict(
        compared,
        failures,
        gated_cases,
        "no flag carries the designated subvarieties",
    )
}

// ---------- criteria ----------

fn criteria(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let Variety::Surface(s) = &inst.variety else {
        return gated("criteria checks use general-point surface flags");
    };
    let d = &inst.divisor;
    let data = SurfaceData::new(s, d)?;
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    for c in surface_flags(s, inst)? {
        let name = s.curves[c].name.clone();
        let flag = SurfFlag { curve: c };
        let mut any = false;
        if data.nakayama(s, c) {
            let k = data.kappa.and_then(Dimension::finite).expect("nakayama flags need κ");
            let val = rec.body(okounkov_polygon(
                s,
                d,
                flag,
                if data.big { BodyKind::Big } else { BodyKind::Val },
            )?);
            compared += 1;
            any = true;
            if !(in_coordinate_subspace(&val, k) && dim_of(&val) == Dimension::Finite(k)) {
                failures
                    .push(json!({"curve": name, "direction": "forward", "body": "val", "Δ": polytope_to_json(&val)}));
            }
        }
        if data.pvs(s, c) {
            let k = data.kappa_nu.finite().expect("psef");
            let lim = rec.body(okounkov_polygon(s, d, flag, BodyKind::Lim)?);
            compared += 1;
            any = true;
            if !(in_coordinate_subspace(&lim, k) && dim_of(&lim) == Dimension::Finite(k)) {
                failures
                    .push(json!({"curve": name, "direction": "forward", "body": "lim", "Δ": polytope_to_json(&lim)}));
            }
        }
        if data.in_b_minus(c) {
            // C ⊆ B₋(D): neither C nor a point of it is a positive volume
            // subvariety, so the body must miss the required shape
            let lim = rec.body(okounkov_polygon(s, d, flag, BodyKind::Lim)?);
            let k = data.kappa_nu.finite().expect("psef").min(1);
            let satisfied = if k == 1 {
                lim.slice(1)?.affine_dim() == Some(1)
            } else {
                lim.contains_point(&[int(0), int(0)])
            };
            compared += 1;
            any = true;
            rec.note(format!(
                "converse flag {name}: required shape violated = {}",
                !satisfied
            ));
            if satisfied {
                failures.push(json!({"curve": name, "direction": "converse", "Δ": polytope_to_json(&lim)}));
            }
        }
        if !any {
            gated_cases.push(json!({"curve": name, "reason": "flag is neither designated nor inside B-"}));
        }
    }
    verdict(compared, failures, gated_cases, "no certifiable flag")
}

// ---------- positive part ----------

fn positive_part(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let d = &inst.divisor;
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    match &inst.variety {
        Variety::Toric(x) => {
            let (sigma, s_dec) = sigma_s_decomposition(x, d)?;
            let limits = toric_limits(x, inst)?;
            for flag in toric_flags(x, inst)? {
                let touched: Vec<usize> = flag
                    .order
                    .iter()
                    .copied()
                    .filter(|i| s_dec.support().contains(i))
                    .collect();
                if !touched.is_empty() {
                    let shift: Vec<String> = flag.order.iter().map(|&i| format(&s_dec.coeff_of(i))).collect();
                    gated_cases.push(
                        json!({"flag": flag_json(&flag), "reason": "flag divisor in supp N", "translate": shift}),
                    );
                    continue;
                }
                let val_d = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Val, &limits)?);
                let val_p = rec.body(okounkov_body_with(x, &s_dec.positive, &flag, BodyKind::Val, &limits)?);
                let lim_d = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Lim, &limits)?);
                let lim_p = rec.body(okounkov_body_with(x, &sigma.positive, &flag, BodyKind::Lim, &limits)?);
                compared += 1;
                if !val_d.equals(&val_p) || !lim_d.equals(&lim_p) {
                    failures.push(json!({
                        "flag": flag_json(&flag),
                        "val_D": polytope_to_json(&val_d), "val_Ps": polytope_to_json(&val_p),
                        "lim_D": polytope_to_json(&lim_d), "lim_Psigma": polytope_to_json(&lim_p),
                    }));
                }
            }
        }
        Variety::Surface(s) => {
            let data = SurfaceData::new(s, d)?;
            let p = data.sigma.positive.clone();
            for c in surface_flags(s, inst)? {
                let name = s.curves[c].name.clone();
                if data.in_b_minus(c) {
                    let t = data.sigma.coeff_of(c);
                    gated_cases.push(json!({"curve": name, "reason": "C in supp N_σ", "translate": [format(&t), "0"]}));
                    continue;
                }
                let flag = SurfFlag { curve: c };
                let lim_d = rec.body(okounkov_polygon(s, d, flag, BodyKind::Lim)?);
                let lim_p = rec.body(okounkov_polygon(s, &p, flag, BodyKind::Lim)?);
                compared += 1;
                if !lim_d.equals(&lim_p) {
                    failures.push(
                        json!({"curve": name, "lim_D": polytope_to_json(&lim_d), "lim_P": polytope_to_json(&lim_p)}),
                    );
                }
                if s.abundant {
                    let val = |e: &[Rational]| okounkov_polygon(s, e, flag, BodyKind::Val);
                    match (val(d), val(&p)) {
                        (Ok(a), Ok(b)) => {
                            let (a, b) = (rec.body(a), rec.body(b));
                            if !a.equals(&b) {
                                failures.push(json!({"curve": name, "val_D": polytope_to_json(&a), "val_P": polytope_to_json(&b)}));
                            }
                        }
                        (Err(Error::HypothesisUnmet(m)), _) | (_, Err(Error::HypothesisUnmet(m))) => {
                            rec.note(format!("valuative comparison skipped on {name}: {m}"));
                        }
                        (Err(e), _) | (_, Err(e)) => return Err(e),
                    }
                }
            }
        }
    }
    verdict(compared, failures, gated_cases, "every flag meets the negative part")
}

// ---------- Zariski decompositions ----------

fn by_name(z: &ZariskiDecomposition) -> BTreeMap<String, Rational> {
    z.negative.iter().map(|c| (c.name.clone(), c.coeff.clone())).collect()
}

fn zariski_check(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let d = &inst.divisor;
    let mut failures = Vec::new();
    match &inst.variety {
        Variety::Toric(x) => {
            let class = toric_classify(x, d)?;
            let kappa = iitaka_dim(x, d)?;
            failures.extend(tag_mismatches(
                inst,
                class.pseudoeffective,
                class.big,
                Some(kappa),
                kappa,
            ));
            if !class.pseudoeffective {
                return if failures.is_empty() {
                    gated("divisor is not pseudoeffective")
                } else {
                    verdict(0, failures, vec![], "")
                };
            }
            let limits = toric_limits(x, inst)?;
            let (sigma, s_dec) = sigma_s_decomposition(x, d)?;
            if !is_nef(x, &sigma.positive) {
                failures.push(json!({"reason": "P_σ is not nef", "P": vector_to_json(&sigma.positive)}));
            }
            let again = sigma_decomposition(x, &sigma.positive, &limits)?;
            if !again.is_trivial() {
                failures.push(json!({"reason": "decomposing P_σ is not idempotent", "N": again.negative.iter().map(|c| format(&c.coeff)).collect::<Vec<_>>()}));
            }
            if !sigma.same_parts(&s_dec) {
                failures.push(json!({"reason": "σ and s differ"}));
            }
            if x.n == 2 {
                let s = from_toric(x)?;
                let surf = zariski_decompose(&s, &toric_class(x, d)?, DecompositionKind::Sigma)?;
                let coeffs_agree = (0..x.num_rays()).all(|i| sigma.coeff_of(i) == surf.coeff_of(i));
                let positive_agrees = toric_class(x, &sigma.positive)? == surf.positive;
                rec.note("cross-model: toric LP route vs surface Bauer route");
                if !coeffs_agree || !positive_agrees {
                    failures.push(json!({
                        "reason": "toric and surface decompositions differ",
                        "toric_N": (0..x.num_rays()).map(|i| format(&sigma.coeff_of(i))).collect::<Vec<_>>(),
                        "surface_N": (0..x.num_rays()).map(|i| format(&surf.coeff_of(i))).collect::<Vec<_>>(),
                    }));
                }
            }
        }
        Variety::Surface(s) => {
            let data = SurfaceData::new(s, d)?;
            failures.extend(tag_mismatches(inst, true, data.big, data.kappa, data.kappa_nu));
            let sigma = &data.sigma;
            if let Some(v) = invariant_violation(s, d, sigma) {
                failures.push(json!({"reason": v}));
            }
            let again = zariski_decompose(s, &sigma.positive, DecompositionKind::Sigma)?;
            if !again.is_trivial() || again.positive != sigma.positive {
                failures.push(json!({"reason": "decomposing P_σ is not idempotent"}));
            }
            rec.note("outputs are exact rationals");
            if s.abundant {
                let s_dec = zariski_decompose(s, d, DecompositionKind::S)?;
                let good = zariski_decompose(s, d, DecompositionKind::Good)?;
                if !sigma.same_parts(&s_dec) {
                    failures.push(json!({"reason": "σ and s differ on an abundant model"}));
                }
                // (1) ⟺ (3): a good decomposition exists (abundant, finitely
                // generated model) and it is the s-decomposition
                if !good.same_parts(&s_dec) || !s.is_nef(&good.positive) {
                    failures.push(json!({"reason": "good decomposition differs from the s-decomposition"}));
                }
            } else {
                rec.note("σ = s and good-decomposition subchecks need the abundance flag");
            }
            let n = s.curves.len();
            let mut orders: Vec<Vec<usize>> = vec![(0..n).rev().collect()];
            let mut rng = ChaCha8Rng::seed_from_u64(12345);
            for _ in 0..2 {
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                orders.push(o);
            }
            for order in orders {
                let z = zariski_decompose(&s.permuted(&order), d, DecompositionKind::Sigma)?;
                if by_name(&z) != by_name(sigma) || z.positive != sigma.positive {
                    failures.push(json!({"reason": "curve order changes the decomposition", "order": order}));
                }
            }
        }
    }
    verdict(1, failures, vec![], "")
}

// ---------- simplex ----------

fn simplex(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let Variety::Surface(s) = &inst.variety else {
        return gated("simplex checks use surface flags");
    };
    let d = &inst.divisor;
    let data = SurfaceData::new(s, d)?;
    let p = data.sigma.positive.clone();
    rec.note("a general member of |P| is modeled by class equality; irreducibility is declared, not verified");
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    let origin = vec![int(0), int(0)];
    for c in surface_flags(s, inst)? {
        let name = s.curves[c].name.clone();
        let cc = &s.curves[c].class;
        let flag = SurfFlag { curve: c };
        if data.in_b_minus(c) {
            gated_cases.push(json!({"curve": name, "reason": "C in supp N_σ"}));
            continue;
        }
        let mut predictions: Vec<(BodyKind, Polytope)> = Vec::new();
        match data.kappa_nu {
            Dimension::Finite(2) => {
                if cc != &p {
                    gated_cases.push(json!({"curve": name, "reason": "flag curve is not a member of |P|"}));
                    continue;
                }
                let vol = s.self_intersection(&p);
                predictions.push((
                    BodyKind::Big,
                    Polytope::hull_in(2, &[origin.clone(), vec![int(1), int(0)], vec![int(0), vol]]),
                ));
            }
            Dimension::Finite(1) => {
                let h = s.pairing(&p, cc);
                if !h.is_positive() {
                    gated_cases.push(json!({"curve": name, "reason": "P · C = 0"}));
                    continue;
                }
                predictions.push((BodyKind::Lim, segment(origin.clone(), vec![int(0), h])));
                if let Ok(w) = surface_restricted_volume(s, d, c) {
                    predictions.push((BodyKind::Val, segment(origin.clone(), vec![int(0), w])));
                }
            }
            _ => {
                predictions.push((BodyKind::Lim, Polytope::hull_in(2, std::slice::from_ref(&origin))));
                if s.abundant {
                    predictions.push((BodyKind::Val, Polytope::hull_in(2, std::slice::from_ref(&origin))));
                }
            }
        }
        for (kind, predicted) in predictions {
            let body = rec.body(okounkov_polygon(s, d, flag, kind)?);
            compared += 1;
            if !body.equals(&predicted) {
                failures.push(json!({
                    "curve": name, "kind": kind.as_str(),
                    "body": polytope_to_json(&body), "predicted": polytope_to_json(&predicted),
                }));
            }
        }
    }
    let max = rec.counts.iter().max().copied().unwrap_or(0);
    rec.note(format!("rational polytopes, at most {max} vertices"));
    verdict(
        compared,
        failures,
        gated_cases,
        "no flag qualifies for the simplex shape",
    )
}

// ---------- limiting limit ----------

fn chain_eps() -> Vec<Rational> {
    vec![int(1), frac(1, 2), frac(1, 4), frac(1, 8)]
}

fn check_chain(chain: &[Polytope], limit: &Polytope) -> Option<&'static str> {
    if chain.iter().any(|b| !b.contains(limit)) {
        return Some("limit not contained in Δ(D + εA)");
    }
    if chain.windows(2).any(|w| !w[0].contains(&w[1])) {
        return Some("ε-chain is not decreasing");
    }
    None
}

fn limiting_limit(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let d = &inst.divisor;
    let (mut compared, mut failures) = (0, Vec::new());
    match &inst.variety {
        Variety::Toric(x) => {
            if !crate::toric::divisor::is_pseudoeffective(x, d) {
                return gated("divisor is not pseudoeffective");
            }
            let limits = toric_limits(x, inst)?;
            let second = limits.clone().with_ample(match &inst.params.second_ample {
                Some(a) => a.clone(),
                None => x.alternate_ample()?,
            });
            for flag in toric_flags(x, inst)? {
                let chain = chain_eps()
                    .iter()
                    .map(|e| {
                        Ok(rec.body(okounkov_body_with(
                            x,
                            &limits.shifted(d, e),
                            &flag,
                            BodyKind::Big,
                            &limits,
                        )?))
                    })
                    .collect::<Result<Vec<_>>>()?;
                let lim = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Lim, &limits)?);
                let lim2 = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Lim, &second)?);
                // ∩_ε P_{D+εA} = P_D, so the closed form is the image of P_D
                let closed = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Val, &limits)?);
                compared += 1;
                let problem = check_chain(&chain, &lim)
                    .or_else(|| (!lim.equals(&closed)).then_some("extrapolated limit differs from the closed form"))
                    .or_else(|| (!lim2.equals(&lim)).then_some("second ample class changes the body"));
                if let Some(p) = problem {
                    failures.push(json!({"flag": flag_json(&flag), "reason": p, "lim": polytope_to_json(&lim), "closed": polytope_to_json(&closed), "lim_second": polytope_to_json(&lim2)}));
                }
            }
        }
        Variety::Surface(s) => {
            if !s.is_pseudoeffective(d) {
                return gated("divisor is not pseudoeffective");
            }
            let a = match &inst.params.ample {
                Some(a) => a.clone(),
                None => s.ample()?,
            };
            let a2 = match &inst.params.second_ample {
                Some(a) => a.clone(),
                None => s.alternate_ample()?,
            };
            let schedule = crate::exactgeom::limit::EpsilonSchedule::default();
            for c in surface_flags(s, inst)? {
                let flag = SurfFlag { curve: c };
                let chain = chain_eps()
                    .iter()
                    .map(|e| Ok(rec.body(perturbed_polygon(s, d, &a, e, flag)?)))
                    .collect::<Result<Vec<_>>>()?;
                let closed = rec.body(okounkov_polygon(s, d, flag, BodyKind::Lim)?);
                let lim = rec.body(extrapolated_limit(s, d, &a, &schedule, flag)?);
                let lim2 = rec.body(extrapolated_limit(s, d, &a2, &schedule, flag)?);
                compared += 1;
                let problem = check_chain(&chain, &closed)
                    .or_else(|| (!lim.equals(&closed)).then_some("extrapolated limit differs from the closed form"))
                    .or_else(|| (!lim2.equals(&lim)).then_some("second ample class changes the body"));
                if let Some(p) = problem {
                    failures.push(json!({"curve": s.curves[c].name, "reason": p, "lim": polytope_to_json(&lim), "closed": polytope_to_json(&closed), "lim_second": polytope_to_json(&lim2)}));
                }
            }
        }
    }
    verdict(compared, failures, vec![], "no flags")
}

// ---------- birational invariance ----------

fn birational(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let d = &inst.divisor;
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    match &inst.variety {
        Variety::Toric(x) => {
            let Some(cone) = &inst.params.blowup_cone else {
                return gated("no blow-up center given");
            };
            if !toric_classify(x, d)?.big {
                return gated("toric pairs are compared for big divisors only");
            }
            let blow = x.blowup_fixed_point(cone)?;
            let pulled = blow.pullback(d);
            let limits = toric_limits(x, inst)?;
            let limits_up = LimitSettings::reference(&blow.variety)?;
            for flag in toric_flags(x, inst)? {
                if blow.touches(&flag.order) {
                    gated_cases.push(json!({"flag": flag_json(&flag), "reason": "flag point is the blow-up center"}));
                    continue;
                }
                let up = InvariantFlag::new(&blow.variety, flag.order.clone())?;
                let b = rec.body(okounkov_body_with(x, d, &flag, BodyKind::Lim, &limits)?);
                let b_up = rec.body(okounkov_body_with(
                    &blow.variety,
                    &pulled,
                    &up,
                    BodyKind::Lim,
                    &limits_up,
                )?);
                compared += 1;
                if !b.equals(&b_up) {
                    failures.push(json!({"flag": flag_json(&flag), "body": polytope_to_json(&b), "pullback_body": polytope_to_json(&b_up)}));
                }
            }
        }
        Variety::Surface(s) => {
            let Some(partner) = &inst.params.partner else {
                return gated("no birational partner given");
            };
            let Variety::Surface(s2) = &partner.variety else {
                return Err(Error::InvalidInput("surface partner must be a surface".into()));
            };
            let exceptional = match &inst.params.exceptional {
                Some(e) => Some(s2.curve(e)?),
                None => None,
            };
            for (c, c2) in surface_flags(s, inst)?.into_iter().zip(surface_flags(s2, partner)?) {
                let name = &s2.curves[c2].name;
                if let Some(e) = exceptional {
                    if !s2.pairing(&s2.curves[c2].class, &s2.curves[e].class).is_zero() {
                        gated_cases
                            .push(json!({"curve": name, "reason": "strict transform meets the exceptional curve"}));
                        continue;
                    }
                }
                let b = rec.body(okounkov_polygon(s, d, SurfFlag { curve: c }, BodyKind::Lim)?);
                let b2 = rec.body(okounkov_polygon(
                    s2,
                    &partner.divisor,
                    SurfFlag { curve: c2 },
                    BodyKind::Lim,
                )?);
                compared += 1;
                if !b.equals(&b2) {
                    failures.push(
                        json!({"curve": name, "body": polytope_to_json(&b), "partner_body": polytope_to_json(&b2)}),
                    );
                }
            }
        }
    }
    verdict(compared, failures, gated_cases, "every flag meets the blown-up locus")
}

// ---------- oracle ----------

fn oracle(inst: &Instance, rec: &mut Recorder) -> Outcome {
    let Variety::Toric(x) = &inst.variety else {
        return gated("the oracle samples sections of toric divisors");
    };
    let d = &inst.divisor;
    let cfg = inst.params.oracle.clone().unwrap_or_default();
    let threshold = inst.params.oracle_threshold.clone().unwrap_or_else(|| frac(19, 20));
    let limits = toric_limits(x, inst)?;
    let big = toric_classify(x, d)?.big;
    let (mut compared, mut failures, mut gated_cases) = (0, Vec::new(), Vec::new());
    let mut summaries = Vec::new();
    for f in &inst.flags {
        let (oflag, target, label) = match f {
            FlagSpec::Invariant(order) => {
                let flag = InvariantFlag::new(x, order.clone())?;
                let target = okounkov_body_with(x, d, &flag, BodyKind::Val, &limits)?;
                (OracleFlag::Invariant(flag), target, json!(order))
            }
            FlagSpec::General { curve } => {
                if x.n != 2 || !big {
                    gated_cases
                        .push(json!({"curve": curve, "reason": "general-point flags need a big divisor on a surface"}));
                    continue;
                }
                let c = toric_curve_index(x, curve)?;
                let s = from_toric(x)?;
                let target = okounkov_polygon(&s, &toric_class(x, d)?, SurfFlag { curve: c }, BodyKind::Big)?;
                (OracleFlag::General { curve: c }, target, json!(curve))
            }
        };
        let target = rec.body(target);
        let levels = sample_body(x, d, &oflag, &cfg)?;
        for l in &levels {
            rec.counts.push(l.hull.vertices().len());
        }
        let report = convergence_report(&levels, &target);
        compared += 1;
        let ratios: Vec<Value> = report
            .levels
            .iter()
            .map(|l| json!({"m": l.level, "ratio": format(&l.ratio), "contained": l.contained}))
            .collect();
        summaries.push(json!({"flag": label, "levels": ratios, "monotone": report.monotone}));
        if !report.passes(&threshold) {
            let witness = report.levels.iter().find_map(|l| l.witness.clone());
            failures.push(json!({
                "flag": label,
                "reason": if report.all_contained() { "volume ratio below threshold".to_string() } else { "closed-form refuted".to_string() },
                "witness": witness.map(|w| vector_to_json(&w)),
                "target": polytope_to_json(&target),
            }));
        }
    }
    rec.note(format!(
        "degrees {:?}, {} samples, seed {}",
        cfg.degrees, cfg.samples, cfg.seed
    ));
    let (status, mut witness) = verdict(compared, failures, gated_cases, "no samplable flag")?;
    if status == Status::Pass {
        witness["levels"] = Value::Array(summaries);
    }
    Ok((status, witness))
}
