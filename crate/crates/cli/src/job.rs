use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use oklab::body::BodyKind;
use oklab::decomposition::DecompositionKind;
use oklab::exactgeom::rational::format;
use oklab::exactgeom::{EpsilonSchedule, Polytope, QVector};
use oklab::harness::{library, run_suite, CheckKind, Instance};
use oklab::io::{self, FlagSpec, Variety};
use oklab::oracle::{convergence_report, sample_body, OracleFlag, SampleConfig};
use oklab::surface::{self, polygon, SurfFlag};
use oklab::toric::{self, InvariantFlag, LimitSettings};
use oklab::{Error, Result};

use crate::{render, Args, Task};

/// Variety, divisor and optional flags/ample read from a job file. Instance
/// files from the library are accepted as well.
struct Job {
    variety: Variety,
    divisor: QVector,
    flags: Vec<FlagSpec>,
    ample: Option<QVector>,
}

fn load_job(path: &Path) -> Result<Job> {
    let v = io::read_json(path)?;
    let variety = io::variety_from_json(
        v.get("variety")
            .ok_or_else(|| Error::Schema("job needs a variety".into()))?,
    )?;
    let divisor = io::divisor_from_json(
        v.get("divisor")
            .ok_or_else(|| Error::Schema("job needs a divisor".into()))?,
        &variety,
    )?;
    let flags = match v.get("flags") {
        Some(Value::Array(fs)) => fs.iter().map(io::flag_from_json).collect::<Result<_>>()?,
        Some(_) => return Err(Error::Schema("flags must be an array".into())),
        None => Vec::new(),
    };
    let ample = match v.get("ample").or_else(|| v.get("params").and_then(|p| p.get("ample"))) {
        Some(a) => Some(io::divisor_from_json(a, &variety)?),
        None => None,
    };
    Ok(Job {
        variety,
        divisor,
        flags,
        ample,
    })
}

fn input(args: &Args) -> Result<&Path> {
    args.input
        .as_deref()
        .ok_or_else(|| Error::Schema(format!("--task {:?} needs --input", args.task)))
}

fn resolve_flag(args: &Args, job: &Job) -> Result<FlagSpec> {
    let Some(f) = &args.flag else {
        return job
            .flags
            .first()
            .cloned()
            .ok_or_else(|| Error::Schema("no flag given and the job lists none".into()));
    };
    if let Ok(i) = f.parse::<usize>() {
        return job
            .flags
            .get(i)
            .cloned()
            .ok_or_else(|| Error::Schema(format!("flag index {i} out of range")));
    }
    match &job.variety {
        Variety::Toric(_) if f.contains(',') => {
            let order = f
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Schema(format!("bad cone {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(FlagSpec::Invariant(order))
        }
        _ => Ok(FlagSpec::General { curve: f.clone() }),
    }
}

fn schedule(args: &Args) -> Result<EpsilonSchedule> {
    match &args.epsilon_schedule {
        Some(s) => EpsilonSchedule::parse(s),
        None => Ok(EpsilonSchedule::default()),
    }
}

fn limits(args: &Args, x: &toric::ToricVariety, job: &Job) -> Result<LimitSettings> {
    let mut l = LimitSettings::reference(x)?;
    if let Some(a) = &job.ample {
        l = l.with_ample(a.clone());
    }
    l.schedule = schedule(args)?;
    Ok(l)
}

fn dim_json(d: oklab::dimension::Dimension) -> Value {
    json!(d.to_string())
}

fn classify(job: &Job) -> Result<Value> {
    Ok(match &job.variety {
        Variety::Toric(x) => {
            let c = toric::classify(x, &job.divisor)?;
            json!({
                "pseudoeffective": c.pseudoeffective, "big": c.big, "nef": c.nef, "semiample": c.semiample,
                "kappa": dim_json(toric::iitaka_dim(x, &job.divisor)?),
                "kappa_nu": dim_json(toric::numerical_dim(x, &job.divisor)?),
            })
        }
        Variety::Surface(s) => {
            let c = surface::classify(s, &job.divisor)?;
            let mut out = json!({"pseudoeffective": c.pseudoeffective, "big": c.big, "nef": c.nef});
            if c.pseudoeffective {
                let nd = surface::numerical_dim(s, &job.divisor)?;
                out["kappa_nu"] = dim_json(nd);
                if s.abundant {
                    out["kappa"] = dim_json(nd);
                }
            }
            out
        }
    })
}

fn decompose(args: &Args, job: &Job) -> Result<Value> {
    let kind: DecompositionKind = args.kind.as_deref().unwrap_or("sigma").parse()?;
    let z = match &job.variety {
        Variety::Toric(x) => {
            let l = limits(args, x, job)?;
            match kind {
                DecompositionKind::Sigma => toric::divisor::sigma_decomposition(x, &job.divisor, &l)?,
                DecompositionKind::S => toric::divisor::s_decomposition(x, &job.divisor)?,
                DecompositionKind::Good => {
                    // toric nef classes are semiample, so the σ-decomposition
                    // is good exactly when it agrees with the s-decomposition
                    let (sigma, _) = toric::sigma_s_decomposition(x, &job.divisor)?;
                    sigma.with_kind(DecompositionKind::Good)
                }
            }
        }
        Variety::Surface(s) => surface::zariski_decompose(s, &job.divisor, kind)?,
    };
    Ok(io::decomposition_to_json(&z))
}

fn body(args: &Args, job: &Job) -> Result<(Value, Polytope)> {
    let kind: BodyKind = args.kind.as_deref().unwrap_or("big").parse()?;
    let flag = resolve_flag(args, job)?;
    let p = match (&job.variety, &flag) {
        (Variety::Toric(x), FlagSpec::Invariant(order)) => {
            let f = InvariantFlag::new(x, order.clone())?;
            toric::body::okounkov_body_with(x, &job.divisor, &f, kind, &limits(args, x, job)?)?
        }
        (Variety::Toric(x), FlagSpec::General { curve }) => {
            let s = surface::from_toric(x)?;
            let c = s.curve(curve)?;
            surface::okounkov_polygon(&s, &surface::toric_class(x, &job.divisor)?, SurfFlag { curve: c }, kind)?
        }
        (Variety::Surface(s), FlagSpec::General { curve }) => {
            let c = SurfFlag { curve: s.curve(curve)? };
            match (kind, &args.epsilon_schedule) {
                (BodyKind::Lim, Some(_)) => {
                    let a = match &job.ample {
                        Some(a) => a.clone(),
                        None => s.ample()?,
                    };
                    polygon::extrapolated_limit(s, &job.divisor, &a, &schedule(args)?, c)?
                }
                _ => surface::okounkov_polygon(s, &job.divisor, c, kind)?,
            }
        }
        (Variety::Surface(_), FlagSpec::Invariant(_)) => {
            return Err(Error::Schema("surface flags are curve names".into()));
        }
    };
    let mut out = io::polytope_to_json(&p);
    out["kind"] = json!(kind.as_str());
    out["flag"] = io::flag_to_json(&flag);
    out["dim"] = match p.affine_dim() {
        Some(d) => json!(d),
        None => Value::Null,
    };
    Ok((out, p))
}

fn invariants(job: &Job) -> Result<Value> {
    let d = &job.divisor;
    Ok(match &job.variety {
        Variety::Toric(x) => {
            let c = toric::classify(x, d)?;
            if !c.pseudoeffective {
                return Err(Error::NotPseudoEffective);
            }
            let orders = (0..x.num_rays())
                .map(|i| toric::asymptotic_order(x, d, i).map(|o| format(&o)))
                .collect::<Result<Vec<_>>>()?;
            let loci = toric::base_loci(x, d)?;
            let mut out = json!({
                "asymptotic_orders": orders,
                "stable_base_locus": loci.stable,
                "augmented_base_locus": loci.augmented,
                "restricted_base_locus": loci.restricted,
                "kappa": dim_json(toric::iitaka_dim(x, d)?),
                "kappa_nu": dim_json(toric::numerical_dim(x, d)?),
            });
            if c.big {
                out["volume"] = io::rational_to_json(&toric::divisor::volume(x, d)?);
            }
            out
        }
        Variety::Surface(s) => {
            let z = surface::zariski_decompose(s, d, DecompositionKind::Sigma)?;
            let loci = surface::base_loci_divisorial(s, d)?;
            let names = |v: &[usize]| v.iter().map(|&i| s.curves[i].name.clone()).collect::<Vec<_>>();
            let restricted = s
                .curves
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let vols = match surface::restricted_volumes(s, d, i) {
                        Ok((v, vp)) => json!({"restricted": format(&v), "augmented_restricted": format(&vp)}),
                        Err(Error::HypothesisUnmet(m)) => json!({"unavailable": m}),
                        Err(e) => return Err(e),
                    };
                    Ok((c.name.clone(), vols))
                })
                .collect::<Result<serde_json::Map<_, _>>>()?;
            json!({
                "volume": io::rational_to_json(&s.self_intersection(&z.positive)),
                "kappa_nu": dim_json(surface::numerical_dim(s, d)?),
                "restricted_base_locus": names(&loci.restricted),
                "augmented_base_locus": loci.augmented.as_deref().map(names),
                "restricted_volumes": restricted,
            })
        }
    })
}

fn sample(args: &Args, job: &Job) -> Result<Value> {
    let Variety::Toric(x) = &job.variety else {
        return Err(Error::InvalidInput("sampling needs a toric variety".into()));
    };
    let mut cfg = SampleConfig::default();
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let (flag, target) = match resolve_flag(args, job)? {
        FlagSpec::Invariant(order) => {
            let f = InvariantFlag::new(x, order)?;
            let t = toric::body::okounkov_body_with(x, &job.divisor, &f, BodyKind::Val, &limits(args, x, job)?)?;
            (OracleFlag::Invariant(f), t)
        }
        FlagSpec::General { curve } => {
            let s = surface::from_toric(x)?;
            let c = s.curve(&curve)?;
            let t = surface::okounkov_polygon(
                &s,
                &surface::toric_class(x, &job.divisor)?,
                SurfFlag { curve: c },
                BodyKind::Big,
            )?;
            (OracleFlag::General { curve: c }, t)
        }
    };
    let levels = sample_body(x, &job.divisor, &flag, &cfg)?;
    let report = convergence_report(&levels, &target);
    if let Some(e) = report.refutation() {
        return Err(e);
    }
    Ok(json!({
        "seed": cfg.seed,
        "target": io::polytope_to_json(&target),
        "levels": levels.iter().zip(&report.levels).map(|(l, r)| json!({
            "m": l.level,
            "x0": l.x0.as_ref().map(io::rational_to_json),
            "points": l.points.iter().map(|p| io::vector_to_json(&p.entries)).collect::<Vec<_>>(),
            "hull": io::polytope_to_json(&l.hull),
            "contained": r.contained,
            "ratio": format(&r.ratio),
        })).collect::<Vec<_>>(),
        "monotone": report.monotone,
    }))
}

fn library_dir(args: &Args) -> PathBuf {
    args.input
        .clone()
        .or_else(|| std::env::var_os("OKLAB_DATA").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("data/instances"))
}

fn check(args: &Args) -> Result<(Value, bool)> {
    let mut instances: Vec<Instance> = library::load_library(&library_dir(args))?;
    if let Some(seed) = args.seed {
        instances.extend(library::default_random(seed));
    }
    if let Some(k) = &args.kind {
        let k: CheckKind = k.parse()?;
        for inst in &mut instances {
            inst.checks.retain(|c| *c == k);
        }
    }
    let summary = run_suite(&instances);
    eprint!("{}", summary.table());
    Ok((summary.to_json(), summary.failures().is_empty()))
}

fn write(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value") + "\n"
}

/// Runs one job; `Ok(false)` means a check failed.
pub fn run(args: &Args) -> Result<bool> {
    if let Some(s) = &args.epsilon_schedule {
        EpsilonSchedule::parse(s)?;
    }
    match args.task {
        Task::Check => {
            let (v, ok) = check(args)?;
            write(args.out.as_deref(), &pretty(&v))?;
            Ok(ok)
        }
        Task::Render => {
            let v = io::read_json(input(args)?)?;
            let p = io::polytope_from_json(v.get("body").unwrap_or(&v))?;
            write(args.svg.as_deref().or(args.out.as_deref()), &render::render(&p)?)?;
            Ok(true)
        }
        Task::Body => {
            let job = load_job(input(args)?)?;
            let (v, p) = body(args, &job)?;
            write(args.out.as_deref(), &pretty(&v))?;
            let svg_path = args
                .svg
                .clone()
                .or_else(|| args.out.as_ref().map(|o| o.with_extension("svg")));
            if let (Some(path), 2) = (svg_path, p.ambient_dim()) {
                write(Some(&path), &render::render(&p)?)?;
            }
            Ok(true)
        }
        task => {
            let job = load_job(input(args)?)?;
            let v = match task {
                Task::Classify => classify(&job)?,
                Task::Decompose => decompose(args, &job)?,
                Task::Invariants => invariants(&job)?,
                Task::Sample => sample(args, &job)?,
                Task::Check | Task::Render | Task::Body => unreachable!(),
            };
            write(args.out.as_deref(), &pretty(&v))?;
            Ok(true)
        }
    }
}
