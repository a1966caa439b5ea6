//! One line per acceptance criterion; exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use oklab::body::BodyKind;
use oklab::decomposition::DecompositionKind;
use oklab::exactgeom::rational::{format, frac, int, qvec};
use oklab::exactgeom::{Polytope, Rational};
use oklab::harness::{library, run_check, CheckKind, CheckReport, Instance, Status};
use oklab::io::{FlagSpec, Variety};
use oklab::oracle::{convergence_report, sample_body, OracleFlag, SampleConfig};
use oklab::surface::model as sm;
use oklab::surface::{from_toric, okounkov_polygon, toric_class, zariski_decompose, SurfFlag};
use oklab::toric::{self, models as tm, InvariantFlag};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        ok,
        detail: detail.into(),
    }
}

fn everything() -> Vec<Instance> {
    let mut all = library::builtin();
    all.extend(library::default_random(12345));
    all
}

fn run(instances: &[Instance], check: CheckKind) -> Vec<CheckReport> {
    instances
        .iter()
        .filter(|i| i.checks.contains(&check))
        .map(|i| run_check(i, check))
        .collect()
}

fn failures(reports: &[CheckReport]) -> Vec<String> {
    reports
        .iter()
        .filter(|r| r.failed())
        .map(|r| format!("{} {}", r.instance, r.witness))
        .collect()
}

fn find(id: &str) -> Instance {
    library::builtin()
        .into_iter()
        .find(|i| i.id == id)
        .unwrap_or_else(|| panic!("missing {id}"))
}

fn zariski_suite() -> Outcome {
    let batch: Vec<Instance> = library::default_random(12345)
        .into_iter()
        .filter(|i| i.id.starts_with("rand-surf"))
        .collect();
    let start = Instant::now();
    let reports = run(&batch, CheckKind::Zariski);
    let elapsed = start.elapsed();
    let bad = failures(&reports);
    let passed = reports.iter().filter(|r| r.passed()).count();
    outcome(
        bad.is_empty() && passed >= 200 && elapsed < Duration::from_secs(60),
        format!(
            "{passed}/{} random psef divisors pass in {:.1}s {:?}",
            reports.len(),
            elapsed.as_secs_f64(),
            bad
        ),
    )
}

fn cross_model() -> Outcome {
    let mut compared = 0;
    let mut bad = Vec::new();
    let mut models = std::collections::BTreeSet::new();
    for inst in everything() {
        let Variety::Toric(x) = &inst.variety else { continue };
        if x.n != 2 || !toric::divisor::is_pseudoeffective(x, &inst.divisor) {
            continue;
        }
        let (sigma, _) = match toric::sigma_s_decomposition(x, &inst.divisor) {
            Ok(z) => z,
            Err(e) => {
                bad.push(format!("{}: {e}", inst.id));
                continue;
            }
        };
        let s = from_toric(x).unwrap();
        let surf = zariski_decompose(&s, &toric_class(x, &inst.divisor).unwrap(), DecompositionKind::Sigma).unwrap();
        compared += 1;
        models.insert(
            inst.id
                .trim_start_matches("rand-")
                .split('-')
                .nth(1)
                .unwrap_or_default()
                .to_string(),
        );
        let same = (0..x.num_rays()).all(|i| sigma.coeff_of(i) == surf.coeff_of(i))
            && toric_class(x, &sigma.positive).unwrap() == surf.positive;
        if !same {
            bad.push(inst.id.clone());
        }
    }
    let all_models = ["p2", "p1xp1", "f1", "f2"].iter().all(|m| models.contains(*m));
    outcome(
        bad.is_empty() && all_models,
        format!("{compared} shared instances over {models:?} {bad:?}"),
    )
}

fn width(p: &Polytope, axis: usize) -> Rational {
    let xs: Vec<&Rational> = p.vertices().iter().map(|v| &v[axis]).collect();
    xs.iter().copied().max().unwrap() - xs.iter().copied().min().unwrap()
}

fn body_identities() -> Outcome {
    let reports = run(&everything(), CheckKind::DimVol);
    let bad = failures(&reports);
    let passed = reports.iter().filter(|r| r.passed()).count();
    let s = sm::p1xp1();
    let d = qvec(&[1, 0]);
    let c = SurfFlag {
        curve: s.curve("f1+2f2").unwrap(),
    };
    let val = okounkov_polygon(&s, &d, c, BodyKind::Val).unwrap();
    let lim = okounkov_polygon(&s, &d, c, BodyKind::Lim).unwrap();
    let gap = (width(&val, 1), width(&lim, 1));
    let gap_ok = gap == (int(1), int(2))
        && reports
            .iter()
            .any(|r| r.instance == library::STRICT_GAP_ID && r.passed());
    outcome(
        bad.is_empty() && gap_ok,
        format!(
            "{passed}/{} dim/vol reports pass; strict-gap widths ({}, {}) {bad:?}",
            reports.len(),
            gap.0,
            gap.1
        ),
    )
}

fn slicing() -> Outcome {
    let reports = run(&everything(), CheckKind::Slicing);
    let bad = failures(&reports);
    let compared: Vec<&CheckReport> = reports
        .iter()
        .filter(|r| r.passed() && r.witness["compared"].as_u64().unwrap_or(0) > 0)
        .collect();
    let slices: u64 = compared.iter().map(|r| r.witness["compared"].as_u64().unwrap()).sum();
    let gated_slices: usize = reports
        .iter()
        .map(|r| r.witness["gated"].as_array().map_or(0, Vec::len))
        .sum();
    let gated_instances = reports.iter().filter(|r| matches!(r.status, Status::Gated(_))).count();
    outcome(
        bad.is_empty() && compared.len() >= 20,
        format!(
            "{} big instances, {slices} slices equal; gated: {gated_slices} slices, {gated_instances} instances {bad:?}",
            compared.len()
        ),
    )
}

fn limiting_limit() -> Outcome {
    let all = everything();
    let psef = all.iter().filter(|i| i.expected.psef != Some(false)).count();
    let reports = run(&all, CheckKind::LimitingLimit);
    let bad = failures(&reports);
    let passed = reports.iter().filter(|r| r.passed()).count();
    let gated = reports.len() - passed - bad.len();
    outcome(
        bad.is_empty() && gated == 0 && passed >= 200,
        format!(
            "{passed}/{} instances ({psef} psef in library), {gated} gated {bad:?}",
            reports.len()
        ),
    )
}

fn simplex() -> Outcome {
    let reports: Vec<CheckReport> = library::SIMPLEX_IDS
        .iter()
        .map(|id| run_check(&find(id), CheckKind::Simplex))
        .collect();
    let ok = reports.iter().all(CheckReport::passed);
    let suite = oklab::harness::run_suite(&library::builtin());
    let bodies: usize = suite.reports.iter().map(|r| r.vertex_counts.len()).sum();
    let max = suite
        .reports
        .iter()
        .flat_map(|r| r.vertex_counts.iter())
        .max()
        .copied()
        .unwrap_or(0);
    let finite = suite
        .reports
        .iter()
        .flat_map(|r| r.vertex_counts.iter())
        .all(|&n| n > 0);
    outcome(
        ok && finite,
        format!(
            "{:?}; {bodies} emitted bodies, all rational with ≤ {max} vertices",
            reports.iter().map(|r| r.status.clone()).collect::<Vec<_>>()
        ),
    )
}

fn ratio_at(x: &toric::ToricVariety, d: &[Rational], flag: OracleFlag, target: &Polytope, m: u32) -> (bool, Rational) {
    let cfg = SampleConfig {
        degrees: vec![m],
        ..SampleConfig::default()
    };
    let report = convergence_report(&sample_body(x, d, &flag, &cfg).unwrap(), target);
    (report.all_contained(), report.final_ratio())
}

fn oracle() -> Outcome {
    let start = Instant::now();
    let reports = run(&library::builtin(), CheckKind::Oracle);
    let elapsed = start.elapsed();
    let bad = failures(&reports);

    let p2 = tm::p2();
    let h = qvec(&[0, 0, 1]);
    let flag = InvariantFlag::new(&p2, vec![0, 1]).unwrap();
    let target = toric::okounkov_body(&p2, &h, &flag, BodyKind::Val).unwrap();
    let (c1, r1) = ratio_at(&p2, &h, OracleFlag::Invariant(flag), &target, 1);

    let f1_inst = find(library::ORACLE_F1_ID);
    let f1 = tm::hirzebruch(1);
    let mut f1_ratios = Vec::new();
    for f in &f1_inst.flags {
        let (oflag, target) = match f {
            FlagSpec::Invariant(o) => {
                let fl = InvariantFlag::new(&f1, o.clone()).unwrap();
                let t = toric::okounkov_body(&f1, &f1_inst.divisor, &fl, BodyKind::Val).unwrap();
                (OracleFlag::Invariant(fl), t)
            }
            FlagSpec::General { curve } => {
                let s = from_toric(&f1).unwrap();
                let c = s.curve(curve).unwrap();
                let t = okounkov_polygon(
                    &s,
                    &toric_class(&f1, &f1_inst.divisor).unwrap(),
                    SurfFlag { curve: c },
                    BodyKind::Big,
                )
                .unwrap();
                (OracleFlag::General { curve: c }, t)
            }
        };
        f1_ratios.push(ratio_at(&f1, &f1_inst.divisor, oflag, &target, 8));
    }
    let f1_ok = f1_ratios.iter().all(|(c, r)| *c && *r >= frac(19, 20));
    let min_f1 = f1_ratios.iter().map(|(_, r)| r.clone()).min().unwrap();
    outcome(
        bad.is_empty() && c1 && r1 == int(1) && f1_ok && elapsed < Duration::from_secs(120),
        format!(
            "P2/H ratio {r1} at m=1; F1 min ratio {} at m=8 over {} flags; {} oracle reports in {:.1}s {bad:?}",
            format(&min_f1),
            f1_ratios.len(),
            reports.len(),
            elapsed.as_secs_f64()
        ),
    )
}

fn converse() -> Outcome {
    let reports: Vec<CheckReport> = library::CONVERSE_IDS
        .iter()
        .map(|id| run_check(&find(id), CheckKind::Criteria))
        .collect();
    let bad = failures(&reports);
    let s = sm::bl1_p2();
    let e = SurfFlag {
        curve: s.curve("E").unwrap(),
    };
    let lim = okounkov_polygon(&s, &qvec(&[1, 1]), e, BodyKind::Lim).unwrap();
    let expected = Polytope::hull_in(2, &[qvec(&[1, 0]), qvec(&[2, 0]), qvec(&[2, 1])]);
    let converse_notes = reports
        .iter()
        .flat_map(|r| r.notes.iter())
        .filter(|n| n.starts_with("converse"))
        .count();
    outcome(
        bad.is_empty() && reports.iter().all(CheckReport::passed) && lim.equals(&expected) && converse_notes >= 3,
        format!(
            "{converse_notes} B- flags certified; Bl1P2 H+E, E-flag polygon (1,0),(2,0),(2,1): {}",
            lim.equals(&expected)
        ),
    )
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 8] = [
        ("zariski suite on random psef divisors", zariski_suite),
        ("toric and surface decompositions agree", cross_model),
        ("body dimension and volume identities", body_identities),
        ("slices equal restricted bodies", slicing),
        ("limiting bodies", limiting_limit),
        ("simplex shapes and finite vertex counts", simplex),
        ("oracle containment and convergence", oracle),
        ("converse criteria on B- flags", converse),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = f();
        if !o.ok {
            failed += 1;
        }
        println!(
            "criterion {}: {} - {name} ({:.1}s): {}",
            k + 1,
            if o.ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64(),
            o.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
