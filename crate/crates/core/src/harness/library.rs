//! Curated and seeded-random instances, plus JSON import/export.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{instance_from_json, instance_to_json, CheckKind, Expected, Instance};
use crate::dimension::Dimension;
use crate::error::{Error, Result};
use crate::exactgeom::rational::{frac, int, qvec, QVector};
use crate::io::{read_json, FlagSpec, Variety};
use crate::surface::model::{self as sm, LatticeSurface};
use crate::toric::divisor::{classify, iitaka_dim};
use crate::toric::fan::ToricVariety;
use crate::toric::models as tm;

use CheckKind::*;

const TORIC_CHECKS: &[CheckKind] = &[Slicing, DimVol, PositivePart, Zariski, LimitingLimit];
const SURFACE_CHECKS: &[CheckKind] = &[Slicing, DimVol, Criteria, PositivePart, Zariski, LimitingLimit];

/// Ids of the three simplex instances.
pub const SIMPLEX_IDS: [&str; 3] = ["surf-p2-H", "surf-p1xp1-f1+f2", "surf-p1xp1-f1"];
/// Ids of the curated converse-criterion instances.
pub const CONVERSE_IDS: [&str; 3] = ["surf-bl1p2-H+E", "surf-bl1p2-E", "surf-f2-B+F"];
pub const STRICT_GAP_ID: &str = "surf-p1xp1-f1";
pub const ORACLE_F1_ID: &str = "toric-f1-H+F";
pub const ORACLE_P2_ID: &str = "toric-p2-H";

fn toric(x: &ToricVariety) -> Variety {
    Variety::Toric(x.clone())
}

fn surface(s: &LatticeSurface) -> Variety {
    Variety::Surface(s.clone())
}

fn general(name: &str) -> FlagSpec {
    FlagSpec::General { curve: name.into() }
}

/// One flag per maximal cone, rays in increasing order.
fn cone_flags(x: &ToricVariety) -> Vec<FlagSpec> {
    x.max_cones.iter().map(|c| FlagSpec::Invariant(c.clone())).collect()
}

fn all_curves(s: &LatticeSurface) -> Vec<FlagSpec> {
    s.curves.iter().map(|c| general(&c.name)).collect()
}

fn expect(inst: Instance, psef: bool, big: bool, kappa: Option<usize>, kappa_nu: Option<usize>) -> Instance {
    let dim = |k: Option<usize>| Some(k.map_or(Dimension::NegInfinity, Dimension::Finite));
    Instance {
        expected: Expected {
            psef: Some(psef),
            big: Some(big),
            kappa: if psef { dim(kappa) } else { None },
            kappa_nu: if psef { dim(kappa_nu) } else { None },
        },
        ..inst
    }
}

fn toric_instance(id: &str, x: &ToricVariety, d: &[i64], checks: &[CheckKind]) -> Instance {
    let mut inst = Instance::new(id, toric(x), qvec(d)).checks(checks);
    inst.flags = cone_flags(x);
    inst
}

fn surface_instance(id: &str, s: &LatticeSurface, d: QVector, checks: &[CheckKind]) -> Instance {
    let mut inst = Instance::new(id, surface(s), d).checks(checks);
    inst.flags = all_curves(s);
    inst
}

fn with_oracle(mut inst: Instance) -> Instance {
    inst.checks.push(Oracle);
    inst
}

fn curated_toric() -> Vec<Instance> {
    let p2 = tm::p2();
    let p1p1 = tm::p1xp1();
    let f1 = tm::hirzebruch(1);
    let f2 = tm::hirzebruch(2);
    let p3 = tm::p3();
    let blp3 = tm::bl_p3();
    let mut out = vec![
        expect(
            with_oracle(toric_instance(ORACLE_P2_ID, &p2, &[0, 0, 1], TORIC_CHECKS)),
            true,
            true,
            Some(2),
            Some(2),
        )
        .note("hyperplane class; the body is the unit simplex"),
        expect(
            toric_instance("toric-p2-2H", &p2, &[1, 1, 0], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            toric_instance("toric-p1xp1-f1+f2", &p1p1, &[1, 1, 0, 0], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            toric_instance("toric-p1xp1-f1", &p1p1, &[1, 0, 0, 0], TORIC_CHECKS),
            true,
            false,
            Some(1),
            Some(1),
        )
        .note("pullback from a ruling"),
        expect(
            toric_instance("toric-p1xp1-2f1+3f2", &p1p1, &[0, 1, 2, 2], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            toric_instance("toric-f1-2E+H", &f1, &[0, 2, 0, 1], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        )
        .note("the (-1)-curve is in the negative part"),
        expect(
            toric_instance("toric-f1-E", &f1, &[0, 1, 0, 0], TORIC_CHECKS),
            true,
            false,
            Some(0),
            Some(0),
        ),
        expect(
            toric_instance("toric-f1-F", &f1, &[1, 0, 0, 0], TORIC_CHECKS),
            true,
            false,
            Some(1),
            Some(1),
        ),
        expect(
            toric_instance("toric-f2-B+F", &f2, &[1, 1, 0, 0], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        )
        .note("N = B/2"),
        expect(
            toric_instance("toric-f2-B+2F", &f2, &[1, 1, 1, 0], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        )
        .note("nef, contracts B"),
        expect(
            toric_instance("toric-f2-B", &f2, &[0, 1, 0, 0], TORIC_CHECKS),
            true,
            false,
            Some(0),
            Some(0),
        ),
        expect(
            toric_instance("toric-f2-3B+4F", &f2, &[2, 3, 2, 0], TORIC_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            toric_instance("toric-p3-H", &p3, &[0, 0, 0, 1], TORIC_CHECKS),
            true,
            true,
            Some(3),
            Some(3),
        ),
        expect(
            toric_instance("toric-p3-2H", &p3, &[1, 0, 0, 1], TORIC_CHECKS),
            true,
            true,
            Some(3),
            Some(3),
        ),
        expect(
            toric_instance("toric-blp3-H", &blp3, &[0, 0, 0, 1, 0], TORIC_CHECKS),
            true,
            true,
            Some(3),
            Some(3),
        )
        .note("pullback of a plane; the exceptional divisor is in the augmented base locus"),
        expect(
            toric_instance("toric-blp3-2H-E", &blp3, &[0, 0, 0, 2, -1], TORIC_CHECKS),
            true,
            true,
            Some(3),
            Some(3),
        ),
        expect(
            toric_instance("toric-blp3-H+E", &blp3, &[0, 0, 0, 1, 1], TORIC_CHECKS),
            true,
            true,
            Some(3),
            Some(3),
        ),
        expect(
            toric_instance("toric-blp3-E", &blp3, &[0, 0, 0, 0, 1], TORIC_CHECKS),
            true,
            false,
            Some(0),
            Some(0),
        ),
    ];

    let mut f1_big = toric_instance(ORACLE_F1_ID, &f1, &[1, 0, 0, 1], TORIC_CHECKS);
    f1_big.flags.push(general("D3"));
    f1_big.flags.push(general("D0"));
    out.push(expect(with_oracle(f1_big), true, true, Some(2), Some(2)).note("ample on F1"));

    let mut p1p1_oracle = toric_instance("toric-p1xp1-oracle", &p1p1, &[1, 1, 0, 0], &[LimitingLimit, Oracle]);
    p1p1_oracle.flags.push(general("D0"));
    out.push(p1p1_oracle);

    let mut bir = toric_instance("toric-p2-H-blowup", &p2, &[0, 0, 1], &[LimitingLimit, Birational]);
    bir.params.blowup_cone = Some(vec![0, 1]);
    out.push(bir.note("P2 blown up to F1 at the fixed point of cone {0,1}"));
    out
}

fn curated_surface() -> Vec<Instance> {
    let bl = sm::bl1_p2();
    let pp = sm::p1xp1();
    let f2 = sm::f2();
    let p2 = sm::p2();
    let mut out = vec![
        expect(
            surface_instance("surf-bl1p2-H+E", &bl, qvec(&[1, 1]), SURFACE_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        )
        .note("E is in the restricted base locus; the E-flag body is (1,0),(2,0),(2,1)"),
        expect(
            surface_instance("surf-bl1p2-E", &bl, qvec(&[0, 1]), SURFACE_CHECKS),
            true,
            false,
            Some(0),
            Some(0),
        )
        .note("rigid exceptional curve"),
        expect(
            surface_instance("surf-bl1p2-H", &bl, qvec(&[1, 0]), SURFACE_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            surface_instance("surf-bl1p2-H-E", &bl, qvec(&[1, -1]), SURFACE_CHECKS),
            true,
            false,
            Some(1),
            Some(1),
        )
        .note("the pencil of lines through the point"),
        expect(
            surface_instance("surf-bl1p2-2H-E/2", &bl, vec![int(2), frac(-1, 2)], SURFACE_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            surface_instance("surf-p1xp1-2f1+f2", &pp, qvec(&[2, 1]), SURFACE_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
        expect(
            surface_instance("surf-f2-B+F", &f2, qvec(&[1, 1]), SURFACE_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        )
        .note("N = B/2; the B-flag meets the restricted base locus"),
        expect(
            surface_instance("surf-f2-B", &f2, qvec(&[1, 0]), SURFACE_CHECKS),
            true,
            false,
            Some(0),
            Some(0),
        ),
        expect(
            surface_instance("surf-f2-F", &f2, qvec(&[0, 1]), SURFACE_CHECKS),
            true,
            false,
            Some(1),
            Some(1),
        ),
        expect(
            surface_instance("surf-f2-B+3F", &f2, qvec(&[1, 3]), SURFACE_CHECKS),
            true,
            true,
            Some(2),
            Some(2),
        ),
    ];

    let simplex: Vec<CheckKind> = [SURFACE_CHECKS, &[Simplex]].concat();
    let mut p2h = surface_instance("surf-p2-H", &p2, qvec(&[1]), &simplex);
    let partner = surface_instance("surf-bl1p2-H-partner", &bl, qvec(&[1, 0]), &[]);
    p2h.checks.push(Birational);
    p2h.params.partner = Some(Box::new(Instance {
        flags: vec![general("H")],
        ..partner.clone()
    }));
    p2h.params.exceptional = Some("E".into());
    out.push(
        expect(p2h, true, true, Some(2), Some(2))
            .note("the line class; the blow-up partner keeps the flag away from E"),
    );

    let mut gated_pair = Instance::new("surf-p2-H-vs-H-E", surface(&p2), qvec(&[1])).checks(&[LimitingLimit, Birational]);
    gated_pair.flags = vec![general("H")];
    gated_pair.params.partner = Some(Box::new(Instance {
        flags: vec![general("H-E")],
        ..partner
    }));
    gated_pair.params.exceptional = Some("E".into());
    out.push(gated_pair.note("strict transform of a line through the center; gated"));

    let mut ff = surface_instance("surf-p1xp1-f1+f2", &pp, qvec(&[1, 1]), &simplex);
    ff.flags = vec![general("f1+f2"), general("f1"), general("f2")];
    out.push(expect(ff, true, true, Some(2), Some(2)));

    let mut f1 = surface_instance(STRICT_GAP_ID, &pp, qvec(&[1, 0]), &simplex);
    f1.flags = vec![general("f2"), general("f1+2f2"), general("f1")];
    f1.params.ample = Some(qvec(&[1, 1]));
    f1.params.second_ample = Some(qvec(&[2, 1]));
    out.push(
        expect(f1, true, false, Some(1), Some(1))
            .note("the f1+2f2 flag has restricted volume 1 and augmented restricted volume 2"),
    );
    out
}

/// The hand-built library.
pub fn builtin() -> Vec<Instance> {
    let mut out = curated_toric();
    out.extend(curated_surface());
    out
}

fn random_class(rng: &mut ChaCha8Rng, s: &LatticeSurface) -> QVector {
    // nonnegative combination of the effective generators, occasionally
    // with half-integral weights
    let mut d = vec![int(0); s.rank];
    for g in &s.effective_generators {
        let num: i64 = rng.gen_range(0..=4);
        let den: i64 = if rng.gen_bool(0.25) { 2 } else { 1 };
        for (x, y) in d.iter_mut().zip(g) {
            *x += frac(num, den) * y;
        }
    }
    d
}

/// Seeded random psef divisors: `per_surface` on each of the three
/// lattice-surface models and `per_toric` on each toric variety.
pub fn random_instances(seed: u64, per_surface: usize, per_toric: usize) -> Vec<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    let surfaces = [("bl1p2", sm::bl1_p2()), ("p1xp1", sm::p1xp1()), ("f2", sm::f2())];
    for (name, s) in &surfaces {
        let mut k = 0;
        while k < per_surface {
            let d = random_class(&mut rng, s);
            if d.iter().all(|x| *x == int(0)) {
                continue;
            }
            let id = format!("rand-surf-{name}-{k:03}");
            out.push(
                surface_instance(&id, s, d, &[DimVol, Criteria, PositivePart, Zariski, LimitingLimit])
                    .note(format!("seed {seed}")),
            );
            k += 1;
        }
    }
    let varieties = [
        ("p2", tm::p2()),
        ("p1xp1", tm::p1xp1()),
        ("f1", tm::hirzebruch(1)),
        ("f2", tm::hirzebruch(2)),
        ("p3", tm::p3()),
        ("blp3", tm::bl_p3()),
    ];
    for (name, x) in &varieties {
        let mut k = 0;
        let mut tries = 0;
        while k < per_toric && tries < 50 * per_toric.max(1) {
            tries += 1;
            let d: Vec<i64> = (0..x.num_rays()).map(|_| rng.gen_range(-1..=2)).collect();
            let q = qvec(&d);
            let Ok(class) = classify(x, &q) else { continue };
            if !class.pseudoeffective {
                continue;
            }
            let mut checks = vec![DimVol, PositivePart, Zariski, LimitingLimit];
            if class.big {
                checks.insert(0, Slicing);
            }
            let kappa = iitaka_dim(x, &q).ok().and_then(Dimension::finite);
            let id = format!("rand-toric-{name}-{k:03}");
            out.push(
                expect(toric_instance(&id, x, &d, &checks), true, class.big, kappa, kappa).note(format!("seed {seed}")),
            );
            k += 1;
        }
    }
    out
}

/// Default random batch used by the suite and the CLI.
pub fn default_random(seed: u64) -> Vec<Instance> {
    random_instances(seed, 70, 6)
}

fn file_name(id: &str) -> String {
    let safe: String = id
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '-' || c == '_' {
                c
            } else {
                '_'
            }
        })
        .collect();
    format!("{safe}.json")
}

pub fn export_library(dir: &Path, instances: &[Instance]) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(e.to_string()))?;
    for inst in instances {
        let text = serde_json::to_string_pretty(&instance_to_json(inst)).expect("json value");
        fs::write(dir.join(file_name(&inst.id)), text + "\n").map_err(|e| Error::Io(e.to_string()))?;
    }
    Ok(())
}

/// Every `*.json` instance file in `dir`, sorted by id.
pub fn load_library(dir: &Path) -> Result<Vec<Instance>> {
    let entries = fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut out = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::Io(e.to_string()))?.path();
        if path.extension().is_some_and(|e| e == "json") {
            out.push(instance_from_json(&read_json(&path)?)?);
        }
    }
    out.sort_by(|a, b| a.id.cmp(&b.id));
    Ok(out)
}
