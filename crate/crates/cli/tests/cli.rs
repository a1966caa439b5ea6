use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use oklab::exactgeom::rational::qvec;
use oklab::exactgeom::Polytope;
use oklab::io::polytope_from_json;
use serde_json::{json, Value};
use tempfile::TempDir;

fn oklab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oklab"))
        .args(args)
        .env_remove("OKLAB_DATA")
        .output()
        .unwrap()
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/instances")
        .join(name)
}

fn write_job(dir: &TempDir, name: &str, v: &Value) -> String {
    let p = dir.path().join(name);
    fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn p2_job(dir: &TempDir) -> String {
    write_job(
        dir,
        "p2.json",
        &json!({
            "variety": {"type": "toric", "rays": [[1, 0], [0, 1], [-1, -1]], "max_cones": [[0, 1], [1, 2], [0, 2]]},
            "divisor": {"coeffs": ["0", "0", "1"]},
            "flags": [{"cone": [0, 1]}],
        }),
    )
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn body_of_p2_hyperplane() {
    let dir = TempDir::new().unwrap();
    let job = p2_job(&dir);
    let out = dir.path().join("body.json");
    let o = oklab(&[
        "--task",
        "body",
        "--input",
        &job,
        "--kind",
        "big",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    let p = polytope_from_json(&v).unwrap();
    let simplex = Polytope::hull(&[qvec(&[0, 0]), qvec(&[1, 0]), qvec(&[0, 1])]);
    assert!(p.equals(&simplex));
    let svg = fs::read_to_string(out.with_extension("svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.contains("<path"));
}

#[test]
fn outputs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let job = p2_job(&dir);
    let run = |tag: &str| {
        let out = dir.path().join(format!("{tag}.json"));
        let svg = dir.path().join(format!("{tag}.svg"));
        let o = oklab(&[
            "--task",
            "body",
            "--input",
            &job,
            "--out",
            out.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert!(o.status.success());
        (fs::read(out).unwrap(), fs::read(svg).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn decompose_blowup_of_plane() {
    let o = oklab(&[
        "--task",
        "decompose",
        "--input",
        data("surf-bl1p2-H_E.json").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!(v["P"], json!(["1", "0"]));
    assert_eq!(v["N"], json!([{"curve": "E", "coeff": "1"}]));
}

#[test]
fn surface_body_by_curve_name() {
    let o = oklab(&[
        "--task",
        "body",
        "--input",
        data("surf-bl1p2-H_E.json").to_str().unwrap(),
        "--kind",
        "lim",
        "--flag",
        "E",
    ]);
    assert!(o.status.success());
    let p = polytope_from_json(&stdout_json(&o)).unwrap();
    assert!(p.equals(&Polytope::hull(&[qvec(&[1, 0]), qvec(&[2, 0]), qvec(&[2, 1])])));
}

#[test]
fn extrapolated_limit_matches_closed_form() {
    let input = data("surf-p1xp1-f1.json");
    let body = |extra: &[&str]| {
        let mut args = vec![
            "--task",
            "body",
            "--input",
            input.to_str().unwrap(),
            "--kind",
            "lim",
            "--flag",
            "f1+2f2",
        ];
        args.extend_from_slice(extra);
        let o = oklab(&args);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        polytope_from_json(&stdout_json(&o)).unwrap()
    };
    assert!(body(&[]).equals(&body(&["--epsilon-schedule", "1/3:20"])));
}

#[test]
fn classify_and_invariants() {
    let o = oklab(&[
        "--task",
        "classify",
        "--input",
        data("toric-f2-B.json").to_str().unwrap(),
    ]);
    let v = stdout_json(&o);
    assert_eq!((v["big"].clone(), v["kappa"].clone()), (json!(false), json!("0")));
    let o = oklab(&[
        "--task",
        "invariants",
        "--input",
        data("surf-p1xp1-f1.json").to_str().unwrap(),
    ]);
    let v = stdout_json(&o);
    assert_eq!(
        v["restricted_volumes"]["f1+2f2"],
        json!({"restricted": "1", "augmented_restricted": "2"})
    );
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write_job(&dir, "bad.json", &json!({"variety": {"type": "cube"}, "divisor": []}));
    assert_eq!(oklab(&["--task", "classify", "--input", &bad]).status.code(), Some(2));
    let job = p2_job(&dir);
    assert_eq!(
        oklab(&["--task", "body", "--input", &job, "--epsilon-schedule", "2:9"])
            .status
            .code(),
        Some(2)
    );
    let not_big = data("toric-f1-E.json");
    assert_eq!(
        oklab(&["--task", "body", "--input", not_big.to_str().unwrap(), "--kind", "big"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(oklab(&["--task", "body"]).status.code(), Some(2));
}

#[test]
fn sample_is_seeded() {
    let dir = TempDir::new().unwrap();
    let job = p2_job(&dir);
    let a = oklab(&["--task", "sample", "--input", &job, "--seed", "12345"]);
    let b = oklab(&["--task", "sample", "--input", &job, "--seed", "12345"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["levels"][0]["ratio"], json!("1"));
}

#[test]
fn check_task_over_a_directory() {
    let dir = TempDir::new().unwrap();
    for name in ["toric-p2-H.json", "surf-bl1p2-H_E.json"] {
        fs::copy(data(name), dir.path().join(name)).unwrap();
    }
    let lib = dir.path().to_str().unwrap();
    let o = oklab(&["--task", "check", "--input", lib, "--kind", "zariski"]);
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!((v["pass"].clone(), v["fail"].clone()), (json!(2), json!(0)));

    // a wrong tag must surface as a failure
    let mut broken: Value = serde_json::from_str(&fs::read_to_string(data("toric-p2-H.json")).unwrap()).unwrap();
    broken["id"] = json!("broken");
    broken["expected"]["big"] = json!(false);
    write_job(&dir, "broken.json", &broken);
    let o = oklab(&["--task", "check", "--input", lib, "--kind", "zariski"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn check_reads_library_from_env() {
    let dir = TempDir::new().unwrap();
    fs::copy(data("toric-f1-E.json"), dir.path().join("a.json")).unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_oklab"))
        .args(["--task", "check", "--kind", "slicing"])
        .env("OKLAB_DATA", dir.path())
        .output()
        .unwrap();
    assert!(o.status.success());
    let v = stdout_json(&o);
    assert_eq!((v["pass"].clone(), v["gated"].clone()), (json!(0), json!(1)));
}

#[test]
fn render_segment() {
    let dir = TempDir::new().unwrap();
    let poly = write_job(&dir, "seg.json", &json!({"vertices": [["0", "0"], ["0", "2"]]}));
    let o = oklab(&["--task", "render", "--input", &poly]);
    assert!(o.status.success());
    let svg = String::from_utf8(o.stdout).unwrap();
    assert!(svg.contains("<line") && svg.contains("(0, 2)"));
}
