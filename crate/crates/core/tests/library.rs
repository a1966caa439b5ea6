use std::path::PathBuf;

use oklab::harness::{instance_from_json, instance_to_json, library, run_check, CheckKind, Status};

fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/instances")
}

#[test]
#[ignore = "rewrites data/instances"]
fn regenerate_data() {
    let dir = data_dir();
    if dir.exists() {
        std::fs::remove_dir_all(&dir).unwrap();
    }
    library::export_library(&dir, &library::builtin()).unwrap();
}

#[test]
fn shipped_library_matches_builtin() {
    let loaded = library::load_library(&data_dir()).unwrap();
    let mut builtin = library::builtin();
    builtin.sort_by(|a, b| a.id.cmp(&b.id));
    assert_eq!(loaded, builtin);
}

#[test]
fn instances_round_trip() {
    for inst in library::builtin().iter().chain(&library::random_instances(7, 3, 1)) {
        let back = instance_from_json(&instance_to_json(inst)).unwrap();
        assert_eq!(&back, inst);
    }
}

#[test]
fn random_batch_is_seeded() {
    assert_eq!(
        library::random_instances(12345, 5, 2),
        library::random_instances(12345, 5, 2)
    );
    assert_ne!(library::random_instances(1, 5, 0), library::random_instances(2, 5, 0));
}

#[test]
fn library_covers_required_models() {
    let all = library::builtin();
    let ids: Vec<&str> = all.iter().map(|i| i.id.as_str()).collect();
    for prefix in [
        "toric-p2",
        "toric-p1xp1",
        "toric-f1",
        "toric-f2",
        "toric-p3",
        "toric-blp3",
        "surf-bl1p2",
        "surf-p1xp1",
        "surf-f2",
    ] {
        assert!(ids.iter().any(|id| id.starts_with(prefix)), "{prefix}");
    }
    let surf = library::default_random(12345)
        .iter()
        .filter(|i| i.id.starts_with("rand-surf"))
        .count();
    assert!(surf >= 200);
}

#[test]
fn bad_instance_is_a_schema_error() {
    let v = serde_json::json!({"id": "x", "variety": {"type": "blob"}, "divisor": []});
    assert!(matches!(instance_from_json(&v), Err(oklab::Error::Schema(_))));
}

#[test]
fn wrong_expected_tag_fails_with_witness() {
    let mut inst = library::builtin().into_iter().find(|i| i.id == "toric-p2-H").unwrap();
    inst.expected.big = Some(false);
    let r = run_check(&inst, CheckKind::Zariski);
    assert_eq!(r.status, Status::Fail);
    assert!(!r.witness.is_null());
}

#[test]
fn non_big_slicing_is_gated_not_passed() {
    let inst = library::builtin().into_iter().find(|i| i.id == "toric-f1-E").unwrap();
    let r = run_check(&inst, CheckKind::Slicing);
    assert!(matches!(r.status, Status::Gated(_)));
    assert!(!r.passed());
}
