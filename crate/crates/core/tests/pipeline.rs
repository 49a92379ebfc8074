use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;

use pictor::dataset::{build_release, load_puzzle, meta_path, ImagePaths, Manifest, ReleaseConfig};
use pictor::harness::{assemble_track2, score_track1, score_track2, Track1Options, Track2Record};
use pictor::registry::{generate, list_tasks, release_params};
use pictor::scene::{decode_png, rasterize};
use pictor::{difficulty_axes, Difficulty, Domain, Error, ParamValue, TaskKind};

/// One puzzle per cell at 512 px, shared by the tests below.
fn release() -> &'static Path {
    static DIR: OnceLock<tempfile::TempDir> = OnceLock::new();
    DIR.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ReleaseConfig {
            puzzles_per_cell: 1,
            ..ReleaseConfig::desk()
        };
        build_release(&cfg, dir.path()).unwrap();
        dir
    })
    .path()
}

fn copy_tree(from: &Path, to: &Path) {
    fs::create_dir_all(to).unwrap();
    for e in fs::read_dir(from).unwrap() {
        let p = e.unwrap().path();
        let dest = to.join(p.file_name().unwrap());
        if p.is_dir() {
            copy_tree(&p, &dest);
        } else {
            fs::copy(&p, &dest).unwrap();
        }
    }
}

#[test]
fn registry_matches_the_task_table() {
    let tasks = list_tasks();
    assert_eq!(tasks.len(), 10);
    assert_eq!((tasks[0].name.as_str(), tasks[0].domain, tasks[0].binary), ("maze", Domain::Spatial, false));
    let axes: Vec<&str> = tasks[0].axes.iter().map(|a| a.axis.as_str()).collect();
    assert_eq!(axes, ["grid", "layers", "portals"]);
    assert_eq!((tasks[7].name.as_str(), tasks[7].domain, tasks[7].binary), ("unknot", Domain::Topology, true));
    assert_eq!(tasks.iter().filter(|t| t.binary).map(|t| t.id).collect::<Vec<_>>(), [7, 8]);

    let range = |t: TaskKind, axis: &str| difficulty_axes(t).into_iter().find(|a| a.axis == axis).map(|a| (a.min, a.max));
    assert_eq!(range(TaskKind::Maze, "grid"), Some((4.0, 128.0)));
    assert_eq!(range(TaskKind::Maze, "layers"), Some((1.0, 8.0)));
    assert_eq!(range(TaskKind::Maze, "portals"), Some((0.0, 20.0)));
    assert_eq!(range(TaskKind::CaForward, "grid"), Some((4.0, 64.0)));
    assert_eq!(range(TaskKind::LogicGrid, "grid"), Some((3.0, 8.0)));
    assert_eq!(range(TaskKind::LogicGrid, "constraints"), Some((4.0, 20.0)));
    assert_eq!(range(TaskKind::Unknot, "crossings"), Some((2.0, 15.0)));
}

#[test]
fn release_parameters() {
    let p = release_params(TaskKind::Maze, Difficulty::Easy);
    assert_eq!(p.get("grid"), Some(ParamValue::Int(8)));
    assert_eq!(p.get("layers"), Some(ParamValue::Int(1)));
    assert_eq!(p.get("portals"), Some(ParamValue::Int(0)));
    let p = release_params(TaskKind::GraphColoring, Difficulty::Hard);
    assert_eq!(p.get("k"), Some(ParamValue::Int(3)));
    assert_eq!(p.get("density"), Some(ParamValue::Frac(0.5)));
    let p = release_params(TaskKind::IsoReconstruction, Difficulty::Hard);
    assert_eq!(p.get("ambiguity"), Some(ParamValue::Int(2)));
}

#[test]
fn generation_is_deterministic_and_sound() {
    for t in TaskKind::ALL {
        let a = generate(t, Difficulty::Easy, 77).unwrap();
        let b = generate(t, Difficulty::Easy, 77).unwrap();
        assert_eq!(serde_json::to_string(&a.metadata()).unwrap(), serde_json::to_string(&b.metadata()).unwrap());
        assert_eq!(a.distractors.len(), 4);
        assert_eq!(rasterize(&a.puzzle, 512).unwrap(), rasterize(&b.puzzle, 512).unwrap());
        assert!(a.spec.verify(&rasterize(&a.solution, 512).unwrap()).passed, "{t}");
        for d in &a.distractors {
            assert!(!a.spec.verify(&rasterize(&d.scene, 512).unwrap()).passed, "{t} {}", d.violation);
        }
    }
}

#[test]
fn shipped_configs_match_the_profiles() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    assert_eq!(ReleaseConfig::load(&root.join("release.yaml")).unwrap(), ReleaseConfig::release());
    assert_eq!(ReleaseConfig::load(&root.join("desk.yaml")).unwrap(), ReleaseConfig::desk());
}

#[test]
fn layout_and_metadata_round_trip() {
    let root = release();
    let m = Manifest::load(root).unwrap();
    assert_eq!(m.puzzle_count, 30);
    assert_eq!(m.png_count, 180);
    let e = &m.puzzles[4];
    assert!(root.join(format!("{}/{}/512", e.task.dir_name(), e.difficulty)).is_dir());
    let (meta, images) = load_puzzle(root, e.task, e.difficulty, e.seed).unwrap();
    assert_eq!(meta.seed, e.seed);
    assert_eq!(meta.violations.len(), 4);
    assert_eq!(images.keys().copied().collect::<Vec<_>>(), [512]);
    let img = decode_png(&fs::read(&images[&512].solution).unwrap()).unwrap();
    assert!(meta.spec.verify(&img).passed);
}

#[test]
fn tampered_metadata_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    copy_tree(release(), dir.path());
    let m = Manifest::load(dir.path()).unwrap();
    let e = &m.puzzles[0];
    let path = dir.path().join(meta_path(e.task, e.difficulty, e.seed));
    let text = fs::read_to_string(&path).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    doc["seed"] = serde_json::Value::from(e.seed + 1);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert!(matches!(load_puzzle(dir.path(), e.task, e.difficulty, e.seed), Err(Error::Validation(_))));

    doc["seed"] = serde_json::Value::from(e.seed);
    doc["spec"]["solution"] = serde_json::Value::Array(vec![]);
    fs::write(&path, serde_json::to_string(&doc).unwrap()).unwrap();
    assert!(load_puzzle(dir.path(), e.task, e.difficulty, e.seed).is_err());
}

#[test]
fn missing_cell_directory_is_an_error() {
    let err = load_puzzle(release(), TaskKind::Maze, Difficulty::Hard, 1).unwrap_err();
    assert!(matches!(err, Error::Io { .. }), "{err}");
    let dir = tempfile::tempdir().unwrap();
    assert!(load_puzzle(dir.path(), TaskKind::Maze, Difficulty::Easy, 1).is_err());
}

fn submit(root: &Path, sub: &Path, pick: impl Fn(&ImagePaths) -> std::path::PathBuf) {
    for e in Manifest::load(root).unwrap().puzzles {
        let paths = ImagePaths::new(e.task, e.difficulty, 512, e.seed);
        fs::copy(root.join(pick(&paths)), sub.join(format!("{}_{}_{}.png", e.task, e.difficulty, e.seed))).unwrap();
    }
}

#[test]
fn track1_oracle_distractor_and_empty_submissions() {
    let root = release();
    let opts = Track1Options { skip_unparseable: false };
    let oracle = tempfile::tempdir().unwrap();
    submit(root, oracle.path(), |p| p.solution.clone());
    let f = score_track1(root, oracle.path(), opts).unwrap();
    assert!(f.records.iter().all(|r| r.passed));

    let wrong = tempfile::tempdir().unwrap();
    submit(root, wrong.path(), |p| p.distractors[2].clone());
    let f = score_track1(root, wrong.path(), opts).unwrap();
    assert!(f.records.iter().all(|r| !r.passed));

    let empty = tempfile::tempdir().unwrap();
    let f = score_track1(root, empty.path(), opts).unwrap();
    assert_eq!(f.records.len(), 30);
    assert!(f.records.iter().all(|r| !r.passed && r.reason == "missing"));
}

#[test]
fn track1_rejects_undecodable_files() {
    let root = release();
    let sub = tempfile::tempdir().unwrap();
    submit(root, sub.path(), |p| p.solution.clone());
    let names: Vec<_> = fs::read_dir(sub.path()).unwrap().map(|e| e.unwrap().path()).collect();
    fs::write(&names[0], b"not a png").unwrap();
    let f = score_track1(root, sub.path(), Track1Options { skip_unparseable: true }).unwrap();
    assert_eq!(f.records.iter().filter(|r| !r.passed).count(), 1);
    assert!(!f.count_unparseable);
}

#[test]
fn track2_orderings_and_key_statistics() {
    let root = release();
    let a = assemble_track2(root, 3, None).unwrap();
    assert_eq!(a, assemble_track2(root, 3, None).unwrap());
    assert_ne!(a.key, assemble_track2(root, 4, None).unwrap().key);
    for (item, e) in a.items.iter().zip(&a.key.entries) {
        let mut c = item.candidates.clone();
        c.sort();
        c.dedup();
        assert_eq!(c.len(), 5);
        assert!(item.candidates[e.correct_index].to_string_lossy().ends_with("_solution.png"));
        assert_eq!(e.violations.iter().filter(|v| v.is_none()).count(), 1);
    }

    // all-zeros selector scores the share of keys whose answer sits at 0
    let zeros: Vec<Track2Record> = a
        .key
        .entries
        .iter()
        .map(|e| Track2Record {
            puzzle_id: e.puzzle_id.clone(),
            task: e.task,
            difficulty: e.difficulty,
            correct_index: e.correct_index,
            selected_index: 0,
        })
        .collect();
    let f = score_track2(&a.key, &zeros).unwrap();
    let at_zero = a.key.entries.iter().filter(|e| e.correct_index == 0).count();
    assert_eq!(f.records.iter().filter(|r| r.correct).count(), at_zero);
}

#[test]
fn correct_index_is_uniform_over_a_full_release_key() {
    // same shuffle as assemble_track2, over the 6000 release seeds
    let mut hist = BTreeMap::new();
    for (_, _, _, seed) in ReleaseConfig::release().puzzles() {
        let order = pictor::harness::candidate_order(pictor::harness::default_shuffle_seed(42), seed);
        *hist.entry(order.iter().position(|&s| s == 0).unwrap()).or_insert(0usize) += 1;
    }
    let expected = 6000.0 / 5.0;
    let chi2: f64 = hist.values().map(|&o| (o as f64 - expected).powi(2) / expected).sum();
    // 4 degrees of freedom, p = 0.001
    assert!(chi2 < 18.47, "chi2 {chi2} {hist:?}");
}

#[test]
fn schemas_parse_and_name_the_submission_fields() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../schemas");
    for name in ["track2_submission", "answer_key", "fragment", "report"] {
        let text = fs::read_to_string(dir.join(format!("{name}.schema.json"))).unwrap();
        let _: serde_json::Value = serde_json::from_str(&text).unwrap();
    }
    let sub: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("track2_submission.schema.json")).unwrap()).unwrap();
    let rec = Track2Record {
        puzzle_id: "maze_easy_1".into(),
        task: TaskKind::Maze,
        difficulty: Difficulty::Easy,
        correct_index: 0,
        selected_index: 0,
    };
    let v = serde_json::to_value(&rec).unwrap();
    let mut keys: Vec<&str> = v.as_object().unwrap().keys().map(|k| k.as_str()).collect();
    let mut required: Vec<&str> = sub["items"]["required"].as_array().unwrap().iter().map(|k| k.as_str().unwrap()).collect();
    keys.sort();
    required.sort();
    assert_eq!(keys, required);
}
