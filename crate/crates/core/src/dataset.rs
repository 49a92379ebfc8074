//! Release assembly.
//!
//! Layout under the output root:
//!
//! ```text
//! config.yaml
//! manifest.json
//! task_NN_name/difficulty/{seed}_meta.json
//! task_NN_name/difficulty/{resolution}/{seed}_puzzle.png
//! task_NN_name/difficulty/{resolution}/{seed}_solution.png
//! task_NN_name/difficulty/{resolution}/{seed}_distractor_{i}.png
//! ```

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::registry::{generate_with_params, release_params, validate_params, PuzzleInstance, PuzzleMetadata};
use crate::scene::{encode_png, rasterize, CANONICAL_RESOLUTIONS};
use crate::seed::{derive_seed, DEFAULT_GLOBAL_SEED};
use crate::types::{Difficulty, Params, TaskKind};

pub const MANIFEST: &str = "manifest.json";
pub const CONFIG: &str = "config.yaml";
pub const NAMING: &str = "task_NN_name/difficulty/resolution/{seed}_{puzzle|solution|distractor_i}.png; \
                          metadata at task_NN_name/difficulty/{seed}_meta.json; \
                          seed = derive_seed(global_seed, task, difficulty, index)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReleaseConfig {
    pub global_seed: u64,
    pub puzzles_per_cell: u32,
    pub resolutions: Vec<u32>,
    /// Task name → difficulty → params.
    pub tasks: BTreeMap<TaskKind, BTreeMap<Difficulty, Params>>,
}

impl ReleaseConfig {
    /// Canonical profile: 200 puzzles per cell at every resolution.
    pub fn release() -> Self {
        Self {
            global_seed: DEFAULT_GLOBAL_SEED,
            puzzles_per_cell: 200,
            resolutions: CANONICAL_RESOLUTIONS.to_vec(),
            tasks: TaskKind::ALL
                .into_iter()
                .map(|t| (t, Difficulty::ALL.into_iter().map(|d| (d, release_params(t, d))).collect()))
                .collect(),
        }
    }

    /// Small profile for local checks: 5 puzzles per cell at 512 px.
    pub fn desk() -> Self {
        Self {
            puzzles_per_cell: 5,
            resolutions: vec![512],
            ..Self::release()
        }
    }

    pub fn from_yaml(text: &str) -> Result<Self> {
        let cfg: Self = serde_yaml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_yaml(&fs::read_to_string(path).map_err(|e| Error::io(path, e))?)
    }

    pub fn to_yaml(&self) -> Result<String> {
        Ok(serde_yaml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolutions.is_empty() {
            return Err(Error::Validation("no resolutions".into()));
        }
        for &r in &self.resolutions {
            if !CANONICAL_RESOLUTIONS.contains(&r) {
                return Err(Error::Resolution(r));
            }
        }
        for (task, cells) in &self.tasks {
            for params in cells.values() {
                validate_params(*task, params)?;
            }
        }
        Ok(())
    }

    /// Every `(task, difficulty, index, seed)` cell, in registry order.
    pub fn puzzles(&self) -> Vec<(TaskKind, Difficulty, u32, u64)> {
        let mut out = Vec::new();
        for (&task, cells) in &self.tasks {
            for &difficulty in cells.keys() {
                for i in 0..self.puzzles_per_cell {
                    out.push((task, difficulty, i, derive_seed(self.global_seed, task, difficulty, i)));
                }
            }
        }
        out
    }

    pub fn puzzle_count(&self) -> usize {
        self.tasks.values().map(BTreeMap::len).sum::<usize>() * self.puzzles_per_cell as usize
    }

    /// One puzzle, one solution and four distractors per resolution.
    pub fn png_count(&self) -> usize {
        6 * self.puzzle_count() * self.resolutions.len()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PuzzleEntry {
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub index: u32,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub naming: String,
    pub global_seed: u64,
    pub puzzles_per_cell: u32,
    pub resolutions: Vec<u32>,
    pub puzzle_count: usize,
    pub png_count: usize,
    pub puzzles: Vec<PuzzleEntry>,
    /// Relative path → sha256 of every file except the manifest itself.
    pub files: BTreeMap<String, String>,
    /// sha256 over the sorted `path digest` lines.
    pub digest: String,
}

impl Manifest {
    pub fn load(root: &Path) -> Result<Self> {
        let path = root.join(MANIFEST);
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn digest_of(files: &BTreeMap<String, String>) -> String {
    let mut h = Sha256::new();
    for (path, d) in files {
        h.update(path.as_bytes());
        h.update(b" ");
        h.update(d.as_bytes());
        h.update(b"\n");
    }
    hex::encode(h.finalize())
}

pub fn cell_dir(task: TaskKind, difficulty: Difficulty) -> PathBuf {
    PathBuf::from(task.dir_name()).join(difficulty.as_str())
}

pub fn meta_path(task: TaskKind, difficulty: Difficulty, seed: u64) -> PathBuf {
    cell_dir(task, difficulty).join(format!("{seed}_meta.json"))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImagePaths {
    pub puzzle: PathBuf,
    pub solution: PathBuf,
    pub distractors: Vec<PathBuf>,
}

impl ImagePaths {
    pub fn new(task: TaskKind, difficulty: Difficulty, resolution: u32, seed: u64) -> Self {
        let dir = cell_dir(task, difficulty).join(resolution.to_string());
        Self {
            puzzle: dir.join(format!("{seed}_puzzle.png")),
            solution: dir.join(format!("{seed}_solution.png")),
            distractors: (0..4).map(|i| dir.join(format!("{seed}_distractor_{i}.png"))).collect(),
        }
    }

    fn under(self, root: &Path) -> Self {
        Self {
            puzzle: root.join(self.puzzle),
            solution: root.join(self.solution),
            distractors: self.distractors.into_iter().map(|p| root.join(p)).collect(),
        }
    }
}

pub fn metadata_json(meta: &PuzzleMetadata) -> Result<String> {
    Ok(serde_json::to_string_pretty(meta)? + "\n")
}

/// Rasterizes every image of `inst` at `resolution`, checking that the
/// solution passes and every distractor fails.
pub fn render_checked(inst: &PuzzleInstance, resolution: u32) -> Result<Vec<Vec<u8>>> {
    let gate = |reason: String| Error::BuildAssertion {
        task: inst.task.name().to_string(),
        difficulty: inst.difficulty.to_string(),
        seed: inst.seed,
        reason,
    };
    let mut out = vec![encode_png(&rasterize(&inst.puzzle, resolution)?)];
    let solution = rasterize(&inst.solution, resolution)?;
    let r = inst.spec.verify(&solution);
    if !r.passed {
        return Err(gate(format!("solution fails at {resolution}px: {}", r.reason)));
    }
    out.push(encode_png(&solution));
    for (i, d) in inst.distractors.iter().enumerate() {
        let img = rasterize(&d.scene, resolution)?;
        let r = inst.spec.verify(&img);
        if r.passed {
            return Err(gate(format!("distractor {i} ({}) passes at {resolution}px", d.violation)));
        }
        out.push(encode_png(&img));
    }
    Ok(out)
}

fn write_file(root: &Path, rel: &Path, bytes: &[u8]) -> Result<(String, String)> {
    let path = root.join(rel);
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    fs::write(&path, bytes).map_err(|e| Error::io(&path, e))?;
    Ok((rel.to_string_lossy().replace('\\', "/"), sha256_hex(bytes)))
}

fn build_one(cfg: &ReleaseConfig, root: &Path, task: TaskKind, difficulty: Difficulty, seed: u64) -> Result<Vec<(String, String)>> {
    let params = &cfg.tasks[&task][&difficulty];
    let inst = generate_with_params(task, difficulty, params, seed)?;
    // every gate passes before anything of this puzzle is written
    let images: Vec<Vec<Vec<u8>>> = cfg.resolutions.iter().map(|&r| render_checked(&inst, r)).collect::<Result<_>>()?;
    let mut written = vec![write_file(root, &meta_path(task, difficulty, seed), metadata_json(&inst.metadata())?.as_bytes())?];
    for (&res, pngs) in cfg.resolutions.iter().zip(images) {
        let paths = ImagePaths::new(task, difficulty, res, seed);
        let rels = [&paths.puzzle, &paths.solution].into_iter().chain(&paths.distractors);
        for (rel, bytes) in rels.zip(pngs) {
            written.push(write_file(root, rel, &bytes)?);
        }
    }
    Ok(written)
}

/// Builds every puzzle of `cfg` under `root` in parallel and writes the
/// manifest once all of them have passed their gates.
pub fn build_release(cfg: &ReleaseConfig, root: &Path) -> Result<Manifest> {
    cfg.validate()?;
    let puzzles = cfg.puzzles();
    let files: Vec<Vec<(String, String)>> = puzzles
        .par_iter()
        .map(|&(task, difficulty, _, seed)| build_one(cfg, root, task, difficulty, seed))
        .collect::<Result<_>>()?;
    let mut files: BTreeMap<String, String> = files.into_iter().flatten().collect();
    let (config, digest) = write_file(root, Path::new(CONFIG), cfg.to_yaml()?.as_bytes())?;
    files.insert(config, digest);
    let png_count = files.keys().filter(|k| k.ends_with(".png")).count();
    let manifest = Manifest {
        naming: NAMING.to_string(),
        global_seed: cfg.global_seed,
        puzzles_per_cell: cfg.puzzles_per_cell,
        resolutions: cfg.resolutions.clone(),
        puzzle_count: puzzles.len(),
        png_count,
        puzzles: puzzles
            .into_iter()
            .map(|(task, difficulty, index, seed)| PuzzleEntry {
                task,
                difficulty,
                index,
                seed,
            })
            .collect(),
        digest: digest_of(&files),
        files,
    };
    write_file(root, Path::new(MANIFEST), (serde_json::to_string_pretty(&manifest)? + "\n").as_bytes())?;
    log::info!("built {} puzzles, {} png files, digest {}", manifest.puzzle_count, manifest.png_count, manifest.digest);
    Ok(manifest)
}

/// Loads a puzzle's metadata, checks that regenerating it from its recorded
/// task, difficulty, params and seed gives the same metadata, and returns
/// the image paths of every resolution present.
pub fn load_puzzle(root: &Path, task: TaskKind, difficulty: Difficulty, seed: u64) -> Result<(PuzzleMetadata, BTreeMap<u32, ImagePaths>)> {
    let cell = root.join(cell_dir(task, difficulty));
    if !cell.is_dir() {
        return Err(Error::io(&cell, std::io::Error::new(std::io::ErrorKind::NotFound, "no such cell directory")));
    }
    let path = root.join(meta_path(task, difficulty, seed));
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let meta: PuzzleMetadata = serde_json::from_str(&text)?;
    if (meta.task, meta.difficulty, meta.seed) != (task, difficulty, seed) {
        return Err(Error::Validation(format!("{}: metadata names a different puzzle", path.display())));
    }
    if meta.regenerate()?.metadata() != meta {
        return Err(Error::Validation(format!("{}: regenerated puzzle differs from metadata", path.display())));
    }
    let mut images = BTreeMap::new();
    for res in CANONICAL_RESOLUTIONS {
        let paths = ImagePaths::new(task, difficulty, res, seed).under(root);
        if paths.solution.is_file() {
            images.insert(res, paths);
        }
    }
    Ok((meta, images))
}
