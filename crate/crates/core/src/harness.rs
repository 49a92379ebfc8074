//! Scoring of both evaluation tracks.
//!
//! Track 1: a directory of candidate PNGs named `{task}_{difficulty}_{seed}.png`,
//! each checked by the puzzle's verifier. Track 2: five candidates per puzzle
//! (solution and four distractors) in a seeded order; a submission picks one
//! index per puzzle and is scored by exact match.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{load_puzzle, ImagePaths, Manifest};
use crate::error::{Error, Result};
use crate::registry::{parse_puzzle_id, puzzle_id, PuzzleMetadata};
use crate::rng::RngStream;
use crate::scene::decode_png;
use crate::seed::mix_pair;
use crate::types::{Difficulty, Domain, TaskKind};

/// Track-2 candidates default to this resolution when it was built.
pub const DEFAULT_TRACK2_RESOLUTION: u32 = 1024;
const SHUFFLE_SALT: u64 = 0x7472_6163_6b32;

/// Shuffle seed used when none is given: derived from the release seed.
pub fn default_shuffle_seed(global_seed: u64) -> u64 {
    mix_pair(global_seed, SHUFFLE_SALT)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track1Record {
    pub puzzle_id: String,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub passed: bool,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Track1Fragment {
    pub records: Vec<Track1Record>,
    /// Submission files whose names match no release puzzle.
    pub unparseable: Vec<String>,
    /// Whether unparseable files count as failures in the overall accuracy.
    pub count_unparseable: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct Track1Options {
    /// Leave unparseable file names out of the overall denominator.
    pub skip_unparseable: bool,
}

fn release_puzzles(root: &Path) -> Result<(Manifest, BTreeMap<String, (TaskKind, Difficulty, u64)>)> {
    let manifest = Manifest::load(root)?;
    let ids = manifest
        .puzzles
        .iter()
        .map(|p| (puzzle_id(p.task, p.difficulty, p.seed), (p.task, p.difficulty, p.seed)))
        .collect();
    Ok((manifest, ids))
}

fn verify_file(meta: &PuzzleMetadata, path: &Path) -> (bool, String) {
    let bytes = match fs::read(path) {
        Ok(b) => b,
        Err(e) => return (false, format!("unreadable: {e}")),
    };
    match decode_png(&bytes) {
        Ok(img) => {
            let r = meta.spec.verify(&img);
            (r.passed, r.reason)
        }
        Err(e) => (false, format!("undecodable: {e}")),
    }
}

pub fn score_track1(release: &Path, submission: &Path, opts: Track1Options) -> Result<Track1Fragment> {
    let (_, ids) = release_puzzles(release)?;
    let mut submitted = BTreeMap::new();
    let mut unparseable = Vec::new();
    let entries = fs::read_dir(submission).map_err(|e| Error::io(submission, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(submission, e))?.path();
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        match name.strip_suffix(".png") {
            Some(stem) if ids.contains_key(stem) => {
                submitted.insert(stem.to_string(), path);
            }
            _ => unparseable.push(name),
        }
    }
    unparseable.sort();
    for name in &unparseable {
        log::warn!("track 1: unparseable submission file `{name}`");
    }
    let records = ids
        .par_iter()
        .map(|(id, &(task, difficulty, seed))| {
            let (passed, reason) = match submitted.get(id) {
                None => (false, "missing".to_string()),
                Some(path) => {
                    let (meta, _) = load_puzzle(release, task, difficulty, seed)?;
                    verify_file(&meta, path)
                }
            };
            Ok(Track1Record {
                puzzle_id: id.clone(),
                task,
                difficulty,
                passed,
                reason,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Track1Fragment {
        records,
        unparseable,
        count_unparseable: !opts.skip_unparseable,
    })
}

/// One puzzle's candidates in presentation order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track2Item {
    pub puzzle_id: String,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub puzzle: PathBuf,
    pub candidates: Vec<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KeyEntry {
    pub puzzle_id: String,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub correct_index: usize,
    /// Violation type shown at each index; `None` at the correct one.
    pub violations: Vec<Option<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnswerKey {
    pub shuffle_seed: u64,
    pub resolution: u32,
    pub entries: Vec<KeyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track2Assembly {
    pub items: Vec<Track2Item>,
    pub key: AnswerKey,
}

/// Presentation order for one puzzle: `order[i]` is the source slot shown
/// at index `i`, where slot 0 is the solution and slots 1..=4 the
/// distractors.
pub fn candidate_order(shuffle_seed: u64, puzzle_seed: u64) -> Vec<usize> {
    RngStream::new(mix_pair(shuffle_seed, puzzle_seed)).permutation(5)
}

pub fn assemble_track2(release: &Path, shuffle_seed: u64, resolution: Option<u32>) -> Result<Track2Assembly> {
    let manifest = Manifest::load(release)?;
    let resolution = resolution.unwrap_or(if manifest.resolutions.contains(&DEFAULT_TRACK2_RESOLUTION) {
        DEFAULT_TRACK2_RESOLUTION
    } else {
        manifest.resolutions[0]
    });
    if !manifest.resolutions.contains(&resolution) {
        return Err(Error::Validation(format!("release has no {resolution}px images")));
    }
    let mut items = Vec::new();
    let mut entries = Vec::new();
    for p in &manifest.puzzles {
        let meta_path = release.join(crate::dataset::meta_path(p.task, p.difficulty, p.seed));
        let text = fs::read_to_string(&meta_path).map_err(|e| Error::io(&meta_path, e))?;
        let meta: PuzzleMetadata = serde_json::from_str(&text)?;
        let paths = ImagePaths::new(p.task, p.difficulty, resolution, p.seed);
        let slots: Vec<(PathBuf, Option<String>)> = std::iter::once((paths.solution, None))
            .chain(paths.distractors.into_iter().zip(meta.violations.iter().cloned().map(Some)))
            .collect();
        let order = candidate_order(shuffle_seed, p.seed);
        let id = puzzle_id(p.task, p.difficulty, p.seed);
        items.push(Track2Item {
            puzzle_id: id.clone(),
            task: p.task,
            difficulty: p.difficulty,
            puzzle: paths.puzzle,
            candidates: order.iter().map(|&s| slots[s].0.clone()).collect(),
        });
        entries.push(KeyEntry {
            puzzle_id: id,
            task: p.task,
            difficulty: p.difficulty,
            correct_index: order.iter().position(|&s| s == 0).expect("permutation contains 0"),
            violations: order.iter().map(|&s| slots[s].1.clone()).collect(),
        });
    }
    Ok(Track2Assembly {
        items,
        key: AnswerKey {
            shuffle_seed,
            resolution,
            entries,
        },
    })
}

/// One answer of a track-2 submission.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Track2Record {
    pub puzzle_id: String,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub correct_index: usize,
    pub selected_index: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Track2Outcome {
    pub puzzle_id: String,
    pub task: TaskKind,
    pub difficulty: Difficulty,
    pub correct: bool,
    /// Violation type of the chosen distractor, when a distractor was chosen.
    pub chosen_violation: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Track2Fragment {
    pub records: Vec<Track2Outcome>,
    pub warnings: Vec<String>,
}

/// Parses a submission document, rejecting unknown or missing fields.
pub fn parse_track2_submission(text: &str) -> Result<Vec<Track2Record>> {
    serde_json::from_str(text).map_err(|e| Error::Validation(format!("track-2 submission: {e}")))
}

/// Exact-match scoring. Duplicate puzzle ids keep the last record; indices
/// outside 0..5 count as wrong; puzzles without a record count as wrong.
pub fn score_track2(key: &AnswerKey, submission: &[Track2Record]) -> Result<Track2Fragment> {
    let mut warnings = Vec::new();
    let entries: BTreeMap<&str, &KeyEntry> = key.entries.iter().map(|e| (e.puzzle_id.as_str(), e)).collect();
    let mut chosen: BTreeMap<&str, &Track2Record> = BTreeMap::new();
    for r in submission {
        let Some(entry) = entries.get(r.puzzle_id.as_str()) else {
            return Err(Error::Validation(format!("unknown puzzle id `{}`", r.puzzle_id)));
        };
        if (r.task, r.difficulty, r.correct_index) != (entry.task, entry.difficulty, entry.correct_index) {
            return Err(Error::Validation(format!("record `{}` disagrees with the answer key", r.puzzle_id)));
        }
        if chosen.insert(&r.puzzle_id, r).is_some() {
            let w = format!("duplicate record for `{}`; keeping the last", r.puzzle_id);
            log::warn!("{w}");
            warnings.push(w);
        }
    }
    let missing = key.entries.iter().filter(|e| !chosen.contains_key(e.puzzle_id.as_str())).count();
    if missing > 0 {
        warnings.push(format!("{missing} puzzles without a record, scored as wrong"));
    }
    let records = key
        .entries
        .iter()
        .map(|e| {
            let selected = chosen
                .get(e.puzzle_id.as_str())
                .and_then(|r| usize::try_from(r.selected_index).ok())
                .filter(|&i| i < e.violations.len());
            Track2Outcome {
                puzzle_id: e.puzzle_id.clone(),
                task: e.task,
                difficulty: e.difficulty,
                correct: selected == Some(e.correct_index),
                chosen_violation: selected.and_then(|i| e.violations[i].clone()),
            }
        })
        .collect();
    Ok(Track2Fragment { records, warnings })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "track", rename_all = "snake_case")]
pub enum Fragment {
    Track1(Track1Fragment),
    Track2(Track2Fragment),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Accuracy {
    pub correct: usize,
    pub total: usize,
    pub accuracy: f64,
}

impl Accuracy {
    fn tally(outcomes: impl IntoIterator<Item = bool>) -> Self {
        let (mut correct, mut total) = (0, 0);
        for ok in outcomes {
            total += 1;
            correct += usize::from(ok);
        }
        Self {
            correct,
            total,
            accuracy: if total == 0 { 0.0 } else { correct as f64 / total as f64 },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TrackSummary {
    pub overall: Accuracy,
    pub per_task: BTreeMap<TaskKind, Accuracy>,
    /// Mean of the member tasks' accuracies.
    pub per_domain: BTreeMap<Domain, f64>,
    pub per_difficulty: BTreeMap<TaskKind, BTreeMap<Difficulty, Accuracy>>,
    /// Track 2 only: task → chosen violation type → count.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub confusion: BTreeMap<TaskKind, BTreeMap<String, usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ScoreReport {
    pub track1: Option<TrackSummary>,
    pub track2: Option<TrackSummary>,
    /// Track-2 minus track-1 accuracy, for tasks scored on both tracks.
    pub gap: BTreeMap<TaskKind, f64>,
    pub warnings: Vec<String>,
}

fn summarize(
    outcomes: &[(TaskKind, Difficulty, bool)],
    extra_failures: usize,
    warnings: &mut Vec<String>,
    track: &str,
) -> TrackSummary {
    let mut per_task = BTreeMap::new();
    let mut per_difficulty: BTreeMap<TaskKind, BTreeMap<Difficulty, Accuracy>> = BTreeMap::new();
    for t in TaskKind::ALL {
        let of_task: Vec<_> = outcomes.iter().filter(|o| o.0 == t).collect();
        if of_task.is_empty() {
            continue;
        }
        per_task.insert(t, Accuracy::tally(of_task.iter().map(|o| o.2)));
        for d in Difficulty::ALL {
            let cell: Vec<bool> = of_task.iter().filter(|o| o.1 == d).map(|o| o.2).collect();
            if !cell.is_empty() {
                per_difficulty.entry(t).or_default().insert(d, Accuracy::tally(cell));
            }
        }
    }
    let mut per_domain = BTreeMap::new();
    for d in Domain::ALL {
        let accs: Vec<f64> = per_task.iter().filter(|(t, _)| t.domain() == d).map(|(_, a)| a.accuracy).collect();
        if accs.is_empty() {
            warnings.push(format!("{track}: domain {} has no scored tasks", d.as_str()));
        } else {
            per_domain.insert(d, accs.iter().sum::<f64>() / accs.len() as f64);
        }
    }
    TrackSummary {
        overall: Accuracy::tally(outcomes.iter().map(|o| o.2).chain(std::iter::repeat_n(false, extra_failures))),
        per_task,
        per_domain,
        per_difficulty,
        confusion: BTreeMap::new(),
    }
}

/// Merges fragments into one report. Within a track, a later record for the
/// same puzzle replaces an earlier one.
pub fn aggregate(fragments: &[Fragment]) -> Result<ScoreReport> {
    if fragments.is_empty() {
        return Err(Error::Validation("no report fragments".into()));
    }
    let mut t1: BTreeMap<String, Track1Record> = BTreeMap::new();
    let mut t2: BTreeMap<String, Track2Outcome> = BTreeMap::new();
    let mut unparseable = BTreeSet::new();
    let (mut has1, mut has2) = (false, false);
    let mut warnings = Vec::new();
    for f in fragments {
        match f {
            Fragment::Track1(f) => {
                has1 = true;
                t1.extend(f.records.iter().map(|r| (r.puzzle_id.clone(), r.clone())));
                if f.count_unparseable {
                    unparseable.extend(f.unparseable.iter().cloned());
                }
            }
            Fragment::Track2(f) => {
                has2 = true;
                t2.extend(f.records.iter().map(|r| (r.puzzle_id.clone(), r.clone())));
                warnings.extend(f.warnings.iter().cloned());
            }
        }
    }
    let track1 = has1.then(|| {
        let outcomes: Vec<_> = t1.values().map(|r| (r.task, r.difficulty, r.passed)).collect();
        summarize(&outcomes, unparseable.len(), &mut warnings, "track 1")
    });
    let track2 = has2.then(|| {
        let outcomes: Vec<_> = t2.values().map(|r| (r.task, r.difficulty, r.correct)).collect();
        let mut s = summarize(&outcomes, 0, &mut warnings, "track 2");
        for r in t2.values() {
            if let Some(v) = &r.chosen_violation {
                *s.confusion.entry(r.task).or_default().entry(v.clone()).or_default() += 1;
            }
        }
        s
    });
    let mut gap = BTreeMap::new();
    if let (Some(a), Some(b)) = (&track1, &track2) {
        for (t, acc2) in &b.per_task {
            if let Some(acc1) = a.per_task.get(t) {
                gap.insert(*t, acc2.accuracy - acc1.accuracy);
            }
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    Ok(ScoreReport {
        track1,
        track2,
        gap,
        warnings,
    })
}

/// Task and difficulty of a track-1 file name, if it has the right shape.
pub fn parse_submission_name(name: &str) -> Option<(TaskKind, Difficulty, u64)> {
    parse_puzzle_id(name.strip_suffix(".png")?)
}
