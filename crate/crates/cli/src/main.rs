use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand, ValueEnum};
use pictor::dataset::{self, build_release, load_puzzle, render_checked, ImagePaths, ReleaseConfig};
use pictor::harness::{self, Fragment, Track1Options};
use pictor::scene::decode_png;
use pictor::{Difficulty, Error, TaskKind};

const EXIT_OTHER: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;
/// `verify` ran fine but the candidate was rejected.
const EXIT_REJECTED: u8 = 4;

#[derive(Parser)]
#[command(name = "pictor", version, about = "Generate, build, verify and score visual reasoning puzzles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Profile {
    Release,
    Desk,
}

#[derive(Subcommand)]
enum Command {
    /// List the tasks with their difficulty axes.
    Tasks,
    /// Generate one puzzle and write its images and metadata.
    Generate {
        #[arg(long)]
        task: TaskKind,
        #[arg(long)]
        difficulty: Difficulty,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 512)]
        res: u32,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Build a release directory.
    Build {
        /// YAML release config; defaults to the built-in profile.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "desk")]
        profile: Profile,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        puzzles_per_cell: Option<u32>,
        #[arg(long, value_delimiter = ',')]
        resolutions: Option<Vec<u32>>,
        #[arg(long)]
        global_seed: Option<u64>,
    },
    /// Verify one candidate image against a release puzzle.
    Verify {
        #[arg(long)]
        release: PathBuf,
        #[arg(long)]
        task: TaskKind,
        #[arg(long)]
        difficulty: Difficulty,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        candidate: PathBuf,
    },
    /// Write shuffled track-2 candidate lists and the answer key.
    AssembleTrack2 {
        #[arg(long)]
        release: PathBuf,
        #[arg(long)]
        shuffle_seed: Option<u64>,
        #[arg(long)]
        resolution: Option<u32>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Score a directory of track-1 submission images.
    ScoreTrack1 {
        #[arg(long)]
        release: PathBuf,
        #[arg(long)]
        submission: PathBuf,
        #[arg(long)]
        report: PathBuf,
        /// Leave unparseable file names out of the overall accuracy.
        #[arg(long)]
        skip_unparseable: bool,
    },
    /// Score a track-2 submission against an answer key.
    ScoreTrack2 {
        #[arg(long)]
        key: PathBuf,
        #[arg(long)]
        submission: PathBuf,
        #[arg(long)]
        report: PathBuf,
    },
    /// Merge score fragments into a report.
    Report {
        #[arg(required = true)]
        fragments: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn write(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::Io { path: dir.into(), source: e })?;
    }
    fs::write(path, text).map_err(|e| Error::Io { path: path.into(), source: e }.into())
}

fn json<T: serde::Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(v)? + "\n")
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Tasks => print!("{}", json(&pictor::list_tasks())?),
        Command::Generate { task, difficulty, seed, res, out } => {
            let inst = pictor::generate(task, difficulty, seed)?;
            let pngs = render_checked(&inst, res)?;
            let paths = ImagePaths::new(task, difficulty, res, seed);
            for (rel, bytes) in [&paths.puzzle, &paths.solution].into_iter().chain(&paths.distractors).zip(pngs) {
                let path = out.join(rel.file_name().expect("file name"));
                fs::create_dir_all(&out).map_err(|e| Error::Io { path: out.clone(), source: e })?;
                fs::write(&path, bytes).map_err(|e| Error::Io { path: path.clone(), source: e })?;
            }
            write(&out.join(format!("{seed}_meta.json")), &dataset::metadata_json(&inst.metadata())?)?;
            println!("{}", out.display());
        }
        Command::Build { config, profile, out, puzzles_per_cell, resolutions, global_seed } => {
            let mut cfg = match (config, profile) {
                (Some(path), _) => ReleaseConfig::from_yaml(&read(&path)?)?,
                (None, Profile::Release) => ReleaseConfig::release(),
                (None, Profile::Desk) => ReleaseConfig::desk(),
            };
            cfg.puzzles_per_cell = puzzles_per_cell.unwrap_or(cfg.puzzles_per_cell);
            cfg.resolutions = resolutions.unwrap_or(cfg.resolutions);
            cfg.global_seed = global_seed.unwrap_or(cfg.global_seed);
            let m = build_release(&cfg, &out)?;
            println!("{} puzzles, {} png files, digest {}", m.puzzle_count, m.png_count, m.digest);
        }
        Command::Verify { release, task, difficulty, seed, candidate } => {
            let (meta, _) = load_puzzle(&release, task, difficulty, seed)?;
            let bytes = fs::read(&candidate).map_err(|e| Error::Io { path: candidate.clone(), source: e })?;
            let result = meta.spec.verify(&decode_png(&bytes)?);
            print!("{}", json(&result)?);
            if !result.passed {
                return Ok(EXIT_REJECTED);
            }
        }
        Command::AssembleTrack2 { release, shuffle_seed, resolution, out } => {
            let seed = match shuffle_seed {
                Some(s) => s,
                None => harness::default_shuffle_seed(dataset::Manifest::load(&release)?.global_seed),
            };
            let a = harness::assemble_track2(&release, seed, resolution)?;
            write(&out.join("track2_items.json"), &json(&a.items)?)?;
            write(&out.join("answer_key.json"), &json(&a.key)?)?;
            println!("{} puzzles, shuffle seed {seed}", a.items.len());
        }
        Command::ScoreTrack1 { release, submission, report, skip_unparseable } => {
            let f = harness::score_track1(&release, &submission, Track1Options { skip_unparseable })?;
            let passed = f.records.iter().filter(|r| r.passed).count();
            write(&report, &json(&Fragment::Track1(f.clone()))?)?;
            println!("track 1: {passed}/{} passed", f.records.len());
        }
        Command::ScoreTrack2 { key, submission, report } => {
            let key: harness::AnswerKey = serde_json::from_str(&read(&key)?).map_err(|e| Error::Validation(format!("answer key: {e}")))?;
            let records = harness::parse_track2_submission(&read(&submission)?)?;
            let f = harness::score_track2(&key, &records)?;
            let correct = f.records.iter().filter(|r| r.correct).count();
            write(&report, &json(&Fragment::Track2(f.clone()))?)?;
            println!("track 2: {correct}/{} correct", f.records.len());
        }
        Command::Report { fragments, out } => {
            let fragments = fragments
                .iter()
                .map(|p| serde_json::from_str(&read(p)?).map_err(|e| Error::Validation(format!("{}: {e}", p.display())).into()))
                .collect::<Result<Vec<Fragment>>>()?;
            let text = json(&harness::aggregate(&fragments)?)?;
            match out {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
    }
    Ok(0)
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if let Some(e) = err.downcast_ref::<Error>() {
        return match e {
            Error::Io { .. } => EXIT_IO,
            Error::RetriesExhausted { .. } | Error::BuildAssertion { .. } => EXIT_OTHER,
            _ => EXIT_VALIDATION,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return EXIT_IO;
    }
    if err.downcast_ref::<serde_json::Error>().is_some() {
        return EXIT_VALIDATION;
    }
    EXIT_OTHER
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(exit_code(&e))
        }
    }
}
