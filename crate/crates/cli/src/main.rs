use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use kissing::enumerator::{self, CandidateClass, EnumConfig, Reference};
use kissing::hypermap::Hypermap;
use kissing::pipeline::{self, Stage};
use kissing::sphgeom::Constants;
use kissing::{estimate, tame};

/// Re-checks that the contact graphs of twelve-neighbour packings are FCC or HCP.
#[derive(Parser)]
#[command(name = "kissing", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print h0, tgt, sol0 and the total weight.
    Constants,
    /// Build the contact fan of a reference packing and check it.
    Realize {
        #[arg(long, value_enum)]
        config: Packing,
    },
    /// Check the tame-contact conditions of a hypermap given as JSON.
    CheckTame { hypermap: PathBuf },
    /// Enumerate tame-contact hypermaps on twelve nodes.
    Enumerate {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Directory for `summary.json` and one JSON file per class.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the node-type and weight prunes.
        #[arg(long)]
        no_prunes: bool,
    },
    /// Print every estimate case report as a JSON array.
    VerifyEstimates,
    /// Eliminate the classes in an enumeration directory and write `fates.json`.
    LpEliminate { dir: PathBuf },
    /// Run every stage and write `report.json` and `timings.json`.
    Prove {
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Write a hypermap in another format.
    Export {
        /// Graphviz output.
        #[arg(long, required = true)]
        dot: bool,
        /// Hypermap JSON file.
        #[arg(conflicts_with = "config", required_unless_present = "config")]
        hypermap: Option<PathBuf>,
        #[arg(long, value_enum)]
        config: Option<Packing>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Packing {
    Fcc,
    Hcp,
}

impl From<Packing> for Reference {
    fn from(p: Packing) -> Self {
        match p {
            Packing::Fcc => Reference::Fcc,
            Packing::Hcp => Reference::Hcp,
        }
    }
}

/// A completed check: passed or not.
type Outcome = Result<bool>;

/// Writes to stdout; a closed pipe is not an error.
fn emit(text: &str) -> Result<()> {
    match io::stdout().lock().write_all(text.as_bytes()) {
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => Ok(()),
        r => Ok(r?),
    }
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    emit(&(serde_json::to_string_pretty(value)? + "\n"))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_hypermap(path: &Path) -> Result<Hypermap> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn class_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name().and_then(|n| n.to_str()).is_some_and(|n| n.starts_with("class-") && n.ends_with(".json"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn enumerate(jobs: usize, out: Option<PathBuf>, no_prunes: bool) -> Outcome {
    let config = EnumConfig { geometric_prunes: !no_prunes, ..EnumConfig::default() };
    let (summary, result) = pipeline::thread_pool(jobs)?.install(|| pipeline::run_enumeration(&config, jobs > 1))?;
    if let Some(dir) = out {
        fs::create_dir_all(&dir)?;
        write_json(&dir.join("summary.json"), &summary)?;
        for (i, class) in result.classes.iter().enumerate() {
            write_json(&dir.join(format!("class-{i:02}.json")), class)?;
        }
    }
    print_json(&summary)?;
    Ok(summary.pass)
}

fn lp_eliminate(dir: &Path) -> Outcome {
    let files = class_files(dir)?;
    if files.is_empty() {
        bail!("no class-*.json files in {}", dir.display());
    }
    let mut hypermaps = Vec::with_capacity(files.len());
    for f in &files {
        let text = fs::read_to_string(f)?;
        let class: CandidateClass = serde_json::from_str(&text).with_context(|| format!("parsing {}", f.display()))?;
        hypermaps.push(class.hypermap);
    }
    let report = pipeline::run_elimination(&hypermaps)?;
    write_json(&dir.join("fates.json"), &report)?;
    print_json(&report)?;
    Ok(report.fates.iter().all(|f| f.rechecked && f.feasible_when_shrunk != Some(false)))
}

fn prove(jobs: usize, out: &Path) -> Outcome {
    let (report, timings) = pipeline::prove(jobs)?;
    fs::create_dir_all(out)?;
    write_json(&out.join("report.json"), &report)?;
    write_json(&out.join("timings.json"), &timings)?;
    let mut summary = String::new();
    for s in &report.stages {
        summary += &format!("{:<12} {}\n", s.stage.name(), if s.pass { "pass" } else { "FAIL" });
    }
    summary += &format!("survivors: {}\n", report.elimination.survivors.len());
    emit(&summary)?;
    let failing: Vec<&str> = report.failing_stages().into_iter().map(Stage::name).collect();
    if !failing.is_empty() {
        eprintln!("failing stages: {}", failing.join(", "));
    }
    Ok(report.verdict)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Constants => {
            print_json(&Constants::new())?;
            Ok(true)
        }
        Command::Realize { config } => {
            let codes = [Reference::Fcc, Reference::Hcp].map(enumerator::reference_code).to_vec();
            let report = pipeline::realize(config.into(), &codes)?;
            print_json(&report)?;
            Ok(report.pass)
        }
        Command::CheckTame { hypermap } => {
            let h = read_hypermap(&hypermap)?;
            let report = tame::is_tame_contact(&h);
            print_json(&report)?;
            Ok(report.is_tame())
        }
        Command::Enumerate { jobs, out, no_prunes } => enumerate(jobs, out, no_prunes),
        Command::VerifyEstimates => {
            let report = estimate::verify_all();
            let cases: Vec<_> = report.all_cases().collect();
            print_json(&cases)?;
            Ok(report.pass())
        }
        Command::LpEliminate { dir } => lp_eliminate(&dir),
        Command::Prove { jobs, out } => prove(jobs, &out),
        Command::Export { hypermap, config, .. } => {
            let (h, name) = match (hypermap, config) {
                (Some(path), _) => {
                    let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("hypermap").to_string();
                    (read_hypermap(&path)?, name)
                }
                (None, Some(p)) => {
                    let r: Reference = p.into();
                    (enumerator::reference_hypermap(r), format!("{r:?}").to_lowercase())
                }
                (None, None) => unreachable!("clap requires one input"),
            };
            emit(&h.to_dot(&name))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
