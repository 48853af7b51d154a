//! Batch front end for the tapework workbench.
//!
//! Exit status: 0 on success, equality or a found witness; 1 when programs
//! are distinguished or no witness exists; 2 on usage or input errors.

mod render;
mod sample;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context as _, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tapework::analysis::{common_type, compare_programs, erasure_check, value_distribution, Verdict};
use tapework::corpus::{self, Params};
use tapework::coupling::{check_coupling, check_left_partial, Mode, Relation};
use tapework::dist::DistrJson;
use tapework::lang::{elaborate, erase, load, parse_expr, Label, StoreTyping, TypeCtx};
use tapework::semantics::{State, Tape};
use tapework::weight::{format_ratio, parse_ratio};

use render::{Format, Out};

const DEFAULT_DEPTH: usize = 50;

#[derive(Parser)]
#[command(name = "tapework", version, about = "Exact execution and coupling checks for a probabilistic language with presampling tapes")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and typecheck a program, printing its type.
    Typecheck { file: PathBuf },
    /// Exact value distribution after a bounded number of steps.
    Dist {
        file: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Compare the value distributions of two programs.
    Compare {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Check that a ghost sample on a tape leaves the value distribution
    /// unchanged.
    Erasure {
        file: PathBuf,
        /// Tape label receiving the ghost sample.
        label: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Initial tape as `BOUND` or `BOUND:v1,v2,...`; repeat for
        /// further labels. Defaults to one empty tape of bound 1.
        #[arg(long = "tape", value_parser = parse_tape)]
        tapes: Vec<Tape>,
    },
    /// Search for a coupling of two distributions inside a relation.
    Couple {
        left: PathBuf,
        right: PathBuf,
        /// JSON relation: `{"pairs": [[i, j], ...]}` with indices into the
        /// sorted supports.
        relation: PathBuf,
        #[arg(long, value_enum, default_value_t = CoupleMode::Exact)]
        mode: CoupleMode,
    },
    /// Inspect the bundled program corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Monte Carlo runs, for exploration only.
    Sample {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// List entries with their parameters.
    List,
    /// Print the source of an entry's programs.
    Emit {
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
        #[arg(long, value_enum, default_value_t = Side::Both)]
        side: Side,
    },
    /// Run every context of an entry and report verdicts.
    Check {
        name: String,
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, i64)>,
        /// Defaults to the entry's own depth.
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum CoupleMode {
    Exact,
    LeftPartial,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Side {
    Left,
    Right,
    Both,
}

fn parse_tape(s: &str) -> Result<Tape, String> {
    let (bound, contents) = match s.split_once(':') {
        Some((b, c)) => (b, c),
        None => (s, ""),
    };
    let bound: u64 = bound.trim().parse().map_err(|_| format!("bad tape bound `{bound}`"))?;
    let contents = contents
        .split(',')
        .filter(|x| !x.trim().is_empty())
        .map(|x| x.trim().parse::<u64>().map_err(|_| format!("bad tape entry `{x}`")))
        .collect::<Result<Vec<_>, _>>()?;
    Tape::new(bound, contents).ok_or_else(|| format!("tape entries exceed bound {bound}"))
}

fn parse_param(s: &str) -> Result<(String, i64), String> {
    let (k, v) = s.split_once('=').ok_or_else(|| format!("expected NAME=VALUE, got `{s}`"))?;
    let v = v.trim().parse().map_err(|_| format!("bad value `{v}`"))?;
    Ok((k.trim().to_string(), v))
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_file(path: &Path) -> Result<(tapework::lang::Expr, tapework::lang::Type)> {
    let src = read(path)?;
    load(&src).map_err(|e| anyhow!("{}: {e}", path.display()))
}

fn typecheck_cmd(out: &mut Out, file: &Path) -> Result<bool> {
    let (_, ty) = load_file(file)?;
    out.typecheck(&ty);
    Ok(true)
}

fn dist_cmd(out: &mut Out, file: &Path, depth: usize) -> Result<bool> {
    let (e, _) = load_file(file)?;
    let (d, residual) = value_distribution(&e, depth);
    out.dist(depth, &d, &residual);
    Ok(true)
}

fn compare_cmd(out: &mut Out, left: &Path, right: &Path, depth: usize) -> Result<bool> {
    let (e1, _) = load_file(left)?;
    let (e2, _) = load_file(right)?;
    common_type(&e1, &e2)?;
    let report = compare_programs(&e1, &e2, &State::new(), depth);
    out.compare(&report);
    Ok(report.verdict != Verdict::Distinguished)
}

fn erasure_cmd(out: &mut Out, file: &Path, label: usize, depth: usize, tapes: &[Tape]) -> Result<bool> {
    let default = [Tape::empty(1)];
    let tapes = if tapes.is_empty() { &default[..] } else { tapes };
    let src = read(file)?;
    let parsed = parse_expr(&src).map_err(|e| anyhow!("{}: {e}", file.display()))?;
    let store = StoreTyping {
        locs: BTreeMap::new(),
        labels: (0..tapes.len()).map(Label).collect::<BTreeSet<_>>(),
    };
    let (e, _) = elaborate(&TypeCtx::default().with_store(store), &parsed)
        .map_err(|err| anyhow!("{}: type error: {err}", file.display()))?;
    let sigma = tapes
        .iter()
        .enumerate()
        .fold(State::new(), |s, (i, t)| s.with_tape(Label(i), t.clone()));
    let holds = erasure_check(&erase(&e), &sigma, Label(label), depth)
        .map_err(|u| anyhow!("label {} is not among the {} initial tapes", u.0, tapes.len()))?;
    out.erasure(label, depth, holds);
    Ok(holds)
}

#[derive(Deserialize)]
struct RelationJson {
    pairs: Vec<(usize, usize)>,
}

fn read_distr(path: &Path) -> Result<tapework::dist::SubDistr<String>> {
    let json = DistrJson::parse(&read(path)?).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let d = json.to_distr().map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let mass = parse_ratio(&json.mass).ok_or_else(|| anyhow!("{}: bad mass `{}`", path.display(), json.mass))?;
    if mass != d.mass() {
        bail!("{}: stated mass {} but weights sum to {}", path.display(), json.mass, format_ratio(&d.mass()));
    }
    Ok(d)
}

fn couple_cmd(out: &mut Out, left: &Path, right: &Path, relation: &Path, mode: CoupleMode) -> Result<bool> {
    let mu1 = read_distr(left)?;
    let mu2 = read_distr(right)?;
    let rel: RelationJson =
        serde_json::from_str(&read(relation)?).with_context(|| format!("{}: bad relation", relation.display()))?;
    let support = |d: &tapework::dist::SubDistr<String>| d.support().cloned().collect::<Vec<_>>();
    let rel = Relation::from_indices(support(&mu1), support(&mu2), rel.pairs)?;
    let (mode, witness) = match mode {
        CoupleMode::Exact => (Mode::Exact, check_coupling(&mu1, &mu2, &rel)),
        CoupleMode::LeftPartial => (Mode::LeftPartial, check_left_partial(&mu1, &mu2, &rel)),
    };
    out.couple(mode, witness.as_ref().map(|w| &w.joint));
    Ok(witness.is_some())
}

fn corpus_params(pairs: &[(String, i64)]) -> Params {
    pairs.iter().cloned().collect()
}

fn corpus_cmd(out: &mut Out, action: &CorpusAction) -> Result<bool> {
    match action {
        CorpusAction::List => {
            out.corpus_list(corpus::entries());
            Ok(true)
        }
        CorpusAction::Emit { name, params, side } => {
            let b = corpus::build(name, &corpus_params(params))?;
            let e = corpus::entry(name).expect("built entries exist");
            let mut sources = Vec::new();
            if *side != Side::Right {
                sources.push((e.left.name, b.left_source.as_str()));
            }
            if *side != Side::Left {
                sources.push((e.right.name, b.right_source.as_str()));
            }
            out.emit(&b, &sources);
            Ok(true)
        }
        CorpusAction::Check { name, params, depth } => {
            let b = corpus::build(name, &corpus_params(params))?;
            let reports = b.probe_at(depth.unwrap_or(b.depth))?;
            let met = b.meets_expectation(&reports);
            out.check(&b, &reports, met);
            Ok(met && reports.iter().all(|(_, r)| r.verdict != Verdict::Distinguished))
        }
    }
}

fn run(cli: &Cli, out: &mut Out) -> Result<bool> {
    match &cli.command {
        Command::Typecheck { file } => typecheck_cmd(out, file),
        Command::Dist { file, depth } => dist_cmd(out, file, *depth),
        Command::Compare { left, right, depth } => compare_cmd(out, left, right, *depth),
        Command::Erasure {
            file,
            label,
            depth,
            tapes,
        } => erasure_cmd(out, file, *label, *depth, tapes),
        Command::Couple {
            left,
            right,
            relation,
            mode,
        } => couple_cmd(out, left, right, relation, *mode),
        Command::Corpus { action } => corpus_cmd(out, action),
        Command::Sample {
            file,
            samples,
            seed,
            depth,
        } => {
            let (e, _) = load_file(file)?;
            let counts = sample::run(&e, *samples, *seed, *depth);
            out.sample(*samples, *seed, *depth, &counts);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = Out::new(cli.format);
    match run(&cli, &mut out) {
        Ok(ok) => {
            out.flush();
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
