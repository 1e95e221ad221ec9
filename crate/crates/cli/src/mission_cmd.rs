//! `mission run` and `mission model`.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use robustqv::ctmc::save_model;
use robustqv::mission::{
    build_mission_ctmc, run_mission, sample_case_study_priors, write_decisions_csv, write_events_csv, ChainResult,
    Configuration, MissionOutcome, MissionSpec, Phase, Terminal,
};

use crate::error::{usage_error, CmdResult, Classify};
use crate::output::{write_table, write_text};
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum MissionCommand {
    /// Simulate seeded missions and collect decision statistics.
    Run(RunArgs),
    /// Write the interval CTMC of the mission at the prior beliefs.
    Model(ModelArgs),
}

impl MissionCommand {
    pub fn config(&self) -> Option<PathBuf> {
        match self {
            MissionCommand::Run(a) => a.config.clone(),
            MissionCommand::Model(a) => a.config.clone(),
        }
    }
}

#[derive(Args, Debug)]
pub struct RunArgs {
    /// Mission config (JSON, MissionSpec fields); defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of runs; run `i` uses seed `seed + i`.
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Current chain.
    #[arg(long, default_value_t = 1)]
    pub chain: usize,
    #[arg(long, value_enum, default_value_t = PhaseArg::Inspect)]
    pub phase: PhaseArg,
    /// Configuration bits for chains `chain..k`, current chain first; all ones by default.
    #[arg(long)]
    pub bits: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhaseArg {
    Inspect,
    Cleaning,
    Prepare,
}

impl From<PhaseArg> for Phase {
    fn from(p: PhaseArg) -> Self {
        match p {
            PhaseArg::Inspect => Phase::Inspect,
            PhaseArg::Cleaning => Phase::Cleaning,
            PhaseArg::Prepare => Phase::Prepare,
        }
    }
}

fn load_spec(path: Option<&Path>) -> CmdResult<MissionSpec> {
    let Some(path) = path else {
        return Ok(MissionSpec::default());
    };
    let text = fs::read_to_string(path).usage(format!("cannot read {}", path.display()))?;
    MissionSpec::from_json(&text).usage(format!("invalid mission config {}", path.display()))
}

#[derive(Serialize)]
struct RunRow {
    run: usize,
    seed: u64,
    terminal: Terminal,
    cleaned: usize,
    skipped: usize,
    not_needed: usize,
    decisions: usize,
    e0: f64,
    energy_consumed: f64,
    duration: f64,
}

#[derive(Serialize)]
struct ChainRow {
    chain: usize,
    decisions: usize,
    configs_evaluated: usize,
    wall_ms_min: Option<f64>,
    wall_ms_q1: Option<f64>,
    wall_ms_median: Option<f64>,
    wall_ms_q3: Option<f64>,
    wall_ms_max: Option<f64>,
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    let last = sorted.len().checked_sub(1)?;
    let pos = q * last as f64;
    let (i, frac) = (pos.floor() as usize, pos.fract());
    Some(if i >= last { sorted[last] } else { sorted[i] + frac * (sorted[i + 1] - sorted[i]) })
}

fn chain_rows(k: usize, outcomes: &[MissionOutcome]) -> Vec<ChainRow> {
    let mut walls: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for d in outcomes.iter().flat_map(|o| &o.decisions) {
        walls.entry(d.chain).or_default().push(d.wall_ms);
    }
    (1..=k)
        .map(|chain| {
            let mut w = walls.remove(&chain).unwrap_or_default();
            w.sort_by(f64::total_cmp);
            ChainRow {
                chain,
                decisions: w.len(),
                configs_evaluated: 1 << (k - chain),
                wall_ms_min: quantile(&w, 0.0),
                wall_ms_q1: quantile(&w, 0.25),
                wall_ms_median: quantile(&w, 0.5),
                wall_ms_q3: quantile(&w, 0.75),
                wall_ms_max: quantile(&w, 1.0),
            }
        })
        .collect()
}

fn write_run(dir: &Path, out: &MissionOutcome) -> CmdResult {
    fs::create_dir_all(dir).usage(format!("cannot create {}", dir.display()))?;
    let mut buf = Vec::new();
    write_decisions_csv(&mut buf, &out.decisions).usage("decisions CSV")?;
    write_text(&dir.join("decisions.csv"), &String::from_utf8_lossy(&buf))?;
    let mut buf = Vec::new();
    write_events_csv(&mut buf, &out.events).usage("events CSV")?;
    write_text(&dir.join("events.csv"), &String::from_utf8_lossy(&buf))?;
    let json = serde_json::to_string_pretty(out).expect("outcome serializes") + "\n";
    write_text(&dir.join("outcome.json"), &json)
}

fn run_many(g: &Global, a: RunArgs) -> CmdResult {
    let spec = load_spec(a.config.as_deref())?;
    if a.runs == 0 {
        return Err(usage_error("--runs must be at least 1"));
    }
    let base = g.seed.unwrap_or(spec.seed);
    let mut outcomes = Vec::with_capacity(a.runs);
    let mut rows = Vec::with_capacity(a.runs);
    for i in 0..a.runs {
        let seed = base.wrapping_add(i as u64);
        let out = run_mission(&MissionSpec { seed, ..spec.clone() }).domain(format!("run {i} failed"))?;
        write_run(&g.out.join(format!("run_{i:03}")), &out)?;
        rows.push(RunRow {
            run: i,
            seed,
            terminal: out.terminal,
            cleaned: out.count(ChainResult::Cleaned),
            skipped: out.count(ChainResult::Skipped),
            not_needed: out.count(ChainResult::NotNeeded),
            decisions: out.decisions.len(),
            e0: out.e0,
            energy_consumed: out.energy_consumed,
            duration: out.duration,
        });
        outcomes.push(out);
    }
    let damaged = rows.iter().filter(|r| r.terminal == Terminal::Damage).count();
    if damaged > 0 {
        eprintln!("note: {damaged} of {} runs ended in damage", a.runs);
    }
    write_table(&g.out.join("runs"), g.format, &rows)?;
    write_table(&g.out.join("aggregate"), g.format, &chain_rows(spec.k, &outcomes))?;
    println!("{} runs written to {}", a.runs, g.out.display());
    Ok(())
}

fn write_model(g: &Global, a: ModelArgs) -> CmdResult {
    let spec = load_spec(a.config.as_deref())?;
    if !(1..=spec.k).contains(&a.chain) {
        return Err(usage_error(format!("--chain must lie in 1..={}", spec.k)));
    }
    let config = match &a.bits {
        None => Configuration::all(a.chain, spec.k, true),
        Some(bits) => {
            let parsed: Option<Vec<bool>> = bits.chars().map(|c| ['0', '1'].iter().position(|d| *d == c).map(|p| p == 1)).collect();
            match parsed {
                Some(b) if b.len() == spec.k + 1 - a.chain => Configuration::new(a.chain, b),
                _ => return Err(usage_error(format!("--bits needs {} binary digits", spec.k + 1 - a.chain))),
            }
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(g.seed.unwrap_or(spec.seed));
    let beliefs = sample_case_study_priors(&mut rng, &spec).domain("sampling priors")?;
    let rates = beliefs.intervals().domain("posterior intervals")?;
    let model = build_mission_ctmc(&spec, &rates, &config, a.phase.into()).domain("building the mission model")?;
    let path = g.out.join("mission_model.json");
    write_text(&path, &save_model(&model.ctmc))?;
    println!("{}", path.display());
    Ok(())
}

pub fn run(g: &Global, m: MissionCommand) -> CmdResult {
    match m {
        MissionCommand::Run(a) => run_many(g, a),
        MissionCommand::Model(a) => write_model(g, a),
    }
}
