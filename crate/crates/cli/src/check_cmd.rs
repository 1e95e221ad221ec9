//! `check`: evaluate a property on a model file.

use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde_json::{json, Value};

use robustqv::checker::{
    check_interval, check_point, evaluate_threshold, parse_property, IntervalMethod, ValueInterval, Verdict,
};
use robustqv::ctmc::load_model;
use robustqv::IntervalCtmc64;

use crate::error::{CmdResult, Classify};
use crate::output::write_text;
use crate::{Format, Global};

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Model file (JSON).
    #[arg(long)]
    pub model: PathBuf,
    /// Property, e.g. 'P=? [ F "goal" ]' or 'R{"energy"}<=40 [ F "finish" ]'.
    #[arg(long)]
    pub property: String,
    /// Interior samples drawn after corner enumeration (interval models only).
    #[arg(long, default_value_t = 0)]
    pub samples: usize,
}

fn number(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else if v > 0.0 {
        json!("inf")
    } else {
        json!("-inf")
    }
}

fn show(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "+inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

pub fn run(g: &Global, a: CheckArgs) -> CmdResult {
    let text = fs::read_to_string(&a.model).usage(format!("cannot read {}", a.model.display()))?;
    let model: IntervalCtmc64 = load_model(&text).usage(format!("invalid model file {}", a.model.display()))?;
    let property = parse_property(&a.property).usage("invalid property")?;
    let semantics = g.reward_semantics.into();

    let value = if model.interval_entries().is_empty() {
        let x = check_point(&model.instantiate_at(0.0), &property, semantics).domain("check failed")?;
        ValueInterval { lo: x, hi: x, corners: 1, samples: 0, escapes: 0 }
    } else {
        let method = match a.samples {
            0 => IntervalMethod::Corners,
            samples => IntervalMethod::CornersPlusSampling { samples, seed: g.seed.unwrap_or(0) },
        };
        check_interval(&model, &property, semantics, method).domain("check failed")?
    };
    let verdict: Option<Verdict> = property.threshold.map(|t| evaluate_threshold(&value, t));

    let report = json!({
        "property": property.to_string(),
        "reward_semantics": semantics,
        "lo": number(value.lo),
        "hi": number(value.hi),
        "corners": value.corners,
        "samples": value.samples,
        "escapes": value.escapes,
        "verdict": verdict,
        "robust_verdict": verdict.map(Verdict::robust),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_text(&g.out.join("check.json"), &text)?;

    match g.format {
        Format::Json => print!("{text}"),
        Format::Csv => {
            if value.lo == value.hi {
                println!("{}", show(value.lo));
            } else {
                println!("[{}, {}]", show(value.lo), show(value.hi));
            }
            if let Some(v) = verdict {
                println!("{}", serde_json::to_value(v).expect("verdict serializes").as_str().unwrap_or_default());
            }
            if value.escapes > 0 {
                eprintln!("warning: {} of {} samples fell outside the corner range", value.escapes, value.samples);
            }
        }
    }
    Ok(())
}
