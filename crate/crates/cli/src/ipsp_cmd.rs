//! `ipsp`: posterior bounds of a regular event rate on a seeded event stream.

use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};
use serde::Serialize;

use robustqv::ctmc::RateObservation;
use robustqv::ipsp::{ipsp_bounds, GammaPriorSet};

use crate::error::{usage_error, CmdResult, Classify};
use crate::output::{write_chart, write_table};
use crate::svg::{csv_columns, Chart, Series};
use crate::Global;

#[derive(Args, Debug)]
pub struct IpspArgs {
    /// Prior file: {"t0": [lo, hi], "lambda0": [lo, hi]}.
    #[arg(long)]
    pub prior: PathBuf,
    /// Rate of the simulated event stream.
    #[arg(long)]
    pub rate: f64,
    /// Length of the simulated stream.
    #[arg(long, default_value_t = 10_000.0)]
    pub horizon: f64,
    /// Number of evenly spaced report times.
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

#[derive(Serialize)]
pub struct IpspRow {
    pub t: f64,
    pub n: u64,
    pub lower: f64,
    pub upper: f64,
    pub mle: f64,
}

/// Event counts of a rate-`rate` Poisson stream at each of the increasing `times`.
pub fn poisson_counts(rate: f64, times: &[f64], seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gap = Exp::new(rate).expect("positive rate");
    let mut next = gap.sample(&mut rng);
    let mut n = 0;
    times
        .iter()
        .map(|&t| {
            while next <= t {
                n += 1;
                next += gap.sample(&mut rng);
            }
            n
        })
        .collect()
}

pub fn report_times(horizon: f64, points: usize) -> Vec<f64> {
    (1..=points).map(|i| horizon * i as f64 / points as f64).collect()
}

pub fn curve(prior: &GammaPriorSet<f64>, rate: f64, times: &[f64], seed: u64) -> Vec<IpspRow> {
    times
        .iter()
        .zip(poisson_counts(rate, times, seed))
        .map(|(&t, n)| {
            let b = ipsp_bounds(prior, RateObservation::new(n, t));
            IpspRow { t, n, lower: b.lower, upper: b.upper, mle: n as f64 / t }
        })
        .collect()
}

pub fn check_stream(rate: f64, horizon: f64, points: usize) -> CmdResult {
    if !(rate > 0.0 && rate.is_finite()) {
        return Err(usage_error(format!("--rate must be positive, got {rate}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) || points == 0 {
        return Err(usage_error("--horizon must be positive and --points at least 1"));
    }
    Ok(())
}

pub fn bounds_series(csv: &str, name: &str, dashed: bool) -> CmdResult<Vec<Series>> {
    Ok(vec![
        Series { label: format!("{name} upper"), points: csv_columns(csv, "t", "upper").usage("curve CSV")?, dashed },
        Series { label: format!("{name} lower"), points: csv_columns(csv, "t", "lower").usage("curve CSV")?, dashed },
    ])
}

pub fn ipsp_chart(title: String, series: Vec<Series>) -> Chart {
    Chart { title, x_label: "t".into(), y_label: "posterior rate bound".into(), series, ..Chart::default() }
}

pub fn write_curve(g: &Global, stem: &Path, prior: &GammaPriorSet<f64>, rate: f64, times: &[f64], seed: u64) -> CmdResult<String> {
    Ok(write_table(stem, g.format, &curve(prior, rate, times, seed))?.1)
}

pub fn run(g: &Global, a: IpspArgs) -> CmdResult {
    check_stream(a.rate, a.horizon, a.points)?;
    let text = fs::read_to_string(&a.prior).usage(format!("cannot read {}", a.prior.display()))?;
    let prior: GammaPriorSet<f64> = text.parse().usage(format!("invalid prior file {}", a.prior.display()))?;
    let name = a.prior.file_stem().map_or("ipsp".into(), |s| s.to_string_lossy().into_owned());
    let times = report_times(a.horizon, a.points);
    let csv = write_curve(g, &g.out.join(&name), &prior, a.rate, &times, g.seed.unwrap_or(0))?;
    let mut series = bounds_series(&csv, &name, false)?;
    series.push(Series { label: "rate".into(), points: vec![(0.0, a.rate), (a.horizon, a.rate)], dashed: true });
    write_chart(&g.out.join(format!("{name}.svg")), &ipsp_chart(format!("IPSP bounds: {name}"), series))?;
    println!("{}", g.out.join(&name).display());
    Ok(())
}
