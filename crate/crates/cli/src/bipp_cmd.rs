//! `bipp`: posterior bound curves for a singular event.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::Serialize;

use robustqv::bipp::closed_form::switch_points;
use robustqv::bipp::{bipp_bounds, PartialPrior, Strategy};

use crate::error::{CmdResult, Classify};
use crate::grid::TimeGrid;
use crate::output::{write_chart, write_table};
use crate::svg::{csv_columns, interpolate, Chart, Series};
use crate::Global;

#[derive(Args, Debug)]
pub struct BippArgs {
    /// Prior file: {"epsilons": [0, e1, e2, "inf"], "thetas": [t1, t2, t3]}.
    #[arg(long)]
    pub prior: PathBuf,
    /// Exposure times: lin:A:B:N, log:A:B:N or list:T1,T2,...
    #[arg(long, default_value = "log:1:1e6:121")]
    pub t_grid: TimeGrid,
    #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
    pub strategy: StrategyArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StrategyArg {
    Auto,
    Numeric,
    ClosedForm,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Numeric => Strategy::Numeric,
            StrategyArg::ClosedForm => Strategy::ClosedForm,
        }
    }
}

#[derive(Serialize)]
pub struct BippRow {
    pub t: f64,
    pub lambda_l: f64,
    pub lambda_u: f64,
    pub method: String,
}

pub fn curve(prior: &PartialPrior<f64>, ts: &[f64], strategy: Strategy) -> CmdResult<Vec<BippRow>> {
    ts.iter()
        .map(|&t| {
            let b = bipp_bounds(prior, t, strategy).usage("prior does not support the requested strategy")?;
            Ok(BippRow { t, lambda_l: b.lower, lambda_u: b.upper, method: b.method.to_string() })
        })
        .collect()
}

/// Upper and (dashed) lower bound series of one curve, read back from its CSV.
pub fn curve_series(csv: &str, name: &str) -> CmdResult<Vec<Series>> {
    let upper = csv_columns(csv, "t", "lambda_u").usage("curve CSV")?;
    let lower = csv_columns(csv, "t", "lambda_l").usage("curve CSV")?;
    Ok(vec![
        Series { label: format!("{name} λu"), points: upper, dashed: false },
        Series { label: format!("{name} λl"), points: lower, dashed: true },
    ])
}

/// Case-switch points of the closed forms, placed on the upper-bound curve.
pub fn switch_markers(csv: &str, prior: &PartialPrior<f64>) -> CmdResult<Vec<(f64, f64)>> {
    if !matches!(prior.m(), 2 | 3) || !prior.has_default_support() {
        return Ok(Vec::new());
    }
    let upper = csv_columns(csv, "t", "lambda_u").usage("curve CSV")?;
    Ok(switch_points(prior).into_iter().filter_map(|t| Some((t, interpolate(&upper, t)?))).collect())
}

pub fn bipp_chart(title: String, series: Vec<Series>, markers: Vec<(f64, f64)>) -> Chart {
    Chart { title, x_label: "t".into(), y_label: "posterior rate bound".into(), log_x: true, series, markers, ..Chart::default() }
}

pub fn write_curve(g: &Global, stem: &Path, prior: &PartialPrior<f64>, ts: &[f64], strategy: Strategy) -> CmdResult<String> {
    let rows = curve(prior, ts, strategy)?;
    let (_, csv) = write_table(stem, g.format, &rows)?;
    Ok(csv)
}

pub fn run(g: &Global, a: BippArgs) -> CmdResult {
    let text = fs::read_to_string(&a.prior).usage(format!("cannot read {}", a.prior.display()))?;
    let prior: PartialPrior<f64> = text.parse().usage(format!("invalid prior file {}", a.prior.display()))?;
    let name = a.prior.file_stem().map_or("bipp".into(), |s| s.to_string_lossy().into_owned());
    let csv = write_curve(g, &g.out.join(&name), &prior, &a.t_grid.0, a.strategy.into())?;
    let chart = bipp_chart(format!("BIPP bounds: {name}"), curve_series(&csv, &name)?, switch_markers(&csv, &prior)?);
    write_chart(&g.out.join(format!("{name}.svg")), &chart)?;
    println!("{}", g.out.join(&name).display());
    Ok(())
}
