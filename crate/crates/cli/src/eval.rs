//! `eval fig4` and `eval fig5`: estimator evaluation curves.

use std::path::Path;

use clap::{Args, Subcommand};

use robustqv::bipp::{PartialPrior, Strategy};
use robustqv::ipsp::GammaPriorSet;

use crate::bipp_cmd::{bipp_chart, curve_series, switch_markers, write_curve as write_bipp};
use crate::error::CmdResult;
use crate::grid::TimeGrid;
use crate::ipsp_cmd::{bounds_series, ipsp_chart, report_times, write_curve as write_ipsp};
use crate::output::write_chart;
use crate::Global;

#[derive(Subcommand, Debug)]
pub enum EvalCommand {
    /// BIPP bound curves for the four partial-prior families.
    Fig4(Fig4Args),
    /// IPSP bound curves on seeded event streams.
    Fig5(Fig5Args),
}

#[derive(Args, Debug)]
pub struct Fig4Args {
    /// Panels to regenerate (a, b, c, d); all by default.
    #[arg(long, value_delimiter = ',')]
    pub panels: Vec<char>,
    #[arg(long, default_value = "log:1:1e6:121")]
    pub t_grid: TimeGrid,
}

#[derive(Args, Debug)]
pub struct Fig5Args {
    /// Panels to regenerate (a, b); all by default.
    #[arg(long, value_delimiter = ',')]
    pub panels: Vec<char>,
    #[arg(long, default_value_t = 10_000.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 200)]
    pub points: usize,
}

const INF: f64 = f64::INFINITY;

/// Named priors of one BIPP panel.
pub fn fig4_priors(panel: char) -> Vec<(String, PartialPrior<f64>)> {
    let m3 = |t1: f64, t2: f64, e1: f64, e2: f64| {
        PartialPrior::new(vec![0.0, e1, e2, INF], vec![t1, t2, 1.0 - t1 - t2]).expect("valid panel prior")
    };
    let thetas = [0.1, 0.3, 0.6, 0.8];
    match panel {
        'a' => thetas.iter().map(|&t1| (format!("theta1_{t1}"), m3(t1, 0.1, 1.0 / 5000.0, 1.0 / 1000.0))).collect(),
        'b' => thetas.iter().map(|&t2| (format!("theta2_{t2}"), m3(0.1, t2, 1.0 / 5000.0, 1.0 / 1000.0))).collect(),
        'c' => [(500.0, 100.0), (1000.0, 500.0), (2000.0, 1000.0), (5000.0, 2000.0)]
            .iter()
            .map(|&(d1, d2)| (format!("eps_1_{d1}_1_{d2}"), m3(0.3, 0.3, 1.0 / d1, 1.0 / d2)))
            .collect(),
        'd' => [0.3, 0.5]
            .iter()
            .flat_map(|&t1| {
                [500.0, 5000.0].map(|d| {
                    let prior = PartialPrior::new(vec![0.0, 1.0 / d, INF], vec![t1, 1.0 - t1]).expect("valid panel prior");
                    (format!("theta1_{t1}_eps1_1_{d}"), prior)
                })
            })
            .collect(),
        _ => Vec::new(),
    }
}

fn panels(requested: &[char], all: &[char]) -> CmdResult<Vec<char>> {
    if requested.is_empty() {
        return Ok(all.to_vec());
    }
    match requested.iter().find(|p| !all.contains(p)) {
        Some(p) => Err(crate::error::usage_error(format!("unknown panel '{p}'"))),
        None => Ok(requested.to_vec()),
    }
}

fn fig4(g: &Global, a: Fig4Args) -> CmdResult {
    for panel in panels(&a.panels, &['a', 'b', 'c', 'd'])? {
        let dir = g.out.join("fig4").join(panel.to_string());
        let (mut series, mut markers) = (Vec::new(), Vec::new());
        for (name, prior) in fig4_priors(panel) {
            let csv = write_bipp(g, &dir.join(&name), &prior, &a.t_grid.0, Strategy::Auto)?;
            series.extend(curve_series(&csv, &name)?);
            markers.extend(switch_markers(&csv, &prior)?);
        }
        write_chart(&dir.join("panel.svg"), &bipp_chart(format!("BIPP panel ({panel})"), series, markers))?;
        println!("{}", dir.display());
    }
    Ok(())
}

/// Named (t0, λ0) prior boxes of one IPSP panel, with the true rate of each.
pub fn fig5_priors(panel: char) -> Vec<(String, GammaPriorSet<f64>, f64)> {
    let set = |t0: (f64, f64), l0: (f64, f64)| GammaPriorSet::new(t0, l0).expect("valid panel prior");
    match panel {
        'a' => {
            let rows = [
                ("contains", (2.0, 4.0), (1.0, 9.0)),
                ("over", (4.0, 6.0), (3.5, 12.0)),
                ("under", (1.0, 2.0), (0.3, 2.5)),
            ];
            let columns = [(5.0, 15.0), (75.0, 125.0), (750.0, 1250.0), (1500.0, 2500.0)];
            let mut out = Vec::new();
            for (row, narrow, wide) in rows {
                for t0 in columns {
                    let col = format!("t0_{}_{}", t0.0, t0.1);
                    out.push((format!("{row}_{col}_narrow"), set(t0, narrow), 3.0));
                    out.push((format!("{row}_{col}_wide"), set(t0, wide), 3.0));
                }
            }
            out
        }
        'b' => [0.03, 0.3, 3.0, 30.0]
            .iter()
            .flat_map(|&rate| {
                [
                    (format!("rate_{rate}_narrow"), set((1000.0, 1000.0), (2.0 * rate / 3.0, 4.0 * rate / 3.0)), rate),
                    (format!("rate_{rate}_wide"), set((1000.0, 1000.0), (rate / 3.0, 3.0 * rate)), rate),
                ]
            })
            .collect(),
        _ => Vec::new(),
    }
}

/// Stem shared by the narrow and wide curves of one plot.
fn plot_key(name: &str) -> &str {
    name.trim_end_matches("_narrow").trim_end_matches("_wide")
}

fn fig5(g: &Global, a: Fig5Args) -> CmdResult {
    crate::ipsp_cmd::check_stream(1.0, a.horizon, a.points)?;
    let times = report_times(a.horizon, a.points);
    let seed = g.seed.unwrap_or(0);
    for panel in panels(&a.panels, &['a', 'b'])? {
        let dir = g.out.join("fig5").join(panel.to_string());
        let priors = fig5_priors(panel);
        for pair in priors.chunks(2) {
            let key = plot_key(&pair[0].0);
            let mut series = Vec::new();
            for (name, prior, rate) in pair {
                // Both curves of a plot see the same event stream.
                let csv = write_ipsp(g, &dir.join(name), prior, *rate, &times, seed)?;
                series.extend(bounds_series(&csv, name, name.ends_with("_wide"))?);
            }
            let rate = pair[0].2;
            series.push(crate::svg::Series { label: "rate".into(), points: vec![(0.0, rate), (a.horizon, rate)], dashed: true });
            write_plot(&dir, key, series)?;
        }
        println!("{}", dir.display());
    }
    Ok(())
}

fn write_plot(dir: &Path, key: &str, series: Vec<crate::svg::Series>) -> CmdResult {
    write_chart(&dir.join(format!("{key}.svg")), &ipsp_chart(format!("IPSP bounds: {key}"), series))
}

pub fn run(g: &Global, e: EvalCommand) -> CmdResult {
    match e {
        EvalCommand::Fig4(a) => fig4(g, a),
        EvalCommand::Fig5(a) => fig5(g, a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn panel_families_have_the_expected_sizes() {
        assert_eq!(['a', 'b', 'c', 'd'].map(|p| fig4_priors(p).len()), [4, 4, 4, 4]);
        assert!(fig4_priors('d').iter().all(|(_, p)| p.m() == 2));
        assert_eq!(fig5_priors('a').len(), 24);
        assert_eq!(fig5_priors('b').len(), 8);
        for (_, prior, rate) in fig5_priors('b') {
            assert!(prior.lambda0().lo < rate && rate < prior.lambda0().hi);
        }
    }
}
