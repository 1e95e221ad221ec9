//! CSV exports of a mission run.

use std::io::Write;

use serde::Serialize;

use super::{Decision, DecisionRecord, Event};

#[derive(Serialize)]
struct DecisionRow<'a> {
    chain: usize,
    attempt: usize,
    configs_evaluated: usize,
    feasible_count: usize,
    chosen_config: &'a str,
    r1_lo: f64,
    r1_hi: f64,
    r2_lo: f64,
    r2_hi: f64,
    wall_ms: f64,
}

/// One row per decision. `chosen_config` is the bit string of the chosen
/// configuration (current chain first) or `skip`; the requirement columns
/// belong to the chosen configuration, or to configuration 1 on a skip.
pub fn write_decisions_csv<W: Write>(out: W, decisions: &[DecisionRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for d in decisions {
        let chosen = match &d.decision {
            Decision::Clean(c) => c.to_string(),
            Decision::Skip => "skip".to_string(),
        };
        let shown = d.reported();
        w.serialize(DecisionRow {
            chain: d.chain,
            attempt: d.attempt,
            configs_evaluated: d.checks.len(),
            feasible_count: d.feasible_count(),
            chosen_config: &chosen,
            r1_lo: shown.r1.lo,
            r1_hi: shown.r1.hi,
            r2_lo: shown.r2.lo,
            r2_hi: shown.r2.hi,
            wall_ms: d.wall_ms,
        })?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_events_csv<W: Write>(out: W, events: &[Event]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for e in events {
        w.serialize(e)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mission::{run_mission, MissionSpec};

    #[test]
    fn csv_headers_and_row_counts() {
        let out = run_mission(&MissionSpec { seed: 1, ..MissionSpec::default() }).unwrap();
        let mut buf = Vec::new();
        write_decisions_csv(&mut buf, &out.decisions).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(
            lines.next().unwrap(),
            "chain,attempt,configs_evaluated,feasible_count,chosen_config,r1_lo,r1_hi,r2_lo,r2_hi,wall_ms"
        );
        assert_eq!(lines.count(), out.decisions.len());

        let mut buf = Vec::new();
        write_events_csv(&mut buf, &out.events).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("time,state,event,energy\n"));
        assert_eq!(text.lines().count(), out.events.len() + 1);
    }
}
