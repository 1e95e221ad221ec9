//! Exposure-time grids given on the command line.

use std::str::FromStr;

/// `lin:START:STOP:N`, `log:START:STOP:N` (both ends included) or
/// `list:T1,T2,...`.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeGrid(pub Vec<f64>);

impl FromStr for TimeGrid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| format!("grid {s:?} needs a lin:, log: or list: prefix"))?;
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number {x:?} in grid: {e}"));
        let points = match kind {
            "list" => rest.split(',').filter(|x| !x.trim().is_empty()).map(num).collect::<Result<Vec<_>, _>>()?,
            "lin" | "log" => {
                let parts: Vec<&str> = rest.split(':').collect();
                let [a, b, n] = parts[..] else {
                    return Err(format!("grid {s:?} must be {kind}:START:STOP:N"));
                };
                let (a, b) = (num(a)?, num(b)?);
                let n: usize = n.trim().parse().map_err(|e| format!("bad point count {n:?}: {e}"))?;
                if kind == "log" && !(a > 0.0 && b > 0.0) {
                    return Err("log grid ends must be positive".into());
                }
                let (a, b) = if kind == "log" { (a.log10(), b.log10()) } else { (a, b) };
                let at = |i: usize| match n {
                    1 => a,
                    _ => a + (b - a) * i as f64 / (n - 1) as f64,
                };
                (0..n).map(|i| if kind == "log" { 10f64.powf(at(i)) } else { at(i) }).collect()
            }
            other => return Err(format!("unknown grid kind {other:?}")),
        };
        if points.is_empty() {
            return Err("time grid is empty".into());
        }
        if let Some(t) = points.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(format!("grid point {t} must be finite and non-negative"));
        }
        Ok(TimeGrid(points))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!("lin:0:10:3".parse::<TimeGrid>().unwrap().0, vec![0.0, 5.0, 10.0]);
        let log = "log:1:1000:4".parse::<TimeGrid>().unwrap().0;
        assert!((log[1] - 10.0).abs() < 1e-9 && (log[3] - 1000.0).abs() < 1e-9);
        assert_eq!("list:1, 2.5,4".parse::<TimeGrid>().unwrap().0, vec![1.0, 2.5, 4.0]);
        for bad in ["list:", "lin:0:1:0", "log:0:1:5", "grid:1", "1,2", "list:-1"] {
            assert!(bad.parse::<TimeGrid>().is_err(), "{bad}");
        }
    }
}
