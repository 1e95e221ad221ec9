//! Property syntax.
//!
//! ```text
//! prop   := pquery | rquery
//! pquery := "P" (cmp number | "=?") "[" path "]"
//! rquery := "R" "{" '"' name '"' "}" (cmp number | "=?") "[" "F" label "]"
//! path   := "F" [ "<=" number ] label | label "U" [ "<=" number ] label
//! cmp    := "<=" | "<" | ">=" | ">"
//! label  := '"' string '"'
//! ```

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparison {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = ">")]
    Gt,
}

impl Comparison {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Comparison::Le => value <= bound,
            Comparison::Lt => value < bound,
            Comparison::Ge => value >= bound,
            Comparison::Gt => value > bound,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Comparison::Le => "<=",
            Comparison::Lt => "<",
            Comparison::Ge => ">=",
            Comparison::Gt => ">",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub cmp: Comparison,
    pub bound: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum QueryKind {
    /// `P[F target]` or `P[guard U target]`.
    ProbReach,
    /// `P[F<=t target]` or `P[guard U<=t target]`.
    ProbBoundedUntil,
    /// `R{name}[F target]`.
    RewardReach,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Property {
    pub kind: QueryKind,
    pub target: String,
    /// `None` means the guard is `true` (the `F` form).
    pub guard: Option<String>,
    pub time_bound: Option<f64>,
    pub reward: Option<String>,
    /// `None` for `=?` queries.
    pub threshold: Option<Threshold>,
}

impl Property {
    pub fn prob_reach(target: impl Into<String>) -> Self {
        Self {
            kind: QueryKind::ProbReach,
            target: target.into(),
            guard: None,
            time_bound: None,
            reward: None,
            threshold: None,
        }
    }

    pub fn bounded_until(guard: Option<String>, target: impl Into<String>, t: f64) -> Self {
        Self { kind: QueryKind::ProbBoundedUntil, guard, time_bound: Some(t), ..Self::prob_reach(target) }
    }

    pub fn reward_reach(reward: impl Into<String>, target: impl Into<String>) -> Self {
        Self { kind: QueryKind::RewardReach, reward: Some(reward.into()), ..Self::prob_reach(target) }
    }

    pub fn with_threshold(mut self, cmp: Comparison, bound: f64) -> Self {
        self.threshold = Some(Threshold { cmp, bound });
        self
    }

    pub fn is_probability(&self) -> bool {
        self.kind != QueryKind::RewardReach
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.reward {
            Some(name) => write!(f, "R{{\"{name}\"}}")?,
            None => f.write_str("P")?,
        }
        match self.threshold {
            Some(Threshold { cmp, bound }) => write!(f, "{}{}", cmp.symbol(), bound)?,
            None => f.write_str("=?")?,
        }
        f.write_str(" [ ")?;
        match &self.guard {
            Some(guard) => write!(f, "\"{guard}\" U")?,
            None => f.write_str("F")?,
        }
        if let Some(t) = self.time_bound {
            write!(f, "<={t}")?;
        }
        write!(f, " \"{}\" ]", self.target)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("column {column}: {message}")]
pub struct PropertyParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn new(text: &str) -> Self {
        Self { chars: text.chars().collect(), pos: 0 }
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, PropertyParseError> {
        Err(PropertyParseError { column: self.pos + 1, message: message.into() })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        let end = self.pos + token.chars().count();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(token.chars()) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), PropertyParseError> {
        if self.eat(token) {
            Ok(())
        } else {
            self.error(format!("expected `{token}`"))
        }
    }

    fn quoted(&mut self, what: &str) -> Result<String, PropertyParseError> {
        if self.peek() != Some('"') {
            return self.error(format!("expected quoted {what}"));
        }
        let start = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            match self.chars.get(self.pos) {
                Some('"') => {
                    self.pos += 1;
                    break;
                }
                Some(c) => {
                    out.push(*c);
                    self.pos += 1;
                }
                None => {
                    self.pos = start;
                    return self.error(format!("unterminated {what}"));
                }
            }
        }
        if out.is_empty() {
            self.pos = start;
            return self.error(format!("empty {what}"));
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<f64, PropertyParseError> {
        self.skip_ws();
        let start = self.pos;
        while self
            .chars
            .get(self.pos)
            .is_some_and(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
        {
            self.pos += 1;
        }
        let token: String = self.chars[start..self.pos].iter().collect();
        match token.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => {
                self.pos = start;
                self.error("expected a finite number")
            }
        }
    }

    /// `cmp number` or `=?`.
    fn bound(&mut self) -> Result<Option<Threshold>, PropertyParseError> {
        if self.eat("=?") {
            return Ok(None);
        }
        let cmp = if self.eat("<=") {
            Comparison::Le
        } else if self.eat(">=") {
            Comparison::Ge
        } else if self.eat("<") {
            Comparison::Lt
        } else if self.eat(">") {
            Comparison::Gt
        } else {
            return self.error("expected `=?` or a comparison");
        };
        Ok(Some(Threshold { cmp, bound: self.number()? }))
    }

    fn time_bound(&mut self) -> Result<Option<f64>, PropertyParseError> {
        if self.eat("<=") {
            let at = self.pos;
            let t = self.number()?;
            if t < 0.0 {
                self.pos = at;
                return self.error("time bound must be non-negative");
            }
            Ok(Some(t))
        } else {
            Ok(None)
        }
    }

    fn property(&mut self) -> Result<Property, PropertyParseError> {
        let prop = if self.eat("P") {
            let threshold = self.bound()?;
            self.expect("[")?;
            let (guard, time_bound, target) = if self.eat("F") {
                let t = self.time_bound()?;
                (None, t, self.quoted("label")?)
            } else {
                let guard = self.quoted("label")?;
                self.expect("U")?;
                let t = self.time_bound()?;
                (Some(guard), t, self.quoted("label")?)
            };
            self.expect("]")?;
            let kind = if time_bound.is_some() { QueryKind::ProbBoundedUntil } else { QueryKind::ProbReach };
            Property { kind, target, guard, time_bound, reward: None, threshold }
        } else if self.eat("R") {
            self.expect("{")?;
            let reward = self.quoted("reward name")?;
            self.expect("}")?;
            let threshold = self.bound()?;
            self.expect("[")?;
            self.expect("F")?;
            let target = self.quoted("label")?;
            self.expect("]")?;
            Property {
                kind: QueryKind::RewardReach,
                target,
                guard: None,
                time_bound: None,
                reward: Some(reward),
                threshold,
            }
        } else {
            return self.error("expected `P` or `R`");
        };
        if self.peek().is_some() {
            return self.error("unexpected trailing input");
        }
        Ok(prop)
    }
}

pub fn parse_property(text: &str) -> Result<Property, PropertyParseError> {
    Parser::new(text).property()
}

impl FromStr for Property {
    type Err = PropertyParseError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        parse_property(text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_one_requirements() {
        let r1 = parse_property(r#"P<=0.05 [ F "damage" ]"#).unwrap();
        assert_eq!(r1.kind, QueryKind::ProbReach);
        assert_eq!(r1.threshold, Some(Threshold { cmp: Comparison::Le, bound: 0.05 }));
        assert_eq!(r1.target, "damage");

        let r2 = parse_property(r#"R{"energy"}=? [ F "finish" ]"#).unwrap();
        assert_eq!(r2.kind, QueryKind::RewardReach);
        assert_eq!(r2.reward.as_deref(), Some("energy"));
        assert_eq!(r2.threshold, None);
    }

    #[test]
    fn bounded_eventually_has_true_guard() {
        let p = parse_property(r#"P=? [ F<=2.0 "a" ]"#).unwrap();
        assert_eq!(p.kind, QueryKind::ProbBoundedUntil);
        assert_eq!(p.guard, None);
        assert_eq!(p.time_bound, Some(2.0));
    }

    #[test]
    fn until_forms() {
        let p = parse_property(r#"P>0.5 ["safe" U "goal"]"#).unwrap();
        assert_eq!((p.kind, p.guard.as_deref()), (QueryKind::ProbReach, Some("safe")));
        let q = parse_property(r#"P>=0.5 ["safe" U<=3 "goal"]"#).unwrap();
        assert_eq!((q.kind, q.time_bound), (QueryKind::ProbBoundedUntil, Some(3.0)));
    }

    #[test]
    fn pretty_print_round_trips() {
        for text in [
            r#"P<=0.05 [ F "damage" ]"#,
            r#"R{"energy"}<125.5 [ F "finish" ]"#,
            r#"P=? [ F<=2.0 "a" ]"#,
            r#"P>1e-7 [ "x y" U<=0.1 "z" ]"#,
            r#"R{"time"}>=3 [ F "done" ]"#,
        ] {
            let p = parse_property(text).unwrap();
            assert_eq!(parse_property(&p.to_string()).unwrap(), p, "{p}");
        }
    }

    #[test]
    fn errors_report_column() {
        let e = parse_property(r#"P<=0.05 [ G "damage" ]"#).unwrap_err();
        assert_eq!(e.column, 11);
        let e = parse_property(r#"Q=? [ F "a" ]"#).unwrap_err();
        assert_eq!(e.column, 1);
        assert!(parse_property(r#"P=? [ F "" ]"#).is_err());
        assert!(parse_property(r#"P=? [ F<=-1 "a" ]"#).is_err());
        assert!(parse_property(r#"P=? [ F "a" ] extra"#).is_err());
        assert!(parse_property(r#"R{"e"}=? [ "a" U "b" ]"#).is_err());
        assert!(parse_property(r#"P=? [ F "a"#).is_err());
    }
}
