//! Structured verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::ext::Ext;

/// Relative tolerance applied to `max(1, |lhs|, |rhs|)`.
pub const DEFAULT_RTOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    /// `lhs ≤ rhs`.
    Le,
    /// `lhs = rhs` up to the tolerance.
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Holds,
    Fails,
    /// Both sides infinite with the same sign: nothing is asserted.
    Vacuous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IneqReport {
    pub name: String,
    pub relation: Relation,
    pub lhs: Ext,
    pub rhs: Ext,
    /// `rhs − lhs` for `Le`, `−|rhs − lhs|` for `Eq`; absent when vacuous.
    pub slack: Option<Ext>,
    pub tol: f64,
    pub holds: bool,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub context: BTreeMap<String, Value>,
}

fn scale_of(lhs: Ext, rhs: Ext) -> f64 {
    let mut s = 1.0f64;
    for v in [lhs, rhs] {
        if let Ext::Finite(x) = v {
            s = s.max(x.abs());
        }
    }
    s
}

impl IneqReport {
    /// `lhs ≤ rhs` with the default tolerance.
    pub fn le(name: impl Into<String>, lhs: impl Into<Ext>, rhs: impl Into<Ext>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        IneqReport::le_tol(name, lhs, rhs, DEFAULT_RTOL * scale_of(lhs, rhs))
    }

    pub fn le_tol(name: impl Into<String>, lhs: impl Into<Ext>, rhs: impl Into<Ext>, tol: f64) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let slack = rhs.checked_add(-lhs);
        let (holds, verdict) = match (lhs, rhs, slack) {
            (Ext::PosInf, Ext::PosInf, _) | (Ext::NegInf, Ext::NegInf, _) => (true, Verdict::Vacuous),
            (_, _, Some(s)) if s >= Ext::Finite(-tol) => (true, Verdict::Holds),
            _ => (false, Verdict::Fails),
        };
        IneqReport {
            name: name.into(),
            relation: Relation::Le,
            lhs,
            rhs,
            slack: if verdict == Verdict::Vacuous { None } else { slack },
            tol,
            holds,
            verdict,
            context: BTreeMap::new(),
        }
    }

    /// `lhs ≤ rhs` with the default tolerance widened by a discretization
    /// margin, which is recorded in the context.
    pub fn le_margin(name: impl Into<String>, lhs: impl Into<Ext>, rhs: impl Into<Ext>, margin: f64) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        IneqReport::le_tol(name, lhs, rhs, DEFAULT_RTOL * scale_of(lhs, rhs) + margin.max(0.0)).with("margin", margin)
    }

    /// `|lhs − rhs| ≤ tol`.
    pub fn eq_tol(name: impl Into<String>, lhs: impl Into<Ext>, rhs: impl Into<Ext>, tol: f64) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        let (slack, holds, verdict) = match (lhs, rhs) {
            (Ext::Finite(a), Ext::Finite(b)) => {
                let s = -(a - b).abs();
                (Some(Ext::Finite(s)), s >= -tol, if s >= -tol { Verdict::Holds } else { Verdict::Fails })
            }
            (a, b) if a == b => (None, true, Verdict::Vacuous),
            _ => (Some(Ext::NegInf), false, Verdict::Fails),
        };
        IneqReport {
            name: name.into(),
            relation: Relation::Eq,
            lhs,
            rhs,
            slack,
            tol,
            holds,
            verdict,
            context: BTreeMap::new(),
        }
    }

    /// Identity with the default tolerance.
    pub fn eq(name: impl Into<String>, lhs: impl Into<Ext>, rhs: impl Into<Ext>) -> Self {
        let (lhs, rhs) = (lhs.into(), rhs.into());
        IneqReport::eq_tol(name, lhs, rhs, DEFAULT_RTOL * scale_of(lhs, rhs))
    }

    /// Attaches a context entry.
    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.context.insert(key.to_string(), v);
        self
    }

    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Fails
    }

    /// Finite slack, `+∞`/`−∞` mapped to the float infinities; NaN for
    /// vacuous verdicts.
    pub fn slack_f64(&self) -> f64 {
        self.slack.map(Ext::to_f64).unwrap_or(f64::NAN)
    }

    /// `slack + tol`: negative exactly when the verdict fails.
    pub fn margin(&self) -> f64 {
        match self.slack {
            Some(s) => s.to_f64() + self.tol,
            None => f64::INFINITY,
        }
    }
}

/// The report closest to failing (smallest `slack + tol`).
pub fn tightest(reports: impl IntoIterator<Item = IneqReport>) -> Option<IneqReport> {
    reports
        .into_iter()
        .min_by(|a, b| a.margin().total_cmp(&b.margin()))
}
