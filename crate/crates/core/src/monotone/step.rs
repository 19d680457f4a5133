//! Nondecreasing left-continuous step functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext::Ext;

/// `F = v_0` on `(−∞, b_1]` and `F = v_k` on `(b_k, b_{k+1}]`, with
/// `b_{m+1} = +∞`. The value at a breakpoint is the one on its left.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneStep {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl MonotoneStep {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(Error::InvalidStep(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidStep("breakpoints must be finite".into()));
        }
        if breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidStep("breakpoints must be strictly ascending".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidStep("values must be finite".into()));
        }
        if values[0] < 0.0 {
            return Err(Error::InvalidStep("base value must be nonnegative".into()));
        }
        if values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidStep("values must be nondecreasing".into()));
        }
        Ok(MonotoneStep { breakpoints, values })
    }

    /// From `(position, jump)` pairs in any order; coincident positions are
    /// merged and zero jumps dropped.
    pub fn from_jumps(base: f64, jumps: &[(f64, f64)]) -> Result<Self> {
        let mut sorted: Vec<(f64, f64)> = jumps.to_vec();
        if sorted.iter().any(|(b, w)| !b.is_finite() || !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidStep("jumps must be finite and nonnegative".into()));
        }
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut breakpoints: Vec<f64> = Vec::new();
        let mut values = vec![base];
        for (b, w) in sorted {
            if w == 0.0 {
                continue;
            }
            let top = *values.last().unwrap();
            if breakpoints.last() == Some(&b) {
                *values.last_mut().unwrap() = top + w;
            } else {
                breakpoints.push(b);
                values.push(top + w);
            }
        }
        MonotoneStep::new(breakpoints, values)
    }

    /// The identically zero function.
    pub fn zero() -> Self {
        MonotoneStep {
            breakpoints: Vec::new(),
            values: vec![0.0],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn base(&self) -> f64 {
        self.values[0]
    }

    /// `sup F = v_m`.
    pub fn sup(&self) -> f64 {
        *self.values.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.breakpoints.is_empty()
    }

    /// True for the `v_0 = 0` functions produced by spectral measures.
    pub fn is_operator_derived(&self) -> bool {
        self.values[0] == 0.0
    }

    pub fn is_zero(&self) -> bool {
        self.sup() == 0.0
    }

    /// `F(λ)`, left-continuous.
    pub fn eval(&self, lambda: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&b| b < lambda)]
    }

    /// `F(λ⁺)`.
    pub fn eval_right(&self, lambda: f64) -> f64 {
        self.values[self.breakpoints.partition_point(|&b| b <= lambda)]
    }

    /// `F^{-1}(y) = sup{λ | F(λ) ≤ y}`: the breakpoint `b_k` of the first
    /// plateau with `v_k > y`, `+∞` once `y ≥ sup F`, `−∞` if `v_0 > y`.
    pub fn pseudo_inverse(&self, y: f64) -> Result<Ext> {
        if y.is_nan() || y < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "pseudo-inverse needs y >= 0, got {y}"
            )));
        }
        let k = self.values.partition_point(|&v| v <= y);
        Ok(if k == 0 {
            Ext::NegInf
        } else if k == self.values.len() {
            Ext::PosInf
        } else {
            Ext::Finite(self.breakpoints[k - 1])
        })
    }

    /// `λ ↦ F(λ − k)`: the spectral measure of `A + k`.
    pub fn shift(&self, k: f64) -> MonotoneStep {
        MonotoneStep {
            breakpoints: self.breakpoints.iter().map(|b| b + k).collect(),
            values: self.values.clone(),
        }
    }

    /// `λ ↦ F((λ − shift)/scale)`: the spectral measure of `scale·A + shift`.
    pub fn affine(&self, scale: f64, shift: f64) -> Result<MonotoneStep> {
        if !(scale > 0.0 && scale.is_finite() && shift.is_finite()) {
            return Err(Error::InvalidArgument("affine map needs scale > 0".into()));
        }
        MonotoneStep::new(
            self.breakpoints.iter().map(|b| scale * b + shift).collect(),
            self.values.clone(),
        )
    }

    /// `y ↦ k·F`.
    pub fn scale_values(&self, k: f64) -> Result<MonotoneStep> {
        MonotoneStep::new(
            self.breakpoints.clone(),
            self.values.iter().map(|v| k * v).collect(),
        )
    }

    /// Concavity of `F` on `[0, ∞)`: a step function is concave there only
    /// when it has no jump in `(0, ∞)`.
    pub fn is_concave_on_positive(&self) -> bool {
        self.breakpoints
            .iter()
            .zip(self.values.windows(2))
            .all(|(&b, w)| b <= 0.0 || w[1] == w[0])
    }

    /// Whether `λ ↦ F(λ)/λ` is nondecreasing on `(0, ∞)`. On a plateau with
    /// positive value the ratio strictly decreases, so this needs `F = 0`
    /// on `(0, ∞)`.
    pub fn ratio_nondecreasing_on_positive(&self) -> bool {
        self.eval_right(0.0) == 0.0 && self.sup() == 0.0
    }

    /// Dense samples `(λ, F(λ))` on a uniform grid.
    pub fn samples(&self, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n)
            .map(|i| {
                let x = if n == 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                };
                (x, self.eval(x))
            })
            .collect()
    }
}

/// JSON form: `[[b, v], …]` with base 0, or `{"base": v0, "steps": [[b, v], …]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum StepDoc {
    Pairs(Vec<[f64; 2]>),
    Based { base: f64, steps: Vec<[f64; 2]> },
}

impl StepDoc {
    pub fn to_step(&self) -> Result<MonotoneStep> {
        let (base, steps) = match self {
            StepDoc::Pairs(s) => (0.0, s),
            StepDoc::Based { base, steps } => (*base, steps),
        };
        let mut values = vec![base];
        values.extend(steps.iter().map(|p| p[1]));
        MonotoneStep::new(steps.iter().map(|p| p[0]).collect(), values)
    }

    pub fn from_step(f: &MonotoneStep) -> Self {
        let steps = f
            .breakpoints()
            .iter()
            .zip(&f.values()[1..])
            .map(|(&b, &v)| [b, v])
            .collect();
        if f.base() == 0.0 {
            StepDoc::Pairs(steps)
        } else {
            StepDoc::Based {
                base: f.base(),
                steps,
            }
        }
    }
}

pub fn parse_step(json: &str) -> Result<MonotoneStep> {
    serde_json::from_str::<StepDoc>(json)?.to_step()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_jump() -> MonotoneStep {
        MonotoneStep::new(vec![1.0, 3.0], vec![0.0, 1.0, 2.0]).unwrap()
    }

    #[test]
    fn pseudo_inverse_examples() {
        let f = MonotoneStep::new(vec![2.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(f.pseudo_inverse(0.5).unwrap(), Ext::Finite(2.0));
        assert_eq!(f.pseudo_inverse(1.0).unwrap(), Ext::PosInf);
        let g = two_jump();
        assert_eq!(g.pseudo_inverse(0.2).unwrap(), Ext::Finite(1.0));
        assert_eq!(g.pseudo_inverse(1.0).unwrap(), Ext::Finite(3.0));
        assert_eq!(g.pseudo_inverse(1.5).unwrap(), Ext::Finite(3.0));
        assert!(g.pseudo_inverse(-0.1).is_err());
        let based = MonotoneStep::new(vec![0.0], vec![0.5, 1.0]).unwrap();
        assert_eq!(based.pseudo_inverse(0.25).unwrap(), Ext::NegInf);
    }

    #[test]
    fn left_continuity() {
        let g = two_jump();
        assert_eq!(g.eval(1.0), 0.0);
        assert_eq!(g.eval_right(1.0), 1.0);
        assert_eq!(g.eval(3.0), 1.0);
        assert_eq!(g.eval(-1e9), 0.0);
        assert_eq!(g.eval(1e9), 2.0);
    }

    #[test]
    fn shift_moves_inverse() {
        let f = MonotoneStep::new(vec![2.0], vec![0.0, 1.0]).unwrap();
        assert_eq!(f.shift(3.0).pseudo_inverse(0.5).unwrap(), Ext::Finite(5.0));
    }

    #[test]
    fn jumps_merge_and_validation() {
        let f = MonotoneStep::from_jumps(0.0, &[(3.0, 1.0), (1.0, 0.5), (3.0, 0.5), (2.0, 0.0)]).unwrap();
        assert_eq!(f.breakpoints(), &[1.0, 3.0]);
        assert_eq!(f.values(), &[0.0, 0.5, 2.0]);
        assert!(MonotoneStep::new(vec![1.0, 1.0], vec![0.0, 1.0, 2.0]).is_err());
        assert!(MonotoneStep::new(vec![1.0], vec![1.0, 0.5]).is_err());
    }

    #[test]
    fn json_forms() {
        let f = parse_step("[[1, 1], [3, 2]]").unwrap();
        assert_eq!(f, two_jump());
        let g = parse_step(r#"{"base": 0.5, "steps": [[0, 1]]}"#).unwrap();
        assert_eq!(g.base(), 0.5);
        assert_eq!(StepDoc::from_step(&g).to_step().unwrap(), g);
        assert!(parse_step("[[1, 2], [0, 3]]").is_err());
    }
}
