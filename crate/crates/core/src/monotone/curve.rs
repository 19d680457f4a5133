//! Piecewise closed-form curves and the integral functionals `φ_t`, `ψ`.

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::monotone::step::MonotoneStep;

/// `c0 + lin·y + sqrt·√y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub c0: f64,
    pub lin: f64,
    pub sqrt: f64,
}

impl Piece {
    pub fn affine(c0: f64, lin: f64) -> Self {
        Piece { c0, lin, sqrt: 0.0 }
    }

    pub fn eval(&self, y: f64) -> f64 {
        let mut v = self.c0 + self.lin * y;
        if self.sqrt != 0.0 {
            v += self.sqrt * y.sqrt();
        }
        v
    }

    /// Derivative, `+∞`/`−∞` at `y = 0` for a nonzero square-root term.
    pub fn slope(&self, y: f64) -> f64 {
        if self.sqrt == 0.0 {
            self.lin
        } else {
            self.lin + self.sqrt / (2.0 * y.sqrt())
        }
    }
}

/// Behavior outside the knot range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    PosInf,
    NegInf,
    /// Continue the adjacent piece.
    Extend,
}

/// A continuous curve given piecewise on `[knots[i], knots[i+1]]`. The
/// outer knots may be infinite.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseCurve {
    knots: Vec<f64>,
    pieces: Vec<Piece>,
    below: Tail,
    above: Tail,
}

impl PiecewiseCurve {
    pub fn new(knots: Vec<f64>, pieces: Vec<Piece>, below: Tail, above: Tail) -> Result<Self> {
        if pieces.is_empty() || knots.len() != pieces.len() + 1 {
            return Err(Error::InvalidArgument(format!(
                "{} pieces need {} knots, got {}",
                pieces.len(),
                pieces.len() + 1,
                knots.len()
            )));
        }
        if knots.iter().any(|k| k.is_nan()) || knots.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("knots must be ascending".into()));
        }
        Ok(PiecewiseCurve {
            knots,
            pieces,
            below,
            above,
        })
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.knots[0], *self.knots.last().unwrap())
    }

    pub fn eval(&self, y: f64) -> Ext {
        let (lo, hi) = self.domain();
        if y < lo {
            return match self.below {
                Tail::PosInf => Ext::PosInf,
                Tail::NegInf => Ext::NegInf,
                Tail::Extend => Ext::Finite(self.pieces[0].eval(y)),
            };
        }
        if y > hi {
            return match self.above {
                Tail::PosInf => Ext::PosInf,
                Tail::NegInf => Ext::NegInf,
                Tail::Extend => Ext::Finite(self.pieces.last().unwrap().eval(y)),
            };
        }
        // last knot <= y among the interior ones picks the piece
        let i = self.knots[1..self.knots.len() - 1].partition_point(|&k| k <= y);
        Ext::Finite(self.pieces[i].eval(y))
    }

    /// Like [`eval`](Self::eval), but arguments within `rtol` beyond the
    /// finite domain end are pulled back onto it. Densities of a state are
    /// bounded by the total spectral mass only up to rounding.
    pub fn eval_clamped(&self, y: f64, rtol: f64) -> Ext {
        let hi = *self.knots.last().unwrap();
        if y > hi && hi.is_finite() && y <= hi + rtol * hi.abs().max(1.0) {
            return self.eval(hi);
        }
        self.eval(y)
    }

    /// Largest jump between adjacent pieces at interior knots.
    pub fn continuity_defect(&self) -> f64 {
        (1..self.pieces.len())
            .map(|i| {
                let k = self.knots[i];
                (self.pieces[i - 1].eval(k) - self.pieces[i].eval(k)).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Convexity on the finite domain: each piece convex (`sqrt ≤ 0`) and
    /// one-sided slopes nondecreasing across knots.
    pub fn is_convex(&self, tol: f64) -> bool {
        if self.pieces.iter().any(|p| p.sqrt > 0.0) {
            return false;
        }
        (1..self.pieces.len()).all(|i| {
            let k = self.knots[i];
            if k <= 0.0 {
                return true;
            }
            self.pieces[i].slope(k) >= self.pieces[i - 1].slope(k) - tol
        })
    }

    /// Concavity: affine pieces with nonincreasing slopes.
    pub fn is_concave(&self, tol: f64) -> bool {
        self.pieces.iter().all(|p| p.sqrt == 0.0)
            && self.pieces.windows(2).all(|w| w[1].lin <= w[0].lin + tol)
    }

    /// Dense samples on `[lo, hi]` for plotting.
    pub fn samples(&self, lo: f64, hi: f64, n: usize) -> Vec<(f64, Ext)> {
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

fn require_operator_derived(f: &MonotoneStep) -> Result<()> {
    if !f.is_operator_derived() {
        return Err(Error::InvalidStep(
            "integral functionals need a step function with base value 0".into(),
        ));
    }
    Ok(())
}

/// `φ_t(y) = ∫_0^y F^{-1}(t²u) du`, exactly piecewise affine with knots at
/// `v_k / t²` and `+∞` beyond `sup F / t²`.
pub fn phi(f: &MonotoneStep, t: f64) -> Result<PiecewiseCurve> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidArgument(format!("t = {t} outside (0, 1]")));
    }
    require_operator_derived(f)?;
    let b = f.breakpoints();
    let v = f.values();
    let t2 = t * t;
    let mut knots = vec![0.0];
    let mut pieces = Vec::new();
    // value at the left end of the current piece
    let mut acc = 0.0;
    for j in 1..v.len() {
        let lo = v[j - 1] / t2;
        let hi = v[j] / t2;
        if hi <= lo {
            continue;
        }
        pieces.push(Piece::affine(acc - b[j - 1] * lo, b[j - 1]));
        acc += b[j - 1] * (hi - lo);
        knots.push(hi);
    }
    if pieces.is_empty() {
        // F ≡ 0: φ(0) = 0 and +∞ for y > 0
        return PiecewiseCurve::new(vec![0.0, 0.0], vec![Piece::affine(0.0, 0.0)], Tail::Extend, Tail::PosInf);
    }
    PiecewiseCurve::new(knots, pieces, Tail::Extend, Tail::PosInf)
}

/// `ψ(y) = ∫_0^1 φ_t(y) dt`. Integrating `(y − c/t²)₊` over `t` gives
/// `(√y − √c)²₊`, hence on `[v_{j−1}, v_j]`
/// `ψ(y) = b_j·y − 2Σ_{k<j} Δb_k √v_k·√y + Σ_{k<j} Δb_k v_k`
/// with `Δb_k = b_{k+1} − b_k`, and `+∞` beyond `sup F`.
pub fn psi(f: &MonotoneStep) -> Result<PiecewiseCurve> {
    require_operator_derived(f)?;
    let b = f.breakpoints();
    let v = f.values();
    let mut knots = vec![0.0];
    let mut pieces = Vec::new();
    let mut c0 = 0.0;
    let mut sq = 0.0;
    for j in 1..v.len() {
        if j >= 2 {
            let db = b[j - 1] - b[j - 2];
            c0 += db * v[j - 1];
            sq -= 2.0 * db * v[j - 1].sqrt();
        }
        if v[j] <= v[j - 1] {
            continue;
        }
        pieces.push(Piece {
            c0,
            lin: b[j - 1],
            sqrt: sq,
        });
        knots.push(v[j]);
    }
    if pieces.is_empty() {
        return PiecewiseCurve::new(vec![0.0, 0.0], vec![Piece::affine(0.0, 0.0)], Tail::Extend, Tail::PosInf);
    }
    PiecewiseCurve::new(knots, pieces, Tail::Extend, Tail::PosInf)
}

/// `k·φ(y/k)` for `k > 0`, the homogeneous rescaling used by every bound
/// of the form `‖ρ‖ φ(τ(ρ)/‖ρ‖)`.
pub fn perspective(curve: &PiecewiseCurve, k: f64, y: f64) -> Ext {
    curve.eval(y / k).scale(k)
}
