//! Sublevel sets `{σ̂ < λ}` of a stencil symbol on the torus `[−π, π)ᵈ`.
//!
//! The innermost axis is handled exactly: roots of the one-variable
//! trigonometric polynomial are bracketed and bisected, and integrals of
//! `cos(mθ + φ)` over the resulting intervals use antiderivatives. Outer
//! axes use composite Gauss–Legendre.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::amenable::stencil::Stencil;
use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::quad::{bisect, golden_max, GaussRule};

/// `c cos(mθ + φ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrigTerm {
    pub m: i64,
    pub c: f64,
    pub phase: f64,
}

impl TrigTerm {
    pub fn eval(&self, theta: f64) -> f64 {
        self.c * (self.m as f64 * theta + self.phase).cos()
    }

    /// `∫_a^b c cos(mθ + φ) dθ`.
    pub fn integrate(&self, a: f64, b: f64) -> f64 {
        if self.m == 0 {
            self.c * self.phase.cos() * (b - a)
        } else {
            let m = self.m as f64;
            self.c * ((m * b + self.phase).sin() - (m * a + self.phase).sin()) / m
        }
    }
}

fn eval_terms(terms: &[TrigTerm], theta: f64) -> f64 {
    terms.iter().map(|t| t.eval(theta)).sum()
}

fn wrap(theta: f64) -> f64 {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t < -PI {
        -PI
    } else {
        t
    }
}

/// Maximal intervals of `[−π, π]` on which `Σ terms < λ`.
pub fn sublevel_intervals(terms: &[TrigTerm], lambda: f64) -> Vec<(f64, f64)> {
    let g = |t: f64| eval_terms(terms, t) - lambda;
    let mmax = terms.iter().map(|t| t.m.unsigned_abs()).max().unwrap_or(0) as usize;
    if mmax == 0 {
        return if g(0.0) < 0.0 { vec![(-PI, PI)] } else { Vec::new() };
    }
    let s = (32 * mmax).clamp(64, 1 << 14);
    let h = 2.0 * PI / s as f64;
    let xs: Vec<f64> = (0..s).map(|i| -PI + i as f64 * h).collect();
    let gs: Vec<f64> = xs.iter().map(|&x| g(x)).collect();
    let mut points: Vec<f64> = xs.clone();
    points.push(PI);
    // extrema between samples can dip across the level without a sign
    // change at the samples
    for i in 0..s {
        let (prev, next) = (gs[(i + s - 1) % s], gs[(i + 1) % s]);
        let v = gs[i];
        let is_min = v <= prev && v <= next && v > 0.0;
        let is_max = v >= prev && v >= next && v < 0.0;
        if is_min {
            let (x, fx) = golden_max(|t| -g(t), xs[i] - h, xs[i] + h, 1e-13);
            if -fx < 0.0 {
                points.push(wrap(x));
            }
        } else if is_max {
            let (x, fx) = golden_max(g, xs[i] - h, xs[i] + h, 1e-13);
            if fx > 0.0 {
                points.push(wrap(x));
            }
        }
    }
    points.sort_by(f64::total_cmp);
    points.dedup();
    let vals: Vec<f64> = points.iter().map(|&x| g(x)).collect();
    let mut cuts = vec![-PI];
    for i in 0..points.len() - 1 {
        let (a, b) = (points[i], points[i + 1]);
        if vals[i] == 0.0 {
            cuts.push(a);
        }
        if (vals[i] < 0.0 && vals[i + 1] > 0.0) || (vals[i] > 0.0 && vals[i + 1] < 0.0) {
            cuts.push(bisect(g, a, b));
        }
    }
    cuts.push(PI);
    cuts.dedup();
    let mut out: Vec<(f64, f64)> = Vec::new();
    for w in cuts.windows(2) {
        if w[1] > w[0] && g(0.5 * (w[0] + w[1])) < 0.0 {
            match out.last_mut() {
                Some(last) if last.1 == w[0] => last.1 = w[1],
                _ => out.push((w[0], w[1])),
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
struct Node {
    weight: f64,
    outer: Vec<f64>,
    intervals: Vec<(f64, f64)>,
}

/// Quadrature representation of `{σ̂ < λ}`.
#[derive(Debug, Clone)]
pub struct LevelSet {
    dim: usize,
    lambda: f64,
    nodes: Vec<Node>,
}

/// Nodes per Gauss–Legendre panel on outer axes.
pub const PANEL_NODES: usize = 16;

/// Default panel count per outer axis: `2^10` nodes for `d ≤ 2`, `2^8`
/// for `d = 3`, fewer beyond.
pub fn default_panels(dim: usize) -> usize {
    match dim {
        0..=2 => 64,
        3 => 16,
        _ => 4,
    }
}

fn inner_terms(stencil: &Stencil, outer: &[f64]) -> Vec<TrigTerm> {
    stencil
        .taps()
        .iter()
        .map(|(k, c)| {
            let (last, rest) = k.split_last().expect("dim ≥ 1");
            TrigTerm {
                m: *last,
                c: *c,
                phase: rest.iter().zip(outer).map(|(&a, &t)| a as f64 * t).sum(),
            }
        })
        .collect()
}

impl LevelSet {
    pub fn new(stencil: &Stencil, lambda: f64, panels: usize) -> Self {
        let d = stencil.dim();
        let rule = GaussRule::new(PANEL_NODES);
        let axis: Vec<(f64, f64)> = (0..panels.max(1))
            .flat_map(|p| {
                let w = 2.0 * PI / panels.max(1) as f64;
                let a = -PI + p as f64 * w;
                rule.mapped(a, a + w).collect::<Vec<_>>()
            })
            .collect();
        let mut outer: Vec<(f64, Vec<f64>)> = vec![(1.0, Vec::new())];
        for _ in 1..d {
            outer = outer
                .into_iter()
                .flat_map(|(w, pt)| {
                    axis.iter().map(move |&(x, wx)| {
                        let mut p = pt.clone();
                        p.push(x);
                        (w * wx, p)
                    })
                })
                .collect();
        }
        let nodes = outer
            .into_par_iter()
            .map(|(weight, pt)| {
                let terms = inner_terms(stencil, &pt);
                Node {
                    weight,
                    intervals: sublevel_intervals(&terms, lambda),
                    outer: pt,
                }
            })
            .collect();
        LevelSet { dim: d, lambda, nodes }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn norm(&self) -> f64 {
        (2.0 * PI).powi(-(self.dim as i32))
    }

    /// `(2π)^{-d} vol{σ̂ < λ}`.
    pub fn measure(&self) -> f64 {
        self.norm()
            * self
                .nodes
                .iter()
                .map(|n| n.weight * n.intervals.iter().map(|(a, b)| b - a).sum::<f64>())
                .sum::<f64>()
    }

    /// `(2π)^{-d} ∫_{σ̂<λ} σ̂ dθ`.
    pub fn symbol_integral(&self, stencil: &Stencil) -> f64 {
        self.norm()
            * self
                .nodes
                .par_iter()
                .map(|n| {
                    let terms = inner_terms(stencil, &n.outer);
                    n.weight
                        * n.intervals
                            .iter()
                            .map(|&(a, b)| terms.iter().map(|t| t.integrate(a, b)).sum::<f64>())
                            .sum::<f64>()
                })
                .sum::<f64>()
    }

    /// Kernel of `Π_λ` at offset `k`: `(2π)^{-d} ∫_{σ̂<λ} cos⟨k, θ⟩ dθ`.
    pub fn kernel(&self, k: &[i64]) -> f64 {
        let (last, rest) = k.split_last().expect("dim ≥ 1");
        self.norm()
            * self
                .nodes
                .iter()
                .map(|n| {
                    let t = TrigTerm {
                        m: *last,
                        c: 1.0,
                        phase: rest.iter().zip(&n.outer).map(|(&a, &x)| a as f64 * x).sum(),
                    };
                    n.weight * n.intervals.iter().map(|&(a, b)| t.integrate(a, b)).sum::<f64>()
                })
                .sum::<f64>()
    }
}

/// A quadrature value with a Richardson-style error estimate (difference
/// to the rule with half the panels; zero when the computation is exact).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Spectral data of a stencil operator on `ℓ²(ℤᵈ)`.
#[derive(Debug, Clone)]
pub struct FreeSpectrum {
    stencil: Stencil,
    panels: usize,
}

impl FreeSpectrum {
    pub fn new(stencil: Stencil) -> Self {
        let panels = default_panels(stencil.dim());
        FreeSpectrum { stencil, panels }
    }

    pub fn with_panels(stencil: Stencil, panels: usize) -> Self {
        FreeSpectrum {
            stencil,
            panels: panels.max(1),
        }
    }

    pub fn stencil(&self) -> &Stencil {
        &self.stencil
    }

    pub fn level_set(&self, lambda: f64) -> LevelSet {
        LevelSet::new(&self.stencil, lambda, self.panels)
    }

    fn estimate(&self, f: impl Fn(&LevelSet) -> f64, lambda: f64) -> Estimate {
        let value = f(&self.level_set(lambda));
        let error = if self.stencil.dim() == 1 {
            0.0
        } else {
            (value - f(&LevelSet::new(&self.stencil, lambda, (self.panels / 2).max(1)))).abs()
        };
        Estimate { value, error }
    }

    /// `F(λ) = (2π)^{-d} vol{σ̂ < λ}`.
    pub fn density(&self, lambda: f64) -> Estimate {
        self.estimate(LevelSet::measure, lambda)
    }

    /// `φ(F(λ)) = (2π)^{-d} ∫_{σ̂<λ} σ̂`.
    pub fn phi_at_level(&self, lambda: f64) -> Estimate {
        self.estimate(|ls| ls.symbol_integral(&self.stencil), lambda)
    }

    /// `Π_λ(k)`.
    pub fn kernel(&self, lambda: f64, k: &[i64]) -> Result<f64> {
        if k.len() != self.stencil.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.stencil.dim(),
                found: k.len(),
            });
        }
        Ok(self.level_set(lambda).kernel(k))
    }

    /// The level `μ` with `F(μ) = y`, by bisection.
    pub fn inverse(&self, y: f64) -> Result<Ext> {
        if !(y >= 0.0) {
            return Err(Error::InvalidArgument("density level must be nonnegative".into()));
        }
        let (lo, hi) = self.stencil.symbol_bounds();
        if y >= 1.0 {
            return Ok(if y > 1.0 { Ext::PosInf } else { Ext::Finite(hi) });
        }
        let f = |m: f64| self.level_set(m).measure() - y;
        Ok(Ext::Finite(bisect(f, lo - 1e-12, hi + 1e-12)))
    }

    /// `φ(y) = ∫_0^y F^{-1}(u) du`, evaluated as `∫_{σ̂<μ} σ̂` at the level
    /// `μ = F^{-1}(y)`.
    pub fn phi(&self, y: f64) -> Result<Ext> {
        Ok(match self.inverse(y)? {
            Ext::Finite(mu) => Ext::Finite(self.level_set(mu).symbol_integral(&self.stencil)),
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lap1() -> FreeSpectrum {
        FreeSpectrum::new(Stencil::laplacian(1).unwrap())
    }

    #[test]
    fn one_dimensional_laplacian_values() {
        let s = lap1();
        assert!((s.density(2.0).value - 0.5).abs() < 1e-14);
        assert!((s.phi_at_level(2.0).value - (PI - 2.0) / PI).abs() < 1e-14);
        assert!((s.density(4.0).value - 1.0).abs() < 1e-15);
        assert!((s.density(5.0).value - 1.0).abs() < 1e-15);
        assert_eq!(s.density(0.0).value, 0.0);
        assert_eq!(s.density(-1.0).value, 0.0);
        assert!((s.kernel(2.0, &[0]).unwrap() - 0.5).abs() < 1e-14);
        assert!((s.kernel(2.0, &[1]).unwrap() - 1.0 / PI).abs() < 1e-14);
        assert!(s.kernel(2.0, &[2]).unwrap().abs() < 1e-14);
    }

    #[test]
    fn kernel_matches_sinc_closed_form() {
        let s = lap1();
        for lambda in [0.3f64, 1.0, 2.0, 3.7] {
            let th = (1.0 - lambda / 2.0).acos();
            let ls = s.level_set(lambda);
            for k in -64i64..=64 {
                let exact = if k == 0 { th / PI } else { (th * k as f64).sin() / (PI * k as f64) };
                assert!((ls.kernel(&[k]) - exact).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn inverse_and_phi() {
        let s = lap1();
        for y in [0.1, 0.5, 0.9] {
            let mu = s.inverse(y).unwrap().to_f64();
            assert!((mu - (2.0 - 2.0 * (PI * y).cos())).abs() < 1e-10);
            let phi = s.phi(y).unwrap().to_f64();
            assert!((phi - (2.0 * y - 2.0 / PI * (PI * y).sin())).abs() < 1e-10);
        }
        assert_eq!(s.phi(1.5).unwrap(), Ext::PosInf);
    }

    #[test]
    fn narrow_dip_is_found() {
        // 1 + 0.5 cos(40θ + 0.3) < 0.5001 only on arcs narrower than the sample step
        let terms = [
            TrigTerm { m: 0, c: 1.0, phase: 0.0 },
            TrigTerm { m: 40, c: 0.5, phase: 0.3 },
        ];
        let iv = sublevel_intervals(&terms, 0.5001);
        assert_eq!(iv.len(), 40);
        let total: f64 = iv.iter().map(|(a, b)| b - a).sum();
        let exact = 2.0 * 0.9998f64.acos();
        assert!((total - exact).abs() < 1e-9, "{total} vs {exact}");
    }

    #[test]
    fn two_dimensional_laplacian() {
        let s = FreeSpectrum::new(Stencil::laplacian(2).unwrap());
        // σ̂ = 4 − 2cos θ₁ − 2cos θ₂ is symmetric about 4
        let f = s.density(4.0);
        assert!((f.value - 0.5).abs() < 1e-6, "{f:?}");
        assert!(f.error < 1e-4);
        assert!((s.density(8.0).value - 1.0).abs() < 1e-12);
        // ∫ σ̂ over the full torus is the constant tap
        assert!((s.phi_at_level(8.1).value - 4.0).abs() < 1e-10);
        assert!((s.kernel(8.1, &[1, 0]).unwrap()).abs() < 1e-12);
        assert!((s.kernel(8.1, &[0, 0]).unwrap() - 1.0).abs() < 1e-12);
    }
}
