//! The harmonic-oscillator heat states `ρ_t = e^{−t(Δ + ‖x‖²)}` in closed
//! form, and their grid samplings.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::continuum::grid::GridState;
use crate::error::{Error, Result};

/// Closed forms for `ρ_t` on `ℝⁿ` and its normalization `λ_t = ρ_t/τ(ρ_t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MehlerOracle {
    pub n: usize,
    pub t: f64,
}

impl MehlerOracle {
    pub fn new(n: usize, t: f64) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidArgument("t must be positive".into()));
        }
        Ok(MehlerOracle { n, t })
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// Mehler kernel `ρ_t(x, y)`.
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        let s2 = (2.0 * self.t).sinh();
        let c2 = 1.0 / (2.0 * self.t).tanh();
        let xx: f64 = x.iter().map(|v| v * v).sum();
        let yy: f64 = y.iter().map(|v| v * v).sum();
        let xy: f64 = x.iter().zip(y).map(|(a, b)| a * b).sum();
        (2.0 * PI * s2).powf(-self.nf() / 2.0) * (-0.5 * c2 * (xx + yy) + xy / s2).exp()
    }

    /// `dν_{ρ_t}/dx = (2π sinh 2t)^{-n/2} e^{−tanh(t)‖x‖²}`.
    pub fn density(&self, x: &[f64]) -> f64 {
        let xx: f64 = x.iter().map(|v| v * v).sum();
        (2.0 * PI * (2.0 * self.t).sinh()).powf(-self.nf() / 2.0) * (-self.t.tanh() * xx).exp()
    }

    /// `τ(ρ_t) = (2 sinh t)^{-n}`.
    pub fn trace(&self) -> f64 {
        (2.0 * self.t.sinh()).powf(-self.nf())
    }

    /// `S_x(λ_t) = n/2 − (n/2) ln(tanh t / π)`.
    pub fn s_x(&self) -> f64 {
        let n = self.nf();
        n / 2.0 - n / 2.0 * (self.t.tanh() / PI).ln()
    }

    /// `S_ξ(λ̂_t) = S_x(λ_t) − n ln 2π`.
    pub fn s_xi(&self) -> f64 {
        self.s_x() - self.nf() * (2.0 * PI).ln()
    }

    /// Von Neumann entropy `S(λ_t) = nt coth t − n ln 2 − n ln sinh t`.
    pub fn von_neumann(&self) -> f64 {
        let n = self.nf();
        n * self.t / self.t.tanh() - n * 2f64.ln() - n * self.t.sinh().ln()
    }

    /// `n(1 + ln cosh t − t coth t)`.
    pub fn gap(&self) -> f64 {
        self.nf() * (1.0 + self.t.cosh().ln() - self.t / self.t.tanh())
    }

    /// `p_k = e^{−(2k+1)t}`, eigenvalues of the one-dimensional `ρ_t`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        (-(2.0 * k as f64 + 1.0) * self.t).exp()
    }

    /// `‖λ_t‖_∞ = (1 − e^{−2t})^n`.
    pub fn norm_inf(&self) -> f64 {
        (1.0 - (-2.0 * self.t).exp()).powf(self.nf())
    }
}

/// Hermite functions `h_0, …, h_{K−1}` at `x`, orthonormal in `L²(ℝ)`.
pub fn hermite_functions(count: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count);
    if count == 0 {
        return out;
    }
    out.push(PI.powf(-0.25) * (-x * x / 2.0).exp());
    if count > 1 {
        out.push(2f64.sqrt() * x * out[0]);
    }
    for k in 1..count.saturating_sub(1) {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}

/// A sampled `λ_t` with what the truncation dropped.
#[derive(Debug, Clone)]
pub struct SampledOscillator {
    pub state: GridState,
    /// Number of Hermite components kept.
    pub modes: usize,
    /// Weight of the dropped components in the unit-trace state.
    pub dropped_weight: f64,
}

/// Samples the one-dimensional `λ_t` on `[−w, w)` with `m` points, keeping
/// components of weight above `1e-17` relative to the top.
pub fn sample_oscillator(t: f64, m: usize, half_width: f64) -> Result<SampledOscillator> {
    let oracle = MehlerOracle::new(1, t)?;
    if !(half_width > 0.0) {
        return Err(Error::InvalidArgument("half width must be positive".into()));
    }
    let modes = ((17.0 * 10f64.ln() / (2.0 * t)).ceil() as usize + 1).min(200);
    let dx = 2.0 * half_width / m as f64;
    let mut comps = vec![Vec::with_capacity(m); modes];
    for j in 0..m {
        let x = -half_width + j as f64 * dx;
        for (k, h) in hermite_functions(modes, x).into_iter().enumerate() {
            comps[k].push(Complex64::new(h, 0.0));
        }
    }
    let norm = 2.0 * t.sinh();
    let weights: Vec<f64> = (0..modes).map(|k| norm * oracle.eigenvalue(k)).collect();
    let kept: f64 = weights.iter().sum();
    let state = GridState::orthonormalized(vec![2.0 * half_width], vec![m], vec![-half_width], comps, weights)?;
    Ok(SampledOscillator {
        state,
        modes,
        dropped_weight: 1.0 - kept,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        let o = MehlerOracle::new(1, 1.0).unwrap();
        assert!((o.trace() - 1.0 / (2.0 * 1f64.sinh())).abs() < 1e-15);
        assert!((o.trace() - 0.42546).abs() < 1e-5);
        assert!((o.gap() - 0.1208).abs() < 1e-4);
        assert!((o.s_x() + o.s_xi() - 0.5793).abs() < 5e-4);
        assert!((o.s_x() + o.s_xi() - (1.0 - 2f64.ln() - 1f64.tanh().ln())).abs() < 1e-14);
        assert!(MehlerOracle::new(1, 0.0).is_err());
    }

    #[test]
    fn entropy_identity() {
        for n in 1..=3 {
            for t in [0.5, 1.0, 2.0] {
                let o = MehlerOracle::new(n, t).unwrap();
                assert!((o.s_x() + o.s_xi() - o.von_neumann() - o.gap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn von_neumann_from_spectrum() {
        let o = MehlerOracle::new(1, 0.7).unwrap();
        let z = 2.0 * o.t.sinh();
        let s: f64 = (0..400).map(|k| z * o.eigenvalue(k)).filter(|&p| p > 0.0).map(|p| -p * p.ln()).sum();
        assert!((s - o.von_neumann()).abs() < 1e-12);
        assert!((z * o.eigenvalue(0) - o.norm_inf()).abs() < 1e-15);
    }

    #[test]
    fn kernel_diagonal_is_density() {
        let o = MehlerOracle::new(2, 0.8).unwrap();
        let x = [0.3, -1.1];
        assert!((o.kernel(&x, &x) - o.density(&x)).abs() < 1e-15);
        // density integrates to the trace
        let h = 0.01;
        let s: f64 = (-1000..1000).map(|i| o.density(&[i as f64 * h]) * h).sum::<f64>();
        let o1 = MehlerOracle::new(1, 0.8).unwrap();
        let s1: f64 = (-1000..1000).map(|i| o1.density(&[i as f64 * h]) * h).sum::<f64>();
        assert!((s1 - o1.trace()).abs() < 1e-10);
        assert!(s > 0.0);
    }

    #[test]
    fn hermite_orthonormal() {
        let h = 0.01;
        let vals: Vec<Vec<f64>> = (-1500..1500).map(|i| hermite_functions(6, i as f64 * h)).collect();
        for a in 0..6 {
            for b in 0..6 {
                let ip: f64 = vals.iter().map(|v| v[a] * v[b] * h).sum();
                assert!((ip - if a == b { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn sampled_state_matches_closed_form() {
        let s = sample_oscillator(1.0, 1 << 12, 20.0).unwrap();
        let o = MehlerOracle::new(1, 1.0).unwrap();
        assert!(s.dropped_weight.abs() < 1e-15);
        let sx = s.state.spatial_entropy().unwrap();
        let sxi = s.state.frequency_entropy().unwrap();
        assert!((sx - o.s_x()).abs() < 1e-3, "{sx} {}", o.s_x());
        assert!((sxi - o.s_xi()).abs() < 1e-3, "{sxi} {}", o.s_xi());
        assert!((s.state.norm_inf() - o.norm_inf()).abs() < 1e-12);
    }

    #[test]
    fn gap_positive_and_increasing() {
        let mut prev = 0.0;
        for i in 1..200 {
            let g = MehlerOracle::new(1, i as f64 * 0.05).unwrap().gap();
            assert!(g > prev);
            prev = g;
        }
        assert!(MehlerOracle::new(1, 1e-4).unwrap().gap() < 1e-8);
    }
}
