//! Position/frequency entropy inequalities on grid states.

use serde::Serialize;

use crate::continuum::bathtub::{entropy_comparison, symbol_entropy, LevelDistribution};
use crate::continuum::grid::GridState;
use crate::continuum::laplacian::{KineticSymbol, LaplacianModel};
use crate::error::{Error, Result};
use crate::inequality::IneqReport;

/// Entropies of a grid state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FourierEntropies {
    pub s_x: f64,
    pub s_xi: f64,
    pub s_f: f64,
    pub trace: f64,
    pub norm: f64,
    pub margin: f64,
}

fn frequency_volumes(state: &GridState) -> Vec<f64> {
    vec![state.frequency_cell_volume(); state.cells()]
}

pub fn fourier_entropies(state: &GridState) -> Result<FourierEntropies> {
    let s_x = state.spatial_entropy()?;
    let s_xi = state.frequency_entropy()?;
    let d = LevelDistribution::new(state.frequency_density(), &frequency_volumes(state))?;
    Ok(FourierEntropies {
        s_x,
        s_xi,
        s_f: d.s_f(),
        trace: state.trace(),
        norm: state.norm_inf(),
        margin: state.variation_margin(),
    })
}

/// `S_x + S_F ≥ −τ(2 + ln‖ρ‖)` and `S_x + S_ξ ≥ −τ(ln τ + ln‖ρ‖)`.
pub fn check_fourier_entropy(state: &GridState) -> Result<Vec<IneqReport>> {
    let e = fourier_entropies(state)?;
    let (t, n) = (e.trace, e.norm);
    Ok(vec![
        IneqReport::le_margin("fourier_entropy_distribution", -t * (2.0 + n.ln()), e.s_x + e.s_f, e.margin)
            .with("s_x", e.s_x)
            .with("s_f", e.s_f),
        IneqReport::le_margin("fourier_entropy_symmetric", -t * (t.ln() + n.ln()), e.s_x + e.s_xi, e.margin)
            .with("s_x", e.s_x)
            .with("s_xi", e.s_xi),
        entropy_comparison(state.frequency_density(), &frequency_volumes(state))?,
    ])
}

/// Spectral entropy of the grid Laplacian: `∫ ln vol*{‖ξ'‖ ≤ ‖ξ‖} dν_ρ̂`.
pub fn laplacian_spectral_entropy(state: &GridState) -> Result<f64> {
    symbol_entropy(
        state.frequency_density(),
        &frequency_volumes(state),
        &state.frequency_norms2(),
    )
}

/// `∫ ln(dν/dx) dν ≤ S_Δ(ρ) + τ(3 + ln‖ρ‖)`, with the spectral entropy of
/// the grid Laplacian. The context records `3 − slack/τ`, the smallest
/// constant this state would allow.
pub fn check_spectral_entropy_bound(state: &GridState) -> Result<IneqReport> {
    let s_x = state.spatial_entropy()?;
    let s_l = laplacian_spectral_entropy(state)?;
    let (t, n) = (state.trace(), state.norm_inf());
    let rhs = s_l + t * (3.0 + n.ln());
    Ok(
        IneqReport::le_margin("spectral_entropy_bound", -s_x, rhs, state.variation_margin())
            .with("spectral_entropy", s_l)
            .with("observed_constant", 3.0 - (rhs + s_x) / t),
    )
}

/// For `ρ = Π_V / dim V`: `S_x + S_ξ ≥ ln dim V`.
pub fn check_projection_entropy(state: &GridState) -> Result<IneqReport> {
    let w = state.weights();
    let k = w.len();
    if k == 0 || w.iter().any(|&p| (p - 1.0 / k as f64).abs() > 1e-12) {
        return Err(Error::InvalidArgument("state is not a normalized projection".into()));
    }
    let e = fourier_entropies(state)?;
    Ok(IneqReport::le_margin("projection_entropy", (k as f64).ln(), e.s_x + e.s_xi, e.margin).with("rank", k))
}

/// An axis-aligned sub-box `∏ [lower_j, upper_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubBox {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl SubBox {
    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(a, b)| b - a).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&v, (&a, &b))| v >= a && v < b)
    }
}

/// `τ ≤ μ(Ω)‖ρ‖ e³ F_n(E/τ)` and `τ ≤ μ(Ω)‖ρ‖ F_n((n+2)E/(nτ))` for a
/// state supported in `Ω`, with `E` the gradient energy.
pub fn check_confined_weyl(state: &GridState, omega: &SubBox) -> Result<Vec<IneqReport>> {
    let n = state.dim();
    if omega.lower.len() != n || omega.upper.len() != n || omega.lower.iter().zip(&omega.upper).any(|(a, b)| !(b > a)) {
        return Err(Error::InvalidArgument("sub-box must have one nonempty interval per axis".into()));
    }
    let t = state.trace();
    if t <= 0.0 {
        return Err(Error::ZeroState);
    }
    let dx = state.cell_volume();
    let leak: f64 = (0..state.cells())
        .filter(|&k| !omega.contains(&state.position(k)))
        .map(|k| state.spatial_density()[k] * dx)
        .sum();
    if leak > 1e-10 * t {
        return Err(Error::NotConfined { leak });
    }
    let model = LaplacianModel::new(n)?;
    let e = state.gradient_energy();
    let base = omega.volume() * state.norm_inf();
    let nf = n as f64;
    let margin = state.variation_margin();
    Ok(vec![
        IneqReport::le_margin("confined_weyl_e3", t, base * 3f64.exp() * model.f(e / t), margin),
        IneqReport::le_margin("confined_weyl_phi", t, base * model.f((nf + 2.0) * e / (nf * t)), margin),
    ])
}

/// `‖ρ‖ ∫ ψ(dν/dx / ‖ρ‖) dx ≤ τ(σ(D)ρ)`; for the Laplacian and a projection
/// this is `D_n ∫ (Σ|f_i|²)^{1+2/n} ≤ Σ ‖∇f_i‖²`.
pub fn kinetic_lieb_thirring(state: &GridState, symbol: KineticSymbol) -> Result<IneqReport> {
    let n = state.norm_inf();
    if n <= 0.0 {
        return Err(Error::ZeroState);
    }
    let model = LaplacianModel::new(state.dim())?;
    let dx = state.cell_volume();
    let dens = state.spatial_density();
    let lhs: f64 = dens.iter().map(|&d| n * symbol.psi(&model, d / n) * dx).sum();
    let rhs = state.symbol_energy(|x2| symbol.symbol(x2));
    // derivative of ψ at the peak times the variation scale
    let peak = dens.iter().copied().fold(0.0, f64::max) / n;
    let h = 1e-6 * peak.max(1e-300);
    let slope = (symbol.psi(&model, peak + h) - symbol.psi(&model, peak)) / h;
    let margin = slope * state.variation_margin();
    Ok(IneqReport::le_margin("kinetic_lieb_thirring", lhs, rhs, margin))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn sine_state(m: usize, modes: &[usize]) -> GridState {
        let comps = modes
            .iter()
            .map(|&k| {
                (0..m)
                    .map(|j| Complex64::new((k as f64 * j as f64 * PI / m as f64).sin(), 0.0))
                    .collect()
            })
            .collect();
        GridState::orthonormalized(vec![PI], vec![m], vec![0.0], comps, vec![1.0; modes.len()]).unwrap()
    }

    #[test]
    fn ground_sine_kinetic_bound() {
        let s = sine_state(1 << 12, &[1]);
        let r = kinetic_lieb_thirring(&s, KineticSymbol::Laplacian).unwrap();
        assert!((r.lhs.to_f64() - 1.0 / 6.0).abs() < 1e-9);
        assert!((r.rhs.to_f64() - 1.0).abs() < 1e-3);
        assert!(r.holds);
    }

    #[test]
    fn sine_projection_bounds() {
        let s = sine_state(512, &[1, 2, 3]);
        assert!(kinetic_lieb_thirring(&s, KineticSymbol::Laplacian).unwrap().holds);
        for r in check_confined_weyl(&s, &SubBox { lower: vec![0.0], upper: vec![PI] }).unwrap() {
            assert!(r.holds, "{r:#?}");
        }
        let proj = GridState::new(
            s.lengths().to_vec(),
            s.samples().to_vec(),
            s.origin().to_vec(),
            s.components().to_vec(),
            vec![1.0 / 3.0; 3],
        )
        .unwrap();
        let r = check_projection_entropy(&proj).unwrap();
        assert!(r.holds, "{r:#?}");
        assert!(check_spectral_entropy_bound(&proj).unwrap().holds);
        assert!(check_fourier_entropy(&proj).unwrap().iter().all(|r| r.holds));
    }

    #[test]
    fn leaking_state_is_rejected() {
        let s = sine_state(64, &[1]);
        let half = SubBox { lower: vec![0.0], upper: vec![1.0] };
        assert!(matches!(check_confined_weyl(&s, &half), Err(Error::NotConfined { .. })));
    }
}
