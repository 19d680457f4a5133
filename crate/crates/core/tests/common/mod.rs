//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use distenergy::continuum::{bathtub, LevelDistribution};
use distenergy::monotone::MonotoneStep;
use distenergy::quad::integrate_adaptive;

/// `ψ(y) = ∫_0^1 ∫_0^y F^{-1}(t²u) du dt` by nested adaptive quadrature,
/// splitting at the plateau crossings. Needs `y < sup F`.
pub fn psi_by_quadrature(f: &MonotoneStep, y: f64) -> f64 {
    let inv = |u: f64| f.pseudo_inverse(u).expect("nonnegative mass").to_f64();
    let masses: Vec<f64> = f.values()[1..].to_vec();
    let inner = |t: f64| {
        if t == 0.0 {
            return y * inv(0.0);
        }
        let pts: Vec<f64> = masses.iter().map(|&v| v / (t * t)).filter(|&u| u > 0.0 && u < y).collect();
        integrate_adaptive(|u| inv(t * t * u), 0.0, y, &pts, 1e-15, 1e-13)
    };
    let tpts: Vec<f64> = masses
        .iter()
        .map(|&v| (v / y).sqrt())
        .filter(|&t| t > 0.0 && t < 1.0)
        .collect();
    integrate_adaptive(inner, 0.0, 1.0, &tpts, 1e-14, 1e-12)
}

/// `S_{A_σ} − (S_F − τ)` for the regular filling of a Gaussian sampled at
/// cell centres of `[−w, w)` with `m` cells.
pub fn gaussian_filling_gap(m: usize, w: f64, shift: f64) -> f64 {
    let h = 2.0 * w / m as f64;
    let g: Vec<f64> = (0..m)
        .map(|i| {
            let x = -w + (i as f64 + 0.5) * h + shift;
            (-x * x).exp()
        })
        .collect();
    let vol = vec![h; m];
    let f = bathtub(&g, &vol).expect("valid density");
    let d = LevelDistribution::new(&g, &vol).expect("valid density");
    f.entropy - (d.s_f() - f.trace)
}
