//! Closed forms for the Laplacian on `ℝⁿ` and its kinetic variants.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::inequality::IneqReport;
use crate::quad::integrate_adaptive;

/// Spectral density constants of `Δ` on `ℝⁿ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaplacianModel {
    n: usize,
    c: f64,
}

impl LaplacianModel {
    pub fn new(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidArgument("dimension must be at least 1".into()));
        }
        let half = n as f64 / 2.0;
        let ball = PI.powf(half) / libm::tgamma(1.0 + half);
        Ok(LaplacianModel {
            n,
            c: (2.0 * PI).powi(-(n as i32)) * ball,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn nf(&self) -> f64 {
        self.n as f64
    }

    /// `C_n = (2π)^{-n} vol B_n(0,1)`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// `4π Γ(1+n/2)^{2/n}`, which equals `C_n^{-2/n}`.
    fn c_pow(&self) -> f64 {
        let n = self.nf();
        4.0 * PI * libm::tgamma(1.0 + n / 2.0).powf(2.0 / n)
    }

    /// `D_n = 4π Γ(1+n/2)^{2/n} / ((1+4/n)(1+2/n))`.
    pub fn d(&self) -> f64 {
        let n = self.nf();
        self.c_pow() / ((1.0 + 4.0 / n) * (1.0 + 2.0 / n))
    }

    /// `B_n = (1+4/n) D_n`.
    pub fn b(&self) -> f64 {
        (1.0 + 4.0 / self.nf()) * self.d()
    }

    /// `F_n(λ) = C_n λ^{n/2}`, zero for `λ ≤ 0`.
    pub fn f(&self, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            0.0
        } else {
            self.c * lambda.powf(self.nf() / 2.0)
        }
    }

    /// `F_n^{-1}(u) = (u/C_n)^{2/n}`.
    pub fn f_inv(&self, u: f64) -> f64 {
        (u.max(0.0) / self.c).powf(2.0 / self.nf())
    }

    /// `φ_n(y) = B_n y^{1+2/n}`.
    pub fn phi(&self, y: f64) -> f64 {
        self.b() * y.max(0.0).powf(1.0 + 2.0 / self.nf())
    }

    /// `ψ_n(y) = D_n y^{1+2/n}`.
    pub fn psi(&self, y: f64) -> f64 {
        self.d() * y.max(0.0).powf(1.0 + 2.0 / self.nf())
    }

    /// `φ_Ω(y) = n/(n+2) (C_n vol Ω)^{-2/n} y^{1+2/n}`.
    pub fn phi_region(&self, volume: f64, y: f64) -> f64 {
        let n = self.nf();
        n / (n + 2.0) * (self.c * volume).powf(-2.0 / n) * y.max(0.0).powf(1.0 + 2.0 / n)
    }
}

/// Kinetic energies whose spectral densities are obtained from the
/// Laplacian's by substituting `F^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KineticSymbol {
    /// `Δ`, symbol `‖ξ‖²`.
    Laplacian,
    /// `|∇| = Δ^{1/2}`.
    AbsGradient,
    /// `(Δ + m²)^{1/2} − m`.
    Relativistic { mass: f64 },
}

impl KineticSymbol {
    pub fn symbol(&self, xi2: f64) -> f64 {
        match *self {
            KineticSymbol::Laplacian => xi2,
            KineticSymbol::AbsGradient => xi2.sqrt(),
            KineticSymbol::Relativistic { mass } => (xi2 + mass * mass).sqrt() - mass,
        }
    }

    /// `F(λ) = F_n(σ^{-1}(λ))` with `σ` the radial symbol in `‖ξ‖²`.
    pub fn f(&self, model: &LaplacianModel, lambda: f64) -> f64 {
        if lambda <= 0.0 {
            return 0.0;
        }
        match *self {
            KineticSymbol::Laplacian => model.f(lambda),
            KineticSymbol::AbsGradient => model.f(lambda * lambda),
            KineticSymbol::Relativistic { mass } => model.f((lambda + mass).powi(2) - mass * mass),
        }
    }

    pub fn f_inv(&self, model: &LaplacianModel, u: f64) -> f64 {
        self.symbol(model.f_inv(u))
    }

    /// `φ(y) = ∫_0^y F^{-1}(u) du`.
    pub fn phi(&self, model: &LaplacianModel, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let n = model.n() as f64;
        match *self {
            KineticSymbol::Laplacian => model.phi(y),
            KineticSymbol::AbsGradient => model.c().powf(-1.0 / n) * y.powf(1.0 + 1.0 / n) / (1.0 + 1.0 / n),
            KineticSymbol::Relativistic { .. } => {
                integrate_adaptive(|u| self.f_inv(model, u), 0.0, y, &[], 1e-15, 1e-13)
            }
        }
    }

    /// `ψ(y) = ∫_0^1 ∫_0^y F^{-1}(t²u) du dt = ∫_0^1 φ(t²y)/t² dt`.
    pub fn psi(&self, model: &LaplacianModel, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let n = model.n() as f64;
        match *self {
            KineticSymbol::Laplacian => model.psi(y),
            KineticSymbol::AbsGradient => self.phi(model, y) / (1.0 + 2.0 / n),
            KineticSymbol::Relativistic { .. } => integrate_adaptive(
                |t| if t == 0.0 { 0.0 } else { self.phi(model, t * t * y) / (t * t) },
                0.0,
                1.0,
                &[],
                1e-14,
                1e-11,
            ),
        }
    }
}

fn check_box(lengths: &[f64]) -> Result<()> {
    if lengths.is_empty() || lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidArgument("box needs positive finite side lengths".into()));
    }
    Ok(())
}

/// The `count` smallest Dirichlet eigenvalues of `Δ` on the box
/// `∏ [0, L_j]`, with multiplicity: `Σ_j (k_j π / L_j)²`, `k_j ≥ 1`.
pub fn box_dirichlet_eigenvalues(lengths: &[f64], count: usize) -> Result<Vec<f64>> {
    check_box(lengths)?;
    if count == 0 {
        return Ok(Vec::new());
    }
    let base: f64 = lengths.iter().map(|l| (PI / l).powi(2)).sum();
    let mut cap = 2.0 * base;
    loop {
        let mut out = Vec::new();
        enumerate(lengths, 0, 0.0, cap, &mut out);
        if out.len() >= count {
            out.sort_by(f64::total_cmp);
            out.truncate(count);
            return Ok(out);
        }
        cap *= 2.0;
    }
}

fn enumerate(lengths: &[f64], axis: usize, partial: f64, cap: f64, out: &mut Vec<f64>) {
    if axis == lengths.len() {
        out.push(partial);
        return;
    }
    let rest: f64 = lengths[axis + 1..].iter().map(|l| (PI / l).powi(2)).sum();
    let mut k = 1u64;
    loop {
        let v = partial + (k as f64 * PI / lengths[axis]).powi(2);
        if v + rest > cap {
            break;
        }
        enumerate(lengths, axis + 1, v, cap, out);
        k += 1;
    }
}

/// `Σ_{i≤N} λ_i(Ω) ≥ n/(n+2) (C_n vol Ω)^{-2/n} N^{1+2/n}` on a box.
pub fn berezin_li_yau(lengths: &[f64], count: usize) -> Result<IneqReport> {
    if count == 0 {
        return Err(Error::InvalidArgument("need at least one eigenvalue".into()));
    }
    let ev = box_dirichlet_eigenvalues(lengths, count)?;
    let model = LaplacianModel::new(lengths.len())?;
    let volume: f64 = lengths.iter().product();
    let sum: f64 = ev.iter().sum();
    Ok(IneqReport::le("berezin_li_yau", model.phi_region(volume, count as f64), sum)
        .with("n", lengths.len())
        .with("count", count))
}

/// `F_n((1+2/n)λ) ≤ e F_n(λ)`.
pub fn density_ratio(n: usize, lambda: f64) -> Result<IneqReport> {
    let model = LaplacianModel::new(n)?;
    let nf = n as f64;
    Ok(IneqReport::le(
        "density_ratio",
        model.f((1.0 + 2.0 / nf) * lambda),
        std::f64::consts::E * model.f(lambda),
    )
    .with("n", n)
    .with("lambda", lambda))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_constants() {
        let m = LaplacianModel::new(1).unwrap();
        assert!((m.c() - 1.0 / PI).abs() < 1e-15);
        assert!((m.d() - PI * PI / 15.0).abs() < 1e-14);
        assert!((m.b() - PI * PI / 3.0).abs() < 1e-14);
        assert!(LaplacianModel::new(0).is_err());
    }

    #[test]
    fn constants_agree_with_definitions() {
        for n in 1..=8 {
            let m = LaplacianModel::new(n).unwrap();
            let nf = n as f64;
            assert!((m.c_pow() - m.c().powf(-2.0 / nf)).abs() < 1e-12 * m.c_pow());
            assert!((m.f(m.f_inv(0.7)) - 0.7).abs() < 1e-13);
            assert!((m.phi_region(1.0, 2.5) - m.phi(2.5)).abs() < 1e-12 * m.phi(2.5));
        }
    }

    #[test]
    fn interval_and_square_spectra() {
        let ev = box_dirichlet_eigenvalues(&[PI], 3).unwrap();
        assert_eq!(ev, vec![1.0, 4.0, 9.0]);
        let r = berezin_li_yau(&[PI], 3).unwrap();
        assert!((r.lhs.to_f64() - 9.0).abs() < 1e-12);
        assert!((r.rhs.to_f64() - 14.0).abs() < 1e-12);
        let ev = box_dirichlet_eigenvalues(&[PI, PI], 4).unwrap();
        assert_eq!(ev, vec![2.0, 5.0, 5.0, 8.0]);
        let r = berezin_li_yau(&[PI, PI], 1).unwrap();
        assert!((r.lhs.to_f64() - 2.0 / PI).abs() < 1e-12);
        assert!(r.holds);
    }

    #[test]
    fn kinetic_variants() {
        let m = LaplacianModel::new(3).unwrap();
        let abs = KineticSymbol::AbsGradient;
        let tiny = KineticSymbol::Relativistic { mass: 1e-9 };
        for y in [0.1, 1.0, 3.0] {
            assert!((abs.phi(&m, y) - tiny.phi(&m, y)).abs() < 1e-6 * abs.phi(&m, y));
            assert!((abs.psi(&m, y) - tiny.psi(&m, y)).abs() < 1e-6 * abs.psi(&m, y));
        }
        // nonrelativistic limit: √(p²+m²) − m ≈ p²/(2m)
        let heavy = KineticSymbol::Relativistic { mass: 1e4 };
        let lap = KineticSymbol::Laplacian;
        let y = 0.01;
        let ratio = heavy.phi(&m, y) * 2e4 / lap.phi(&m, y);
        assert!((ratio - 1.0).abs() < 1e-3, "{ratio}");
        let lap_psi = integrate_adaptive(|t| if t == 0.0 { 0.0 } else { m.phi(t * t * 2.0) / (t * t) }, 0.0, 1.0, &[], 1e-14, 1e-12);
        assert!((lap_psi - m.psi(2.0)).abs() < 1e-10);
        for l in [0.3, 2.0] {
            assert!((abs.f(&m, abs.f_inv(&m, l)) - l).abs() < 1e-12);
            let rel = KineticSymbol::Relativistic { mass: 2.0 };
            assert!((rel.f(&m, rel.f_inv(&m, l)) - l).abs() < 1e-12);
        }
    }

    #[test]
    fn density_ratio_below_e() {
        for n in 1..=10 {
            for l in [0.01, 1.0, 100.0] {
                assert!(density_ratio(n, l).unwrap().holds);
            }
        }
    }
}
