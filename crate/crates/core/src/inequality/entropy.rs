//! Spatial and spectral entropies, and the log-Sobolev consequences.

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::inequality::report::{tightest, IneqReport};
use crate::model::{energy, Density, EnergyPart, FiniteOperator, MixedState};
use crate::monotone::LogHull;

/// `S_λ(ρ) = τ(ln F_A⁺(A) ρ) = Σ_g ln F_A⁺(λ_g) τ(Π_g ρ)`.
pub fn spectral_entropy(a: &FiniteOperator, rho: &MixedState) -> Result<f64> {
    let dec = a.spectral();
    let levels = dec.sup_levels();
    let v = dec.eigenvectors();
    let m = rho.matrix();
    let mut s = 0.0;
    for (g, range) in dec.groups().iter().enumerate() {
        let mass: f64 = range
            .clone()
            .map(|c| {
                let col = v.column(c);
                (col.adjoint() * m * col)[(0, 0)].re
            })
            .sum();
        if mass != 0.0 {
            s += levels[g].ln() * mass;
        }
    }
    Ok(s)
}

/// `S_μ(ρ) = −∫ ln(Dν_ρ/‖ρ‖) dν_ρ + 3τ(ρ)`, with `0·ln 0 = 0`.
pub fn spatial_entropy(rho: &MixedState) -> Result<f64> {
    if rho.is_zero() {
        return Err(Error::ZeroState);
    }
    let n = rho.norm_inf();
    let dens = Density::of_state(rho);
    let w = rho.space().weights();
    let integral: f64 = dens
        .per_point()
        .iter()
        .zip(w)
        .filter(|(&d, _)| d > 0.0)
        .map(|(&d, &mu)| (d / n).ln() * d * mu)
        .sum();
    Ok(-integral + 3.0 * rho.trace())
}

/// `D_KL(ν_ρ ‖ μ) = ∫ ln(dν_ρ/dμ) dν_ρ`.
pub fn relative_entropy_to_reference(rho: &MixedState) -> f64 {
    let dens = Density::of_state(rho);
    dens.per_point()
        .iter()
        .zip(rho.space().weights())
        .filter(|(&d, _)| d > 0.0)
        .map(|(&d, &mu)| d.ln() * d * mu)
        .sum()
}

/// `S_λ + S_μ ≥ 0` and the relative-entropy identity.
pub fn check_entropy(a: &FiniteOperator, rho: &MixedState) -> Result<Vec<IneqReport>> {
    let sl = spectral_entropy(a, rho)?;
    let sm = spatial_entropy(rho)?;
    let kl = relative_entropy_to_reference(rho);
    let via = -sm + rho.trace() * (rho.norm_inf().ln() + 3.0);
    Ok(vec![
        IneqReport::le("entropy_sum", 0.0, sl + sm)
            .with("spectral", sl)
            .with("spatial", sm),
        IneqReport::eq("relative_entropy_identity", via, kl),
    ])
}

/// `−S_μ(ρ) ≤ (ln F_A)^c(E(ρ))` for unit-trace `ρ`, the `t`-family behind
/// it, and the Legendre duality between the two.
pub fn check_log_sobolev(a: &FiniteOperator, rho: &MixedState, ts: &[f64]) -> Result<Vec<IneqReport>> {
    let t = rho.trace();
    if (t - 1.0).abs() > 1e-9 {
        return Err(Error::NotUnitTrace { trace: t });
    }
    let hull = LogHull::new(&a.spectral().sup_measure())?;
    let mut e = energy(rho, a, EnergyPart::Full)?;
    // E(ρ) ≥ λ_min in exact arithmetic
    let start = hull.domain_start();
    if e < start && e >= start - 1e-12 * start.abs().max(1.0) {
        e = start;
    }
    let lhs = -spatial_entropy(rho)?;
    let bound = hull.eval(e);
    let mut out = vec![IneqReport::le("log_sobolev_hull", lhs, bound).with("energy", e)];

    let mut slopes = hull.slopes();
    slopes.extend_from_slice(ts);
    let family = slopes.iter().filter(|&&s| s > 0.0).map(|&s| {
        let m = hull.m(s).expect("positive t");
        IneqReport::le("log_sobolev_family", lhs, m + s * e).with("t", s)
    });
    out.extend(tightest(family.collect::<Vec<_>>()));

    let dual = hull.legendre_bound(e);
    out.push(match (dual, bound) {
        (Ext::Finite(_), Ext::Finite(_)) => IneqReport::eq_tol("legendre_duality", dual, bound, 1e-8),
        _ => IneqReport::eq("legendre_duality", dual, bound),
    });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{apply_spectral_function, MeasureSpace, Monotonicity};
    use num_complex::Complex64;
    use std::sync::Arc;

    fn localized() -> (FiniteOperator, MixedState) {
        let space = Arc::new(MeasureSpace::uniform(3));
        let a = FiniteOperator::diagonal(space.clone(), &[0.5, 1.5, 4.0]).unwrap();
        let mut f = vec![Complex64::new(0.0, 0.0); 3];
        f[1] = Complex64::new(1.0, 0.0);
        (a, MixedState::pure(space, &f).unwrap())
    }

    #[test]
    fn localized_model_values() {
        let (a, rho) = localized();
        assert_eq!(spectral_entropy(&a, &rho).unwrap(), 0.0);
        assert!((spatial_entropy(&rho).unwrap() - 3.0).abs() < 1e-15);
        let r = check_entropy(&a, &rho).unwrap();
        assert!(r.iter().all(|r| r.holds));
        let ls = check_log_sobolev(&a, &rho, &[0.5, 1.0]).unwrap();
        assert!((ls[0].lhs.to_f64() + 3.0).abs() < 1e-15);
        assert!(ls.iter().all(|r| r.holds), "{ls:#?}");
    }

    #[test]
    fn spectral_entropy_is_invariant_under_increasing_maps() {
        let space = Arc::new(MeasureSpace::new(vec![1.0, 2.0, 0.5], 1).unwrap());
        let m = nalgebra::DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.3, -1.0, 0.2, 0.0, 0.2, 2.0]);
        let a = FiniteOperator::from_real(space.clone(), &m).unwrap();
        let rho = MixedState::new(space, crate::model::CMatrix::identity(3, 3).scale(0.4)).unwrap();
        let s = spectral_entropy(&a, &rho).unwrap();
        let b = apply_spectral_function(&a, |x| 2.0 * x + 5.0, Monotonicity::StrictlyIncreasing).unwrap();
        assert_eq!(spectral_entropy(&b, &rho).unwrap(), s);
        let c = apply_spectral_function(&a, f64::exp, Monotonicity::StrictlyIncreasing).unwrap();
        assert_eq!(spectral_entropy(&c, &rho).unwrap(), s);
    }
}
