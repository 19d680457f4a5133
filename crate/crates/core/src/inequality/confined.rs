//! Energy of confined states against the spectral measure of the region,
//! and the resulting Dirichlet eigenvalue bounds.

use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::inequality::report::{tightest, IneqReport};
use crate::model::{energy, EnergyPart, FiniteOperator, MeasureTarget, MixedState, Region};
use crate::monotone::{phi, MonotoneStep, PiecewiseCurve};

/// Arguments this close beyond a curve's finite domain are rounding.
pub const DOMAIN_RTOL: f64 = 1e-10;
/// Support test `‖(Id − χ_Ω)ρ‖ ≤ LEAK_RTOL · ‖ρ‖`.
pub const LEAK_RTOL: f64 = 1e-10;

/// `k·φ(y/k)`, the bound for a state of norm `k` and trace `y`.
pub fn scaled_bound(curve: &PiecewiseCurve, norm: f64, trace: f64) -> Ext {
    curve.eval_clamped(trace / norm, DOMAIN_RTOL).scale(norm)
}

/// Ascending eigenvalues of the compression of `A` to `Ω`.
pub fn dirichlet_eigenvalues(a: &FiniteOperator, omega: &Region) -> Vec<f64> {
    let block = a.compression(omega);
    if block.nrows() == 0 {
        return Vec::new();
    }
    let mut ev: Vec<f64> = SymmetricEigen::new(block).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// `min spec(A) ≥ −1e-12·max(1, ‖A‖)`.
pub fn is_positive(a: &FiniteOperator) -> bool {
    let ev = a.spectral().eigenvalues();
    ev.first().is_none_or(|&l| l >= -1e-12 * a.norm_inf().max(1.0))
}

/// Checks that `ρ` is a nonzero state supported in `Ω`.
pub fn require_confined(rho: &MixedState, omega: &Region) -> Result<()> {
    if rho.is_zero() {
        return Err(Error::ZeroState);
    }
    let leak = rho.leakage(omega);
    if leak > LEAK_RTOL * rho.norm_inf() {
        return Err(Error::NotConfined { leak });
    }
    Ok(())
}

/// The confined-state bound `‖ρ‖ φ_Ω(τ(ρ)/‖ρ‖) ≤ E(ρ)`.
pub fn confined_energy(a: &FiniteOperator, rho: &MixedState, omega: &Region) -> Result<IneqReport> {
    require_confined(rho, omega)?;
    let f = a.spectral().spectral_measure(MeasureTarget::Region(omega));
    let curve = phi(&f, 1.0)?;
    let lhs = scaled_bound(&curve, rho.norm_inf(), rho.trace());
    let rhs = energy(rho, a, EnergyPart::Full)?;
    Ok(IneqReport::le("confined_energy", lhs, rhs)
        .with("trace", rho.trace())
        .with("norm", rho.norm_inf())
        .with("region_size", omega.len()))
}

/// Full confined bundle: the state bound, Dirichlet sums, the counting
/// bound and, for positive `A`, the count against the free measure.
pub fn check_confined(a: &FiniteOperator, rho: &MixedState, omega: &Region) -> Result<Vec<IneqReport>> {
    let mut out = vec![confined_energy(a, rho, omega)?];
    out.extend(dirichlet_bounds(a, omega)?);
    Ok(out)
}

/// Bounds that only involve `A` and `Ω`.
pub fn dirichlet_bounds(a: &FiniteOperator, omega: &Region) -> Result<Vec<IneqReport>> {
    let f = a.spectral().spectral_measure(MeasureTarget::Region(omega));
    let curve = phi(&f, 1.0)?;
    let ev = dirichlet_eigenvalues(a, omega);
    let mut out = Vec::new();
    if ev.is_empty() {
        return Ok(out);
    }

    // φ_Ω(N) ≤ λ_1(Ω) + … + λ_N(Ω)
    let mut sum = 0.0;
    let sums = ev.iter().enumerate().map(|(i, &l)| {
        sum += l;
        let n = (i + 1) as f64;
        IneqReport::le("dirichlet_sum", curve.eval_clamped(n, DOMAIN_RTOL), sum).with("n", i + 1)
    });
    out.extend(tightest(sums.collect::<Vec<_>>()));

    // N_Ω(λ) at each Dirichlet level, counting eigenvalues within rounding
    let scale = ev.iter().fold(1.0f64, |m, l| m.max(l.abs()));
    let eps = 1e-12 * scale;
    let counts: Vec<(f64, usize)> = ev
        .iter()
        .map(|&l| (l, ev.partition_point(|&m| m <= l + eps)))
        .collect();
    let counting = counts.iter().map(|&(l, n)| {
        IneqReport::le(
            "dirichlet_counting",
            curve.eval_clamped(n as f64, DOMAIN_RTOL),
            l * n as f64,
        )
        .with("lambda", l)
        .with("count", n)
    });
    out.extend(tightest(counting.collect::<Vec<_>>()));

    if is_positive(a) {
        out.extend(positive_counting(&f, &counts, eps));
    }
    Ok(out)
}

/// `N_Ω(λ) ≤ 2 F_Ω(2λ⁺)` and the tightenings whose hypotheses are
/// verified on the step function itself.
fn positive_counting(f: &MonotoneStep, counts: &[(f64, usize)], eps: f64) -> Vec<IneqReport> {
    let mut out = Vec::new();
    let free = counts.iter().map(|&(l, n)| {
        IneqReport::le("counting_free_measure", n as f64, 2.0 * f.eval_right(2.0 * l + eps))
            .with("lambda", l)
    });
    out.extend(tightest(free.collect::<Vec<_>>()));
    let positive: Vec<(f64, usize)> = counts.iter().copied().filter(|&(l, _)| l > eps).collect();
    if f.is_concave_on_positive() {
        let r = positive.iter().map(|&(l, n)| {
            IneqReport::le("counting_concave", n as f64, 2.0 * f.eval_right(l + eps)).with("lambda", l)
        });
        out.extend(tightest(r.collect::<Vec<_>>()));
    }
    if f.ratio_nondecreasing_on_positive() {
        let r = positive.iter().map(|&(l, n)| {
            IneqReport::le("counting_ratio", n as f64, f.eval_right(2.0 * l + eps)).with("lambda", l)
        });
        out.extend(tightest(r.collect::<Vec<_>>()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{MeasureSpace, ProjectorMode};
    use nalgebra::DMatrix;
    use std::sync::Arc;

    fn path_laplacian(n: usize) -> FiniteOperator {
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0
            } else if i.abs_diff(j) == 1 {
                -1.0
            } else {
                0.0
            }
        });
        FiniteOperator::from_real(Arc::new(MeasureSpace::uniform(n)), &m).unwrap()
    }

    #[test]
    fn ground_state_saturates_on_the_full_space() {
        let a = path_laplacian(6);
        let space = a.space().clone();
        let p = a.spectral().span_projector([0]);
        let rho = MixedState::new(space.clone(), p).unwrap();
        let r = confined_energy(&a, &rho, &space.full_region()).unwrap();
        assert!(r.holds);
        assert!((r.lhs.to_f64() - a.spectral().eigenvalues()[0]).abs() < 1e-12);
        assert!(r.slack_f64().abs() < 1e-12);
    }

    #[test]
    fn leaking_state_is_rejected() {
        let a = path_laplacian(4);
        let space = a.space().clone();
        let rho = MixedState::new(space.clone(), a.spectral().projector_matrix(1.0, ProjectorMode::Strict)).unwrap();
        let omega = Region::new(&space, [0, 1]).unwrap();
        assert!(matches!(confined_energy(&a, &rho, &omega), Err(Error::NotConfined { .. })));
    }

    #[test]
    fn bundle_holds_on_a_positive_operator() {
        let a = path_laplacian(8);
        let space = a.space().clone();
        let omega = Region::new(&space, [2, 3, 4]).unwrap();
        let b = dirichlet_bounds(&a, &omega).unwrap();
        let names: Vec<&str> = b.iter().map(|r| r.name.as_str()).collect();
        assert!(names.contains(&"dirichlet_sum"));
        assert!(names.contains(&"counting_free_measure"));
        assert!(b.iter().all(|r| r.holds), "{b:#?}");
    }
}
