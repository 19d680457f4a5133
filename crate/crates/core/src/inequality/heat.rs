//! The heat-kernel exponent `θ(Ω) = sup_t (1/t) ln(1/(L(t) μ(Ω)))`
//! against `φ_Ω(1)`.

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::inequality::confined::{is_positive, DOMAIN_RTOL};
use crate::inequality::report::IneqReport;
use crate::model::{FiniteOperator, MeasureTarget, Region};
use crate::monotone::phi;
use crate::quad::golden_max;

/// Search window and grid for the supremum over `t`.
pub const T_MIN: f64 = 1e-3;
pub const T_MAX: f64 = 1e3;
pub const GRID: usize = 200;

/// `ln L(t) = ln max_x K_t(x, x)` with `K_t` the kernel of `e^{−tA}`. For
/// positive `A` the diagonal dominates: `|K(x,y)|² ≤ K(x,x) K(y,y)`.
pub fn log_heat_norm(a: &FiniteOperator, t: f64) -> f64 {
    let dec = a.spectral();
    let space = a.space();
    let ev = dec.eigenvalues();
    let v = dec.eigenvectors();
    let mut best = f64::NEG_INFINITY;
    for x in 0..space.points() {
        let i = x; // scalar fiber
        let logs: Vec<f64> = ev
            .iter()
            .enumerate()
            .filter_map(|(c, &l)| {
                let w = v[(i, c)].norm_sqr();
                (w > 0.0).then(|| -t * l + w.ln())
            })
            .collect();
        let m = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            continue;
        }
        let lse = m + logs.iter().map(|&l| (l - m).exp()).sum::<f64>().ln() - space.weight(x).ln();
        best = best.max(lse);
    }
    best
}

/// `(1/t)(−ln L(t) − ln μ(Ω))`.
pub fn theta_at(a: &FiniteOperator, mass: f64, t: f64) -> f64 {
    (-log_heat_norm(a, t) - mass.ln()) / t
}

/// Maximizes over a log grid on `[T_MIN, T_MAX]`, then refines by golden
/// section in `ln t`. Returns `(t*, θ)`; the value is attained, hence a
/// lower bound for the supremum.
pub fn theta(a: &FiniteOperator, omega: &Region) -> (f64, f64) {
    let mass = a.space().mass(omega);
    let (lo, hi) = (T_MIN.ln(), T_MAX.ln());
    let step = (hi - lo) / (GRID - 1) as f64;
    let f = |s: f64| theta_at(a, mass, s.exp());
    let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..GRID {
        let v = f(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a_s = lo + step * best_i.saturating_sub(1) as f64;
    let b_s = (lo + step * (best_i + 1) as f64).min(hi);
    let (s, v) = golden_max(f, a_s, b_s, 1e-10);
    if v >= best {
        (s.exp(), v)
    } else {
        ((lo + step * best_i as f64).exp(), best)
    }
}

/// `θ(Ω) ≤ φ_Ω(1)` for positive `A` with scalar fiber.
pub fn heat_theta(a: &FiniteOperator, omega: &Region) -> Result<IneqReport> {
    if a.space().fiber_dim() != 1 {
        return Err(Error::InvalidArgument("heat comparison needs a scalar fiber".into()));
    }
    if !is_positive(a) {
        return Err(Error::InvalidArgument("heat comparison needs a positive operator".into()));
    }
    if omega.is_empty() {
        return Err(Error::InvalidRegion("empty region".into()));
    }
    let (t, th) = theta(a, omega);
    let f = a.spectral().spectral_measure(MeasureTarget::Region(omega));
    let rhs: Ext = phi(&f, 1.0)?.eval_clamped(1.0, DOMAIN_RTOL);
    Ok(IneqReport::le_tol("heat_theta", th, rhs, 1e-6).with("t_star", t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MeasureSpace;
    use std::sync::Arc;

    #[test]
    fn scalar_operator_equality() {
        let space = Arc::new(MeasureSpace::uniform(4));
        let c = 1.7;
        let a = FiniteOperator::diagonal(space.clone(), &[c; 4]).unwrap();
        let omega = Region::new(&space, [2]).unwrap();
        let r = heat_theta(&a, &omega).unwrap();
        assert!((r.lhs.to_f64() - c).abs() < 1e-12);
        assert!((r.rhs.to_f64() - c).abs() < 1e-12);
    }

    #[test]
    fn single_point_diagonal() {
        let space = Arc::new(MeasureSpace::uniform(3));
        let a = FiniteOperator::diagonal(space.clone(), &[0.5, 2.0, 3.0]).unwrap();
        let omega = Region::new(&space, [0]).unwrap();
        let r = heat_theta(&a, &omega).unwrap();
        assert!(r.holds);
        assert!((r.rhs.to_f64() - 0.5).abs() < 1e-14);
        assert!((r.lhs.to_f64() - 0.5).abs() < 1e-9);
    }
}
