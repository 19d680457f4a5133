//! The near-extremal states `χ_Ω Π_λ χ_Ω` and `Π_λ χ_Ω Π_λ`.

use crate::error::{Error, Result};
use crate::inequality::confined::{confined_energy, DOMAIN_RTOL};
use crate::inequality::report::IneqReport;
use crate::model::{
    energy, CMatrix, EnergyPart, FiniteOperator, MeasureTarget, MixedState, ProjectorMode, Region,
};
use crate::monotone::phi;

/// A distance on the points of a finite space.
#[derive(Debug, Clone, PartialEq)]
pub struct PointMetric {
    n: usize,
    dist: Vec<f64>,
}

impl PointMetric {
    pub fn from_matrix(n: usize, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: dist.len(),
            });
        }
        for i in 0..n {
            if dist[i * n + i] != 0.0 {
                return Err(Error::InvalidArgument("distance to self must be 0".into()));
            }
            for j in 0..n {
                let d = dist[i * n + j];
                if !(d >= 0.0) || d != dist[j * n + i] {
                    return Err(Error::InvalidArgument("distance must be symmetric and nonnegative".into()));
                }
            }
        }
        Ok(PointMetric { n, dist })
    }

    /// Points `0, …, n−1` on a line with `d(x, y) = |x − y|`.
    pub fn path(n: usize) -> Self {
        let dist = (0..n * n).map(|k| (k / n).abs_diff(k % n) as f64).collect();
        PointMetric { n, dist }
    }

    pub fn d(&self, x: usize, y: usize) -> f64 {
        self.dist[x * self.n + y]
    }

    fn dist_to(&self, x: usize, set: &[usize]) -> f64 {
        set.iter().map(|&y| self.d(x, y)).fold(f64::INFINITY, f64::min)
    }

    /// `∂_r Ω = {x | d(x, Ω) ≤ r and d(x, Ω^c) ≤ r}`.
    pub fn boundary(&self, omega: &Region, r: f64) -> Vec<usize> {
        let inside: Vec<usize> = omega.members().to_vec();
        let outside: Vec<usize> = (0..self.n).filter(|&x| !omega.contains(x)).collect();
        (0..self.n)
            .filter(|&x| self.dist_to(x, &inside) <= r && self.dist_to(x, &outside) <= r)
            .collect()
    }

    /// Whether `A_{xy} = 0` (all fiber entries) for `d(x, y) > r`.
    pub fn is_local(&self, a: &FiniteOperator, r: f64) -> bool {
        let d = a.space().fiber_dim();
        let m = a.matrix();
        (0..m.nrows()).all(|i| {
            (0..m.ncols()).all(|j| self.d(i / d, j / d) <= r || m[(i, j)].norm() == 0.0)
        })
    }
}

/// The pair of states with their reports.
#[derive(Debug, Clone)]
pub struct SharpnessStates {
    /// `ρ_Ω = χ_Ω Π_λ χ_Ω`.
    pub confined: MixedState,
    /// `ρ̃_Ω = Π_λ χ_Ω Π_λ`.
    pub spectral: MixedState,
    pub reports: Vec<IneqReport>,
}

/// Builds both states and checks `τ(ρ_Ω) = τ(ρ̃_Ω) = F_Ω(λ)`,
/// `φ_Ω(F_Ω(λ)) = ∫_{(−∞,λ)} u dF_Ω(u) = E(ρ̃_Ω)`, the confined bound on
/// `ρ_Ω`, and with a metric the commutator estimate
/// `|E(ρ_Ω) − E(ρ̃_Ω)| ≤ 2‖A‖ |∂_r Ω|`.
pub fn sharpness_states(
    a: &FiniteOperator,
    omega: &Region,
    lambda: f64,
    locality: Option<(&PointMetric, f64)>,
) -> Result<SharpnessStates> {
    if omega.is_empty() {
        return Err(Error::InvalidRegion("empty region".into()));
    }
    let space = a.space().clone();
    let dec = a.spectral();
    let p = dec.projector_matrix(lambda, ProjectorMode::Strict);
    let mask = omega.indicator(&space);
    let n = p.nrows();
    let chi_p_chi = CMatrix::from_fn(n, n, |i, j| {
        if mask[i] && mask[j] {
            p[(i, j)]
        } else {
            num_complex::Complex64::new(0.0, 0.0)
        }
    });
    let mut chi = CMatrix::zeros(n, n);
    for (i, &m) in mask.iter().enumerate() {
        if m {
            chi[(i, i)] = num_complex::Complex64::new(1.0, 0.0);
        }
    }
    let p_chi_p = &p * &chi * &p;
    let confined = MixedState::new(space.clone(), chi_p_chi)?;
    let spectral = MixedState::new(space.clone(), p_chi_p)?;

    let f = dec.spectral_measure(MeasureTarget::Region(omega));
    let fl = f.eval(lambda);
    let curve = phi(&f, 1.0)?;
    let phi_side = curve.eval_clamped(fl, DOMAIN_RTOL);
    let stieltjes: f64 = f
        .breakpoints()
        .iter()
        .zip(f.values().windows(2))
        .filter(|(&b, _)| b < lambda)
        .map(|(&b, w)| b * (w[1] - w[0]))
        .sum();
    let e_conf = energy(&confined, a, EnergyPart::Full)?;
    let e_spec = energy(&spectral, a, EnergyPart::Full)?;

    let mut reports = vec![
        IneqReport::eq("sharpness_trace_confined", confined.trace(), fl).with("lambda", lambda),
        IneqReport::eq("sharpness_trace_spectral", spectral.trace(), fl).with("lambda", lambda),
        IneqReport::eq("sharpness_stieltjes", phi_side, stieltjes).with("lambda", lambda),
        IneqReport::eq("sharpness_energy", phi_side, e_spec).with("lambda", lambda),
    ];
    if !confined.is_zero() {
        reports.push(confined_energy(a, &confined, omega)?);
    }
    if let Some((metric, r)) = locality {
        if !metric.is_local(a, r) {
            return Err(Error::InvalidArgument(format!("operator is not {r}-local for the metric")));
        }
        let boundary = metric.boundary(omega, r).len();
        reports.push(
            IneqReport::le(
                "sharpness_commutator",
                (e_conf - e_spec).abs(),
                2.0 * a.norm_inf() * boundary as f64,
            )
            .with("boundary", boundary)
            .with("radius", r),
        );
    }
    Ok(SharpnessStates {
        confined,
        spectral,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MeasureSpace;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    #[test]
    fn diagonal_stieltjes_example() {
        let space = Arc::new(MeasureSpace::uniform(3));
        let a = FiniteOperator::diagonal(space.clone(), &[1.0, 2.0, 3.0]).unwrap();
        let omega = Region::new(&space, [0, 1]).unwrap();
        let s = sharpness_states(&a, &omega, 2.5, None).unwrap();
        assert!(s.reports.iter().all(|r| r.holds), "{:#?}", s.reports);
        let e = s.reports.iter().find(|r| r.name == "sharpness_energy").unwrap();
        assert!((e.lhs.to_f64() - 3.0).abs() < 1e-14);
        assert!((s.confined.trace() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn path_boundary_follows_the_definition() {
        let metric = PointMetric::path(20);
        let space = MeasureSpace::uniform(20);
        let omega = Region::new(&space, 5..15).unwrap();
        assert_eq!(metric.boundary(&omega, 1.0), vec![4, 5, 14, 15]);
    }

    #[test]
    fn tridiagonal_commutator_gap() {
        let n = 20;
        let m = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        });
        let space = Arc::new(MeasureSpace::uniform(n));
        let a = FiniteOperator::from_real(space.clone(), &m).unwrap();
        let omega = Region::new(&space, 5..15).unwrap();
        let metric = PointMetric::path(n);
        for lambda in [0.5, 1.0, 2.0, 3.0] {
            let s = sharpness_states(&a, &omega, lambda, Some((&metric, 1.0))).unwrap();
            assert!(s.reports.iter().all(|r| r.holds), "{:#?}", s.reports);
            // also within twice the norm times the two boundary pairs
            let c = s.reports.iter().find(|r| r.name == "sharpness_commutator").unwrap();
            assert!(c.lhs.to_f64() <= 2.0 * a.norm_inf() * 2.0);
        }
    }
}
