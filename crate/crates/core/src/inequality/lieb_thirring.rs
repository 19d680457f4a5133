//! Partition functionals `H_{Ω_i}`, the pointwise functional `H` and the
//! collapsed-state bound.

use crate::error::{Error, Result};
use crate::ext::Ext;
use crate::inequality::confined::{scaled_bound, DOMAIN_RTOL};
use crate::inequality::report::IneqReport;
use crate::model::{
    energy, Density, EnergyPart, FiniteOperator, MeasureTarget, MixedState, PartitionSpec,
    SpectralDecomposition,
};
use crate::monotone::{phi, psi, MonotoneStep, PiecewiseCurve};

/// Which integral functional enters `H`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Functional {
    /// `ψ = ∫_0^1 φ_t dt`.
    Psi,
    /// `φ_t` for a fixed `t ∈ (0, 1]`.
    PhiT(f64),
}

fn curve_for(dec: &SpectralDecomposition, target: MeasureTarget<'_>, which: Functional) -> Result<PiecewiseCurve> {
    let f = dec.spectral_measure(target);
    match which {
        Functional::Psi => psi(&f),
        Functional::PhiT(t) => phi(&f, t),
    }
}

fn sum_ext(terms: impl IntoIterator<Item = Ext>) -> Result<Ext> {
    terms.into_iter().try_fold(Ext::ZERO, |acc, t| {
        acc.checked_add(t)
            .ok_or_else(|| Error::InvalidArgument("functional sums +inf and -inf".into()))
    })
}

/// `‖ρ‖ Σ_i f_{Ω_i}(ν_ρ(Ω_i)/‖ρ‖)`.
pub fn partition_functional(
    a: &FiniteOperator,
    rho: &MixedState,
    partition: &PartitionSpec,
    which: Functional,
) -> Result<Ext> {
    if rho.is_zero() {
        return Err(Error::ZeroState);
    }
    let dec = a.spectral();
    let dens = Density::of_state(rho);
    let n = rho.norm_inf();
    let terms = partition
        .cells()
        .iter()
        .map(|cell| {
            let c = curve_for(dec, MeasureTarget::Region(cell), which)?;
            Ok(scaled_bound(&c, n, dens.mass(cell)))
        })
        .collect::<Result<Vec<_>>>()?;
    sum_ext(terms)
}

/// `‖ρ‖ ∫_X f_x(Dν_ρ(x)/‖ρ‖) dμ(x)`.
pub fn pointwise_functional(a: &FiniteOperator, rho: &MixedState, which: Functional) -> Result<Ext> {
    if rho.is_zero() {
        return Err(Error::ZeroState);
    }
    let dec = a.spectral();
    let dens = Density::of_state(rho);
    let n = rho.norm_inf();
    let space = rho.space();
    let terms = (0..space.points())
        .map(|x| {
            let c = curve_for(dec, MeasureTarget::Point(x), which)?;
            let y = dens.at(x).max(0.0) / n;
            Ok(c.eval_clamped(y, DOMAIN_RTOL).scale(n * space.weight(x)))
        })
        .collect::<Result<Vec<_>>>()?;
    sum_ext(terms)
}

/// The chain `H_coarse ≤ H_fine ≤ H ≤ E`, the collapsed-state bound for
/// the fine partition, and the parametric chains at `t ∈ ts`.
pub fn check_lieb_thirring(
    a: &FiniteOperator,
    rho: &MixedState,
    coarse: &PartitionSpec,
    fine: &PartitionSpec,
    ts: &[f64],
) -> Result<Vec<IneqReport>> {
    if !fine.refines(coarse) {
        return Err(Error::NotNested(
            "every fine cell must lie in exactly one coarse cell".into(),
        ));
    }
    let h_coarse = partition_functional(a, rho, coarse, Functional::Psi)?;
    let h_fine = partition_functional(a, rho, fine, Functional::Psi)?;
    let h = pointwise_functional(a, rho, Functional::Psi)?;
    let e = energy(rho, a, EnergyPart::Full)?;
    let mut out = vec![
        IneqReport::le("lt_refinement", h_coarse, h_fine)
            .with("coarse_cells", coarse.len())
            .with("fine_cells", fine.len()),
        IneqReport::le("lt_pointwise", h_fine, h),
        IneqReport::le("lt_energy", h, e),
    ];
    out.extend(collapsed_bounds(a, rho, fine)?);
    for &t in ts {
        let w = Functional::PhiT(t);
        let hc = partition_functional(a, rho, coarse, w)?;
        let hf = partition_functional(a, rho, fine, w)?;
        let hp = pointwise_functional(a, rho, w)?;
        out.push(IneqReport::le("lt_parametric_refinement", hc, hf).with("t", t));
        out.push(IneqReport::le("lt_parametric_pointwise", hf, hp).with("t", t));
    }
    Ok(out)
}

/// For `ρ̃ = Σ χ_i ρ χ_i`:
/// `‖ρ̃‖ Σ φ_i(ν_i/‖ρ̃‖) ≤ Σ ‖ρ_i‖ φ_i(ν_i/‖ρ_i‖) ≤ E(ρ̃)`, and the partition
/// functional of `ρ̃` lies below the first term.
pub fn collapsed_bounds(a: &FiniteOperator, rho: &MixedState, partition: &PartitionSpec) -> Result<Vec<IneqReport>> {
    let collapsed = rho.collapse(partition);
    let dec = a.spectral();
    let dens = Density::of_state(rho);
    let n = collapsed.norm_inf();
    let mut outer = Vec::new();
    let mut inner = Vec::new();
    for cell in partition.cells() {
        let c = phi(&dec.spectral_measure(MeasureTarget::Region(cell)), 1.0)?;
        let nu = dens.mass(cell);
        outer.push(scaled_bound(&c, n, nu));
        let block = collapsed.restrict(cell);
        let ni = block.norm_inf();
        if ni > 0.0 {
            inner.push(scaled_bound(&c, ni, nu));
        }
    }
    let outer = sum_ext(outer)?;
    let inner = sum_ext(inner)?;
    let e = energy(&collapsed, a, EnergyPart::Full)?;
    let h = partition_functional(a, &collapsed, partition, Functional::Psi)?;
    Ok(vec![
        IneqReport::le("collapsed_convexity", outer, inner),
        IneqReport::le("collapsed_energy", inner, e),
        IneqReport::le("collapsed_dominates", h, outer),
    ])
}

/// `ψ(y) ≤ φ(y)` at each `y`, and `φ(y/2) ≤ ψ(y)` when `F` starts at zero
/// above a nonnegative spectrum.
pub fn step_sandwich(f: &MonotoneStep, ys: &[f64]) -> Result<Vec<IneqReport>> {
    let ph = phi(f, 1.0)?;
    let ps = psi(f)?;
    let lower = f.base() == 0.0 && f.breakpoints().first().is_none_or(|&b| b >= 0.0);
    let mut out = Vec::new();
    for &y in ys {
        if y < 0.0 {
            return Err(Error::InvalidArgument("sample point must be nonnegative".into()));
        }
        out.push(IneqReport::le("psi_below_phi", ps.eval(y), ph.eval(y)).with("y", y));
        if lower {
            out.push(IneqReport::le("half_phi_below_psi", ph.eval(y / 2.0), ps.eval(y)).with("y", y));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MeasureSpace;
    use nalgebra::DMatrix;
    use std::sync::Arc;

    #[test]
    fn trivial_partition_ground_state() {
        let n = 5;
        let m = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
            0 => 1.0 + i as f64,
            1 => -0.7,
            _ => 0.0,
        });
        let space = Arc::new(MeasureSpace::uniform(n));
        let a = FiniteOperator::from_real(space.clone(), &m).unwrap();
        let rho = MixedState::new(space.clone(), a.spectral().span_projector([0])).unwrap();
        let trivial = PartitionSpec::trivial(&space);
        let hx = partition_functional(&a, &rho, &trivial, Functional::Psi).unwrap();
        let f = a.spectral().spectral_measure(MeasureTarget::Region(&space.full_region()));
        let psi1 = psi(&f).unwrap().eval(1.0);
        assert!((hx.to_f64() - psi1.to_f64()).abs() < 1e-12);
        let e = energy(&rho, &a, EnergyPart::Full).unwrap();
        assert!(hx.to_f64() <= e + 1e-12);
        let reports = check_lieb_thirring(&a, &rho, &trivial, &PartitionSpec::discrete(&space), &[0.25, 0.5, 1.0]).unwrap();
        assert!(reports.iter().all(|r| r.holds), "{reports:#?}");
    }

    #[test]
    fn rejects_unnested_partitions() {
        let space = Arc::new(MeasureSpace::uniform(4));
        let a = FiniteOperator::diagonal(space.clone(), &[1.0, 2.0, 3.0, 4.0]).unwrap();
        let rho = MixedState::new(space.clone(), crate::model::CMatrix::identity(4, 4)).unwrap();
        let p = PartitionSpec::from_indices(&space, &[vec![0, 1], vec![2, 3]]).unwrap();
        let q = PartitionSpec::from_indices(&space, &[vec![0, 2], vec![1, 3]]).unwrap();
        assert!(matches!(check_lieb_thirring(&a, &rho, &p, &q, &[]), Err(Error::NotNested(_))));
    }
}
