//! Structural invariants as property tests.

mod common;

use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use distenergy::amenable::{FreeSpectrum, Stencil};
use distenergy::continuum::{bathtub, symbol_entropy};
use distenergy::inequality::random::{random_instance, random_step, trial_rng, InstanceSpec};
use distenergy::inequality::{check_confined, check_entropy, check_lieb_thirring, spectral_entropy};
use distenergy::model::{CMatrix, Density, FiniteOperator, MixedState};
use distenergy::monotone::{phi, psi, MonotoneStep};
use distenergy::Ext;

use common::psi_by_quadrature;

fn step_strategy() -> impl Strategy<Value = MonotoneStep> {
    (any::<u64>(), any::<bool>()).prop_map(|(seed, positive)| random_step(&mut trial_rng(seed, 0), 12, positive))
}

fn close(a: Ext, b: Ext, tol: f64) -> bool {
    match (a.finite(), b.finite()) {
        (Some(x), Some(y)) => (x - y).abs() <= tol * x.abs().max(y.abs()).max(1.0),
        _ => a == b,
    }
}

fn phase_conjugate(m: &CMatrix, phases: &[f64]) -> CMatrix {
    DMatrix::from_fn(m.nrows(), m.ncols(), |i, j| {
        m[(i, j)] * Complex64::from_polar(1.0, phases[i] - phases[j])
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn pseudo_inverse_is_galois(f in step_strategy(), lam in -12.0f64..12.0, frac in 0.0f64..1.3) {
        let y = frac * f.sup();
        let inv = f.pseudo_inverse(y).unwrap();
        // F(λ) ≤ y  ⇒  λ ≤ F⁻¹(y)
        if f.eval(lam) <= y {
            prop_assert!(inv >= Ext::Finite(lam));
        }
        // λ < F⁻¹(y)  ⇒  F(λ) ≤ y
        if Ext::Finite(lam) < inv {
            prop_assert!(f.eval(lam) <= y);
        }
    }

    #[test]
    fn shifting_the_spectrum_adds_a_linear_term(f in step_strategy(), k in -5.0f64..5.0, frac in 0.01f64..0.99) {
        let y = frac * f.sup();
        let g = f.shift(k);
        let (p, pk) = (phi(&f, 1.0).unwrap().eval(y), phi(&g, 1.0).unwrap().eval(y));
        let (s, sk) = (psi(&f).unwrap().eval(y), psi(&g).unwrap().eval(y));
        prop_assert!(close(pk, p + Ext::Finite(k * y), 1e-10), "phi {pk:?} vs {p:?} + {}", k * y);
        prop_assert!(close(sk, s + Ext::Finite(k * y), 1e-10), "psi {sk:?} vs {s:?} + {}", k * y);
    }

    #[test]
    fn psi_sits_between_phi_values(f in step_strategy(), frac in 0.0f64..1.0) {
        let y = frac * f.sup();
        let (p, s) = (phi(&f, 1.0).unwrap(), psi(&f).unwrap());
        let (half, mid, full) = (p.eval(y / 2.0).to_f64(), s.eval(y).to_f64(), p.eval(y).to_f64());
        let tol = 1e-10 * full.abs().max(1.0);
        prop_assert!(mid <= full + tol, "{mid} {full}");
        // the lower half needs a nonnegative spectrum
        if f.breakpoints()[0] >= 0.0 {
            prop_assert!(half <= mid + tol, "{half} {mid}");
        }
    }

    #[test]
    fn psi_matches_quadrature(f in step_strategy(), frac in 0.05f64..0.95) {
        let y = frac * f.sup();
        let exact = psi(&f).unwrap().eval(y).to_f64();
        let quad = psi_by_quadrature(&f, y);
        prop_assert!((exact - quad).abs() <= 1e-8 * quad.abs().max(1e-12), "{exact} vs {quad}");
    }

    #[test]
    fn reports_are_gauge_invariant(seed in any::<u64>(), phases in prop::collection::vec(-3.2f64..3.2, 64)) {
        let inst = random_instance(seed, 0, InstanceSpec { unit_trace: true, ..Default::default() });
        let n = inst.a.dim();
        let space = inst.a.space().clone();
        let a = FiniteOperator::new(space.clone(), phase_conjugate(inst.a.matrix(), &phases[..n])).unwrap();
        let rho = MixedState::new(space, phase_conjugate(inst.rho.matrix(), &phases[..n])).unwrap();

        let base = check_confined(&inst.a, &inst.rho, &inst.omega).unwrap()[0].slack_f64();
        let turned = check_confined(&a, &rho, &inst.omega).unwrap()[0].slack_f64();
        prop_assert!((base - turned).abs() <= 1e-9 * base.abs().max(1.0));

        let s0 = spectral_entropy(&inst.a, &inst.rho).unwrap();
        let s1 = spectral_entropy(&a, &rho).unwrap();
        prop_assert!((s0 - s1).abs() <= 1e-9 * s0.abs().max(1.0));
        let e = check_entropy(&a, &rho).unwrap();
        prop_assert!(e.iter().all(|r| !r.is_failure()));
        let lt = check_lieb_thirring(&a, &rho, &inst.coarse, &inst.fine, &[1.0]).unwrap();
        prop_assert!(lt.iter().all(|r| !r.is_failure()));
    }

    #[test]
    fn layer_cake_recovers_the_mass(seed in any::<u64>()) {
        let inst = random_instance(seed, 1, InstanceSpec::default());
        let density = Density::of_state(&inst.rho);
        let trace = inst.rho.trace();
        prop_assert!((density.total() - trace).abs() <= 1e-10 * trace.max(1.0));
        // ∫ ρ = ∫_0^∞ |{ρ > s}| ds
        let mut levels: Vec<f64> = density.per_point().to_vec();
        levels.sort_by(f64::total_cmp);
        let space = inst.a.space();
        let mut cake = 0.0;
        let mut prev = 0.0;
        for &s in &levels {
            let above: f64 = (0..space.points())
                .filter(|&x| density.at(x) >= s)
                .map(|x| space.weight(x))
                .sum();
            cake += (s - prev) * above;
            prev = s;
        }
        prop_assert!((cake - density.total()).abs() <= 1e-10 * trace.max(1.0), "{cake} vs {}", density.total());
    }

    #[test]
    fn filling_never_loses_to_a_symbol_on_a_grid(
        g in prop::collection::vec(0.0f64..4.0, 2..24),
        seed in any::<u64>(),
    ) {
        use rand::Rng;
        let mut rng = trial_rng(seed, 2);
        let h = rng.random_range(0.01..2.0);
        let vol = vec![h; g.len()];
        let sigma: Vec<f64> = g.iter().map(|_| rng.random_range(-3.0..3.0)).collect();
        let fill = bathtub(&g, &vol).unwrap();
        let s = symbol_entropy(&g, &vol, &sigma).unwrap();
        prop_assert!(fill.entropy <= s + 1e-12 * s.abs().max(1.0), "{} > {s}", fill.entropy);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn free_kernel_is_dominated_by_the_density(c1 in 0.2f64..2.0, c2 in -1.0f64..1.0, frac in 0.05f64..0.95, k in 1i64..12) {
        let s = Stencil::new(1, [
            (vec![0], 2.0 * (c1 + c2.abs())),
            (vec![1], -c1), (vec![-1], -c1),
            (vec![2], c2), (vec![-2], c2),
        ]).unwrap();
        let (lo, hi) = s.symbol_bounds();
        let lam = lo + frac * (hi - lo);
        let free = FreeSpectrum::with_panels(s, 8);
        let d = free.density(lam).value;
        let k0 = free.kernel(lam, &[0]).unwrap();
        prop_assert!((k0 - d).abs() <= 1e-10, "{k0} vs {d}");
        let (kp, km) = (free.kernel(lam, &[k]).unwrap(), free.kernel(lam, &[-k]).unwrap());
        prop_assert!((kp - km).abs() <= 1e-10);
        prop_assert!(kp.abs() <= d + 1e-10);
    }
}
