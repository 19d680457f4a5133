//! Confined states `ρ_Ω = χ_Ω Π_λ χ_Ω` on growing boxes `Ω_N = [0, N)ᵈ`
//! and the convergence of their energy per site to `φ(F(λ))`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

use crate::amenable::stencil::Stencil;
use crate::amenable::symbol::{Estimate, FreeSpectrum};
use crate::error::{Error, Result};
use crate::inequality::{confined_energy, IneqReport};
use crate::model::{CMatrix, FiniteOperator, MeasureSpace, MixedState, Region};

/// Dense-matrix budget `|Ω| ≤ 4096`.
pub const DENSE_CAP: usize = 4096;
/// Boxes up to this size are also checked through the finite core.
pub const FINITE_CAP: usize = 512;
/// Above this size the norm comes from Lanczos rather than a full
/// eigendecomposition.
const FULL_EIGEN_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq)]
pub struct FolnerConfig {
    pub lambda: f64,
    pub sizes: Vec<usize>,
    /// Outer-axis panels for the symbol quadrature; `None` for the default.
    pub panels: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FolnerRow {
    pub n: usize,
    pub sites: usize,
    /// `τ(ρ_Ω) = |Ω| F(λ)`.
    pub trace: f64,
    /// `E(ρ_Ω) = τ(A ρ_Ω)` from the matrix.
    pub energy: f64,
    pub energy_per_site: f64,
    /// `E(ρ_Ω)/|Ω|` from the kernel sum `Σ c_k Π(k) ∏(1 − |k_i|/N)`.
    pub energy_per_site_dual: f64,
    /// `E(ρ̃_Ω) = |Ω| Σ c_k Π(k)`.
    pub tilde_energy: f64,
    pub norm: f64,
    /// `‖ρ‖ φ(F(λ)/‖ρ‖)`, the per-site confined bound.
    pub phi_side: f64,
    pub phi_limit: f64,
    /// `|E(ρ_Ω)/|Ω| − φ(F(λ))|`.
    pub error: f64,
    pub phi_side_error: f64,
    /// `|∂_rΩ|` for the ℓ∞ distance.
    pub boundary: usize,
    /// Sites of `Ω` within `r` of the complement.
    pub inner_boundary: usize,
    pub boundary_ratio: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FolnerStudy {
    pub lambda: f64,
    pub dim: usize,
    pub radius: usize,
    pub norm_bound: f64,
    pub density: Estimate,
    pub phi_limit: Estimate,
    pub rows: Vec<FolnerRow>,
    /// `C` in `error ≤ C·|∂_rΩ|/|Ω|`, fitted at the smallest box.
    pub fitted_constant: f64,
    pub reports: Vec<IneqReport>,
}

impl FolnerStudy {
    pub fn csv(&self) -> String {
        let mut s = String::from("N,energy_per_site,phi_limit,error,boundary_ratio\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{:e},{:e},{:e},{:e}\n",
                r.n, r.energy_per_site, r.phi_limit, r.error, r.boundary_ratio
            ));
        }
        s
    }

    pub fn failures(&self) -> usize {
        self.reports.iter().filter(|r| r.is_failure()).count()
    }
}

/// `|∂_rΩ_N| = (N + 2r)ᵈ − (N − 2r)₊ᵈ` under the ℓ∞ distance.
pub fn boundary_size(n: usize, dim: usize, r: usize) -> usize {
    (n + 2 * r).pow(dim as u32) - n.saturating_sub(2 * r).pow(dim as u32)
}

/// `Nᵈ − (N − 2r)₊ᵈ`.
pub fn inner_boundary_size(n: usize, dim: usize, r: usize) -> usize {
    n.pow(dim as u32) - n.saturating_sub(2 * r).pow(dim as u32)
}

/// Kernel values `Π_λ(k)` for `k ∈ [−(N−1), N−1]ᵈ`, row-major.
struct KernelTable {
    side: usize,
    half: i64,
    values: Vec<f64>,
}

impl KernelTable {
    fn new(spectrum: &FreeSpectrum, lambda: f64, n: usize) -> Self {
        let dim = spectrum.stencil().dim();
        let side = 2 * n - 1;
        let half = n as i64 - 1;
        let ls = spectrum.level_set(lambda);
        let values = (0..side.pow(dim as u32))
            .into_par_iter()
            .map(|i| ls.kernel(&Self::offset(i, side, half, dim)))
            .collect();
        KernelTable { side, half, values }
    }

    fn offset(mut i: usize, side: usize, half: i64, dim: usize) -> Vec<i64> {
        let mut k = vec![0i64; dim];
        for a in (0..dim).rev() {
            k[a] = (i % side) as i64 - half;
            i /= side;
        }
        k
    }

    fn get(&self, k: &[i64]) -> f64 {
        let mut i = 0usize;
        for &v in k {
            i = i * self.side + (v + self.half) as usize;
        }
        self.values[i]
    }
}

fn rho_matrix(stencil: &Stencil, table: &KernelTable, n: usize) -> DMatrix<f64> {
    let sites = stencil.box_sites(n);
    let m = sites.len();
    let cols: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|j| {
            sites
                .iter()
                .map(|x| {
                    let k: Vec<i64> = x.iter().zip(&sites[j]).map(|(a, b)| a - b).collect();
                    table.get(&k)
                })
                .collect()
        })
        .collect();
    DMatrix::from_fn(m, m, |i, j| cols[j][i])
}

/// `τ(A ρ) = Σ_x Σ_k c_k ρ(x + k, x)` over pairs inside the box.
fn box_energy(stencil: &Stencil, rho: &DMatrix<f64>, n: usize) -> f64 {
    let sites = stencil.box_sites(n);
    let index = |x: &[i64]| -> Option<usize> {
        let mut i = 0usize;
        for &v in x {
            if v < 0 || v >= n as i64 {
                return None;
            }
            i = i * n + v as usize;
        }
        Some(i)
    };
    sites
        .iter()
        .enumerate()
        .map(|(i, x)| {
            stencil
                .taps()
                .iter()
                .filter_map(|(k, c)| {
                    let y: Vec<i64> = x.iter().zip(k).map(|(a, b)| a + b).collect();
                    index(&y).map(|j| c * rho[(j, i)])
                })
                .sum::<f64>()
        })
        .sum()
}

/// Largest eigenvalue of a symmetric matrix: full decomposition for small
/// sizes, Lanczos with full reorthogonalization above.
pub fn top_eigenvalue(m: &DMatrix<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    if n <= FULL_EIGEN_CAP {
        return SymmetricEigen::new(m.clone()).eigenvalues.max();
    }
    let steps = 120.min(n);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(steps);
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.25 * (i as f64 * 0.7).sin());
    v /= v.norm();
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    for _ in 0..steps {
        let mut w = m * &v;
        let a = v.dot(&w);
        w -= a * &v;
        if let Some(prev) = basis.last() {
            w -= *beta.last().unwrap_or(&0.0) * prev;
        }
        basis.push(v.clone());
        for _ in 0..2 {
            for q in &basis {
                let c = q.dot(&w);
                w -= c * q;
            }
        }
        alpha.push(a);
        let b = w.norm();
        if b < 1e-13 {
            break;
        }
        beta.push(b);
        v = w / b;
    }
    let k = alpha.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alpha[i]
        } else if i + 1 == j || j + 1 == i {
            beta[i.min(j)]
        } else {
            0.0
        }
    });
    SymmetricEigen::new(t).eigenvalues.max()
}

fn finite_check(stencil: &Stencil, rho: &DMatrix<f64>, n: usize) -> Result<IneqReport> {
    let dim = stencil.dim();
    let pad = stencil.radius().max(n / 2).max(1);
    let big = n + 2 * pad;
    let space = Arc::new(MeasureSpace::uniform(big.pow(dim as u32)));
    let a = FiniteOperator::from_real(space.clone(), &stencil.box_matrix(big))?;
    let inner = |x: &[i64]| -> usize { x.iter().fold(0usize, |i, &v| i * big + (v as usize + pad)) };
    let sites = stencil.box_sites(n);
    let map: Vec<usize> = sites.iter().map(|x| inner(x)).collect();
    let mut m = CMatrix::zeros(space.dim(), space.dim());
    for (i, &bi) in map.iter().enumerate() {
        for (j, &bj) in map.iter().enumerate() {
            m[(bi, bj)] = rho[(i, j)].into();
        }
    }
    let state = MixedState::new(space.clone(), m)?;
    let omega = Region::new(&space, map)?;
    Ok(confined_energy(&a, &state, &omega)?.with("n", n))
}

pub fn folner_convergence(stencil: &Stencil, config: &FolnerConfig) -> Result<FolnerStudy> {
    if config.sizes.is_empty() {
        return Err(Error::InvalidArgument("no box sizes".into()));
    }
    if config.sizes.windows(2).any(|w| w[1] <= w[0]) || config.sizes[0] == 0 {
        return Err(Error::InvalidArgument("box sizes must be positive and increasing".into()));
    }
    if !config.lambda.is_finite() {
        return Err(Error::InvalidArgument("level must be finite".into()));
    }
    let dim = stencil.dim();
    for &n in &config.sizes {
        let sites = n.checked_pow(dim as u32).unwrap_or(usize::MAX);
        if sites > DENSE_CAP {
            return Err(Error::TooLarge { sites, cap: DENSE_CAP });
        }
    }
    let spectrum = match config.panels {
        Some(p) => FreeSpectrum::with_panels(stencil.clone(), p),
        None => FreeSpectrum::new(stencil.clone()),
    };
    let lambda = config.lambda;
    let density = spectrum.density(lambda);
    if density.value <= 0.0 {
        return Err(Error::InvalidArgument("level lies below the spectrum; the state is zero".into()));
    }
    let phi_limit = spectrum.phi_at_level(lambda);
    let quad_tol = 1e-9 + 4.0 * (density.error + phi_limit.error);
    let r = stencil.radius();
    let norm_bound = stencil.norm_bound();
    let mut rows = Vec::new();
    let mut reports = Vec::new();

    let largest = *config.sizes.last().expect("nonempty");
    let table = KernelTable::new(&spectrum, lambda, largest);
    let free_energy: f64 = stencil.taps().iter().map(|(k, c)| c * table.get(k)).sum();
    reports.push(
        IneqReport::eq_tol("folner_spectral_identity", free_energy, phi_limit.value, quad_tol)
            .with("quadrature_error", phi_limit.error),
    );
    reports.push(IneqReport::eq_tol(
        "folner_trace_identity",
        table.get(&vec![0; dim]),
        density.value,
        quad_tol,
    ));

    for &n in &config.sizes {
        let sites = n.pow(dim as u32);
        let rho = rho_matrix(stencil, &table, n);
        let trace = rho.trace();
        let energy = box_energy(stencil, &rho, n);
        let dual: f64 = stencil
            .taps()
            .iter()
            .map(|(k, c)| {
                let overlap: f64 = k.iter().map(|&v| (1.0 - v.unsigned_abs() as f64 / n as f64).max(0.0)).product();
                c * table.get(&k.iter().map(|&v| v.clamp(-(n as i64 - 1), n as i64 - 1)).collect::<Vec<_>>()) * overlap
            })
            .sum();
        let norm = top_eigenvalue(&rho);
        let y = (density.value / norm).min(1.0);
        let phi_side = norm * spectrum.phi(y)?.to_f64();
        let tilde_energy = sites as f64 * free_energy;
        let boundary = boundary_size(n, dim, r);
        let inner_boundary = inner_boundary_size(n, dim, r);
        let sf = sites as f64;
        let row = FolnerRow {
            n,
            sites,
            trace,
            energy,
            energy_per_site: energy / sf,
            energy_per_site_dual: dual,
            tilde_energy,
            norm,
            phi_side,
            phi_limit: phi_limit.value,
            error: (energy / sf - phi_limit.value).abs(),
            phi_side_error: (phi_side - phi_limit.value).abs(),
            boundary,
            inner_boundary,
            boundary_ratio: boundary as f64 / sf,
        };
        let site_tol = quad_tol * norm_bound.max(1.0);
        reports.push(
            IneqReport::eq_tol("folner_energy_routes", row.energy_per_site, dual, site_tol).with("n", n),
        );
        reports.push(
            IneqReport::eq_tol("folner_trace", trace / sf, density.value, quad_tol).with("n", n),
        );
        reports.push(IneqReport::le("folner_norm", norm, 1.0).with("n", n));
        reports.push(
            IneqReport::le_margin("folner_confined_bound", phi_side, row.energy_per_site, site_tol)
                .with("n", n)
                .with("measure", "translation_invariant"),
        );
        let gap = (energy - tilde_energy).abs();
        reports.push(
            IneqReport::le("folner_commutator", gap, 2.0 * norm_bound * boundary as f64)
                .with("n", n)
                .with("boundary", boundary),
        );
        reports.push(
            IneqReport::le("folner_commutator_inner", gap, 2.0 * norm_bound * inner_boundary as f64)
                .with("n", n)
                .with("boundary", inner_boundary),
        );
        if (n + 2 * r.max(n / 2).max(1)).pow(dim as u32) <= FINITE_CAP {
            reports.push(finite_check(stencil, &rho, n)?.with("measure", "finite_box"));
        }
        rows.push(row);
    }

    let first = &rows[0];
    let fitted_constant = first.error / first.boundary_ratio;
    for pair in rows.windows(2) {
        reports.push(
            IneqReport::le("folner_error_decreasing", pair[1].error, pair[0].error)
                .with("n", pair[1].n)
                .with("previous", pair[0].n),
        );
    }
    for row in &rows {
        reports.push(
            IneqReport::le_margin(
                "folner_rate",
                row.error,
                fitted_constant * row.boundary_ratio * (1.0 + 1e-6),
                quad_tol * norm_bound.max(1.0),
            )
            .with("n", row.n)
            .with("fitted_constant", fitted_constant),
        );
    }
    Ok(FolnerStudy {
        lambda,
        dim,
        radius: r,
        norm_bound,
        density,
        phi_limit,
        rows,
        fitted_constant,
        reports,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn boundary_counts() {
        assert_eq!(boundary_size(64, 1, 1), 4);
        assert_eq!(inner_boundary_size(64, 1, 1), 2);
        assert_eq!(boundary_size(4, 2, 1), 36 - 4);
        assert_eq!(boundary_size(1, 1, 1), 3);
    }

    #[test]
    fn laplacian_line_closed_form() {
        let s = Stencil::laplacian(1).unwrap();
        let study = folner_convergence(
            &s,
            &FolnerConfig {
                lambda: 2.0,
                sizes: vec![8, 16, 32],
                panels: None,
            },
        )
        .unwrap();
        for r in &study.reports {
            assert!(r.holds, "{r:#?}");
        }
        for row in &study.rows {
            let exact = 1.0 - 2.0 / PI + 2.0 / (PI * row.n as f64);
            assert!((row.energy_per_site - exact).abs() < 1e-12);
            assert!((row.error - 2.0 / (PI * row.n as f64)).abs() < 1e-12);
        }
        assert!((study.fitted_constant - 1.0 / (2.0 * PI)).abs() < 1e-12);
        assert!(study.csv().starts_with("N,energy_per_site"));
        assert!(study.reports.iter().any(|r| r.name == "confined_energy"));
    }

    #[test]
    fn rejects_bad_sizes() {
        let s = Stencil::laplacian(2).unwrap();
        let cfg = |sizes: Vec<usize>| FolnerConfig {
            lambda: 4.0,
            sizes,
            panels: Some(8),
        };
        assert!(matches!(folner_convergence(&s, &cfg(vec![65])), Err(Error::TooLarge { .. })));
        assert!(folner_convergence(&s, &cfg(vec![8, 4])).is_err());
        assert!(folner_convergence(&s, &cfg(vec![])).is_err());
        let low = FolnerConfig {
            lambda: -1.0,
            sizes: vec![4],
            panels: Some(8),
        };
        assert!(folner_convergence(&s, &low).is_err());
    }

    #[test]
    fn lanczos_matches_full() {
        let n = 1100;
        let m = DMatrix::from_fn(n, n, |i, j| 1.0 / (1.0 + (i as f64 - j as f64).abs()));
        let l = top_eigenvalue(&m);
        let full = SymmetricEigen::new(m).eigenvalues.max();
        assert!((l - full).abs() < 1e-9 * full);
    }
}
