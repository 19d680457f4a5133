//! Mixed states sampled on a periodic box grid, with their discrete
//! Fourier transforms.
//!
//! Box `∏ [a_j, a_j + L_j)` with `M_j` samples per axis, row-major with the
//! last axis fastest. Frequencies are `ξ = 2πk/L`, `k ∈ [−M/2, M/2)`, and
//! `f̂(ξ) = Δxⁿ Σ_x f(x) e^{−i⟨ξ,x⟩}`. The Plancherel cell volume is
//! `(2π)^{-n} (2π/L)ⁿ = L^{-n}`, which makes discrete Plancherel exact.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Orthonormality and Plancherel tolerance.
pub const GRID_RTOL: f64 = 1e-10;
/// Cells below this density are dropped from entropy sums.
pub const DENSITY_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone)]
pub struct GridState {
    lengths: Vec<f64>,
    samples: Vec<usize>,
    origin: Vec<f64>,
    components: Vec<Vec<Complex64>>,
    weights: Vec<f64>,
    transforms: Vec<Vec<Complex64>>,
    spatial: Vec<f64>,
    spectral: Vec<f64>,
}

fn validate_box(lengths: &[f64], samples: &[usize], origin: &[f64]) -> Result<usize> {
    if lengths.is_empty() {
        return Err(Error::InvalidGrid("need at least one axis".into()));
    }
    if samples.len() != lengths.len() || origin.len() != lengths.len() {
        return Err(Error::InvalidGrid("lengths, samples and origin must have one entry per axis".into()));
    }
    if lengths.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(Error::InvalidGrid("box lengths must be positive and finite".into()));
    }
    if origin.iter().any(|o| !o.is_finite()) {
        return Err(Error::InvalidGrid("origin must be finite".into()));
    }
    if samples.iter().any(|&m| m < 2) {
        return Err(Error::InvalidGrid("need at least 2 samples per axis".into()));
    }
    samples
        .iter()
        .try_fold(1usize, |acc, &m| acc.checked_mul(m))
        .filter(|&c| c <= 1 << 24)
        .ok_or_else(|| Error::InvalidGrid("grid too large".into()))
}

/// In-place n-dimensional forward DFT.
fn fft_nd(data: &mut [Complex64], samples: &[usize]) {
    let mut planner = FftPlanner::new();
    let total = data.len();
    let mut stride = total;
    for &m in samples {
        stride /= m;
        let fft = planner.plan_fft_forward(m);
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let block = m * stride;
        for outer in 0..total / block {
            for inner in 0..stride {
                let base = outer * block + inner;
                for (k, v) in line.iter_mut().enumerate() {
                    *v = data[base + k * stride];
                }
                fft.process(&mut line);
                for (k, v) in line.iter().enumerate() {
                    data[base + k * stride] = *v;
                }
            }
        }
    }
}

fn signed_index(k: usize, m: usize) -> i64 {
    if k < m.div_ceil(2) {
        k as i64
    } else {
        k as i64 - m as i64
    }
}

impl GridState {
    /// Validates shapes, weights and orthonormality of the components.
    pub fn new(
        lengths: Vec<f64>,
        samples: Vec<usize>,
        origin: Vec<f64>,
        components: Vec<Vec<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        let cells = validate_box(&lengths, &samples, &origin)?;
        if components.len() != weights.len() {
            return Err(Error::InvalidGrid("one weight per component required".into()));
        }
        if weights.iter().any(|&p| !(p >= 0.0 && p.is_finite())) {
            return Err(Error::InvalidGrid("weights must be nonnegative and finite".into()));
        }
        for c in &components {
            if c.len() != cells {
                return Err(Error::DimensionMismatch {
                    expected: cells,
                    found: c.len(),
                });
            }
            if c.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
                return Err(Error::InvalidGrid("non-finite amplitude".into()));
            }
        }
        let dx: f64 = lengths.iter().zip(&samples).map(|(l, &m)| l / m as f64).product();
        for i in 0..components.len() {
            for j in i..components.len() {
                let g: Complex64 = components[i]
                    .iter()
                    .zip(&components[j])
                    .map(|(a, b)| a.conj() * b)
                    .sum::<Complex64>()
                    * dx;
                let target = if i == j { 1.0 } else { 0.0 };
                if (g - target).norm() > GRID_RTOL {
                    return Err(Error::InvalidGrid(format!(
                        "components {i} and {j} are not orthonormal (inner product {g})"
                    )));
                }
            }
        }
        let transforms: Vec<Vec<Complex64>> = components
            .par_iter()
            .map(|c| {
                let mut d = c.clone();
                fft_nd(&mut d, &samples);
                d.iter_mut().for_each(|z| *z *= dx);
                d
            })
            .collect();
        let mut spatial = vec![0.0; cells];
        let mut spectral = vec![0.0; cells];
        for ((c, t), &p) in components.iter().zip(&transforms).zip(&weights) {
            for k in 0..cells {
                spatial[k] += p * c[k].norm_sqr();
                spectral[k] += p * t[k].norm_sqr();
            }
        }
        Ok(GridState {
            lengths,
            samples,
            origin,
            components,
            weights,
            transforms,
            spatial,
            spectral,
        })
    }

    /// Orthonormalizes the components (modified Gram–Schmidt in `L²(dx)`)
    /// before validating. Components that become numerically dependent are
    /// rejected.
    pub fn orthonormalized(
        lengths: Vec<f64>,
        samples: Vec<usize>,
        origin: Vec<f64>,
        mut components: Vec<Vec<Complex64>>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        validate_box(&lengths, &samples, &origin)?;
        let dx: f64 = lengths.iter().zip(&samples).map(|(l, &m)| l / m as f64).product();
        for i in 0..components.len() {
            let (done, rest) = components.split_at_mut(i);
            let v = &mut rest[0];
            for _ in 0..2 {
                for u in done.iter() {
                    let proj: Complex64 = u.iter().zip(v.iter()).map(|(a, b)| a.conj() * b).sum::<Complex64>() * dx;
                    v.iter_mut().zip(u).for_each(|(b, a)| *b -= proj * a);
                }
            }
            let norm = (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * dx).sqrt();
            if !(norm > 1e-8) {
                return Err(Error::InvalidGrid(format!("component {i} is linearly dependent")));
            }
            v.iter_mut().for_each(|z| *z /= norm);
        }
        GridState::new(lengths, samples, origin, components, weights)
    }

    /// A pure state from one sampled function, normalized on the grid.
    pub fn pure(lengths: Vec<f64>, samples: Vec<usize>, origin: Vec<f64>, f: Vec<Complex64>) -> Result<Self> {
        GridState::orthonormalized(lengths, samples, origin, vec![f], vec![1.0])
    }

    pub fn dim(&self) -> usize {
        self.lengths.len()
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn samples(&self) -> &[usize] {
        &self.samples
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn components(&self) -> &[Vec<Complex64>] {
        &self.components
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn transforms(&self) -> &[Vec<Complex64>] {
        &self.transforms
    }

    pub fn cells(&self) -> usize {
        self.spatial.len()
    }

    /// `Δxⁿ`.
    pub fn cell_volume(&self) -> f64 {
        self.lengths.iter().zip(&self.samples).map(|(l, &m)| l / m as f64).product()
    }

    /// `vol*` of a frequency cell, `∏ 1/L_j`.
    pub fn frequency_cell_volume(&self) -> f64 {
        self.lengths.iter().map(|l| 1.0 / l).product()
    }

    fn multi_index(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for a in (0..self.dim()).rev() {
            idx[a] = k % self.samples[a];
            k /= self.samples[a];
        }
        idx
    }

    /// Sample point of cell `k`.
    pub fn position(&self, k: usize) -> Vec<f64> {
        self.multi_index(k)
            .iter()
            .enumerate()
            .map(|(a, &i)| self.origin[a] + i as f64 * self.lengths[a] / self.samples[a] as f64)
            .collect()
    }

    /// Frequency of cell `k` in transform order.
    pub fn frequency(&self, k: usize) -> Vec<f64> {
        self.multi_index(k)
            .iter()
            .enumerate()
            .map(|(a, &i)| 2.0 * std::f64::consts::PI * signed_index(i, self.samples[a]) as f64 / self.lengths[a])
            .collect()
    }

    /// `‖ξ‖²` per frequency cell.
    pub fn frequency_norms2(&self) -> Vec<f64> {
        (0..self.cells())
            .map(|k| self.frequency(k).iter().map(|x| x * x).sum())
            .collect()
    }

    /// `dν_ρ/dx` per cell.
    pub fn spatial_density(&self) -> &[f64] {
        &self.spatial
    }

    /// `g = dν_ρ̂/d*ξ` per frequency cell.
    pub fn frequency_density(&self) -> &[f64] {
        &self.spectral
    }

    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `‖ρ‖_∞ = max p_i` for orthonormal components.
    pub fn norm_inf(&self) -> f64 {
        self.weights.iter().copied().fold(0.0, f64::max)
    }

    /// `(Σ dν/dx Δxⁿ − τ, Σ g vol* − τ)`.
    pub fn plancherel_defect(&self) -> (f64, f64) {
        let t = self.trace();
        (
            self.spatial.iter().sum::<f64>() * self.cell_volume() - t,
            self.spectral.iter().sum::<f64>() * self.frequency_cell_volume() - t,
        )
    }

    fn nonzero(&self) -> Result<()> {
        if self.trace() <= 0.0 {
            Err(Error::ZeroState)
        } else {
            Ok(())
        }
    }

    /// `S_x(ρ) = −∫ ln(dν_ρ/dx) dν_ρ`.
    pub fn spatial_entropy(&self) -> Result<f64> {
        self.nonzero()?;
        Ok(neg_entropy_sum(&self.spatial, self.cell_volume()))
    }

    /// `S_ξ(ρ̂) = −∫ ln(dν_ρ̂/d*ξ) dν_ρ̂`.
    pub fn frequency_entropy(&self) -> Result<f64> {
        self.nonzero()?;
        Ok(neg_entropy_sum(&self.spectral, self.frequency_cell_volume()))
    }

    /// `τ(σ(D) ρ) = ∫ σ(ξ) dν_ρ̂` for a radial symbol in `‖ξ‖²`.
    pub fn symbol_energy(&self, symbol: impl Fn(f64) -> f64) -> f64 {
        let v = self.frequency_cell_volume();
        self.frequency_norms2()
            .iter()
            .zip(&self.spectral)
            .map(|(&x2, &g)| symbol(x2) * g * v)
            .sum()
    }

    /// `Σ p_i ‖∇f_i‖²`, computed in frequency.
    pub fn gradient_energy(&self) -> f64 {
        self.symbol_energy(|x2| x2)
    }

    /// Sum over axes of `Σ |d_{k+1} − d_k|` along that axis, times the cell
    /// volume: a scale for quadrature error of integrals against `d`.
    pub fn variation_margin(&self) -> f64 {
        let tv = |d: &[f64]| {
            let mut s = 0.0;
            let mut stride = d.len();
            for &m in &self.samples {
                stride /= m;
                for k in 0..d.len() {
                    let i = (k / stride) % m;
                    if i + 1 < m {
                        s += (d[k + stride] - d[k]).abs();
                    }
                }
            }
            s
        };
        tv(&self.spatial) * self.cell_volume() + tv(&self.spectral) * self.frequency_cell_volume()
    }

    /// The tensor product state on the product box.
    pub fn tensor(&self, other: &GridState) -> Result<GridState> {
        let lengths = [self.lengths.clone(), other.lengths.clone()].concat();
        let samples = [self.samples.clone(), other.samples.clone()].concat();
        let origin = [self.origin.clone(), other.origin.clone()].concat();
        let mut comps = Vec::new();
        let mut weights = Vec::new();
        for (f, p) in self.components.iter().zip(&self.weights) {
            for (g, q) in other.components.iter().zip(&other.weights) {
                comps.push(f.iter().flat_map(|a| g.iter().map(move |b| a * b)).collect());
                weights.push(p * q);
            }
        }
        GridState::new(lengths, samples, origin, comps, weights)
    }

    /// `f(x) → a^{-n/2} f(x/a)` on the box scaled by `a`.
    pub fn rescaled(&self, a: f64) -> Result<GridState> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(Error::InvalidArgument("scale must be positive".into()));
        }
        let k = a.powf(-(self.dim() as f64) / 2.0);
        GridState::new(
            self.lengths.iter().map(|l| l * a).collect(),
            self.samples.clone(),
            self.origin.iter().map(|o| o * a).collect(),
            self.components
                .iter()
                .map(|c| c.iter().map(|z| z * k).collect())
                .collect(),
            self.weights.clone(),
        )
    }
}

/// `−Σ d ln d · vol`, dropping cells below the floor.
fn neg_entropy_sum(density: &[f64], vol: f64) -> f64 {
    -density
        .iter()
        .filter(|&&d| d >= DENSITY_FLOOR)
        .map(|&d| d * d.ln())
        .sum::<f64>()
        * vol
}

/// JSON form: components as interleaved `[re, im, re, im, …]` arrays.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridDoc {
    pub lengths: Vec<f64>,
    pub samples: Vec<usize>,
    #[serde(default)]
    pub origin: Option<Vec<f64>>,
    pub components: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl GridDoc {
    pub fn to_state(&self) -> Result<GridState> {
        let comps = self
            .components
            .iter()
            .map(|c| {
                if c.len() % 2 != 0 {
                    return Err(Error::InvalidGrid("interleaved component has odd length".into()));
                }
                Ok(c.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect())
            })
            .collect::<Result<Vec<_>>>()?;
        GridState::new(
            self.lengths.clone(),
            self.samples.clone(),
            self.origin.clone().unwrap_or_else(|| vec![0.0; self.lengths.len()]),
            comps,
            self.weights.clone(),
        )
    }

    pub fn from_state(s: &GridState) -> Self {
        GridDoc {
            lengths: s.lengths.clone(),
            samples: s.samples.clone(),
            origin: Some(s.origin.clone()),
            components: s
                .components
                .iter()
                .map(|c| c.iter().flat_map(|z| [z.re, z.im]).collect())
                .collect(),
            weights: s.weights.clone(),
        }
    }
}

pub fn parse_grid(json: &str) -> Result<GridState> {
    let doc: GridDoc = serde_json::from_str(json)?;
    doc.to_state()
}
