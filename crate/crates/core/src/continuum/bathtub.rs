//! Distribution function of a frequency density and the regular filling
//! that minimizes spectral entropy.
//!
//! A density is given per cell together with the cell's `vol*`.

use crate::error::{Error, Result};
use crate::inequality::IneqReport;

fn check(g: &[f64], vol: &[f64]) -> Result<()> {
    if g.len() != vol.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            found: vol.len(),
        });
    }
    if g.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
        return Err(Error::InvalidArgument("density must be nonnegative and finite".into()));
    }
    if vol.iter().any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidArgument("cell volumes must be positive".into()));
    }
    Ok(())
}

/// `F(y) = vol*{g > y}`, piecewise constant and decreasing in `y ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelDistribution {
    /// Distinct positive levels, decreasing.
    levels: Vec<f64>,
    /// `volumes[k] = vol*{g ≥ levels[k]}`.
    volumes: Vec<f64>,
}

impl LevelDistribution {
    pub fn new(g: &[f64], vol: &[f64]) -> Result<Self> {
        check(g, vol)?;
        let mut cells: Vec<(f64, f64)> = g
            .iter()
            .zip(vol)
            .filter(|(&x, _)| x > 0.0)
            .map(|(&x, &v)| (x, v))
            .collect();
        cells.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut levels = Vec::new();
        let mut volumes: Vec<f64> = Vec::new();
        let mut acc = 0.0;
        for (x, v) in cells {
            acc += v;
            if levels.last() == Some(&x) {
                *volumes.last_mut().expect("paired with levels") = acc;
            } else {
                levels.push(x);
                volumes.push(acc);
            }
        }
        Ok(LevelDistribution { levels, volumes })
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn volumes(&self) -> &[f64] {
        &self.volumes
    }

    /// `vol*{g > y}`.
    pub fn eval(&self, y: f64) -> f64 {
        let k = self.levels.partition_point(|&l| l > y);
        if k == 0 {
            0.0
        } else {
            self.volumes[k - 1]
        }
    }

    /// `vol*{g ≥ y}`.
    pub fn eval_closed(&self, y: f64) -> f64 {
        let k = self.levels.partition_point(|&l| l >= y);
        if k == 0 {
            0.0
        } else {
            self.volumes[k - 1]
        }
    }

    /// `∫_0^∞ F(y) dy = τ`.
    pub fn mass(&self) -> f64 {
        self.gaps().map(|(gap, v)| gap * v).sum()
    }

    /// `(y_k − y_{k+1}, vol*{g ≥ y_k})` with `y_{m+1} = 0`.
    fn gaps(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.levels.iter().enumerate().map(|(k, &y)| {
            let next = self.levels.get(k + 1).copied().unwrap_or(0.0);
            (y - next, self.volumes[k])
        })
    }

    /// `S_F = ∫_0^∞ ln F(y) F(y) dy`, summed exactly over level gaps.
    pub fn s_f(&self) -> f64 {
        self.gaps().map(|(gap, v)| gap * v * v.ln()).sum()
    }

    /// `(y, F(y))` at every jump, for plotting.
    pub fn samples(&self) -> Vec<(f64, f64)> {
        let mut out = vec![(0.0, self.eval(0.0))];
        for &y in self.levels.iter().rev() {
            out.push((y, self.eval(y)));
        }
        out
    }
}

/// `S_ξ = −Σ g ln g vol*`.
pub fn density_entropy(g: &[f64], vol: &[f64]) -> Result<f64> {
    check(g, vol)?;
    Ok(-g
        .iter()
        .zip(vol)
        .filter(|(&x, _)| x > 0.0)
        .map(|(&x, &v)| x * x.ln() * v)
        .sum::<f64>())
}

/// `S_{A_σ} = Σ g(ξ) vol*(ξ) ln vol*{σ ≤ σ(ξ)}`.
pub fn symbol_entropy(g: &[f64], vol: &[f64], sigma: &[f64]) -> Result<f64> {
    check(g, vol)?;
    if sigma.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            found: sigma.len(),
        });
    }
    if sigma.iter().any(|s| !s.is_finite()) {
        return Err(Error::InvalidArgument("symbol values must be finite".into()));
    }
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| sigma[a].total_cmp(&sigma[b]));
    let mut total = 0.0;
    let mut i = 0;
    let mut cum = 0.0;
    while i < order.len() {
        let mut j = i;
        while j < order.len() && sigma[order[j]] == sigma[order[i]] {
            cum += vol[order[j]];
            j += 1;
        }
        let l = cum.ln();
        total += order[i..j].iter().map(|&c| g[c] * vol[c]).sum::<f64>() * l;
        i = j;
    }
    Ok(total)
}

/// The decreasing regular filling: cell ranks by `g` descending, ties by
/// cell index.
///
/// On a grid of equal cells this minimizes `S_{A_σ}` over all symbols.
/// Cells of unequal volume are indivisible atoms and a different order can
/// do better.
pub fn regular_filling(g: &[f64], vol: &[f64]) -> Result<Vec<f64>> {
    check(g, vol)?;
    let mut order: Vec<usize> = (0..g.len()).collect();
    order.sort_by(|&a, &b| g[b].total_cmp(&g[a]).then(a.cmp(&b)));
    let mut sigma = vec![0.0; g.len()];
    for (rank, &c) in order.iter().enumerate() {
        sigma[c] = rank as f64;
    }
    Ok(sigma)
}

/// Result of the bathtub construction.
#[derive(Debug, Clone)]
pub struct Filling {
    pub sigma: Vec<f64>,
    pub entropy: f64,
    pub distribution: LevelDistribution,
    pub s_f: f64,
    pub trace: f64,
    /// `S_F − τ ≤ S_{A_σ}` for the filling.
    pub report: IneqReport,
}

pub fn bathtub(g: &[f64], vol: &[f64]) -> Result<Filling> {
    let sigma = regular_filling(g, vol)?;
    let entropy = symbol_entropy(g, vol, &sigma)?;
    let distribution = LevelDistribution::new(g, vol)?;
    let s_f = distribution.s_f();
    let trace: f64 = g.iter().zip(vol).map(|(x, v)| x * v).sum();
    let report = IneqReport::le("bathtub_lower_bound", s_f - trace, entropy).with("cells", g.len());
    Ok(Filling {
        sigma,
        entropy,
        distribution,
        s_f,
        trace,
        report,
    })
}

/// `S_F − τ ≤ S_{A_σ}` for a given symbol.
pub fn check_symbol(g: &[f64], vol: &[f64], sigma: &[f64]) -> Result<IneqReport> {
    let s = symbol_entropy(g, vol, sigma)?;
    let d = LevelDistribution::new(g, vol)?;
    let trace: f64 = g.iter().zip(vol).map(|(x, v)| x * v).sum();
    Ok(IneqReport::le("symbol_entropy_lower_bound", d.s_f() - trace, s))
}

/// `S_F ≤ S_ξ + τ(1 + ln τ)`.
pub fn entropy_comparison(g: &[f64], vol: &[f64]) -> Result<IneqReport> {
    let d = LevelDistribution::new(g, vol)?;
    let trace: f64 = g.iter().zip(vol).map(|(x, v)| x * v).sum();
    if trace <= 0.0 {
        return Err(Error::ZeroState);
    }
    let s_xi = density_entropy(g, vol)?;
    Ok(IneqReport::le(
        "entropy_comparison",
        d.s_f(),
        s_xi + trace * (1.0 + trace.ln()),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    const G: [f64; 3] = [3.0, 1.0, 2.0];
    const V: [f64; 3] = [1.0, 1.0, 1.0];

    #[test]
    fn three_cell_example() {
        let d = LevelDistribution::new(&G, &V).unwrap();
        assert_eq!(d.eval(0.5), 3.0);
        assert_eq!(d.eval(1.0), 2.0);
        assert_eq!(d.eval(1.5), 2.0);
        assert_eq!(d.eval(2.5), 1.0);
        assert_eq!(d.eval(3.0), 0.0);
        assert_eq!(d.eval_closed(3.0), 1.0);
        let sf = 3.0 * 3f64.ln() + 2.0 * 2f64.ln();
        assert!((d.s_f() - sf).abs() < 1e-14);
        assert!((d.mass() - 6.0).abs() < 1e-14);
        assert!((density_entropy(&G, &V).unwrap() + sf).abs() < 1e-14);
        let c = entropy_comparison(&G, &V).unwrap();
        assert!((c.rhs.to_f64() - (-sf + 6.0 * (1.0 + 6f64.ln()))).abs() < 1e-12);
        assert!(c.holds);

        let f = bathtub(&G, &V).unwrap();
        assert_eq!(f.sigma, vec![0.0, 2.0, 1.0]);
        assert!((f.entropy - (2.0 * 2f64.ln() + 3f64.ln())).abs() < 1e-14);
        assert!((f.report.lhs.to_f64() - (sf - 6.0)).abs() < 1e-14);
        assert!(f.report.holds);
    }

    #[test]
    fn uniform_density_single_level() {
        let g = [0.5; 4];
        let v = [0.25; 4];
        let d = LevelDistribution::new(&g, &v).unwrap();
        assert!((d.s_f() - 0.5 * 1f64.ln()).abs() < 1e-15);
        let g = [2.0; 5];
        let v = [1.0; 5];
        let d = LevelDistribution::new(&g, &v).unwrap();
        assert!((d.s_f() - 10.0 * 5f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn ties_in_symbol_count_together() {
        // all cells tied: each sees the full volume
        let s = symbol_entropy(&G, &V, &[0.0, 0.0, 0.0]).unwrap();
        assert!((s - 6.0 * 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn empty_support() {
        let d = LevelDistribution::new(&[0.0, 0.0], &[1.0, 1.0]).unwrap();
        assert_eq!(d.s_f(), 0.0);
        assert_eq!(d.eval(0.0), 0.0);
    }

    #[test]
    fn unequal_atoms_can_beat_the_sorted_order() {
        let (g, v) = ([1.0, 0.9], [10.0, 0.1]);
        let sorted = bathtub(&g, &v).unwrap().entropy;
        let reversed = symbol_entropy(&g, &v, &[1.0, 0.0]).unwrap();
        assert!(reversed < sorted);
        let equal = bathtub(&g, &[1.0, 1.0]).unwrap().entropy;
        assert!(equal <= symbol_entropy(&g, &[1.0, 1.0], &[1.0, 0.0]).unwrap());
    }
}
