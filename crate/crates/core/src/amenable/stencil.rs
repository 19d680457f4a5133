//! Symmetric convolution operators on `ℤᵈ`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `(Af)(x) = Σ_k c_k f(x + k)` with `c_{−k} = c_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Stencil {
    dim: usize,
    taps: Vec<(Vec<i64>, f64)>,
}

impl Stencil {
    pub fn new(dim: usize, taps: impl IntoIterator<Item = (Vec<i64>, f64)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidStencil("lattice dimension must be at least 1".into()));
        }
        let mut merged: BTreeMap<Vec<i64>, f64> = BTreeMap::new();
        for (k, c) in taps {
            if k.len() != dim {
                return Err(Error::InvalidStencil(format!("offset {k:?} does not have {dim} coordinates")));
            }
            if !c.is_finite() {
                return Err(Error::InvalidStencil(format!("coefficient at {k:?} is not finite")));
            }
            if k.iter().any(|v| v.unsigned_abs() > 1 << 20) {
                return Err(Error::InvalidStencil(format!("offset {k:?} is too far")));
            }
            *merged.entry(k).or_insert(0.0) += c;
        }
        merged.retain(|_, c| *c != 0.0);
        if merged.is_empty() {
            return Err(Error::InvalidStencil("stencil has no nonzero taps".into()));
        }
        let scale = merged.values().fold(0.0f64, |m, c| m.max(c.abs()));
        for (k, &c) in &merged {
            let neg: Vec<i64> = k.iter().map(|v| -v).collect();
            let d = merged.get(&neg).copied().unwrap_or(0.0);
            if (d - c).abs() > 1e-12 * scale {
                return Err(Error::InvalidStencil(format!("coefficient at {k:?} differs from its mirror")));
            }
        }
        Ok(Stencil {
            dim,
            taps: merged.into_iter().collect(),
        })
    }

    /// The discrete Laplacian `2d δ_0 − Σ_{|k|=1} δ_k`.
    pub fn laplacian(dim: usize) -> Result<Self> {
        let mut taps = vec![(vec![0; dim], 2.0 * dim as f64)];
        for a in 0..dim {
            for s in [-1, 1] {
                let mut k = vec![0; dim];
                k[a] = s;
                taps.push((k, -1.0));
            }
        }
        Stencil::new(dim, taps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn taps(&self) -> &[(Vec<i64>, f64)] {
        &self.taps
    }

    /// Locality radius `max ‖k‖_∞`.
    pub fn radius(&self) -> usize {
        self.taps
            .iter()
            .flat_map(|(k, _)| k.iter().map(|v| v.unsigned_abs() as usize))
            .max()
            .unwrap_or(0)
    }

    /// `σ̂(θ) = Σ c_k cos⟨k, θ⟩`.
    pub fn symbol(&self, theta: &[f64]) -> f64 {
        self.taps
            .iter()
            .map(|(k, c)| c * k.iter().zip(theta).map(|(&a, &t)| a as f64 * t).sum::<f64>().cos())
            .sum()
    }

    /// `Σ |c_k| ≥ ‖A‖_∞`.
    pub fn norm_bound(&self) -> f64 {
        self.taps.iter().map(|(_, c)| c.abs()).sum()
    }

    /// Interval containing the range of the symbol.
    pub fn symbol_bounds(&self) -> (f64, f64) {
        let c0 = self
            .taps
            .iter()
            .find(|(k, _)| k.iter().all(|&v| v == 0))
            .map(|t| t.1)
            .unwrap_or(0.0);
        let rest = self.norm_bound() - c0.abs();
        (c0 - rest, c0 + rest)
    }

    /// Sites of `[0, N)ᵈ` in row-major order.
    pub fn box_sites(&self, n: usize) -> Vec<Vec<i64>> {
        let total = n.pow(self.dim as u32);
        (0..total)
            .map(|mut i| {
                let mut x = vec![0i64; self.dim];
                for a in (0..self.dim).rev() {
                    x[a] = (i % n) as i64;
                    i /= n;
                }
                x
            })
            .collect()
    }

    /// The compression `χ_Ω A χ_Ω` to the box `[0, N)ᵈ`.
    pub fn box_matrix(&self, n: usize) -> DMatrix<f64> {
        let sites = self.box_sites(n);
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
        let mut m = DMatrix::zeros(sites.len(), sites.len());
        for (i, x) in sites.iter().enumerate() {
            for (k, c) in &self.taps {
                let y: Vec<i64> = x.iter().zip(k).map(|(a, b)| a + b).collect();
                if let Some(j) = index(&y) {
                    m[(i, j)] += c;
                }
            }
        }
        m
    }
}

/// JSON form: `{"dim": 1, "taps": {"0": 2, "1": -1, "-1": -1}}`, offsets
/// written as comma-separated coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StencilDoc {
    pub dim: usize,
    pub taps: BTreeMap<String, f64>,
}

impl StencilDoc {
    pub fn to_stencil(&self) -> Result<Stencil> {
        let taps = self
            .taps
            .iter()
            .map(|(key, &c)| {
                let k = key
                    .split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<i64>()
                            .map_err(|_| Error::InvalidStencil(format!("bad offset {key:?}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok((k, c))
            })
            .collect::<Result<Vec<_>>>()?;
        Stencil::new(self.dim, taps)
    }

    pub fn from_stencil(s: &Stencil) -> Self {
        StencilDoc {
            dim: s.dim,
            taps: s
                .taps
                .iter()
                .map(|(k, c)| (k.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","), *c))
                .collect(),
        }
    }
}

pub fn parse_stencil(json: &str) -> Result<Stencil> {
    let doc: StencilDoc = serde_json::from_str(json)?;
    doc.to_stencil()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn laplacian_properties() {
        let s = Stencil::laplacian(1).unwrap();
        assert_eq!(s.radius(), 1);
        assert_eq!(s.norm_bound(), 4.0);
        assert_eq!(s.symbol_bounds(), (0.0, 4.0));
        assert!((s.symbol(&[std::f64::consts::PI / 2.0]) - 2.0).abs() < 1e-15);
        let m = s.box_matrix(4);
        assert_eq!(m[(0, 0)], 2.0);
        assert_eq!(m[(0, 1)], -1.0);
        assert_eq!(m[(0, 3)], 0.0);
        let s2 = Stencil::laplacian(2).unwrap();
        assert_eq!(s2.box_matrix(3).nrows(), 9);
        assert!((s2.symbol(&[0.0, 0.0])).abs() < 1e-15);
    }

    #[test]
    fn rejects_asymmetric() {
        assert!(Stencil::new(1, vec![(vec![1], 1.0)]).is_err());
        assert!(Stencil::new(1, vec![(vec![1, 0], 1.0)]).is_err());
        assert!(parse_stencil(r#"{"dim":1,"taps":{"x":1}}"#).is_err());
    }

    #[test]
    fn json_round_trip() {
        let s = parse_stencil(r#"{"dim":2,"taps":{"0,0":4,"1,0":-1,"-1,0":-1,"0,1":-1,"0,-1":-1}}"#).unwrap();
        assert_eq!(s, Stencil::laplacian(2).unwrap());
        let back = StencilDoc::from_stencil(&s).to_stencil().unwrap();
        assert_eq!(back, s);
    }
}
