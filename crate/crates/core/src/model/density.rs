//! Density functions `Dν_P` of positive operators.

use crate::error::{Error, Result};
use crate::model::operator::{CMatrix, MixedState};
use crate::model::space::{MeasureSpace, Region};

/// Pointwise density `Dν_P(x)` of a positive operator together with the
/// measure it defines.
#[derive(Debug, Clone, PartialEq)]
pub struct Density {
    per_point: Vec<f64>,
    weights: Vec<f64>,
}

impl Density {
    /// In the orthonormalized basis `Dν_P(x) = Σ_a P_{xa,xa} / μ(x)`, the
    /// basis-free form of `Σ_i ‖(P^{1/2} e_i)(x)‖²`.
    pub fn of_matrix(space: &MeasureSpace, p: &CMatrix) -> Self {
        let per_point = (0..space.points())
            .map(|x| {
                space.indices_of(x).map(|i| p[(i, i)].re).sum::<f64>() / space.weight(x)
            })
            .collect();
        Density {
            per_point,
            weights: space.weights().to_vec(),
        }
    }

    pub fn of_state(rho: &MixedState) -> Self {
        Density::of_matrix(rho.space(), rho.matrix())
    }

    pub fn per_point(&self) -> &[f64] {
        &self.per_point
    }

    pub fn at(&self, x: usize) -> f64 {
        self.per_point[x]
    }

    /// `ν_P(Ω) = Σ_{x∈Ω} Dν_P(x) μ(x)`.
    pub fn mass(&self, region: &Region) -> f64 {
        region
            .members()
            .iter()
            .map(|&x| self.per_point[x] * self.weights[x])
            .sum()
    }

    pub fn total(&self) -> f64 {
        self.per_point
            .iter()
            .zip(&self.weights)
            .map(|(d, w)| d * w)
            .sum()
    }

    /// `D(P) = max_x Dν_P(x)`.
    pub fn sup(&self) -> f64 {
        self.per_point.iter().fold(0.0, |m, &d| m.max(d))
    }
}

/// `‖P‖_{1,∞}`: the largest absolute kernel entry `|P_{xy}| / √(μ(x)μ(y))`.
/// Only defined for a scalar fiber.
pub fn norm_one_inf(space: &MeasureSpace, p: &CMatrix) -> Result<f64> {
    if space.fiber_dim() != 1 {
        return Err(Error::InvalidArgument(
            "the L1 to Linf norm is only implemented for a scalar fiber".into(),
        ));
    }
    let n = space.points();
    let mut worst = 0.0f64;
    for x in 0..n {
        for y in 0..n {
            worst = worst.max(p[(x, y)].norm() / (space.weight(x) * space.weight(y)).sqrt());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::sync::Arc;

    #[test]
    fn density_examples() {
        let space = Arc::new(MeasureSpace::uniform(3));
        let s = 0.5f64.sqrt();
        let f = [Complex64::new(s, 0.0), Complex64::new(s, 0.0), Complex64::new(0.0, 0.0)];
        let rho = MixedState::pure(space.clone(), &f).unwrap();
        let d = Density::of_state(&rho);
        assert!((d.at(0) - 0.5).abs() < 1e-15 && (d.at(1) - 0.5).abs() < 1e-15);
        let x = Region::new(&space, [0]).unwrap();
        assert!((d.mass(&x) - 0.5).abs() < 1e-15);

        let id = Density::of_matrix(&space, &CMatrix::identity(3, 3));
        assert_eq!(id.per_point(), &[1.0, 1.0, 1.0]);
        assert_eq!(id.total(), 3.0);
    }

    #[test]
    fn weighted_pure_state_density_is_pointwise_modulus() {
        let space = Arc::new(MeasureSpace::new(vec![2.0, 0.5], 1).unwrap());
        // f = (a, b) with a²·2 + b²·0.5 = 1
        let f = [Complex64::new(0.5, 0.0), Complex64::new(0.0, 1.0)];
        let rho = MixedState::pure(space.clone(), &f).unwrap();
        let d = Density::of_state(&rho);
        assert!((d.at(0) - 0.25).abs() < 1e-15);
        assert!((d.at(1) - 1.0).abs() < 1e-15);
        let k = norm_one_inf(&space, rho.matrix()).unwrap();
        assert!(k <= d.sup() + 1e-15);
    }
}
