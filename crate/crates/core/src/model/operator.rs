//! Hermitian operators and mixed states on `L²(X, μ) ⊗ V`.
//!
//! Matrices are stored in the μ-orthonormalized basis `δ_x ⊗ v_a / √μ(x)`,
//! so traces, adjoints and spectral calculus are the plain matrix ones.
//! An integral kernel `K(x, y)` (with `(Af)(x) = Σ_y K(x,y) f(y) μ(y)`)
//! corresponds to the matrix entry `√μ(x) K(x,y) √μ(y)`.

use std::sync::{Arc, OnceLock};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::space::{MeasureSpace, PartitionSpec, Region};
use crate::model::spectral::SpectralDecomposition;

pub type CMatrix = DMatrix<Complex64>;

/// Relative symmetry defect accepted on input.
pub const HERMITIAN_RTOL: f64 = 1e-12;
/// Relative negative eigenvalue clamped to zero in a state.
pub const PSD_RTOL: f64 = 1e-12;

/// A self-adjoint operator on the finite model.
#[derive(Debug, Clone)]
pub struct FiniteOperator {
    space: Arc<MeasureSpace>,
    matrix: CMatrix,
    spectral: OnceLock<Arc<SpectralDecomposition>>,
}

impl FiniteOperator {
    /// Validates finiteness and the Hermitian symmetry, then stores the
    /// symmetrized matrix `(A + A*)/2`.
    pub fn new(space: Arc<MeasureSpace>, matrix: CMatrix) -> Result<Self> {
        let n = space.dim();
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: matrix.nrows().max(matrix.ncols()),
            });
        }
        for c in 0..n {
            for r in 0..n {
                let z = matrix[(r, c)];
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        let defect = (&matrix - matrix.adjoint()).norm();
        let allowed = HERMITIAN_RTOL * matrix.norm();
        if defect > allowed {
            return Err(Error::NotHermitian { defect, allowed });
        }
        let sym = (&matrix + matrix.adjoint()).scale(0.5);
        Ok(FiniteOperator {
            space,
            matrix: sym,
            spectral: OnceLock::new(),
        })
    }

    pub fn from_real(space: Arc<MeasureSpace>, matrix: &DMatrix<f64>) -> Result<Self> {
        FiniteOperator::new(space, matrix.map(|x| Complex64::new(x, 0.0)))
    }

    /// Real diagonal operator on a scalar-fiber space.
    pub fn diagonal(space: Arc<MeasureSpace>, diag: &[f64]) -> Result<Self> {
        let m = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag));
        FiniteOperator::from_real(space, &m)
    }

    /// Builds the operator from its integral kernel `K(x, y)` (scalar
    /// fiber): `(Af)(x) = Σ_y K(x, y) f(y) μ(y)`.
    pub fn from_kernel(space: Arc<MeasureSpace>, kernel: &CMatrix) -> Result<Self> {
        let d = space.fiber_dim();
        let m = CMatrix::from_fn(kernel.nrows(), kernel.ncols(), |i, j| {
            let s = (space.weight(i / d) * space.weight(j / d)).sqrt();
            kernel[(i, j)] * s
        });
        FiniteOperator::new(space, m)
    }

    /// Operator built directly from a decomposition, sharing its
    /// eigenvectors. Used by the spectral calculus.
    pub(crate) fn from_spectral(dec: SpectralDecomposition) -> Self {
        let matrix = dec.reconstruct();
        let space = dec.space().clone();
        let cell = OnceLock::new();
        let _ = cell.set(Arc::new(dec));
        FiniteOperator {
            space,
            matrix,
            spectral: cell,
        }
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Ascending eigensystem, computed once.
    pub fn spectral(&self) -> &Arc<SpectralDecomposition> {
        self.spectral.get_or_init(|| {
            Arc::new(SpectralDecomposition::compute(self.space.clone(), &self.matrix))
        })
    }

    /// Operator norm `‖A‖_∞`.
    pub fn norm_inf(&self) -> f64 {
        let ev = self.spectral().eigenvalues();
        ev.first()
            .map(|a| a.abs())
            .unwrap_or(0.0)
            .max(ev.last().map(|b| b.abs()).unwrap_or(0.0))
    }

    /// `A + k·Id`, recomputed from the shifted matrix.
    pub fn shifted(&self, k: f64) -> Self {
        let mut m = self.matrix.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += Complex64::new(k, 0.0);
        }
        FiniteOperator::new(self.space.clone(), m).expect("shift preserves hermiticity")
    }

    /// `k₁·A + k₂·Id`, recomputed from the matrix.
    pub fn affine(&self, scale: f64, shift: f64) -> Self {
        let mut m = self.matrix.scale(scale);
        for i in 0..m.nrows() {
            m[(i, i)] += Complex64::new(shift, 0.0);
        }
        FiniteOperator::new(self.space.clone(), m).expect("affine map preserves hermiticity")
    }

    /// The compression `χ_Ω A χ_Ω` restricted to the Ω-block: the
    /// Dirichlet realization of `A` in `Ω`.
    pub fn compression(&self, region: &Region) -> CMatrix {
        let idx = region.basis_indices(&self.space);
        CMatrix::from_fn(idx.len(), idx.len(), |i, j| self.matrix[(idx[i], idx[j])])
    }

    /// Integral kernel `K(x, y) = A_{xy} / √(μ(x) μ(y))`.
    pub fn kernel(&self) -> CMatrix {
        let d = self.space.fiber_dim();
        CMatrix::from_fn(self.dim(), self.dim(), |i, j| {
            self.matrix[(i, j)] / (self.space.weight(i / d) * self.space.weight(j / d)).sqrt()
        })
    }
}

/// A positive (trace-class, here finite-rank) operator `ρ`.
#[derive(Debug, Clone)]
pub struct MixedState {
    op: FiniteOperator,
    eigenvalues: Vec<f64>,
}

impl MixedState {
    /// Validates positivity. Eigenvalues in `[-1e-12·‖ρ‖, 0)` are clamped to
    /// zero; more negative ones are rejected.
    pub fn new(space: Arc<MeasureSpace>, matrix: CMatrix) -> Result<Self> {
        let op = FiniteOperator::new(space, matrix)?;
        MixedState::from_operator(op)
    }

    pub fn from_operator(op: FiniteOperator) -> Result<Self> {
        let ev = op.spectral().eigenvalues().to_vec();
        let scale = ev.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let allowed = PSD_RTOL * scale;
        if let Some(&bad) = ev.iter().find(|&&x| x < -allowed) {
            return Err(Error::NotPositive {
                eigenvalue: bad,
                allowed,
            });
        }
        let eigenvalues = ev.into_iter().map(|x| x.max(0.0)).collect();
        Ok(MixedState { op, eigenvalues })
    }

    /// The pure state `π_f` on a function given by its values `f(x, a)`.
    /// The function is normalized in `L²(X, μ) ⊗ V`.
    pub fn pure(space: Arc<MeasureSpace>, values: &[Complex64]) -> Result<Self> {
        if values.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: values.len(),
            });
        }
        let d = space.fiber_dim();
        let coords: Vec<Complex64> = values
            .iter()
            .enumerate()
            .map(|(i, v)| v * space.weight(i / d).sqrt())
            .collect();
        let norm = coords.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::ZeroState);
        }
        let v = nalgebra::DVector::from_iterator(coords.len(), coords.iter().map(|c| c / norm));
        MixedState::new(space, &v * v.adjoint())
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        self.op.space()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.op.matrix()
    }

    pub fn as_operator(&self) -> &FiniteOperator {
        &self.op
    }

    /// Clamped eigenvalues, ascending.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn trace(&self) -> f64 {
        self.op.matrix().trace().re
    }

    /// `‖ρ‖_∞`, the largest eigenvalue.
    pub fn norm_inf(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }

    pub fn is_zero(&self) -> bool {
        self.norm_inf() == 0.0
    }

    /// `ρ^{1/2}` by spectral calculus on the clamped eigenvalues.
    pub fn sqrt(&self) -> CMatrix {
        let dec = self.op.spectral();
        dec.function_matrix(|i| self.eigenvalues[i].sqrt())
    }

    pub fn scaled(&self, k: f64) -> Result<Self> {
        MixedState::new(self.space().clone(), self.matrix().scale(k))
    }

    /// `ρ / τ(ρ)`.
    pub fn normalized(&self) -> Result<Self> {
        let t = self.trace();
        if t <= 0.0 {
            return Err(Error::ZeroState);
        }
        self.scaled(1.0 / t)
    }

    /// Largest entry of `(Id − χ_Ω) ρ` in Frobenius norm, relative to `‖ρ‖`.
    pub fn leakage(&self, region: &Region) -> f64 {
        let mask = region.indicator(self.space());
        let m = self.matrix();
        let mut s = 0.0;
        for c in 0..m.ncols() {
            for (r, inside) in mask.iter().enumerate() {
                if !inside {
                    s += m[(r, c)].norm_sqr();
                }
            }
        }
        s.sqrt()
    }

    /// The collapsed state `Σ_i χ_{Ω_i} ρ χ_{Ω_i}`.
    pub fn collapse(&self, partition: &PartitionSpec) -> MixedState {
        let space = self.space().clone();
        let labels = partition.labels(&space);
        let d = space.fiber_dim();
        let m = self.matrix();
        let out = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            if labels[r / d] == labels[c / d] {
                m[(r, c)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        MixedState::new(space, out).expect("block compressions of a state are positive")
    }

    /// The compressed state `χ_Ω ρ χ_Ω`.
    pub fn restrict(&self, region: &Region) -> MixedState {
        let space = self.space().clone();
        let mask = region.indicator(&space);
        let m = self.matrix();
        let out = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| {
            if mask[r] && mask[c] {
                m[(r, c)]
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        MixedState::new(space, out).expect("compressions of a state are positive")
    }

    /// Von Neumann entropy `S(ρ) = −τ(ρ ln ρ)` of a unit-trace state, with
    /// `0 · ln 0 = 0`.
    pub fn von_neumann_entropy(&self) -> Result<f64> {
        let t = self.trace();
        if (t - 1.0).abs() > 1e-9 {
            return Err(Error::NotUnitTrace { trace: t });
        }
        Ok(-self
            .eigenvalues
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.ln())
            .sum::<f64>())
    }
}

/// Which part of the operator enters the energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyPart {
    /// `τ(ρA)`.
    Full,
    /// `τ(ρ^{1/2} max(A, 0) ρ^{1/2})`.
    Positive,
}

/// Energy of a state for an operator sharing its space.
pub fn energy(rho: &MixedState, a: &FiniteOperator, part: EnergyPart) -> Result<f64> {
    if rho.space() != a.space() && **rho.space() != **a.space() {
        return Err(Error::InvalidArgument("state and operator live on different spaces".into()));
    }
    if rho.matrix().nrows() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: rho.matrix().nrows(),
        });
    }
    match part {
        EnergyPart::Full => Ok(trace_product(rho.matrix(), a.matrix())),
        EnergyPart::Positive => {
            let dec = a.spectral();
            let plus = dec.function_matrix(|i| dec.eigenvalues()[i].max(0.0));
            Ok(trace_product(rho.matrix(), &plus))
        }
    }
}

/// `Re τ(XY)` for Hermitian `X, Y` without forming the product.
pub fn trace_product(x: &CMatrix, y: &CMatrix) -> f64 {
    let n = x.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += (x[(i, j)] * y[(j, i)]).re;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rejects_non_hermitian_with_defect() {
        let space = Arc::new(MeasureSpace::uniform(2));
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(0.5), c(0.0)]);
        match FiniteOperator::new(space, m) {
            Err(Error::NotHermitian { defect, .. }) => assert!((defect - 0.5f64.sqrt()).abs() < 1e-12),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn rejects_indefinite_state_and_clamps_roundoff() {
        let space = Arc::new(MeasureSpace::uniform(2));
        let bad = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-0.1)]);
        assert!(matches!(
            MixedState::new(space.clone(), bad),
            Err(Error::NotPositive { .. })
        ));
        let ok = CMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1e-14)]);
        let rho = MixedState::new(space, ok).unwrap();
        assert_eq!(rho.eigenvalues()[0], 0.0);
    }

    #[test]
    fn energy_examples() {
        let space = Arc::new(MeasureSpace::uniform(2));
        let a = FiniteOperator::diagonal(space.clone(), &[-1.0, 2.0]).unwrap();
        let half = MixedState::new(space.clone(), CMatrix::identity(2, 2).scale(0.5)).unwrap();
        assert!((energy(&half, &a, EnergyPart::Full).unwrap() - 0.5).abs() < 1e-15);
        assert!((energy(&half, &a, EnergyPart::Positive).unwrap() - 1.0).abs() < 1e-14);

        let b = FiniteOperator::diagonal(space.clone(), &[5.0, 7.0]).unwrap();
        let rho = MixedState::new(
            space.clone(),
            CMatrix::from_row_slice(2, 2, &[c(0.3), c(0.0), c(0.0), c(0.2)]),
        )
        .unwrap();
        assert!((energy(&rho, &b, EnergyPart::Full).unwrap() - 2.9).abs() < 1e-14);

        // eigenvector state has energy equal to its eigenvalue
        let swap = FiniteOperator::from_real(
            space.clone(),
            &DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]),
        )
        .unwrap();
        let f = MixedState::pure(space, &[c(1.0), c(1.0)]).unwrap();
        assert!((energy(&f, &swap, EnergyPart::Full).unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn collapse_examples() {
        let space = Arc::new(MeasureSpace::uniform(2));
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(0.6), Complex64::new(0.1, 0.2), Complex64::new(0.1, -0.2), c(0.4)],
        );
        let rho = MixedState::new(space.clone(), m.clone()).unwrap();
        let split = PartitionSpec::discrete(&space);
        let col = rho.collapse(&split);
        assert_eq!(col.matrix()[(0, 1)], Complex64::new(0.0, 0.0));
        assert_eq!(col.matrix()[(0, 0)], c(0.6));
        assert!((col.trace() - rho.trace()).abs() < 1e-15);
        let same = rho.collapse(&PartitionSpec::trivial(&space));
        assert_eq!(same.matrix(), &m);
    }

    #[test]
    fn von_neumann_examples() {
        let space = Arc::new(MeasureSpace::uniform(4));
        let mixed = MixedState::new(space.clone(), CMatrix::identity(4, 4).scale(0.25)).unwrap();
        assert!((mixed.von_neumann_entropy().unwrap() - 4f64.ln()).abs() < 1e-14);
        let pure = MixedState::pure(space.clone(), &[c(1.0), c(2.0), c(0.0), c(-1.0)]).unwrap();
        assert!(pure.von_neumann_entropy().unwrap().abs() < 1e-12);
        let twice = mixed.scaled(2.0).unwrap();
        assert!(matches!(twice.von_neumann_entropy(), Err(Error::NotUnitTrace { .. })));
    }

    #[test]
    fn kernel_round_trip_with_weights() {
        let space = Arc::new(MeasureSpace::new(vec![0.5, 2.0], 1).unwrap());
        let k = CMatrix::from_row_slice(2, 2, &[c(1.0), c(3.0), c(3.0), c(-2.0)]);
        let a = FiniteOperator::from_kernel(space, &k).unwrap();
        assert!((a.matrix()[(0, 1)].re - 3.0).abs() < 1e-15);
        assert!((a.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
        assert!((&a.kernel() - &k).norm() < 1e-14);
    }
}
