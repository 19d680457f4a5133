//! Eigensystems, spectral projectors and spectral measures.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::SymmetricEigen;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::model::operator::{CMatrix, FiniteOperator};
use crate::model::space::{MeasureSpace, Region};
use crate::monotone::MonotoneStep;

/// Eigenvalues closer than this times `max(1, spread)` form one group.
pub const GROUP_RTOL: f64 = 1e-9;
/// Spectral-measure jumps below this times `max(1, total)` are dropped.
pub const JUMP_RTOL: f64 = 1e-14;

/// Which side of `λ` the projector covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProjectorMode {
    /// `Π_{(−∞, λ)}`.
    Strict,
    /// `Π_{(−∞, λ]}`.
    Closed,
}

/// How a spectral function acts on the order of the spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    StrictlyIncreasing,
    NonDecreasing,
    Unknown,
}

/// Spectral measure target.
#[derive(Debug, Clone)]
pub enum MeasureTarget<'a> {
    /// `F_Ω(λ) = τ(Π_λ χ_Ω Π_λ)`.
    Region(&'a Region),
    /// `F_x(λ)`, the density of `Π_λ` at a point.
    Point(usize),
    /// `F_A(λ) = sup_x F_x(λ)`.
    Sup,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    space: Arc<MeasureSpace>,
    eigenvalues: Vec<f64>,
    vectors: CMatrix,
    groups: Vec<Range<usize>>,
    group_values: Vec<f64>,
}

impl SpectralDecomposition {
    /// Diagonalizes a Hermitian matrix (already validated by the caller).
    pub(crate) fn compute(space: Arc<MeasureSpace>, matrix: &CMatrix) -> Self {
        let eig = SymmetricEigen::new(matrix.clone());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let n = matrix.nrows();
        let vectors = CMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        SpectralDecomposition::assemble(space, eigenvalues, vectors)
    }

    fn assemble(space: Arc<MeasureSpace>, eigenvalues: Vec<f64>, vectors: CMatrix) -> Self {
        let (groups, group_values) = group_sorted(&eigenvalues);
        SpectralDecomposition {
            space,
            eigenvalues,
            vectors,
            groups,
            group_values,
        }
    }

    pub fn space(&self) -> &Arc<MeasureSpace> {
        &self.space
    }

    /// Ascending eigenvalues.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.vectors
    }

    /// Index ranges of (numerically) equal eigenvalues.
    pub fn groups(&self) -> &[Range<usize>] {
        &self.groups
    }

    /// Representative value (mean) of each group.
    pub fn group_values(&self) -> &[f64] {
        &self.group_values
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.function_matrix(|i| self.eigenvalues[i])
    }

    /// `Σ_i g(i) v_i v_i*`.
    pub fn function_matrix(&self, g: impl Fn(usize) -> f64) -> CMatrix {
        let n = self.vectors.nrows();
        let mut scaled = self.vectors.clone();
        for c in 0..n {
            let s = g(c);
            scaled.column_mut(c).scale_mut(s);
        }
        &scaled * self.vectors.adjoint()
    }

    /// Projector onto the eigenvectors with index in `cols`.
    pub fn span_projector(&self, cols: impl IntoIterator<Item = usize>) -> CMatrix {
        let n = self.vectors.nrows();
        let mut out = CMatrix::zeros(n, n);
        for c in cols {
            let v = self.vectors.column(c);
            out += v * v.adjoint();
        }
        out
    }

    fn groups_below(&self, lambda: f64, mode: ProjectorMode) -> usize {
        self.group_values
            .iter()
            .take_while(|&&g| match mode {
                ProjectorMode::Strict => g < lambda,
                ProjectorMode::Closed => g <= lambda,
            })
            .count()
    }

    /// Number of eigenvalues (with multiplicity) inside the projector.
    pub fn count_below(&self, lambda: f64, mode: ProjectorMode) -> usize {
        let k = self.groups_below(lambda, mode);
        if k == 0 {
            0
        } else {
            self.groups[k - 1].end
        }
    }

    pub fn projector_matrix(&self, lambda: f64, mode: ProjectorMode) -> CMatrix {
        self.span_projector(0..self.count_below(lambda, mode))
    }

    /// `Π_λ` (strict) or `Π_{λ⁺}` (closed) as an operator.
    pub fn projector(&self, lambda: f64, mode: ProjectorMode) -> FiniteOperator {
        FiniteOperator::new(self.space.clone(), self.projector_matrix(lambda, mode))
            .expect("spectral projectors are Hermitian")
    }

    /// `Σ_{i∈g} ‖χ_Ω v_i‖²` per group.
    pub fn group_weights(&self, region: &Region) -> Vec<f64> {
        let idx = region.basis_indices(&self.space);
        self.groups
            .iter()
            .map(|g| {
                g.clone()
                    .map(|c| idx.iter().map(|&r| self.vectors[(r, c)].norm_sqr()).sum::<f64>())
                    .sum()
            })
            .collect()
    }

    /// Per-point density of each group projector: `[x][g]`.
    pub fn point_group_densities(&self) -> Vec<Vec<f64>> {
        let space = &self.space;
        (0..space.points())
            .map(|x| {
                let w = space.weight(x);
                self.groups
                    .iter()
                    .map(|g| {
                        let s: f64 = g
                            .clone()
                            .map(|c| {
                                space
                                    .indices_of(x)
                                    .map(|r| self.vectors[(r, c)].norm_sqr())
                                    .sum::<f64>()
                            })
                            .sum();
                        s / w
                    })
                    .collect()
            })
            .collect()
    }

    /// The spectral measure as an exact left-continuous step function.
    pub fn spectral_measure(&self, target: MeasureTarget<'_>) -> MonotoneStep {
        match target {
            MeasureTarget::Region(r) => self.step_from_jumps(&self.group_weights(r)),
            MeasureTarget::Point(x) => {
                let d = self.point_group_densities();
                self.step_from_jumps(&d[x])
            }
            MeasureTarget::Sup => self.sup_measure(),
        }
    }

    /// `F_A = sup_x F_x`, a step function with breakpoints at group values.
    pub fn sup_measure(&self) -> MonotoneStep {
        let levels = self.sup_levels();
        let mut breakpoints = Vec::new();
        let mut values = vec![0.0];
        for (g, &v) in levels.iter().enumerate() {
            if v > *values.last().unwrap() {
                breakpoints.push(self.group_values[g]);
                values.push(v);
            }
        }
        MonotoneStep::new(breakpoints, values).expect("sup of spectral measures is monotone")
    }

    /// `F_A⁺(λ_g)`: the right limit of `F_A` at every group value.
    pub fn sup_levels(&self) -> Vec<f64> {
        let dens = self.point_group_densities();
        let ng = self.groups.len();
        let mut levels = vec![0.0f64; ng];
        for row in &dens {
            let mut cum = 0.0;
            for (g, w) in row.iter().enumerate() {
                cum += w;
                levels[g] = levels[g].max(cum);
            }
        }
        levels
    }

    fn step_from_jumps(&self, jumps: &[f64]) -> MonotoneStep {
        let total: f64 = jumps.iter().sum();
        let thresh = JUMP_RTOL * total.max(1.0);
        let mut breakpoints = Vec::new();
        let mut values = vec![0.0];
        let mut cum = 0.0;
        for (g, &w) in jumps.iter().enumerate() {
            cum += w;
            if w > thresh {
                breakpoints.push(self.group_values[g]);
                values.push(cum);
            }
        }
        MonotoneStep::new(breakpoints, values).expect("cumulative spectral weights are monotone")
    }

    /// `f(A)` with the same eigenvectors. For strictly increasing `f` the
    /// grouping is kept as is, so every quantity built from the groups is
    /// reproduced exactly.
    pub fn map(&self, f: impl Fn(f64) -> f64, mono: Monotonicity) -> Result<SpectralDecomposition> {
        let mut mapped = Vec::with_capacity(self.eigenvalues.len());
        for &l in &self.eigenvalues {
            let y = f(l);
            if !y.is_finite() {
                return Err(Error::FunctionUndefined(l));
            }
            mapped.push(y);
        }
        if mono == Monotonicity::StrictlyIncreasing {
            if mapped.windows(2).any(|w| w[1] < w[0]) {
                return Err(Error::InvalidArgument(
                    "function declared strictly increasing reverses the spectrum".into(),
                ));
            }
            let group_values = self
                .groups
                .iter()
                .zip(&self.group_values)
                .map(|(g, &v)| {
                    if g.len() == 1 {
                        mapped[g.start]
                    } else {
                        f(v)
                    }
                })
                .collect();
            return Ok(SpectralDecomposition {
                space: self.space.clone(),
                eigenvalues: mapped,
                vectors: self.vectors.clone(),
                groups: self.groups.clone(),
                group_values,
            });
        }
        let mut order: Vec<usize> = (0..mapped.len()).collect();
        order.sort_by(|&a, &b| mapped[a].total_cmp(&mapped[b]));
        let n = self.vectors.nrows();
        let vectors = CMatrix::from_fn(n, n, |r, c| self.vectors[(r, order[c])]);
        let eigenvalues = order.iter().map(|&i| mapped[i]).collect();
        Ok(SpectralDecomposition::assemble(self.space.clone(), eigenvalues, vectors))
    }

    /// `‖V*V − I‖_max`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.vectors.ncols();
        let g = self.vectors.adjoint() * &self.vectors;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

/// Groups an ascending list into runs with consecutive gaps at most
/// `GROUP_RTOL · max(1, spread)`.
fn group_sorted(values: &[f64]) -> (Vec<Range<usize>>, Vec<f64>) {
    let mut groups = Vec::new();
    let mut means = Vec::new();
    if values.is_empty() {
        return (groups, means);
    }
    let spread = values[values.len() - 1] - values[0];
    let tol = GROUP_RTOL * spread.max(1.0);
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            let run = &values[start..i];
            means.push(if run.len() == 1 {
                run[0]
            } else {
                run.iter().sum::<f64>() / run.len() as f64
            });
            groups.push(start..i);
            start = i;
        }
    }
    (groups, means)
}

/// `f(A)` as an operator carrying the mapped decomposition.
pub fn apply_spectral_function(
    a: &FiniteOperator,
    f: impl Fn(f64) -> f64,
    mono: Monotonicity,
) -> Result<FiniteOperator> {
    let dec = a.spectral().map(f, mono)?;
    Ok(FiniteOperator::from_spectral(dec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn op(rows: usize, data: &[f64]) -> FiniteOperator {
        let space = Arc::new(MeasureSpace::uniform(rows));
        FiniteOperator::from_real(space, &DMatrix::from_row_slice(rows, rows, data)).unwrap()
    }

    #[test]
    fn decomposition_examples() {
        let a = op(2, &[0.0, 1.0, 1.0, 0.0]);
        let ev = a.spectral().eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-14 && (ev[1] - 1.0).abs() < 1e-14);
        let d = op(3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        assert_eq!(d.spectral().eigenvalues(), &[1.0, 2.0, 3.0]);
        let id = op(2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(id.spectral().groups(), &[0..2]);
        assert!((a.spectral().reconstruct() - a.matrix()).norm() < 1e-12);
        assert!(a.spectral().orthonormality_defect() < 1e-12);
    }

    #[test]
    fn projector_examples() {
        let d = op(3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let p = d.spectral().projector_matrix(2.5, ProjectorMode::Strict);
        let diag: Vec<f64> = (0..3).map(|i| p[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, 1.0, 0.0]);
        assert_eq!(d.spectral().projector_matrix(1.0, ProjectorMode::Strict).norm(), 0.0);
        assert_eq!(d.spectral().count_below(1.0, ProjectorMode::Closed), 1);

        let a = op(2, &[0.0, 1.0, 1.0, 0.0]);
        let p = a.spectral().projector_matrix(0.0, ProjectorMode::Strict);
        let expect = DMatrix::from_row_slice(2, 2, &[0.5, -0.5, -0.5, 0.5]).map(|x| Complex64::new(x, 0.0));
        assert!((p - expect).norm() < 1e-14);
    }

    #[test]
    fn spectral_measure_examples() {
        let d = op(3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        let space = d.space().clone();
        let omega = Region::new(&space, [0, 1]).unwrap();
        let f = d.spectral().spectral_measure(MeasureTarget::Region(&omega));
        assert_eq!(f.eval(2.5), 2.0);
        assert_eq!(f.eval(1.0), 0.0);
        assert_eq!(f.eval(10.0), 2.0);
        // localized eigenvectors: F_A⁺ is 1 at every eigenvalue
        assert_eq!(d.spectral().sup_levels(), vec![1.0, 1.0, 1.0]);
        let fa = d.spectral().sup_measure();
        assert_eq!(fa.eval(1.0), 0.0);
        assert_eq!(fa.eval_right(1.0), 1.0);
    }

    #[test]
    fn spectral_function_examples() {
        let a = op(2, &[0.0, 0.0, 0.0, 2f64.ln()]);
        let e = apply_spectral_function(&a, |x| (-x).exp(), Monotonicity::Unknown).unwrap();
        assert!((e.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((e.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
        assert_eq!(e.spectral().eigenvalues()[0], 0.5);

        let b = op(2, &[-1.0, 0.0, 0.0, 2.0]);
        let cut = apply_spectral_function(&b, |x| x.max(0.0), Monotonicity::NonDecreasing).unwrap();
        assert_eq!(cut.matrix()[(0, 0)].re, 0.0);
        assert_eq!(cut.matrix()[(1, 1)].re, 2.0);

        let log = apply_spectral_function(&a, f64::ln, Monotonicity::StrictlyIncreasing);
        assert!(matches!(log, Err(Error::FunctionUndefined(x)) if x == 0.0));
    }
}
