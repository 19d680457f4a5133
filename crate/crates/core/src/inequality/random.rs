//! Seeded random models for the randomized suites.
//!
//! Every trial draws from its own ChaCha stream, so trial `i` of seed `s`
//! is reproducible on its own and independent of worker scheduling.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::model::{CMatrix, FiniteOperator, MeasureSpace, MixedState, PartitionSpec, Region};
use crate::monotone::MonotoneStep;

pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn cnormal(rng: &mut impl Rng, real: bool) -> Complex64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = if real { 0.0 } else { rng.sample(StandardNormal) };
    Complex64::new(re, im)
}

/// Shape of the generated operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    /// Complex Hermitian with Gaussian entries.
    Generic,
    /// Real symmetric.
    Real,
    /// Random eigenbasis with repeated eigenvalues.
    Degenerate,
    /// Diagonal, eigenvectors localized at points.
    Diagonal,
}

const KINDS: [OperatorKind; 4] = [
    OperatorKind::Generic,
    OperatorKind::Real,
    OperatorKind::Degenerate,
    OperatorKind::Diagonal,
];

/// A random instance: operator, confined state, region and a nested pair
/// of partitions.
#[derive(Debug, Clone)]
pub struct Instance {
    pub a: FiniteOperator,
    pub rho: MixedState,
    pub omega: Region,
    pub coarse: PartitionSpec,
    pub fine: PartitionSpec,
    pub kind: OperatorKind,
}

/// Options for [`random_instance`].
#[derive(Debug, Clone, Copy)]
pub struct InstanceSpec {
    /// Upper bound on `|X| · d`.
    pub max_dim: usize,
    /// Force `A ≥ 0`.
    pub positive: bool,
    /// Scalar fiber only.
    pub scalar: bool,
    /// Unit-trace state.
    pub unit_trace: bool,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        InstanceSpec {
            max_dim: 16,
            positive: false,
            scalar: false,
            unit_trace: false,
        }
    }
}

pub fn random_space(rng: &mut impl Rng, max_dim: usize, scalar: bool) -> Arc<MeasureSpace> {
    let d = if scalar || max_dim < 4 || rng.random_bool(0.7) { 1 } else { 2 };
    let points = rng.random_range(2..=(max_dim / d).max(2));
    let uniform = rng.random_bool(0.3);
    let weights = (0..points)
        .map(|_| if uniform { 1.0 } else { rng.random_range(0.25..4.0) })
        .collect();
    Arc::new(MeasureSpace::new(weights, d).expect("positive weights"))
}

/// Orthonormal columns from a Gaussian matrix.
fn random_unitary(rng: &mut impl Rng, n: usize, real: bool) -> CMatrix {
    let g = CMatrix::from_fn(n, n, |_, _| cnormal(rng, real));
    g.qr().q()
}

pub fn random_operator(
    rng: &mut impl Rng,
    space: &Arc<MeasureSpace>,
    kind: OperatorKind,
    positive: bool,
) -> FiniteOperator {
    let n = space.dim();
    let scale = rng.random_range(0.5..5.0);
    let mut m = match kind {
        OperatorKind::Generic | OperatorKind::Real => {
            let real = kind == OperatorKind::Real;
            let g = CMatrix::from_fn(n, n, |_, _| cnormal(rng, real));
            (&g + g.adjoint()).scale(0.5 * scale / (n as f64).sqrt())
        }
        OperatorKind::Degenerate => {
            let levels: Vec<f64> = (0..rng.random_range(1..=3))
                .map(|_| rng.random_range(-scale..scale))
                .collect();
            let diag: Vec<f64> = (0..n).map(|_| levels[rng.random_range(0..levels.len())]).collect();
            let u = random_unitary(rng, n, false);
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)).map(|x| Complex64::new(x, 0.0));
            let m = &u * d * u.adjoint();
            (&m + m.adjoint()).scale(0.5)
        }
        OperatorKind::Diagonal => {
            let diag: Vec<f64> = (0..n).map(|_| rng.random_range(-scale..scale)).collect();
            DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)).map(|x| Complex64::new(x, 0.0))
        }
    };
    let shift = if positive {
        None
    } else {
        Some(rng.random_range(-3.0..3.0))
    };
    if let Some(k) = shift {
        for i in 0..n {
            m[(i, i)] += Complex64::new(k, 0.0);
        }
    }
    let a = FiniteOperator::new(space.clone(), m).expect("symmetrized matrix");
    if positive {
        // shift the bottom of the spectrum to 0 or above
        let lo = a.spectral().eigenvalues()[0];
        let lift = if rng.random_bool(0.3) { 0.0 } else { rng.random_range(0.0..2.0) };
        return a.shifted(lift - lo);
    }
    a
}

pub fn random_region(rng: &mut impl Rng, space: &MeasureSpace) -> Region {
    let n = space.points();
    let size = rng.random_range(1..=n);
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    Region::new(space, pts[..size].iter().copied()).expect("points of the space")
}

/// A random PSD state supported in `Ω`: Gram matrix of random vectors, or
/// a scaled projector onto a random subspace.
pub fn random_confined_state(rng: &mut impl Rng, space: &Arc<MeasureSpace>, omega: &Region) -> MixedState {
    let idx = omega.basis_indices(space);
    let k = idx.len();
    let rank = rng.random_range(1..=k);
    let n = space.dim();
    let mut b = CMatrix::zeros(n, rank);
    let real = rng.random_bool(0.25);
    for c in 0..rank {
        for &r in &idx {
            b[(r, c)] = cnormal(rng, real);
        }
    }
    let projector = rng.random_bool(0.3);
    let m = if projector {
        let q = b.columns(0, rank).into_owned();
        let sub = CMatrix::from_fn(k, rank, |i, j| q[(idx[i], j)]);
        let q = sub.qr().q();
        let mut full = CMatrix::zeros(n, rank);
        for (i, &r) in idx.iter().enumerate() {
            for j in 0..rank {
                full[(r, j)] = q[(i, j)];
            }
        }
        &full * full.adjoint()
    } else {
        &b * b.adjoint()
    };
    let norm = rng.random_range(0.2..3.0);
    let m = (&m + m.adjoint()).scale(0.5);
    let rho = MixedState::new(space.clone(), m).expect("Gram matrices are positive");
    rho.scaled(norm / rho.norm_inf()).expect("positive scaling")
}

/// A state on all of `X` (not confined).
pub fn random_state(rng: &mut impl Rng, space: &Arc<MeasureSpace>) -> MixedState {
    random_confined_state(rng, space, &space.full_region())
}

/// Random coarse partition and a refinement of it.
pub fn random_nested_partitions(rng: &mut impl Rng, space: &MeasureSpace) -> (PartitionSpec, PartitionSpec) {
    let n = space.points();
    let mut pts: Vec<usize> = (0..n).collect();
    pts.shuffle(rng);
    let cells = rng.random_range(1..=n.min(3));
    let mut coarse: Vec<Vec<usize>> = vec![Vec::new(); cells];
    for (i, &x) in pts.iter().enumerate() {
        let c = if i < cells { i } else { rng.random_range(0..cells) };
        coarse[c].push(x);
    }
    let mut fine = Vec::new();
    for cell in &coarse {
        let parts = rng.random_range(1..=cell.len());
        let mut split: Vec<Vec<usize>> = vec![Vec::new(); parts];
        for (i, &x) in cell.iter().enumerate() {
            let c = if i < parts { i } else { rng.random_range(0..parts) };
            split[c].push(x);
        }
        fine.extend(split);
    }
    (
        PartitionSpec::from_indices(space, &coarse).expect("cover"),
        PartitionSpec::from_indices(space, &fine).expect("cover"),
    )
}

/// Draws a full instance for trial `trial` of `seed`.
pub fn random_instance(seed: u64, trial: u64, spec: InstanceSpec) -> Instance {
    let mut rng = trial_rng(seed, trial);
    let kind = KINDS[(trial % 4) as usize];
    let space = random_space(&mut rng, spec.max_dim, spec.scalar);
    let a = random_operator(&mut rng, &space, kind, spec.positive);
    let omega = random_region(&mut rng, &space);
    let mut rho = random_confined_state(&mut rng, &space, &omega);
    if spec.unit_trace {
        rho = rho.normalized().expect("nonzero state");
    }
    let (coarse, fine) = random_nested_partitions(&mut rng, &space);
    Instance {
        a,
        rho,
        omega,
        coarse,
        fine,
        kind,
    }
}

/// Random operator-derived step function with up to `max_jumps` jumps.
pub fn random_step(rng: &mut impl Rng, max_jumps: usize, positive: bool) -> MonotoneStep {
    let m = rng.random_range(1..=max_jumps);
    let jumps: Vec<(f64, f64)> = (0..m)
        .map(|_| {
            let b = if positive {
                rng.random_range(0.0..10.0)
            } else {
                rng.random_range(-10.0..10.0)
            };
            (b, rng.random_range(0.05..3.0))
        })
        .collect();
    MonotoneStep::from_jumps(0.0, &jumps).expect("finite positive jumps")
}
