//! Finite weighted point sets, regions and partitions.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// A finite measure space `X` with point masses `μ(x) > 0` and a fiber `V`
/// of dimension `fiber_dim`. The Hilbert space is `L²(X, μ) ⊗ V` with
/// basis index `x · fiber_dim + a`.
/// Largest `|X| · dim V` accepted; dense matrices beyond this are not
/// representable anyway.
pub const MAX_DIM: usize = 1 << 16;

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureSpace {
    weights: Vec<f64>,
    fiber_dim: usize,
}

impl MeasureSpace {
    pub fn new(weights: Vec<f64>, fiber_dim: usize) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidSpace("no points".into()));
        }
        if fiber_dim == 0 {
            return Err(Error::InvalidSpace("fiber dimension must be positive".into()));
        }
        if weights.len().checked_mul(fiber_dim).is_none_or(|n| n > MAX_DIM) {
            return Err(Error::InvalidSpace(format!("Hilbert space dimension exceeds {MAX_DIM}")));
        }
        if let Some((i, w)) = weights
            .iter()
            .enumerate()
            .find(|(_, w)| !(w.is_finite() && **w > 0.0))
        {
            return Err(Error::InvalidSpace(format!(
                "weight of point {i} is {w}, must be positive and finite"
            )));
        }
        let total: f64 = weights.iter().sum();
        if !total.is_finite() {
            return Err(Error::InvalidSpace("total mass overflows".into()));
        }
        Ok(MeasureSpace { weights, fiber_dim })
    }

    /// `n` points of unit mass, scalar fiber.
    pub fn uniform(n: usize) -> Self {
        MeasureSpace::new(vec![1.0; n], 1).expect("uniform space is valid")
    }

    pub fn points(&self) -> usize {
        self.weights.len()
    }

    pub fn fiber_dim(&self) -> usize {
        self.fiber_dim
    }

    /// Dimension of the Hilbert space `|X| · dim V`.
    pub fn dim(&self) -> usize {
        self.weights.len() * self.fiber_dim
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, x: usize) -> f64 {
        self.weights[x]
    }

    pub fn total_mass(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn mass(&self, region: &Region) -> f64 {
        region.members().iter().map(|&x| self.weights[x]).sum()
    }

    /// The point carrying basis index `i`.
    pub fn point_of(&self, i: usize) -> usize {
        i / self.fiber_dim
    }

    /// Basis indices of a point.
    pub fn indices_of(&self, x: usize) -> std::ops::Range<usize> {
        x * self.fiber_dim..(x + 1) * self.fiber_dim
    }

    pub fn full_region(&self) -> Region {
        Region {
            members: (0..self.points()).collect(),
        }
    }
}

/// A subset `Ω ⊂ X`, stored as a sorted list of point indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Region {
    members: Vec<usize>,
}

impl Region {
    pub fn new(space: &MeasureSpace, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&x| x >= space.points()) {
            return Err(Error::InvalidRegion(format!(
                "point {bad} outside a space of {} points",
                space.points()
            )));
        }
        Ok(Region {
            members: set.into_iter().collect(),
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn is_subset(&self, other: &Region) -> bool {
        self.members.iter().all(|&x| other.contains(x))
    }

    /// Indicator of the region on the basis indices of `space`.
    pub fn indicator(&self, space: &MeasureSpace) -> Vec<bool> {
        let mut mask = vec![false; space.dim()];
        for &x in &self.members {
            for i in space.indices_of(x) {
                mask[i] = true;
            }
        }
        mask
    }

    /// Basis indices of the region, ascending.
    pub fn basis_indices(&self, space: &MeasureSpace) -> Vec<usize> {
        self.members
            .iter()
            .flat_map(|&x| space.indices_of(x))
            .collect()
    }

    pub fn complement(&self, space: &MeasureSpace) -> Region {
        Region {
            members: (0..space.points()).filter(|&x| !self.contains(x)).collect(),
        }
    }
}

/// An ordered list of pairwise disjoint regions covering `X`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    cells: Vec<Region>,
}

impl PartitionSpec {
    pub fn new(space: &MeasureSpace, cells: Vec<Region>) -> Result<Self> {
        let mut owner = vec![None; space.points()];
        for (c, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidRegion(format!("partition cell {c} is empty")));
            }
            for &x in cell.members() {
                if x >= space.points() {
                    return Err(Error::InvalidRegion(format!("point {x} outside the space")));
                }
                if let Some(prev) = owner[x] {
                    return Err(Error::InvalidRegion(format!(
                        "point {x} lies in cells {prev} and {c}"
                    )));
                }
                owner[x] = Some(c);
            }
        }
        if let Some(x) = owner.iter().position(Option::is_none) {
            return Err(Error::InvalidRegion(format!("point {x} is not covered")));
        }
        Ok(PartitionSpec { cells })
    }

    pub fn from_indices(space: &MeasureSpace, cells: &[Vec<usize>]) -> Result<Self> {
        let regions = cells
            .iter()
            .map(|c| Region::new(space, c.iter().copied()))
            .collect::<Result<Vec<_>>>()?;
        PartitionSpec::new(space, regions)
    }

    /// The one-cell partition `{X}`.
    pub fn trivial(space: &MeasureSpace) -> Self {
        PartitionSpec {
            cells: vec![space.full_region()],
        }
    }

    /// The partition into single points.
    pub fn discrete(space: &MeasureSpace) -> Self {
        PartitionSpec {
            cells: (0..space.points())
                .map(|x| Region { members: vec![x] })
                .collect(),
        }
    }

    pub fn cells(&self) -> &[Region] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Cell index of every point.
    pub fn labels(&self, space: &MeasureSpace) -> Vec<usize> {
        let mut labels = vec![0; space.points()];
        for (c, cell) in self.cells.iter().enumerate() {
            for &x in cell.members() {
                labels[x] = c;
            }
        }
        labels
    }

    /// True when every cell of `self` lies inside exactly one cell of
    /// `coarse`.
    pub fn refines(&self, coarse: &PartitionSpec) -> bool {
        self.cells
            .iter()
            .all(|fine| coarse.cells.iter().filter(|c| fine.is_subset(c)).count() == 1)
    }
}
