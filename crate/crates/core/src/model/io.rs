//! JSON documents for operators, states, regions and partitions.
//!
//! ```json
//! { "weights": [1, 1], "fiber_dim": 1, "matrix": [[0, 0], [1, 0], [1, 0], [0, 0]] }
//! ```
//!
//! `matrix` is row-major in the μ-orthonormalized basis; entries are
//! `[re, im]` pairs or plain real numbers.

use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::operator::{CMatrix, FiniteOperator, MixedState};
use crate::model::space::{MeasureSpace, PartitionSpec, Region};

#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
#[serde(untagged)]
pub enum Entry {
    Real(f64),
    Complex([f64; 2]),
}

impl Entry {
    fn value(self) -> Complex64 {
        match self {
            Entry::Real(x) => Complex64::new(x, 0.0),
            Entry::Complex([re, im]) => Complex64::new(re, im),
        }
    }
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct MatrixDoc {
    pub weights: Vec<f64>,
    #[serde(default = "one")]
    pub fiber_dim: usize,
    pub matrix: Vec<Entry>,
}

impl MatrixDoc {
    pub fn space(&self) -> Result<Arc<MeasureSpace>> {
        Ok(Arc::new(MeasureSpace::new(self.weights.clone(), self.fiber_dim)?))
    }

    pub fn matrix(&self, space: &MeasureSpace) -> Result<CMatrix> {
        let n = space.dim();
        if self.matrix.len() != n * n {
            return Err(Error::DimensionMismatch {
                expected: n * n,
                found: self.matrix.len(),
            });
        }
        Ok(CMatrix::from_row_iterator(
            n,
            n,
            self.matrix.iter().map(|e| e.value()),
        ))
    }

    pub fn operator(&self) -> Result<FiniteOperator> {
        let space = self.space()?;
        let m = self.matrix(&space)?;
        FiniteOperator::new(space, m)
    }

    /// A state on a given space; the document's weights must match.
    pub fn state_on(&self, space: &Arc<MeasureSpace>) -> Result<MixedState> {
        let own = self.space()?;
        if *own != **space {
            return Err(Error::InvalidArgument(
                "state and operator documents describe different spaces".into(),
            ));
        }
        MixedState::new(space.clone(), self.matrix(space)?)
    }

    pub fn state(&self) -> Result<MixedState> {
        let space = self.space()?;
        let m = self.matrix(&space)?;
        MixedState::new(space, m)
    }

    pub fn from_matrix(space: &MeasureSpace, m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                let z = m[(r, c)];
                entries.push(if z.im == 0.0 {
                    Entry::Real(z.re)
                } else {
                    Entry::Complex([z.re, z.im])
                });
            }
        }
        MatrixDoc {
            weights: space.weights().to_vec(),
            fiber_dim: space.fiber_dim(),
            matrix: entries,
        }
    }
}

pub fn parse_operator(json: &str) -> Result<FiniteOperator> {
    serde_json::from_str::<MatrixDoc>(json)?.operator()
}

pub fn parse_state(json: &str) -> Result<MixedState> {
    serde_json::from_str::<MatrixDoc>(json)?.state()
}

pub fn region_from_indices(space: &MeasureSpace, idx: &[usize]) -> Result<Region> {
    Region::new(space, idx.iter().copied())
}

pub fn partition_from_indices(space: &MeasureSpace, cells: &[Vec<usize>]) -> Result<PartitionSpec> {
    PartitionSpec::from_indices(space, cells)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_mixed_entry_forms() {
        let a = parse_operator(r#"{"weights":[1,2],"matrix":[1,[0,1],[0,-1],3]}"#).unwrap();
        assert_eq!(a.matrix()[(0, 1)], Complex64::new(0.0, 1.0));
        assert_eq!(a.space().weight(1), 2.0);
    }

    #[test]
    fn reports_position_and_shape_errors() {
        match parse_operator("{\"weights\": [1],\n \"matrix\": [1,}") {
            Err(Error::Json { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_operator(r#"{"weights":[1,1],"matrix":[1,2,3]}"#),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(matches!(
            parse_operator(r#"{"weights":[1,1],"matrix":[0,1,2,0]}"#),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn round_trip() {
        let a = parse_operator(r#"{"weights":[1,1],"matrix":[1,[0,1],[0,-1],3]}"#).unwrap();
        let doc = MatrixDoc::from_matrix(a.space(), a.matrix());
        let text = serde_json::to_string(&doc).unwrap();
        let b = parse_operator(&text).unwrap();
        assert_eq!(a.matrix(), b.matrix());
    }
}
