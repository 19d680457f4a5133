//! Both sides of each inequality on finite models, returned as
//! [`IneqReport`]s.

pub mod balance;
pub mod confined;
pub mod entropy;
pub mod heat;
pub mod lieb_thirring;
pub mod random;
pub mod report;
pub mod sharpness;

pub use balance::{balance_audit, no_improvement_witness, BalanceId, Domain, Transform};
pub use confined::{check_confined, confined_energy, dirichlet_bounds, dirichlet_eigenvalues};
pub use entropy::{check_entropy, check_log_sobolev, spatial_entropy, spectral_entropy};
pub use heat::heat_theta;
pub use lieb_thirring::{check_lieb_thirring, partition_functional, pointwise_functional, step_sandwich, Functional};
pub use report::{IneqReport, Relation, Verdict};
pub use sharpness::{sharpness_states, PointMetric, SharpnessStates};
