//! Lattice convolution operators and their Følner-box approximations.

pub mod folner;
pub mod stencil;
pub mod symbol;

pub use folner::{folner_convergence, FolnerConfig, FolnerRow, FolnerStudy};
pub use stencil::{parse_stencil, Stencil, StencilDoc};
pub use symbol::{default_panels, sublevel_intervals, Estimate, FreeSpectrum, LevelSet, TrigTerm};
