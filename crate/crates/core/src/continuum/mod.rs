//! Closed-form `ℝⁿ` Laplacian models, grid Fourier states and their
//! entropy functionals.

pub mod bathtub;
pub mod fourier;
pub mod grid;
pub mod laplacian;
pub mod mehler;

pub use bathtub::{bathtub, density_entropy, regular_filling, symbol_entropy, Filling, LevelDistribution};
pub use fourier::{
    check_confined_weyl, check_fourier_entropy, check_projection_entropy, check_spectral_entropy_bound,
    fourier_entropies, kinetic_lieb_thirring, FourierEntropies, SubBox,
};
pub use grid::{parse_grid, GridDoc, GridState};
pub use laplacian::{berezin_li_yau, box_dirichlet_eigenvalues, density_ratio, KineticSymbol, LaplacianModel};
pub use mehler::{hermite_functions, sample_oscillator, MehlerOracle, SampledOscillator};
