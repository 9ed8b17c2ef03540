//! Gaussian ensembles of real cyclic (circulant) matrices.
//!
//! A cyclic matrix is fixed by its first row; its eigenvalues are the DFT of
//! that row and its eigenvectors are the Fourier columns, so every spectral
//! quantity is available in closed form. The crate samples the ensemble,
//! checks its generalized-parity structure, evaluates the analytic spacing
//! laws and compares them to Monte Carlo data.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the `*64` aliases
//! below are what the runner and CLI use.

pub mod ensemble;
pub mod error;
pub mod laws;
pub mod matrix;
pub mod runner;
pub mod scalar;
pub mod spacing;
pub mod spectral;
pub mod symmetry;

pub use ensemble::{
    generalized_parity, materialize_matrix, pseudo_symmetry_residual, sample_first_row, EnsembleConfig,
    FirstRow, ParityMatrix,
};
pub use error::{Error, Result};
pub use laws::{mean_spacing_rc, LawKind, LawSpec};
pub use matrix::DenseMatrix;
pub use scalar::Real;
pub use spacing::{
    build_histogram, extract_cc, extract_generic, extract_rc, ks_distance, normalize_to_unit_mean, Histogram,
    PairingPolicy, SpacingKind, SpacingSample,
};
pub use spectral::{
    eigenvalues_dft, fourier_eigenvector, inverse_coefficients, s_matrix, EigenClass, SMatrix, Spectrum,
};
pub use symmetry::{eta_apply, eta_eigen_residual, eta_pair_product, pt_norm, symmetry_report, SymmetryReport};

pub type FirstRow64 = FirstRow<f64>;
pub type FirstRow32 = FirstRow<f32>;
pub type Spectrum64 = Spectrum<f64>;
pub type Spectrum32 = Spectrum<f32>;
pub type SMatrix64 = SMatrix<f64>;
pub type LawSpec64 = LawSpec<f64>;
pub type LawSpec32 = LawSpec<f32>;
pub type SpacingSample64 = SpacingSample<f64>;
pub type Histogram64 = Histogram<f64>;
pub type SymmetryReport64 = SymmetryReport<f64>;
pub type DenseMatrix64 = DenseMatrix<f64>;
