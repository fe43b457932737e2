//! Nyström discretization of the logarithmic and Riesz potential operators on
//! pixel masks, and extraction of extremal eigenpairs.

pub mod dense;
mod kernel;
mod lanczos;
mod lattice;
mod operator;
mod spectrum;

pub use kernel::{KernelKind, KernelSpec};
pub use lanczos::{lanczos_extreme, End, LanczosOptions, RitzPair};
pub use lattice::LatticeOperator;
pub use operator::{assemble, assemble_with_cap, cell_cap, LinearOperator, OperatorMatrix, DEFAULT_MAX_CELLS, MAX_CELLS_ENV};
pub use spectrum::{
    bottom_eig, energy, extremal_eigs, positive_sign_check, rayleigh, refine_study, richardson, sign_report, solve,
    solve_ends, solve_ends_with_cap, tau_bottom, tau_top1, top_eigs, EigenMethod, EigenPair, Ends, Extrapolation, RefineRow, RefineTable,
    SignReport, SpectralResult, SpectralSummary, DENSE_LIMIT,
};
