//! Extremal test functions, Cesàro-type kernels and the random-sign
//! counterexample.

pub mod extremal;
pub mod kernel;
pub mod rademacher;

pub use extremal::{
    alpha_beta, bergman_gn, beta_values, delta_values, extremal_fn, extremal_series, gamma_delta,
    min_truncation, phi_psi_n, ExtremalFn,
};
pub use kernel::{h_poly, polygonal_psi, w_kernel, PolygonalProfile, W_KERNEL_BOUND};
pub use rademacher::{
    construct_upsilon, khinchine_report, rademacher_value, RademacherReport, Upsilon, UpsilonBlock,
};
