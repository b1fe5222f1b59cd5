//! B-spline Gabor frames for representing oscillatory solutions of 2D
//! Helmholtz scattering problems.
//!
//! The crate builds Gabor systems from cardinal B-spline windows, their
//! explicit compactly supported duals and the sampled canonical dual, and
//! computes expansion coefficients by dual analysis, least squares, and
//! (block) orthogonal matching pursuit in both sampled and function-space
//! form. The [`experiment`] module wires these into accuracy-versus-sparsity
//! runs on two benchmark scattering fields.

pub mod analysis;
pub mod bspline;
pub mod error;
pub mod experiment;
pub mod gabor;
mod linalg;
pub mod quadrature;
pub mod sparse;
pub mod special;
pub mod targets;

pub use num_complex::Complex64;

pub use analysis::{build_setup, reconstruct, relative_error, ErrorReport, IntervalSetup};
pub use bspline::{make_bspline, product_integral, BSplineWindow, PiecewisePolynomial};
pub use error::{Error, Result};
pub use gabor::{
    canonical_dual, check_frame_parameters, dual_window_theorem2, dual_window_theorem3, estimate_frame_bounds,
    sample_frame, AtomIndex, DualKind, DualWindow, FrameBounds, GaborSystem, Grid, IndexRange, SampledFrame,
};
pub use sparse::{
    analyze_with_dual, least_squares, omp, omp_functional, truncate_top_n, CoefficientVector, FunctionalOmpState,
    OmpState, Provenance,
};
pub use experiment::{run_experiment, ExperimentConfig, ExperimentOutcome, Method, TargetKind};
pub use targets::{CylinderScatteringField, PointSourceField, Target, TargetField};
