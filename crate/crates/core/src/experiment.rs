//! Accuracy-versus-sparsity experiments on the benchmark fields.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::analysis::{build_setup_with_support, reconstruct, relative_error, ErrorReport, IntervalSetup};
use crate::bspline::make_bspline;
use crate::error::{Error, Result};
use crate::gabor::{
    canonical_dual, check_frame_parameters, default_modulations, default_shifts, dual_window_theorem2,
    dual_window_theorem3, sample_frame, DualKind, GaborSystem, IndexRange, SampledFrame,
};
use crate::sparse::{
    analyze_with_dual, least_squares, truncate_top_n, CoefficientVector, FunctionalOmpState, OmpState,
};
use crate::targets::{CylinderScatteringField, PointSourceField, Target, TargetField};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Cylinder,
    PointSource,
}

impl TargetKind {
    pub fn build(self, k: f64, length: f64) -> Result<Target> {
        Ok(match self {
            TargetKind::Cylinder => Target::Cylinder(CylinderScatteringField::with_length(k, length)?),
            TargetKind::PointSource => {
                Target::PointSource(PointSourceField::with_source(k, (0.0, 1.5), length)?)
            }
        })
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            TargetKind::Cylinder => "cylinder",
            TargetKind::PointSource => "point-source",
        })
    }
}

impl FromStr for TargetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cylinder" => Ok(TargetKind::Cylinder),
            "point-source" => Ok(TargetKind::PointSource),
            _ => Err(Error::InvalidArgument(format!(
                "unknown target '{s}' (expected cylinder or point-source)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Dual1,
    Dual2,
    Canonical,
    LeastSquares,
    Omp,
    OmpFunctional,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::Dual1,
        Method::Dual2,
        Method::Canonical,
        Method::LeastSquares,
        Method::Omp,
        Method::OmpFunctional,
    ];

    fn explicit_dual(self) -> Option<DualKind> {
        match self {
            Method::Dual1 => Some(DualKind::Dual1),
            Method::Dual2 => Some(DualKind::Dual2),
            _ => None,
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dual1 => "dual1",
            Method::Dual2 => "dual2",
            Method::Canonical => "canonical",
            Method::LeastSquares => "least-squares",
            Method::Omp => "omp",
            Method::OmpFunctional => "omp-functional",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown method '{s}' (expected dual1, dual2, canonical, least-squares, omp or omp-functional)"
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub target: TargetKind,
    pub k: f64,
    /// B-spline order
    pub order: usize,
    pub a: f64,
    pub b: f64,
    /// length `L` of the interval of interest `[0, L]`
    pub length: f64,
    /// samples on `[0, L]`
    pub points: usize,
    pub method: Method,
    pub blocksize: usize,
    /// coefficient counts to evaluate, in any order
    pub budgets: Vec<usize>,
    /// overrides the modulation range derived from the grid
    pub modulations: Option<IndexRange>,
    /// overrides the shifts whose windows meet `(0, L)`
    pub shifts: Option<IndexRange>,
    /// evaluate the target past `[0, L]` for dual analysis; when off, it is
    /// zero outside `[0, L]`
    pub extend: bool,
    /// relative residual at which the pursuit stops early
    pub tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            target: TargetKind::Cylinder,
            k: 5.0,
            order: 2,
            a: 1.0,
            b: 1.0 / 3.0,
            length: 3.0,
            points: 601,
            method: Method::Dual2,
            blocksize: 20,
            budgets: vec![60, 120, 240],
            modulations: None,
            shifts: None,
            extend: true,
            tolerance: 0.0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.k > 0.0) || !self.k.is_finite() {
            return Err(Error::InvalidArgument(format!("wavenumber must be positive, got {}", self.k)));
        }
        if !(self.length > 0.0) || !self.length.is_finite() {
            return Err(Error::InvalidArgument(format!("length must be positive, got {}", self.length)));
        }
        if self.points < 2 {
            return Err(Error::InvalidArgument(format!("need at least 2 points, got {}", self.points)));
        }
        if self.order == 0 {
            return Err(Error::InvalidArgument("B-spline order must be at least 1".into()));
        }
        if self.blocksize == 0 {
            return Err(Error::InvalidArgument("blocksize must be at least 1".into()));
        }
        if self.budgets.is_empty() || self.budgets.contains(&0) {
            return Err(Error::InvalidArgument("budgets must be a nonempty list of positive counts".into()));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::InvalidArgument(format!("tolerance must be nonnegative, got {}", self.tolerance)));
        }
        if !check_frame_parameters(self.order, self.a, self.b) {
            return Err(Error::FrameRegion {
                order: self.order,
                a: self.a,
                b: self.b,
            });
        }
        if self.method.explicit_dual().is_some() {
            let max = 1.0 / (2 * self.order - 1) as f64;
            if self.b > max * (1.0 + 1e-12) {
                return Err(Error::DualRange {
                    order: self.order,
                    b: self.b,
                    max,
                });
            }
        }
        for r in [self.modulations, self.shifts].into_iter().flatten() {
            if r.is_empty() {
                return Err(Error::InvalidArgument(format!("empty index range {r:?}")));
            }
        }
        Ok(())
    }

    /// The B-spline Gabor system the configuration describes.
    pub fn system(&self) -> Result<GaborSystem> {
        let window = make_bspline(self.order)?;
        let step = self.length / (self.points - 1) as f64;
        let shifts = self
            .shifts
            .unwrap_or_else(|| default_shifts(window.support(), self.a, 0.0, self.length));
        let modulations = self.modulations.unwrap_or_else(|| default_modulations(self.b, step));
        GaborSystem::bspline(&window, self.a, self.b, shifts, modulations)
    }
}

/// Approximation with a fixed number of coefficients.
#[derive(Debug, Clone)]
pub struct BudgetResult {
    pub budget: usize,
    pub coefficients: CoefficientVector,
    /// reconstruction on the interest grid
    pub approximation: Vec<Complex64>,
    pub report: ErrorReport,
}

#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub config: ExperimentConfig,
    pub setup: IntervalSetup,
    /// interest-grid abscissae
    pub x: Vec<f64>,
    /// target on the interest grid
    pub reference: Vec<Complex64>,
    /// untruncated coefficients, for the non-greedy methods
    pub full: Option<CoefficientVector>,
    /// one entry per budget, in ascending budget order
    pub results: Vec<BudgetResult>,
}

impl ExperimentOutcome {
    pub fn mean_errors(&self) -> Vec<f64> {
        self.results.iter().map(|r| r.report.mean).collect()
    }
}

/// Samples the frame and target, computes coefficients with the configured
/// method, and reconstructs on `[0, L]` for every budget.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let system = config.system()?;
    let target = config.target.build(config.k, config.length)?;
    let window = make_bspline(config.order)?;
    let explicit = match config.method.explicit_dual() {
        Some(DualKind::Dual1) => Some(dual_window_theorem2(config.order, config.b)?),
        Some(DualKind::Dual2) => Some(dual_window_theorem3(config.order, config.b)?),
        _ => None,
    };
    let support = explicit.as_ref().map_or(window.support(), |d| d.support());
    let mut setup = build_setup_with_support(config.length, config.points, support, &system)?;
    if !config.extend {
        setup = setup.unextended();
    }

    let x: Vec<f64> = setup.interest().points().collect();
    let reference = target.sample(&x);
    let frame = sample_frame(&system, setup.interest())?;
    let mut budgets = config.budgets.clone();
    budgets.sort_unstable();
    budgets.dedup();

    let full = match config.method {
        Method::Dual1 | Method::Dual2 | Method::Canonical => {
            let f_ext = extended_samples(&target, &setup, config.extend);
            let (dual, kind) = match &explicit {
                Some(d) => {
                    let dual_system = system.dual_system(d)?;
                    (sample_frame(&dual_system, setup.extended())?, d.kind())
                }
                None => {
                    let ext_frame = sample_frame(&system, setup.extended())?;
                    (canonical_dual(&ext_frame)?, DualKind::Canonical)
                }
            };
            Some(analyze_with_dual(&f_ext, &dual, kind)?)
        }
        Method::LeastSquares => Some(least_squares(&frame, &reference)?),
        Method::Omp | Method::OmpFunctional => None,
    };

    let per_budget: Vec<CoefficientVector> = match (&full, config.method) {
        (Some(c), _) => budgets.iter().map(|&n| truncate_top_n(c, n)).collect(),
        (None, Method::Omp) => {
            let mut state = OmpState::new(&frame, &reference, config.blocksize)?;
            let mut out = Vec::new();
            for &n in &budgets {
                while state.selected().len() < n && !state.converged(config.tolerance) {
                    let want = config.blocksize.min(n - state.selected().len());
                    if !state.step_with(want)? {
                        break;
                    }
                }
                out.push(state.coefficients());
            }
            out
        }
        (None, _) => {
            let mut state = FunctionalOmpState::new(&system, &target, config.blocksize)?;
            let mut out = Vec::new();
            for &n in &budgets {
                while state.selected().len() < n && !state.converged(config.tolerance) {
                    let want = config.blocksize.min(n - state.selected().len());
                    if !state.step_with(want)? {
                        break;
                    }
                }
                out.push(state.coefficients());
            }
            out
        }
    };

    let label = method_label(config);
    let mut results = Vec::with_capacity(budgets.len());
    for (budget, coefficients) in budgets.into_iter().zip(per_budget) {
        let approximation = reconstruct(&frame, &coefficients, 0..frame.grid().len())?;
        let report = relative_error(&reference, &approximation)?.labeled(label.clone(), coefficients.nonzero_count());
        results.push(BudgetResult {
            budget,
            coefficients,
            approximation,
            report,
        });
    }
    Ok(ExperimentOutcome {
        config: config.clone(),
        setup,
        x,
        reference,
        full,
        results,
    })
}

/// Row label in the comparison table, such as `Dual2` or `OMP(20)`.
pub fn method_label(config: &ExperimentConfig) -> String {
    match config.method {
        Method::Dual1 => "Dual1".into(),
        Method::Dual2 => "Dual2".into(),
        Method::Canonical => "Canonical".into(),
        Method::LeastSquares => "LeastSquares".into(),
        Method::Omp => format!("OMP({})", config.blocksize),
        Method::OmpFunctional => format!("OMP-functional({})", config.blocksize),
    }
}

/// Target on the extended grid: analytic everywhere, or zero outside
/// `[0, L]` when the extension is switched off.
fn extended_samples(target: &Target, setup: &IntervalSetup, extend: bool) -> Vec<Complex64> {
    let rows = setup.interest_rows();
    setup
        .extended()
        .points()
        .enumerate()
        .map(|(j, x)| {
            if extend || rows.contains(&j) {
                target.eval(x)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect()
}

/// Number of coefficients with magnitude above `threshold`.
pub fn count_above(c: &CoefficientVector, threshold: f64) -> usize {
    c.values().iter().filter(|v| v.norm() > threshold).count()
}

/// The frame sampled on the interest grid of a configuration.
pub fn interest_frame(config: &ExperimentConfig) -> Result<SampledFrame> {
    config.validate()?;
    let grid = crate::gabor::Grid::spanning(0.0, config.length, config.points)?;
    sample_frame(&config.system()?, &grid)
}

/// One row of the accuracy-versus-sparsity table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub target: TargetKind,
    pub k: f64,
    pub label: String,
    pub budgets: Vec<usize>,
    /// mean relative error per budget; NaN when the cell failed
    pub mean: Vec<f64>,
    /// ℓ2-ratio error per budget; NaN when the cell failed
    pub l2: Vec<f64>,
}

/// Dual2 analysis and OMP(20) on both targets at `k = 5` and `k = 15`, for
/// budgets 60, 120 and 240, on top of `base` for everything else.
pub fn comparison_table(base: &ExperimentConfig) -> Vec<TableRow> {
    let mut rows = Vec::new();
    for target in [TargetKind::Cylinder, TargetKind::PointSource] {
        for k in [5.0, 15.0] {
            for (method, blocksize) in [(Method::Dual2, base.blocksize), (Method::Omp, 20)] {
                let config = ExperimentConfig {
                    target,
                    k,
                    method,
                    blocksize,
                    budgets: vec![60, 120, 240],
                    ..base.clone()
                };
                let label = method_label(&config);
                let (mean, l2) = match run_experiment(&config) {
                    Ok(out) => (
                        out.results.iter().map(|r| r.report.mean).collect(),
                        out.results.iter().map(|r| r.report.l2_ratio).collect(),
                    ),
                    Err(e) => {
                        log::error!("{target}, k = {k}, {label}: {e}");
                        (vec![f64::NAN; 3], vec![f64::NAN; 3])
                    }
                };
                rows.push(TableRow {
                    target,
                    k,
                    label,
                    budgets: config.budgets.clone(),
                    mean,
                    l2,
                });
            }
        }
    }
    rows
}
