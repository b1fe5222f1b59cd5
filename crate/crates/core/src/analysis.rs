//! Interval extension, reconstruction, and error metrics.
//!
//! Dual analysis needs the target on the whole support of every dual atom
//! that reaches into the interval of interest `[0, L]`, so the analysis grid
//! is extended past `[0, L]` with the same spacing. Reconstruction and error
//! measurement always happen on the interest grid.

use std::ops::Range;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gabor::{DualWindow, GaborSystem, Grid, SampledFrame};
use crate::sparse::CoefficientVector;

/// Relative-error denominators are floored at this fraction of `max |f_ref|`.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-8;

/// The interest grid on `[0, L]` and the extended analysis grid around it.
#[derive(Debug, Clone, PartialEq)]
pub struct IntervalSetup {
    length: f64,
    interest: Grid,
    extended: Grid,
    offset: usize,
}

impl IntervalSetup {
    /// Interval length `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn interest(&self) -> &Grid {
        &self.interest
    }

    pub fn extended(&self) -> &Grid {
        &self.extended
    }

    /// `(x_lo, x_hi)` of the extended grid.
    pub fn extended_interval(&self) -> (f64, f64) {
        (self.extended.start(), self.extended.end())
    }

    /// Rows of the extended grid that make up the interest grid.
    pub fn interest_rows(&self) -> Range<usize> {
        self.offset..self.offset + self.interest.len()
    }

    /// A setup whose analysis grid is the interest grid itself.
    pub fn unextended(&self) -> Self {
        Self {
            length: self.length,
            interest: self.interest,
            extended: self.interest,
            offset: 0,
        }
    }
}

/// Hull of `[lo, hi]` and the supports of every dual atom `h(x - n·a)` of the
/// system's shifts that overlaps `(lo, hi)`.
pub fn extend_interval(lo: f64, hi: f64, dual_support: (f64, f64), system: &GaborSystem) -> (f64, f64) {
    let (s0, s1) = dual_support;
    let mut out = (lo, hi);
    for n in system.shifts().iter() {
        let shift = n as f64 * system.a();
        let (a, b) = (s0 + shift, s1 + shift);
        if b > lo && a < hi {
            out.0 = out.0.min(a);
            out.1 = out.1.max(b);
        }
    }
    out
}

/// [`build_setup_with_support`] for the support of `dual`.
pub fn build_setup(length: f64, points: usize, dual: &DualWindow, system: &GaborSystem) -> Result<IntervalSetup> {
    build_setup_with_support(length, points, dual.support(), system)
}

/// The interest grid with `points` samples on `[0, length]` and an extended
/// grid of the same spacing covering [`extend_interval`], snapped outwards
/// to whole grid steps.
pub fn build_setup_with_support(
    length: f64,
    points: usize,
    dual_support: (f64, f64),
    system: &GaborSystem,
) -> Result<IntervalSetup> {
    if points < 2 {
        return Err(Error::InvalidArgument(format!(
            "the interest grid needs at least two points, got {points}"
        )));
    }
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "interval length must be positive and finite, got {length}"
        )));
    }
    let interest = Grid::spanning(0.0, length, points)?;
    let dx = interest.step();
    let (lo, hi) = extend_interval(0.0, length, dual_support, system);
    // snap outwards, forgiving rounding in the support endpoints
    let before = ((-lo / dx) - 1e-9).ceil().max(0.0) as usize;
    let after = (((hi - length) / dx) - 1e-9).ceil().max(0.0) as usize;
    let extended = Grid::new(-(before as f64) * dx, dx, before + points + after)?;
    Ok(IntervalSetup {
        length,
        interest,
        extended,
        offset: before,
    })
}

/// Synthesis `Σ_q c_q g_q` on the given rows of the frame grid.
pub fn reconstruct(frame: &SampledFrame, c: &CoefficientVector, rows: Range<usize>) -> Result<Vec<Complex64>> {
    if !c.matches(frame) {
        return Err(Error::InvalidArgument(
            "coefficient index map does not match the frame columns".into(),
        ));
    }
    if rows.end > frame.grid().len() || rows.start > rows.end {
        return Err(Error::InvalidArgument(format!(
            "rows {rows:?} outside a grid of {} points",
            frame.grid().len()
        )));
    }
    let mut out = vec![Complex64::new(0.0, 0.0); rows.len()];
    for (q, &v) in c.values().iter().enumerate() {
        if v == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, g) in out.iter_mut().zip(&frame.column(q)[rows.clone()]) {
            *o += g * v;
        }
    }
    Ok(out)
}

/// Pointwise relative errors and their summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    /// `|f_ref - f_approx| / max(|f_ref|, floor)` at every grid point
    pub pointwise: Vec<f64>,
    /// arithmetic mean of `pointwise`
    pub mean: f64,
    pub max: f64,
    /// `‖f_ref - f_approx‖₂ / ‖f_ref‖₂`
    pub l2_ratio: f64,
    /// nonzero coefficients used for the approximation
    pub coefficient_count: usize,
    pub label: String,
}

impl ErrorReport {
    pub fn labeled(mut self, label: impl Into<String>, coefficient_count: usize) -> Self {
        self.label = label.into();
        self.coefficient_count = coefficient_count;
        self
    }
}

/// Relative error of `f_approx` against `f_ref`, with denominators floored
/// at `1e-8·max |f_ref|`.
pub fn relative_error(f_ref: &[Complex64], f_approx: &[Complex64]) -> Result<ErrorReport> {
    if f_ref.len() != f_approx.len() || f_ref.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "cannot compare {} reference values with {} approximations",
            f_ref.len(),
            f_approx.len()
        )));
    }
    let peak = f_ref.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let floor = (RELATIVE_ERROR_FLOOR * peak).max(f64::MIN_POSITIVE);
    let pointwise: Vec<f64> = f_ref
        .iter()
        .zip(f_approx)
        .map(|(r, a)| (r - a).norm() / r.norm().max(floor))
        .collect();
    let mean = pointwise.iter().sum::<f64>() / pointwise.len() as f64;
    let max = pointwise.iter().copied().fold(0.0, f64::max);
    let diff: f64 = f_ref.iter().zip(f_approx).map(|(r, a)| (r - a).norm_sqr()).sum();
    let total: f64 = f_ref.iter().map(|r| r.norm_sqr()).sum();
    let l2_ratio = if total > 0.0 { (diff / total).sqrt() } else { diff.sqrt() };
    Ok(ErrorReport {
        pointwise,
        mean,
        max,
        l2_ratio,
        coefficient_count: 0,
        label: String::new(),
    })
}
