//! Benchmark scattering fields restricted to the unit circle.
//!
//! Both fields are functions of the polar angle `φ` on the circle of radius
//! one, unrolled onto `[0, L)` through `φ = 2πx/L`. They are evaluated
//! analytically at any real `x`, so they are `L`-periodic in `x`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::special;

/// Default length of the parameter interval.
pub const DEFAULT_LENGTH: f64 = 3.0;

/// Terms beyond the wavenumber are dropped once they fall below this.
const SERIES_TOL: f64 = 1e-14;

/// Extra terms allowed past `ceil(k·r)` before the series is cut regardless.
const SERIES_EXTRA_TERMS: usize = 40;

pub trait TargetField {
    /// Value at parameter `x`.
    fn eval(&self, x: f64) -> Complex64;

    /// Length `L` of the parameter interval; the field is `L`-periodic.
    fn period(&self) -> f64;

    /// Upper bound on the local oscillation rate, in cycles per unit of `x`.
    fn max_cycles_per_unit(&self) -> f64;

    fn sample(&self, xs: &[f64]) -> Vec<Complex64> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }
}

fn check_wavenumber(k: f64) -> Result<()> {
    if !(k > 0.0) || !k.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "wavenumber must be positive and finite, got {k}"
        )));
    }
    Ok(())
}

fn check_length(length: f64) -> Result<()> {
    if !(length > 0.0) || !length.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "interval length must be positive and finite, got {length}"
        )));
    }
    Ok(())
}

/// Field scattered by a sound-soft unit cylinder, as the cosine series
/// `(2/(πkr)) Σ_n ε_n (-i)^{n-1} cos(nφ) / H'_n(kr)` with `ε_0 = 1`, `ε_n = 2`.
#[derive(Debug, Clone)]
pub struct CylinderScatteringField {
    k: f64,
    radius: f64,
    length: f64,
    coefficients: Vec<Complex64>,
}

impl CylinderScatteringField {
    pub fn new(k: f64) -> Result<Self> {
        Self::with_length(k, DEFAULT_LENGTH)
    }

    pub fn with_length(k: f64, length: f64) -> Result<Self> {
        check_wavenumber(k)?;
        check_length(length)?;
        let radius = 1.0;
        let kr = k * radius;
        let n_max = kr.ceil() as usize + SERIES_EXTRA_TERMS;
        let dh = special::hankel1_derivative_upto(n_max, kr)?;
        let prefactor = 2.0 / (PI * kr);
        // (-i)^{n-1} cycles through i, 1, -i, -1
        let phase = [
            Complex64::new(0.0, 1.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, -1.0),
            Complex64::new(-1.0, 0.0),
        ];
        let mut coefficients = Vec::with_capacity(n_max + 1);
        for (n, d) in dh.iter().enumerate() {
            let eps = if n == 0 { 1.0 } else { 2.0 };
            let c = phase[n % 4] * (prefactor * eps) / d;
            // cos(nφ) reaches 1 at φ = 0, so |c| is the term's sup over the circle
            if n as f64 > kr && c.norm() < SERIES_TOL {
                break;
            }
            coefficients.push(c);
        }
        Ok(Self {
            k,
            radius,
            length,
            coefficients,
        })
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    /// Cosine-series coefficients kept after truncation.
    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// Value at polar angle `phi`.
    pub fn eval_angle(&self, phi: f64) -> Complex64 {
        // Chebyshev recurrence for cos(nφ)
        let c1 = phi.cos();
        let (mut prev, mut cur) = (c1, 1.0);
        let mut sum = Complex64::new(0.0, 0.0);
        for (n, c) in self.coefficients.iter().enumerate() {
            if n > 0 {
                let next = if n == 1 { c1 } else { 2.0 * c1 * cur - prev };
                prev = cur;
                cur = next;
            }
            sum += c * cur;
        }
        sum
    }
}

impl TargetField for CylinderScatteringField {
    fn eval(&self, x: f64) -> Complex64 {
        self.eval_angle(2.0 * PI * x / self.length)
    }

    fn period(&self) -> f64 {
        self.length
    }

    fn max_cycles_per_unit(&self) -> f64 {
        self.k * self.radius / self.length
    }
}

/// Free-space field `H_0^{(1)}(k·|x(φ) - s|)` of a point source `s`, observed
/// on the unit circle.
#[derive(Debug, Clone)]
pub struct PointSourceField {
    k: f64,
    source: (f64, f64),
    length: f64,
}

impl PointSourceField {
    /// Source at `(0, 1.5)`.
    pub fn new(k: f64) -> Result<Self> {
        Self::with_source(k, (0.0, 1.5), DEFAULT_LENGTH)
    }

    pub fn with_source(k: f64, source: (f64, f64), length: f64) -> Result<Self> {
        check_wavenumber(k)?;
        check_length(length)?;
        let r = source.0.hypot(source.1);
        if (r - 1.0).abs() < 1e-12 {
            return Err(Error::Domain(format!(
                "source ({}, {}) lies on the observation circle",
                source.0, source.1
            )));
        }
        Ok(Self { k, source, length })
    }

    pub fn wavenumber(&self) -> f64 {
        self.k
    }

    pub fn source(&self) -> (f64, f64) {
        self.source
    }

    /// Distance from the circle point at parameter `x` to the source.
    pub fn distance(&self, x: f64) -> f64 {
        let phi = 2.0 * PI * x / self.length;
        (phi.cos() - self.source.0).hypot(phi.sin() - self.source.1)
    }
}

impl TargetField for PointSourceField {
    fn eval(&self, x: f64) -> Complex64 {
        special::hankel1(0, self.k * self.distance(x))
            .expect("source is off the circle, so the distance is positive")
    }

    fn period(&self) -> f64 {
        self.length
    }

    fn max_cycles_per_unit(&self) -> f64 {
        // |d'(φ)| ≤ r = 1
        self.k / self.length
    }
}

/// Either benchmark field.
#[derive(Debug, Clone)]
pub enum Target {
    Cylinder(CylinderScatteringField),
    PointSource(PointSourceField),
}

impl TargetField for Target {
    fn eval(&self, x: f64) -> Complex64 {
        match self {
            Target::Cylinder(t) => t.eval(x),
            Target::PointSource(t) => t.eval(x),
        }
    }

    fn period(&self) -> f64 {
        match self {
            Target::Cylinder(t) => t.period(),
            Target::PointSource(t) => t.period(),
        }
    }

    fn max_cycles_per_unit(&self) -> f64 {
        match self {
            Target::Cylinder(t) => t.max_cycles_per_unit(),
            Target::PointSource(t) => t.max_cycles_per_unit(),
        }
    }
}
