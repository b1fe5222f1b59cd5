//! Cardinal B-splines as exact piecewise polynomials.
//!
//! `N_1` is the indicator of `[0, 1)`, and `N_{l+1}` is obtained from `N_l` by
//! convolution with `N_1`. The convolution is carried out on the polynomial
//! pieces themselves: `N_{l+1}(x) = F(x) - F(x - 1)` where `F` is the
//! antiderivative of `N_l`, so no sampling is involved at any order.
//!
//! Products of shifted splines and their modulated integrals
//! `∫ p(x) e^{2πi f x} dx` are evaluated in closed form, which is what the
//! Gram matrices of the function-space pursuit need.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Pieces closer than this (relative to the breakpoint magnitude) are merged.
const BREAK_EPS: f64 = 1e-12;

/// `|ω h|` at or below which the oscillatory integral is summed as a power series.
const SERIES_LIMIT: f64 = 2.0;

/// A piecewise polynomial that vanishes outside `[first, last)` breakpoint.
///
/// Piece `i` lives on `[breaks[i], breaks[i + 1])` and stores monomial
/// coefficients in powers of `x - breaks[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    breaks: Vec<f64>,
    pieces: Vec<Vec<f64>>,
}

impl PiecewisePolynomial {
    pub fn new(breaks: Vec<f64>, pieces: Vec<Vec<f64>>) -> Result<Self> {
        if breaks.len() < 2 {
            return Err(Error::InvalidArgument(
                "a piecewise polynomial needs at least two breakpoints".into(),
            ));
        }
        if pieces.len() != breaks.len() - 1 {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints require {} pieces, got {}",
                breaks.len(),
                breaks.len() - 1,
                pieces.len()
            )));
        }
        if breaks.iter().any(|b| !b.is_finite()) || breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be finite and strictly increasing".into(),
            ));
        }
        Ok(Self { breaks, pieces })
    }

    /// The zero function, represented on the degenerate support `[0, 1)`.
    pub fn zero() -> Self {
        Self {
            breaks: vec![0.0, 1.0],
            pieces: vec![vec![]],
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breaks
    }

    pub fn pieces(&self) -> &[Vec<f64>] {
        &self.pieces
    }

    pub fn support(&self) -> (f64, f64) {
        (self.breaks[0], self.breaks[self.breaks.len() - 1])
    }

    pub fn degree(&self) -> usize {
        self.pieces
            .iter()
            .map(|p| p.len().saturating_sub(1))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.iter().all(|&c| c == 0.0))
    }

    /// Index of the piece containing `x`, if any.
    fn locate(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.support();
        if !(x >= lo && x < hi) {
            return None;
        }
        // breaks[i] <= x < breaks[i + 1]
        let i = self.breaks.partition_point(|&b| b <= x) - 1;
        Some(i.min(self.pieces.len() - 1))
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self.locate(x) {
            Some(i) => horner(&self.pieces[i], x - self.breaks[i]),
            None => 0.0,
        }
    }

    /// Value of piece `i` approached from the left of its right breakpoint.
    pub fn eval_left_limit(&self, i: usize) -> f64 {
        horner(&self.pieces[i], self.breaks[i + 1] - self.breaks[i])
    }

    pub fn derivative(&self) -> Self {
        let pieces = self.pieces.iter().map(|p| poly_derivative(p)).collect();
        Self {
            breaks: self.breaks.clone(),
            pieces,
        }
    }

    /// Exact integral over the whole support.
    pub fn integral(&self) -> f64 {
        self.pieces
            .iter()
            .zip(self.breaks.windows(2))
            .map(|(p, w)| poly_integral(p, w[1] - w[0]))
            .sum()
    }

    /// `x ↦ p(x - s)`.
    pub fn shift(&self, s: f64) -> Self {
        Self {
            breaks: self.breaks.iter().map(|b| b + s).collect(),
            pieces: self.pieces.clone(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        Self {
            breaks: self.breaks.clone(),
            pieces: self
                .pieces
                .iter()
                .map(|p| p.iter().map(|v| v * c).collect())
                .collect(),
        }
    }

    /// Coefficients of the polynomial valid around `u`, re-expanded in powers of `x - u`.
    /// `u` must lie in (or on the left edge of) a piece.
    fn local_at(&self, u: f64, probe: f64) -> Option<Vec<f64>> {
        self.locate(probe)
            .map(|i| taylor_shift(&self.pieces[i], u - self.breaks[i]))
    }

    fn combine(&self, other: &Self, union: bool, op: impl Fn(&[f64], &[f64]) -> Vec<f64>) -> Self {
        let (a0, a1) = self.support();
        let (b0, b1) = other.support();
        let (lo, hi) = if union {
            (a0.min(b0), a1.max(b1))
        } else {
            (a0.max(b0), a1.min(b1))
        };
        if lo >= hi {
            return Self::zero();
        }
        let mut breaks: Vec<f64> = self
            .breaks
            .iter()
            .chain(other.breaks.iter())
            .copied()
            .filter(|&b| b >= lo && b <= hi)
            .collect();
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|b, a| (*b - *a).abs() <= BREAK_EPS * a.abs().max(1.0));
        if breaks.len() < 2 {
            return Self::zero();
        }
        let mut pieces = Vec::with_capacity(breaks.len() - 1);
        for w in breaks.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let p = self.local_at(w[0], mid).unwrap_or_default();
            let q = other.local_at(w[0], mid).unwrap_or_default();
            pieces.push(op(&p, &q));
        }
        Self { breaks, pieces }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, true, poly_add)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.combine(other, false, poly_mul)
    }

    /// The restriction to `[lo, hi]`, zero elsewhere.
    pub fn restrict(&self, lo: f64, hi: f64) -> Self {
        let (s0, s1) = self.support();
        let (lo, hi) = (lo.max(s0), hi.min(s1));
        if lo >= hi {
            return Self::zero();
        }
        let mut breaks = vec![lo];
        breaks.extend(self.breaks.iter().copied().filter(|&b| b > lo && b < hi));
        breaks.push(hi);
        breaks.dedup_by(|b, a| (*b - *a).abs() <= BREAK_EPS * a.abs().max(1.0));
        if breaks.len() < 2 {
            return Self::zero();
        }
        let pieces = breaks
            .windows(2)
            .map(|w| {
                self.local_at(w[0], 0.5 * (w[0] + w[1]))
                    .unwrap_or_default()
            })
            .collect();
        Self { breaks, pieces }
    }

    /// `∫ p(x) e^{2πi·freq·x} dx` in closed form.
    pub fn fourier_integral(&self, freq: f64) -> Complex64 {
        let omega = 2.0 * PI * freq;
        self.pieces
            .iter()
            .zip(self.breaks.windows(2))
            .filter(|(p, _)| !p.is_empty())
            .map(|(p, w)| Complex64::cis(omega * w[0]) * poly_exp_integral(p, w[1] - w[0], omega))
            .sum()
    }
}

/// The cardinal B-spline `N_l`, supported on `[0, l]` with unit knot spacing.
#[derive(Debug, Clone, PartialEq)]
pub struct BSplineWindow {
    order: usize,
    poly: PiecewisePolynomial,
}

impl BSplineWindow {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn poly(&self) -> &PiecewisePolynomial {
        &self.poly
    }

    pub fn support(&self) -> (f64, f64) {
        (0.0, self.order as f64)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.poly.eval(x)
    }

    pub fn integral(&self) -> f64 {
        self.poly.integral()
    }
}

/// Builds `N_order` by repeated symbolic convolution with the indicator of `[0, 1)`.
pub fn make_bspline(order: usize) -> Result<BSplineWindow> {
    if order == 0 {
        return Err(Error::InvalidArgument("B-spline order must be at least 1".into()));
    }
    let mut pieces: Vec<Vec<f64>> = vec![vec![1.0]];
    for l in 1..order {
        // antiderivative F of N_l, piece j in powers of (x - j); F = 1 beyond l
        let mut anti = Vec::with_capacity(l + 1);
        let mut acc = 0.0;
        for p in &pieces {
            let mut q = Vec::with_capacity(p.len() + 1);
            q.push(acc);
            q.extend(p.iter().enumerate().map(|(k, c)| c / (k + 1) as f64));
            acc = horner(&q, 1.0);
            anti.push(q);
        }
        anti.push(vec![acc]);
        // N_{l+1}(x) = F(x) - F(x - 1); both expand in the same local variable x - j
        pieces = (0..=l)
            .map(|j| {
                let prev = if j == 0 { &[][..] } else { &anti[j - 1][..] };
                let mut p = poly_add(&anti[j], &prev.iter().map(|c| -c).collect::<Vec<_>>());
                trim(&mut p);
                p
            })
            .collect();
    }
    let breaks = (0..=order).map(|j| j as f64).collect();
    Ok(BSplineWindow {
        order,
        poly: PiecewisePolynomial { breaks, pieces },
    })
}

pub fn eval(window: &BSplineWindow, x: f64) -> f64 {
    window.eval(x)
}

/// `∫ N(x - shift1) N(x - shift2) e^{2πi·freq·x} dx` over the real line.
pub fn product_integral(window: &BSplineWindow, shift1: f64, shift2: f64, freq: f64) -> Complex64 {
    window
        .poly
        .shift(shift1)
        .mul(&window.poly.shift(shift2))
        .fourier_integral(freq)
}

/// As [`product_integral`], restricted to `[lo, hi]`.
pub fn product_integral_on(
    window: &BSplineWindow,
    shift1: f64,
    shift2: f64,
    freq: f64,
    lo: f64,
    hi: f64,
) -> Complex64 {
    window
        .poly
        .shift(shift1)
        .mul(&window.poly.shift(shift2))
        .restrict(lo, hi)
        .fourier_integral(freq)
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &v| acc * t + v)
}

fn trim(p: &mut Vec<f64>) {
    while p.last() == Some(&0.0) {
        p.pop();
    }
}

fn poly_add(p: &[f64], q: &[f64]) -> Vec<f64> {
    let n = p.len().max(q.len());
    (0..n)
        .map(|k| p.get(k).copied().unwrap_or(0.0) + q.get(k).copied().unwrap_or(0.0))
        .collect()
}

fn poly_mul(p: &[f64], q: &[f64]) -> Vec<f64> {
    if p.is_empty() || q.is_empty() {
        return Vec::new();
    }
    let mut r = vec![0.0; p.len() + q.len() - 1];
    for (i, a) in p.iter().enumerate() {
        for (j, b) in q.iter().enumerate() {
            r[i + j] += a * b;
        }
    }
    r
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

fn poly_integral(p: &[f64], h: f64) -> f64 {
    p.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, c)| acc * h + c / (k + 1) as f64)
        * h
}

/// Coefficients of `t ↦ p(t + delta)`.
fn taylor_shift(p: &[f64], delta: f64) -> Vec<f64> {
    if delta == 0.0 {
        return p.to_vec();
    }
    let mut q = p.to_vec();
    let n = q.len();
    // repeated synthetic division by (t - delta)
    for i in 0..n {
        for j in (i..n - 1).rev() {
            q[j] += delta * q[j + 1];
        }
    }
    q
}

/// `∫_0^h p(t) e^{iωt} dt` for a polynomial in monomial form.
fn poly_exp_integral(p: &[f64], h: f64, omega: f64) -> Complex64 {
    let theta = omega.abs() * h;
    let degree = p.len().saturating_sub(1) as f64;
    if theta <= SERIES_LIMIT {
        series_integral(p, h, omega)
    } else if theta >= 2.0 * (degree + 1.0) {
        by_parts_integral(p, h, omega)
    } else {
        // split until every part is short enough for the series
        let parts = (theta / SERIES_LIMIT).ceil() as usize;
        let step = h / parts as f64;
        (0..parts)
            .map(|k| {
                let s = k as f64 * step;
                Complex64::cis(omega * s) * series_integral(&taylor_shift(p, s), step, omega)
            })
            .sum()
    }
}

/// Power series in `iωh`; accurate for `|ωh| ≲ 2`.
fn series_integral(p: &[f64], h: f64, omega: f64) -> Complex64 {
    let z = Complex64::new(0.0, omega * h);
    let mut total = Complex64::new(0.0, 0.0);
    let mut hp = h;
    for (j, &c) in p.iter().enumerate() {
        if c != 0.0 {
            // Σ_s (iωh)^s / (s! (j + s + 1))
            let mut term = Complex64::new(1.0, 0.0);
            let mut sum = Complex64::new(1.0 / (j + 1) as f64, 0.0);
            for s in 1..64 {
                term *= z / s as f64;
                let add = term / (j + s + 1) as f64;
                sum += add;
                if add.norm() < 1e-18 * sum.norm() {
                    break;
                }
            }
            total += c * hp * sum;
        }
        hp *= h;
    }
    total
}

/// Repeated integration by parts; stable once `|ωh|` exceeds about twice the degree.
fn by_parts_integral(p: &[f64], h: f64, omega: f64) -> Complex64 {
    let iw = Complex64::new(0.0, omega);
    let mut deriv = p.to_vec();
    let mut at_h = Complex64::new(0.0, 0.0);
    let mut at_0 = Complex64::new(0.0, 0.0);
    let mut denom = iw;
    let mut sign = 1.0;
    while !deriv.is_empty() {
        at_h += sign * horner(&deriv, h) / denom;
        at_0 += sign * deriv[0] / denom;
        deriv = poly_derivative(&deriv);
        denom *= iw;
        sign = -sign;
    }
    Complex64::cis(omega * h) * at_h - at_0
}
