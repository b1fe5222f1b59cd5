//! Integer-order Bessel and Hankel functions of real positive argument.
//!
//! `J_n` comes from Miller's backward recurrence normalized with
//! `J_0 + 2 Σ J_{2k} = 1`. `Y_0` and `Y_1` are Neumann series over the same
//! `J` values, and higher `Y_n` follow by forward recurrence, which is stable
//! for the dominant solution.

use std::f64::consts::{FRAC_2_PI, PI};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_ORDER: usize = 200;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_AT: f64 = 1e250;

fn check_argument(order: usize, z: f64) -> Result<()> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!(
            "Bessel functions of the second kind need z > 0, got {z}"
        )));
    }
    if order > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "order {order} exceeds the supported maximum {MAX_ORDER}"
        )));
    }
    Ok(())
}

/// Start index for the backward recurrence.
fn miller_start(n_needed: usize, z: f64) -> usize {
    let base = n_needed.max(z.ceil() as usize);
    let start = base + 15usize.max((1.2 * z).ceil() as usize);
    start + start % 2
}

/// `J_0 .. J_{n_max}` at `z > 0`.
fn bessel_j_upto(n_max: usize, z: f64) -> Vec<f64> {
    let start = miller_start(n_max.max(1), z);
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-300;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / z * j[k] - j[k + 1];
        if j[k - 1].abs() > RESCALE_AT {
            for v in &mut j[k - 1..] {
                *v /= RESCALE_AT;
            }
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    j.truncate(n_max + 1);
    for v in &mut j {
        *v /= norm;
    }
    j
}

/// `(J_0..J_{n_max}, Y_0..Y_{n_max})`.
pub fn bessel_jy_upto(n_max: usize, z: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_argument(n_max, z)?;
    // the Neumann sums need J out to where it is negligible
    let tail = n_max.max((1.5 * z).ceil() as usize + 30);
    let jall = bessel_j_upto(tail, z);
    let log_term = (0.5 * z).ln() + EULER_GAMMA;

    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k < tail {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * jall[2 * k] / k as f64;
        s1 += sign * (jall[2 * k - 1] - jall[2 * k + 1]) / k as f64;
        k += 1;
    }
    let y0 = FRAC_2_PI * log_term * jall[0] - 2.0 * FRAC_2_PI * s0;
    let y1 = -FRAC_2_PI * jall[0] / z + FRAC_2_PI * log_term * jall[1] + FRAC_2_PI * s1;

    let mut y = Vec::with_capacity(n_max + 1);
    y.push(y0);
    if n_max >= 1 {
        y.push(y1);
    }
    for n in 1..n_max {
        let next = 2.0 * n as f64 / z * y[n] - y[n - 1];
        y.push(next);
    }
    let mut j = jall;
    j.truncate(n_max + 1);
    Ok((j, y))
}

/// `(J_n(z), Y_n(z))`.
pub fn bessel_jy(order: usize, z: f64) -> Result<(f64, f64)> {
    let (j, y) = bessel_jy_upto(order, z)?;
    Ok((j[order], y[order]))
}

/// `H^{(1)}_n = J_n + i Y_n`.
pub fn hankel1(order: usize, z: f64) -> Result<Complex64> {
    let (j, y) = bessel_jy(order, z)?;
    Ok(Complex64::new(j, y))
}

/// `H'_n(z) = H_{n-1}(z) - (n/z) H_n(z)`, with `H_{-1} = -H_1`.
pub fn hankel1_derivative(order: usize, z: f64) -> Result<Complex64> {
    let h = hankel1_upto(order + 1, z)?;
    Ok(derivative_from(&h, order, z))
}

/// `H_0 .. H_{n_max}`.
pub fn hankel1_upto(n_max: usize, z: f64) -> Result<Vec<Complex64>> {
    let (j, y) = bessel_jy_upto(n_max, z)?;
    Ok(j.into_iter().zip(y).map(|(a, b)| Complex64::new(a, b)).collect())
}

/// `H'_0 .. H'_{n_max}`.
pub fn hankel1_derivative_upto(n_max: usize, z: f64) -> Result<Vec<Complex64>> {
    let h = hankel1_upto(n_max + 1, z)?;
    Ok((0..=n_max).map(|n| derivative_from(&h, n, z)).collect())
}

fn derivative_from(h: &[Complex64], n: usize, z: f64) -> Complex64 {
    if n == 0 {
        -h[1]
    } else {
        h[n - 1] - h[n] * (n as f64 / z)
    }
}

/// Leading large-argument magnitude `sqrt(2 / (πz))`.
pub fn hankel_asymptotic_magnitude(z: f64) -> f64 {
    (2.0 / (PI * z)).sqrt()
}
