//! Thin wrappers over faer for the few dense factorizations the crate needs.

use faer::linalg::solvers::SolveLstsq;
use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative singular-value cutoff for pseudoinverses.
pub(crate) const PINV_RCOND: f64 = 1e-12;

pub(crate) type CMat = Mat<Complex64>;

/// Moore-Penrose pseudoinverse by thin SVD, dropping singular values below
/// `rcond * σ_max`.
pub(crate) fn pseudoinverse(a: MatRef<'_, Complex64>, rcond: f64) -> Result<CMat> {
    let svd = a
        .thin_svd()
        .map_err(|e| Error::LinearAlgebra(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    let sigma_max = (0..s.nrows()).map(|i| s[i].re).fold(0.0, f64::max);
    let cutoff = rcond * sigma_max;
    let rank = (0..s.nrows()).filter(|&i| s[i].re > cutoff).count();
    // singular values come sorted in nonincreasing order
    let scaled_v = Mat::from_fn(v.nrows(), rank, |i, k| v[(i, k)] / s[k].re);
    let u_r = u.subcols(0, rank);
    Ok(&scaled_v * u_r.adjoint())
}

/// `A⁺ b` applied through the SVD factors without forming `A⁺`.
pub(crate) fn pseudoinverse_apply(
    a: MatRef<'_, Complex64>,
    b: &[Complex64],
    rcond: f64,
) -> Result<Vec<Complex64>> {
    let svd = a
        .thin_svd()
        .map_err(|e| Error::LinearAlgebra(format!("SVD did not converge: {e:?}")))?;
    let s = svd.S().column_vector();
    let (u, v) = (svd.U(), svd.V());
    let sigma_max = (0..s.nrows()).map(|i| s[i].re).fold(0.0, f64::max);
    let cutoff = rcond * sigma_max;
    let mut out = vec![Complex64::new(0.0, 0.0); a.ncols()];
    for k in 0..s.nrows() {
        if s[k].re <= cutoff {
            break;
        }
        let coef: Complex64 = (0..u.nrows()).map(|i| u[(i, k)].conj() * b[i]).sum::<Complex64>() / s[k].re;
        for (i, o) in out.iter_mut().enumerate() {
            *o += v[(i, k)] * coef;
        }
    }
    Ok(out)
}

pub(crate) fn singular_values(a: MatRef<'_, Complex64>) -> Result<Vec<f64>> {
    let sv = a
        .singular_values()
        .map_err(|e| Error::LinearAlgebra(format!("SVD did not converge: {e:?}")))?;
    Ok(sv)
}

/// Least-squares solution by Householder QR.
///
/// When `R` reveals numerical rank deficiency the minimum-norm solution is
/// taken from the SVD instead.
pub(crate) fn lstsq_qr(a: MatRef<'_, Complex64>, b: &[Complex64]) -> Result<Vec<Complex64>> {
    let qr = a.qr();
    if a.nrows() >= a.ncols() && full_rank(qr.thin_R()) {
        let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        let x = qr.solve_lstsq(&rhs);
        let x: Vec<Complex64> = (0..a.ncols()).map(|i| x[(i, 0)]).collect();
        if x.iter().all(|v| v.re.is_finite() && v.im.is_finite()) {
            return Ok(x);
        }
    }
    log::debug!("least-squares subproblem of {} columns is rank deficient; using the SVD", a.ncols());
    pseudoinverse_apply(a, b, PINV_RCOND)
}

/// Minimum-norm least-squares solution through a column-pivoted QR.
///
/// Returns `None` when the pivoted `R` reveals numerical rank deficiency, in
/// which case the caller falls back to the SVD.
pub(crate) fn min_norm_qr(a: MatRef<'_, Complex64>, b: &[Complex64]) -> Option<Vec<Complex64>> {
    let (rows, cols) = a.shape();
    if rows <= cols {
        // A^H Π = Q R  =>  A = Π R^H Q^H ; x = Q R^{-H} Π^T b
        let qr = a.adjoint().col_piv_qr();
        let r = qr.thin_R();
        if !full_rank(r) {
            return None;
        }
        let perm = qr.P();
        let (fwd, _) = perm.arrays();
        // y solves R^H y = Π^T b (forward substitution, R^H lower triangular)
        let n = rows;
        let mut y = vec![Complex64::new(0.0, 0.0); n];
        for i in 0..n {
            let mut acc = b[fwd[i]];
            for k in 0..i {
                acc -= r[(k, i)].conj() * y[k];
            }
            y[i] = acc / r[(i, i)].conj();
        }
        let q = qr.compute_thin_Q();
        Some((0..cols).map(|i| (0..n).map(|k| q[(i, k)] * y[k]).sum()).collect())
    } else {
        let qr = a.col_piv_qr();
        if !full_rank(qr.thin_R()) {
            return None;
        }
        let rhs = Mat::from_fn(rows, 1, |i, _| b[i]);
        let x = qr.solve_lstsq(&rhs);
        Some((0..cols).map(|i| x[(i, 0)]).collect())
    }
}

fn full_rank(r: MatRef<'_, Complex64>) -> bool {
    let n = r.nrows().min(r.ncols());
    if n == 0 {
        return false;
    }
    let peak = (0..n).map(|i| r[(i, i)].norm()).fold(0.0, f64::max);
    (0..n).all(|i| r[(i, i)].norm() > 1e-10 * peak)
}

/// `Aᴴ x` for a column-major `A`.
pub(crate) fn adjoint_apply(a: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    (0..a.ncols())
        .map(|j| {
            a.col_as_slice(j)
                .iter()
                .zip(x)
                .map(|(g, v)| g.conj() * v)
                .sum()
        })
        .collect()
}

/// `A x`.
pub(crate) fn apply(a: &CMat, x: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.nrows()];
    for (j, &c) in x.iter().enumerate() {
        if c == Complex64::new(0.0, 0.0) {
            continue;
        }
        for (o, g) in out.iter_mut().zip(a.col_as_slice(j)) {
            *o += g * c;
        }
    }
    out
}

/// Solves the square system `A x = b` with full pivoting and returns the
/// 2-norm condition number estimate from the singular values.
pub(crate) fn solve_square(a: MatRef<'_, Complex64>, b: &[Complex64]) -> Result<(Vec<Complex64>, f64)> {
    use faer::linalg::solvers::Solve;
    let sv = singular_values(a)?;
    let cond = match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    };
    let lu = a.full_piv_lu();
    let mut rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    lu.solve_in_place(&mut rhs);
    Ok(((0..b.len()).map(|i| rhs[(i, 0)]).collect(), cond))
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
