//! Composite Gauss–Legendre quadrature on panels that respect breakpoints.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Nodes per panel used by default.
pub const DEFAULT_DEGREE: usize = 16;

/// A fixed set of nodes and weights on `[lo, hi]`.
#[derive(Debug, Clone)]
pub struct CompositeRule {
    lo: f64,
    hi: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CompositeRule {
    /// Splits `[lo, hi]` at every breakpoint inside it, then subdivides each
    /// piece into equal panels no wider than `max_panel`, and places a
    /// `degree`-point Gauss–Legendre rule on every panel.
    pub fn new(lo: f64, hi: f64, breakpoints: &[f64], max_panel: f64, degree: usize) -> Result<Self> {
        if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::InvalidArgument(format!("empty interval [{lo}, {hi}]")));
        }
        if !(max_panel > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "panel width must be positive, got {max_panel}"
            )));
        }
        let degree = NonZeroUsize::new(degree)
            .ok_or_else(|| Error::InvalidArgument("quadrature degree must be positive".into()))?;
        let rule = GaussLegendre::new(degree);
        let reference: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();

        let tol = 1e-12 * (hi - lo);
        let mut cuts: Vec<f64> = breakpoints
            .iter()
            .copied()
            .filter(|&b| b > lo + tol && b < hi - tol)
            .collect();
        cuts.push(lo);
        cuts.push(hi);
        cuts.sort_by(f64::total_cmp);
        cuts.dedup_by(|a, b| (*a - *b).abs() <= tol);

        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for w in cuts.windows(2) {
            let parts = ((w[1] - w[0]) / max_panel).ceil().max(1.0) as usize;
            let width = (w[1] - w[0]) / parts as f64;
            for p in 0..parts {
                let a = w[0] + p as f64 * width;
                let half = 0.5 * width;
                let mid = a + half;
                for &(t, wt) in &reference {
                    nodes.push(mid + half * t);
                    weights.push(half * wt);
                }
            }
        }
        Ok(Self {
            lo,
            hi,
            nodes,
            weights,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    pub fn integrate_complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| f(x) * w).sum()
    }

    /// `Σ_k w_k u_k conj(v_k)` for values already sampled at the nodes.
    pub fn inner(&self, u: &[Complex64], v: &[Complex64]) -> Complex64 {
        self.weights
            .iter()
            .zip(u.iter().zip(v))
            .map(|(&w, (a, b))| a * b.conj() * w)
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomials_are_exact() {
        let rule = CompositeRule::new(-1.0, 2.0, &[0.5], 10.0, 4).unwrap();
        // degree 7 is exact for a 4-point rule
        let f = |x: f64| x.powi(7) - 3.0 * x.powi(2) + 1.0;
        let exact = (2f64.powi(8) - 1.0) / 8.0 - (8.0 + 1.0) + 3.0;
        assert!((rule.integrate(f) - exact).abs() < 1e-12);
    }

    #[test]
    fn oscillatory_integral() {
        let rule = CompositeRule::new(0.0, 3.0, &[1.0, 2.0], 0.01, DEFAULT_DEGREE).unwrap();
        let freq = 2.0 * PI * 100.3;
        let got = rule.integrate_complex(|x| Complex64::cis(freq * x));
        let want = (Complex64::cis(freq * 3.0) - 1.0) / Complex64::new(0.0, freq);
        // the phases ω·x reach ~2000 rad, so rounding alone is ~1e-13 per node
        assert!((got - want).norm() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn panels_split_at_breakpoints() {
        let rule = CompositeRule::new(0.0, 1.0, &[0.3, -4.0, 7.0], 1.0, 3).unwrap();
        assert_eq!(rule.len(), 6);
        assert!(rule.nodes()[..3].iter().all(|&x| x < 0.3));
        assert!(rule.nodes()[3..].iter().all(|&x| x > 0.3));
        assert!((rule.weights().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn kinks_at_breakpoints_are_resolved() {
        let rule = CompositeRule::new(-1.0, 1.0, &[0.0], 5.0, 8).unwrap();
        assert!((rule.integrate(f64::abs) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn invalid_input() {
        assert!(CompositeRule::new(1.0, 1.0, &[], 1.0, 4).is_err());
        assert!(CompositeRule::new(0.0, 1.0, &[], 0.0, 4).is_err());
        assert!(CompositeRule::new(0.0, 1.0, &[], 1.0, 0).is_err());
    }
}
