//! Expansion coefficients: dual analysis, least squares, and block OMP.
//!
//! Two pursuit paths are provided. [`omp`] works on a sampled frame and the
//! grid residual `r = f - G_I c_I`. [`omp_functional`] works in `L²(0, L)`:
//! it tracks the residual inner products `r'_i = ⟨f, g_i⟩ - Σ_j c_j ⟨g_j, g_i⟩`,
//! with `⟨f, g_i⟩` from composite Gauss–Legendre quadrature and the Gram
//! entries `⟨g_j, g_i⟩` in closed form.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;

use crate::bspline::PiecewisePolynomial;
use crate::error::{Error, Result};
use crate::gabor::{AtomIndex, DualKind, GaborSystem, SampledFrame};
use crate::linalg::{self, PINV_RCOND};
use crate::quadrature::{CompositeRule, DEFAULT_DEGREE};
use crate::targets::TargetField;

/// Scores within this relative distance of the largest remaining score count
/// as tied; the lowest atom index among them wins.
pub const TIE_TOLERANCE: f64 = 1e-9;

/// Condition number above which the Gram subsystem triggers a warning.
const GRAM_COND_WARN: f64 = 1e12;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// How a coefficient vector was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Dual1,
    Dual2,
    Canonical,
    LeastSquares,
    Omp { blocksize: usize },
    OmpFunctional { blocksize: usize },
}

impl From<DualKind> for Provenance {
    fn from(kind: DualKind) -> Self {
        match kind {
            DualKind::Dual1 => Provenance::Dual1,
            DualKind::Dual2 => Provenance::Dual2,
            DualKind::Canonical => Provenance::Canonical,
        }
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Provenance::Dual1 => write!(f, "Dual1"),
            Provenance::Dual2 => write!(f, "Dual2"),
            Provenance::Canonical => write!(f, "Canonical"),
            Provenance::LeastSquares => write!(f, "LeastSquares"),
            Provenance::Omp { blocksize } => write!(f, "OMP({blocksize})"),
            Provenance::OmpFunctional { blocksize } => write!(f, "OMP-functional({blocksize})"),
        }
    }
}

/// Coefficients indexed like the columns of the generating frame.
#[derive(Debug, Clone)]
pub struct CoefficientVector {
    values: Vec<Complex64>,
    index: Arc<[AtomIndex]>,
    provenance: Provenance,
}

impl CoefficientVector {
    pub fn new(values: Vec<Complex64>, index: Arc<[AtomIndex]>, provenance: Provenance) -> Result<Self> {
        if values.len() != index.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for an index map of {} atoms",
                values.len(),
                index.len()
            )));
        }
        Ok(Self {
            values,
            index,
            provenance,
        })
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn index(&self) -> &Arc<[AtomIndex]> {
        &self.index
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn nonzero_count(&self) -> usize {
        self.values.iter().filter(|v| **v != ZERO).count()
    }

    pub fn get(&self, atom: AtomIndex) -> Option<Complex64> {
        self.index.iter().position(|&a| a == atom).map(|q| self.values[q])
    }

    /// Column positions ordered by decreasing magnitude, ties to the lower index.
    pub fn ranking(&self) -> Vec<usize> {
        let mags: Vec<f64> = self.values.iter().map(|v| v.norm()).collect();
        rank_by_score(&mags, mags.len(), &[])
    }

    /// Whether the index map matches the columns of `frame`.
    pub fn matches(&self, frame: &SampledFrame) -> bool {
        Arc::ptr_eq(&self.index, frame.index()) || *self.index == **frame.index()
    }
}

/// Picks up to `count` positions with the largest scores, skipping
/// `excluded`. Scores within [`TIE_TOLERANCE`] of the current leader are
/// treated as equal and resolved by lowest position.
fn rank_by_score(scores: &[f64], count: usize, excluded: &[usize]) -> Vec<usize> {
    let mut skip = vec![false; scores.len()];
    for &q in excluded {
        skip[q] = true;
    }
    let mut order: Vec<usize> = (0..scores.len()).filter(|&q| !skip[q]).collect();
    order.sort_by(|&p, &q| scores[q].total_cmp(&scores[p]).then(p.cmp(&q)));
    let mut picked = Vec::with_capacity(count.min(order.len()));
    let mut start = 0;
    // order[start..] holds the remaining candidates, still sorted by score
    while picked.len() < count && start < order.len() {
        let floor = scores[order[start]] * (1.0 - TIE_TOLERANCE);
        let mut best = start;
        let mut k = start + 1;
        while k < order.len() && scores[order[k]] >= floor {
            if order[k] < order[best] {
                best = k;
            }
            k += 1;
        }
        let q = order.remove(best);
        order.insert(start, q);
        picked.push(q);
        start += 1;
    }
    picked
}

/// `c_q = Δx·Σ_j f(x_j)·conj(h_q(x_j))` against a sampled dual frame.
pub fn analyze_with_dual(
    f_samples: &[Complex64],
    dual: &SampledFrame,
    kind: DualKind,
) -> Result<CoefficientVector> {
    if f_samples.len() != dual.grid().len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for a dual frame on {} grid points",
            f_samples.len(),
            dual.grid().len()
        )));
    }
    let dx = dual.grid().step();
    let values = linalg::adjoint_apply(dual.matrix(), f_samples)
        .into_iter()
        .map(|v| v * dx)
        .collect();
    CoefficientVector::new(values, dual.index().clone(), kind.into())
}

/// Minimum-norm least-squares coefficients, `G⁺ f`.
pub fn least_squares(frame: &SampledFrame, f_samples: &[Complex64]) -> Result<CoefficientVector> {
    check_samples(frame, f_samples)?;
    let values = match linalg::min_norm_qr(frame.matrix().as_ref(), f_samples) {
        Some(v) => v,
        None => {
            log::debug!("frame matrix is rank deficient; solving through the SVD");
            linalg::pseudoinverse_apply(frame.matrix().as_ref(), f_samples, PINV_RCOND)?
        }
    };
    CoefficientVector::new(values, frame.index().clone(), Provenance::LeastSquares)
}

fn check_samples(frame: &SampledFrame, f_samples: &[Complex64]) -> Result<()> {
    if f_samples.len() != frame.grid().len() {
        return Err(Error::InvalidArgument(format!(
            "{} samples for a frame on {} grid points",
            f_samples.len(),
            frame.grid().len()
        )));
    }
    Ok(())
}

fn check_blocksize(blocksize: usize) -> Result<()> {
    if blocksize == 0 {
        return Err(Error::InvalidArgument("blocksize must be at least 1".into()));
    }
    Ok(())
}

/// Keeps the `n` largest-magnitude entries and zeroes the rest.
pub fn truncate_top_n(c: &CoefficientVector, n: usize) -> CoefficientVector {
    let n = if n > c.len() {
        log::warn!("requested {n} coefficients from a vector of {}; keeping all", c.len());
        c.len()
    } else {
        n
    };
    let mut values = vec![ZERO; c.len()];
    let mags: Vec<f64> = c.values.iter().map(|v| v.norm()).collect();
    for q in rank_by_score(&mags, n, &[]) {
        values[q] = c.values[q];
    }
    CoefficientVector {
        values,
        index: c.index.clone(),
        provenance: c.provenance,
    }
}

/// Block orthogonal matching pursuit on a sampled frame, one iteration at a time.
#[derive(Debug, Clone)]
pub struct OmpState<'a> {
    frame: &'a SampledFrame,
    f: Vec<Complex64>,
    f_norm: f64,
    blocksize: usize,
    selected: Vec<usize>,
    coefficients: Vec<Complex64>,
    residual: Vec<Complex64>,
    residual_norms: Vec<f64>,
}

impl<'a> OmpState<'a> {
    pub fn new(frame: &'a SampledFrame, f_samples: &[Complex64], blocksize: usize) -> Result<Self> {
        check_samples(frame, f_samples)?;
        check_blocksize(blocksize)?;
        let f_norm = linalg::norm(f_samples);
        Ok(Self {
            frame,
            f: f_samples.to_vec(),
            f_norm,
            blocksize,
            selected: Vec::new(),
            coefficients: Vec::new(),
            residual: f_samples.to_vec(),
            residual_norms: vec![f_norm],
        })
    }

    /// Selected columns, in order of selection.
    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn blocksize(&self) -> usize {
        self.blocksize
    }

    pub fn iterations(&self) -> usize {
        self.residual_norms.len() - 1
    }

    pub fn residual(&self) -> &[Complex64] {
        &self.residual
    }

    /// Euclidean residual norm before the first and after every iteration.
    pub fn residual_norms(&self) -> &[f64] {
        &self.residual_norms
    }

    pub fn relative_residual(&self) -> f64 {
        if self.f_norm == 0.0 {
            0.0
        } else {
            self.residual_norms[self.residual_norms.len() - 1] / self.f_norm
        }
    }

    /// Runs one iteration; returns `false` when there was nothing left to select.
    pub fn step(&mut self) -> Result<bool> {
        self.step_with(self.blocksize)
    }

    /// One iteration that selects at most `count` atoms.
    pub fn step_with(&mut self, count: usize) -> Result<bool> {
        let remaining = self.frame.atom_count() - self.selected.len();
        if remaining == 0 || self.f_norm == 0.0 || count == 0 {
            return Ok(false);
        }
        let scores: Vec<f64> = linalg::adjoint_apply(self.frame.matrix(), &self.residual)
            .iter()
            .map(|v| v.norm())
            .collect();
        let block = rank_by_score(&scores, count, &self.selected);
        self.selected.extend(block);

        let sub = self.frame.columns(&self.selected);
        self.coefficients = linalg::lstsq_qr(sub.matrix().as_ref(), &self.f)?;
        let approx = linalg::apply(sub.matrix(), &self.coefficients);
        for ((r, f), a) in self.residual.iter_mut().zip(&self.f).zip(&approx) {
            *r = f - a;
        }
        self.residual_norms.push(linalg::norm(&self.residual));
        Ok(true)
    }

    /// `‖r‖ ≤ tolerance·‖f‖`; never true for a zero tolerance.
    pub fn converged(&self, tolerance: f64) -> bool {
        tolerance > 0.0 && self.relative_residual() <= tolerance
    }

    /// Runs until `max_iterations` or `‖r‖ ≤ tolerance·‖f‖`; a zero tolerance
    /// runs every iteration.
    pub fn run(&mut self, max_iterations: usize, tolerance: f64) -> Result<()> {
        while self.iterations() < max_iterations && !self.converged(tolerance) {
            if !self.step()? {
                break;
            }
        }
        Ok(())
    }

    /// The current coefficients, zero off the selected set.
    pub fn coefficients(&self) -> CoefficientVector {
        scatter(
            self.frame.index().clone(),
            &self.selected,
            &self.coefficients,
            Provenance::Omp {
                blocksize: self.blocksize,
            },
        )
    }
}

fn scatter(index: Arc<[AtomIndex]>, selected: &[usize], sub: &[Complex64], provenance: Provenance) -> CoefficientVector {
    let mut values = vec![ZERO; index.len()];
    for (&q, &v) in selected.iter().zip(sub) {
        values[q] = v;
    }
    CoefficientVector {
        values,
        index,
        provenance,
    }
}

/// Block OMP on a sampled frame.
pub fn omp(
    frame: &SampledFrame,
    f_samples: &[Complex64],
    blocksize: usize,
    max_iterations: usize,
    tolerance: f64,
) -> Result<CoefficientVector> {
    if max_iterations == 0 {
        return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
    }
    let mut state = OmpState::new(frame, f_samples, blocksize)?;
    state.run(max_iterations, tolerance)?;
    Ok(state.coefficients())
}

/// `∫_lo^hi g_i conj(g_j)` for atoms of a system in closed form.
///
/// Entries depend only on the two shifts and the modulation difference, and
/// are memoized on that triple.
#[derive(Debug)]
pub struct GramCache<'s> {
    system: &'s GaborSystem,
    lo: f64,
    hi: f64,
    products: HashMap<(i64, i64), PiecewisePolynomial>,
    values: HashMap<(i64, i64, i64), Complex64>,
}

impl<'s> GramCache<'s> {
    pub fn new(system: &'s GaborSystem, lo: f64, hi: f64) -> Self {
        Self {
            system,
            lo,
            hi,
            products: HashMap::new(),
            values: HashMap::new(),
        }
    }

    pub fn entry(&mut self, i: AtomIndex, j: AtomIndex) -> Complex64 {
        let key = (i.n, j.n, i.m - j.m);
        if let Some(&v) = self.values.get(&key) {
            return v;
        }
        let (system, lo, hi) = (self.system, self.lo, self.hi);
        let product = self.products.entry((i.n, j.n)).or_insert_with(|| {
            let w = system.window();
            w.shift(i.n as f64 * system.a())
                .mul(&w.shift(j.n as f64 * system.a()))
                .restrict(lo, hi)
        });
        let v = if product.is_zero() {
            ZERO
        } else {
            product.fourier_integral((i.m - j.m) as f64 * system.b())
        };
        self.values.insert(key, v);
        v
    }

    /// The Gram matrix `G_{pq} = ⟨g_{atoms[p]}, g_{atoms[q]}⟩`.
    pub fn matrix(&mut self, atoms: &[AtomIndex]) -> Mat<Complex64> {
        let mut g = Mat::<Complex64>::zeros(atoms.len(), atoms.len());
        for p in 0..atoms.len() {
            for q in 0..atoms.len() {
                g[(p, q)] = self.entry(atoms[p], atoms[q]);
            }
        }
        g
    }
}

/// `⟨f, g_q⟩` over `[lo, hi]` for every atom, by composite Gauss–Legendre
/// quadrature with panels split at the window knots and no wider than one
/// period of the fastest oscillation in the integrand.
pub fn atom_inner_products<F: TargetField + ?Sized>(
    system: &GaborSystem,
    f: &F,
    lo: f64,
    hi: f64,
) -> Result<Vec<Complex64>> {
    let mods = system.modulations();
    let fastest = mods.min.abs().max(mods.max.abs()) as f64 * system.b() + f.max_cycles_per_unit();
    let mut knots = Vec::new();
    for n in system.shifts().iter() {
        let shift = n as f64 * system.a();
        knots.extend(system.window().breakpoints().iter().map(|b| b + shift));
    }
    let rule = CompositeRule::new(lo, hi, &knots, 1.0 / fastest.max(1.0), DEFAULT_DEGREE)?;
    let nodes = rule.nodes();
    let fw: Vec<Complex64> = nodes
        .iter()
        .zip(rule.weights())
        .map(|(&x, &w)| f.eval(x) * w)
        .collect();

    let mut out = Vec::with_capacity(system.atom_count());
    for n in system.shifts().iter() {
        let shift = n as f64 * system.a();
        let base: Vec<(f64, Complex64)> = nodes
            .iter()
            .zip(&fw)
            .filter_map(|(&x, &v)| {
                let g = system.window().eval(x - shift);
                (g != 0.0).then(|| (x, v * g))
            })
            .collect();
        for m in mods.iter() {
            let omega = -2.0 * std::f64::consts::PI * m as f64 * system.b();
            out.push(base.iter().map(|&(x, v)| v * Complex64::cis(omega * x)).sum());
        }
    }
    Ok(out)
}

/// Block OMP in `L²(0, L)` with closed-form Gram entries, one iteration at a time.
#[derive(Debug)]
pub struct FunctionalOmpState<'s> {
    system: &'s GaborSystem,
    atoms: Vec<AtomIndex>,
    gram: GramCache<'s>,
    blocksize: usize,
    f_norm_sq: f64,
    /// `⟨f, g_i⟩`
    initial: Vec<Complex64>,
    /// `r'_i = ⟨r, g_i⟩`
    residual: Vec<Complex64>,
    /// `⟨g_j, g_i⟩` for every atom `i`, one row per selected `j`
    rows: Vec<Vec<Complex64>>,
    selected: Vec<usize>,
    coefficients: Vec<Complex64>,
    residual_norms: Vec<f64>,
}

impl<'s> FunctionalOmpState<'s> {
    /// Pursuit for `f` on `[0, L]`, `L` the period of the target.
    pub fn new<F: TargetField + ?Sized>(system: &'s GaborSystem, f: &F, blocksize: usize) -> Result<Self> {
        check_blocksize(blocksize)?;
        if system.atom_count() == 0 {
            return Err(Error::InvalidArgument("the system has no atoms".into()));
        }
        let (lo, hi) = (0.0, f.period());
        let initial = atom_inner_products(system, f, lo, hi)?;
        let fastest = 2.0 * f.max_cycles_per_unit();
        let rule = CompositeRule::new(lo, hi, &[], 1.0 / fastest.max(1.0), DEFAULT_DEGREE)?;
        let f_norm_sq = rule.integrate(|x| f.eval(x).norm_sqr());
        Ok(Self {
            system,
            atoms: system.atoms(),
            gram: GramCache::new(system, lo, hi),
            blocksize,
            f_norm_sq,
            residual: initial.clone(),
            initial,
            rows: Vec::new(),
            selected: Vec::new(),
            coefficients: Vec::new(),
            residual_norms: vec![f_norm_sq.sqrt()],
        })
    }

    pub fn selected(&self) -> &[usize] {
        &self.selected
    }

    pub fn iterations(&self) -> usize {
        self.residual_norms.len() - 1
    }

    /// The residual inner products `r'_i`.
    pub fn residual(&self) -> &[Complex64] {
        &self.residual
    }

    /// `‖f - Σ c_j g_j‖` in `L²(0, L)`, before the first and after every iteration.
    /// Tracked as `‖f‖² - Re Σ c_j conj(⟨f, g_j⟩)`, so values below about
    /// `1e-8·‖f‖` are lost to cancellation.
    pub fn residual_norms(&self) -> &[f64] {
        &self.residual_norms
    }

    pub fn relative_residual(&self) -> f64 {
        if self.f_norm_sq == 0.0 {
            0.0
        } else {
            self.residual_norms[self.residual_norms.len() - 1] / self.f_norm_sq.sqrt()
        }
    }

    pub fn step(&mut self) -> Result<bool> {
        self.step_with(self.blocksize)
    }

    /// One iteration that selects at most `count` atoms.
    pub fn step_with(&mut self, count: usize) -> Result<bool> {
        if self.selected.len() == self.atoms.len() || self.f_norm_sq == 0.0 || count == 0 {
            return Ok(false);
        }
        let scores: Vec<f64> = self.residual.iter().map(|v| v.norm()).collect();
        let block = rank_by_score(&scores, count, &self.selected);
        for &j in &block {
            let aj = self.atoms[j];
            let row = self.atoms.iter().map(|&ai| self.gram.entry(aj, ai)).collect();
            self.rows.push(row);
        }
        self.selected.extend(block);

        // Σ_j c_j ⟨g_j, g_i⟩ = ⟨f, g_i⟩ for i in I
        let k = self.selected.len();
        let system = Mat::from_fn(k, k, |p, q| self.rows[q][self.selected[p]]);
        let rhs: Vec<Complex64> = self.selected.iter().map(|&i| self.initial[i]).collect();
        let (c, cond) = linalg::solve_square(system.as_ref(), &rhs)?;
        if cond > GRAM_COND_WARN {
            log::warn!("Gram system of {k} atoms has condition number {cond:.3e}");
        }
        self.coefficients = c;

        self.residual.copy_from_slice(&self.initial);
        for (row, &cj) in self.rows.iter().zip(&self.coefficients) {
            for (r, g) in self.residual.iter_mut().zip(row) {
                *r -= cj * g;
            }
        }
        let captured: f64 = self
            .coefficients
            .iter()
            .zip(&rhs)
            .map(|(c, r)| (c * r.conj()).re)
            .sum();
        self.residual_norms.push((self.f_norm_sq - captured).max(0.0).sqrt());
        Ok(true)
    }

    /// `‖r‖ ≤ tolerance·‖f‖`; never true for a zero tolerance.
    pub fn converged(&self, tolerance: f64) -> bool {
        tolerance > 0.0 && self.relative_residual() <= tolerance
    }

    /// Runs until `max_iterations` or `‖r‖ ≤ tolerance·‖f‖`; a zero tolerance
    /// runs every iteration.
    pub fn run(&mut self, max_iterations: usize, tolerance: f64) -> Result<()> {
        while self.iterations() < max_iterations && !self.converged(tolerance) {
            if !self.step()? {
                break;
            }
        }
        Ok(())
    }

    pub fn coefficients(&self) -> CoefficientVector {
        scatter(
            self.atoms.clone().into(),
            &self.selected,
            &self.coefficients,
            Provenance::OmpFunctional {
                blocksize: self.blocksize,
            },
        )
    }

    pub fn system(&self) -> &GaborSystem {
        self.system
    }
}

/// Block OMP in `L²(0, L)`; see [`FunctionalOmpState`].
pub fn omp_functional<F: TargetField + ?Sized>(
    system: &GaborSystem,
    f: &F,
    blocksize: usize,
    max_iterations: usize,
    tolerance: f64,
) -> Result<CoefficientVector> {
    if max_iterations == 0 {
        return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
    }
    let mut state = FunctionalOmpState::new(system, f, blocksize)?;
    state.run(max_iterations, tolerance)?;
    Ok(state.coefficients())
}
