//! Gabor systems generated by B-spline windows, their duals, and sampled frames.
//!
//! Atom `(m, n)` of a system with window `g` and lattice `(a, b)` is
//! `g(x - n·a) · e^{2πi·m·b·x}`. Atoms are enumerated shift-major: all
//! modulations of the first shift, then the next shift, and so on. That order
//! is the column order of every [`SampledFrame`] and the entry order of every
//! coefficient vector, and it is what "lowest atom index" refers to.

use std::f64::consts::PI;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64;

use crate::bspline::{make_bspline, BSplineWindow, PiecewisePolynomial};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, PINV_RCOND};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AtomIndex {
    /// modulation index
    pub m: i64,
    /// shift index
    pub n: i64,
}

/// Inclusive integer range; empty when `min > max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexRange {
    pub min: i64,
    pub max: i64,
}

impl IndexRange {
    pub fn new(min: i64, max: i64) -> Self {
        Self { min, max }
    }

    /// `[-m, m]`
    pub fn symmetric(m: i64) -> Self {
        Self { min: -m, max: m }
    }

    pub fn len(&self) -> usize {
        if self.max < self.min {
            0
        } else {
            (self.max - self.min + 1) as usize
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.min && v <= self.max
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.min..=self.max
    }
}

/// Equispaced sample grid `x_j = start + j·step`, `j = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    start: f64,
    step: f64,
    len: usize,
}

impl Grid {
    pub fn new(start: f64, step: f64, len: usize) -> Result<Self> {
        if !(step > 0.0) || !step.is_finite() || !start.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "grid needs a finite start and positive step, got start {start}, step {step}"
            )));
        }
        if len < 2 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least two points, got {len}"
            )));
        }
        Ok(Self { start, step, len })
    }

    /// `len` points from `lo` to `hi` inclusive.
    pub fn spanning(lo: f64, hi: f64, len: usize) -> Result<Self> {
        if len < 2 || !(hi > lo) {
            return Err(Error::InvalidArgument(format!(
                "cannot span [{lo}, {hi}] with {len} points"
            )));
        }
        Self::new(lo, (hi - lo) / (len - 1) as f64, len)
    }

    pub fn start(&self) -> f64 {
        self.start
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn end(&self) -> f64 {
        self.x(self.len - 1)
    }

    pub fn x(&self, j: usize) -> f64 {
        self.start + j as f64 * self.step
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len).map(move |j| self.x(j))
    }

    /// Index of the grid point at `x`, if `x` is (to rounding) a grid point.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        let t = (x - self.start) / self.step;
        let j = t.round();
        if (t - j).abs() > 1e-6 || j < 0.0 || j >= self.len as f64 {
            None
        } else {
            Some(j as usize)
        }
    }

    /// Whether the two grids share a spacing and their points interleave exactly.
    pub fn aligned_with(&self, other: &Grid) -> bool {
        (self.step - other.step).abs() <= 1e-12 * self.step
            && ((other.start - self.start) / self.step - ((other.start - self.start) / self.step).round())
                .abs()
                < 1e-6
    }
}

/// `true` iff `0 < a ≤ order` and `0 < b ≤ 1/order`: the lattices for which
/// the order-`order` B-spline generates a Gabor frame.
pub fn check_frame_parameters(order: usize, a: f64, b: f64) -> bool {
    let l = order as f64;
    order >= 1 && a > 0.0 && a <= l && b > 0.0 && b <= 1.0 / l
}

#[derive(Debug, Clone)]
pub struct GaborSystem {
    window: PiecewisePolynomial,
    order: Option<usize>,
    a: f64,
    b: f64,
    shifts: IndexRange,
    modulations: IndexRange,
}

impl GaborSystem {
    /// A system with an arbitrary piecewise-polynomial generator.
    pub fn new(
        window: PiecewisePolynomial,
        a: f64,
        b: f64,
        shifts: IndexRange,
        modulations: IndexRange,
    ) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "lattice steps must be positive, got a = {a}, b = {b}"
            )));
        }
        Ok(Self {
            window,
            order: None,
            a,
            b,
            shifts,
            modulations,
        })
    }

    /// A B-spline generated system; the lattice must lie in the frame region.
    pub fn bspline(
        window: &BSplineWindow,
        a: f64,
        b: f64,
        shifts: IndexRange,
        modulations: IndexRange,
    ) -> Result<Self> {
        if !check_frame_parameters(window.order(), a, b) {
            return Err(Error::FrameRegion {
                order: window.order(),
                a,
                b,
            });
        }
        let mut s = Self::new(window.poly().clone(), a, b, shifts, modulations)?;
        s.order = Some(window.order());
        Ok(s)
    }

    /// The same lattice and index ranges with a different generator.
    pub fn with_window(&self, window: PiecewisePolynomial) -> Self {
        Self {
            window,
            order: None,
            ..self.clone()
        }
    }

    /// The dual system generated by a piecewise-polynomial dual window.
    pub fn dual_system(&self, dual: &DualWindow) -> Result<Self> {
        match dual.piecewise() {
            Some(p) => Ok(self.with_window(p.clone())),
            None => Err(Error::InvalidArgument(
                "the canonical dual exists only as a sampled frame".into(),
            )),
        }
    }

    pub fn window(&self) -> &PiecewisePolynomial {
        &self.window
    }

    /// B-spline order of the generator, when it is a B-spline.
    pub fn order(&self) -> Option<usize> {
        self.order
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn shifts(&self) -> IndexRange {
        self.shifts
    }

    pub fn modulations(&self) -> IndexRange {
        self.modulations
    }

    pub fn atom_count(&self) -> usize {
        self.shifts.len() * self.modulations.len()
    }

    pub fn atoms(&self) -> Vec<AtomIndex> {
        self.shifts
            .iter()
            .flat_map(|n| self.modulations.iter().map(move |m| AtomIndex { m, n }))
            .collect()
    }

    pub fn atom(&self, q: usize) -> AtomIndex {
        let per = self.modulations.len();
        AtomIndex {
            n: self.shifts.min + (q / per) as i64,
            m: self.modulations.min + (q % per) as i64,
        }
    }

    pub fn column_of(&self, atom: AtomIndex) -> Option<usize> {
        if !self.shifts.contains(atom.n) || !self.modulations.contains(atom.m) {
            return None;
        }
        Some(
            (atom.n - self.shifts.min) as usize * self.modulations.len()
                + (atom.m - self.modulations.min) as usize,
        )
    }

    pub fn eval_atom(&self, atom: AtomIndex, x: f64) -> Complex64 {
        let w = self.window.eval(x - atom.n as f64 * self.a);
        if w == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::cis(2.0 * PI * atom.m as f64 * self.b * x) * w
    }

    /// Support of the translated window for shift `n`.
    pub fn shift_support(&self, n: i64) -> (f64, f64) {
        let (lo, hi) = self.window.support();
        (lo + n as f64 * self.a, hi + n as f64 * self.a)
    }
}

/// Every shift whose translated support overlaps the open interval `(lo, hi)`.
pub fn default_shifts(window_support: (f64, f64), a: f64, lo: f64, hi: f64) -> IndexRange {
    let (s0, s1) = window_support;
    // n·a + s1 > lo  and  n·a + s0 < hi
    let mut first = ((lo - s1) / a).floor() as i64;
    while first as f64 * a + s1 <= lo {
        first += 1;
    }
    let mut last = ((hi - s0) / a).ceil() as i64;
    while last as f64 * a + s0 >= hi {
        last -= 1;
    }
    IndexRange::new(first, last)
}

/// Modulations up to the Nyquist limit of a grid with spacing `step`.
///
/// When `1/(b·step)` is an integer `K`, the result is a complete residue
/// system modulo `K` (`K` consecutive indices, the positive Nyquist index
/// kept), so the sampled system has no duplicated columns. Otherwise it is
/// the symmetric range `|m|·b ≤ 1/(2·step)`.
pub fn default_modulations(b: f64, step: f64) -> IndexRange {
    let k = 1.0 / (b * step);
    let kr = k.round();
    if (k - kr).abs() < 1e-9 * k && kr >= 1.0 {
        let k = kr as i64;
        if k % 2 == 0 {
            IndexRange::new(-k / 2 + 1, k / 2)
        } else {
            IndexRange::symmetric((k - 1) / 2)
        }
    } else {
        IndexRange::symmetric((k / 2.0).floor() as i64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DualKind {
    /// `b·N_l + 2b·Σ_{k=1}^{l-1} N_l(x + k)`
    Dual1,
    /// `b·Σ_{k=-l+1}^{l-1} N_l(x + k)`
    Dual2,
    /// pseudoinverse of the sampled frame
    Canonical,
}

#[derive(Debug, Clone)]
enum DualRepr {
    Piecewise(PiecewisePolynomial),
    Sampled { grid: Grid, values: Vec<Complex64> },
}

#[derive(Debug, Clone)]
pub struct DualWindow {
    kind: DualKind,
    repr: DualRepr,
    support: (f64, f64),
}

impl DualWindow {
    pub fn kind(&self) -> DualKind {
        self.kind
    }

    pub fn support(&self) -> (f64, f64) {
        self.support
    }

    pub fn piecewise(&self) -> Option<&PiecewisePolynomial> {
        match &self.repr {
            DualRepr::Piecewise(p) => Some(p),
            DualRepr::Sampled { .. } => None,
        }
    }

    /// Value at `x`. Sampled windows are looked up at the nearest grid point.
    pub fn eval(&self, x: f64) -> Complex64 {
        match &self.repr {
            DualRepr::Piecewise(p) => Complex64::new(p.eval(x), 0.0),
            DualRepr::Sampled { grid, values } => {
                let t = ((x - grid.start()) / grid.step()).round();
                if t < 0.0 || t >= values.len() as f64 {
                    Complex64::new(0.0, 0.0)
                } else {
                    values[t as usize]
                }
            }
        }
    }

    /// The sampled canonical dual window: the dual atom `(0, n)` of a
    /// canonical dual frame, translated back by `n·a`.
    pub fn canonical(dual: &SampledFrame, n: i64, a: f64) -> Result<Self> {
        let q = dual
            .index()
            .iter()
            .position(|&atom| atom == AtomIndex { m: 0, n })
            .ok_or_else(|| Error::InvalidArgument(format!("frame has no atom (0, {n})")))?;
        let col = dual.matrix().col_as_slice(q).to_vec();
        let grid = Grid::new(dual.grid().start() - n as f64 * a, dual.grid().step(), dual.grid().len())?;
        let peak = col.iter().map(|v| v.norm()).fold(0.0, f64::max);
        let nz: Vec<usize> = (0..col.len()).filter(|&j| col[j].norm() > 1e-12 * peak).collect();
        let support = match (nz.first(), nz.last()) {
            (Some(&f), Some(&l)) => (grid.x(f.saturating_sub(1)), grid.x((l + 1).min(col.len() - 1))),
            _ => (0.0, 0.0),
        };
        Ok(Self {
            kind: DualKind::Canonical,
            repr: DualRepr::Sampled { grid, values: col },
            support,
        })
    }
}

fn dual_bound(order: usize, b: f64) -> Result<BSplineWindow> {
    let max = 1.0 / (2 * order - 1) as f64;
    if order == 0 {
        return Err(Error::InvalidArgument("B-spline order must be at least 1".into()));
    }
    if !(b > 0.0 && b <= max * (1.0 + 1e-12)) {
        return Err(Error::DualRange { order, b, max });
    }
    make_bspline(order)
}

/// The dual window `b·N_l(x) + 2b·Σ_{k=1}^{l-1} N_l(x + k)`, supported on `[-(l-1), l]`.
pub fn dual_window_theorem2(order: usize, b: f64) -> Result<DualWindow> {
    let n = dual_bound(order, b)?;
    let mut h = n.poly().scale(b);
    for k in 1..order {
        h = h.add(&n.poly().shift(-(k as f64)).scale(2.0 * b));
    }
    let support = h.support();
    Ok(DualWindow {
        kind: DualKind::Dual1,
        repr: DualRepr::Piecewise(h),
        support,
    })
}

/// The dual window `b·Σ_{k=-l+1}^{l-1} N_l(x + k)`, supported on `[-(l-1), 2l-1]`.
pub fn dual_window_theorem3(order: usize, b: f64) -> Result<DualWindow> {
    let n = dual_bound(order, b)?;
    let l = order as i64;
    let mut h: Option<PiecewisePolynomial> = None;
    for k in (-l + 1)..=(l - 1) {
        let term = n.poly().shift(-(k as f64)).scale(b);
        h = Some(match h {
            None => term,
            Some(acc) => acc.add(&term),
        });
    }
    let h = h.expect("at least one term");
    let support = h.support();
    Ok(DualWindow {
        kind: DualKind::Dual2,
        repr: DualRepr::Piecewise(h),
        support,
    })
}

/// A finite set of atoms evaluated on a grid: column `q` holds atom `index[q]`.
#[derive(Debug, Clone)]
pub struct SampledFrame {
    grid: Grid,
    matrix: CMat,
    index: Arc<[AtomIndex]>,
}

impl SampledFrame {
    /// Assembles a frame from an explicit matrix, mainly for synthetic tests.
    pub fn from_parts(grid: Grid, matrix: Mat<Complex64>, index: Vec<AtomIndex>) -> Result<Self> {
        if matrix.nrows() != grid.len() || matrix.ncols() != index.len() {
            return Err(Error::InvalidArgument(format!(
                "matrix is {}x{}, grid has {} points and index map {} atoms",
                matrix.nrows(),
                matrix.ncols(),
                grid.len(),
                index.len()
            )));
        }
        let mut sorted = index.clone();
        sorted.sort();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidArgument("index map contains duplicate atoms".into()));
        }
        Ok(Self {
            grid,
            matrix,
            index: index.into(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &Mat<Complex64> {
        &self.matrix
    }

    pub fn index(&self) -> &Arc<[AtomIndex]> {
        &self.index
    }

    pub fn atom_count(&self) -> usize {
        self.index.len()
    }

    pub fn column(&self, q: usize) -> &[Complex64] {
        self.matrix.col_as_slice(q)
    }

    /// The frame restricted to `count` consecutive grid rows starting at `first`.
    pub fn rows(&self, first: usize, count: usize) -> Result<Self> {
        if first + count > self.grid.len() || count < 2 {
            return Err(Error::InvalidArgument(format!(
                "rows {first}..{} outside a grid of {} points",
                first + count,
                self.grid.len()
            )));
        }
        let grid = Grid::new(self.grid.x(first), self.grid.step(), count)?;
        let matrix = self.matrix.subrows(first, count).to_owned();
        Ok(Self {
            grid,
            matrix,
            index: self.index.clone(),
        })
    }

    /// The frame with only the given columns, in the given order.
    pub fn columns(&self, cols: &[usize]) -> Self {
        let matrix = Mat::from_fn(self.grid.len(), cols.len(), |i, k| self.matrix[(i, cols[k])]);
        let index: Vec<AtomIndex> = cols.iter().map(|&q| self.index[q]).collect();
        Self {
            grid: self.grid,
            matrix,
            index: index.into(),
        }
    }

    /// `Σ_q c_q g_q` on the frame grid.
    pub fn synthesize(&self, coefficients: &[Complex64]) -> Result<Vec<Complex64>> {
        if coefficients.len() != self.atom_count() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} atoms",
                coefficients.len(),
                self.atom_count()
            )));
        }
        Ok(linalg::apply(&self.matrix, coefficients))
    }
}

/// Evaluates every atom of `system` on `grid`.
pub fn sample_frame(system: &GaborSystem, grid: &Grid) -> Result<SampledFrame> {
    if system.shifts().is_empty() || system.modulations().is_empty() {
        return Err(Error::InvalidArgument(format!(
            "empty index range: shifts {:?}, modulations {:?}",
            system.shifts(),
            system.modulations()
        )));
    }
    let p = grid.len();
    let q = system.atom_count();
    let xs: Vec<f64> = grid.points().collect();
    let mut matrix = Mat::<Complex64>::zeros(p, q);
    let mut col = 0;
    for n in system.shifts().iter() {
        let shift = n as f64 * system.a();
        let window: Vec<f64> = xs.iter().map(|&x| system.window().eval(x - shift)).collect();
        let active: Vec<usize> = (0..p).filter(|&j| window[j] != 0.0).collect();
        for m in system.modulations().iter() {
            let freq = 2.0 * PI * m as f64 * system.b();
            let out = matrix.col_as_slice_mut(col);
            for &j in &active {
                out[j] = Complex64::cis(freq * xs[j]) * window[j];
            }
            col += 1;
        }
    }
    SampledFrame::from_parts(*grid, matrix, system.atoms())
}

/// The sampled canonical dual: columns are the rows of the pseudoinverse of
/// the frame matrix, conjugated and divided by the grid step, so that
/// `Δx·Σ_j f(x_j)·conj(g̃_q(x_j))` reproduces `(G⁺ f)_q`.
pub fn canonical_dual(frame: &SampledFrame) -> Result<SampledFrame> {
    let pinv = linalg::pseudoinverse(frame.matrix.as_ref(), PINV_RCOND)?;
    let scale = 1.0 / frame.grid.step();
    let matrix = Mat::from_fn(frame.grid.len(), frame.atom_count(), |j, q| pinv[(q, j)].conj() * scale);
    Ok(SampledFrame {
        grid: frame.grid,
        matrix,
        index: frame.index.clone(),
    })
}

/// Discrete frame bounds of a sampled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameBounds {
    pub lower: f64,
    pub upper: f64,
}

impl FrameBounds {
    pub fn is_frame(&self) -> bool {
        self.lower > 0.0 && self.lower <= self.upper
    }

    pub fn ratio(&self) -> f64 {
        self.upper / self.lower
    }
}

/// Bounds for `Σ_q |⟨f, g_q⟩|² / ‖f‖²` with the grid inner product
/// `⟨u, v⟩ = Δx·Σ_j u_j·conj(v_j)`: `Δx·σ²` for the extreme singular values
/// of the frame matrix.
pub fn estimate_frame_bounds(frame: &SampledFrame) -> Result<FrameBounds> {
    if frame.grid.is_empty() || frame.atom_count() == 0 {
        return Err(Error::InvalidArgument("empty frame".into()));
    }
    let sv = linalg::singular_values(frame.matrix.as_ref())?;
    let hi = sv.iter().copied().fold(0.0, f64::max);
    let lo = sv.iter().copied().fold(f64::INFINITY, f64::min);
    let dx = frame.grid.step();
    Ok(FrameBounds {
        lower: dx * lo * lo,
        upper: dx * hi * hi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn standard_setup() -> (GaborSystem, Grid) {
        let n2 = make_bspline(2).unwrap();
        let grid = Grid::spanning(0.0, 3.0, 601).unwrap();
        let shifts = default_shifts(n2.support(), 1.0, 0.0, 3.0);
        let mods = default_modulations(1.0 / 3.0, grid.step());
        (GaborSystem::bspline(&n2, 1.0, 1.0 / 3.0, shifts, mods).unwrap(), grid)
    }

    #[test]
    fn frame_parameter_region() {
        assert!(check_frame_parameters(2, 1.0, 1.0 / 3.0));
        assert!(!check_frame_parameters(2, 1.0, 0.6));
        assert!(check_frame_parameters(3, 3.0, 1.0 / 3.0));
        assert!(!check_frame_parameters(3, 3.1, 0.2));
        assert!(!check_frame_parameters(2, 0.0, 0.2));
    }

    #[test]
    fn bspline_system_rejects_non_frames() {
        let n2 = make_bspline(2).unwrap();
        let err = GaborSystem::bspline(&n2, 1.0, 0.6, IndexRange::new(0, 1), IndexRange::symmetric(1));
        assert!(matches!(err, Err(Error::FrameRegion { order: 2, .. })));
    }

    #[test]
    fn default_ranges_for_the_unit_interval_setup() {
        assert_eq!(default_shifts((0.0, 2.0), 1.0, 0.0, 3.0), IndexRange::new(-1, 2));
        assert_eq!(default_modulations(1.0 / 3.0, 0.005), IndexRange::new(-299, 300));
        assert_eq!(default_modulations(0.2, 1.0), IndexRange::new(-2, 2));
        let (sys, _) = standard_setup();
        assert_eq!(sys.atom_count(), 2400);
        for q in [0, 1, 599, 600, 2399] {
            assert_eq!(sys.column_of(sys.atom(q)), Some(q));
        }
    }

    #[test]
    fn dual1_values() {
        let h = dual_window_theorem2(2, 1.0 / 3.0).unwrap();
        assert_eq!(h.kind(), DualKind::Dual1);
        assert!((h.eval(0.0).re - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(h.eval(5.0).re, 0.0);
        assert_eq!(h.support(), (-1.0, 2.0));
        let err = dual_window_theorem2(2, 0.51).unwrap_err();
        assert!(matches!(err, Error::DualRange { max, .. } if (max - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn dual2_values() {
        let h = dual_window_theorem3(2, 1.0 / 3.0).unwrap();
        assert!((h.eval(0.0).re - 1.0 / 3.0).abs() < 1e-15);
        assert!((h.eval(1.0).re - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(h.support(), (-1.0, 3.0));
        let h1 = dual_window_theorem3(1, 1.0).unwrap();
        let n1 = make_bspline(1).unwrap();
        for &x in &[-0.5, 0.0, 0.3, 0.99, 1.0] {
            assert_eq!(h1.eval(x).re, n1.eval(x));
        }
        assert!(dual_window_theorem3(3, 0.25).is_err());
    }

    #[test]
    fn dual_window_integrals() {
        for l in 1..=4usize {
            let b = 1.0 / (2 * l - 1) as f64;
            let d1 = dual_window_theorem2(l, b).unwrap();
            let d2 = dual_window_theorem3(l, b).unwrap();
            let expect = b * (2 * l - 1) as f64;
            assert!((d1.piecewise().unwrap().integral() - expect).abs() < 1e-14);
            assert!((d2.piecewise().unwrap().integral() - expect).abs() < 1e-14);
        }
    }

    /// The explicit duals satisfy the duality condition
    /// `Σ_n g(x - n - p/b)·h(x - n) = b·δ_{p0}` pointwise.
    #[test]
    fn duality_condition_holds_pointwise() {
        for l in 1..=3usize {
            let b = 1.0 / (2 * l - 1) as f64;
            let g = make_bspline(l).unwrap();
            for h in [dual_window_theorem2(l, b).unwrap(), dual_window_theorem3(l, b).unwrap()] {
                for p in -3i64..=3 {
                    for k in 0..37 {
                        let x = k as f64 * 0.0731;
                        let s: f64 = (-20..=20)
                            .map(|n| g.eval(x - n as f64 - p as f64 / b) * h.eval(x - n as f64).re)
                            .sum();
                        let want = if p == 0 { b } else { 0.0 };
                        assert!((s - want).abs() < 1e-14, "l={l} p={p} x={x}: {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn sampled_columns() {
        let n2 = make_bspline(2).unwrap();
        let grid = Grid::spanning(0.0, 3.0, 601).unwrap();
        let sys = GaborSystem::bspline(&n2, 1.0, 1.0 / 3.0, IndexRange::new(-1, 2), IndexRange::new(0, 0)).unwrap();
        let frame = sample_frame(&sys, &grid).unwrap();
        assert_eq!((frame.matrix().nrows(), frame.matrix().ncols()), (601, 4));
        let col0 = frame.column(sys.column_of(AtomIndex { m: 0, n: 0 }).unwrap());
        assert!(col0.iter().all(|v| v.im == 0.0));
        assert_eq!(col0[200], Complex64::new(1.0, 0.0));
        let peak = col0.iter().map(|v| v.re).fold(f64::MIN, f64::max);
        assert_eq!(peak, 1.0);
    }

    #[test]
    fn modulated_columns_are_phase_multiples() {
        let (sys, grid) = standard_setup();
        let frame = sample_frame(&sys, &grid).unwrap();
        for &(m, n) in &[(1, 0), (-7, 2), (300, -1)] {
            let base = frame.column(sys.column_of(AtomIndex { m: 0, n }).unwrap());
            let col = frame.column(sys.column_of(AtomIndex { m, n }).unwrap());
            for (j, x) in grid.points().enumerate() {
                let want = base[j] * Complex64::cis(2.0 * PI * m as f64 * sys.b() * x);
                assert!((col[j] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn far_shifts_give_zero_columns() {
        let n2 = make_bspline(2).unwrap();
        let grid = Grid::spanning(0.0, 3.0, 601).unwrap();
        let sys = GaborSystem::bspline(&n2, 1.0, 1.0 / 3.0, IndexRange::new(5, 6), IndexRange::symmetric(2)).unwrap();
        let frame = sample_frame(&sys, &grid).unwrap();
        for q in 0..frame.atom_count() {
            assert!(frame.column(q).iter().all(|v| v.norm() == 0.0));
        }
    }

    #[test]
    fn empty_ranges_are_rejected() {
        let n2 = make_bspline(2).unwrap();
        let grid = Grid::spanning(0.0, 3.0, 11).unwrap();
        let sys = GaborSystem::bspline(&n2, 1.0, 1.0 / 3.0, IndexRange::new(1, 0), IndexRange::symmetric(2)).unwrap();
        assert!(matches!(sample_frame(&sys, &grid), Err(Error::InvalidArgument(_))));
    }

    fn identity_frame(p: usize, extra_zero_row: bool) -> SampledFrame {
        let rows = p + usize::from(extra_zero_row);
        let m = Mat::from_fn(rows, p, |i, j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
        let index = (0..p as i64).map(|m| AtomIndex { m, n: 0 }).collect();
        SampledFrame::from_parts(Grid::new(0.0, 1.0, rows).unwrap(), m, index).unwrap()
    }

    #[test]
    fn identity_bounds() {
        let b = estimate_frame_bounds(&identity_frame(6, false)).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);
        let b = estimate_frame_bounds(&identity_frame(6, true)).unwrap();
        assert!((b.lower - 1.0).abs() < 1e-14 && (b.upper - 1.0).abs() < 1e-14);
    }

    #[test]
    fn canonical_dual_of_orthonormal_columns() {
        // orthonormal DFT columns
        let p = 8;
        let m = Mat::from_fn(p, p, |i, j| Complex64::cis(2.0 * PI * (i * j) as f64 / p as f64) / (p as f64).sqrt());
        let index = (0..p as i64).map(|m| AtomIndex { m, n: 0 }).collect();
        let step = 0.25;
        let frame = SampledFrame::from_parts(Grid::new(0.0, step, p).unwrap(), m, index).unwrap();
        let dual = canonical_dual(&frame).unwrap();
        for i in 0..p {
            for j in 0..p {
                let want = frame.matrix()[(i, j)] / step;
                assert!((dual.matrix()[(i, j)] - want).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn standard_setup_is_a_frame_on_the_grid() {
        let (sys, grid) = standard_setup();
        let frame = sample_frame(&sys, &grid).unwrap();
        let bounds = estimate_frame_bounds(&frame).unwrap();
        assert!(bounds.is_frame(), "{bounds:?}");
    }

    #[test]
    fn bounds_grow_when_columns_are_appended() {
        let n2 = make_bspline(2).unwrap();
        let grid = Grid::spanning(0.0, 3.0, 61).unwrap();
        let mut prev: Option<FrameBounds> = None;
        for m in [10, 12, 16, 20, 29] {
            let sys = GaborSystem::bspline(&n2, 1.0, 1.0 / 3.0, IndexRange::new(-1, 2), IndexRange::symmetric(m)).unwrap();
            let b = estimate_frame_bounds(&sample_frame(&sys, &grid).unwrap()).unwrap();
            if let Some(p) = prev {
                assert!(b.lower >= p.lower * (1.0 - 1e-12));
                assert!(b.upper >= p.upper * (1.0 - 1e-12));
            }
            prev = Some(b);
        }
    }

    /// For `a = 1`, `b = 1/3` the window support (2) fits in one period `1/b`,
    /// so the canonical dual window is `b·g / Σ_n g(x - n)²`.
    #[test]
    fn canonical_window_matches_closed_form() {
        let n2 = make_bspline(2).unwrap();
        let grid = Grid::spanning(-1.0, 4.0, 1001).unwrap();
        let sys = GaborSystem::bspline(&n2, 1.0, 1.0 / 3.0, IndexRange::new(-1, 2), default_modulations(1.0 / 3.0, grid.step())).unwrap();
        let frame = sample_frame(&sys, &grid).unwrap();
        let dual = canonical_dual(&frame).unwrap();
        let window = DualWindow::canonical(&dual, 0, 1.0).unwrap();
        assert_eq!(window.kind(), DualKind::Canonical);
        for k in 0..=40 {
            let x = -0.5 + k as f64 * 0.075;
            let denom: f64 = (-3..=3).map(|n| n2.eval(x - n as f64).powi(2)).sum();
            let want = if n2.eval(x) == 0.0 { 0.0 } else { n2.eval(x) / (3.0 * denom) };
            let got = window.eval(x);
            assert!((got.re - want).abs() < 1e-10 && got.im.abs() < 1e-10, "x = {x}: {got} vs {want}");
        }
    }
}
