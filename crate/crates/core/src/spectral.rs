//! Eigenvalues, hyperbolicity checks and hyperbolicity-region scans.

use std::cmp::Ordering;
use std::io::{self, Write};

use nalgebra::linalg::{Schur, SVD};
use nalgebra::{Complex, DMatrix};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::format_real;
use crate::model::{Model, ModelConfig, Orders, Primitives, Variant};

/// Default bound on `|Im λ|`, relative to `max(1, max |λ|)`.
pub const DEFAULT_TOL_IMAG: f64 = 1e-9;
/// Relative distance below which two eigenvalues count as one cluster.
pub const CLUSTER_TOL: f64 = 1e-7;
/// Relative singular-value threshold for the rank of `M − λI`.
pub const RANK_TOL: f64 = 1e-6;

const MAX_SCHUR_ITERATIONS: usize = 10_000;

/// All eigenvalues of a dense real matrix, sorted by real then imaginary part.
///
/// Leading block-triangular structure (an exactly zero upper-right or
/// lower-left block) is split off first, so decoupled blocks are solved
/// independently.
pub fn eigenvalues_dense(m: &DMatrix<f64>) -> Result<Vec<Complex<f64>>> {
    if !m.is_square() {
        return Err(Error::invalid(
            "matrix",
            format!("must be square, got {}x{}", m.nrows(), m.ncols()),
        ));
    }
    for c in 0..m.ncols() {
        for r in 0..m.nrows() {
            if !m[(r, c)].is_finite() {
                return Err(Error::NonFiniteMatrix { row: r, col: c });
            }
        }
    }
    // Entries below rounding level relative to the largest one are
    // dropped; they stall the QR iteration without changing the spectrum
    // beyond round-off.
    let tiny = f64::EPSILON * m.amax();
    let cleaned = m.map(|x| if x.abs() < tiny { 0.0 } else { x });
    let mut out = Vec::with_capacity(m.nrows());
    collect_block(&cleaned, 0, m.nrows(), &mut out)?;
    out.sort_by(cmp_complex);
    Ok(out)
}

fn cmp_complex(a: &Complex<f64>, b: &Complex<f64>) -> Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

fn zero_block(
    m: &DMatrix<f64>,
    rows: std::ops::Range<usize>,
    cols: std::ops::Range<usize>,
) -> bool {
    rows.into_iter()
        .all(|r| cols.clone().all(|c| m[(r, c)] == 0.0))
}

fn collect_block(
    m: &DMatrix<f64>,
    lo: usize,
    hi: usize,
    out: &mut Vec<Complex<f64>>,
) -> Result<()> {
    match hi - lo {
        0 => return Ok(()),
        1 => {
            out.push(Complex::new(m[(lo, lo)], 0.0));
            return Ok(());
        }
        _ => {}
    }
    for k in lo + 1..hi {
        if zero_block(m, lo..k, k..hi) || zero_block(m, k..hi, lo..k) {
            collect_block(m, lo, k, out)?;
            return collect_block(m, k, hi, out);
        }
    }
    let n = hi - lo;
    let sub = m.view((lo, lo), (n, n)).into_owned();
    let schur = Schur::try_new(sub.clone(), f64::EPSILON, MAX_SCHUR_ITERATIONS)
        .or_else(|| Schur::try_new(sub.transpose(), f64::EPSILON, MAX_SCHUR_ITERATIONS))
        .or_else(|| Schur::try_new(sub, 64.0 * f64::EPSILON, MAX_SCHUR_ITERATIONS))
        .ok_or(Error::EigenNoConvergence {
            dim: n,
            iterations: MAX_SCHUR_ITERATIONS,
        })?;
    out.extend(schur.complex_eigenvalues().iter().copied());
    Ok(())
}

fn spectral_scale(ev: &[Complex<f64>]) -> f64 {
    ev.iter().map(|z| z.norm()).fold(1.0, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TridiagonalKind {
    /// Moment block of the radial equations, zero diagonal, size `N`.
    A2,
    /// Angular block, diagonal `v_rm`, size `N + 1`.
    A3,
}

/// One of the two tridiagonal blocks whose spectra give the regularized
/// wave speeds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TridiagonalSpec {
    pub kind: TridiagonalKind,
    pub n: usize,
    pub alpha1: f64,
    pub v_rm: f64,
}

impl TridiagonalSpec {
    pub fn a2(n: usize, alpha1: f64) -> Self {
        TridiagonalSpec {
            kind: TridiagonalKind::A2,
            n,
            alpha1,
            v_rm: 0.0,
        }
    }

    pub fn a3(n: usize, alpha1: f64, v_rm: f64) -> Self {
        TridiagonalSpec {
            kind: TridiagonalKind::A3,
            n,
            alpha1,
            v_rm,
        }
    }

    pub fn dim(&self) -> usize {
        match self.kind {
            TridiagonalKind::A2 => self.n,
            TridiagonalKind::A3 => self.n + 1,
        }
    }

    /// `(diagonal, super, sub)` with `sub[k]` at position `(k+1, k)`.
    pub fn bands(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let a = self.alpha1;
        let off = d.saturating_sub(1);
        match self.kind {
            TridiagonalKind::A2 => (
                vec![0.0; d],
                (0..off)
                    .map(|k| {
                        let i = (k + 1) as f64;
                        (i + 2.0) / (2.0 * i + 3.0) * a
                    })
                    .collect(),
                (0..off)
                    .map(|k| {
                        let i = (k + 2) as f64;
                        (i - 1.0) / (2.0 * i - 1.0) * a
                    })
                    .collect(),
            ),
            TridiagonalKind::A3 => (
                vec![self.v_rm; d],
                (0..off)
                    .map(|k| {
                        let k = k as f64;
                        (k + 1.0) / (2.0 * k + 3.0) * a
                    })
                    .collect(),
                (0..off)
                    .map(|k| {
                        let i = (k + 1) as f64;
                        i / (2.0 * i - 1.0) * a
                    })
                    .collect(),
            ),
        }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let (d, up, lo) = self.bands();
        let mut m = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(d));
        for k in 0..up.len() {
            m[(k, k + 1)] = up[k];
            m[(k + 1, k)] = lo[k];
        }
        m
    }

    /// Positive diagonal `D` with `D·M·D⁻¹` symmetric. `None` when some
    /// off-diagonal product is not positive (in particular for `α_1 = 0`).
    pub fn symmetrizer(&self) -> Option<Vec<f64>> {
        let (_, up, lo) = self.bands();
        let mut d = Vec::with_capacity(self.dim());
        if self.dim() > 0 {
            d.push(1.0);
        }
        for k in 0..up.len() {
            let ratio = up[k] / lo[k];
            if !(up[k] * lo[k] > 0.0 && ratio.is_finite()) {
                return None;
            }
            d.push(d[k] * ratio.sqrt());
        }
        Some(d)
    }

    pub fn symmetrized(&self) -> Option<DMatrix<f64>> {
        let d = self.symmetrizer()?;
        let mut m = self.matrix();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                m[(r, c)] *= d[r] / d[c];
            }
        }
        Some(m)
    }

    /// Ascending eigenvalues by Sturm bisection on the symmetrized form.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let (diag, up, lo) = self.bands();
        if up.iter().zip(&lo).any(|(u, l)| u * l <= 0.0) {
            // α_1 = 0: the matrix is diagonal
            let mut d = diag;
            d.sort_by(f64::total_cmp);
            return d;
        }
        let off: Vec<f64> = up.iter().zip(&lo).map(|(u, l)| (u * l).sqrt()).collect();
        symmetric_tridiagonal_eigenvalues(&diag, &off)
    }
}

/// Number of eigenvalues strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for k in 0..diag.len() {
        let coupling = if k == 0 {
            0.0
        } else {
            off[k - 1] * off[k - 1] / q
        };
        q = diag[k] - x - coupling;
        if q == 0.0 {
            q = -f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn symmetric_tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for k in 0..n {
        let radius =
            if k > 0 { off[k - 1].abs() } else { 0.0 } + if k + 1 < n { off[k].abs() } else { 0.0 };
        lo = lo.min(diag[k] - radius);
        hi = hi.max(diag[k] + radius);
    }
    (0..n)
        .map(|j| {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                if sturm_count(diag, off, mid) > j {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            0.5 * (a + b)
        })
        .collect()
}

/// Eigenvalues of the unit tridiagonal blocks (`α_1 = 1`, `v_rm = 0`) for
/// given orders; the regularized wave speeds are `v_rm + b_i α_1` and
/// `v_rm + s_i α_1`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitSpectra {
    pub b: Vec<f64>,
    pub s: Vec<f64>,
}

impl UnitSpectra {
    pub fn new(orders: Orders) -> Self {
        let b = TridiagonalSpec::a2(orders.nr, 1.0).eigenvalues();
        let s = if orders.nt == 0 {
            Vec::new()
        } else {
            TridiagonalSpec::a3(orders.nt, 1.0, 0.0).eigenvalues()
        };
        UnitSpectra { b, s }
    }

    pub fn max_abs(&self) -> f64 {
        self.b
            .iter()
            .chain(&self.s)
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

/// Analytic eigenvalues of the regularized system for `N_θ ∈ {0, N_r}`,
/// sorted ascending.
pub fn haswme_eigenvalues(cfg: &ModelConfig, h: f64, v_rm: f64, alpha1: f64) -> Result<Vec<f64>> {
    let o = cfg.orders;
    if cfg.variant != Variant::Haswme || (o.nt != 0 && o.nt != o.nr) {
        return Err(Error::NoClosedForm { nr: o.nr, nt: o.nt });
    }
    if !(h > 0.0) {
        return Err(Error::NonPositiveHeight(h));
    }
    let unit = UnitSpectra::new(o);
    let c = (cfg.g * h + alpha1 * alpha1).sqrt();
    let mut out = vec![v_rm - c, v_rm + c];
    if o.nt == 0 {
        out.push(v_rm);
    }
    out.extend(unit.b.iter().chain(&unit.s).map(|x| v_rm + x * alpha1));
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralReport {
    pub eigenvalues: Vec<Complex<f64>>,
    pub max_abs_imag: f64,
    pub hyperbolic: bool,
    /// Real diagonalizability, when requested. A spectrum that fails the
    /// imaginary-part test is reported as not diagonalizable over the reals.
    pub diagonalizable: Option<bool>,
}

pub fn classify_hyperbolic(
    m: &DMatrix<f64>,
    tol_imag: f64,
    check_diagonalizable: bool,
) -> Result<SpectralReport> {
    if !(tol_imag > 0.0) {
        return Err(Error::invalid(
            "tol_imag",
            format!("must be positive, got {tol_imag}"),
        ));
    }
    let eigenvalues = eigenvalues_dense(m)?;
    let scale = spectral_scale(&eigenvalues);
    let max_abs_imag = eigenvalues.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    let real = max_abs_imag <= tol_imag * scale;
    let diagonalizable =
        check_diagonalizable.then(|| real && real_diagonalizable(m, &eigenvalues, scale));
    Ok(SpectralReport {
        hyperbolic: real && diagonalizable.unwrap_or(true),
        eigenvalues,
        max_abs_imag,
        diagonalizable,
    })
}

/// Clusters the (real) spectrum and compares each cluster's size with the
/// nullity of `M − λI`.
fn real_diagonalizable(m: &DMatrix<f64>, ev: &[Complex<f64>], scale: f64) -> bool {
    let n = m.nrows();
    let mut re: Vec<f64> = ev.iter().map(|z| z.re).collect();
    re.sort_by(f64::total_cmp);
    let norm = m.norm().max(1.0);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && re[end] - re[end - 1] <= CLUSTER_TOL * scale {
            end += 1;
        }
        let size = end - start;
        if size > 1 {
            let center = re[start..end].iter().sum::<f64>() / size as f64;
            let shifted = m - DMatrix::<f64>::identity(n, n) * center;
            let sv = SVD::new(shifted, false, false).singular_values;
            let rank = sv.iter().filter(|s| **s > RANK_TOL * norm).count();
            if n - rank < size {
                return false;
            }
        }
        start = end;
    }
    true
}

/// Characteristic polynomials known in closed form for the two second-order systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KnownPolynomial {
    /// Radial velocity expanded, orders (2, 0): quintic in `c`.
    Radial20,
    /// Full velocity expanded, orders (2, 2), at `α_2 = 0`: degree seven.
    Full22,
}

/// Coefficients, highest degree first, in the scaled speed `c` where
/// `λ = v_rm + c√(gh)` and `α_i` are given in units of `√(gh)`. The
/// degree-seven polynomial is only known at `α_2 = 0`, so `a2` is ignored
/// for [`KnownPolynomial::Full22`].
pub fn known_char_poly(system: KnownPolynomial, a1: f64, a2: f64) -> Vec<f64> {
    let (p1, p2) = (a1 * a1, a2 * a2);
    match system {
        KnownPolynomial::Radial20 => vec![
            1.0,
            -10.0 * a2 / 7.0,
            -(1.0 + 6.0 * p1 / 5.0 + 6.0 * p2 / 35.0),
            -(-10.0 * a2 / 7.0 + 6.0 * p1 * a2 / 35.0 - 22.0 * p2 * a2 / 35.0),
            -(-p1 / 5.0 - p1 * p1 / 5.0 + 3.0 * p2 / 7.0 + 6.0 * p1 * p2 / 35.0 + p2 * p2 / 35.0),
            0.0,
        ],
        KnownPolynomial::Full22 => vec![
            -1.0,
            0.0,
            9.0 * p1 / 5.0 + 1.0,
            0.0,
            -23.0 * p1 * p1 / 25.0 - 4.0 * p1 / 5.0,
            0.0,
            3.0 * p1 * p1 * p1 / 25.0 + 3.0 * p1 * p1 / 25.0,
            0.0,
        ],
    }
}

/// Roots of a polynomial (coefficients highest degree first) as companion
/// matrix eigenvalues.
pub fn polynomial_roots(coeffs: &[f64]) -> Result<Vec<Complex<f64>>> {
    let lead = coeffs
        .first()
        .copied()
        .filter(|c| *c != 0.0)
        .ok_or_else(|| Error::invalid("coeffs", "leading coefficient must be nonzero"))?;
    let n = coeffs.len() - 1;
    let mut comp = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        comp[(k, k - 1)] = 1.0;
    }
    for k in 0..n {
        comp[(k, n - 1)] = -coeffs[n - k] / lead;
    }
    eigenvalues_dense(&comp)
}

pub fn known_char_poly_roots(
    system: KnownPolynomial,
    a1: f64,
    a2: f64,
) -> Result<Vec<Complex<f64>>> {
    polynomial_roots(&known_char_poly(system, a1, a2))
}

/// Uniform axis `lo..=hi` with `n` points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl AxisRange {
    pub fn new(lo: f64, hi: f64, n: usize) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::invalid(
                "range",
                format!("need finite lo < hi, got [{lo}, {hi}]"),
            ));
        }
        if n < 2 {
            return Err(Error::invalid(
                "range",
                format!("need at least 2 points, got {n}"),
            ));
        }
        Ok(AxisRange { lo, hi, n })
    }

    /// Written so that ranges symmetric about zero give exactly mirrored
    /// values.
    pub fn value(&self, i: usize) -> f64 {
        let m = (self.n - 1) as f64;
        (self.lo * (m - i as f64) + self.hi * i as f64) / m
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.value(i)).collect()
    }
}

impl Default for AxisRange {
    fn default() -> Self {
        AxisRange {
            lo: -3.0,
            hi: 3.0,
            n: 601,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RegionSystem {
    Radial20,
    Full22,
    /// Any unregularized configuration with `N_r ≥ 2`.
    Custom(ModelConfig),
}

impl RegionSystem {
    fn config(&self) -> Result<ModelConfig> {
        let cfg = match *self {
            RegionSystem::Radial20 => ModelConfig::new(2, 0, Variant::Aswme),
            RegionSystem::Full22 => ModelConfig::new(2, 2, Variant::Aswme),
            RegionSystem::Custom(cfg) => {
                if cfg.orders.nr < 2 {
                    return Err(Error::invalid("orders", "region scans need N_r >= 2"));
                }
                cfg
            }
        };
        Ok(cfg.with_gravity(1.0))
    }
}

/// Hyperbolicity flags over an `(α_1, α_2)` grid, `α_1` varying fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionGrid {
    pub alpha1: AxisRange,
    pub alpha2: AxisRange,
    pub flags: Vec<bool>,
}

impl RegionGrid {
    pub fn get(&self, i1: usize, i2: usize) -> bool {
        self.flags[i2 * self.alpha1.n + i1]
    }

    pub fn hyperbolic_fraction(&self) -> f64 {
        self.flags.iter().filter(|f| **f).count() as f64 / self.flags.len() as f64
    }

    /// Whether the flags are unchanged under `α_1 ↦ −α_1` (requires a range
    /// symmetric about zero).
    pub fn is_symmetric_in_alpha1(&self) -> bool {
        let n1 = self.alpha1.n;
        (0..self.alpha2.n).all(|i2| (0..n1).all(|i1| self.get(i1, i2) == self.get(n1 - 1 - i1, i2)))
    }

    pub fn write_csv<W: Write>(&self, mut w: W, header: Option<&str>) -> io::Result<()> {
        if let Some(h) = header {
            writeln!(w, "# {h}")?;
        }
        writeln!(w, "alpha_1,alpha_2,hyperbolic")?;
        for i2 in 0..self.alpha2.n {
            let a2 = format_real(self.alpha2.value(i2));
            for i1 in 0..self.alpha1.n {
                let flag = u8::from(self.get(i1, i2));
                writeln!(w, "{},{},{}", format_real(self.alpha1.value(i1)), a2, flag)?;
            }
        }
        Ok(())
    }

    /// Plain PGM, 255 = hyperbolic, 0 = not; the top row is the largest `α_2`.
    pub fn write_pgm<W: Write>(&self, mut w: W, header: Option<&str>) -> io::Result<()> {
        writeln!(w, "P2")?;
        if let Some(h) = header {
            writeln!(w, "# {h}")?;
        }
        writeln!(w, "{} {}", self.alpha1.n, self.alpha2.n)?;
        writeln!(w, "255")?;
        for i2 in (0..self.alpha2.n).rev() {
            let row: Vec<&str> = (0..self.alpha1.n)
                .map(|i1| if self.get(i1, i2) { "255" } else { "0" })
                .collect();
            writeln!(w, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Classifies every grid point at `h = 1`, `g = 1`, zero mean velocities
/// and zero angular moments, with all moments above the second zero.
pub fn scan_region(
    system: RegionSystem,
    alpha1: AxisRange,
    alpha2: AxisRange,
    tol_imag: f64,
) -> Result<RegionGrid> {
    let cfg = system.config()?;
    let model = Model::new(cfg)?;
    let flags = (0..alpha1.n * alpha2.n)
        .into_par_iter()
        .map(|idx| {
            let (i1, i2) = (idx % alpha1.n, idx / alpha1.n);
            let mut w = Primitives::at_rest(1.0, cfg.orders);
            w.alpha[0] = alpha1.value(i1);
            w.alpha[1] = alpha2.value(i2);
            let m = model.system_matrix(&w.to_state())?;
            Ok(classify_hyperbolic(&m, tol_imag, false)?.hyperbolic)
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(RegionGrid {
        alpha1,
        alpha2,
        flags,
    })
}
