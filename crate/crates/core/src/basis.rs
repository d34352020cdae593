//! Shifted, normalized Legendre polynomials on [0, 1] and the coupling
//! coefficients of the moment hierarchy.
//!
//! `φ_j(ζ) = P_j(1 − 2ζ)`, so `φ_j(0) = 1` and
//! `∫₀¹ φ_m φ_n dζ = δ_mn / (2n + 1)`.
//!
//! Values are computed with the three-term Legendre recurrence in
//! `x = 1 − 2ζ`; monomial expansions lose too many digits past order 6.

use crate::error::{Error, Result};

/// Gauss–Legendre rule mapped to [0, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// `n`-point rule, exact for polynomials of degree `2n − 1`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d.is_finite() { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            // map [-1, 1] -> [0, 1]
            nodes[i] = 0.5 * (1.0 - x);
            nodes[n - 1 - i] = 0.5 * (1.0 + x);
            weights[i] = 0.5 * w;
            weights[n - 1 - i] = 0.5 * w;
        }
        GaussLegendre { nodes, weights }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `φ_0(ζ), …, φ_n(ζ)` without range checks.
pub(crate) fn phi_all(n: usize, zeta: f64) -> Vec<f64> {
    let x = 1.0 - 2.0 * zeta;
    let mut p = Vec::with_capacity(n + 1);
    p.push(1.0);
    if n >= 1 {
        p.push(x);
    }
    for k in 1..n {
        let kf = k as f64;
        p.push(((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0));
    }
    p
}

/// `φ_0'(ζ), …, φ_n'(ζ)` from `P'_{k+1} = P'_{k−1} + (2k+1) P_k` and
/// `dφ/dζ = −2 P'(x)`.
pub(crate) fn dphi_all(n: usize, zeta: f64) -> Vec<f64> {
    let p = phi_all(n, zeta);
    let mut dp = vec![0.0; n + 1];
    if n >= 1 {
        dp[1] = 1.0;
    }
    for k in 1..n {
        dp[k + 1] = dp[k - 1] + (2.0 * k as f64 + 1.0) * p[k];
    }
    dp.iter().map(|d| -2.0 * d).collect()
}

fn check_zeta(zeta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&zeta) {
        Ok(())
    } else {
        Err(Error::ZetaOutOfRange(zeta))
    }
}

/// `φ_j(ζ)`.
pub fn eval_phi(j: usize, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    Ok(phi_all(j, zeta)[j])
}

/// `dφ_j/dζ`.
pub fn eval_dphi(j: usize, zeta: f64) -> Result<f64> {
    check_zeta(zeta)?;
    Ok(dphi_all(j, zeta)[j])
}

/// Precomputed `A_ijk`, `B_ijk` and `C_ij` for `1 ≤ i, j, k ≤ order`.
///
/// * `A_ijk = (2i+1) ∫ φ_i φ_j φ_k`
/// * `B_ijk = (2i+1) ∫ φ_i' (∫₀^ζ φ_j) φ_k`
/// * `C_ij  = ∫ φ_i' φ_j'`
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingTables {
    order: usize,
    a: Vec<f64>,
    b: Vec<f64>,
    c: Vec<f64>,
}

impl CouplingTables {
    pub fn new(order: usize) -> Self {
        let n = order;
        let mut a = vec![0.0; n * n * n];
        let mut b = vec![0.0; n * n * n];
        let mut c = vec![0.0; n * n];
        if n == 0 {
            return CouplingTables { order, a, b, c };
        }
        let quad = GaussLegendre::new((3 * n + 2).div_ceil(2));
        for (&z, &w) in quad.nodes.iter().zip(&quad.weights) {
            let phi = phi_all(n + 1, z);
            let dphi = dphi_all(n, z);
            // ∫₀^ζ φ_j = (φ_{j−1} − φ_{j+1}) / (2(2j+1))
            let int_phi: Vec<f64> = (0..=n)
                .map(|j| {
                    if j == 0 {
                        z
                    } else {
                        (phi[j - 1] - phi[j + 1]) / (2.0 * (2 * j + 1) as f64)
                    }
                })
                .collect();
            for i in 1..=n {
                let scale = (2 * i + 1) as f64 * w;
                for j in 1..=n {
                    c[(i - 1) * n + (j - 1)] += w * (dphi[i] * dphi[j]);
                    for k in 1..=n {
                        let idx = ((i - 1) * n + (j - 1)) * n + (k - 1);
                        a[idx] += scale * phi[i] * (phi[j] * phi[k]);
                        b[idx] += scale * dphi[i] * int_phi[j] * phi[k];
                    }
                }
            }
        }
        CouplingTables { order, a, b, c }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    fn idx(&self, i: usize, j: usize, k: usize) -> usize {
        debug_assert!(i >= 1 && j >= 1 && k >= 1);
        debug_assert!(i <= self.order && j <= self.order && k <= self.order);
        ((i - 1) * self.order + (j - 1)) * self.order + (k - 1)
    }

    /// `A_ijk`, 1-based.
    #[inline]
    pub fn a(&self, i: usize, j: usize, k: usize) -> f64 {
        self.a[self.idx(i, j, k)]
    }

    /// `B_ijk`, 1-based.
    #[inline]
    pub fn b(&self, i: usize, j: usize, k: usize) -> f64 {
        self.b[self.idx(i, j, k)]
    }

    /// `C_ij`, 1-based.
    #[inline]
    pub fn c(&self, i: usize, j: usize) -> f64 {
        self.c[(i - 1) * self.order + (j - 1)]
    }
}

/// Mean and Legendre coefficients of a vertical profile `f` on [0, 1].
///
/// `coeffs[j − 1] = (2j+1) ∫ (f − mean) φ_j dζ` for `j = 1..=n`.
pub fn project_velocity_profile(f: impl Fn(f64) -> f64, n: usize) -> (f64, Vec<f64>) {
    // n + 6 nodes: exact through degree 2n + 11.
    let quad = GaussLegendre::new(n + 6);
    let samples: Vec<(f64, f64, Vec<f64>)> = quad
        .nodes
        .iter()
        .zip(&quad.weights)
        .map(|(&z, &w)| (w, f(z), phi_all(n, z)))
        .collect();
    let mean: f64 = samples.iter().map(|(w, fz, _)| w * fz).sum();
    let coeffs = (1..=n)
        .map(|j| {
            let s: f64 = samples
                .iter()
                .map(|(w, fz, p)| w * (fz - mean) * p[j])
                .sum();
            (2 * j + 1) as f64 * s
        })
        .collect();
    (mean, coeffs)
}

/// `mean + Σ coeffs[j−1] φ_j(ζ)`.
pub fn reconstruct_profile(mean: f64, coeffs: &[f64], zeta: f64) -> f64 {
    let phi = phi_all(coeffs.len(), zeta);
    mean + coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| c * phi[j + 1])
        .sum::<f64>()
}
