//! Finite-dimensional model of `L²(-k,k)` and `C² ⊗ L²(-k,k)`.
//!
//! A [`MomentumGrid`] carries quadrature nodes strictly inside `(-k,k)`
//! together with the longitudinal wavenumbers `ϖ_j = sqrt(k² - p_j²)`.
//! Integral operators are stored in the Nyström convention: the matrix
//! entry already contains the quadrature weight of its column, so that
//! application is a plain matrix-vector product while the inner product
//! carries the weights.

use std::f64::consts::PI;
use std::sync::Arc;

use ndarray::prelude::*;
use ndarray_linalg::SVD;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Quadrature rule used to place nodes on `(-k,k)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum QuadRule {
    /// Gauss-Legendre in the angle `θ ∈ (-π/2, π/2)` mapped by `p = k sin θ`.
    /// The measure `dp/ϖ(p) = dθ` keeps `ϖ⁻¹`-weighted kernels well scaled
    /// near the band edges.
    #[serde(rename = "gauss-legendre-theta")]
    GaussLegendreTheta,
    /// Gauss-Legendre directly in `p` on `(-k,k)`.
    #[serde(rename = "gauss-legendre-p")]
    GaussLegendreP,
}

/// Gauss-Legendre nodes and weights on `[-1,1]`, by Newton iteration on
/// the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess for the i-th root from the top.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Quadrature grid on `(-k,k)` with precomputed `ϖ` values.
///
/// Only the oscillating band `|p| < k` is represented; the nodes are
/// strictly interior so `ϖ_j > 0` everywhere and `ϖ̂⁻¹` is finite.
#[derive(Debug, Clone)]
pub struct MomentumGrid {
    pub k: f64,
    pub n: usize,
    pub rule: QuadRule,
    /// Angles `θ_j ∈ (-π/2, π/2)`, strictly increasing.
    pub theta: Vec<f64>,
    /// Nodes `p_j = k sin θ_j`.
    pub p: Vec<f64>,
    /// Weights for integration in `p`.
    pub weights: Vec<f64>,
    /// `ϖ_j = k cos θ_j`.
    pub varpi: Vec<f64>,
}

impl MomentumGrid {
    pub fn build(k: f64, n: usize, rule: QuadRule) -> Result<Arc<Self>> {
        if !(k > 0.0) || !k.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "wavenumber k must be positive and finite, got {k}"
            )));
        }
        if n < 2 {
            return Err(Error::InvalidArgument(format!(
                "node count N must be at least 2, got {n}"
            )));
        }
        let (gl_nodes, gl_weights) = gauss_legendre(n);
        let mut theta = Vec::with_capacity(n);
        let mut p = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        let mut varpi = Vec::with_capacity(n);
        match rule {
            QuadRule::GaussLegendreTheta => {
                for (&t, &w) in gl_nodes.iter().zip(&gl_weights) {
                    let th = t * PI / 2.0;
                    theta.push(th);
                    p.push(k * th.sin());
                    varpi.push(k * th.cos());
                    weights.push(w * (PI / 2.0) * k * th.cos());
                }
            }
            QuadRule::GaussLegendreP => {
                for (&t, &w) in gl_nodes.iter().zip(&gl_weights) {
                    let th = t.asin();
                    theta.push(th);
                    p.push(k * t);
                    varpi.push(k * th.cos());
                    weights.push(w * k);
                }
            }
        }
        Ok(Arc::new(MomentumGrid {
            k,
            n,
            rule,
            theta,
            p,
            weights,
            varpi,
        }))
    }

    pub fn same_grid(&self, other: &MomentumGrid) -> bool {
        self.k == other.k && self.n == other.n && self.rule == other.rule
    }

    /// Diagonal multipliers `ϖ_j^power` for `power ∈ {-1, +1, +2}`.
    pub fn varpi_pow(&self, power: i32) -> Result<Vec<f64>> {
        if !matches!(power, -1 | 1 | 2) {
            return Err(Error::InvalidArgument(format!(
                "varpi power must be one of -1, +1, +2, got {power}"
            )));
        }
        Ok(self.varpi.iter().map(|&v| v.powi(power)).collect())
    }

    /// Diagonal multipliers `e^{i sign x ϖ_j}`.
    pub fn phase(&self, x: f64, sign: i8) -> Vec<C64> {
        let s = sign.signum() as f64;
        self.varpi
            .iter()
            .map(|&v| (C64::new(0.0, s * x * v)).exp())
            .collect()
    }

    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|&w| w.sqrt()).collect()
    }

    /// Index of the node closest to the momentum `p0`.
    pub fn nearest_node(&self, p0: f64) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (j, &pj) in self.p.iter().enumerate() {
            let d = (pj - p0).abs();
            if d < dist {
                dist = d;
                best = j;
            }
        }
        best
    }
}

/// A sampled element of `L²(-k,k)`.
#[derive(Debug, Clone)]
pub struct GridFunction {
    pub grid: Arc<MomentumGrid>,
    pub values: Array1<C64>,
}

impl GridFunction {
    pub fn new(grid: Arc<MomentumGrid>, values: Array1<C64>) -> Result<Self> {
        if values.len() != grid.n {
            return Err(Error::InvalidArgument(format!(
                "value vector length {} does not match grid size {}",
                values.len(),
                grid.n
            )));
        }
        Ok(GridFunction { grid, values })
    }

    pub fn from_fn(grid: &Arc<MomentumGrid>, f: impl Fn(f64) -> C64) -> Self {
        let values = grid.p.iter().map(|&p| f(p)).collect::<Array1<C64>>();
        GridFunction {
            grid: Arc::clone(grid),
            values,
        }
    }

    pub fn zeros(grid: &Arc<MomentumGrid>) -> Self {
        GridFunction {
            grid: Arc::clone(grid),
            values: Array1::zeros(grid.n),
        }
    }

    /// Weighted inner product `Σ_j w_j conj(f_j) g_j`.
    pub fn inner_product(&self, other: &GridFunction) -> Result<C64> {
        if !self.grid.same_grid(&other.grid) {
            return Err(Error::GridMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(other.values.iter())
            .zip(self.grid.weights.iter())
            .map(|((a, b), &w)| a.conj() * b * w)
            .sum())
    }

    pub fn norm(&self) -> f64 {
        self.values
            .iter()
            .zip(self.grid.weights.iter())
            .map(|(a, &w)| a.norm_sqr() * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Pointwise multiplication by `ϖ_j^power`, `power ∈ {-1, +1, +2}`.
    pub fn apply_varpi(&self, power: i32) -> Result<GridFunction> {
        let mult = self.grid.varpi_pow(power)?;
        let values = self
            .values
            .iter()
            .zip(mult.iter())
            .map(|(v, &m)| v * m)
            .collect::<Array1<C64>>();
        Ok(GridFunction {
            grid: Arc::clone(&self.grid),
            values,
        })
    }

    /// Apply the phase operator `e^{i sign x ϖ̂}`.
    pub fn phased(&self, x: f64, sign: i8) -> GridFunction {
        let ph = self.grid.phase(x, sign);
        let values = self
            .values
            .iter()
            .zip(ph.iter())
            .map(|(v, m)| v * m)
            .collect::<Array1<C64>>();
        GridFunction {
            grid: Arc::clone(&self.grid),
            values,
        }
    }
}

/// Operator norm estimation method.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormMethod {
    PowerIteration,
    DenseSvd,
}

#[derive(Debug, Clone, Copy)]
pub struct NormEstimate {
    pub value: f64,
    pub converged: bool,
}

/// Relative-change stopping tolerance for power iteration.
pub const POWER_ITER_TOL: f64 = 1e-10;
/// Iteration cap for power iteration.
pub const POWER_ITER_MAX: usize = 500;

/// Operator norm of a plain-matvec matrix with respect to the weighted
/// inner product: the 2-norm of `W^{1/2} A W^{-1/2}` with `W = diag(w)`.
/// `sqrt_w` must repeat the grid weights once per component block.
pub fn weighted_operator_norm(a: &Array2<C64>, sqrt_w: &[f64], method: NormMethod) -> NormEstimate {
    let s = symmetrize(a, sqrt_w);
    match method {
        NormMethod::DenseSvd => {
            let (_, sv, _) = s.svd(false, false).expect("SVD failed on finite matrix");
            NormEstimate {
                value: sv.iter().cloned().fold(0.0, f64::max),
                converged: true,
            }
        }
        NormMethod::PowerIteration => power_iteration_norm(&s),
    }
}

/// `W^{1/2} A W^{-1/2}`: the similarity transform under which the weighted
/// operator norm becomes the plain spectral norm.
pub fn symmetrize(a: &Array2<C64>, sqrt_w: &[f64]) -> Array2<C64> {
    let n = a.nrows();
    assert_eq!(sqrt_w.len(), n);
    assert_eq!(a.ncols(), n);
    let mut s = a.clone();
    for i in 0..n {
        for j in 0..n {
            s[[i, j]] *= sqrt_w[i] / sqrt_w[j];
        }
    }
    s
}

fn power_iteration_norm(s: &Array2<C64>) -> NormEstimate {
    let n = s.nrows();
    let sh = adjoint(s);
    // Deterministic start vector with nonzero overlap against generic
    // singular vectors.
    let mut v: Array1<C64> = Array1::from_shape_fn(n, |j| {
        C64::new(1.0 / (1.0 + j as f64), ((j as f64) * 0.7).sin() * 0.5)
    });
    let nv = vec_norm(&v);
    if nv == 0.0 {
        return NormEstimate {
            value: 0.0,
            converged: true,
        };
    }
    v.mapv_inplace(|z| z / nv);
    let mut est = 0.0;
    for _ in 0..POWER_ITER_MAX {
        let w = s.dot(&v);
        let new_est = vec_norm(&w);
        if new_est == 0.0 {
            return NormEstimate {
                value: 0.0,
                converged: true,
            };
        }
        let mut u = sh.dot(&w);
        let nu = vec_norm(&u);
        if nu == 0.0 {
            return NormEstimate {
                value: new_est,
                converged: true,
            };
        }
        u.mapv_inplace(|z| z / nu);
        let rel = (new_est - est).abs() / new_est.max(f64::MIN_POSITIVE);
        est = new_est;
        v = u;
        if rel < POWER_ITER_TOL {
            return NormEstimate {
                value: est,
                converged: true,
            };
        }
    }
    NormEstimate {
        value: est,
        converged: false,
    }
}

pub fn adjoint(a: &Array2<C64>) -> Array2<C64> {
    a.t().mapv(|z| z.conj())
}

fn vec_norm(v: &Array1<C64>) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// 2x2 block of N x N matrices acting on the discretized `C² ⊗ L²(-k,k)`.
///
/// Blocks are stored in the weighted convention: `(A ξ)(p_i) = Σ_j A[i][j] ξ_j`
/// where the column weight is already folded into the entries.
#[derive(Debug, Clone)]
pub struct BlockOperator {
    pub grid: Arc<MomentumGrid>,
    /// Full 2N x 2N matrix, blocks ordered `[[11, 12], [21, 22]]`.
    pub full: Array2<C64>,
}

impl BlockOperator {
    pub fn from_full(grid: Arc<MomentumGrid>, full: Array2<C64>) -> Result<Self> {
        let m = 2 * grid.n;
        if full.nrows() != m || full.ncols() != m {
            return Err(Error::InvalidArgument(format!(
                "block operator must be {m}x{m}, got {}x{}",
                full.nrows(),
                full.ncols()
            )));
        }
        Ok(BlockOperator { grid, full })
    }

    pub fn zero(grid: &Arc<MomentumGrid>) -> Self {
        let m = 2 * grid.n;
        BlockOperator {
            grid: Arc::clone(grid),
            full: Array2::zeros((m, m)),
        }
    }

    pub fn identity(grid: &Arc<MomentumGrid>) -> Self {
        let m = 2 * grid.n;
        BlockOperator {
            grid: Arc::clone(grid),
            full: Array2::eye(m),
        }
    }

    pub fn block(&self, row: usize, col: usize) -> ArrayView2<'_, C64> {
        let n = self.grid.n;
        self.full.slice(s![row * n..(row + 1) * n, col * n..(col + 1) * n])
    }

    pub fn apply_full(&self, v: &Array1<C64>) -> Array1<C64> {
        self.full.dot(v)
    }

    pub fn compose(&self, rhs: &BlockOperator) -> BlockOperator {
        BlockOperator {
            grid: Arc::clone(&self.grid),
            full: self.full.dot(&rhs.full),
        }
    }

    pub fn add(&self, rhs: &BlockOperator) -> BlockOperator {
        BlockOperator {
            grid: Arc::clone(&self.grid),
            full: &self.full + &rhs.full,
        }
    }

    pub fn sub(&self, rhs: &BlockOperator) -> BlockOperator {
        BlockOperator {
            grid: Arc::clone(&self.grid),
            full: &self.full - &rhs.full,
        }
    }

    pub fn scale(&self, c: C64) -> BlockOperator {
        BlockOperator {
            grid: Arc::clone(&self.grid),
            full: self.full.mapv(|z| z * c),
        }
    }

    fn stacked_sqrt_weights(&self) -> Vec<f64> {
        let sw = self.grid.sqrt_weights();
        let mut out = Vec::with_capacity(2 * sw.len());
        out.extend_from_slice(&sw);
        out.extend_from_slice(&sw);
        out
    }

    pub fn operator_norm(&self, method: NormMethod) -> NormEstimate {
        weighted_operator_norm(&self.full, &self.stacked_sqrt_weights(), method)
    }
}
