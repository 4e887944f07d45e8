//! Potential families with analytic partial Fourier transforms `ṽ(x,p)`,
//! their power-law envelope parameters, and the Nyström assembly of the
//! Hilbert-Schmidt operator `v̂_k(x)` on a momentum grid.
//!
//! Potentials are specified by a closed-form `ṽ`, never by `v(x,y)` plus a
//! numerical Fourier transform, so the integrability condition is exact and
//! no FFT error enters the certificates. Envelope constants `(α, β, σ)` are
//! declared per family and verified by the bounds module, not inferred.

use std::f64::consts::{E, PI};
use std::sync::Arc;

use ndarray::prelude::*;
use ndarray_linalg::Eig;
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{
    symmetrize, weighted_operator_norm, GridFunction, MomentumGrid, NormEstimate, NormMethod,
};

/// Threshold below which the box-profile kernel `2 sin(ap)/p` switches to
/// its series branch `2a(1 - (ap)²/6)`.
const SINC_SERIES_CUTOFF: f64 = 1e-4;

/// Built-in potential family. `v0` may be complex; the class admits
/// complex potentials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family")]
pub enum Family {
    /// `v(x,y) = v0 e^{-x²} e^{-y²}`, so `ṽ(x,p) = v0 √π e^{-x²} e^{-p²/4}`.
    #[serde(rename = "gauss-gauss")]
    GaussGauss { v0: C64 },
    /// `v(x,y) = v0 e^{-x²} 1_{|y|<a}`, so `ṽ(x,p) = v0 e^{-x²} · 2 sin(ap)/p`.
    #[serde(rename = "gauss-box")]
    GaussBox { v0: C64, a: f64 },
    /// `v(x,y) = v0 (1+x²)^{-σ/2} e^{-y²}`, so `ṽ(x,p) = v0 √π (1+x²)^{-σ/2} e^{-p²/4}`.
    #[serde(rename = "powerlaw-gauss")]
    PowerlawGauss { v0: C64, sigma: f64 },
    /// `ṽ(x,p) = v0 e^{-x²} p e^{-p} 1_{p>0}`; the y-profile is
    /// `(2π)^{-1}(1-iy)^{-2}`, which is integrable.
    #[serde(rename = "one-sided")]
    OneSided { v0: C64 },
}

impl Family {
    pub fn v0(&self) -> C64 {
        match self {
            Family::GaussGauss { v0 }
            | Family::GaussBox { v0, .. }
            | Family::PowerlawGauss { v0, .. }
            | Family::OneSided { v0 } => *v0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::GaussGauss { .. } => "gauss-gauss",
            Family::GaussBox { .. } => "gauss-box",
            Family::PowerlawGauss { .. } => "powerlaw-gauss",
            Family::OneSided { .. } => "one-sided",
        }
    }
}

/// A potential model: analytic `ṽ(x,p)` plus declared envelope constants.
///
/// The envelope claim is `|v(x,y)| ≤ β/(1+|x|)^σ` for `|x| ≥ α`; its
/// operator-norm consequence `‖v̂_k(x)‖₀ ≤ 2πβ/(1+|x|)^σ` is what the
/// certificates check. `mu` bounds `|ṽ(x,p)|` for `|p| ≤ 2k` over the
/// declared x-range.
#[derive(Debug, Clone)]
pub struct PotentialModel {
    pub name: String,
    pub family: Family,
    pub alpha: f64,
    pub beta: f64,
    pub sigma: f64,
    pub mu: f64,
    pub xrange: (f64, f64),
}

impl PotentialModel {
    /// Build a model with envelope constants derived for the family.
    ///
    /// For Gaussian x-profiles the admissible `β` comes from maximizing
    /// `(1+|x|)^σ e^{-x²}` over `|x| ≥ α`; with `α = 1, σ = 4` the maximum
    /// sits exactly at `x = 1` and equals `16/e`.
    pub fn builtin(family: Family, k: f64) -> Result<Self> {
        let v0 = family.v0();
        let amp = v0.norm();
        let (alpha, beta, sigma, mu) = match &family {
            Family::GaussGauss { .. } => (1.0, amp * 16.0 / E, 4.0, amp * PI.sqrt()),
            Family::GaussBox { a, .. } => {
                if !(*a > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "gauss-box half-width must be positive, got {a}"
                    )));
                }
                (1.0, amp * 16.0 / E, 4.0, amp * 2.0 * a)
            }
            Family::PowerlawGauss { sigma, .. } => {
                if !(*sigma > 0.0) {
                    return Err(Error::InvalidArgument(format!(
                        "powerlaw-gauss decay exponent must be positive, got {sigma}"
                    )));
                }
                // max over |x| ≥ 1 of (1+|x|)^σ (1+x²)^{-σ/2} = 2^{σ/2}, at x = 1
                (1.0, amp * 2f64.powf(sigma / 2.0), *sigma, amp * PI.sqrt())
            }
            Family::OneSided { .. } => {
                // sup_p |p e^{-p}| on (0, 2k]
                let peak = if 2.0 * k >= 1.0 {
                    1.0 / E
                } else {
                    2.0 * k * (-2.0 * k).exp()
                };
                (1.0, amp * 16.0 / (2.0 * PI * E), 4.0, amp * peak)
            }
        };
        Ok(PotentialModel {
            name: family.name().to_string(),
            family,
            alpha,
            beta,
            sigma,
            mu,
            xrange: (f64::NEG_INFINITY, f64::INFINITY),
        })
    }

    /// Analytic partial Fourier transform `ṽ(x,p)`.
    pub fn vtilde(&self, x: f64, p: f64) -> C64 {
        match &self.family {
            Family::GaussGauss { v0 } => v0 * PI.sqrt() * (-x * x).exp() * (-p * p / 4.0).exp(),
            Family::GaussBox { v0, a } => {
                let profile = if (a * p).abs() < SINC_SERIES_CUTOFF {
                    2.0 * a * (1.0 - (a * p) * (a * p) / 6.0)
                } else {
                    2.0 * (a * p).sin() / p
                };
                v0 * (-x * x).exp() * profile
            }
            Family::PowerlawGauss { v0, sigma } => {
                v0 * PI.sqrt() * (1.0 + x * x).powf(-sigma / 2.0) * (-p * p / 4.0).exp()
            }
            Family::OneSided { v0 } => {
                if p > 0.0 {
                    v0 * (-x * x).exp() * p * (-p).exp()
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// The class-membership envelope for the operator norm,
    /// `2πβ/(1+|x|)^σ`, valid for `|x| ≥ α`.
    pub fn envelope(&self, x: f64) -> f64 {
        2.0 * PI * self.beta / (1.0 + x.abs()).powf(self.sigma)
    }

    /// The transfer-matrix limit requires `σ > 3` (class membership in
    /// `C_{3,k}`).
    pub fn is_transfer_ready(&self) -> bool {
        self.sigma > 3.0
    }

    pub fn require_transfer_ready(&self) -> Result<()> {
        if self.is_transfer_ready() {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "model '{}' has envelope exponent sigma = {} <= 3; the transfer-matrix limit requires sigma > 3",
                self.name, self.sigma
            )))
        }
    }
}

/// The discretized `v̂_k(x)`: entries `(1/2π) ṽ(x, p_i - q_j) w_j`.
#[derive(Debug, Clone)]
pub struct VhatMatrix {
    pub grid: Arc<MomentumGrid>,
    pub x: f64,
    pub entries: Array2<C64>,
}

/// Outcome of the spectral expansion of a `v̂_k(x)` matrix.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<C64>,
    /// `max_n |ν_n|`; equals the operator norm for normal kernels.
    pub spectral_radius: f64,
    /// True when the eigensolver failed and the radius fell back to the
    /// SVD-based operator norm.
    pub svd_fallback: bool,
}

pub fn assemble_vhat(model: &PotentialModel, grid: &Arc<MomentumGrid>, x: f64) -> Result<VhatMatrix> {
    let n = grid.n;
    let mut entries = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            let p = grid.p[i] - grid.p[j];
            let v = model.vtilde(x, p);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::ModelEval { x, p });
            }
            entries[[i, j]] = v * (grid.weights[j] / (2.0 * PI));
        }
    }
    Ok(VhatMatrix {
        grid: Arc::clone(grid),
        x,
        entries,
    })
}

impl VhatMatrix {
    pub fn apply(&self, f: &GridFunction) -> Result<GridFunction> {
        if !self.grid.same_grid(&f.grid) {
            return Err(Error::GridMismatch);
        }
        GridFunction::new(Arc::clone(&self.grid), self.entries.dot(&f.values))
    }

    pub fn operator_norm(&self, method: NormMethod) -> NormEstimate {
        weighted_operator_norm(&self.entries, &self.grid.sqrt_weights(), method)
    }

    /// Eigenvalues of the weight-symmetrized matrix plus `max |ν_n|`.
    pub fn spectrum(&self) -> Spectrum {
        let s = symmetrize(&self.entries, &self.grid.sqrt_weights());
        match s.eig() {
            Ok((eigs, _)) => {
                let eigenvalues: Vec<C64> = eigs.to_vec();
                let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
                Spectrum {
                    eigenvalues,
                    spectral_radius,
                    svd_fallback: false,
                }
            }
            Err(_) => Spectrum {
                eigenvalues: Vec::new(),
                spectral_radius: self.operator_norm(NormMethod::DenseSvd).value,
                svd_fallback: true,
            },
        }
    }
}

/// Table of `‖v̂_k(x+dx) - v̂_k(x)‖₀` against `dx`.
pub fn continuity_probe(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    x: f64,
    dx_sequence: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let base = assemble_vhat(model, grid, x)?;
    let mut table = Vec::with_capacity(dx_sequence.len());
    for &dx in dx_sequence {
        let shifted = assemble_vhat(model, grid, x + dx)?;
        let diff = &shifted.entries - &base.entries;
        let norm = weighted_operator_norm(&diff, &grid.sqrt_weights(), NormMethod::DenseSvd).value;
        table.push((dx, norm));
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadRule;

    fn grid(k: f64, n: usize) -> Arc<MomentumGrid> {
        MomentumGrid::build(k, n, QuadRule::GaussLegendreTheta).unwrap()
    }

    fn model(family: Family) -> PotentialModel {
        PotentialModel::builtin(family, 1.0).unwrap()
    }

    #[test]
    fn gauss_gauss_origin_value() {
        let m = model(Family::GaussGauss {
            v0: C64::new(1.0, 0.0),
        });
        let v = m.vtilde(0.0, 0.0);
        assert!((v.re - PI.sqrt()).abs() <= 1e-15);
        assert!(v.im.abs() <= 1e-15);
    }

    #[test]
    fn gauss_box_sinc_limit() {
        let m = model(Family::GaussBox {
            v0: C64::new(1.0, 0.0),
            a: 1.0,
        });
        for x in [0.0, 0.3, 2.0] {
            let v = m.vtilde(x, 0.0);
            let expect = 2.0 * (-x * x).exp();
            assert!((v.re - expect).abs() <= 1e-12, "x={x}");
        }
        // series branch agrees with the closed form at the same point
        let p = 0.99e-4;
        let series = m.vtilde(0.0, p).re;
        let closed = 2.0 * p.sin() / p;
        assert!((series - closed).abs() <= 1e-15);
    }

    #[test]
    fn one_sided_vanishes_for_nonpositive_p() {
        let m = model(Family::OneSided {
            v0: C64::new(1.0, 0.5),
        });
        for p in [0.0, -0.1, -2.0] {
            assert_eq!(m.vtilde(0.5, p), C64::new(0.0, 0.0));
        }
        assert!(m.vtilde(0.5, 0.3).norm() > 0.0);
    }

    #[test]
    fn sigma_gate_for_transfer() {
        let ok = model(Family::PowerlawGauss {
            v0: C64::new(1.0, 0.0),
            sigma: 4.0,
        });
        assert!(ok.require_transfer_ready().is_ok());
        let bad = model(Family::PowerlawGauss {
            v0: C64::new(1.0, 0.0),
            sigma: 2.5,
        });
        assert!(bad.require_transfer_ready().is_err());
    }

    #[test]
    fn zero_potential_assembles_to_zero() {
        let g = grid(1.0, 16);
        let m = model(Family::GaussGauss {
            v0: C64::new(0.0, 0.0),
        });
        let v = assemble_vhat(&m, &g, 0.7).unwrap();
        assert!(v.entries.iter().all(|z| z.norm() == 0.0));
        assert_eq!(v.operator_norm(NormMethod::DenseSvd).value, 0.0);
        let spec = v.spectrum();
        assert_eq!(spec.spectral_radius, 0.0);
    }

    #[test]
    fn vhat_matches_refined_quadrature_oracle() {
        // smooth probe ξ; the 4N-node rule applied to the same kernel is
        // the oracle for the matrix-vector product
        let g = grid(1.0, 32);
        let g4 = grid(1.0, 128);
        let m = model(Family::GaussGauss {
            v0: C64::new(1.0, 0.0),
        });
        let xi = |p: f64| C64::new((-p * p).exp(), 0.3 * p);
        let v = assemble_vhat(&m, &g, 0.0).unwrap();
        let out = v.apply(&GridFunction::from_fn(&g, xi)).unwrap();
        // oracle: integrate (1/2π) ṽ(0, p_i - q) ξ(q) dq on the fine rule
        let mut err2 = 0.0;
        let mut ref2 = 0.0;
        for (i, &p) in g.p.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (&q, &wq) in g4.p.iter().zip(&g4.weights) {
                acc += m.vtilde(0.0, p - q) * xi(q) * (wq / (2.0 * PI));
            }
            err2 += (out.values[i] - acc).norm_sqr() * g.weights[i];
            ref2 += acc.norm_sqr() * g.weights[i];
        }
        let rel = (err2 / ref2).sqrt();
        assert!(rel <= 1e-8, "relative gap {rel:.3e}");
    }

    #[test]
    fn one_sided_strictly_triangular() {
        let g = grid(1.0, 12);
        let m = model(Family::OneSided {
            v0: C64::new(1.0, 0.0),
        });
        let v = assemble_vhat(&m, &g, 0.0).unwrap();
        for i in 0..g.n {
            for j in 0..g.n {
                if g.p[i] <= g.p[j] {
                    assert_eq!(v.entries[[i, j]], C64::new(0.0, 0.0));
                }
            }
        }
        // strictly triangular => nilpotent: N-th power vanishes, all
        // eigenvalues zero
        let mut power = Array2::<C64>::eye(g.n);
        for _ in 0..g.n {
            power = power.dot(&v.entries);
        }
        assert!(power.iter().all(|z| z.norm() <= 1e-300));
        let spec = v.spectrum();
        let scale = v.operator_norm(NormMethod::DenseSvd).value;
        assert!(spec.spectral_radius <= 1e-8 * scale.max(1.0));
    }

    #[test]
    fn hermitian_kernel_real_eigenvalues() {
        for fam in [
            Family::GaussGauss {
                v0: C64::new(0.8, 0.0),
            },
            Family::GaussBox {
                v0: C64::new(0.8, 0.0),
                a: 1.0,
            },
        ] {
            let g = grid(1.0, 20);
            let m = model(fam);
            let v = assemble_vhat(&m, &g, 0.4).unwrap();
            let spec = v.spectrum();
            assert!(!spec.svd_fallback);
            for ev in &spec.eigenvalues {
                assert!(ev.im.abs() <= 1e-10, "eigenvalue {ev} not real");
            }
            // normal kernel: spectral radius equals the operator norm
            let norm = v.operator_norm(NormMethod::DenseSvd).value;
            assert!((spec.spectral_radius - norm).abs() <= 1e-6 * norm);
        }
    }

    #[test]
    fn assembly_linear_in_amplitude() {
        let g = grid(1.0, 16);
        let base = model(Family::GaussGauss {
            v0: C64::new(1.0, 0.0),
        });
        let scaled = model(Family::GaussGauss {
            v0: C64::new(-2.5, 0.0),
        });
        let v1 = assemble_vhat(&base, &g, 0.3).unwrap();
        let v2 = assemble_vhat(&scaled, &g, 0.3).unwrap();
        for (a, b) in v1.entries.iter().zip(v2.entries.iter()) {
            assert!((b - a * C64::new(-2.5, 0.0)).norm() <= 1e-15);
        }
        let n1 = v1.operator_norm(NormMethod::DenseSvd).value;
        let n2 = v2.operator_norm(NormMethod::DenseSvd).value;
        assert!((n2 - 2.5 * n1).abs() <= 1e-12 * n2.max(1.0));
    }

    #[test]
    fn continuity_probe_decays_and_is_lipschitz() {
        let g = grid(1.0, 16);
        let m = model(Family::GaussGauss {
            v0: C64::new(1.0, 0.0),
        });
        let dxs = [0.4, 0.2, 0.1, 0.05, 0.025, 0.0];
        let table = continuity_probe(&m, &g, 0.5, &dxs).unwrap();
        // dx = 0 gives exactly zero
        assert_eq!(table.last().unwrap().1, 0.0);
        // monotone decay along the shrinking sequence
        for w in table.windows(2) {
            assert!(w[1].1 <= w[0].1 + 1e-15);
        }
        // halving dx halves the difference norm within factor 1.2
        for w in table[..dxs.len() - 1].windows(2) {
            let ratio = w[0].1 / w[1].1;
            assert!(
                ratio >= 2.0 / 1.2 && ratio <= 2.0 * 1.2,
                "ratio {ratio} outside Lipschitz window"
            );
        }
        // Lemma-1 scaling: ‖Δv̂‖ ≤ (k/π) sup_p |Δṽ|
        for &(dx, norm) in &table {
            if dx == 0.0 {
                continue;
            }
            let mut sup = 0.0f64;
            let mut p = -2.0 * g.k;
            while p <= 2.0 * g.k {
                sup = sup.max((m.vtilde(0.5 + dx, p) - m.vtilde(0.5, p)).norm());
                p += 1e-3;
            }
            assert!(norm <= g.k / PI * sup * (1.0 + 1e-10), "dx={dx}");
        }
    }
}
