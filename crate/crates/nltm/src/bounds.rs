//! Machine-checked certificates for the inequality structure of the model:
//! the envelope decay of `‖v̂_k(x)‖₀`, the Hilbert-Schmidt product bounds,
//! the Dyson partial-sum bound, the widening-range bounds behind the
//! transfer-matrix limit, and nilpotency of the generator.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::{decompose_domain, zeta_norm_at, StateEvolution, StateVector};
use crate::grid::{MomentumGrid, NormMethod};
use crate::potential::{assemble_vhat, PotentialModel};

/// Piecewise-linear cache of `x ↦ ‖v̂_k(x)‖₀` on a uniform mesh, refined by
/// doubling until the integral of the profile is stable to 1e-6 relative.
#[derive(Debug, Clone)]
pub struct VnormProfile {
    pub x0: f64,
    pub x1: f64,
    pub xs: Vec<f64>,
    pub vals: Vec<f64>,
}

const PROFILE_REL_TOL: f64 = 1e-6;
const PROFILE_MIN_SAMPLES: usize = 64;
const PROFILE_MAX_SAMPLES: usize = 16384;

impl VnormProfile {
    /// Requires `x0 <= x1`; a degenerate interval yields a two-sample
    /// profile with zero measure.
    pub fn build(model: &PotentialModel, grid: &Arc<MomentumGrid>, x0: f64, x1: f64) -> Result<Self> {
        if x1 < x0 {
            return Err(Error::InvalidArgument(
                "profile interval must satisfy x0 <= x1".into(),
            ));
        }
        let norm_at = |x: f64| -> Result<f64> {
            Ok(assemble_vhat(model, grid, x)?
                .operator_norm(NormMethod::DenseSvd)
                .value)
        };
        if x1 == x0 {
            let v = norm_at(x0)?;
            return Ok(VnormProfile {
                x0,
                x1,
                xs: vec![x0, x1],
                vals: vec![v, v],
            });
        }
        let mut m = PROFILE_MIN_SAMPLES;
        let sample = |m: usize| -> Result<(Vec<f64>, Vec<f64>)> {
            let h = (x1 - x0) / m as f64;
            let xs: Vec<f64> = (0..=m).map(|i| x0 + i as f64 * h).collect();
            let vals = xs.iter().map(|&x| norm_at(x)).collect::<Result<Vec<_>>>()?;
            Ok((xs, vals))
        };
        let (mut xs, mut vals) = sample(m)?;
        let trapz = |xs: &[f64], vals: &[f64]| -> f64 {
            xs.windows(2)
                .zip(vals.windows(2))
                .map(|(xw, vw)| 0.5 * (xw[1] - xw[0]) * (vw[0] + vw[1]))
                .sum()
        };
        let mut integral = trapz(&xs, &vals);
        while m < PROFILE_MAX_SAMPLES {
            m *= 2;
            let (xs2, vals2) = sample(m)?;
            let integral2 = trapz(&xs2, &vals2);
            let done = (integral2 - integral).abs() <= PROFILE_REL_TOL * integral2.abs().max(1e-300);
            xs = xs2;
            vals = vals2;
            integral = integral2;
            if done {
                break;
            }
        }
        Ok(VnormProfile { x0, x1, xs, vals })
    }

    /// Piecewise-linear interpolant, clamped at the endpoints.
    pub fn value(&self, x: f64) -> f64 {
        if x <= self.x0 {
            return self.vals[0];
        }
        if x >= self.x1 {
            return *self.vals.last().unwrap();
        }
        let m = self.xs.len() - 1;
        let t = (x - self.x0) / (self.x1 - self.x0) * m as f64;
        let i = (t.floor() as usize).min(m - 1);
        let frac = t - i as f64;
        self.vals[i] * (1.0 - frac) + self.vals[i + 1] * frac
    }

    /// `∫ w(x') ‖v̂_k(x')‖₀ dx'` over `[x0, x1]` by the trapezoid rule on
    /// the cached mesh.
    pub fn integral_weighted(&self, w: impl Fn(f64) -> f64) -> f64 {
        self.xs
            .windows(2)
            .zip(self.vals.windows(2))
            .map(|(xw, vw)| 0.5 * (xw[1] - xw[0]) * (w(xw[0]) * vw[0] + w(xw[1]) * vw[1]))
            .sum()
    }
}

/// Signed weighted integral `∫_{u0}^{u} w(x') ‖v̂‖₀ dx'` (negative when
/// `u < u0`).
fn oriented_integral(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    u0: f64,
    u: f64,
    w: impl Fn(f64) -> f64,
) -> Result<f64> {
    let (lo, hi, sign) = if u >= u0 { (u0, u, 1.0) } else { (u, u0, -1.0) };
    let profile = VnormProfile::build(model, grid, lo, hi)?;
    Ok(sign * profile.integral_weighted(w))
}

/// `F₊(u, u₀) = ∫_{u₀}^{u} ‖v̂‖₀ 𝔷(x') dx'` for the state behind `z`.
pub fn f_plus(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    u0: f64,
    u: f64,
    z: impl Fn(f64) -> f64,
) -> Result<f64> {
    oriented_integral(model, grid, u0, u, z)
}

/// `G(u, u₀) = ∫_{u₀}^{u} |x' - u₀| ‖v̂‖₀ dx'`.
pub fn g_cap(model: &PotentialModel, grid: &Arc<MomentumGrid>, u0: f64, u: f64) -> Result<f64> {
    oriented_integral(model, grid, u0, u, |x| (x - u0).abs())
}

/// `F₋(u, u₀) = ∫_{u₀}^{u} |u - x'| ‖v̂‖₀ 𝔷(x') dx'`.
pub fn f_minus(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    u0: f64,
    u: f64,
    z: impl Fn(f64) -> f64,
) -> Result<f64> {
    oriented_integral(model, grid, u0, u, |x| (u - x).abs() * z(x))
}

/// `f_ℓ(u, u₀) = ∫_{u₀}^{u} |x'|^ℓ ‖v̂‖₀ dx'`, ℓ ∈ {0, 1}.
pub fn f_ell(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    u0: f64,
    u: f64,
    ell: u32,
) -> Result<f64> {
    if ell > 1 {
        return Err(Error::InvalidArgument("f_ell defined for ell in {0, 1}".into()));
    }
    oriented_integral(model, grid, u0, u, |x| x.abs().powi(ell as i32))
}

/// One inequality instance inside a certificate.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundSample {
    pub input: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// A machine-checked inequality family: `pass` iff every sample satisfies
/// `lhs <= rhs + 1e-10·max(1, rhs)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundCertificate {
    pub name: String,
    pub samples: Vec<BoundSample>,
    pub margin: f64,
    pub pass: bool,
    pub provenance: String,
}

pub const CERT_SLACK: f64 = 1e-10;

impl BoundCertificate {
    pub fn from_samples(name: &str, provenance: &str, samples: Vec<BoundSample>) -> Self {
        let mut margin = f64::INFINITY;
        let mut pass = true;
        for s in &samples {
            margin = margin.min(s.rhs - s.lhs);
            if s.lhs > s.rhs + CERT_SLACK * s.rhs.abs().max(1.0) {
                pass = false;
            }
        }
        BoundCertificate {
            name: name.to_string(),
            samples,
            margin,
            pass,
            provenance: provenance.to_string(),
        }
    }
}

/// Envelope decay of the kernel norm: `‖v̂_k(x)‖₀ ≤ 2πβ/(1+|x|)^σ` at the
/// given samples, which must satisfy `|x| ≥ α`.
pub fn certify_lemma2(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    x_samples: &[f64],
) -> Result<BoundCertificate> {
    let mut samples = Vec::with_capacity(x_samples.len());
    for &x in x_samples {
        if x.abs() < model.alpha {
            return Err(Error::InvalidArgument(format!(
                "envelope certificate needs |x| >= alpha = {}, got x = {x}",
                model.alpha
            )));
        }
        let lhs = assemble_vhat(model, grid, x)?
            .operator_norm(NormMethod::DenseSvd)
            .value;
        let rhs = model.envelope(x);
        samples.push(BoundSample {
            input: format!("x={x}"),
            lhs,
            rhs,
        });
    }
    Ok(BoundCertificate::from_samples(
        "kernel-norm-envelope",
        "operator norm of the discretized kernel vs the declared power-law envelope",
        samples,
    ))
}

/// Product bounds for the Hilbert-Schmidt factor:
/// `‖ℬ(x_n,…,x₁)‖₀ ≤ ‖v̂(x_n)‖₀ Π_{m<n} |x_{m+1}-x_m| ‖v̂(x_m)‖₀`.
pub fn certify_lemma5(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    tuples: &[Vec<f64>],
) -> Result<BoundCertificate> {
    let mut samples = Vec::with_capacity(tuples.len());
    for xs in tuples {
        let b = crate::evolution::assemble_b(model, grid, xs)?;
        let lhs = b.operator_norm(NormMethod::DenseSvd).value;
        let mut rhs = assemble_vhat(model, grid, *xs.last().unwrap())?
            .operator_norm(NormMethod::DenseSvd)
            .value;
        for m in 0..xs.len() - 1 {
            let vn = assemble_vhat(model, grid, xs[m])?
                .operator_norm(NormMethod::DenseSvd)
                .value;
            rhs *= (xs[m + 1] - xs[m]) * vn;
        }
        samples.push(BoundSample {
            input: format!("xs={xs:?}"),
            lhs,
            rhs,
        });
    }
    Ok(BoundCertificate::from_samples(
        "hs-factor-product-bound",
        "dense-SVD norm of the ordered Hilbert-Schmidt factor vs kernel-norm products with gap factors",
        samples,
    ))
}

/// Dyson partial-sum bound `Σ_{n≤N} ‖Φ_n‖ ≤ ‖Φ₀‖ + F₊(e^G - 1)` at every
/// recorded truncation order.
pub fn certify_theorem3(ev: &StateEvolution) -> BoundCertificate {
    let rhs = ev.phi0_norm + ev.f_plus * (ev.g_cap.exp() - 1.0);
    let mut samples = Vec::with_capacity(ev.term_norms.len() + 1);
    samples.push(BoundSample {
        input: "N=0".into(),
        lhs: ev.phi0_norm,
        rhs,
    });
    let mut partial = ev.phi0_norm;
    for (n, &t) in ev.term_norms.iter().enumerate() {
        partial += t;
        samples.push(BoundSample {
            input: format!("N={}", n + 1),
            lhs: partial,
            rhs,
        });
    }
    BoundCertificate::from_samples(
        "dyson-partial-sum-bound",
        "partial sums of per-order Dyson term norms vs the exponential integral bound",
        samples,
    )
}

/// Widening-range bounds behind the infinite-volume limit: with
/// `x₊ = α·2^m` (and the mirrored `x₋`),
/// `F₊(x₊,α) ≤ γ`, `G(x₊,α) ≤ δ`,
/// `F₋(-α,x₋) ≤ 2πβ(𝔞+𝔟α)/((σ-3)α^{σ-2})`,
/// `-G(x₋,-α) ≤ 2πβ/((σ-2)α^{σ-2})`.
///
/// The state entering `𝔷` is supplied by the caller; its `(𝔞, 𝔟)`
/// constants feed the closed forms.
pub fn certify_theorem4(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    phi0: &StateVector,
    doublings: usize,
) -> Result<BoundCertificate> {
    model.require_transfer_ready()?;
    let split = decompose_domain(phi0, 0.0);
    let a_const = split.zeta0.norm();
    let b_const = 2.0 * split.xi0.norm();
    let zeta0 = split.zeta0.values.clone();
    let xi0 = split.xi0.values.clone();
    let gref = Arc::clone(grid);
    let z = move |x: f64| zeta_norm_at(&gref, &zeta0, &xi0, x);

    let alpha = model.alpha;
    let beta = model.beta;
    let sigma = model.sigma;
    let two_pi = 2.0 * std::f64::consts::PI;
    let gamma = two_pi * beta * (a_const + b_const * alpha)
        / ((sigma - 2.0) * alpha.powf(sigma - 1.0));
    let delta = two_pi * beta / ((sigma - 2.0) * alpha.powf(sigma - 2.0));
    let fm_bound = two_pi * beta * (a_const + b_const * alpha)
        / ((sigma - 3.0) * alpha.powf(sigma - 2.0));
    let gm_bound = delta;

    let mut samples = Vec::new();
    let mut prev_fp = 0.0;
    for m in 0..=doublings {
        let xp = alpha * (1u64 << m) as f64;
        let fp = f_plus(model, grid, alpha, xp, &z)?;
        let g = g_cap(model, grid, alpha, xp)?;
        samples.push(BoundSample {
            input: format!("F_plus(x_plus={xp}, alpha)"),
            lhs: fp,
            rhs: gamma,
        });
        samples.push(BoundSample {
            input: format!("G(x_plus={xp}, alpha)"),
            lhs: g,
            rhs: delta,
        });
        // monotonicity of F₊ in x₊ (nonnegative integrand)
        samples.push(BoundSample {
            input: format!("F_plus monotone at x_plus={xp}"),
            lhs: prev_fp,
            rhs: fp,
        });
        prev_fp = fp;

        let xm = -xp;
        let fm = f_minus(model, grid, xm, -alpha, &z)?;
        let gm = -g_cap(model, grid, -alpha, xm)?;
        samples.push(BoundSample {
            input: format!("F_minus(-alpha, x_minus={xm})"),
            lhs: fm,
            rhs: fm_bound,
        });
        samples.push(BoundSample {
            input: format!("-G(x_minus={xm}, -alpha)"),
            lhs: gm,
            rhs: gm_bound,
        });
    }
    Ok(BoundCertificate::from_samples(
        "widening-range-bounds",
        "F/G integrals over doubling ranges vs the closed-form envelope tails",
        samples,
    ))
}

/// `‖Ĥ(x)²‖₀ ≤ 1e-12·‖Ĥ(x)‖₀²` at the given samples.
pub fn certify_nilpotency(
    model: &PotentialModel,
    grid: &Arc<MomentumGrid>,
    x_samples: &[f64],
) -> Result<BoundCertificate> {
    let mut samples = Vec::with_capacity(x_samples.len());
    for &x in x_samples {
        let h = crate::evolution::assemble_h(model, grid, x)?;
        let n1 = h.operator_norm(NormMethod::DenseSvd).value;
        let n2 = h.compose(&h).operator_norm(NormMethod::DenseSvd).value;
        samples.push(BoundSample {
            input: format!("x={x}"),
            lhs: n2,
            rhs: 1e-12 * n1 * n1,
        });
    }
    Ok(BoundCertificate::from_samples(
        "generator-nilpotency",
        "norm of the squared generator vs 1e-12 times the squared generator norm",
        samples,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadRule;
    use crate::potential::Family;
    use num_complex::Complex64 as C64;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn grid(k: f64, n: usize) -> Arc<MomentumGrid> {
        MomentumGrid::build(k, n, QuadRule::GaussLegendreTheta).unwrap()
    }

    fn gauss(v0: f64) -> PotentialModel {
        PotentialModel::builtin(
            Family::GaussGauss {
                v0: C64::new(v0, 0.0),
            },
            1.0,
        )
        .unwrap()
    }

    fn powerlaw(v0: f64, sigma: f64) -> PotentialModel {
        PotentialModel::builtin(
            Family::PowerlawGauss {
                v0: C64::new(v0, 0.0),
                sigma,
            },
            1.0,
        )
        .unwrap()
    }

    #[test]
    fn profile_matches_pointwise_norms() {
        let g = grid(1.0, 12);
        let m = gauss(1.0);
        let profile = VnormProfile::build(&m, &g, -2.0, 2.0).unwrap();
        for &x in &[-1.7, -0.3, 0.0, 1.1] {
            let exact = assemble_vhat(&m, &g, x)
                .unwrap()
                .operator_norm(NormMethod::DenseSvd)
                .value;
            let interp = profile.value(x);
            assert!((exact - interp).abs() <= 1e-4 * exact.max(1e-12), "x={x}");
        }
    }

    #[test]
    fn degenerate_profile_interval() {
        let g = grid(1.0, 8);
        let m = gauss(1.0);
        let profile = VnormProfile::build(&m, &g, 0.5, 0.5).unwrap();
        assert_eq!(profile.integral_weighted(|_| 1.0), 0.0);
        assert!(VnormProfile::build(&m, &g, 1.0, 0.0).is_err());
    }

    #[test]
    fn g_identity_consistency() {
        // ∫_{x0}^{x} (x - x') ‖v̂‖ dx' = -G(x0; from x), both sides on the
        // same cached mesh
        let g = grid(1.0, 12);
        let m = gauss(1.0);
        let (x0, x) = (-1.5, 2.5);
        let lhs = oriented_integral(&m, &g, x0, x, |xp| x - xp).unwrap();
        let rhs = -g_cap(&m, &g, x, x0).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
    }

    #[test]
    fn signed_orientation() {
        let g = grid(1.0, 12);
        let m = gauss(1.0);
        let fwd = f_ell(&m, &g, -1.0, 2.0, 0).unwrap();
        let bwd = f_ell(&m, &g, 2.0, -1.0, 0).unwrap();
        assert!(fwd > 0.0);
        assert!((fwd + bwd).abs() <= 1e-12 * fwd);
        assert!(f_ell(&m, &g, 0.0, 1.0, 2).is_err());
    }

    #[test]
    fn lemma2_certificate_passes_and_probe_fails() {
        let g = grid(1.0, 16);
        let m = powerlaw(1.0, 4.0);
        // 20 log-spaced samples in [alpha, 1000]
        let xs: Vec<f64> = (0..20)
            .map(|i| m.alpha * (1000.0 / m.alpha).powf(i as f64 / 19.0))
            .collect();
        let cert = certify_lemma2(&m, &g, &xs).unwrap();
        assert!(cert.pass, "margin {}", cert.margin);
        // understated envelope must be caught; a larger k widens the
        // momentum window and tightens the envelope slack
        let mut weak = PotentialModel::builtin(
            Family::PowerlawGauss {
                v0: C64::new(1.0, 0.0),
                sigma: 4.0,
            },
            2.0,
        )
        .unwrap();
        weak.beta /= 10.0;
        let g2 = grid(2.0, 16);
        let cert = certify_lemma2(&weak, &g2, &xs).unwrap();
        assert!(!cert.pass);
        assert!(cert.margin < 0.0);
        // interior sample rejected
        assert!(certify_lemma2(&m, &g, &[0.5 * m.alpha]).is_err());
    }

    #[test]
    fn lemma2_zero_potential_trivial() {
        let g = grid(1.0, 8);
        let m = gauss(0.0);
        let cert = certify_lemma2(&m, &g, &[1.0, 10.0]).unwrap();
        assert!(cert.pass);
        assert!(cert.samples.iter().all(|s| s.lhs == 0.0));
    }

    #[test]
    fn lemma5_certificate_random_tuples() {
        let g = grid(1.0, 12);
        let m = gauss(1.0);
        let mut rng = StdRng::seed_from_u64(20240818);
        let mut tuples = Vec::new();
        for _ in 0..50 {
            let n = rng.gen_range(1..=3usize);
            let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
            xs.sort_by(f64::total_cmp);
            tuples.push(xs);
        }
        let cert = certify_lemma5(&m, &g, &tuples).unwrap();
        assert!(cert.pass, "margin {}", cert.margin);
        // coincident pair: both sides vanish
        let cert = certify_lemma5(&m, &g, &[vec![0.7, 0.7]]).unwrap();
        assert!(cert.pass);
        assert!(cert.samples[0].lhs <= 1e-300 && cert.samples[0].rhs == 0.0);
        // v = 0 trivial
        let cert = certify_lemma5(&gauss(0.0), &g, &[vec![0.3]]).unwrap();
        assert!(cert.pass);
    }

    #[test]
    fn theorem3_certificate_and_falsification() {
        let g = grid(1.0, 8);
        let m = gauss(1.0);
        let mut rng = StdRng::seed_from_u64(7);
        let opts = crate::evolution::EvolveOptions {
            scheme: crate::evolution::Scheme::Dyson,
            tol: 1e-10,
            steps_per_unit: 128,
            ..Default::default()
        };
        for _ in 0..3 {
            let phi0 = StateVector {
                grid: Arc::clone(&g),
                plus: ndarray::Array1::from_shape_fn(g.n, |_| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }),
                minus: ndarray::Array1::from_shape_fn(g.n, |_| {
                    C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                }),
            };
            let ev =
                crate::evolution::evolve_state_dyson(&m, &g, -3.0, 3.0, &phi0, &opts).unwrap();
            let cert = certify_theorem3(&ev);
            assert!(cert.pass, "margin {}", cert.margin);
        }
        // halving F₊ must break the bound for a weak potential with a pure
        // back-moving state: there e^G - 1 sits between the partial-sum
        // ratio and twice it, so the full bound passes and the halved fails
        let weak = gauss(0.2);
        let zeta0 =
            crate::grid::GridFunction::from_fn(&g, |p| C64::new((-(p * p)).exp(), 0.0));
        let phi0 = StateVector {
            grid: Arc::clone(&g),
            plus: ndarray::Array1::zeros(g.n),
            minus: zeta0.apply_varpi(1).unwrap().values,
        };
        let mut ev =
            crate::evolution::evolve_state_dyson(&weak, &g, -3.0, 3.0, &phi0, &opts).unwrap();
        assert!(certify_theorem3(&ev).pass);
        ev.f_plus /= 2.0;
        let cert = certify_theorem3(&ev);
        assert!(!cert.pass, "halved F_plus should fail, margin {}", cert.margin);
    }

    #[test]
    fn theorem3_zero_potential_trivial() {
        let g = grid(1.0, 8);
        let m = gauss(0.0);
        let phi0 = StateVector {
            grid: Arc::clone(&g),
            plus: ndarray::Array1::from_elem(g.n, C64::new(1.0, 0.0)),
            minus: ndarray::Array1::zeros(g.n),
        };
        let opts = crate::evolution::EvolveOptions {
            scheme: crate::evolution::Scheme::Dyson,
            steps_per_unit: 16,
            ..Default::default()
        };
        let ev = crate::evolution::evolve_state_dyson(&m, &g, -2.0, 2.0, &phi0, &opts).unwrap();
        let cert = certify_theorem3(&ev);
        assert!(cert.pass);
        assert_eq!(cert.samples[0].lhs, cert.samples[0].rhs);
    }

    #[test]
    fn theorem4_certificate() {
        let g = grid(1.0, 10);
        let m = powerlaw(1.0, 4.0);
        let mut rng = StdRng::seed_from_u64(99);
        let phi0 = StateVector {
            grid: Arc::clone(&g),
            plus: ndarray::Array1::from_shape_fn(g.n, |_| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }),
            minus: ndarray::Array1::from_shape_fn(g.n, |_| {
                C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
            }),
        };
        let cert = certify_theorem4(&m, &g, &phi0, 4).unwrap();
        assert!(cert.pass, "margin {}", cert.margin);
        // sigma <= 3 rejected
        let narrow = powerlaw(1.0, 2.5);
        assert!(certify_theorem4(&narrow, &g, &phi0, 2).is_err());
        // v = 0 trivial
        let cert = certify_theorem4(&gauss(0.0), &g, &phi0, 2).unwrap();
        assert!(cert.pass);
    }

    #[test]
    fn nilpotency_certificate() {
        let g = grid(1.0, 12);
        for m in [
            gauss(1.0),
            PotentialModel::builtin(
                Family::GaussGauss {
                    v0: C64::new(0.3, -0.9),
                },
                1.0,
            )
            .unwrap(),
            gauss(0.0),
        ] {
            let xs: Vec<f64> = (0..20).map(|i| -4.0 + 8.0 * i as f64 / 19.0).collect();
            let cert = certify_nilpotency(&m, &g, &xs).unwrap();
            assert!(cert.pass, "{}: margin {}", m.name, cert.margin);
        }
    }

    #[test]
    fn certificate_serialization_roundtrip() {
        let cert = BoundCertificate::from_samples(
            "demo",
            "test",
            vec![BoundSample {
                input: "x=1".into(),
                lhs: 0.5,
                rhs: 1.0,
            }],
        );
        let json = serde_json::to_string(&cert).unwrap();
        let back: BoundCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back.name, "demo");
        assert!(back.pass);
        assert_eq!(back.margin, 0.5);
    }

    #[test]
    fn empty_certificate_is_vacuous_pass() {
        let cert = BoundCertificate::from_samples("empty", "test", Vec::new());
        assert!(cert.pass);
        assert!(cert.margin.is_infinite());
    }
}
