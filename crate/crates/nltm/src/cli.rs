//! Configuration-driven pipelines: parse a TOML run description, execute
//! the transfer / scatter / verify commands, and emit deterministic CSV and
//! JSON reports.
//!
//! Determinism contract: identical config bytes + seed produce byte-equal
//! outputs regardless of thread count. Reports embed the config SHA-256
//! and the tool version, never timestamps or host details.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::sync::Arc;

use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::bounds::{
    certify_lemma2, certify_lemma5, certify_nilpotency, certify_theorem3, certify_theorem4,
    BoundCertificate,
};
use crate::error::{Error, Result};
use crate::evolution::{evolve_state_dyson, EvolveOptions, Scheme, StateVector};
use crate::grid::{MomentumGrid, NormMethod, QuadRule};
use crate::potential::{Family, PotentialModel};
use crate::scatter::{
    assemble_transfer, emit_cross_section, refinement_observables, scatter_left, scatter_right,
    truncation_bounds, Incidence, ScatteringResult, TransferMatrix,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub family: String,
    pub v0_re: f64,
    #[serde(default)]
    pub v0_im: f64,
    /// Half-width of the box profile (gauss-box only).
    pub a: Option<f64>,
    /// Decay exponent (powerlaw-gauss only).
    pub sigma: Option<f64>,
    /// Optional envelope overrides; defaults derive from the family.
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

impl PotentialConfig {
    pub fn model(&self, k: f64) -> Result<PotentialModel> {
        let v0 = C64::new(self.v0_re, self.v0_im);
        let family = match self.family.as_str() {
            "gauss-gauss" => Family::GaussGauss { v0 },
            "gauss-box" => {
                let a = self.a.ok_or_else(|| {
                    Error::Config("potential.a is required for family gauss-box".into())
                })?;
                Family::GaussBox { v0, a }
            }
            "powerlaw-gauss" => {
                let sigma = self.sigma.ok_or_else(|| {
                    Error::Config("potential.sigma is required for family powerlaw-gauss".into())
                })?;
                Family::PowerlawGauss { v0, sigma }
            }
            "one-sided" => Family::OneSided { v0 },
            other => {
                return Err(Error::Config(format!(
                    "potential.family: unknown family {other:?} (expected gauss-gauss, gauss-box, powerlaw-gauss, or one-sided)"
                )))
            }
        };
        let mut model = PotentialModel::builtin(family, k)?;
        if let Some(alpha) = self.alpha {
            if !(alpha > 0.0) {
                return Err(Error::Config("potential.alpha must be positive".into()));
            }
            model.alpha = alpha;
        }
        if let Some(beta) = self.beta {
            if !(beta >= 0.0) {
                return Err(Error::Config("potential.beta must be nonnegative".into()));
            }
            model.beta = beta;
        }
        Ok(model)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub k: f64,
    pub n: usize,
    #[serde(default = "default_rule")]
    pub rule: QuadRule,
}

fn default_rule() -> QuadRule {
    QuadRule::GaussLegendreTheta
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_order_cap")]
    pub order_cap: usize,
    #[serde(default = "default_steps_per_unit")]
    pub steps_per_unit: usize,
}

fn default_scheme() -> Scheme {
    Scheme::Product
}
fn default_tol() -> f64 {
    1e-9
}
fn default_order_cap() -> usize {
    40
}
fn default_steps_per_unit() -> usize {
    256
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            scheme: default_scheme(),
            tol: default_tol(),
            order_cap: default_order_cap(),
            steps_per_unit: default_steps_per_unit(),
        }
    }
}

impl EvolutionConfig {
    pub fn options(&self) -> Result<EvolveOptions> {
        if !(self.tol > 0.0) {
            return Err(Error::Config("evolution.tol must be positive".into()));
        }
        if self.order_cap == 0 || self.steps_per_unit == 0 {
            return Err(Error::Config(
                "evolution.order_cap and evolution.steps_per_unit must be positive".into(),
            ));
        }
        Ok(EvolveOptions {
            scheme: self.scheme,
            tol: self.tol,
            order_cap: self.order_cap,
            steps_per_unit: self.steps_per_unit,
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatterConfig {
    pub theta0: Vec<f64>,
    #[serde(default = "default_eps")]
    pub eps: f64,
}

fn default_eps() -> f64 {
    1e-6
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransferConfig {
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Also assemble at double resolution and report observable drift.
    #[serde(default)]
    pub refinement_check: bool,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig {
            eps: default_eps(),
            refinement_check: false,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    #[serde(default = "default_certificates")]
    pub certificates: Vec<String>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_tuples")]
    pub tuples: usize,
    #[serde(default = "default_states")]
    pub states: usize,
    /// Dyson range for the partial-sum certificate.
    #[serde(default = "default_range")]
    pub range: f64,
}

fn default_certificates() -> Vec<String> {
    vec![
        "kernel-norm-envelope".into(),
        "hs-factor-product-bound".into(),
        "dyson-partial-sum-bound".into(),
        "widening-range-bounds".into(),
        "generator-nilpotency".into(),
    ]
}
fn default_samples() -> usize {
    20
}
fn default_tuples() -> usize {
    50
}
fn default_states() -> usize {
    10
}
fn default_range() -> f64 {
    3.0
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            certificates: default_certificates(),
            samples: default_samples(),
            tuples: default_tuples(),
            states: default_states(),
            range: default_range(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub dir: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub potential: PotentialConfig,
    pub grid: GridConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub transfer: TransferConfig,
    pub scatter: Option<ScatterConfig>,
    #[serde(default)]
    pub verify: VerifyConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn build_grid(&self) -> Result<Arc<MomentumGrid>> {
        MomentumGrid::build(self.grid.k, self.grid.n, self.grid.rule)
    }

    pub fn build_model(&self) -> Result<PotentialModel> {
        self.potential.model(self.grid.k)
    }
}

/// Execution context resolved from CLI flags and environment.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub config: RunConfig,
    pub config_sha256: String,
    pub out_dir: PathBuf,
    pub seed: u64,
}

impl RunContext {
    /// `out` precedence: explicit flag, then `NLTM_OUT`, then the config's
    /// output.dir, then `./out`.
    pub fn new(config_text: &str, out_flag: Option<&str>, seed: u64) -> Result<Self> {
        let config = RunConfig::parse(config_text)?;
        let sha = hex::encode(Sha256::digest(config_text.as_bytes()));
        let out_dir = out_flag
            .map(PathBuf::from)
            .or_else(|| std::env::var("NLTM_OUT").ok().map(PathBuf::from))
            .or_else(|| config.output.dir.clone().map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("out"));
        Ok(RunContext {
            config,
            config_sha256: sha,
            out_dir,
            seed,
        })
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.out_dir)?;
        let path = self.out_dir.join(name);
        std::fs::write(&path, contents)?;
        Ok(path)
    }
}

#[derive(Debug, Serialize)]
struct ReportHeader<'a> {
    version: &'a str,
    config_sha256: &'a str,
    seed: u64,
}

#[derive(Debug, Serialize)]
struct TransferReport<'a> {
    #[serde(flatten)]
    header: ReportHeader<'a>,
    scheme: Scheme,
    x_minus: f64,
    x_plus: f64,
    tail_estimate: f64,
    gamma: f64,
    delta: f64,
    segments: Vec<(f64, f64)>,
    t_norm: f64,
    block_norms: [[f64; 2]; 2],
    refinement: Option<RefinementReport>,
}

#[derive(Debug, Serialize)]
struct RefinementReport {
    n_coarse: usize,
    n_fine: usize,
    observable_sup_change: f64,
}

fn block_norms(tm: &TransferMatrix) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    let sqrt_w = tm.grid.sqrt_weights();
    for r in 0..2 {
        for c in 0..2 {
            let b = tm.t.block(r, c).to_owned();
            out[r][c] =
                crate::grid::weighted_operator_norm(&b, &sqrt_w, NormMethod::DenseSvd).value;
        }
    }
    out
}

/// Assemble the transfer matrix and write `transfer.json`.
pub fn cmd_transfer(ctx: &RunContext) -> Result<PathBuf> {
    let model = ctx.config.build_model()?;
    let grid = ctx.config.build_grid()?;
    let opts = ctx.config.evolution.options()?;
    let eps = ctx.config.transfer.eps;
    if !(eps > 0.0) {
        return Err(Error::Config("transfer.eps must be positive".into()));
    }
    let tb = truncation_bounds(&model, eps)?;
    let tm = assemble_transfer(&model, &grid, eps, &opts)?;
    let refinement = if ctx.config.transfer.refinement_check {
        let fine_grid = MomentumGrid::build(grid.k, 2 * grid.n, grid.rule)?;
        let tm_fine = assemble_transfer(&model, &fine_grid, eps, &opts)?;
        let oa = refinement_observables(&tm.t, 3);
        let ob = refinement_observables(&tm_fine.t, 3);
        let sup = oa
            .iter()
            .zip(ob.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        Some(RefinementReport {
            n_coarse: grid.n,
            n_fine: fine_grid.n,
            observable_sup_change: sup,
        })
    } else {
        None
    };
    let report = TransferReport {
        header: ReportHeader {
            version: TOOL_VERSION,
            config_sha256: &ctx.config_sha256,
            seed: ctx.seed,
        },
        scheme: tm.scheme,
        x_minus: tm.x_minus,
        x_plus: tm.x_plus,
        tail_estimate: tm.tail_estimate,
        gamma: tb.gamma,
        delta: tb.delta,
        segments: tm.segments.clone(),
        t_norm: tm.t.operator_norm(NormMethod::DenseSvd).value,
        block_norms: block_norms(&tm),
        refinement,
    };
    ctx.write("transfer.json", &to_json(&report)?)
}

#[derive(Debug, Serialize)]
struct AmplitudeBundle {
    theta0_requested: f64,
    theta0: f64,
    incidence: Incidence,
    p0: f64,
    snap_distance: f64,
    m22_smin: f64,
    m22_norm: f64,
    residual: f64,
    theta: Vec<f64>,
    f_re: Vec<f64>,
    f_im: Vec<f64>,
    dcs: Vec<f64>,
    csv: String,
}

#[derive(Debug, Serialize)]
struct ScatterReport<'a> {
    #[serde(flatten)]
    header: ReportHeader<'a>,
    x_minus: f64,
    x_plus: f64,
    tail_estimate: f64,
    results: Vec<AmplitudeBundle>,
}

fn scatter_one(tm: &TransferMatrix, theta0: f64) -> Result<ScatteringResult> {
    if theta0 > -PI / 2.0 && theta0 < PI / 2.0 {
        scatter_left(tm, theta0)
    } else if theta0 > PI / 2.0 && theta0 < 3.0 * PI / 2.0 {
        scatter_right(tm, theta0)
    } else {
        Err(Error::InvalidArgument(format!(
            "scatter.theta0 must lie in (-pi/2, pi/2) or (pi/2, 3pi/2), got {theta0}"
        )))
    }
}

/// Compute amplitudes for every configured incidence angle; write one CSV
/// per angle plus `scatter.json`.
pub fn cmd_scatter(ctx: &RunContext) -> Result<PathBuf> {
    let sc = ctx
        .config
        .scatter
        .as_ref()
        .ok_or_else(|| Error::Config("scatter block is required for the scatter command".into()))?;
    if !(sc.eps > 0.0) {
        return Err(Error::Config("scatter.eps must be positive".into()));
    }
    if sc.theta0.is_empty() {
        return Err(Error::Config("scatter.theta0 must not be empty".into()));
    }
    let model = ctx.config.build_model()?;
    let grid = ctx.config.build_grid()?;
    let opts = ctx.config.evolution.options()?;
    let tm = assemble_transfer(&model, &grid, sc.eps, &opts)?;

    // independent angles in a work pool; result order follows the config
    let results: Vec<Result<ScatteringResult>> = {
        use rayon::prelude::*;
        sc.theta0
            .par_iter()
            .map(|&th| scatter_one(&tm, th))
            .collect()
    };
    let mut bundles = Vec::with_capacity(results.len());
    for (i, res) in results.into_iter().enumerate() {
        let r = res?;
        let csv = emit_cross_section(&r);
        ctx.write(&format!("cross_section_{i}.csv"), &csv)?;
        bundles.push(AmplitudeBundle {
            theta0_requested: r.theta0_requested,
            theta0: r.theta0,
            incidence: r.incidence,
            p0: r.p0,
            snap_distance: r.snap_distance,
            m22_smin: r.m22_smin,
            m22_norm: r.m22_norm,
            residual: r.residual,
            theta: r.theta.clone(),
            f_re: r.f.iter().map(|z| z.re).collect(),
            f_im: r.f.iter().map(|z| z.im).collect(),
            dcs: r.dcs.clone(),
            csv: format!("cross_section_{i}.csv"),
        });
    }
    let report = ScatterReport {
        header: ReportHeader {
            version: TOOL_VERSION,
            config_sha256: &ctx.config_sha256,
            seed: ctx.seed,
        },
        x_minus: tm.x_minus,
        x_plus: tm.x_plus,
        tail_estimate: tm.tail_estimate,
        results: bundles,
    };
    ctx.write("scatter.json", &to_json(&report)?)
}

#[derive(Debug, Serialize)]
struct VerifyReport<'a> {
    #[serde(flatten)]
    header: ReportHeader<'a>,
    all_pass: bool,
    certificates: Vec<BoundCertificate>,
}

fn random_state(grid: &Arc<MomentumGrid>, rng: &mut StdRng) -> StateVector {
    StateVector {
        grid: Arc::clone(grid),
        plus: ndarray::Array1::from_shape_fn(grid.n, |_| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }),
        minus: ndarray::Array1::from_shape_fn(grid.n, |_| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        }),
    }
}

fn run_certificate(ctx: &RunContext, which: &str) -> Result<Vec<BoundCertificate>> {
    let model = ctx.config.build_model()?;
    let grid = ctx.config.build_grid()?;
    let vc = &ctx.config.verify;
    // per-certificate derived seeds keep sampling independent of both the
    // certificate list order and the thread count
    let sub_seed = |tag: u64| ctx.seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(tag);
    match which {
        "kernel-norm-envelope" => {
            let hi: f64 = 1000.0;
            let m = vc.samples.max(2);
            let xs: Vec<f64> = (0..m)
                .map(|i| model.alpha * (hi / model.alpha).powf(i as f64 / (m - 1) as f64))
                .collect();
            Ok(vec![certify_lemma2(&model, &grid, &xs)?])
        }
        "hs-factor-product-bound" => {
            let mut rng = StdRng::seed_from_u64(sub_seed(1));
            let mut tuples = Vec::with_capacity(vc.tuples);
            for _ in 0..vc.tuples {
                let n = rng.gen_range(1..=3usize);
                let mut xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
                xs.sort_by(f64::total_cmp);
                tuples.push(xs);
            }
            Ok(vec![certify_lemma5(&model, &grid, &tuples)?])
        }
        "dyson-partial-sum-bound" => {
            let mut rng = StdRng::seed_from_u64(sub_seed(2));
            let opts = EvolveOptions {
                scheme: Scheme::Dyson,
                tol: ctx.config.evolution.tol,
                order_cap: ctx.config.evolution.order_cap,
                steps_per_unit: ctx.config.evolution.steps_per_unit.min(128),
            };
            let r = vc.range;
            let mut certs = Vec::with_capacity(vc.states);
            for i in 0..vc.states {
                let phi0 = random_state(&grid, &mut rng);
                let ev = evolve_state_dyson(&model, &grid, -r, r, &phi0, &opts)?;
                let mut cert = certify_theorem3(&ev);
                cert.name = format!("{}[{i}]", cert.name);
                certs.push(cert);
            }
            Ok(certs)
        }
        "widening-range-bounds" => {
            let mut rng = StdRng::seed_from_u64(sub_seed(3));
            let phi0 = random_state(&grid, &mut rng);
            Ok(vec![certify_theorem4(&model, &grid, &phi0, 4)?])
        }
        "generator-nilpotency" => {
            let m = vc.samples.max(2);
            let xs: Vec<f64> = (0..m)
                .map(|i| -5.0 + 10.0 * i as f64 / (m - 1) as f64)
                .collect();
            Ok(vec![certify_nilpotency(&model, &grid, &xs)?])
        }
        other => Err(Error::Config(format!(
            "verify.certificates: unknown certificate {other:?}"
        ))),
    }
}

/// Run the selected certificates and write `verify.json`. Returns the
/// report path and whether every certificate passed.
pub fn cmd_verify(ctx: &RunContext) -> Result<(PathBuf, bool)> {
    let names = ctx.config.verify.certificates.clone();
    let results: Vec<Result<Vec<BoundCertificate>>> = {
        use rayon::prelude::*;
        names.par_iter().map(|n| run_certificate(ctx, n)).collect()
    };
    let mut certificates = Vec::new();
    for res in results {
        certificates.extend(res?);
    }
    let all_pass = certificates.iter().all(|c| c.pass);
    let report = VerifyReport {
        header: ReportHeader {
            version: TOOL_VERSION,
            config_sha256: &ctx.config_sha256,
            seed: ctx.seed,
        },
        all_pass,
        certificates,
    };
    let path = ctx.write("verify.json", &to_json(&report)?)?;
    Ok((path, all_pass))
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)
        .map_err(|e| Error::Config(format!("report serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[potential]
family = "gauss-gauss"
v0_re = 1.0

[grid]
k = 1.0
n = 8
"#;

    #[test]
    fn parse_minimal_config() {
        let cfg = RunConfig::parse(BASE).unwrap();
        assert_eq!(cfg.grid.n, 8);
        assert_eq!(cfg.evolution.steps_per_unit, 256);
        let model = cfg.build_model().unwrap();
        assert_eq!(model.name, "gauss-gauss");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{BASE}\n[grid2]\nk = 1.0\n");
        assert!(RunConfig::parse(&text).is_err());
        let text = BASE.replace("v0_re = 1.0", "v0_re = 1.0\nbogus = 2");
        assert!(RunConfig::parse(&text).is_err());
    }

    #[test]
    fn missing_family_parameter_named_in_error() {
        let text = BASE.replace("gauss-gauss", "powerlaw-gauss");
        let cfg = RunConfig::parse(&text).unwrap();
        match cfg.build_model() {
            Err(Error::Config(msg)) => assert!(msg.contains("potential.sigma"), "{msg}"),
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn transfer_report_zero_potential() {
        let text = BASE.replace("v0_re = 1.0", "v0_re = 0.0");
        let dir = tempfile::tempdir().unwrap();
        let ctx = RunContext::new(&text, Some(dir.path().to_str().unwrap()), 1).unwrap();
        let path = cmd_transfer(&ctx).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert!(report["t_norm"].as_f64().unwrap() <= 1e-12);
        assert_eq!(report["version"].as_str().unwrap(), TOOL_VERSION);
        assert_eq!(report["config_sha256"].as_str().unwrap().len(), 64);
    }

    #[test]
    fn scatter_report_zero_potential() {
        let text = format!(
            "{}\n[scatter]\ntheta0 = [0.3, 3.1]\neps = 1e-4\n",
            BASE.replace("v0_re = 1.0", "v0_re = 0.0")
        );
        let dir = tempfile::tempdir().unwrap();
        let ctx = RunContext::new(&text, Some(dir.path().to_str().unwrap()), 1).unwrap();
        let path = cmd_scatter(&ctx).unwrap();
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        let results = report["results"].as_array().unwrap();
        assert_eq!(results.len(), 2);
        for r in results {
            assert!(r["dcs"]
                .as_array()
                .unwrap()
                .iter()
                .all(|v| v.as_f64().unwrap() == 0.0));
            assert!(r["snap_distance"].as_f64().unwrap() >= 0.0);
        }
        let csv = std::fs::read_to_string(dir.path().join("cross_section_0.csv")).unwrap();
        assert!(csv.starts_with("theta,re_f,im_f,dcs\n"));
    }

    #[test]
    fn verify_runs_and_empty_list_is_vacuous() {
        let text = format!(
            "{BASE}\n[verify]\ncertificates = [\"generator-nilpotency\"]\nsamples = 5\n"
        );
        let dir = tempfile::tempdir().unwrap();
        let ctx = RunContext::new(&text, Some(dir.path().to_str().unwrap()), 7).unwrap();
        let (_, pass) = cmd_verify(&ctx).unwrap();
        assert!(pass);

        let text = format!("{BASE}\n[verify]\ncertificates = []\n");
        let ctx = RunContext::new(&text, Some(dir.path().to_str().unwrap()), 7).unwrap();
        let (path, pass) = cmd_verify(&ctx).unwrap();
        assert!(pass);
        let report: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
        assert_eq!(report["certificates"].as_array().unwrap().len(), 0);
    }

    #[test]
    fn out_dir_precedence() {
        let ctx = RunContext::new(BASE, Some("/tmp/explicit"), 0).unwrap();
        assert_eq!(ctx.out_dir, PathBuf::from("/tmp/explicit"));
        let text = format!("{BASE}\n[output]\ndir = \"cfg-dir\"\n");
        let ctx = RunContext::new(&text, None, 0).unwrap();
        assert_eq!(ctx.out_dir, PathBuf::from("cfg-dir"));
    }
}
