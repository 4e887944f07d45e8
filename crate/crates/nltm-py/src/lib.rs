//! Python bindings. Matrices cross the boundary as nested lists of
//! complex numbers; the arrays involved are small (2N x 2N).

use std::sync::Arc;

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use nltm::bounds::{certify_lemma2, certify_lemma5, certify_nilpotency};
use nltm::evolution::{evolve, EvolveOptions, Scheme};
use nltm::grid::{MomentumGrid, NormMethod, QuadRule};
use nltm::potential::{Family, PotentialModel};
use nltm::scatter::{
    assemble_transfer, refinement_observables, scatter_left, scatter_right, truncation_bounds,
    TransferMatrix,
};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_scheme(name: &str) -> PyResult<Scheme> {
    match name {
        "dyson" => Ok(Scheme::Dyson),
        "product" => Ok(Scheme::Product),
        "rk4" => Ok(Scheme::Rk4),
        other => Err(err(format!(
            "unknown scheme {other:?}; expected dyson, product, or rk4"
        ))),
    }
}

fn matrix_to_lists(m: &ndarray::Array2<C64>) -> Vec<Vec<C64>> {
    m.rows().into_iter().map(|r| r.to_vec()).collect()
}

/// Quadrature grid on the open momentum band `(-k, k)`.
#[pyclass(frozen, name = "Grid")]
struct PyGrid {
    inner: Arc<MomentumGrid>,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (k, n, rule = "gauss-legendre-theta"))]
    fn new(k: f64, n: usize, rule: &str) -> PyResult<Self> {
        let rule = match rule {
            "gauss-legendre-theta" => QuadRule::GaussLegendreTheta,
            "gauss-legendre-p" => QuadRule::GaussLegendreP,
            other => {
                return Err(err(format!(
                    "unknown rule {other:?}; expected gauss-legendre-theta or gauss-legendre-p"
                )))
            }
        };
        Ok(PyGrid {
            inner: MomentumGrid::build(k, n, rule).map_err(err)?,
        })
    }

    #[getter]
    fn k(&self) -> f64 {
        self.inner.k
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn nodes(&self) -> Vec<f64> {
        self.inner.p.clone()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights.clone()
    }

    #[getter]
    fn varpi(&self) -> Vec<f64> {
        self.inner.varpi.clone()
    }

    fn __repr__(&self) -> String {
        format!("Grid(k={}, n={})", self.inner.k, self.inner.n)
    }
}

/// Built-in nonlocal potential family at a fixed wavenumber.
#[pyclass(frozen, name = "Potential")]
struct PyPotential {
    inner: PotentialModel,
}

#[pymethods]
impl PyPotential {
    #[new]
    #[pyo3(signature = (family, k, v0, a = None, sigma = None))]
    fn new(family: &str, k: f64, v0: C64, a: Option<f64>, sigma: Option<f64>) -> PyResult<Self> {
        let fam = match family {
            "gauss-gauss" => Family::GaussGauss { v0 },
            "gauss-box" => Family::GaussBox {
                v0,
                a: a.ok_or_else(|| err("gauss-box requires the half-width a"))?,
            },
            "powerlaw-gauss" => Family::PowerlawGauss {
                v0,
                sigma: sigma.ok_or_else(|| err("powerlaw-gauss requires sigma"))?,
            },
            "one-sided" => Family::OneSided { v0 },
            other => Err(err(format!(
                "unknown family {other:?}; expected gauss-gauss, gauss-box, powerlaw-gauss, or one-sided"
            )))?,
        };
        Ok(PyPotential {
            inner: PotentialModel::builtin(fam, k).map_err(err)?,
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.inner.alpha
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }

    #[getter]
    fn sigma(&self) -> f64 {
        self.inner.sigma
    }

    /// Momentum-space kernel value `ṽ(x, p)`.
    fn vtilde(&self, x: f64, p: f64) -> C64 {
        self.inner.vtilde(x, p)
    }

    /// Decay envelope `2πβ(1+|x|)^{-σ}` for `|x| ≥ alpha`.
    fn envelope(&self, x: f64) -> f64 {
        self.inner.envelope(x)
    }

    fn __repr__(&self) -> String {
        format!("Potential({})", self.inner.name)
    }
}

/// Truncated transfer matrix `M = I + T` on the doubled grid space.
#[pyclass(frozen, name = "Transfer")]
struct PyTransfer {
    inner: TransferMatrix,
}

#[pymethods]
impl PyTransfer {
    #[getter]
    fn x_minus(&self) -> f64 {
        self.inner.x_minus
    }

    #[getter]
    fn x_plus(&self) -> f64 {
        self.inner.x_plus
    }

    #[getter]
    fn tail_estimate(&self) -> f64 {
        self.inner.tail_estimate
    }

    /// Weighted operator norm of `T = M - I`.
    fn t_norm(&self) -> f64 {
        self.inner.t.operator_norm(NormMethod::DenseSvd).value
    }

    /// `T` as a nested list, blocks ordered `[[11, 12], [21, 22]]`.
    fn t_matrix(&self) -> Vec<Vec<C64>> {
        matrix_to_lists(&self.inner.t.full)
    }

    /// Grid-independent moment observables of `T`, for refinement checks.
    fn observables(&self, degree: usize) -> Vec<Vec<C64>> {
        matrix_to_lists(&refinement_observables(&self.inner.t, degree))
    }

    /// Scattering amplitude for a plane wave at incidence angle `theta0`.
    /// Returns a dict with sample angles, amplitudes, and the
    /// differential cross section.
    #[pyo3(signature = (theta0, incidence = "left"))]
    fn scatter<'py>(&self, py: Python<'py>, theta0: f64, incidence: &str) -> PyResult<Py<PyAny>> {
        let r = match incidence {
            "left" => scatter_left(&self.inner, theta0).map_err(err)?,
            "right" => scatter_right(&self.inner, theta0).map_err(err)?,
            other => {
                return Err(err(format!(
                    "unknown incidence {other:?}; expected left or right"
                )))
            }
        };
        let d = pyo3::types::PyDict::new(py);
        d.set_item("theta0", r.theta0)?;
        d.set_item("snap_distance", r.snap_distance)?;
        d.set_item("theta", r.theta)?;
        d.set_item("f", r.f)?;
        d.set_item("dcs", r.dcs)?;
        d.set_item("residual", r.residual)?;
        Ok(d.into_any().unbind())
    }

    fn __repr__(&self) -> String {
        format!(
            "Transfer(x_minus={}, x_plus={}, tail={:.3e})",
            self.inner.x_minus, self.inner.x_plus, self.inner.tail_estimate
        )
    }
}

/// Assemble the transfer matrix over the envelope-truncated range for
/// accuracy target `eps`.
#[pyfunction]
#[pyo3(signature = (potential, grid, eps = 1e-6, scheme = "product", steps_per_unit = 256))]
fn transfer(
    potential: &PyPotential,
    grid: &PyGrid,
    eps: f64,
    scheme: &str,
    steps_per_unit: usize,
) -> PyResult<PyTransfer> {
    let opts = EvolveOptions {
        scheme: parse_scheme(scheme)?,
        steps_per_unit,
        ..Default::default()
    };
    Ok(PyTransfer {
        inner: assemble_transfer(&potential.inner, &grid.inner, eps, &opts).map_err(err)?,
    })
}

/// Truncation range and tail estimate for accuracy target `eps`.
#[pyfunction]
fn truncation(potential: &PyPotential, eps: f64) -> PyResult<(f64, f64, f64)> {
    let tb = truncation_bounds(&potential.inner, eps).map_err(err)?;
    Ok((tb.x_minus, tb.x_plus, tb.tail_estimate))
}

/// Interval evolution operator `U(x, x0) - I` as a nested list.
#[pyfunction]
#[pyo3(signature = (potential, grid, x0, x, scheme = "product", steps_per_unit = 256))]
fn evolve_t(
    potential: &PyPotential,
    grid: &PyGrid,
    x0: f64,
    x: f64,
    scheme: &str,
    steps_per_unit: usize,
) -> PyResult<Vec<Vec<C64>>> {
    let opts = EvolveOptions {
        scheme: parse_scheme(scheme)?,
        steps_per_unit,
        ..Default::default()
    };
    let ev = evolve(&potential.inner, &grid.inner, x0, x, &opts).map_err(err)?;
    Ok(matrix_to_lists(&ev.transfer_part.full))
}

/// Run a named inequality certificate; returns `(pass, margin)`.
#[pyfunction]
fn certify(
    name: &str,
    potential: &PyPotential,
    grid: &PyGrid,
    samples: Vec<Vec<f64>>,
) -> PyResult<(bool, f64)> {
    let cert = match name {
        "generator-nilpotency" => {
            let xs: Vec<f64> = samples.into_iter().flatten().collect();
            certify_nilpotency(&potential.inner, &grid.inner, &xs).map_err(err)?
        }
        "kernel-norm-envelope" => {
            let xs: Vec<f64> = samples.into_iter().flatten().collect();
            certify_lemma2(&potential.inner, &grid.inner, &xs).map_err(err)?
        }
        "hs-factor-product-bound" => {
            certify_lemma5(&potential.inner, &grid.inner, &samples).map_err(err)?
        }
        other => {
            return Err(err(format!(
                "unknown certificate {other:?}; expected generator-nilpotency, \
                 kernel-norm-envelope, or hs-factor-product-bound"
            )))
        }
    };
    Ok((cert.pass, cert.margin))
}

#[pymodule]
fn nltm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGrid>()?;
    m.add_class::<PyPotential>()?;
    m.add_class::<PyTransfer>()?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(truncation, m)?)?;
    m.add_function(wrap_pyfunction!(evolve_t, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    Ok(())
}
