//! Python bindings: operators, measures, dominating functions, and the
//! scenario runner, as a thin veneer over the ktlab crate.

use ktlab::dominating::{self, FrequencyGrid, SampledMonotoneFunction, TimeGrid};
use ktlab::linalg::CMatrix;
use ktlab::measures::{parse_measure, BoundedMeasure};
use ktlab::operators::{DiagonalOperator, MatrixOperator, OperatorModel};
use ktlab::runner::{self, RunOptions};
use ktlab::C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: ktlab::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A semigroup generator: either a normal diagonal eigenvalue family or a
/// dense complex matrix.
#[pyclass]
#[derive(Clone)]
struct Operator {
    inner: OperatorModel,
}

#[pymethods]
impl Operator {
    /// Diagonal generator from an explicit eigenvalue list.
    #[staticmethod]
    #[pyo3(signature = (eigenvalues, label = "diagonal"))]
    fn diagonal(eigenvalues: Vec<C64>, label: &str) -> PyResult<Self> {
        Ok(Self {
            inner: OperatorModel::Diagonal(DiagonalOperator::new(eigenvalues, label).map_err(err)?),
        })
    }

    /// Polynomial profile -k^{-alpha} + i/k, k = 1..n.
    #[staticmethod]
    #[pyo3(signature = (alpha, n, adjoin_zero = false))]
    fn polynomial(alpha: f64, n: usize, adjoin_zero: bool) -> PyResult<Self> {
        Ok(Self {
            inner: OperatorModel::Diagonal(
                DiagonalOperator::polynomial_profile(alpha, n, adjoin_zero).map_err(err)?,
            ),
        })
    }

    /// Exponential profile -e^{-k} + i/k, k = 1..n (n <= 32).
    #[staticmethod]
    fn exponential(n: usize) -> PyResult<Self> {
        Ok(Self {
            inner: OperatorModel::Diagonal(
                DiagonalOperator::exponential_profile(n).map_err(err)?,
            ),
        })
    }

    /// Lacunary profile with the origin adjoined (levels <= 6).
    #[staticmethod]
    fn lacunary(levels: usize) -> PyResult<Self> {
        Ok(Self {
            inner: OperatorModel::Diagonal(DiagonalOperator::lacunary_profile(levels).map_err(err)?),
        })
    }

    /// Dense matrix generator; `bounded = True` validates that the
    /// spectral abscissa is nonpositive.
    #[staticmethod]
    #[pyo3(signature = (rows, bounded = true))]
    fn matrix(rows: Vec<Vec<C64>>, bounded: bool) -> PyResult<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(PyValueError::new_err("matrix must be square and nonempty"));
        }
        let m = CMatrix::from_fn(n, n, |i, j| rows[i][j]);
        let inner = if bounded {
            MatrixOperator::bounded(m)
        } else {
            MatrixOperator::raw(m)
        }
        .map_err(err)?;
        Ok(Self {
            inner: OperatorModel::Matrix(inner),
        })
    }

    /// ||R(is, A)||.
    fn resolvent_norm(&self, s: f64) -> PyResult<f64> {
        self.inner.resolvent_norm(s).map_err(err)
    }

    /// ||T(t)||.
    fn propagator_norm(&self, t: f64) -> PyResult<f64> {
        self.inner.propagator_norm(t).map_err(err)
    }

    /// ||T(t) A R(1,A)||, the decay observable.
    fn kt_observable(&self, t: f64) -> PyResult<f64> {
        self.inner.kt_observable(t).map_err(err)
    }

    /// ||T(t) mu_hat(T)|| for a bounded measure mu.
    fn mu_observable(&self, mu: &Measure, t: f64) -> PyResult<f64> {
        self.inner.mu_observable(&mu.inner, t).map_err(err)
    }

    /// mu_hat(T) as a dense matrix (matrix operators only).
    fn hat_mu(&self, mu: &Measure) -> PyResult<Vec<Vec<C64>>> {
        match &self.inner {
            OperatorModel::Matrix(m) => {
                let h = m.hat_mu(&mu.inner).map_err(err)?;
                Ok((0..h.nrows())
                    .map(|i| (0..h.ncols()).map(|j| h[(i, j)]).collect())
                    .collect())
            }
            OperatorModel::Diagonal(_) => Err(PyValueError::new_err(
                "hat_mu is a matrix-operator operation; diagonal models use mu_observable",
            )),
        }
    }

    fn eigenvalues(&self) -> Vec<C64> {
        self.inner.eigenvalues().to_vec()
    }

    fn label(&self) -> String {
        self.inner.label()
    }

    fn __repr__(&self) -> String {
        format!("Operator({})", self.inner.label())
    }
}

/// A bounded measure on the half-line: atoms plus exponential-polynomial
/// densities.
#[pyclass]
#[derive(Clone)]
struct Measure {
    inner: BoundedMeasure,
}

#[pymethods]
impl Measure {
    /// Parse `atom(t, re, im)` / `expdensity(a_re, a_im; c0, c1, ...)`
    /// expressions combined with `+` and `-`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: parse_measure(text).map_err(err)?,
        })
    }

    /// weight * delta_{location}.
    #[staticmethod]
    #[pyo3(signature = (location, weight))]
    fn dirac(location: f64, weight: C64) -> PyResult<Self> {
        Ok(Self {
            inner: BoundedMeasure::dirac(location, weight).map_err(err)?,
        })
    }

    /// (c0 + c1 t + ...) e^{-decay t} dt.
    #[staticmethod]
    fn exp_density(decay: C64, coeffs: Vec<C64>) -> PyResult<Self> {
        Ok(Self {
            inner: BoundedMeasure::exp_density(decay, &coeffs).map_err(err)?,
        })
    }

    /// The measure e(t) dt with e(t) = e^{-t}.
    #[staticmethod]
    fn exponential_e() -> Self {
        Self {
            inner: BoundedMeasure::exponential_e(),
        }
    }

    /// Unit Dirac mass at the origin.
    #[staticmethod]
    fn delta_zero() -> Self {
        Self {
            inner: BoundedMeasure::delta_zero(),
        }
    }

    /// e - delta_0, whose calculus operator is A R(1,A).
    #[staticmethod]
    fn e_minus_delta() -> Self {
        Self {
            inner: BoundedMeasure::e_minus_delta(),
        }
    }

    fn fourier(&self, s: f64) -> C64 {
        self.inner.fourier(s)
    }

    fn laplace(&self, z: C64) -> PyResult<C64> {
        self.inner.laplace(z).map_err(err)
    }

    fn total_variation(&self) -> f64 {
        self.inner.total_variation()
    }

    fn convolve(&self, other: &Measure) -> PyResult<Self> {
        Ok(Self {
            inner: self.inner.convolve(&other.inner).map_err(err)?,
        })
    }

    fn __add__(&self, other: &Measure) -> Self {
        Self {
            inner: self.inner.add(&other.inner),
        }
    }

    fn __sub__(&self, other: &Measure) -> Self {
        Self {
            inner: self.inner.sub(&other.inner),
        }
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Measure({})", self.inner)
    }
}

/// A sampled monotone function with log-log interpolation: the container
/// for dominating functions and their inverses.
#[pyclass]
struct MonotoneFunction {
    inner: SampledMonotoneFunction,
}

#[pymethods]
impl MonotoneFunction {
    fn abscissae(&self) -> Vec<f64> {
        self.inner.abscissae().to_vec()
    }

    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn eval(&self, x: f64) -> f64 {
        self.inner.eval(x)
    }

    /// Largest s with f(s) = y (nonincreasing functions).
    fn right_inverse(&self, y: f64) -> PyResult<f64> {
        self.inner.right_inverse(y).map_err(err)
    }

    /// min { t >= 0 : f(t) <= s } (nonincreasing functions).
    fn omega_star(&self, s: f64) -> PyResult<f64> {
        self.inner.omega_star(s).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.inner.abscissae().len()
    }
}

/// Minimal dominating function for the resolvent on [s_min, 1], with the
/// operator's eigenvalue imaginary parts injected as supremum candidates.
#[pyfunction]
#[pyo3(signature = (op, s_min = 1e-6, points_per_decade = 16))]
fn minimal_m(op: &Operator, s_min: f64, points_per_decade: u32) -> PyResult<MonotoneFunction> {
    let grid = FrequencyGrid::new(s_min, 1.0, points_per_decade)
        .map_err(err)?
        .with_operator_candidates(&op.inner);
    Ok(MonotoneFunction {
        inner: dominating::minimal_m(&op.inner, &grid).map_err(err)?,
    })
}

/// Minimal dominating function for the decay observable on [0, t_max].
#[pyfunction]
#[pyo3(signature = (op, t_max = 1e6, points_per_decade = 16))]
fn minimal_omega(op: &Operator, t_max: f64, points_per_decade: u32) -> PyResult<MonotoneFunction> {
    let grid = TimeGrid::new(1.0, t_max, points_per_decade).map_err(err)?;
    Ok(MonotoneFunction {
        inner: dominating::minimal_omega(&op.inner, &grid).map_err(err)?,
    })
}

/// Run a scenario configuration file; returns the process exit code
/// (0 clean, 2 inconsistent, 3 strict-inconclusive, 4 failure).
#[pyfunction]
#[pyo3(signature = (config, out, scenario = None, strict = false, refine = false, seed = 0))]
fn run_config(
    config: &str,
    out: &str,
    scenario: Option<String>,
    strict: bool,
    refine: bool,
    seed: u64,
) -> i32 {
    let opts = RunOptions::new(out)
        .filter(scenario)
        .strict(strict)
        .refine(refine)
        .seed(seed);
    runner::run_config(std::path::Path::new(config), &opts)
}

#[pymodule]
fn ktlab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Operator>()?;
    m.add_class::<Measure>()?;
    m.add_class::<MonotoneFunction>()?;
    m.add_function(wrap_pyfunction!(minimal_m, m)?)?;
    m.add_function(wrap_pyfunction!(minimal_omega, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
