//! Python bindings: `import ncrank_py`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use ncrank::cli::{generate as gen_instance, Family, GenSpec};
use ncrank::io::{self, Instance, Metadata, NcRankResult, NcSingularResult};
use ncrank::oracle::{blowup_lower_bound, brute_force_mvsp};
use ncrank::sppa::mvsp_to_fr;
use ncrank::valdet::{valdet_run, IntSymbolicMatrix};
use ncrank::{Gfp, Matrix, Prime, SolverConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn config(n: usize, max_cycles: Option<usize>, certify_dmax: Option<usize>, trials: Option<usize>, seed: u64) -> PyResult<SolverConfig> {
    let mut cfg = SolverConfig::defaults(n);
    if let Some(c) = max_cycles {
        cfg.max_cycles = c;
    }
    if let Some(d) = certify_dmax {
        cfg.certify_dmax = d;
    }
    if let Some(t) = trials {
        cfg.trials = t;
    }
    cfg.seed = seed;
    cfg.validate(n).map_err(value_err)?;
    Ok(cfg)
}

/// A linear symbolic matrix `A₁x₁ + ⋯ + A_m x_m` over GF(p).
#[pyclass(name = "SymbolicMatrix", module = "ncrank_py", frozen)]
pub struct PySymbolicMatrix {
    inner: ncrank::SymbolicMatrix,
}

#[pymethods]
impl PySymbolicMatrix {
    #[new]
    fn new(p: u64, matrices: Vec<Vec<Vec<BigInt>>>) -> PyResult<Self> {
        let field = Gfp::new(p).map_err(value_err)?;
        let n = matrices.first().map_or(0, Vec::len);
        let mats = matrices
            .iter()
            .map(|a| {
                let rows: Vec<Vec<u64>> = a.iter().map(|r| r.iter().map(|v| field.reduce_bigint(v)).collect()).collect();
                Matrix::from_rows(&rows, n).map_err(value_err)
            })
            .collect::<PyResult<Vec<_>>>()?;
        let inner = ncrank::SymbolicMatrix::new(field, mats).map_err(value_err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inst = Instance::from_json(text).map_err(value_err)?;
        Ok(Self { inner: inst.to_symbolic().map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        Instance::from_symbolic(&self.inner, Metadata::default()).to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.inner.field().p()
    }

    fn matrices(&self) -> Vec<Vec<Vec<u64>>> {
        self.inner.mats().iter().map(Matrix::row_vecs).collect()
    }

    /// Runs the certified solver; the GIL is released meanwhile.
    #[pyo3(signature = (max_cycles=None, certify_dmax=None, trials=None, seed=0))]
    fn solve(&self, py: Python<'_>, max_cycles: Option<usize>, certify_dmax: Option<usize>, trials: Option<usize>, seed: u64) -> PyResult<SolveResult> {
        let cfg = config(self.inner.n(), max_cycles, certify_dmax, trials, seed)?;
        let a = self.inner.clone();
        let result = py.detach(move || -> Result<NcRankResult, String> {
            let state = ncrank::sppa_run(&a, &cfg).map_err(|e| e.to_string())?;
            let cert = mvsp_to_fr(&state.best_feasible, &a).map_err(|e| e.to_string())?;
            Ok(NcRankResult::new(&a, &state, &cert, &cfg))
        });
        Ok(SolveResult { inner: result.map_err(runtime_err)? })
    }

    /// Exhaustive nc-rank; raises `ValueError` past the catalog limit.
    fn nc_rank_bruteforce(&self, py: Python<'_>) -> PyResult<usize> {
        let a = self.inner.clone();
        py.detach(move || brute_force_mvsp(&a)).map(|(_, v)| v).map_err(value_err)
    }

    /// Blow-up lower bound `⌈rank / d⌉` maximized over `d ≤ dmax`.
    #[pyo3(signature = (dmax=None, trials=24, seed=0))]
    fn blowup_lower_bound(&self, py: Python<'_>, dmax: Option<usize>, trials: usize, seed: u64) -> usize {
        let a = self.inner.clone();
        let dmax = dmax.unwrap_or(a.n().saturating_sub(1).max(1));
        py.detach(move || blowup_lower_bound(&a, dmax, trials, seed).bound)
    }

    fn __repr__(&self) -> String {
        format!("SymbolicMatrix(n={}, m={}, p={})", self.inner.n(), self.inner.m(), self.inner.field().p())
    }
}

/// Outcome of `SymbolicMatrix.solve`.
#[pyclass(module = "ncrank_py", frozen)]
pub struct SolveResult {
    inner: NcRankResult,
}

#[pymethods]
impl SolveResult {
    /// Best upper bound; the nc-rank when `certified`.
    #[getter]
    fn nc_rank(&self) -> usize {
        self.inner.nc_rank
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.certified
    }

    #[getter]
    fn lower_bound(&self) -> usize {
        self.inner.lower_bound
    }

    #[getter]
    fn cycles(&self) -> usize {
        self.inner.stats.cycles
    }

    #[getter]
    fn certified_at(&self) -> Option<usize> {
        self.inner.stats.certified_at
    }

    #[getter]
    fn x_basis(&self) -> Vec<Vec<u64>> {
        self.inner.certificate.x_basis.clone()
    }

    #[getter]
    fn y_basis(&self) -> Vec<Vec<u64>> {
        self.inner.certificate.y_basis.clone()
    }

    /// `(S, T, r, s)` with an `r × s` zero block in every `S A_i T`.
    fn certificate(&self) -> (Vec<Vec<u64>>, Vec<Vec<u64>>, usize, usize) {
        let c = &self.inner.certificate;
        (c.s_matrix.clone(), c.t_matrix.clone(), c.r, c.s)
    }

    fn verify(&self, a: &PySymbolicMatrix) -> bool {
        self.inner.verify(&a.inner).is_ok()
    }

    fn to_json(&self) -> String {
        io::to_json(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!("SolveResult(nc_rank={}, certified={}, lower_bound={})", self.inner.nc_rank, self.inner.certified, self.inner.lower_bound)
    }
}

/// An integer linear symbolic matrix for the p-adic nc-singularity test.
#[pyclass(name = "IntSymbolicMatrix", module = "ncrank_py", frozen)]
pub struct PyIntSymbolicMatrix {
    inner: IntSymbolicMatrix,
}

#[pymethods]
impl PyIntSymbolicMatrix {
    #[new]
    fn new(matrices: Vec<Vec<Vec<BigInt>>>) -> PyResult<Self> {
        let n = matrices.first().map_or(0, Vec::len);
        let mats = matrices
            .iter()
            .map(|a| Matrix::from_rows(a, n).map_err(value_err))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self { inner: IntSymbolicMatrix::new(mats).map_err(value_err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let inst = Instance::from_json(text).map_err(value_err)?;
        Ok(Self { inner: inst.to_int().map_err(value_err)? })
    }

    fn to_json(&self) -> String {
        Instance::from_int(&self.inner, Metadata::default()).to_json()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    /// Returns `(verdict, objective, iterations, result_json)`.
    #[pyo3(signature = (p, max_cycles=None, certify_dmax=None, trials=None, seed=0))]
    fn nc_singular(
        &self,
        py: Python<'_>,
        p: u64,
        max_cycles: Option<usize>,
        certify_dmax: Option<usize>,
        trials: Option<usize>,
        seed: u64,
    ) -> PyResult<(String, u64, usize, String)> {
        let prime = Prime::new(p).map_err(value_err)?;
        let cfg = config(self.inner.n(), max_cycles, certify_dmax, trials, seed)?;
        let a = self.inner.clone();
        let v = py.detach(|| valdet_run(&a, prime, &cfg)).map_err(runtime_err)?;
        let r = NcSingularResult::new(&a, prime, &v, &cfg);
        Ok((r.verdict.clone(), r.objective, r.iterations, io::to_json(&r)))
    }

    fn __repr__(&self) -> String {
        format!("IntSymbolicMatrix(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Deterministic instance JSON for `family` in `random`, `skew`, `zerocolumn`.
#[pyfunction]
#[pyo3(signature = (family, n, m=None, p=2, seed=0, int=false, max_entry=3))]
fn generate(family: &str, n: usize, m: Option<usize>, p: u64, seed: u64, int: bool, max_entry: i64) -> PyResult<String> {
    let family = match family {
        "random" => Family::Random,
        "skew" => Family::Skew,
        "zerocolumn" => Family::Zerocolumn,
        other => return Err(PyValueError::new_err(format!("unknown family {other:?}"))),
    };
    let inst = gen_instance(&GenSpec { family, n, m, p, seed, int, max_entry }).map_err(value_err)?;
    Ok(inst.to_json())
}

#[pymodule]
fn ncrank_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySymbolicMatrix>()?;
    m.add_class::<SolveResult>()?;
    m.add_class::<PyIntSymbolicMatrix>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
