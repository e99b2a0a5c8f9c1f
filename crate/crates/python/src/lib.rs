//! Python bindings: code construction, exact analytics, fidelity tables,
//! Taylor reports, and the dense-oracle suite.
//!
//! Exact rationals cross the boundary as "p/q" strings so no precision is
//! lost; evaluation columns inside reports carry the same fixed-digit
//! formatting as the CLI.

use num::BigUint;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use picodes::code_builder::{
    descriptor_json, gram_matrix, logical_state, parse_descriptor, validate,
    validate_allow_odd, validate_legacy,
};
use picodes::damping_analytics::{
    damping_report_json, f1f1_expectation, f1fm_expectation, k0_expectation,
};
use picodes::dense_oracle::{oracle_suite, render_report};
use picodes::exact_poly::rational_string;
use picodes::fidelity_bound::{
    bound_table_csv, fidelity_lower_bound, gamma_grid, taylor_comparison, taylor_report_text,
};
use picodes::CodeParameters;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A validated code: parameters plus every derived report.
#[pyclass(frozen)]
struct Code {
    params: CodeParameters,
}

#[pymethods]
impl Code {
    /// Validate block sizes `n` and exponent `q` (m = (Πn)^q).
    #[new]
    #[pyo3(signature = (n, q, allow_odd = false))]
    fn new(n: Vec<u64>, q: u32, allow_odd: bool) -> PyResult<Self> {
        let params = if allow_odd {
            validate_allow_odd(&n, q).map_err(err)?
        } else {
            validate(&n, q).map_err(err)?
        };
        Ok(Self { params })
    }

    /// Toy parameters with explicit multipliers and qubit count, skipping
    /// the standard constraints.
    #[staticmethod]
    fn legacy(n: Vec<u64>, g: Vec<u64>, m: u64) -> PyResult<Self> {
        let params = validate_legacy(&n, &g, &BigUint::from(m)).map_err(err)?;
        Ok(Self { params })
    }

    /// Re-validate a serialized descriptor.
    #[staticmethod]
    fn from_descriptor(text: &str) -> PyResult<Self> {
        Ok(Self {
            params: parse_descriptor(text).map_err(err)?,
        })
    }

    #[getter]
    fn n(&self) -> Vec<u64> {
        self.params.n().to_vec()
    }

    #[getter]
    fn g(&self) -> Vec<u64> {
        self.params.g().to_vec()
    }

    /// N = Π n_d.
    #[getter]
    fn n_product(&self) -> u64 {
        self.params.big_n()
    }

    #[getter]
    fn q(&self) -> Option<u32> {
        self.params.q()
    }

    /// Qubit count as a decimal string (it can exceed machine integers).
    #[getter]
    fn m(&self) -> String {
        self.params.m().to_string()
    }

    #[getter]
    fn levels(&self) -> usize {
        self.params.num_levels()
    }

    #[getter]
    fn is_legacy(&self) -> bool {
        self.params.is_legacy()
    }

    /// Weight support of logical state `d` (1-based) as
    /// [(weight, squared amplitude "p/q"), …].
    fn logical_state(&self, d: usize) -> PyResult<Vec<(u64, String)>> {
        let state = logical_state(&self.params, d).map_err(err)?;
        Ok(state
            .terms()
            .iter()
            .map(|(w, s)| (*w, rational_string(s)))
            .collect())
    }

    /// Pairwise overlaps ⟨d|d′⟩ as exact strings.
    fn gram(&self) -> PyResult<Vec<Vec<String>>> {
        let gram = gram_matrix(&self.params).map_err(err)?;
        Ok(gram
            .iter()
            .map(|row| row.iter().map(rational_string).collect())
            .collect())
    }

    fn descriptor_json(&self) -> PyResult<String> {
        descriptor_json(&self.params).map_err(err)
    }

    /// Exact Kraus-pair polynomials for every level, as JSON.
    fn damping_report_json(&self) -> PyResult<String> {
        damping_report_json(&self.params).map_err(err)
    }

    /// Coefficients (γ⁰, γ¹, …) of one Kraus-pair expectation on level `d`;
    /// `which` is "k0k0", "f1f1", or "f1fm".
    fn kraus_expectation(&self, d: usize, which: &str) -> PyResult<Vec<String>> {
        let poly = match which {
            "k0k0" => k0_expectation(&self.params, d).map_err(err)?,
            "f1f1" => f1f1_expectation(&self.params, d).map_err(err)?,
            "f1fm" => f1fm_expectation(&self.params, d).map_err(err)?,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown pair {other:?}; use k0k0, f1f1, or f1fm"
                )))
            }
        };
        Ok(poly.coefficient_strings())
    }

    /// Fidelity lower bound over a γ-grid, as the CSV table.
    #[pyo3(signature = (gamma_min, gamma_max, count, log_spacing = true, discounted = false))]
    fn fidelity_csv(
        &self,
        gamma_min: f64,
        gamma_max: f64,
        count: usize,
        log_spacing: bool,
        discounted: bool,
    ) -> PyResult<String> {
        let grid = gamma_grid(gamma_min, gamma_max, count, log_spacing).map_err(err)?;
        let report = fidelity_lower_bound(&self.params, &grid).map_err(err)?;
        Ok(bound_table_csv(&report, discounted))
    }

    /// Taylor-coefficient comparison against the reference formulas.
    fn taylor_report(&self) -> PyResult<String> {
        let comparison = taylor_comparison(&self.params).map_err(err)?;
        Ok(taylor_report_text(&self.params, &comparison))
    }

    fn __repr__(&self) -> String {
        format!(
            "Code(n={:?}, g={:?}, N={}, m={})",
            self.params.n(),
            self.params.g(),
            self.params.big_n(),
            self.params.m()
        )
    }
}

/// Dense-oracle check suite report at (m, γ, seed).
#[pyfunction]
fn oracle_report(m: usize, gamma: f64, seed: u64) -> PyResult<String> {
    Ok(render_report(&oracle_suite(m, gamma, seed).map_err(err)?))
}

/// True iff every oracle check passes at (m, γ, seed).
#[pyfunction]
fn oracle_all_pass(m: usize, gamma: f64, seed: u64) -> PyResult<bool> {
    Ok(oracle_suite(m, gamma, seed)
        .map_err(err)?
        .iter()
        .all(|line| line.pass()))
}

#[pymodule]
fn picodes_py(module: &Bound<'_, PyModule>) -> PyResult<()> {
    module.add_class::<Code>()?;
    module.add_function(wrap_pyfunction!(oracle_report, module)?)?;
    module.add_function(wrap_pyfunction!(oracle_all_pass, module)?)?;
    Ok(())
}
