//! Python bindings: `import predlab`.
//!
//! Structured results (reports, summaries) are returned as plain dicts with
//! the same shape as the CLI's JSON output.

use lab::analysis;
use lab::bitstreams::{self, BitStream};
use lab::mealy::{self, BlackBox, MealyAutomaton, PredicateKind};
use lab::model::DEFAULT_FUEL;
use lab::quantum::{self, QubitState};
use lab::scenario;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde::Serialize;

create_exception!(predlab, PredlabError, PyValueError, "Error raised by predlab; `.code` holds the error code.");

fn err(e: lab::Error) -> PyErr {
    let py_err = PredlabError::new_err(e.to_string());
    Python::attach(|py| {
        let _ = py_err.value(py).setattr("code", e.code());
    });
    py_err
}

fn ints(bits: Vec<u8>) -> Vec<u32> {
    bits.into_iter().map(u32::from).collect()
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).expect("reports serialise");
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

#[pyclass(name = "BitStream", module = "predlab", frozen)]
struct PyBitStream(BitStream);

#[pymethods]
impl PyBitStream {
    /// A rule stream: "constant-0", "alternating", "pi-binary", ...
    #[staticmethod]
    fn rule(id: &str) -> PyResult<Self> {
        bitstreams::make_rule_stream(id).map(Self).map_err(err)
    }

    #[staticmethod]
    fn noise(seed: u64) -> Self {
        Self(bitstreams::make_seeded_noise_stream(seed))
    }

    #[staticmethod]
    #[pyo3(signature = (cycle, prefix = Vec::new()))]
    fn periodic(cycle: Vec<u8>, prefix: Vec<u8>) -> PyResult<Self> {
        let prefix = bitstreams::BitString::from_bits(prefix).map_err(err)?;
        let cycle = bitstreams::BitString::from_bits(cycle).map_err(err)?;
        BitStream::periodic(prefix, cycle).map(Self).map_err(err)
    }

    /// Raw bytes read MSB-first, optionally limited to `total_bits`.
    #[staticmethod]
    #[pyo3(signature = (data, total_bits = None))]
    fn from_bytes(data: Vec<u8>, total_bits: Option<usize>) -> PyResult<Self> {
        BitStream::from_bytes(data, total_bits, "<bytes>").map(Self).map_err(err)
    }

    #[staticmethod]
    fn from_file(path: &str) -> PyResult<Self> {
        BitStream::from_file(path).map(Self).map_err(err)
    }

    /// Bit `j`, 1-indexed.
    fn bit(&self, j: usize) -> PyResult<u8> {
        self.0.bit(j).map_err(err)
    }

    fn prefix(&self, n: usize) -> PyResult<Vec<u32>> {
        self.0.prefix(n).map(|b| ints(b.into_bits())).map_err(err)
    }

    /// Bits `lo..=hi`, 1-indexed.
    fn window(&self, lo: usize, hi: usize) -> PyResult<Vec<u32>> {
        self.0.window(lo, hi).map(|b| ints(b.into_bits())).map_err(err)
    }

    #[getter]
    fn total_bits(&self) -> Option<usize> {
        self.0.total_bits()
    }

    fn __repr__(&self) -> String {
        format!("BitStream({})", self.0.describe())
    }
}

#[pyfunction]
fn pi_hex_digits(count: usize) -> PyResult<Vec<u32>> {
    bitstreams::pi_hex_digits(count).map(ints).map_err(err)
}

/// Hexadecimal digit `n` of pi after the point, 1-indexed.
#[pyfunction]
fn bbp_hex_digit(n: u64) -> PyResult<u8> {
    bitstreams::bbp_hex_digit(n).map_err(err)
}

#[pyfunction]
fn pi_bits(n: usize) -> PyResult<Vec<u32>> {
    bitstreams::pi_bits(n).map(ints).map_err(err)
}

#[pyfunction]
fn nth_prime(j: usize) -> usize {
    bitstreams::nth_prime(j)
}

#[pyclass(name = "MealyAutomaton", module = "predlab", frozen)]
struct PyMealy(MealyAutomaton);

fn symbol(s: &str) -> PyResult<char> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(c),
        _ => Err(PyValueError::new_err(format!("expected a single input symbol, got {s:?}"))),
    }
}

#[pymethods]
impl PyMealy {
    /// Parses the text table format (see `to_text`).
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        MealyAutomaton::parse(text).map(Self).map_err(err)
    }

    #[staticmethod]
    fn canonical() -> Self {
        Self(mealy::canonical_example())
    }

    fn to_text(&self) -> String {
        self.0.to_text()
    }

    #[getter]
    fn states(&self) -> Vec<String> {
        self.0.states().to_vec()
    }

    /// Feeds `symbols` from state `start`; returns (outputs, final state label).
    fn trace(&self, start: &str, symbols: &str) -> PyResult<(Vec<u32>, String)> {
        let q = self.0.state_index(start).map_err(err)?;
        let (outputs, end) = self.0.trace(q, symbols).map_err(err)?;
        Ok((ints(outputs), self.0.state_label(end).to_owned()))
    }

    fn eigenstates(&self, a: &str) -> PyResult<Vec<String>> {
        self.0.eigenstates(symbol(a)?).map_err(err)
    }

    fn output_stable(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.output_stable())
    }

    #[pyo3(signature = (x = "x", z = "z"))]
    fn complementary_strict(&self, py: Python<'_>, x: &str, z: &str) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.complementary_strict(symbol(x)?, symbol(z)?).map_err(err)?)
    }

    #[pyo3(signature = (x = "x", z = "z"))]
    fn complementary_restricted(&self, py: Python<'_>, x: &str, z: &str) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.complementary_restricted(symbol(x)?, symbol(z)?).map_err(err)?)
    }

    /// `b` can disturb the response to `a`.
    fn complementary_witnessed(&self, py: Python<'_>, a: &str, b: &str) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.complementary_witnessed(symbol(a)?, symbol(b)?).map_err(err)?)
    }

    /// Outcomes of `repetitions` E_M trials on a fresh black box.
    #[pyo3(signature = (repetitions, start = None))]
    fn run_em(&self, repetitions: usize, start: Option<&str>) -> PyResult<Vec<u32>> {
        let mut bb = BlackBox::new(self.0.clone(), start).map_err(err)?;
        mealy::run_em(&mut bb, repetitions).map(ints).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("MealyAutomaton(states={:?})", self.0.states())
    }
}

/// Counts automata with up to `q_max` states per predicate conjunction.
#[pyfunction]
#[pyo3(signature = (q_max, predicates = None, exemplars = 0))]
fn enumerate(py: Python<'_>, q_max: usize, predicates: Option<Vec<String>>, exemplars: usize) -> PyResult<Py<PyAny>> {
    let kinds = match predicates {
        None => PredicateKind::ALL.to_vec(),
        Some(names) => names
            .iter()
            .map(|n| {
                serde_json::from_value(serde_json::Value::String(n.clone()))
                    .map_err(|_| PyValueError::new_err(format!("unknown predicate {n:?}")))
            })
            .collect::<PyResult<_>>()?,
    };
    let summary = py.detach(|| mealy::enumerate_automata(q_max, &kinds, exemplars)).map_err(err)?;
    to_py(py, &summary)
}

#[pyclass(name = "QubitState", module = "predlab", frozen)]
struct PyQubit(QubitState);

#[pymethods]
impl PyQubit {
    #[new]
    fn new(a0: Complex64, a1: Complex64) -> PyResult<Self> {
        QubitState::new(a0, a1).map(Self).map_err(err)
    }

    /// cos(theta)|0> + sin(theta)|1>
    #[staticmethod]
    fn from_angle(theta: f64) -> Self {
        Self(QubitState::from_angle(theta))
    }

    #[getter]
    fn amplitudes(&self) -> (Complex64, Complex64) {
        self.0.amplitudes()
    }

    fn __repr__(&self) -> String {
        let (a0, a1) = self.0.amplitudes();
        format!("QubitState({a0}, {a1})")
    }
}

/// Returns (|<psi|phi>|, non_commuting).
#[pyfunction]
fn overlap(psi: &PyQubit, phi: &PyQubit) -> PyResult<(f64, bool)> {
    let o = quantum::overlap(&psi.0, &phi.0).map_err(err)?;
    Ok((o.value, o.non_commuting))
}

#[pyfunction]
#[pyo3(signature = (bits, bound = None))]
fn detect_cycle(py: Python<'_>, bits: Vec<u8>, bound: Option<usize>) -> PyResult<Py<PyAny>> {
    let bound = bound.unwrap_or(bits.len());
    to_py(py, &analysis::detect_cycle(&bits, bound).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (bits, max_block = 2))]
fn normality(py: Python<'_>, bits: Vec<u8>, max_block: usize) -> PyResult<Py<PyAny>> {
    let report = py.detach(|| analysis::borel_normality_check(&bits, max_block)).map_err(err)?;
    to_py(py, &report)
}

/// Bits from CSV text; a column named "outcome" is preferred.
#[pyfunction]
fn parse_bits_csv(text: &str) -> PyResult<Vec<u32>> {
    analysis::parse_bits_csv(text).map(ints).map_err(err)
}

/// Runs every scenario in a JSON config string; returns one report dict each.
#[pyfunction]
#[pyo3(signature = (config, seed = None, fuel = DEFAULT_FUEL))]
fn run_config(py: Python<'_>, config: &str, seed: Option<u64>, fuel: u64) -> PyResult<Vec<Py<PyAny>>> {
    let mut configs = scenario::parse_config(config).map_err(err)?;
    for c in &mut configs {
        if seed.is_some() {
            c.seed = seed;
        }
    }
    let reports = py.detach(|| configs.iter().map(|c| c.run(fuel)).collect::<lab::Result<Vec<_>>>()).map_err(err)?;
    reports.iter().map(|r| to_py(py, r)).collect()
}

#[pymodule]
fn predlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", scenario::TOOL_VERSION)?;
    m.add("PredlabError", m.py().get_type::<PredlabError>())?;
    m.add_class::<PyBitStream>()?;
    m.add_class::<PyMealy>()?;
    m.add_class::<PyQubit>()?;
    m.add_function(wrap_pyfunction!(pi_hex_digits, m)?)?;
    m.add_function(wrap_pyfunction!(bbp_hex_digit, m)?)?;
    m.add_function(wrap_pyfunction!(pi_bits, m)?)?;
    m.add_function(wrap_pyfunction!(nth_prime, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate, m)?)?;
    m.add_function(wrap_pyfunction!(overlap, m)?)?;
    m.add_function(wrap_pyfunction!(detect_cycle, m)?)?;
    m.add_function(wrap_pyfunction!(normality, m)?)?;
    m.add_function(wrap_pyfunction!(parse_bits_csv, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    Ok(())
}
