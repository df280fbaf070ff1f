//! Python bindings for the graph-Laplacian toolkit.
//!
//! The module mirrors the command-line surface: build or load a graph,
//! materialize a window, then solve potentials, measure resistance
//! distances, take spectra, run heat flow, and probe deficiency indices.
//! Scalar vertices cross the boundary as Python ints, lattice vertices as
//! tuples of ints.

use lapnet::graph::{
    materialize, read_raw_graph, validate_raw, GraphKind, GraphSystem, Vertex, Window,
    WindowedGraph,
};
use lapnet::heisenberg::{deficiency_probe_banded, HalfLineBandedOperator};
use lapnet::operator::{assemble_matrix, energy, BoundaryMode, VertexField};
use lapnet::potential::{resistance_distance, resistance_table, solve_dipole, SolverKind};
use lapnet::semigroup::{heat_apply, truncation_error_check};
use lapnet::spectral::{
    hs_membership_line, truncated_spectrum, DefectConfig, Spectrum, DENSE_EIGEN_CAP,
};
use lapnet::LapnetError;
use pyo3::exceptions::{PyTypeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyTuple};
use std::path::Path;

fn lerr(e: LapnetError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<BoundaryMode> {
    match mode {
        "induced" => Ok(BoundaryMode::Induced),
        "compressed" => Ok(BoundaryMode::Compressed),
        other => Err(PyValueError::new_err(format!(
            "mode {other:?} is not \"induced\" or \"compressed\""
        ))),
    }
}

fn parse_solver(solver: &str) -> PyResult<SolverKind> {
    match solver {
        "cg" => Ok(SolverKind::Cg),
        "dft" => Ok(SolverKind::Dft),
        "closed-form" => Ok(SolverKind::ClosedForm),
        other => Err(PyValueError::new_err(format!(
            "solver {other:?} is not \"cg\", \"dft\", or \"closed-form\""
        ))),
    }
}

/// Accepts an int for scalar vertices or a sequence of ints for lattice
/// coordinates.
fn vertex_from_py(any: &Bound<'_, PyAny>) -> PyResult<Vertex> {
    if let Ok(x) = any.extract::<i64>() {
        return Ok(Vertex(vec![x]));
    }
    if let Ok(coords) = any.extract::<Vec<i64>>() {
        if !coords.is_empty() {
            return Ok(Vertex(coords));
        }
    }
    Err(PyTypeError::new_err(
        "vertex should be an int or a non-empty sequence of ints",
    ))
}

fn vertex_to_py<'py>(py: Python<'py>, v: &Vertex) -> PyResult<Bound<'py, PyAny>> {
    if v.0.len() == 1 {
        Ok(v.0[0].into_pyobject(py)?.into_any())
    } else {
        Ok(PyTuple::new(py, v.0.iter())?.into_any())
    }
}

/// A graph together with one materialized window of vertices.
///
/// `source` is a builder spec (`cyclic:5`, `chain:linear`, `line`,
/// `lattice:2x4`, ...) or a path to a graph file, which is validated before
/// loading.  Infinite chains need `window="lo:hi"`; finite graphs default
/// to the whole vertex set.
#[pyclass(frozen)]
struct Graph {
    system: GraphSystem,
    window: Window,
    w: WindowedGraph,
}

impl Graph {
    fn build(system: GraphSystem, window: Option<&str>) -> PyResult<Self> {
        let window = match window {
            Some("all") => Window::All,
            Some(range) => Window::parse_range(range).map_err(lerr)?,
            None => match system.kind() {
                GraphKind::Chain { .. } => {
                    return Err(PyValueError::new_err(
                        "chain graphs are infinite; pass window=\"lo:hi\"",
                    ))
                }
                _ => Window::All,
            },
        };
        let w = materialize(&system, &window).map_err(lerr)?;
        Ok(Graph { system, window, w })
    }

    fn field_from(&self, values: Vec<f64>) -> PyResult<VertexField> {
        if values.len() != self.w.len() {
            return Err(PyValueError::new_err(format!(
                "field has {} values but the window has {} vertices",
                values.len(),
                self.w.len()
            )));
        }
        Ok(VertexField::from_real(&values))
    }

    fn point_source(&self, alpha: &Bound<'_, PyAny>) -> PyResult<VertexField> {
        let v = vertex_from_py(alpha)?;
        let i = self.w.index_of(&v).ok_or_else(|| {
            PyValueError::new_err(format!("vertex {v} is not in the window"))
        })?;
        Ok(VertexField::dirac(self.w.len(), i))
    }
}

#[pymethods]
impl Graph {
    #[new]
    #[pyo3(signature = (source, window=None))]
    fn new(source: &str, window: Option<&str>) -> PyResult<Self> {
        let system = if source.ends_with(".json") || source.contains('/') {
            load_validated(Path::new(source))?
        } else {
            GraphSystem::from_spec(source).map_err(lerr)?
        };
        Self::build(system, window)
    }

    /// Loads a graph file, refusing it unless every format axiom holds.
    #[staticmethod]
    #[pyo3(signature = (path, window=None))]
    fn load(path: &str, window: Option<&str>) -> PyResult<Self> {
        Self::build(load_validated(Path::new(path))?, window)
    }

    fn __len__(&self) -> usize {
        self.w.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph({:?}, {} vertices)",
            self.system.describe(),
            self.w.len()
        )
    }

    /// Window vertices in storage order.
    fn vertices<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let items: Vec<Bound<'py, PyAny>> = self
            .w
            .vertices()
            .iter()
            .map(|v| vertex_to_py(py, v))
            .collect::<PyResult<_>>()?;
        PyList::new(py, items)
    }

    /// Dense windowed Laplacian as a list of rows.
    #[pyo3(signature = (mode="induced"))]
    fn laplacian(&self, mode: &str) -> PyResult<Vec<Vec<f64>>> {
        let m = assemble_matrix(&self.w, parse_mode(mode)?).map_err(lerr)?;
        let dense = m.to_dense_real().map_err(lerr)?;
        Ok(dense.outer_iter().map(|row| row.to_vec()).collect())
    }

    /// Nonzero Laplacian entries as `(row, col, value)` triples.
    #[pyo3(signature = (mode="induced"))]
    fn laplacian_triplets(&self, mode: &str) -> PyResult<Vec<(usize, usize, f64)>> {
        let m = assemble_matrix(&self.w, parse_mode(mode)?).map_err(lerr)?;
        let mut out = Vec::new();
        for i in 0..m.n() {
            for &(j, z) in m.row(i) {
                out.push((i, j, z.re));
            }
        }
        Ok(out)
    }

    /// Eigenvalues of the induced-mode Laplacian, ascending.
    fn spectrum(&self) -> PyResult<Vec<f64>> {
        let m = assemble_matrix(&self.w, BoundaryMode::Induced).map_err(lerr)?;
        match truncated_spectrum(&m, DENSE_EIGEN_CAP).map_err(lerr)? {
            Spectrum::Full(dec) => Ok(dec.values),
            Spectrum::Bounds { .. } => Err(PyValueError::new_err(format!(
                "window has {} vertices, beyond the dense eigensolver cap {DENSE_EIGEN_CAP}",
                self.w.len()
            ))),
        }
    }

    /// Energy of a real field over in-window edges (each unordered edge
    /// counted twice).
    fn energy(&self, values: Vec<f64>) -> PyResult<f64> {
        Ok(energy(&self.w, &self.field_from(values)?)
            .map_err(lerr)?
            .value)
    }

    /// Solves the two-pole problem; the potential is grounded at `alpha`.
    #[pyo3(signature = (alpha, beta, solver="cg"))]
    fn potential<'py>(
        &self,
        py: Python<'py>,
        alpha: &Bound<'_, PyAny>,
        beta: &Bound<'_, PyAny>,
        solver: &str,
    ) -> PyResult<Bound<'py, PyDict>> {
        let a = vertex_from_py(alpha)?;
        let b = vertex_from_py(beta)?;
        let sol = solve_dipole(&self.w, &a, &b, parse_solver(solver)?).map_err(lerr)?;
        let values = PyList::empty(py);
        for (i, v) in self.w.vertices().iter().enumerate() {
            values.append((vertex_to_py(py, v)?, sol.field.get(i).re))?;
        }
        let d = PyDict::new(py);
        d.set_item("alpha", vertex_to_py(py, &a)?)?;
        d.set_item("beta", vertex_to_py(py, &b)?)?;
        d.set_item("energy", sol.energy)?;
        d.set_item("residual", sol.residual_norm)?;
        d.set_item("values", values)?;
        Ok(d)
    }

    /// Effective-resistance distance between two window vertices.
    fn resistance(&self, x: &Bound<'_, PyAny>, y: &Bound<'_, PyAny>) -> PyResult<f64> {
        resistance_distance(&self.w, &vertex_from_py(x)?, &vertex_from_py(y)?).map_err(lerr)
    }

    /// All-pairs resistance distances as `(x, y, dist)` triples, `x` before
    /// `y` in window order.
    fn resistance_table<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyList>> {
        let table = resistance_table(&self.w).map_err(lerr)?;
        let out = PyList::empty(py);
        for (i, j, d) in table {
            out.append((
                vertex_to_py(py, self.w.vertex(i))?,
                vertex_to_py(py, self.w.vertex(j))?,
                d,
            ))?;
        }
        Ok(out)
    }

    /// Heat flow for time `t` from a point mass at `alpha`; returns the
    /// evolved field in window order.
    fn heat(&self, t: f64, alpha: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
        let m = assemble_matrix(&self.w, BoundaryMode::Induced).map_err(lerr)?;
        let evolved = heat_apply(&m, t, &self.point_source(alpha)?).map_err(lerr)?;
        Ok(evolved.values().iter().map(|z| z.re).collect())
    }

    /// Truncation-error certificate for windowed heat flow from `alpha`,
    /// measured against a 10x reference window on chains.
    fn heat_certificate<'py>(
        &self,
        py: Python<'py>,
        t: f64,
        alpha: &Bound<'_, PyAny>,
    ) -> PyResult<Bound<'py, PyDict>> {
        let source = self.point_source(alpha)?;
        let reference = match &self.window {
            Window::Range { lo, hi } => Window::Range {
                lo: lo * 10,
                hi: hi * 10,
            },
            other => other.clone(),
        };
        let check = truncation_error_check(&self.system, &self.window, &reference, t, &source)
            .map_err(lerr)?;
        let d = PyDict::new(py);
        d.set_item("t", check.t)?;
        d.set_item("lambda_pf", check.lambda_pf)?;
        d.set_item("lhs", check.lhs)?;
        d.set_item("bound", check.bound)?;
        d.set_item("pass", check.pass)?;
        Ok(d)
    }
}

fn load_validated(path: &Path) -> PyResult<GraphSystem> {
    let raw = read_raw_graph(path).map_err(lerr)?;
    let report = validate_raw(&raw);
    if !report.is_valid() {
        let listed: Vec<String> = report.violations.iter().map(|v| v.to_string()).collect();
        return Err(PyValueError::new_err(format!(
            "{}: {} violation(s): {}",
            path.display(),
            listed.len(),
            listed.join("; ")
        )));
    }
    lapnet::graph::load_graph_file(path).map_err(lerr)
}

/// Violation messages for a graph file; an empty list means the file
/// satisfies every axiom.
#[pyfunction]
fn validate_file(path: &str) -> PyResult<Vec<String>> {
    let raw = read_raw_graph(Path::new(path)).map_err(lerr)?;
    Ok(validate_raw(&raw)
        .violations
        .iter()
        .map(|v| v.to_string())
        .collect())
}

/// Fractional-order membership of the integer-line dipole with separation
/// `k`: dict with the verdict, the boundary flag, the partial-sum sequence,
/// and the squared norm when it converges.
#[pyfunction]
fn hs_membership<'py>(py: Python<'py>, k: i64, s: f64) -> PyResult<Bound<'py, PyDict>> {
    let m = hs_membership_line(k, s).map_err(lerr)?;
    let d = PyDict::new(py);
    d.set_item("k", m.k)?;
    d.set_item("s", m.s)?;
    d.set_item("verdict", m.verdict.as_str())?;
    d.set_item("boundary_case", m.boundary_case)?;
    d.set_item("norm_sq", m.norm_sq)?;
    d.set_item("integral_sequence", m.integrals)?;
    Ok(d)
}

/// Deficiency indices `(n_plus, n_minus)` of a banded half-line operator,
/// or None when the probe is inconclusive.  Models: `qpq`, `hamiltonian`,
/// or a `chain:<rule>` builder spec.
#[pyfunction]
#[pyo3(signature = (model, nmax=256))]
fn defect_indices(model: &str, nmax: usize) -> PyResult<Option<(usize, usize)>> {
    let op = match model {
        "qpq" => HalfLineBandedOperator::qpq(),
        "hamiltonian" => HalfLineBandedOperator::hamiltonian(),
        spec if spec.starts_with("chain:") => {
            HalfLineBandedOperator::from_chain(&GraphSystem::from_spec(spec).map_err(lerr)?)
                .map_err(lerr)?
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "model {other:?} is not qpq, hamiltonian, or chain:<rule>"
            )))
        }
    };
    let pair = deficiency_probe_banded(&op, nmax, &DefectConfig::default()).map_err(lerr)?;
    Ok(pair.indices())
}

#[pymodule]
fn lapnet_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Graph>()?;
    m.add_function(wrap_pyfunction!(validate_file, m)?)?;
    m.add_function(wrap_pyfunction!(hs_membership, m)?)?;
    m.add_function(wrap_pyfunction!(defect_indices, m)?)?;
    Ok(())
}
