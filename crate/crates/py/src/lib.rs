//! Python bindings. Reports cross the boundary as plain dicts built from
//! their JSON form.

use pyo3::exceptions::{PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;
use serde::Serialize;

use treegrade::construction::{construct, ConstructionConfig, ConstructionState};
use treegrade::embedding::{coordinate_trees, default_embeddings, measure_embedding, replace_pieces};
use treegrade::generators::{gen_random_tree_graded, generate as gen_instance, GeneratorSpec};
use treegrade::io;
use treegrade::rbp::{attach_basepoint, complete_certificates, tree_graded_certificate, verify_rbp, PieceDecomposition, RbpStructure};
use treegrade::treegraded::{auto_selection, build_tree_graded, collapse, measure_distortion, verify_tree_graded, TreeGradedSpace};
use treegrade::{MetricGraph, PairSelection, PointSet};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn selection(pairs: Option<&str>, seed: Option<u64>, n: usize, auto: bool) -> PyResult<PairSelection> {
    let parsed = pairs.map(|p| p.parse::<PairSelection>().map_err(err)).transpose()?;
    match (parsed, seed) {
        (Some(PairSelection::Sample { k, .. }), Some(seed)) => Ok(PairSelection::Sample { k, seed }),
        (Some(PairSelection::Sample { .. }), None) => Err(err("sample:K needs a seed")),
        (Some(all), _) => Ok(all),
        (None, _) if auto => Ok(auto_selection(n, 20_000, seed.unwrap_or(0))),
        (None, _) => Ok(PairSelection::All),
    }
}

fn check_vertex(g: &MetricGraph, v: usize) -> PyResult<()> {
    if v < g.vertex_count() {
        Ok(())
    } else {
        Err(PyIndexError::new_err(format!("vertex {v} out of range")))
    }
}

/// Finite connected simple graph with the path metric.
#[pyclass(name = "Graph", module = "treegrade", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: MetricGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: MetricGraph::new(n, &edges).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: io::read_graph(text).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::write_graph(&self.inner)
    }

    fn to_dot(&self) -> String {
        io::to_dot(&self.inner, "graph", None)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    fn distance(&self, x: usize, y: usize) -> PyResult<u32> {
        check_vertex(&self.inner, x)?;
        check_vertex(&self.inner, y)?;
        Ok(self.inner.distance(x, y))
    }

    fn distances_from(&self, x: usize) -> PyResult<Vec<u32>> {
        check_vertex(&self.inner, x)?;
        Ok(self.inner.distances_from(x))
    }

    /// Vertices at distance strictly less than `r` from `w`.
    fn open_ball(&self, w: usize, r: f64) -> PyResult<Vec<usize>> {
        check_vertex(&self.inner, w)?;
        Ok(self.inner.open_ball(w, r).into_vec())
    }

    #[pyo3(signature = (delta, pairs=None, seed=None))]
    fn manning<'py>(&self, py: Python<'py>, delta: f64, pairs: Option<&str>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        if delta.is_nan() || delta <= 0.0 {
            return Err(err("delta must be positive"));
        }
        let sel = selection(pairs, seed, self.inner.vertex_count(), false)?;
        to_py(py, &self.inner.check_manning_bp(delta, &sel))
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={})", self.inner.vertex_count(), self.inner.edge_count())
    }
}

/// A graph with a piece decomposition and bottleneck constant.
#[pyclass(name = "Structure", module = "treegrade")]
struct PyStructure {
    inner: RbpStructure,
}

#[pymethods]
impl PyStructure {
    #[new]
    #[pyo3(signature = (graph, pieces, m, base=0))]
    fn new(graph: &PyGraph, pieces: Vec<Vec<usize>>, m: u32, base: usize) -> PyResult<Self> {
        let d = PieceDecomposition::new(pieces.into_iter().map(PointSet::from).collect(), base).map_err(err)?;
        Ok(Self { inner: RbpStructure::new(graph.inner.clone(), d, m).map_err(err)? })
    }

    /// Certificates read off a decomposition glued along a tree (M = 2).
    #[staticmethod]
    #[pyo3(signature = (graph, pieces, base=0))]
    fn certify(graph: &PyGraph, pieces: Vec<Vec<usize>>, base: usize) -> PyResult<Self> {
        let pieces: Vec<PointSet> = pieces.into_iter().map(PointSet::from).collect();
        Ok(Self { inner: tree_graded_certificate(&graph.inner, &pieces, base).map_err(err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (graph, pieces_json, m=None))]
    fn from_json(graph: &PyGraph, pieces_json: &str, m: Option<u32>) -> PyResult<Self> {
        let loaded = io::read_pieces(pieces_json, &graph.inner).map_err(err)?;
        let m = m.or(loaded.constant).ok_or_else(|| err("no bottleneck constant given"))?;
        Ok(Self { inner: loaded.into_structure(graph.inner.clone(), m).map_err(err)? })
    }

    fn to_json(&self) -> String {
        io::write_structure(&self.inner)
    }

    #[getter]
    fn m(&self) -> u32 {
        self.inner.m()
    }

    #[getter]
    fn piece_count(&self) -> usize {
        self.inner.piece_count()
    }

    #[getter]
    fn graph(&self) -> PyGraph {
        PyGraph { inner: self.inner.graph.clone() }
    }

    fn piece(&self, i: usize) -> PyResult<Vec<usize>> {
        if i >= self.inner.piece_count() {
            return Err(PyIndexError::new_err(format!("piece {i} out of range")));
        }
        Ok(self.inner.piece(i).iter().collect())
    }

    /// Search for missing chains; returns the pairs still without one.
    fn complete_certificates(&mut self) -> Vec<(usize, usize)> {
        complete_certificates(&mut self.inner)
    }

    #[pyo3(signature = (pairs=None, seed=None))]
    fn verify<'py>(&self, py: Python<'py>, pairs: Option<&str>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let sel = selection(pairs, seed, self.inner.piece_count(), false)?;
        to_py(py, &verify_rbp(&self.inner, &sel))
    }

    /// Build T(X). `cut_check` is the radius bound of the small-cut check.
    #[pyo3(signature = (r=None, cut_check=None))]
    fn build(&self, r: Option<u32>, cut_check: Option<u32>) -> PyResult<PyTreeGraded> {
        let mut s = self.inner.clone();
        if s.private_base_vertex().is_none() && s.basepoint.is_none() {
            s = attach_basepoint(&s);
        }
        let missing = complete_certificates(&mut s);
        if !missing.is_empty() {
            return Err(err(format!("no verified chain for piece pairs {missing:?}")));
        }
        let state = construct(&s, &ConstructionConfig { r, cut_check, checks: true }).map_err(err)?;
        let space = build_tree_graded(&state).map_err(err)?;
        Ok(PyTreeGraded { space, state: Some(state) })
    }

    fn __repr__(&self) -> String {
        format!(
            "Structure(vertices={}, pieces={}, M={})",
            self.inner.graph.vertex_count(),
            self.inner.piece_count(),
            self.inner.m()
        )
    }
}

/// A tree-graded graph, optionally remembering the construction it came from.
#[pyclass(name = "TreeGraded", module = "treegrade")]
struct PyTreeGraded {
    space: TreeGradedSpace,
    state: Option<ConstructionState>,
}

#[pymethods]
impl PyTreeGraded {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { space: io::read_tree_graded(text).map_err(err)?, state: None })
    }

    fn to_json(&self) -> String {
        io::write_tree_graded(&self.space)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.space.vertex_count()
    }

    #[getter]
    fn piece_count(&self) -> usize {
        self.space.piece_count()
    }

    #[getter]
    fn graph(&self) -> PyGraph {
        PyGraph { inner: self.space.realized.clone() }
    }

    fn piece(&self, i: usize) -> PyResult<Vec<usize>> {
        self.space.pieces.get(i).map(|p| p.iter().collect()).ok_or_else(|| PyIndexError::new_err(format!("piece {i} out of range")))
    }

    fn distance(&self, u: usize, v: usize) -> PyResult<u32> {
        check_vertex(&self.space.realized, u)?;
        check_vertex(&self.space.realized, v)?;
        Ok(self.space.tg_distance_vertices(u, v))
    }

    /// The collapse map onto the input graph, as a list indexed by vertex.
    fn collapse(&self) -> PyResult<Vec<usize>> {
        let state = self.state.as_ref().ok_or_else(|| err("loaded from a document; no construction to collapse onto"))?;
        let phi = collapse(&self.space, state).map_err(err)?;
        Ok((0..self.space.vertex_count()).map(|v| phi.apply(v)).collect())
    }

    fn check<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &verify_tree_graded(&self.space))
    }

    #[pyo3(signature = (pairs=None, seed=None))]
    fn distortion<'py>(&self, py: Python<'py>, pairs: Option<&str>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let state = self.state.as_ref().ok_or_else(|| err("loaded from a document; no construction to measure against"))?;
        let phi = collapse(&self.space, state).map_err(err)?;
        let sel = selection(pairs, seed, self.space.vertex_count(), true)?;
        to_py(py, &measure_distortion(&self.space, &phi, state.graph(), state.m(), &sel))
    }

    /// Replace pieces by products of trees and measure the coordinate collapses.
    #[pyo3(signature = (pairs=None, seed=None))]
    fn embed<'py>(&self, py: Python<'py>, pairs: Option<&str>, seed: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
        let embeds = default_embeddings(&self.space).map_err(err)?;
        let ps = replace_pieces(&self.space, &embeds).map_err(err)?;
        let coords = coordinate_trees(&ps).map_err(err)?;
        let sel = selection(pairs, seed, ps.space.vertex_count(), true)?;
        let composite = selection(pairs, seed, self.space.vertex_count(), true)?;
        to_py(py, &measure_embedding(&self.space, &ps, &coords, &sel, &composite))
    }

    fn __repr__(&self) -> String {
        format!("TreeGraded(vertices={}, pieces={})", self.space.vertex_count(), self.space.piece_count())
    }
}

/// Run a generator spec (a JSON string). Graph families return
/// `(Graph, pieces)`; `random_tree_graded` returns a `TreeGraded`.
#[pyfunction]
fn generate<'py>(py: Python<'py>, spec: &str) -> PyResult<Bound<'py, PyAny>> {
    let spec: GeneratorSpec = serde_json::from_str(spec).map_err(err)?;
    if let GeneratorSpec::RandomTreeGraded { pieces, min_size, max_size, max_arc, seed } = spec {
        if pieces == 0 || min_size < 3 || min_size > max_size || max_arc == 0 {
            return Err(err("random_tree_graded needs pieces >= 1, 3 <= min_size <= max_size and max_arc >= 1"));
        }
        let t = gen_random_tree_graded(pieces, min_size, max_size, max_arc, seed);
        return Ok(Bound::new(py, PyTreeGraded { space: t, state: None })?.into_any());
    }
    let inst = gen_instance(&spec).ok_or_else(|| err("spec does not produce a graph"))?;
    let pieces: Vec<Vec<usize>> = inst.decomposition.pieces().iter().map(|p| p.iter().collect()).collect();
    let g = Bound::new(py, PyGraph { inner: inst.graph })?;
    Ok(PyTuple::new(py, [g.into_any(), pieces.into_pyobject(py)?.into_any()])?.into_any())
}

#[pymodule]
#[pyo3(name = "treegrade")]
fn treegrade_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyStructure>()?;
    m.add_class::<PyTreeGraded>()?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
