//! Python bindings: mesh generation/loading, scalar fields, Reeb graphs,
//! arc embedding and metric evaluation.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use gasp_core::field::{geodesic_field, height_field};
use gasp_core::gasp::{embed_all, EmbeddedReebGraph, GaspMode, GaspParams};
use gasp_core::gb::{gb_embed, GbParams};
use gasp_core::mesh::{generate, load_mesh, write_obj, SpatialIndex};
use gasp_core::metrics::evaluate;
use gasp_core::reeb::compute_reeb_graph;
use gasp_core::{FieldSpec, GaspError, ScalarField, TriangleMesh};

fn err(e: GaspError) -> PyErr {
    match e {
        GaspError::Input(_) | GaspError::Io(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(frozen)]
struct Mesh {
    inner: TriangleMesh,
}

#[pymethods]
impl Mesh {
    #[staticmethod]
    #[pyo3(signature = (shape, resolution=48))]
    fn generate(shape: &str, resolution: u32) -> PyResult<Mesh> {
        let s = shape.parse().map_err(err)?;
        Ok(Mesh { inner: generate(s, resolution).map_err(err)? })
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Mesh> {
        Ok(Mesh { inner: load_mesh(path).map_err(err)? })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        write_obj(path, &self.inner).map_err(err)
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertices.len()
    }

    #[getter]
    fn triangle_count(&self) -> usize {
        self.inner.triangles.len()
    }

    #[getter]
    fn euler_characteristic(&self) -> i64 {
        self.inner.euler_characteristic()
    }

    #[getter]
    fn is_closed(&self) -> bool {
        self.inner.is_closed()
    }

    #[getter]
    fn genus(&self) -> Option<i64> {
        self.inner.genus()
    }

    /// Scalar field from a spec like "z" or "geo:top", perturbed to distinct
    /// vertex values.
    fn field(&self, spec: &str) -> PyResult<Field> {
        let parsed: FieldSpec = spec.parse().map_err(err)?;
        let values = match parsed {
            FieldSpec::Height(axis) => height_field(&self.inner, axis),
            FieldSpec::Geodesic(dir) => geodesic_field(&self.inner, dir).map_err(err)?,
        };
        Ok(Field { values: values.perturb_distinct(), spec: parsed })
    }

    fn __repr__(&self) -> String {
        format!(
            "Mesh({} vertices, {} triangles, chi={})",
            self.inner.vertices.len(),
            self.inner.triangles.len(),
            self.inner.euler_characteristic()
        )
    }
}

#[pyclass(frozen)]
struct Field {
    values: ScalarField,
    spec: FieldSpec,
}

#[pymethods]
impl Field {
    #[getter]
    fn label(&self) -> &'static str {
        self.spec.label()
    }

    #[getter]
    fn range(&self) -> (f64, f64) {
        self.values.range()
    }
}

#[pyclass(frozen)]
struct Reeb {
    inner: gasp_core::reeb::ReebGraph,
}

#[pymethods]
impl Reeb {
    #[getter]
    fn node_count(&self) -> usize {
        self.inner.nodes.len()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.inner.edges.len()
    }

    #[getter]
    fn loops(&self) -> usize {
        self.inner.loops()
    }

    fn nodes<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .nodes
            .iter()
            .map(|n| {
                let d = PyDict::new_bound(py);
                d.set_item("id", n.id)?;
                d.set_item("vertex", n.vertex)?;
                d.set_item("position", n.position.to_array())?;
                d.set_item("value", n.value)?;
                d.set_item("kind", n.kind.label())?;
                Ok(d)
            })
            .collect()
    }

    fn edges(&self) -> Vec<(u32, u32, u32)> {
        self.inner.edges.iter().map(|e| (e.src, e.dst, e.instance)).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Reeb({} nodes, {} edges, {} loops)",
            self.inner.nodes.len(),
            self.inner.edges.len(),
            self.inner.loops()
        )
    }
}

#[pyfunction]
fn compute_reeb(mesh: &Mesh, field: &Field) -> PyResult<Reeb> {
    Ok(Reeb { inner: compute_reeb_graph(&mesh.inner, &field.values).map_err(err)? })
}

#[pyclass(frozen)]
struct Embedding {
    inner: EmbeddedReebGraph,
    method: String,
}

#[pymethods]
impl Embedding {
    #[getter]
    fn method(&self) -> &str {
        &self.method
    }

    #[getter]
    fn arc_count(&self) -> usize {
        self.inner.arcs.len()
    }

    fn arcs<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .arcs
            .iter()
            .map(|a| {
                let d = PyDict::new_bound(py);
                d.set_item("edge", a.edge)?;
                d.set_item("kind", a.kind.label())?;
                d.set_item("points", a.points.iter().map(|p| p.to_array()).collect::<Vec<_>>())?;
                d.set_item("isovalues", a.isovalues.clone())?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Embedding({}, {} arcs)", self.method, self.inner.arcs.len())
    }
}

#[pyfunction]
#[pyo3(signature = (mesh, field, reeb, method="gasp-boundary", spacing=0.05, buffer=0.05,
    budget=40, refinements=2, bins=20, sampling=15, smoothing=15, threads=1))]
#[allow(clippy::too_many_arguments)]
fn embed(
    mesh: &Mesh,
    field: &Field,
    reeb: &Reeb,
    method: &str,
    spacing: f64,
    buffer: f64,
    budget: usize,
    refinements: u32,
    bins: u32,
    sampling: usize,
    smoothing: usize,
    threads: usize,
) -> PyResult<Embedding> {
    let inner = match method {
        "gasp-boundary" | "gasp-interior" => {
            let params = GaspParams {
                spacing,
                buffer,
                budget,
                refinements,
                bins,
                ..GaspParams::default()
            };
            let mode = if method == "gasp-boundary" {
                GaspMode::Boundary
            } else {
                GaspMode::Interior
            };
            embed_all(&mesh.inner, &field.values, &reeb.inner, &params, mode, threads)
        }
        "gb" => gb_embed(
            &mesh.inner,
            &field.values,
            &reeb.inner,
            &GbParams { sampling, smoothing, bins },
            threads,
        ),
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown method '{other}' (gasp-boundary | gasp-interior | gb)"
            )))
        }
    }
    .map_err(err)?;
    Ok(Embedding { inner, method: method.to_string() })
}

#[pyfunction]
#[pyo3(signature = (mesh, field, embedding, tolerance=1e-2, threads=1))]
fn measure<'py>(
    py: Python<'py>,
    mesh: &Mesh,
    field: &Field,
    embedding: &Embedding,
    tolerance: f64,
    threads: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let index = SpatialIndex::build(mesh.inner.clone());
    let report = evaluate(
        &index,
        &embedding.inner.arcs,
        &embedding.method,
        field.spec.label(),
        field.spec.is_height(),
        embedding.inner.arcs.len(),
        tolerance,
        threads,
    )
    .map_err(err)?;
    let json = serde_json::to_value(&report)
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new_bound(py);
    json_into(py, &json, &d)?;
    Ok(d)
}

fn json_into<'py>(
    py: Python<'py>,
    value: &serde_json::Value,
    out: &Bound<'py, PyDict>,
) -> PyResult<()> {
    let obj = value.as_object().expect("object");
    for (k, v) in obj {
        out.set_item(k, json_value(py, v)?)?;
    }
    Ok(())
}

fn json_value<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<PyObject> {
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_py(py),
        serde_json::Value::Number(n) => match n.as_u64() {
            Some(u) => u.into_py(py),
            None => n.as_f64().unwrap_or(f64::NAN).into_py(py),
        },
        serde_json::Value::String(s) => s.into_py(py),
        serde_json::Value::Array(items) => {
            let v: Vec<PyObject> =
                items.iter().map(|i| json_value(py, i)).collect::<PyResult<_>>()?;
            v.into_py(py)
        }
        serde_json::Value::Object(_) => {
            let d = PyDict::new_bound(py);
            json_into(py, value, &d)?;
            d.into_py(py)
        }
    })
}

#[pymodule]
fn gasp(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Mesh>()?;
    m.add_class::<Field>()?;
    m.add_class::<Reeb>()?;
    m.add_class::<Embedding>()?;
    m.add_function(wrap_pyfunction!(compute_reeb, m)?)?;
    m.add_function(wrap_pyfunction!(embed, m)?)?;
    m.add_function(wrap_pyfunction!(measure, m)?)?;
    Ok(())
}
