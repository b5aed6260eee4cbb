//! Python bindings for the wfc-terrain pipeline.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::{PyBytes, PyDict};

use wfc_terrain::gradient::{self, Transform};
use wfc_terrain::raster_io::{self, SyntheticKind, TileId};
use wfc_terrain::reconstruct;
use wfc_terrain::stats::{self, MagnitudeMode};
use wfc_terrain::wfc::{self, DEFAULT_MAX_RESTARTS};
use wfc_terrain::{Error, Grid};

create_exception!(wfc_terrain_py, TerrainError, PyException);
create_exception!(wfc_terrain_py, GenerationFailed, TerrainError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::GenerationFailed { attempts } => {
            GenerationFailed::new_err(format!("all {attempts} attempts ended in contradiction"))
        }
        other => TerrainError::new_err(other.to_string()),
    }
}

fn grid_from(rows: Vec<Vec<i32>>) -> PyResult<Grid<i32>> {
    Grid::from_rows(&rows).ok_or_else(|| TerrainError::new_err("ragged rows"))
}

#[pyclass(name = "HeightMap", module = "wfc_terrain_py", from_py_object)]
#[derive(Clone)]
pub struct PyHeightMap {
    inner: raster_io::HeightMap,
}

#[pymethods]
impl PyHeightMap {
    #[new]
    #[pyo3(signature = (rows, nodata = raster_io::DEFAULT_NODATA))]
    fn new(rows: Vec<Vec<i32>>, nodata: i32) -> PyResult<Self> {
        let inner = raster_io::HeightMap::with_nodata(grid_from(rows)?, nodata).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    /// Synthetic fixture: kind is "ramp", "sine" or "random-walk".
    #[staticmethod]
    #[pyo3(signature = (kind, rows, cols, seed = 0))]
    fn synthetic(kind: &str, rows: usize, cols: usize, seed: u64) -> PyResult<Self> {
        let kind: SyntheticKind = kind.parse().map_err(to_py)?;
        let inner = raster_io::synthetic_terrain(kind, rows, cols, seed).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    #[staticmethod]
    fn from_hgt(data: &[u8], tile: &str) -> PyResult<Self> {
        let tile: TileId = tile.parse().map_err(to_py)?;
        let inner = raster_io::parse_hgt(data, tile).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    #[staticmethod]
    fn from_ascii(text: &str) -> PyResult<Self> {
        let inner = raster_io::read_ascii_grid(text).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    fn to_ascii(&self) -> String {
        raster_io::write_ascii_grid(&self.inner)
    }

    fn to_pgm<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &raster_io::render_pgm(&self.inner))
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn to_list(&self) -> Vec<Vec<i32>> {
        self.inner.to_rows()
    }

    fn window(&self, row: usize, col: usize, height: usize, width: usize) -> PyResult<Self> {
        let inner = raster_io::window(&self.inner, row, col, height, width).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    fn downsample(&self, factor: usize) -> PyResult<Self> {
        let inner = raster_io::downsample_bilinear(&self.inner, factor).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    /// transform is one of "identity", "hflip", "vflip", "rot180".
    fn transform(&self, transform: &str) -> PyResult<Self> {
        let t: Transform = transform.parse().map_err(to_py)?;
        Ok(PyHeightMap {
            inner: gradient::transform_heightmap(&self.inner, t),
        })
    }

    fn gradients(&self) -> PyResult<PyGradientField> {
        let inner = gradient::compute_gradients(&self.inner).map_err(to_py)?;
        Ok(PyGradientField { inner })
    }

    fn __repr__(&self) -> String {
        format!("HeightMap({}x{})", self.inner.rows(), self.inner.cols())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "GradientField", module = "wfc_terrain_py", from_py_object)]
#[derive(Clone)]
pub struct PyGradientField {
    inner: gradient::GradientField,
}

#[pymethods]
impl PyGradientField {
    #[new]
    fn new(gx: Vec<Vec<i32>>, gy: Vec<Vec<i32>>) -> PyResult<Self> {
        let inner = gradient::GradientField::new(grid_from(gx)?, grid_from(gy)?).map_err(to_py)?;
        Ok(PyGradientField { inner })
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn gx(&self) -> Vec<Vec<i32>> {
        self.inner.gx().to_rows()
    }

    fn gy(&self) -> Vec<Vec<i32>> {
        self.inner.gy().to_rows()
    }

    /// Returns (max_abs_residual, violation_count).
    fn curl_residual(&self) -> (i64, usize) {
        let r = reconstruct::curl_residual(&self.inner);
        (r.max_abs_residual, r.violation_count)
    }

    #[pyo3(signature = (base_height = 0))]
    fn integrate(&self, base_height: i32) -> PyResult<PyHeightMap> {
        let inner = reconstruct::integrate(&self.inner, base_height).map_err(to_py)?;
        Ok(PyHeightMap { inner })
    }

    fn slope_magnitude(&self) -> Vec<Vec<f64>> {
        stats::slope_magnitude(&self.inner).to_rows()
    }

    fn __repr__(&self) -> String {
        format!("GradientField({}x{})", self.inner.rows(), self.inner.cols())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyclass(name = "Model", module = "wfc_terrain_py", frozen)]
pub struct PyModel {
    inner: wfc::Model,
}

#[pymethods]
impl PyModel {
    /// Learns patterns from heightmaps under the given transforms
    /// (default: identity, hflip, vflip, rot180).
    #[staticmethod]
    #[pyo3(signature = (heightmaps, transforms = None))]
    fn train(heightmaps: Vec<PyHeightMap>, transforms: Option<Vec<String>>) -> PyResult<Self> {
        let transforms: Vec<Transform> = match transforms {
            Some(names) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<_, _>>()
                .map_err(to_py)?,
            None => Transform::ALL.to_vec(),
        };
        let mut fields = Vec::new();
        for hm in &heightmaps {
            fields.extend(gradient::training_set(&hm.inner, &transforms).map_err(to_py)?);
        }
        let inner = wfc::Model::from_fields(&fields).map_err(to_py)?;
        Ok(PyModel { inner })
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        let inner = wfc::Model::from_text(text).map_err(to_py)?;
        Ok(PyModel { inner })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn pattern_count(&self) -> usize {
        self.inner.catalog().len()
    }

    #[getter]
    fn rule_count(&self) -> usize {
        self.inner.rules().rule_count()
    }

    /// Generates a `(rows+1) x (cols+1)` field from a `rows x cols` cell grid.
    /// Returns `(field, winning_attempt_index)`.
    #[pyo3(signature = (rows, cols, seed = 0, max_restarts = DEFAULT_MAX_RESTARTS, parallel_attempts = 1))]
    fn generate(
        &self,
        py: Python<'_>,
        rows: usize,
        cols: usize,
        seed: u64,
        max_restarts: u32,
        parallel_attempts: usize,
    ) -> PyResult<(PyGradientField, u32)> {
        let model = &self.inner;
        let out = py
            .detach(|| {
                wfc::generate_parallel(model, rows, cols, seed, max_restarts, parallel_attempts)
            })
            .map_err(to_py)?;
        Ok((PyGradientField { inner: out.field }, out.attempt))
    }

    fn __repr__(&self) -> String {
        format!(
            "Model(patterns={}, rules={})",
            self.inner.catalog().len(),
            self.inner.rules().rule_count()
        )
    }
}

/// Slope statistics of `input` vs `output`, keyed like the CLI JSON report.
#[pyfunction]
#[pyo3(signature = (input, output, bins = stats::DEFAULT_BINS, mode = "euclidean"))]
fn compare<'py>(
    py: Python<'py>,
    input: &PyGradientField,
    output: &PyGradientField,
    bins: usize,
    mode: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let mode: MagnitudeMode = mode.parse().map_err(to_py)?;
    let r = stats::compare_with_mode(&input.inner, &output.inner, bins, mode).map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("mean_in", r.input.mean)?;
    d.set_item("mean_out", r.output.mean)?;
    d.set_item("median_in", r.input.median)?;
    d.set_item("median_out", r.output.median)?;
    d.set_item("std_in", r.input.std)?;
    d.set_item("std_out", r.output.std)?;
    d.set_item("n_in", r.input.n)?;
    d.set_item("n_out", r.output.n)?;
    d.set_item("bin_edges", r.histogram.bin_edges)?;
    d.set_item("counts_in", r.histogram.counts_in)?;
    d.set_item("counts_out", r.histogram.counts_out)?;
    d.set_item("intersection_score", r.histogram.intersection_score)?;
    Ok(d)
}

#[pymodule]
fn wfc_terrain_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyHeightMap>()?;
    m.add_class::<PyGradientField>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(compare, m)?)?;
    m.add("TerrainError", m.py().get_type::<TerrainError>())?;
    m.add("GenerationFailed", m.py().get_type::<GenerationFailed>())?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
