//! Python bindings: frames, viewport geometry, quality features,
//! temporal pooling, evaluation criteria, and the fusion regressors.
//!
//! Build with `cargo build --release -p vq360-python`; the smoke test
//! in `python/smoke_test.py` shows how to load and drive the module.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use vq360_core::error::Error;
use vq360_core::eval;
use vq360_core::frame::LumaFrame;
use vq360_core::geometry;
use vq360_core::metrics::{self, FeatureId, Polarity};
use vq360_core::pooling::{self, PoolingConfig};
use vq360_core::regress::{self, Hyperparams, ModelKind, TrainingRow, TrainingSet};

fn py_err(err: Error) -> PyErr {
    match err {
        Error::Io { .. } | Error::TruncatedFile { .. } | Error::DanglingPath { .. } => {
            PyIOError::new_err(err.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A single-channel intensity plane.
#[pyclass(name = "Frame", skip_from_py_object)]
#[derive(Clone)]
struct PyFrame {
    inner: LumaFrame,
}

#[pymethods]
impl PyFrame {
    /// Row-major samples, length width * height.
    #[new]
    #[pyo3(signature = (width, height, samples, bit_depth = 8))]
    fn new(width: usize, height: usize, samples: Vec<f32>, bit_depth: u8) -> PyResult<Self> {
        if samples.len() != width * height {
            return Err(PyValueError::new_err(format!(
                "expected {} samples, got {}",
                width * height,
                samples.len()
            )));
        }
        Ok(PyFrame {
            inner: LumaFrame::new(width, height, bit_depth, samples),
        })
    }

    #[staticmethod]
    #[pyo3(signature = (width, height, value, bit_depth = 8))]
    fn constant(width: usize, height: usize, value: f32, bit_depth: u8) -> Self {
        PyFrame {
            inner: LumaFrame::constant(width, height, bit_depth, value),
        }
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn bit_depth(&self) -> u8 {
        self.inner.bit_depth()
    }

    fn samples(&self) -> Vec<f32> {
        self.inner.samples().to_vec()
    }

    fn get(&self, x: usize, y: usize) -> f32 {
        self.inner.get(x, y)
    }

    fn __repr__(&self) -> String {
        format!(
            "Frame({}x{}, {}-bit)",
            self.inner.width(),
            self.inner.height(),
            self.inner.bit_depth()
        )
    }
}

/// A fixed set of gnomonic viewports.
#[pyclass(name = "Pattern", skip_from_py_object)]
#[derive(Clone)]
struct PyPattern {
    inner: geometry::SamplingPattern,
}

#[pymethods]
impl PyPattern {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    /// (azimuth, elevation) of each viewport center, radians.
    fn directions(&self) -> Vec<(f64, f64)> {
        self.inner
            .specs
            .iter()
            .map(|s| (s.center.azimuth, s.center.elevation))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "Pattern({}, {} viewports)",
            self.inner.kind.name(),
            self.inner.len()
        )
    }
}

/// Build the uniform / tropical / equatorial sampling pattern.
#[pyfunction]
#[pyo3(signature = (kind, fov_deg, width, height))]
fn make_pattern(kind: &str, fov_deg: f64, width: usize, height: usize) -> PyResult<PyPattern> {
    let kind: geometry::PatternKind = kind.parse().map_err(PyValueError::new_err)?;
    Ok(PyPattern {
        inner: geometry::make_pattern(kind, fov_deg, width, height).map_err(py_err)?,
    })
}

/// Render one viewport of a pattern from an ERP frame.
#[pyfunction]
fn render_viewport(erp: &PyFrame, pattern: &PyPattern, index: usize) -> PyResult<PyFrame> {
    let spec = pattern
        .inner
        .specs
        .get(index)
        .ok_or_else(|| PyValueError::new_err(format!("viewport index {index} out of range")))?;
    Ok(PyFrame {
        inner: geometry::render_viewport(&erp.inner, spec),
    })
}

/// Tile every viewport of a pattern into the collage frame.
#[pyfunction]
fn render_collage(erp: &PyFrame, pattern: &PyPattern) -> PyFrame {
    PyFrame {
        inner: geometry::render_collage(&erp.inner, &pattern.inner),
    }
}

macro_rules! pair_metric {
    ($name:ident, $func:path) => {
        #[pyfunction]
        fn $name(reference: &PyFrame, distorted: &PyFrame) -> PyResult<f64> {
            Ok($func(&reference.inner, &distorted.inner)
                .map_err(py_err)?
                .value)
        }
    };
}

pair_metric!(psnr, metrics::psnr);
pair_metric!(psnr_hvs, metrics::psnr_hvs);
pair_metric!(psnr_hvs_m, metrics::psnr_hvs_m);
pair_metric!(ssim, metrics::ssim);
pair_metric!(ms_ssim, metrics::ms_ssim);
pair_metric!(gmsd, metrics::gmsd);
pair_metric!(spatial_activity, metrics::spatial_activity);
pair_metric!(ws_psnr, metrics::ws_psnr);

/// Spherically-uniform PSNR over `n_points` lattice samples.
#[pyfunction]
#[pyo3(signature = (reference, distorted, n_points = 655_362))]
fn s_psnr(reference: &PyFrame, distorted: &PyFrame, n_points: usize) -> PyResult<f64> {
    Ok(
        metrics::s_psnr(&reference.inner, &distorted.inner, n_points)
            .map_err(py_err)?
            .value,
    )
}

/// Standard deviation of the inter-frame difference.
#[pyfunction]
fn temporal_information(curr: &PyFrame, prev: &PyFrame) -> PyResult<f64> {
    metrics::temporal_information(&curr.inner, &prev.inner).map_err(py_err)
}

/// Relative temporal-information change over a frame-pair window.
#[pyfunction]
fn relative_ti(
    ref_curr: &PyFrame,
    ref_prev: &PyFrame,
    dist_curr: &PyFrame,
    dist_prev: &PyFrame,
) -> PyResult<f64> {
    let w = metrics::FramePairWindow::new(
        &ref_curr.inner,
        &ref_prev.inner,
        &dist_curr.inner,
        &dist_prev.inner,
    )
    .map_err(py_err)?;
    Ok(metrics::relative_ti(&w).map_err(py_err)?.value)
}

/// GMSD between the signed inter-frame differences of both streams.
#[pyfunction]
fn temporal_gmsd(
    ref_curr: &PyFrame,
    ref_prev: &PyFrame,
    dist_curr: &PyFrame,
    dist_prev: &PyFrame,
) -> PyResult<f64> {
    let w = metrics::FramePairWindow::new(
        &ref_curr.inner,
        &ref_prev.inner,
        &dist_curr.inner,
        &dist_prev.inner,
    )
    .map_err(py_err)?;
    Ok(metrics::temporal_gmsd(&w).map_err(py_err)?.value)
}

/// HVS temporal pooling: asymmetric low-pass recursion plus an
/// exponentially recency-weighted average.
#[pyfunction]
#[pyo3(signature = (series, alpha = 0.03, beta = 0.2, tau = None))]
fn hvs_pool(series: Vec<f64>, alpha: f64, beta: f64, tau: Option<f64>) -> PyResult<f64> {
    let cfg = PoolingConfig {
        alpha,
        beta,
        tau,
        ..PoolingConfig::default()
    };
    pooling::hvs_pool(&series, &cfg).map_err(py_err)
}

#[pyfunction]
fn mean_pool(series: Vec<f64>) -> PyResult<f64> {
    pooling::mean_pool(&series).map_err(py_err)
}

#[pyfunction]
fn minkowski_pool(series: Vec<f64>, p: f64) -> PyResult<f64> {
    pooling::minkowski_pool(&series, p).map_err(py_err)
}

/// Mean of the worst k percent; `higher_better` selects which tail is
/// worst.
#[pyfunction]
#[pyo3(signature = (series, k_percent = 10.0, higher_better = true))]
fn percentile_pool(series: Vec<f64>, k_percent: f64, higher_better: bool) -> PyResult<f64> {
    let polarity = if higher_better {
        Polarity::HigherBetter
    } else {
        Polarity::HigherWorse
    };
    pooling::percentile_pool(&series, k_percent, polarity).map_err(py_err)
}

#[pyfunction]
fn plcc(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    eval::plcc(&x, &y).map_err(py_err)
}

#[pyfunction]
fn srocc(x: Vec<f64>, y: Vec<f64>) -> PyResult<f64> {
    eval::srocc(&x, &y).map_err(py_err)
}

#[pyfunction]
fn rmse(pred: Vec<f64>, target: Vec<f64>) -> PyResult<f64> {
    eval::rmse(&pred, &target).map_err(py_err)
}

/// Fit the 4-parameter logistic mapping; returns (b1, b2, b3, b4).
#[pyfunction]
fn fit_logistic4(scores: Vec<f64>, dmos: Vec<f64>) -> PyResult<(f64, f64, f64, f64)> {
    let p = eval::fit_logistic4(&scores, &dmos, None).map_err(py_err)?;
    Ok((p.beta1, p.beta2, p.beta3, p.beta4))
}

/// Apply a fitted logistic mapping to raw scores.
#[pyfunction]
fn logistic4_map(params: (f64, f64, f64, f64), scores: Vec<f64>) -> Vec<f64> {
    let p = eval::Logistic4Params {
        beta1: params.0,
        beta2: params.1,
        beta3: params.2,
        beta4: params.3,
    };
    p.map_all(&scores)
}

/// A trained fusion regressor.
#[pyclass(name = "Model")]
struct PyModel {
    inner: regress::QualityModel,
}

#[pymethods]
impl PyModel {
    /// Train on rows of (features, dmos, group_id).
    #[staticmethod]
    #[pyo3(signature = (features, dmos, groups, kind = "rfr", seed = 7, n_trees = 300))]
    fn train(
        features: Vec<Vec<f64>>,
        dmos: Vec<f64>,
        groups: Vec<String>,
        kind: &str,
        seed: u64,
        n_trees: usize,
    ) -> PyResult<Self> {
        if features.len() != dmos.len() || features.len() != groups.len() {
            return Err(PyValueError::new_err(
                "features/dmos/groups length mismatch",
            ));
        }
        let rows: Vec<TrainingRow> = features
            .into_iter()
            .zip(dmos)
            .zip(groups)
            .enumerate()
            .map(|(i, ((features, dmos), group_id))| TrainingRow {
                video_id: format!("row{i}"),
                group_id,
                features,
                dmos,
            })
            .collect();
        let d = rows.first().map_or(0, |r| r.features.len());
        let set = TrainingSet::new(rows).map_err(py_err)?;
        let kind: ModelKind = kind.parse().map_err(PyValueError::new_err)?;
        let hyperparams = match kind {
            ModelKind::Rfr => Hyperparams::Rfr(regress::ForestParams {
                n_trees,
                ..regress::ForestParams::default()
            }),
            other => Hyperparams::default_for(other),
        };
        let layout: Vec<String> = (0..d).map(|i| format!("f{i}")).collect();
        Ok(PyModel {
            inner: regress::train(&set, kind, &hyperparams, seed, layout).map_err(py_err)?,
        })
    }

    fn predict(&self, features: Vec<f64>) -> PyResult<f64> {
        self.inner.predict(&features).map_err(py_err)
    }

    fn to_json(&self) -> String {
        self.inner.to_json()
    }

    #[staticmethod]
    fn from_json(json: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: regress::QualityModel::from_json(json).map_err(py_err)?,
        })
    }

    fn save(&self, path: &str) -> PyResult<()> {
        self.inner.save(std::path::Path::new(path)).map_err(py_err)
    }

    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        Ok(PyModel {
            inner: regress::QualityModel::load(std::path::Path::new(path)).map_err(py_err)?,
        })
    }

    fn __repr__(&self) -> String {
        format!(
            "Model({:?}, {} features)",
            self.inner.kind,
            self.inner.feature_layout.len()
        )
    }
}

/// Names of the features fused by the default model.
#[pyfunction]
fn default_features() -> Vec<&'static str> {
    FeatureId::DEFAULT_SET.iter().map(|id| id.name()).collect()
}

#[pymodule]
fn vq360(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyFrame>()?;
    m.add_class::<PyPattern>()?;
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(make_pattern, m)?)?;
    m.add_function(wrap_pyfunction!(render_viewport, m)?)?;
    m.add_function(wrap_pyfunction!(render_collage, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(psnr_hvs, m)?)?;
    m.add_function(wrap_pyfunction!(psnr_hvs_m, m)?)?;
    m.add_function(wrap_pyfunction!(ssim, m)?)?;
    m.add_function(wrap_pyfunction!(ms_ssim, m)?)?;
    m.add_function(wrap_pyfunction!(gmsd, m)?)?;
    m.add_function(wrap_pyfunction!(spatial_activity, m)?)?;
    m.add_function(wrap_pyfunction!(ws_psnr, m)?)?;
    m.add_function(wrap_pyfunction!(s_psnr, m)?)?;
    m.add_function(wrap_pyfunction!(temporal_information, m)?)?;
    m.add_function(wrap_pyfunction!(relative_ti, m)?)?;
    m.add_function(wrap_pyfunction!(temporal_gmsd, m)?)?;
    m.add_function(wrap_pyfunction!(hvs_pool, m)?)?;
    m.add_function(wrap_pyfunction!(mean_pool, m)?)?;
    m.add_function(wrap_pyfunction!(minkowski_pool, m)?)?;
    m.add_function(wrap_pyfunction!(percentile_pool, m)?)?;
    m.add_function(wrap_pyfunction!(plcc, m)?)?;
    m.add_function(wrap_pyfunction!(srocc, m)?)?;
    m.add_function(wrap_pyfunction!(rmse, m)?)?;
    m.add_function(wrap_pyfunction!(fit_logistic4, m)?)?;
    m.add_function(wrap_pyfunction!(logistic4_map, m)?)?;
    m.add_function(wrap_pyfunction!(default_features, m)?)?;
    Ok(())
}
