//! Python bindings. Structured results come back as plain dicts and lists
//! (the same JSON shapes the CLI writes); panels and averaged datasets are
//! wrapped as classes so they are parsed once and reused.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use smevor::{
    AveragedDataset, BBox, ClusterConfig, Error, IndicatorKind, IndicatorPanel, Point2D,
    SignFilter, StatConventions, SvgOptions,
};

fn py_err(e: Error) -> PyErr {
    let msg = format!("[{}] {e}", e.kind());
    match e {
        Error::Io { .. } => PyOSError::new_err(msg),
        _ => PyValueError::new_err(msg),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// Reads a snake_case enum name the way the JSON config does.
fn enum_arg<T: DeserializeOwned>(what: &str, name: &str) -> PyResult<T> {
    serde_json::from_value(Value::String(name.to_owned()))
        .map_err(|_| PyValueError::new_err(format!("unknown {what} `{name}`")))
}

fn kind_arg(name: &str) -> PyResult<IndicatorKind> {
    name.parse().map_err(py_err)
}

fn conventions(
    std: &str,
    moments: &str,
    kurtosis: &str,
    quartiles: &str,
) -> PyResult<StatConventions> {
    Ok(StatConventions {
        std: enum_arg("std convention", std)?,
        moments: enum_arg("moment convention", moments)?,
        kurtosis: enum_arg("kurtosis form", kurtosis)?,
        quartiles: enum_arg("quartile convention", quartiles)?,
    })
}

fn cluster_config(config_json: Option<&str>) -> PyResult<ClusterConfig> {
    match config_json {
        Some(text) => {
            let cfg: ClusterConfig = serde_json::from_str(text)
                .map_err(|e| PyValueError::new_err(format!("[config] {e}")))?;
            cfg.validate().map_err(py_err)?;
            Ok(cfg)
        }
        None => Ok(ClusterConfig::default()),
    }
}

/// Long-format indicator panel.
#[pyclass(name = "Panel", module = "pysmevor", skip_from_py_object)]
#[derive(Clone)]
struct PyPanel {
    inner: IndicatorPanel,
}

#[pymethods]
impl PyPanel {
    #[staticmethod]
    fn from_csv(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: smevor::parse_panel(text).map_err(py_err)?,
        })
    }

    /// The bundled synthetic 62-company panel.
    #[staticmethod]
    fn fixture() -> PyResult<Self> {
        Self::from_csv(smevor::fixture::BUNDLED_CSV)
    }

    #[getter]
    fn company_count(&self) -> usize {
        self.inner.company_count()
    }

    #[getter]
    fn observation_count(&self) -> usize {
        self.inner.observation_count()
    }

    fn company_ids(&self) -> Vec<u32> {
        self.inner.companies().map(|c| c.id).collect()
    }

    fn value(&self, company_id: u32, kind: &str, year: i32) -> PyResult<Option<f64>> {
        Ok(self.inner.value(company_id, kind_arg(kind)?, year))
    }

    fn to_csv(&self) -> String {
        self.inner.to_csv()
    }

    fn exclude(&self, ids: Vec<u32>) -> Self {
        Self {
            inner: smevor::exclude_companies(&self.inner, &ids).0,
        }
    }

    #[pyo3(signature = (innovation_years = vec![2006, 2007], performance_years = vec![2008, 2009, 2010]))]
    fn window_average(
        &self,
        innovation_years: Vec<i32>,
        performance_years: Vec<i32>,
    ) -> PyResult<PyDataset> {
        Ok(PyDataset {
            inner: smevor::window_average(&self.inner, &innovation_years, &performance_years)
                .map_err(py_err)?,
        })
    }

    /// Power-law fit of `kind` in `year_b` against `year_a` across companies.
    fn fit<'py>(
        &self,
        py: Python<'py>,
        kind: &str,
        year_a: i32,
        year_b: i32,
    ) -> PyResult<Bound<'py, PyAny>> {
        let kind = kind_arg(kind)?;
        let (xs, ys): (Vec<f64>, Vec<f64>) = self
            .inner
            .companies()
            .filter_map(|c| {
                Some((
                    self.inner.value(c.id, kind, year_a)?,
                    self.inner.value(c.id, kind, year_b)?,
                ))
            })
            .unzip();
        to_py(py, &smevor::power_law_fit(&xs, &ys).map_err(py_err)?)
    }

    fn __repr__(&self) -> String {
        format!(
            "Panel({} companies, {} observations)",
            self.inner.company_count(),
            self.inner.observation_count()
        )
    }
}

/// One row of windowed averages per complete company.
#[pyclass(name = "Dataset", module = "pysmevor", skip_from_py_object)]
#[derive(Clone)]
struct PyDataset {
    inner: AveragedDataset,
}

#[pymethods]
impl PyDataset {
    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn ids(&self) -> Vec<u32> {
        self.inner.ids()
    }

    fn dropped_ids(&self) -> Vec<u32> {
        self.inner.dropped.iter().map(|d| d.id).collect()
    }

    fn column(&self, kind: &str) -> PyResult<Vec<f64>> {
        Ok(self.inner.column(kind_arg(kind)?))
    }

    fn without(&self, ids: Vec<u32>) -> Self {
        Self {
            inner: self.inner.without(&ids),
        }
    }

    #[pyo3(signature = (kind, std = "sample", moments = "moment_ratio", kurtosis = "excess", quartiles = "linear"))]
    fn describe<'py>(
        &self,
        py: Python<'py>,
        kind: &str,
        std: &str,
        moments: &str,
        kurtosis: &str,
        quartiles: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let conv = conventions(std, moments, kurtosis, quartiles)?;
        let stats = smevor::describe(&self.inner.column(kind_arg(kind)?), conv).map_err(py_err)?;
        to_py(py, &stats)
    }

    /// Min-max normalized rows keyed by company id.
    fn normalize<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let nd = smevor::normalize(&self.inner).map_err(py_err)?;
        let rows: BTreeMap<u32, BTreeMap<IndicatorKind, f64>> = nd
            .ids
            .iter()
            .zip(&nd.values)
            .map(|(&id, row)| {
                (
                    id,
                    IndicatorKind::ALL
                        .iter()
                        .map(|&k| (k, row[k.index()]))
                        .collect(),
                )
            })
            .collect();
        to_py(py, &rows)
    }

    /// Assignment, cross-tab and collapse diagnosis. `config` is the
    /// cluster section of a run configuration as a JSON string.
    #[pyo3(signature = (config = None, resolve_collapse = false))]
    fn cluster<'py>(
        &self,
        py: Python<'py>,
        config: Option<&str>,
        resolve_collapse: bool,
    ) -> PyResult<Bound<'py, PyAny>> {
        let cfg = cluster_config(config)?;
        let params = cfg.collapse.unwrap_or_default();
        let (nd, removed) = if resolve_collapse {
            let out = smevor::resolve_collapse(&self.inner, &cfg, params).map_err(py_err)?;
            (out.normalized, out.removed)
        } else {
            (smevor::normalize(&self.inner).map_err(py_err)?, Vec::new())
        };
        let assignment = smevor::assign_clusters(&nd, &cfg).map_err(py_err)?;
        let crosstab = smevor::cross_tabulate(&assignment, cfg.h(), cfg.k()).map_err(py_err)?;
        let diagnosis = smevor::detect_collapse(&assignment, &nd, &cfg, params).map_err(py_err)?;
        let pairs: Vec<(u32, usize, usize)> = assignment.pairs();
        to_py(
            py,
            &serde_json::json!({
                "pairs": pairs,
                "crosstab": crosstab,
                "diagnosis": diagnosis,
                "removed": removed,
            }),
        )
    }

    #[pyo3(signature = (kind, k = 2.0, std = "sample"))]
    fn sigma_band<'py>(
        &self,
        py: Python<'py>,
        kind: &str,
        k: f64,
        std: &str,
    ) -> PyResult<Bound<'py, PyAny>> {
        let conv = StatConventions {
            std: enum_arg("std convention", std)?,
            ..StatConventions::default()
        };
        to_py(
            py,
            &smevor::sigma_band_flags(&self.inner, kind_arg(kind)?, k, conv).map_err(py_err)?,
        )
    }

    /// Companies that are outliers in one direction on at least
    /// `min_count` performance indicators.
    #[pyo3(signature = (k = 2.0, min_count = 2))]
    fn systematic_outliers<'py>(
        &self,
        py: Python<'py>,
        k: f64,
        min_count: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let reports = IndicatorKind::PERFORMANCE
            .iter()
            .map(|&kind| smevor::sigma_band_flags(&self.inner, kind, k, StatConventions::default()))
            .collect::<Result<Vec<_>, _>>()
            .map_err(py_err)?;
        to_py(
            py,
            &smevor::classify_systematic(&reports, min_count).map_err(py_err)?,
        )
    }

    /// Voronoi diagram of `(log10 |x|, log10 |y|)`, plus the SVG rendering.
    #[pyo3(signature = (x = "TTA", y = "ROI", sign = "pos", highlight = Vec::new()))]
    fn voronoi_map<'py>(
        &self,
        py: Python<'py>,
        x: &str,
        y: &str,
        sign: &str,
        highlight: Vec<u32>,
    ) -> PyResult<Bound<'py, PyAny>> {
        let sign: SignFilter = sign.parse().map_err(py_err)?;
        let projection =
            smevor::log_project(&self.inner, kind_arg(x)?, kind_arg(y)?, sign).map_err(py_err)?;
        let diagram = smevor::compute_voronoi(&projection.points, None).map_err(py_err)?;
        let labels: BTreeMap<u32, String> = self
            .inner
            .companies
            .iter()
            .map(|c| (c.id, c.name.clone()))
            .collect();
        let (svg, _) =
            smevor::render_svg(&diagram, Some(&labels), &highlight, &SvgOptions::default());
        to_py(
            py,
            &serde_json::json!({
                "dropped": projection.dropped,
                "filtered": projection.filtered,
                "diagram": diagram.to_json(),
                "svg": svg,
            }),
        )
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset({} companies, {} dropped)",
            self.inner.len(),
            self.inner.dropped.len()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (values, std = "sample", moments = "moment_ratio", kurtosis = "excess", quartiles = "linear"))]
fn describe<'py>(
    py: Python<'py>,
    values: Vec<f64>,
    std: &str,
    moments: &str,
    kurtosis: &str,
    quartiles: &str,
) -> PyResult<Bound<'py, PyAny>> {
    let conv = conventions(std, moments, kurtosis, quartiles)?;
    to_py(py, &smevor::describe(&values, conv).map_err(py_err)?)
}

#[pyfunction]
fn power_law_fit<'py>(py: Python<'py>, xs: Vec<f64>, ys: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &smevor::power_law_fit(&xs, &ys).map_err(py_err)?)
}

/// Bounded Voronoi diagram of `(x, y)` seeds labelled 1..n, or by `labels`.
#[pyfunction]
#[pyo3(signature = (points, labels = None, bbox = None))]
fn compute_voronoi<'py>(
    py: Python<'py>,
    points: Vec<(f64, f64)>,
    labels: Option<Vec<u32>>,
    bbox: Option<(f64, f64, f64, f64)>,
) -> PyResult<Bound<'py, PyAny>> {
    let labels = labels.unwrap_or_else(|| (1..=points.len() as u32).collect());
    if labels.len() != points.len() {
        return Err(PyValueError::new_err("labels and points differ in length"));
    }
    let seeds: Vec<Point2D> = points
        .iter()
        .zip(labels)
        .map(|(&(x, y), label)| Point2D { x, y, label })
        .collect();
    let bbox = bbox
        .map(|(xmin, ymin, xmax, ymax)| BBox::new(xmin, ymin, xmax, ymax))
        .transpose()
        .map_err(py_err)?;
    let diagram = smevor::compute_voronoi(&seeds, bbox).map_err(py_err)?;
    to_py(py, &diagram.to_json())
}

/// Synthetic panel as CSV text; the default seed gives the bundled file.
#[pyfunction]
#[pyo3(signature = (seed = smevor::fixture::FIXTURE_SEED))]
fn fixture_csv(seed: u64) -> String {
    smevor::fixture::generate(seed).to_csv()
}

#[pymodule]
fn pysmevor(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPanel>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(describe, m)?)?;
    m.add_function(wrap_pyfunction!(power_law_fit, m)?)?;
    m.add_function(wrap_pyfunction!(compute_voronoi, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_csv, m)?)?;
    m.add(
        "INDICATORS",
        IndicatorKind::ALL.map(|k| k.as_str()).to_vec(),
    )?;
    Ok(())
}
