//! Run configuration, read from a single JSON document.
//!
//! Every field is optional; defaults are the 2006-2007 innovation window,
//! the 2008-2010 performance window, four centroids per axis with uniform
//! weights and a 2-sigma outlier band.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::ClusterConfig;
use crate::error::{Error, Result};
use crate::geometry::SignFilter;
use crate::indicator::IndicatorKind;
use crate::stats::StatConventions;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct OutlierParams {
    pub k: f64,
    pub min_count: usize,
}

impl Default for OutlierParams {
    fn default() -> Self {
        Self {
            k: 2.0,
            min_count: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MapParams {
    pub x: IndicatorKind,
    pub y: IndicatorKind,
    pub sign: SignFilter,
    pub highlight: Vec<u32>,
    pub swap_axes: bool,
}

impl Default for MapParams {
    fn default() -> Self {
        Self {
            x: IndicatorKind::Tta,
            y: IndicatorKind::Roi,
            sign: SignFilter::PositiveY,
            highlight: Vec::new(),
            swap_axes: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FitParams {
    pub kind: IndicatorKind,
    pub year_a: i32,
    pub year_b: i32,
}

impl Default for FitParams {
    fn default() -> Self {
        Self {
            kind: IndicatorKind::Tiax,
            year_a: 2006,
            year_b: 2007,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Panel CSV. `None` means the bundled synthetic fixture.
    pub input: Option<PathBuf>,
    pub output_dir: PathBuf,
    pub innovation_years: Vec<i32>,
    pub performance_years: Vec<i32>,
    /// Companies removed before averaging.
    pub exclude: Vec<u32>,
    pub cluster: ClusterConfig,
    pub stats: StatConventions,
    pub outliers: OutlierParams,
    pub map: MapParams,
    pub fit: FitParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            output_dir: PathBuf::from("out"),
            innovation_years: vec![2006, 2007],
            performance_years: vec![2008, 2009, 2010],
            exclude: Vec::new(),
            cluster: ClusterConfig::default(),
            stats: StatConventions::default(),
            outliers: OutlierParams::default(),
            map: MapParams::default(),
            fit: FitParams::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("invalid configuration JSON: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.innovation_years.is_empty() || self.performance_years.is_empty() {
            return Err(Error::Config("year windows must not be empty".into()));
        }
        if self
            .innovation_years
            .iter()
            .any(|y| self.performance_years.contains(y))
        {
            return Err(Error::Config(
                "innovation and performance windows overlap".into(),
            ));
        }
        self.cluster.validate()?;
        if !(self.outliers.k > 0.0 && self.outliers.k.is_finite()) {
            return Err(Error::Config(format!(
                "outliers.k = {} must be positive",
                self.outliers.k
            )));
        }
        if self.outliers.min_count == 0 {
            return Err(Error::Config(
                "outliers.min_count must be at least 1".into(),
            ));
        }
        if self.map.x == self.map.y {
            return Err(Error::Config(format!("map axes both use {}", self.map.x)));
        }
        if self.fit.year_a == self.fit.year_b {
            return Err(Error::Config("fit years must differ".into()));
        }
        Ok(())
    }
}
