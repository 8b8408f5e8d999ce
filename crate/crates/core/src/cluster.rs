//! Min-max normalization and nearest-centroid clustering under weighted
//! squared-Euclidean distances.
//!
//! Innovation and performance are clustered separately: each company gets
//! the argmin over the innovation centroids and, independently, the argmin
//! over the performance centroids. The two labels are then cross-tabulated.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::indicator::{IndicatorKind, IndicatorSet};
use crate::ingest::AveragedDataset;
use crate::stats::{describe, DescriptiveStats, StatConventions};

/// Allowed deviation of a weight vector's sum from 1.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Hard cap on removal passes in [`resolve_collapse`].
pub const MAX_COLLAPSE_ITERATIONS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ColumnRange {
    pub min: f64,
    pub max: f64,
}

/// Every indicator rescaled to [0, 1] with `(x - min) / (max - min)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormalizedDataset {
    pub ids: Vec<u32>,
    /// Rows aligned with `ids`, columns indexed by [`IndicatorKind::index`].
    pub values: Vec<[f64; 8]>,
    pub ranges: BTreeMap<IndicatorKind, ColumnRange>,
}

impl NormalizedDataset {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn column(&self, kind: IndicatorKind) -> Vec<f64> {
        self.values.iter().map(|row| row[kind.index()]).collect()
    }

    pub fn innovation(&self, row: usize) -> [f64; 2] {
        [self.values[row][0], self.values[row][1]]
    }

    pub fn performance(&self, row: usize) -> [f64; 6] {
        let mut out = [0.0; 6];
        out.copy_from_slice(&self.values[row][2..]);
        out
    }
}

pub fn normalize(dataset: &AveragedDataset) -> Result<NormalizedDataset> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset("nothing to normalize".into()));
    }
    let mut ranges = BTreeMap::new();
    let mut values = vec![[0.0; 8]; dataset.len()];
    for kind in IndicatorKind::ALL {
        let column = dataset.column(kind);
        let min = column.iter().copied().fold(f64::INFINITY, f64::min);
        let max = column.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if max <= min {
            return Err(Error::DegenerateColumn(kind));
        }
        let span = max - min;
        for (row, x) in values.iter_mut().zip(&column) {
            row[kind.index()] = (x - min) / span;
        }
        ranges.insert(kind, ColumnRange { min, max });
    }
    Ok(NormalizedDataset {
        ids: dataset.ids(),
        values,
        ranges,
    })
}

/// Thresholds for [`detect_collapse`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CollapseParams {
    /// Occupancy fraction of a single cluster that counts as collapse.
    pub threshold: f64,
    /// Band half-width, in standard deviations, for extreme companies.
    pub sigma_k: f64,
}

impl Default for CollapseParams {
    fn default() -> Self {
        Self {
            threshold: 0.85,
            sigma_k: 2.0,
        }
    }
}

impl CollapseParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.5 && self.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "collapse threshold {} outside (0.5, 1]",
                self.threshold
            )));
        }
        if !(self.sigma_k > 0.0 && self.sigma_k.is_finite()) {
            return Err(Error::Config(format!(
                "sigma_k {} must be positive",
                self.sigma_k
            )));
        }
        Ok(())
    }
}

/// Centroid grids and weights.
///
/// Reads and writes the JSON layout
/// `{"phi": [..], "psi": [..], "alpha": {"TIAX": .., ..}, "beta": {..}, "collapse": {..}}`.
/// Indicators left out of `alpha`/`beta` get weight 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ClusterConfigDoc", into = "ClusterConfigDoc")]
pub struct ClusterConfig {
    pub phi: Vec<f64>,
    pub psi: Vec<f64>,
    /// Innovation weights, ordered as [`IndicatorKind::INNOVATION`].
    pub alpha: [f64; 2],
    /// Performance weights, ordered as [`IndicatorKind::PERFORMANCE`].
    pub beta: [f64; 6],
    pub collapse: Option<CollapseParams>,
}

impl Default for ClusterConfig {
    /// Four centroids at 1/5 .. 4/5 on both axes with uniform weights.
    fn default() -> Self {
        let grid = vec![0.2, 0.4, 0.6, 0.8];
        Self {
            phi: grid.clone(),
            psi: grid,
            alpha: [0.5; 2],
            beta: [1.0 / 6.0; 6],
            collapse: None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ClusterConfigDoc {
    phi: Vec<f64>,
    psi: Vec<f64>,
    alpha: BTreeMap<String, f64>,
    beta: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    collapse: Option<CollapseParams>,
}

fn weights_from_map<const N: usize>(
    name: &str,
    map: &BTreeMap<String, f64>,
    set: IndicatorSet,
) -> Result<[f64; N]> {
    let mut out = [0.0; N];
    for (key, &w) in map {
        let kind: IndicatorKind = key
            .parse()
            .map_err(|_| Error::Config(format!("{name}: unknown indicator `{key}`")))?;
        let slot =
            set.kinds().iter().position(|&k| k == kind).ok_or_else(|| {
                Error::Config(format!("{name}: {kind} is not a {set:?} indicator"))
            })?;
        out[slot] = w;
    }
    Ok(out)
}

impl TryFrom<ClusterConfigDoc> for ClusterConfig {
    type Error = Error;

    fn try_from(doc: ClusterConfigDoc) -> Result<Self> {
        let cfg = ClusterConfig {
            phi: doc.phi,
            psi: doc.psi,
            alpha: weights_from_map("alpha", &doc.alpha, IndicatorSet::Innovation)?,
            beta: weights_from_map("beta", &doc.beta, IndicatorSet::Performance)?,
            collapse: doc.collapse,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<ClusterConfig> for ClusterConfigDoc {
    fn from(cfg: ClusterConfig) -> Self {
        let to_map = |kinds: &[IndicatorKind], w: &[f64]| {
            kinds
                .iter()
                .zip(w)
                .map(|(k, &w)| (k.to_string(), w))
                .collect()
        };
        ClusterConfigDoc {
            alpha: to_map(&IndicatorKind::INNOVATION, &cfg.alpha),
            beta: to_map(&IndicatorKind::PERFORMANCE, &cfg.beta),
            phi: cfg.phi,
            psi: cfg.psi,
            collapse: cfg.collapse,
        }
    }
}

fn check_weights(name: &str, weights: &[f64]) -> Result<()> {
    if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w >= 0.0)) {
        return Err(Error::Config(format!(
            "{name}: weight {w} is not a non-negative number"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
        return Err(Error::Config(format!(
            "{name} weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

fn check_grid(name: &str, grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{name} needs at least one centroid")));
    }
    if let Some(c) = grid.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
        return Err(Error::Config(format!(
            "{name}: centroid {c} outside (0, 1)"
        )));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Config(format!("{name} must be strictly increasing")));
    }
    Ok(())
}

impl ClusterConfig {
    pub fn validate(&self) -> Result<()> {
        check_grid("phi", &self.phi)?;
        check_grid("psi", &self.psi)?;
        check_weights("alpha", &self.alpha)?;
        check_weights("beta", &self.beta)?;
        if let Some(c) = &self.collapse {
            c.validate()?;
        }
        Ok(())
    }

    pub fn h(&self) -> usize {
        self.phi.len()
    }

    pub fn k(&self) -> usize {
        self.psi.len()
    }

    pub fn weight(&self, kind: IndicatorKind) -> f64 {
        if kind.is_innovation() {
            self.alpha[kind.index()]
        } else {
            self.beta[kind.index() - 2]
        }
    }
}

fn weighted_squared_distance(point: &[f64], centroid: f64, weights: &[f64]) -> f64 {
    let d: f64 = point
        .iter()
        .zip(weights)
        .map(|(x, w)| {
            let diff = x - centroid;
            w * diff * diff
        })
        .sum();
    // Weights sum to 1 only up to rounding; the exact value cannot exceed 1.
    d.min(1.0)
}

/// Weighted squared distance of a company's normalized innovation vector
/// to the diagonal centroid `(phi, phi)`.
pub fn innovation_distance(company: &[f64; 2], phi: f64, alpha: &[f64; 2]) -> Result<f64> {
    check_weights("alpha", alpha)?;
    Ok(weighted_squared_distance(company, phi, alpha))
}

/// Weighted squared distance of a company's normalized performance vector
/// to the diagonal centroid `(psi, .., psi)`.
pub fn performance_distance(company: &[f64; 6], psi: f64, beta: &[f64; 6]) -> Result<f64> {
    check_weights("beta", beta)?;
    Ok(weighted_squared_distance(company, psi, beta))
}

/// 1-based index of the smallest entry; the lowest index wins ties.
fn argmin(distances: &[f64]) -> usize {
    let mut best = 0;
    for (i, d) in distances.iter().enumerate().skip(1) {
        if *d < distances[best] {
            best = i;
        }
    }
    best + 1
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompanyAssignment {
    pub id: u32,
    /// Innovation cluster, 1-based.
    pub i_cluster: usize,
    /// Performance cluster, 1-based.
    pub p_cluster: usize,
    pub innovation_distances: Vec<f64>,
    pub performance_distances: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterAssignment {
    pub h: usize,
    pub k: usize,
    /// In the row order of the normalized dataset (ascending id).
    pub companies: Vec<CompanyAssignment>,
}

impl ClusterAssignment {
    pub fn len(&self) -> usize {
        self.companies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.companies.is_empty()
    }

    pub fn pairs(&self) -> Vec<(u32, usize, usize)> {
        self.companies
            .iter()
            .map(|c| (c.id, c.i_cluster, c.p_cluster))
            .collect()
    }

    /// `company_id,i_cluster,p_cluster` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("company_id,i_cluster,p_cluster\n");
        for c in &self.companies {
            out.push_str(&format!("{},{},{}\n", c.id, c.i_cluster, c.p_cluster));
        }
        out
    }

    fn occupancy(&self, axis: Axis) -> Vec<usize> {
        let mut counts = vec![0; axis.clusters(self)];
        for c in &self.companies {
            counts[axis.label(c) - 1] += 1;
        }
        counts
    }
}

pub fn assign_clusters(nd: &NormalizedDataset, cfg: &ClusterConfig) -> Result<ClusterAssignment> {
    cfg.validate()?;
    let companies = (0..nd.len())
        .map(|row| {
            let inn = nd.innovation(row);
            let perf = nd.performance(row);
            let innovation_distances: Vec<f64> = cfg
                .phi
                .iter()
                .map(|&phi| weighted_squared_distance(&inn, phi, &cfg.alpha))
                .collect();
            let performance_distances: Vec<f64> = cfg
                .psi
                .iter()
                .map(|&psi| weighted_squared_distance(&perf, psi, &cfg.beta))
                .collect();
            CompanyAssignment {
                id: nd.ids[row],
                i_cluster: argmin(&innovation_distances),
                p_cluster: argmin(&performance_distances),
                innovation_distances,
                performance_distances,
            }
        })
        .collect();
    Ok(ClusterAssignment {
        h: cfg.h(),
        k: cfg.k(),
        companies,
    })
}

/// Company counts per (innovation cluster, performance cluster).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CrossTab {
    /// `counts[h][k]`, 0-based.
    pub counts: Vec<Vec<usize>>,
    pub row_totals: Vec<usize>,
    pub column_totals: Vec<usize>,
    pub total: usize,
}

impl CrossTab {
    /// Matrix with totals, laid out like a printed contingency table.
    pub fn to_csv(&self) -> String {
        let k = self.column_totals.len();
        let mut out = String::from("innovation_cluster");
        for j in 1..=k {
            out.push_str(&format!(",p{j}"));
        }
        out.push_str(",total\n");
        for (i, row) in self.counts.iter().enumerate() {
            out.push_str(&format!("i{}", i + 1));
            for c in row {
                out.push_str(&format!(",{c}"));
            }
            out.push_str(&format!(",{}\n", self.row_totals[i]));
        }
        out.push_str("total");
        for c in &self.column_totals {
            out.push_str(&format!(",{c}"));
        }
        out.push_str(&format!(",{}\n", self.total));
        out
    }
}

pub fn cross_tabulate(assignment: &ClusterAssignment, h: usize, k: usize) -> Result<CrossTab> {
    let mut counts = vec![vec![0usize; k]; h];
    for c in &assignment.companies {
        if c.i_cluster == 0 || c.i_cluster > h || c.p_cluster == 0 || c.p_cluster > k {
            return Err(Error::Domain(format!(
                "company {} has cluster pair ({}, {}) outside {h}x{k}",
                c.id, c.i_cluster, c.p_cluster
            )));
        }
        counts[c.i_cluster - 1][c.p_cluster - 1] += 1;
    }
    let row_totals: Vec<usize> = counts.iter().map(|r| r.iter().sum()).collect();
    let column_totals: Vec<usize> = (0..k).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
    Ok(CrossTab {
        total: row_totals.iter().sum(),
        counts,
        row_totals,
        column_totals,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfile {
    /// 1-based cluster index.
    pub index: usize,
    pub members: Vec<u32>,
    /// `None` for an empty cluster.
    pub stats: Option<BTreeMap<IndicatorKind, DescriptiveStats>>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterProfiles {
    pub whole_sample: BTreeMap<IndicatorKind, DescriptiveStats>,
    pub innovation: Vec<ClusterProfile>,
    pub performance: Vec<ClusterProfile>,
}

fn describe_rows(
    dataset: &AveragedDataset,
    members: &[u32],
    conventions: StatConventions,
) -> Result<BTreeMap<IndicatorKind, DescriptiveStats>> {
    let rows: Vec<_> = members
        .iter()
        .map(|id| {
            dataset
                .company(*id)
                .expect("members checked against dataset")
        })
        .collect();
    IndicatorKind::ALL
        .iter()
        .map(|&kind| {
            let column: Vec<f64> = rows.iter().map(|c| c.get(kind)).collect();
            Ok((kind, describe(&column, conventions)?))
        })
        .collect()
}

/// Per-cluster statistics of the raw averaged indicators, for every
/// indicator, on both axes.
pub fn profile_clusters(
    dataset: &AveragedDataset,
    assignment: &ClusterAssignment,
    conventions: StatConventions,
) -> Result<ClusterProfiles> {
    let assigned: BTreeSet<u32> = assignment.companies.iter().map(|c| c.id).collect();
    let known: BTreeSet<u32> = dataset.ids().into_iter().collect();
    if assigned != known {
        return Err(Error::Domain(
            "assignment and dataset cover different companies".into(),
        ));
    }
    let profile_axis = |axis: Axis| -> Result<Vec<ClusterProfile>> {
        (1..=axis.clusters(assignment))
            .map(|index| {
                let members: Vec<u32> = assignment
                    .companies
                    .iter()
                    .filter(|c| axis.label(c) == index)
                    .map(|c| c.id)
                    .collect();
                let stats = if members.is_empty() {
                    None
                } else {
                    Some(describe_rows(dataset, &members, conventions)?)
                };
                Ok(ClusterProfile {
                    index,
                    members,
                    stats,
                })
            })
            .collect()
    };
    Ok(ClusterProfiles {
        whole_sample: describe_rows(dataset, &dataset.ids(), conventions)?,
        innovation: profile_axis(Axis::Innovation)?,
        performance: profile_axis(Axis::Performance)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Innovation,
    Performance,
}

impl Axis {
    fn clusters(self, a: &ClusterAssignment) -> usize {
        match self {
            Axis::Innovation => a.h,
            Axis::Performance => a.k,
        }
    }

    fn label(self, c: &CompanyAssignment) -> usize {
        match self {
            Axis::Innovation => c.i_cluster,
            Axis::Performance => c.p_cluster,
        }
    }

    fn kinds(self) -> &'static [IndicatorKind] {
        match self {
            Axis::Innovation => &IndicatorKind::INNOVATION,
            Axis::Performance => &IndicatorKind::PERFORMANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseDiagnosis {
    /// Most occupied cluster, set only when its occupancy reaches the threshold.
    pub dominant_cluster: Option<(Axis, usize)>,
    /// Largest single-cluster occupancy over both axes.
    pub occupancy_fraction: f64,
    pub flagged_companies: Vec<u32>,
    /// Removal passes performed before this diagnosis.
    pub iterations: usize,
}

impl CollapseDiagnosis {
    pub fn is_collapsed(&self) -> bool {
        self.dominant_cluster.is_some()
    }
}

/// Flags the companies that stretch the min-max range when one cluster
/// swallows at least `threshold` of the sample.
///
/// On each collapsed axis, with positively weighted indicators only, a
/// company is flagged if it holds the column minimum or maximum, or lies
/// outside `mean ± sigma_k * std` (sample std). Both tests are
/// affine-invariant, so they run on the normalized values.
pub fn detect_collapse(
    assignment: &ClusterAssignment,
    nd: &NormalizedDataset,
    cfg: &ClusterConfig,
    params: CollapseParams,
) -> Result<CollapseDiagnosis> {
    params.validate()?;
    if assignment.len() != nd.len()
        || assignment
            .companies
            .iter()
            .zip(&nd.ids)
            .any(|(c, id)| c.id != *id)
    {
        return Err(Error::Domain(
            "assignment rows do not match the normalized dataset".into(),
        ));
    }
    let n = nd.len() as f64;
    let mut best: Option<(Axis, usize, f64)> = None;
    let mut collapsed_axes = Vec::new();
    for axis in [Axis::Innovation, Axis::Performance] {
        let counts = assignment.occupancy(axis);
        for (i, &c) in counts.iter().enumerate() {
            let frac = c as f64 / n;
            if best.is_none_or(|(_, _, f)| frac > f) {
                best = Some((axis, i + 1, frac));
            }
            if frac >= params.threshold && !collapsed_axes.contains(&axis) {
                collapsed_axes.push(axis);
            }
        }
    }
    let (axis, index, occupancy_fraction) = best.expect("at least one cluster per axis");

    let mut flagged = BTreeSet::new();
    for &axis in &collapsed_axes {
        for &kind in axis.kinds() {
            if cfg.weight(kind) <= 0.0 {
                continue;
            }
            let column = nd.column(kind);
            let band = describe(&column, StatConventions::default())?
                .std_dev
                .filter(|s| *s > 0.0)
                .map(|s| {
                    let mean = column.iter().sum::<f64>() / n;
                    (mean - params.sigma_k * s, mean + params.sigma_k * s)
                });
            for (row, &v) in column.iter().enumerate() {
                let at_extreme = v == 0.0 || v == 1.0;
                let outside = band.is_some_and(|(lo, hi)| v <= lo || v >= hi);
                if at_extreme || outside {
                    flagged.insert(nd.ids[row]);
                }
            }
        }
    }
    Ok(CollapseDiagnosis {
        dominant_cluster: (occupancy_fraction >= params.threshold).then_some((axis, index)),
        occupancy_fraction,
        flagged_companies: flagged.into_iter().collect(),
        iterations: 0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CollapseOutcome {
    pub dataset: AveragedDataset,
    pub normalized: NormalizedDataset,
    pub assignment: ClusterAssignment,
    pub diagnosis: CollapseDiagnosis,
    /// Companies removed at each pass, in order.
    pub removed: Vec<Vec<u32>>,
}

impl CollapseOutcome {
    pub fn removed_ids(&self) -> Vec<u32> {
        let mut all: Vec<u32> = self.removed.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

/// Normalizes, assigns and, while a cluster is collapsed, removes the
/// flagged companies and starts over. Each pass renormalizes because the
/// column ranges change once extremes leave.
///
/// Fails with [`Error::CollapseUnresolved`] if the sample is still
/// collapsed after [`MAX_COLLAPSE_ITERATIONS`] removals.
pub fn resolve_collapse(
    dataset: &AveragedDataset,
    cfg: &ClusterConfig,
    params: CollapseParams,
) -> Result<CollapseOutcome> {
    params.validate()?;
    let mut current = dataset.clone();
    let mut removed = Vec::new();
    for iteration in 0..=MAX_COLLAPSE_ITERATIONS {
        let normalized = normalize(&current)?;
        let assignment = assign_clusters(&normalized, cfg)?;
        let mut diagnosis = detect_collapse(&assignment, &normalized, cfg, params)?;
        diagnosis.iterations = iteration;
        if !diagnosis.is_collapsed() {
            return Ok(CollapseOutcome {
                dataset: current,
                normalized,
                assignment,
                diagnosis,
                removed,
            });
        }
        if iteration == MAX_COLLAPSE_ITERATIONS {
            break;
        }
        log::info!(
            "collapse pass {}: removing {:?}",
            iteration + 1,
            diagnosis.flagged_companies
        );
        current = current.without(&diagnosis.flagged_companies);
        removed.push(diagnosis.flagged_companies);
    }
    Err(Error::CollapseUnresolved {
        iterations: MAX_COLLAPSE_ITERATIONS,
    })
}
