//! End-to-end runs that write report files. The CLI subcommands are thin
//! wrappers over these functions.
//!
//! All outputs are deterministic: maps are ordered, floats are written in
//! shortest round-trip form, and nothing time-dependent is recorded.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::json;

use crate::cluster::{
    assign_clusters, cross_tabulate, normalize, profile_clusters, resolve_collapse,
};
use crate::config::RunConfig;
use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::fixture;
use crate::geometry::{compute_voronoi, log_project, render_svg, SignFilter, SvgOptions};
use crate::indicator::IndicatorKind;
use crate::ingest::{
    exclude_companies, parse_panel, window_average, AveragedDataset, IndicatorPanel,
};
use crate::outliers::{classify_systematic, sigma_band_flags, BandReport};
use crate::stats::{describe, power_law_fit, DescriptiveStats};

/// Files written by a run and the non-fatal findings along the way.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub diagnostics: Vec<Diagnostic>,
}

impl RunOutput {
    fn merge(&mut self, other: RunOutput) {
        self.files.extend(other.files);
        self.diagnostics.extend(other.diagnostics);
    }
}

/// Reads the configured input (or the bundled fixture) and applies the
/// exclusion list.
pub fn load_panel(cfg: &RunConfig) -> Result<(IndicatorPanel, Vec<Diagnostic>)> {
    let panel = match &cfg.input {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            parse_panel(&text)?
        }
        None => parse_panel(fixture::BUNDLED_CSV)?,
    };
    Ok(exclude_companies(&panel, &cfg.exclude))
}

fn averaged(cfg: &RunConfig, panel: &IndicatorPanel) -> Result<AveragedDataset> {
    window_average(panel, &cfg.innovation_years, &cfg.performance_years)
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn write_text(dir: &Path, name: &str, text: &str, out: &mut RunOutput) -> Result<()> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    fs::write(&path, text).map_err(|e| Error::io(&path, e))?;
    out.files.push(path);
    Ok(())
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T, out: &mut RunOutput) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| Error::json(name, e))?;
    text.push('\n');
    write_text(dir, name, &text, out)
}

fn cell(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// One row per statistic, one column per indicator. Undefined values are
/// left empty.
pub fn stats_table_csv(stats: &BTreeMap<IndicatorKind, DescriptiveStats>) -> String {
    let kinds: Vec<_> = stats.keys().copied().collect();
    let mut out = String::from("statistic");
    for k in &kinds {
        out.push(',');
        out.push_str(k.as_str());
    }
    out.push('\n');
    type Getter = fn(&DescriptiveStats) -> Option<f64>;
    let rows: [(&str, Getter); 12] = [
        ("count", |s| Some(s.count as f64)),
        ("sum", |s| Some(s.sum)),
        ("mean", |s| Some(s.mean)),
        ("std_dev", |s| s.std_dev),
        ("mean_over_std", |s| s.mean_over_std),
        ("min", |s| Some(s.min)),
        ("max", |s| Some(s.max)),
        ("q1", |s| Some(s.q1)),
        ("median", |s| Some(s.median)),
        ("q3", |s| Some(s.q3)),
        ("skewness", |s| s.skewness),
        ("kurtosis", |s| s.kurtosis),
    ];
    for (name, get) in rows {
        out.push_str(name);
        for k in &kinds {
            out.push(',');
            out.push_str(&cell(get(&stats[k])));
        }
        out.push('\n');
    }
    out
}

/// Per-indicator statistics of the windowed averages: `stats.json` and `stats.csv`.
pub fn run_stats(cfg: &RunConfig, panel: &IndicatorPanel, dir: &Path) -> Result<RunOutput> {
    let ds = averaged(cfg, panel)?;
    let mut out = RunOutput {
        diagnostics: ds.diagnostics(),
        ..Default::default()
    };
    let stats: BTreeMap<IndicatorKind, DescriptiveStats> = IndicatorKind::ALL
        .iter()
        .map(|&k| Ok((k, describe(&ds.column(k), cfg.stats)?)))
        .collect::<Result<_>>()?;
    let undefined: BTreeMap<IndicatorKind, Vec<&str>> = stats
        .iter()
        .filter(|(_, s)| !s.undefined_fields().is_empty())
        .map(|(k, s)| (*k, s.undefined_fields()))
        .collect();
    let report = json!({
        "companies": ds.len(),
        "innovation_years": ds.innovation_years,
        "performance_years": ds.performance_years,
        "dropped": ds.dropped,
        "conventions": cfg.stats,
        "indicators": stats,
        "undefined": undefined,
    });
    write_json(dir, "stats.json", &report, &mut out)?;
    write_text(dir, "stats.csv", &stats_table_csv(&stats), &mut out)?;
    Ok(out)
}

/// Normalize, assign, cross-tabulate and profile, with the collapse loop
/// when configured.
pub fn run_cluster(cfg: &RunConfig, panel: &IndicatorPanel, dir: &Path) -> Result<RunOutput> {
    cfg.cluster.validate()?;
    let ds = averaged(cfg, panel)?;
    let mut out = RunOutput {
        diagnostics: ds.diagnostics(),
        ..Default::default()
    };
    let (ds, normalized, assignment, collapse, removed) = match cfg.cluster.collapse {
        Some(params) => {
            let o = resolve_collapse(&ds, &cfg.cluster, params)?;
            for (i, ids) in o.removed.iter().enumerate() {
                out.diagnostics.push(Diagnostic::CollapseRemoval {
                    iteration: i + 1,
                    company_ids: ids.clone(),
                });
            }
            (
                o.dataset,
                o.normalized,
                o.assignment,
                Some(o.diagnosis),
                o.removed,
            )
        }
        None => {
            let nd = normalize(&ds)?;
            let a = assign_clusters(&nd, &cfg.cluster)?;
            (ds, nd, a, None, Vec::new())
        }
    };
    let table = cross_tabulate(&assignment, cfg.cluster.h(), cfg.cluster.k())?;
    let profiles = profile_clusters(&ds, &assignment, cfg.stats)?;

    write_text(dir, "assignment.csv", &assignment.to_csv(), &mut out)?;
    write_text(dir, "crosstab.csv", &table.to_csv(), &mut out)?;
    let report = json!({
        "companies": ds.len(),
        "config": cfg.cluster,
        "ranges": normalized.ranges,
        "assignment": assignment.companies,
        "crosstab": table,
        "collapse": collapse,
        "removed": removed,
    });
    write_json(dir, "cluster_report.json", &report, &mut out)?;
    write_json(dir, "profiles.json", &profiles, &mut out)?;
    Ok(out)
}

#[derive(Serialize)]
struct CompactFlag {
    id: u32,
    position: crate::outliers::BandPosition,
}

#[derive(Serialize)]
struct CompactBandReport {
    kind: IndicatorKind,
    mu: f64,
    sigma: f64,
    flags: Vec<CompactFlag>,
}

impl From<&BandReport> for CompactBandReport {
    fn from(r: &BandReport) -> Self {
        Self {
            kind: r.kind,
            mu: r.mu,
            sigma: r.sigma,
            flags: r
                .flags
                .iter()
                .map(|f| CompactFlag {
                    id: f.id,
                    position: f.position,
                })
                .collect(),
        }
    }
}

/// Sigma-band flags for all eight indicators plus the systematic
/// classification over the performance ones.
pub fn run_outliers(cfg: &RunConfig, panel: &IndicatorPanel, dir: &Path) -> Result<RunOutput> {
    let ds = averaged(cfg, panel)?;
    let mut out = RunOutput {
        diagnostics: ds.diagnostics(),
        ..Default::default()
    };
    let reports: Vec<BandReport> = IndicatorKind::ALL
        .iter()
        .map(|&k| sigma_band_flags(&ds, k, cfg.outliers.k, cfg.stats))
        .collect::<Result<_>>()?;
    for r in reports.iter().filter(|r| r.sigma == 0.0) {
        out.diagnostics
            .push(Diagnostic::ZeroSpread { kind: r.kind });
    }
    let systematic = classify_systematic(&reports, cfg.outliers.min_count)?;
    let compact: Vec<CompactBandReport> = reports.iter().map(Into::into).collect();
    write_json(dir, "outliers.json", &compact, &mut out)?;
    write_json(dir, "systematic.json", &systematic, &mut out)?;
    Ok(out)
}

pub fn map_file_stem(x: IndicatorKind, y: IndicatorKind, sign: SignFilter) -> String {
    format!("map_{x}_{y}_{}", sign.as_str())
}

/// Voronoi map of `(log10 |x|, log10 |y|)`: an SVG and a JSON sidecar
/// with the cell polygons. Needs at least two surviving companies.
pub fn run_map(
    cfg: &RunConfig,
    panel: &IndicatorPanel,
    dir: &Path,
    x: IndicatorKind,
    y: IndicatorKind,
    sign: SignFilter,
) -> Result<RunOutput> {
    let ds = averaged(cfg, panel)?;
    let mut out = RunOutput {
        diagnostics: ds.diagnostics(),
        ..Default::default()
    };
    let projection = log_project(&ds, x, y, sign)?;
    if projection.points.len() < 2 {
        return Err(Error::InsufficientPoints {
            needed: 2,
            found: projection.points.len(),
        });
    }
    out.diagnostics.extend(projection.diagnostics());
    let diagram = compute_voronoi(&projection.points, None)?;
    let labels: BTreeMap<u32, String> = ds
        .companies
        .iter()
        .map(|c| {
            (
                c.id,
                if c.name.is_empty() {
                    c.id.to_string()
                } else {
                    c.name.clone()
                },
            )
        })
        .collect();
    let sign_text = match sign {
        SignFilter::PositiveY => format!(", {y} > 0"),
        SignFilter::NegativeY => format!(", {y} < 0"),
        SignFilter::All => String::new(),
    };
    let options = SvgOptions {
        swap_axes: cfg.map.swap_axes,
        title: Some(format!(
            "Voronoi tessellation of log10|{x}| vs log10|{y}|{sign_text}"
        )),
        x_label: Some(format!("log10|{x}|")),
        y_label: Some(format!("log10|{y}|")),
        ..SvgOptions::default()
    };
    let (svg, diags) = render_svg(&diagram, Some(&labels), &cfg.map.highlight, &options);
    out.diagnostics.extend(diags);

    let stem = map_file_stem(x, y, sign);
    write_text(dir, &format!("{stem}.svg"), &svg, &mut out)?;
    let sidecar = json!({
        "x": x,
        "y": y,
        "sign": sign,
        "dropped": projection.dropped,
        "filtered": projection.filtered,
        "diagram": diagram.to_json(),
    });
    write_json(dir, &format!("{stem}.json"), &sidecar, &mut out)?;
    Ok(out)
}

/// Power-law fit of an indicator's `year_b` values against its `year_a`
/// values across companies.
pub fn run_fit(
    panel: &IndicatorPanel,
    dir: &Path,
    kind: IndicatorKind,
    year_a: i32,
    year_b: i32,
) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    let mut ids = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut missing = Vec::new();
    for c in panel.companies() {
        match (
            panel.value(c.id, kind, year_a),
            panel.value(c.id, kind, year_b),
        ) {
            (Some(a), Some(b)) => {
                ids.push(c.id);
                xs.push(a);
                ys.push(b);
            }
            _ => missing.push(c.id),
        }
    }
    if xs.is_empty() {
        return Err(Error::Domain(format!(
            "no company has both {kind} {year_a} and {kind} {year_b}"
        )));
    }
    let fit = power_law_fit(&xs, &ys)?;
    if fit.dropped_points > 0 {
        out.diagnostics.push(Diagnostic::NonPositivePairs {
            dropped: fit.dropped_points,
        });
    }
    let report = json!({
        "kind": kind,
        "year_a": year_a,
        "year_b": year_b,
        "model": "y = a * x^b",
        "fit": fit,
        "missing_companies": missing,
    });
    write_json(
        dir,
        &format!("fit_{kind}_{year_a}_{year_b}.json"),
        &report,
        &mut out,
    )?;
    Ok(out)
}

/// Everything at once, in a directory tree:
/// `stats/`, `cluster/`, `outliers/`, `maps/`, `fits/` and `index.json`.
///
/// Maps are drawn for the configured pair and for TTA against ROI and ROS,
/// each split by the sign of the y indicator. A map that has fewer than
/// two points is listed under `skipped` in the index instead of failing
/// the run.
pub fn run_report(cfg: &RunConfig, panel: &IndicatorPanel, dir: &Path) -> Result<RunOutput> {
    let mut out = RunOutput::default();
    out.merge(run_stats(cfg, panel, &dir.join("stats"))?);
    out.merge(run_cluster(cfg, panel, &dir.join("cluster"))?);
    out.merge(run_outliers(cfg, panel, &dir.join("outliers"))?);

    let mut maps = vec![(cfg.map.x, cfg.map.y, cfg.map.sign)];
    for y in [IndicatorKind::Roi, IndicatorKind::Ros] {
        for sign in [SignFilter::NegativeY, SignFilter::PositiveY] {
            if !maps.contains(&(IndicatorKind::Tta, y, sign)) {
                maps.push((IndicatorKind::Tta, y, sign));
            }
        }
    }
    let mut skipped = Vec::new();
    for (x, y, sign) in maps {
        match run_map(cfg, panel, &dir.join("maps"), x, y, sign) {
            Ok(o) => out.merge(o),
            Err(e @ Error::InsufficientPoints { .. }) => {
                skipped.push(json!({"map": map_file_stem(x, y, sign), "reason": e.to_string()}));
            }
            Err(e) => return Err(e),
        }
    }

    let first = *cfg
        .innovation_years
        .iter()
        .min()
        .expect("validated non-empty");
    let last = *cfg
        .innovation_years
        .iter()
        .max()
        .expect("validated non-empty");
    let mut fits = vec![(cfg.fit.kind, cfg.fit.year_a, cfg.fit.year_b)];
    if first != last {
        for kind in IndicatorKind::INNOVATION {
            if !fits.contains(&(kind, first, last)) {
                fits.push((kind, first, last));
            }
        }
    }
    for (kind, a, b) in fits {
        match run_fit(panel, &dir.join("fits"), kind, a, b) {
            Ok(o) => out.merge(o),
            Err(e @ (Error::InsufficientData { .. } | Error::Domain(_))) => {
                skipped
                    .push(json!({"fit": format!("fit_{kind}_{a}_{b}"), "reason": e.to_string()}));
            }
            Err(e) => return Err(e),
        }
    }

    let mut files: Vec<String> = out
        .files
        .iter()
        .map(|p| {
            p.strip_prefix(dir)
                .unwrap_or(p)
                .to_string_lossy()
                .replace('\\', "/")
        })
        .collect();
    files.sort();
    let index = json!({
        "config": cfg_without_paths(cfg),
        "files": files,
        "skipped": skipped,
    });
    write_json(dir, "index.json", &index, &mut out)?;
    Ok(out)
}

/// Config echo for reports, with host paths removed so that output trees
/// compare equal across output locations.
fn cfg_without_paths(cfg: &RunConfig) -> RunConfig {
    RunConfig {
        input: cfg
            .input
            .as_ref()
            .and_then(|p| p.file_name().map(PathBuf::from)),
        output_dir: PathBuf::new(),
        ..cfg.clone()
    }
}
