//! Log-scaled indicator planes, bounded Voronoi tessellation and SVG output.
//!
//! Each cell is built by clipping the bounding box with the perpendicular
//! bisector half-plane of every competing seed. Competitors are visited in
//! order of distance, and the scan stops once a competitor is farther than
//! twice the cell's current radius, since its bisector can no longer cut.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::indicator::IndicatorKind;
use crate::ingest::AveragedDataset;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
    /// Company id.
    pub label: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SignFilter {
    #[serde(rename = "pos", alias = "positive_y", alias = "positive")]
    PositiveY,
    #[serde(rename = "neg", alias = "negative_y", alias = "negative")]
    NegativeY,
    #[default]
    #[serde(rename = "all")]
    All,
}

impl SignFilter {
    pub fn as_str(self) -> &'static str {
        match self {
            SignFilter::PositiveY => "pos",
            SignFilter::NegativeY => "neg",
            SignFilter::All => "all",
        }
    }
}

impl FromStr for SignFilter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pos" | "positive" | "positive_y" => Ok(SignFilter::PositiveY),
            "neg" | "negative" | "negative_y" => Ok(SignFilter::NegativeY),
            "all" => Ok(SignFilter::All),
            other => Err(Error::Config(format!("unknown sign filter `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Projection {
    pub x_kind: IndicatorKind,
    pub y_kind: IndicatorKind,
    pub sign: SignFilter,
    pub points: Vec<Point2D>,
    /// Companies with a zero on either axis, with the reason.
    pub dropped: Vec<(u32, String)>,
    /// Companies whose y value has the other sign.
    pub filtered: Vec<u32>,
}

impl Projection {
    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.dropped
            .iter()
            .map(|(id, reason)| Diagnostic::PointDropped {
                company_id: *id,
                reason: reason.clone(),
            })
            .collect()
    }
}

/// Projects companies onto `(log10 |x|, log10 |y|)`, keeping only those
/// whose y value has the requested sign. Zeros cannot be logged; those
/// companies are dropped and reported.
pub fn log_project(
    dataset: &AveragedDataset,
    x_kind: IndicatorKind,
    y_kind: IndicatorKind,
    sign: SignFilter,
) -> Result<Projection> {
    if x_kind == y_kind {
        return Err(Error::Config(format!("both axes use {x_kind}")));
    }
    let mut points = Vec::new();
    let mut dropped = Vec::new();
    let mut filtered = Vec::new();
    for c in &dataset.companies {
        let (x, y) = (c.get(x_kind), c.get(y_kind));
        if x == 0.0 {
            dropped.push((c.id, format!("{x_kind} is zero")));
        } else if y == 0.0 {
            dropped.push((c.id, format!("{y_kind} is zero")));
        } else if (sign == SignFilter::PositiveY && y < 0.0)
            || (sign == SignFilter::NegativeY && y > 0.0)
        {
            filtered.push(c.id);
        } else {
            points.push(Point2D {
                x: x.abs().log10(),
                y: y.abs().log10(),
                label: c.id,
            });
        }
    }
    if points.is_empty() {
        return Err(Error::InsufficientPoints {
            needed: 1,
            found: 0,
        });
    }
    Ok(Projection {
        x_kind,
        y_kind,
        sign,
        points,
        dropped,
        filtered,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub xmin: f64,
    pub ymin: f64,
    pub xmax: f64,
    pub ymax: f64,
}

impl BBox {
    pub fn new(xmin: f64, ymin: f64, xmax: f64, ymax: f64) -> Result<Self> {
        let b = BBox {
            xmin,
            ymin,
            xmax,
            ymax,
        };
        if ![xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite()) || xmax <= xmin || ymax <= ymin {
            return Err(Error::Config(format!("degenerate bounding box {b:?}")));
        }
        Ok(b)
    }

    /// Extent of the points padded by 5% per side. A zero extent along an
    /// axis is padded by 0.5 instead.
    pub fn around(points: &[Point2D]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Domain("no points to bound".into()));
        }
        let fold = |f: fn(&Point2D) -> f64| {
            points
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
                    (lo.min(v), hi.max(v))
                })
        };
        let pad = |(lo, hi): (f64, f64)| {
            let p = if hi > lo { 0.05 * (hi - lo) } else { 0.5 };
            (lo - p, hi + p)
        };
        let (xmin, xmax) = pad(fold(|p| p.x));
        let (ymin, ymax) = pad(fold(|p| p.y));
        BBox::new(xmin, ymin, xmax, ymax)
    }

    pub fn width(&self) -> f64 {
        self.xmax - self.xmin
    }

    pub fn height(&self) -> f64 {
        self.ymax - self.ymin
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        x >= self.xmin && x <= self.xmax && y >= self.ymin && y <= self.ymax
    }

    fn corners(&self) -> Vec<[f64; 2]> {
        vec![
            [self.xmin, self.ymin],
            [self.xmax, self.ymin],
            [self.xmax, self.ymax],
            [self.xmin, self.ymax],
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiCell {
    pub seed: Point2D,
    /// Convex polygon, counterclockwise, not repeating the first vertex.
    pub polygon: Vec<[f64; 2]>,
}

impl VoronoiCell {
    pub fn area(&self) -> f64 {
        polygon_area(&self.polygon)
    }

    /// Inclusive point-in-convex-polygon test.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let n = self.polygon.len();
        (0..n).all(|i| {
            let a = self.polygon[i];
            let b = self.polygon[(i + 1) % n];
            (b[0] - a[0]) * (y - a[1]) - (b[1] - a[1]) * (x - a[0]) >= 0.0
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VoronoiDiagram {
    pub bbox: BBox,
    /// Ordered by seed label, then coordinates.
    pub cells: Vec<VoronoiCell>,
}

impl VoronoiDiagram {
    /// First cell (in cell order) containing the point, boundaries included.
    pub fn locate(&self, x: f64, y: f64) -> Option<&VoronoiCell> {
        self.cells.iter().find(|c| c.contains(x, y))
    }

    pub fn total_area(&self) -> f64 {
        self.cells.iter().map(VoronoiCell::area).sum()
    }

    /// Machine-readable sidecar: bbox plus each cell's seed, polygon and area.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "bbox": self.bbox,
            "cells": self.cells.iter().map(|c| serde_json::json!({
                "id": c.seed.label,
                "seed": [c.seed.x, c.seed.y],
                "polygon": c.polygon,
                "area": c.area(),
            })).collect::<Vec<_>>(),
        })
    }
}

/// Shoelace area, positive for counterclockwise polygons.
pub fn polygon_area(polygon: &[[f64; 2]]) -> f64 {
    let n = polygon.len();
    if n < 3 {
        return 0.0;
    }
    let twice: f64 = (0..n)
        .map(|i| {
            let a = polygon[i];
            let b = polygon[(i + 1) % n];
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    twice / 2.0
}

/// Keeps the part of a convex polygon where `normal . (p - origin) <= 0`.
pub(crate) fn clip_half_plane(
    polygon: &[[f64; 2]],
    origin: [f64; 2],
    normal: [f64; 2],
) -> Vec<[f64; 2]> {
    let side = |p: [f64; 2]| normal[0] * (p[0] - origin[0]) + normal[1] * (p[1] - origin[1]);
    let n = polygon.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = polygon[i];
        let b = polygon[(i + 1) % n];
        let (fa, fb) = (side(a), side(b));
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

fn cell_for(seed: usize, seeds: &[Point2D], bbox: &BBox) -> Vec<[f64; 2]> {
    let s = seeds[seed];
    let dist2 = |p: &Point2D| (p.x - s.x).powi(2) + (p.y - s.y).powi(2);
    let mut others: Vec<(f64, usize)> = seeds
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != seed)
        .map(|(j, p)| (dist2(p), j))
        .collect();
    others.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut polygon = bbox.corners();
    for (d2, j) in others {
        let radius2 = polygon
            .iter()
            .map(|v| (v[0] - s.x).powi(2) + (v[1] - s.y).powi(2))
            .fold(0.0, f64::max);
        // Bisector lies at distance sqrt(d2)/2; it cannot reach the cell
        // once that exceeds the cell radius.
        if d2 > 4.0 * radius2 {
            break;
        }
        let o = seeds[j];
        let mid = [(s.x + o.x) / 2.0, (s.y + o.y) / 2.0];
        polygon = clip_half_plane(&polygon, mid, [o.x - s.x, o.y - s.y]);
    }
    polygon
}

/// Bounded Voronoi diagram of `points` under the Euclidean metric.
///
/// With `bbox = None` the box is derived with [`BBox::around`]. Seeds must
/// be finite, pairwise distinct and inside the box.
pub fn compute_voronoi(points: &[Point2D], bbox: Option<BBox>) -> Result<VoronoiDiagram> {
    if points.is_empty() {
        return Err(Error::Domain("no seeds".into()));
    }
    if let Some(p) = points
        .iter()
        .find(|p| !(p.x.is_finite() && p.y.is_finite()))
    {
        return Err(Error::Domain(format!(
            "seed {} has non-finite coordinates",
            p.label
        )));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .x
            .total_cmp(&points[b].x)
            .then(points[a].y.total_cmp(&points[b].y))
    });
    for w in order.windows(2) {
        let (a, b) = (points[w[0]], points[w[1]]);
        if a.x == b.x && a.y == b.y {
            return Err(Error::DuplicateSeed {
                first: a.label.min(b.label),
                second: a.label.max(b.label),
            });
        }
    }
    let bbox = match bbox {
        Some(b) => BBox::new(b.xmin, b.ymin, b.xmax, b.ymax)?,
        None => BBox::around(points)?,
    };
    if let Some(p) = points.iter().find(|p| !bbox.contains(p.x, p.y)) {
        return Err(Error::Domain(format!(
            "seed {} lies outside the bounding box",
            p.label
        )));
    }

    let mut seeds = points.to_vec();
    seeds.sort_by(|a, b| {
        a.label
            .cmp(&b.label)
            .then(a.x.total_cmp(&b.x))
            .then(a.y.total_cmp(&b.y))
    });
    let cells = (0..seeds.len())
        .map(|i| VoronoiCell {
            seed: seeds[i],
            polygon: cell_for(i, &seeds, &bbox),
        })
        .collect();
    Ok(VoronoiDiagram { bbox, cells })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SvgOptions {
    pub width: f64,
    pub height: f64,
    pub margin: f64,
    /// Draw data x vertically and data y horizontally.
    pub swap_axes: bool,
    pub title: Option<String>,
    pub x_label: Option<String>,
    pub y_label: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            width: 800.0,
            height: 600.0,
            margin: 48.0,
            swap_axes: false,
            title: None,
            x_label: None,
            y_label: None,
        }
    }
}

const PALETTE: [&str; 8] = [
    "#8dd3c7", "#ffffb3", "#bebada", "#fb8072", "#80b1d3", "#fdb462", "#b3de69", "#fccde5",
];

fn num(v: f64) -> String {
    let s = format!("{v:.6}");
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

fn escape_xml(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c => out.push(c),
        }
    }
    out
}

/// Renders the diagram as SVG 1.1: one `<path>` per cell, one `<circle>`
/// per seed and a `<text>` label for each highlighted id. Labels default
/// to the company id. Highlighted ids without a seed are reported and
/// skipped. Output depends only on the inputs.
pub fn render_svg(
    diagram: &VoronoiDiagram,
    labels: Option<&BTreeMap<u32, String>>,
    highlight: &[u32],
    options: &SvgOptions,
) -> (String, Vec<Diagnostic>) {
    let b = diagram.bbox;
    let swap = options.swap_axes;
    let (dx0, dx1, dy0, dy1) = if swap {
        (b.ymin, b.ymax, b.xmin, b.xmax)
    } else {
        (b.xmin, b.xmax, b.ymin, b.ymax)
    };
    let m = options.margin;
    let plot_w = options.width - 2.0 * m;
    let plot_h = options.height - 2.0 * m;
    let to_screen = |p: [f64; 2]| {
        let (x, y) = if swap { (p[1], p[0]) } else { (p[0], p[1]) };
        let sx = m + (x - dx0) / (dx1 - dx0) * plot_w;
        let sy = options.height - m - (y - dy0) / (dy1 - dy0) * plot_h;
        (sx, sy)
    };

    let present: BTreeSet<u32> = diagram.cells.iter().map(|c| c.seed.label).collect();
    let mut diagnostics = Vec::new();
    let mut wanted = BTreeSet::new();
    for &id in highlight {
        if present.contains(&id) {
            wanted.insert(id);
        } else if !diagnostics.contains(&Diagnostic::MissingHighlight { company_id: id }) {
            log::warn!("highlight id {id} has no seed in the diagram");
            diagnostics.push(Diagnostic::MissingHighlight { company_id: id });
        }
    }

    let mut svg = String::new();
    svg.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n");
    let _ = writeln!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = num(options.width),
        h = num(options.height)
    );
    if let Some(t) = &options.title {
        let _ = writeln!(svg, "<title>{}</title>", escape_xml(t));
    }
    let _ = writeln!(
        svg,
        "<rect class=\"frame\" x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1\"/>",
        num(m),
        num(m),
        num(plot_w),
        num(plot_h)
    );

    svg.push_str("<g class=\"cells\" stroke=\"#333333\" stroke-width=\"0.6\">\n");
    for (i, cell) in diagram.cells.iter().enumerate() {
        let mut d = String::new();
        for (j, v) in cell.polygon.iter().enumerate() {
            let (sx, sy) = to_screen(*v);
            let _ = write!(
                d,
                "{}{} {} ",
                if j == 0 { "M" } else { "L" },
                num(sx),
                num(sy)
            );
        }
        d.push('Z');
        let _ = writeln!(
            svg,
            "<path class=\"cell\" data-id=\"{}\" d=\"{}\" fill=\"{}\"/>",
            cell.seed.label,
            d,
            PALETTE[i % PALETTE.len()]
        );
    }
    svg.push_str("</g>\n<g class=\"seeds\">\n");
    for cell in &diagram.cells {
        let (sx, sy) = to_screen([cell.seed.x, cell.seed.y]);
        let fill = if wanted.contains(&cell.seed.label) {
            "#d7191c"
        } else {
            "#000000"
        };
        let _ = writeln!(
            svg,
            "<circle class=\"seed\" data-id=\"{}\" cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"{}\"/>",
            cell.seed.label,
            num(sx),
            num(sy),
            fill
        );
    }
    svg.push_str("</g>\n<g class=\"labels\" font-family=\"sans-serif\" font-size=\"11\">\n");
    for cell in diagram
        .cells
        .iter()
        .filter(|c| wanted.contains(&c.seed.label))
    {
        let (sx, sy) = to_screen([cell.seed.x, cell.seed.y]);
        let text = labels
            .and_then(|l| l.get(&cell.seed.label).cloned())
            .unwrap_or_else(|| cell.seed.label.to_string());
        let _ = writeln!(
            svg,
            "<text class=\"label\" data-id=\"{}\" x=\"{}\" y=\"{}\">{}</text>",
            cell.seed.label,
            num(sx + 4.0),
            num(sy - 4.0),
            escape_xml(&text)
        );
    }
    svg.push_str("</g>\n");

    let (xl, yl) = if swap {
        (&options.y_label, &options.x_label)
    } else {
        (&options.x_label, &options.y_label)
    };
    svg.push_str("<g class=\"axes\" font-family=\"sans-serif\" font-size=\"12\">\n");
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\">{}</text>",
        num(m),
        num(options.height - m / 3.0),
        escape_xml(&format!(
            "{} [{} .. {}]",
            xl.as_deref().unwrap_or("x"),
            num(dx0),
            num(dx1)
        ))
    );
    let _ = writeln!(
        svg,
        "<text x=\"{}\" y=\"{}\" transform=\"rotate(-90 {} {})\">{}</text>",
        num(m / 2.0),
        num(options.height - m),
        num(m / 2.0),
        num(options.height - m),
        escape_xml(&format!(
            "{} [{} .. {}]",
            yl.as_deref().unwrap_or("y"),
            num(dy0),
            num(dy1)
        ))
    );
    svg.push_str("</g>\n</svg>\n");
    (svg, diagnostics)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CompanyAverages;

    fn p(x: f64, y: f64, label: u32) -> Point2D {
        Point2D { x, y, label }
    }

    #[test]
    fn two_seeds_split_at_bisector() {
        let bbox = BBox::new(-1.0, -1.0, 3.0, 1.0).unwrap();
        let d = compute_voronoi(&[p(0.0, 0.0, 1), p(2.0, 0.0, 2)], Some(bbox)).unwrap();
        assert_eq!(d.cells.len(), 2);
        for cell in &d.cells {
            assert!((cell.area() - 4.0).abs() < 1e-12);
        }
        let left = &d.cells[0];
        assert!(left.polygon.iter().all(|v| v[0] <= 1.0 + 1e-12));
        assert!(left.polygon.iter().any(|v| (v[0] - 1.0).abs() < 1e-12));
        assert_eq!(d.locate(0.5, 0.3).unwrap().seed.label, 1);
        assert_eq!(d.locate(1.5, -0.3).unwrap().seed.label, 2);
    }

    #[test]
    fn single_seed_fills_box() {
        let bbox = BBox::new(0.0, 0.0, 2.0, 3.0).unwrap();
        let d = compute_voronoi(&[p(1.0, 1.0, 7)], Some(bbox)).unwrap();
        assert_eq!(d.cells.len(), 1);
        assert_eq!(d.cells[0].area(), 6.0);
    }

    #[test]
    fn duplicate_and_empty_inputs() {
        match compute_voronoi(&[p(0.0, 0.0, 4), p(1.0, 1.0, 2), p(0.0, 0.0, 9)], None) {
            Err(Error::DuplicateSeed { first, second }) => assert_eq!((first, second), (4, 9)),
            other => panic!("expected duplicate seed, got {other:?}"),
        }
        assert!(matches!(compute_voronoi(&[], None), Err(Error::Domain(_))));
        let bbox = BBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(compute_voronoi(&[p(2.0, 0.5, 1)], Some(bbox)).is_err());
    }

    #[test]
    fn collinear_seeds_make_strips() {
        let pts: Vec<_> = (0..5).map(|i| p(i as f64, 0.0, i + 1)).collect();
        let d = compute_voronoi(&pts, None).unwrap();
        assert!((d.total_area() - d.bbox.area()).abs() < 1e-9 * d.bbox.area());
        for cell in &d.cells {
            assert_eq!(cell.polygon.len(), 4);
        }
    }

    #[test]
    fn auto_bbox_pads_five_percent() {
        let b = BBox::around(&[p(0.0, 0.0, 1), p(10.0, 2.0, 2)]).unwrap();
        assert!((b.xmin + 0.5).abs() < 1e-12 && (b.xmax - 10.5).abs() < 1e-12);
        assert!((b.ymin + 0.1).abs() < 1e-12 && (b.ymax - 2.1).abs() < 1e-12);
        let b = BBox::around(&[p(3.0, 3.0, 1)]).unwrap();
        assert_eq!((b.xmin, b.xmax), (2.5, 3.5));
    }

    #[test]
    fn clip_keeps_inside() {
        let square = vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let half = clip_half_plane(&square, [0.5, 0.0], [1.0, 0.0]);
        assert!((polygon_area(&half) - 0.5).abs() < 1e-15);
        let all = clip_half_plane(&square, [2.0, 0.0], [1.0, 0.0]);
        assert_eq!(all, square);
    }

    fn ds(rows: &[(u32, f64, f64)]) -> AveragedDataset {
        AveragedDataset::from_rows(
            rows.iter()
                .map(|&(id, tta, roi)| {
                    let mut values = [1.0; 8];
                    values[IndicatorKind::Tta.index()] = tta;
                    values[IndicatorKind::Roi.index()] = roi;
                    CompanyAverages {
                        id,
                        name: String::new(),
                        supersector: String::new(),
                        values,
                    }
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn projection_sign_split() {
        let d = ds(&[(1, 10.0, -0.05), (2, 100.0, 0.1)]);
        let proj = log_project(
            &d,
            IndicatorKind::Tta,
            IndicatorKind::Roi,
            SignFilter::NegativeY,
        )
        .unwrap();
        assert_eq!(proj.points.len(), 1);
        assert_eq!(proj.points[0].label, 1);
        assert_eq!(proj.points[0].y, 0.05f64.log10());
        assert_eq!(proj.points[0].x, 1.0);
        assert!(proj.dropped.is_empty());
        assert_eq!(proj.filtered, vec![2]);
        let proj =
            log_project(&d, IndicatorKind::Tta, IndicatorKind::Roi, SignFilter::All).unwrap();
        assert_eq!(proj.points.len(), 2);
    }

    #[test]
    fn projection_drops_zero() {
        let d = ds(&[(1, 0.0, 0.2), (2, 100.0, 0.1), (3, 5.0, 0.3)]);
        let proj =
            log_project(&d, IndicatorKind::Tta, IndicatorKind::Roi, SignFilter::All).unwrap();
        assert_eq!(proj.points.len(), 2);
        assert_eq!(proj.dropped, vec![(1, "TTA is zero".to_string())]);
        assert_eq!(proj.diagnostics().len(), 1);
        assert!(matches!(
            log_project(
                &d,
                IndicatorKind::Tta,
                IndicatorKind::Roi,
                SignFilter::NegativeY
            ),
            Err(Error::InsufficientPoints { .. })
        ));
        assert!(log_project(&d, IndicatorKind::Roi, IndicatorKind::Roi, SignFilter::All).is_err());
    }

    #[test]
    fn svg_single_seed() {
        let d = compute_voronoi(&[p(0.0, 0.0, 3)], None).unwrap();
        let (svg, diags) = render_svg(&d, None, &[3], &SvgOptions::default());
        assert_eq!(svg.matches("<path").count(), 1);
        assert_eq!(svg.matches("<circle").count(), 1);
        assert_eq!(svg.matches("class=\"label\"").count(), 1);
        assert!(diags.is_empty());
    }

    #[test]
    fn svg_missing_highlight_and_determinism() {
        let pts = [p(0.0, 0.0, 1), p(1.0, 0.5, 2), p(0.3, 1.0, 3)];
        let d = compute_voronoi(&pts, None).unwrap();
        let mut labels = BTreeMap::new();
        labels.insert(2, "B & Co".to_string());
        let opts = SvgOptions {
            title: Some("t".into()),
            ..Default::default()
        };
        let (a, diags) = render_svg(&d, Some(&labels), &[2, 42], &opts);
        assert_eq!(diags, vec![Diagnostic::MissingHighlight { company_id: 42 }]);
        assert!(a.contains(">B &amp; Co</text>"));
        assert_eq!(a.matches("class=\"label\"").count(), 1);
        let (b, _) = render_svg(&d, Some(&labels), &[2, 42], &opts);
        assert_eq!(a, b);
        let swapped = render_svg(
            &d,
            None,
            &[],
            &SvgOptions {
                swap_axes: true,
                ..Default::default()
            },
        )
        .0;
        assert_ne!(swapped, render_svg(&d, None, &[], &SvgOptions::default()).0);
    }
}
