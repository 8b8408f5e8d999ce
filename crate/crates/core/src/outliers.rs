//! Sigma-band outlier flags on raw averaged indicators.
//!
//! The inside region is the open interval `]mu - k sigma, mu + k sigma[`,
//! so a value sitting exactly on a band edge is an outlier.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::IndicatorKind;
use crate::ingest::AveragedDataset;
use crate::stats::{describe, StatConventions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BandPosition {
    Below,
    Inside,
    Above,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandFlag {
    pub id: u32,
    pub kind: IndicatorKind,
    pub position: BandPosition,
    pub value: f64,
    pub mu: f64,
    pub sigma: f64,
}

/// Flags for one indicator column.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandReport {
    pub kind: IndicatorKind,
    pub k: f64,
    pub mu: f64,
    /// 0 when the column has no spread (or a single member under the
    /// sample convention); every company is then inside.
    pub sigma: f64,
    pub flags: Vec<BandFlag>,
}

impl BandReport {
    pub fn outliers(&self) -> impl Iterator<Item = &BandFlag> {
        self.flags
            .iter()
            .filter(|f| f.position != BandPosition::Inside)
    }
}

/// Position of `value` relative to the band around `mu`.
pub fn band_position(value: f64, mu: f64, sigma: f64, k: f64) -> BandPosition {
    if sigma <= 0.0 {
        BandPosition::Inside
    } else if value >= mu + k * sigma {
        BandPosition::Above
    } else if value <= mu - k * sigma {
        BandPosition::Below
    } else {
        BandPosition::Inside
    }
}

pub fn sigma_band_flags(
    dataset: &AveragedDataset,
    kind: IndicatorKind,
    k: f64,
    conventions: StatConventions,
) -> Result<BandReport> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(Error::Config(format!(
            "band width k = {k} must be positive"
        )));
    }
    if dataset.is_empty() {
        return Err(Error::EmptyDataset("no companies to flag".into()));
    }
    let column = dataset.column(kind);
    let stats = describe(&column, conventions)?;
    let mu = stats.mean;
    let sigma = stats.std_dev.unwrap_or(0.0);
    let flags = dataset
        .companies
        .iter()
        .map(|c| {
            let value = c.get(kind);
            BandFlag {
                id: c.id,
                kind,
                position: band_position(value, mu, sigma, k),
                value,
                mu,
                sigma,
            }
        })
        .collect();
    Ok(BandReport {
        kind,
        k,
        mu,
        sigma,
        flags,
    })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FlagCounts {
    pub above: usize,
    pub below: usize,
}

/// Companies that are outliers in one direction only, on at least
/// `min_count` performance indicators.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SystematicReport {
    pub min_count: usize,
    pub positive: Vec<u32>,
    pub negative: Vec<u32>,
    pub counts: BTreeMap<u32, FlagCounts>,
}

/// Reports for innovation indicators are ignored; only performance
/// indicators count toward systematic classification.
pub fn classify_systematic(reports: &[BandReport], min_count: usize) -> Result<SystematicReport> {
    if min_count == 0 {
        return Err(Error::Config("min_count must be at least 1".into()));
    }
    let mut counts: BTreeMap<u32, FlagCounts> = BTreeMap::new();
    for report in reports.iter().filter(|r| r.kind.is_performance()) {
        for flag in &report.flags {
            let entry = counts.entry(flag.id).or_default();
            match flag.position {
                BandPosition::Above => entry.above += 1,
                BandPosition::Below => entry.below += 1,
                BandPosition::Inside => {}
            }
        }
    }
    let positive = counts
        .iter()
        .filter(|(_, c)| c.above >= min_count && c.below == 0)
        .map(|(&id, _)| id)
        .collect();
    let negative = counts
        .iter()
        .filter(|(_, c)| c.below >= min_count && c.above == 0)
        .map(|(&id, _)| id)
        .collect();
    Ok(SystematicReport {
        min_count,
        positive,
        negative,
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::CompanyAverages;
    use crate::stats::StdConvention;

    fn dataset(column: &[f64]) -> AveragedDataset {
        AveragedDataset::from_rows(
            column
                .iter()
                .enumerate()
                .map(|(i, &v)| CompanyAverages {
                    id: i as u32 + 1,
                    name: String::new(),
                    supersector: String::new(),
                    values: [v; 8],
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_spike_is_above() {
        let mut column = vec![0.0; 9];
        column.push(10.0);
        // Oracle: mean 1, sum of squared deviations 9 + 81 = 90, sample var 10.
        let sigma = (90.0f64 / 9.0).sqrt();
        assert!((sigma - 3.162).abs() < 1e-3);
        assert!(10.0 > 1.0 + 2.0 * sigma);
        let r = sigma_band_flags(
            &dataset(&column),
            IndicatorKind::Roi,
            2.0,
            StatConventions::default(),
        )
        .unwrap();
        assert_eq!(r.mu, 1.0);
        assert!((r.sigma - sigma).abs() < 1e-12);
        let out: Vec<_> = r.outliers().map(|f| (f.id, f.position)).collect();
        assert_eq!(out, vec![(10, BandPosition::Above)]);
    }

    #[test]
    fn small_symmetric_column_inside() {
        let r = sigma_band_flags(
            &dataset(&[-1.0, 0.0, 1.0]),
            IndicatorKind::Ds,
            2.0,
            StatConventions::default(),
        )
        .unwrap();
        assert!(r.flags.iter().all(|f| f.position == BandPosition::Inside));
    }

    #[test]
    fn boundary_counts_as_outlier() {
        // Population sigma of [-2, 2, 0 x 6] is exactly 1, so +-2 sit on the edges.
        let mut column = vec![-2.0, 2.0];
        column.extend([0.0; 6]);
        let pop = StatConventions {
            std: StdConvention::Population,
            ..Default::default()
        };
        let r = sigma_band_flags(&dataset(&column), IndicatorKind::Ato, 2.0, pop).unwrap();
        assert_eq!((r.mu, r.sigma), (0.0, 1.0));
        assert_eq!(r.flags[0].position, BandPosition::Below);
        assert_eq!(r.flags[1].position, BandPosition::Above);
        assert!(r.flags[2..]
            .iter()
            .all(|f| f.position == BandPosition::Inside));
    }

    #[test]
    fn constant_column_all_inside() {
        let r = sigma_band_flags(
            &dataset(&[3.0, 3.0, 3.0]),
            IndicatorKind::Ato,
            2.0,
            StatConventions::default(),
        )
        .unwrap();
        assert_eq!(r.sigma, 0.0);
        assert_eq!(r.outliers().count(), 0);
    }

    #[test]
    fn bad_k_rejected() {
        let ds = dataset(&[1.0, 2.0]);
        assert!(sigma_band_flags(&ds, IndicatorKind::Ds, 0.0, StatConventions::default()).is_err());
        assert!(
            sigma_band_flags(&ds, IndicatorKind::Ds, -1.0, StatConventions::default()).is_err()
        );
    }

    fn report(kind: IndicatorKind, positions: &[(u32, BandPosition)]) -> BandReport {
        BandReport {
            kind,
            k: 2.0,
            mu: 0.0,
            sigma: 1.0,
            flags: positions
                .iter()
                .map(|&(id, position)| BandFlag {
                    id,
                    kind,
                    position,
                    value: 0.0,
                    mu: 0.0,
                    sigma: 1.0,
                })
                .collect(),
        }
    }

    #[test]
    fn systematic_rules() {
        use BandPosition::*;
        let reports = vec![
            report(IndicatorKind::Ds, &[(1, Above), (2, Above), (3, Below)]),
            report(IndicatorKind::Da, &[(1, Above), (2, Above), (3, Below)]),
            report(IndicatorKind::Roi, &[(1, Above), (2, Below), (3, Inside)]),
            // Innovation reports do not count.
            report(IndicatorKind::Tta, &[(1, Below), (2, Inside), (3, Below)]),
        ];
        let s = classify_systematic(&reports, 2).unwrap();
        assert_eq!(s.positive, vec![1]);
        assert_eq!(s.negative, vec![3]);
        assert_eq!(s.counts[&2], FlagCounts { above: 2, below: 1 });
        assert!(classify_systematic(&reports, 0).is_err());
        let s = classify_systematic(&reports, 3).unwrap();
        assert_eq!(s.positive, vec![1]);
        assert!(s.negative.is_empty());
    }
}
