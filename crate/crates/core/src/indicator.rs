use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// The eight yearly firm indicators.
///
/// TIAX and TTA measure investment (innovation); the other six measure
/// growth, profitability and efficiency (performance).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IndicatorKind {
    /// Total intangible assets, excluding goodwill.
    #[serde(rename = "TIAX")]
    Tiax,
    /// Total tangible assets, excluding properties.
    #[serde(rename = "TTA")]
    Tta,
    /// Sales variation.
    #[serde(rename = "DS")]
    Ds,
    /// Total assets variation.
    #[serde(rename = "DA")]
    Da,
    /// Return on investments.
    #[serde(rename = "ROI")]
    Roi,
    /// Return on sales.
    #[serde(rename = "ROS")]
    Ros,
    /// Asset turnover.
    #[serde(rename = "ATO")]
    Ato,
    /// Sales per employee.
    #[serde(rename = "SPE", alias = "S/E")]
    Spe,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorSet {
    Innovation,
    Performance,
}

impl IndicatorKind {
    pub const ALL: [IndicatorKind; 8] = [
        IndicatorKind::Tiax,
        IndicatorKind::Tta,
        IndicatorKind::Ds,
        IndicatorKind::Da,
        IndicatorKind::Roi,
        IndicatorKind::Ros,
        IndicatorKind::Ato,
        IndicatorKind::Spe,
    ];

    pub const INNOVATION: [IndicatorKind; 2] = [IndicatorKind::Tiax, IndicatorKind::Tta];

    pub const PERFORMANCE: [IndicatorKind; 6] = [
        IndicatorKind::Ds,
        IndicatorKind::Da,
        IndicatorKind::Roi,
        IndicatorKind::Ros,
        IndicatorKind::Ato,
        IndicatorKind::Spe,
    ];

    /// Position in [`IndicatorKind::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn set(self) -> IndicatorSet {
        match self {
            IndicatorKind::Tiax | IndicatorKind::Tta => IndicatorSet::Innovation,
            _ => IndicatorSet::Performance,
        }
    }

    pub fn is_innovation(self) -> bool {
        self.set() == IndicatorSet::Innovation
    }

    pub fn is_performance(self) -> bool {
        self.set() == IndicatorSet::Performance
    }

    pub fn as_str(self) -> &'static str {
        match self {
            IndicatorKind::Tiax => "TIAX",
            IndicatorKind::Tta => "TTA",
            IndicatorKind::Ds => "DS",
            IndicatorKind::Da => "DA",
            IndicatorKind::Roi => "ROI",
            IndicatorKind::Ros => "ROS",
            IndicatorKind::Ato => "ATO",
            IndicatorKind::Spe => "SPE",
        }
    }
}

impl IndicatorSet {
    pub fn kinds(self) -> &'static [IndicatorKind] {
        match self {
            IndicatorSet::Innovation => &IndicatorKind::INNOVATION,
            IndicatorSet::Performance => &IndicatorKind::PERFORMANCE,
        }
    }
}

impl fmt::Display for IndicatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IndicatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "TIAX" => Ok(IndicatorKind::Tiax),
            "TTA" => Ok(IndicatorKind::Tta),
            "DS" => Ok(IndicatorKind::Ds),
            "DA" => Ok(IndicatorKind::Da),
            "ROI" => Ok(IndicatorKind::Roi),
            "ROS" => Ok(IndicatorKind::Ros),
            "ATO" => Ok(IndicatorKind::Ato),
            "SPE" | "S/E" => Ok(IndicatorKind::Spe),
            other => Err(Error::Schema(format!("unknown indicator `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sets_partition_all_kinds() {
        for kind in IndicatorKind::ALL {
            let in_i = IndicatorKind::INNOVATION.contains(&kind);
            let in_p = IndicatorKind::PERFORMANCE.contains(&kind);
            assert!(in_i ^ in_p, "{kind} must belong to exactly one set");
            assert_eq!(kind.is_innovation(), in_i);
            assert_eq!(kind.is_performance(), in_p);
        }
        assert_eq!(
            IndicatorKind::INNOVATION.len() + IndicatorKind::PERFORMANCE.len(),
            8
        );
    }

    #[test]
    fn index_matches_position() {
        for (i, kind) in IndicatorKind::ALL.iter().enumerate() {
            assert_eq!(kind.index(), i);
        }
    }

    #[test]
    fn parses_names() {
        assert_eq!(
            "tiax".parse::<IndicatorKind>().unwrap(),
            IndicatorKind::Tiax
        );
        assert_eq!("S/E".parse::<IndicatorKind>().unwrap(), IndicatorKind::Spe);
        assert!(matches!(
            "EBIT".parse::<IndicatorKind>(),
            Err(Error::Schema(_))
        ));
        for kind in IndicatorKind::ALL {
            assert_eq!(kind.as_str().parse::<IndicatorKind>().unwrap(), kind);
        }
    }
}
