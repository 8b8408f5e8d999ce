//! Non-fatal findings (dropped companies, ignored ids, missing labels).
//!
//! Library calls return these alongside their results; the CLI writes them
//! to stderr as JSON lines.

use serde::Serialize;

use crate::indicator::IndicatorKind;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Diagnostic {
    /// Company left out of an averaged dataset for lack of observations.
    CompanyDropped {
        company_id: u32,
        missing: Vec<(IndicatorKind, i32)>,
    },
    /// An id passed for exclusion that the panel does not contain.
    UnknownCompany { company_id: u32 },
    /// A point dropped from a log projection (zero value or sign filter).
    PointDropped { company_id: u32, reason: String },
    /// Highlight requested for an id that has no seed in the diagram.
    MissingHighlight { company_id: u32 },
    /// Pairs removed from a power-law fit because a coordinate was not positive.
    NonPositivePairs { dropped: usize },
    /// Companies removed by the collapse loop.
    CollapseRemoval {
        iteration: usize,
        company_ids: Vec<u32>,
    },
    /// A column with zero spread; band statistics treat every value as inside.
    ZeroSpread { kind: IndicatorKind },
}

impl Diagnostic {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("diagnostics always serialize")
    }
}
