//! Long-format panel parsing and windowed averaging.
//!
//! The input is one observation per row:
//! `company_id,company_name,supersector,indicator,year,value`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::diagnostics::Diagnostic;
use crate::error::{Error, Result};
use crate::indicator::IndicatorKind;

pub const CSV_HEADER: [&str; 6] = [
    "company_id",
    "company_name",
    "supersector",
    "indicator",
    "year",
    "value",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Company {
    pub id: u32,
    pub name: String,
    pub supersector: String,
}

/// Raw yearly indicator values per company.
///
/// Monetary indicators are kept in the units of the file; nothing is
/// rescaled on ingest.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct IndicatorPanel {
    companies: BTreeMap<u32, Company>,
    observations: BTreeMap<(u32, IndicatorKind, i32), f64>,
}

impl IndicatorPanel {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers a company. Re-adding an identical record is a no-op.
    pub fn add_company(&mut self, company: Company) -> Result<()> {
        if company.id == 0 {
            return Err(Error::Schema("company ids must be positive".into()));
        }
        match self.companies.get(&company.id) {
            Some(existing) if *existing != company => Err(Error::Conflict {
                row: 0,
                message: format!(
                    "company {} registered as ({:?}, {:?}) and ({:?}, {:?})",
                    company.id,
                    existing.name,
                    existing.supersector,
                    company.name,
                    company.supersector
                ),
            }),
            Some(_) => Ok(()),
            None => {
                self.companies.insert(company.id, company);
                Ok(())
            }
        }
    }

    pub fn insert(&mut self, id: u32, kind: IndicatorKind, year: i32, value: f64) -> Result<()> {
        if !self.companies.contains_key(&id) {
            return Err(Error::Schema(format!(
                "observation for unknown company {id}"
            )));
        }
        if !value.is_finite() {
            return Err(Error::Domain(format!(
                "non-finite value for company {id}, {kind} {year}"
            )));
        }
        if self.observations.insert((id, kind, year), value).is_some() {
            return Err(Error::Conflict {
                row: 0,
                message: format!("duplicate observation ({id}, {kind}, {year})"),
            });
        }
        Ok(())
    }

    pub fn companies(&self) -> impl Iterator<Item = &Company> {
        self.companies.values()
    }

    pub fn company(&self, id: u32) -> Option<&Company> {
        self.companies.get(&id)
    }

    pub fn company_count(&self) -> usize {
        self.companies.len()
    }

    pub fn observation_count(&self) -> usize {
        self.observations.len()
    }

    pub fn value(&self, id: u32, kind: IndicatorKind, year: i32) -> Option<f64> {
        self.observations.get(&(id, kind, year)).copied()
    }

    /// Ascending years observed for one company and indicator.
    pub fn years(&self, id: u32, kind: IndicatorKind) -> Vec<i32> {
        self.observations
            .range((id, kind, i32::MIN)..=(id, kind, i32::MAX))
            .map(|(&(_, _, year), _)| year)
            .collect()
    }

    pub fn observations(&self) -> impl Iterator<Item = (u32, IndicatorKind, i32, f64)> + '_ {
        self.observations
            .iter()
            .map(|(&(id, kind, year), &v)| (id, kind, year, v))
    }

    /// Checks that every (company, indicator) series covers a contiguous
    /// run of years.
    pub fn validate(&self) -> Result<()> {
        let mut last: Option<(u32, IndicatorKind, i32)> = None;
        for &(id, kind, year) in self.observations.keys() {
            if let Some((pid, pkind, pyear)) = last {
                if pid == id && pkind == kind && year != pyear + 1 {
                    return Err(Error::Schema(format!(
                        "company {id}, {kind}: years {pyear} and {year} leave a gap"
                    )));
                }
            }
            last = Some((id, kind, year));
        }
        Ok(())
    }

    /// Serializes back to the long CSV format, rows sorted by
    /// (company, indicator, year).
    pub fn to_csv(&self) -> String {
        let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
        writer.write_record(CSV_HEADER).expect("in-memory write");
        for (&(id, kind, year), value) in &self.observations {
            let company = &self.companies[&id];
            writer
                .write_record([
                    id.to_string(),
                    company.name.clone(),
                    company.supersector.clone(),
                    kind.to_string(),
                    year.to_string(),
                    format_value(*value),
                ])
                .expect("in-memory write");
        }
        String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("utf-8 csv")
    }
}

fn format_value(v: f64) -> String {
    // Shortest representation that round-trips.
    let s = format!("{v}");
    if s.contains('e') || s.contains('E') {
        format!("{v:.17}")
    } else {
        s
    }
}

/// Parses and validates a panel from CSV text.
///
/// Rows are numbered as in a spreadsheet: the header is row 1.
pub fn parse_panel(csv_text: &str) -> Result<IndicatorPanel> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(csv_text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::Schema(format!("unreadable header: {e}")))?
        .clone();
    if headers.is_empty() || headers.iter().all(str::is_empty) {
        return Err(Error::Schema("missing header row".into()));
    }
    let mut columns = [usize::MAX; 6];
    for (i, name) in headers.iter().enumerate() {
        match CSV_HEADER.iter().position(|&h| h == name) {
            Some(slot) if columns[slot] == usize::MAX => columns[slot] = i,
            Some(_) => return Err(Error::Schema(format!("column `{name}` appears twice"))),
            None => return Err(Error::Schema(format!("unknown column `{name}`"))),
        }
    }
    if let Some(missing) = columns.iter().position(|&c| c == usize::MAX) {
        return Err(Error::Schema(format!(
            "missing column `{}`",
            CSV_HEADER[missing]
        )));
    }

    let mut panel = IndicatorPanel::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 2;
        let record = record.map_err(|e| Error::Parse {
            row,
            column: String::new(),
            message: e.to_string(),
        })?;
        let field = |slot: usize| record.get(columns[slot]).unwrap_or("");
        let parse_err = |slot: usize, message: String| Error::Parse {
            row,
            column: CSV_HEADER[slot].to_string(),
            message,
        };

        let id: u32 = field(0)
            .parse()
            .map_err(|_| parse_err(0, format!("`{}` is not a positive integer", field(0))))?;
        if id == 0 {
            return Err(parse_err(0, "company ids must be positive".into()));
        }
        let kind: IndicatorKind = field(3)
            .parse()
            .map_err(|_| Error::Schema(format!("row {row}: unknown indicator `{}`", field(3))))?;
        let year: i32 = field(4)
            .parse()
            .map_err(|_| parse_err(4, format!("`{}` is not a year", field(4))))?;
        let value: f64 = field(5)
            .parse()
            .map_err(|_| parse_err(5, format!("`{}` is not a number", field(5))))?;
        if !value.is_finite() {
            return Err(parse_err(
                5,
                format!("`{}` is not a finite number", field(5)),
            ));
        }

        let company = Company {
            id,
            name: field(1).to_string(),
            supersector: field(2).to_string(),
        };
        panel.add_company(company).map_err(|e| match e {
            Error::Conflict { message, .. } => Error::Conflict { row, message },
            other => other,
        })?;
        if panel.observations.insert((id, kind, year), value).is_some() {
            return Err(Error::Conflict {
                row,
                message: format!("duplicate observation ({id}, {kind}, {year})"),
            });
        }
    }
    panel.validate()?;
    Ok(panel)
}

/// Returns a copy of `panel` without the listed companies.
///
/// Ids the panel does not contain are ignored and reported.
pub fn exclude_companies(panel: &IndicatorPanel, ids: &[u32]) -> (IndicatorPanel, Vec<Diagnostic>) {
    let remove: BTreeSet<u32> = ids.iter().copied().collect();
    let diagnostics = remove
        .iter()
        .filter(|id| !panel.companies.contains_key(id))
        .map(|&company_id| {
            log::warn!("exclusion list names unknown company {company_id}");
            Diagnostic::UnknownCompany { company_id }
        })
        .collect();
    let out = IndicatorPanel {
        companies: panel
            .companies
            .iter()
            .filter(|(id, _)| !remove.contains(id))
            .map(|(&id, c)| (id, c.clone()))
            .collect(),
        observations: panel
            .observations
            .iter()
            .filter(|((id, _, _), _)| !remove.contains(id))
            .map(|(&k, &v)| (k, v))
            .collect(),
    };
    (out, diagnostics)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompanyAverages {
    pub id: u32,
    pub name: String,
    pub supersector: String,
    /// Averages indexed by [`IndicatorKind::index`].
    pub values: [f64; 8],
}

impl CompanyAverages {
    pub fn get(&self, kind: IndicatorKind) -> f64 {
        self.values[kind.index()]
    }

    pub fn innovation(&self) -> [f64; 2] {
        [self.values[0], self.values[1]]
    }

    pub fn performance(&self) -> [f64; 6] {
        let mut out = [0.0; 6];
        out.copy_from_slice(&self.values[2..]);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DroppedCompany {
    pub id: u32,
    pub missing: Vec<(IndicatorKind, i32)>,
}

/// Innovation indicators averaged over one window and performance
/// indicators over another, one complete row per company.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AveragedDataset {
    pub innovation_years: Vec<i32>,
    pub performance_years: Vec<i32>,
    /// Sorted by company id.
    pub companies: Vec<CompanyAverages>,
    pub dropped: Vec<DroppedCompany>,
}

impl AveragedDataset {
    /// Builds a dataset directly from rows, without window metadata.
    pub fn from_rows(mut companies: Vec<CompanyAverages>) -> Result<Self> {
        if companies.is_empty() {
            return Err(Error::EmptyDataset("no rows supplied".into()));
        }
        companies.sort_by_key(|c| c.id);
        if let Some(w) = companies.windows(2).find(|w| w[0].id == w[1].id) {
            return Err(Error::Conflict {
                row: 0,
                message: format!("company {} appears twice", w[0].id),
            });
        }
        if let Some(c) = companies
            .iter()
            .find(|c| c.values.iter().any(|v| !v.is_finite()))
        {
            return Err(Error::Domain(format!(
                "company {} has a non-finite value",
                c.id
            )));
        }
        Ok(Self {
            innovation_years: Vec::new(),
            performance_years: Vec::new(),
            companies,
            dropped: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.companies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.companies.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.companies.iter().map(|c| c.id).collect()
    }

    pub fn column(&self, kind: IndicatorKind) -> Vec<f64> {
        self.companies.iter().map(|c| c.get(kind)).collect()
    }

    pub fn company(&self, id: u32) -> Option<&CompanyAverages> {
        self.companies
            .binary_search_by_key(&id, |c| c.id)
            .ok()
            .map(|i| &self.companies[i])
    }

    /// Copy of the dataset without the listed companies. Averages are
    /// per-company, so this equals re-averaging a panel with those
    /// companies excluded.
    pub fn without(&self, ids: &[u32]) -> Self {
        let remove: BTreeSet<u32> = ids.iter().copied().collect();
        Self {
            innovation_years: self.innovation_years.clone(),
            performance_years: self.performance_years.clone(),
            companies: self
                .companies
                .iter()
                .filter(|c| !remove.contains(&c.id))
                .cloned()
                .collect(),
            dropped: self.dropped.clone(),
        }
    }

    pub fn diagnostics(&self) -> Vec<Diagnostic> {
        self.dropped
            .iter()
            .map(|d| Diagnostic::CompanyDropped {
                company_id: d.id,
                missing: d.missing.clone(),
            })
            .collect()
    }
}

fn normalize_window(name: &str, years: &[i32]) -> Result<Vec<i32>> {
    if years.is_empty() {
        return Err(Error::Config(format!("{name} window is empty")));
    }
    let mut sorted = years.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config(format!("{name} window lists a year twice")));
    }
    Ok(sorted)
}

/// Averages innovation indicators over `innovation_years` and performance
/// indicators over `performance_years`.
///
/// Each average sums the yearly values in ascending year order and divides
/// by the window length. Companies missing any required observation are
/// dropped and listed in [`AveragedDataset::dropped`].
pub fn window_average(
    panel: &IndicatorPanel,
    innovation_years: &[i32],
    performance_years: &[i32],
) -> Result<AveragedDataset> {
    let innovation_years = normalize_window("innovation", innovation_years)?;
    let performance_years = normalize_window("performance", performance_years)?;
    if innovation_years
        .iter()
        .any(|y| performance_years.binary_search(y).is_ok())
    {
        return Err(Error::Config(
            "innovation and performance windows overlap".into(),
        ));
    }

    let mut companies = Vec::new();
    let mut dropped = Vec::new();
    for company in panel.companies() {
        let mut values = [0.0; 8];
        let mut missing = Vec::new();
        for kind in IndicatorKind::ALL {
            let years = if kind.is_innovation() {
                &innovation_years
            } else {
                &performance_years
            };
            let mut sum = 0.0;
            for &year in years {
                match panel.value(company.id, kind, year) {
                    Some(v) => sum += v,
                    None => missing.push((kind, year)),
                }
            }
            values[kind.index()] = sum / years.len() as f64;
        }
        if missing.is_empty() {
            companies.push(CompanyAverages {
                id: company.id,
                name: company.name.clone(),
                supersector: company.supersector.clone(),
                values,
            });
        } else {
            log::info!(
                "dropping company {}: {} missing observations",
                company.id,
                missing.len()
            );
            dropped.push(DroppedCompany {
                id: company.id,
                missing,
            });
        }
    }
    if companies.is_empty() {
        return Err(Error::EmptyDataset(format!(
            "all {} companies lack required observations",
            dropped.len()
        )));
    }
    Ok(AveragedDataset {
        innovation_years,
        performance_years,
        companies,
        dropped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "company_id,company_name,supersector,indicator,year,value\n";

    fn full_company_rows(id: u32, base: f64) -> String {
        let mut s = String::new();
        for kind in IndicatorKind::ALL {
            let years: &[i32] = if kind.is_innovation() {
                &[2006, 2007]
            } else {
                &[2008, 2009, 2010]
            };
            for (i, y) in years.iter().enumerate() {
                s.push_str(&format!("{id},C{id},Tech,{kind},{y},{}\n", base + i as f64));
            }
        }
        s
    }

    #[test]
    fn single_record_round_trip() {
        let panel = parse_panel(&format!("{HEADER}1,A,Tech,TIAX,2006,100.0\n")).unwrap();
        assert_eq!(panel.company_count(), 1);
        assert_eq!(panel.observation_count(), 1);
        assert_eq!(panel.value(1, IndicatorKind::Tiax, 2006), Some(100.0));
        assert_eq!(panel.company(1).unwrap().supersector, "Tech");
        let again = parse_panel(&panel.to_csv()).unwrap();
        assert_eq!(again, panel);
    }

    #[test]
    fn duplicate_key_names_row() {
        let text = format!("{HEADER}1,A,Tech,TIAX,2006,100.0\n1,A,Tech,TIAX,2006,101.0\n");
        match parse_panel(&text) {
            Err(Error::Conflict { row, .. }) => assert_eq!(row, 3),
            other => panic!("expected conflict, got {other:?}"),
        }
    }

    #[test]
    fn malformed_value_names_row_and_column() {
        let text = format!("{HEADER}1,A,Tech,TIAX,2006,100\n1,A,Tech,TIAX,2007,abc\n");
        match parse_panel(&text) {
            Err(Error::Parse { row, column, .. }) => {
                assert_eq!(row, 3);
                assert_eq!(column, "value");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn unknown_indicator_is_schema_error() {
        let text = format!("{HEADER}1,A,Tech,EBITDA,2006,1\n");
        assert!(matches!(parse_panel(&text), Err(Error::Schema(_))));
        let text = "company_id,company_name,supersector,indicator,year,value,extra\n";
        assert!(matches!(parse_panel(text), Err(Error::Schema(_))));
        let text = "company_id,company_name,indicator,year,value\n";
        assert!(matches!(parse_panel(text), Err(Error::Schema(_))));
    }

    #[test]
    fn non_finite_and_gaps_rejected() {
        let text = format!("{HEADER}1,A,Tech,TIAX,2006,NaN\n");
        assert!(matches!(parse_panel(&text), Err(Error::Parse { .. })));
        let text = format!("{HEADER}1,A,Tech,TIAX,2006,1\n1,A,Tech,TIAX,2008,1\n");
        assert!(matches!(parse_panel(&text), Err(Error::Schema(_))));
    }

    #[test]
    fn conflicting_company_metadata() {
        let text = format!("{HEADER}1,A,Tech,TIAX,2006,1\n1,B,Tech,TIAX,2007,1\n");
        assert!(matches!(
            parse_panel(&text),
            Err(Error::Conflict { row: 3, .. })
        ));
    }

    #[test]
    fn two_year_mean() {
        let mut text = full_company_rows(1, 1.0);
        text = text.replace("1,C1,Tech,TIAX,2006,1\n", "1,C1,Tech,TIAX,2006,100\n");
        text = text.replace("1,C1,Tech,TIAX,2007,2\n", "1,C1,Tech,TIAX,2007,200\n");
        let panel = parse_panel(&format!("{HEADER}{text}")).unwrap();
        let ds = window_average(&panel, &[2006, 2007], &[2008, 2009, 2010]).unwrap();
        assert_eq!(ds.companies[0].get(IndicatorKind::Tiax), 150.0);
    }

    #[test]
    fn three_year_mean_with_negatives() {
        let mut panel = IndicatorPanel::new();
        panel
            .add_company(Company {
                id: 1,
                name: "A".into(),
                supersector: "Tech".into(),
            })
            .unwrap();
        for kind in IndicatorKind::ALL {
            if kind.is_innovation() {
                panel.insert(1, kind, 2006, 1.0).unwrap();
                panel.insert(1, kind, 2007, 1.0).unwrap();
            } else {
                for (y, v) in [(2008, 0.10), (2009, -0.20), (2010, 0.40)] {
                    panel.insert(1, kind, y, v).unwrap();
                }
            }
        }
        let ds = window_average(&panel, &[2006, 2007], &[2008, 2009, 2010]).unwrap();
        let ds_value = ds.companies[0].get(IndicatorKind::Ds);
        assert!((ds_value - 0.10).abs() < 1e-15, "{ds_value}");
        assert_eq!(ds_value, (0.10 + -0.20 + 0.40) / 3.0);
    }

    #[test]
    fn incomplete_company_dropped_and_reported() {
        let rows = full_company_rows(1, 1.0) + &full_company_rows(2, 5.0);
        let rows = rows.replace("2,C2,Tech,TTA,2007,6\n", "");
        let panel = parse_panel(&format!("{HEADER}{rows}")).unwrap();
        let ds = window_average(&panel, &[2006, 2007], &[2008, 2009, 2010]).unwrap();
        assert_eq!(ds.ids(), vec![1]);
        assert_eq!(ds.dropped.len(), 1);
        assert_eq!(ds.dropped[0].id, 2);
        assert_eq!(ds.dropped[0].missing, vec![(IndicatorKind::Tta, 2007)]);
        assert_eq!(ds.diagnostics().len(), 1);
    }

    #[test]
    fn window_errors() {
        let panel = parse_panel(&format!("{HEADER}{}", full_company_rows(1, 1.0))).unwrap();
        assert!(matches!(
            window_average(&panel, &[], &[2008]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            window_average(&panel, &[2006], &[]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            window_average(&panel, &[2006, 2008], &[2008]),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            window_average(&panel, &[2001], &[2008]),
            Err(Error::EmptyDataset(_))
        ));
    }

    #[test]
    fn exclusion_identity_and_unknown_ids() {
        let rows = full_company_rows(1, 1.0) + &full_company_rows(2, 5.0);
        let panel = parse_panel(&format!("{HEADER}{rows}")).unwrap();
        let (same, diags) = exclude_companies(&panel, &[]);
        assert_eq!(same, panel);
        assert!(diags.is_empty());
        let (same, diags) = exclude_companies(&panel, &[99]);
        assert_eq!(same, panel);
        assert_eq!(diags, vec![Diagnostic::UnknownCompany { company_id: 99 }]);
        let (one, _) = exclude_companies(&panel, &[2]);
        assert_eq!(one.company_count(), 1);
        assert!(one.observations().all(|(id, ..)| id == 1));
        assert_eq!(panel.company_count(), 2);
    }
}
