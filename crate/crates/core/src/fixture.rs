//! Seeded synthetic 62-company panel.
//!
//! This is NOT real company data. It only reproduces the shape of a small
//! listed-SME panel: heavy-tailed asset levels for 2006-2007, and growth,
//! profitability and efficiency ratios for 2008-2010 with some negative
//! growth and return values. Company ids run 1..=62.
//!
//! Procedure, per company in id order, all draws from one ChaCha8 stream:
//! TIAX06 ~ LogNormal(ln 4000, 1.3), TIAX07 = TIAX06 * LogNormal(ln 1.08, 0.25);
//! TTA06 ~ LogNormal(ln 10000, 1.3), TTA07 = TTA06 * LogNormal(ln 1.05, 0.2);
//! then for each of 2008, 2009, 2010: DS ~ N(0.07, 0.15), DA ~ N(0.08, 0.15),
//! ROI ~ N(0.045, 0.07), ROS ~ N(0.045, 0.09), ATO ~ LogNormal(ln 0.9, 0.35),
//! SPE ~ LogNormal(ln 200, 0.6). Monetary values are rounded to 0.1, ratios
//! to 1e-4; a ratio that rounds to zero becomes +-1e-4.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::indicator::IndicatorKind;
use crate::ingest::{Company, IndicatorPanel};

pub const FIXTURE_SEED: u64 = 20_062_010;
pub const FIXTURE_COMPANIES: u32 = 62;

const SUPERSECTORS: [&str; 10] = [
    "Technology",
    "Industrial Goods & Services",
    "Utilities",
    "Media",
    "Automobiles & Parts",
    "Construction & Materials",
    "Personal & Household Goods",
    "Food & Beverage",
    "Retail",
    "Health Care",
];

fn round_to(v: f64, scale: f64) -> f64 {
    (v * scale).round() / scale
}

fn ratio(v: f64) -> f64 {
    let r = (v * 1e4).round() / 1e4;
    if r == 0.0 {
        if v < 0.0 {
            -1e-4
        } else {
            1e-4
        }
    } else {
        r
    }
}

pub fn generate(seed: u64) -> IndicatorPanel {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lognormal = |mean: f64, sd: f64| LogNormal::new(mean.ln(), sd).expect("valid lognormal");
    let normal = |mean: f64, sd: f64| Normal::new(mean, sd).expect("valid normal");

    let tiax = lognormal(4000.0, 1.3);
    let tiax_growth = lognormal(1.08, 0.25);
    let tta = lognormal(10000.0, 1.3);
    let tta_growth = lognormal(1.05, 0.2);
    let ds = normal(0.07, 0.15);
    let da = normal(0.08, 0.15);
    let roi = normal(0.045, 0.07);
    let ros = normal(0.045, 0.09);
    let ato = lognormal(0.9, 0.35);
    let spe = lognormal(200.0, 0.6);

    let mut panel = IndicatorPanel::new();
    for id in 1..=FIXTURE_COMPANIES {
        panel
            .add_company(Company {
                id,
                name: format!("Synthetic SME {id:02}"),
                supersector: SUPERSECTORS[(id as usize * 7) % SUPERSECTORS.len()].to_string(),
            })
            .expect("fresh id");
        let mut put = |kind: IndicatorKind, year: i32, v: f64| {
            panel.insert(id, kind, year, v).expect("fresh key");
        };

        let t06: f64 = tiax.sample(&mut rng);
        let t07 = t06 * tiax_growth.sample(&mut rng);
        put(IndicatorKind::Tiax, 2006, round_to(t06, 10.0).max(0.1));
        put(IndicatorKind::Tiax, 2007, round_to(t07, 10.0).max(0.1));
        let a06: f64 = tta.sample(&mut rng);
        let a07 = a06 * tta_growth.sample(&mut rng);
        put(IndicatorKind::Tta, 2006, round_to(a06, 10.0).max(0.1));
        put(IndicatorKind::Tta, 2007, round_to(a07, 10.0).max(0.1));

        for year in 2008..=2010 {
            put(IndicatorKind::Ds, year, ratio(ds.sample(&mut rng)));
            put(IndicatorKind::Da, year, ratio(da.sample(&mut rng)));
            put(IndicatorKind::Roi, year, ratio(roi.sample(&mut rng)));
            put(IndicatorKind::Ros, year, ratio(ros.sample(&mut rng)));
            put(IndicatorKind::Ato, year, ratio(ato.sample(&mut rng)));
            put(
                IndicatorKind::Spe,
                year,
                round_to(spe.sample(&mut rng), 100.0).max(0.01),
            );
        }
    }
    panel
}

/// The bundled fixture file, `data/synthetic_panel.csv`.
pub const BUNDLED_CSV: &str = include_str!("../data/synthetic_panel.csv");
