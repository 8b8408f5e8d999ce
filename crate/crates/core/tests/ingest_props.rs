use proptest::prelude::*;

use smevor::{exclude_companies, parse_panel, window_average, IndicatorKind, IndicatorPanel};

const YEARS: [i32; 5] = [2006, 2007, 2008, 2009, 2010];

/// CSV body rows for `n` companies. Series are contiguous; about one in
/// ten is trimmed at either end so some companies get dropped.
fn panel_rows() -> impl Strategy<Value = Vec<String>> {
    (1u32..8).prop_flat_map(|n| {
        let series = (n as usize) * 8;
        let span =
            prop_oneof![9 => Just((0usize, YEARS.len())), 1 => (0usize..3, 3usize..=YEARS.len())];
        (
            prop::collection::vec(-1e6f64..1e6, series * YEARS.len()),
            prop::collection::vec(span, series),
        )
            .prop_map(move |(values, spans)| {
                let mut rows = Vec::new();
                for id in 1..=n {
                    for (k, kind) in IndicatorKind::ALL.into_iter().enumerate() {
                        let s = (id as usize - 1) * 8 + k;
                        let (lo, hi) = spans[s];
                        for (y, year) in YEARS.iter().enumerate().take(hi).skip(lo) {
                            rows.push(format!(
                                "{id},Firm {id},Sector {},{kind},{year},{}",
                                id % 3,
                                values[s * YEARS.len() + y]
                            ));
                        }
                    }
                }
                rows
            })
    })
}

fn csv(rows: &[String]) -> String {
    let mut text = String::from("company_id,company_name,supersector,indicator,year,value\n");
    for r in rows {
        text.push_str(r);
        text.push('\n');
    }
    text
}

fn ids(panel: &IndicatorPanel) -> Vec<u32> {
    panel.companies().map(|c| c.id).collect()
}

proptest! {
    #[test]
    fn row_order_does_not_matter(
        (rows, shuffled) in panel_rows().prop_flat_map(|r| (Just(r.clone()), Just(r).prop_shuffle()))
    ) {
        let a = parse_panel(&csv(&rows)).unwrap();
        let b = parse_panel(&csv(&shuffled)).unwrap();
        prop_assert_eq!(&a, &b);
        let wa = window_average(&a, &[2006, 2007], &[2008, 2009, 2010]);
        let wb = window_average(&b, &[2006, 2007], &[2008, 2009, 2010]);
        prop_assert_eq!(format!("{wa:?}"), format!("{wb:?}"));
    }

    #[test]
    fn year_list_order_does_not_matter(rows in panel_rows()) {
        let panel = parse_panel(&csv(&rows)).unwrap();
        let a = window_average(&panel, &[2006, 2007], &[2008, 2009, 2010]);
        let b = window_average(&panel, &[2007, 2006], &[2010, 2008, 2009]);
        prop_assert_eq!(format!("{a:?}"), format!("{b:?}"));
    }

    #[test]
    fn averages_recompute_bitwise(rows in panel_rows()) {
        let panel = parse_panel(&csv(&rows)).unwrap();
        let Ok(ds) = window_average(&panel, &[2006, 2007], &[2008, 2009, 2010]) else {
            return Ok(());
        };
        for c in &ds.companies {
            for kind in IndicatorKind::ALL {
                let window: &[i32] = if kind.is_innovation() { &[2006, 2007] } else { &[2008, 2009, 2010] };
                let mut sum = 0.0;
                for &y in window {
                    sum += panel.value(c.id, kind, y).unwrap();
                }
                let expected = sum / window.len() as f64;
                prop_assert_eq!(c.get(kind).to_bits(), expected.to_bits());
            }
        }
        for d in &ds.dropped {
            prop_assert!(!d.missing.is_empty());
            prop_assert!(ds.company(d.id).is_none());
        }
    }

    #[test]
    fn csv_round_trip(rows in panel_rows()) {
        let panel = parse_panel(&csv(&rows)).unwrap();
        prop_assert_eq!(parse_panel(&panel.to_csv()).unwrap(), panel);
    }

    #[test]
    fn exclusion_composes(
        rows in panel_rows(),
        a in prop::collection::vec(1u32..10, 0..4),
        b in prop::collection::vec(1u32..10, 0..4),
    ) {
        let panel = parse_panel(&csv(&rows)).unwrap();
        let (step, _) = exclude_companies(&panel, &a);
        let (twice, _) = exclude_companies(&step, &b);
        let union: Vec<u32> = a.iter().chain(&b).copied().collect();
        let (once, _) = exclude_companies(&panel, &union);
        prop_assert_eq!(&twice, &once);
        prop_assert!(ids(&once).iter().all(|id| !union.contains(id)));
    }
}
