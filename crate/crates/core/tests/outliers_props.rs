use proptest::prelude::*;

use smevor::outliers::band_position;
use smevor::{
    classify_systematic, sigma_band_flags, AveragedDataset, BandPosition, CompanyAverages,
    IndicatorKind, StatConventions,
};

fn dataset() -> impl Strategy<Value = AveragedDataset> {
    prop::collection::vec(prop::array::uniform8(-50f64..50.0), 2..60).prop_map(|rows| {
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, values)| CompanyAverages {
                id: i as u32 + 1,
                name: format!("Firm {i}"),
                supersector: "S".into(),
                values,
            })
            .collect();
        AveragedDataset::from_rows(rows).unwrap()
    })
}

fn kind() -> impl Strategy<Value = IndicatorKind> {
    prop::sample::select(IndicatorKind::ALL.to_vec())
}

proptest! {
    #[test]
    fn positive_affine_maps_keep_flags(
        ds in dataset(),
        kind in kind(),
        a in 1e-2f64..1e2,
        b in -1e3f64..1e3,
        k in 0.5f64..3.0,
    ) {
        let base = sigma_band_flags(&ds, kind, k, StatConventions::default()).unwrap();
        let mut moved = ds.clone();
        for c in &mut moved.companies {
            c.values[kind.index()] = a * c.values[kind.index()] + b;
        }
        let after = sigma_band_flags(&moved, kind, k, StatConventions::default()).unwrap();
        for (f, g) in base.flags.iter().zip(&after.flags) {
            // Scores within rounding of the band edge may go either way.
            let z = (f.value - f.mu) / f.sigma;
            if (z.abs() - k).abs() <= 1e-9 {
                continue;
            }
            prop_assert_eq!(f.position, g.position, "company {} z = {}", f.id, z);
        }
    }

    #[test]
    fn wider_bands_flag_less(ds in dataset(), kind in kind(), k1 in 0.1f64..3.0, dk in 0.0f64..2.0) {
        let narrow = sigma_band_flags(&ds, kind, k1, StatConventions::default()).unwrap();
        let wide = sigma_band_flags(&ds, kind, k1 + dk, StatConventions::default()).unwrap();
        for (n, w) in narrow.flags.iter().zip(&wide.flags) {
            if n.position == BandPosition::Inside {
                prop_assert_eq!(w.position, BandPosition::Inside);
            }
            if w.position != BandPosition::Inside {
                prop_assert_eq!(n.position, w.position);
            }
        }
    }

    #[test]
    fn systematic_lists_are_disjoint(ds in dataset(), k in 0.3f64..2.5, min_count in 1usize..7) {
        let reports: Vec<_> = IndicatorKind::ALL
            .iter()
            .map(|&kind| sigma_band_flags(&ds, kind, k, StatConventions::default()).unwrap())
            .collect();
        let s = classify_systematic(&reports, min_count).unwrap();
        prop_assert!(s.positive.iter().all(|id| !s.negative.contains(id)));
        for id in &s.positive {
            prop_assert!(s.counts[id].above >= min_count && s.counts[id].below == 0);
        }
        for id in &s.negative {
            prop_assert!(s.counts[id].below >= min_count && s.counts[id].above == 0);
        }
    }

    #[test]
    fn band_edges_are_outside(mu in -1e3f64..1e3, sigma in 1e-3f64..1e3, k in 0.1f64..4.0) {
        prop_assert_eq!(band_position(mu + k * sigma, mu, sigma, k), BandPosition::Above);
        prop_assert_eq!(band_position(mu - k * sigma, mu, sigma, k), BandPosition::Below);
        prop_assert_eq!(band_position(mu, mu, sigma, k), BandPosition::Inside);
        prop_assert_eq!(band_position(mu + 1e9, mu, 0.0, k), BandPosition::Inside);
    }
}
