use proptest::prelude::*;

use smevor::{describe, power_law_fit, MomentConvention, QuartileConvention, StatConventions};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

fn opt_close(a: Option<f64>, b: Option<f64>, tol: f64) -> bool {
    match (a, b) {
        (Some(a), Some(b)) => close(a, b, tol),
        (None, None) => true,
        _ => false,
    }
}

fn series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1e3f64..1e3, 4..200).prop_filter("needs spread", |xs| {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        hi - lo > 1e-3
    })
}

fn conventions() -> impl Strategy<Value = StatConventions> {
    (any::<bool>(), any::<bool>()).prop_map(|(bias, nearest)| StatConventions {
        moments: if bias {
            MomentConvention::BiasAdjusted
        } else {
            MomentConvention::MomentRatio
        },
        quartiles: if nearest {
            QuartileConvention::NearestRank
        } else {
            QuartileConvention::Linear
        },
        ..StatConventions::default()
    })
}

proptest! {
    #[test]
    fn quartiles_are_ordered(xs in series(), conv in conventions()) {
        let s = describe(&xs, conv).unwrap();
        prop_assert!(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max);
        prop_assert_eq!(s.count, xs.len());
    }

    #[test]
    fn scaling(xs in series(), c in 1e-3f64..1e3, conv in conventions()) {
        let s = describe(&xs, conv).unwrap();
        let scaled: Vec<f64> = xs.iter().map(|x| c * x).collect();
        let t = describe(&scaled, conv).unwrap();
        for (a, b) in [(s.mean, t.mean), (s.min, t.min), (s.max, t.max), (s.q1, t.q1), (s.median, t.median), (s.q3, t.q3)] {
            prop_assert!(close(c * a, b, 1e-9), "{} vs {}", c * a, b);
        }
        prop_assert!(close(c * s.std_dev.unwrap(), t.std_dev.unwrap(), 1e-9));
        prop_assert!(opt_close(s.skewness, t.skewness, 1e-8));
        prop_assert!(opt_close(s.kurtosis, t.kurtosis, 1e-8));
        prop_assert!(opt_close(s.mean_over_std, t.mean_over_std, 1e-8));
    }

    #[test]
    fn shifting(xs in series(), shift in -1e3f64..1e3, conv in conventions()) {
        let s = describe(&xs, conv).unwrap();
        let moved: Vec<f64> = xs.iter().map(|x| x + shift).collect();
        let t = describe(&moved, conv).unwrap();
        prop_assert!(close(s.mean + shift, t.mean, 1e-9));
        prop_assert!(close(s.std_dev.unwrap(), t.std_dev.unwrap(), 1e-8));
        prop_assert!(opt_close(s.skewness, t.skewness, 1e-7));
        prop_assert!(opt_close(s.kurtosis, t.kurtosis, 1e-7));
    }

    #[test]
    fn power_law_rescaled_x(
        pairs in prop::collection::vec((0.01f64..100.0, 0.01f64..100.0), 3..60),
        k in 0.01f64..100.0,
    ) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let Ok(fit) = power_law_fit(&xs, &ys) else { return Ok(()); };
        let scaled: Vec<f64> = xs.iter().map(|x| k * x).collect();
        let moved = power_law_fit(&scaled, &ys).unwrap();
        prop_assert!(close(fit.b, moved.b, 1e-8));
        prop_assert!(close(fit.a * k.powf(-fit.b), moved.a, 1e-8));
        prop_assert!((fit.r_squared - moved.r_squared).abs() <= 1e-9);
        prop_assert!((0.0..=1.0).contains(&fit.r_squared));
        prop_assert!(fit.used_points >= 2);
    }

    #[test]
    fn power_law_drops_non_positive(
        pairs in prop::collection::vec((-10.0f64..100.0, -10.0f64..100.0), 0..40),
    ) {
        let (xs, ys): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
        let usable: Vec<f64> = xs
            .iter()
            .zip(&ys)
            .filter(|(x, y)| **x > 0.0 && **y > 0.0)
            .map(|(x, _)| *x)
            .collect();
        match power_law_fit(&xs, &ys) {
            Ok(fit) => {
                prop_assert_eq!(fit.used_points, usable.len());
                prop_assert_eq!(fit.dropped_points, xs.len() - usable.len());
            }
            // Too few points, or every usable x identical.
            Err(_) => prop_assert!(usable.len() < 2 || usable.iter().all(|x| *x == usable[0])),
        }
    }
}
