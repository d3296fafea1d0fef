use ge_sim::config::{Spacing, Sweep, TimeUnit};
use ge_sim::observables::{pex_numeric, visibility, visibility_closed_form};
use ge_sim::series::format_value;
use ge_sim::Model;
use num_complex::Complex64;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn formatted_values_round_trip(v in prop::num::f64::NORMAL) {
        let back: f64 = format_value(v).parse().unwrap();
        prop_assert!(((back - v) / v).abs() <= 5e-15);
    }

    #[test]
    fn undetected_visibility_is_the_closed_form(
        re in -1.5f64..1.5, im in -1.5f64..1.5, w0 in 0.05f64..0.95, w1 in 1.01f64..3.0, t in 0.0f64..200.0
    ) {
        let m = Model::dimensionless(1e-3, w0, w1, Complex64::new(re, im)).unwrap();
        let v = visibility(&m, t, false, false).unwrap();
        prop_assert!((0.0..=1.0 + 1e-15).contains(&v));
        prop_assert!((v - visibility_closed_form(&m, t)).abs() <= 1e-12);
    }

    #[test]
    fn sweep_points_are_ordered(a in 0.01f64..10.0, span in 0.1f64..100.0, n in 2usize..50, log in any::<bool>()) {
        let s = Sweep {
            t_start: a,
            t_end: a + span,
            n_points: n,
            spacing: if log { Spacing::Log } else { Spacing::Linear },
            unit: TimeUnit::Internal,
        };
        let p = s.points();
        prop_assert_eq!(p.len(), n);
        prop_assert!((p[0] - a).abs() <= 1e-12 * a);
        prop_assert_eq!(p[n - 1], a + span);
        prop_assert!(p.windows(2).all(|w| w[1] > w[0]));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn excitation_scales_with_coupling_and_amplitude(g in 1e-6f64..1e-2, a in 0.05f64..2.0, f in 0.1f64..5.0) {
        let base = Model::dimensionless(1e-3, 0.8, 1.2, Complex64::new(0.5, 0.0)).unwrap();
        let m = Model::dimensionless(g, 0.8, 1.2, Complex64::new(0.0, a)).unwrap();
        let t = f * base.t_sat;
        let ratio = pex_numeric(&m, t).unwrap() / pex_numeric(&base, t).unwrap();
        let expect = (g / 1e-3).powi(2) * (a / 0.5).powi(2);
        prop_assert!((ratio / expect - 1.0).abs() <= 1e-10);
    }
}
