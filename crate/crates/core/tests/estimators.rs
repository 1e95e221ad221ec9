use proptest::prelude::*;

use robustqv::bipp::{bipp_bounds, grid_oracle, numeric_bounds, PartialPrior, Strategy as Method};
use robustqv::ctmc::RateObservation;
use robustqv::ipsp::{ipsp_bounds, posterior_point, GammaPriorSet};

fn m3() -> impl Strategy<Value = PartialPrior<f64>> {
    (-4.0f64..-1.0, 1.5f64..20.0, 0.05f64..0.6, 0.05f64..0.3).prop_map(|(le1, ratio, t1, t2)| {
        let e1 = 10f64.powf(le1);
        PartialPrior::new(vec![0.0, e1, e1 * ratio, f64::INFINITY], vec![t1, t2, 1.0 - t1 - t2]).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn closed_form_encloses_numeric(p in m3(), lt in 0.0f64..6.0) {
        let t = 10f64.powf(lt);
        let cf = bipp_bounds(&p, t, Method::ClosedForm).unwrap();
        let num = numeric_bounds(&p, t);
        prop_assert!(cf.lower <= num.lower * (1.0 + 1e-9));
        prop_assert!(cf.upper >= num.upper * (1.0 - 1e-9));
        prop_assert!(num.lower <= num.upper);
    }

    #[test]
    fn numeric_matches_grid(p in m3(), lt in 0.0f64..5.0) {
        let t = 10f64.powf(lt);
        let num = numeric_bounds(&p, t);
        let g = grid_oracle(&p, t, 1000);
        prop_assert!((num.upper - g.upper).abs() <= 1e-6 * g.upper, "{} vs {}", num.upper, g.upper);
        prop_assert!((num.lower - g.lower).abs() <= 1e-6 * g.lower.max(1e-300));
    }

    #[test]
    fn ipsp_bounds_every_box_point(
        t0 in (1.0f64..100.0, 0.0f64..500.0),
        l0 in (0.01f64..5.0, 1.0f64..4.0),
        n in 0u64..5000,
        t in 0.1f64..1000.0,
        u in (0.0f64..=1.0, 0.0f64..=1.0),
    ) {
        let prior = GammaPriorSet::new((t0.0, t0.0 + t0.1), (l0.0, l0.0 * l0.1)).unwrap();
        let obs = RateObservation::new(n, t);
        let b = ipsp_bounds(&prior, obs);
        let v = posterior_point(prior.t0().lerp(u.0), prior.lambda0().lerp(u.1), obs);
        let slack = 1e-12 * v.abs().max(1.0);
        prop_assert!(b.lower - slack <= v && v <= b.upper + slack);
    }
}

#[test]
fn upper_bound_shrinks_with_exposure_for_m2() {
    let p = PartialPrior::new(vec![0.0, 0.002, f64::INFINITY], vec![0.4, 0.6]).unwrap();
    let ups: Vec<f64> = [1.0, 10.0, 100.0, 1e3, 1e4].iter().map(|&t| bipp_bounds(&p, t, Method::Auto).unwrap().upper).collect();
    assert!(ups.windows(2).all(|w| w[1] <= w[0]), "{ups:?}");
    assert!((ups[4] - 0.002 / 0.4).abs() < 1e-12);
}
