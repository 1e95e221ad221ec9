use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use robustqv::checker::{check_interval, check_point, parse_property, IntervalMethod, RewardSemantics};
use robustqv::ctmc::{load_model, save_model, IntervalCtmc, RewardStructure, StateId};
use robustqv::mission::{build_mission_ctmc, Configuration, MissionSpec, Phase, RateIntervals};

fn random_model(rng: &mut ChaCha8Rng) -> IntervalCtmc<f64> {
    let n = rng.gen_range(3..=6);
    let mut time = RewardStructure::new("time", n);
    let mut b = IntervalCtmc::builder(n).label(n - 2, "goal");
    for s in 0..n - 2 {
        time = time.with_state_reward(StateId(s), 1.0);
        b = b.interval(s, n - 2, 0.2, 0.2 + rng.gen_range(0.0..1.0));
        for t in 0..n {
            if t != s && t != n - 2 && rng.gen_bool(0.4) {
                b = b.rate(s, t, rng.gen_range(0.1..2.0));
            }
        }
    }
    b.reward(time).build().unwrap()
}

#[test]
fn json_round_trip_preserves_answers() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let prop = parse_property(r#"P=? [ F "goal" ]"#).unwrap();
    for _ in 0..20 {
        let m = random_model(&mut rng);
        let back: IntervalCtmc<f64> = load_model(&save_model(&m)).unwrap();
        assert_eq!(save_model(&back), save_model(&m));
        let a = check_interval(&m, &prop, RewardSemantics::Strict, IntervalMethod::Corners).unwrap();
        let b = check_interval(&back, &prop, RewardSemantics::Strict, IntervalMethod::Corners).unwrap();
        assert_eq!((a.lo, a.hi), (b.lo, b.hi));
    }
}

#[test]
fn corner_range_contains_every_midpoint() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let reach = parse_property(r#"P=? [ F "goal" ]"#).unwrap();
    let reward = parse_property(r#"R{"time"}=? [ F "goal" ]"#).unwrap();
    for _ in 0..30 {
        let m = random_model(&mut rng);
        for (prop, sem) in [(&reach, RewardSemantics::Strict), (&reward, RewardSemantics::UntilAbsorption)] {
            let v = check_interval(&m, prop, sem, IntervalMethod::Corners).unwrap();
            let mid = check_point(&m.instantiate_at(0.5), prop, sem).unwrap();
            assert!(v.lo <= mid + 1e-12 && mid <= v.hi + 1e-12, "{mid} outside [{}, {}]", v.lo, v.hi);
        }
    }
}

#[test]
fn mission_model_survives_a_file_round_trip() {
    let spec = MissionSpec { k: 3, ..MissionSpec::default() };
    let rates = RateIntervals::points(&[0.2; 3], 1e-6, &[0.1; 3]);
    let m = build_mission_ctmc(&spec, &rates, &Configuration::all(1, 3, true), Phase::Inspect).unwrap();
    let back: IntervalCtmc<f64> = load_model(&save_model(&m.ctmc)).unwrap();
    let prop = parse_property(r#"R{"energy"}=? [ F "finish" ]"#).unwrap();
    let a = check_point(&m.ctmc.instantiate_at(0.0), &prop, RewardSemantics::UntilAbsorption).unwrap();
    let b = check_point(&back.instantiate_at(0.0), &prop, RewardSemantics::UntilAbsorption).unwrap();
    assert_eq!(a, b);
    assert!(check_point(&back.instantiate_at(0.0), &prop, RewardSemantics::Strict).unwrap().is_infinite());
}
