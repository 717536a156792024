//! Randomised properties of reachability runs.

use logizono::explicit::reach_explicit;
use logizono::reach::Reacher;
use logizono::selftest::random_model;
use logizono::{reach, Algebra, Mode, Model, ReachOptions, ReachResult, DEFAULT_EVAL_CAP};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn model(seed: u64) -> Model {
    random_model(&mut ChaCha8Rng::seed_from_u64(seed), 4)
}

fn sizes(r: &ReachResult) -> Vec<(usize, u64)> {
    r.records.iter().map(|s| (s.steps, s.size)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn poly_exact_matches_enumeration(seed in any::<u64>()) {
        let m = model(seed);
        let oracle = reach_explicit(&m, 4).unwrap();
        let mut r = Reacher::new(&m, Algebra::Poly, Mode::Exact, ReachOptions::default()).unwrap();
        for (k, want) in oracle.iter().enumerate() {
            if k > 0 {
                r.advance().unwrap();
            }
            prop_assert_eq!(&r.state().joint_points(DEFAULT_EVAL_CAP).unwrap(), want);
        }
    }

    #[test]
    fn minkowski_algebras_contain_enumeration(seed in any::<u64>()) {
        let m = model(seed);
        let oracle = reach_explicit(&m, 4).unwrap();
        for (algebra, mode) in [(Algebra::Logical, Mode::Minkowski), (Algebra::Poly, Mode::Minkowski)] {
            let mut r = Reacher::new(&m, algebra, mode, ReachOptions::default()).unwrap();
            for (k, want) in oracle.iter().enumerate() {
                if k > 0 {
                    r.advance().unwrap();
                }
                prop_assert!(want.is_subset(&r.state().joint_points(DEFAULT_EVAL_CAP).unwrap()));
            }
        }
    }

    #[test]
    fn broken_dependencies_only_grow(seed in any::<u64>()) {
        let m = model(seed);
        let opts = ReachOptions::default();
        let loose = ReachOptions { break_next_state_deps: true, ..opts.clone() };
        let tight = reach(&m, 4, Algebra::Explicit, Mode::Minkowski, &opts).unwrap();
        let wide = reach(&m, 4, Algebra::Explicit, Mode::Minkowski, &loose).unwrap();
        let poly_wide = reach(&m, 4, Algebra::Poly, Mode::Exact, &loose).unwrap();
        prop_assert_eq!(sizes(&wide), sizes(&poly_wide));
        for (a, b) in tight.records.iter().zip(&wide.records) {
            prop_assert!(a.size <= b.size);
        }
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>()) {
        let m = model(seed);
        for algebra in [Algebra::Explicit, Algebra::Logical, Algebra::Poly] {
            let opts = ReachOptions { keep_sets: true, ..ReachOptions::default() };
            let a = reach(&m, 4, algebra, Mode::Minkowski, &opts).unwrap();
            let b = reach(&m, 4, algebra, Mode::Minkowski, &opts).unwrap();
            prop_assert_eq!(sizes(&a), sizes(&b));
            for (x, y) in a.records.iter().zip(&b.records) {
                let (xs, ys) = (x.sets.as_ref().unwrap(), y.sets.as_ref().unwrap());
                for (p, q) in xs.iter().zip(ys) {
                    prop_assert_eq!(
                        p.set.evaluate(DEFAULT_EVAL_CAP).unwrap(),
                        q.set.evaluate(DEFAULT_EVAL_CAP).unwrap()
                    );
                }
            }
        }
    }

    #[test]
    fn model_documents_round_trip(seed in any::<u64>()) {
        let m = model(seed);
        let again = Model::from_json(&m.to_json()).unwrap();
        prop_assert_eq!(m.to_json(), again.to_json());
    }
}

#[test]
fn reports_round_trip() {
    let m = model(9);
    let opts = ReachOptions { keep_sets: true, seed: Some(9), ..ReachOptions::default() };
    let r = reach(&m, 3, Algebra::Poly, Mode::Exact, &opts).unwrap();
    assert_eq!(ReachResult::from_json(&r.to_json().unwrap()).unwrap(), r);
    let csv = r.to_csv().unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# model="));
    assert_eq!(lines.next(), Some("steps,time_seconds,size"));
    assert_eq!(lines.count(), 4);
}

#[test]
fn zero_steps_reports_initial_size() {
    let m = model(3);
    let r = reach(&m, 0, Algebra::Explicit, Mode::Minkowski, &ReachOptions::default()).unwrap();
    assert_eq!(r.records.len(), 1);
    assert_eq!(r.records[0].size as usize, reach_explicit(&m, 0).unwrap()[0].len());
}
