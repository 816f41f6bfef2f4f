use std::collections::BTreeSet;

use gmt_core::identities::{
    cyclic_point, lemma1_point, neighbor_split_point, shift_antisymmetry_point, two_step_split_point, Evaluator,
};
use gmt_core::sampling::RandomFunction;
use gmt_core::tn::validate_tn;
use gmt_core::*;
use proptest::prelude::*;
use rand::SeedableRng;

fn row_strategy(max_len: usize, lo: Entry, hi: Entry) -> impl Strategy<Value = Vec<Entry>> {
    prop::collection::vec(lo..=hi, 1..=max_len)
}

fn limits() -> EnumerationLimits {
    EnumerationLimits::default()
}

fn signed_enumeration(k: &[Entry]) -> SignedCount {
    enumerate_gmt(&Row::new(k.to_vec()).unwrap(), limits())
        .map(|t| SignedCount::from(sc_statistic(&t.unwrap()).sign))
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn methods_agree(k in row_strategy(4, -3, 3)) {
        let cache = EvalCache::new();
        let reference = alpha(&k, Method::Operator, &cache).unwrap();
        for m in Method::applicable(&k) {
            prop_assert_eq!(&alpha(&k, m, &cache).unwrap(), &reference, "{}", m);
        }
        prop_assert_eq!(signed_enumeration(&k), reference);
    }

    #[test]
    fn translation_invariance(k in row_strategy(4, -3, 3), t in -5i64..=5) {
        let cache = EvalCache::new().with_translation_normalization(false);
        let shifted: Vec<Entry> = k.iter().map(|x| x + t).collect();
        prop_assert_eq!(
            alpha(&k, Method::Operator, &cache).unwrap(),
            alpha(&shifted, Method::Operator, &cache).unwrap()
        );
    }

    #[test]
    fn cache_is_transparent(k in row_strategy(4, -3, 3)) {
        for m in [Method::Operator, Method::Third] {
            prop_assert_eq!(
                alpha(&k, m, &EvalCache::disabled()).unwrap(),
                alpha(&k, m, &EvalCache::new()).unwrap()
            );
        }
    }

    #[test]
    fn two_argument_closed_form(a in -20i64..=20, b in -20i64..=20) {
        prop_assert_eq!(alpha(&[a, b], Method::Operator, &EvalCache::new()).unwrap(), SignedCount::from(b - a + 1));
    }

    #[test]
    fn summation_identity_for_random_functions(k in row_strategy(5, -4, 4).prop_filter("n >= 2", |k| k.len() >= 2), seed in any::<u64>()) {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let f = RandomFunction::sample(&mut rng, k.len() - 1);
        // Exact for every function up to n = 3; beyond that only for functions
        // vanishing on rows with three consecutive equal entries.
        prop_assert!(lemma1_point(&k, &f, true).unwrap().pass);
        if k.len() <= 3 {
            prop_assert!(lemma1_point(&k, &f, false).unwrap().pass);
        }
        if k.len() >= 3 {
            let eval = |l: &[Entry]| Ok(f.eval(l));
            prop_assert_eq!(operator_apply_alt(&k, &eval).unwrap(), operator_apply(&k, &eval).unwrap());
        }
    }

    #[test]
    fn penultimate_rows_of_gmts_are_admissible(k in row_strategy(5, -2, 2).prop_filter("n >= 2", |k| k.len() >= 2)) {
        let n = k.len();
        // Not every admissible row extends to a full GMT, so this is an inclusion only.
        let admissible: BTreeSet<(Vec<Entry>, usize)> = gmt_admissible_rows(&k)
            .unwrap()
            .into_iter()
            .map(|a| (a.row.into_vec(), a.sc_contribution))
            .collect();
        for t in enumerate_gmt(&Row::new(k.clone()).unwrap(), limits()) {
            let t = t.unwrap();
            let upper = t.row(n - 1).to_vec();
            prop_assert!(admissible.iter().any(|(l, _)| *l == upper), "{:?} not admissible", upper);
        }
    }

    #[test]
    fn proven_identities_hold(k in row_strategy(4, -3, 3).prop_filter("n >= 2", |k| k.len() >= 2), i in 1usize..4) {
        let cache = EvalCache::new();
        let ev = Evaluator::new(Method::Operator, &cache);
        let i = 1 + (i - 1) % (k.len() - 1);
        prop_assert!(cyclic_point(&k, &ev).unwrap().pass);
        prop_assert!(neighbor_split_point(&k, i, &ev).unwrap().pass);
        prop_assert!(two_step_split_point(&k, i, &ev).unwrap().pass);
        prop_assert!(shift_antisymmetry_point(&k, i, &ev).unwrap().pass);
    }

    #[test]
    fn enumerated_gmts_are_valid_and_distinct(k in row_strategy(4, -2, 2)) {
        let all: Vec<Triangle> = enumerate_gmt(&Row::new(k.clone()).unwrap(), limits()).map(|t| t.unwrap()).collect();
        let distinct: BTreeSet<_> = all.iter().cloned().collect();
        prop_assert_eq!(distinct.len(), all.len());
        for t in &all {
            prop_assert!(validate_gmt(t).valid);
            prop_assert_eq!(t.bottom(), &k[..]);
        }
    }

    #[test]
    fn gmts_over_increasing_rows_are_monotone_triangles(mut k in prop::collection::btree_set(-4i64..=5, 1..=4)) {
        let k: Vec<Entry> = std::mem::take(&mut k).into_iter().collect();
        let row = Row::new(k).unwrap();
        let gmts: BTreeSet<Triangle> = enumerate_gmt(&row, limits()).map(|t| t.unwrap()).collect();
        let mts: BTreeSet<Triangle> = enumerate_mt(&row, limits()).unwrap().map(|t| t.unwrap()).collect();
        prop_assert!(gmts.iter().all(validate_monotone_triangle));
        prop_assert_eq!(gmts, mts);
    }

    #[test]
    fn decreasing_rows_give_dmts(k in row_strategy(4, -2, 2)) {
        let mut k = k;
        k.sort_unstable_by(|a, b| b.cmp(a));
        let row = Row::new(k).unwrap();
        let dmts: BTreeSet<Triangle> = enumerate_dmt(&row, limits()).unwrap().map(|t| t.unwrap()).collect();
        prop_assert!(dmts.iter().all(validate_dmt));
        let gmts: BTreeSet<Triangle> = enumerate_gmt(&row, limits()).map(|t| t.unwrap()).collect();
        prop_assert_eq!(dmts, gmts);
    }

    #[test]
    fn involution_is_sign_reversing(k in row_strategy(3, -1, 2)) {
        let row = Row::new(k.clone()).unwrap();
        let mut fixed = BTreeSet::new();
        for o in enumerate_tn(&row, limits()) {
            let o = o.unwrap();
            prop_assert!(validate_tn(&o));
            match involution_step(&o).unwrap() {
                Involution::Partner(p) => {
                    prop_assert_eq!((s_statistic(&p) + s_statistic(&o)) % 2, 1);
                    match involution_step(&p).unwrap() {
                        Involution::Partner(back) => prop_assert_eq!(back, o),
                        Involution::Fixed => prop_assert!(false, "partner is fixed"),
                    }
                }
                Involution::Fixed => {
                    prop_assert!(validate_gmt(o.triangle()).valid);
                    prop_assert_eq!(s_statistic(&o), sc_statistic(o.triangle()).sc);
                    fixed.insert(o.triangle().clone());
                }
            }
        }
        let gmts: BTreeSet<Triangle> = enumerate_gmt(&row, limits()).map(|t| t.unwrap()).collect();
        prop_assert_eq!(fixed, gmts);
        prop_assert_eq!(signed_tn_count(&row), signed_gmt_count(&row));
    }

    #[test]
    fn json_round_trips(k in row_strategy(4, -2, 2)) {
        let row = Row::new(k).unwrap();
        for t in enumerate_gmt(&row, limits()).take(20) {
            let t = t.unwrap();
            let json = t.to_json();
            let back = Triangle::from_json(&json).unwrap();
            prop_assert_eq!(back.to_json(), json);
            prop_assert_eq!(back, t);
        }
        for o in enumerate_tn(&row, limits()).take(20) {
            let o = o.unwrap();
            let json = o.to_json();
            let back = TnObject::from_json(&json).unwrap();
            prop_assert_eq!(back.to_json(), json);
            prop_assert_eq!(back, o);
        }
    }
}

#[test]
fn summation_identity_needs_reduced_functions_from_four_arguments() {
    // The operator weights (0,0,0) by -1, but no row is admissible above (0,0,0,0).
    let indicator = |l: &[Entry]| Ok(SignedCount::from(i32::from(l == [0, 0, 0])));
    assert_eq!(
        operator_apply(&[0, 0, 0, 0], &indicator).unwrap(),
        SignedCount::from(-1)
    );
    assert!(gmt_admissible_rows(&[0, 0, 0, 0]).unwrap().is_empty());
    // alpha vanishes on such rows, so the recursion for alpha is unaffected.
    assert_eq!(
        alpha(&[0, 0, 0], Method::Operator, &EvalCache::new()).unwrap(),
        SignedCount::from(0)
    );
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let spec = ConjectureSpec::new(IdentityId::Lemma1).with_grid(Grid {
        n: 4,
        window: Window::new(-5, 5).unwrap(),
        sampling: Sampling::Sampled { samples: 20, seed: 11 },
    });
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        let r = pool.install(|| run_conjecture_suite(&spec, &EvalCache::new()).unwrap());
        serde_json::to_string(&r).unwrap()
    };
    assert_eq!(run(1), run(4));
}
