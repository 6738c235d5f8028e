//! Invariants checked on generated inputs.

use dilatekit::bounds::{corollary2_check, lemma_graph_check, theorem_bound};
use dilatekit::io::{parse_set, write_set, SetFormat};
use dilatekit::kernel::{self, KernelConfig, Strategy as Kernel};
use dilatekit::residue::{delta_set, residue_count};
use dilatekit::{
    decompose, dilate, evaluate_form, extremal_min, mod_sum, normalize_set, oracle, IntSet,
    LinearForm, ModSet, SearchMode, SearchSpec,
};
use num_bigint::BigInt;
use proptest::prelude::*;

fn small_set(max_len: usize, lo: i64, hi: i64) -> impl Strategy<Value = IntSet> {
    prop::collection::vec(lo..=hi, 1..=max_len).prop_map(IntSet::from_vec)
}

fn coeff() -> impl Strategy<Value = i64> {
    prop_oneof![-5i64..=-1, 1i64..=9]
}

fn mod_set(n: u64) -> impl Strategy<Value = ModSet> {
    prop::collection::vec(0..n, 0..=n as usize)
        .prop_map(move |v| ModSet::from_residues(n, v.into_iter().map(|x| x as i64)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_kernel_matches_oracle(a in small_set(40, -300, 300), b in small_set(40, -300, 300), u in coeff(), v in coeff()) {
        let want = oracle::dilated_sum(&a, u, &b, v).unwrap();
        for s in [Kernel::Auto, Kernel::Pairwise, Kernel::ShiftOr, Kernel::Merge] {
            let cfg = KernelConfig::with_strategy(s);
            prop_assert_eq!(&kernel::dilated_sum(&a, u, &b, v, &cfg).unwrap(), &want);
            prop_assert_eq!(kernel::dilated_sum_len(&a, u, &b, v, &cfg).unwrap(), want.len());
        }
    }

    #[test]
    fn ternary_forms_match_oracle(a in small_set(12, -50, 50), c in prop::collection::vec(coeff(), 1..=3)) {
        let f = LinearForm::new(c).unwrap();
        prop_assert_eq!(evaluate_form(&f, &a).unwrap(), oracle::evaluate_form(&f, &a).unwrap());
    }

    #[test]
    fn cardinality_is_affine_invariant(a in small_set(30, -1000, 1000), m in coeff(), k in coeff()) {
        let f = LinearForm::binary(m, k).unwrap();
        let norm = normalize_set(&a).unwrap();
        prop_assert_eq!(norm.restore().unwrap(), a.clone());
        prop_assert_eq!(norm.set.min(), Some(0));
        prop_assert!(norm.set.len() == 1 || norm.set.gcd() == 1);
        prop_assert_eq!(evaluate_form(&f, &a).unwrap().len(), evaluate_form(&f, &norm.set).unwrap().len());
    }

    #[test]
    fn translation_shifts_by_coefficient_sum(a in small_set(30, -100, 100), m in coeff(), k in coeff(), t in -50i64..50) {
        let f = LinearForm::binary(m, k).unwrap();
        let shifted = evaluate_form(&f, &a.translate(t).unwrap()).unwrap();
        prop_assert_eq!(shifted, evaluate_form(&f, &a).unwrap().translate((m + k) * t).unwrap());
    }

    #[test]
    fn dilation_is_injective_and_composes(a in small_set(30, -1000, 1000), u in coeff(), v in coeff()) {
        prop_assert_eq!(dilate(&a, u).unwrap().len(), a.len());
        prop_assert_eq!(dilate(&dilate(&a, v).unwrap(), u).unwrap(), dilate(&a, u * v).unwrap());
    }

    #[test]
    fn mod_sum_is_a_commutative_monoid(
        (n, a, b, c) in (2u64..=70).prop_flat_map(|n| (Just(n), mod_set(n), mod_set(n), mod_set(n)))
    ) {
        let ab = mod_sum(&a, &b).unwrap();
        prop_assert_eq!(&ab, &mod_sum(&b, &a).unwrap());
        prop_assert_eq!(mod_sum(&ab, &c).unwrap(), mod_sum(&a, &mod_sum(&b, &c).unwrap()).unwrap());
        prop_assert_eq!(mod_sum(&a, &ModSet::from_residues(n, [0])).unwrap(), a.clone());
        let naive: Vec<i64> = a.members().flat_map(|x| b.members().map(move |y| (x + y) as i64)).collect();
        prop_assert_eq!(ab, ModSet::from_residues(n, naive));
    }

    #[test]
    fn decomposition_partitions_and_rebuilds(a in small_set(40, -200, 200), k in 2i64..=12) {
        let d = decompose(&a, k).unwrap();
        prop_assert_eq!(d.j(), residue_count(&a, k).unwrap());
        let mut all = IntSet::new();
        let mut total = 0;
        for w in d.classes().windows(2) {
            prop_assert!(w[0].len() >= w[1].len());
        }
        for c in d.classes() {
            prop_assert_eq!(&dilate(&c.quotient, k).unwrap().translate(c.residue as i64).unwrap(), &c.elements);
            prop_assert!(c.elements.iter().all(|x| x.rem_euclid(k) as u64 == c.residue));
            total += c.len();
            all = all.union(&c.elements);
        }
        prop_assert_eq!(total, a.len());
        prop_assert_eq!(all, a.clone());
        let mut ef = d.e_indices();
        ef.extend(d.f_indices());
        ef.sort();
        prop_assert_eq!(ef, (1..=d.j()).collect::<Vec<_>>());
    }

    #[test]
    fn graph_lemma_and_single_class(a in small_set(14, 0, 25), k in 2i64..=7) {
        let r = lemma_graph_check(&a, k).unwrap();
        prop_assert!(r.satisfied, "{:?}", r);
        let single = dilate(&a, k).unwrap().translate(1).unwrap();
        let d = decompose(&single, k).unwrap();
        prop_assert!(delta_set(&d, 1, &single).unwrap().elements.is_empty());
    }

    #[test]
    fn theorem_bound_steps_by_k_plus_two(k in 2u64..=40, s in 1u64..=100_000) {
        prop_assert_eq!(theorem_bound(k, s + 1) - theorem_bound(k, s), BigInt::from(k + 2));
    }

    #[test]
    fn full_residue_corollary_dominates_theorem(k in (1i64..=12).prop_map(|x| 2 * x + 1), extra in small_set(20, 0, 400)) {
        // force c_k(A) = k
        let a = extra.union(&IntSet::interval(0, k - 1));
        let r = corollary2_check(k, &a).unwrap();
        prop_assert_eq!(r.hypothesis("full_residues"), Some(true));
        prop_assert!(r.bound >= theorem_bound(k as u64, a.len() as u64));
        prop_assert!(r.satisfied);
        prop_assert_eq!(&r.margin, &(BigInt::from(r.actual) - &r.bound));
    }

    #[test]
    fn set_files_round_trip(a in small_set(50, i64::MIN / 2, i64::MAX / 2)) {
        for format in [SetFormat::Text, SetFormat::Json] {
            let mut buf = Vec::new();
            write_set(&mut buf, &a, format).unwrap();
            let parsed = parse_set(std::str::from_utf8(&buf).unwrap()).unwrap();
            prop_assert_eq!(&parsed.set, &a);
            prop_assert_eq!(parsed.duplicates, 0);
        }
    }
}

#[test]
fn search_does_not_depend_on_thread_count() {
    let specs = [
        SearchSpec::new(3, 5, 14, SearchMode::Exhaustive),
        SearchSpec::new(5, 4, 12, SearchMode::Exhaustive)
            .raw()
            .with_witness_cap(3),
        SearchSpec::new(
            9,
            30,
            5000,
            SearchMode::Random {
                samples: 40,
                seed: 7,
            },
        ),
    ];
    for spec in specs {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| serde_json::to_string(&extremal_min(&spec).unwrap()).unwrap())
        };
        assert_eq!(run(1), run(3));
    }
}
