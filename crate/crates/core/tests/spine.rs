use std::collections::BTreeSet;

use proptest::prelude::*;
use spineless::eqcore::{
    apply_substitution, is_mingly, is_trivial, linearize_one_var, ExponentVector, SimpleEquation,
    Substitution,
};
use spineless::spine::{
    check_star_falsifier, classify_prespinal, enumerate_blockings, falsify_star, find_b_solution,
    find_positive_orthogonal, onevar_star_bound, search_star_counterexample, verify_farkas,
    verify_spinal, Blocking, Classification, FarkasOutcome, Limits, StarMode,
};

fn ev(x: &[u64]) -> ExponentVector {
    ExponentVector::new(x.to_vec())
}

fn eq(cols: &[&[u64]]) -> SimpleEquation {
    SimpleEquation::from_columns(cols).unwrap()
}

fn set(x: &[usize]) -> BTreeSet<usize> {
    x.iter().copied().collect()
}

/// Every assignment of rows to blocks `0..=k` that yields a valid blocking.
fn blockings_oracle(e: &SimpleEquation) -> BTreeSet<Vec<Vec<usize>>> {
    let n = e.arity();
    let mut out = BTreeSet::new();
    for k in 1..=n {
        let total = (k + 1).pow(n as u32);
        for code in 0..total {
            let mut rows = vec![BTreeSet::new(); k + 1];
            let mut c = code;
            for r in 0..n {
                rows[c % (k + 1)].insert(r);
                c /= k + 1;
            }
            let Some(b) = Blocking::from_rows(e, rows.clone()) else {
                continue;
            };
            // the defining conditions, checked directly
            for j in 1..=k {
                assert!(!b.columns[j].is_empty());
                for &r in &b.rows[j] {
                    assert!(b.columns[j].iter().any(|d| d.get(r) > 0));
                }
                for d in &b.columns[j] {
                    assert!(b.rows[j].iter().any(|&r| d.get(r) > 0));
                    for i in j + 1..=k {
                        assert!(b.rows[i].iter().all(|&r| d.get(r) == 0));
                    }
                }
            }
            for d in &b.columns[0] {
                assert!((1..=k).all(|i| b.rows[i].iter().all(|&r| d.get(r) == 0)));
            }
            out.insert(rows.iter().map(|r| r.iter().copied().collect()).collect());
        }
    }
    out
}

/// Searches substitutions with at most `n` rows and entries in `0..=cap` for
/// a spinal image.
fn spinal_image_oracle(e: &SimpleEquation, cap: u64) -> bool {
    let n = e.arity();
    for k in 1..=n.min(2) {
        let cells = k * n;
        let total = (cap + 1).pow(cells as u32);
        for code in 0..total {
            let mut c = code;
            let mut flat = Vec::with_capacity(cells);
            for _ in 0..cells {
                flat.push(c % (cap + 1));
                c /= cap + 1;
            }
            let rows: Vec<Vec<u64>> = flat.chunks(n).map(|r| r.to_vec()).collect();
            let s = Substitution::new(n, rows).unwrap();
            let f = s.apply(&ExponentVector::ones(n));
            let v: Vec<ExponentVector> = e
                .columns()
                .iter()
                .map(|d| s.apply(d))
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            if verify_spinal(&f, &v) {
                return true;
            }
        }
    }
    false
}

fn table() -> Vec<(&'static str, SimpleEquation)> {
    vec![
        ("i", eq(&[&[2]])),
        ("ii", eq(&[&[0], &[2]])),
        ("iii", eq(&[&[2], &[4]])),
        ("iv", eq(&[&[0, 0], &[2, 1], &[3, 2]])),
        ("v", eq(&[&[2, 1, 0], &[0, 2, 1], &[1, 0, 2]])),
        ("vi", eq(&[&[0, 1, 1], &[1, 0, 2]])),
    ]
}

fn example_spine() -> SimpleEquation {
    let m: [[u64; 10]; 8] = [
        [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
        [0, 0, 0, 1, 1, 1, 0, 0, 2, 0],
        [0, 0, 0, 0, 0, 0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0, 0, 0, 1, 0, 1],
        [0, 2, 0, 0, 0, 1, 0, 1, 0, 0],
        [0, 1, 0, 2, 0, 0, 0, 2, 0, 2],
        [0, 0, 0, 1, 0, 2, 0, 1, 0, 1],
        [0, 4, 0, 1, 2, 0, 4, 0, 0, 0],
    ];
    let cols: Vec<ExponentVector> = (0..10)
        .map(|j| ExponentVector::new(m.iter().map(|r| r[j]).collect()))
        .collect();
    SimpleEquation::new(8, cols).unwrap()
}

fn example_sigma() -> Substitution {
    Substitution::new(
        8,
        vec![
            vec![0, 2, 0, 0, 0, 0, 1, 1],
            vec![0, 0, 1, 0, 1, 1, 1, 0],
            vec![0, 0, 0, 1, 0, 0, 0, 0],
        ],
    )
    .unwrap()
}

#[test]
fn single_row_blocking() {
    let e = eq(&[&[2], &[4]]);
    let bs = enumerate_blockings(&e, &Limits::default()).unwrap();
    assert_eq!(bs.len(), 1);
    assert_eq!(bs[0].rows, vec![set(&[]), set(&[0])]);
    assert_eq!(bs[0].columns[1], vec![ev(&[2]), ev(&[4])]);
}

#[test]
fn single_column_blocking() {
    let e = eq(&[&[1, 1]]);
    let bs = enumerate_blockings(&e, &Limits::default()).unwrap();
    assert!(bs.iter().any(|b| b.rows == vec![set(&[]), set(&[0, 1])]));
}

#[test]
fn example_blocking_is_enumerated() {
    let e = example_spine();
    let bs = enumerate_blockings(&e, &Limits::default()).unwrap();
    let want = vec![set(&[0]), set(&[1, 7]), set(&[4, 5, 6]), set(&[2, 3])];
    let b = bs
        .iter()
        .find(|b| b.rows == want)
        .expect("blocking present");
    assert_eq!(Blocking::from_rows(&e, want).as_ref(), Some(b));
    assert!(find_b_solution(&e, b).is_some());
}

#[test]
fn blockings_are_sorted() {
    let e = example_spine();
    let bs = enumerate_blockings(&e, &Limits::default()).unwrap();
    for w in bs.windows(2) {
        assert!(w[0].k() >= w[1].k());
    }
}

#[test]
fn blockings_match_oracle_on_table() {
    for (_, e) in table() {
        let got: BTreeSet<Vec<Vec<usize>>> = enumerate_blockings(&e, &Limits::default())
            .unwrap()
            .iter()
            .map(|b| b.rows.iter().map(|r| r.iter().copied().collect()).collect())
            .collect();
        assert_eq!(got, blockings_oracle(&e));
    }
}

#[test]
fn arity_cap_is_reported() {
    let e = eq(&[&[1, 1, 1]]);
    let limits = Limits {
        max_arity: 2,
        max_columns: 10,
    };
    assert!(enumerate_blockings(&e, &limits).is_err());
    assert!(classify_prespinal(&e, &limits).is_err());
}

#[test]
fn farkas_examples() {
    let o = find_positive_orthogonal(&[vec![2, -2]], &set(&[0, 1]), &set(&[0, 1]), 2);
    assert_eq!(o, FarkasOutcome::Solution(vec![1, 1]));
    let m = vec![vec![1, 0]];
    let o = find_positive_orthogonal(&m, &set(&[0]), &set(&[0, 1]), 2);
    assert!(!o.is_solution());
    assert!(verify_farkas(&o, &m, &set(&[0]), &set(&[0, 1]), 2));
    let m = vec![vec![2]];
    let o = find_positive_orthogonal(&m, &set(&[0]), &set(&[0]), 1);
    assert!(!o.is_solution());
    assert!(verify_farkas(&o, &m, &set(&[0]), &set(&[0]), 1));
}

#[test]
fn b_solution_examples() {
    let e = eq(&[&[2], &[4]]);
    let b = &enumerate_blockings(&e, &Limits::default()).unwrap()[0];
    assert!(find_b_solution(&e, b).is_none());

    let e = eq(&[&[1, 0], &[0, 1]]);
    let b = Blocking::from_rows(&e, vec![set(&[]), set(&[0, 1])]).unwrap();
    let s = find_b_solution(&e, &b).unwrap();
    assert_eq!(s.rows(), &[vec![1, 1]]);
}

#[test]
fn verify_spinal_examples() {
    let v = [
        ev(&[0, 0, 0]),
        ev(&[4, 0, 0]),
        ev(&[4, 3, 0]),
        ev(&[1, 4, 1]),
    ];
    assert!(verify_spinal(&ev(&[4, 4, 1]), &v));
    assert!(!verify_spinal(&ev(&[2]), &[ev(&[2])]));
    assert!(!verify_spinal(&ev(&[1, 1]), &[ev(&[0, 1])]));
}

#[test]
fn table_classification() {
    for (name, e) in table() {
        let c = classify_prespinal(&e, &Limits::default()).unwrap();
        let want = matches!(name, "i" | "ii" | "vi");
        assert_eq!(c.is_prespinal(), want, "equation {}", name);
        if let Classification::Prespinal(w) = c {
            assert!(verify_spinal(&w.f, &w.v));
        }
    }
    let vi = &table()[5].1;
    assert_eq!(is_mingly(vi).unwrap().rows(), &[vec![1, 1, 0]]);
}

#[test]
fn example_spine_classification() {
    let e = example_spine();
    let Classification::Prespinal(w) = classify_prespinal(&e, &Limits::default()).unwrap() else {
        panic!("expected prespinal");
    };
    assert!(verify_spinal(&w.f, &w.v));
    let image = apply_substitution(&example_sigma(), &e.to_basic()).unwrap();
    assert_eq!(
        image.to_string(),
        "x1^4*x2^4*x3 <= 1 v x1*x2^4*x3 v x1^4 v x1^4*x2^3"
    );
}

#[test]
fn epsilon_c_is_spineless() {
    let e = eq(&[&[2, 2, 2], &[4, 4, 4]]);
    assert_eq!(
        classify_prespinal(&e, &Limits::default()).unwrap(),
        Classification::Spineless
    );
}

#[test]
fn one_variable_characterization() {
    let limits = Limits {
        max_arity: 4,
        max_columns: 256,
    };
    for n in 1..=4u64 {
        for mask in 1u32..64 {
            let p: BTreeSet<u64> = (0..6u64).filter(|i| mask >> i & 1 == 1).collect();
            if p.len() > 3 || p == BTreeSet::from([0]) {
                continue;
            }
            let e = linearize_one_var(n, &p).unwrap();
            let trivial = p.contains(&n);
            assert_eq!(is_trivial(&e), trivial);
            let positives = p.iter().filter(|&&x| x > 0).count();
            let spineless = !classify_prespinal(&e, &limits).unwrap().is_prespinal();
            assert_eq!(spineless, trivial || positives >= 2, "n={} P={:?}", n, p);
        }
    }
}

#[test]
fn falsify_star_on_ds() {
    let f = ev(&[1]);
    let v = [ev(&[0]), ev(&[2])];
    for k in 2..=6 {
        let w = falsify_star(&f, &v, k).unwrap();
        assert!(check_star_falsifier(&f, &v, k, &w), "K={}", k);
    }
    // the family C = K^2, tau = (K^4 - K^2)/2 passes the same check
    let fam = spineless::spine::StarFalsifier {
        tau: vec![36],
        c: 9,
    };
    assert!(check_star_falsifier(&f, &v, 3, &fam));
    assert!(falsify_star(&f, &v, 1).is_err());
    assert!(falsify_star(&ev(&[2]), &[ev(&[2])], 3).is_err());
}

#[test]
fn falsify_star_knotted() {
    let f = ev(&[2]);
    let v = [ev(&[3])];
    for k in 2..=5 {
        let w = falsify_star(&f, &v, k).unwrap();
        assert!(check_star_falsifier(&f, &v, k, &w));
    }
}

#[test]
fn falsify_star_on_example_image() {
    let f = ev(&[4, 4, 1]);
    let v = [
        ev(&[0, 0, 0]),
        ev(&[4, 0, 0]),
        ev(&[4, 3, 0]),
        ev(&[1, 4, 1]),
    ];
    for k in 2..=4 {
        let w = falsify_star(&f, &v, k).unwrap();
        assert!(check_star_falsifier(&f, &v, k, &w));
    }
}

#[test]
fn onevar_bounds() {
    assert_eq!(onevar_star_bound(1, &BTreeSet::from([2, 4])).unwrap(), 4);
    assert_eq!(onevar_star_bound(1, &BTreeSet::from([2, 3])).unwrap(), 3);
    assert_eq!(onevar_star_bound(2, &BTreeSet::from([1, 5])).unwrap(), 6);
    assert!(onevar_star_bound(1, &BTreeSet::from([0, 2])).is_err());
    assert!(onevar_star_bound(2, &BTreeSet::from([2, 3])).is_err());
}

/// Independent check that a single-mode witness is a violation.
fn is_violation(e: &SimpleEquation, k: u64, sigma: &[u64], c: u128) -> bool {
    let s = Substitution::new(e.arity(), vec![sigma.to_vec()]).unwrap();
    let one = s.apply(&ExponentVector::ones(e.arity())).get(0);
    e.columns().iter().all(|d| {
        let mut x = c + u128::from(s.apply(d).get(0));
        while x > 1 && x.is_multiple_of(u128::from(k)) {
            x /= u128::from(k);
        }
        x == 1
    }) && e.columns().iter().all(|d| s.apply(d).get(0) != one)
}

#[test]
fn star_search_examples() {
    let e = eq(&[&[2], &[4]]);
    let k = onevar_star_bound(1, &BTreeSet::from([2, 4])).unwrap();
    assert_eq!(
        search_star_counterexample(&e, k, StarMode::Double, 40).unwrap(),
        None
    );

    let ds = eq(&[&[0], &[2]]);
    let w = search_star_counterexample(&ds, 2, StarMode::Single, 10)
        .unwrap()
        .expect("witness");
    assert!(is_violation(&ds, 2, &w.sigma, w.c));

    let t = eq(&[&[1]]);
    for mode in [StarMode::Single, StarMode::Double] {
        assert_eq!(search_star_counterexample(&t, 3, mode, 5).unwrap(), None);
    }
}

#[test]
fn star_search_finds_least_substitution() {
    let ds = eq(&[&[0], &[2]]);
    let w = search_star_counterexample(&ds, 2, StarMode::Single, 10)
        .unwrap()
        .unwrap();
    for s in 0..w.sigma[0] {
        for c in 0..=64u128 {
            assert!(!is_violation(&ds, 2, &[s], c));
        }
    }
}

fn small_equation() -> impl Strategy<Value = SimpleEquation> {
    (1usize..=3)
        .prop_flat_map(|n| prop::collection::btree_set(prop::collection::vec(0u64..=3, n), 1..=4))
        .prop_filter_map("rows must be nonzero", |cols| {
            let n = cols.iter().next().unwrap().len();
            SimpleEquation::new(n, cols.into_iter().map(ExponentVector::new)).ok()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn blockings_agree_with_oracle(e in small_equation()) {
        let got: BTreeSet<Vec<Vec<usize>>> = enumerate_blockings(&e, &Limits::default())
            .unwrap()
            .iter()
            .map(|b| b.rows.iter().map(|r| r.iter().copied().collect()).collect())
            .collect();
        prop_assert_eq!(got, blockings_oracle(&e));
    }

    #[test]
    fn mingly_implies_prespinal(e in small_equation()) {
        if is_mingly(&e).is_some() {
            prop_assert!(classify_prespinal(&e, &Limits::default()).unwrap().is_prespinal());
        }
    }

    #[test]
    fn adding_zero_preserves_classification(e in small_equation()) {
        let z = e.with_column(ExponentVector::zeros(e.arity())).unwrap();
        let a = classify_prespinal(&e, &Limits::default()).unwrap().is_prespinal();
        let b = classify_prespinal(&z, &Limits::default()).unwrap().is_prespinal();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn classification_agrees_with_small_substitutions(e in small_equation()) {
        let c = classify_prespinal(&e, &Limits::default()).unwrap();
        if spinal_image_oracle(&e, 2) {
            prop_assert!(c.is_prespinal());
        }
        if let Classification::Prespinal(w) = &c {
            prop_assert!(verify_spinal(&w.f, &w.v));
            let image: BTreeSet<ExponentVector> =
                e.columns().iter().map(|d| w.sigma.apply(d)).collect();
            prop_assert_eq!(image, w.v.iter().cloned().collect::<BTreeSet<_>>());
            prop_assert_eq!(w.sigma.apply(&ExponentVector::ones(e.arity())), w.f.clone());
        }
    }

    #[test]
    fn farkas_exactly_one_branch(
        m in prop::collection::vec(prop::collection::vec(-3i64..=3, 3), 0..4),
        tmask in 1u8..8,
        extra in 0u8..8,
    ) {
        let t: BTreeSet<usize> = (0..3).filter(|i| tmask >> i & 1 == 1).collect();
        let s: BTreeSet<usize> = (0..3).filter(|i| (tmask | extra) >> i & 1 == 1).collect();
        let o = find_positive_orthogonal(&m, &t, &s, 3);
        prop_assert!(verify_farkas(&o, &m, &t, &s, 3));
    }

    #[test]
    fn falsifier_passes_check(
        diag in prop::collection::vec(1u64..=3, 1..=3),
        upper in prop::collection::vec(0u64..=3, 3),
        fbump in prop::collection::vec(0u64..=3, 3),
        zero in any::<bool>(),
        k in 2u64..=5,
    ) {
        let n = diag.len();
        let mut v = Vec::new();
        let mut u = upper.iter();
        for j in 0..n {
            let mut x = vec![0u64; n];
            x[j] = diag[j];
            for xi in x.iter_mut().take(j) {
                *xi = *u.next().unwrap();
            }
            v.push(ExponentVector::new(x));
        }
        if zero {
            v.push(ExponentVector::zeros(n));
        }
        let f = ExponentVector::new((0..n).map(|i| 1 + fbump[i]).collect());
        prop_assume!(verify_spinal(&f, &v));
        let w = falsify_star(&f, &v, k).unwrap();
        prop_assert!(check_star_falsifier(&f, &v, k, &w));
    }
}
