mod common;

use common::{commute, is_noncontextual, pairwise, qubit_fixture};
use proptest::prelude::*;
use solvfrag::contextuality::{decompose, NcDecomposition};
use solvfrag::partition::partition;
use solvfrag::{verify_partition, Axis, Method, PauliSum, PauliWord};

const METHODS: [Method; 4] = [Method::Ac, Method::Fc, Method::Nc, Method::Fnc];

fn word_strategy(n: usize) -> impl Strategy<Value = PauliWord> {
    proptest::collection::vec(0u8..4, n).prop_map(move |letters| {
        let mut w = PauliWord::identity(n);
        for (q, l) in letters.into_iter().enumerate() {
            let axis = match l {
                1 => Some(Axis::X),
                2 => Some(Axis::Y),
                3 => Some(Axis::Z),
                _ => None,
            };
            w.set(q, axis);
        }
        w
    })
}

fn sum_strategy() -> impl Strategy<Value = PauliSum> {
    (1usize..=5).prop_flat_map(|n| {
        proptest::collection::vec((word_strategy(n), -2.0f64..2.0), 1..24).prop_map(move |terms| {
            let mut h = PauliSum::new(n);
            for (w, c) in terms {
                if !h.contains(&w) && c != 0.0 {
                    h.add_term(w, c).unwrap();
                }
            }
            h
        })
    })
}

fn check_fragments(h: &PauliSum, method: Method, sweeps: usize) {
    let p = partition(h, method, sweeps).unwrap();
    let (diff, _) = p.reassemble().unwrap().max_difference(h).unwrap();
    assert!(diff <= 1e-12);
    let mut total = 0;
    for f in &p.fragments {
        let words: Vec<PauliWord> = f.words().filter(|w| !w.is_identity()).cloned().collect();
        total += f.len();
        let ok = match method {
            Method::Ac => pairwise(&words, false),
            Method::Fc => pairwise(&words, true),
            Method::Nc | Method::Fnc => is_noncontextual(&words),
        };
        assert!(ok, "{method}: {f:?}");
    }
    assert_eq!(total, h.len());
    assert!(verify_partition(&p, h).passed);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn partitions_are_valid(h in sum_strategy(), sweeps in 1usize..4) {
        for m in METHODS {
            check_fragments(&h, m, sweeps);
        }
    }

    #[test]
    fn commutation_matches_letter_count(
        (a, b) in (1usize..6).prop_flat_map(|n| (word_strategy(n), word_strategy(n)))
    ) {
        prop_assert_eq!(a.commutes(&b).unwrap(), commute(&a, &b));
    }

    #[test]
    fn decompose_agrees_with_brute_force(
        words in (1usize..5).prop_flat_map(|n| proptest::collection::hash_set(word_strategy(n), 1..10))
    ) {
        let words: Vec<PauliWord> = words.into_iter().collect();
        let d = decompose(&words).unwrap();
        prop_assert_eq!(d.is_noncontextual, is_noncontextual(&words));
        prop_assert!(d.verify());
    }

    #[test]
    fn insertion_agrees_with_brute_force(
        words in (1usize..5).prop_flat_map(|n| proptest::collection::vec(word_strategy(n), 1..12))
    ) {
        let mut d = NcDecomposition::empty(words[0].n_qubits());
        let mut kept: Vec<PauliWord> = Vec::new();
        for w in words {
            if kept.contains(&w) {
                continue;
            }
            let mut with = kept.clone();
            with.push(w.clone());
            let admitted = d.try_insert(&w).unwrap();
            prop_assert_eq!(admitted, is_noncontextual(&with));
            if admitted {
                kept = with;
            }
            prop_assert_eq!(d.len(), kept.len());
        }
    }
}

#[test]
fn molecular_partitions_are_valid() {
    for stem in ["h2", "lih", "beh2", "h2o"] {
        let h = qubit_fixture(stem);
        for m in METHODS {
            check_fragments(&h, m, 1);
        }
    }
}

#[test]
fn table_counts() {
    let want = [
        ("h2", [10, 2, 1, 1]),
        ("lih", [106, 37, 35, 30]),
        ("beh2", [129, 35, 33, 28]),
        ("h2o", [150, 50, 49, 40]),
    ];
    for (stem, counts) in want {
        let h = qubit_fixture(stem);
        let got: Vec<usize> = METHODS.iter().map(|&m| partition(&h, m, 1).unwrap().len()).collect();
        assert_eq!(got, counts, "{stem}");
    }
}

#[test]
fn more_sweeps_never_hurt() {
    let h = qubit_fixture("lih");
    for m in [Method::Fc, Method::Nc] {
        let one = partition(&h, m, 1).unwrap().len();
        let more = partition(&h, m, 8).unwrap().len();
        assert!(more <= one, "{m}: {more} > {one}");
    }
}

#[test]
fn fnc_never_worse_than_fc() {
    for stem in ["h2", "lih", "beh2", "h2o"] {
        let h = qubit_fixture(stem);
        assert!(partition(&h, Method::Fnc, 1).unwrap().len() <= partition(&h, Method::Fc, 1).unwrap().len());
    }
}

#[test]
fn deterministic() {
    let h = qubit_fixture("beh2");
    for m in METHODS {
        assert_eq!(partition(&h, m, 3).unwrap(), partition(&h, m, 3).unwrap());
    }
}
