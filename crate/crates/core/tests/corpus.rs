mod common;

use std::collections::BTreeMap;

use common::q;
use tapework::analysis::{compare_programs, Verdict};
use tapework::corpus::invariants::{check_hash_invariant, elgamal_bijection_check};
use tapework::corpus::{self, CorpusError, Params};
use tapework::dist::SubDistr;
use tapework::lang::{typecheck_closed, Type, Val};
use tapework::semantics::State;
use tapework::{Distr, Prob};

fn params(pairs: &[(&str, i64)]) -> Params {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

/// Every combination of allowed values for the entry's parameters.
fn grid(entry: &corpus::CorpusEntry) -> Vec<Params> {
    let mut out = vec![Params::new()];
    for p in entry.params {
        out = out
            .into_iter()
            .flat_map(|base| {
                p.allowed.iter().map(move |v| {
                    let mut next = base.clone();
                    next.insert(p.name.to_string(), *v);
                    next
                })
            })
            .collect();
    }
    out
}

#[test]
fn every_entry_typechecks_at_every_shipped_parameter() {
    for e in corpus::entries() {
        for p in grid(e) {
            let built = match e.build(&p) {
                Ok(b) => b,
                Err(CorpusError::Invalid(_)) => continue,
                Err(err) => panic!("{} {p:?}: {err}", e.name),
            };
            for prog in [&built.left, &built.right] {
                let t = typecheck_closed(prog).unwrap();
                assert!(tapework::lang::is_subtype(&t, &built.ty), "{} {p:?}", e.name);
            }
            for c in &built.contexts {
                c.elaborate(&built.ty).unwrap_or_else(|err| panic!("{} {p:?} {}: {err}", e.name, c.name));
            }
        }
    }
}

#[test]
fn lazy_eager_pair_has_thunk_type() {
    let b = corpus::build("lazy-eager", &Params::new()).unwrap();
    assert_eq!(b.ty, Type::arrow(Type::Unit, Type::Bool));
    assert_eq!(b.contexts.len(), 3);
}

#[test]
fn elgamal_builds_over_the_group_mod_five() {
    let b = corpus::build("elgamal-real", &params(&[("p", 5), ("g", 2)])).unwrap();
    assert!(b.left_source.contains("5"));
    assert!(matches!(
        corpus::build("elgamal-real", &params(&[("p", 5), ("g", 5)])),
        Err(CorpusError::Invalid(_))
    ));
    for (p, gens) in [(3, vec![2]), (5, vec![2, 3]), (7, vec![3, 5])] {
        for g in 1..p {
            assert_eq!(corpus::is_generator(g, p), gens.contains(&g), "g = {g}, p = {p}");
        }
    }
}

#[test]
fn unknown_entries_and_out_of_range_parameters() {
    assert!(matches!(corpus::build("treap", &Params::new()), Err(CorpusError::UnknownEntry(_))));
    assert!(matches!(
        corpus::build("lazy-int", &params(&[("digits", 9)])),
        Err(CorpusError::OutOfRange { .. })
    ));
}

/// Comparison result distribution of two independent integers with the
/// given digits, by enumerating every digit assignment.
fn compare_oracle(digits: u32, base: i64) -> Distr<Val> {
    let space = base.pow(digits);
    let mut counts: BTreeMap<i64, i64> = BTreeMap::new();
    for x in 0..space {
        for y in 0..space {
            *counts.entry((x - y).signum()).or_default() += 1;
        }
    }
    SubDistr::from_weights(counts.into_iter().map(|(c, k)| (Val::int(c), q(k, space * space)))).unwrap()
}

#[test]
fn lazy_int_oracle_known_value() {
    let expected = SubDistr::from_weights([
        (Val::int(-1), q(3, 8)),
        (Val::int(0), q(1, 4)),
        (Val::int(1), q(3, 8)),
    ])
    .unwrap();
    assert_eq!(compare_oracle(2, 2), expected);
}

#[test]
fn lazy_int_matches_the_oracle_for_all_parameters() {
    let e = corpus::entry("lazy-int").unwrap();
    for p in grid(e) {
        let b = e.build(&p).unwrap();
        let fresh = b.contexts.iter().find(|c| c.name == "compare-fresh").unwrap();
        let expected = compare_oracle(p["digits"] as u32, p["base"]);
        for prog in [&b.left, &b.right] {
            let plugged = fresh.plug(&b.ty, prog).unwrap();
            let r = compare_programs(&plugged, &plugged, &State::new(), b.depth);
            assert!(r.left_residual == Prob::from_integer(0.into()), "{p:?}");
            assert_eq!(r.left, expected, "{p:?}");
        }
        let own = b.contexts.iter().find(|c| c.name == "compare-self").unwrap();
        let plugged = own.plug(&b.ty, &b.left).unwrap();
        let r = compare_programs(&plugged, &plugged, &State::new(), b.depth);
        assert_eq!(r.left, SubDistr::dret(Val::int(0)), "{p:?}");
    }
}

#[test]
fn default_parameters_meet_their_expectations() {
    for e in corpus::entries() {
        let b = e.build(&Params::new()).unwrap();
        let reports = b.probe().unwrap();
        assert!(!reports.is_empty());
        assert!(b.meets_expectation(&reports), "{}", e.name);
        if b.expected == Verdict::Distinguished {
            assert!(reports.iter().any(|(_, r)| r.verdict == Verdict::Distinguished));
        }
    }
}

#[test]
fn hash_invariant_at_small_key_spaces() {
    for n in [0, 1] {
        let reached = check_hash_invariant(n, &[0, n + 1, n], 3000).unwrap_or_else(|v| panic!("n = {n}: {v}"));
        assert!(reached > 0);
    }
}

#[test]
fn group_bijection_fact() {
    for (p, g) in [(3, 2), (5, 2), (5, 3), (7, 3), (7, 5)] {
        assert!(elgamal_bijection_check(p, g));
    }
}
