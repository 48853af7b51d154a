//! Entry-specific state invariants and side facts.

use std::collections::BTreeSet;

use num_bigint::BigInt;

use super::{entry, Params};
use crate::analysis::{sweep_states, Violation};
use crate::coupling::{bijection_coupling, verify_witness};
use crate::dist::SubDistr;
use crate::lang::{load, Expr, Loc};
use crate::semantics::{Config, State};
use crate::Prob;

/// Keys of an association-list map value `fold (inr ((k, v), rest))`, newest
/// first. `None` if the value does not have that shape.
pub fn assoc_entries(v: &Expr) -> Option<Vec<(BigInt, Expr)>> {
    let mut out = Vec::new();
    let mut cur = v;
    loop {
        let Expr::Fold(_, inner) = cur else { return None };
        match &**inner {
            Expr::Inl(_, u) if **u == Expr::Unit => return Some(out),
            Expr::Inr(_, cell) => {
                let Expr::Pair(kv, rest) = &**cell else { return None };
                let Expr::Pair(k, v) = &**kv else { return None };
                let Expr::Int(k) = &**k else { return None };
                out.push((k.clone(), (**v).clone()));
                cur = rest;
            }
            _ => return None,
        }
    }
}

fn domain(state: &State, loc: usize) -> Option<BTreeSet<BigInt>> {
    match state.heap.get(&Loc(loc)) {
        None => Some(BTreeSet::new()),
        Some(v) => assoc_entries(v).map(|es| es.into_iter().map(|(k, _)| k).collect()),
    }
}

/// The eager and lazy hashes built side by side in one heap, followed by
/// the same queries to both. Cell 0 is the eager map, cells 1 and 2 the
/// lazy value and tape maps.
pub fn hash_pair_source(n: i64, queries: &[i64]) -> String {
    let e = entry("hash").expect("hash entry");
    let params = Params::from([("n".to_string(), n)]);
    let eager = e.source(&e.left, &params).expect("valid n");
    let lazy = e.source(&e.right, &params).expect("valid n");
    let mut s = format!("let he = (\n{eager}) in\nlet hl = (\n{lazy}) in\n");
    for (i, k) in queries.iter().enumerate() {
        s.push_str(&format!("let a{i} = he ({k}) in let b{i} = hl ({k}) in\n"));
    }
    s.push_str("()\n");
    s
}

/// Both hashes only know keys `0..=n`, the lazy value map only holds keys
/// that have a tape, and once the tape map is complete the eager map has
/// the same domain, with a distinct bound-1 tape per key.
pub fn hash_domain_invariant(state: &State, n: i64) -> bool {
    let full: BTreeSet<BigInt> = (0..=n).map(BigInt::from).collect();
    let (Some(m), Some(vm), Some(tm)) = (domain(state, 0), domain(state, 1), domain(state, 2)) else {
        return false;
    };
    if !m.is_subset(&full) || !tm.is_subset(&full) || !vm.is_subset(&tm) {
        return false;
    }
    if tm != full {
        return true;
    }
    let tapes = state
        .heap
        .get(&Loc(2))
        .and_then(assoc_entries)
        .map(|es| es.into_iter().map(|(_, t)| t).collect::<Vec<_>>())
        .unwrap_or_default();
    let labels: BTreeSet<_> = tapes
        .iter()
        .filter_map(|t| match t {
            Expr::Label(l) => state.tapes.get(l).filter(|tape| tape.bound() == 1).map(|_| *l),
            _ => None,
        })
        .collect();
    m == full && labels.len() == tapes.len()
}

/// Sweeps every reachable state of [`hash_pair_source`].
pub fn check_hash_invariant(n: i64, queries: &[i64], depth: usize) -> Result<usize, Violation> {
    let (e, _) = load(&hash_pair_source(n, queries)).expect("hash pair loads");
    sweep_states(&Config::initial(e), depth, |c| hash_domain_invariant(&c.state, n))
}

fn pow_mod(g: i64, e: i64, p: i64) -> i64 {
    (0..e).fold(1, |acc, _| acc * g % p)
}

/// For every message `msg = g^k` of the group mod `p`, the bijection
/// `x -> (x - k) mod (n + 1)` couples uniform exponents so that `g^x` and
/// `msg * g^c` coincide, hence they are equally distributed.
pub fn elgamal_bijection_check(p: i64, g: i64) -> bool {
    let n = p - 2;
    let order = n + 1;
    (0..order).all(|k| {
        let msg = pow_mod(g, k, p);
        let f = |x: u64| ((x as i64 - k).rem_euclid(order)) as u64;
        let Ok(w) = bijection_coupling::<Prob>(n as u64, f) else {
            return false;
        };
        let uniform: SubDistr<u64> = SubDistr::uniform(0..=n as u64);
        let rel = crate::coupling::Relation::from_predicate(
            (0..=n as u64).collect(),
            (0..=n as u64).collect(),
            |x, c| pow_mod(g, *x as i64, p) == msg * pow_mod(g, *c as i64, p) % p,
        );
        let lhs = uniform.map(|x| pow_mod(g, *x as i64, p));
        let rhs = uniform.map(|c| msg * pow_mod(g, *c as i64, p) % p);
        verify_witness(&w, &uniform, &uniform, &rel) && lhs == rhs
    })
}
