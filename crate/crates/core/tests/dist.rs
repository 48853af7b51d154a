mod common;

use common::{q, random_distr};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tapework::corpus::{self, Params};
use tapework::dist::{dbind, dret, dzero, DistrJson, SubDistr};
use tapework::exec::{exec_n, exec_series, exec_term_n, exec_val_bounds, exec_val_n, is_stable};
use tapework::lang::{erase, parse_expr, Val};
use tapework::semantics::{Config, State};
use tapework::{Distr, Prob};

fn config(src: &str) -> Config {
    Config::initial(parse_expr(src).unwrap())
}

const OMEGA: &str = "(rec omega (u: unit) : unit -> omega u) ()";

#[test]
fn point_masses() {
    let seven: Distr<i64> = dret(7);
    assert_eq!(seven.weight(&7), Prob::one());
    assert_eq!(seven.len(), 1);
    let unit: Distr<()> = dret(());
    assert_eq!(unit.mass(), Prob::one());
}

#[test]
fn coin_kernel_hand_sum() {
    let coin: Distr<bool> = SubDistr::uniform([true, false]);
    let out = dbind(|b: &bool| SubDistr::uniform([*b, !*b]), &coin);
    assert_eq!(out, coin);
    assert_eq!(out.weight(&true), q(1, 2));
}

#[test]
fn zero_distribution() {
    let z: Distr<u8> = dzero();
    assert!(z.mass().is_zero());
    let bound: Distr<u8> = dbind(|x: &u8| dret(*x + 1), &z);
    assert!(bound.is_zero());
    let exec: Distr<Val> = exec_val_n(&config("rand(1)"), 0);
    assert!(exec.is_zero());
}

#[test]
fn weights_are_validated() {
    assert!(SubDistr::<u8>::from_weights([(0, q(3, 4)), (1, q(1, 2))]).is_err());
    assert!(SubDistr::<u8>::from_weights([(0, q(-1, 4))]).is_err());
    assert!(SubDistr::<u8>::from_weights([(0, q(1, 4)), (0, q(1, 4))]).is_err());
    assert!(SubDistr::<u8>::from_weights([(0, q(1, 2)), (1, q(0, 1))]).is_err());
    let d = SubDistr::<u8>::from_weights([(0, q(1, 2))]).unwrap();
    assert_eq!(d.weight(&1), q(0, 1));
    assert_eq!(d.len(), 1);
}

#[test]
fn partial_execution() {
    let rho = config("rand(1)");
    assert_eq!(exec_n::<Prob>(&rho, 0), dret(rho.clone()));
    let one = exec_n::<Prob>(&rho, 1);
    assert_eq!(one, SubDistr::uniform([config("0"), config("1")]));

    let flip = config("flip ()");
    let d = exec_n::<Prob>(&flip, 3);
    assert_eq!(d, SubDistr::uniform([config("false"), config("true")]));
    assert_eq!(exec_term_n::<Prob>(&flip, 3), Prob::one());
    assert_eq!(exec_term_n::<Prob>(&flip, 2), Prob::zero());
}

#[test]
fn divergence() {
    let omega = config(OMEGA);
    for n in 0..=30 {
        assert!(exec_val_n::<Prob>(&omega, n).is_zero());
        let b = exec_val_bounds::<Prob>(&omega, n);
        assert!(b.lower.is_zero());
        assert_eq!(b.residual, Prob::one());
    }
    assert_eq!(exec_term_n::<Prob>(&omega, 10), Prob::zero());
}

#[test]
fn values_and_terminating_programs() {
    let five = config("5");
    assert_eq!(exec_val_n::<Prob>(&five, 0), dret(Val::int(5)));
    let b = exec_val_bounds::<Prob>(&five, 3);
    assert_eq!((b.lower, b.residual), (dret(Val::int(5)), Prob::zero()));
    assert_eq!(exec_term_n::<Prob>(&five, 0), Prob::one());

    let flip_or = corpus::build("flip-or", &Params::new()).unwrap();
    let plugged = flip_or.contexts[0].plug(&flip_or.ty, &flip_or.left).unwrap();
    let series = exec_series::<Prob>(&Config::initial(erase(&plugged)), 20);
    let last = series.last().unwrap();
    assert_eq!(last.lower.weight(&Val::bool(true)), q(3, 4));
    assert_eq!(last.lower.weight(&Val::bool(false)), q(1, 4));
    assert!(last.residual.is_zero());
}

#[test]
fn lazy_coin_terminates_within_forty_steps() {
    let b = corpus::build("lazy-eager", &Params::new()).unwrap();
    let once = b.contexts.iter().find(|c| c.name == "call-once").unwrap();
    let plugged = once.plug(&b.ty, &b.left).unwrap();
    let bounds = exec_val_bounds::<Prob>(&Config::initial(erase(&plugged)), 40);
    assert!(bounds.residual.is_zero());
    assert_eq!(bounds.lower, SubDistr::uniform([Val::bool(true), Val::bool(false)]));
}

#[test]
fn stuck_mass_is_lost() {
    let b = exec_val_bounds::<Prob>(&config("if rand(1) = 0 then fst true else 3"), 10);
    assert_eq!(b.lower, SubDistr::from_weights([(Val::int(3), q(1, 2))]).unwrap());
    assert!(b.residual.is_zero());
    assert_eq!(b.stuck(), q(1, 2));
}

#[test]
fn json_rendering_is_sorted_and_exact() {
    let d: Distr<Val> = SubDistr::from_weights([(Val::int(2), q(1, 3)), (Val::int(-1), q(2, 3))]).unwrap();
    let json = d.to_json();
    let text = serde_json::to_string(&json).unwrap();
    let back = DistrJson::parse(&text).unwrap();
    assert_eq!(back, json);
    let as_strings = back.to_distr().unwrap();
    assert_eq!(as_strings.weight(&"2".to_string()), q(1, 3));
    assert!(text.contains("\"2/3\""));
}

fn corpus_configs() -> Vec<Config> {
    let mut out = Vec::new();
    for e in corpus::entries() {
        let b = e.build(&Params::new()).unwrap();
        for c in &b.contexts {
            for prog in [&b.left, &b.right] {
                out.push(Config::new(erase(&c.plug(&b.ty, prog).unwrap()), State::new()));
            }
        }
    }
    out
}

#[test]
fn monotone_bounds_and_mass_accounting_over_the_corpus() {
    for rho in corpus_configs() {
        let series = exec_series::<Prob>(&rho, 30);
        for w in series.windows(2) {
            assert!(w[0].lower.pointwise_le(&w[1].lower));
            assert!(w[1].residual <= w[0].residual);
        }
        for b in &series {
            let total = b.lower.mass() + b.residual.clone();
            assert!(total <= Prob::one());
            assert!(b.stuck() >= Prob::zero());
            assert_eq!(exec_n::<Prob>(&rho, b.depth).mass() + b.stuck(), Prob::one());
        }
    }
}

#[test]
fn stabilization_persists_on_terminating_programs() {
    for rho in corpus_configs() {
        let series = exec_series::<Prob>(&rho, 120);
        let Some(n) = series.iter().position(|b| b.residual.is_zero()) else { continue };
        if n + 5 >= series.len() {
            continue;
        }
        assert_eq!(series[n].lower, series[n + 5].lower);
        assert!(is_stable(&series[..=n + 5], 5));
        assert!(series[n..].iter().all(|b| b.lower == series[n].lower));
    }
}

fn kernel(seed: u64) -> impl Fn(&u32) -> SubDistr<u32> {
    move |x: &u32| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (*x as u64).wrapping_mul(0x9e37_79b9));
        random_distr(&mut rng, 5, false)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn monad_laws(seed in any::<u64>(), a in 0u32..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_distr(&mut rng, 6, false);
        let f = kernel(seed.wrapping_add(1));
        let g = kernel(seed.wrapping_add(2));
        prop_assert_eq!(dbind(|x: &u32| dret(*x), &mu), mu.clone());
        prop_assert_eq!(dbind(&f, &dret(a)), f(&a));
        let left = dbind(&g, &dbind(&f, &mu));
        let right = dbind(|x: &u32| dbind(&g, &f(x)), &mu);
        prop_assert_eq!(left, right);
        prop_assert_eq!(dret::<u32, Prob>(a).mass(), Prob::one());
    }

    #[test]
    fn bind_never_increases_mass(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mu = random_distr(&mut rng, 6, false);
        let f = kernel(seed.wrapping_add(3));
        let out = dbind(&f, &mu);
        prop_assert!(out.mass() <= mu.mass());
        let all_full = mu.support().all(|x| f(x).mass().is_one());
        prop_assert_eq!(out.mass() == mu.mass(), all_full || mu.is_zero());
        let full = |x: &u32| SubDistr::uniform([*x, x + 1]);
        prop_assert_eq!(dbind(full, &mu).mass(), mu.mass());
    }
}
