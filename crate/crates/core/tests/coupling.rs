mod common;

use common::{q, random_instance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tapework::coupling::{
    bijection_coupling, check_coupling, check_left_partial, couple_bind, couple_ret, extract_equality,
    extract_pointwise_le, identity_on, strassen_oracle, verify_witness, CouplingError, CouplingWitness, Mode,
    Relation, ORACLE_LIMIT,
};
use tapework::dist::SubDistr;
use tapework::Prob;

fn coin() -> SubDistr<bool> {
    SubDistr::uniform([true, false])
}

fn biased() -> SubDistr<bool> {
    SubDistr::from_weights([(true, q(3, 4)), (false, q(1, 4))]).unwrap()
}

fn bools() -> Vec<bool> {
    vec![false, true]
}

#[test]
fn identity_coupling_of_equal_coins() {
    let id = Relation::identity(bools());
    let w = check_coupling(&coin(), &coin(), &id).unwrap();
    assert_eq!(w.joint, SubDistr::uniform([(true, true), (false, false)]));
    assert!(verify_witness(&w, &coin(), &coin(), &id));
    assert!(strassen_oracle(&coin(), &coin(), &id, Mode::Exact).unwrap());
}

#[test]
fn negation_coupling() {
    let neg = Relation::from_predicate(bools(), bools(), |a, b| a != b);
    let w = check_coupling(&coin(), &coin(), &neg).unwrap();
    assert_eq!(w.joint, SubDistr::uniform([(true, false), (false, true)]));
    assert!(verify_witness(&w, &coin(), &coin(), &neg));
}

#[test]
fn biased_coin_has_no_identity_coupling() {
    let id = Relation::identity(bools());
    assert!(check_coupling(&biased(), &coin(), &id).is_none());
    assert!(!strassen_oracle(&biased(), &coin(), &id, Mode::Exact).unwrap());
}

#[test]
fn left_partial_examples() {
    let id = Relation::identity(bools());
    let zero: SubDistr<bool> = SubDistr::zero();
    let w = check_left_partial(&zero, &coin(), &id).unwrap();
    assert!(w.joint.is_zero());
    assert!(verify_witness(&w, &zero, &coin(), &id));
    assert!(strassen_oracle(&zero, &coin(), &id, Mode::LeftPartial).unwrap());

    let half_true = SubDistr::from_weights([(true, q(1, 2))]).unwrap();
    let w = check_left_partial(&half_true, &coin(), &id).unwrap();
    assert_eq!(w.joint, SubDistr::from_weights([((true, true), q(1, 2))]).unwrap());
    assert!(verify_witness(&w, &half_true, &coin(), &id));
    assert!(check_coupling(&half_true, &coin(), &id).is_none());
}

#[test]
fn exact_witnesses_are_left_partial_witnesses() {
    let neg = Relation::from_predicate(bools(), bools(), |a, b| a != b);
    let mut w = check_coupling(&coin(), &coin(), &neg).unwrap();
    w.mode = Mode::LeftPartial;
    assert!(verify_witness(&w, &coin(), &coin(), &neg));
    assert!(check_left_partial(&coin(), &coin(), &neg).is_some());
}

#[test]
fn tampered_witnesses_fail_verification() {
    let id = Relation::identity(bools());
    let outside = CouplingWitness {
        joint: SubDistr::uniform([(true, false), (false, true)]),
        mode: Mode::Exact,
    };
    assert!(!verify_witness(&outside, &coin(), &coin(), &id));
    let inflated = CouplingWitness {
        joint: SubDistr::from_weights([((true, true), q(3, 4)), ((false, false), q(1, 4))]).unwrap(),
        mode: Mode::Exact,
    };
    assert!(!verify_witness(&inflated, &coin(), &coin(), &id));
}

#[test]
fn identity_couplings_give_equality_and_pointwise_order() {
    assert!(extract_equality(&coin(), &coin()));
    assert!(extract_pointwise_le(&coin(), &coin()));
    assert!(!extract_equality(&biased(), &coin()));
    assert!(!extract_pointwise_le(&biased(), &coin()));
    let quarter = SubDistr::from_weights([(true, q(1, 4))]).unwrap();
    assert!(!extract_equality(&quarter, &coin()));
    assert!(extract_pointwise_le(&quarter, &coin()));
}

#[test]
fn return_and_bind() {
    let id = Relation::identity(bools());
    let w = couple_ret::<_, _, Prob>(true, true, &id).unwrap();
    assert_eq!(w.joint, SubDistr::dret((true, true)));
    assert!(couple_ret::<_, _, Prob>(true, false, &id).is_none());

    let neg = Relation::from_predicate(bools(), bools(), |a, b| a != b);
    let first = check_coupling(&coin(), &coin(), &neg).unwrap();
    let bound = couple_bind(&first, |a, b| couple_ret(!*a, *b, &id)).unwrap();
    assert!(verify_witness(&bound, &coin(), &coin(), &id));

    let partial = check_left_partial(&coin(), &coin(), &neg).unwrap();
    assert_eq!(
        couple_bind(&partial, |a, b| couple_ret::<_, _, Prob>(*a, *b, &neg)).unwrap_err(),
        CouplingError::NotExact
    );
    assert_eq!(
        couple_bind(&first, |a, b| couple_ret::<_, _, Prob>(*a, *b, &id)).unwrap_err(),
        CouplingError::KernelUndefined
    );
}

#[test]
fn bijections() {
    let w = bijection_coupling::<Prob>(3, |x| 3 - x).unwrap();
    assert_eq!(w.joint.len(), 4);
    let u = SubDistr::uniform(0..=3u64);
    let rel = Relation::from_predicate((0..=3).collect(), (0..=3).collect(), |a: &u64, b: &u64| a + b == 3);
    assert!(verify_witness(&w, &u, &u, &rel));
    assert!(matches!(bijection_coupling::<Prob>(3, |x| x / 2), Err(CouplingError::NotPermutation(3))));
    assert!(bijection_coupling::<Prob>(3, |x| x + 1).is_err());
}

#[test]
fn relation_construction() {
    assert!(Relation::from_pairs(vec![0u8], vec![0u8], [(0, 1)]).is_err());
    let r = Relation::from_indices(vec!['a', 'b'], vec!['x'], [(1, 0)]).unwrap();
    assert!(r.contains(&'b', &'x'));
    assert!(matches!(
        Relation::from_indices(vec!['a'], vec!['x'], [(0, 3)]),
        Err(CouplingError::IndexOutOfRange(0, 3))
    ));
}

#[test]
fn oracle_rejects_large_supports() {
    let big: SubDistr<u32> = SubDistr::uniform(0..=ORACLE_LIMIT as u32);
    let rel = Relation::identity((0..=ORACLE_LIMIT as u32).collect());
    assert!(matches!(strassen_oracle(&big, &big, &rel, Mode::Exact), Err(CouplingError::TooLarge { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn flow_checker_agrees_with_the_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mu1, mu2, rel) = random_instance(&mut rng, ORACLE_LIMIT as u32);
        for mode in [Mode::Exact, Mode::LeftPartial] {
            let w = match mode {
                Mode::Exact => check_coupling(&mu1, &mu2, &rel),
                Mode::LeftPartial => check_left_partial(&mu1, &mu2, &rel),
            };
            let oracle = strassen_oracle(&mu1, &mu2, &rel, mode).unwrap();
            prop_assert_eq!(w.is_some(), oracle, "{:?}", mode);
            if let Some(w) = w {
                prop_assert!(verify_witness(&w, &mu1, &mu2, &rel));
            }
        }
    }

    #[test]
    fn identity_relation_matches_extraction(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mu1, mu2, _) = random_instance(&mut rng, 6);
        let id = identity_on(&mu1, &mu2);
        prop_assert_eq!(check_coupling(&mu1, &mu2, &id).is_some(), extract_equality(&mu1, &mu2));
        prop_assert_eq!(check_left_partial(&mu1, &mu2, &id).is_some(), extract_pointwise_le(&mu1, &mu2));
        prop_assert!(check_coupling(&mu1, &mu1, &identity_on(&mu1, &mu1)).is_some());
    }

    #[test]
    fn enlarging_the_relation_preserves_existence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mu1, mu2, rel) = random_instance(&mut rng, 8);
        let extra = rand::Rng::random_range(&mut rng, 0..4u32);
        let bigger = Relation::from_predicate(rel.left().to_vec(), rel.right().to_vec(), |a, b| {
            rel.contains(a, b) || (a + b) % 4 == extra
        });
        prop_assert!(rel.is_subset_of(&bigger));
        if check_coupling(&mu1, &mu2, &rel).is_some() {
            prop_assert!(check_coupling(&mu1, &mu2, &bigger).is_some());
        }
        if check_left_partial(&mu1, &mu2, &rel).is_some() {
            prop_assert!(check_left_partial(&mu1, &mu2, &bigger).is_some());
        }
    }
}
