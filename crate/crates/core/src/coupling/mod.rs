//! Existence and certification of couplings between finite
//! sub-distributions.
//!
//! An `R`-coupling of `μ1` and `μ2` is a joint sub-distribution supported
//! on `R` whose marginals are `μ1` and `μ2`. In a left-partial coupling the
//! right marginal is only bounded by `μ2`. Existence is decided by a maximum
//! flow through the bipartite network
//! `source -> supp μ1 -> (R) -> supp μ2 -> sink`, scaled to integers by the
//! common denominator of all weights.

pub mod flow;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::dist::SubDistr;
use crate::weight::ExactWeight;
use flow::FlowNetwork;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mode {
    Exact,
    LeftPartial,
}

/// A finite relation between two outcome lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation<A: Ord, B: Ord> {
    left: Vec<A>,
    right: Vec<B>,
    pairs: BTreeSet<(A, B)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum CouplingError {
    #[error("pair outside the supports of the relation")]
    PairOutsideSupport,
    #[error("index pair ({0}, {1}) out of range")]
    IndexOutOfRange(usize, usize),
    #[error("not a permutation of 0..={0}")]
    NotPermutation(u64),
    #[error("composition requires an exact coupling")]
    NotExact,
    #[error("kernel undefined on a support pair")]
    KernelUndefined,
    #[error("subset enumeration limited to {limit} outcomes, got {got}")]
    TooLarge { limit: usize, got: usize },
}

impl<A: Ord + Clone, B: Ord + Clone> Relation<A, B> {
    pub fn from_pairs(
        left: Vec<A>,
        right: Vec<B>,
        pairs: impl IntoIterator<Item = (A, B)>,
    ) -> Result<Self, CouplingError> {
        let pairs: BTreeSet<(A, B)> = pairs.into_iter().collect();
        if pairs.iter().any(|(a, b)| !left.contains(a) || !right.contains(b)) {
            return Err(CouplingError::PairOutsideSupport);
        }
        Ok(Relation { left, right, pairs })
    }

    /// Materializes `{(a, b) | pred(a, b)}` over the two lists.
    pub fn from_predicate(left: Vec<A>, right: Vec<B>, mut pred: impl FnMut(&A, &B) -> bool) -> Self {
        let pairs = left
            .iter()
            .flat_map(|a| right.iter().map(move |b| (a, b)))
            .filter(|(a, b)| pred(a, b))
            .map(|(a, b)| (a.clone(), b.clone()))
            .collect();
        Relation { left, right, pairs }
    }

    /// Pairs given as indices into the two lists.
    pub fn from_indices(
        left: Vec<A>,
        right: Vec<B>,
        idx: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, CouplingError> {
        let mut pairs = BTreeSet::new();
        for (i, j) in idx {
            match (left.get(i), right.get(j)) {
                (Some(a), Some(b)) => {
                    pairs.insert((a.clone(), b.clone()));
                }
                _ => return Err(CouplingError::IndexOutOfRange(i, j)),
            }
        }
        Ok(Relation { left, right, pairs })
    }

    pub fn contains(&self, a: &A, b: &B) -> bool {
        self.pairs.contains(&(a.clone(), b.clone()))
    }

    pub fn pairs(&self) -> impl Iterator<Item = &(A, B)> {
        self.pairs.iter()
    }

    pub fn left(&self) -> &[A] {
        &self.left
    }

    pub fn right(&self) -> &[B] {
        &self.right
    }

    /// Image of a set of left outcomes.
    pub fn image<'a>(&'a self, of: impl IntoIterator<Item = &'a A>) -> BTreeSet<&'a B> {
        let of: BTreeSet<&A> = of.into_iter().collect();
        self.pairs.iter().filter(|(a, _)| of.contains(a)).map(|(_, b)| b).collect()
    }

    pub fn is_subset_of(&self, other: &Relation<A, B>) -> bool {
        self.pairs.is_subset(&other.pairs)
    }
}

impl<A: Ord + Clone> Relation<A, A> {
    pub fn identity(support: Vec<A>) -> Self {
        let pairs = support.iter().map(|a| (a.clone(), a.clone())).collect();
        Relation {
            left: support.clone(),
            right: support,
            pairs,
        }
    }
}

/// A joint distribution certifying a coupling claim.
#[derive(Clone, Debug, PartialEq)]
pub struct CouplingWitness<A: Ord, B: Ord, W> {
    pub joint: SubDistr<(A, B), W>,
    pub mode: Mode,
}

impl<A: Ord + Clone, B: Ord + Clone, W: ExactWeight> CouplingWitness<A, B, W> {
    pub fn left_marginal(&self) -> SubDistr<A, W> {
        self.joint.map(|(a, _)| a.clone())
    }

    pub fn right_marginal(&self) -> SubDistr<B, W> {
        self.joint.map(|(_, b)| b.clone())
    }
}

fn common_denominator<'a>(ws: impl Iterator<Item = &'a BigRational>) -> BigInt {
    ws.fold(BigInt::one(), |acc, w| acc.lcm(w.denom()))
}

fn scaled(w: &BigRational, d: &BigInt) -> BigInt {
    let s = w * BigRational::from_integer(d.clone());
    debug_assert!(s.is_integer());
    s.to_integer()
}

/// Runs the flow network and returns the optimal joint together with the
/// flow value scaled back to a weight.
fn transport<A, B, W>(mu1: &SubDistr<A, W>, mu2: &SubDistr<B, W>, rel: &Relation<A, B>) -> (SubDistr<(A, B), W>, BigRational)
where
    A: Ord + Clone,
    B: Ord + Clone,
    W: ExactWeight,
{
    let left: Vec<(&A, BigRational)> = mu1.iter().map(|(a, w)| (a, w.to_ratio())).collect();
    let right: Vec<(&B, BigRational)> = mu2.iter().map(|(b, w)| (b, w.to_ratio())).collect();
    let d = common_denominator(left.iter().map(|(_, w)| w).chain(right.iter().map(|(_, w)| w)));
    let (source, sink) = (0, 1);
    let node_a = |i: usize| 2 + i;
    let node_b = |j: usize| 2 + left.len() + j;
    let mut g = FlowNetwork::<BigInt>::new(2 + left.len() + right.len());
    for (i, (_, w)) in left.iter().enumerate() {
        g.add_edge(source, node_a(i), scaled(w, &d));
    }
    for (j, (_, w)) in right.iter().enumerate() {
        g.add_edge(node_b(j), sink, scaled(w, &d));
    }
    let mut middle = Vec::new();
    for (i, (a, _)) in left.iter().enumerate() {
        for (j, (b, _)) in right.iter().enumerate() {
            if rel.contains(a, b) {
                middle.push((i, j, g.add_edge(node_a(i), node_b(j), d.clone())));
            }
        }
    }
    let value = g.max_flow(source, sink, d.clone());
    let d_ratio = BigRational::from_integer(d);
    let joint = middle
        .into_iter()
        .map(|(i, j, e)| {
            let w = BigRational::from_integer(g.flow(e)) / d_ratio.clone();
            ((left[i].0.clone(), right[j].0.clone()), W::from_ratio(&w))
        })
        .filter(|(_, w)| *w > W::zero())
        .collect();
    (joint, BigRational::from_integer(value) / d_ratio)
}

pub fn check_coupling<A, B, W>(
    mu1: &SubDistr<A, W>,
    mu2: &SubDistr<B, W>,
    rel: &Relation<A, B>,
) -> Option<CouplingWitness<A, B, W>>
where
    A: Ord + Clone,
    B: Ord + Clone,
    W: ExactWeight,
{
    let m1 = mu1.mass().to_ratio();
    if m1 != mu2.mass().to_ratio() {
        return None;
    }
    let (joint, value) = transport(mu1, mu2, rel);
    (value == m1).then_some(CouplingWitness {
        joint,
        mode: Mode::Exact,
    })
}

pub fn check_left_partial<A, B, W>(
    mu1: &SubDistr<A, W>,
    mu2: &SubDistr<B, W>,
    rel: &Relation<A, B>,
) -> Option<CouplingWitness<A, B, W>>
where
    A: Ord + Clone,
    B: Ord + Clone,
    W: ExactWeight,
{
    let (joint, value) = transport(mu1, mu2, rel);
    (value == mu1.mass().to_ratio()).then_some(CouplingWitness {
        joint,
        mode: Mode::LeftPartial,
    })
}

/// Independent re-check of the coupling conditions for `w.mode`.
pub fn verify_witness<A, B, W>(
    w: &CouplingWitness<A, B, W>,
    mu1: &SubDistr<A, W>,
    mu2: &SubDistr<B, W>,
    rel: &Relation<A, B>,
) -> bool
where
    A: Ord + Clone,
    B: Ord + Clone,
    W: ExactWeight,
{
    if w.joint.iter().any(|((a, b), p)| !rel.contains(a, b) || *p <= W::zero()) {
        return false;
    }
    if w.left_marginal() != *mu1 {
        return false;
    }
    let right = w.right_marginal();
    match w.mode {
        Mode::Exact => right == *mu2,
        Mode::LeftPartial => right.pointwise_le(mu2),
    }
}

pub fn couple_ret<A, B, W>(a: A, b: B, rel: &Relation<A, B>) -> Option<CouplingWitness<A, B, W>>
where
    A: Ord + Clone,
    B: Ord + Clone,
    W: ExactWeight,
{
    rel.contains(&a, &b).then(|| CouplingWitness {
        joint: SubDistr::dret((a, b)),
        mode: Mode::Exact,
    })
}

/// Sequential composition: binds an exact coupling with a kernel of exact
/// couplings.
pub fn couple_bind<A, B, C, D, W>(
    w: &CouplingWitness<A, B, W>,
    mut k: impl FnMut(&A, &B) -> Option<CouplingWitness<C, D, W>>,
) -> Result<CouplingWitness<C, D, W>, CouplingError>
where
    A: Ord + Clone,
    B: Ord + Clone,
    C: Ord + Clone,
    D: Ord + Clone,
    W: ExactWeight,
{
    if w.mode != Mode::Exact {
        return Err(CouplingError::NotExact);
    }
    let mut parts = Vec::new();
    for ((a, b), p) in w.joint.iter() {
        let inner = k(a, b).ok_or(CouplingError::KernelUndefined)?;
        if inner.mode != Mode::Exact {
            return Err(CouplingError::NotExact);
        }
        parts.push((inner.joint, p.clone()));
    }
    let mut joint = SubDistr::zero();
    for (inner, p) in parts {
        joint = joint.plus(&inner.scale(&p));
    }
    Ok(CouplingWitness {
        joint,
        mode: Mode::Exact,
    })
}

/// The coupling of two uniform samples over `0..=n` along a permutation.
pub fn bijection_coupling<W: ExactWeight>(
    n: u64,
    f: impl Fn(u64) -> u64,
) -> Result<CouplingWitness<u64, u64, W>, CouplingError> {
    let image: BTreeSet<u64> = (0..=n).map(&f).collect();
    if image.len() as u64 != n + 1 || image.iter().any(|&y| y > n) {
        return Err(CouplingError::NotPermutation(n));
    }
    Ok(CouplingWitness {
        joint: SubDistr::uniform((0..=n).map(|x| (x, f(x)))),
        mode: Mode::Exact,
    })
}

/// Largest left support accepted by [`strassen_oracle`].
pub const ORACLE_LIMIT: usize = 12;

/// Decides existence by checking `μ1(S) <= μ2(R(S))` for every subset `S`
/// of the left support, plus equal masses in exact mode.
pub fn strassen_oracle<A, B, W>(
    mu1: &SubDistr<A, W>,
    mu2: &SubDistr<B, W>,
    rel: &Relation<A, B>,
    mode: Mode,
) -> Result<bool, CouplingError>
where
    A: Ord + Clone,
    B: Ord + Clone,
    W: ExactWeight,
{
    let left: Vec<(&A, BigRational)> = mu1.iter().map(|(a, w)| (a, w.to_ratio())).collect();
    if left.len() > ORACLE_LIMIT {
        return Err(CouplingError::TooLarge {
            limit: ORACLE_LIMIT,
            got: left.len(),
        });
    }
    if mode == Mode::Exact && mu1.mass().to_ratio() != mu2.mass().to_ratio() {
        return Ok(false);
    }
    let right: Vec<(&B, BigRational)> = mu2.iter().map(|(b, w)| (b, w.to_ratio())).collect();
    let neighbours: Vec<u64> = left
        .iter()
        .map(|(a, _)| {
            right
                .iter()
                .enumerate()
                .filter(|(_, (b, _))| rel.contains(a, b))
                .fold(0u64, |m, (j, _)| m | (1 << j))
        })
        .collect();
    if right.len() > 63 {
        return Err(CouplingError::TooLarge {
            limit: 63,
            got: right.len(),
        });
    }
    for s in 0u64..(1 << left.len()) {
        let mut lhs = BigRational::zero();
        let mut img = 0u64;
        for (i, (_, w)) in left.iter().enumerate() {
            if s & (1 << i) != 0 {
                lhs += w;
                img |= neighbours[i];
            }
        }
        let rhs: BigRational = right
            .iter()
            .enumerate()
            .filter(|(j, _)| img & (1 << j) != 0)
            .map(|(_, (_, w))| w.clone())
            .sum();
        if lhs > rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

pub fn extract_equality<A: Ord + Clone, W: ExactWeight>(mu1: &SubDistr<A, W>, mu2: &SubDistr<A, W>) -> bool {
    mu1 == mu2
}

pub fn extract_pointwise_le<A: Ord + Clone, W: ExactWeight>(mu1: &SubDistr<A, W>, mu2: &SubDistr<A, W>) -> bool {
    mu1.pointwise_le(mu2)
}

/// Identity relation over the union of two supports.
pub fn identity_on<A: Ord + Clone, W: ExactWeight>(mu1: &SubDistr<A, W>, mu2: &SubDistr<A, W>) -> Relation<A, A> {
    let support: BTreeSet<A> = mu1.support().chain(mu2.support()).cloned().collect();
    Relation::identity(support.into_iter().collect())
}
