//! Stratified execution distributions.
//!
//! `exec_n` is computed breadth-first: the frontier of non-value
//! configurations is stepped once per round and identical configurations are
//! merged, which keeps the work proportional to the number of distinct
//! reachable configurations rather than the number of paths.

use crate::dist::SubDistr;
use crate::lang::Val;
use crate::semantics::{step, Config};
use crate::weight::Weight;

/// Value lower bound and non-value residual at a fixed depth.
#[derive(Clone, Debug, PartialEq)]
pub struct ExecBounds<W: Weight = crate::Prob> {
    pub depth: usize,
    pub lower: SubDistr<Val, W>,
    pub residual: W,
}

impl<W: Weight> ExecBounds<W> {
    /// Mass lost to stuck configurations.
    pub fn stuck(&self) -> W {
        W::one() - self.lower.mass() - self.residual.clone()
    }
}

struct Runner<W: Weight> {
    values: SubDistr<Config, W>,
    frontier: SubDistr<Config, W>,
}

impl<W: Weight> Runner<W> {
    fn start(rho: &Config) -> Self {
        let mut r = Runner {
            values: SubDistr::zero(),
            frontier: SubDistr::zero(),
        };
        if rho.is_value() {
            r.values.add(rho.clone(), W::one());
        } else {
            r.frontier.add(rho.clone(), W::one());
        }
        r
    }

    fn round(&mut self) {
        let mut next = SubDistr::zero();
        for (c, w) in self.frontier.iter() {
            for (c2, w2) in step::<W>(c).iter() {
                let w = w.clone() * w2.clone();
                if c2.is_value() {
                    self.values.add(c2.clone(), w);
                } else {
                    next.add(c2.clone(), w);
                }
            }
        }
        self.frontier = next;
    }

    fn bounds(&self, depth: usize) -> ExecBounds<W> {
        ExecBounds {
            depth,
            lower: values_of(&self.values),
            residual: self.frontier.mass(),
        }
    }
}

fn values_of<W: Weight>(d: &SubDistr<Config, W>) -> SubDistr<Val, W> {
    d.map(|c| Val::new(c.expr.clone()).expect("only value configurations are collected"))
}

/// The partial execution distribution over configurations after at most `n`
/// steps.
pub fn exec_n<W: Weight>(rho: &Config, n: usize) -> SubDistr<Config, W> {
    let mut r = Runner::start(rho);
    for _ in 0..n {
        if r.frontier.is_zero() {
            break;
        }
        r.round();
    }
    r.values.plus(&r.frontier)
}

/// Probability of reaching each final configuration within `n` steps.
pub fn exec_final_n<W: Weight>(rho: &Config, n: usize) -> SubDistr<Config, W> {
    let mut r = Runner::start(rho);
    for _ in 0..n {
        if r.frontier.is_zero() {
            break;
        }
        r.round();
    }
    r.values
}

pub fn exec_val_n<W: Weight>(rho: &Config, n: usize) -> SubDistr<Val, W> {
    values_of(&exec_final_n(rho, n))
}

pub fn exec_val_bounds<W: Weight>(rho: &Config, n: usize) -> ExecBounds<W> {
    exec_series(rho, n).pop().expect("series has n + 1 entries")
}

pub fn exec_term_n<W: Weight>(rho: &Config, n: usize) -> W {
    exec_val_n::<W>(rho, n).mass()
}

/// Bounds at every depth `0..=n`.
pub fn exec_series<W: Weight>(rho: &Config, n: usize) -> Vec<ExecBounds<W>> {
    let mut r = Runner::start(rho);
    let mut out = vec![r.bounds(0)];
    for d in 1..=n {
        if !r.frontier.is_zero() {
            r.round();
        }
        out.push(r.bounds(d));
    }
    out
}

/// Whether the bounds at the last `window + 1` depths of `series` coincide.
pub fn is_stable<W: Weight>(series: &[ExecBounds<W>], window: usize) -> bool {
    if series.len() <= window {
        return false;
    }
    let tail = &series[series.len() - window - 1..];
    tail.windows(2)
        .all(|p| p[0].lower == p[1].lower && p[0].residual == p[1].residual)
}

/// Every configuration occurring with positive probability within `n`
/// steps, including intermediate ones.
pub fn reachable<W: Weight>(rho: &Config, n: usize) -> Vec<Config> {
    let mut seen = std::collections::BTreeSet::new();
    let mut frontier = vec![rho.clone()];
    seen.insert(rho.clone());
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &frontier {
            for (c2, _) in step::<W>(c).iter() {
                if seen.insert(c2.clone()) && !c2.is_value() {
                    next.push(c2.clone());
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen.into_iter().collect()
}
