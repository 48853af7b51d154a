//! Mechanical checks over execution distributions: program comparison,
//! context probes, the erasure property and reachable-state sweeps.
//!
//! Values are compared after erasing type annotations, which carry no
//! runtime meaning.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::coupling::{extract_equality, extract_pointwise_le};
use crate::dist::{DistrJson, SubDistr};
use crate::exec::{exec_series, exec_val_n, is_stable, ExecBounds};
use crate::lang::{
    decompose, elaborate, erase, is_subtype, parse_expr, subst_closed, typecheck, Decomposition, Expr, LoadError,
    StoreTyping, Type, TypeCtx, TypeError, Val,
};
use crate::semantics::{state_step, step, Config, State, UnknownLabel};
use crate::weight::format_ratio;
use crate::{Distr, Prob};

/// Depths over which residuals must stay constant before equal all-zero
/// prefixes count as equal.
pub const PROBE_WINDOW: usize = 5;

/// Name of the free variable marking the hole of a context.
pub const HOLE: &str = "hole";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    ExactlyEqual,
    LeftRefines,
    RightRefines,
    Inconclusive,
    Distinguished,
}

impl Verdict {
    pub fn swapped(self) -> Verdict {
        match self {
            Verdict::LeftRefines => Verdict::RightRefines,
            Verdict::RightRefines => Verdict::LeftRefines,
            v => v,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ExactlyEqual => "exactly-equal",
            Verdict::LeftRefines => "left-refines",
            Verdict::RightRefines => "right-refines",
            Verdict::Inconclusive => "inconclusive",
            Verdict::Distinguished => "distinguished",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonReport {
    pub depth: usize,
    pub left: Distr<Val>,
    pub right: Distr<Val>,
    pub left_residual: Prob,
    pub right_residual: Prob,
    pub verdict: Verdict,
    /// Both executions had constant bounds over the last [`PROBE_WINDOW`]
    /// depths.
    pub stabilized: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportJson {
    pub depth: usize,
    pub left: DistrJson,
    pub right: DistrJson,
    pub left_residual: String,
    pub right_residual: String,
    pub verdict: Verdict,
    pub stabilized: bool,
    pub tv_distance: String,
}

impl ComparisonReport {
    pub fn tv_distance(&self) -> Prob {
        tv_distance(&self.left, &self.right)
    }

    pub fn to_json(&self) -> ReportJson {
        ReportJson {
            depth: self.depth,
            left: self.left.to_json(),
            right: self.right.to_json(),
            left_residual: format_ratio(&self.left_residual),
            right_residual: format_ratio(&self.right_residual),
            verdict: self.verdict,
            stabilized: self.stabilized,
            tv_distance: format_ratio(&self.tv_distance()),
        }
    }

    /// Some value is more likely on one side than the other side can ever
    /// reach, whatever happens to its residual.
    fn separated(&self) -> bool {
        let beyond = |a: &Distr<Val>, b: &Distr<Val>, rb: &Prob| a.iter().any(|(v, w)| *w > b.weight(v) + rb);
        beyond(&self.left, &self.right, &self.right_residual) || beyond(&self.right, &self.left, &self.left_residual)
    }
}

fn erased_values(b: &ExecBounds) -> Distr<Val> {
    b.lower.map(|v| Val::new(erase(v.expr())).expect("erasure keeps values"))
}

fn verdict(r: &ComparisonReport) -> Verdict {
    if r.separated() {
        return Verdict::Distinguished;
    }
    let equal = extract_equality(&r.left, &r.right);
    let both_done = r.left_residual.is_zero() && r.right_residual.is_zero();
    if equal && (both_done || (r.stabilized && r.left_residual == r.right_residual)) {
        return Verdict::ExactlyEqual;
    }
    if r.left_residual.is_zero() && extract_pointwise_le(&r.left, &r.right) {
        return Verdict::LeftRefines;
    }
    if r.right_residual.is_zero() && extract_pointwise_le(&r.right, &r.left) {
        return Verdict::RightRefines;
    }
    Verdict::Inconclusive
}

/// Runs both programs from `sigma` for `n` steps and classifies the pair.
pub fn compare_programs(e1: &Expr, e2: &Expr, sigma: &State, n: usize) -> ComparisonReport {
    let s1 = exec_series::<Prob>(&Config::new(e1.clone(), sigma.clone()), n);
    let s2 = exec_series::<Prob>(&Config::new(e2.clone(), sigma.clone()), n);
    let (b1, b2) = (s1.last().expect("non-empty"), s2.last().expect("non-empty"));
    let mut report = ComparisonReport {
        depth: n,
        left: erased_values(b1),
        right: erased_values(b2),
        left_residual: b1.residual.clone(),
        right_residual: b2.residual.clone(),
        verdict: Verdict::Inconclusive,
        stabilized: is_stable(&s1, PROBE_WINDOW) && is_stable(&s2, PROBE_WINDOW),
    };
    report.verdict = verdict(&report);
    report
}

/// Total variation distance, with the missing mass of each side treated as
/// one extra outcome.
pub fn tv_distance(mu1: &Distr<Val>, mu2: &Distr<Val>) -> Prob {
    let support: BTreeSet<&Val> = mu1.support().chain(mu2.support()).collect();
    let pointwise: Prob = support.into_iter().map(|v| (mu1.weight(v) - mu2.weight(v)).abs()).sum();
    (pointwise + (mu1.mass() - mu2.mass()).abs()) / Prob::from_integer(2.into())
}

/// Checks that prepending a ghost sample on `label` leaves the depth-`n`
/// value distribution of `(e, sigma)` unchanged.
pub fn erasure_check(e: &Expr, sigma: &State, label: crate::lang::Label, n: usize) -> Result<bool, UnknownLabel> {
    let ghost = state_step::<Prob>(sigma, label)?;
    let direct = exec_val_n::<Prob>(&Config::new(e.clone(), sigma.clone()), n);
    let via = ghost.bind(|s| exec_val_n(&Config::new(e.clone(), s.clone()), n));
    Ok(direct == via)
}

/// A one-hole harness: source text with the free variable [`HOLE`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    pub name: String,
    pub source: String,
}

impl Context {
    pub fn new(name: &str, source: &str) -> Context {
        Context {
            name: name.to_string(),
            source: source.to_string(),
        }
    }

    /// Parses and typechecks the harness around a hole of type `hole_ty`.
    pub fn elaborate(&self, hole_ty: &Type) -> Result<(Expr, Type), ProbeError> {
        let e = parse_expr(&self.source).map_err(|e| ProbeError::Context(self.name.clone(), e.into()))?;
        let ctx = TypeCtx::default().with_var(HOLE, hole_ty.clone());
        elaborate(&ctx, &e).map_err(|e| ProbeError::Context(self.name.clone(), e.into()))
    }

    pub fn plug(&self, hole_ty: &Type, e: &Expr) -> Result<Expr, ProbeError> {
        let (c, _) = self.elaborate(hole_ty)?;
        Ok(subst_closed(&c, HOLE, e))
    }
}

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("program does not typecheck: {0}")]
    Program(TypeError),
    #[error("programs have unrelated types {0} and {1}")]
    TypeMismatch(Type, Type),
    #[error("context `{0}`: {1}")]
    Context(String, LoadError),
}

/// The common type both programs can be used at.
pub fn common_type(e1: &Expr, e2: &Expr) -> Result<Type, ProbeError> {
    let t1 = typecheck(&TypeCtx::default(), e1).map_err(ProbeError::Program)?;
    let t2 = typecheck(&TypeCtx::default(), e2).map_err(ProbeError::Program)?;
    if is_subtype(&t1, &t2) {
        Ok(t2)
    } else if is_subtype(&t2, &t1) {
        Ok(t1)
    } else {
        Err(ProbeError::TypeMismatch(t1, t2))
    }
}

/// Compares `C[e1]` against `C[e2]` from the empty state for every context.
pub fn refinement_probe(
    e1: &Expr,
    e2: &Expr,
    contexts: &[Context],
    n: usize,
) -> Result<Vec<(String, ComparisonReport)>, ProbeError> {
    let ty = common_type(e1, e2)?;
    contexts
        .iter()
        .map(|c| {
            let p1 = c.plug(&ty, e1)?;
            let p2 = c.plug(&ty, e2)?;
            Ok((c.name.clone(), compare_programs(&p1, &p2, &State::new(), n)))
        })
        .collect()
}

/// A configuration reached by a step that broke a checked property.
#[derive(Clone, Debug, PartialEq, Error)]
#[error("property violated at {to} (stepped from {from})")]
pub struct Violation {
    pub from: Box<Config>,
    pub to: Box<Config>,
    pub reason: String,
}

fn explore(
    rho: &Config,
    n: usize,
    mut on_step: impl FnMut(&Config, &Config) -> Result<(), String>,
) -> Result<usize, Violation> {
    let mut seen = BTreeSet::from([rho.clone()]);
    let mut frontier = vec![rho.clone()];
    for _ in 0..n {
        let mut next = Vec::new();
        for c in &frontier {
            for (c2, _) in step::<Prob>(c).iter() {
                on_step(c, c2).map_err(|reason| Violation {
                    from: Box::new(c.clone()),
                    to: Box::new(c2.clone()),
                    reason,
                })?;
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
    Ok(seen.len())
}

/// Checks `pred` on every configuration reachable within `n` steps and
/// returns how many were visited.
pub fn sweep_states(rho: &Config, n: usize, mut pred: impl FnMut(&Config) -> bool) -> Result<usize, Violation> {
    if !pred(rho) {
        return Err(Violation {
            from: Box::new(rho.clone()),
            to: Box::new(rho.clone()),
            reason: "initial configuration".into(),
        });
    }
    explore(rho, n, |_, c2| if pred(c2) { Ok(()) } else { Err("predicate false".into()) })
}

fn redex_of(e: &Expr) -> Option<Expr> {
    match decompose(e) {
        Decomposition::Redex { redex, .. } => Some(redex),
        _ => None,
    }
}

/// Checks that only labelled reads and tape allocation change tapes, that a
/// read removes exactly the head, and that ghost steps from every reachable
/// state only append.
pub fn tape_monotonicity_sweep(rho: &Config, n: usize) -> Result<usize, Violation> {
    explore(rho, n, |c, c2| {
        let (before, after) = (&c.state.tapes, &c2.state.tapes);
        let expected = match redex_of(&c.expr) {
            Some(Expr::Rand(bound, l)) => match (*bound, *l) {
                (Expr::Int(b), Expr::Label(l))
                    if before
                        .get(&l)
                        .is_some_and(|t| !t.contents().is_empty() && BigInt::from(t.bound()) == b) =>
                {
                    let mut t = before.clone();
                    let old = &before[&l];
                    let popped = crate::semantics::Tape::new(old.bound(), old.contents()[1..].to_vec()).expect("suffix");
                    t.insert(l, popped);
                    t
                }
                _ => before.clone(),
            },
            Some(Expr::AllocTape(_)) => {
                let new: Vec<_> = after.keys().filter(|l| !before.contains_key(l)).collect();
                if new.len() != 1 || !after[new[0]].contents().is_empty() {
                    return Err("tape allocation must add one empty tape".into());
                }
                let mut t = before.clone();
                t.insert(*new[0], after[new[0]].clone());
                t
            }
            _ => before.clone(),
        };
        if *after != expected {
            return Err("unexpected tape change".into());
        }
        for (&l, t) in after {
            let ghost = state_step::<Prob>(&c2.state, l).map_err(|e| e.to_string())?;
            for (s, _) in ghost.iter() {
                let t2 = &s.tapes[&l];
                let ok = t2.bound() == t.bound()
                    && t2.contents().len() == t.contents().len() + 1
                    && t2.contents().starts_with(t.contents())
                    && s.heap == c2.state.heap
                    && s.tapes.iter().all(|(k, v)| *k == l || after.get(k) == Some(v));
                if !ok {
                    return Err(format!("ghost step on label({}) is not an append", l.0));
                }
            }
        }
        Ok(())
    })
}

/// Checks that every configuration reachable from the elaborated closed
/// program `e` types at a subtype of `ty`, with heap cells typed by the
/// annotation of the allocation that created them.
pub fn preservation_sweep(e: &Expr, ty: &Type, n: usize) -> Result<usize, Violation> {
    let rho = Config::initial(e.clone());
    let mut typings: BTreeMap<Config, StoreTyping> = BTreeMap::from([(rho.clone(), StoreTyping::default())]);
    explore(&rho, n, |c, c2| {
        let mut sigma = typings.get(c).cloned().ok_or("untracked configuration")?;
        if let Some(Expr::Alloc(t, _)) = redex_of(&c.expr) {
            let t = t.ok_or("allocation without annotation")?;
            for l in c2.state.heap.keys().filter(|l| !c.state.heap.contains_key(l)) {
                sigma.locs.insert(*l, t.clone());
            }
        }
        sigma.labels.extend(c2.state.tapes.keys().copied());
        let ctx = TypeCtx::default().with_store(sigma.clone());
        let t2 = typecheck(&ctx, &c2.expr).map_err(|e| e.to_string())?;
        if !is_subtype(&t2, ty) {
            return Err(format!("type changed to {t2}"));
        }
        for (l, v) in &c2.state.heap {
            let lt = sigma.locs.get(l).ok_or_else(|| format!("loc({}) untyped", l.0))?;
            let vt = typecheck(&ctx, v).map_err(|e| e.to_string())?;
            if !is_subtype(&vt, lt) {
                return Err(format!("loc({}) holds {vt}, typed {lt}", l.0));
            }
        }
        typings.entry(c2.clone()).or_insert(sigma);
        Ok(())
    })
}

/// Values of an elaborated closed program, erased, at depth `n`.
pub fn value_distribution(e: &Expr, n: usize) -> (Distr<Val>, Prob) {
    let s = exec_series::<Prob>(&Config::initial(e.clone()), n);
    let b = s.last().expect("non-empty");
    (erased_values(b), b.residual.clone())
}

/// Parses, elaborates and runs a closed program.
pub fn run_source(src: &str, n: usize) -> Result<(Distr<Val>, Prob), LoadError> {
    let (e, _) = crate::lang::load(src)?;
    Ok(value_distribution(&e, n))
}

/// Convenience for tests and reports: a distribution keyed by printed values.
pub fn printed(d: &SubDistr<Val, Prob>) -> BTreeMap<String, String> {
    d.iter().map(|(v, w)| (v.to_string(), format_ratio(w))).collect()
}
