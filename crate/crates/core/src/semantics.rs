//! Probabilistic small-step semantics over configurations `(e, σ)`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::dist::SubDistr;
use crate::lang::{decompose, plug, subst, subst_type, BinOp, Decomposition, Expr, Label, Loc};
use crate::weight::Weight;

/// Largest bound accepted by `rand`; larger (or negative) bounds make the
/// redex stuck.
pub const MAX_RAND_BOUND: u64 = 1 << 20;

/// A presampling tape: a bound and a queue of presampled values `<= bound`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tape {
    bound: u64,
    contents: Vec<u64>,
}

impl Tape {
    pub fn empty(bound: u64) -> Tape {
        Tape {
            bound,
            contents: Vec::new(),
        }
    }

    /// `None` if some element exceeds the bound.
    pub fn new(bound: u64, contents: Vec<u64>) -> Option<Tape> {
        contents
            .iter()
            .all(|&n| n <= bound)
            .then_some(Tape { bound, contents })
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn contents(&self) -> &[u64] {
        &self.contents
    }

    fn pushed(&self, n: u64) -> Tape {
        let mut t = self.clone();
        t.contents.push(n);
        t
    }
}

impl fmt::Display for Tape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:[", self.bound)?;
        for (i, n) in self.contents.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{n}")?;
        }
        f.write_str("]")
    }
}

/// Heap and tape store.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State {
    pub heap: BTreeMap<Loc, Expr>,
    pub tapes: BTreeMap<Label, Tape>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("label {0} is not allocated")]
pub struct UnknownLabel(pub usize);

impl State {
    pub fn new() -> State {
        State::default()
    }

    pub fn with_tape(mut self, label: Label, tape: Tape) -> State {
        self.tapes.insert(label, tape);
        self
    }

    pub fn with_cell(mut self, loc: Loc, v: Expr) -> State {
        self.heap.insert(loc, v);
        self
    }

    pub fn fresh_location(&self) -> Loc {
        Loc(smallest_free(self.heap.keys().map(|l| l.0)))
    }

    pub fn fresh_label(&self) -> Label {
        Label(smallest_free(self.tapes.keys().map(|l| l.0)))
    }
}

fn smallest_free(used: impl Iterator<Item = usize>) -> usize {
    let mut next = 0;
    for i in used {
        if i != next {
            break;
        }
        next += 1;
    }
    next
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        let mut first = true;
        for (l, v) in &self.heap {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "loc({}) := {v}", l.0)?;
        }
        for (l, t) in &self.tapes {
            if !first {
                f.write_str(", ")?;
            }
            first = false;
            write!(f, "label({}) := {t}", l.0)?;
        }
        f.write_str("}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Config {
    pub expr: Expr,
    pub state: State,
}

impl Config {
    pub fn new(expr: Expr, state: State) -> Config {
        Config { expr, state }
    }

    pub fn initial(expr: Expr) -> Config {
        Config::new(expr, State::new())
    }

    pub fn is_value(&self) -> bool {
        self.expr.is_value()
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} | {}", self.expr, self.state)
    }
}

/// Uniform sample space of `rand(n, _)`, if `n` is an admissible bound.
fn sample_bound(n: &BigInt) -> Option<u64> {
    if n.is_negative() {
        return None;
    }
    n.to_u64().filter(|&b| b <= MAX_RAND_BOUND)
}

fn uniform_over<W: Weight>(bound: u64, mut make: impl FnMut(u64) -> Config) -> SubDistr<Config, W> {
    let w = W::uniform(&BigUint::from(bound + 1));
    SubDistr::from_disjoint((0..=bound).map(|n| (make(n), w.clone())))
}

fn arith(op: BinOp, a: &Expr, b: &Expr) -> Option<Expr> {
    use Expr as E;
    Some(match (op, a, b) {
        (BinOp::Add, E::Int(x), E::Int(y)) => E::Int(x + y),
        (BinOp::Sub, E::Int(x), E::Int(y)) => E::Int(x - y),
        (BinOp::Mul, E::Int(x), E::Int(y)) => E::Int(x * y),
        (BinOp::Mod, E::Int(x), E::Int(y)) if !y.is_zero() => E::Int(x.mod_floor(&y.abs())),
        (BinOp::Lt, E::Int(x), E::Int(y)) => E::Bool(x < y),
        (BinOp::Le, E::Int(x), E::Int(y)) => E::Bool(x <= y),
        (BinOp::And, E::Bool(x), E::Bool(y)) => E::Bool(*x && *y),
        (BinOp::Or, E::Bool(x), E::Bool(y)) => E::Bool(*x || *y),
        (BinOp::Eq, x, y) if crate::lang::ectx::binop_applies(BinOp::Eq, x, y) => E::Bool(x == y),
        _ => return None,
    })
}

/// The single-step distribution. Values and stuck configurations step to
/// the zero distribution.
pub fn step<W: Weight>(rho: &Config) -> SubDistr<Config, W> {
    let Decomposition::Redex { frames, redex } = decompose(&rho.expr) else {
        return SubDistr::zero();
    };
    let sigma = &rho.state;
    let det = |e: Expr, s: State| SubDistr::dret(Config::new(plug(frames.clone(), e), s));
    use Expr as E;
    match redex {
        E::App(f, v) => {
            let E::Rec(r) = *f else { unreachable!("decompose only yields rec heads") };
            let mut body = match r.x.name() {
                Some(x) => subst(&r.body, x, &v),
                None => r.body.clone(),
            };
            if let Some(fname) = r.f.name() {
                if !r.x.binds(fname) {
                    body = subst(&body, fname, &E::Rec(r.clone()));
                }
            }
            det(body, sigma.clone())
        }
        E::If(c, t, el) => {
            let branch = if matches!(*c, E::Bool(true)) { *t } else { *el };
            det(branch, sigma.clone())
        }
        E::Fst(p) => {
            let E::Pair(a, _) = *p else { unreachable!() };
            det(*a, sigma.clone())
        }
        E::Snd(p) => {
            let E::Pair(_, b) = *p else { unreachable!() };
            det(*b, sigma.clone())
        }
        E::Match(s, x, l, y, r) => {
            let (v, binder, arm) = match *s {
                E::Inl(_, v) => (v, x, l),
                E::Inr(_, v) => (v, y, r),
                _ => unreachable!("decompose only yields injections"),
            };
            let out = match binder.name() {
                Some(x) => subst(&arm, x, &v),
                None => *arm,
            };
            det(out, sigma.clone())
        }
        E::Alloc(_, v) => {
            let l = sigma.fresh_location();
            let mut s = sigma.clone();
            s.heap.insert(l, *v);
            det(E::Loc(l), s)
        }
        E::Load(l) => {
            let E::Loc(l) = *l else { unreachable!() };
            match sigma.heap.get(&l) {
                Some(v) => det(v.clone(), sigma.clone()),
                None => SubDistr::zero(),
            }
        }
        E::Store(l, v) => {
            let E::Loc(l) = *l else { unreachable!() };
            if !sigma.heap.contains_key(&l) {
                return SubDistr::zero();
            }
            let mut s = sigma.clone();
            s.heap.insert(l, *v);
            det(E::Unit, s)
        }
        E::Unfold(v) => {
            let E::Fold(_, v) = *v else { unreachable!() };
            det(*v, sigma.clone())
        }
        E::TApp(f, arg) => {
            let E::TLam(a, body) = *f else { unreachable!() };
            let body = match (a, arg) {
                (Some(a), Some(t)) => subst_type(&body, &a, &t),
                _ => *body,
            };
            det(body, sigma.clone())
        }
        E::Unpack(p, a, x, body) => {
            let E::Pack(ann, v) = *p else { unreachable!() };
            let body = match (a, ann) {
                (Some(a), Some(ann)) => subst_type(&body, &a, &ann.witness),
                _ => *body,
            };
            let body = match x.name() {
                Some(x) => subst(&body, x, &v),
                None => body,
            };
            det(body, sigma.clone())
        }
        E::AllocTape(n) => {
            let E::Int(n) = *n else { unreachable!() };
            let Some(bound) = n.to_u64() else {
                return SubDistr::zero();
            };
            let l = sigma.fresh_label();
            let s = sigma.clone().with_tape(l, Tape::empty(bound));
            det(E::Label(l), s)
        }
        E::Rand(n, label) => {
            let E::Int(n) = *n else { unreachable!() };
            let Some(bound) = sample_bound(&n) else {
                return SubDistr::zero();
            };
            let uniform = |frames: &Vec<_>| {
                uniform_over(bound, |k| {
                    Config::new(plug(frames.clone(), E::Int(BigInt::from(k))), sigma.clone())
                })
            };
            match *label {
                E::Unit => uniform(&frames),
                E::Label(l) => match sigma.tapes.get(&l) {
                    None => SubDistr::zero(),
                    Some(t) if t.bound == bound && !t.contents.is_empty() => {
                        let mut s = sigma.clone();
                        let tape = s.tapes.get_mut(&l).expect("present");
                        let head = tape.contents.remove(0);
                        det(E::Int(BigInt::from(head)), s)
                    }
                    Some(_) => uniform(&frames),
                },
                _ => unreachable!(),
            }
        }
        E::BinOp(op, a, b) => match arith(op, &a, &b) {
            Some(v) => det(v, sigma.clone()),
            None => SubDistr::zero(),
        },
        _ => SubDistr::zero(),
    }
}

/// Ghost step appending one uniform sample to the tape `label`.
pub fn state_step<W: Weight>(sigma: &State, label: Label) -> Result<SubDistr<State, W>, UnknownLabel> {
    let tape = sigma.tapes.get(&label).ok_or(UnknownLabel(label.0))?;
    let w = W::uniform(&(BigUint::from(tape.bound) + BigUint::one()));
    Ok(SubDistr::from_disjoint((0..=tape.bound).map(|n| {
        let mut s = sigma.clone();
        s.tapes.insert(label, tape.pushed(n));
        (s, w.clone())
    })))
}

pub fn is_reducible(rho: &Config) -> bool {
    !step::<crate::Prob>(rho).is_zero()
}
