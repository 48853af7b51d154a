//! Evaluation contexts.
//!
//! Contexts are stacks of [`Frame`]s, outermost first. Evaluation is
//! right-to-left: in every binary construct the right operand is evaluated
//! before the left one (`e K` before `K v`, `e <- K` before `K <- v`,
//! `rand(e, K)` before `rand(K, v)`).

use super::syntax::{Binder, BinOp, Expr, PackAnn, Type};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Frame {
    /// `e K`: the argument is under evaluation.
    AppArg(Expr),
    /// `K v`: the function is under evaluation.
    AppFn(Expr),
    If(Expr, Expr),
    /// `(e, K)`
    PairRight(Expr),
    /// `(K, v)`
    PairLeft(Expr),
    Fst,
    Snd,
    Inl(Option<Type>),
    Inr(Option<Type>),
    Match(Binder, Expr, Binder, Expr),
    Alloc(Option<Type>),
    Load,
    /// `e <- K`
    StoreValue(Expr),
    /// `K <- v`
    StoreLoc(Expr),
    Fold(Option<Type>),
    Unfold,
    TApp(Option<Type>),
    Pack(Option<PackAnn>),
    Unpack(Option<String>, Binder, Expr),
    AllocTape,
    /// `rand(e, K)`
    RandLabel(Expr),
    /// `rand(K, v)`
    RandBound(Expr),
    /// `e op K`
    BinOpRight(BinOp, Expr),
    /// `K op v`
    BinOpLeft(BinOp, Expr),
}

impl Frame {
    /// Fills the hole of a single frame.
    pub fn fill(self, e: Expr) -> Expr {
        let e = Box::new(e);
        match self {
            Frame::AppArg(f) => Expr::App(Box::new(f), e),
            Frame::AppFn(a) => Expr::App(e, Box::new(a)),
            Frame::If(t, el) => Expr::If(e, Box::new(t), Box::new(el)),
            Frame::PairRight(a) => Expr::Pair(Box::new(a), e),
            Frame::PairLeft(b) => Expr::Pair(e, Box::new(b)),
            Frame::Fst => Expr::Fst(e),
            Frame::Snd => Expr::Snd(e),
            Frame::Inl(t) => Expr::Inl(t, e),
            Frame::Inr(t) => Expr::Inr(t, e),
            Frame::Match(x, l, y, r) => Expr::Match(e, x, Box::new(l), y, Box::new(r)),
            Frame::Alloc(t) => Expr::Alloc(t, e),
            Frame::Load => Expr::Load(e),
            Frame::StoreValue(l) => Expr::Store(Box::new(l), e),
            Frame::StoreLoc(v) => Expr::Store(e, Box::new(v)),
            Frame::Fold(t) => Expr::Fold(t, e),
            Frame::Unfold => Expr::Unfold(e),
            Frame::TApp(t) => Expr::TApp(e, t),
            Frame::Pack(t) => Expr::Pack(t, e),
            Frame::Unpack(a, x, body) => Expr::Unpack(e, a, x, Box::new(body)),
            Frame::AllocTape => Expr::AllocTape(e),
            Frame::RandLabel(n) => Expr::Rand(Box::new(n), e),
            Frame::RandBound(l) => Expr::Rand(e, Box::new(l)),
            Frame::BinOpRight(op, a) => Expr::BinOp(op, Box::new(a), e),
            Frame::BinOpLeft(op, b) => Expr::BinOp(op, e, Box::new(b)),
        }
    }
}

/// Result of splitting a term into an evaluation context and its next redex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decomposition {
    Value,
    /// No frame applies and the innermost non-value term has no reduction
    /// rule of the right shape (e.g. `fst true`, `1 + true`, a free
    /// variable).
    Stuck,
    Redex { frames: Vec<Frame>, redex: Expr },
}

/// Rebuilds `K[e]` from a frame stack (outermost first).
pub fn plug(frames: Vec<Frame>, e: Expr) -> Expr {
    frames.into_iter().rev().fold(e, |acc, f| f.fill(acc))
}

pub fn decompose(e: &Expr) -> Decomposition {
    if e.is_value() {
        return Decomposition::Value;
    }
    let mut frames = Vec::new();
    let mut cur = e.clone();
    loop {
        match descend(cur) {
            Step::Into(frame, inner) => {
                frames.push(frame);
                cur = inner;
            }
            Step::Redex(r) => return Decomposition::Redex { frames, redex: r },
            Step::Stuck => return Decomposition::Stuck,
        }
    }
}

#[allow(clippy::large_enum_variant)]
enum Step {
    Into(Frame, Expr),
    Redex(Expr),
    Stuck,
}

/// One level of decomposition of a non-value.
fn descend(e: Expr) -> Step {
    use Expr as E;
    match e {
        E::App(f, a) => {
            if !a.is_value() {
                Step::Into(Frame::AppArg(*f), *a)
            } else if !f.is_value() {
                Step::Into(Frame::AppFn(*a), *f)
            } else if matches!(*f, E::Rec(_)) {
                Step::Redex(E::App(f, a))
            } else {
                Step::Stuck
            }
        }
        E::If(c, t, el) => {
            if !c.is_value() {
                Step::Into(Frame::If(*t, *el), *c)
            } else if matches!(*c, E::Bool(_)) {
                Step::Redex(E::If(c, t, el))
            } else {
                Step::Stuck
            }
        }
        E::Pair(a, b) => {
            if !b.is_value() {
                Step::Into(Frame::PairRight(*a), *b)
            } else {
                Step::Into(Frame::PairLeft(*b), *a)
            }
        }
        E::Fst(p) => {
            if !p.is_value() {
                Step::Into(Frame::Fst, *p)
            } else if matches!(*p, E::Pair(..)) {
                Step::Redex(E::Fst(p))
            } else {
                Step::Stuck
            }
        }
        E::Snd(p) => {
            if !p.is_value() {
                Step::Into(Frame::Snd, *p)
            } else if matches!(*p, E::Pair(..)) {
                Step::Redex(E::Snd(p))
            } else {
                Step::Stuck
            }
        }
        E::Inl(t, v) => Step::Into(Frame::Inl(t), *v),
        E::Inr(t, v) => Step::Into(Frame::Inr(t), *v),
        E::Fold(t, v) => Step::Into(Frame::Fold(t), *v),
        E::Pack(t, v) => Step::Into(Frame::Pack(t), *v),
        E::Match(s, x, l, y, r) => {
            if !s.is_value() {
                Step::Into(Frame::Match(x, *l, y, *r), *s)
            } else if matches!(*s, E::Inl(..) | E::Inr(..)) {
                Step::Redex(E::Match(s, x, l, y, r))
            } else {
                Step::Stuck
            }
        }
        E::Alloc(t, v) => {
            if !v.is_value() {
                Step::Into(Frame::Alloc(t), *v)
            } else {
                Step::Redex(E::Alloc(t, v))
            }
        }
        E::Load(l) => {
            if !l.is_value() {
                Step::Into(Frame::Load, *l)
            } else if matches!(*l, E::Loc(_)) {
                Step::Redex(E::Load(l))
            } else {
                Step::Stuck
            }
        }
        E::Store(l, v) => {
            if !v.is_value() {
                Step::Into(Frame::StoreValue(*l), *v)
            } else if !l.is_value() {
                Step::Into(Frame::StoreLoc(*v), *l)
            } else if matches!(*l, E::Loc(_)) {
                Step::Redex(E::Store(l, v))
            } else {
                Step::Stuck
            }
        }
        E::Unfold(v) => {
            if !v.is_value() {
                Step::Into(Frame::Unfold, *v)
            } else if matches!(*v, E::Fold(..)) {
                Step::Redex(E::Unfold(v))
            } else {
                Step::Stuck
            }
        }
        E::TApp(v, t) => {
            if !v.is_value() {
                Step::Into(Frame::TApp(t), *v)
            } else if matches!(*v, E::TLam(..)) {
                Step::Redex(E::TApp(v, t))
            } else {
                Step::Stuck
            }
        }
        E::Unpack(v, a, x, body) => {
            if !v.is_value() {
                Step::Into(Frame::Unpack(a, x, *body), *v)
            } else if matches!(*v, E::Pack(..)) {
                Step::Redex(E::Unpack(v, a, x, body))
            } else {
                Step::Stuck
            }
        }
        E::AllocTape(n) => {
            if !n.is_value() {
                Step::Into(Frame::AllocTape, *n)
            } else if matches!(*n, E::Int(_)) {
                Step::Redex(E::AllocTape(n))
            } else {
                Step::Stuck
            }
        }
        E::Rand(n, l) => {
            if !l.is_value() {
                Step::Into(Frame::RandLabel(*n), *l)
            } else if !n.is_value() {
                Step::Into(Frame::RandBound(*l), *n)
            } else if matches!(*n, E::Int(_)) && matches!(*l, E::Unit | E::Label(_)) {
                Step::Redex(E::Rand(n, l))
            } else {
                Step::Stuck
            }
        }
        E::BinOp(op, a, b) => {
            if !b.is_value() {
                Step::Into(Frame::BinOpRight(op, *a), *b)
            } else if !a.is_value() {
                Step::Into(Frame::BinOpLeft(op, *b), *a)
            } else if binop_applies(op, &a, &b) {
                Step::Redex(E::BinOp(op, a, b))
            } else {
                Step::Stuck
            }
        }
        E::Var(_)
        | E::Unit
        | E::Bool(_)
        | E::Int(_)
        | E::Loc(_)
        | E::Label(_)
        | E::Rec(_)
        | E::TLam(..) => Step::Stuck,
    }
}

/// Whether a binary operator has a rule for the given value operands.
pub(crate) fn binop_applies(op: BinOp, a: &Expr, b: &Expr) -> bool {
    use Expr as E;
    match op {
        BinOp::Add | BinOp::Sub | BinOp::Mul | BinOp::Lt | BinOp::Le => {
            matches!((a, b), (E::Int(_), E::Int(_)))
        }
        BinOp::Mod => matches!((a, b), (E::Int(_), E::Int(d)) if d.sign() != num_bigint::Sign::NoSign),
        BinOp::And | BinOp::Or => matches!((a, b), (E::Bool(_), E::Bool(_))),
        BinOp::Eq => matches!(
            (a, b),
            (E::Int(_), E::Int(_))
                | (E::Bool(_), E::Bool(_))
                | (E::Unit, E::Unit)
                | (E::Loc(_), E::Loc(_))
                | (E::Label(_), E::Label(_))
        ),
    }
}
