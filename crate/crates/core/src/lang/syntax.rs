//! Abstract syntax: types, expressions and values.
//!
//! A single [`Expr`] type serves both the annotated surface language and the
//! untyped core language. Annotation slots are `Option`s; [`erase`] clears
//! all of them and evaluation never inspects them, except that type
//! application and `unpack` propagate type arguments into annotations when
//! they are present.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;

/// Heap location.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Loc(pub usize);

/// Tape label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    Var(String),
    Unit,
    Bool,
    Nat,
    Int,
    Prod(Box<Type>, Box<Type>),
    Sum(Box<Type>, Box<Type>),
    Arrow(Box<Type>, Box<Type>),
    Forall(String, Box<Type>),
    Exists(String, Box<Type>),
    Mu(String, Box<Type>),
    Ref(Box<Type>),
    Tape,
}

impl Type {
    pub fn prod(a: Type, b: Type) -> Type {
        Type::Prod(Box::new(a), Box::new(b))
    }

    pub fn sum(a: Type, b: Type) -> Type {
        Type::Sum(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn reference(a: Type) -> Type {
        Type::Ref(Box::new(a))
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Type::Var(a) => {
                if !bound.contains(a) {
                    out.insert(a.clone());
                }
            }
            Type::Unit | Type::Bool | Type::Nat | Type::Int | Type::Tape => {}
            Type::Prod(a, b) | Type::Sum(a, b) | Type::Arrow(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Type::Ref(a) => a.collect_free(bound, out),
            Type::Forall(v, body) | Type::Exists(v, body) | Type::Mu(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    /// Capture-avoiding substitution of `with` for the free type variable
    /// `var`.
    pub fn subst(&self, var: &str, with: &Type) -> Type {
        match self {
            Type::Var(a) if a == var => with.clone(),
            Type::Var(_) | Type::Unit | Type::Bool | Type::Nat | Type::Int | Type::Tape => {
                self.clone()
            }
            Type::Prod(a, b) => Type::prod(a.subst(var, with), b.subst(var, with)),
            Type::Sum(a, b) => Type::sum(a.subst(var, with), b.subst(var, with)),
            Type::Arrow(a, b) => Type::arrow(a.subst(var, with), b.subst(var, with)),
            Type::Ref(a) => Type::reference(a.subst(var, with)),
            Type::Forall(v, body) | Type::Exists(v, body) | Type::Mu(v, body) => {
                let rebuild = |v: String, body: Type| match self {
                    Type::Forall(..) => Type::Forall(v, Box::new(body)),
                    Type::Exists(..) => Type::Exists(v, Box::new(body)),
                    _ => Type::Mu(v, Box::new(body)),
                };
                if v == var {
                    return self.clone();
                }
                let with_free = with.free_vars();
                if with_free.contains(v) {
                    let mut avoid = with_free;
                    avoid.extend(body.free_vars());
                    avoid.insert(var.to_string());
                    let fresh = fresh_name(v, &avoid);
                    let renamed = body.subst(v, &Type::Var(fresh.clone()));
                    rebuild(fresh, renamed.subst(var, with))
                } else {
                    rebuild(v.clone(), body.subst(var, with))
                }
            }
        }
    }

    /// Equality up to renaming of bound type variables.
    pub fn alpha_eq(&self, other: &Type) -> bool {
        fn go(a: &Type, b: &Type, env_a: &mut Vec<String>, env_b: &mut Vec<String>) -> bool {
            match (a, b) {
                (Type::Var(x), Type::Var(y)) => {
                    let ix = env_a.iter().rposition(|v| v == x);
                    let iy = env_b.iter().rposition(|v| v == y);
                    match (ix, iy) {
                        (Some(i), Some(j)) => env_a.len() - i == env_b.len() - j,
                        (None, None) => x == y,
                        _ => false,
                    }
                }
                (Type::Unit, Type::Unit)
                | (Type::Bool, Type::Bool)
                | (Type::Nat, Type::Nat)
                | (Type::Int, Type::Int)
                | (Type::Tape, Type::Tape) => true,
                (Type::Prod(a1, a2), Type::Prod(b1, b2))
                | (Type::Sum(a1, a2), Type::Sum(b1, b2))
                | (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => {
                    go(a1, b1, env_a, env_b) && go(a2, b2, env_a, env_b)
                }
                (Type::Ref(x), Type::Ref(y)) => go(x, y, env_a, env_b),
                (Type::Forall(x, bx), Type::Forall(y, by))
                | (Type::Exists(x, bx), Type::Exists(y, by))
                | (Type::Mu(x, bx), Type::Mu(y, by)) => {
                    env_a.push(x.clone());
                    env_b.push(y.clone());
                    let r = go(bx, by, env_a, env_b);
                    env_a.pop();
                    env_b.pop();
                    r
                }
                _ => false,
            }
        }
        go(self, other, &mut Vec::new(), &mut Vec::new())
    }
}

pub(crate) fn fresh_name(base: &str, avoid: &BTreeSet<String>) -> String {
    (1..)
        .map(|i| format!("{base}{i}"))
        .find(|c| !avoid.contains(c))
        .expect("unbounded supply of names")
}

/// A term-level binder; `Anon` is the `_` binder that never matches a
/// variable.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Binder {
    Anon,
    Named(String),
}

impl Binder {
    pub fn named(x: &str) -> Binder {
        Binder::Named(x.to_string())
    }

    pub fn binds(&self, x: &str) -> bool {
        matches!(self, Binder::Named(y) if y == x)
    }

    pub fn name(&self) -> Option<&str> {
        match self {
            Binder::Anon => None,
            Binder::Named(x) => Some(x),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Mod,
    Eq,
    Lt,
    Le,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Mod => "mod",
            BinOp::Eq => "=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

/// `rec f x = body`. Parameter and result annotations are surface-only.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RecFn {
    pub f: Binder,
    pub x: Binder,
    pub param: Option<Type>,
    pub ret: Option<Type>,
    pub body: Expr,
}

/// Annotation on `pack`: the witness type and the existential it inhabits.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PackAnn {
    pub witness: Type,
    pub ty: Type,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Expr {
    Var(String),
    Unit,
    Bool(bool),
    Int(BigInt),
    Loc(Loc),
    Label(Label),
    Rec(Box<RecFn>),
    App(Box<Expr>, Box<Expr>),
    If(Box<Expr>, Box<Expr>, Box<Expr>),
    Pair(Box<Expr>, Box<Expr>),
    Fst(Box<Expr>),
    Snd(Box<Expr>),
    /// Annotation is the full sum type.
    Inl(Option<Type>, Box<Expr>),
    Inr(Option<Type>, Box<Expr>),
    Match(Box<Expr>, Binder, Box<Expr>, Binder, Box<Expr>),
    /// Annotation is the content type of the new reference.
    Alloc(Option<Type>, Box<Expr>),
    Load(Box<Expr>),
    Store(Box<Expr>, Box<Expr>),
    /// Annotation is the recursive type `mu a. t`.
    Fold(Option<Type>, Box<Expr>),
    Unfold(Box<Expr>),
    TLam(Option<String>, Box<Expr>),
    TApp(Box<Expr>, Option<Type>),
    Pack(Option<PackAnn>, Box<Expr>),
    Unpack(Box<Expr>, Option<String>, Binder, Box<Expr>),
    AllocTape(Box<Expr>),
    Rand(Box<Expr>, Box<Expr>),
    BinOp(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn int(n: i64) -> Expr {
        Expr::Int(BigInt::from(n))
    }

    pub fn var(x: &str) -> Expr {
        Expr::Var(x.to_string())
    }

    pub fn app(f: Expr, a: Expr) -> Expr {
        Expr::App(Box::new(f), Box::new(a))
    }

    pub fn pair(a: Expr, b: Expr) -> Expr {
        Expr::Pair(Box::new(a), Box::new(b))
    }

    pub fn if_(c: Expr, t: Expr, e: Expr) -> Expr {
        Expr::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn binop(op: BinOp, a: Expr, b: Expr) -> Expr {
        Expr::BinOp(op, Box::new(a), Box::new(b))
    }

    pub fn rand(bound: Expr, label: Expr) -> Expr {
        Expr::Rand(Box::new(bound), Box::new(label))
    }

    /// Unannotated `fun x -> body`.
    pub fn lam(x: Binder, body: Expr) -> Expr {
        Expr::Rec(Box::new(RecFn {
            f: Binder::Anon,
            x,
            param: None,
            ret: None,
            body,
        }))
    }

    /// `let x = bound in body`, i.e. `(fun x -> body) bound`.
    pub fn let_(x: Binder, bound: Expr, body: Expr) -> Expr {
        Expr::app(Expr::lam(x, body), bound)
    }

    /// `flip(label)`: `if rand(1, label) = 0 then false else true`.
    pub fn flip(label: Expr) -> Expr {
        Expr::if_(
            Expr::binop(BinOp::Eq, Expr::rand(Expr::int(1), label), Expr::int(0)),
            Expr::Bool(false),
            Expr::Bool(true),
        )
    }

    /// The value judgment.
    pub fn is_value(&self) -> bool {
        match self {
            Expr::Unit
            | Expr::Bool(_)
            | Expr::Int(_)
            | Expr::Loc(_)
            | Expr::Label(_)
            | Expr::Rec(_)
            | Expr::TLam(..) => true,
            Expr::Pair(a, b) => a.is_value() && b.is_value(),
            Expr::Inl(_, v) | Expr::Inr(_, v) | Expr::Fold(_, v) | Expr::Pack(_, v) => {
                v.is_value()
            }
            _ => false,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_vars().is_empty()
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let with = |b: &Binder, bound: &mut Vec<String>, out: &mut BTreeSet<String>, e: &Expr| {
            if let Binder::Named(x) = b {
                bound.push(x.clone());
                e.collect_free(bound, out);
                bound.pop();
            } else {
                e.collect_free(bound, out);
            }
        };
        match self {
            Expr::Var(x) => {
                if !bound.contains(x) {
                    out.insert(x.clone());
                }
            }
            Expr::Unit | Expr::Bool(_) | Expr::Int(_) | Expr::Loc(_) | Expr::Label(_) => {}
            Expr::Rec(r) => {
                let mut n = 0;
                for b in [&r.f, &r.x] {
                    if let Binder::Named(x) = b {
                        bound.push(x.clone());
                        n += 1;
                    }
                }
                r.body.collect_free(bound, out);
                bound.truncate(bound.len() - n);
            }
            Expr::Match(s, x, l, y, r) => {
                s.collect_free(bound, out);
                with(x, bound, out, l);
                with(y, bound, out, r);
            }
            Expr::Unpack(e1, _, x, e2) => {
                e1.collect_free(bound, out);
                with(x, bound, out, e2);
            }
            _ => {
                for c in self.children() {
                    c.collect_free(bound, out);
                }
            }
        }
    }

    /// Immediate subexpressions, for binder-free constructors.
    pub(crate) fn children(&self) -> Vec<&Expr> {
        match self {
            Expr::Var(_) | Expr::Unit | Expr::Bool(_) | Expr::Int(_) | Expr::Loc(_) | Expr::Label(_) => {
                vec![]
            }
            Expr::Rec(r) => vec![&r.body],
            Expr::App(a, b)
            | Expr::Pair(a, b)
            | Expr::Store(a, b)
            | Expr::Rand(a, b)
            | Expr::BinOp(_, a, b) => vec![a, b],
            Expr::If(a, b, c) => vec![a, b, c],
            Expr::Match(a, _, b, _, c) => vec![a, b, c],
            Expr::Unpack(a, _, _, b) => vec![a, b],
            Expr::Fst(a)
            | Expr::Snd(a)
            | Expr::Inl(_, a)
            | Expr::Inr(_, a)
            | Expr::Alloc(_, a)
            | Expr::Load(a)
            | Expr::Fold(_, a)
            | Expr::Unfold(a)
            | Expr::TLam(_, a)
            | Expr::TApp(a, _)
            | Expr::Pack(_, a)
            | Expr::AllocTape(a) => vec![a],
        }
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// True when no annotation slot is filled anywhere in the term.
    pub fn is_core(&self) -> bool {
        let here = match self {
            Expr::Rec(r) => r.param.is_none() && r.ret.is_none(),
            Expr::Inl(a, _) | Expr::Inr(a, _) | Expr::Alloc(a, _) | Expr::Fold(a, _) => a.is_none(),
            Expr::TLam(a, _) | Expr::Unpack(_, a, _, _) => a.is_none(),
            Expr::TApp(_, a) => a.is_none(),
            Expr::Pack(a, _) => a.is_none(),
            _ => true,
        };
        here && self.children().into_iter().all(Expr::is_core)
    }
}

/// A closed-or-open expression in value form.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Val(Expr);

impl Val {
    pub fn new(e: Expr) -> Option<Val> {
        e.is_value().then_some(Val(e))
    }

    pub fn unit() -> Val {
        Val(Expr::Unit)
    }

    pub fn bool(b: bool) -> Val {
        Val(Expr::Bool(b))
    }

    pub fn int(n: i64) -> Val {
        Val(Expr::int(n))
    }

    pub fn big(n: BigInt) -> Val {
        Val(Expr::Int(n))
    }

    pub fn loc(l: Loc) -> Val {
        Val(Expr::Loc(l))
    }

    pub fn label(l: Label) -> Val {
        Val(Expr::Label(l))
    }

    pub fn pair(a: Val, b: Val) -> Val {
        Val(Expr::pair(a.0, b.0))
    }

    pub fn inl(v: Val) -> Val {
        Val(Expr::Inl(None, Box::new(v.0)))
    }

    pub fn inr(v: Val) -> Val {
        Val(Expr::Inr(None, Box::new(v.0)))
    }

    pub fn fold(v: Val) -> Val {
        Val(Expr::Fold(None, Box::new(v.0)))
    }

    pub fn pack(v: Val) -> Val {
        Val(Expr::Pack(None, Box::new(v.0)))
    }

    pub fn tlam(body: Expr) -> Val {
        Val(Expr::TLam(None, Box::new(body)))
    }

    pub fn rec(f: Binder, x: Binder, body: Expr) -> Val {
        Val(Expr::Rec(Box::new(RecFn {
            f,
            x,
            param: None,
            ret: None,
            body,
        })))
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }

    pub fn into_expr(self) -> Expr {
        self.0
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self.0 {
            Expr::Bool(b) => Some(b),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<&BigInt> {
        match &self.0 {
            Expr::Int(n) => Some(n),
            _ => None,
        }
    }
}

impl From<Val> for Expr {
    fn from(v: Val) -> Expr {
        v.0
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Removes every type annotation.
pub fn erase(e: &Expr) -> Expr {
    let b = |e: &Expr| Box::new(erase(e));
    match e {
        Expr::Var(_) | Expr::Unit | Expr::Bool(_) | Expr::Int(_) | Expr::Loc(_) | Expr::Label(_) => {
            e.clone()
        }
        Expr::Rec(r) => Expr::Rec(Box::new(RecFn {
            f: r.f.clone(),
            x: r.x.clone(),
            param: None,
            ret: None,
            body: erase(&r.body),
        })),
        Expr::App(f, a) => Expr::App(b(f), b(a)),
        Expr::If(c, t, el) => Expr::If(b(c), b(t), b(el)),
        Expr::Pair(x, y) => Expr::Pair(b(x), b(y)),
        Expr::Fst(x) => Expr::Fst(b(x)),
        Expr::Snd(x) => Expr::Snd(b(x)),
        Expr::Inl(_, x) => Expr::Inl(None, b(x)),
        Expr::Inr(_, x) => Expr::Inr(None, b(x)),
        Expr::Match(s, x, l, y, r) => Expr::Match(b(s), x.clone(), b(l), y.clone(), b(r)),
        Expr::Alloc(_, x) => Expr::Alloc(None, b(x)),
        Expr::Load(x) => Expr::Load(b(x)),
        Expr::Store(l, v) => Expr::Store(b(l), b(v)),
        Expr::Fold(_, x) => Expr::Fold(None, b(x)),
        Expr::Unfold(x) => Expr::Unfold(b(x)),
        Expr::TLam(_, x) => Expr::TLam(None, b(x)),
        Expr::TApp(x, _) => Expr::TApp(b(x), None),
        Expr::Pack(_, x) => Expr::Pack(None, b(x)),
        Expr::Unpack(e1, _, x, e2) => Expr::Unpack(b(e1), None, x.clone(), b(e2)),
        Expr::AllocTape(x) => Expr::AllocTape(b(x)),
        Expr::Rand(n, l) => Expr::Rand(b(n), b(l)),
        Expr::BinOp(op, x, y) => Expr::BinOp(*op, b(x), b(y)),
    }
}
