//! Bidirectional typechecker.
//!
//! Literals `n >= 0` synthesize `nat`, and `nat <: int` lifts structurally
//! through products, sums and arrows. Checking mode lets `inl`/`inr`/`fold`
//! and function parameters omit their annotations when the expected type
//! supplies them. A `let` (an unannotated anonymous function in head
//! position) takes its parameter type from the bound expression.
//!
//! Unannotated `ref e` is elaborated to `ref[t] e`, where `t` is the type of
//! `e` with `nat` widened to `int`. Runtime locations and labels are typed
//! through a [`StoreTyping`].

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;

use super::error::TypeError;
use super::syntax::{Binder, BinOp, Expr, Label, Loc, RecFn, Type};

/// Types of allocated locations and the set of allocated labels.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StoreTyping {
    pub locs: BTreeMap<Loc, Type>,
    pub labels: BTreeSet<Label>,
}

/// Ξ | Γ | Σ.
#[derive(Clone, Debug, Default)]
pub struct TypeCtx {
    pub tyvars: Vec<String>,
    pub vars: Vec<(String, Type)>,
    pub store: StoreTyping,
}

impl TypeCtx {
    pub fn with_var(mut self, x: &str, t: Type) -> TypeCtx {
        self.vars.push((x.to_string(), t));
        self
    }

    pub fn with_store(mut self, store: StoreTyping) -> TypeCtx {
        self.store = store;
        self
    }
}

type R<T> = Result<T, TypeError>;

pub fn typecheck(ctx: &TypeCtx, e: &Expr) -> R<Type> {
    elaborate(ctx, e).map(|(_, t)| t)
}

pub fn typecheck_closed(e: &Expr) -> R<Type> {
    typecheck(&TypeCtx::default(), e)
}

/// Typechecks `e` and returns it with the annotations that were omitted
/// (on `ref`, and on forms typed in checking mode) filled in.
pub fn elaborate(ctx: &TypeCtx, e: &Expr) -> R<(Expr, Type)> {
    let mut cx = ctx.clone();
    let mut e = e.clone();
    let t = cx.synth(&mut e)?;
    Ok((e, t))
}

pub fn is_subtype(a: &Type, b: &Type) -> bool {
    if a.alpha_eq(b) {
        return true;
    }
    match (a, b) {
        (Type::Nat, Type::Int) => true,
        (Type::Prod(a1, a2), Type::Prod(b1, b2)) | (Type::Sum(a1, a2), Type::Sum(b1, b2)) => {
            is_subtype(a1, b1) && is_subtype(a2, b2)
        }
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => is_subtype(b1, a1) && is_subtype(a2, b2),
        _ => false,
    }
}

/// Least upper bound, where it exists.
fn join(a: &Type, b: &Type) -> R<Type> {
    if is_subtype(a, b) {
        return Ok(b.clone());
    }
    if is_subtype(b, a) {
        return Ok(a.clone());
    }
    match (a, b) {
        (Type::Prod(a1, a2), Type::Prod(b1, b2)) => Ok(Type::prod(join(a1, b1)?, join(a2, b2)?)),
        (Type::Sum(a1, a2), Type::Sum(b1, b2)) => Ok(Type::sum(join(a1, b1)?, join(a2, b2)?)),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => match meet(a1, b1) {
            Some(dom) => Ok(Type::arrow(dom, join(a2, b2)?)),
            None => Err(TypeError::NoJoin(a.to_string(), b.to_string())),
        },
        _ => Err(TypeError::NoJoin(a.to_string(), b.to_string())),
    }
}

/// Greatest lower bound, where it exists.
fn meet(a: &Type, b: &Type) -> Option<Type> {
    if is_subtype(a, b) {
        return Some(a.clone());
    }
    if is_subtype(b, a) {
        return Some(b.clone());
    }
    match (a, b) {
        (Type::Prod(a1, a2), Type::Prod(b1, b2)) => Some(Type::prod(meet(a1, b1)?, meet(a2, b2)?)),
        (Type::Sum(a1, a2), Type::Sum(b1, b2)) => Some(Type::sum(meet(a1, b1)?, meet(a2, b2)?)),
        (Type::Arrow(a1, a2), Type::Arrow(b1, b2)) => Some(Type::arrow(join(a1, b1).ok()?, meet(a2, b2)?)),
        _ => None,
    }
}

fn widen(t: &Type) -> Type {
    match t {
        Type::Nat => Type::Int,
        Type::Prod(a, b) => Type::prod(widen(a), widen(b)),
        Type::Sum(a, b) => Type::sum(widen(a), widen(b)),
        Type::Arrow(a, b) => Type::arrow((**a).clone(), widen(b)),
        other => other.clone(),
    }
}

fn mismatch(expected: &Type, found: &Type) -> TypeError {
    TypeError::Mismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn shape(expected: &str, found: &Type) -> TypeError {
    TypeError::Mismatch {
        expected: expected.to_string(),
        found: found.to_string(),
    }
}

fn unroll(mu: &Type) -> R<Type> {
    match mu {
        Type::Mu(a, body) => Ok(body.subst(a, mu)),
        other => Err(TypeError::NotRecursive(other.to_string())),
    }
}

fn is_let_head(r: &RecFn) -> bool {
    r.f == Binder::Anon && r.param.is_none() && r.ret.is_none()
}

impl TypeCtx {
    fn well_formed(&self, t: &Type) -> R<()> {
        match t.free_vars().into_iter().find(|a| !self.tyvars.contains(a)) {
            Some(a) => Err(TypeError::UnboundTypeVariable(a)),
            None => Ok(()),
        }
    }

    fn lookup(&self, x: &str) -> R<Type> {
        self.vars
            .iter()
            .rev()
            .find(|(y, _)| y == x)
            .map(|(_, t)| t.clone())
            .ok_or_else(|| TypeError::UnboundVariable(x.to_string()))
    }

    fn scoped<T>(&mut self, binds: &[(&Binder, Type)], f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        let n = self.vars.len();
        for (b, t) in binds {
            if let Binder::Named(x) = b {
                self.vars.push((x.clone(), t.clone()));
            }
        }
        let r = f(self);
        self.vars.truncate(n);
        r
    }

    fn with_tyvar<T>(&mut self, a: &str, f: impl FnOnce(&mut Self) -> R<T>) -> R<T> {
        if self.tyvars.iter().any(|b| b == a) {
            return Err(TypeError::Shadowed(a.to_string()));
        }
        self.tyvars.push(a.to_string());
        let r = f(self);
        self.tyvars.pop();
        r
    }

    fn subsume(&mut self, e: &mut Expr, expected: &Type) -> R<()> {
        let found = self.synth(e)?;
        if is_subtype(&found, expected) {
            Ok(())
        } else {
            Err(mismatch(expected, &found))
        }
    }

    fn check(&mut self, e: &mut Expr, expected: &Type) -> R<()> {
        match (e, expected) {
            (Expr::Int(n), Type::Nat) if n.is_negative() => Err(mismatch(&Type::Nat, &Type::Int)),
            (Expr::Rec(r), Type::Arrow(p, q)) if r.param.is_none() => {
                if let Some(ret) = &r.ret {
                    self.well_formed(ret)?;
                    if !is_subtype(ret, q) {
                        return Err(mismatch(q, ret));
                    }
                }
                let ret = r.ret.clone().unwrap_or_else(|| (**q).clone());
                let fty = Type::arrow((**p).clone(), ret.clone());
                let (f, x) = (r.f.clone(), r.x.clone());
                self.scoped(&[(&f, fty), (&x, (**p).clone())], |cx| cx.check(&mut r.body, &ret))?;
                r.param = Some((**p).clone());
                r.ret = Some(ret);
                Ok(())
            }
            (Expr::Inl(ann @ None, v), Type::Sum(a, _)) => {
                *ann = Some(expected.clone());
                self.check(v, a)
            }
            (Expr::Inr(ann @ None, v), Type::Sum(_, b)) => {
                *ann = Some(expected.clone());
                self.check(v, b)
            }
            (Expr::Fold(ann @ None, v), Type::Mu(..)) => {
                *ann = Some(expected.clone());
                self.check(v, &unroll(expected)?)
            }
            (Expr::Pair(a, b), Type::Prod(ta, tb)) => {
                self.check(a, ta)?;
                self.check(b, tb)
            }
            (Expr::If(c, t, el), _) => {
                self.check(c, &Type::Bool)?;
                self.check(t, expected)?;
                self.check(el, expected)
            }
            (Expr::Match(s, x, l, y, r), _) => {
                let st = self.synth(s)?;
                let Type::Sum(a, b) = st else {
                    return Err(shape("a sum type", &st));
                };
                let (x, y) = (x.clone(), y.clone());
                self.scoped(&[(&x, *a)], |cx| cx.check(l, expected))?;
                self.scoped(&[(&y, *b)], |cx| cx.check(r, expected))
            }
            (Expr::App(head, arg), _) if matches!(&**head, Expr::Rec(r) if is_let_head(r)) => {
                let at = self.synth(arg)?;
                let Expr::Rec(r) = &mut **head else { unreachable!() };
                let x = r.x.clone();
                self.scoped(&[(&x, at)], |cx| cx.check(&mut r.body, expected))
            }
            (Expr::TLam(Some(a), body), Type::Forall(b, tb)) => {
                let tb = tb.subst(b, &Type::Var(a.clone()));
                let a = a.clone();
                self.with_tyvar(&a, |cx| cx.check(body, &tb))
            }
            (Expr::Unpack(e1, Some(a), x, e2), _) => {
                let et = self.synth(e1)?;
                let Type::Exists(b, body) = et else {
                    return Err(shape("an existential type", &et));
                };
                let opened = body.subst(&b, &Type::Var(a.clone()));
                let (a, x) = (a.clone(), x.clone());
                self.with_tyvar(&a, |cx| cx.scoped(&[(&x, opened)], |cx| cx.check(e2, expected)))
            }
            (e, _) => self.subsume(e, expected),
        }
    }

    fn synth(&mut self, e: &mut Expr) -> R<Type> {
        match e {
            Expr::Var(x) => self.lookup(x),
            Expr::Unit => Ok(Type::Unit),
            Expr::Bool(_) => Ok(Type::Bool),
            Expr::Int(n) => Ok(if n.is_negative() { Type::Int } else { Type::Nat }),
            Expr::Loc(l) => self
                .store
                .locs
                .get(l)
                .map(|t| Type::reference(t.clone()))
                .ok_or(TypeError::UnknownRuntime {
                    kind: "location",
                    index: l.0,
                }),
            Expr::Label(l) => {
                if self.store.labels.contains(l) {
                    Ok(Type::Tape)
                } else {
                    Err(TypeError::UnknownRuntime {
                        kind: "label",
                        index: l.0,
                    })
                }
            }
            Expr::Rec(r) => {
                let Some(p) = r.param.clone() else {
                    return Err(TypeError::MissingAnnotation("function parameter type"));
                };
                self.well_formed(&p)?;
                if let Some(ret) = &r.ret {
                    self.well_formed(ret)?;
                }
                let (f, x) = (r.f.clone(), r.x.clone());
                match (&f, r.ret.clone()) {
                    (_, Some(ret)) => {
                        let fty = Type::arrow(p.clone(), ret.clone());
                        self.scoped(&[(&f, fty.clone()), (&x, p)], |cx| cx.check(&mut r.body, &ret))?;
                        Ok(fty)
                    }
                    (Binder::Anon, None) => {
                        let ret = self.scoped(&[(&x, p.clone())], |cx| cx.synth(&mut r.body))?;
                        Ok(Type::arrow(p, ret))
                    }
                    (Binder::Named(_), None) => Err(TypeError::MissingAnnotation("recursive function result type")),
                }
            }
            Expr::App(head, arg) => {
                if let Expr::Rec(r) = &mut **head {
                    if is_let_head(r) {
                        let at = self.synth(arg)?;
                        let x = r.x.clone();
                        return self.scoped(&[(&x, at)], |cx| cx.synth(&mut r.body));
                    }
                }
                let ft = self.synth(head)?;
                let Type::Arrow(p, q) = ft else {
                    return Err(shape("a function type", &ft));
                };
                self.check(arg, &p)?;
                Ok(*q)
            }
            Expr::If(c, t, el) => {
                self.check(c, &Type::Bool)?;
                let a = self.synth(t)?;
                let b = self.synth(el)?;
                join(&a, &b)
            }
            Expr::Pair(a, b) => Ok(Type::prod(self.synth(a)?, self.synth(b)?)),
            Expr::Fst(p) => match self.synth(p)? {
                Type::Prod(a, _) => Ok(*a),
                other => Err(shape("a product type", &other)),
            },
            Expr::Snd(p) => match self.synth(p)? {
                Type::Prod(_, b) => Ok(*b),
                other => Err(shape("a product type", &other)),
            },
            Expr::Inl(ann, v) => self.injection(ann, v, true),
            Expr::Inr(ann, v) => self.injection(ann, v, false),
            Expr::Match(s, x, l, y, r) => {
                let st = self.synth(s)?;
                let Type::Sum(a, b) = st else {
                    return Err(shape("a sum type", &st));
                };
                let (x, y) = (x.clone(), y.clone());
                let lt = self.scoped(&[(&x, *a)], |cx| cx.synth(l))?;
                let rt = self.scoped(&[(&y, *b)], |cx| cx.synth(r))?;
                join(&lt, &rt)
            }
            Expr::Alloc(ann, v) => {
                let t = match ann.clone() {
                    Some(t) => {
                        self.well_formed(&t)?;
                        self.check(v, &t)?;
                        t
                    }
                    None => {
                        let t = widen(&self.synth(v)?);
                        *ann = Some(t.clone());
                        t
                    }
                };
                Ok(Type::reference(t))
            }
            Expr::Load(l) => match self.synth(l)? {
                Type::Ref(t) => Ok(*t),
                other => Err(shape("a reference type", &other)),
            },
            Expr::Store(l, v) => match self.synth(l)? {
                Type::Ref(t) => {
                    self.check(v, &t)?;
                    Ok(Type::Unit)
                }
                other => Err(shape("a reference type", &other)),
            },
            Expr::Fold(ann, v) => {
                let Some(m) = ann.clone() else {
                    return Err(TypeError::MissingAnnotation("recursive type on fold"));
                };
                self.well_formed(&m)?;
                let body = unroll(&m)?;
                self.check(v, &body)?;
                Ok(m)
            }
            Expr::Unfold(v) => {
                let t = self.synth(v)?;
                unroll(&t)
            }
            Expr::TLam(a, body) => {
                let Some(a) = a.clone() else {
                    return Err(TypeError::MissingAnnotation("type variable on tfun"));
                };
                let bt = self.with_tyvar(&a, |cx| cx.synth(body))?;
                Ok(Type::Forall(a, Box::new(bt)))
            }
            Expr::TApp(f, arg) => {
                let Some(arg) = arg.clone() else {
                    return Err(TypeError::MissingAnnotation("type argument"));
                };
                self.well_formed(&arg)?;
                match self.synth(f)? {
                    Type::Forall(a, body) => Ok(body.subst(&a, &arg)),
                    other => Err(shape("a universal type", &other)),
                }
            }
            Expr::Pack(ann, v) => {
                let Some(ann) = ann.clone() else {
                    return Err(TypeError::MissingAnnotation("witness and type on pack"));
                };
                self.well_formed(&ann.witness)?;
                self.well_formed(&ann.ty)?;
                let Type::Exists(a, body) = &ann.ty else {
                    return Err(TypeError::BadAnnotation(format!(
                        "pack annotated with non-existential {}",
                        ann.ty
                    )));
                };
                self.check(v, &body.subst(a, &ann.witness))?;
                Ok(ann.ty)
            }
            Expr::Unpack(e1, a, x, e2) => {
                let Some(a) = a.clone() else {
                    return Err(TypeError::MissingAnnotation("type variable on unpack"));
                };
                let et = self.synth(e1)?;
                let Type::Exists(b, body) = et else {
                    return Err(shape("an existential type", &et));
                };
                let opened = body.subst(&b, &Type::Var(a.clone()));
                let x = x.clone();
                let t = self.with_tyvar(&a, |cx| cx.scoped(&[(&x, opened)], |cx| cx.synth(e2)))?;
                if t.free_vars().contains(&a) {
                    return Err(TypeError::Escape(a));
                }
                Ok(t)
            }
            Expr::AllocTape(n) => {
                self.check(n, &Type::Nat)?;
                Ok(Type::Tape)
            }
            Expr::Rand(n, l) => {
                self.check(n, &Type::Nat)?;
                match self.synth(l)? {
                    Type::Unit | Type::Tape => Ok(Type::Nat),
                    other => Err(TypeError::RandLabel(other.to_string())),
                }
            }
            Expr::BinOp(op, a, b) => {
                let op = *op;
                self.binop(op, a, b)
            }
        }
    }

    fn injection(&mut self, ann: &Option<Type>, v: &mut Expr, left: bool) -> R<Type> {
        let Some(t) = ann.clone() else {
            return Err(TypeError::MissingAnnotation("sum type on inl/inr"));
        };
        self.well_formed(&t)?;
        let Type::Sum(a, b) = &t else {
            return Err(TypeError::BadAnnotation(format!("inl/inr annotated with non-sum {t}")));
        };
        self.check(v, if left { a } else { b })?;
        Ok(t)
    }

    fn binop(&mut self, op: BinOp, a: &mut Expr, b: &mut Expr) -> R<Type> {
        match op {
            BinOp::Add | BinOp::Mul | BinOp::Mod => {
                let ta = self.synth(a)?;
                let tb = self.synth(b)?;
                match (&ta, &tb) {
                    (Type::Nat, Type::Nat) => Ok(Type::Nat),
                    _ if is_subtype(&ta, &Type::Int) && is_subtype(&tb, &Type::Int) => Ok(Type::Int),
                    _ if is_subtype(&ta, &Type::Int) => Err(mismatch(&Type::Int, &tb)),
                    _ => Err(mismatch(&Type::Int, &ta)),
                }
            }
            BinOp::Sub => {
                self.check(a, &Type::Int)?;
                self.check(b, &Type::Int)?;
                Ok(Type::Int)
            }
            BinOp::Lt | BinOp::Le => {
                self.check(a, &Type::Int)?;
                self.check(b, &Type::Int)?;
                Ok(Type::Bool)
            }
            BinOp::And | BinOp::Or => {
                self.check(a, &Type::Bool)?;
                self.check(b, &Type::Bool)?;
                Ok(Type::Bool)
            }
            BinOp::Eq => {
                let ta = self.synth(a)?;
                let tb = self.synth(b)?;
                let t = join(&ta, &tb)?;
                match t {
                    Type::Int | Type::Nat | Type::Bool | Type::Unit | Type::Ref(_) | Type::Tape => Ok(Type::Bool),
                    other => Err(shape("a type with decidable equality", &other)),
                }
            }
        }
    }
}
