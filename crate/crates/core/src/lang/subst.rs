//! Substitution of closed terms for variables, and of types for type
//! variables inside annotations.

use super::syntax::{fresh_name, Binder, Expr, PackAnn, RecFn, Type};

/// Substitutes the value `v` for free occurrences of `x` in `e`.
///
/// `v` must be closed, so no capture can occur and binders are only checked
/// for shadowing.
pub fn subst(e: &Expr, x: &str, v: &Expr) -> Expr {
    debug_assert!(v.is_closed(), "substituted term must be closed");
    subst_closed(e, x, v)
}

/// Like [`subst`] but for any closed expression, not only values. Used to
/// plug programs into one-hole contexts.
pub fn subst_closed(e: &Expr, x: &str, v: &Expr) -> Expr {
    let go = |e: &Expr| Box::new(subst_closed(e, x, v));
    let under = |b: &Binder, e: &Expr| {
        if b.binds(x) {
            Box::new(e.clone())
        } else {
            go(e)
        }
    };
    match e {
        Expr::Var(y) if y == x => v.clone(),
        Expr::Var(_) | Expr::Unit | Expr::Bool(_) | Expr::Int(_) | Expr::Loc(_) | Expr::Label(_) => {
            e.clone()
        }
        Expr::Rec(r) => {
            if r.f.binds(x) || r.x.binds(x) {
                e.clone()
            } else {
                Expr::Rec(Box::new(RecFn {
                    f: r.f.clone(),
                    x: r.x.clone(),
                    param: r.param.clone(),
                    ret: r.ret.clone(),
                    body: subst_closed(&r.body, x, v),
                }))
            }
        }
        Expr::App(f, a) => Expr::App(go(f), go(a)),
        Expr::If(c, t, el) => Expr::If(go(c), go(t), go(el)),
        Expr::Pair(a, b) => Expr::Pair(go(a), go(b)),
        Expr::Fst(a) => Expr::Fst(go(a)),
        Expr::Snd(a) => Expr::Snd(go(a)),
        Expr::Inl(t, a) => Expr::Inl(t.clone(), go(a)),
        Expr::Inr(t, a) => Expr::Inr(t.clone(), go(a)),
        Expr::Match(s, y, l, z, r) => Expr::Match(go(s), y.clone(), under(y, l), z.clone(), under(z, r)),
        Expr::Alloc(t, a) => Expr::Alloc(t.clone(), go(a)),
        Expr::Load(a) => Expr::Load(go(a)),
        Expr::Store(a, b) => Expr::Store(go(a), go(b)),
        Expr::Fold(t, a) => Expr::Fold(t.clone(), go(a)),
        Expr::Unfold(a) => Expr::Unfold(go(a)),
        Expr::TLam(t, a) => Expr::TLam(t.clone(), go(a)),
        Expr::TApp(a, t) => Expr::TApp(go(a), t.clone()),
        Expr::Pack(t, a) => Expr::Pack(t.clone(), go(a)),
        Expr::Unpack(a, t, y, b) => Expr::Unpack(go(a), t.clone(), y.clone(), under(y, b)),
        Expr::AllocTape(a) => Expr::AllocTape(go(a)),
        Expr::Rand(a, b) => Expr::Rand(go(a), go(b)),
        Expr::BinOp(op, a, b) => Expr::BinOp(*op, go(a), go(b)),
    }
}

/// Substitutes `ty` for the type variable `var` in every annotation of `e`,
/// respecting the type binders of `tfun` and `unpack`.
pub fn subst_type(e: &Expr, var: &str, ty: &Type) -> Expr {
    let go = |e: &Expr| Box::new(subst_type(e, var, ty));
    let t = |a: &Option<Type>| a.as_ref().map(|a| a.subst(var, ty));
    match e {
        Expr::Var(_) | Expr::Unit | Expr::Bool(_) | Expr::Int(_) | Expr::Loc(_) | Expr::Label(_) => {
            e.clone()
        }
        Expr::Rec(r) => Expr::Rec(Box::new(RecFn {
            f: r.f.clone(),
            x: r.x.clone(),
            param: t(&r.param),
            ret: t(&r.ret),
            body: subst_type(&r.body, var, ty),
        })),
        Expr::App(f, a) => Expr::App(go(f), go(a)),
        Expr::If(c, th, el) => Expr::If(go(c), go(th), go(el)),
        Expr::Pair(a, b) => Expr::Pair(go(a), go(b)),
        Expr::Fst(a) => Expr::Fst(go(a)),
        Expr::Snd(a) => Expr::Snd(go(a)),
        Expr::Inl(a, x) => Expr::Inl(t(a), go(x)),
        Expr::Inr(a, x) => Expr::Inr(t(a), go(x)),
        Expr::Match(s, y, l, z, r) => Expr::Match(go(s), y.clone(), go(l), z.clone(), go(r)),
        Expr::Alloc(a, x) => Expr::Alloc(t(a), go(x)),
        Expr::Load(a) => Expr::Load(go(a)),
        Expr::Store(a, b) => Expr::Store(go(a), go(b)),
        Expr::Fold(a, x) => Expr::Fold(t(a), go(x)),
        Expr::Unfold(a) => Expr::Unfold(go(a)),
        Expr::TLam(Some(a), body) => {
            if a == var {
                return e.clone();
            }
            let (a, body) = avoid_capture(a, body, var, ty);
            Expr::TLam(Some(a), Box::new(subst_type(&body, var, ty)))
        }
        Expr::TLam(None, body) => Expr::TLam(None, go(body)),
        Expr::TApp(a, arg) => Expr::TApp(go(a), t(arg)),
        Expr::Pack(ann, x) => Expr::Pack(
            ann.as_ref().map(|p| PackAnn {
                witness: p.witness.subst(var, ty),
                ty: p.ty.subst(var, ty),
            }),
            go(x),
        ),
        Expr::Unpack(e1, Some(a), y, e2) => {
            let e1 = go(e1);
            if a == var {
                return Expr::Unpack(e1, Some(a.clone()), y.clone(), e2.clone());
            }
            let (a, e2) = avoid_capture(a, e2, var, ty);
            Expr::Unpack(e1, Some(a), y.clone(), Box::new(subst_type(&e2, var, ty)))
        }
        Expr::Unpack(e1, None, y, e2) => Expr::Unpack(go(e1), None, y.clone(), go(e2)),
        Expr::AllocTape(a) => Expr::AllocTape(go(a)),
        Expr::Rand(a, b) => Expr::Rand(go(a), go(b)),
        Expr::BinOp(op, a, b) => Expr::BinOp(*op, go(a), go(b)),
    }
}

fn avoid_capture(binder: &str, body: &Expr, var: &str, ty: &Type) -> (String, Expr) {
    let free = ty.free_vars();
    if !free.contains(binder) {
        return (binder.to_string(), body.clone());
    }
    let mut avoid = free;
    avoid.insert(var.to_string());
    collect_type_names(body, &mut avoid);
    let fresh = fresh_name(binder, &avoid);
    let renamed = subst_type(body, binder, &Type::Var(fresh.clone()));
    (fresh, renamed)
}

fn collect_type_names(e: &Expr, out: &mut std::collections::BTreeSet<String>) {
    let mut add = |t: &Option<Type>| {
        if let Some(t) = t {
            out.extend(t.free_vars());
        }
    };
    match e {
        Expr::Rec(r) => {
            add(&r.param);
            add(&r.ret);
        }
        Expr::Inl(a, _) | Expr::Inr(a, _) | Expr::Alloc(a, _) | Expr::Fold(a, _) | Expr::TApp(_, a) => {
            add(a)
        }
        Expr::Pack(Some(p), _) => {
            out.extend(p.witness.free_vars());
            out.extend(p.ty.free_vars());
        }
        Expr::TLam(Some(a), _) | Expr::Unpack(_, Some(a), _, _) => {
            out.insert(a.clone());
        }
        _ => {}
    }
    for c in e.children() {
        collect_type_names(c, out);
    }
}
