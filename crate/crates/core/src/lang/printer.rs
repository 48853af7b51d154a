//! Pretty-printer producing text the parser maps back to the same tree.

use std::fmt::{self, Display, Formatter, Write};

use num_traits::Signed;

use super::syntax::{Binder, BinOp, Expr, RecFn, Type};

impl Display for Type {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_type(f, self, 0)
    }
}

// Type levels: 0 arrow/quantifier, 1 sum, 2 product, 3 ref, 4 atom.
fn write_type(f: &mut Formatter<'_>, t: &Type, level: u8) -> fmt::Result {
    let needs = |own: u8| level > own;
    let open = |f: &mut Formatter<'_>, p: bool| if p { f.write_char('(') } else { Ok(()) };
    let close = |f: &mut Formatter<'_>, p: bool| if p { f.write_char(')') } else { Ok(()) };
    match t {
        Type::Var(a) => write!(f, "'{a}"),
        Type::Unit => f.write_str("unit"),
        Type::Bool => f.write_str("bool"),
        Type::Nat => f.write_str("nat"),
        Type::Int => f.write_str("int"),
        Type::Tape => f.write_str("tape"),
        Type::Forall(a, body) | Type::Exists(a, body) | Type::Mu(a, body) => {
            let kw = match t {
                Type::Forall(..) => "forall",
                Type::Exists(..) => "exists",
                _ => "mu",
            };
            let p = needs(0);
            open(f, p)?;
            write!(f, "{kw} '{a}. ")?;
            write_type(f, body, 0)?;
            close(f, p)
        }
        Type::Arrow(a, b) => {
            let p = needs(0);
            open(f, p)?;
            write_type(f, a, 1)?;
            f.write_str(" -> ")?;
            write_type(f, b, 0)?;
            close(f, p)
        }
        Type::Sum(a, b) => {
            let p = needs(1);
            open(f, p)?;
            write_type(f, a, 2)?;
            f.write_str(" + ")?;
            write_type(f, b, 1)?;
            close(f, p)
        }
        Type::Prod(a, b) => {
            let p = needs(2);
            open(f, p)?;
            write_type(f, a, 3)?;
            f.write_str(" * ")?;
            write_type(f, b, 2)?;
            close(f, p)
        }
        Type::Ref(a) => {
            let p = needs(3);
            open(f, p)?;
            f.write_str("ref ")?;
            write_type(f, a, 3)?;
            close(f, p)
        }
    }
}

impl Display for Binder {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        match self {
            Binder::Anon => f.write_char('_'),
            Binder::Named(x) => f.write_str(x),
        }
    }
}

impl Display for Expr {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write_expr(f, self, TOP)
    }
}

const TOP: u8 = 0;
const STORE: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const CMP: u8 = 5;
const ADD: u8 = 6;
const MUL: u8 = 7;
const UNARY: u8 = 8;
const APP: u8 = 9;
const ATOM: u8 = 10;

fn is_let_head(e: &Expr) -> Option<&RecFn> {
    match e {
        Expr::Rec(r) if r.f == Binder::Anon && r.param.is_none() && r.ret.is_none() => Some(r),
        _ => None,
    }
}

fn binop_levels(op: BinOp) -> (u8, u8, u8) {
    match op {
        BinOp::Or => (OR, OR, AND),
        BinOp::And => (AND, AND, CMP),
        BinOp::Eq | BinOp::Lt | BinOp::Le => (CMP, ADD, ADD),
        BinOp::Add | BinOp::Sub => (ADD, ADD, MUL),
        BinOp::Mul | BinOp::Mod => (MUL, MUL, UNARY),
    }
}

fn write_expr(f: &mut Formatter<'_>, e: &Expr, level: u8) -> fmt::Result {
    let paren = |f: &mut Formatter<'_>, own: u8, body: &dyn Fn(&mut Formatter<'_>) -> fmt::Result| {
        if level > own {
            f.write_char('(')?;
            body(f)?;
            f.write_char(')')
        } else {
            body(f)
        }
    };
    let prefix = |f: &mut Formatter<'_>, kw: &str, inner: &Expr| {
        paren(f, APP, &|f| {
            f.write_str(kw)?;
            f.write_char(' ')?;
            write_expr(f, inner, ATOM)
        })
    };
    let annotated = |f: &mut Formatter<'_>, kw: &str, ann: &Option<Type>, inner: &Expr| {
        paren(f, APP, &|f| {
            f.write_str(kw)?;
            if let Some(t) = ann {
                write!(f, "[{t}]")?;
            }
            f.write_char(' ')?;
            write_expr(f, inner, ATOM)
        })
    };
    match e {
        Expr::Var(x) => f.write_str(x),
        Expr::Unit => f.write_str("()"),
        Expr::Bool(b) => write!(f, "{b}"),
        Expr::Int(n) if n.is_negative() => write!(f, "({n})"),
        Expr::Int(n) => write!(f, "{n}"),
        Expr::Loc(l) => write!(f, "loc({})", l.0),
        Expr::Label(l) => write!(f, "label({})", l.0),
        Expr::Rec(r) => paren(f, TOP, &|f| {
            match &r.f {
                Binder::Anon => f.write_str("fun ")?,
                named => write!(f, "rec {named} ")?,
            }
            match &r.param {
                Some(t) => write!(f, "({}: {t})", r.x)?,
                None => write!(f, "{}", r.x)?,
            }
            if let Some(t) = &r.ret {
                f.write_str(" : ")?;
                write_type(f, t, 1)?;
            }
            f.write_str(" -> ")?;
            write_expr(f, &r.body, TOP)
        }),
        Expr::App(head, arg) => {
            if let Some(r) = is_let_head(head) {
                return paren(f, TOP, &|f| {
                    write!(f, "let {} = ", r.x)?;
                    write_expr(f, arg, TOP)?;
                    f.write_str(" in ")?;
                    write_expr(f, &r.body, TOP)
                });
            }
            paren(f, APP, &|f| {
                let head_level = if is_app_chain(head) { APP } else { ATOM };
                write_expr(f, head, head_level)?;
                f.write_char(' ')?;
                write_expr(f, arg, ATOM)
            })
        }
        Expr::TApp(head, t) => paren(f, APP, &|f| {
            let head_level = if is_app_chain(head) { APP } else { ATOM };
            write_expr(f, head, head_level)?;
            match t {
                Some(t) => write!(f, " [{t}]"),
                None => f.write_str(" [_]"),
            }
        }),
        Expr::If(c, t, el) => paren(f, TOP, &|f| {
            f.write_str("if ")?;
            write_expr(f, c, TOP)?;
            f.write_str(" then ")?;
            write_expr(f, t, TOP)?;
            f.write_str(" else ")?;
            write_expr(f, el, TOP)
        }),
        Expr::Pair(..) => {
            f.write_char('(')?;
            let mut cur = e;
            let mut first = true;
            while let Expr::Pair(a, b) = cur {
                if !first {
                    f.write_str(", ")?;
                }
                first = false;
                write_expr(f, a, TOP)?;
                cur = b;
            }
            f.write_str(", ")?;
            write_expr(f, cur, TOP)?;
            f.write_char(')')
        }
        Expr::Fst(a) => prefix(f, "fst", a),
        Expr::Snd(a) => prefix(f, "snd", a),
        Expr::Unfold(a) => prefix(f, "unfold", a),
        Expr::AllocTape(a) => prefix(f, "alloctape", a),
        Expr::Load(a) => paren(f, APP, &|f| {
            f.write_char('!')?;
            write_expr(f, a, ATOM)
        }),
        Expr::Inl(t, a) => annotated(f, "inl", t, a),
        Expr::Inr(t, a) => annotated(f, "inr", t, a),
        Expr::Fold(t, a) => annotated(f, "fold", t, a),
        Expr::Alloc(t, a) => annotated(f, "ref", t, a),
        Expr::Pack(ann, a) => paren(f, APP, &|f| {
            f.write_str("pack")?;
            if let Some(p) = ann {
                write!(f, "[{}, {}]", p.witness, p.ty)?;
            }
            f.write_char(' ')?;
            write_expr(f, a, ATOM)
        }),
        Expr::Match(s, x, l, y, r) => paren(f, TOP, &|f| {
            f.write_str("match ")?;
            write_expr(f, s, TOP)?;
            write!(f, " with inl {x} -> ")?;
            write_expr(f, l, TOP)?;
            write!(f, " | inr {y} -> ")?;
            write_expr(f, r, TOP)?;
            f.write_str(" end")
        }),
        Expr::Store(l, v) => paren(f, STORE, &|f| {
            write_expr(f, l, OR)?;
            f.write_str(" <- ")?;
            write_expr(f, v, OR)
        }),
        Expr::TLam(a, body) => paren(f, TOP, &|f| {
            match a {
                Some(a) => write!(f, "tfun '{a} -> ")?,
                None => f.write_str("tfun _ -> ")?,
            }
            write_expr(f, body, TOP)
        }),
        Expr::Unpack(e1, a, x, e2) => paren(f, TOP, &|f| {
            f.write_str("unpack ")?;
            write_expr(f, e1, TOP)?;
            match a {
                Some(a) => write!(f, " as <'{a}, {x}> in ")?,
                None => write!(f, " as {x} in ")?,
            }
            write_expr(f, e2, TOP)
        }),
        Expr::Rand(n, l) => {
            f.write_str("rand(")?;
            write_expr(f, n, TOP)?;
            f.write_str(", ")?;
            write_expr(f, l, TOP)?;
            f.write_char(')')
        }
        Expr::BinOp(op, a, b) => {
            let (own, left, right) = binop_levels(*op);
            paren(f, own, &|f| {
                write_expr(f, a, left)?;
                write!(f, " {} ", op.symbol())?;
                write_expr(f, b, right)
            })
        }
    }
}

/// Whether `e` may head an application without parentheses.
fn is_app_chain(e: &Expr) -> bool {
    match e {
        Expr::App(h, _) => is_let_head(h).is_none(),
        Expr::TApp(..)
        | Expr::Fst(_)
        | Expr::Snd(_)
        | Expr::Unfold(_)
        | Expr::Load(_)
        | Expr::AllocTape(_)
        | Expr::Inl(..)
        | Expr::Inr(..)
        | Expr::Fold(..)
        | Expr::Alloc(..)
        | Expr::Pack(..) => true,
        _ => false,
    }
}
