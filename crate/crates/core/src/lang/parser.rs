//! Recursive-descent parser for the `.tl` concrete syntax.
//!
//! ```text
//! expr  ::= let b = expr in expr
//!         | fun param+ [: tsum] -> expr | rec b param [: tsum] -> expr
//!         | if expr then expr else expr
//!         | match expr with inl b -> expr | inr b -> expr end
//!         | unpack expr as <'a, b> in expr | tfun 'a -> expr
//!         | seq
//! seq   ::= store [; expr]
//! store ::= or [<- or]
//! or    ::= and {|| and}          and ::= cmp {&& cmp}
//! cmp   ::= add [(= | < | <=) add]
//! add   ::= mul {(+ | -) mul}     mul ::= unary {(* | mod) unary}
//! unary ::= - INT | - unary | app
//! app   ::= (prefix atom | atom) {atom | [ty]}
//! atom  ::= INT | true | false | x | () | (expr {, expr}) | rand(expr [, expr])
//!         | loc(INT) | label(INT)
//! ```
//!
//! The right operand of a binary operator may also be one of the keyword
//! forms of `expr`, which then extends as far right as possible.

use super::error::{SyntaxError, SyntaxErrorKind};
use super::lexer::{tokenize, Kw, Spanned, Tok};
use super::syntax::{Binder, BinOp, Expr, Label, Loc, PackAnn, RecFn, Type};

type R<T> = Result<T, SyntaxError>;

pub fn parse_expr(src: &str) -> R<Expr> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    p.expect(Tok::Eof)?;
    Ok(e)
}

pub fn parse_type(src: &str) -> R<Type> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.expect(Tok::Eof)?;
    Ok(t)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    expected: Vec<String>,
}

impl Parser {
    fn new(src: &str) -> R<Parser> {
        Ok(Parser {
            toks: tokenize(src)?,
            pos: 0,
            expected: Vec::new(),
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        self.expected.clear();
        t
    }

    fn at(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            true
        } else {
            self.expected.push(t.to_string());
            false
        }
    }

    fn eat(&mut self, t: Tok) -> bool {
        if self.at(&t) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: Tok) -> R<()> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error())
        }
    }

    fn hint(&mut self, what: &str) {
        self.expected.push(what.to_string());
    }

    fn error(&mut self) -> SyntaxError {
        let here = &self.toks[self.pos];
        let mut expected = std::mem::take(&mut self.expected);
        expected.sort();
        expected.dedup();
        SyntaxError {
            kind: SyntaxErrorKind::Syntax,
            line: here.line,
            col: here.col,
            message: format!("unexpected {}", here.tok),
            expected,
        }
    }

    // ---- types ----

    fn ty(&mut self) -> R<Type> {
        let quant = match self.peek() {
            Tok::Kw(Kw::Forall) => Some(Type::Forall as fn(String, Box<Type>) -> Type),
            Tok::Kw(Kw::Exists) => Some(Type::Exists as fn(String, Box<Type>) -> Type),
            Tok::Kw(Kw::Mu) => Some(Type::Mu as fn(String, Box<Type>) -> Type),
            _ => None,
        };
        if let Some(make) = quant {
            self.bump();
            let a = self.tyvar()?;
            self.expect(Tok::Dot)?;
            let body = self.ty()?;
            return Ok(make(a, Box::new(body)));
        }
        self.hint("`forall`");
        self.hint("`exists`");
        self.hint("`mu`");
        let lhs = self.ty_sum()?;
        if self.eat(Tok::Arrow) {
            Ok(Type::arrow(lhs, self.ty()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_sum(&mut self) -> R<Type> {
        let lhs = self.ty_prod()?;
        if self.eat(Tok::Plus) {
            Ok(Type::sum(lhs, self.ty_sum()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_prod(&mut self) -> R<Type> {
        let lhs = self.ty_prefix()?;
        if self.eat(Tok::Star) {
            Ok(Type::prod(lhs, self.ty_prod()?))
        } else {
            Ok(lhs)
        }
    }

    fn ty_prefix(&mut self) -> R<Type> {
        if self.eat(Tok::Kw(Kw::Ref)) {
            return Ok(Type::reference(self.ty_prefix()?));
        }
        let t = match self.peek().clone() {
            Tok::Kw(Kw::Unit) => Type::Unit,
            Tok::Kw(Kw::Bool) => Type::Bool,
            Tok::Kw(Kw::Nat) => Type::Nat,
            Tok::Kw(Kw::Int) => Type::Int,
            Tok::Kw(Kw::Tape) => Type::Tape,
            Tok::TyVar(a) => Type::Var(a),
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                return Ok(t);
            }
            _ => {
                self.hint("a type");
                return Err(self.error());
            }
        };
        self.bump();
        Ok(t)
    }

    fn tyvar(&mut self) -> R<String> {
        if let Tok::TyVar(a) = self.peek().clone() {
            self.bump();
            Ok(a)
        } else {
            self.hint("a type variable");
            Err(self.error())
        }
    }

    /// `'a` or `_`.
    fn tyvar_binder(&mut self) -> R<Option<String>> {
        if self.eat(Tok::Underscore) {
            Ok(None)
        } else {
            self.tyvar().map(Some)
        }
    }

    // ---- expressions ----

    fn binder(&mut self) -> R<Binder> {
        match self.peek().clone() {
            Tok::Ident(x) => {
                self.bump();
                Ok(Binder::Named(x))
            }
            Tok::Underscore => {
                self.bump();
                Ok(Binder::Anon)
            }
            _ => {
                self.hint("a binder");
                Err(self.error())
            }
        }
    }

    fn starts_keyword_form(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Kw(Kw::Let | Kw::Fun | Kw::Rec | Kw::If | Kw::Match | Kw::Unpack | Kw::Tfun)
        )
    }

    fn expr(&mut self) -> R<Expr> {
        match self.peek() {
            Tok::Kw(Kw::Let) => self.let_expr(),
            Tok::Kw(Kw::Fun) => self.fun_expr(),
            Tok::Kw(Kw::Rec) => self.rec_expr(),
            Tok::Kw(Kw::If) => {
                self.bump();
                let c = self.expr()?;
                self.expect(Tok::Kw(Kw::Then))?;
                let t = self.expr()?;
                self.expect(Tok::Kw(Kw::Else))?;
                let e = self.expr()?;
                Ok(Expr::if_(c, t, e))
            }
            Tok::Kw(Kw::Match) => {
                self.bump();
                let s = self.expr()?;
                self.expect(Tok::Kw(Kw::With))?;
                // Arms may come in either order.
                let inr_first = *self.peek() == Tok::Kw(Kw::Inr);
                let (first, second) = if inr_first { (Kw::Inr, Kw::Inl) } else { (Kw::Inl, Kw::Inr) };
                self.expect(Tok::Kw(first))?;
                let a = self.binder()?;
                self.expect(Tok::Arrow)?;
                let ea = self.expr()?;
                self.expect(Tok::Bar)?;
                self.expect(Tok::Kw(second))?;
                let b = self.binder()?;
                self.expect(Tok::Arrow)?;
                let eb = self.expr()?;
                self.expect(Tok::Kw(Kw::End))?;
                let ((x, l), (y, r)) = if inr_first { ((b, eb), (a, ea)) } else { ((a, ea), (b, eb)) };
                Ok(Expr::Match(Box::new(s), x, Box::new(l), y, Box::new(r)))
            }
            Tok::Kw(Kw::Unpack) => {
                self.bump();
                let e1 = self.expr()?;
                self.expect(Tok::Kw(Kw::As))?;
                let (a, x) = if self.eat(Tok::Lt) {
                    let a = self.tyvar_binder()?;
                    self.expect(Tok::Comma)?;
                    let x = self.binder()?;
                    self.expect(Tok::Gt)?;
                    (a, x)
                } else {
                    (None, self.binder()?)
                };
                self.expect(Tok::Kw(Kw::In))?;
                let e2 = self.expr()?;
                Ok(Expr::Unpack(Box::new(e1), a, x, Box::new(e2)))
            }
            Tok::Kw(Kw::Tfun) => {
                self.bump();
                let a = self.tyvar_binder()?;
                self.expect(Tok::Arrow)?;
                let body = self.expr()?;
                Ok(Expr::TLam(a, Box::new(body)))
            }
            _ => self.seq(),
        }
    }

    fn let_expr(&mut self) -> R<Expr> {
        self.expect(Tok::Kw(Kw::Let))?;
        let x = self.binder()?;
        self.expect(Tok::Eq)?;
        let bound = self.expr()?;
        self.expect(Tok::Kw(Kw::In))?;
        let body = self.expr()?;
        Ok(Expr::let_(x, bound, body))
    }

    /// `x`, `_`, `(x: t)` or `(_: t)`.
    fn param(&mut self) -> R<(Binder, Option<Type>)> {
        if self.eat(Tok::LParen) {
            let x = self.binder()?;
            self.expect(Tok::Colon)?;
            let t = self.ty()?;
            self.expect(Tok::RParen)?;
            Ok((x, Some(t)))
        } else {
            Ok((self.binder()?, None))
        }
    }

    fn at_param(&mut self) -> bool {
        let yes = matches!(self.peek(), Tok::Ident(_) | Tok::Underscore | Tok::LParen);
        if !yes {
            self.hint("a parameter");
        }
        yes
    }

    fn ret_annotation(&mut self) -> R<Option<Type>> {
        if self.eat(Tok::Colon) {
            Ok(Some(self.ty_sum()?))
        } else {
            Ok(None)
        }
    }

    fn fun_expr(&mut self) -> R<Expr> {
        self.expect(Tok::Kw(Kw::Fun))?;
        let mut params = vec![self.param()?];
        while self.at_param() {
            params.push(self.param()?);
        }
        let ret = self.ret_annotation()?;
        self.expect(Tok::Arrow)?;
        let mut body = self.expr()?;
        let mut ret = ret;
        for (x, param) in params.into_iter().rev() {
            body = Expr::Rec(Box::new(RecFn {
                f: Binder::Anon,
                x,
                param,
                ret: ret.take(),
                body,
            }));
        }
        Ok(body)
    }

    fn rec_expr(&mut self) -> R<Expr> {
        self.expect(Tok::Kw(Kw::Rec))?;
        let f = self.binder()?;
        let (x, param) = self.param()?;
        let ret = self.ret_annotation()?;
        self.expect(Tok::Arrow)?;
        let body = self.expr()?;
        Ok(Expr::Rec(Box::new(RecFn {
            f,
            x,
            param,
            ret,
            body,
        })))
    }

    /// Right operand of a binary operator.
    fn operand(&mut self, level: fn(&mut Parser) -> R<Expr>) -> R<Expr> {
        if self.starts_keyword_form() {
            self.expr()
        } else {
            level(self)
        }
    }

    fn seq(&mut self) -> R<Expr> {
        let first = self.store()?;
        if self.eat(Tok::Semi) {
            let rest = self.expr()?;
            Ok(Expr::let_(Binder::Anon, first, rest))
        } else {
            Ok(first)
        }
    }

    fn store(&mut self) -> R<Expr> {
        let lhs = self.or()?;
        if self.eat(Tok::LArrow) {
            let rhs = self.operand(Parser::or)?;
            Ok(Expr::Store(Box::new(lhs), Box::new(rhs)))
        } else {
            Ok(lhs)
        }
    }

    fn left_assoc(
        &mut self,
        ops: &[(Tok, BinOp)],
        next: fn(&mut Parser) -> R<Expr>,
    ) -> R<Expr> {
        let mut lhs = next(self)?;
        'outer: loop {
            for (t, op) in ops {
                if self.eat(t.clone()) {
                    let rhs = self.operand(next)?;
                    lhs = Expr::binop(*op, lhs, rhs);
                    continue 'outer;
                }
            }
            return Ok(lhs);
        }
    }

    fn or(&mut self) -> R<Expr> {
        self.left_assoc(&[(Tok::OrOr, BinOp::Or)], Parser::and)
    }

    fn and(&mut self) -> R<Expr> {
        self.left_assoc(&[(Tok::AndAnd, BinOp::And)], Parser::cmp)
    }

    fn cmp(&mut self) -> R<Expr> {
        let lhs = self.add()?;
        for (t, op) in [(Tok::Eq, BinOp::Eq), (Tok::Lt, BinOp::Lt), (Tok::Le, BinOp::Le)] {
            if self.eat(t) {
                let rhs = self.operand(Parser::add)?;
                return Ok(Expr::binop(op, lhs, rhs));
            }
        }
        Ok(lhs)
    }

    fn add(&mut self) -> R<Expr> {
        self.left_assoc(&[(Tok::Plus, BinOp::Add), (Tok::Minus, BinOp::Sub)], Parser::mul)
    }

    fn mul(&mut self) -> R<Expr> {
        self.left_assoc(&[(Tok::Star, BinOp::Mul), (Tok::Kw(Kw::Mod), BinOp::Mod)], Parser::unary)
    }

    fn unary(&mut self) -> R<Expr> {
        if self.eat(Tok::Minus) {
            if let Tok::Int(n) = self.peek().clone() {
                self.bump();
                return Ok(Expr::Int(-n));
            }
            let e = self.unary()?;
            return Ok(Expr::binop(BinOp::Sub, Expr::int(0), e));
        }
        self.app()
    }

    fn bracket_type(&mut self) -> R<Option<Type>> {
        if self.eat(Tok::LBracket) {
            let t = self.ty()?;
            self.expect(Tok::RBracket)?;
            Ok(Some(t))
        } else {
            Ok(None)
        }
    }

    fn app(&mut self) -> R<Expr> {
        let mut e = self.app_head()?;
        loop {
            if self.eat(Tok::LBracket) {
                let t = if self.eat(Tok::Underscore) { None } else { Some(self.ty()?) };
                self.expect(Tok::RBracket)?;
                e = Expr::TApp(Box::new(e), t);
            } else if self.starts_atom() {
                let arg = self.atom()?;
                e = Expr::app(e, arg);
            } else {
                return Ok(e);
            }
        }
    }

    fn app_head(&mut self) -> R<Expr> {
        let b = Box::new;
        match self.peek() {
            Tok::Kw(Kw::Fst) => {
                self.bump();
                Ok(Expr::Fst(b(self.atom()?)))
            }
            Tok::Kw(Kw::Snd) => {
                self.bump();
                Ok(Expr::Snd(b(self.atom()?)))
            }
            Tok::Kw(Kw::Unfold) => {
                self.bump();
                Ok(Expr::Unfold(b(self.atom()?)))
            }
            Tok::Bang => {
                self.bump();
                Ok(Expr::Load(b(self.atom()?)))
            }
            Tok::Kw(Kw::AllocTape) => {
                self.bump();
                Ok(Expr::AllocTape(b(self.atom()?)))
            }
            Tok::Kw(Kw::Flip) => {
                self.bump();
                Ok(Expr::flip(self.atom()?))
            }
            Tok::Kw(Kw::Inl) => {
                self.bump();
                let t = self.bracket_type()?;
                Ok(Expr::Inl(t, b(self.atom()?)))
            }
            Tok::Kw(Kw::Inr) => {
                self.bump();
                let t = self.bracket_type()?;
                Ok(Expr::Inr(t, b(self.atom()?)))
            }
            Tok::Kw(Kw::Fold) => {
                self.bump();
                let t = self.bracket_type()?;
                Ok(Expr::Fold(t, b(self.atom()?)))
            }
            Tok::Kw(Kw::Ref) => {
                self.bump();
                let t = self.bracket_type()?;
                Ok(Expr::Alloc(t, b(self.atom()?)))
            }
            Tok::Kw(Kw::Pack) => {
                self.bump();
                let ann = if self.eat(Tok::LBracket) {
                    let witness = self.ty()?;
                    self.expect(Tok::Comma)?;
                    let ty = self.ty()?;
                    self.expect(Tok::RBracket)?;
                    Some(PackAnn { witness, ty })
                } else {
                    None
                };
                Ok(Expr::Pack(ann, b(self.atom()?)))
            }
            _ => self.atom(),
        }
    }

    fn starts_atom(&mut self) -> bool {
        let yes = matches!(
            self.peek(),
            Tok::Int(_)
                | Tok::Ident(_)
                | Tok::LParen
                | Tok::Kw(Kw::True | Kw::False | Kw::Rand | Kw::Loc | Kw::Label)
        );
        if !yes {
            self.hint("an expression");
        }
        yes
    }

    fn index_literal(&mut self) -> R<usize> {
        self.expect(Tok::LParen)?;
        let n = match self.peek().clone() {
            Tok::Int(n) => n,
            _ => {
                self.hint("an integer");
                return Err(self.error());
            }
        };
        let Ok(n) = usize::try_from(&n) else {
            return Err(self.error());
        };
        self.bump();
        self.expect(Tok::RParen)?;
        Ok(n)
    }

    fn atom(&mut self) -> R<Expr> {
        let e = match self.peek().clone() {
            Tok::Int(n) => Expr::Int(n),
            Tok::Kw(Kw::True) => Expr::Bool(true),
            Tok::Kw(Kw::False) => Expr::Bool(false),
            Tok::Ident(x) => Expr::Var(x),
            Tok::Kw(Kw::Loc) => {
                self.bump();
                return Ok(Expr::Loc(Loc(self.index_literal()?)));
            }
            Tok::Kw(Kw::Label) => {
                self.bump();
                return Ok(Expr::Label(Label(self.index_literal()?)));
            }
            Tok::Kw(Kw::Rand) => {
                self.bump();
                self.expect(Tok::LParen)?;
                let bound = self.expr()?;
                let label = if self.eat(Tok::Comma) { self.expr()? } else { Expr::Unit };
                self.expect(Tok::RParen)?;
                return Ok(Expr::rand(bound, label));
            }
            Tok::LParen => {
                self.bump();
                if self.eat(Tok::RParen) {
                    return Ok(Expr::Unit);
                }
                let mut items = vec![self.expr()?];
                while self.eat(Tok::Comma) {
                    items.push(self.expr()?);
                }
                self.expect(Tok::RParen)?;
                let last = items.pop().expect("at least one item");
                return Ok(items.into_iter().rev().fold(last, |acc, x| Expr::pair(x, acc)));
            }
            _ => {
                self.hint("an expression");
                return Err(self.error());
            }
        };
        self.bump();
        Ok(e)
    }
}
