//! Surface language: syntax, parsing, printing, typing and evaluation
//! contexts.

pub mod ectx;
pub mod error;
pub mod lexer;
pub mod parser;
pub mod printer;
pub mod subst;
pub mod syntax;
pub mod typeck;

pub use ectx::{decompose, plug, Decomposition, Frame};
pub use error::{SyntaxError, SyntaxErrorKind, TypeError};
pub use parser::{parse_expr, parse_type};
pub use subst::{subst, subst_closed, subst_type};
pub use syntax::{erase, Binder, BinOp, Expr, Label, Loc, PackAnn, RecFn, Type, Val};
pub use typeck::{elaborate, is_subtype, typecheck, typecheck_closed, StoreTyping, TypeCtx};

/// Parses and typechecks a closed program, returning the elaborated
/// annotated term and its type.
pub fn load(src: &str) -> Result<(Expr, Type), LoadError> {
    let e = parse_expr(src)?;
    let (e, t) = elaborate(&TypeCtx::default(), &e)?;
    Ok((e, t))
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("type error: {0}")]
    Type(#[from] TypeError),
}
