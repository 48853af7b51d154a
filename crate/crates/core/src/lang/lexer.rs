use std::fmt;

use num_bigint::BigInt;

use super::error::SyntaxError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    /// `'a`, stored without the quote.
    TyVar(String),
    Int(BigInt),
    Kw(Kw),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Colon,
    Semi,
    Dot,
    Bar,
    Underscore,
    Arrow,
    LArrow,
    Bang,
    Plus,
    Minus,
    Star,
    Eq,
    Lt,
    Le,
    Gt,
    AndAnd,
    OrOr,
    Eof,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kw {
    Let,
    In,
    Fun,
    Rec,
    If,
    Then,
    Else,
    Match,
    With,
    End,
    Inl,
    Inr,
    Fst,
    Snd,
    Ref,
    Fold,
    Unfold,
    Tfun,
    Pack,
    Unpack,
    As,
    AllocTape,
    Rand,
    Flip,
    True,
    False,
    Mod,
    Forall,
    Exists,
    Mu,
    Unit,
    Bool,
    Nat,
    Int,
    Tape,
    Loc,
    Label,
}

const KEYWORDS: &[(&str, Kw)] = &[
    ("let", Kw::Let),
    ("in", Kw::In),
    ("fun", Kw::Fun),
    ("rec", Kw::Rec),
    ("if", Kw::If),
    ("then", Kw::Then),
    ("else", Kw::Else),
    ("match", Kw::Match),
    ("with", Kw::With),
    ("end", Kw::End),
    ("inl", Kw::Inl),
    ("inr", Kw::Inr),
    ("fst", Kw::Fst),
    ("snd", Kw::Snd),
    ("ref", Kw::Ref),
    ("fold", Kw::Fold),
    ("unfold", Kw::Unfold),
    ("tfun", Kw::Tfun),
    ("pack", Kw::Pack),
    ("unpack", Kw::Unpack),
    ("as", Kw::As),
    ("alloctape", Kw::AllocTape),
    ("rand", Kw::Rand),
    ("flip", Kw::Flip),
    ("true", Kw::True),
    ("false", Kw::False),
    ("mod", Kw::Mod),
    ("forall", Kw::Forall),
    ("exists", Kw::Exists),
    ("mu", Kw::Mu),
    ("unit", Kw::Unit),
    ("bool", Kw::Bool),
    ("nat", Kw::Nat),
    ("int", Kw::Int),
    ("tape", Kw::Tape),
    ("loc", Kw::Loc),
    ("label", Kw::Label),
];

impl Kw {
    pub fn text(self) -> &'static str {
        KEYWORDS
            .iter()
            .find(|(_, k)| *k == self)
            .map(|(s, _)| *s)
            .expect("every keyword is listed")
    }
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(x) => return write!(f, "identifier `{x}`"),
            Tok::TyVar(a) => return write!(f, "type variable `'{a}`"),
            Tok::Int(n) => return write!(f, "integer `{n}`"),
            Tok::Kw(k) => return write!(f, "`{}`", k.text()),
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Dot => ".",
            Tok::Bar => "|",
            Tok::Underscore => "_",
            Tok::Arrow => "->",
            Tok::LArrow => "<-",
            Tok::Bang => "!",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Eq => "=",
            Tok::Lt => "<",
            Tok::Le => "<=",
            Tok::Gt => ">",
            Tok::AndAnd => "&&",
            Tok::OrOr => "||",
            Tok::Eof => return f.write_str("end of input"),
        };
        write!(f, "`{s}`")
    }
}

/// A token with its 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

pub fn tokenize(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i, &mut col);
            }
            continue;
        }
        let next = chars.get(i + 1).copied();
        let two = |a: char, b: char| c == a && next == Some(b);
        let tok = if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Spanned {
                tok: Tok::Int(text.parse().expect("digits parse as an integer")),
                line: start_line,
                col: start_col,
            });
            continue;
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                advance(1, &mut i, &mut col);
            }
            let text: String = chars[start..i].iter().collect();
            let tok = if text == "_" {
                Tok::Underscore
            } else if let Some((_, k)) = KEYWORDS.iter().find(|(s, _)| *s == text) {
                Tok::Kw(*k)
            } else {
                Tok::Ident(text)
            };
            out.push(Spanned {
                tok,
                line: start_line,
                col: start_col,
            });
            continue;
        } else if c == '\'' {
            advance(1, &mut i, &mut col);
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                advance(1, &mut i, &mut col);
            }
            if start == i {
                return Err(SyntaxError::lexical(start_line, start_col, "expected a type variable name after `'`"));
            }
            out.push(Spanned {
                tok: Tok::TyVar(chars[start..i].iter().collect()),
                line: start_line,
                col: start_col,
            });
            continue;
        } else if two('-', '>') {
            (Tok::Arrow, 2)
        } else if two('<', '-') {
            (Tok::LArrow, 2)
        } else if two('<', '=') {
            (Tok::Le, 2)
        } else if two('&', '&') {
            (Tok::AndAnd, 2)
        } else if two('|', '|') {
            (Tok::OrOr, 2)
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                ';' => Tok::Semi,
                '.' => Tok::Dot,
                '|' => Tok::Bar,
                '!' => Tok::Bang,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '=' => Tok::Eq,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                other => {
                    return Err(SyntaxError::lexical(
                        start_line,
                        start_col,
                        &format!("unexpected character `{other}`"),
                    ))
                }
            };
            (t, 1)
        };
        advance(tok.1, &mut i, &mut col);
        out.push(Spanned {
            tok: tok.0,
            line: start_line,
            col: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}
