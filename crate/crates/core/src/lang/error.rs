use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SyntaxErrorKind {
    Lexical,
    Syntax,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
#[error("{}", self.render())]
pub struct SyntaxError {
    pub kind: SyntaxErrorKind,
    pub line: usize,
    pub col: usize,
    pub message: String,
    /// Token descriptions that would have been accepted at this position.
    pub expected: Vec<String>,
}

impl SyntaxError {
    pub(crate) fn lexical(line: usize, col: usize, message: &str) -> SyntaxError {
        SyntaxError {
            kind: SyntaxErrorKind::Lexical,
            line,
            col,
            message: message.to_string(),
            expected: Vec::new(),
        }
    }

    fn render(&self) -> String {
        let what = match self.kind {
            SyntaxErrorKind::Lexical => "lexical error",
            SyntaxErrorKind::Syntax => "syntax error",
        };
        let mut s = format!("{what} at {}:{}: {}", self.line, self.col, self.message);
        if !self.expected.is_empty() {
            s.push_str("; expected one of ");
            s.push_str(&self.expected.join(", "));
        }
        s
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("unbound type variable `'{0}`")]
    UnboundTypeVariable(String),
    #[error("type mismatch: expected {expected}, found {found}")]
    Mismatch { expected: String, found: String },
    #[error("missing annotation: {0}")]
    MissingAnnotation(&'static str),
    #[error("annotation mismatch: {0}")]
    BadAnnotation(String),
    #[error("rand label must have type unit or tape, found {0}")]
    RandLabel(String),
    #[error("expected a recursive type `mu 'a. t`, found {0}")]
    NotRecursive(String),
    #[error("branches disagree: {0} vs {1}")]
    NoJoin(String, String),
    #[error("type variable `'{0}` escapes its scope")]
    Escape(String),
    #[error("type variable `'{0}` is already bound")]
    Shadowed(String),
    #[error("unknown {kind} `{index}` in store typing")]
    UnknownRuntime { kind: &'static str, index: usize },
}
