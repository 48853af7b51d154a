//! Example program pairs with their context families and desk-scale
//! parameters.
//!
//! Program sources live in `programs/*.tl` as templates: `{{name}}` is
//! replaced by a parameter or a value derived from the parameters before
//! parsing.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::analysis::{refinement_probe, ComparisonReport, Context, ProbeError, Verdict};
use crate::lang::{load, parse_type, Expr, LoadError, Type};

pub mod invariants;

pub type Params = BTreeMap<String, i64>;

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub default: i64,
    pub allowed: &'static [i64],
    pub doc: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct Program {
    pub name: &'static str,
    pub template: &'static str,
}

/// A corpus pair: two programs at a common type and the harnesses used to
/// compare them.
pub struct CorpusEntry {
    pub name: &'static str,
    pub summary: &'static str,
    pub left: Program,
    pub right: Program,
    pub ty: &'static str,
    pub params: &'static [ParamSpec],
    /// Depth at which every shipped context has terminated.
    pub depth: usize,
    /// `Distinguished` entries need one distinguishing context; the others
    /// need every context to come out exactly equal.
    pub expected: Verdict,
    vars: fn(&Params) -> Vec<(&'static str, i64)>,
    contexts: fn(&Params) -> Vec<Context>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("unknown corpus entry `{0}`")]
    UnknownEntry(String),
    #[error("entry `{entry}` has no parameter `{param}`")]
    UnknownParam { entry: String, param: String },
    #[error("parameter `{param}` = {value} outside {allowed:?}")]
    OutOfRange { param: String, value: i64, allowed: Vec<i64> },
    #[error("{0}")]
    Invalid(String),
    #[error("program `{program}` does not load: {source}")]
    Load {
        program: String,
        #[source]
        source: LoadError,
    },
}

/// An instantiated entry.
#[derive(Clone, Debug)]
pub struct Built {
    pub name: &'static str,
    pub params: Params,
    pub left_source: String,
    pub right_source: String,
    pub left: Expr,
    pub right: Expr,
    pub ty: Type,
    pub contexts: Vec<Context>,
    pub depth: usize,
    pub expected: Verdict,
}

impl Built {
    pub fn probe(&self) -> Result<Vec<(String, ComparisonReport)>, ProbeError> {
        self.probe_at(self.depth)
    }

    pub fn probe_at(&self, depth: usize) -> Result<Vec<(String, ComparisonReport)>, ProbeError> {
        refinement_probe(&self.left, &self.right, &self.contexts, depth)
    }

    /// Whether per-context reports match the entry's expectation.
    pub fn meets_expectation(&self, reports: &[(String, ComparisonReport)]) -> bool {
        match self.expected {
            Verdict::Distinguished => reports.iter().any(|(_, r)| r.verdict == Verdict::Distinguished),
            v => reports.iter().all(|(_, r)| r.verdict == v),
        }
    }
}

fn render(template: &str, vars: &[(&str, i64)]) -> String {
    vars.iter()
        .fold(template.to_string(), |s, (k, v)| s.replace(&format!("{{{{{k}}}}}"), &v.to_string()))
}

pub fn entries() -> &'static [CorpusEntry] {
    &ENTRIES
}

pub fn entry(name: &str) -> Option<&'static CorpusEntry> {
    ENTRIES.iter().find(|e| e.name == name)
}

impl CorpusEntry {
    /// Fills in defaults and validates ranges.
    pub fn resolve(&self, given: &Params) -> Result<Params, CorpusError> {
        for k in given.keys() {
            if !self.params.iter().any(|p| p.name == k) {
                return Err(CorpusError::UnknownParam {
                    entry: self.name.into(),
                    param: k.clone(),
                });
            }
        }
        let mut out = Params::new();
        for p in self.params {
            let default = match (self.name.starts_with("elgamal"), p.name) {
                (true, "g") => smallest_generator(given.get("p").copied().unwrap_or(5)),
                _ => p.default,
            };
            let v = given.get(p.name).copied().unwrap_or(default);
            if !p.allowed.contains(&v) {
                return Err(CorpusError::OutOfRange {
                    param: p.name.into(),
                    value: v,
                    allowed: p.allowed.to_vec(),
                });
            }
            out.insert(p.name.into(), v);
        }
        Ok(out)
    }

    pub fn source(&self, prog: &Program, params: &Params) -> Result<String, CorpusError> {
        let params = self.resolve(params)?;
        let vars = self.validated_vars(&params)?;
        Ok(render(prog.template, &vars))
    }

    fn validated_vars(&self, params: &Params) -> Result<Vec<(&'static str, i64)>, CorpusError> {
        if self.name.starts_with("elgamal") {
            let (p, g) = (params["p"], params["g"]);
            if !is_generator(g, p) {
                return Err(CorpusError::Invalid(format!("{g} does not generate the units mod {p}")));
            }
        }
        Ok((self.vars)(params))
    }

    pub fn build(&self, given: &Params) -> Result<Built, CorpusError> {
        let params = self.resolve(given)?;
        let vars = self.validated_vars(&params)?;
        let ty = parse_type(self.ty).expect("entry types parse");
        let load_prog = |prog: &Program| {
            let src = render(prog.template, &vars);
            let (e, _) = load(&src).map_err(|source| CorpusError::Load {
                program: prog.name.into(),
                source,
            })?;
            Ok::<_, CorpusError>((src, e))
        };
        let (left_source, left) = load_prog(&self.left)?;
        let (right_source, right) = load_prog(&self.right)?;
        Ok(Built {
            name: self.name,
            contexts: (self.contexts)(&params),
            params,
            left_source,
            right_source,
            left,
            right,
            ty,
            depth: self.depth,
            expected: self.expected,
        })
    }
}

pub fn build(name: &str, params: &Params) -> Result<Built, CorpusError> {
    entry(name)
        .ok_or_else(|| CorpusError::UnknownEntry(name.into()))?
        .build(params)
}

/// Every program template, deduplicated by name.
pub fn programs() -> Vec<(&'static CorpusEntry, Program)> {
    let mut seen = BTreeMap::new();
    for e in entries() {
        for p in [e.left, e.right] {
            seen.entry(p.name).or_insert((e, p));
        }
    }
    seen.into_values().collect()
}

/// `g` generates the multiplicative group of integers mod the prime `p`.
pub fn is_generator(g: i64, p: i64) -> bool {
    if p < 2 || g <= 0 || g >= p {
        return false;
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut x = 1;
    for _ in 0..p - 1 {
        x = x * g % p;
        seen.insert(x);
    }
    seen.len() as i64 == p - 1
}

fn smallest_generator(p: i64) -> i64 {
    (2..p).find(|&g| is_generator(g, p)).unwrap_or(1)
}

fn ctx(name: impl Into<String>, source: impl Into<String>) -> Context {
    Context {
        name: name.into(),
        source: source.into(),
    }
}

fn no_vars(_: &Params) -> Vec<(&'static str, i64)> {
    Vec::new()
}

/// All sequences over `alphabet` with lengths `1..=max_len`.
fn sequences<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<T>> = vec![Vec::new()];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|s| {
                alphabet.iter().map(move |a| {
                    let mut s = s.clone();
                    s.push(a.clone());
                    s
                })
            })
            .collect();
        out.extend(layer.iter().cloned());
    }
    out
}

/// `let h = <setup> in let r1 = h a1 in ... (r1, ..., rk)`.
fn query_harness(setup: &str, calls: &[String]) -> String {
    let mut s = format!("let h = {setup} in ");
    for (i, c) in calls.iter().enumerate() {
        let _ = write!(s, "let r{i} = h {c} in ");
    }
    let results: Vec<String> = (0..calls.len()).map(|i| format!("r{i}")).collect();
    if results.len() == 1 {
        s.push_str(&results[0]);
    } else {
        let _ = write!(s, "({})", results.join(", "));
    }
    s
}

fn arg(k: i64) -> String {
    if k < 0 {
        format!("({k})")
    } else {
        k.to_string()
    }
}

fn coin_contexts(_: &Params) -> Vec<Context> {
    vec![
        ctx("call-once", "let f = hole in f ()"),
        ctx("call-twice", "let f = hole in (f (), f ())"),
        ctx("call-store-call", "let f = hole in let r = ref (f ()) in let b = f () in (!r, b)"),
    ]
}

fn hash_vars(p: &Params) -> Vec<(&'static str, i64)> {
    vec![("n", p["n"])]
}

fn hash_contexts(p: &Params) -> Vec<Context> {
    let n = p["n"];
    let keys: Vec<i64> = (-1..=n + 1).collect();
    sequences(&keys, p["queries"] as usize)
        .into_iter()
        .map(|seq| {
            let name = format!("query-{}", seq.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(","));
            let calls: Vec<String> = seq.iter().map(|&k| arg(k)).collect();
            ctx(name, query_harness("hole", &calls))
        })
        .collect()
}

fn rng_vars(p: &Params) -> Vec<(&'static str, i64)> {
    vec![("max", p["max"])]
}

fn rng_contexts(p: &Params) -> Vec<Context> {
    let mut out: Vec<Context> = (1..=p["draws"] as usize)
        .map(|k| ctx(format!("draw-{k}"), query_harness("hole ()", &vec!["()".to_string(); k])))
        .collect();
    out.push(ctx(
        "two-generators",
        "let i = hole in let g1 = i () in let g2 = i () in let a = g1 () in let b = g2 () in let c = g1 () in (a, b, c)",
    ));
    out
}

fn keyed_vars(p: &Params) -> Vec<(&'static str, i64)> {
    let (pk, pv) = (p["pk"], p["pv"]);
    vec![
        ("pk", pk),
        ("pv", pv),
        ("keys", 1 << (pk + pv)),
        ("values", 1 << pv),
        ("streams", 1 << pk),
    ]
}

fn keyed_contexts(p: &Params) -> Vec<Context> {
    let pairs: Vec<String> = (0..1i64 << p["pk"])
        .flat_map(|k| (0..1i64 << p["pv"]).map(move |v| format!("{k} {v}")))
        .collect();
    sequences(&pairs, p["queries"] as usize)
        .into_iter()
        .map(|seq| ctx(format!("query-{}", seq.join(",")), query_harness("hole ()", &seq)))
        .collect()
}

fn elgamal_vars(p: &Params) -> Vec<(&'static str, i64)> {
    vec![("p", p["p"]), ("g", p["g"]), ("n", p["p"] - 2)]
}

fn elgamal_contexts(params: &Params) -> Vec<Context> {
    let p = params["p"];
    let one_query = |msg: &str| {
        format!(
            "let r = hole in let pk = fst r in \
             match snd r ({msg}) with inl _ -> (pk, 0, 0) | inr c -> (pk, fst c, snd c) end"
        )
    };
    let mut out: Vec<Context> = (1..p).map(|m| ctx(format!("query-{m}"), one_query(&m.to_string()))).collect();
    out.push(ctx("query-pk", one_query("pk")));
    out.push(ctx("query-pk-squared", one_query(&format!("pk * pk mod {p}"))));
    out.push(ctx(
        "query-twice",
        "let r = hole in let q = snd r in let a = q 1 in let b = q (fst r) in (fst r, a, b)",
    ));
    out
}

fn int_vars(p: &Params) -> Vec<(&'static str, i64)> {
    vec![("digits", p["digits"]), ("base", p["base"]), ("top", p["base"] - 1)]
}

fn int_contexts(_: &Params) -> Vec<Context> {
    let open = "unpack hole as <'a, p> in let s = fst p in let c = snd p in ";
    vec![
        ctx("compare-fresh", format!("{open}let x = s () in let y = s () in c (x, y)")),
        ctx("compare-self", format!("{open}let x = s () in c (x, x)")),
        ctx(
            "compare-both-ways",
            format!("{open}let x = s () in let y = s () in let a = c (x, y) in let b = c (y, x) in (a, b)"),
        ),
        ctx(
            "compare-chain",
            format!("{open}let x = s () in let y = s () in let z = s () in let a = c (x, y) in let b = c (y, z) in let d = c (x, z) in (a, b, d)"),
        ),
    ]
}

fn flip_contexts(_: &Params) -> Vec<Context> {
    vec![ctx("identity", "hole"), ctx("negate", "if hole then false else true")]
}

fn copy_contexts(_: &Params) -> Vec<Context> {
    vec![
        ctx("call-once", "let f = hole in f ()"),
        ctx("copying", "let f = hole in f () = f ()"),
    ]
}

fn run_once_contexts(_: &Params) -> Vec<Context> {
    vec![
        ctx("call-once", "let f = hole in f ()"),
        ctx("call-twice", "let f = hole in f () = f ()"),
        ctx("call-twice-pair", "let f = hole in (f (), f ())"),
    ]
}

macro_rules! program {
    ($name:literal) => {
        Program {
            name: $name,
            template: include_str!(concat!("programs/", $name, ".tl")),
        }
    };
}

static HASH_PARAMS: [ParamSpec; 2] = [
    ParamSpec {
        name: "n",
        default: 1,
        allowed: &[0, 1, 2],
        doc: "largest key",
    },
    ParamSpec {
        name: "queries",
        default: 3,
        allowed: &[1, 2, 3],
        doc: "longest query sequence",
    },
];

static ENTRIES: [CorpusEntry; 12] = [
    CorpusEntry {
        name: "lazy-eager",
        summary: "memoized lazy coin against a coin flipped up front",
        left: program!("lazy"),
        right: program!("eager"),
        ty: "unit -> bool",
        params: &[],
        depth: 80,
        expected: Verdict::ExactlyEqual,
        vars: no_vars,
        contexts: coin_contexts,
    },
    CorpusEntry {
        name: "lazy-tape-eager",
        summary: "lazy coin reading a private tape against the eager coin",
        left: program!("lazy_tape"),
        right: program!("eager"),
        ty: "unit -> bool",
        params: &[],
        depth: 80,
        expected: Verdict::ExactlyEqual,
        vars: no_vars,
        contexts: coin_contexts,
    },
    CorpusEntry {
        name: "flip-or",
        summary: "disjunction of two coins against one coin",
        left: program!("flip_or"),
        right: program!("flip"),
        ty: "bool",
        params: &[],
        depth: 20,
        expected: Verdict::Distinguished,
        vars: no_vars,
        contexts: flip_contexts,
    },
    CorpusEntry {
        name: "hash",
        summary: "eager random hash against the tape-backed lazy hash",
        left: program!("eager_hash"),
        right: program!("lazy_hash"),
        ty: "int -> bool",
        params: &HASH_PARAMS,
        depth: 1500,
        expected: Verdict::ExactlyEqual,
        vars: hash_vars,
        contexts: hash_contexts,
    },
    CorpusEntry {
        name: "hash-rng",
        summary: "counter-hashing bit generator against the bounded generator",
        left: program!("hash_rng"),
        right: program!("bounded_rng"),
        ty: "unit -> unit -> bool",
        params: &[
            ParamSpec {
                name: "max",
                default: 2,
                allowed: &[0, 1, 2, 3],
                doc: "largest hashed counter value",
            },
            ParamSpec {
                name: "draws",
                default: 4,
                allowed: &[1, 2, 3, 4, 5],
                doc: "most draws made by a context",
            },
        ],
        depth: 1500,
        expected: Verdict::ExactlyEqual,
        vars: rng_vars,
        contexts: rng_contexts,
    },
    CorpusEntry {
        name: "keyed-hash",
        summary: "one lazy hash split by key prefix against independent per-stream hashes",
        left: program!("keyed_hash"),
        right: program!("split_hash"),
        ty: "unit -> int -> int -> bool",
        params: &[
            ParamSpec {
                name: "pk",
                default: 1,
                allowed: &[0, 1],
                doc: "key bits",
            },
            ParamSpec {
                name: "pv",
                default: 1,
                allowed: &[0, 1],
                doc: "value bits",
            },
            ParamSpec {
                name: "queries",
                default: 2,
                allowed: &[1, 2, 3],
                doc: "longest query sequence",
            },
        ],
        depth: 1500,
        expected: Verdict::ExactlyEqual,
        vars: keyed_vars,
        contexts: keyed_contexts,
    },
    CorpusEntry {
        name: "elgamal-real",
        summary: "real public-key game against its reduction to a real Diffie-Hellman triple",
        left: program!("elgamal_pk_real"),
        right: program!("elgamal_dh_real"),
        ty: "int * (int -> unit + int * int)",
        params: &ELGAMAL_PARAMS,
        depth: 400,
        expected: Verdict::ExactlyEqual,
        vars: elgamal_vars,
        contexts: elgamal_contexts,
    },
    CorpusEntry {
        name: "elgamal-rand",
        summary: "random-ciphertext game against its reduction to a random triple",
        left: program!("elgamal_pk_rand"),
        right: program!("elgamal_dh_rand"),
        ty: "int * (int -> unit + int * int)",
        params: &ELGAMAL_PARAMS,
        depth: 400,
        expected: Verdict::ExactlyEqual,
        vars: elgamal_vars,
        contexts: elgamal_contexts,
    },
    CorpusEntry {
        name: "lazy-int",
        summary: "digit-by-digit lazily sampled integers against eagerly sampled ones",
        left: program!("lazy_int"),
        right: program!("eager_int"),
        ty: "exists 'a. (unit -> 'a) * ('a * 'a -> int)",
        params: &[
            ParamSpec {
                name: "digits",
                default: 2,
                allowed: &[1, 2, 3],
                doc: "digits per integer",
            },
            ParamSpec {
                name: "base",
                default: 2,
                allowed: &[2, 3, 4],
                doc: "digit base",
            },
        ],
        depth: 1000,
        expected: Verdict::ExactlyEqual,
        vars: int_vars,
        contexts: int_contexts,
    },
    CorpusEntry {
        name: "copying-li",
        summary: "choice between constant functions against a function choosing per call",
        left: program!("sv_l"),
        right: program!("sv_i"),
        ty: "unit -> bool",
        params: &[],
        depth: 50,
        expected: Verdict::Distinguished,
        vars: no_vars,
        contexts: copy_contexts,
    },
    CorpusEntry {
        name: "copying-kh",
        summary: "choice between run-once closures against a run-once closure choosing on call",
        left: program!("sv_k"),
        right: program!("sv_h"),
        ty: "unit -> bool",
        params: &[],
        depth: 60,
        expected: Verdict::ExactlyEqual,
        vars: no_vars,
        contexts: run_once_contexts,
    },
    CorpusEntry {
        name: "copying-h-tape",
        summary: "run-once closure choosing on call against the same closure reading a private tape",
        left: program!("sv_h"),
        right: program!("sv_h_tape"),
        ty: "unit -> bool",
        params: &[],
        depth: 60,
        expected: Verdict::ExactlyEqual,
        vars: no_vars,
        contexts: run_once_contexts,
    },
];

static ELGAMAL_PARAMS: [ParamSpec; 2] = [
    ParamSpec {
        name: "p",
        default: 5,
        allowed: &[3, 5, 7],
        doc: "prime modulus",
    },
    ParamSpec {
        name: "g",
        default: 2,
        allowed: &[2, 3, 5],
        doc: "generator of the units mod p; defaults to the smallest one",
    },
];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_builds_with_defaults() {
        for e in entries() {
            let b = e.build(&Params::new()).unwrap_or_else(|err| panic!("{}: {err}", e.name));
            for c in &b.contexts {
                c.elaborate(&b.ty).unwrap_or_else(|err| panic!("{} / {}: {err}", e.name, c.name));
            }
        }
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(build("nope", &Params::new()), Err(CorpusError::UnknownEntry(_))));
        let bad = Params::from([("n".to_string(), 9)]);
        assert!(matches!(build("hash", &bad), Err(CorpusError::OutOfRange { .. })));
        let bad = Params::from([("x".to_string(), 1)]);
        assert!(matches!(build("hash", &bad), Err(CorpusError::UnknownParam { .. })));
        let bad = Params::from([("p".to_string(), 5), ("g".to_string(), 5)]);
        assert!(matches!(build("elgamal-real", &bad), Err(CorpusError::Invalid(_))));
        let p7 = Params::from([("p".to_string(), 7)]);
        assert_eq!(entry("elgamal-real").unwrap().resolve(&p7).unwrap()["g"], 3);
    }

    #[test]
    fn sequences_enumerate_all_lengths() {
        assert_eq!(sequences(&[0, 1], 3).len(), 2 + 4 + 8);
    }
}
