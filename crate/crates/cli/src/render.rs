//! Table and JSON renderings of command results.

use std::collections::BTreeMap;

use clap::ValueEnum;
use serde_json::{json, Value};
use tapework::analysis::ComparisonReport;
use tapework::corpus::{Built, CorpusEntry};
use tapework::coupling::Mode;
use tapework::dist::SubDistr;
use tapework::lang::{Type, Val};
use tapework::weight::format_ratio;
use tapework::{Distr, Prob};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
}

pub struct Out {
    format: Format,
    text: String,
}

/// Left-aligned columns separated by two spaces.
fn table(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| rows.iter().filter_map(|r| r.get(c)).map(|s| s.chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for r in rows {
        let mut line = String::new();
        for (c, cell) in r.iter().enumerate() {
            if c + 1 < r.len() {
                line.push_str(&format!("{cell:<w$}  ", w = widths[c]));
            } else {
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn distr_rows(d: &Distr<Val>) -> Vec<Vec<String>> {
    let mut rows = vec![vec!["value".to_string(), "weight".to_string()]];
    rows.extend(d.rendered().into_iter().map(|(s, _, w)| vec![s, format_ratio(w)]));
    rows
}

fn mode_name(mode: Mode) -> &'static str {
    match mode {
        Mode::Exact => "exact",
        Mode::LeftPartial => "left-partial",
    }
}

impl Out {
    pub fn new(format: Format) -> Out {
        Out {
            format,
            text: String::new(),
        }
    }

    pub fn flush(&mut self) {
        print!("{}", self.text);
        self.text.clear();
    }

    fn line(&mut self, s: impl AsRef<str>) {
        self.text.push_str(s.as_ref());
        self.text.push('\n');
    }

    fn json(&mut self, v: Value) {
        let s = serde_json::to_string_pretty(&v).expect("serializable");
        self.line(s);
    }

    pub fn typecheck(&mut self, ty: &Type) {
        match self.format {
            Format::Table => self.line(ty.to_string()),
            Format::Json => self.json(json!({ "type": ty.to_string() })),
        }
    }

    pub fn dist(&mut self, depth: usize, d: &Distr<Val>, residual: &Prob) {
        match self.format {
            Format::Table => {
                self.line(format!("depth {depth}"));
                self.text.push_str(&table(&distr_rows(d)));
                self.line(format!("mass {}", format_ratio(&d.mass())));
                self.line(format!("residual {}", format_ratio(residual)));
            }
            Format::Json => self.json(json!({
                "depth": depth,
                "distribution": d.to_json(),
                "residual": format_ratio(residual),
            })),
        }
    }

    fn report_table(&mut self, r: &ComparisonReport) {
        let values: std::collections::BTreeSet<String> = r
            .left
            .rendered()
            .into_iter()
            .chain(r.right.rendered())
            .map(|(s, _, _)| s)
            .collect();
        let weight = |d: &Distr<Val>, s: &str| {
            d.rendered()
                .into_iter()
                .find(|(t, _, _)| t == s)
                .map(|(_, _, w)| format_ratio(w))
                .unwrap_or_else(|| "0".into())
        };
        let mut rows = vec![vec!["value".to_string(), "left".to_string(), "right".to_string()]];
        for v in &values {
            rows.push(vec![v.clone(), weight(&r.left, v), weight(&r.right, v)]);
        }
        rows.push(vec![
            "(residual)".into(),
            format_ratio(&r.left_residual),
            format_ratio(&r.right_residual),
        ]);
        self.text.push_str(&table(&rows));
    }

    pub fn compare(&mut self, r: &ComparisonReport) {
        match self.format {
            Format::Table => {
                self.line(format!("depth {}", r.depth));
                self.report_table(r);
                self.line(format!("tv distance {}", format_ratio(&r.tv_distance())));
                self.line(format!("stabilized {}", r.stabilized));
                self.line(format!("verdict {}", r.verdict));
            }
            Format::Json => self.json(serde_json::to_value(r.to_json()).expect("serializable")),
        }
    }

    pub fn erasure(&mut self, label: usize, depth: usize, holds: bool) {
        match self.format {
            Format::Table => self.line(format!(
                "erasure on label({label}) at depth {depth}: {}",
                if holds { "holds" } else { "fails" }
            )),
            Format::Json => self.json(json!({ "label": label, "depth": depth, "holds": holds })),
        }
    }

    pub fn couple(&mut self, mode: Mode, joint: Option<&SubDistr<(String, String), Prob>>) {
        match self.format {
            Format::Table => match joint {
                None => self.line(format!("no {} coupling", mode_name(mode))),
                Some(j) => {
                    self.line(format!("{} coupling found", mode_name(mode)));
                    let mut rows = vec![vec!["left".to_string(), "right".to_string(), "weight".to_string()]];
                    rows.extend(j.iter().map(|((a, b), w)| vec![a.clone(), b.clone(), format_ratio(w)]));
                    self.text.push_str(&table(&rows));
                }
            },
            Format::Json => {
                let witness = joint.map(|j| {
                    let pairs: Vec<Value> = j
                        .iter()
                        .map(|((a, b), w)| json!({ "left": a, "right": b, "weight": format_ratio(w) }))
                        .collect();
                    json!({ "joint": pairs, "mass": format_ratio(&j.mass()) })
                });
                self.json(json!({ "mode": mode_name(mode), "witness": witness }));
            }
        }
    }

    pub fn corpus_list(&mut self, entries: &[CorpusEntry]) {
        let params = |e: &CorpusEntry| {
            e.params
                .iter()
                .map(|p| format!("{}={}", p.name, p.default))
                .collect::<Vec<_>>()
                .join(",")
        };
        match self.format {
            Format::Table => {
                let mut rows = vec![["entry", "params", "depth", "expected", "summary"].map(String::from).to_vec()];
                for e in entries {
                    rows.push(vec![
                        e.name.into(),
                        params(e),
                        e.depth.to_string(),
                        e.expected.to_string(),
                        e.summary.into(),
                    ]);
                }
                self.text.push_str(&table(&rows));
            }
            Format::Json => {
                let list: Vec<Value> = entries
                    .iter()
                    .map(|e| {
                        let ps: Vec<Value> = e
                            .params
                            .iter()
                            .map(|p| json!({ "name": p.name, "default": p.default, "allowed": p.allowed, "doc": p.doc }))
                            .collect();
                        json!({
                            "name": e.name,
                            "summary": e.summary,
                            "left": e.left.name,
                            "right": e.right.name,
                            "type": e.ty,
                            "params": ps,
                            "depth": e.depth,
                            "expected": e.expected,
                        })
                    })
                    .collect();
                self.json(Value::Array(list));
            }
        }
    }

    pub fn emit(&mut self, b: &Built, sources: &[(&str, &str)]) {
        match self.format {
            Format::Table => {
                for (i, (name, src)) in sources.iter().enumerate() {
                    if sources.len() > 1 {
                        if i > 0 {
                            self.line("");
                        }
                        self.line(format!("# {name}.tl"));
                    }
                    self.line(src.trim_end());
                }
            }
            Format::Json => {
                let progs: BTreeMap<&str, &str> = sources.iter().copied().collect();
                self.json(json!({ "entry": b.name, "params": b.params, "programs": progs }));
            }
        }
    }

    pub fn check(&mut self, b: &Built, reports: &[(String, ComparisonReport)], met: bool) {
        let depth = reports.first().map(|(_, r)| r.depth).unwrap_or(b.depth);
        match self.format {
            Format::Table => {
                let params = b.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",");
                self.line(format!("entry {} [{params}] at depth {depth}", b.name));
                let mut rows = vec![["context", "verdict", "left", "right", "residuals"].map(String::from).to_vec()];
                for (name, r) in reports {
                    rows.push(vec![
                        name.clone(),
                        r.verdict.to_string(),
                        r.left.to_string(),
                        r.right.to_string(),
                        format!("{} / {}", format_ratio(&r.left_residual), format_ratio(&r.right_residual)),
                    ]);
                }
                self.text.push_str(&table(&rows));
                self.line(format!(
                    "expected {}: {}",
                    b.expected,
                    if met { "met" } else { "not met" }
                ));
            }
            Format::Json => {
                let contexts: Vec<Value> = reports
                    .iter()
                    .map(|(name, r)| json!({ "context": name, "report": r.to_json() }))
                    .collect();
                self.json(json!({
                    "entry": b.name,
                    "params": b.params,
                    "depth": depth,
                    "expected": b.expected,
                    "expectation_met": met,
                    "contexts": contexts,
                }));
            }
        }
    }

    pub fn sample(&mut self, samples: u64, seed: u64, depth: usize, counts: &BTreeMap<String, u64>) {
        match self.format {
            Format::Table => {
                self.line(format!("{samples} runs, seed {seed}, depth {depth}"));
                let mut rows = vec![["outcome", "count", "frequency"].map(String::from).to_vec()];
                for (k, c) in counts {
                    rows.push(vec![k.clone(), c.to_string(), format!("{:.4}", *c as f64 / samples as f64)]);
                }
                self.text.push_str(&table(&rows));
            }
            Format::Json => {
                let outcomes: Vec<Value> = counts
                    .iter()
                    .map(|(k, c)| json!({ "value": k, "count": c }))
                    .collect();
                self.json(json!({ "samples": samples, "seed": seed, "depth": depth, "outcomes": outcomes }));
            }
        }
    }
}
