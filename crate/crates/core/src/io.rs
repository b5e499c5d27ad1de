//! Text formats and reports: the line-based poset and refiner formats, DOT
//! export of Hasse diagrams, and the versioned JSON report schema.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poset::{BuildError, Elem, Flag, Flags, TruncatedPoset};
use crate::refiners::{Refiner, RefinerError, Stage, Stages};
use crate::verdict::{Outcome, Verdict, Witness};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Semantic(#[from] BuildError),
    #[error(transparent)]
    Refiner(#[from] RefinerError),
}

fn syntax(line: usize, msg: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parse the line-based poset format:
///
/// ```text
/// poset v1
/// flags: graded atomless
/// level 0: X
/// level 1: a b c
/// atom: a
/// edge: a < X
/// ```
///
/// Levels must be declared in order; `#` starts a comment.  Edges go
/// strictly downward (the builder rejects the rest).
pub fn parse_poset(text: &str) -> Result<TruncatedPoset, ParseError> {
    let mut levels: Vec<Vec<String>> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut flags = Flags::default();
    let mut atoms: Vec<String> = Vec::new();
    let mut saw_header = false;
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != "poset v1" {
                return Err(syntax(lineno, "expected `poset v1` header"));
            }
            saw_header = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("flags:") {
            for tok in rest.split_whitespace() {
                match Flag::parse(tok) {
                    Some(f) => flags.set(f),
                    None => return Err(syntax(lineno, format!("unknown flag `{tok}`"))),
                }
            }
        } else if let Some(rest) = line.strip_prefix("level") {
            let (num, names) = rest
                .split_once(':')
                .ok_or_else(|| syntax(lineno, "expected `level <n>: ...`"))?;
            let n: usize = num
                .trim()
                .parse()
                .map_err(|_| syntax(lineno, "bad level number"))?;
            if n != levels.len() {
                return Err(syntax(
                    lineno,
                    format!(
                        "levels must be declared in order; expected {}",
                        levels.len()
                    ),
                ));
            }
            levels.push(names.split_whitespace().map(String::from).collect());
        } else if let Some(rest) = line.strip_prefix("atom:") {
            for tok in rest.split_whitespace() {
                atoms.push(tok.to_string());
            }
        } else if let Some(rest) = line.strip_prefix("edge:") {
            let parts: Vec<&str> = rest.split('<').map(str::trim).collect();
            if parts.len() != 2 || parts[0].is_empty() || parts[1].is_empty() {
                return Err(syntax(lineno, "expected `edge: lower < upper`"));
            }
            let known = |name: &str| levels.iter().any(|l| l.iter().any(|x| x == name));
            for part in &parts {
                if !known(part) {
                    return Err(syntax(lineno, format!("unknown element `{part}`")));
                }
            }
            edges.push((parts[0].to_string(), parts[1].to_string()));
        } else {
            return Err(syntax(lineno, format!("unrecognised line `{line}`")));
        }
    }
    if !saw_header {
        return Err(syntax(1, "expected `poset v1` header"));
    }
    Ok(TruncatedPoset::build(&levels, &edges, flags, &atoms)?)
}

/// Canonical serialisation: flags in fixed order, levels in order, atom
/// marks, then the covering edges of the derived order.
pub fn serialize_poset(p: &TruncatedPoset) -> String {
    let mut out = String::from("poset v1\n");
    let flags = p.flags().list();
    if !flags.is_empty() {
        out.push_str("flags:");
        for f in flags {
            out.push(' ');
            out.push_str(f.name());
        }
        out.push('\n');
    }
    for n in 0..=p.depth() {
        out.push_str(&format!("level {n}:"));
        for &e in p.level(n).unwrap() {
            out.push(' ');
            out.push_str(p.name(e));
        }
        out.push('\n');
    }
    for a in p.atom_marks() {
        out.push_str(&format!("atom: {}\n", p.name(a)));
    }
    for e in p.elements() {
        for &u in p.covers_above(e) {
            out.push_str(&format!("edge: {} < {}\n", p.name(e), p.name(u)));
        }
    }
    out
}

/// Parse the refiner format against its two posets:
///
/// ```text
/// refiner v1
/// pair: q > p
/// stage 0:
/// fwd: p ~ q
/// back: q' ~ p
/// ```
///
/// `pair` relates a target element to a source element; inside `stage n`,
/// `fwd` relates source level `n` to target level `n` and `back` relates
/// target level `n+1` back to source level `n`.
pub fn parse_refiner(
    text: &str,
    target: &TruncatedPoset,
    source: &TruncatedPoset,
) -> Result<(Refiner, Stages), ParseError> {
    let mut pairs: Vec<(Elem, Elem)> = Vec::new();
    let mut stages: Vec<Stage> = Vec::new();
    let mut current: Option<usize> = None;
    let mut saw_header = false;
    let lookup = |p: &TruncatedPoset, name: &str, lineno: usize| {
        p.elem_by_name(name)
            .ok_or_else(|| syntax(lineno, format!("unknown element `{name}`")))
    };
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !saw_header {
            if line != "refiner v1" {
                return Err(syntax(lineno, "expected `refiner v1` header"));
            }
            saw_header = true;
            continue;
        }
        if let Some(rest) = line.strip_prefix("pair:") {
            let parts: Vec<&str> = rest.split('>').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(syntax(lineno, "expected `pair: q > p`"));
            }
            let q = lookup(target, parts[0], lineno)?;
            let p = lookup(source, parts[1], lineno)?;
            pairs.push((q, p));
        } else if let Some(rest) = line.strip_prefix("stage") {
            let num = rest
                .strip_suffix(':')
                .ok_or_else(|| syntax(lineno, "expected `stage <n>:`"))?;
            let n: usize = num
                .trim()
                .parse()
                .map_err(|_| syntax(lineno, "bad stage number"))?;
            if n != stages.len() {
                return Err(syntax(lineno, "stages must be declared in order"));
            }
            stages.push(Stage::default());
            current = Some(n);
        } else if let Some(rest) = line.strip_prefix("fwd:") {
            let n = current.ok_or_else(|| syntax(lineno, "fwd outside a stage"))?;
            let parts: Vec<&str> = rest.split('~').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(syntax(lineno, "expected `fwd: p ~ q`"));
            }
            let a = lookup(source, parts[0], lineno)?;
            let b = lookup(target, parts[1], lineno)?;
            stages[n].forward.push((a, b));
        } else if let Some(rest) = line.strip_prefix("back:") {
            let n = current.ok_or_else(|| syntax(lineno, "back outside a stage"))?;
            let parts: Vec<&str> = rest.split('~').map(str::trim).collect();
            if parts.len() != 2 {
                return Err(syntax(lineno, "expected `back: q ~ p`"));
            }
            let b = lookup(target, parts[0], lineno)?;
            let a = lookup(source, parts[1], lineno)?;
            stages[n].back.push((b, a));
        } else {
            return Err(syntax(lineno, format!("unrecognised line `{line}`")));
        }
    }
    let refiner = Refiner::new(target, source, pairs)?;
    Ok((refiner, Stages { stages }))
}

pub fn serialize_refiner(
    r: &Refiner,
    stages: &Stages,
    target: &TruncatedPoset,
    source: &TruncatedPoset,
) -> String {
    let mut out = String::from("refiner v1\n");
    for &(q, p) in &r.pairs {
        out.push_str(&format!("pair: {} > {}\n", target.name(q), source.name(p)));
    }
    for (n, stage) in stages.stages.iter().enumerate() {
        out.push_str(&format!("stage {n}:\n"));
        for &(a, b) in &stage.forward {
            out.push_str(&format!("fwd: {} ~ {}\n", source.name(a), target.name(b)));
        }
        for &(b, a) in &stage.back {
            out.push_str(&format!("back: {} ~ {}\n", target.name(b), source.name(a)));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default)]
pub struct DotOptions {
    /// Attach interval labels where the generator recorded them.
    pub labels: bool,
}

/// Hasse diagram as DOT: one rank per level, covering edges only, drawn
/// from upper to lower, nodes in canonical order.
pub fn export_dot(p: &TruncatedPoset, options: DotOptions) -> String {
    let mut out = String::from("digraph poset {\n");
    out.push_str("  rankdir=TB;\n  node [shape=box];\n");
    for n in 0..=p.depth() {
        out.push_str("  { rank=same;");
        for &e in p.level(n).unwrap() {
            out.push_str(&format!(" \"{}\";", p.name(e)));
        }
        out.push_str(" }\n");
    }
    if options.labels {
        for e in p.elements() {
            if let Some(label) = p.label(e) {
                out.push_str(&format!(
                    "  \"{}\" [label=\"{}\\n{}\"];\n",
                    p.name(e),
                    p.name(e),
                    label
                ));
            }
        }
    }
    for e in p.elements() {
        for &u in p.covers_above(e) {
            out.push_str(&format!("  \"{}\" -> \"{}\";\n", p.name(u), p.name(e)));
        }
    }
    out.push_str("}\n");
    out
}

/// JSON report schema `opct-report-v1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: String,
    pub command: String,
    pub inputs: Vec<InputDigest>,
    pub depth: Option<usize>,
    pub verdicts: Vec<VerdictRecord>,
    pub data: Option<serde_json::Value>,
    pub wall_ms: u128,
}

impl Report {
    pub fn new(command: &str) -> Report {
        Report {
            schema: "opct-report-v1".to_string(),
            command: command.to_string(),
            inputs: Vec::new(),
            depth: None,
            verdicts: Vec::new(),
            data: None,
            wall_ms: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub predicate: String,
    pub outcome: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub assumptions: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhausted_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessRecord {
    Elements { elements: Vec<String> },
    Edges { edges: Vec<(String, String)> },
    Level { level: usize },
}

pub fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::Holds => "holds",
        Outcome::Fails => "fails",
        Outcome::Unknown => "unknown",
    }
}

/// Render a verdict with element names resolved against the poset.
pub fn verdict_record(predicate: &str, p: &TruncatedPoset, v: &Verdict) -> VerdictRecord {
    let witness = v.witness.as_ref().map(|w| match w {
        Witness::Elements(es) => WitnessRecord::Elements {
            elements: es.iter().map(|&e| p.name(e).to_string()).collect(),
        },
        Witness::Edges(pairs) => WitnessRecord::Edges {
            edges: pairs
                .iter()
                .map(|&(a, b)| (p.name(a).to_string(), p.name(b).to_string()))
                .collect(),
        },
        Witness::Level(n) => WitnessRecord::Level { level: *n },
    });
    VerdictRecord {
        predicate: predicate.to_string(),
        outcome: outcome_name(v.outcome).to_string(),
        witness,
        assumptions: v.assumptions.iter().map(|f| f.name().to_string()).collect(),
        exhausted_depth: v.exhausted_depth,
        note: v.note.clone(),
        details: Vec::new(),
    }
}

/// Exit code conventions: 0 holds, 1 fails, 2 unknown.
pub fn outcome_exit_code(o: Outcome) -> i32 {
    match o {
        Outcome::Holds => 0,
        Outcome::Fails => 1,
        Outcome::Unknown => 2,
    }
}

/// Oracle classification arrays, exportable as JSON.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OracleReport {
    pub bands: Vec<Vec<String>>,
    pub caps: Vec<Vec<String>>,
    pub minimal_caps: Vec<Vec<String>>,
    pub selectors: Vec<Vec<String>>,
    pub minimal_selectors: Vec<Vec<String>>,
}

pub fn oracle_report(p: &TruncatedPoset, oracle: &crate::combinatorics::Oracle) -> OracleReport {
    let names = |sets: Vec<Vec<Elem>>| -> Vec<Vec<String>> {
        sets.into_iter().map(|s| p.names_of(&s)).collect()
    };
    OracleReport {
        bands: names(oracle.bands()),
        caps: names(oracle.caps()),
        minimal_caps: names(oracle.minimal_caps()),
        selectors: names(oracle.selectors()),
        minimal_selectors: names(oracle.minimal_selectors()),
    }
}

/// Re-check a reported witness against the input poset using order queries
/// alone.  Returns an explanation when the witness does not validate.
pub fn verify_witness(p: &TruncatedPoset, record: &VerdictRecord) -> Result<(), String> {
    let elem = |name: &str| {
        p.elem_by_name(name)
            .ok_or_else(|| format!("witness element `{name}` not in poset"))
    };
    let outcome = record.outcome.as_str();
    match (record.predicate.as_str(), outcome, &record.witness) {
        (_, "unknown", _) => Ok(()),
        ("band", "fails", Some(WitnessRecord::Elements { elements })) => {
            // a band failure exhibits an element comparable to nothing given;
            // without the tested set we can only check the element exists
            elem(&elements[0]).map(|_| ())
        }
        ("graded", "fails", Some(WitnessRecord::Edges { edges })) => {
            let (lo, hi) = &edges[0];
            let (lo, hi) = (elem(lo)?, elem(hi)?);
            if !p.lt(lo, hi) {
                return Err("witness pair not ordered".into());
            }
            let between = p
                .elements()
                .any(|r| r != lo && r != hi && p.lt(lo, r) && p.lt(r, hi));
            if between {
                return Err("witness pair is not a covering pair".into());
            }
            if p.rank(lo) == p.rank(hi) + 1 {
                return Err("witness pair does not skip a rank".into());
            }
            Ok(())
        }
        ("predetermined", "fails", Some(WitnessRecord::Elements { elements })) => {
            let e = elem(&elements[0])?;
            let ups = p.up_closure(&[e]);
            let ok = p
                .strict_downs(e)
                .iter()
                .filter(|&&q| p.rank(q) == p.rank(e) + 1)
                .any(|&q| p.strict_ups(q) == ups);
            if ok {
                Err("a predetermined witness exists after all".into())
            } else {
                Ok(())
            }
        }
        ("branching", "fails", Some(WitnessRecord::Edges { edges })) => {
            let (_, e) = &edges[0];
            let e = elem(e)?;
            if p.predecessors(e).len() == 1 {
                Ok(())
            } else {
                Err("witness element does not have a unique predecessor".into())
            }
        }
        ("weakly-graded", "fails", Some(WitnessRecord::Elements { elements })) => {
            let e = elem(&elements[0])?;
            let r = p.rank(e);
            let has = p.strict_downs(e).iter().any(|&q| p.rank(q) == r + 1);
            if has {
                Err("element has a lower bound one rank down".into())
            } else {
                Ok(())
            }
        }
        ("snake", "holds", Some(WitnessRecord::Elements { elements })) => {
            // consecutive members of the enumeration must share lower bounds
            let es: Result<Vec<Elem>, String> = elements.iter().map(|n| elem(n)).collect();
            let es = es?;
            for w in es.windows(2) {
                if p.common_lower_bound(w[0], w[1]).is_none() {
                    return Err("consecutive members do not wedge in the truncation".into());
                }
            }
            Ok(())
        }
        ("cap", "holds", Some(WitnessRecord::Level { level })) => {
            p.level(*level).map(|_| ()).map_err(|e| e.to_string())
        }
        _ => Ok(()),
    }
}

/// Convenience: resolve a list of element names.
pub fn resolve_names(p: &TruncatedPoset, names: &[String]) -> Result<Vec<Elem>, String> {
    names
        .iter()
        .map(|n| {
            p.elem_by_name(n)
                .ok_or_else(|| format!("unknown element `{n}`"))
        })
        .collect()
}

/// Stable map from names to labels for DOT consumers.
pub fn label_map(p: &TruncatedPoset) -> BTreeMap<String, String> {
    p.elements()
        .filter_map(|e| p.label(e).map(|l| (p.name(e).to_string(), l.to_string())))
        .collect()
}
