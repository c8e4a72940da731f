//! Text formats: scheme and pair files, addresses, and graph exports.
//!
//! A scheme file is a list of sections:
//!
//! ```text
//! # folding the square along its diagonal
//! [Y]
//! 0 1
//! [X0]
//! 0 1
//! [X1]
//! d00 m01 d11
//! [phi]
//! 0 d00
//! 1 d11
//! [pi]
//! 0 0 d00
//! 0 1 m01
//! 1 0 m01
//! 1 1 d11
//! ```
//!
//! A pair file uses the sections `[Z]` and `[phiZ]` (`x0 z` entries).

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::address::Address;
use crate::fixedpoint::{words, Pair};
use crate::scheme::{is_valid_token, FiniteScheme, PointId, TokenSet, Word};
use crate::tower::{Tower, TowerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn fail<T>(line: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        line,
        message: message.into(),
    })
}

const SECTIONS: [&str; 7] = ["Y", "X0", "X1", "phi", "pi", "Z", "phiZ"];

struct Section<'a> {
    header: usize,
    rows: Vec<(usize, Vec<&'a str>)>,
}

struct Sections<'a> {
    map: HashMap<&'static str, Section<'a>>,
    last_line: usize,
}

impl<'a> Sections<'a> {
    fn split(text: &'a str) -> Result<Self, ParseError> {
        let mut map: HashMap<&'static str, Section<'a>> = HashMap::new();
        let mut current: Option<&'static str> = None;
        let mut last_line = 1;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            last_line = line;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            if let Some(rest) = content.strip_prefix('[') {
                let Some(name) = rest.strip_suffix(']') else {
                    return fail(line, format!("malformed section header `{content}`"));
                };
                let Some(&name) = SECTIONS.iter().find(|s| **s == name.trim()) else {
                    return fail(line, format!("unknown section [{}]", name.trim()));
                };
                if map.contains_key(name) {
                    return fail(line, format!("duplicate section [{name}]"));
                }
                map.insert(
                    name,
                    Section {
                        header: line,
                        rows: Vec::new(),
                    },
                );
                current = Some(name);
                continue;
            }
            let Some(name) = current else {
                return fail(line, "entry outside any section");
            };
            let tokens: Vec<&str> = content.split_whitespace().collect();
            if let Some(bad) = tokens.iter().find(|t| !is_valid_token(t)) {
                return fail(line, format!("invalid token `{bad}`"));
            }
            map.get_mut(name).expect("current section exists").rows.push((line, tokens));
        }
        Ok(Sections { map, last_line })
    }

    fn get(&self, name: &str) -> Result<&Section<'a>, ParseError> {
        match self.map.get(name) {
            Some(s) => Ok(s),
            None => fail(self.last_line, format!("missing section [{name}]")),
        }
    }

    fn token_set(&self, name: &str) -> Result<TokenSet, ParseError> {
        let section = self.get(name)?;
        let mut seen: HashMap<&str, usize> = HashMap::new();
        let mut tokens = Vec::new();
        for (line, row) in &section.rows {
            for &t in row {
                if let Some(first) = seen.insert(t, *line) {
                    return fail(*line, format!("duplicate token `{t}` in [{name}] (first on line {first})"));
                }
                tokens.push(t);
            }
        }
        if tokens.is_empty() {
            return fail(section.header, format!("section [{name}] is empty"));
        }
        TokenSet::new(tokens).or_else(|e| fail(section.header, e.to_string()))
    }

    /// Rows of a table section with exactly `arity` tokens each.
    fn table(&self, name: &str, arity: usize) -> Result<(&Section<'a>, Vec<(usize, &[&'a str])>), ParseError> {
        let section = self.get(name)?;
        let mut rows = Vec::new();
        for (line, row) in &section.rows {
            if row.len() != arity {
                return fail(*line, format!("[{name}] entries take {arity} tokens, found {}", row.len()));
            }
            rows.push((*line, row.as_slice()));
        }
        Ok((section, rows))
    }
}

fn lookup(set: &TokenSet, kind: &str, token: &str, line: usize) -> Result<usize, ParseError> {
    match set.position(token) {
        Some(i) => Ok(i),
        None => fail(line, format!("undeclared {kind} `{token}`")),
    }
}

pub fn parse_scheme(text: &str) -> Result<FiniteScheme, ParseError> {
    let sections = Sections::split(text)?;
    let symbols = sections.token_set("Y")?;
    let base = sections.token_set("X0")?;
    let first = sections.token_set("X1")?;

    let (phi_section, phi_rows) = sections.table("phi", 2)?;
    let mut phi: Vec<Option<usize>> = vec![None; base.len()];
    for (line, row) in phi_rows {
        let x0 = lookup(&base, "X0 point", row[0], line)?;
        let x1 = lookup(&first, "X1 point", row[1], line)?;
        if phi[x0].replace(x1).is_some() {
            return fail(line, format!("duplicate [phi] entry for `{}`", row[0]));
        }
    }
    let phi = phi
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Some(v) => Ok(*v),
            None => fail(phi_section.header, format!("missing [phi] entry for `{}`", base.get(i))),
        })
        .collect::<Result<Vec<_>, _>>()?;

    let (pi_section, pi_rows) = sections.table("pi", 3)?;
    let mut pi: Vec<Option<usize>> = vec![None; symbols.len() * base.len()];
    for (line, row) in pi_rows {
        let y = lookup(&symbols, "symbol", row[0], line)?;
        let x0 = lookup(&base, "X0 point", row[1], line)?;
        let x1 = lookup(&first, "X1 point", row[2], line)?;
        if pi[y * base.len() + x0].replace(x1).is_some() {
            return fail(line, format!("duplicate [pi] entry for `{} {}`", row[0], row[1]));
        }
    }
    let pi = pi
        .iter()
        .enumerate()
        .map(|(k, v)| match v {
            Some(v) => Ok(*v),
            None => fail(
                pi_section.header,
                format!(
                    "missing [pi] entry for `{} {}`",
                    symbols.get(k / base.len()),
                    base.get(k % base.len())
                ),
            ),
        })
        .collect::<Result<Vec<_>, _>>()?;

    FiniteScheme::new(symbols, base, first, phi, pi).or_else(|e| fail(sections.last_line, e.to_string()))
}

pub fn serialize_scheme(scheme: &FiniteScheme) -> String {
    let mut out = String::new();
    for (name, set) in [("Y", scheme.symbols()), ("X0", scheme.base()), ("X1", scheme.first())] {
        let _ = writeln!(out, "[{name}]\n{}", set.tokens().join(" "));
    }
    out.push_str("[phi]\n");
    for x0 in scheme.base_points() {
        let _ = writeln!(out, "{} {}", scheme.base().get(x0.index()), scheme.first().get(scheme.phi(x0)));
    }
    out.push_str("[pi]\n");
    for y in scheme.all_symbols() {
        for x0 in scheme.base_points() {
            let _ = writeln!(
                out,
                "{} {} {}",
                scheme.symbols().get(y.index()),
                scheme.base().get(x0.index()),
                scheme.first().get(scheme.pi(y, x0))
            );
        }
    }
    out
}

/// Reads `[Z]` and `[phiZ]`; any other sections in the file are ignored.
pub fn parse_pair(text: &str, scheme: &FiniteScheme) -> Result<Pair, ParseError> {
    let sections = Sections::split(text)?;
    let points = sections.token_set("Z")?;
    let (section, rows) = sections.table("phiZ", 2)?;
    let mut phi: Vec<Option<PointId>> = vec![None; scheme.base_len()];
    for (line, row) in rows {
        let x0 = lookup(scheme.base(), "X0 point", row[0], line)?;
        let z = lookup(&points, "Z point", row[1], line)?;
        if phi[x0].replace(PointId::from(z)).is_some() {
            return fail(line, format!("duplicate [phiZ] entry for `{}`", row[0]));
        }
    }
    let phi = phi
        .iter()
        .enumerate()
        .map(|(i, v)| match v {
            Some(v) => Ok(*v),
            None => fail(section.header, format!("missing [phiZ] entry for `{}`", scheme.base().get(i))),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Pair::new(scheme, points.tokens().to_vec(), phi).or_else(|e| fail(section.header, e.to_string()))
}

pub fn serialize_pair(scheme: &FiniteScheme, pair: &Pair) -> String {
    let mut out = format!("[Z]\n{}\n[phiZ]\n", pair.labels().join(" "));
    for x0 in scheme.base_points() {
        let _ = writeln!(out, "{} {}", scheme.base().get(x0.index()), pair.label(pair.phi()[x0.index()]));
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("bad address `{text}`: {reason}")]
pub struct AddressSyntaxError {
    pub text: String,
    pub reason: String,
}

/// Parses `u(v)`, denoting `u v v v ...`; `u` may be empty.
pub fn parse_address(text: &str, scheme: &FiniteScheme) -> Result<Address, AddressSyntaxError> {
    let err = |reason: &str| AddressSyntaxError {
        text: text.to_string(),
        reason: reason.to_string(),
    };
    let trimmed = text.trim();
    let (u, rest) = trimmed.split_once('(').ok_or_else(|| err("expected `u(v)`"))?;
    let v = rest.strip_suffix(')').ok_or_else(|| err("expected `)` at the end"))?;
    if v.contains(['(', ')']) || u.contains(')') {
        return Err(err("unbalanced parentheses"));
    }
    let u = scheme.parse_word(u).map_err(|e| err(&e.to_string()))?;
    let v = scheme.parse_word(v).map_err(|e| err(&e.to_string()))?;
    Address::new(u, v).map_err(|e| err(&e.to_string()))
}

pub fn format_address(scheme: &FiniteScheme, a: &Address) -> String {
    format!("{}({})", scheme.render_word(a.prefix()), scheme.render_word(a.period()))
}

/// How a word is shown in reports; the empty word is `ε`.
pub fn show_word(scheme: &FiniteScheme, w: &[crate::scheme::Symbol]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        scheme.render_word(w)
    }
}

/// The graph on `X_n` joining two points whenever they share a cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxGraph {
    pub level: usize,
    pub vertices: Vec<PointId>,
    /// Edge `(u, v)` with `u < v`, and the words of the cells containing both.
    pub edges: BTreeMap<(PointId, PointId), Vec<Word>>,
}

pub fn approximation_graph(tower: &Tower, n: usize) -> Result<ApproxGraph, TowerError> {
    let level = tower.level(n)?;
    let mut edges: BTreeMap<(PointId, PointId), Vec<Word>> = BTreeMap::new();
    for w in words(tower.scheme().symbol_count(), n) {
        let members: Vec<PointId> = tower.cell(&w)?.members.into_iter().collect();
        for (i, &a) in members.iter().enumerate() {
            for &b in &members[i + 1..] {
                edges.entry((a, b)).or_default().push(w.clone());
            }
        }
    }
    Ok(ApproxGraph {
        level: n,
        vertices: level.points().collect(),
        edges,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExportFormat {
    Dot,
    Structured,
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

#[derive(Serialize)]
struct StructuredLevel {
    index: usize,
    points: Vec<String>,
    representatives: Vec<String>,
    emb: Vec<u32>,
    /// One row per symbol.
    proj: Vec<Vec<u32>>,
}

#[derive(Serialize)]
struct StructuredCell {
    word: String,
    members: Vec<u32>,
}

#[derive(Serialize)]
struct StructuredEdge {
    source: u32,
    target: u32,
    words: Vec<String>,
}

#[derive(Serialize)]
struct StructuredGraph {
    vertices: Vec<u32>,
    edges: Vec<StructuredEdge>,
}

#[derive(Serialize)]
struct StructuredExport {
    symbols: Vec<String>,
    level: usize,
    levels: Vec<StructuredLevel>,
    cells: Vec<StructuredCell>,
    graph: StructuredGraph,
}

/// Renders the approximation graph of level `n`. The structured form also
/// carries levels `0..=n` with their maps and the cells of level `n`.
pub fn export_graph(tower: &Tower, n: usize, format: ExportFormat) -> Result<String, TowerError> {
    let graph = approximation_graph(tower, n)?;
    let scheme = tower.scheme();
    let level = tower.level(n)?;
    match format {
        ExportFormat::Dot => {
            let mut out = format!("graph level_{n} {{\n");
            for p in &graph.vertices {
                let _ = writeln!(out, "  {} [label=\"{}\"];", p.0, dot_escape(level.label(*p)));
            }
            for ((a, b), ws) in &graph.edges {
                let label: Vec<String> = ws.iter().map(|w| show_word(scheme, w)).collect();
                let _ = writeln!(out, "  {} -- {} [label=\"{}\"];", a.0, b.0, dot_escape(&label.join(" ")));
            }
            out.push_str("}\n");
            Ok(out)
        }
        ExportFormat::Structured => {
            let levels = tower.levels()[..=n]
                .iter()
                .map(|l| StructuredLevel {
                    index: l.index(),
                    points: l.labels().to_vec(),
                    representatives: l
                        .points()
                        .map(|p| {
                            let (w, x0) = l.representative(p);
                            format!("{}:{}", scheme.render_word(w), scheme.base().get(x0.index()))
                        })
                        .collect(),
                    emb: l.embedding().iter().map(|p| p.0).collect(),
                    proj: if l.index() == 0 {
                        Vec::new()
                    } else {
                        let prev = &tower.levels()[l.index() - 1];
                        scheme
                            .all_symbols()
                            .map(|y| prev.points().map(|x| l.project(y, x).expect("built").0).collect())
                            .collect()
                    },
                })
                .collect();
            let cells = words(scheme.symbol_count(), n)
                .map(|w| {
                    let c = tower.cell(&w)?;
                    Ok(StructuredCell {
                        word: scheme.render_word(&w),
                        members: c.members.iter().map(|p| p.0).collect(),
                    })
                })
                .collect::<Result<Vec<_>, TowerError>>()?;
            let export = StructuredExport {
                symbols: scheme.symbols().tokens().to_vec(),
                level: n,
                levels,
                cells,
                graph: StructuredGraph {
                    vertices: graph.vertices.iter().map(|p| p.0).collect(),
                    edges: graph
                        .edges
                        .iter()
                        .map(|((a, b), ws)| StructuredEdge {
                            source: a.0,
                            target: b.0,
                            words: ws.iter().map(|w| scheme.render_word(w)).collect(),
                        })
                        .collect(),
                },
            };
            let mut text = serde_json::to_string_pretty(&export).expect("plain data serializes");
            text.push('\n');
            Ok(text)
        }
    }
}
