//! Finite similarity schemes `X0 --phi--> X1 <--pi-- Y x X0`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Index of a symbol of `Y`, in declaration order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Symbol(pub u32);

/// Index of a point inside one level of a tower (or inside `X0`, `X1`, `Z`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PointId(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl PointId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<usize> for Symbol {
    fn from(i: usize) -> Self {
        Symbol(i as u32)
    }
}

impl From<usize> for PointId {
    fn from(i: usize) -> Self {
        PointId(i as u32)
    }
}

/// A finite word over `Y`, first symbol outermost.
pub type Word = Vec<Symbol>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("{0} must not be empty")]
    Empty(&'static str),
    #[error("duplicate token `{0}`")]
    DuplicateToken(String),
    #[error("invalid token `{0}`: tokens may not contain whitespace, '#', '(', ')' or ','")]
    InvalidToken(String),
    #[error("undeclared {kind} `{token}`")]
    Undeclared { kind: &'static str, token: String },
    #[error("missing entry for {0}")]
    MissingEntry(String),
    #[error("duplicate entry for {0}")]
    DuplicateEntry(String),
    #[error("malformed table: {0}")]
    Malformed(String),
}

pub(crate) fn is_valid_token(token: &str) -> bool {
    !token.is_empty()
        && !token
            .chars()
            .any(|c| c.is_whitespace() || matches!(c, '#' | '(' | ')' | ','))
}

/// Ordered list of distinct tokens. Order is declaration order and drives every
/// deterministic tie-break downstream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenSet {
    tokens: Vec<String>,
    index: HashMap<String, usize>,
}

/// The symbol space `Y`.
pub type SymbolSet = TokenSet;
/// A finite point space such as `X0`, `X1` or `Z`.
pub type PointSet = TokenSet;

impl TokenSet {
    pub fn new<I, S>(tokens: I) -> Result<Self, SchemeError>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut out = TokenSet {
            tokens: Vec::new(),
            index: HashMap::new(),
        };
        for token in tokens {
            let token = token.into();
            if !is_valid_token(&token) {
                return Err(SchemeError::InvalidToken(token));
            }
            if out.index.contains_key(&token) {
                return Err(SchemeError::DuplicateToken(token));
            }
            out.index.insert(token.clone(), out.tokens.len());
            out.tokens.push(token);
        }
        if out.tokens.is_empty() {
            return Err(SchemeError::Empty("token set"));
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn get(&self, i: usize) -> &str {
        &self.tokens[i]
    }

    pub fn position(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }
}

/// Which defining property of a scheme was violated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Rule {
    PhiInjective,
    PiSurjective,
}

impl Rule {
    pub fn id(self) -> &'static str {
        match self {
            Rule::PhiInjective => "phi-injective",
            Rule::PiSurjective => "pi-surjective",
        }
    }

    pub fn message(self) -> &'static str {
        match self {
            Rule::PhiInjective => "phi not injective",
            Rule::PiSurjective => "pi not surjective",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub rule: Rule,
    pub witness: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({}): {}", self.rule.message(), self.rule.id(), self.witness)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, rule: Rule) -> bool {
        self.violations.iter().any(|v| v.rule == rule)
    }
}

/// A symbol whose first-level cell meets `phi(X0)` in two distinct points.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DiscretenessWitness {
    pub symbol: Symbol,
    /// `X1` indices, both in the cell of `symbol` and in `phi(X0)`.
    pub first: usize,
    pub second: usize,
}

/// `X0 --phi--> X1 <--pi-- Y x X0` over finite sets.
///
/// Construction checks only that the tables are total and in range; whether
/// `phi` is injective and `pi` surjective is reported by [`FiniteScheme::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteScheme {
    symbols: SymbolSet,
    base: PointSet,
    first: PointSet,
    phi: Vec<usize>,
    pi: Vec<usize>,
}

impl FiniteScheme {
    /// `phi[x0]` is an `X1` index; `pi[y * |X0| + x0]` is an `X1` index.
    pub fn new(
        symbols: SymbolSet,
        base: PointSet,
        first: PointSet,
        phi: Vec<usize>,
        pi: Vec<usize>,
    ) -> Result<Self, SchemeError> {
        if phi.len() != base.len() {
            return Err(SchemeError::Malformed(format!(
                "phi has {} entries, X0 has {} points",
                phi.len(),
                base.len()
            )));
        }
        if pi.len() != symbols.len() * base.len() {
            return Err(SchemeError::Malformed(format!(
                "pi has {} entries, Y x X0 has {}",
                pi.len(),
                symbols.len() * base.len()
            )));
        }
        if let Some(&bad) = phi.iter().chain(pi.iter()).find(|&&x| x >= first.len()) {
            return Err(SchemeError::Malformed(format!(
                "X1 index {bad} out of range (|X1| = {})",
                first.len()
            )));
        }
        Ok(FiniteScheme {
            symbols,
            base,
            first,
            phi,
            pi,
        })
    }

    /// Builds a scheme from token tables, resolving every name.
    pub fn from_tokens(
        symbols: &[&str],
        base: &[&str],
        first: &[&str],
        phi: &[(&str, &str)],
        pi: &[(&str, &str, &str)],
    ) -> Result<Self, SchemeError> {
        let symbols = TokenSet::new(symbols.iter().copied())?;
        let base = TokenSet::new(base.iter().copied())?;
        let first = TokenSet::new(first.iter().copied())?;
        let lookup = |set: &TokenSet, kind: &'static str, tok: &str| {
            set.position(tok).ok_or_else(|| SchemeError::Undeclared {
                kind,
                token: tok.to_string(),
            })
        };

        let mut phi_table = vec![None; base.len()];
        for &(x0, x1) in phi {
            let i = lookup(&base, "X0 point", x0)?;
            let j = lookup(&first, "X1 point", x1)?;
            if phi_table[i].replace(j).is_some() {
                return Err(SchemeError::DuplicateEntry(format!("phi({x0})")));
            }
        }
        let mut pi_table = vec![None; symbols.len() * base.len()];
        for &(y, x0, x1) in pi {
            let s = lookup(&symbols, "symbol", y)?;
            let i = lookup(&base, "X0 point", x0)?;
            let j = lookup(&first, "X1 point", x1)?;
            if pi_table[s * base.len() + i].replace(j).is_some() {
                return Err(SchemeError::DuplicateEntry(format!("pi({y}, {x0})")));
            }
        }
        let phi = phi_table
            .iter()
            .enumerate()
            .map(|(i, v)| v.ok_or_else(|| SchemeError::MissingEntry(format!("phi({})", base.get(i)))))
            .collect::<Result<Vec<_>, _>>()?;
        let pi = pi_table
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.ok_or_else(|| {
                    SchemeError::MissingEntry(format!(
                        "pi({}, {})",
                        symbols.get(k / base.len()),
                        base.get(k % base.len())
                    ))
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        FiniteScheme::new(symbols, base, first, phi, pi)
    }

    /// The diagonal scheme on `n` symbols: `X0 = Y`, `X1` = unordered pairs,
    /// `phi(y) = {y, y}`, `pi(a, b) = {a, b}`.
    pub fn diagonal(n: usize) -> Self {
        assert!(n > 0, "diagonal scheme needs at least one symbol");
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let mut pairs = Vec::new();
        let mut pair_index = vec![vec![0; n]; n];
        for a in 0..n {
            for b in a..n {
                pair_index[a][b] = pairs.len();
                pair_index[b][a] = pairs.len();
                let kind = if a == b { "d" } else { "m" };
                if n <= 10 {
                    pairs.push(format!("{kind}{a}{b}"));
                } else {
                    pairs.push(format!("{kind}{a}_{b}"));
                }
            }
        }
        let symbols = TokenSet::new(names.clone()).expect("distinct names");
        let base = TokenSet::new(names).expect("distinct names");
        let first = TokenSet::new(pairs).expect("distinct names");
        let phi = (0..n).map(|a| pair_index[a][a]).collect();
        let pi = (0..n)
            .flat_map(|a| (0..n).map(move |b| (a, b)))
            .map(|(a, b)| pair_index[a][b])
            .collect();
        FiniteScheme::new(symbols, base, first, phi, pi).expect("well-formed tables")
    }

    pub fn symbols(&self) -> &SymbolSet {
        &self.symbols
    }

    pub fn base(&self) -> &PointSet {
        &self.base
    }

    pub fn first(&self) -> &PointSet {
        &self.first
    }

    pub fn symbol_count(&self) -> usize {
        self.symbols.len()
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn first_len(&self) -> usize {
        self.first.len()
    }

    pub fn all_symbols(&self) -> impl Iterator<Item = Symbol> + Clone {
        (0..self.symbols.len()).map(Symbol::from)
    }

    pub fn base_points(&self) -> impl Iterator<Item = PointId> + Clone {
        (0..self.base.len()).map(PointId::from)
    }

    /// `phi(x0)` as an `X1` index.
    pub fn phi(&self, x0: PointId) -> usize {
        self.phi[x0.index()]
    }

    /// `pi(y, x0)` as an `X1` index.
    pub fn pi(&self, y: Symbol, x0: PointId) -> usize {
        self.pi[y.index() * self.base.len() + x0.index()]
    }

    pub fn phi_table(&self) -> &[usize] {
        &self.phi
    }

    pub fn pi_table(&self) -> &[usize] {
        &self.pi
    }

    /// Lists every violated defining property with a concrete witness.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();

        let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); self.first.len()];
        for (x0, &x1) in self.phi.iter().enumerate() {
            preimages[x1].push(x0);
        }
        for (x1, pre) in preimages.iter().enumerate() {
            if let [a, b, ..] = pre[..] {
                violations.push(Violation {
                    rule: Rule::PhiInjective,
                    witness: format!(
                        "phi({}) = phi({}) = {}",
                        self.base.get(a),
                        self.base.get(b),
                        self.first.get(x1)
                    ),
                });
            }
        }

        let mut hit = vec![false; self.first.len()];
        for &x1 in &self.pi {
            hit[x1] = true;
        }
        for (x1, _) in hit.iter().enumerate().filter(|(_, &h)| !h) {
            violations.push(Violation {
                rule: Rule::PiSurjective,
                witness: format!("{} has no preimage under pi", self.first.get(x1)),
            });
        }

        ValidationReport { violations }
    }

    /// Points of `X0` taking part in an identification across distinct symbols:
    /// `x0` such that `pi(y, x0) = pi(y', x0')` for some `y != y'`.
    pub fn essential_part(&self) -> BTreeSet<PointId> {
        let mut by_image: Vec<Vec<(Symbol, PointId)>> = vec![Vec::new(); self.first.len()];
        for y in self.all_symbols() {
            for x0 in self.base_points() {
                by_image[self.pi(y, x0)].push((y, x0));
            }
        }
        let mut out = BTreeSet::new();
        for group in &by_image {
            for &(y, x0) in group {
                if group.iter().any(|&(y2, _)| y2 != y) {
                    out.insert(x0);
                }
            }
        }
        out
    }

    /// `None` when every first-level cell meets `phi(X0)` in at most one point.
    pub fn discreteness_witness(&self) -> Option<DiscretenessWitness> {
        let mut in_image = vec![false; self.first.len()];
        for &x1 in &self.phi {
            in_image[x1] = true;
        }
        for y in self.all_symbols() {
            let mut seen: Option<usize> = None;
            for x0 in self.base_points() {
                let x1 = self.pi(y, x0);
                if !in_image[x1] {
                    continue;
                }
                match seen {
                    None => seen = Some(x1),
                    Some(prev) if prev != x1 => {
                        let (first, second) = (prev.min(x1), prev.max(x1));
                        return Some(DiscretenessWitness {
                            symbol: y,
                            first,
                            second,
                        });
                    }
                    Some(_) => {}
                }
            }
        }
        None
    }

    pub fn is_discrete(&self) -> bool {
        self.discreteness_witness().is_none()
    }

    /// True when every symbol is a single character, in which case words are
    /// written by concatenation (`011`) rather than with commas (`s1,s2`).
    pub fn single_char_symbols(&self) -> bool {
        self.symbols.tokens().iter().all(|t| t.chars().count() == 1)
    }

    pub fn render_word(&self, word: &[Symbol]) -> String {
        let sep = if self.single_char_symbols() { "" } else { "," };
        word.iter()
            .map(|s| self.symbols.get(s.index()))
            .collect::<Vec<_>>()
            .join(sep)
    }

    pub fn parse_word(&self, text: &str) -> Result<Word, SchemeError> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Word::new());
        }
        let pieces: Vec<String> = if text.contains(',') || !self.single_char_symbols() {
            text.split(',').map(|s| s.trim().to_string()).collect()
        } else {
            text.chars().map(String::from).collect()
        };
        pieces
            .iter()
            .map(|p| {
                self.symbols
                    .position(p)
                    .map(Symbol::from)
                    .ok_or_else(|| SchemeError::Undeclared {
                        kind: "symbol",
                        token: p.clone(),
                    })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn non_fully_injective() -> FiniteScheme {
        FiniteScheme::from_tokens(
            &["0", "1"],
            &["a", "b"],
            &["a", "b0", "b1"],
            &[("a", "a"), ("b", "b0")],
            &[("0", "a", "a"), ("1", "a", "a"), ("0", "b", "b0"), ("1", "b", "b1")],
        )
        .unwrap()
    }

    #[test]
    fn diagonal_is_valid() {
        let s = FiniteScheme::diagonal(2);
        assert!(s.validate().ok());
        assert_eq!(s.first_len(), 3);
        assert_eq!(FiniteScheme::diagonal(3).first_len(), 6);
    }

    #[test]
    fn phi_collision_is_reported() {
        let s = FiniteScheme::from_tokens(
            &["0"],
            &["a", "b"],
            &["p", "q"],
            &[("a", "p"), ("b", "p")],
            &[("0", "a", "p"), ("0", "b", "q")],
        )
        .unwrap();
        let report = s.validate();
        assert!(!report.ok());
        assert!(report.has(Rule::PhiInjective));
        assert!(report.violations[0].witness.contains("phi(a) = phi(b)"));
    }

    #[test]
    fn missing_pi_image_is_reported() {
        let s = FiniteScheme::from_tokens(
            &["0"],
            &["a"],
            &["p", "q"],
            &[("a", "p")],
            &[("0", "a", "p")],
        )
        .unwrap();
        let report = s.validate();
        assert!(report.has(Rule::PiSurjective));
        assert!(!report.has(Rule::PhiInjective));
    }

    #[test]
    fn undeclared_token_is_a_construction_error() {
        let err = FiniteScheme::from_tokens(&["0"], &["a"], &["p"], &[("a", "zz")], &[("0", "a", "p")])
            .unwrap_err();
        assert!(matches!(err, SchemeError::Undeclared { .. }));
    }

    #[test]
    fn essential_part_examples() {
        let diag = FiniteScheme::diagonal(2);
        assert_eq!(
            diag.essential_part(),
            [PointId(0), PointId(1)].into_iter().collect()
        );
        assert_eq!(
            non_fully_injective().essential_part(),
            [PointId(0)].into_iter().collect()
        );
        let disjoint = FiniteScheme::from_tokens(
            &["0", "1"],
            &["a"],
            &["p", "q"],
            &[("a", "p")],
            &[("0", "a", "p"), ("1", "a", "q")],
        )
        .unwrap();
        assert!(disjoint.essential_part().is_empty());
    }

    #[test]
    fn discreteness_examples() {
        assert!(FiniteScheme::diagonal(2).is_discrete());
        let w = non_fully_injective().discreteness_witness().unwrap();
        assert_eq!(w.symbol, Symbol(0));
        assert_eq!((w.first, w.second), (0, 1));
        let single =
            FiniteScheme::from_tokens(&["0"], &["p"], &["p"], &[("p", "p")], &[("0", "p", "p")]).unwrap();
        assert!(single.is_discrete());
    }

    #[test]
    fn empty_essential_part_does_not_force_discreteness() {
        // Two disjoint copies of X0 glued nowhere, with phi landing in one copy.
        let s = FiniteScheme::from_tokens(
            &["0", "1"],
            &["a", "b"],
            &["0a", "0b", "1a", "1b"],
            &[("a", "0a"), ("b", "0b")],
            &[("0", "a", "0a"), ("0", "b", "0b"), ("1", "a", "1a"), ("1", "b", "1b")],
        )
        .unwrap();
        assert!(s.validate().ok());
        assert!(s.essential_part().is_empty());
        assert!(!s.is_discrete());
    }

    #[test]
    fn words_render_and_parse() {
        let s = FiniteScheme::diagonal(3);
        let w = s.parse_word("0120").unwrap();
        assert_eq!(w.len(), 4);
        assert_eq!(s.render_word(&w), "0120");
        assert_eq!(s.parse_word("0,1").unwrap(), vec![Symbol(0), Symbol(1)]);
        assert!(s.parse_word("03").is_err());

        let multi = FiniteScheme::from_tokens(
            &["s1", "s2"],
            &["a"],
            &["p", "q"],
            &[("a", "p")],
            &[("s1", "a", "p"), ("s2", "a", "q")],
        )
        .unwrap();
        let w = multi.parse_word("s2,s1").unwrap();
        assert_eq!(multi.render_word(&w), "s2,s1");
    }
}
