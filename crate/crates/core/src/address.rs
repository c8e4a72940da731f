//! Infinite addresses `u v v v ...`, transfer states and the relations they induce.
//!
//! For an address `a` and a point `x` of level `n`, the witness set at depth
//! `p >= n` is `V_p = { x0 : pi_{p,0}(a_1..a_p, x0) = phi_{p,n}(x) }`. It evolves
//! one symbol at a time through [`step`], and `a` lies in `Gamma_n(x)` exactly
//! when no witness set along `a` is empty.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::scheme::{FiniteScheme, PointId, Symbol, Word};
use crate::tower::{Tower, TowerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AddressError {
    #[error("period of an address must not be empty")]
    EmptyPeriod,
}

/// An ultimately periodic address `prefix . period^omega`, kept in normal
/// form: `period` is primitive and `prefix` is as short as possible, which
/// fixes the rotation of `period`. Two descriptions denote the same infinite
/// word exactly when their normal forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Address {
    prefix: Word,
    period: Word,
}

impl Address {
    pub fn new(prefix: Word, period: Word) -> Result<Self, AddressError> {
        if period.is_empty() {
            return Err(AddressError::EmptyPeriod);
        }
        let mut prefix = prefix;
        let mut period = primitive_root(period);
        while let Some(&last) = prefix.last() {
            if last != *period.last().expect("period is nonempty") {
                break;
            }
            prefix.pop();
            period.rotate_right(1);
        }
        Ok(Address { prefix, period })
    }

    /// `y^omega`.
    pub fn constant(y: Symbol) -> Self {
        Address {
            prefix: Word::new(),
            period: vec![y],
        }
    }

    pub fn prefix(&self) -> &[Symbol] {
        &self.prefix
    }

    pub fn period(&self) -> &[Symbol] {
        &self.period
    }

    /// The `i`-th symbol, counting from 0.
    pub fn symbol_at(&self, i: usize) -> Symbol {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.period[(i - self.prefix.len()) % self.period.len()]
        }
    }

    pub fn head(&self) -> Symbol {
        self.symbol_at(0)
    }

    /// The truncation to the first `p` symbols.
    pub fn truncate(&self, p: usize) -> Word {
        (0..p).map(|i| self.symbol_at(i)).collect()
    }

    /// The address with its first symbol removed.
    pub fn tail(&self) -> Address {
        if self.prefix.is_empty() {
            let mut period = self.period.clone();
            period.rotate_left(1);
            Address {
                prefix: Word::new(),
                period,
            }
        } else {
            Address::new(self.prefix[1..].to_vec(), self.period.clone()).expect("period is nonempty")
        }
    }

    /// `y` followed by this address.
    pub fn cons(&self, y: Symbol) -> Address {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(y);
        prefix.extend_from_slice(&self.prefix);
        Address::new(prefix, self.period.clone()).expect("period is nonempty")
    }

    fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.prefix.iter().chain(self.period.iter())
    }
}

fn primitive_root(v: Word) -> Word {
    let n = v.len();
    for d in (1..=n).filter(|d| n.is_multiple_of(*d)) {
        if (d..n).all(|i| v[i] == v[i - d]) {
            return v[..d].to_vec();
        }
    }
    v
}

/// A witness set: a subset of `X0`.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct TransferState(pub BTreeSet<PointId>);

impl TransferState {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, x0: PointId) -> bool {
        self.0.contains(&x0)
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.0.iter().copied()
    }
}

impl FromIterator<PointId> for TransferState {
    fn from_iter<I: IntoIterator<Item = PointId>>(iter: I) -> Self {
        TransferState(iter.into_iter().collect())
    }
}

/// `{ x0 : pi(y, x0) in phi(V) }`.
pub fn step(scheme: &FiniteScheme, v: &TransferState, y: Symbol) -> TransferState {
    if v.is_empty() {
        return TransferState::default();
    }
    let mut image = vec![false; scheme.first_len()];
    for x in v.iter() {
        image[scheme.phi(x)] = true;
    }
    scheme
        .base_points()
        .filter(|&x0| image[scheme.pi(y, x0)])
        .collect()
}

/// `{ x0 : pi_{n,0}(w, x0) = x }` for `w` of length `n`.
pub fn seed(tower: &Tower, w: &[Symbol], x: PointId) -> Result<TransferState, TowerError> {
    tower.level(w.len())?;
    tower
        .scheme()
        .base_points()
        .map(|x0| tower.project_word(w, 0, x0).map(|p| (x0, p)))
        .filter_map(|r| match r {
            Ok((x0, p)) if p == x => Some(Ok(x0)),
            Ok(_) => None,
            Err(e) => Some(Err(e)),
        })
        .collect::<Result<_, _>>()
}

/// Depth-`depth` truncation of `Gamma_n(x)`: every word `w` with
/// `n <= |w| <= depth` and `phi_{|w|,n}(x)` in `C(w)`, with its witness set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShadowTree {
    pub level: usize,
    pub point: PointId,
    pub depth: usize,
    pub nodes: BTreeMap<Word, TransferState>,
}

impl ShadowTree {
    pub fn nodes_at(&self, k: usize) -> impl Iterator<Item = (&Word, &TransferState)> {
        self.nodes.iter().filter(move |(w, _)| w.len() == k)
    }

    pub fn leaves(&self) -> Vec<&Word> {
        self.nodes_at(self.depth).map(|(w, _)| w).collect()
    }

    pub fn contains(&self, w: &[Symbol]) -> bool {
        self.nodes.contains_key(w)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

pub fn shadow(tower: &Tower, n: usize, x: PointId, depth: usize) -> Result<ShadowTree, TowerError> {
    if depth < n {
        return Err(TowerError::DepthBelowLevel { depth, level: n });
    }
    let scheme = tower.scheme();
    let mut roots: BTreeMap<Word, TransferState> = BTreeMap::new();
    for (w, x0) in tower.addresses(n, x)? {
        roots.entry(w).or_default().0.insert(x0);
    }
    let mut nodes = roots.clone();
    let mut frontier: Vec<(Word, TransferState)> = roots.into_iter().collect();
    for _ in n..depth {
        let mut next = Vec::new();
        for (w, v) in &frontier {
            for y in scheme.all_symbols() {
                let v2 = step(scheme, v, y);
                if v2.is_empty() {
                    continue;
                }
                let mut w2 = w.clone();
                w2.push(y);
                nodes.insert(w2.clone(), v2.clone());
                next.push((w2, v2));
            }
        }
        frontier = next;
    }
    Ok(ShadowTree {
        level: n,
        point: x,
        depth,
        nodes,
    })
}

fn check_symbols(tower: &Tower, a: &Address) -> Result<(), TowerError> {
    let ny = tower.scheme().symbol_count();
    match a.symbols().find(|s| s.index() >= ny) {
        Some(s) => Err(TowerError::UnknownSymbol(s.0)),
        None => Ok(()),
    }
}

/// Whether `a` lies in `Gamma_n(x)`. Exact: the walk through witness sets is
/// eventually periodic, so it either hits the empty set or repeats a state.
pub fn gamma_contains(tower: &Tower, n: usize, x: PointId, a: &Address) -> Result<bool, TowerError> {
    check_symbols(tower, a)?;
    let mut v = seed(tower, &a.truncate(n), x)?;
    let scheme = tower.scheme();
    let (u, period) = (a.prefix().len(), a.period().len());
    let mut seen: HashSet<(usize, TransferState)> = HashSet::new();
    let mut pos = n;
    loop {
        if v.is_empty() {
            return Ok(false);
        }
        if pos >= u && !seen.insert(((pos - u) % period, v.clone())) {
            return Ok(true);
        }
        v = step(scheme, &v, a.symbol_at(pos));
        pos += 1;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Related,
    Unrelated,
    UnknownUpToBound,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Related => "RELATED",
            Verdict::Unrelated => "UNRELATED",
            Verdict::UnknownUpToBound => "UNKNOWN_UP_TO_BOUND",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Witness {
    /// The two addresses are the same infinite word.
    Identical,
    /// Both addresses lie in `Gamma_level(point)`.
    Shared { level: usize, point: PointId },
    /// Equal heads, and both tails lie in `Gamma_level(point)`.
    SameHead { level: usize, point: PointId },
    /// `pi(head1, x0) = pi(head2, x0_prime)`, with the tails in
    /// `Gamma_0(x0)` and `Gamma_0(x0_prime)`.
    Glued { x0: PointId, x0_prime: PointId },
}

impl Witness {
    /// A level and point whose `Gamma` set contains both full addresses,
    /// when the tower is tall enough to name it. `a` is the first address.
    pub fn gamma_point(&self, tower: &Tower, a: &Address) -> Option<(usize, PointId)> {
        match *self {
            Witness::Identical => None,
            Witness::Shared { level, point } => Some((level, point)),
            Witness::SameHead { level, point } => tower
                .level(level + 1)
                .ok()?
                .project(a.head(), point)
                .map(|p| (level + 1, p)),
            Witness::Glued { x0, .. } => tower.level(1).ok()?.project(a.head(), x0).map(|p| (1, p)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RelationEvidence {
    pub verdict: Verdict,
    pub witness: Option<Witness>,
    /// For `Unrelated`, the level at which the cells of the truncations are
    /// disjoint; otherwise the level bound searched.
    pub bound: usize,
}

impl RelationEvidence {
    fn related(witness: Witness, bound: usize) -> Self {
        RelationEvidence {
            verdict: Verdict::Related,
            witness: Some(witness),
            bound,
        }
    }

    fn without_witness(verdict: Verdict, bound: usize) -> Self {
        RelationEvidence {
            verdict,
            witness: None,
            bound,
        }
    }

    pub fn is_definite(&self) -> bool {
        self.verdict != Verdict::UnknownUpToBound
    }
}

/// Searches levels `0..=max_level` for a point whose `Gamma` set contains
/// both addresses.
///
/// Disjoint truncation cells at level `m` stay disjoint at every level above
/// `m`, and a witness at level `n` yields one at every level above `n`, so a
/// disjoint pair of cells rules out witnesses at every level.
pub fn related(tower: &Tower, a1: &Address, a2: &Address, max_level: usize) -> Result<RelationEvidence, TowerError> {
    check_symbols(tower, a1)?;
    check_symbols(tower, a2)?;
    if a1 == a2 {
        return Ok(RelationEvidence::related(Witness::Identical, 0));
    }
    tower.level(max_level)?;
    for n in 0..=max_level {
        let c1 = tower.cell(&a1.truncate(n))?.members;
        let c2 = tower.cell(&a2.truncate(n))?.members;
        let mut shared = c1.intersection(&c2).peekable();
        if shared.peek().is_none() {
            return Ok(RelationEvidence::without_witness(Verdict::Unrelated, n));
        }
        for &x in shared {
            if gamma_contains(tower, n, x, a1)? && gamma_contains(tower, n, x, a2)? {
                return Ok(RelationEvidence::related(Witness::Shared { level: n, point: x }, n));
            }
        }
    }
    Ok(RelationEvidence::without_witness(Verdict::UnknownUpToBound, max_level))
}

/// The two-case relation: equal heads with related tails, or heads glued
/// through `X0` with each tail in the `Gamma_0` set of its gluing point.
/// The second case is decided exactly; the first inherits the bound of [`related`].
pub fn hat_related(tower: &Tower, a1: &Address, a2: &Address, max_level: usize) -> Result<RelationEvidence, TowerError> {
    check_symbols(tower, a1)?;
    check_symbols(tower, a2)?;
    if a1 == a2 {
        return Ok(RelationEvidence::related(Witness::Identical, 0));
    }
    let (t1, t2) = (a1.tail(), a2.tail());
    let mut first_case_open = false;
    if a1.head() == a2.head() {
        let tails = related(tower, &t1, &t2, max_level)?;
        match (tails.verdict, tails.witness) {
            (Verdict::Related, Some(Witness::Shared { level, point })) => {
                return Ok(RelationEvidence::related(Witness::SameHead { level, point }, max_level));
            }
            (Verdict::UnknownUpToBound, _) => first_case_open = true,
            _ => {}
        }
    }
    let scheme = tower.scheme();
    for x0 in scheme.base_points() {
        for x0_prime in scheme.base_points() {
            if scheme.pi(a1.head(), x0) != scheme.pi(a2.head(), x0_prime) {
                continue;
            }
            if gamma_contains(tower, 0, x0, &t1)? && gamma_contains(tower, 0, x0_prime, &t2)? {
                return Ok(RelationEvidence::related(Witness::Glued { x0, x0_prime }, max_level));
            }
        }
    }
    let verdict = if first_case_open {
        Verdict::UnknownUpToBound
    } else {
        Verdict::Unrelated
    };
    Ok(RelationEvidence::without_witness(verdict, max_level))
}
