//! The functor on pairs `(Z, phi_Z: X0 -> Z)`, fixed points, shift maps and
//! the full-injectivity report.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::address::{step, Address, TransferState};
use crate::scheme::{FiniteScheme, PointId, Symbol, Word};
use crate::tower::{Tower, TowerError};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PairError {
    #[error("phiZ has {found} entries, expected one per X0 point ({expected})")]
    WrongArity { expected: usize, found: usize },
    #[error("phiZ sends a point to #{0}, outside Z")]
    OutOfRange(u32),
    #[error("Z must not be empty")]
    Empty,
}

/// A finite pair `(Z, phi_Z)`. `phi_Z` need not be injective; `injective`
/// records whether it is.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    labels: Vec<String>,
    phi: Vec<PointId>,
    injective: bool,
}

impl Pair {
    pub fn new(scheme: &FiniteScheme, labels: Vec<String>, phi: Vec<PointId>) -> Result<Self, PairError> {
        if labels.is_empty() {
            return Err(PairError::Empty);
        }
        if phi.len() != scheme.base_len() {
            return Err(PairError::WrongArity {
                expected: scheme.base_len(),
                found: phi.len(),
            });
        }
        if let Some(p) = phi.iter().find(|p| p.index() >= labels.len()) {
            return Err(PairError::OutOfRange(p.0));
        }
        let injective = phi.iter().collect::<HashSet<_>>().len() == phi.len();
        Ok(Pair { labels, phi, injective })
    }

    /// `(X0, id)`.
    pub fn identity(scheme: &FiniteScheme) -> Self {
        Pair {
            labels: scheme.base().tokens().to_vec(),
            phi: scheme.base_points().collect(),
            injective: true,
        }
    }

    /// `(X_n, phi_{n,0})`.
    pub fn from_level(tower: &Tower, n: usize) -> Result<Self, TowerError> {
        let level = tower.level(n)?;
        Ok(Pair {
            labels: level.labels().to_vec(),
            phi: level.base_embedding().to_vec(),
            injective: true,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p.index()]
    }

    pub fn position(&self, label: &str) -> Option<PointId> {
        self.labels.iter().position(|l| l == label).map(PointId::from)
    }

    pub fn phi(&self) -> &[PointId] {
        &self.phi
    }

    pub fn injective(&self) -> bool {
        self.injective
    }
}

/// `(Z^, phi_Z^)` together with the quotient map `Y x Z -> Z^` and the map
/// `X1 -> Z^` through which `phi_Z^` factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FunctorImage {
    pub pair: Pair,
    /// Indexed by `y * |Z| + z`.
    pub proj: Vec<PointId>,
    pub from_first: Vec<PointId>,
}

impl FunctorImage {
    pub fn project(&self, y: Symbol, z: PointId, source_len: usize) -> PointId {
        self.proj[y.index() * source_len + z.index()]
    }
}

/// Glues `|Y|` copies of `Z`: `(y, phi_Z(x0)) ~ (y', phi_Z(x0'))` whenever
/// `pi(y, x0) = pi(y', x0')`, closed transitively.
///
/// A point of `Z^` is labelled by the first `X1` token mapping onto it, or
/// `y:z` for its least member when no `X1` point does.
pub fn apply_functor(scheme: &FiniteScheme, pair: &Pair) -> FunctorImage {
    let m = pair.len();
    let mut uf = UnionFind::new(scheme.symbol_count() * m);
    let mut anchor: Vec<Option<usize>> = vec![None; scheme.first_len()];
    let mut first_cell = vec![0usize; scheme.first_len()];
    for y in scheme.all_symbols() {
        for x0 in scheme.base_points() {
            let slot = y.index() * m + pair.phi[x0.index()].index();
            let target = scheme.pi(y, x0);
            match anchor[target] {
                None => {
                    anchor[target] = Some(slot);
                    first_cell[target] = slot;
                }
                Some(a) => {
                    uf.union(a, slot);
                }
            }
        }
    }
    let classes = uf.classes();
    let mut proj = vec![PointId(0); scheme.symbol_count() * m];
    for (c, members) in classes.iter().enumerate() {
        for &k in members {
            proj[k] = PointId::from(c);
        }
    }
    let from_first: Vec<PointId> = first_cell.iter().map(|&k| proj[k]).collect();

    let mut labels: Vec<Option<String>> = vec![None; classes.len()];
    for (x1, &p) in from_first.iter().enumerate() {
        labels[p.index()].get_or_insert_with(|| scheme.first().get(x1).to_string());
    }
    let mut taken: HashSet<String> = labels.iter().flatten().cloned().collect();
    let labels: Vec<String> = labels
        .into_iter()
        .zip(&classes)
        .map(|(l, members)| {
            l.unwrap_or_else(|| {
                let k = members[0];
                let mut name = format!("{}:{}", scheme.symbols().get(k / m), pair.labels[k % m]);
                while !taken.insert(name.clone()) {
                    name.push('\'');
                }
                name
            })
        })
        .collect();

    let phi: Vec<PointId> = scheme.base_points().map(|x0| from_first[scheme.phi(x0)]).collect();
    let injective = phi.iter().collect::<HashSet<_>>().len() == phi.len();
    FunctorImage {
        pair: Pair { labels, phi, injective },
        proj,
        from_first,
    }
}

/// A bijection `theta: Z -> W` with `phi_W = theta o phi_Z`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsoWitness {
    pub theta: Vec<PointId>,
    pub image: FunctorImage,
}

impl IsoWitness {
    /// `a↦a c↦c`.
    pub fn describe(&self, source: &Pair) -> String {
        self.theta
            .iter()
            .enumerate()
            .map(|(z, &w)| format!("{}↦{}", source.labels[z], self.image.pair.label(w)))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// The first bijection `theta` with `to.phi = theta o from.phi`. Values on
/// `phi(X0)` are forced; the remaining points are matched in declaration order.
pub fn find_isomorphism(from: &Pair, to: &Pair) -> Option<Vec<PointId>> {
    if from.len() != to.len() || from.phi.len() != to.phi.len() {
        return None;
    }
    let mut theta: Vec<Option<PointId>> = vec![None; from.len()];
    let mut used = vec![false; to.len()];
    for (&z, &w) in from.phi.iter().zip(&to.phi) {
        match theta[z.index()] {
            Some(prev) if prev != w => return None,
            Some(_) => {}
            None => {
                if used[w.index()] {
                    return None;
                }
                used[w.index()] = true;
                theta[z.index()] = Some(w);
            }
        }
    }
    let mut free = (0..to.len()).filter(|&w| !used[w]).map(PointId::from);
    Some(
        theta
            .into_iter()
            .map(|t| t.or_else(|| free.next()).expect("sizes match"))
            .collect(),
    )
}

pub fn is_fixed_point(scheme: &FiniteScheme, pair: &Pair) -> Option<IsoWitness> {
    let image = apply_functor(scheme, pair);
    let theta = find_isomorphism(pair, &image.pair)?;
    Some(IsoWitness { theta, image })
}

/// `f_y: X_n -> X_{n+1}`, `x -> pi_{1,n}(y, x)`.
pub fn shift_map(tower: &Tower, y: Symbol, n: usize) -> Result<Vec<PointId>, TowerError> {
    if y.index() >= tower.scheme().symbol_count() {
        return Err(TowerError::UnknownSymbol(y.0));
    }
    let next = tower.level(n + 1)?;
    Ok(tower
        .level(n)?
        .points()
        .map(|x| next.project(y, x).expect("point of the previous level"))
        .collect())
}

pub fn shift_injective(tower: &Tower, y: Symbol, n: usize) -> Result<bool, TowerError> {
    let map = shift_map(tower, y, n)?;
    Ok(map.iter().collect::<HashSet<_>>().len() == map.len())
}

/// For each symbol, the point of `X1` where its cell meets `phi(X0)`, if any.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DiscreteCertificate {
    pub meets: Vec<Option<usize>>,
}

/// Two distinct points of one level whose `Gamma` sets share `address`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViolationWitness {
    pub level: usize,
    pub first: PointId,
    pub second: PointId,
    pub address: Address,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum InjectivityReport {
    CertifiedFullyInjective(DiscreteCertificate),
    Violation(ViolationWitness),
    NoViolationUpToDepth { depth: usize },
}

impl fmt::Display for InjectivityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            InjectivityReport::CertifiedFullyInjective(_) => "CERTIFIED_FULLY_INJECTIVE",
            InjectivityReport::Violation(_) => "VIOLATION",
            InjectivityReport::NoViolationUpToDepth { .. } => "NO_VIOLATION_UP_TO_DEPTH",
        })
    }
}

/// Discrete schemes are certified. Otherwise levels `0..depth` are scanned
/// for two points sharing a cell whose witness sets can be driven along a
/// common infinite path without either becoming empty.
pub fn injectivity_report(tower: &Tower, depth: usize) -> Result<InjectivityReport, TowerError> {
    let scheme = tower.scheme();
    if scheme.is_discrete() {
        let phi_image: HashSet<usize> = scheme.base_points().map(|x| scheme.phi(x)).collect();
        let meets = scheme
            .all_symbols()
            .map(|y| {
                scheme
                    .base_points()
                    .map(|x0| scheme.pi(y, x0))
                    .find(|p| phi_image.contains(p))
            })
            .collect();
        return Ok(InjectivityReport::CertifiedFullyInjective(DiscreteCertificate { meets }));
    }
    Ok(match find_violation(tower, depth)? {
        Some(v) => InjectivityReport::Violation(v),
        None => InjectivityReport::NoViolationUpToDepth { depth },
    })
}

/// The violation search of [`injectivity_report`], run regardless of discreteness.
pub fn find_violation(tower: &Tower, depth: usize) -> Result<Option<ViolationWitness>, TowerError> {
    let scheme = tower.scheme();
    if depth > 0 {
        tower.level(depth - 1)?;
    }
    let mut dead: HashSet<(TransferState, TransferState)> = HashSet::new();
    for n in 0..depth {
        for w in words(scheme.symbol_count(), n) {
            let mut seeds: BTreeMap<PointId, TransferState> = BTreeMap::new();
            for x0 in scheme.base_points() {
                seeds.entry(tower.project_word(&w, 0, x0)?).or_default().0.insert(x0);
            }
            let seeds: Vec<_> = seeds.into_iter().collect();
            for (i, (x, v)) in seeds.iter().enumerate() {
                for (x2, v2) in &seeds[i + 1..] {
                    if let Some((stem, cycle)) = lasso(scheme, (v.clone(), v2.clone()), &mut dead) {
                        let mut prefix = w.clone();
                        prefix.extend(stem);
                        return Ok(Some(ViolationWitness {
                            level: n,
                            first: *x,
                            second: *x2,
                            address: Address::new(prefix, cycle).expect("cycle is nonempty"),
                        }));
                    }
                }
            }
        }
    }
    Ok(None)
}

type PairState = (TransferState, TransferState);

/// Depth-first search for a reachable cycle among pairs of nonempty witness
/// sets. Returns the symbols of the stem and of the cycle.
fn lasso(scheme: &FiniteScheme, start: PairState, dead: &mut HashSet<PairState>) -> Option<(Word, Word)> {
    if dead.contains(&start) {
        return None;
    }
    let mut on_stack: HashMap<PairState, usize> = HashMap::new();
    let mut stack: Vec<(PairState, usize)> = vec![(start.clone(), 0)];
    let mut labels: Word = Vec::new();
    on_stack.insert(start, 0);
    while let Some((state, next)) = stack.last_mut() {
        if *next == scheme.symbol_count() {
            let (state, _) = stack.pop().expect("nonempty stack");
            on_stack.remove(&state);
            labels.pop();
            dead.insert(state);
            continue;
        }
        let y = Symbol::from(*next);
        *next += 1;
        let succ = (step(scheme, &state.0, y), step(scheme, &state.1, y));
        if succ.0.is_empty() || succ.1.is_empty() || dead.contains(&succ) {
            continue;
        }
        if let Some(&at) = on_stack.get(&succ) {
            let mut cycle = labels[at..].to_vec();
            cycle.push(y);
            return Some((labels[..at].to_vec(), cycle));
        }
        on_stack.insert(succ.clone(), stack.len());
        labels.push(y);
        stack.push((succ, 0));
    }
    None
}

/// All words of length `n` over `count` symbols, in lexicographic order.
pub(crate) fn words(count: usize, n: usize) -> impl Iterator<Item = Word> {
    let total = count.checked_pow(n as u32).unwrap_or(0);
    (0..total).map(move |mut k| {
        let mut w = vec![Symbol(0); n];
        for slot in w.iter_mut().rev() {
            *slot = Symbol::from(k % count);
            k /= count;
        }
        w
    })
}
