//! The approximation tower `X0 -> X1 -> X2 -> ...`.
//!
//! Level `n + 1` is the quotient of `Y x X_n` by the equivalence relation
//! generated by `(y, phi_{n,0}(x0)) ~ (y', phi_{n,0}(x0'))` whenever
//! `pi(y, x0) = pi(y', x0')`. Point ids inside a level are ordered by the
//! lexicographically least `(word, x0)` in `Y^n x X0` projecting onto them,
//! so ids are reproducible across runs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::scheme::{FiniteScheme, PointId, SchemeError, Symbol, ValidationReport, Word};
use crate::union_find::UnionFind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TowerError {
    #[error("scheme is not valid: {}", describe_report(.0))]
    InvalidScheme(ValidationReport),
    #[error("level {level} is not built (tower depth {depth})")]
    LevelNotBuilt { level: usize, depth: usize },
    #[error("unknown point `{point}` at level {level}")]
    UnknownPoint { level: usize, point: String },
    #[error("symbol index {0} is not in Y")]
    UnknownSymbol(u32),
    #[error("word has length {found}, expected {expected}")]
    WordLength { expected: usize, found: usize },
    #[error("depth {depth} is below level {level}")]
    DepthBelowLevel { depth: usize, level: usize },
    #[error("pair equal")]
    PairEqual,
    #[error("projections differ")]
    ProjectionsDiffer,
    #[error("no decomposition: {0}")]
    NoDecomposition(String),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

fn describe_report(report: &ValidationReport) -> String {
    report
        .violations
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

/// One level `X_n` of the tower, with its maps from the previous level.
#[derive(Clone, Debug)]
pub struct Level {
    index: usize,
    prev_len: usize,
    labels: Vec<String>,
    label_index: HashMap<String, PointId>,
    representatives: Vec<(Word, PointId)>,
    emb: Vec<PointId>,
    proj: Vec<PointId>,
    fibers: Vec<Vec<(Symbol, PointId)>>,
    from_base: Vec<PointId>,
    base_preimage: Vec<Option<PointId>>,
    fresh: Vec<bool>,
}

impl Level {
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> + Clone {
        (0..self.labels.len()).map(PointId::from)
    }

    pub fn label(&self, p: PointId) -> &str {
        &self.labels[p.index()]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn by_label(&self, label: &str) -> Option<PointId> {
        self.label_index.get(label).copied()
    }

    /// Lexicographically least `(word, x0)` with `pi_{n,0}(word, x0) = p`.
    pub fn representative(&self, p: PointId) -> (&[Symbol], PointId) {
        let (w, x0) = &self.representatives[p.index()];
        (w, *x0)
    }

    /// `phi_{n,n-1}` as a table over `X_{n-1}`; empty at level 0.
    pub fn embedding(&self) -> &[PointId] {
        &self.emb
    }

    /// `pi_{1,n-1}(y, x)`; `None` at level 0 or out of range.
    pub fn project(&self, y: Symbol, x: PointId) -> Option<PointId> {
        if self.index == 0 || x.index() >= self.prev_len {
            return None;
        }
        self.proj.get(y.index() * self.prev_len + x.index()).copied()
    }

    /// Every `(y, x)` in `Y x X_{n-1}` with `pi_{1,n-1}(y, x) = p`.
    pub fn fiber(&self, p: PointId) -> &[(Symbol, PointId)] {
        self.fibers.get(p.index()).map_or(&[], Vec::as_slice)
    }

    /// `phi_{n,0}` as a table over `X0`.
    pub fn base_embedding(&self) -> &[PointId] {
        &self.from_base
    }

    /// The `x0` with `phi_{n,0}(x0) = p`, if any.
    pub fn base_preimage(&self, p: PointId) -> Option<PointId> {
        self.base_preimage.get(p.index()).copied().flatten()
    }

    /// True when `p` is not in `phi_{n,n-1}(X_{n-1})`. Every point of `X0` is fresh.
    pub fn is_fresh(&self, p: PointId) -> bool {
        self.fresh[p.index()]
    }

    fn proj_unchecked(&self, y: Symbol, x: PointId) -> PointId {
        self.proj[y.index() * self.prev_len + x.index()]
    }
}

/// A cell `C(w) = { pi_{n,0}(w, x0) : x0 in X0 }` of level `|w|`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CellSet {
    pub word: Word,
    pub members: BTreeSet<PointId>,
}

impl CellSet {
    pub fn level(&self) -> usize {
        self.word.len()
    }
}

/// Output of [`Tower::decompose`]: the pair first differs at symbol `k`
/// (1-based), where both tails sit in the image of `X0` at `xi0` and
/// `xi0_prime` and `pi(w_k, xi0) = pi(w'_k, xi0_prime)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BasicEquivalenceWitness {
    pub k: usize,
    pub xi0: PointId,
    pub xi0_prime: PointId,
}

#[derive(Clone, Debug)]
pub struct Tower {
    scheme: FiniteScheme,
    levels: Vec<Level>,
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sizes: Vec<String> = self.sizes().iter().map(|s| s.to_string()).collect();
        write!(f, "levels: {}", sizes.join(" "))
    }
}

impl Tower {
    /// A tower holding level 0 only. Rejects schemes that fail validation.
    pub fn new(scheme: FiniteScheme) -> Result<Self, TowerError> {
        let report = scheme.validate();
        if !report.ok() {
            return Err(TowerError::InvalidScheme(report));
        }
        let n0 = scheme.base_len();
        let labels: Vec<String> = scheme.base().tokens().to_vec();
        let level0 = Level {
            index: 0,
            prev_len: 0,
            label_index: index_labels(&labels),
            labels,
            representatives: scheme.base_points().map(|x| (Word::new(), x)).collect(),
            emb: Vec::new(),
            proj: Vec::new(),
            fibers: vec![Vec::new(); n0],
            from_base: scheme.base_points().collect(),
            base_preimage: scheme.base_points().map(Some).collect(),
            fresh: vec![true; n0],
        };
        Ok(Tower {
            scheme,
            levels: vec![level0],
        })
    }

    /// A tower with levels `0..=depth`.
    pub fn build(scheme: FiniteScheme, depth: usize) -> Result<Self, TowerError> {
        Ok(Tower::new(scheme)?.extend_to(depth))
    }

    /// Adds one level.
    pub fn extend(mut self) -> Self {
        let next = self.next_level();
        self.levels.push(next);
        self
    }

    pub fn extend_to(mut self, depth: usize) -> Self {
        while self.depth() < depth {
            self = self.extend();
        }
        self
    }

    pub fn scheme(&self) -> &FiniteScheme {
        &self.scheme
    }

    /// Index of the highest built level.
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    pub fn level(&self, n: usize) -> Result<&Level, TowerError> {
        self.levels.get(n).ok_or(TowerError::LevelNotBuilt {
            level: n,
            depth: self.depth(),
        })
    }

    fn check_point(&self, n: usize, p: PointId) -> Result<&Level, TowerError> {
        let level = self.level(n)?;
        if p.index() >= level.len() {
            return Err(TowerError::UnknownPoint {
                level: n,
                point: format!("#{}", p.0),
            });
        }
        Ok(level)
    }

    fn check_word(&self, w: &[Symbol]) -> Result<(), TowerError> {
        match w.iter().find(|s| s.index() >= self.scheme.symbol_count()) {
            Some(s) => Err(TowerError::UnknownSymbol(s.0)),
            None => Ok(()),
        }
    }

    fn next_level(&self) -> Level {
        let scheme = &self.scheme;
        let prev = self.levels.last().expect("level 0 always exists");
        let index = prev.index + 1;
        let m = prev.len();
        let ny = scheme.symbol_count();
        let cell = |y: Symbol, x: PointId| y.index() * m + x.index();

        let mut uf = UnionFind::new(ny * m);
        let mut anchor: Vec<Option<usize>> = vec![None; scheme.first_len()];
        for y in scheme.all_symbols() {
            for x0 in scheme.base_points() {
                let slot = cell(y, prev.from_base[x0.index()]);
                match anchor[scheme.pi(y, x0)] {
                    None => anchor[scheme.pi(y, x0)] = Some(slot),
                    Some(a) => {
                        uf.union(a, slot);
                    }
                }
            }
        }

        let classes = uf.classes();
        let mut reps: Vec<(Word, PointId)> = classes
            .iter()
            .map(|members| {
                let (y, w, x0) = members
                    .iter()
                    .map(|&k| {
                        let (w, x0) = &prev.representatives[k % m];
                        (k / m, w, *x0)
                    })
                    .min()
                    .expect("classes are nonempty");
                let mut word = Vec::with_capacity(w.len() + 1);
                word.push(Symbol::from(y));
                word.extend_from_slice(w);
                (word, x0)
            })
            .collect();

        let mut order: Vec<usize> = (0..classes.len()).collect();
        order.sort_by(|&a, &b| reps[a].cmp(&reps[b]));
        let mut rank = vec![0usize; classes.len()];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }

        let mut proj = vec![PointId(0); ny * m];
        for (c, members) in classes.iter().enumerate() {
            for &k in members {
                proj[k] = PointId::from(rank[c]);
            }
        }
        let mut sorted_reps = vec![(Word::new(), PointId(0)); classes.len()];
        for (c, rep) in reps.drain(..).enumerate() {
            sorted_reps[rank[c]] = rep;
        }
        let representatives = sorted_reps;

        // phi_{n+1,n}: level 1 uses phi directly; above that the square
        // phi_{n+1,n} o pi_{1,n-1} = pi_{1,n} o (id x phi_{n,n-1}) defines it.
        let emb: Vec<PointId> = if index == 1 {
            scheme
                .base_points()
                .map(|x0| {
                    let target = scheme.phi(x0);
                    let (y, x) = scheme
                        .all_symbols()
                        .flat_map(|y| scheme.base_points().map(move |x| (y, x)))
                        .find(|&(y, x)| scheme.pi(y, x) == target)
                        .expect("pi is surjective");
                    proj[cell(y, x)]
                })
                .collect()
        } else {
            prev.points()
                .map(|p| {
                    let &(y, x) = prev.fiber(p).first().expect("projection is surjective");
                    proj[cell(y, prev.emb[x.index()])]
                })
                .collect()
        };

        let from_base: Vec<PointId> = prev.from_base.iter().map(|&p| emb[p.index()]).collect();
        let len = representatives.len();
        let mut base_preimage = vec![None; len];
        for (x0, &p) in from_base.iter().enumerate() {
            base_preimage[p.index()] = Some(PointId::from(x0));
        }
        let mut fresh = vec![true; len];
        for &p in &emb {
            fresh[p.index()] = false;
        }
        let mut fibers = vec![Vec::new(); len];
        for (k, &p) in proj.iter().enumerate() {
            fibers[p.index()].push((Symbol::from(k / m), PointId::from(k % m)));
        }

        let labels: Vec<String> = representatives
            .iter()
            .map(|(w, x0)| {
                if index == 1 {
                    scheme.first().get(scheme.pi(w[0], *x0)).to_string()
                } else {
                    format!("{}:{}", scheme.render_word(w), scheme.base().get(x0.index()))
                }
            })
            .collect();

        Level {
            index,
            prev_len: m,
            label_index: index_labels(&labels),
            labels,
            representatives,
            emb,
            proj,
            fibers,
            from_base,
            base_preimage,
            fresh,
        }
    }

    /// `phi_{n,m}(p)` for `m <= n`.
    pub fn embed(&self, m: usize, n: usize, p: PointId) -> Result<PointId, TowerError> {
        if n < m {
            return Err(TowerError::DepthBelowLevel { depth: n, level: m });
        }
        self.check_point(m, p)?;
        self.level(n)?;
        Ok((m + 1..=n).fold(p, |x, k| self.levels[k].emb[x.index()]))
    }

    /// `pi_{p,q}(w, x)` where `p = |w|` and `x` is a point of level `q`.
    pub fn project_word(&self, w: &[Symbol], q: usize, x: PointId) -> Result<PointId, TowerError> {
        self.check_word(w)?;
        self.check_point(q, x)?;
        self.level(q + w.len())?;
        Ok(self.project_unchecked(w, q, x))
    }

    pub(crate) fn project_unchecked(&self, w: &[Symbol], q: usize, x: PointId) -> PointId {
        w.iter()
            .rev()
            .enumerate()
            .fold(x, |cur, (i, &y)| self.levels[q + i + 1].proj_unchecked(y, cur))
    }

    /// The cell `C(w)` in level `|w|`.
    pub fn cell(&self, w: &[Symbol]) -> Result<CellSet, TowerError> {
        self.check_word(w)?;
        self.level(w.len())?;
        let members = self
            .scheme
            .base_points()
            .map(|x0| self.project_unchecked(w, 0, x0))
            .collect();
        Ok(CellSet {
            word: w.to_vec(),
            members,
        })
    }

    /// Every `(w, x0)` in `Y^n x X0` with `pi_{n,0}(w, x0) = x`, in
    /// lexicographic order.
    pub fn addresses(&self, n: usize, x: PointId) -> Result<Vec<(Word, PointId)>, TowerError> {
        self.check_point(n, x)?;
        let mut frontier: Vec<(Word, PointId)> = vec![(Word::new(), x)];
        for k in (1..=n).rev() {
            let level = &self.levels[k];
            let mut next = Vec::new();
            for (w, p) in &frontier {
                for &(y, q) in level.fiber(*p) {
                    let mut w2 = w.clone();
                    w2.push(y);
                    next.push((w2, q));
                }
            }
            frontier = next;
        }
        frontier.sort();
        Ok(frontier)
    }

    /// Resolves a point of level `n` written either as its label or as
    /// `word:x0`, which names `pi_{n,0}(word, x0)`.
    pub fn point(&self, n: usize, text: &str) -> Result<PointId, TowerError> {
        let level = self.level(n)?;
        if let Some(p) = level.by_label(text) {
            return Ok(p);
        }
        let unknown = || TowerError::UnknownPoint {
            level: n,
            point: text.to_string(),
        };
        let (word, x0) = text.rsplit_once(':').ok_or_else(unknown)?;
        let x0 = self.scheme.base().position(x0).ok_or_else(unknown)?;
        let word = self.scheme.parse_word(word).map_err(|_| unknown())?;
        if word.len() != n {
            return Err(unknown());
        }
        self.project_word(&word, 0, PointId::from(x0))
    }

    pub fn label(&self, n: usize, p: PointId) -> &str {
        self.levels[n].label(p)
    }

    /// Splits an identified pair following the inductive argument: peel the
    /// first symbol, and stop at the first position where the one-step pairs
    /// in `Y x X_{n-k}` differ.
    ///
    /// `tail_level` is the level `n - m` of both tail points; `m` is the word length.
    pub fn decompose(
        &self,
        tail_level: usize,
        lhs: (&[Symbol], PointId),
        rhs: (&[Symbol], PointId),
    ) -> Result<BasicEquivalenceWitness, TowerError> {
        let (w, xi) = lhs;
        let (w2, xi2) = rhs;
        if w.len() != w2.len() {
            return Err(TowerError::WordLength {
                expected: w.len(),
                found: w2.len(),
            });
        }
        if w == w2 && xi == xi2 {
            return Err(TowerError::PairEqual);
        }
        let m = w.len();
        if self.project_word(w, tail_level, xi)? != self.project_word(w2, tail_level, xi2)? {
            return Err(TowerError::ProjectionsDiffer);
        }
        let n = tail_level + m;
        for k in 1..=m {
            let below = n - k;
            let t = self.project_unchecked(&w[k..], tail_level, xi);
            let t2 = self.project_unchecked(&w2[k..], tail_level, xi2);
            if (w[k - 1], t) == (w2[k - 1], t2) {
                continue;
            }
            let level = &self.levels[below];
            let (Some(xi0), Some(xi0_prime)) = (level.base_preimage(t), level.base_preimage(t2)) else {
                return Err(TowerError::NoDecomposition(format!(
                    "tails at k={k} are not both in the image of X0"
                )));
            };
            if self.scheme.pi(w[k - 1], xi0) != self.scheme.pi(w2[k - 1], xi0_prime) {
                return Err(TowerError::NoDecomposition(format!(
                    "pi differs on the glued pair at k={k}"
                )));
            }
            return Ok(BasicEquivalenceWitness { k, xi0, xi0_prime });
        }
        Err(TowerError::NoDecomposition("pairs never differ".to_string()))
    }
}

fn index_labels(labels: &[String]) -> HashMap<String, PointId> {
    labels
        .iter()
        .enumerate()
        .map(|(i, l)| (l.clone(), PointId::from(i)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nfi() -> FiniteScheme {
        FiniteScheme::from_tokens(
            &["0", "1"],
            &["a", "b"],
            &["a", "b0", "b1"],
            &[("a", "a"), ("b", "b0")],
            &[("0", "a", "a"), ("1", "a", "a"), ("0", "b", "b0"), ("1", "b", "b1")],
        )
        .unwrap()
    }

    fn w(s: &FiniteScheme, text: &str) -> Word {
        s.parse_word(text).unwrap()
    }

    #[test]
    fn diagonal_level_sizes() {
        let t = Tower::build(FiniteScheme::diagonal(2), 4).unwrap();
        assert_eq!(t.sizes(), vec![2, 3, 5, 9, 17]);
        let t = Tower::build(FiniteScheme::diagonal(3), 3).unwrap();
        assert_eq!(t.sizes(), vec![3, 6, 15, 42]);
    }

    #[test]
    fn level_one_is_x1() {
        let s = nfi();
        let t = Tower::build(s.clone(), 1).unwrap();
        let l1 = t.level(1).unwrap();
        assert_eq!(l1.labels(), &["a", "b0", "b1"]);
        for y in s.all_symbols() {
            for x0 in s.base_points() {
                let p = l1.project(y, x0).unwrap();
                assert_eq!(l1.label(p), s.first().get(s.pi(y, x0)));
            }
        }
        for x0 in s.base_points() {
            assert_eq!(l1.label(l1.embedding()[x0.index()]), s.first().get(s.phi(x0)));
        }
    }

    #[test]
    fn non_fully_injective_structure() {
        let s = nfi();
        let t = Tower::build(s.clone(), 5).unwrap();
        for n in 0..=5 {
            assert_eq!(t.level(n).unwrap().len(), (1 << n) + 1);
        }
        // phi_{2,1}((0, b)) = ((0, 0), b)
        let b0 = t.point(1, "b0").unwrap();
        assert_eq!(t.embed(1, 2, b0).unwrap(), t.point(2, "00:b").unwrap());
        // (0,1) with a lands on the glued class a_2
        let a2 = t.embed(0, 2, PointId(0)).unwrap();
        assert_eq!(t.project_word(&w(&s, "01"), 0, PointId(0)).unwrap(), a2);
        assert_eq!(t.label(2, a2), "00:a");
    }

    #[test]
    fn embed_identity_and_composition() {
        let t = Tower::build(FiniteScheme::diagonal(2), 3).unwrap();
        for n in 0..=3 {
            for p in t.level(n).unwrap().points() {
                assert_eq!(t.embed(n, n, p).unwrap(), p);
            }
        }
        let p = t.embed(0, 2, PointId(0)).unwrap();
        assert_eq!(t.level(2).unwrap().representative(p), (&[Symbol(0), Symbol(0)][..], PointId(0)));
    }

    #[test]
    fn empty_word_projects_to_itself() {
        let t = Tower::build(FiniteScheme::diagonal(2), 2).unwrap();
        assert_eq!(t.project_word(&[], 1, PointId(2)).unwrap(), PointId(2));
    }

    #[test]
    fn diagonal_depth_two_identifications() {
        let s = FiniteScheme::diagonal(2);
        let t = Tower::build(s.clone(), 2).unwrap();
        let (zero, one) = (PointId(0), PointId(1));
        let p = |text: &str, x| t.project_word(&w(&s, text), 0, x).unwrap();
        assert_ne!(p("01", zero), p("10", one));
        assert_eq!(p("01", one), p("10", zero));
    }

    #[test]
    fn cells() {
        let s = FiniteScheme::diagonal(3);
        let t = Tower::build(s.clone(), 1).unwrap();
        assert_eq!(t.cell(&[]).unwrap().members.len(), 3);
        let cells: Vec<_> = s.all_symbols().map(|y| t.cell(&[y]).unwrap().members).collect();
        for c in &cells {
            assert_eq!(c.len(), 3);
        }
        for i in 0..3 {
            for j in i + 1..3 {
                assert_eq!(cells[i].intersection(&cells[j]).count(), 1);
            }
        }
        let nfi = Tower::build(nfi(), 3).unwrap();
        let a3 = nfi.embed(0, 3, PointId(0)).unwrap();
        for word in ["000", "011", "101", "111"] {
            let c = nfi.cell(&w(nfi.scheme(), word)).unwrap();
            let b = nfi.point(3, &format!("{word}:b")).unwrap();
            assert_eq!(c.members, [a3, b].into_iter().collect());
        }
    }

    #[test]
    fn decompose_examples() {
        let s = FiniteScheme::diagonal(2);
        let t = Tower::build(s.clone(), 1).unwrap();
        let wit = t
            .decompose(0, (&[Symbol(0)], PointId(1)), (&[Symbol(1)], PointId(0)))
            .unwrap();
        assert_eq!(wit, BasicEquivalenceWitness { k: 1, xi0: PointId(1), xi0_prime: PointId(0) });

        let t = Tower::build(nfi(), 2).unwrap();
        let a = PointId(0);
        let wit = t
            .decompose(0, (&[Symbol(0), Symbol(0)], a), (&[Symbol(1), Symbol(1)], a))
            .unwrap();
        assert_eq!(wit, BasicEquivalenceWitness { k: 1, xi0: a, xi0_prime: a });

        assert_eq!(
            t.decompose(0, (&[Symbol(0)], a), (&[Symbol(0)], a)),
            Err(TowerError::PairEqual)
        );
        assert_eq!(
            t.decompose(0, (&[Symbol(0)], PointId(1)), (&[Symbol(1)], PointId(1))),
            Err(TowerError::ProjectionsDiffer)
        );
    }

    #[test]
    fn errors() {
        let t = Tower::build(FiniteScheme::diagonal(2), 1).unwrap();
        assert!(matches!(t.cell(&[Symbol(0), Symbol(0)]), Err(TowerError::LevelNotBuilt { .. })));
        assert!(matches!(t.cell(&[Symbol(7)]), Err(TowerError::UnknownSymbol(7))));
        assert!(matches!(t.embed(0, 1, PointId(9)), Err(TowerError::UnknownPoint { .. })));
        assert!(t.point(1, "nope").is_err());
        let bad = FiniteScheme::from_tokens(&["0"], &["a", "b"], &["p"], &[("a", "p"), ("b", "p")], &[("0", "a", "p"), ("0", "b", "p")]).unwrap();
        assert!(matches!(Tower::new(bad), Err(TowerError::InvalidScheme(_))));
    }

    #[test]
    fn addresses_match_projection() {
        let s = FiniteScheme::diagonal(2);
        let t = Tower::build(s, 3).unwrap();
        let l3 = t.level(3).unwrap();
        let mut total = 0;
        for p in l3.points() {
            let addrs = t.addresses(3, p).unwrap();
            assert_eq!(addrs[0].0, l3.representative(p).0);
            for (w, x0) in &addrs {
                assert_eq!(t.project_word(w, 0, *x0).unwrap(), p);
            }
            total += addrs.len();
        }
        assert_eq!(total, 8 * 2);
    }
}
