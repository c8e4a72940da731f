//! Shared fixtures and brute-force oracles for the integration tests.
//!
//! The partition oracle never touches the tower: it works on `Y^n x X0`
//! directly, identifying two descriptions exactly when they agree before some
//! position `k`, carry the same gluing of `X0` at `k`, and have tails that
//! describe the embedded images of the glued points one level down.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use simscheme::address::{Address, TransferState};
use simscheme::io::{parse_pair, parse_scheme};
use simscheme::{FiniteScheme, Pair, PointId, Symbol, Tower, Word};

pub const DIAG2: &str = include_str!("../../schemes/diag2.scm");
pub const DIAG3: &str = include_str!("../../schemes/diag3.scm");
pub const NFI: &str = include_str!("../../schemes/nfi.scm");
pub const NONUNIQUE: &str = include_str!("../../schemes/nonunique.scm");
pub const ZAC: &str = include_str!("../../schemes/zac.scm");

pub fn scheme_dir() -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("schemes")
}

pub fn diag2() -> FiniteScheme {
    parse_scheme(DIAG2).unwrap()
}

pub fn diag3() -> FiniteScheme {
    parse_scheme(DIAG3).unwrap()
}

pub fn nfi() -> FiniteScheme {
    parse_scheme(NFI).unwrap()
}

pub fn nonunique() -> FiniteScheme {
    parse_scheme(NONUNIQUE).unwrap()
}

pub fn zac(scheme: &FiniteScheme) -> Pair {
    parse_pair(ZAC, scheme).unwrap()
}

/// The interval, the collapsing example and the two-fixed-point example.
pub fn example_schemes() -> Vec<(&'static str, FiniteScheme)> {
    vec![("diag2", diag2()), ("nfi", nfi()), ("nonunique", nonunique())]
}

pub fn all_words(count: usize, n: usize) -> Vec<Word> {
    let mut out: Vec<Word> = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (0..count).map(move |y| {
                    let mut w2 = w.clone();
                    w2.push(Symbol(y as u32));
                    w2
                })
            })
            .collect();
    }
    out
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = x;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Index of `(w, x0)` in `Y^n x X0`, lexicographic in `(w, x0)`.
pub fn flat_index(scheme: &FiniteScheme, w: &[Symbol], x0: PointId) -> usize {
    let ny = scheme.symbol_count();
    w.iter().fold(0, |acc, y| acc * ny + y.index()) * scheme.base_len() + x0.index()
}

/// `e_m(xi0)`: one description in `Y^m x X0` of `phi_{m,0}(xi0)`, built by
/// repeatedly choosing a `pi`-preimage of `phi` of the current point.
pub fn embedded_description(scheme: &FiniteScheme, m: usize, xi0: PointId) -> (Word, PointId) {
    let mut word = Word::new();
    let mut x = xi0;
    for _ in 0..m {
        let target = scheme.phi(x);
        let (y, x2) = scheme
            .all_symbols()
            .flat_map(|y| scheme.base_points().map(move |x2| (y, x2)))
            .find(|&(y, x2)| scheme.pi(y, x2) == target)
            .unwrap();
        word.push(y);
        x = x2;
    }
    (word, x)
}

/// For each level `0..=depth`, the class id of every element of `Y^n x X0`
/// (indexed by [`flat_index`]), with classes numbered by least element.
pub fn oracle_partitions(scheme: &FiniteScheme, depth: usize) -> Vec<Vec<usize>> {
    let ny = scheme.symbol_count();
    let n0 = scheme.base_len();
    let mut levels: Vec<Vec<usize>> = vec![(0..n0).collect()];
    for n in 1..=depth {
        let size = ny.pow(n as u32) * n0;
        let mut dsu = Dsu((0..size).collect());
        for k in 1..=n {
            let below = &levels[n - k];
            let tail_len = n - k;
            // members of the class of e_{n-k}(xi0), as (tail word, x0)
            let class_members = |xi0: PointId| -> Vec<(Word, PointId)> {
                let (ew, ex) = embedded_description(scheme, tail_len, xi0);
                let target = below[flat_index(scheme, &ew, ex)];
                all_words(ny, tail_len)
                    .into_iter()
                    .flat_map(|t| scheme.base_points().map(move |x| (t.clone(), x)))
                    .filter(|(t, x)| below[flat_index(scheme, t, *x)] == target)
                    .collect()
            };
            let members: Vec<Vec<(Word, PointId)>> = scheme.base_points().map(class_members).collect();
            for prefix in all_words(ny, k - 1) {
                for y in scheme.all_symbols() {
                    for xi0 in scheme.base_points() {
                        for y2 in scheme.all_symbols() {
                            for xi0b in scheme.base_points() {
                                if scheme.pi(y, xi0) != scheme.pi(y2, xi0b) {
                                    continue;
                                }
                                for (t, x) in &members[xi0.index()] {
                                    for (t2, x2) in &members[xi0b.index()] {
                                        let mut w = prefix.clone();
                                        w.push(y);
                                        w.extend(t);
                                        let mut w2 = prefix.clone();
                                        w2.push(y2);
                                        w2.extend(t2);
                                        dsu.union(flat_index(scheme, &w, *x), flat_index(scheme, &w2, *x2));
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        let mut ids: HashMap<usize, usize> = HashMap::new();
        let classes = (0..size)
            .map(|i| {
                let r = dsu.find(i);
                let next = ids.len();
                *ids.entry(r).or_insert(next)
            })
            .collect();
        levels.push(classes);
    }
    levels
}

/// The tower's partition of `Y^n x X0`, in the same indexing as the oracle.
pub fn tower_partition(tower: &Tower, n: usize) -> Vec<usize> {
    let scheme = tower.scheme();
    let mut out = vec![0; scheme.symbol_count().pow(n as u32) * scheme.base_len()];
    for w in all_words(scheme.symbol_count(), n) {
        for x0 in scheme.base_points() {
            out[flat_index(scheme, &w, x0)] = tower.project_word(&w, 0, x0).unwrap().index();
        }
    }
    out
}

/// `{ x0 : pi_{|w|,0}(w, x0) = phi_{|w|,n}(x) }`, straight from the tower.
pub fn brute_witnesses(tower: &Tower, w: &[Symbol], n: usize, x: PointId) -> TransferState {
    let target = tower.embed(n, w.len(), x).unwrap();
    tower
        .scheme()
        .base_points()
        .filter(|&x0| tower.project_word(w, 0, x0).unwrap() == target)
        .collect()
}

/// Every word `w` with `n <= |w| <= p` and `phi_{|w|,n}(x)` in `C(w)`.
pub fn brute_shadow(tower: &Tower, n: usize, x: PointId, p: usize) -> BTreeSet<Word> {
    let ny = tower.scheme().symbol_count();
    (n..=p)
        .flat_map(|k| all_words(ny, k))
        .filter(|w| {
            let target = tower.embed(n, w.len(), x).unwrap();
            tower.cell(w).unwrap().members.contains(&target)
        })
        .collect()
}

/// Whether `phi_{p,n}(x)` lies in `C(rho_p(a))` for every `n <= p <= depth`.
pub fn brute_gamma_prefix(tower: &Tower, n: usize, x: PointId, a: &Address, depth: usize) -> bool {
    (n..=depth).all(|p| {
        let target = tower.embed(n, p, x).unwrap();
        tower.cell(&a.truncate(p)).unwrap().members.contains(&target)
    })
}
