//! Exhaustive checks of the structural facts the tower construction rests on.
//!
//! Every hypothesis instance up to the requested depth is enumerated and its
//! conclusion confirmed on the built tower. A counterexample points at a bug
//! in the construction.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::fixedpoint::words;
use crate::scheme::{PointId, Symbol, Word};
use crate::tower::{Tower, TowerError};

const KEPT_COUNTEREXAMPLES: usize = 5;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LemmaEntry {
    pub id: &'static str,
    pub statement: &'static str,
    pub instances: usize,
    pub failures: usize,
    /// The first few failures, described.
    pub counterexamples: Vec<String>,
    pub skipped: Option<&'static str>,
}

impl LemmaEntry {
    fn new(id: &'static str, statement: &'static str) -> Self {
        LemmaEntry {
            id,
            statement,
            instances: 0,
            failures: 0,
            counterexamples: Vec::new(),
            skipped: None,
        }
    }

    fn check(&mut self, holds: bool, describe: impl FnOnce() -> String) {
        self.instances += 1;
        if !holds {
            self.failures += 1;
            if self.counterexamples.len() < KEPT_COUNTEREXAMPLES {
                self.counterexamples.push(describe());
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub max_depth: usize,
    pub entries: Vec<LemmaEntry>,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.entries.iter().all(LemmaEntry::passed)
    }

    pub fn entry(&self, id: &str) -> Option<&LemmaEntry> {
        self.entries.iter().find(|e| e.id == id)
    }
}

impl fmt::Display for AuditReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e.skipped {
                Some(why) => writeln!(f, "{:<20} SKIPPED ({why})", e.id)?,
                None => {
                    let status = if e.passed() { "PASS" } else { "FAIL" };
                    writeln!(f, "{:<20} {status} instances={} failures={}", e.id, e.instances, e.failures)?;
                    for c in &e.counterexamples {
                        writeln!(f, "    {c}")?;
                    }
                }
            }
        }
        write!(f, "audit {}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

/// Runs every check on levels `0..=max_depth`, extending a copy of the tower
/// as needed.
pub fn lemma_audit(tower: &Tower, max_depth: usize) -> Result<AuditReport, TowerError> {
    if max_depth == 0 {
        return Ok(AuditReport {
            max_depth,
            entries: Vec::new(),
        });
    }
    let owned;
    let tower = if tower.depth() < max_depth {
        owned = tower.clone().extend_to(max_depth);
        &owned
    } else {
        tower
    };
    let mut a = Auditor { tower, max_depth };
    let mut entries = Vec::new();
    let (equivalence, image) = a.basic_equivalence();
    entries.push(equivalence);
    entries.push(image);
    entries.push(a.fresh_point_unique());
    entries.push(a.base_tail());
    entries.push(a.level_tail());
    entries.push(a.previous_level());
    entries.push(a.discrete_cells());
    Ok(AuditReport { max_depth, entries })
}

struct Auditor<'a> {
    tower: &'a Tower,
    max_depth: usize,
}

impl Auditor<'_> {
    fn show(&self, w: &[Symbol], level: usize, x: PointId) -> String {
        format!("({}, {})", self.tower.scheme().render_word(w), self.tower.label(level, x))
    }

    /// Every `(w, xi)` in `Y^m x X_{n-m}` with `pi_{m,n-m}(w, xi) = x`, `x` in `X_n`.
    fn descend(&self, n: usize, m: usize, x: PointId) -> Vec<(Word, PointId)> {
        let mut frontier = vec![(Word::new(), x)];
        for k in (n - m + 1..=n).rev() {
            let level = &self.tower.levels()[k];
            frontier = frontier
                .iter()
                .flat_map(|(w, p)| {
                    level.fiber(*p).iter().map(move |&(y, q)| {
                        let mut w2 = w.clone();
                        w2.push(y);
                        (w2, q)
                    })
                })
                .collect();
        }
        frontier
    }

    fn basic_equivalence(&mut self) -> (LemmaEntry, LemmaEntry) {
        let t = self.tower;
        let scheme = t.scheme();
        let mut eq = LemmaEntry::new(
            "basic-equivalence",
            "distinct (w, xi) with equal projections split at some k through a gluing of X0",
        );
        let mut img = LemmaEntry::new(
            "image-level-k",
            "a point with two distinct descriptions that split at k lies in phi_{n,k}(X_k)",
        );
        for n in 1..=self.max_depth {
            for m in 1..=n {
                for x in t.levels()[n].points() {
                    let group = self.descend(n, m, x);
                    for (i, (w, xi)) in group.iter().enumerate() {
                        for (w2, xi2) in &group[i + 1..] {
                            let pair = || {
                                format!(
                                    "level {n}: {} ~ {}",
                                    self.show(w, n - m, *xi),
                                    self.show(w2, n - m, *xi2)
                                )
                            };
                            let wit = match t.decompose(n - m, (w, *xi), (w2, *xi2)) {
                                Ok(wit) => wit,
                                Err(e) => {
                                    eq.check(false, || format!("{}: {e}", pair()));
                                    continue;
                                }
                            };
                            let k = wit.k;
                            let below = &t.levels()[n - k];
                            let tail = t.project_unchecked(&w[k..], n - m, *xi);
                            let tail2 = t.project_unchecked(&w2[k..], n - m, *xi2);
                            let holds = w[..k - 1] == w2[..k - 1]
                                && tail == below.base_embedding()[wit.xi0.index()]
                                && tail2 == below.base_embedding()[wit.xi0_prime.index()]
                                && scheme.pi(w[k - 1], wit.xi0) == scheme.pi(w2[k - 1], wit.xi0_prime);
                            eq.check(holds, || format!("{}: clauses fail at k={k}", pair()));

                            let at_k = t.project_unchecked(&w[..k], 0, wit.xi0);
                            let embedded = t.embed(k, n, at_k).ok();
                            img.check(embedded == Some(x), || format!("{}: not phi_{{{n},{k}}} of level {k}", pair()));
                        }
                    }
                }
            }
        }
        (eq, img)
    }

    fn fresh_point_unique(&mut self) -> LemmaEntry {
        let t = self.tower;
        let scheme = t.scheme();
        let mut e = LemmaEntry::new(
            "fresh-point-unique",
            "the addresses of a point outside phi(X_{n-1}) agree up to the last symbol; for n >= 2 it has one preimage in Y x X_{n-1}",
        );
        for n in 1..=self.max_depth {
            let level = &t.levels()[n];
            for x in level.points().filter(|&x| level.is_fresh(x)) {
                let addrs = t.addresses(n, x).expect("point of a built level");
                let (w0, x0) = &addrs[0];
                let first_pi = scheme.pi(w0[n - 1], *x0);
                let holds = (n == 1 || level.fiber(x).len() == 1)
                    && addrs
                        .iter()
                        .all(|(w, x0)| w[..n - 1] == w0[..n - 1] && scheme.pi(w[n - 1], *x0) == first_pi);
                e.check(holds, || format!("level {n}: {}", t.label(n, x)));
            }
        }
        e
    }

    fn tail_check(&self, e: &mut LemmaEntry, n: usize, m: usize, target: PointId, source: String) {
        let below = &self.tower.levels()[n - m];
        for (w, xi) in self.descend(n, m, target) {
            e.check(below.base_preimage(xi).is_some(), || {
                format!("level {n}: {} maps to {source} with tail outside X0", self.show(&w, n - m, xi))
            });
        }
    }

    fn base_tail(&mut self) -> LemmaEntry {
        let t = self.tower;
        let mut e = LemmaEntry::new("base-tail", "pi_{m,n-m}(w, xi) = phi_{n,0}(x0) forces xi into phi_{n-m,0}(X0)");
        for n in 1..=self.max_depth {
            for m in 1..=n {
                for x0 in t.scheme().base_points() {
                    let target = t.levels()[n].base_embedding()[x0.index()];
                    let source = format!("phi_{{{n},0}}({})", t.label(0, x0));
                    self.tail_check(&mut e, n, m, target, source);
                }
            }
        }
        e
    }

    fn level_tail(&mut self) -> LemmaEntry {
        let t = self.tower;
        let mut e = LemmaEntry::new("level-tail", "pi_{m,n-m}(w, xi) = phi_{n,m}(x_m) forces xi into phi_{n-m,0}(X0)");
        for n in 1..=self.max_depth {
            for m in 1..=n {
                for xm in t.levels()[m].points() {
                    let target = t.embed(m, n, xm).expect("built levels");
                    let source = format!("phi_{{{n},{m}}}({})", t.label(m, xm));
                    self.tail_check(&mut e, n, m, target, source);
                }
            }
        }
        e
    }

    fn previous_level(&mut self) -> LemmaEntry {
        let t = self.tower;
        let mut e = LemmaEntry::new("previous-level", "pi_{1,n}(y, xi) in phi(X_n) forces xi into phi(X_{n-1})");
        for n in 1..self.max_depth {
            let (level, next) = (&t.levels()[n], &t.levels()[n + 1]);
            for y in t.scheme().all_symbols() {
                for xi in level.points() {
                    let p = next.project(y, xi).expect("built levels");
                    if !next.is_fresh(p) {
                        e.check(!level.is_fresh(xi), || format!("level {}: {}", n + 1, self.show(&[y], n, xi)));
                    }
                }
            }
        }
        e
    }

    fn discrete_cells(&mut self) -> LemmaEntry {
        let t = self.tower;
        let mut e = LemmaEntry::new("discrete-cells", "each cell meets phi(X_{n-1}) in at most one point");
        if !t.scheme().is_discrete() {
            e.skipped = Some("scheme not discrete");
            return e;
        }
        for n in 1..=self.max_depth {
            let level = &t.levels()[n];
            for w in words(t.scheme().symbol_count(), n) {
                let old: BTreeSet<PointId> = t
                    .cell(&w)
                    .expect("built level")
                    .members
                    .into_iter()
                    .filter(|&p| !level.is_fresh(p))
                    .collect();
                e.check(old.len() <= 1, || format!("level {n}: cell {}", t.scheme().render_word(&w)));
            }
        }
        e
    }
}
