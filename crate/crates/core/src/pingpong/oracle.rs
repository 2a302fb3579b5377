use std::collections::HashMap;
use std::hash::{DefaultHasher, Hash, Hasher};

use serde::{Deserialize, Serialize};

use super::instance::{PingPongInstance, Side, SyllableSet};
use crate::error::Result;
use crate::presentation::{OracleKind, WordOracle};
use crate::words::{Letter, Word};

/// Default cap on enumerated products.
pub const ORACLE_BUDGET: usize = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum OracleOutcome {
    Consistent {
        maxlen: usize,
    },
    Counterexample {
        word: String,
        syllables: Vec<(Side, String)>,
        reason: String,
    },
    /// Budget exhausted; every product up to `achieved` letters was checked.
    Partial {
        achieved: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    pub maxlen: usize,
    pub outcome: OracleOutcome,
    pub products: usize,
    pub syllables_h: usize,
    pub syllables_k: usize,
}

impl OracleRecord {
    pub fn is_consistent(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Consistent { .. })
    }

    pub fn is_counterexample(&self) -> bool {
        matches!(self.outcome, OracleOutcome::Counterexample { .. })
    }
}

#[derive(Clone)]
enum Acc {
    Free(Vec<Letter>),
    Abelian(Vec<i64>),
    Raw(Vec<Letter>),
}

impl Acc {
    fn new(oracle: &WordOracle) -> Self {
        match oracle.kind() {
            OracleKind::FreeGroup => Acc::Free(Vec::new()),
            OracleKind::FreeAbelianControl => Acc::Abelian(vec![0; oracle.rank()]),
            OracleKind::DehnC16 => Acc::Raw(Vec::new()),
        }
    }

    fn push(&mut self, w: &Word) {
        match self {
            Acc::Free(v) => {
                for &l in w.letters() {
                    if v.last() == Some(&l.inv()) {
                        v.pop();
                    } else {
                        v.push(l);
                    }
                }
            }
            Acc::Abelian(e) => {
                for &l in w.letters() {
                    e[l.index()] += l.sign();
                }
            }
            Acc::Raw(v) => v.extend_from_slice(w.letters()),
        }
    }

    fn is_trivial(&self, oracle: &WordOracle) -> bool {
        match self {
            Acc::Free(v) => v.is_empty(),
            Acc::Abelian(e) => e.iter().all(|&x| x == 0),
            Acc::Raw(v) => oracle.is_trivial(&Word::from_letters(v.clone())),
        }
    }

    fn fingerprint(&self) -> Option<u64> {
        let mut h = DefaultHasher::new();
        match self {
            Acc::Free(v) => v.hash(&mut h),
            Acc::Abelian(e) => e.hash(&mut h),
            Acc::Raw(_) => return None,
        }
        Some(h.finish())
    }
}

struct Search<'a> {
    oracle: &'a WordOracle,
    h: &'a SyllableSet,
    k: &'a SyllableSet,
    min_len: usize,
    collisions: Option<HashMap<u64, (Side, Vec<usize>)>>,
    products: usize,
    budget: usize,
    found: Option<OracleOutcome>,
    collision: Option<OracleOutcome>,
}

impl Search<'_> {
    fn set(&self, side: Side) -> &SyllableSet {
        match side {
            Side::H => self.h,
            Side::K => self.k,
        }
    }

    fn factors(&self, start: Side, idx: &[usize]) -> Vec<(Side, Word)> {
        let mut side = start;
        idx.iter()
            .map(|&i| {
                let f = (side, self.set(side).words[i].clone());
                side = side.other();
                f
            })
            .collect()
    }

    /// Products of total length exactly `remaining`; false on budget stop.
    fn dfs(&mut self, start: Side, cur: Side, remaining: usize, acc: &Acc, stack: &mut Vec<usize>) -> bool {
        let left = !stack.is_empty();
        for i in 0..self.set(cur).len() {
            let (len, end_ok, go_on) = {
                let set = self.set(cur);
                (
                    set.words[i].len(),
                    set.allowed(i, left, false),
                    set.allowed(i, left, true),
                )
            };
            if len > remaining {
                break;
            }
            let rest = remaining - len;
            if rest == 0 && !end_ok || rest > 0 && (!go_on || rest < self.min_len) {
                continue;
            }
            self.products += 1;
            if self.products > self.budget {
                return false;
            }
            let mut next = acc.clone();
            next.push(&self.set(cur).words[i]);
            stack.push(i);
            if rest == 0 {
                self.leaf(start, &next, stack);
            } else if !self.dfs(start, cur.other(), rest, &next, stack) {
                return false;
            }
            stack.pop();
            if self.found.is_some() {
                return true;
            }
        }
        true
    }

    fn leaf(&mut self, start: Side, acc: &Acc, stack: &[usize]) {
        if acc.is_trivial(self.oracle) {
            let f = self.factors(start, stack);
            self.found = Some(counterexample(self.oracle, f, "alternating product is trivial"));
            return;
        }
        let Some(map) = self.collisions.as_mut() else {
            return;
        };
        let Some(fp) = acc.fingerprint() else {
            return;
        };
        if let Some((s0, idx0)) = map.get(&fp).cloned() {
            let a = self.factors(s0, &idx0);
            let b = self.factors(start, stack);
            if let Some(cx) = collision(self.oracle, &a, &b) {
                self.collision = Some(cx);
                self.collisions = None;
            }
        } else {
            map.insert(fp, (start, stack.to_vec()));
        }
    }
}

fn render(oracle: &WordOracle, factors: &[(Side, Word)]) -> (String, Vec<(Side, String)>) {
    let word = factors.iter().fold(Word::empty(), |acc, (_, w)| acc.concat(w));
    (
        oracle.format(&word),
        factors.iter().map(|(s, w)| (*s, oracle.format(w))).collect(),
    )
}

fn counterexample(oracle: &WordOracle, factors: Vec<(Side, Word)>, reason: &str) -> OracleOutcome {
    let (word, syllables) = render(oracle, &factors);
    OracleOutcome::Counterexample {
        word,
        syllables,
        reason: reason.into(),
    }
}

/// Two distinct alternating products `a`, `b` with equal value: the
/// alternating form of `a·b⁻¹` is a trivial product with nonempty syllables.
fn collision(oracle: &WordOracle, a: &[(Side, Word)], b: &[(Side, Word)]) -> Option<OracleOutcome> {
    let nf = |w: &Word| oracle.normal_form(w).unwrap_or_else(|| oracle.dehn_reduce(w));
    let value = |f: &[(Side, Word)]| nf(&f.iter().fold(Word::empty(), |acc, (_, w)| acc.concat(w)));
    if a == b || value(a) != value(b) {
        return None;
    }
    let mut out: Vec<(Side, Word)> = a.to_vec();
    for (side, w) in b.iter().rev() {
        let inv = w.invert();
        match out.last_mut() {
            Some((s, last)) if s == side => {
                let merged = nf(&last.concat(&inv));
                if oracle.is_trivial(&merged) {
                    out.pop();
                } else {
                    *last = merged;
                }
            }
            _ => out.push((*side, inv)),
        }
    }
    if out.is_empty() {
        return None;
    }
    Some(counterexample(oracle, out, "distinct normal forms are equal"))
}

/// Enumerates alternating products of syllables from `H₁∖G₀` and `K₁∖G₀`
/// by total length, then starting side, then shortlex order of syllables,
/// and reports the first product that is trivial. Failing that, when `G₀`
/// is trivial and the ambient group has a normal form, the first pair of
/// distinct products with the same value is reported.
pub fn oracle_free_product_check(inst: &PingPongInstance, maxlen: usize, budget: usize) -> Result<OracleRecord> {
    let h = inst.syllables(Side::H, maxlen)?;
    let k = inst.syllables(Side::K, maxlen)?;
    let oracle = inst.oracle();
    let use_collisions = inst.g0_trivial()? && oracle.normal_form(&Word::empty()).is_some();
    let min_len = h
        .words
        .iter()
        .chain(&k.words)
        .map(Word::len)
        .min()
        .unwrap_or(usize::MAX);
    let mut search = Search {
        oracle,
        h: &h,
        k: &k,
        min_len,
        collisions: use_collisions.then(HashMap::new),
        products: 0,
        budget,
        found: None,
        collision: None,
    };
    let mut outcome = OracleOutcome::Consistent { maxlen };
    'outer: for n in 1..=maxlen {
        for start in [Side::H, Side::K] {
            let ok = search.dfs(start, start, n, &Acc::new(oracle), &mut Vec::new());
            if let Some(found) = search.found.take() {
                outcome = found;
                break 'outer;
            }
            if !ok {
                outcome = OracleOutcome::Partial { achieved: n - 1 };
                break 'outer;
            }
        }
    }
    if let (OracleOutcome::Consistent { .. }, Some(cx)) = (&outcome, search.collision.take()) {
        outcome = cx;
    }
    Ok(OracleRecord {
        maxlen,
        outcome,
        products: search.products,
        syllables_h: h.len(),
        syllables_k: k.len(),
    })
}
