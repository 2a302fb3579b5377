use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::words::Word;

/// A group element given by its (possibly partial) action on `S = {0..points}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractElement {
    pub name: String,
    pub action: Vec<Option<usize>>,
}

/// Finite data for the Ping-Pong Lemma. Subgroups are lists of element names.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbstractPingPongInstance {
    pub points: usize,
    pub elements: Vec<AbstractElement>,
    #[serde(rename = "H")]
    pub h: Vec<String>,
    #[serde(rename = "K")]
    pub k: Vec<String>,
    #[serde(rename = "G0")]
    pub g0: Vec<String>,
    #[serde(rename = "S_H")]
    pub s_h: Vec<usize>,
    #[serde(rename = "S_K")]
    pub s_k: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum PingPongOutcome {
    HypothesesFail {
        reason: String,
    },
    /// Both `|H : G₀|` and `|K : G₀|` equal 2; the lemma does not apply.
    IndexGuard,
    /// `undefined` counts mapping checks skipped because a partial action
    /// is undefined at the point; `undecided` counts products undefined on
    /// all of `S_H`.
    Verified {
        maxsyll: usize,
        products: usize,
        undefined: usize,
        undecided: usize,
    },
    /// An odd alternating product fixing `S_H` pointwise, despite the
    /// hypotheses.
    Refuted {
        product: Vec<String>,
    },
}

impl AbstractPingPongInstance {
    fn lookup(&self) -> Result<HashMap<&str, usize>> {
        let mut map = HashMap::new();
        for (i, e) in self.elements.iter().enumerate() {
            if e.action.len() != self.points {
                return Err(Error::InvalidInstance(format!(
                    "element {} acts on {} points, expected {}",
                    e.name,
                    e.action.len(),
                    self.points
                )));
            }
            if let Some(p) = e.action.iter().flatten().find(|&&p| p >= self.points) {
                return Err(Error::InvalidInstance(format!(
                    "element {} sends a point to {p}, outside S",
                    e.name
                )));
            }
            if map.insert(e.name.as_str(), i).is_some() {
                return Err(Error::InvalidInstance(format!("element {} listed twice", e.name)));
            }
        }
        Ok(map)
    }

    fn resolve(&self, map: &HashMap<&str, usize>, names: &[String]) -> Result<Vec<usize>> {
        names
            .iter()
            .map(|n| {
                map.get(n.as_str())
                    .copied()
                    .ok_or_else(|| Error::InvalidInstance(format!("unknown element {n}")))
            })
            .collect()
    }

    fn act(&self, e: usize, x: usize) -> Option<usize> {
        self.elements[e].action[x]
    }

    /// Number of left cosets `xG₀` among the listed elements of a subgroup.
    fn index(&self, sub: &[usize], g0: &[usize]) -> usize {
        let agree = |p: &dyn Fn(usize) -> Option<usize>, q: &dyn Fn(usize) -> Option<usize>| {
            let mut common = false;
            for x in 0..self.points {
                if let (Some(a), Some(b)) = (p(x), q(x)) {
                    if a != b {
                        return false;
                    }
                    common = true;
                }
            }
            common
        };
        let mut reps: Vec<usize> = Vec::new();
        for &x in sub {
            let same = reps.iter().any(|&r| {
                g0.iter()
                    .any(|&g| agree(&|p| self.act(g, p).and_then(|q| self.act(r, q)), &|p| self.act(x, p)))
            });
            if !same {
                reps.push(x);
            }
        }
        reps.len()
    }
}

/// Checks the hypotheses of the Ping-Pong Lemma on a finite action, then
/// its consequence on alternating products of at most `maxsyll` syllables.
pub fn abstract_ping_pong_check(inst: &AbstractPingPongInstance, maxsyll: usize) -> Result<PingPongOutcome> {
    let map = inst.lookup()?;
    let h = inst.resolve(&map, &inst.h)?;
    let k = inst.resolve(&map, &inst.k)?;
    let g0 = inst.resolve(&map, &inst.g0)?;
    let fail = |reason: String| Ok(PingPongOutcome::HypothesesFail { reason });
    if let Some(&p) = inst.s_h.iter().chain(&inst.s_k).find(|&&p| p >= inst.points) {
        return Err(Error::InvalidInstance(format!("point {p} outside S")));
    }
    let sh: BTreeSet<usize> = inst.s_h.iter().copied().collect();
    let sk: BTreeSet<usize> = inst.s_k.iter().copied().collect();
    if sh.is_empty() || sk.is_empty() {
        return fail("S_H and S_K must be nonempty".into());
    }
    if let Some(p) = sh.intersection(&sk).next() {
        return fail(format!("S_H and S_K share point {p}"));
    }
    if inst.index(&h, &g0) == 2 && inst.index(&k, &g0) == 2 {
        return Ok(PingPongOutcome::IndexGuard);
    }
    let h_out: Vec<usize> = h.iter().copied().filter(|e| !g0.contains(e)).collect();
    let k_out: Vec<usize> = k.iter().copied().filter(|e| !g0.contains(e)).collect();
    let mut undefined = 0;
    for (elems, from, to, a, b) in [(&h_out, &sh, &sk, "H", "S_H"), (&k_out, &sk, &sh, "K", "S_K")] {
        for &e in elems {
            for &x in from {
                let name = &inst.elements[e].name;
                match inst.act(e, x) {
                    None => undefined += 1,
                    Some(y) if !to.contains(&y) => {
                        return fail(format!(
                            "{name} in {a} \\ G0 sends {x} in {b} to {y}, outside the other set"
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    let mut tally = Tally::default();
    for n in (1..=maxsyll).step_by(2) {
        for (first, second) in [(&h_out, &k_out), (&k_out, &h_out)] {
            let mut stack = Vec::new();
            if let Some(p) = odd_products(inst, first, second, n, &sh, &mut stack, &mut tally) {
                return Ok(PingPongOutcome::Refuted { product: p });
            }
        }
    }
    Ok(PingPongOutcome::Verified {
        maxsyll,
        products: tally.products,
        undefined,
        undecided: tally.undecided,
    })
}

#[derive(Default)]
struct Tally {
    products: usize,
    undecided: usize,
}

/// Depth-first over products `e₁e₂⋯eₙ` alternating between the two lists;
/// returns the first one that is defined somewhere on `S_H` and fixes every
/// point where it is defined.
fn odd_products(
    inst: &AbstractPingPongInstance,
    first: &[usize],
    second: &[usize],
    n: usize,
    sh: &BTreeSet<usize>,
    stack: &mut Vec<usize>,
    tally: &mut Tally,
) -> Option<Vec<String>> {
    if stack.len() == n {
        tally.products += 1;
        let mut defined = false;
        for &x in sh {
            if let Some(y) = stack.iter().rev().try_fold(x, |p, &e| inst.act(e, p)) {
                if y != x {
                    return None;
                }
                defined = true;
            }
        }
        if !defined {
            tally.undecided += 1;
            return None;
        }
        return Some(stack.iter().map(|&e| inst.elements[e].name.clone()).collect());
    }
    let pool = if stack.len().is_multiple_of(2) { first } else { second };
    for &e in pool {
        stack.push(e);
        if let Some(p) = odd_products(inst, first, second, n, sh, stack, tally) {
            return Some(p);
        }
        stack.pop();
    }
    None
}

/// The free group of rank 2 acting on its radius-`r` ball by left
/// multiplication, with `H`, `K` listing powers of `a` and `b` up to length
/// 2. Since `H ∖ G₀` must send `S_H` into `S_K`, `S_H` holds the nontrivial
/// words beginning with `b±` and `S_K` those beginning with `a±`.
pub fn free_left_multiplication_instance(ball: &CayleyBall) -> AbstractPingPongInstance {
    let oracle = ball.oracle();
    let points = ball.len();
    let element = |w: &Word| AbstractElement {
        name: oracle.format(w),
        action: (0..points).map(|x| ball.locate(&w.concat(ball.word(x)))).collect(),
    };
    let powers = |g: &str| -> Vec<Word> {
        ["", g, &g.repeat(2), &g.to_uppercase(), &g.to_uppercase().repeat(2)]
            .iter()
            .map(|s| Word::parse(s).expect("standard alphabet"))
            .collect()
    };
    let (hp, kp) = (powers("a"), powers("b"));
    let mut words: Vec<Word> = hp.iter().chain(&kp).cloned().collect();
    words.sort();
    words.dedup();
    let starting = |idx: usize| -> Vec<usize> {
        (0..points)
            .filter(|&x| {
                let w = ball.word(x);
                !w.is_empty() && w.letters()[0].index() == idx
            })
            .collect()
    };
    let name = |w: &Word| oracle.format(w);
    AbstractPingPongInstance {
        points,
        elements: words.iter().map(element).collect(),
        h: hp.iter().map(name).collect(),
        k: kp.iter().map(name).collect(),
        g0: vec![name(&Word::empty())],
        s_h: starting(1),
        s_k: starting(0),
    }
}

/// Two involutions on four points: both indices are 2.
pub fn index_two_instance() -> AbstractPingPongInstance {
    let el = |name: &str, action: [usize; 4]| AbstractElement {
        name: name.into(),
        action: action.iter().map(|&p| Some(p)).collect(),
    };
    AbstractPingPongInstance {
        points: 4,
        elements: vec![el("1", [0, 1, 2, 3]), el("h", [2, 3, 0, 1]), el("k", [1, 0, 3, 2])],
        h: vec!["1".into(), "h".into()],
        k: vec!["1".into(), "k".into()],
        g0: vec!["1".into()],
        s_h: vec![0],
        s_k: vec![1],
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::presentation::{Presentation, WordOracle};

    #[test]
    fn free_group_on_its_ball() {
        let ball = CayleyBall::build(Arc::new(WordOracle::new(Presentation::free(2))), 6).unwrap();
        let inst = free_left_multiplication_instance(&ball);
        assert_eq!(inst.s_h.len(), 2 * (1 + 3 + 9 + 27 + 81 + 243));
        assert!(matches!(
            abstract_ping_pong_check(&inst, 3).unwrap(),
            PingPongOutcome::Verified {
                maxsyll: 3,
                products: 136,
                ..
            }
        ));
    }

    #[test]
    fn index_two_is_guarded() {
        assert_eq!(
            abstract_ping_pong_check(&index_two_instance(), 5).unwrap(),
            PingPongOutcome::IndexGuard
        );
    }

    #[test]
    fn degenerate_k_equal_to_g0() {
        let mut inst = index_two_instance();
        inst.elements[1].action = vec![Some(1), Some(0), Some(3), Some(2)];
        inst.elements.push(AbstractElement {
            name: "h2".into(),
            action: vec![Some(3), Some(2), Some(1), Some(0)],
        });
        inst.h.push("h2".into());
        inst.k = vec!["1".into()];
        inst.s_h = vec![0, 2];
        inst.s_k = vec![1, 3];
        for n in [1, 3, 7] {
            assert!(matches!(
                abstract_ping_pong_check(&inst, n).unwrap(),
                PingPongOutcome::Verified { .. }
            ));
        }
    }

    #[test]
    fn overlapping_sets_fail() {
        let mut inst = index_two_instance();
        inst.h.push("k".into());
        inst.s_k = vec![0, 1];
        assert!(matches!(
            abstract_ping_pong_check(&inst, 3).unwrap(),
            PingPongOutcome::HypothesesFail { .. }
        ));
    }

    #[test]
    fn action_outside_s_is_an_error() {
        let mut inst = index_two_instance();
        inst.elements[1].action[0] = Some(9);
        assert!(abstract_ping_pong_check(&inst, 1).is_err());
    }
}
