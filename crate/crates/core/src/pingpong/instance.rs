use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::presentation::WordOracle;
use crate::subgroup::{shortest_double_coset_rep, CosetSide, MembershipOracle, SubgroupSpec};
use crate::words::Word;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    H,
    K,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::H => Side::K,
            Side::K => Side::H,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TheoremMode {
    /// `⟨H₁, K₁⟩ = H₁ *_{G₀} K₁` for quasiconvex `H`, `K`.
    Theorem1,
    /// `⟨H₁, K⟩ = H₁ *_{G₀} K` for malnormal quasiconvex `H`.
    Theorem2,
}

/// Subgroups `H₁ ≤ H`, `K₁ ≤ K` with `G₀ = H ∩ K`, checked on a window.
#[derive(Clone, Debug)]
pub struct PingPongInstance {
    pub mode: TheoremMode,
    pub ball: Arc<CayleyBall>,
    pub h: SubgroupSpec,
    pub k: SubgroupSpec,
    pub h1: SubgroupSpec,
    pub k1: SubgroupSpec,
    pub mh: MembershipOracle,
    pub mk: MembershipOracle,
    pub mh1: MembershipOracle,
    pub mk1: MembershipOracle,
    pub g0: MembershipOracle,
}

impl PingPongInstance {
    /// In theorem-2 mode `k1` must be `None`; `K` enters whole.
    pub fn new(
        mode: TheoremMode,
        ball: Arc<CayleyBall>,
        h: SubgroupSpec,
        k: SubgroupSpec,
        h1: SubgroupSpec,
        k1: Option<SubgroupSpec>,
    ) -> Result<Self> {
        let k1 = match (mode, k1) {
            (TheoremMode::Theorem1, Some(k1)) => k1,
            (TheoremMode::Theorem1, None) => return Err(Error::InvalidInstance("theorem 1 needs K1".into())),
            (TheoremMode::Theorem2, None) => k.clone(),
            (TheoremMode::Theorem2, Some(_)) => {
                return Err(Error::InvalidInstance(
                    "theorem 2 takes K whole; K1 is not accepted".into(),
                ))
            }
        };
        let build = |s: &SubgroupSpec| MembershipOracle::build(s, &ball);
        let (mh, mk, mh1, mk1) = (build(&h), build(&k), build(&h1), build(&k1));
        let g0 = mh.intersect(&mk);
        let inst = Self {
            mode,
            ball,
            h,
            k,
            h1,
            k1,
            mh,
            mk,
            mh1,
            mk1,
            g0,
        };
        inst.check_invariants()?;
        Ok(inst)
    }

    pub fn oracle(&self) -> &Arc<WordOracle> {
        self.ball.oracle()
    }

    pub fn member(&self, side: Side) -> &MembershipOracle {
        match side {
            Side::H => &self.mh1,
            Side::K => &self.mk1,
        }
    }

    fn check_invariants(&self) -> Result<()> {
        let ball = &self.ball;
        let fmt = |w: &Word| self.oracle().format(w);
        let bad = |msg: String| Err(Error::InvalidInstance(msg));
        for v in self.mh1.window_elements(ball)? {
            let w = ball.word(v);
            if self.mk1.is_member(w).is_yes() && !self.g0.is_member(w).is_yes() {
                return bad(format!("H1 ∩ K1 ≠ H ∩ K on the window: {} lies in H1 and K1", fmt(w)));
            }
        }
        for (sub, sup, a, b) in [(&self.h1, &self.mh, "H1", "H"), (&self.k1, &self.mk, "K1", "K")] {
            for g in sub.generators() {
                if !sup.is_member(g).is_yes() {
                    return bad(format!("{a} is not contained in {b}: generator {}", fmt(g)));
                }
            }
        }
        for v in self.g0.window_elements(ball)? {
            let w = ball.word(v);
            if !self.mh1.is_member(w).is_yes() || !self.mk1.is_member(w).is_yes() {
                return bad(format!("H ∩ K is not contained in H1 ∩ K1: {}", fmt(w)));
            }
        }
        Ok(())
    }

    /// Whether `G₀` is trivial (exactly, or on the window).
    pub fn g0_trivial(&self) -> Result<bool> {
        self.g0.is_trivial_on(&self.ball)
    }

    /// The syllables available on one side, up to `maxlen` letters.
    pub fn syllables(&self, side: Side, maxlen: usize) -> Result<SyllableSet> {
        let g0_trivial = self.g0_trivial()?;
        let m = self.member(side);
        let ball = &self.ball;
        let oracle = self.oracle();
        let mut words: Vec<Word> = if !g0_trivial {
            m.elements_within(ball, maxlen.min(ball.radius()))?
                .into_iter()
                .map(|v| ball.word(v).clone())
                .collect()
        } else if let Some(g) = m.stallings() {
            g.closed_words(maxlen)
        } else if let Some(h) = m.cyclic_generator() {
            (1..=2 * maxlen as i64)
                .flat_map(|n| [n, -n])
                .map(|n| {
                    let p = h.pow(n);
                    match ball.locate(&p) {
                        Some(v) => ball.word(v).clone(),
                        None => oracle.dehn_reduce(&p),
                    }
                })
                .filter(|w| w.len() <= maxlen)
                .collect()
        } else {
            m.elements_within(ball, maxlen.min(ball.radius()))?
                .into_iter()
                .map(|v| ball.word(v).clone())
                .collect()
        };
        words.retain(|w| !self.g0.is_member(w).is_yes());
        words.sort();
        words.dedup();
        let n = words.len();
        let mut set = SyllableSet {
            side,
            words,
            min_left: vec![true; n],
            min_right: vec![true; n],
            min_both: vec![true; n],
        };
        if side == Side::H && !g0_trivial {
            for (i, w) in set.words.iter().enumerate() {
                let canon = ball.locate(w).map(|v| ball.word(v).clone());
                let is_rep =
                    |s| -> Result<bool> { Ok(Some(shortest_double_coset_rep(w, &self.g0, ball, s)?) == canon) };
                set.min_left[i] = is_rep(CosetSide::LeftOnly)?;
                set.min_right[i] = is_rep(CosetSide::RightOnly)?;
                set.min_both[i] = is_rep(CosetSide::Both)?;
            }
        }
        Ok(set)
    }

    /// Checks that an `H`-syllable is minimal in the coset determined by
    /// its neighbours.
    pub fn is_normalized(&self, w: &Word, left: bool, right: bool) -> Result<bool> {
        if self.g0_trivial()? {
            return Ok(true);
        }
        let side = match (left, right) {
            (true, true) => CosetSide::Both,
            (true, false) => CosetSide::LeftOnly,
            (false, true) => CosetSide::RightOnly,
            (false, false) => return Ok(true),
        };
        let canon = self.ball.locate(w).map(|v| self.ball.word(v).clone());
        Ok(Some(shortest_double_coset_rep(w, &self.g0, &self.ball, side)?) == canon)
    }
}

/// Syllable words of one side in shortlex order, with coset-minimality
/// flags (`G₀·x`, `x·G₀`, `G₀·x·G₀`).
#[derive(Clone, Debug)]
pub struct SyllableSet {
    pub side: Side,
    pub words: Vec<Word>,
    pub min_left: Vec<bool>,
    pub min_right: Vec<bool>,
    pub min_both: Vec<bool>,
}

impl SyllableSet {
    /// May syllable `i` sit here, given whether it has a left neighbour
    /// and whether it will have a right neighbour?
    pub fn allowed(&self, i: usize, left: bool, right: bool) -> bool {
        match (left, right) {
            (true, true) => self.min_both[i],
            (true, false) => self.min_left[i],
            (false, true) => self.min_right[i],
            (false, false) => true,
        }
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }
}
