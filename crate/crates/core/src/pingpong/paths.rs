use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::instance::{PingPongInstance, Side, SyllableSet};
use crate::cayley::{CayleyBall, PathInBall, VertexId};
use crate::error::{Error, Result};
use crate::words::Word;

/// `p₁q₁⋯q_{m−1}p_m` read from the identity, with syllable boundaries.
#[derive(Clone, Debug)]
pub struct SyllablePath {
    pub factors: Vec<(Side, Word)>,
    pub path: PathInBall,
    /// Letter positions where one syllable ends and the next begins.
    pub boundaries: Vec<usize>,
}

impl SyllablePath {
    /// Vertex index range `start..=end` of syllable `i` on the path.
    pub fn span(&self, i: usize) -> (usize, usize) {
        let start = if i == 0 { 0 } else { self.boundaries[i - 1] };
        let end = self.boundaries.get(i).copied().unwrap_or(self.path.len());
        (start, end)
    }

    fn vertices(&self, i: usize) -> &[VertexId] {
        let (s, e) = self.span(i);
        &self.path.vertices[s..=e]
    }
}

/// Concatenates alternating factors into a path from 1.
///
/// Empty factors are tolerated at either end only. `H`-factors must be
/// shortest in the coset of `G₀` their neighbours allow.
pub fn assemble_syllable_path(inst: &PingPongInstance, factors: &[(Side, Word)]) -> Result<SyllablePath> {
    let mut kept: Vec<(usize, Side, Word)> = Vec::new();
    for (i, (side, w)) in factors.iter().enumerate() {
        if w.is_empty() && (i == 0 || i + 1 == factors.len()) {
            continue;
        }
        if kept.last().is_some_and(|(_, s, _)| s == side) {
            return Err(Error::InvalidArgument(format!(
                "factors {} and {i} are on the same side",
                i - 1
            )));
        }
        kept.push((i, *side, w.clone()));
    }
    let n = kept.len();
    for (j, (i, side, w)) in kept.iter().enumerate() {
        let m = inst.member(*side);
        if !m.is_member(w).is_yes() {
            return Err(Error::InvalidArgument(format!(
                "factor {i} ({}) is not in {}1",
                inst.oracle().format(w),
                if *side == Side::H { "H" } else { "K" }
            )));
        }
        if inst.g0.is_member(w).is_yes() {
            return Err(Error::DegenerateSyllable { index: *i });
        }
        if *side == Side::H && !inst.is_normalized(w, j > 0, j + 1 < n)? {
            return Err(Error::NormalizeFirst { index: *i });
        }
    }
    let mut label = Word::empty();
    let mut boundaries = Vec::new();
    for (j, (_, _, w)) in kept.iter().enumerate() {
        label = label.concat(w);
        if j + 1 < n {
            boundaries.push(label.len());
        }
    }
    let path = inst.ball.path(0, &label)?;
    Ok(SyllablePath {
        factors: kept.into_iter().map(|(_, s, w)| (s, w)).collect(),
        path,
        boundaries,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverlapReport {
    /// Per junction: longest subpath of the `H`-syllable, ending at the
    /// junction, inside the `δ`-neighbourhood of the adjacent `K`-syllable.
    pub l5: Vec<usize>,
    /// Per pair of `H`-syllables around one `K`-syllable: longest subpath of
    /// one inside the `2δ`-neighbourhood of the other.
    pub l6: Vec<usize>,
}

impl OverlapReport {
    pub fn max_l5(&self) -> usize {
        self.l5.iter().copied().max().unwrap_or(0)
    }

    pub fn max_l6(&self) -> usize {
        self.l6.iter().copied().max().unwrap_or(0)
    }
}

fn dist_to_set(ball: &CayleyBall, v: VertexId, set: &[VertexId], within: usize) -> bool {
    set.iter().any(|&s| ball.distance(v, s).is_some_and(|d| d <= within))
}

fn longest_run(flags: impl Iterator<Item = bool>) -> usize {
    let (mut best, mut cur) = (0usize, 0usize);
    for f in flags {
        cur = if f { cur + 1 } else { 0 };
        best = best.max(cur);
    }
    best.saturating_sub(1)
}

/// Measures the overlaps bounded in Lemmas 5 and 6.
pub fn measure_overlaps(ball: &CayleyBall, sp: &SyllablePath, delta: usize, with_l6: bool) -> OverlapReport {
    let n = sp.factors.len();
    let mut report = OverlapReport::default();
    for j in 0..n.saturating_sub(1) {
        let (hi, ki, h_first) = if sp.factors[j].0 == Side::H {
            (j, j + 1, true)
        } else {
            (j + 1, j, false)
        };
        let hv = sp.vertices(hi);
        let kv = sp.vertices(ki);
        let from_junction: Vec<VertexId> = if h_first {
            hv.iter().rev().copied().collect()
        } else {
            hv.to_vec()
        };
        let run = from_junction
            .iter()
            .skip(1)
            .take_while(|&&v| dist_to_set(ball, v, kv, delta))
            .count();
        report.l5.push(run);
    }
    if with_l6 {
        for i in 0..n.saturating_sub(2) {
            if sp.factors[i].0 != Side::H {
                continue;
            }
            let (a, b) = (sp.vertices(i), sp.vertices(i + 2));
            let ab = longest_run(a.iter().map(|&v| dist_to_set(ball, v, b, 2 * delta)));
            let ba = longest_run(b.iter().map(|&v| dist_to_set(ball, v, a, 2 * delta)));
            report.l6.push(ab.max(ba));
        }
    }
    report
}

/// Alternating syllable tuples, given as `(start side, indices)`.
pub type SyllableTuple = (Side, Vec<usize>);

/// All alternating products of normalized syllables with total length at
/// most `maxlen`, or `None` if there are more than `limit`.
pub fn enumerate_tuples(h: &SyllableSet, k: &SyllableSet, maxlen: usize, limit: usize) -> Option<Vec<SyllableTuple>> {
    let mut out = Vec::new();
    for start in [Side::H, Side::K] {
        let mut stack = Vec::new();
        if !extend(h, k, start, maxlen, &mut stack, &mut out, limit) {
            return None;
        }
    }
    Some(out)
}

fn set_for<'a>(h: &'a SyllableSet, k: &'a SyllableSet, side: Side) -> &'a SyllableSet {
    match side {
        Side::H => h,
        Side::K => k,
    }
}

fn extend(
    h: &SyllableSet,
    k: &SyllableSet,
    side: Side,
    remaining: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<SyllableTuple>,
    limit: usize,
) -> bool {
    let start = if stack.len().is_multiple_of(2) {
        side
    } else {
        side.other()
    };
    let set = set_for(h, k, start);
    let left = !stack.is_empty();
    for (i, w) in set.words.iter().enumerate() {
        if w.len() > remaining || !set.allowed(i, left, false) && !set.allowed(i, left, true) {
            continue;
        }
        stack.push(i);
        if set.allowed(i, left, false) {
            if out.len() == limit {
                return false;
            }
            out.push((side, stack.clone()));
        }
        if set.allowed(i, left, true) && !extend(h, k, side, remaining - w.len(), stack, out, limit) {
            return false;
        }
        stack.pop();
    }
    true
}

/// Random alternating tuples with total length at most `maxlen`.
pub fn sample_tuples(h: &SyllableSet, k: &SyllableSet, maxlen: usize, count: usize, seed: u64) -> Vec<SyllableTuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count && attempts < count * 100 {
        attempts += 1;
        let side = if rng.gen_bool(0.5) { Side::H } else { Side::K };
        let mut tuple = Vec::new();
        let mut remaining = maxlen;
        let mut cur = side;
        loop {
            let set = set_for(h, k, cur);
            let left = !tuple.is_empty();
            let options: Vec<usize> = (0..set.len())
                .filter(|&i| set.words[i].len() <= remaining && set.allowed(i, left, true))
                .collect();
            let stop = tuple.len() >= 2 && rng.gen_bool(0.3);
            if options.is_empty() || stop {
                break;
            }
            let i = options[rng.gen_range(0..options.len())];
            remaining -= set.words[i].len();
            tuple.push(i);
            cur = cur.other();
        }
        while let Some(&last) = tuple.last() {
            let set = set_for(h, k, if tuple.len() % 2 == 1 { side } else { side.other() });
            if set.allowed(last, tuple.len() > 1, false) {
                break;
            }
            tuple.pop();
        }
        if !tuple.is_empty() {
            out.push((side, tuple));
        }
    }
    out
}

/// The factor words of a tuple.
pub fn tuple_factors(h: &SyllableSet, k: &SyllableSet, t: &SyllableTuple) -> Vec<(Side, Word)> {
    let mut side = t.0;
    t.1.iter()
        .map(|&i| {
            let f = (side, set_for(h, k, side).words[i].clone());
            side = side.other();
            f
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::pingpong::instance::TheoremMode;
    use crate::presentation::{Presentation, WordOracle};
    use crate::subgroup::SubgroupSpec;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn instance(p: Presentation, r: usize, h: &[&str], k: &[&str], h1: &[&str], k1: &[&str]) -> PingPongInstance {
        let o = Arc::new(WordOracle::new(p));
        let ball = Arc::new(CayleyBall::build(o.clone(), r).unwrap());
        let spec = |n: &str, g: &[&str]| SubgroupSpec::new(o.clone(), n, g.iter().map(|x| w(x)).collect()).unwrap();
        PingPongInstance::new(
            TheoremMode::Theorem1,
            ball,
            spec("H", h),
            spec("K", k),
            spec("H1", h1),
            Some(spec("K1", k1)),
        )
        .unwrap()
    }

    #[test]
    fn concatenation_records_boundaries() {
        let inst = instance(Presentation::free(2), 6, &["a"], &["b"], &["aa"], &["bbb"]);
        let sp = assemble_syllable_path(&inst, &[(Side::H, w("aa")), (Side::K, w("bbb"))]).unwrap();
        assert_eq!(sp.path.letters, w("aabbb"));
        assert_eq!(sp.boundaries, vec![2]);
    }

    #[test]
    fn unnormalized_factor_is_refused() {
        let inst = instance(
            Presentation::free(2),
            6,
            &["a", "b"],
            &["a", "bab"],
            &["a", "b"],
            &["a", "bab"],
        );
        let err = assemble_syllable_path(&inst, &[(Side::H, w("aba")), (Side::K, w("bab"))]).unwrap_err();
        assert_eq!(err, Error::NormalizeFirst { index: 0 });
    }

    #[test]
    fn degenerate_factor_is_refused() {
        let inst = instance(
            Presentation::free(2),
            6,
            &["a", "b"],
            &["a", "bab"],
            &["a", "b"],
            &["a", "bab"],
        );
        let err = assemble_syllable_path(&inst, &[(Side::H, w("a")), (Side::K, w("bab"))]).unwrap_err();
        assert_eq!(err, Error::DegenerateSyllable { index: 0 });
    }

    #[test]
    fn tree_overlaps_vanish() {
        let inst = instance(Presentation::free(2), 8, &["a"], &["b"], &["a"], &["b"]);
        let sp = assemble_syllable_path(
            &inst,
            &[
                (Side::H, w("aa")),
                (Side::K, w("B")),
                (Side::H, w("AAA")),
                (Side::K, w("bb")),
            ],
        )
        .unwrap();
        let r = measure_overlaps(&inst.ball, &sp, 0, true);
        assert_eq!(r.l5, vec![0, 0, 0]);
        assert_eq!(r.l6, vec![0]);
    }

    #[test]
    fn backtracking_junction_overlaps() {
        let inst = instance(Presentation::free(2), 8, &["ab"], &["b"], &["ab"], &["b"]);
        let sp = assemble_syllable_path(&inst, &[(Side::H, w("ab")), (Side::K, w("B"))]).unwrap();
        let r = measure_overlaps(&inst.ball, &sp, 0, false);
        assert_eq!(r.l5, vec![1]);
    }

    #[test]
    fn enumeration_respects_length_and_alternation() {
        let inst = instance(Presentation::free(2), 4, &["a"], &["b"], &["a"], &["b"]);
        let h = inst.syllables(Side::H, 3).unwrap();
        let k = inst.syllables(Side::K, 3).unwrap();
        let all = enumerate_tuples(&h, &k, 3, usize::MAX).unwrap();
        // Compositions of n <= 3 with two choices per part, two start sides.
        assert_eq!(all.len(), 2 * (2 + 6 + 18));
        assert!(enumerate_tuples(&h, &k, 3, 10).is_none());
        let s = sample_tuples(&h, &k, 3, 50, 7);
        assert_eq!(s.len(), 50);
        assert_eq!(s, sample_tuples(&h, &k, 3, 50, 7));
        for t in &s {
            let len: usize = tuple_factors(&h, &k, t).iter().map(|(_, w)| w.len()).sum();
            assert!(len <= 3);
        }
    }
}
