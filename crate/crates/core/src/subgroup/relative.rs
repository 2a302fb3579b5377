use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::membership::{Membership, MembershipOracle};
use crate::error::{Error, Result};
use crate::words::{Letter, Word};

const NONE: u32 = u32::MAX;

/// The ball of radius `r` about `H·1` in the relative Cayley graph: right
/// cosets `Hg`, with the edge `(Hg, x)` ending at `Hgx`.
#[derive(Clone, Debug)]
pub struct RelativeBall {
    radius: usize,
    rank: usize,
    reps: Vec<Word>,
    layer: Vec<usize>,
    adj: Vec<u32>,
}

impl RelativeBall {
    pub fn build(h: &MembershipOracle, radius: usize) -> Result<Self> {
        let oracle = h.oracle().clone();
        let rank = oracle.rank();
        let k = 2 * rank;
        let mut ball = RelativeBall {
            radius,
            rank,
            reps: vec![Word::empty()],
            layer: vec![0],
            adj: vec![NONE; k],
        };
        if h.is_whole_group() {
            ball.adj.fill(0);
            return Ok(ball);
        }
        let key_coords = hint_coords(h);
        let parity = oracle.even_relators() && h.generators().iter().all(|g| g.len() % 2 == 0);
        let hint = |g: &Word| -> Vec<i64> {
            if let Some(s) = h.stallings() {
                let (v, rest) = s.coset_key(g);
                let mut key = vec![v as i64];
                key.extend(rest.letters().iter().map(|l| l.slot() as i64));
                return key;
            }
            let img = oracle.abelian_image(g);
            let mut key: Vec<i64> = key_coords.iter().map(|&i| img[i]).collect();
            if parity {
                key.push(g.len() as i64 % 2);
            }
            key
        };
        let exact_keys = h.stallings().is_some();
        let mut buckets: HashMap<Vec<i64>, Vec<u32>> = HashMap::from([(hint(&Word::empty()), vec![0])]);
        let mut i = 0;
        while i < ball.reps.len() {
            let boundary = ball.layer[i] == radius;
            for l in Letter::all(rank) {
                if ball.adj[i * k + l.slot()] != NONE {
                    continue;
                }
                let g = ball.reps[i].mul(&Word::letter(l));
                let key = hint(&g);
                let mut found = None;
                for &c in buckets.get(&key).map(Vec::as_slice).unwrap_or(&[]) {
                    if exact_keys {
                        found = Some(c);
                        break;
                    }
                    match h.is_member(&g.concat(&ball.reps[c as usize].invert())) {
                        Membership::Yes => {
                            found = Some(c);
                            break;
                        }
                        Membership::No => {}
                        Membership::Unknown { .. } => {
                            return Err(Error::MembershipUnknown {
                                required_radius: 2 * radius,
                            })
                        }
                    }
                }
                let t = match found {
                    Some(t) => t,
                    None if boundary => continue,
                    None => {
                        let t = ball.reps.len() as u32;
                        ball.reps.push(g);
                        ball.layer.push(ball.layer[i] + 1);
                        ball.adj.extend(std::iter::repeat_n(NONE, k));
                        buckets.entry(key).or_default().push(t);
                        t
                    }
                };
                ball.adj[i * k + l.slot()] = t;
                ball.adj[t as usize * k + l.inv().slot()] = i as u32;
            }
            i += 1;
        }
        Ok(ball)
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.reps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reps.is_empty()
    }

    /// Shortest representative `g` of the coset `Hg`.
    pub fn representative(&self, v: usize) -> &Word {
        &self.reps[v]
    }

    pub fn layer(&self, v: usize) -> usize {
        self.layer[v]
    }

    pub fn neighbor(&self, v: usize, l: Letter) -> Option<usize> {
        let t = self.adj[v * 2 * self.rank + l.slot()];
        (t != NONE).then_some(t as usize)
    }

    /// Number of cosets at distance at most `r` from `H·1`.
    pub fn count_within(&self, r: usize) -> usize {
        self.layer.iter().filter(|&&l| l <= r).count()
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        let mut out = vec![0; self.radius + 1];
        for &l in &self.layer {
            out[l] += 1;
        }
        out
    }

    /// Endpoint of the path from `H·1` labelled `w`, if it stays in the ball.
    pub fn walk(&self, w: &Word) -> Option<usize> {
        w.letters().iter().try_fold(0, |v, &l| self.neighbor(v, l))
    }
}

/// Coordinates of the abelian image on which every generator of `H` vanishes.
fn hint_coords(h: &MembershipOracle) -> Vec<usize> {
    let oracle = h.oracle();
    let images: Vec<Vec<i64>> = h.generators().iter().map(|g| oracle.abelian_image(g)).collect();
    let n = oracle.abelian_image(&Word::empty()).len();
    (0..n).filter(|&i| images.iter().all(|img| img[i] == 0)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lemma6Constants {
    /// Cosets in the closed ball of radius `μ + 2δ` about `H·1`.
    pub m_rel: usize,
    /// `m_rel² + 1`.
    #[serde(rename = "M")]
    pub big_m: usize,
    pub ball_radius: usize,
}

pub fn lemma6_constants(rel: &RelativeBall, mu: usize, delta: usize) -> Result<Lemma6Constants> {
    let r = mu + 2 * delta;
    if rel.radius() < r {
        return Err(Error::RadiusTooSmall {
            needed: r,
            have: rel.radius(),
        });
    }
    let m_rel = rel.count_within(r);
    Ok(Lemma6Constants {
        m_rel,
        big_m: m_rel * m_rel + 1,
        ball_radius: r,
    })
}

#[cfg(test)]
mod tests {
    use std::collections::HashSet;
    use std::sync::Arc;

    use super::*;
    use crate::cayley::CayleyBall;
    use crate::presentation::{Presentation, WordOracle};
    use crate::subgroup::SubgroupSpec;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn member(p: Presentation, gens: &[&str]) -> MembershipOracle {
        let o = Arc::new(WordOracle::new(p));
        let b = Arc::new(CayleyBall::build(o.clone(), 2).unwrap());
        let spec = SubgroupSpec::new(o, "H", gens.iter().map(|g| w(g)).collect()).unwrap();
        MembershipOracle::build(&spec, &b)
    }

    #[test]
    fn cosets_of_a_generator() {
        let h = member(Presentation::free(2), &["a"]);
        let rel = RelativeBall::build(&h, 1).unwrap();
        assert_eq!(rel.len(), 3);
        let reps: HashSet<String> = (0..rel.len()).map(|v| rel.representative(v).to_string()).collect();
        assert_eq!(reps, HashSet::from(["".into(), "b".into(), "B".into()]));
        assert_eq!(rel.neighbor(0, Letter::pos(0)), Some(0));
    }

    #[test]
    fn coset_count_matches_direct_enumeration() {
        let h = member(Presentation::free(2), &["a"]);
        let rel = RelativeBall::build(&h, 2).unwrap();
        let g = h.stallings().unwrap();
        let mut keys = HashSet::new();
        for word in CayleyBall::build(h.oracle().clone(), 2).unwrap().words() {
            keys.insert(g.coset_key(word));
        }
        assert_eq!(rel.count_within(2), keys.len());
        assert_eq!(rel.count_within(2), 9);
        let c = lemma6_constants(&rel, 0, 1).unwrap();
        assert_eq!((c.m_rel, c.big_m), (9, 82));
    }

    #[test]
    fn lemma6_degenerate_cases() {
        let h = member(Presentation::free(2), &["a"]);
        let rel = RelativeBall::build(&h, 0).unwrap();
        let c = lemma6_constants(&rel, 0, 0).unwrap();
        assert_eq!((c.m_rel, c.big_m), (1, 2));
        assert!(lemma6_constants(&rel, 1, 0).is_err());
        let o = Arc::new(WordOracle::new(Presentation::free(2)));
        let b = Arc::new(CayleyBall::build(o.clone(), 1).unwrap());
        let t = MembershipOracle::build(&SubgroupSpec::trivial(o, "1"), &b);
        let c = lemma6_constants(&RelativeBall::build(&t, 0).unwrap(), 0, 0).unwrap();
        assert_eq!((c.m_rel, c.big_m), (1, 2));
    }

    #[test]
    fn whole_group_is_one_vertex_with_loops() {
        let h = member(Presentation::free(2), &["a", "b"]);
        let rel = RelativeBall::build(&h, 3).unwrap();
        assert_eq!(rel.len(), 1);
        for l in Letter::all(2) {
            assert_eq!(rel.neighbor(0, l), Some(0));
        }
    }

    #[test]
    fn trivial_subgroup_gives_the_cayley_ball() {
        for p in [Presentation::free(2), Presentation::surface(2).unwrap()] {
            let o = Arc::new(WordOracle::new(p));
            let b = Arc::new(CayleyBall::build(o.clone(), 2).unwrap());
            let t = MembershipOracle::build(&SubgroupSpec::trivial(o, "1"), &b);
            let rel = RelativeBall::build(&t, 2).unwrap();
            assert_eq!(rel.sphere_sizes(), b.sphere_sizes());
        }
    }

    #[test]
    fn closed_paths_are_subgroup_labels() {
        for (p, gens) in [
            (Presentation::free(2), vec!["ab", "ba"]),
            (Presentation::surface(2).unwrap(), vec!["a"]),
            (Presentation::free_abelian(2), vec!["ab"]),
        ] {
            let h = member(p, &gens);
            let rel = RelativeBall::build(&h, 4).unwrap();
            let rank = h.oracle().rank();
            let maxlen = if rank == 2 { 4 } else { 3 };
            let mut words = vec![Word::empty()];
            let mut layer = vec![Word::empty()];
            for _ in 0..maxlen {
                layer = layer
                    .iter()
                    .flat_map(|x| Letter::all(rank).map(move |l| x.concat(&Word::letter(l))))
                    .collect();
                words.extend(layer.iter().cloned());
            }
            for x in &words {
                let closed = rel.walk(x) == Some(0);
                assert_eq!(closed, h.is_member(x).is_yes(), "{x}");
            }
        }
    }
}
