//! Geodesic enumeration and thin-triangle estimation on a ball.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::ball::{CayleyBall, PathInBall, VertexId};
use crate::error::{Error, Result};
use crate::words::{Letter, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeodesicSet {
    pub paths: Vec<PathInBall>,
    pub truncated: bool,
}

impl CayleyBall {
    /// Every geodesic word for the element at vertex `g`, in lexicographic
    /// order, stopping after `cap` words.
    pub fn geodesic_words(&self, g: VertexId, cap: usize) -> (Vec<Word>, bool) {
        let target_len = self.layer(g);
        // Vertices on some geodesic from 1 to g: walk predecessors back from g.
        let mut on_interval = HashSet::new();
        on_interval.insert(g);
        let mut frontier = vec![g];
        for _ in 0..target_len {
            let mut next = Vec::new();
            for &x in &frontier {
                let lx = self.layer(x);
                for l in Letter::all(self.oracle().rank()) {
                    if let Some(y) = self.neighbor(x, l) {
                        if self.layer(y) + 1 == lx && on_interval.insert(y) {
                            next.push(y);
                        }
                    }
                }
            }
            frontier = next;
        }

        let mut out = Vec::new();
        let mut truncated = false;
        let mut stack: Vec<Letter> = Vec::with_capacity(target_len);
        self.geodesic_dfs(0, g, &on_interval, &mut stack, &mut out, cap, &mut truncated);
        (out, truncated)
    }

    #[allow(clippy::too_many_arguments)]
    fn geodesic_dfs(
        &self,
        cur: VertexId,
        g: VertexId,
        on_interval: &HashSet<VertexId>,
        stack: &mut Vec<Letter>,
        out: &mut Vec<Word>,
        cap: usize,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        if cur == g {
            if out.len() == cap {
                *truncated = true;
            } else {
                out.push(Word::from_letters(stack.clone()));
            }
            return;
        }
        for l in Letter::all(self.oracle().rank()) {
            if let Some(next) = self.neighbor(cur, l) {
                if on_interval.contains(&next) && self.layer(next) == self.layer(cur) + 1 {
                    stack.push(l);
                    self.geodesic_dfs(next, g, on_interval, stack, out, cap, truncated);
                    stack.pop();
                }
            }
        }
    }

    /// Vertices lying on at least one geodesic from 1 to `g`, found by
    /// walking back through neighbours one layer closer to the identity.
    pub fn interval_from_identity(&self, g: VertexId) -> Vec<VertexId> {
        let mut seen = HashSet::from([g]);
        let mut frontier = vec![g];
        while let Some(x) = frontier.pop() {
            let lx = self.layer(x);
            for l in Letter::all(self.oracle().rank()) {
                if let Some(y) = self.neighbor(x, l) {
                    if self.layer(y) + 1 == lx && seen.insert(y) {
                        frontier.push(y);
                    }
                }
            }
        }
        let mut out: Vec<VertexId> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    /// All geodesics from `u` to `v`, guaranteed to stay inside the ball.
    pub fn geodesics_between(&self, u: VertexId, v: VertexId, cap: usize) -> Result<GeodesicSet> {
        let g = self
            .locate(&self.word(u).invert().concat(self.word(v)))
            .ok_or(Error::RadiusTooSmall {
                needed: self.layer(u) + self.layer(v),
                have: self.radius(),
            })?;
        let d = self.layer(g);
        let needed = self.layer(u).min(self.layer(v)) + d;
        if needed > self.radius() {
            return Err(Error::RadiusTooSmall {
                needed,
                have: self.radius(),
            });
        }
        let (words, truncated) = self.geodesic_words(g, cap);
        let paths = words.iter().map(|w| self.path(u, w)).collect::<Result<Vec<_>>>()?;
        Ok(GeodesicSet { paths, truncated })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "mode")]
pub enum DeltaMode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeltaEstimate {
    pub delta: usize,
    pub radius: usize,
    pub mode: DeltaMode,
    pub triangles: usize,
    /// Third and second vertex of a triangle realizing the maximum (first is 1).
    pub witness: Option<(Word, Word)>,
}

/// Cap on geodesics per triangle side.
pub const GEODESIC_CAP: usize = 20_000;

/// Thin-triangle constant of the window.
///
/// Every geodesic triangle is a translate of one with a corner at the
/// identity, so the scan runs over pairs `(u, v)` whose connecting geodesics
/// stay inside the ball. For each choice of sides and each vertex on a side
/// the distance to the union of the other two sides is taken with those
/// sides chosen adversarially. Neighbourhoods are closed.
pub fn estimate_delta(ball: &CayleyBall, mode: DeltaMode) -> Result<DeltaEstimate> {
    if ball.radius() < 2 {
        return Err(Error::NoAdmissibleTriangle(ball.radius()));
    }
    let mut scan = TriangleScan::new(ball);
    match mode {
        DeltaMode::Exhaustive => {
            for u in 1..ball.len() {
                let budget = ball.radius() - ball.layer(u);
                for (v, d) in ball.local_bfs(u, budget) {
                    if v > u {
                        scan.visit(u, v, d)?;
                    }
                }
            }
        }
        DeltaMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..count {
                let u = rng.gen_range(1..ball.len());
                let v = rng.gen_range(1..ball.len());
                if u == v {
                    continue;
                }
                let (u, v) = (u.min(v), u.max(v));
                if let Some(d) = ball.distance(u, v) {
                    if ball.layer(u).min(ball.layer(v)) + d <= ball.radius() {
                        scan.visit(u, v, d)?;
                    }
                }
            }
        }
    }
    if scan.triangles == 0 {
        return Err(Error::NoAdmissibleTriangle(ball.radius()));
    }
    Ok(DeltaEstimate {
        delta: scan.best,
        radius: ball.radius(),
        mode,
        triangles: scan.triangles,
        witness: scan.witness,
    })
}

struct TriangleScan<'a> {
    ball: &'a CayleyBall,
    /// Geodesic words from 1 to each vertex, filled on demand.
    words: Vec<Option<Vec<Word>>>,
    best: usize,
    witness: Option<(Word, Word)>,
    triangles: usize,
}

impl<'a> TriangleScan<'a> {
    fn new(ball: &'a CayleyBall) -> Self {
        Self {
            ball,
            words: vec![None; ball.len()],
            best: 0,
            witness: None,
            triangles: 0,
        }
    }

    fn side(&mut self, from: VertexId, g: VertexId) -> Result<Vec<Vec<VertexId>>> {
        if self.words[g].is_none() {
            let (ws, truncated) = self.ball.geodesic_words(g, GEODESIC_CAP);
            if truncated {
                return Err(Error::InvalidArgument(format!(
                    "more than {GEODESIC_CAP} geodesics on a triangle side"
                )));
            }
            self.words[g] = Some(ws);
        }
        let ball = self.ball;
        self.words[g]
            .as_ref()
            .unwrap()
            .iter()
            .map(|w| {
                ball.walk_from(from, w.letters()).ok_or(Error::RadiusTooSmall {
                    needed: ball.layer(from) + w.len(),
                    have: ball.radius(),
                })
            })
            .collect()
    }

    /// Triangle `(1, u, v)` with `d(u, v) = d_uv` already known admissible.
    fn visit(&mut self, u: VertexId, v: VertexId, d_uv: usize) -> Result<()> {
        let ball = self.ball;
        let g = ball
            .locate(&ball.word(u).invert().concat(ball.word(v)))
            .expect("admissible pair lies in the ball");
        debug_assert_eq!(ball.layer(g), d_uv);
        let sides = [self.side(0, u)?, self.side(0, v)?, self.side(u, g)?];
        let mut memo = std::collections::HashMap::new();
        let mut dist = |a: VertexId, b: VertexId| -> usize {
            *memo
                .entry((a.min(b), a.max(b)))
                .or_insert_with(|| ball.distance(a, b).unwrap_or(usize::MAX))
        };
        let mut worst = 0;
        for i in 0..3 {
            for gamma in &sides[i] {
                for &w in gamma {
                    let mut reach = usize::MAX;
                    for (j, side) in sides.iter().enumerate() {
                        if j == i {
                            continue;
                        }
                        let far = side
                            .iter()
                            .map(|p| p.iter().map(|&x| dist(w, x)).min().unwrap())
                            .max()
                            .unwrap();
                        reach = reach.min(far);
                    }
                    worst = worst.max(reach);
                }
            }
        }
        self.triangles += 1;
        if worst > self.best || self.witness.is_none() {
            self.best = self.best.max(worst);
            self.witness = Some((ball.word(u).clone(), ball.word(v).clone()));
        }
        Ok(())
    }
}

impl CayleyBall {
    /// Breadth-first search from `start` inside the ball up to `depth`.
    ///
    /// Reported distances are exact whenever `layer(start) + depth <= radius`,
    /// because every geodesic from `start` of length at most `depth` then
    /// stays inside the ball.
    pub fn local_bfs(&self, start: VertexId, depth: usize) -> Vec<(VertexId, usize)> {
        let mut seen = std::collections::HashMap::new();
        seen.insert(start, 0usize);
        let mut out = vec![(start, 0)];
        let mut frontier = vec![start];
        for d in 1..=depth {
            let mut next = Vec::new();
            for &x in &frontier {
                for l in Letter::all(self.oracle().rank()) {
                    if let Some(y) = self.neighbor(x, l) {
                        if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(y) {
                            e.insert(d);
                            out.push((y, d));
                            next.push(y);
                        }
                    }
                }
            }
            frontier = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::presentation::{Presentation, WordOracle};

    fn ball(p: Presentation, r: usize) -> CayleyBall {
        CayleyBall::build(Arc::new(WordOracle::new(p)), r).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn tree_geodesics_are_unique() {
        let b = ball(Presentation::free(2), 3);
        let ab = b.locate(&w("ab")).unwrap();
        let g = b.geodesics_between(0, ab, 10).unwrap();
        assert_eq!(g.paths.len(), 1);
        assert_eq!(g.paths[0].letters, w("ab"));
    }

    #[test]
    fn abelian_control_has_two_geodesics_to_ab() {
        let b = ball(Presentation::free_abelian(2), 3);
        let ab = b.locate(&w("ab")).unwrap();
        let g = b.geodesics_between(0, ab, 10).unwrap();
        let labels: Vec<Word> = g.paths.iter().map(|p| p.letters.clone()).collect();
        assert_eq!(labels, vec![w("ab"), w("ba")]);
    }

    #[test]
    fn trivial_geodesic() {
        let b = ball(Presentation::free(2), 2);
        let g = b.geodesics_between(3, 3, 10).unwrap();
        assert_eq!(g.paths.len(), 1);
        assert!(g.paths[0].is_empty());
    }

    #[test]
    fn geodesic_guard_refuses() {
        let b = ball(Presentation::free(2), 2);
        let u = b.locate(&w("aa")).unwrap();
        let v = b.locate(&w("bb")).unwrap();
        assert!(matches!(
            b.geodesics_between(u, v, 10),
            Err(Error::RadiusTooSmall { .. })
        ));
    }

    #[test]
    fn cap_truncates() {
        let b = ball(Presentation::free_abelian(2), 4);
        let v = b.locate(&w("aabb")).unwrap();
        let g = b.geodesics_between(0, v, 3).unwrap();
        assert!(g.truncated);
        assert_eq!(g.paths.len(), 3);
    }

    #[test]
    fn delta_of_a_tree_is_zero() {
        for r in 2..=5 {
            let b = ball(Presentation::free(2), r);
            assert_eq!(estimate_delta(&b, DeltaMode::Exhaustive).unwrap().delta, 0);
        }
    }

    #[test]
    fn delta_needs_radius_two() {
        let b = ball(Presentation::free(2), 1);
        assert!(matches!(
            estimate_delta(&b, DeltaMode::Exhaustive),
            Err(Error::NoAdmissibleTriangle(1))
        ));
    }
}
