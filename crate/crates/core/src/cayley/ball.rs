use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentation::{OracleKind, WordOracle};
use crate::words::{Letter, Word};

pub type VertexId = usize;

const NONE: u32 = u32::MAX;

/// How candidate words are matched to existing vertices while a ball grows.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexIdentification {
    /// Normal-form lookup where the oracle has one; otherwise Dehn reduction
    /// followed by a walk, falling back to invariant buckets.
    #[default]
    Keyed,
    /// Compare each candidate against every vertex of the adjacent layers.
    Pairwise,
}

#[derive(Clone, Copy, Debug)]
pub struct BallLimits {
    pub max_vertices: usize,
    pub identification: VertexIdentification,
}

impl Default for BallLimits {
    fn default() -> Self {
        Self {
            max_vertices: 2_000_000,
            identification: VertexIdentification::Keyed,
        }
    }
}

/// The ball of radius `R` about the identity in the Cayley graph.
///
/// Vertex 0 is the identity. Every vertex carries its shortlex-least
/// geodesic word, and vertices are stored in shortlex order, so layer `n`
/// occupies `sphere_offsets[n]..sphere_offsets[n + 1]`.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    oracle: Arc<WordOracle>,
    radius: usize,
    words: Vec<Word>,
    layer: Vec<u32>,
    adj: Vec<u32>,
    sphere_offsets: Vec<usize>,
    index: HashMap<Word, u32>,
    buckets: HashMap<Vec<i64>, Vec<u32>>,
}

impl CayleyBall {
    pub fn build(oracle: Arc<WordOracle>, radius: usize) -> Result<Self> {
        Self::build_with(oracle, radius, BallLimits::default())
    }

    pub fn build_with(oracle: Arc<WordOracle>, radius: usize, limits: BallLimits) -> Result<Self> {
        let k = 2 * oracle.rank();
        let mut ball = CayleyBall {
            oracle,
            radius,
            words: Vec::new(),
            layer: Vec::new(),
            adj: Vec::new(),
            sphere_offsets: vec![0],
            index: HashMap::new(),
            buckets: HashMap::new(),
        };
        ball.push_vertex(Word::empty(), 0);
        ball.sphere_offsets.push(1);

        for n in 0..=radius {
            let (lo, hi) = (ball.sphere_offsets[n], ball.sphere_offsets[n + 1]);
            for v in lo..hi {
                for slot in 0..k {
                    if ball.adj[v * k + slot] != NONE {
                        continue;
                    }
                    let cand = ball.words[v].concat(&Word::letter(Letter::from_slot(slot)));
                    let target = match limits.identification {
                        VertexIdentification::Keyed => ball.identify_keyed(&cand, n),
                        VertexIdentification::Pairwise => ball.identify_pairwise(&cand, n),
                    };
                    let t = match target {
                        Some(t) => t,
                        None if n < radius => {
                            if ball.words.len() >= limits.max_vertices {
                                return Err(Error::ResourceExceeded {
                                    completed_radius: n,
                                    vertices: ball.words.len(),
                                });
                            }
                            ball.push_vertex(cand, n as u32 + 1)
                        }
                        None => continue,
                    };
                    ball.adj[v * k + slot] = t as u32;
                    ball.adj[t * k + (slot ^ 1)] = v as u32;
                }
            }
            if n < radius {
                ball.sphere_offsets.push(ball.words.len());
            }
        }
        Ok(ball)
    }

    fn push_vertex(&mut self, w: Word, layer: u32) -> VertexId {
        let id = self.words.len();
        let k = 2 * self.oracle.rank();
        match self.oracle.normal_form(&w) {
            Some(nf) => {
                self.index.insert(nf, id as u32);
            }
            None => self
                .buckets
                .entry(self.oracle.invariant_key(&w))
                .or_default()
                .push(id as u32),
        }
        self.words.push(w);
        self.layer.push(layer);
        self.adj.extend(std::iter::repeat_n(NONE, k));
        id
    }

    /// Matches a candidate `v·x` with `|v| = n` against layers `n-1..=n+1`.
    fn identify_keyed(&self, cand: &Word, n: usize) -> Option<VertexId> {
        if let Some(nf) = self.oracle.normal_form(cand) {
            return self.index.get(&nf).map(|&i| i as usize);
        }
        let reduced = self.oracle.dehn_reduce(cand);
        if reduced.len() <= n {
            return self.walk_from(0, reduced.letters()).map(|p| *p.last().unwrap());
        }
        self.bucket_search(cand, n.saturating_sub(1), n + 1)
    }

    fn identify_pairwise(&self, cand: &Word, n: usize) -> Option<VertexId> {
        let lo = self.sphere_offsets[n.saturating_sub(1)];
        (lo..self.words.len()).find(|&t| self.oracle.equal(cand, &self.words[t]))
    }

    fn bucket_search(&self, w: &Word, min_layer: usize, max_layer: usize) -> Option<VertexId> {
        let bucket = self.buckets.get(&self.oracle.invariant_key(w))?;
        bucket
            .iter()
            .map(|&t| t as usize)
            .filter(|&t| (min_layer..=max_layer).contains(&(self.layer[t] as usize)))
            .find(|&t| self.oracle.equal(w, &self.words[t]))
    }

    pub fn oracle(&self) -> &Arc<WordOracle> {
        &self.oracle
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Number of signed letters.
    pub fn degree(&self) -> usize {
        2 * self.oracle.rank()
    }

    pub fn word(&self, v: VertexId) -> &Word {
        &self.words[v]
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    /// Distance from the identity.
    pub fn layer(&self, v: VertexId) -> usize {
        self.layer[v] as usize
    }

    pub fn sphere_sizes(&self) -> Vec<usize> {
        self.sphere_offsets.windows(2).map(|w| w[1] - w[0]).collect()
    }

    /// Vertices at distance `n` from the identity.
    pub fn sphere(&self, n: usize) -> std::ops::Range<VertexId> {
        if n > self.radius {
            return 0..0;
        }
        self.sphere_offsets[n]..self.sphere_offsets[n + 1]
    }

    /// Vertices at distance at most `n`.
    pub fn within(&self, n: usize) -> std::ops::Range<VertexId> {
        0..self.sphere_offsets[n.min(self.radius) + 1]
    }

    pub fn neighbor(&self, v: VertexId, l: Letter) -> Option<VertexId> {
        let t = self.adj[v * self.degree() + l.slot()];
        (t != NONE).then_some(t as usize)
    }

    /// Follows `letters` from `start`; `None` if the path leaves the ball.
    pub fn walk_from(&self, start: VertexId, letters: &[Letter]) -> Option<Vec<VertexId>> {
        let mut out = Vec::with_capacity(letters.len() + 1);
        out.push(start);
        let mut cur = start;
        for &l in letters {
            cur = self.neighbor(cur, l)?;
            out.push(cur);
        }
        Some(out)
    }

    /// The vertex representing the element `w`, if it lies in the ball.
    pub fn locate(&self, w: &Word) -> Option<VertexId> {
        if let Some(nf) = self.oracle.normal_form(w) {
            return self.index.get(&nf).map(|&i| i as usize);
        }
        let reduced = self.oracle.dehn_reduce(w);
        if reduced.len() <= self.radius {
            return self.walk_from(0, reduced.letters()).map(|p| *p.last().unwrap());
        }
        self.bucket_search(&reduced, 0, self.radius)
    }

    /// `|w|` in the group if it is at most the radius.
    pub fn element_length(&self, w: &Word) -> Option<usize> {
        self.locate(w).map(|v| self.layer(v))
    }

    /// Exact distance `d(u, v)`, or `None` when it exceeds the radius.
    pub fn distance(&self, u: VertexId, v: VertexId) -> Option<usize> {
        if u == v {
            return Some(0);
        }
        let (wu, wv) = (&self.words[u], &self.words[v]);
        let d = match self.oracle.kind() {
            OracleKind::FreeGroup => {
                let common = wu
                    .letters()
                    .iter()
                    .zip(wv.letters())
                    .take_while(|(a, b)| a == b)
                    .count();
                wu.len() + wv.len() - 2 * common
            }
            OracleKind::FreeAbelianControl => {
                let rank = self.oracle.rank();
                let (eu, ev) = (wu.exponent_sums(rank), wv.exponent_sums(rank));
                eu.iter().zip(&ev).map(|(a, b)| (a - b).unsigned_abs() as usize).sum()
            }
            OracleKind::DehnC16 => return self.element_length(&wu.invert().concat(wv)),
        };
        (d <= self.radius).then_some(d)
    }

    /// Builds a path from `start` labelled `letters`, refusing if it leaves the ball.
    pub fn path(&self, start: VertexId, letters: &Word) -> Result<PathInBall> {
        let vertices = self.walk_from(start, letters.letters()).ok_or(Error::RadiusTooSmall {
            needed: self.layer(start) + letters.len(),
            have: self.radius,
        })?;
        Ok(PathInBall {
            start,
            letters: letters.clone(),
            vertices,
        })
    }

    /// Structured export with stable field names.
    pub fn export(&self) -> BallExport {
        let alpha = self.oracle.presentation().alphabet();
        let k = self.degree();
        BallExport {
            schema: BALL_SCHEMA.to_string(),
            presentation_hash: self.oracle.presentation().hash(),
            oracle_kind: self.oracle.kind(),
            radius: self.radius,
            letters: Letter::all(self.oracle.rank())
                .map(|l| alpha.letter_char(l).to_string())
                .collect(),
            sphere_sizes: self.sphere_sizes(),
            vertices: (0..self.len())
                .map(|v| ExportVertex {
                    word: alpha.format(&self.words[v]),
                    layer: self.layer(v),
                    neighbors: (0..k)
                        .map(|s| {
                            let t = self.adj[v * k + s];
                            (t != NONE).then_some(t as usize)
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}

pub const BALL_SCHEMA: &str = "pingpong-ball/1";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BallExport {
    pub schema: String,
    pub presentation_hash: String,
    pub oracle_kind: OracleKind,
    pub radius: usize,
    /// Signed letters in adjacency order: `a, A, b, B, ...`.
    pub letters: Vec<String>,
    pub sphere_sizes: Vec<usize>,
    pub vertices: Vec<ExportVertex>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportVertex {
    pub word: String,
    pub layer: usize,
    /// Target vertex per signed letter, `null` when outside the ball.
    pub neighbors: Vec<Option<usize>>,
}

/// A path in the ball with its vertex sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathInBall {
    pub start: VertexId,
    pub letters: Word,
    pub vertices: Vec<VertexId>,
}

impl PathInBall {
    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn end(&self) -> VertexId {
        *self.vertices.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::Presentation;

    fn ball(p: Presentation, r: usize) -> CayleyBall {
        CayleyBall::build(Arc::new(WordOracle::new(p)), r).unwrap()
    }

    #[test]
    fn free_rank_two_radius_two() {
        let b = ball(Presentation::free(2), 2);
        assert_eq!(b.len(), 17);
        assert_eq!(b.sphere_sizes(), vec![1, 4, 12]);
    }

    #[test]
    fn integers_radius_three() {
        let b = ball(Presentation::free(1), 3);
        assert_eq!(b.len(), 7);
    }

    #[test]
    fn free_abelian_spheres() {
        let b = ball(Presentation::free_abelian(2), 3);
        assert_eq!(b.sphere_sizes(), vec![1, 4, 8, 12]);
    }

    #[test]
    fn canonical_words_are_shortlex_least() {
        let b = ball(Presentation::free_abelian(2), 2);
        // ab = ba; the shortlex-least label is "ab".
        let v = b.locate(&Word::parse("ba").unwrap()).unwrap();
        assert_eq!(b.word(v), &Word::parse("ab").unwrap());
    }

    #[test]
    fn resource_limit_names_completed_radius() {
        let oracle = Arc::new(WordOracle::new(Presentation::free(2)));
        let limits = BallLimits {
            max_vertices: 20,
            ..Default::default()
        };
        let e = CayleyBall::build_with(oracle, 4, limits).unwrap_err();
        assert_eq!(
            e,
            Error::ResourceExceeded {
                completed_radius: 2,
                vertices: 20
            }
        );
    }

    #[test]
    fn edges_are_symmetric() {
        let b = ball(Presentation::surface(2).unwrap(), 2);
        for v in 0..b.len() {
            for l in Letter::all(4) {
                if let Some(t) = b.neighbor(v, l) {
                    assert_eq!(b.neighbor(t, l.inv()), Some(v));
                }
            }
        }
    }

    #[test]
    fn path_refuses_to_leave() {
        let b = ball(Presentation::free(2), 2);
        assert!(b.path(0, &Word::parse("ab").unwrap()).is_ok());
        assert!(matches!(
            b.path(0, &Word::parse("aba").unwrap()),
            Err(Error::RadiusTooSmall { .. })
        ));
    }
}
