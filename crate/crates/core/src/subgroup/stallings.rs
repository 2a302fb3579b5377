use std::collections::{HashMap, VecDeque};

use crate::words::{Letter, Word};

const NONE: u32 = u32::MAX;

/// A folded, core subgroup graph over a free group, based at vertex 0.
///
/// A freely reduced word lies in the subgroup iff it can be read as a
/// closed path at the base vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StallingsGraph {
    rank: usize,
    adj: Vec<u32>,
}

impl StallingsGraph {
    pub fn from_generators(rank: usize, generators: &[Word]) -> Self {
        let mut f = Folder::new(rank);
        for g in generators {
            let g = g.free_reduce();
            if g.is_empty() {
                continue;
            }
            let mut cur = 0;
            for (i, &l) in g.letters().iter().enumerate() {
                let next = if i + 1 == g.len() { 0 } else { f.fresh() };
                f.add_edge(cur, l.slot(), next);
                cur = next;
            }
            f.fold();
        }
        f.finish()
    }

    /// The graph of `self ∩ other` (pullback), trimmed to its core.
    pub fn intersect(&self, other: &StallingsGraph) -> StallingsGraph {
        assert_eq!(self.rank, other.rank);
        let k = 2 * self.rank;
        let mut ids: HashMap<(u32, u32), u32> = HashMap::new();
        let mut order = vec![(0u32, 0u32)];
        ids.insert((0, 0), 0);
        let mut adj = Vec::new();
        let mut i = 0;
        while i < order.len() {
            let (x, y) = order[i];
            adj.extend(std::iter::repeat_n(NONE, k));
            for s in 0..k {
                let (tx, ty) = (self.adj[x as usize * k + s], other.adj[y as usize * k + s]);
                if tx == NONE || ty == NONE {
                    continue;
                }
                let n = ids.len() as u32;
                let t = *ids.entry((tx, ty)).or_insert_with(|| {
                    order.push((tx, ty));
                    n
                });
                adj[i * k + s] = t;
            }
            i += 1;
        }
        let mut g = StallingsGraph { rank: self.rank, adj };
        g.trim();
        g
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn vertex_count(&self) -> usize {
        self.adj.len() / (2 * self.rank).max(1)
    }

    /// Number of undirected edges.
    pub fn edge_count(&self) -> usize {
        let k = 2 * self.rank;
        (0..self.vertex_count())
            .map(|v| (0..k).filter(|&s| self.adj[v * k + s] != NONE).count())
            .sum::<usize>()
            / 2
    }

    /// The subgroup is trivial iff its core graph has no edges.
    pub fn is_trivial(&self) -> bool {
        self.edge_count() == 0
    }

    /// Every letter is a loop at a single vertex.
    pub fn is_whole_group(&self) -> bool {
        self.vertex_count() == 1 && self.adj.iter().all(|&t| t == 0)
    }

    pub fn target(&self, v: usize, l: Letter) -> Option<usize> {
        let t = self.adj[v * 2 * self.rank + l.slot()];
        (t != NONE).then_some(t as usize)
    }

    /// Reads as much of the reduced form of `w` as possible from the base.
    /// Returns the vertex reached and the number of letters consumed.
    pub fn read(&self, w: &Word) -> (usize, usize, Word) {
        let w = w.free_reduce();
        let mut v = 0;
        for (i, &l) in w.letters().iter().enumerate() {
            match self.target(v, l) {
                Some(t) => v = t,
                None => return (v, i, w),
            }
        }
        (v, w.len(), w)
    }

    pub fn accepts(&self, w: &Word) -> bool {
        let (v, n, w) = self.read(w);
        v == 0 && n == w.len()
    }

    /// Canonical label of the right coset `Hw`: where reading stops, and
    /// the unread suffix.
    pub fn coset_key(&self, w: &Word) -> (usize, Word) {
        let (v, n, w) = self.read(w);
        (v, w.subword(n, w.len()))
    }

    /// Reduced closed paths at the base of length at most `maxlen`, in
    /// shortlex order. The empty word is included.
    pub fn closed_words(&self, maxlen: usize) -> Vec<Word> {
        let mut out = vec![Word::empty()];
        let mut frontier: Vec<(usize, Vec<Letter>)> = vec![(0, Vec::new())];
        for _ in 0..maxlen {
            let mut next = Vec::new();
            for (v, word) in &frontier {
                for l in Letter::all(self.rank) {
                    if word.last().is_some_and(|&p| p == l.inv()) {
                        continue;
                    }
                    if let Some(t) = self.target(*v, l) {
                        let mut nw = word.clone();
                        nw.push(l);
                        if t == 0 {
                            out.push(Word::from_letters(nw.clone()));
                        }
                        next.push((t, nw));
                    }
                }
            }
            frontier = next;
        }
        out
    }

    /// Removes non-base vertices of degree at most one, repeatedly, and
    /// renumbers breadth-first from the base.
    fn trim(&mut self) {
        let k = 2 * self.rank;
        let n = self.vertex_count();
        let mut alive = vec![true; n];
        let degree = |adj: &[u32], alive: &[bool], v: usize| {
            (0..k)
                .filter(|&s| {
                    let t = adj[v * k + s];
                    t != NONE && alive[t as usize]
                })
                .count()
        };
        let mut queue: VecDeque<usize> = (1..n).collect();
        while let Some(v) = queue.pop_front() {
            if !alive[v] || degree(&self.adj, &alive, v) > 1 {
                continue;
            }
            alive[v] = false;
            for s in 0..k {
                let t = self.adj[v * k + s];
                if t != NONE && t as usize != 0 && alive[t as usize] {
                    queue.push_back(t as usize);
                }
            }
        }
        for v in 0..n {
            for s in 0..k {
                let t = self.adj[v * k + s];
                if !alive[v] || (t != NONE && !alive[t as usize]) {
                    self.adj[v * k + s] = NONE;
                }
            }
        }
        self.renumber();
    }

    fn renumber(&mut self) {
        let k = 2 * self.rank;
        let n = self.vertex_count();
        let mut new_id = vec![NONE; n];
        let mut order = vec![0usize];
        new_id[0] = 0;
        let mut i = 0;
        while i < order.len() {
            let v = order[i];
            for s in 0..k {
                let t = self.adj[v * k + s];
                if t != NONE && new_id[t as usize] == NONE {
                    new_id[t as usize] = order.len() as u32;
                    order.push(t as usize);
                }
            }
            i += 1;
        }
        let mut adj = vec![NONE; order.len() * k];
        for (nv, &v) in order.iter().enumerate() {
            for s in 0..k {
                let t = self.adj[v * k + s];
                if t != NONE {
                    adj[nv * k + s] = new_id[t as usize];
                }
            }
        }
        self.adj = adj;
    }
}

/// Union-find folding of a labelled graph.
struct Folder {
    rank: usize,
    parent: Vec<usize>,
    edges: Vec<HashMap<usize, usize>>,
    pending: Vec<(usize, usize)>,
}

impl Folder {
    fn new(rank: usize) -> Self {
        Self {
            rank,
            parent: vec![0],
            edges: vec![HashMap::new()],
            pending: Vec::new(),
        }
    }

    fn fresh(&mut self) -> usize {
        self.parent.push(self.parent.len());
        self.edges.push(HashMap::new());
        self.parent.len() - 1
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn half_edge(&mut self, u: usize, slot: usize, v: usize) {
        match self.edges[u].get(&slot).copied() {
            Some(t) => {
                let t = self.find(t);
                if t != v {
                    self.pending.push((t, v));
                }
            }
            None => {
                self.edges[u].insert(slot, v);
            }
        }
    }

    fn add_edge(&mut self, u: usize, slot: usize, v: usize) {
        let (u, v) = (self.find(u), self.find(v));
        self.half_edge(u, slot, v);
        self.half_edge(v, slot ^ 1, u);
    }

    fn fold(&mut self) {
        while let Some((a, b)) = self.pending.pop() {
            let (a, b) = (self.find(a), self.find(b));
            if a == b {
                continue;
            }
            // Keep the base as a representative.
            let (a, b) = if b == 0 { (b, a) } else { (a, b) };
            self.parent[b] = a;
            let moved = std::mem::take(&mut self.edges[b]);
            for (slot, t) in moved {
                let t = self.find(t);
                self.half_edge(a, slot, t);
            }
        }
    }

    fn finish(mut self) -> StallingsGraph {
        let k = 2 * self.rank;
        let n = self.parent.len();
        let reps: Vec<usize> = (0..n).filter(|&v| self.find(v) == v).collect();
        let mut id = vec![NONE; n];
        for (i, &r) in reps.iter().enumerate() {
            id[r] = i as u32;
        }
        let mut adj = vec![NONE; reps.len() * k];
        for (i, &r) in reps.iter().enumerate() {
            let edges: Vec<(usize, usize)> = self.edges[r].iter().map(|(&s, &t)| (s, t)).collect();
            for (s, t) in edges {
                let t = self.find(t);
                adj[i * k + s] = id[t];
            }
        }
        let mut g = StallingsGraph { rank: self.rank, adj };
        g.trim();
        g
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    fn graph(gens: &[&str]) -> StallingsGraph {
        StallingsGraph::from_generators(2, &gens.iter().map(|g| w(g)).collect::<Vec<_>>())
    }

    #[test]
    fn cyclic_subgroup() {
        let g = graph(&["a"]);
        assert_eq!(g.vertex_count(), 1);
        assert!(g.accepts(&w("aaa")));
        assert!(g.accepts(&w("AA")));
        assert!(!g.accepts(&w("ab")));
    }

    #[test]
    fn folding_merges_shared_prefixes() {
        let g = graph(&["ab", "aB"]);
        assert_eq!(g.vertex_count(), 2);
        assert!(g.accepts(&w("abbA")));
        assert!(!g.accepts(&w("b")));
    }

    #[test]
    fn whole_group() {
        assert!(graph(&["a", "b"]).is_whole_group());
        assert!(graph(&["ab", "b"]).is_whole_group());
        assert!(!graph(&["ab", "ba"]).is_whole_group());
    }

    #[test]
    fn conjugate_generator_has_a_stem() {
        let g = graph(&["bA"]);
        assert!(g.accepts(&w("bAbA")));
        assert!(!g.accepts(&w("Ab")));
        assert_eq!(g.coset_key(&w("bAa")), g.coset_key(&w("b")));
    }

    #[test]
    fn intersections() {
        assert!(graph(&["a"]).intersect(&graph(&["b"])).is_trivial());
        let i = graph(&["aa"]).intersect(&graph(&["aaa"]));
        assert!(i.accepts(&w("aaaaaa")));
        assert!(!i.accepts(&w("aa")));
        assert!(!i.accepts(&w("aaa")));
        let t = graph(&["a"]).intersect(&graph(&["a", "b"]));
        assert_eq!(t, graph(&["a"]));
    }

    #[test]
    fn closed_words_of_power_subgroup() {
        let g = graph(&["aaaaa"]);
        let words = g.closed_words(10);
        assert_eq!(
            words.iter().map(|w| w.to_string()).collect::<Vec<_>>(),
            ["", "aaaaa", "AAAAA", "aaaaaaaaaa", "AAAAAAAAAA"]
        );
    }

    #[test]
    fn coset_keys_distinguish_cosets() {
        let g = graph(&["a"]);
        assert_eq!(g.coset_key(&w("ab")), g.coset_key(&w("aab")));
        assert_ne!(g.coset_key(&w("b")), g.coset_key(&w("B")));
        assert_eq!(g.coset_key(&w("a")), g.coset_key(&w("")));
    }
}
