//! Finite permutation quotients of free groups and the length of the
//! shortest nontrivial element in their kernels.
//!
//! A [`FiniteQuotientSpec`] sends each generator to a permutation of
//! `{1, ..., d}`; its kernel is a normal subgroup of finite index. The
//! *depth* of the quotient is the length of the shortest nontrivial reduced
//! word in that kernel, found exactly by breadth-first search over pairs
//! (image permutation, last letter).

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cayley::CayleyBall;
use crate::error::{Error, Result};
use crate::pingpong::{PingPongInstance, TheoremMode};
use crate::presentation::OracleKind;
use crate::subgroup::SubgroupSpec;
use crate::words::{Alphabet, Letter, Word};

/// A permutation of `{0, ..., d-1}`, written 1-based in cycle notation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<u16>);

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Self((0..degree as u16).collect())
    }

    /// From images `x ↦ images[x]`; rejects non-bijections.
    pub fn from_images(images: Vec<u16>) -> Result<Self> {
        let mut seen = vec![false; images.len()];
        for &p in &images {
            let slot = seen
                .get_mut(p as usize)
                .ok_or_else(|| Error::InvalidArgument(format!("image {} outside 1..={}", p + 1, images.len())))?;
            if std::mem::replace(slot, true) {
                return Err(Error::InvalidArgument(format!("point {} is hit twice", p + 1)));
            }
        }
        Ok(Self(images))
    }

    /// Parses `(1 2 3)(4 5)`; `()` or an empty string is the identity.
    /// `degree` pads with fixed points and must cover every listed point.
    pub fn parse_cycles(text: &str, degree: usize) -> Result<Self> {
        let bad = |m: String| Error::InvalidArgument(m);
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut moved = vec![false; degree];
        let mut rest = text.trim();
        while !rest.is_empty() {
            let body = rest
                .strip_prefix('(')
                .ok_or_else(|| bad(format!("expected `(` in cycle notation, found {rest:?}")))?;
            let close = body.find(')').ok_or_else(|| bad("unclosed cycle".into()))?;
            let points = body[..close]
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| match t.parse::<usize>() {
                    Ok(p) if (1..=degree).contains(&p) => Ok(p - 1),
                    Ok(p) => Err(bad(format!("point {p} outside 1..={degree}"))),
                    Err(_) => Err(bad(format!("{t:?} is not a point"))),
                })
                .collect::<Result<Vec<_>>>()?;
            for (i, &p) in points.iter().enumerate() {
                if std::mem::replace(&mut moved[p], true) {
                    return Err(bad(format!("point {} appears twice", p + 1)));
                }
                images[p] = points[(i + 1) % points.len()] as u16;
            }
            rest = body[close + 1..].trim_start();
        }
        Ok(Self(images))
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn images(&self) -> &[u16] {
        &self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &p)| i == p as usize)
    }

    /// `self` followed by `other` (right action: `x^(gh) = (x^g)^h`).
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&p| other.0[p as usize]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u16; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p as usize] = i as u16;
        }
        Permutation(inv)
    }

    pub fn order(&self) -> u64 {
        let mut seen = vec![false; self.0.len()];
        let mut order = 1u64;
        for start in 0..self.0.len() {
            let mut len = 0u64;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x] as usize;
                len += 1;
            }
            if len > 0 {
                order = lcm(order, len);
            }
        }
        order
    }

    /// Relabels points by `sigma`: returns `sigma⁻¹ · self · sigma`.
    pub fn conjugate(&self, sigma: &Permutation) -> Permutation {
        sigma.inverse().then(self).then(sigma)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    fn gcd(a: u64, b: u64) -> u64 {
        if b == 0 {
            a
        } else {
            gcd(b, a % b)
        }
    }
    a / gcd(a, b) * b
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.0.len()];
        let mut any = false;
        for start in 0..self.0.len() {
            if seen[start] || self.0[start] as usize == start {
                continue;
            }
            any = true;
            write!(f, "({}", start + 1)?;
            seen[start] = true;
            let mut x = self.0[start] as usize;
            while x != start {
                write!(f, " {}", x + 1)?;
                seen[x] = true;
                x = self.0[x] as usize;
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// Generator images in a finite symmetric group.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "QuotientJson", try_from = "QuotientJson")]
pub struct FiniteQuotientSpec {
    degree: usize,
    images: Vec<Permutation>,
}

#[derive(Serialize, Deserialize)]
struct QuotientJson {
    rank: usize,
    degree: usize,
    images: Vec<String>,
}

impl From<FiniteQuotientSpec> for QuotientJson {
    fn from(s: FiniteQuotientSpec) -> Self {
        QuotientJson {
            rank: s.rank(),
            degree: s.degree,
            images: s.images.iter().map(|p| p.to_string()).collect(),
        }
    }
}

impl TryFrom<QuotientJson> for FiniteQuotientSpec {
    type Error = Error;

    fn try_from(j: QuotientJson) -> Result<Self> {
        if j.images.len() != j.rank {
            return Err(Error::InvalidArgument(format!(
                "{} images for rank {}",
                j.images.len(),
                j.rank
            )));
        }
        let images = j
            .images
            .iter()
            .map(|t| Permutation::parse_cycles(t, j.degree))
            .collect::<Result<Vec<_>>>()?;
        FiniteQuotientSpec::new(j.degree, images)
    }
}

impl FiniteQuotientSpec {
    pub fn new(degree: usize, images: Vec<Permutation>) -> Result<Self> {
        if degree == 0 || degree > u16::MAX as usize {
            return Err(Error::InvalidArgument(format!("degree {degree} out of range")));
        }
        if images.is_empty() {
            return Err(Error::InvalidArgument("a quotient needs at least one generator".into()));
        }
        if let Some(p) = images.iter().find(|p| p.degree() != degree) {
            return Err(Error::InvalidArgument(format!(
                "permutation {p} is not on {degree} points"
            )));
        }
        Ok(Self { degree, images })
    }

    /// Parses `perm: a = (1 2 3)(4 5)` lines, one per generator of
    /// `alphabet`, with an optional `degree: N` line. Without it the degree
    /// is the largest point mentioned.
    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        let mut degree: Option<usize> = None;
        let mut raw: Vec<Option<(usize, String)>> = vec![None; alphabet.rank()];
        for (n, line) in text.lines().enumerate() {
            let line_no = n + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |message: String| Error::Parse { line: line_no, message };
            let (key, rest) = line
                .split_once(':')
                .ok_or_else(|| err(format!("expected `key: value`, found {line:?}")))?;
            match key.trim() {
                "degree" => {
                    let d = rest
                        .trim()
                        .parse::<usize>()
                        .map_err(|_| err(format!("bad degree {:?}", rest.trim())))?;
                    degree = Some(d);
                }
                "perm" => {
                    let (name, cycles) = rest
                        .split_once('=')
                        .ok_or_else(|| err("expected `perm: GEN = (cycles)`".into()))?;
                    let name = name.trim();
                    let letter = match (name.chars().next(), name.chars().count()) {
                        (Some(c), 1) => alphabet.parse_letter(c),
                        _ => None,
                    }
                    .filter(|l| !l.is_inverse())
                    .ok_or_else(|| err(format!("{name:?} is not a generator")))?;
                    let slot = &mut raw[letter.index()];
                    if slot.is_some() {
                        return Err(err(format!("generator {name} assigned twice")));
                    }
                    *slot = Some((line_no, cycles.trim().to_string()));
                }
                other => return Err(err(format!("unknown key {other:?}"))),
            }
        }
        let max_point = raw
            .iter()
            .flatten()
            .flat_map(|(_, c)| {
                c.split(|ch: char| !ch.is_ascii_digit())
                    .filter_map(|t| t.parse::<usize>().ok())
            })
            .max()
            .unwrap_or(1);
        let degree = degree.unwrap_or(max_point).max(1);
        let mut images = Vec::with_capacity(raw.len());
        for (i, entry) in raw.into_iter().enumerate() {
            let (line, cycles) = entry.ok_or_else(|| Error::Parse {
                line: 1,
                message: format!("no permutation for generator {}", alphabet.names()[i]),
            })?;
            let p = Permutation::parse_cycles(&cycles, degree).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            images.push(p);
        }
        Self::new(degree, images)
    }

    pub fn to_text(&self, alphabet: &Alphabet) -> String {
        let mut out = format!("degree: {}\n", self.degree);
        for (i, p) in self.images.iter().enumerate() {
            out.push_str(&format!("perm: {} = {p}\n", alphabet.names()[i]));
        }
        out
    }

    pub fn rank(&self) -> usize {
        self.images.len()
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    pub fn letter_image(&self, l: Letter) -> Permutation {
        let p = &self.images[l.index()];
        if l.is_inverse() {
            p.inverse()
        } else {
            p.clone()
        }
    }

    pub fn image(&self, w: &Word) -> Result<Permutation> {
        let mut acc = Permutation::identity(self.degree);
        for &l in w.letters() {
            if l.index() >= self.rank() {
                return Err(Error::InvalidArgument(format!(
                    "letter of generator {} outside rank {}",
                    l.index(),
                    self.rank()
                )));
            }
            acc = acc.then(&self.letter_image(l));
        }
        Ok(acc)
    }

    pub fn conjugate(&self, sigma: &Permutation) -> FiniteQuotientSpec {
        FiniteQuotientSpec {
            degree: self.degree,
            images: self.images.iter().map(|p| p.conjugate(sigma)).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthReport {
    pub spec: FiniteQuotientSpec,
    pub depth: usize,
    pub witness: Word,
    /// BFS states expanded.
    pub states: usize,
}

/// Exact depth of the kernel of `spec`: the shortlex-least nontrivial
/// reduced word whose image is the identity.
pub fn shortest_kernel_element(spec: &FiniteQuotientSpec) -> DepthReport {
    kernel_bfs(spec, usize::MAX).expect("unbounded search always terminates")
}

/// As [`shortest_kernel_element`], giving up after `max_states` expansions.
pub fn shortest_kernel_element_within(spec: &FiniteQuotientSpec, max_states: usize) -> Option<DepthReport> {
    kernel_bfs(spec, max_states)
}

fn kernel_bfs(spec: &FiniteQuotientSpec, max_states: usize) -> Option<DepthReport> {
    struct Node {
        perm: Permutation,
        last: Option<Letter>,
        parent: usize,
    }
    let letters: Vec<(Letter, Permutation)> = Letter::all(spec.rank()).map(|l| (l, spec.letter_image(l))).collect();
    let mut nodes = vec![Node {
        perm: Permutation::identity(spec.degree),
        last: None,
        parent: usize::MAX,
    }];
    let mut seen: HashSet<(Permutation, Option<Letter>)> = HashSet::new();
    let mut queue = VecDeque::from([0usize]);
    let mut states = 0;
    while let Some(i) = queue.pop_front() {
        if states == max_states {
            return None;
        }
        states += 1;
        for (l, img) in &letters {
            if nodes[i].last == Some(l.inv()) {
                continue;
            }
            let perm = nodes[i].perm.then(img);
            let found = perm.is_identity();
            if !found && !seen.insert((perm.clone(), Some(*l))) {
                continue;
            }
            nodes.push(Node {
                perm,
                last: Some(*l),
                parent: i,
            });
            let j = nodes.len() - 1;
            if found {
                let mut rev = Vec::new();
                let mut k = j;
                while let Some(l) = nodes[k].last {
                    rev.push(l);
                    k = nodes[k].parent;
                }
                rev.reverse();
                return Some(DepthReport {
                    spec: spec.clone(),
                    depth: rev.len(),
                    witness: Word::from_letters(rev),
                    states,
                });
            }
            queue.push_back(j);
        }
    }
    unreachable!("a finite image group always has a reduced word in the kernel")
}

pub const DEEP_QUOTIENT_BUDGET: usize = 2_000_000;
const SYSTEMATIC_CAP: u64 = 1_000;
const RANDOM_PER_DEGREE: usize = 256;
const MAX_DEGREE: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum DeepQuotientOutcome {
    Found {
        report: DepthReport,
        /// Candidates examined, including the one returned.
        tried: usize,
        states: usize,
        seed: u64,
    },
    /// The state budget ran out; a limit of the search, not of the group.
    Exhausted { tried: usize, states: usize, seed: u64 },
}

/// Searches permutation images of increasing degree for a quotient of the
/// free group of rank `rank` with depth at least `n`. Small degrees are
/// enumerated in full, the rest sampled from `seed`. `budget` bounds the
/// total number of BFS states.
pub fn find_deep_quotient(rank: usize, n: usize, budget: usize, seed: u64) -> Result<DeepQuotientOutcome> {
    if n == 0 {
        return Err(Error::InvalidArgument("depth target must be at least 1".into()));
    }
    if rank == 0 {
        return Err(Error::InvalidArgument("rank must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tried = 0;
    let mut states = 0;
    for degree in 2..=MAX_DEGREE {
        let systematic = factorial(degree)
            .and_then(|f| f.checked_pow(rank as u32))
            .is_some_and(|c| c <= SYSTEMATIC_CAP);
        let candidates: Box<dyn Iterator<Item = Vec<Permutation>>> = if systematic {
            let all = all_permutations(degree);
            Box::new(tuples(all, rank))
        } else {
            let rng = &mut rng;
            Box::new((0..RANDOM_PER_DEGREE).map(move |_| {
                (0..rank)
                    .map(|_| {
                        let mut v: Vec<u16> = (0..degree as u16).collect();
                        v.shuffle(rng);
                        Permutation(v)
                    })
                    .collect()
            }))
        };
        for images in candidates {
            if images.iter().all(Permutation::is_identity) {
                continue;
            }
            if states >= budget {
                return Ok(DeepQuotientOutcome::Exhausted { tried, states, seed });
            }
            tried += 1;
            let spec = FiniteQuotientSpec::new(degree, images)?;
            match shortest_kernel_element_within(&spec, budget - states) {
                None => {
                    states = budget;
                }
                Some(report) => {
                    states += report.states;
                    if report.depth >= n {
                        let check = shortest_kernel_element(&spec);
                        assert_eq!(check.depth, report.depth, "depth must be reproducible");
                        return Ok(DeepQuotientOutcome::Found {
                            report,
                            tried,
                            states,
                            seed,
                        });
                    }
                }
            }
        }
    }
    Ok(DeepQuotientOutcome::Exhausted { tried, states, seed })
}

fn factorial(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

/// All permutations of `degree` points in lexicographic order of images.
fn all_permutations(degree: usize) -> Vec<Permutation> {
    let mut v: Vec<u16> = (0..degree as u16).collect();
    let mut out = vec![Permutation(v.clone())];
    loop {
        let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
            return out;
        };
        let j = (i + 1..v.len())
            .rev()
            .find(|&j| v[j] > v[i])
            .expect("a larger element exists");
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(Permutation(v.clone()));
    }
}

fn tuples(all: Vec<Permutation>, rank: usize) -> impl Iterator<Item = Vec<Permutation>> {
    let total = all.len().pow(rank as u32);
    (0..total).map(move |mut idx| {
        let mut t = vec![Permutation(Vec::new()); rank];
        for slot in t.iter_mut().rev() {
            *slot = all[idx % all.len()].clone();
            idx /= all.len();
        }
        t
    })
}

/// How `H₁ = H ∩ ker` and `K₁` were obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorollarySummary {
    pub mode: TheoremMode,
    #[serde(rename = "H")]
    pub h: Word,
    #[serde(rename = "K")]
    pub k: Word,
    /// Order of the image of `h`.
    pub s: u64,
    /// Order of the image of `k`, absent when `K` enters whole.
    pub t: Option<u64>,
    #[serde(rename = "H1")]
    pub h1: Word,
    #[serde(rename = "K1")]
    pub k1: Word,
}

/// Builds the ping-pong instance for cyclic `H = ⟨h⟩`, `K = ⟨k⟩` in a free
/// group from finite quotients: `H₁ = ⟨h^s⟩` with `s` the order of the image
/// of `h` under `quotient_h`, and likewise `K₁ = ⟨k^t⟩`. Without
/// `quotient_k` the instance is in theorem-2 mode with `K` whole.
pub fn corollary_instance(
    ball: &Arc<CayleyBall>,
    h: &Word,
    k: &Word,
    quotient_h: &FiniteQuotientSpec,
    quotient_k: Option<&FiniteQuotientSpec>,
) -> Result<(PingPongInstance, CorollarySummary)> {
    let oracle = ball.oracle();
    if oracle.kind() != OracleKind::FreeGroup {
        return Err(Error::UnsupportedPresentation(
            "finite-quotient instances need a free ambient group".into(),
        ));
    }
    let rank = oracle.rank();
    for q in std::iter::once(quotient_h).chain(quotient_k) {
        if q.rank() != rank {
            return Err(Error::InvalidArgument(format!(
                "quotient has {} images, the ambient group has rank {rank}",
                q.rank()
            )));
        }
    }
    let spec = |name: &str, w: &Word| SubgroupSpec::new(oracle.clone(), name, vec![w.clone()]);
    let (hs, ks) = (spec("H", h)?, spec("K", k)?);
    let probe = PingPongInstance::new(
        TheoremMode::Theorem1,
        ball.clone(),
        hs.clone(),
        ks.clone(),
        hs.clone(),
        Some(ks.clone()),
    )?;
    if !probe.g0_trivial()? {
        return Err(Error::InvalidInstance("H ∩ K is not trivial on the window".into()));
    }
    let s = quotient_h.image(h)?.order();
    let h1 = h.pow(s as i64);
    let h1s = spec("H1", &h1)?;
    let (inst, t, k1) = match quotient_k {
        Some(q) => {
            let t = q.image(k)?.order();
            let k1 = k.pow(t as i64);
            let k1s = spec("K1", &k1)?;
            let inst = PingPongInstance::new(TheoremMode::Theorem1, ball.clone(), hs, ks, h1s, Some(k1s))?;
            (inst, Some(t), k1)
        }
        None => (
            PingPongInstance::new(TheoremMode::Theorem2, ball.clone(), hs, ks, h1s, None)?,
            None,
            k.free_reduce(),
        ),
    };
    let summary = CorollarySummary {
        mode: inst.mode,
        h: h.free_reduce(),
        k: k.free_reduce(),
        s,
        t,
        h1,
        k1,
    };
    Ok((inst, summary))
}
