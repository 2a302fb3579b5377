use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::stallings::StallingsGraph;
use crate::cayley::{CayleyBall, VertexId};
use crate::error::{Error, Result};
use crate::presentation::{OracleKind, WordOracle};
use crate::words::{Letter, Word};

/// A named, finitely generated subgroup of the ambient group.
#[derive(Clone, Debug)]
pub struct SubgroupSpec {
    oracle: Arc<WordOracle>,
    name: String,
    generators: Vec<Word>,
}

impl SubgroupSpec {
    /// Generators are freely reduced; a generator trivial in `G` is rejected.
    pub fn new(oracle: Arc<WordOracle>, name: impl Into<String>, generators: Vec<Word>) -> Result<Self> {
        let name = name.into();
        let mut gens = Vec::with_capacity(generators.len());
        for g in generators {
            if g.max_generator().is_some_and(|i| i >= oracle.rank()) {
                return Err(Error::InvalidArgument(format!(
                    "generator {} of {name} uses a letter outside the alphabet",
                    oracle.format(&g)
                )));
            }
            if oracle.is_trivial(&g) {
                return Err(Error::InvalidArgument(format!(
                    "generator {} of {name} is trivial",
                    oracle.format(&g)
                )));
            }
            gens.push(g.free_reduce());
        }
        Ok(Self {
            oracle,
            name,
            generators: gens,
        })
    }

    /// The trivial subgroup (no generators).
    pub fn trivial(oracle: Arc<WordOracle>, name: impl Into<String>) -> Self {
        Self {
            oracle,
            name: name.into(),
            generators: Vec::new(),
        }
    }

    pub fn oracle(&self) -> &Arc<WordOracle> {
        &self.oracle
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    pub fn generator_strings(&self) -> Vec<String> {
        self.generators.iter().map(|g| self.oracle.format(g)).collect()
    }

    /// Contains each generator of the ambient group, or its inverse.
    fn contains_all_letters(&self) -> bool {
        (0..self.oracle.rank()).all(|i| {
            self.generators
                .iter()
                .any(|g| g.len() == 1 && g.letters()[0].index() == i)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "answer")]
pub enum Membership {
    Yes,
    No,
    Unknown { radius: usize },
}

impl Membership {
    pub fn is_yes(self) -> bool {
        self == Membership::Yes
    }

    fn and(self, other: Membership) -> Membership {
        match (self, other) {
            (Membership::No, _) | (_, Membership::No) => Membership::No,
            (Membership::Yes, Membership::Yes) => Membership::Yes,
            (Membership::Unknown { radius }, _) | (_, Membership::Unknown { radius }) => Membership::Unknown { radius },
        }
    }
}

#[derive(Clone, Debug)]
enum Mode {
    Trivial,
    Whole,
    Folded(StallingsGraph),
    /// `⟨h⟩` with nonzero abelian image: `w ∈ H` iff `φ(w) = n·φ(h)` and
    /// `w·h⁻ⁿ = 1`.
    Cyclic {
        h: Word,
        image: Vec<i64>,
    },
    /// Elements of `H` reachable inside a ball by products of generators.
    Window {
        members: HashSet<VertexId>,
        ball: Arc<CayleyBall>,
        valid: usize,
    },
    Both(Box<MembershipOracle>, Box<MembershipOracle>),
}

/// Decides `w ∈ H`: exactly for free ambient groups and cyclic subgroups
/// with infinite abelian image, otherwise within a declared radius.
#[derive(Clone, Debug)]
pub struct MembershipOracle {
    oracle: Arc<WordOracle>,
    mode: Mode,
    generators: Vec<Word>,
}

impl MembershipOracle {
    /// Builds the best available oracle. `ball` is used only when no exact
    /// method applies.
    pub fn build(spec: &SubgroupSpec, ball: &Arc<CayleyBall>) -> Self {
        let oracle = spec.oracle.clone();
        let gens = spec.generators.clone();
        let mode = if gens.is_empty() {
            Mode::Trivial
        } else if oracle.kind() == OracleKind::FreeGroup {
            let g = StallingsGraph::from_generators(oracle.rank(), &gens);
            if g.is_whole_group() {
                Mode::Whole
            } else {
                Mode::Folded(g)
            }
        } else if spec.contains_all_letters() {
            Mode::Whole
        } else if let Some(m) = cyclic_mode(&oracle, &gens) {
            m
        } else {
            window_mode(&gens, ball)
        };
        Self {
            oracle,
            mode,
            generators: gens,
        }
    }

    /// `self ∩ other`, exact whenever both sides are exact and the
    /// intersection has a closed form (pullback of folded graphs, or two
    /// cyclic subgroups with independent images).
    pub fn intersect(&self, other: &MembershipOracle) -> MembershipOracle {
        let oracle = self.oracle.clone();
        let mode = match (&self.mode, &other.mode) {
            (Mode::Trivial, _) | (_, Mode::Trivial) => Mode::Trivial,
            (Mode::Whole, m) | (m, Mode::Whole) => m.clone(),
            (Mode::Folded(a), Mode::Folded(b)) => {
                let g = a.intersect(b);
                if g.is_trivial() {
                    Mode::Trivial
                } else {
                    Mode::Folded(g)
                }
            }
            (Mode::Cyclic { image: x, .. }, Mode::Cyclic { image: y, .. }) if independent(x, y) => Mode::Trivial,
            _ => Mode::Both(Box::new(self.clone()), Box::new(other.clone())),
        };
        let generators = match (&self.mode, &other.mode) {
            (Mode::Whole, _) => other.generators.clone(),
            (_, Mode::Whole) => self.generators.clone(),
            _ => Vec::new(),
        };
        MembershipOracle {
            oracle,
            mode,
            generators,
        }
    }

    pub fn oracle(&self) -> &Arc<WordOracle> {
        &self.oracle
    }

    pub fn is_member(&self, w: &Word) -> Membership {
        let yes_no = |b: bool| if b { Membership::Yes } else { Membership::No };
        match &self.mode {
            Mode::Trivial => yes_no(self.oracle.is_trivial(w)),
            Mode::Whole => Membership::Yes,
            Mode::Folded(g) => yes_no(g.accepts(w)),
            Mode::Cyclic { h, image } => {
                let img = self.oracle.abelian_image(w);
                match exponent(&img, image) {
                    Some(n) => yes_no(self.oracle.is_trivial(&w.concat(&h.pow(-n)))),
                    None => Membership::No,
                }
            }
            Mode::Window { members, ball, valid } => match ball.locate(w) {
                Some(v) if ball.layer(v) <= *valid => yes_no(members.contains(&v)),
                _ => Membership::Unknown { radius: *valid },
            },
            Mode::Both(a, b) => a.is_member(w).and(b.is_member(w)),
        }
    }

    /// Whether every answer is exact regardless of word length.
    pub fn is_exact(&self) -> bool {
        match &self.mode {
            Mode::Window { .. } => false,
            Mode::Both(a, b) => a.is_exact() && b.is_exact(),
            _ => true,
        }
    }

    pub fn describe(&self) -> &'static str {
        match &self.mode {
            Mode::Trivial => "trivial",
            Mode::Whole => "whole-group",
            Mode::Folded(_) => "folded-graph",
            Mode::Cyclic { .. } => "cyclic-abelian-image",
            Mode::Window { .. } => "window",
            Mode::Both(..) => "intersection",
        }
    }

    /// Trivial by construction (no generators, or an exact empty intersection).
    pub fn known_trivial(&self) -> bool {
        matches!(self.mode, Mode::Trivial)
    }

    pub fn is_whole_group(&self) -> bool {
        matches!(self.mode, Mode::Whole)
    }

    pub fn stallings(&self) -> Option<&StallingsGraph> {
        match &self.mode {
            Mode::Folded(g) => Some(g),
            _ => None,
        }
    }

    pub fn cyclic_generator(&self) -> Option<&Word> {
        match &self.mode {
            Mode::Cyclic { h, .. } => Some(h),
            _ => None,
        }
    }

    /// Generators recorded at construction (empty for derived intersections).
    pub fn generators(&self) -> &[Word] {
        &self.generators
    }

    /// Ball vertices lying in the subgroup, in shortlex order.
    pub fn window_elements(&self, ball: &CayleyBall) -> Result<Vec<VertexId>> {
        self.elements_within(ball, ball.radius())
    }

    /// Ball vertices of length at most `r` lying in the subgroup.
    pub fn elements_within(&self, ball: &CayleyBall, r: usize) -> Result<Vec<VertexId>> {
        match &self.mode {
            Mode::Trivial => return Ok(vec![0]),
            Mode::Whole => return Ok(ball.within(r).collect()),
            _ => {}
        }
        let mut out = Vec::new();
        for v in ball.within(r) {
            match self.is_member(ball.word(v)) {
                Membership::Yes => out.push(v),
                Membership::No => {}
                Membership::Unknown { .. } => {
                    return Err(Error::MembershipUnknown {
                        required_radius: ball.layer(v),
                    })
                }
            }
        }
        Ok(out)
    }

    /// Whether the subgroup is trivial, decided exactly when the mode
    /// allows it and otherwise on the window.
    pub fn is_trivial_on(&self, ball: &CayleyBall) -> Result<bool> {
        match &self.mode {
            Mode::Trivial => Ok(true),
            Mode::Whole | Mode::Cyclic { .. } => Ok(false),
            Mode::Folded(g) => Ok(g.is_trivial()),
            _ => Ok(self.window_elements(ball)?.len() == 1),
        }
    }
}

fn independent(x: &[i64], y: &[i64]) -> bool {
    (0..x.len()).any(|i| (i + 1..x.len()).any(|j| x[i] * y[j] != x[j] * y[i]))
}

/// The `n` with `img = n · base`, if it exists.
fn exponent(img: &[i64], base: &[i64]) -> Option<i64> {
    let i = base.iter().position(|&b| b != 0)?;
    if img[i] % base[i] != 0 {
        return None;
    }
    let n = img[i] / base[i];
    img.iter().zip(base).all(|(&x, &b)| x == n * b).then_some(n)
}

fn cyclic_mode(oracle: &WordOracle, gens: &[Word]) -> Option<Mode> {
    let [h] = gens else { return None };
    let image = oracle.abelian_image(h);
    image
        .iter()
        .any(|&x| x != 0)
        .then(|| Mode::Cyclic { h: h.clone(), image })
}

/// Closure of `{1}` under right multiplication by generators and their
/// inverses, staying inside the ball. Declared valid up to `R - max |gen|`.
fn window_mode(gens: &[Word], ball: &Arc<CayleyBall>) -> Mode {
    let mut steps: Vec<Vec<Letter>> = Vec::new();
    for g in gens {
        steps.push(g.letters().to_vec());
        steps.push(g.invert().into_letters());
    }
    let mut members = HashSet::from([0usize]);
    let mut queue = vec![0usize];
    while let Some(v) = queue.pop() {
        for s in &steps {
            if let Some(p) = ball.walk_from(v, s) {
                let t = *p.last().unwrap();
                if members.insert(t) {
                    queue.push(t);
                }
            }
        }
    }
    let longest = gens.iter().map(Word::len).max().unwrap_or(0);
    Mode::Window {
        members,
        ball: ball.clone(),
        valid: ball.radius().saturating_sub(longest),
    }
}
