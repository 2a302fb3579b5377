use serde::{Deserialize, Serialize};

use crate::cayley::{CayleyBall, QuasiParams, VertexId};
use crate::error::{Error, Result};
use crate::rational::{ceil, int, Rational};
use crate::subgroup::MembershipOracle;
use crate::words::{Letter, Word};

/// Number of group elements `g` with `|g| < 2μ + δ`.
pub fn count_a(ball: &CayleyBall, mu: usize, delta: usize) -> Result<usize> {
    let bound = 2 * mu + delta;
    if ball.radius() < bound {
        return Err(Error::RadiusTooSmall {
            needed: bound,
            have: ball.radius(),
        });
    }
    Ok(match bound {
        0 => 0,
        b => ball.within(b - 1).len(),
    })
}

/// `max(L, ε/λ)`.
pub fn compute_c(l: Rational, lambda: Rational, epsilon: Rational) -> Result<Rational> {
    if lambda <= int(0) {
        return Err(Error::InvalidArgument(format!("lambda {lambda} must be positive")));
    }
    Ok(l.max(epsilon / lambda))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "strategy")]
pub enum LgeStrategy {
    /// Fit `(L, λ, ε)` on the window.
    Empirical,
    /// Constants taken from the literature, echoed verbatim.
    Supplied {
        #[serde(rename = "L", with = "crate::rational::as_str")]
        l: Rational,
        #[serde(with = "crate::rational::as_str")]
        lambda: Rational,
        #[serde(with = "crate::rational::as_str")]
        epsilon: Rational,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LgeResult {
    pub params: QuasiParams,
    pub provenance: String,
    /// Reduced paths enumerated (empirical strategy only).
    pub paths: usize,
}

impl LgeResult {
    pub fn horizon(&self) -> Rational {
        self.params.horizon.expect("local-to-global always sets L")
    }
}

/// Local-to-global constants for local `(λ₀, ε₀, L)`-quasigeodesics.
///
/// The empirical strategy enumerates every freely reduced path from 1 of
/// length at most `R`. Let `bad(p)` be the length of the shortest subpath
/// violating `(λ₀, ε₀)`. Taking `L` one past the largest finite `bad(p)`,
/// every enumerated local `(λ₀, ε₀, L)`-quasigeodesic is a global one; `λ`
/// is `λ₀` and `ε` is the least value making all of them global
/// `(λ, ε)`-quasigeodesics.
pub fn local_to_global(
    strategy: LgeStrategy,
    lambda0: Rational,
    epsilon0: Rational,
    ball: &CayleyBall,
) -> Result<LgeResult> {
    QuasiParams::global(lambda0, epsilon0)?;
    match strategy {
        LgeStrategy::Supplied { l, lambda, epsilon } => Ok(LgeResult {
            params: QuasiParams::new(lambda, epsilon, Some(l))?,
            provenance: "external-literature".into(),
            paths: 0,
        }),
        LgeStrategy::Empirical => empirical(lambda0, epsilon0, ball),
    }
}

struct Scan<'a> {
    ball: &'a CayleyBall,
    lambda0: Rational,
    epsilon0: Rational,
    max_bad: usize,
    /// Largest `λ₀ℓ − d` over paths without a violating subpath.
    worst: Rational,
    paths: usize,
}

impl Scan<'_> {
    fn visit(&mut self, verts: &mut Vec<VertexId>, last: Option<Letter>, bad: Option<usize>, worst: Rational) {
        self.paths += 1;
        match bad {
            Some(b) => self.max_bad = self.max_bad.max(b),
            None => self.worst = self.worst.max(worst),
        }
        let n = verts.len() - 1;
        if n == self.ball.radius() {
            return;
        }
        let end = *verts.last().unwrap();
        for l in Letter::all(self.ball.oracle().rank()) {
            if last == Some(l.inv()) {
                continue;
            }
            let next = self
                .ball
                .neighbor(end, l)
                .expect("reduced path of length <= R stays in the ball");
            verts.push(next);
            let (mut b, mut w) = (bad, worst);
            for i in (0..=n).rev() {
                let len = n + 1 - i;
                let d = self.ball.distance(verts[i], next).expect("subpath within radius");
                let excess = self.lambda0 * int(len as i64) - int(d as i64);
                if excess > self.epsilon0 {
                    b = Some(b.map_or(len, |x| x.min(len)));
                }
                w = w.max(excess);
            }
            self.visit(verts, Some(l), b, w);
            verts.pop();
        }
    }
}

fn empirical(lambda0: Rational, epsilon0: Rational, ball: &CayleyBall) -> Result<LgeResult> {
    let mut scan = Scan {
        ball,
        lambda0,
        epsilon0,
        max_bad: 0,
        worst: int(0),
        paths: 0,
    };
    scan.visit(&mut vec![0], None, None, int(0));
    let l = scan.max_bad + 1;
    if l > ball.radius() {
        return Err(Error::LocalToGlobal(format!(
            "a violating subpath of length {} is as long as the window allows (radius {})",
            scan.max_bad,
            ball.radius()
        )));
    }
    Ok(LgeResult {
        params: QuasiParams::new(lambda0, scan.worst, Some(int(l as i64)))?,
        provenance: format!("window-empirical, radius {}", ball.radius()),
        paths: scan.paths,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum ShortElements {
    Holds { checked: usize },
    Fails { witness: Word },
}

impl ShortElements {
    pub fn holds(&self) -> bool {
        matches!(self, ShortElements::Holds { .. })
    }
}

/// Every element of the subgroup with `|g| < C` lies in `G₀`.
pub fn short_element_condition(
    sub: &MembershipOracle,
    c: Rational,
    g0: &MembershipOracle,
    ball: &CayleyBall,
) -> Result<ShortElements> {
    let needed = ceil(c).max(0) as usize;
    if ball.radius() < needed {
        return Err(Error::RadiusTooSmall {
            needed,
            have: ball.radius(),
        });
    }
    if needed == 0 {
        return Ok(ShortElements::Holds { checked: 0 });
    }
    let elems = sub.elements_within(ball, needed - 1)?;
    for &v in &elems {
        let w = ball.word(v);
        if !g0.is_member(w).is_yes() {
            return Ok(ShortElements::Fails { witness: w.clone() });
        }
    }
    Ok(ShortElements::Holds { checked: elems.len() })
}
