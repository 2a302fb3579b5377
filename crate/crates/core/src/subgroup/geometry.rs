use serde::{Deserialize, Serialize};

use super::membership::{Membership, MembershipOracle};
use crate::cayley::{CayleyBall, VertexId};
use crate::error::{Error, Result};
use crate::presentation::OracleKind;
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MuEstimate {
    pub mu: usize,
    pub radius: usize,
    /// Subgroup element and geodesic vertex realizing the maximum.
    pub witness: Option<(Word, Word)>,
}

/// Quasiconvexity constant of the window.
///
/// Distance to `H` is invariant under left translation by `H`, so only
/// geodesics from 1 to window elements `h` are scanned. Every vertex of the
/// interval `I(1, h)` is measured against all window elements of `H`.
pub fn estimate_mu(h: &MembershipOracle, ball: &CayleyBall) -> Result<MuEstimate> {
    estimate_mu_at(h, ball, ball.radius())
}

/// As [`estimate_mu`], with endpoints restricted to length at most `r`.
/// The distance function is the same for every `r`, so the result is
/// monotone in `r`.
pub fn estimate_mu_at(h: &MembershipOracle, ball: &CayleyBall, r: usize) -> Result<MuEstimate> {
    let all = h.window_elements(ball)?;
    if all.len() < 2 {
        return Err(Error::TooFewSubgroupElements(format!(
            "window of radius {}",
            ball.radius()
        )));
    }
    let mut best = MuEstimate {
        mu: 0,
        radius: r,
        witness: None,
    };
    let mut cache = std::collections::HashMap::new();
    for &x in all.iter().filter(|&&x| x != 0 && ball.layer(x) <= r) {
        for w in ball.interval_from_identity(x) {
            let d = *cache.entry(w).or_insert_with(|| distance_to_set(ball, w, &all));
            if d > best.mu {
                best.mu = d;
                best.witness = Some((ball.word(x).clone(), ball.word(w).clone()));
            }
        }
    }
    Ok(best)
}

fn distance_to_set(ball: &CayleyBall, w: VertexId, set: &[VertexId]) -> usize {
    let mut best = ball.layer(w);
    for &s in set {
        if best == 0 {
            break;
        }
        if let Some(d) = ball.distance(w, s) {
            best = best.min(d);
        }
    }
    best
}

/// Which cosets of `G₀` a syllable is minimized over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CosetSide {
    /// `G₀·h`
    LeftOnly,
    /// `h·G₀`
    RightOnly,
    /// `G₀·h·G₀`
    Both,
}

/// Shortest representative of `G₀h`, `hG₀` or `G₀hG₀` over `G₀`-elements
/// of the window, as the canonical (shortlex-least geodesic) word.
pub fn shortest_double_coset_rep(h: &Word, g0: &MembershipOracle, ball: &CayleyBall, side: CosetSide) -> Result<Word> {
    let hv = ball.locate(h).ok_or(Error::RadiusTooSmall {
        needed: h.len(),
        have: ball.radius(),
    })?;
    if g0.is_member(h).is_yes() {
        return Ok(Word::empty());
    }
    let hw = ball.word(hv).clone();
    if g0.known_trivial() {
        return Ok(hw);
    }
    let elems = g0.window_elements(ball)?;
    let left: Vec<VertexId> = match side {
        CosetSide::RightOnly => vec![0],
        _ => elems.clone(),
    };
    let right: Vec<VertexId> = match side {
        CosetSide::LeftOnly => vec![0],
        _ => elems,
    };
    let mut best = hw.clone();
    for &a in &left {
        let ah = ball.word(a).concat(&hw);
        for &b in &right {
            if let Some(v) = ball.locate(&ah.concat(ball.word(b))) {
                if ball.word(v) < &best {
                    best = ball.word(v).clone();
                }
            }
        }
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum MalnormalVerdict {
    /// No violation among window elements. `exact` marks cases covered by
    /// a proof: a cyclic subgroup of a free group whose generator is not a
    /// proper power.
    NoViolation {
        radius: usize,
        exact: bool,
    },
    Violation {
        g: Word,
        witness: Word,
    },
}

impl MalnormalVerdict {
    pub fn is_clean(&self) -> bool {
        matches!(self, MalnormalVerdict::NoViolation { .. })
    }
}

/// Searches `g ∉ H` and nontrivial `h ∈ H` in the window, both in shortlex
/// order, with `g·h·g⁻¹ ∈ H`.
pub fn check_malnormal(h: &MembershipOracle, ball: &CayleyBall) -> Result<MalnormalVerdict> {
    if h.is_whole_group() {
        return Ok(MalnormalVerdict::NoViolation {
            radius: ball.radius(),
            exact: true,
        });
    }
    let elems: Vec<VertexId> = h.window_elements(ball)?.into_iter().filter(|&v| v != 0).collect();
    for g in 0..ball.len() {
        let gw = ball.word(g);
        match h.is_member(gw) {
            Membership::Yes => continue,
            Membership::No => {}
            Membership::Unknown { radius } => {
                return Err(Error::MembershipUnknown {
                    required_radius: radius,
                })
            }
        }
        let ginv = gw.invert();
        for &x in &elems {
            let conj = gw.concat(ball.word(x)).concat(&ginv);
            match h.is_member(&conj) {
                Membership::Yes => {
                    return Ok(MalnormalVerdict::Violation {
                        g: gw.clone(),
                        witness: ball.word(x).clone(),
                    })
                }
                Membership::No => {}
                Membership::Unknown { radius } => {
                    return Err(Error::MembershipUnknown {
                        required_radius: radius,
                    })
                }
            }
        }
    }
    let exact = h.oracle().kind() == OracleKind::FreeGroup
        && matches!(h.generators(), [w] if {
            let (core, _) = w.cyclically_reduce();
            core.primitive_period() == core.len()
        });
    Ok(MalnormalVerdict::NoViolation {
        radius: ball.radius(),
        exact,
    })
}
