use serde::{Deserialize, Serialize};

use super::ball::{CayleyBall, PathInBall};
use crate::error::{Error, Result};
use crate::rational::{int, Rational};
use crate::words::Word;

/// Parameters of a (local) quasigeodesic. `horizon = None` is the global case.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiParams {
    #[serde(with = "crate::rational::as_str")]
    pub lambda: Rational,
    #[serde(with = "crate::rational::as_str")]
    pub epsilon: Rational,
    #[serde(rename = "L", with = "crate::rational::opt_as_str")]
    pub horizon: Option<Rational>,
}

impl QuasiParams {
    pub fn new(lambda: Rational, epsilon: Rational, horizon: Option<Rational>) -> Result<Self> {
        if lambda <= int(0) || lambda > int(1) {
            return Err(Error::InvalidArgument(format!("lambda {lambda} outside (0, 1]")));
        }
        if epsilon < int(0) {
            return Err(Error::InvalidArgument(format!("epsilon {epsilon} is negative")));
        }
        if horizon.is_some_and(|l| l <= int(0)) {
            return Err(Error::InvalidArgument("L must be positive".into()));
        }
        Ok(Self {
            lambda,
            epsilon,
            horizon,
        })
    }

    pub fn global(lambda: Rational, epsilon: Rational) -> Result<Self> {
        Self::new(lambda, epsilon, None)
    }

    /// Whether subpaths of this length are constrained (`len < L`).
    pub fn covers(&self, len: usize) -> bool {
        self.horizon.is_none_or(|l| int(len as i64) < l)
    }

    /// `geodesic >= lambda * len - epsilon`.
    pub fn admits(&self, len: usize, geodesic: usize) -> bool {
        int(geodesic as i64) >= self.lambda * int(len as i64) - self.epsilon
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "verdict")]
pub enum QuasiVerdict {
    Pass,
    Fail {
        from: usize,
        to: usize,
        label: Word,
        geodesic_len: usize,
    },
}

/// Checks every constrained subpath of `path`, shortest first.
///
/// The comparison is `|γ| >= λ|p'| - ε`; with the strict form no geodesic
/// would be a (1, 0)-quasigeodesic.
pub fn check_local_quasigeodesic(ball: &CayleyBall, path: &PathInBall, q: &QuasiParams) -> Result<QuasiVerdict> {
    let n = path.len();
    for len in 1..=n {
        if !q.covers(len) {
            break;
        }
        for from in 0..=n - len {
            let to = from + len;
            let (a, b) = (path.vertices[from], path.vertices[to]);
            let geodesic_len = match ball.distance(a, b) {
                Some(d) => d,
                // d(a, b) > R: only decidable if R + 1 already suffices.
                None if q.admits(len, ball.radius() + 1) => continue,
                None => {
                    return Err(Error::RadiusTooSmall {
                        needed: len,
                        have: ball.radius(),
                    })
                }
            };
            if !q.admits(len, geodesic_len) {
                return Ok(QuasiVerdict::Fail {
                    from,
                    to,
                    label: path.letters.subword(from, to),
                    geodesic_len,
                });
            }
        }
    }
    Ok(QuasiVerdict::Pass)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::presentation::{Presentation, WordOracle};
    use crate::rational::rat;

    fn ball(p: Presentation, r: usize) -> CayleyBall {
        CayleyBall::build(Arc::new(WordOracle::new(p)), r).unwrap()
    }

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    #[test]
    fn geodesics_pass() {
        let b = ball(Presentation::free(2), 4);
        let p = b.path(0, &w("abAb")).unwrap();
        for q in [
            QuasiParams::global(int(1), int(0)).unwrap(),
            QuasiParams::global(rat(1, 3), int(2)).unwrap(),
            QuasiParams::new(rat(1, 2), int(0), Some(int(2))).unwrap(),
        ] {
            assert_eq!(check_local_quasigeodesic(&b, &p, &q).unwrap(), QuasiVerdict::Pass);
        }
    }

    #[test]
    fn backtracking_fails() {
        let b = ball(Presentation::free(2), 2);
        let p = b.path(0, &w("aA")).unwrap();
        let q = QuasiParams::global(int(1), rat(1, 2)).unwrap();
        assert_eq!(
            check_local_quasigeodesic(&b, &p, &q).unwrap(),
            QuasiVerdict::Fail {
                from: 0,
                to: 2,
                label: w("aA"),
                geodesic_len: 0
            }
        );
    }

    #[test]
    fn horizon_hides_long_subpaths() {
        let b = ball(Presentation::free(2), 2);
        let p = b.path(0, &w("aA")).unwrap();
        // Only subpaths shorter than 2 are checked.
        let q = QuasiParams::new(int(1), int(0), Some(int(2))).unwrap();
        assert_eq!(check_local_quasigeodesic(&b, &p, &q).unwrap(), QuasiVerdict::Pass);
    }

    #[test]
    fn staircase_in_the_abelian_control_is_geodesic() {
        let b = ball(Presentation::free_abelian(2), 6);
        let p = b.path(0, &w("ababab")).unwrap();
        let q = QuasiParams::global(int(1), int(0)).unwrap();
        assert_eq!(check_local_quasigeodesic(&b, &p, &q).unwrap(), QuasiVerdict::Pass);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(QuasiParams::global(int(0), int(0)).is_err());
        assert!(QuasiParams::global(rat(3, 2), int(0)).is_err());
        assert!(QuasiParams::global(int(1), int(-1)).is_err());
        assert!(QuasiParams::new(int(1), int(0), Some(int(0))).is_err());
    }
}
