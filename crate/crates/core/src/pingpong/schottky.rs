use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::certify::{certify, Certificate, CertifyOptions, Verdict};
use super::instance::{PingPongInstance, TheoremMode};
use crate::cayley::CayleyBall;
use crate::error::Result;
use crate::subgroup::SubgroupSpec;
use crate::words::Word;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "outcome")]
pub enum SchottkyOutcome {
    Found {
        m: usize,
        n: usize,
        certificate: Box<Certificate>,
    },
    Exhausted {
        maxpow: usize,
        /// `(m, n)` pairs that reached certification.
        tried: Vec<(usize, usize)>,
    },
}

/// Smallest `(m, n)`, by `m + n` and then `m`, for which
/// `⟨hᵐ, kⁿ⟩ = ⟨hᵐ⟩ * ⟨kⁿ⟩` is certified by Theorem 1 with `H = ⟨h⟩`,
/// `K = ⟨k⟩`. Pairs where `⟨h⟩ ∩ ⟨k⟩` is nontrivial are skipped.
pub fn schottky_power_search(
    ball: &Arc<CayleyBall>,
    h: &Word,
    k: &Word,
    maxpow: usize,
    opts: &CertifyOptions,
) -> Result<SchottkyOutcome> {
    let oracle = ball.oracle();
    let hs = SubgroupSpec::new(oracle.clone(), "H", vec![h.clone()])?;
    let ks = SubgroupSpec::new(oracle.clone(), "K", vec![k.clone()])?;
    let mut tried = Vec::new();
    for total in 2..=2 * maxpow {
        for m in 1..total {
            let n = total - m;
            if m > maxpow || n > maxpow {
                continue;
            }
            let h1 = SubgroupSpec::new(oracle.clone(), "H1", vec![h.pow(m as i64)])?;
            let k1 = SubgroupSpec::new(oracle.clone(), "K1", vec![k.pow(n as i64)])?;
            let Ok(inst) = PingPongInstance::new(
                TheoremMode::Theorem1,
                ball.clone(),
                hs.clone(),
                ks.clone(),
                h1,
                Some(k1),
            ) else {
                continue;
            };
            if !inst.g0_trivial()? {
                continue;
            }
            tried.push((m, n));
            let cert = certify(&inst, opts);
            if cert.verdict == Verdict::Certified {
                return Ok(SchottkyOutcome::Found {
                    m,
                    n,
                    certificate: Box::new(cert),
                });
            }
        }
    }
    Ok(SchottkyOutcome::Exhausted { maxpow, tried })
}
