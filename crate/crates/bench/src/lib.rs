//! Fixtures shared by the benchmarks.

use std::sync::Arc;

use pingpong_core::cayley::CayleyBall;
use pingpong_core::pingpong::{PingPongInstance, TheoremMode};
use pingpong_core::subgroup::SubgroupSpec;
use pingpong_core::{Presentation, WordOracle};

pub fn free_ball(radius: usize) -> Arc<CayleyBall> {
    ball(Presentation::free(2), radius)
}

pub fn surface_ball(radius: usize) -> Arc<CayleyBall> {
    ball(Presentation::surface(2).expect("genus 2"), radius)
}

pub fn ball(p: Presentation, radius: usize) -> Arc<CayleyBall> {
    Arc::new(CayleyBall::build(Arc::new(WordOracle::new(p)), radius).expect("ball fits the default limits"))
}

pub fn subgroup(ball: &CayleyBall, name: &str, gens: &[&str]) -> SubgroupSpec {
    let o = ball.oracle();
    let words = gens
        .iter()
        .map(|g| o.presentation().parse_word(g).expect("word"))
        .collect();
    SubgroupSpec::new(o.clone(), name, words).expect("subgroup")
}

/// Theorem-1 instance with `H = H₁ = ⟨h⟩` and `K = K₁ = ⟨k⟩`.
pub fn cyclic_pair(ball: &Arc<CayleyBall>, h: &str, k: &str) -> PingPongInstance {
    PingPongInstance::new(
        TheoremMode::Theorem1,
        ball.clone(),
        subgroup(ball, "H", &[h]),
        subgroup(ball, "K", &[k]),
        subgroup(ball, "H1", &[h]),
        Some(subgroup(ball, "K1", &[k])),
    )
    .expect("valid instance")
}
