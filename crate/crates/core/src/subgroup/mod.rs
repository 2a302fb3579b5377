//! Subgroups of the ambient group: membership, quasiconvexity, coset
//! representatives, the relative Cayley graph and malnormality.

mod geometry;
mod membership;
mod relative;
mod stallings;

pub use geometry::{
    check_malnormal, estimate_mu, estimate_mu_at, shortest_double_coset_rep, CosetSide, MalnormalVerdict, MuEstimate,
};
pub use membership::{Membership, MembershipOracle, SubgroupSpec};
pub use relative::{lemma6_constants, Lemma6Constants, RelativeBall};
pub use stallings::StallingsGraph;
