//! Finite windows onto the Cayley graph: balls, geodesics, thin triangles
//! and quasigeodesic predicates.

mod ball;
mod geodesic;
mod quasi;

pub use ball::{
    BallExport, BallLimits, CayleyBall, ExportVertex, PathInBall, VertexId, VertexIdentification, BALL_SCHEMA,
};
pub use geodesic::{estimate_delta, DeltaEstimate, DeltaMode, GeodesicSet, GEODESIC_CAP};
pub use quasi::{check_local_quasigeodesic, QuasiParams, QuasiVerdict};
