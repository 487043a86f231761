//! Metric computations on piecewise-flat complexes.

mod ball;
mod cover;
mod length;
mod paths;
mod steiner;
mod subdivide;

use thiserror::Error;

use crate::metric::MetricError;
use crate::z2::AlgebraError;

pub use ball::{ball_area, disk_sector_in_triangle, AreaBracket, BallContext, BallProfile};
pub use cover::{build_double_cover, DoubleCover};
pub use length::{is_stable, length_of_class, z2_systole, EstimateKind, LengthEngine, LengthEstimate, STABILITY_TOLERANCE};
pub use paths::shortest_distances;
pub use steiner::{OddCycle, SteinerGraph};
pub use subdivide::{Carrier, RootPoint, SubdividedComplex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error("class is trivial, length undefined (infimum over empty set)")]
    TrivialClass,
    #[error("no non-trivial Z₂ classes")]
    NoClasses,
    #[error("vertex {vertex} out of range for {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("radius must be finite and non-negative, got {0}")]
    BadRadius(f64),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}
