//! Z₂ cup products, class lengths, systoles and ball areas on
//! piecewise-flat simplicial 2-complexes.

pub mod complex;
pub mod exec;
pub mod generators;
pub mod io;
pub mod geometry;
pub mod metric;
pub mod optimize;
pub mod realization;
pub mod verify;
pub mod z2;

pub use complex::{validate, Complex2, ComplexError, ValidationSummary};
pub use metric::{triangle_area, MetricComplex, MetricError, PLMetric};
pub use z2::{AlgebraError, CohomologyBasis, HomologyBasis, Z2Matrix, Z2Vector};
