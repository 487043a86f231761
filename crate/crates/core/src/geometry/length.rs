//! Lengths of cohomology classes and the Z₂-systole.

use serde::{Deserialize, Serialize};

use crate::metric::MetricComplex;
use crate::z2::{is_coboundary, is_cocycle, minimize_support, CohomologyBasis, Z2Vector};

use super::steiner::SteinerGraph;
use super::subdivide::RootPoint;
use super::GeometryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateKind {
    /// Exact minimum over edge cycles of the input complex.
    EdgeExact,
    /// Length of an explicit rectifiable cycle, hence an upper bound.
    UpperBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub value: f64,
    pub kind: EstimateKind,
    pub level: u32,
    /// Basis index realising the minimum (systole only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class_index: Option<usize>,
    /// Closed walk realising `value`, as points of the root complex.
    pub witness: Vec<RootPoint>,
}

impl LengthEstimate {
    /// Edge indices of the witness at level 0.
    pub fn witness_edges(&self, mc: &MetricComplex) -> Option<Vec<usize>> {
        let c = mc.complex();
        self.witness
            .windows(2)
            .map(|w| match (w[0], w[1]) {
                (RootPoint::Vertex(a), RootPoint::Vertex(b)) => c.edge_index(a, b),
                _ => None,
            })
            .collect()
    }
}

/// Relative change below which two consecutive refinement levels count as
/// converged.
pub const STABILITY_TOLERANCE: f64 = 1e-3;

pub fn is_stable(previous: f64, current: f64) -> bool {
    (previous - current).abs() <= STABILITY_TOLERANCE * current.abs()
}

fn check_class(mc: &MetricComplex, alpha: &Z2Vector) -> Result<(), GeometryError> {
    if alpha.degree() != 1 {
        return Err(GeometryError::Algebra(crate::z2::AlgebraError::DegreeMismatch { expected: 1, got: alpha.degree() }));
    }
    alpha.check_on(mc.complex())?;
    if !is_cocycle(mc.complex(), alpha)? {
        return Err(GeometryError::NotCocycle);
    }
    if is_coboundary(mc.complex(), alpha)? {
        return Err(GeometryError::TrivialClass);
    }
    Ok(())
}

/// Path graph of one refinement level, reusable across classes.
#[derive(Debug, Clone)]
pub struct LengthEngine<'a> {
    mc: &'a MetricComplex,
    graph: SteinerGraph,
}

impl<'a> LengthEngine<'a> {
    pub fn new(mc: &'a MetricComplex, level: u32) -> Self {
        Self { mc, graph: SteinerGraph::new(mc, level) }
    }

    pub fn graph(&self) -> &SteinerGraph {
        &self.graph
    }

    fn kind(&self) -> EstimateKind {
        if self.graph.level() == 0 {
            EstimateKind::EdgeExact
        } else {
            EstimateKind::UpperBound
        }
    }

    /// Shortest cycle pairing oddly with `alpha`, if shorter than `bound`.
    fn bounded(&self, alpha: &Z2Vector, bound: f64) -> Result<Option<LengthEstimate>, GeometryError> {
        check_class(self.mc, alpha)?;
        let rep = minimize_support(self.mc.complex(), alpha)?;
        let parity = self.graph.parities(self.mc.complex(), &rep);
        Ok(self.graph.shortest_odd_cycle(&parity, bound).map(|cyc| LengthEstimate {
            value: cyc.length,
            kind: self.kind(),
            level: self.graph.level(),
            class_index: None,
            witness: cyc.nodes.iter().map(|&n| self.graph.location(n)).collect(),
        }))
    }

    pub fn length_of_class(&self, alpha: &Z2Vector) -> Result<LengthEstimate, GeometryError> {
        self.bounded(alpha, f64::INFINITY)?.ok_or(GeometryError::TrivialClass)
    }

    /// Minimum over the basis classes. Each later class only searches for
    /// cycles shorter than the best so far.
    pub fn systole(&self, basis: &CohomologyBasis) -> Result<LengthEstimate, GeometryError> {
        let mut best: Option<LengthEstimate> = None;
        for (i, alpha) in basis.representatives.iter().enumerate() {
            let bound = best.as_ref().map_or(f64::INFINITY, |b| b.value);
            if let Some(mut est) = self.bounded(alpha, bound)? {
                if est.value < bound {
                    est.class_index = Some(i);
                    best = Some(est);
                }
            }
        }
        best.ok_or(GeometryError::NoClasses)
    }
}

/// `length(α)` estimated on the level-`level` path graph.
pub fn length_of_class(mc: &MetricComplex, alpha: &Z2Vector, level: u32) -> Result<LengthEstimate, GeometryError> {
    check_class(mc, alpha)?;
    LengthEngine::new(mc, level).length_of_class(alpha)
}

/// Z₂-systole: the shortest cycle that is non-trivial in `H_1(X; Z₂)`.
pub fn z2_systole(mc: &MetricComplex, basis: &CohomologyBasis, level: u32) -> Result<LengthEstimate, GeometryError> {
    if basis.representatives.is_empty() {
        return Err(GeometryError::NoClasses);
    }
    LengthEngine::new(mc, level).systole(basis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{rp2_minimal, torus_grid};
    use crate::z2::cohomology_basis;

    #[test]
    fn unit_torus_axis_classes() {
        let mc = torus_grid(4, 4, 1.0, 1.0).unwrap();
        let basis = cohomology_basis(mc.complex(), 1).unwrap();
        for level in 0..=2 {
            let s = z2_systole(&mc, &basis, level).unwrap();
            assert!((s.value - 1.0).abs() < 1e-9, "level {level}: {}", s.value);
        }
        let s0 = z2_systole(&mc, &basis, 0).unwrap();
        assert_eq!(s0.kind, EstimateKind::EdgeExact);
        assert_eq!(s0.witness_edges(&mc).unwrap().len(), 4);
    }

    #[test]
    fn rp2_level_zero_is_three() {
        let mc = rp2_minimal().unwrap();
        let basis = cohomology_basis(mc.complex(), 1).unwrap();
        let est = length_of_class(&mc, &basis.representatives[0], 0).unwrap();
        assert_eq!(est.value, 3.0);
        let fine = length_of_class(&mc, &basis.representatives[0], 1).unwrap();
        assert!(fine.value < 3.0);
    }

    #[test]
    fn trivial_classes_are_rejected() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let zero = Z2Vector::zero(mc.complex(), 1);
        assert!(matches!(length_of_class(&mc, &zero, 0), Err(GeometryError::TrivialClass)));
        let not_cocycle = Z2Vector::from_support(mc.complex(), 1, [0]).unwrap();
        assert!(matches!(length_of_class(&mc, &not_cocycle, 0), Err(GeometryError::NotCocycle)));
        let msg = GeometryError::TrivialClass.to_string();
        assert!(msg.contains("class is trivial"));
    }

    #[test]
    fn stability() {
        assert!(is_stable(1.0005, 1.0));
        assert!(!is_stable(1.01, 1.0));
    }
}
