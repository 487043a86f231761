//! Piecewise-flat metrics given by edge lengths.

use thiserror::Error;

use crate::complex::Complex2;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("expected {expected} edge lengths, got {got}")]
    LengthCount { expected: usize, got: usize },
    #[error("edge {edge} has non-positive or non-finite length {length}")]
    BadLength { edge: usize, length: f64 },
    #[error("degenerate triangle with sides ({0}, {1}, {2})")]
    DegenerateTriangle(f64, f64, f64),
    #[error("triangle {triangle} {vertices:?} violates the strict triangle inequality")]
    TriangleInequality { triangle: usize, vertices: [usize; 3] },
}

/// Heron's formula in Kahan's numerically stable arrangement.
///
/// Requires strict triangle inequalities; a degenerate or impossible triple
/// is an error.
pub fn triangle_area(a: f64, b: f64, c: f64) -> Result<f64, MetricError> {
    let mut s = [a, b, c];
    if s.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
        return Err(MetricError::DegenerateTriangle(a, b, c));
    }
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    if a >= b + c {
        return Err(MetricError::DegenerateTriangle(a, b, c));
    }
    let p = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    if p <= 0.0 {
        return Err(MetricError::DegenerateTriangle(a, b, c));
    }
    Ok(0.25 * p.sqrt())
}

/// Positive lengths aligned with the edge list of a complex.
#[derive(Debug, Clone, PartialEq)]
pub struct PLMetric {
    lengths: Vec<f64>,
}

impl PLMetric {
    pub fn new(lengths: Vec<f64>) -> Self {
        Self { lengths }
    }

    /// Lengths from a function of the edge's endpoints.
    pub fn from_fn(complex: &Complex2, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        Self { lengths: complex.edges().iter().map(|&[u, v]| f(u, v)).collect() }
    }

    pub fn uniform(complex: &Complex2, length: f64) -> Self {
        Self { lengths: vec![length; complex.edge_count()] }
    }

    pub fn lengths(&self) -> &[f64] {
        &self.lengths
    }

    pub fn length(&self, e: usize) -> f64 {
        self.lengths[e]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self { lengths: self.lengths.iter().map(|l| l * factor).collect() }
    }

    pub fn into_lengths(self) -> Vec<f64> {
        self.lengths
    }
}

/// A complex together with a valid piecewise-flat metric and cached
/// triangle areas.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricComplex {
    complex: Complex2,
    metric: PLMetric,
    areas: Vec<f64>,
}

impl MetricComplex {
    pub fn new(complex: Complex2, metric: PLMetric) -> Result<Self, MetricError> {
        if metric.lengths.len() != complex.edge_count() {
            return Err(MetricError::LengthCount {
                expected: complex.edge_count(),
                got: metric.lengths.len(),
            });
        }
        if let Some((edge, &length)) =
            metric.lengths.iter().enumerate().find(|(_, l)| !(l.is_finite() && **l > 0.0))
        {
            return Err(MetricError::BadLength { edge, length });
        }
        let areas = (0..complex.triangle_count())
            .map(|t| {
                let [a, b, c] = triangle_lengths(&complex, &metric, t);
                triangle_area(a, b, c).map_err(|_| MetricError::TriangleInequality {
                    triangle: t,
                    vertices: complex.triangle(t),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { complex, metric, areas })
    }

    pub fn complex(&self) -> &Complex2 {
        &self.complex
    }

    pub fn metric(&self) -> &PLMetric {
        &self.metric
    }

    pub fn length(&self, e: usize) -> f64 {
        self.metric.lengths[e]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        self.areas[t]
    }

    pub fn triangle_areas(&self) -> &[f64] {
        &self.areas
    }

    /// Side lengths of triangle `t` as `[|v0v1|, |v1v2|, |v0v2|]`.
    pub fn triangle_lengths(&self, t: usize) -> [f64; 3] {
        triangle_lengths(&self.complex, &self.metric, t)
    }

    /// Sum of the Heron areas of all triangles.
    pub fn total_area(&self) -> f64 {
        self.areas.iter().sum()
    }

    pub fn max_edge_length(&self) -> f64 {
        self.metric.lengths.iter().copied().fold(0.0, f64::max)
    }

    /// Same complex with every length multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self, MetricError> {
        Self::new(self.complex.clone(), self.metric.scaled(factor))
    }

    pub fn with_metric(&self, metric: PLMetric) -> Result<Self, MetricError> {
        Self::new(self.complex.clone(), metric)
    }

    /// Planar coordinates of triangle `t`'s vertices with `v0` at the
    /// origin and `v1` on the positive x-axis.
    pub fn triangle_chart(&self, t: usize) -> [[f64; 2]; 3] {
        let [l01, l12, l02] = self.triangle_lengths(t);
        triangle_chart(l01, l12, l02)
    }

    pub fn into_parts(self) -> (Complex2, PLMetric) {
        (self.complex, self.metric)
    }
}

pub(crate) fn triangle_lengths(complex: &Complex2, metric: &PLMetric, t: usize) -> [f64; 3] {
    let [e01, e12, e02] = complex.triangle_edges(t);
    [metric.lengths[e01], metric.lengths[e12], metric.lengths[e02]]
}

pub(crate) fn triangle_chart(l01: f64, l12: f64, l02: f64) -> [[f64; 2]; 3] {
    let x = (l01 * l01 + l02 * l02 - l12 * l12) / (2.0 * l01);
    let y = (l02 * l02 - x * x).max(0.0).sqrt();
    [[0.0, 0.0], [l01, 0.0], [x, y]]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heron_examples() {
        assert!((triangle_area(1.0, 1.0, 1.0).unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(triangle_area(3.0, 4.0, 5.0).unwrap(), 6.0);
        assert!(matches!(triangle_area(1.0, 1.0, 2.0), Err(MetricError::DegenerateTriangle(..))));
        assert!(triangle_area(1.0, 1.0, 3.0).is_err());
        assert!(triangle_area(0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn chart_reproduces_side_lengths() {
        let [p, q, r] = triangle_chart(3.0, 5.0, 4.0);
        let d = |a: [f64; 2], b: [f64; 2]| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
        assert!((d(p, q) - 3.0).abs() < 1e-12);
        assert!((d(q, r) - 5.0).abs() < 1e-12);
        assert!((d(p, r) - 4.0).abs() < 1e-12);
    }

    #[test]
    fn empty_complex_has_zero_area() {
        let mc = MetricComplex::new(Complex2::empty(3), PLMetric::new(vec![])).unwrap();
        assert_eq!(mc.total_area(), 0.0);
    }

    #[test]
    fn rejects_bad_metrics() {
        let c = Complex2::from_triangles(3, vec![[0, 1, 2]], vec![]).unwrap();
        assert!(matches!(
            MetricComplex::new(c.clone(), PLMetric::new(vec![1.0])),
            Err(MetricError::LengthCount { .. })
        ));
        assert!(matches!(
            MetricComplex::new(c.clone(), PLMetric::new(vec![1.0, -1.0, 1.0])),
            Err(MetricError::BadLength { edge: 1, .. })
        ));
        assert!(matches!(
            MetricComplex::new(c, PLMetric::new(vec![1.0, 1.0, 2.0])),
            Err(MetricError::TriangleInequality { triangle: 0, .. })
        ));
    }
}
