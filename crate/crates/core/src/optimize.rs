//! Derivative-free search for metrics with small systolic ratio
//! `Area / sys²` on a fixed triangulation.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::complex::Complex2;
use crate::exec;
use crate::geometry::{GeometryError, LengthEngine};
use crate::metric::{MetricComplex, PLMetric};
use crate::realization::{classify_surface, SurfaceComplex, SurfaceKind};
use crate::z2::{cohomology_basis, cup_length_witness, AlgebraError, CohomologyBasis};

/// Certified ratios below `floor - FLOOR_TOLERANCE` are treated as
/// estimator failures.
pub const FLOOR_TOLERANCE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptimizeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("infeasible initial metric: triangle {triangle} has slack {slack} below {required}")]
    Infeasible { triangle: usize, slack: f64, required: f64 },
    #[error("certified ratio {certified} is below the {name} floor {floor}; the length estimator is unsound here")]
    FloorViolation { certified: f64, floor: f64, name: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Annealing {
    pub initial_temperature: f64,
    pub final_temperature: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerConfig {
    pub budget: usize,
    /// Log-scale perturbation width, interpolated geometrically from
    /// `initial_scale` to `final_scale`.
    pub initial_scale: f64,
    pub final_scale: f64,
    /// Largest number of edges perturbed in one step.
    pub max_edges_per_step: usize,
    pub seed: u64,
    pub level: u32,
    /// Every triangle keeps `min(b + c - a, ...) ≥ slack · perimeter`.
    pub slack: f64,
    /// `None` gives a greedy, monotone search.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub annealing: Option<Annealing>,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            budget: 10_000,
            initial_scale: 0.05,
            final_scale: 0.002,
            max_edges_per_step: 3,
            seed: 0,
            level: 2,
            slack: 1e-3,
            annealing: Some(Annealing { initial_temperature: 3e-3, final_temperature: 1e-5 }),
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: &str| Err(OptimizeError::InvalidConfig(m.to_string()));
        if !(self.slack > 0.0 && self.slack < 1.0) {
            return bad("slack must lie in (0, 1)");
        }
        if !(self.initial_scale > 0.0 && self.final_scale > 0.0) {
            return bad("perturbation scales must be positive");
        }
        if self.final_scale > self.initial_scale {
            return bad("perturbation scales must be non-increasing");
        }
        if self.max_edges_per_step == 0 {
            return bad("max_edges_per_step must be positive");
        }
        if let Some(a) = self.annealing {
            if !(a.initial_temperature > 0.0 && a.final_temperature > 0.0 && a.final_temperature <= a.initial_temperature) {
                return bad("temperatures must be positive and non-increasing");
            }
        }
        Ok(())
    }

    fn scale_at(&self, t: usize) -> f64 {
        let f = if self.budget <= 1 { 0.0 } else { t as f64 / (self.budget - 1) as f64 };
        self.initial_scale * (self.final_scale / self.initial_scale).powf(f)
    }

    fn temperature_at(&self, t: usize) -> Option<f64> {
        self.annealing.map(|a| {
            let f = if self.budget <= 1 { 0.0 } else { t as f64 / (self.budget - 1) as f64 };
            a.initial_temperature * (a.final_temperature / a.initial_temperature).powf(f)
        })
    }
}

/// Known lower bound for the systolic ratio of a topology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Floor {
    pub name: String,
    pub value: f64,
}

/// The floor enforced for a complex: `√3/2` for tori, `2/π` for the
/// projective plane, `½` for any complex with a cup-length witness.
pub fn floor_for(complex: &Complex2) -> Result<(Option<Floor>, Vec<String>), OptimizeError> {
    let mut notes = Vec::new();
    if complex.is_connected() {
        if let Ok(comps) = classify_surface(&SurfaceComplex::from_complex2(complex)) {
            match comps.as_slice() {
                [c] if c.kind == (SurfaceKind::Orientable { genus: 1 }) => {
                    return Ok((Some(Floor { name: "torus".into(), value: 3f64.sqrt() / 2.0 }), notes));
                }
                [c] if c.kind == (SurfaceKind::NonOrientable { crosscaps: 1 }) => {
                    return Ok((Some(Floor { name: "projective plane".into(), value: 2.0 / PI }), notes));
                }
                [c] if c.euler_characteristic < 0 || c.kind == (SurfaceKind::NonOrientable { crosscaps: 2 }) => {
                    notes.push(format!(
                        "{}: aspherical surface, the ratio for the true systole is at least 3/4; the Z₂ ratio is only checked against 1/2",
                        c.kind.name()
                    ));
                }
                _ => {}
            }
        }
    }
    if cup_length_witness(complex)?.is_some() {
        return Ok((Some(Floor { name: "maximal cup-length".into(), value: 0.5 }), notes));
    }
    Ok((None, notes))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub iteration: usize,
    pub ratio: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationTrace {
    /// Step 0 is the initial metric.
    pub steps: Vec<TraceStep>,
    pub initial_ratio: f64,
    pub best_ratio: f64,
    /// Best metric, normalised to systole 1 at the evaluation level.
    #[serde(with = "lengths_as_strings")]
    pub best_metric: Vec<f64>,
    pub level: u32,
    pub certified_level: u32,
    pub certified_ratio: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub floor: Option<Floor>,
    pub notes: Vec<String>,
}

mod lengths_as_strings {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(|&x| crate::io::format_length(x)))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        Vec::<String>::deserialize(d)?
            .into_iter()
            .map(|s| s.parse().map_err(serde::de::Error::custom))
            .collect()
    }
}

/// `Area / sys_Z₂²` with the systole estimated at `level`.
pub fn systolic_ratio(mc: &MetricComplex, level: u32) -> Result<f64, OptimizeError> {
    let basis = cohomology_basis(mc.complex(), 1)?;
    if basis.rank() == 0 {
        return Err(GeometryError::NoClasses.into());
    }
    ratio_with(mc, &basis, level).map(|(r, _)| r)
}

fn ratio_with(mc: &MetricComplex, basis: &CohomologyBasis, level: u32) -> Result<(f64, f64), OptimizeError> {
    let sys = LengthEngine::new(mc, level).systole(basis)?.value;
    Ok((mc.total_area() / (sys * sys), sys))
}

/// Smallest triangle slack relative to the perimeter, and its triangle.
fn worst_slack(mc: &MetricComplex) -> Option<(usize, f64)> {
    (0..mc.complex().triangle_count())
        .map(|t| {
            let [a, b, c] = mc.triangle_lengths(t);
            let p = a + b + c;
            (t, (b + c - a).min(a + c - b).min(a + b - c) / p)
        })
        .min_by(|x, y| x.1.total_cmp(&y.1))
}

fn feasible(complex: &Complex2, lengths: &[f64], slack: f64) -> Option<MetricComplex> {
    let mc = MetricComplex::new(complex.clone(), PLMetric::new(lengths.to_vec())).ok()?;
    match worst_slack(&mc) {
        Some((_, s)) if s < slack => None,
        _ => Some(mc),
    }
}

pub fn optimize_metric(
    complex: &Complex2,
    initial: &PLMetric,
    config: &OptimizerConfig,
) -> Result<OptimizationTrace, OptimizeError> {
    config.validate()?;
    let basis = cohomology_basis(complex, 1)?;
    if basis.rank() == 0 {
        return Err(GeometryError::NoClasses.into());
    }
    let start = MetricComplex::new(complex.clone(), initial.clone())
        .map_err(|_| OptimizeError::InvalidConfig("initial metric is not a valid metric on the complex".into()))?;
    if let Some((t, s)) = worst_slack(&start) {
        if s < config.slack {
            return Err(OptimizeError::Infeasible { triangle: t, slack: s, required: config.slack });
        }
    }
    let (floor, mut notes) = floor_for(complex)?;

    let (ratio0, sys0) = ratio_with(&start, &basis, config.level)?;
    let mut current: Vec<f64> = start.metric().lengths().iter().map(|l| l / sys0).collect();
    let mut current_ratio = ratio0;
    let mut best = current.clone();
    let mut best_ratio = ratio0;
    let mut steps = vec![TraceStep { iteration: 0, ratio: ratio0, accepted: true }];

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let ne = current.len();
    for it in 0..config.budget {
        let scale = config.scale_at(it);
        let mut cand = current.clone();
        let k = rng.random_range(1..=config.max_edges_per_step.min(ne));
        for _ in 0..k {
            let e = rng.random_range(0..ne);
            let u: f64 = rng.random_range(-1.0..1.0);
            cand[e] *= (scale * u).exp();
        }
        let coin: f64 = rng.random();
        let Some(mc) = feasible(complex, &cand, config.slack) else {
            steps.push(TraceStep { iteration: it + 1, ratio: f64::NAN, accepted: false });
            continue;
        };
        let (ratio, sys) = ratio_with(&mc, &basis, config.level)?;
        let accept = match config.temperature_at(it) {
            _ if ratio <= current_ratio => true,
            Some(temp) => coin < (-(ratio - current_ratio) / temp).exp(),
            None => false,
        };
        steps.push(TraceStep { iteration: it + 1, ratio, accepted: accept });
        if accept {
            current = cand.iter().map(|l| l / sys).collect();
            current_ratio = ratio;
            if ratio < best_ratio {
                best_ratio = ratio;
                best = current.clone();
            }
        }
    }

    let certified_level = config.level + 2;
    let best_mc = MetricComplex::new(complex.clone(), PLMetric::new(best.clone()))
        .expect("accepted metrics are valid");
    let (certified_ratio, _) = ratio_with(&best_mc, &basis, certified_level)?;
    if let Some(f) = &floor {
        if certified_ratio < f.value - FLOOR_TOLERANCE {
            return Err(OptimizeError::FloorViolation { certified: certified_ratio, floor: f.value, name: f.name.clone() });
        }
        notes.push(format!("{} floor {:.6}", f.name, f.value));
    }
    Ok(OptimizationTrace {
        steps,
        initial_ratio: ratio0,
        best_ratio,
        best_metric: best,
        level: config.level,
        certified_level,
        certified_ratio,
        floor,
        notes,
    })
}

/// Independent runs, one per seed, executed in parallel.
pub fn optimize_restarts(
    complex: &Complex2,
    initial: &PLMetric,
    config: &OptimizerConfig,
    seeds: &[u64],
) -> Vec<Result<OptimizationTrace, OptimizeError>> {
    exec::map_slice(seeds, |&seed| {
        let cfg = OptimizerConfig { seed, ..config.clone() };
        optimize_metric(complex, initial, &cfg)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle, hex_torus, rp2_minimal, torus_grid};

    #[test]
    fn ratios_of_flat_tori() {
        let sq = torus_grid(4, 4, 1.0, 1.0).unwrap();
        assert!((systolic_ratio(&sq, 1).unwrap() - 1.0).abs() < 1e-12);
        assert!((systolic_ratio(&sq.scaled(7.0).unwrap(), 1).unwrap() - 1.0).abs() < 1e-12);
        let hex = hex_torus(4, 4, 1.0).unwrap();
        assert!((systolic_ratio(&hex, 2).unwrap() - 3f64.sqrt() / 2.0).abs() < 1e-9);
        assert!(systolic_ratio(&crate::generators::sphere(1.0).unwrap(), 0).is_err());
    }

    #[test]
    fn zero_budget() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let cfg = OptimizerConfig { budget: 0, ..Default::default() };
        let tr = optimize_metric(mc.complex(), mc.metric(), &cfg).unwrap();
        assert_eq!(tr.steps.len(), 1);
        assert_eq!(tr.best_ratio, tr.initial_ratio);
    }

    #[test]
    fn short_run_is_monotone_and_deterministic() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let cfg = OptimizerConfig { budget: 60, level: 1, seed: 3, annealing: None, ..Default::default() };
        let a = optimize_metric(mc.complex(), mc.metric(), &cfg).unwrap();
        let b = optimize_metric(mc.complex(), mc.metric(), &cfg).unwrap();
        assert_eq!(a, b);
        assert!(a.best_ratio <= a.initial_ratio);
        let accepted: Vec<f64> = a.steps.iter().filter(|s| s.accepted).map(|s| s.ratio).collect();
        assert!(accepted.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(a.floor.as_ref().unwrap().name, "torus");
    }

    #[test]
    fn floors() {
        let rp2 = rp2_minimal().unwrap();
        assert_eq!(floor_for(rp2.complex()).unwrap().0.unwrap().value, 2.0 / PI);
        assert!(floor_for(circle(3, 1.0).unwrap().complex()).unwrap().0.is_none());
    }

    #[test]
    fn config_checks() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        let bad = OptimizerConfig { final_scale: 1.0, ..Default::default() };
        assert!(matches!(optimize_metric(mc.complex(), mc.metric(), &bad), Err(OptimizeError::InvalidConfig(_))));
        let tight = OptimizerConfig { slack: 0.4, ..Default::default() };
        assert!(matches!(optimize_metric(mc.complex(), mc.metric(), &tight), Err(OptimizeError::Infeasible { .. })));
    }
}
