//! Numerical checks of the area inequalities with sound bracketing.
//!
//! All lengths used here are lengths of explicit cycles, so they bound the
//! true infima from above; an inequality of the form `Area ≥ c·L²` that
//! holds for the estimate therefore holds for the true value.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exec;
use crate::geometry::{build_double_cover, AreaBracket, BallContext, GeometryError, LengthEngine, LengthEstimate};
use crate::io::{complex_hash, metric_hash};
use crate::metric::MetricComplex;
use crate::z2::{cohomology_basis, cup_witness_pairs, is_cocycle, AlgebraError, CupWitness, Z2Vector};

/// Relative tolerance used when ball bounds have to clear `2r²`, and by
/// which the admissible radius range is shrunk.
pub const SLACK: f64 = 0.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("no maximal cup-length witness: no classes α, β with α∪β ≠ 0 in H²")]
    NoWitness,
    #[error("empty grid")]
    EmptyGrid,
    #[error("no non-trivial cocycle")]
    NoNontrivialCocycle,
    #[error("cochain is not a cocycle")]
    NotCocycle,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    HoldsWithSlack,
    Inconclusive,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self != Verdict::Inconclusive
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Holds => "holds",
            Verdict::HoldsWithSlack => "holds-with-slack",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// `Area ≥ ½·min(length α, length β)²` for cup-length witnesses.
    MainInequality,
    /// `Area B(x, r) ≥ 2r²` for `r` below half the witness length.
    BallGrowth,
    /// Ball growth and the area bound via the double cover of a cocycle.
    CoverBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub alpha_index: usize,
    pub beta_index: usize,
    pub alpha: Vec<usize>,
    pub beta: Vec<usize>,
    pub length_alpha: f64,
    pub length_beta: f64,
    /// `min(length α, length β)`.
    pub l_hat: f64,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRecord {
    pub level: u32,
    /// Smallest `l_hat` over witness pairs.
    pub l_hat: f64,
    /// `Area − ½·l_hat²`, minimised over witness pairs.
    pub margin: f64,
    pub systole: f64,
    pub systole_margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallRecord {
    pub radius: f64,
    pub lower: f64,
    pub upper: f64,
    pub required: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub target: Target,
    pub complex_hash: String,
    pub metric_hash: String,
    pub level: u32,
    pub area: f64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub levels: Vec<LevelRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systole: Option<LengthEstimate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub systole_margin: Option<f64>,
    /// Radius bound `R` and the range actually checked.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius_checked: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub balls: Vec<BallRecord>,
    /// `min_r (lower − (1 − SLACK)·2r²)` at the chosen center.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_slack: Option<f64>,
    /// Quantities of the cover check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cover: Option<CoverRecord>,
    /// Left side minus right side of the checked inequality; absent when
    /// nothing could be checked.
    pub margin: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRecord {
    pub cocycle: Vec<usize>,
    pub cover_connected: bool,
    /// `2R̂`, from witness lengths upstairs.
    pub two_r_hat: Option<f64>,
    /// Z₂-systole downstairs.
    pub systole: f64,
    /// `Area − ½·min(2R̂, ŝ)²`.
    pub area_margin: Option<f64>,
    pub ball_verdict: Option<Verdict>,
}

impl VerificationReport {
    fn new(target: Target, mc: &MetricComplex, level: u32) -> Self {
        Self {
            target,
            complex_hash: complex_hash(mc.complex()),
            metric_hash: metric_hash(mc.metric()),
            level,
            area: mc.total_area(),
            witnesses: Vec::new(),
            levels: Vec::new(),
            systole: None,
            systole_margin: None,
            radius: None,
            radius_checked: None,
            center: None,
            balls: Vec::new(),
            lower_slack: None,
            cover: None,
            margin: None,
            stable: None,
            verdict: Verdict::Inconclusive,
            notes: Vec::new(),
        }
    }

    pub fn render_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "target:   {:?}", self.target);
        let _ = writeln!(s, "verdict:  {}", self.verdict.as_str());
        match self.margin {
            Some(m) => writeln!(s, "margin:   {m:.9}"),
            None => writeln!(s, "margin:   n/a"),
        }
        .ok();
        let _ = writeln!(s, "area:     {:.9}", self.area);
        let _ = writeln!(s, "level:    {}", self.level);
        for l in &self.levels {
            let _ = writeln!(
                s,
                "  level {}: L = {:.9}  margin = {:.9}  systole = {:.9}  systole margin = {:.9}",
                l.level, l.l_hat, l.margin, l.systole, l.systole_margin
            );
        }
        for w in &self.witnesses {
            let _ = writeln!(
                s,
                "  witness ({}, {}): length α = {:.9}, length β = {:.9}, margin = {:.9}",
                w.alpha_index, w.beta_index, w.length_alpha, w.length_beta, w.margin
            );
        }
        if let (Some(r), Some(c)) = (self.radius, self.center) {
            let _ = writeln!(s, "radius:   R = {r:.9}, checked below {:.9}, center {c}", self.radius_checked.unwrap_or(r));
        }
        for b in &self.balls {
            let _ = writeln!(s, "  r = {:.6}: area in [{:.9}, {:.9}], need {:.9}", b.radius, b.lower, b.upper, b.required);
        }
        if let Some(c) = &self.cover {
            let opt = |x: Option<f64>| x.map_or("n/a".to_string(), |v| format!("{v:.9}"));
            let _ = writeln!(
                s,
                "cover:    connected = {}, 2R = {}, systole = {:.9}, area margin = {}",
                c.cover_connected,
                opt(c.two_r_hat),
                c.systole,
                opt(c.area_margin)
            );
        }
        for n in &self.notes {
            let _ = writeln!(s, "note: {n}");
        }
        let _ = writeln!(s, "complex:  {}", self.complex_hash);
        let _ = writeln!(s, "metric:   {}", self.metric_hash);
        s
    }
}

fn witnesses_or_error(mc: &MetricComplex) -> Result<Vec<CupWitness>, VerifyError> {
    let w = cup_witness_pairs(mc.complex())?;
    if w.is_empty() {
        return Err(VerifyError::NoWitness);
    }
    Ok(w)
}

/// Lengths of the basis classes used by the witnesses, keyed by index.
fn witness_lengths(
    engine: &LengthEngine<'_>,
    witnesses: &[CupWitness],
) -> Result<BTreeMap<usize, LengthEstimate>, VerifyError> {
    let mut classes: BTreeMap<usize, &Z2Vector> = BTreeMap::new();
    for w in witnesses {
        classes.insert(w.alpha_index, &w.alpha);
        classes.insert(w.beta_index, &w.beta);
    }
    let list: Vec<(usize, &Z2Vector)> = classes.into_iter().collect();
    let lens = exec::map_slice(&list, |(_, a)| engine.length_of_class(a));
    list.iter().zip(lens).map(|((i, _), l)| Ok((*i, l?))).collect()
}

fn witness_records(
    area: f64,
    witnesses: &[CupWitness],
    lengths: &BTreeMap<usize, LengthEstimate>,
) -> Vec<WitnessRecord> {
    witnesses
        .iter()
        .map(|w| {
            let (la, lb) = (lengths[&w.alpha_index].value, lengths[&w.beta_index].value);
            let l_hat = la.min(lb);
            WitnessRecord {
                alpha_index: w.alpha_index,
                beta_index: w.beta_index,
                alpha: w.alpha.support(),
                beta: w.beta.support(),
                length_alpha: la,
                length_beta: lb,
                l_hat,
                margin: area - 0.5 * l_hat * l_hat,
            }
        })
        .collect()
}

/// Checks `Area ≥ ½·L̂²` for every witness pair at levels `0..=level`.
pub fn verify_main_inequality(mc: &MetricComplex, level: u32) -> Result<VerificationReport, VerifyError> {
    let witnesses = witnesses_or_error(mc)?;
    let basis = cohomology_basis(mc.complex(), 1)?;
    let area = mc.total_area();
    let mut report = VerificationReport::new(Target::MainInequality, mc, level);
    for l in 0..=level {
        let engine = LengthEngine::new(mc, l);
        let lengths = witness_lengths(&engine, &witnesses)?;
        let records = witness_records(area, &witnesses, &lengths);
        let worst = records.iter().min_by(|a, b| a.margin.total_cmp(&b.margin)).expect("non-empty");
        let systole = engine.systole(&basis)?;
        report.levels.push(LevelRecord {
            level: l,
            l_hat: worst.l_hat,
            margin: worst.margin,
            systole: systole.value,
            systole_margin: area - 0.5 * systole.value * systole.value,
        });
        if l == level {
            report.witnesses = records;
            report.systole_margin = Some(area - 0.5 * systole.value * systole.value);
            report.systole = Some(systole);
        }
    }
    // Lengths only shrink with the level, so the last level is the best.
    let last = report.levels.last().expect("level 0 always present");
    let best = report.levels.iter().map(|l| l.margin).fold(f64::NEG_INFINITY, f64::max);
    report.margin = Some(best);
    if report.levels.len() >= 2 {
        let prev = &report.levels[report.levels.len() - 2];
        report.stable = Some(crate::geometry::is_stable(prev.l_hat, last.l_hat));
    }
    report.verdict = if best >= 0.0 { Verdict::Holds } else { Verdict::Inconclusive };
    report.notes.push("lengths are Z₂-homological and bound the true infima from above".into());
    if report.verdict == Verdict::Inconclusive {
        report.notes.push("margin negative at every level; a finer level may still certify the inequality".into());
    }
    Ok(report)
}

/// The largest radius bound `R = ½·max over witness pairs of L̂`.
fn witness_radius(records: &[WitnessRecord]) -> f64 {
    0.5 * records.iter().map(|w| w.l_hat).fold(0.0, f64::max)
}

struct BallOutcome {
    center: usize,
    balls: Vec<BallRecord>,
    upper_slack: f64,
    lower_slack: f64,
    verdict: Verdict,
}

/// Searches all vertices for one whose balls grow like `2r²`.
fn ball_growth(mc: &MetricComplex, radii: &[f64], level: u32) -> Result<BallOutcome, VerifyError> {
    let ctx = BallContext::new(mc, level);
    let per_center = exec::map_range(mc.complex().vertex_count(), |x| -> Result<_, GeometryError> {
        let prof = ctx.profile(x)?;
        radii.iter().map(|&r| prof.bracket(r).map(|b| (r, b))).collect::<Result<Vec<(f64, AreaBracket)>, _>>()
    });
    let mut best: Option<BallOutcome> = None;
    for (x, res) in per_center.into_iter().enumerate() {
        let brackets = res?;
        let balls: Vec<BallRecord> = brackets
            .iter()
            .map(|&(r, b)| BallRecord { radius: r, lower: b.lower, upper: b.upper, required: 2.0 * r * r })
            .collect();
        let upper_slack = balls.iter().map(|b| b.upper - b.required).fold(f64::INFINITY, f64::min);
        let lower_slack = balls.iter().map(|b| b.lower - (1.0 - SLACK) * b.required).fold(f64::INFINITY, f64::min);
        let verdict = if lower_slack >= 0.0 {
            Verdict::HoldsWithSlack
        } else if upper_slack >= 0.0 {
            Verdict::Holds
        } else {
            Verdict::Inconclusive
        };
        let better = best.as_ref().is_none_or(|b| (lower_slack, upper_slack) > (b.lower_slack, b.upper_slack));
        if better {
            best = Some(BallOutcome { center: x, balls, upper_slack, lower_slack, verdict });
        }
    }
    best.ok_or(VerifyError::EmptyGrid)
}

/// Ball growth about some vertex for the radii in `(0, (1 − SLACK)·R)`.
pub fn verify_ball_growth(mc: &MetricComplex, radii: &[f64], level: u32) -> Result<VerificationReport, VerifyError> {
    if radii.is_empty() {
        return Err(VerifyError::EmptyGrid);
    }
    if let Some(&r) = radii.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(GeometryError::BadRadius(r).into());
    }
    let witnesses = witnesses_or_error(mc)?;
    let engine = LengthEngine::new(mc, level);
    let records = witness_records(mc.total_area(), &witnesses, &witness_lengths(&engine, &witnesses)?);
    let big_r = witness_radius(&records);
    let limit = (1.0 - SLACK) * big_r;
    let mut report = VerificationReport::new(Target::BallGrowth, mc, level);
    report.witnesses = records;
    report.radius = Some(big_r);
    report.radius_checked = Some(limit);
    let used: Vec<f64> = radii.iter().copied().filter(|&r| r > 0.0 && r < limit).collect();
    let skipped = radii.len() - used.len();
    if skipped > 0 {
        report.notes.push(format!("{skipped} radii outside (0, {limit:.6}) were skipped"));
    }
    if used.is_empty() {
        report.notes.push("no radius in the admissible range".into());
        return Ok(report);
    }
    let out = ball_growth(mc, &used, level)?;
    report.center = Some(out.center);
    report.balls = out.balls;
    report.margin = Some(out.upper_slack);
    report.lower_slack = Some(out.lower_slack);
    report.verdict = out.verdict;
    report.notes.push("upper bounds count every refined triangle with a corner inside the ball".into());
    Ok(report)
}

/// `R = ½·max L̂` over witness pairs at `level`.
pub fn radius_bound(mc: &MetricComplex, level: u32) -> Result<f64, VerifyError> {
    let witnesses = witnesses_or_error(mc)?;
    let engine = LengthEngine::new(mc, level);
    Ok(witness_radius(&witness_records(mc.total_area(), &witnesses, &witness_lengths(&engine, &witnesses)?)))
}

/// Evenly spaced radii `k/(n+1)·limit`.
pub fn default_radii(limit: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|k| limit * k as f64 / (n + 1) as f64).collect()
}

/// Area and ball bounds derived from the double cover of `alpha`.
pub fn verify_cover_bound(mc: &MetricComplex, alpha: &Z2Vector, level: u32) -> Result<VerificationReport, VerifyError> {
    let c = mc.complex();
    alpha.check_on(c)?;
    if !is_cocycle(c, alpha)? {
        return Err(VerifyError::NotCocycle);
    }
    let basis = cohomology_basis(c, 1)?;
    if basis.rank() == 0 {
        return Err(VerifyError::NoNontrivialCocycle);
    }
    let cover = build_double_cover(mc, alpha)?;
    let up = cover.cover();
    let systole = LengthEngine::new(mc, level).systole(&basis)?;
    let area = mc.total_area();
    let mut report = VerificationReport::new(Target::CoverBound, mc, level);
    let mut record = CoverRecord {
        cocycle: alpha.support(),
        cover_connected: up.complex().is_connected(),
        two_r_hat: None,
        systole: systole.value,
        area_margin: None,
        ball_verdict: None,
    };
    report.systole = Some(systole.clone());
    let witnesses = cup_witness_pairs(up.complex())?;
    if witnesses.is_empty() {
        report.notes.push("cover not surface-like at cochain level".into());
        report.cover = Some(record);
        return Ok(report);
    }
    let engine = LengthEngine::new(up, level);
    let records = witness_records(up.total_area(), &witnesses, &witness_lengths(&engine, &witnesses)?);
    let two_r_hat = 2.0 * witness_radius(&records);
    let reach = two_r_hat.min(systole.value);
    let area_margin = area - 0.5 * reach * reach;
    record.two_r_hat = Some(two_r_hat);
    record.area_margin = Some(area_margin);

    let limit = (1.0 - SLACK) * (0.5 * two_r_hat).min(0.5 * systole.value);
    report.radius = Some((0.5 * two_r_hat).min(0.5 * systole.value));
    report.radius_checked = Some(limit);
    let radii = default_radii(limit, 4);
    let out = ball_growth(mc, &radii, level)?;
    record.ball_verdict = Some(out.verdict);
    report.center = Some(out.center);
    report.balls = out.balls;
    report.lower_slack = Some(out.lower_slack);
    report.margin = Some(area_margin.min(out.upper_slack));
    report.verdict = if area_margin >= 0.0 { out.verdict } else { Verdict::Inconclusive };
    if !record.cover_connected {
        report.notes.push("trivial cocycle: the cover is two copies and the check reduces to the base complex".into());
    }
    report.notes.push("radii limited to half the base systole so balls lift injectively".into());
    report.witnesses = records;
    report.cover = Some(record);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{circle, rp2_minimal, torus_grid};

    #[test]
    fn unit_torus_main() {
        let mc = torus_grid(4, 4, 1.0, 1.0).unwrap();
        let r = verify_main_inequality(&mc, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Holds);
        assert!((r.margin.unwrap() - 0.5).abs() < 1e-9);
        assert_eq!(r.stable, Some(true));
    }

    #[test]
    fn rp2_level_zero_is_inconclusive() {
        let mc = rp2_minimal().unwrap();
        let r = verify_main_inequality(&mc, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert!((r.margin.unwrap() - (mc.total_area() - 4.5)).abs() < 1e-12);
    }

    #[test]
    fn graph_has_no_witness() {
        let mc = circle(4, 1.0).unwrap();
        let err = verify_main_inequality(&mc, 0).unwrap_err();
        assert!(err.to_string().contains("no maximal cup-length witness"));
    }

    #[test]
    fn empty_grid() {
        let mc = torus_grid(3, 3, 1.0, 1.0).unwrap();
        assert_eq!(verify_ball_growth(&mc, &[], 0).unwrap_err().to_string(), "empty grid");
    }

    #[test]
    fn cover_of_torus() {
        let mc = torus_grid(4, 4, 1.0, 1.0).unwrap();
        let a = &cohomology_basis(mc.complex(), 1).unwrap().representatives[0];
        let r = verify_cover_bound(&mc, a, 2).unwrap();
        assert!(r.verdict.passed(), "{}", r.render_text());
        let zero = verify_cover_bound(&mc, &Z2Vector::zero(mc.complex(), 1), 1).unwrap();
        assert!(!zero.cover.as_ref().unwrap().cover_connected);
        assert!(zero.verdict.passed());
    }

    #[test]
    fn simply_connected_cover_errors() {
        let mc = crate::generators::sphere(1.0).unwrap();
        let err = verify_cover_bound(&mc, &Z2Vector::zero(mc.complex(), 1), 0).unwrap_err();
        assert_eq!(err.to_string(), "no non-trivial cocycle");
    }
}
