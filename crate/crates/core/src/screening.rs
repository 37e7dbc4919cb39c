//! Graphical screening: rank main effects, flag the active few, and lay out the
//! data behind main-effects panels and the two-conditioner structured plot.

use std::fmt::Write as _;

use serde::Serialize;

use crate::design::{validate_design, DesignDiagnostics, Level};
use crate::effects::{interaction_effect, main_effect, EffectEstimate, ExperimentData};
use crate::error::{DoeError, Result};
use crate::exec::Strategy;

/// Default fraction of the largest |effect| a factor must reach to be flagged.
pub const DEFAULT_RELATIVE_THRESHOLD: f64 = 1.0 / 3.0;
/// A 12-run screening design projects onto any 4 or fewer factors cleanly.
pub const MAX_FORWARDED: usize = 4;

/// Main effects for every factor, sorted by |mean_difference| descending.
/// Ties keep declaration order.
pub fn rank_effects(data: &ExperimentData) -> Result<Vec<EffectEstimate>> {
    rank_effects_with(data, Strategy::default())
}

pub fn rank_effects_with(data: &ExperimentData, strategy: Strategy) -> Result<Vec<EffectEstimate>> {
    let factors = data.design().factors();
    if let Some(f) = factors.iter().find(|f| !f.is_two_level()) {
        return Err(DoeError::validation(format!(
            "ranking needs two-level factors; {} has {} levels",
            f.name(),
            f.levels().len()
        )));
    }
    let mut effects = strategy.try_map_range(factors.len(), |j| main_effect(data, factors[j].name()))?;
    effects.sort_by(|a, b| b.mean_difference.abs().total_cmp(&a.mean_difference.abs()));
    Ok(effects)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ActiveSet {
    pub active: Vec<String>,
    pub threshold_used: f64,
    pub warnings: Vec<String>,
}

impl ActiveSet {
    /// The leading active factors passed on to detailed analysis (at most [`MAX_FORWARDED`]).
    pub fn forwarded(&self) -> &[String] {
        &self.active[..self.active.len().min(MAX_FORWARDED)]
    }
}

/// Flags every effect with |mean_difference| ≥ `relative_threshold` × the largest |mean_difference|.
pub fn flag_active(ranked: &[EffectEstimate], relative_threshold: f64) -> Result<ActiveSet> {
    if !(relative_threshold > 0.0 && relative_threshold < 1.0) {
        return Err(DoeError::validation(format!(
            "relative threshold must lie in (0, 1), got {relative_threshold}"
        )));
    }
    if ranked.is_empty() {
        return Err(DoeError::validation("no effects to screen"));
    }
    let max = ranked
        .iter()
        .map(|e| e.mean_difference.abs())
        .fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(ActiveSet {
            active: Vec::new(),
            threshold_used: 0.0,
            warnings: vec!["all effects are exactly zero".to_owned()],
        });
    }
    let threshold_used = relative_threshold * max;
    let active: Vec<String> = ranked
        .iter()
        .filter(|e| e.mean_difference.abs() >= threshold_used)
        .map(|e| e.target.to_string())
        .collect();
    let mut warnings = Vec::new();
    if active.len() > MAX_FORWARDED {
        warnings.push(format!(
            "{} factors pass the threshold; only the top {MAX_FORWARDED} are forwarded and the \
             projection property no longer covers the full active set",
            active.len()
        ));
    }
    Ok(ActiveSet {
        active,
        threshold_used,
        warnings,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScreeningReport {
    pub effects: Vec<EffectEstimate>,
    pub active: Vec<String>,
    pub threshold_used: f64,
    pub warnings: Vec<String>,
    /// Pairwise product-column contrasts among the forwarded factors.
    pub interactions: Vec<EffectEstimate>,
    pub diagnostics: DesignDiagnostics,
}

pub fn screen(data: &ExperimentData, relative_threshold: f64) -> Result<ScreeningReport> {
    let effects = rank_effects(data)?;
    let selection = flag_active(&effects, relative_threshold)?;
    let diagnostics = validate_design(data.design());
    let mut warnings = selection.warnings.clone();
    if !diagnostics.is_orthogonal() {
        warnings.push("design columns are not mutually orthogonal; main effects are confounded".into());
    }
    if !diagnostics.is_balanced() {
        warnings.push("design columns are not balanced".into());
    }

    let forwarded = selection.forwarded();
    let mut interactions = Vec::new();
    for (i, a) in forwarded.iter().enumerate() {
        for b in &forwarded[i + 1..] {
            interactions.push(interaction_effect(data, a, b)?);
        }
    }

    Ok(ScreeningReport {
        effects,
        active: selection.active,
        threshold_used: selection.threshold_used,
        warnings,
        interactions,
        diagnostics,
    })
}

impl ScreeningReport {
    /// Fixed-width text table of the ranked effects followed by the selection.
    pub fn summary_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<10} {:>10} {:>10} {:>10} {:>10} {:>6}  active",
            "effect", "mean_diff", "half", "mean_low", "mean_high", "n"
        );
        for e in self.effects.iter().chain(&self.interactions) {
            let name = e.target.to_string();
            let flag = if self.active.contains(&name) { "*" } else { "" };
            let _ = writeln!(
                out,
                "{:<10} {:>10.3} {:>10.3} {:>10.3} {:>10.3} {:>6}  {}",
                name,
                e.mean_difference,
                e.half_effect,
                e.mean_low,
                e.mean_high,
                format!("{}/{}", e.n_low, e.n_high),
                flag
            );
        }
        let _ = writeln!(out, "threshold: {:.3}", self.threshold_used);
        let _ = writeln!(out, "active: {}", self.active.join(", "));
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelPoint {
    pub run_id: u32,
    pub level: Level,
    pub response: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelMean {
    pub level: Level,
    pub mean: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FactorPanel {
    pub factor: String,
    /// Every run, in run order.
    pub points: Vec<PanelPoint>,
    /// One entry per level present in the data, ascending.
    pub level_means: Vec<LevelMean>,
}

impl FactorPanel {
    pub fn mean_at(&self, level: Level) -> Option<f64> {
        self.level_means.iter().find(|m| m.level == level).map(|m| m.mean)
    }

    pub fn values_at(&self, level: Level) -> Vec<f64> {
        self.points
            .iter()
            .filter(|p| p.level == level)
            .map(|p| p.response)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelData {
    pub response_name: String,
    pub panels: Vec<FactorPanel>,
}

impl PanelData {
    pub fn panel(&self, factor: &str) -> Option<&FactorPanel> {
        self.panels.iter().find(|p| p.factor == factor)
    }
}

/// One panel per factor in declaration order.
pub fn main_effects_panels(data: &ExperimentData) -> PanelData {
    let design = data.design();
    let panels = design
        .factors()
        .iter()
        .enumerate()
        .map(|(j, factor)| {
            let points: Vec<PanelPoint> = design
                .runs()
                .iter()
                .zip(data.response())
                .map(|(run, &response)| PanelPoint {
                    run_id: run.run_id,
                    level: run.settings[j],
                    response,
                })
                .collect();
            let level_means = factor
                .levels()
                .iter()
                .filter_map(|&level| {
                    let ys: Vec<f64> = points
                        .iter()
                        .filter(|p| p.level == level)
                        .map(|p| p.response)
                        .collect();
                    (!ys.is_empty()).then(|| LevelMean {
                        level,
                        mean: ys.iter().sum::<f64>() / ys.len() as f64,
                        n: ys.len(),
                    })
                })
                .collect();
            FactorPanel {
                factor: factor.name().to_owned(),
                points,
                level_means,
            }
        })
        .collect();
    PanelData {
        response_name: data.response_name().to_owned(),
        panels,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutCell {
    /// Levels of the first and second conditioner.
    pub levels: [Level; 2],
    /// Points against the focal factor, ordered by focal level then run ID.
    pub points: Vec<PanelPoint>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructuredLayout {
    pub focal: String,
    pub conditioners: [String; 2],
    pub response_name: String,
    /// Ordered (L,L), (H,L), (L,H), (H,H): the first conditioner alternates
    /// within each pair, the second selects the pair.
    pub cells: Vec<LayoutCell>,
}

impl StructuredLayout {
    pub fn cell(&self, first: Level, second: Level) -> Option<&LayoutCell> {
        self.cells.iter().find(|c| c.levels == [first, second])
    }
}

pub fn structured_plot_layout<S: AsRef<str>>(
    data: &ExperimentData,
    focal: &str,
    conditioners: &[S],
) -> Result<StructuredLayout> {
    if conditioners.len() != 2 {
        return Err(DoeError::validation(format!(
            "structured plot needs exactly 2 conditioning factors, got {}",
            conditioners.len()
        )));
    }
    let (first, second) = (conditioners[0].as_ref(), conditioners[1].as_ref());
    if focal == first || focal == second || first == second {
        return Err(DoeError::validation(
            "focal and conditioning factors must be distinct",
        ));
    }
    let design = data.design();
    let mut idx = [0usize; 3];
    for (slot, name) in idx.iter_mut().zip([focal, first, second]) {
        *slot = design.factor_index(name)?;
        if !design.factors()[*slot].is_two_level() {
            return Err(DoeError::validation(format!(
                "structured plot factor {name} must be two-level"
            )));
        }
    }
    let [f, a, b] = idx;
    let order = [
        [Level::LOW, Level::LOW],
        [Level::HIGH, Level::LOW],
        [Level::LOW, Level::HIGH],
        [Level::HIGH, Level::HIGH],
    ];
    let cells = order
        .iter()
        .map(|&levels| {
            let mut points: Vec<PanelPoint> = design
                .runs()
                .iter()
                .zip(data.response())
                .filter(|(run, _)| run.settings[a] == levels[0] && run.settings[b] == levels[1])
                .map(|(run, &response)| PanelPoint {
                    run_id: run.run_id,
                    level: run.settings[f],
                    response,
                })
                .collect();
            points.sort_by_key(|p| (p.level, p.run_id));
            LayoutCell { levels, points }
        })
        .collect();
    Ok(StructuredLayout {
        focal: focal.to_owned(),
        conditioners: [first.to_owned(), second.to_owned()],
        response_name: data.response_name().to_owned(),
        cells,
    })
}
