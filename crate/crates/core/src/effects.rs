//! Effect estimation on two-level contrasts.
//!
//! Two arithmetic routes are provided. The contrast route splits runs by the
//! sign of a (possibly product) column and differences the group means. The
//! paired route looks for "miniature OFAT" edges, pairs of runs that differ in
//! exactly one factor, and works with their response differences.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::design::{DesignMatrix, Level};
use crate::error::{DoeError, Result};

/// A design joined with one response per run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentData {
    design: DesignMatrix,
    response: Vec<f64>,
    response_name: String,
}

impl ExperimentData {
    pub fn new(design: DesignMatrix, response: Vec<f64>, response_name: impl Into<String>) -> Result<Self> {
        if response.len() != design.n_runs() {
            return Err(DoeError::validation(format!(
                "{} responses for {} runs",
                response.len(),
                design.n_runs()
            )));
        }
        if let Some(i) = response.iter().position(|y| !y.is_finite()) {
            return Err(DoeError::validation(format!(
                "response for run {} is not finite",
                design.runs()[i].run_id
            )));
        }
        let response_name = response_name.into();
        if design.factor_index(&response_name).is_ok() {
            return Err(DoeError::validation(format!(
                "response name {response_name} collides with a factor"
            )));
        }
        Ok(Self {
            design,
            response,
            response_name,
        })
    }

    pub fn design(&self) -> &DesignMatrix {
        &self.design
    }

    pub fn response(&self) -> &[f64] {
        &self.response
    }

    pub fn response_name(&self) -> &str {
        &self.response_name
    }

    /// Same runs with responses mapped through `f`.
    pub fn map_response(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.design.clone(),
            self.response.iter().map(|&y| f(y)).collect(),
            self.response_name.clone(),
        )
    }
}

/// What an [`EffectEstimate`] measures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectTarget {
    Main(String),
    Interaction(String, String),
    Conditional {
        focal: String,
        conditioning: String,
        level: Level,
    },
}

impl EffectTarget {
    /// Name of the main-effect factor, if this is a main effect.
    pub fn factor(&self) -> Option<&str> {
        match self {
            EffectTarget::Main(f) => Some(f),
            _ => None,
        }
    }
}

impl fmt::Display for EffectTarget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EffectTarget::Main(name) => f.write_str(name),
            EffectTarget::Interaction(a, b) => write!(f, "{a}:{b}"),
            EffectTarget::Conditional {
                focal,
                conditioning,
                level,
            } => write!(f, "{focal}|{conditioning}={}", level.tag()),
        }
    }
}

impl Serialize for EffectTarget {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

/// Mean at +1 minus mean at −1, with the halved form alongside.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectEstimate {
    pub target: EffectTarget,
    pub mean_difference: f64,
    pub half_effect: f64,
    pub mean_low: f64,
    pub mean_high: f64,
    pub n_low: usize,
    pub n_high: usize,
}

impl EffectEstimate {
    fn from_groups(target: EffectTarget, signed: impl IntoIterator<Item = (i8, f64)>) -> Result<Self> {
        let (mut sum_low, mut sum_high, mut n_low, mut n_high) = (0.0, 0.0, 0usize, 0usize);
        for (sign, y) in signed {
            match sign {
                -1 => {
                    sum_low += y;
                    n_low += 1;
                }
                1 => {
                    sum_high += y;
                    n_high += 1;
                }
                _ => {}
            }
        }
        if n_low == 0 || n_high == 0 {
            return Err(DoeError::estimation(format!(
                "{target}: empty contrast group (n_low = {n_low}, n_high = {n_high})"
            )));
        }
        let mean_low = sum_low / n_low as f64;
        let mean_high = sum_high / n_high as f64;
        let mean_difference = mean_high - mean_low;
        Ok(Self {
            target,
            mean_difference,
            half_effect: mean_difference / 2.0,
            mean_low,
            mean_high,
            n_low,
            n_high,
        })
    }
}

/// Mean response at +1 minus mean at −1. Center-level runs do not enter.
pub fn main_effect(data: &ExperimentData, factor: &str) -> Result<EffectEstimate> {
    let j = data.design.factor_index(factor)?;
    EffectEstimate::from_groups(
        EffectTarget::Main(factor.to_owned()),
        signed_rows(data, |s| s[j].code()),
    )
}

/// Contrast on the product column `f·g`.
pub fn interaction_effect(data: &ExperimentData, f: &str, g: &str) -> Result<EffectEstimate> {
    let a = data.design.factor_index(f)?;
    let b = data.design.factor_index(g)?;
    if a == b {
        return Err(DoeError::validation(format!("interaction of {f} with itself")));
    }
    EffectEstimate::from_groups(
        EffectTarget::Interaction(f.to_owned(), g.to_owned()),
        signed_rows(data, |s| s[a].code() * s[b].code()),
    )
}

/// Main effect of `focal` on the rows where `conditioning == level`.
pub fn conditional_effect(
    data: &ExperimentData,
    focal: &str,
    conditioning: &str,
    level: Level,
) -> Result<EffectEstimate> {
    let f = data.design.factor_index(focal)?;
    let c = data.design.factor_index(conditioning)?;
    if f == c {
        return Err(DoeError::validation(format!("{focal} conditioned on itself")));
    }
    let rows = data
        .design
        .runs()
        .iter()
        .zip(&data.response)
        .filter(|(run, _)| run.settings[c] == level)
        .map(|(run, &y)| (run.settings[f].code(), y));
    EffectEstimate::from_groups(
        EffectTarget::Conditional {
            focal: focal.to_owned(),
            conditioning: conditioning.to_owned(),
            level,
        },
        rows,
    )
}

fn signed_rows<'a>(
    data: &'a ExperimentData,
    sign: impl Fn(&[Level]) -> i8 + 'a,
) -> impl Iterator<Item = (i8, f64)> + 'a {
    data.design
        .runs()
        .iter()
        .zip(&data.response)
        .map(move |(run, &y)| (sign(&run.settings), y))
}

/// Two runs identical except in one factor, one at each of two levels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgePair {
    pub low_run: u32,
    pub high_run: u32,
    /// Response at the high run minus response at the low run.
    pub difference: f64,
}

/// Every pair of runs that agree on all factors but `factor`, with `factor`
/// at `low` in one and `high` in the other. Sorted by `(low_run, high_run)`.
pub fn edge_differences(
    data: &ExperimentData,
    factor: &str,
    low: Level,
    high: Level,
) -> Result<Vec<EdgePair>> {
    Ok(edges(data, factor, low, high)?
        .into_iter()
        .map(|e| e.pair)
        .collect())
}

struct Edge {
    pair: EdgePair,
    settings: Vec<Level>,
}

fn edges(data: &ExperimentData, factor: &str, low: Level, high: Level) -> Result<Vec<Edge>> {
    let j = data.design.factor_index(factor)?;
    let spec = &data.design.factors()[j];
    if low == high {
        return Err(DoeError::validation(format!(
            "edge levels for {factor} must differ"
        )));
    }
    if !spec.has_level(low) || !spec.has_level(high) {
        return Err(DoeError::validation(format!(
            "edge levels {low}/{high} are not both declared for {factor}"
        )));
    }

    // Runs keyed by their settings with the edge factor masked out.
    let mut groups: BTreeMap<Vec<Level>, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
    for (i, run) in data.design.runs().iter().enumerate() {
        let level = run.settings[j];
        if level != low && level != high {
            continue;
        }
        let mut key = run.settings.clone();
        key[j] = Level::CENTER;
        let entry = groups.entry(key).or_default();
        if level == low {
            entry.0.push(i);
        } else {
            entry.1.push(i);
        }
    }

    let runs = data.design.runs();
    let mut out = Vec::new();
    for (lows, highs) in groups.values() {
        for &l in lows {
            for &h in highs {
                out.push(Edge {
                    pair: EdgePair {
                        low_run: runs[l].run_id,
                        high_run: runs[h].run_id,
                        difference: data.response[h] - data.response[l],
                    },
                    settings: runs[l].settings.clone(),
                });
            }
        }
    }
    out.sort_by_key(|e| (e.pair.low_run, e.pair.high_run));
    Ok(out)
}

/// `(mean edge difference at conditioning=+1 − mean at −1) / 2`, using the
/// −1→+1 edges of `factor`.
pub fn paired_interaction(data: &ExperimentData, factor: &str, conditioning: &str) -> Result<f64> {
    let c = data.design.factor_index(conditioning)?;
    if data.design.factor_index(factor)? == c {
        return Err(DoeError::validation(format!("{factor} conditioned on itself")));
    }
    let mut with = Vec::new();
    let mut without = Vec::new();
    for edge in edges(data, factor, Level::LOW, Level::HIGH)? {
        match edge.settings[c] {
            Level::HIGH => with.push(edge.pair.difference),
            Level::LOW => without.push(edge.pair.difference),
            _ => {}
        }
    }
    if with.is_empty() || without.is_empty() {
        return Err(DoeError::estimation(format!(
            "{factor} edges: {} at {conditioning}=+1, {} at {conditioning}=-1",
            with.len(),
            without.len()
        )));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok((mean(&with) - mean(&without)) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cell {
    pub mean: f64,
    /// Responses in run order.
    pub values: Vec<f64>,
}

/// Responses grouped by the combination of `conditioning` levels. An empty
/// factor list yields a single cell keyed by the empty combination.
pub fn cell_means<S: AsRef<str>>(
    data: &ExperimentData,
    conditioning: &[S],
) -> Result<BTreeMap<Vec<Level>, Cell>> {
    let idx = conditioning
        .iter()
        .map(|n| data.design.factor_index(n.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut groups: BTreeMap<Vec<Level>, Vec<f64>> = BTreeMap::new();
    for (run, &y) in data.design.runs().iter().zip(&data.response) {
        let key = idx.iter().map(|&i| run.settings[i]).collect();
        groups.entry(key).or_default().push(y);
    }
    Ok(groups
        .into_iter()
        .map(|(k, values)| {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            (k, Cell { mean, values })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{cross_with_factor, full_factorial, levels, ofat_design, FactorSpec};
    use crate::fixtures;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    fn table1(resp: Vec<f64>) -> ExperimentData {
        let core = ofat_design(
            &[FactorSpec::two_level("Q"), FactorSpec::three_level("T")],
            &levels(&[-1, 0]),
            &[(0, Level::HIGH), (1, Level::LOW), (1, Level::HIGH)],
        )
        .unwrap();
        let d = cross_with_factor(&core, FactorSpec::two_level("M")).unwrap();
        ExperimentData::new(d, resp, "conc").unwrap()
    }

    #[test]
    fn constant_response_has_zero_effects() {
        let d = full_factorial(&[FactorSpec::two_level("a"), FactorSpec::two_level("b")]).unwrap();
        let data = ExperimentData::new(d, vec![5.0; 4], "y").unwrap();
        let e = main_effect(&data, "a").unwrap();
        assert_eq!(e.mean_difference, 0.0);
        assert_eq!(e.half_effect, 0.0);
        assert_eq!(interaction_effect(&data, "a", "b").unwrap().mean_difference, 0.0);
    }

    #[test]
    fn data_validation() {
        let d = full_factorial(&[FactorSpec::two_level("a")]).unwrap();
        assert!(ExperimentData::new(d.clone(), vec![1.0], "y").is_err());
        assert!(ExperimentData::new(d.clone(), vec![1.0, f64::NAN], "y").is_err());
        assert!(ExperimentData::new(d, vec![1.0, 2.0], "a").is_err());
    }

    #[test]
    fn empty_group_is_an_error() {
        let data = table1(vec![0.0; 8]);
        // only batch 1 was run at low temperature
        let err = conditional_effect(&data, "Q", "T", Level::LOW).unwrap_err();
        assert!(matches!(err, DoeError::Estimation(_)));
        assert!(main_effect(&data, "nope").is_err());
        assert!(interaction_effect(&data, "Q", "Q").is_err());
    }

    #[test]
    fn center_runs_are_ignored_by_main_effect() {
        let data = table1(vec![10.0, 12.0, 8.0, 14.0, 0.0, 2.0, -2.0, 4.0]);
        let e = main_effect(&data, "T").unwrap();
        assert_eq!((e.n_low, e.n_high), (2, 2));
        assert!(close(e.mean_difference, 6.0));
    }

    #[test]
    fn table1_edges() {
        let data = table1(vec![10.0, 14.0, 8.0, 12.0, 3.0, 5.0, 1.0, 7.0]);
        let q = edge_differences(&data, "Q", Level::LOW, Level::HIGH).unwrap();
        assert_eq!(q.len(), 2);
        assert_eq!((q[0].low_run, q[0].high_run), (1, 2));
        assert_eq!((q[1].low_run, q[1].high_run), (5, 6));
        assert!(close(q[0].difference, 4.0));
        let t = edge_differences(&data, "T", Level::LOW, Level::HIGH).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!((t[0].low_run, t[0].high_run), (3, 4));
        assert!(edge_differences(&data, "T", Level::LOW, Level::LOW).is_err());
        assert!(edge_differences(&data, "Q", Level::LOW, Level::CENTER).is_err());
        // diff_with = 2 (M=+1), diff_without = 4 (M=-1)
        assert!(close(paired_interaction(&data, "Q", "M").unwrap(), -1.0));
    }

    #[test]
    fn paired_interaction_formula() {
        // crossed order: runs 1-4 have M=-1, runs 5-8 have M=+1
        let data = table1(vec![0.0, 2.0, 0.0, 0.0, 0.0, 4.0, 0.0, 0.0]);
        assert!(close(paired_interaction(&data, "Q", "M").unwrap(), 1.0));
        let anti = table1(vec![0.0, -3.0, 0.0, 0.0, 0.0, 3.0, 0.0, 0.0]);
        assert!(close(paired_interaction(&anti, "Q", "M").unwrap(), 3.0));
        assert!(matches!(
            paired_interaction(&data, "Q", "T"),
            Err(DoeError::Estimation(_))
        ));
    }

    #[test]
    fn factorial_edges_average_to_main_effect() {
        let fs: Vec<_> = ["M", "Q", "T"].iter().map(|n| FactorSpec::two_level(*n)).collect();
        let d = full_factorial(&fs).unwrap();
        let resp = vec![3.1, 4.7, 9.2, 1.0, 5.5, 8.8, 2.3, 7.7];
        let data = ExperimentData::new(d, resp, "y").unwrap();
        let pairs = edge_differences(&data, "Q", Level::LOW, Level::HIGH).unwrap();
        assert_eq!(pairs.len(), 4);
        let avg = pairs.iter().map(|p| p.difference).sum::<f64>() / 4.0;
        assert!(close(avg, main_effect(&data, "Q").unwrap().mean_difference));
    }

    #[test]
    fn table3_cells() {
        let data = fixtures::table3();
        let cells = cell_means(&data, &["A", "B"]).unwrap();
        assert_eq!(cells[&levels(&[-1, 1])].values, vec![85.8, 91.7, 114.8]);
        let all = cell_means::<&str>(&data, &[]).unwrap();
        assert_eq!(all.len(), 1);
        assert!((all[&vec![]].mean - 100.475).abs() < 1e-9);
        let by_x = cell_means(&data, &["X"]).unwrap();
        assert!((by_x[&levels(&[-1])].mean - 92.316_666_666_666_67).abs() < 1e-9);
        assert!((by_x[&levels(&[1])].mean - 108.633_333_333_333_3).abs() < 1e-9);
    }

    #[test]
    fn conditioning_on_level_covering_all_rows() {
        let fs = vec![FactorSpec::two_level("a"), FactorSpec::two_level("z")];
        let runs = (0..4)
            .map(|i| crate::design::Run::new(i + 1, levels(&[if i % 2 == 0 { -1 } else { 1 }, 1])))
            .collect();
        let d = DesignMatrix::new(fs, runs, crate::design::DesignKind::Custom).unwrap();
        let data = ExperimentData::new(d, vec![1.0, 4.0, 2.0, 7.0], "y").unwrap();
        let c = conditional_effect(&data, "a", "z", Level::HIGH).unwrap();
        let m = main_effect(&data, "a").unwrap();
        assert_eq!(c.mean_difference, m.mean_difference);
        assert_eq!(c.target.to_string(), "a|z=H");
    }

    #[test]
    fn estimate_serializes_flat() {
        let data = fixtures::table3();
        let e = interaction_effect(&data, "X", "B").unwrap();
        let v = serde_json::to_value(&e).unwrap();
        assert_eq!(v["target"], "X:B");
        for key in ["mean_difference", "half_effect", "mean_low", "mean_high", "n_low", "n_high"] {
            assert!(v.get(key).is_some(), "{key}");
        }
    }
}
