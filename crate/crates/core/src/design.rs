//! Coded experimental designs: OFAT, full factorial and the 12-run
//! Plackett–Burman array, plus the transformations and diagnostics used on them.
//!
//! Levels are always stored in coded form (−1, 0, +1). Engineering units and
//! human-readable names ("batch 2", "30 °C") live only in [`FactorSpec`] labels.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{DoeError, Result};
use crate::exec::Strategy;
use crate::rng::SeededRng;

/// Largest factor count accepted by [`full_factorial`].
pub const MAX_FULL_FACTORIAL_FACTORS: usize = 16;
/// Column count of the 12-run Plackett–Burman array.
pub const PB12_MAX_FACTORS: usize = 11;
/// Cyclic generator row of the 12-run Plackett–Burman array.
pub const PB12_GENERATOR: [i8; 11] = [1, 1, -1, 1, 1, 1, -1, -1, -1, 1, -1];

/// A coded factor level: −1, 0 or +1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i8", into = "i8")]
pub struct Level(i8);

impl Level {
    pub const LOW: Level = Level(-1);
    pub const CENTER: Level = Level(0);
    pub const HIGH: Level = Level(1);

    pub fn new(code: i8) -> Result<Self> {
        match code {
            -1..=1 => Ok(Level(code)),
            _ => Err(DoeError::validation(format!(
                "coded level must be -1, 0 or 1, got {code}"
            ))),
        }
    }

    pub fn code(self) -> i8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0)
    }

    /// `L`/`H` tag used in plot legends; the center level is `0`.
    pub fn tag(self) -> &'static str {
        match self.0 {
            -1 => "L",
            0 => "0",
            _ => "H",
        }
    }
}

impl TryFrom<i8> for Level {
    type Error = DoeError;
    fn try_from(code: i8) -> Result<Self> {
        Level::new(code)
    }
}

impl From<Level> for i8 {
    fn from(level: Level) -> i8 {
        level.0
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Shorthand for building level vectors in code and tests.
pub fn levels(codes: &[i8]) -> Vec<Level> {
    codes
        .iter()
        .map(|&c| Level::new(c).expect("coded level out of range"))
        .collect()
}

/// A named factor with its coded levels and optional display labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorSpec {
    name: String,
    levels: Vec<Level>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    labels: BTreeMap<Level, String>,
}

impl FactorSpec {
    /// Validates that `levels` is exactly {−1, +1} or {−1, 0, +1} in ascending order.
    pub fn new(name: impl Into<String>, levels: Vec<Level>) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(DoeError::validation("factor name must not be empty"));
        }
        let two = [Level::LOW, Level::HIGH];
        let three = [Level::LOW, Level::CENTER, Level::HIGH];
        if levels[..] != two[..] && levels[..] != three[..] {
            return Err(DoeError::validation(format!(
                "factor {name}: levels must be [-1, 1] or [-1, 0, 1], got {levels:?}"
            )));
        }
        Ok(Self {
            name,
            levels,
            labels: BTreeMap::new(),
        })
    }

    pub fn two_level(name: impl Into<String>) -> Self {
        Self::new(name, vec![Level::LOW, Level::HIGH]).expect("valid two-level factor")
    }

    pub fn three_level(name: impl Into<String>) -> Self {
        Self::new(name, vec![Level::LOW, Level::CENTER, Level::HIGH])
            .expect("valid three-level factor")
    }

    /// Attaches a display label to a declared level. Unknown levels are ignored.
    pub fn with_label(mut self, level: Level, label: impl Into<String>) -> Self {
        if self.levels.contains(&level) {
            self.labels.insert(level, label.into());
        }
        self
    }

    pub fn with_labels<I, S>(mut self, labels: I) -> Self
    where
        I: IntoIterator<Item = (Level, S)>,
        S: Into<String>,
    {
        for (level, label) in labels {
            self = self.with_label(level, label);
        }
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn labels(&self) -> &BTreeMap<Level, String> {
        &self.labels
    }

    pub fn label(&self, level: Level) -> Option<&str> {
        self.labels.get(&level).map(String::as_str)
    }

    pub fn is_two_level(&self) -> bool {
        self.levels.len() == 2
    }

    pub fn has_level(&self, level: Level) -> bool {
        self.levels.contains(&level)
    }
}

/// One experimental run: an identifier and one coded setting per factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Run {
    pub run_id: u32,
    pub settings: Vec<Level>,
}

impl Run {
    pub fn new(run_id: u32, settings: Vec<Level>) -> Self {
        Self { run_id, settings }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignKind {
    Ofat,
    FullFactorial,
    Pb12,
    Custom,
}

impl fmt::Display for DesignKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DesignKind::Ofat => "ofat",
            DesignKind::FullFactorial => "full_factorial",
            DesignKind::Pb12 => "pb12",
            DesignKind::Custom => "custom",
        })
    }
}

/// An ordered list of runs over a factor list.
///
/// Construction goes through [`DesignMatrix::new`], which enforces unique
/// factor names, unique positive run IDs, conforming settings, and the
/// run-count rules of the `full_factorial` and `pb12` kinds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DesignMatrix {
    factors: Vec<FactorSpec>,
    runs: Vec<Run>,
    kind: DesignKind,
}

impl DesignMatrix {
    pub fn new(factors: Vec<FactorSpec>, runs: Vec<Run>, kind: DesignKind) -> Result<Self> {
        check_unique_names(&factors)?;
        let mut ids = HashSet::with_capacity(runs.len());
        for run in &runs {
            if run.run_id == 0 {
                return Err(DoeError::validation("run IDs must be positive"));
            }
            if !ids.insert(run.run_id) {
                return Err(DoeError::validation(format!(
                    "duplicate run ID {}",
                    run.run_id
                )));
            }
            if run.settings.len() != factors.len() {
                return Err(DoeError::validation(format!(
                    "run {} has {} settings for {} factors",
                    run.run_id,
                    run.settings.len(),
                    factors.len()
                )));
            }
            for (factor, level) in factors.iter().zip(&run.settings) {
                if !factor.has_level(*level) {
                    return Err(DoeError::validation(format!(
                        "run {}: level {} is not declared for factor {}",
                        run.run_id,
                        level,
                        factor.name()
                    )));
                }
            }
        }
        match kind {
            DesignKind::FullFactorial => {
                let expected: usize = factors.iter().map(|f| f.levels().len()).product();
                let distinct: HashSet<&[Level]> =
                    runs.iter().map(|r| r.settings.as_slice()).collect();
                if runs.len() != expected || distinct.len() != runs.len() {
                    return Err(DoeError::validation(format!(
                        "full factorial needs {expected} distinct runs, got {} ({} distinct)",
                        runs.len(),
                        distinct.len()
                    )));
                }
            }
            DesignKind::Pb12 => {
                if runs.len() != 12 {
                    return Err(DoeError::validation(format!(
                        "pb12 design needs 12 runs, got {}",
                        runs.len()
                    )));
                }
                for (j, factor) in factors.iter().enumerate() {
                    let highs = runs.iter().filter(|r| r.settings[j] == Level::HIGH).count();
                    let lows = runs.iter().filter(|r| r.settings[j] == Level::LOW).count();
                    if highs != 6 || lows != 6 {
                        return Err(DoeError::validation(format!(
                            "pb12 column {} is not balanced 6/6",
                            factor.name()
                        )));
                    }
                }
            }
            DesignKind::Ofat | DesignKind::Custom => {}
        }
        Ok(Self {
            factors,
            runs,
            kind,
        })
    }

    pub fn factors(&self) -> &[FactorSpec] {
        &self.factors
    }

    pub fn runs(&self) -> &[Run] {
        &self.runs
    }

    pub fn kind(&self) -> DesignKind {
        self.kind
    }

    pub fn n_runs(&self) -> usize {
        self.runs.len()
    }

    pub fn n_factors(&self) -> usize {
        self.factors.len()
    }

    pub fn factor_names(&self) -> Vec<&str> {
        self.factors.iter().map(FactorSpec::name).collect()
    }

    pub fn factor_index(&self, name: &str) -> Result<usize> {
        self.factors
            .iter()
            .position(|f| f.name() == name)
            .ok_or_else(|| DoeError::validation(format!("unknown factor {name}")))
    }

    pub fn factor(&self, name: &str) -> Result<&FactorSpec> {
        self.factor_index(name).map(|i| &self.factors[i])
    }

    pub fn column(&self, index: usize) -> Vec<Level> {
        self.runs.iter().map(|r| r.settings[index]).collect()
    }

    /// Same runs and factors with run IDs reassigned `start, start+1, ...` in current order.
    pub fn renumbered(&self, start: u32) -> Result<Self> {
        if start == 0 {
            return Err(DoeError::validation("run IDs must be positive"));
        }
        let runs = self
            .runs
            .iter()
            .zip(start..)
            .map(|(r, id)| Run::new(id, r.settings.clone()))
            .collect();
        Ok(Self {
            factors: self.factors.clone(),
            runs,
            kind: self.kind,
        })
    }

    /// Relabels the design kind, re-running the kind's invariant checks.
    pub fn with_kind(self, kind: DesignKind) -> Result<Self> {
        Self::new(self.factors, self.runs, kind)
    }

    /// Set of coded settings, ignoring run IDs and order.
    pub fn settings_set(&self) -> BTreeSet<Vec<Level>> {
        self.runs.iter().map(|r| r.settings.clone()).collect()
    }
}

fn check_unique_names(factors: &[FactorSpec]) -> Result<()> {
    let mut seen = HashSet::new();
    for f in factors {
        if !seen.insert(f.name()) {
            return Err(DoeError::validation(format!(
                "duplicate factor name {}",
                f.name()
            )));
        }
    }
    Ok(())
}

/// Every level combination exactly once, first factor varying slowest,
/// levels ascending within each factor. Run IDs are `1..=N`.
pub fn full_factorial(factors: &[FactorSpec]) -> Result<DesignMatrix> {
    full_factorial_with(factors, Strategy::default())
}

pub fn full_factorial_with(factors: &[FactorSpec], strategy: Strategy) -> Result<DesignMatrix> {
    if factors.is_empty() {
        return Err(DoeError::validation("full factorial needs at least one factor"));
    }
    if factors.len() > MAX_FULL_FACTORIAL_FACTORS {
        return Err(DoeError::Capacity {
            what: "full factorial factor count",
            got: factors.len(),
            limit: MAX_FULL_FACTORIAL_FACTORS,
        });
    }
    check_unique_names(factors)?;
    let radices: Vec<usize> = factors.iter().map(|f| f.levels().len()).collect();
    let total: usize = radices.iter().product();

    let runs = strategy.map_range(total, |index| {
        let mut settings = vec![Level::CENTER; factors.len()];
        let mut rest = index;
        for (j, factor) in factors.iter().enumerate().rev() {
            settings[j] = factor.levels()[rest % radices[j]];
            rest /= radices[j];
        }
        Run::new(index as u32 + 1, settings)
    });
    DesignMatrix::new(factors.to_vec(), runs, DesignKind::FullFactorial)
}

/// Baseline run followed by one run per excursion, each differing from the
/// baseline in exactly the excursed factor.
pub fn ofat_design(
    factors: &[FactorSpec],
    baseline: &[Level],
    excursions: &[(usize, Level)],
) -> Result<DesignMatrix> {
    if baseline.len() != factors.len() {
        return Err(DoeError::validation(format!(
            "baseline has {} settings for {} factors",
            baseline.len(),
            factors.len()
        )));
    }
    for (factor, level) in factors.iter().zip(baseline) {
        if !factor.has_level(*level) {
            return Err(DoeError::validation(format!(
                "baseline level {level} is not declared for factor {}",
                factor.name()
            )));
        }
    }
    let mut runs = vec![Run::new(1, baseline.to_vec())];
    for &(index, level) in excursions {
        let factor = factors.get(index).ok_or_else(|| {
            DoeError::validation(format!("excursion factor index {index} out of range"))
        })?;
        if level == baseline[index] {
            return Err(DoeError::validation(format!(
                "excursion on {} repeats the baseline level {level}",
                factor.name()
            )));
        }
        let mut settings = baseline.to_vec();
        settings[index] = level;
        runs.push(Run::new(runs.len() as u32 + 1, settings));
    }
    DesignMatrix::new(factors.to_vec(), runs, DesignKind::Ofat)
}

/// Repeats the whole design once per level of `new_factor` (ascending),
/// appending the new factor as the last column and renumbering runs from 1.
pub fn cross_with_factor(design: &DesignMatrix, new_factor: FactorSpec) -> Result<DesignMatrix> {
    if design.factor_index(new_factor.name()).is_ok() {
        return Err(DoeError::validation(format!(
            "factor {} already present",
            new_factor.name()
        )));
    }
    let mut runs = Vec::with_capacity(design.n_runs() * new_factor.levels().len());
    for &level in new_factor.levels() {
        for run in design.runs() {
            let mut settings = run.settings.clone();
            settings.push(level);
            runs.push(Run::new(runs.len() as u32 + 1, settings));
        }
    }
    let mut factors = design.factors().to_vec();
    factors.push(new_factor);
    let kind = match design.kind() {
        DesignKind::Pb12 => DesignKind::Custom,
        k => k,
    };
    DesignMatrix::new(factors, runs, kind)
}

/// The canonical 12 × 11 Plackett–Burman array: eleven cyclic shifts of
/// [`PB12_GENERATOR`] (row `i` is the generator rotated right by `i`)
/// followed by a row of all −1.
pub fn pb12_array() -> [[i8; 11]; 12] {
    let mut rows = [[-1i8; 11]; 12];
    for (i, row) in rows.iter_mut().take(11).enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = PB12_GENERATOR[(j + 11 - i) % 11];
        }
    }
    rows
}

/// First `k` columns of the 12-run array, with factors named `F1..Fk`.
pub fn pb12_design(k: usize) -> Result<DesignMatrix> {
    let names: Vec<String> = (1..=k).map(|i| format!("F{i}")).collect();
    pb12_named(&names)
}

pub fn pb12_named<S: AsRef<str>>(names: &[S]) -> Result<DesignMatrix> {
    let k = names.len();
    if k == 0 {
        return Err(DoeError::validation("pb12 design needs at least one factor"));
    }
    if k > PB12_MAX_FACTORS {
        return Err(DoeError::Capacity {
            what: "pb12 factor count",
            got: k,
            limit: PB12_MAX_FACTORS,
        });
    }
    let factors = names
        .iter()
        .map(|n| FactorSpec::two_level(n.as_ref()))
        .collect();
    let runs = pb12_array()
        .iter()
        .zip(1u32..)
        .map(|(row, id)| Run::new(id, levels(&row[..k])))
        .collect();
    DesignMatrix::new(factors, runs, DesignKind::Pb12)
}

/// Multiset of the design's rows restricted to `subset`, in the order given.
pub fn project_design<S: AsRef<str>>(
    design: &DesignMatrix,
    subset: &[S],
) -> Result<BTreeMap<Vec<Level>, usize>> {
    if subset.is_empty() {
        return Err(DoeError::validation("projection subset is empty"));
    }
    let idx = subset
        .iter()
        .map(|n| design.factor_index(n.as_ref()))
        .collect::<Result<Vec<_>>>()?;
    let mut counts = BTreeMap::new();
    for run in design.runs() {
        let key: Vec<Level> = idx.iter().map(|&i| run.settings[i]).collect();
        *counts.entry(key).or_insert(0) += 1;
    }
    Ok(counts)
}

/// A seeded permutation of the run order; run IDs travel with their settings.
pub fn randomize_order(design: &DesignMatrix, seed: u64) -> DesignMatrix {
    let mut runs = design.runs.clone();
    SeededRng::new(seed).shuffle(&mut runs);
    DesignMatrix {
        factors: design.factors.clone(),
        runs,
        kind: design.kind,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnBalance {
    pub factor: String,
    /// Count of runs at each declared level (zero counts included).
    pub counts: BTreeMap<Level, usize>,
    /// Largest minus smallest per-level count; 0 means balanced.
    pub imbalance: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnPairProduct {
    pub a: String,
    pub b: String,
    pub dot: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DuplicateRuns {
    pub settings: Vec<Level>,
    pub run_ids: Vec<u32>,
}

/// Balance, orthogonality and duplicate report for a design.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DesignDiagnostics {
    pub balance: Vec<ColumnBalance>,
    pub orthogonality: Vec<ColumnPairProduct>,
    pub duplicates: Vec<DuplicateRuns>,
}

impl DesignDiagnostics {
    pub fn is_balanced(&self) -> bool {
        self.balance.iter().all(|c| c.imbalance == 0)
    }

    pub fn is_orthogonal(&self) -> bool {
        self.orthogonality.iter().all(|p| p.dot == 0)
    }

    pub fn balance_of(&self, factor: &str) -> Option<&ColumnBalance> {
        self.balance.iter().find(|c| c.factor == factor)
    }
}

pub fn validate_design(design: &DesignMatrix) -> DesignDiagnostics {
    let columns: Vec<Vec<Level>> = (0..design.n_factors()).map(|j| design.column(j)).collect();

    let balance = design
        .factors()
        .iter()
        .zip(&columns)
        .map(|(factor, col)| {
            let mut counts: BTreeMap<Level, usize> =
                factor.levels().iter().map(|&l| (l, 0)).collect();
            for level in col {
                *counts.entry(*level).or_insert(0) += 1;
            }
            let max = counts.values().copied().max().unwrap_or(0);
            let min = counts.values().copied().min().unwrap_or(0);
            ColumnBalance {
                factor: factor.name().to_owned(),
                counts,
                imbalance: max - min,
            }
        })
        .collect();

    let mut orthogonality = Vec::new();
    for a in 0..columns.len() {
        for b in a + 1..columns.len() {
            let dot = columns[a]
                .iter()
                .zip(&columns[b])
                .map(|(x, y)| i64::from(x.code()) * i64::from(y.code()))
                .sum();
            orthogonality.push(ColumnPairProduct {
                a: design.factors()[a].name().to_owned(),
                b: design.factors()[b].name().to_owned(),
                dot,
            });
        }
    }

    let mut groups: BTreeMap<&[Level], Vec<u32>> = BTreeMap::new();
    for run in design.runs() {
        groups.entry(&run.settings).or_default().push(run.run_id);
    }
    let duplicates = groups
        .into_iter()
        .filter(|(_, ids)| ids.len() > 1)
        .map(|(settings, run_ids)| DuplicateRuns {
            settings: settings.to_vec(),
            run_ids,
        })
        .collect();

    DesignDiagnostics {
        balance,
        orthogonality,
        duplicates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hamming(a: &[Level], b: &[Level]) -> usize {
        a.iter().zip(b).filter(|(x, y)| x != y).count()
    }

    #[test]
    fn factor_spec_rejects_bad_levels() {
        assert!(FactorSpec::new("a", levels(&[-1])).is_err());
        assert!(FactorSpec::new("a", levels(&[1, -1])).is_err());
        assert!(FactorSpec::new("a", levels(&[-1, 0])).is_err());
        assert!(FactorSpec::new("", levels(&[-1, 1])).is_err());
        assert!(Level::new(2).is_err());
        let f = FactorSpec::two_level("Q").with_label(Level::LOW, "1").with_label(Level::CENTER, "x");
        assert_eq!(f.label(Level::LOW), Some("1"));
        assert_eq!(f.label(Level::CENTER), None);
    }

    #[test]
    fn full_factorial_two_by_two() {
        let d = full_factorial(&[FactorSpec::two_level("a"), FactorSpec::two_level("b")]).unwrap();
        let rows: Vec<Vec<i8>> = d
            .runs()
            .iter()
            .map(|r| r.settings.iter().map(|l| l.code()).collect())
            .collect();
        assert_eq!(rows, vec![vec![-1, -1], vec![-1, 1], vec![1, -1], vec![1, 1]]);
        assert_eq!(d.kind(), DesignKind::FullFactorial);
    }

    #[test]
    fn full_factorial_columns_sum_to_zero() {
        let fs: Vec<_> = ["M", "Q", "T"].iter().map(|n| FactorSpec::two_level(*n)).collect();
        let d = full_factorial(&fs).unwrap();
        assert_eq!(d.n_runs(), 8);
        for j in 0..3 {
            assert_eq!(d.column(j).iter().map(|l| l.code() as i32).sum::<i32>(), 0);
        }
        assert!(validate_design(&d).is_orthogonal());
    }

    #[test]
    fn full_factorial_errors() {
        let many: Vec<_> = (0..17).map(|i| FactorSpec::two_level(format!("f{i}"))).collect();
        assert!(matches!(full_factorial(&many), Err(DoeError::Capacity { got: 17, .. })));
        let dup = [FactorSpec::two_level("a"), FactorSpec::two_level("a")];
        assert!(matches!(full_factorial(&dup), Err(DoeError::Validation(_))));
        assert!(full_factorial(&[]).is_err());
    }

    #[test]
    fn full_factorial_mixed_levels() {
        let d = full_factorial(&[FactorSpec::three_level("t"), FactorSpec::two_level("q")]).unwrap();
        assert_eq!(d.n_runs(), 6);
        assert_eq!(d.runs()[2].settings, levels(&[0, -1]));
    }

    #[test]
    fn ofat_degenerate_and_star() {
        let fs = vec![FactorSpec::three_level("f1"), FactorSpec::three_level("f2")];
        let single = ofat_design(&fs, &levels(&[0, 0]), &[]).unwrap();
        assert_eq!(single.n_runs(), 1);

        let star = ofat_design(
            &fs,
            &levels(&[0, 0]),
            &[(0, Level::LOW), (0, Level::HIGH), (1, Level::LOW), (1, Level::HIGH)],
        )
        .unwrap();
        assert_eq!(star.n_runs(), 5);
        let center = &star.runs()[0].settings;
        for run in &star.runs()[1..] {
            assert_eq!(hamming(center, &run.settings), 1);
        }
        // axial points are pairwise at distance 2 (brute force over all pairs)
        for a in 1..5 {
            for b in a + 1..5 {
                let d = hamming(&star.runs()[a].settings, &star.runs()[b].settings);
                assert!(d == 1 || d == 2);
            }
        }
    }

    #[test]
    fn ofat_rejects_noop_excursion() {
        let fs = vec![FactorSpec::two_level("q"), FactorSpec::three_level("t")];
        let err = ofat_design(&fs, &levels(&[-1, 0]), &[(1, Level::CENTER)]).unwrap_err();
        assert!(matches!(err, DoeError::Validation(_)));
        assert!(ofat_design(&fs, &levels(&[-1, 0]), &[(5, Level::HIGH)]).is_err());
        assert!(ofat_design(&fs, &levels(&[-1]), &[]).is_err());
    }

    #[test]
    fn cross_single_run() {
        let fs = vec![FactorSpec::two_level("a")];
        let one = ofat_design(&fs, &levels(&[1]), &[]).unwrap();
        let crossed = cross_with_factor(&one, FactorSpec::two_level("m")).unwrap();
        assert_eq!(crossed.n_runs(), 2);
        assert_eq!(crossed.runs()[0].settings, levels(&[1, -1]));
        assert_eq!(crossed.runs()[1].settings, levels(&[1, 1]));
        assert!(cross_with_factor(&crossed, FactorSpec::two_level("m")).is_err());
    }

    #[test]
    fn cross_of_factorial_is_factorial() {
        let two = full_factorial(&[FactorSpec::two_level("a"), FactorSpec::two_level("b")]).unwrap();
        let crossed = cross_with_factor(&two, FactorSpec::two_level("c")).unwrap();
        let three = full_factorial(&[
            FactorSpec::two_level("a"),
            FactorSpec::two_level("b"),
            FactorSpec::two_level("c"),
        ])
        .unwrap();
        assert_eq!(crossed.settings_set(), three.settings_set());
    }

    #[test]
    fn pb12_generator_layout() {
        let a = pb12_array();
        assert_eq!(a[0], PB12_GENERATOR);
        assert_eq!(a[1][0], PB12_GENERATOR[10]);
        assert_eq!(a[11], [-1; 11]);
    }

    #[test]
    fn pb12_single_column_balanced() {
        let d = pb12_design(1).unwrap();
        assert_eq!(d.n_runs(), 12);
        assert_eq!(validate_design(&d).balance[0].imbalance, 0);
        assert!(matches!(pb12_design(12), Err(DoeError::Capacity { .. })));
        assert!(pb12_design(0).is_err());
    }

    #[test]
    fn pb12_six_pairs_each_sign_combo_three_times() {
        let d = pb12_design(6).unwrap();
        for a in 0..6 {
            for b in a + 1..6 {
                let mut counts = BTreeMap::new();
                for run in d.runs() {
                    *counts.entry((run.settings[a], run.settings[b])).or_insert(0) += 1;
                }
                assert_eq!(counts.len(), 4);
                assert!(counts.values().all(|&c| c == 3));
            }
        }
    }

    #[test]
    fn pb12_eleven_columns_orthogonal() {
        let d = pb12_design(11).unwrap();
        let diag = validate_design(&d);
        assert_eq!(diag.orthogonality.len(), 55);
        assert!(diag.is_orthogonal());
        assert!(diag.is_balanced());
        assert!(diag.duplicates.is_empty());
    }

    #[test]
    fn projections() {
        let d = full_factorial(&[
            FactorSpec::two_level("a"),
            FactorSpec::two_level("b"),
            FactorSpec::two_level("c"),
        ])
        .unwrap();
        let p = project_design(&d, &["b"]).unwrap();
        assert_eq!(p[&levels(&[-1])], 4);
        assert_eq!(p[&levels(&[1])], 4);
        assert!(project_design(&d, &["zz"]).is_err());
        assert!(project_design::<&str>(&d, &[]).is_err());
    }

    #[test]
    fn pb12_three_factor_projections() {
        let d = pb12_design(6).unwrap();
        let names = d.factor_names();
        for a in 0..6 {
            for b in a + 1..6 {
                for c in b + 1..6 {
                    let p = project_design(&d, &[names[a], names[b], names[c]]).unwrap();
                    assert_eq!(p.len(), 8);
                    let mut counts: Vec<usize> = p.values().copied().collect();
                    counts.sort_unstable();
                    assert_eq!(counts, vec![1, 1, 1, 1, 2, 2, 2, 2]);
                }
            }
        }
    }

    #[test]
    fn randomize_is_seeded_permutation() {
        let d = full_factorial(&[
            FactorSpec::two_level("a"),
            FactorSpec::two_level("b"),
            FactorSpec::two_level("c"),
        ])
        .unwrap();
        let r1 = randomize_order(&d, 42);
        let r2 = randomize_order(&d, 42);
        assert_eq!(r1, r2);
        let mut sorted = r1.runs().to_vec();
        sorted.sort_by_key(|r| r.run_id);
        assert_eq!(sorted, d.runs());

        let one = ofat_design(&[FactorSpec::two_level("a")], &levels(&[1]), &[]).unwrap();
        assert_eq!(randomize_order(&one, 99), one);
    }

    #[test]
    fn diagnostics_report_duplicates() {
        let fs = vec![FactorSpec::two_level("a")];
        let runs = vec![
            Run::new(1, levels(&[1])),
            Run::new(2, levels(&[1])),
            Run::new(3, levels(&[-1])),
        ];
        let d = DesignMatrix::new(fs, runs, DesignKind::Custom).unwrap();
        let diag = validate_design(&d);
        assert_eq!(diag.duplicates.len(), 1);
        assert_eq!(diag.duplicates[0].run_ids, vec![1, 2]);
        assert_eq!(diag.balance[0].imbalance, 1);
    }

    #[test]
    fn matrix_validation() {
        let fs = vec![FactorSpec::two_level("a")];
        assert!(DesignMatrix::new(fs.clone(), vec![Run::new(0, levels(&[1]))], DesignKind::Custom).is_err());
        assert!(DesignMatrix::new(
            fs.clone(),
            vec![Run::new(1, levels(&[1])), Run::new(1, levels(&[-1]))],
            DesignKind::Custom
        )
        .is_err());
        assert!(DesignMatrix::new(fs.clone(), vec![Run::new(1, levels(&[0]))], DesignKind::Custom).is_err());
        assert!(DesignMatrix::new(fs.clone(), vec![Run::new(1, levels(&[1, 1]))], DesignKind::Custom).is_err());
        assert!(DesignMatrix::new(fs, vec![Run::new(1, levels(&[1]))], DesignKind::FullFactorial).is_err());
    }
}
