//! CSV and JSON serialization for designs, results and reports.
//!
//! Canonical CSV: comma separated, LF line endings, a leading `run_id`
//! column, factor levels as integer codes `-1`/`0`/`1`, and responses written
//! with the shortest exact decimal form (always at least one decimal place).
//! Factor levels, labels and the design kind travel in a JSON sidecar next
//! to the CSV (`name.labels.json` for `name.csv`).
//!
//! On input the `run_id` column is optional (runs are numbered from 1 when
//! absent), and level cells may be codes (`-1`, `0`, `1`, `+1`), `L`/`H`, or
//! any label declared in the sidecar.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::design::{DesignKind, DesignMatrix, FactorSpec, Level, Run};
use crate::effects::ExperimentData;
use crate::error::{DoeError, Result};

pub const RUN_ID_COLUMN: &str = "run_id";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SidecarFactor {
    pub name: String,
    pub levels: Vec<i8>,
    /// Keyed by the coded level as a string (`"-1"`, `"0"`, `"1"`).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub labels: BTreeMap<String, String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignSidecar {
    pub kind: DesignKind,
    pub factors: Vec<SidecarFactor>,
}

impl DesignSidecar {
    pub fn from_design(design: &DesignMatrix) -> Self {
        let factors = design
            .factors()
            .iter()
            .map(|f| SidecarFactor {
                name: f.name().to_owned(),
                levels: f.levels().iter().map(|l| l.code()).collect(),
                labels: f
                    .labels()
                    .iter()
                    .map(|(l, s)| (l.to_string(), s.clone()))
                    .collect(),
            })
            .collect();
        Self {
            kind: design.kind(),
            factors,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sidecar serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| DoeError::parse(e.line(), None, format!("label sidecar: {e}")))
    }

    fn factor_specs(&self) -> Result<Vec<FactorSpec>> {
        self.factors
            .iter()
            .map(|f| {
                let levels = f
                    .levels
                    .iter()
                    .map(|&c| Level::new(c))
                    .collect::<Result<Vec<_>>>()?;
                let mut spec = FactorSpec::new(f.name.clone(), levels)?;
                for (code, label) in &f.labels {
                    let level = code
                        .trim()
                        .parse::<i8>()
                        .map_err(|_| DoeError::validation(format!("bad label key {code:?} for {}", f.name)))
                        .and_then(Level::new)?;
                    if !spec.has_level(level) {
                        return Err(DoeError::validation(format!(
                            "label for undeclared level {level} of {}",
                            f.name
                        )));
                    }
                    spec = spec.with_label(level, label.clone());
                }
                Ok(spec)
            })
            .collect()
    }
}

/// `dir/name.csv` → `dir/name.labels.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    let stem = csv_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    csv_path.with_file_name(format!("{stem}.labels.json"))
}

pub fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| DoeError::Io {
        path: path.to_owned(),
        source,
    })
}

pub fn write_text(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|source| DoeError::Io {
        path: path.to_owned(),
        source,
    })
}

/// Reads the sidecar next to `csv_path` if one exists.
pub fn read_sidecar_for(csv_path: &Path) -> Result<Option<DesignSidecar>> {
    let path = sidecar_path(csv_path);
    if path.exists() {
        DesignSidecar::from_json(&read_text(&path)?).map(Some)
    } else {
        Ok(None)
    }
}

/// Canonical text form of a response value.
pub fn format_response(y: f64) -> String {
    if y.fract() == 0.0 {
        format!("{y:.1}")
    } else {
        format!("{y}")
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish(writer: csv::Writer<Vec<u8>>) -> String {
    let bytes = writer.into_inner().expect("in-memory csv flush");
    String::from_utf8(bytes).expect("csv output is utf-8")
}

pub fn write_design_csv(design: &DesignMatrix) -> String {
    write_table(design, None)
}

pub fn write_results_csv(data: &ExperimentData) -> String {
    write_table(data.design(), Some((data.response_name(), data.response())))
}

fn write_table(design: &DesignMatrix, response: Option<(&str, &[f64])>) -> String {
    let mut w = csv_writer();
    let mut header = vec![RUN_ID_COLUMN.to_owned()];
    header.extend(design.factor_names().into_iter().map(str::to_owned));
    if let Some((name, _)) = response {
        header.push(name.to_owned());
    }
    w.write_record(&header).expect("in-memory csv write");
    for (i, run) in design.runs().iter().enumerate() {
        let mut record = vec![run.run_id.to_string()];
        record.extend(run.settings.iter().map(Level::to_string));
        if let Some((_, ys)) = response {
            record.push(format_response(ys[i]));
        }
        w.write_record(&record).expect("in-memory csv write");
    }
    finish(w)
}

struct Table {
    header: Vec<String>,
    /// (1-based file row, cells)
    rows: Vec<(usize, Vec<String>)>,
}

fn read_table<R: Read>(reader: R) -> Result<Table> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = rdr.records();
    let header: Vec<String> = match records.next() {
        Some(rec) => rec
            .map_err(|e| DoeError::parse(1, None, e.to_string()))?
            .iter()
            .map(str::to_owned)
            .collect(),
        None => return Err(DoeError::parse(1, None, "missing header")),
    };
    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let row = i + 2;
        let rec = rec.map_err(|e| DoeError::parse(row, None, e.to_string()))?;
        if rec.iter().all(str::is_empty) {
            continue;
        }
        if rec.len() != header.len() {
            return Err(DoeError::parse(
                row,
                None,
                format!("ragged row: {} fields, header has {}", rec.len(), header.len()),
            ));
        }
        rows.push((row, rec.iter().map(str::to_owned).collect()));
    }
    if rows.is_empty() {
        return Err(DoeError::parse(1, None, "no runs"));
    }
    Ok(Table { header, rows })
}

fn parse_level(token: &str, labels: Option<&FactorSpec>) -> Option<(Level, bool)> {
    let code = match token {
        "-1" => Some(Level::LOW),
        "0" => Some(Level::CENTER),
        "1" | "+1" => Some(Level::HIGH),
        _ => None,
    };
    if let Some(level) = code {
        return Some((level, false));
    }
    match token {
        "L" => return Some((Level::LOW, true)),
        "H" => return Some((Level::HIGH, true)),
        _ => {}
    }
    labels.and_then(|spec| {
        spec.labels()
            .iter()
            .find(|(_, l)| l.as_str() == token)
            .map(|(&level, _)| (level, false))
    })
}

fn build_design(
    table: &Table,
    factor_cols: &[usize],
    run_id_col: Option<usize>,
    sidecar: Option<&DesignSidecar>,
) -> Result<DesignMatrix> {
    let names: Vec<&str> = factor_cols.iter().map(|&c| table.header[c].as_str()).collect();
    let declared = match sidecar {
        Some(sc) => {
            let specs = sc.factor_specs()?;
            let sc_names: Vec<&str> = specs.iter().map(FactorSpec::name).collect();
            if sc_names != names {
                return Err(DoeError::validation(format!(
                    "sidecar factors {sc_names:?} do not match CSV columns {names:?}"
                )));
            }
            Some(specs)
        }
        None => None,
    };

    let mut settings = vec![Vec::with_capacity(factor_cols.len()); table.rows.len()];
    let mut saw_center = vec![false; factor_cols.len()];
    let mut saw_letters = vec![false; factor_cols.len()];
    for (r, (row_no, cells)) in table.rows.iter().enumerate() {
        for (j, &c) in factor_cols.iter().enumerate() {
            let spec = declared.as_ref().map(|d| &d[j]);
            let (level, letter) = parse_level(&cells[c], spec).ok_or_else(|| {
                DoeError::parse(*row_no, Some(names[j]), format!("unknown level token {:?}", cells[c]))
            })?;
            saw_center[j] |= level == Level::CENTER;
            saw_letters[j] |= letter;
            settings[r].push(level);
        }
    }

    let factors = match declared {
        Some(specs) => specs,
        None => names
            .iter()
            .enumerate()
            .map(|(j, name)| {
                let spec = if saw_center[j] {
                    FactorSpec::three_level(*name)
                } else {
                    FactorSpec::two_level(*name)
                };
                if saw_letters[j] {
                    spec.with_label(Level::LOW, "L").with_label(Level::HIGH, "H")
                } else {
                    spec
                }
            })
            .collect(),
    };

    let mut runs = Vec::with_capacity(table.rows.len());
    for (r, ((row_no, cells), s)) in table.rows.iter().zip(settings).enumerate() {
        let run_id = match run_id_col {
            Some(c) => cells[c]
                .parse::<u32>()
                .map_err(|_| DoeError::parse(*row_no, Some(RUN_ID_COLUMN), format!("bad run id {:?}", cells[c])))?,
            None => r as u32 + 1,
        };
        runs.push(Run::new(run_id, s));
    }
    let kind = sidecar.map_or(DesignKind::Custom, |sc| sc.kind);
    DesignMatrix::new(factors, runs, kind)
}

fn check_header(table: &Table) -> Result<()> {
    for (i, name) in table.header.iter().enumerate() {
        if name.is_empty() {
            return Err(DoeError::parse(1, None, format!("empty column name at position {}", i + 1)));
        }
        if table.header[..i].contains(name) {
            return Err(DoeError::parse(1, Some(name), "duplicate column"));
        }
    }
    Ok(())
}

pub fn read_design_csv<R: Read>(reader: R, sidecar: Option<&DesignSidecar>) -> Result<DesignMatrix> {
    let table = read_table(reader)?;
    check_header(&table)?;
    let run_id_col = table.header.iter().position(|h| h == RUN_ID_COLUMN);
    let factor_cols: Vec<usize> = (0..table.header.len()).filter(|&c| Some(c) != run_id_col).collect();
    if factor_cols.is_empty() {
        return Err(DoeError::parse(1, None, "no factor columns"));
    }
    build_design(&table, &factor_cols, run_id_col, sidecar)
}

/// Parses a results table: every column except `run_id` and `response_name`
/// is a factor.
pub fn parse_results_csv<R: Read>(
    reader: R,
    response_name: &str,
    sidecar: Option<&DesignSidecar>,
) -> Result<ExperimentData> {
    let table = read_table(reader)?;
    check_header(&table)?;
    let resp_col = table
        .header
        .iter()
        .position(|h| h == response_name)
        .ok_or_else(|| DoeError::parse(1, Some(response_name), "response column not found"))?;
    let run_id_col = table.header.iter().position(|h| h == RUN_ID_COLUMN);
    let factor_cols: Vec<usize> = (0..table.header.len())
        .filter(|&c| c != resp_col && Some(c) != run_id_col)
        .collect();
    if factor_cols.is_empty() {
        return Err(DoeError::parse(1, None, "no factor columns"));
    }
    let mut response = Vec::with_capacity(table.rows.len());
    for (row_no, cells) in &table.rows {
        let y: f64 = cells[resp_col]
            .parse()
            .ok()
            .filter(|y: &f64| y.is_finite())
            .ok_or_else(|| {
                DoeError::parse(*row_no, Some(response_name), format!("non-numeric response {:?}", cells[resp_col]))
            })?;
        response.push(y);
    }
    let design = build_design(&table, &factor_cols, run_id_col, sidecar)?;
    ExperimentData::new(design, response, response_name)
}

pub fn load_design(path: &Path) -> Result<DesignMatrix> {
    let text = read_text(path)?;
    let sidecar = read_sidecar_for(path)?;
    read_design_csv(text.as_bytes(), sidecar.as_ref())
}

pub fn load_results(path: &Path, response_name: &str) -> Result<ExperimentData> {
    let text = read_text(path)?;
    let sidecar = read_sidecar_for(path)?;
    parse_results_csv(text.as_bytes(), response_name, sidecar.as_ref())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{full_factorial, levels, pb12_named, randomize_order};
    use crate::fixtures::TABLE3_CSV;

    #[test]
    fn table3_fixture_parses() {
        let data = parse_results_csv(TABLE3_CSV.as_bytes(), "Resp", None).unwrap();
        assert_eq!(data.design().n_runs(), 12);
        assert_eq!(data.design().n_factors(), 6);
        assert_eq!(&data.response()[..2], &[91.5, 85.8]);
        assert_eq!(data.design().factors()[0].label(Level::HIGH), Some("H"));
        assert_eq!(data.design().runs()[0].settings, levels(&[-1, -1, -1, 1, -1, -1]));
    }

    #[test]
    fn canonical_round_trip_is_byte_identical() {
        let data = parse_results_csv(TABLE3_CSV.as_bytes(), "Resp", None).unwrap();
        let canonical = write_results_csv(&data);
        assert!(canonical.starts_with("run_id,X,A,B,C,D,E,Resp\n1,-1,-1,-1,1,-1,-1,91.5\n"));
        let sidecar = DesignSidecar::from_design(data.design());
        let back = parse_results_csv(canonical.as_bytes(), "Resp", Some(&sidecar)).unwrap();
        assert_eq!(back, data);
        assert_eq!(write_results_csv(&back), canonical);
    }

    #[test]
    fn design_round_trip_with_sidecar() {
        let d = randomize_order(&pb12_named(&["X", "A", "B"]).unwrap(), 5);
        let text = write_design_csv(&d);
        let sc = DesignSidecar::from_json(&DesignSidecar::from_design(&d).to_json()).unwrap();
        assert_eq!(read_design_csv(text.as_bytes(), Some(&sc)).unwrap(), d);
    }

    #[test]
    fn labels_are_accepted_on_input() {
        let d = full_factorial(&[
            FactorSpec::two_level("Q").with_label(Level::LOW, "batch1").with_label(Level::HIGH, "batch2"),
        ])
        .unwrap();
        let sc = DesignSidecar::from_design(&d);
        let parsed = read_design_csv("Q\nbatch2\nbatch1\n".as_bytes(), Some(&sc)).unwrap();
        assert_eq!(parsed.runs()[0].settings, levels(&[1]));
    }

    #[test]
    fn parse_errors_carry_coordinates() {
        let err = parse_results_csv("X,Resp\n".as_bytes(), "Resp", None).unwrap_err();
        assert!(err.to_string().contains("no runs"), "{err}");

        let err = parse_results_csv("X,Resp\nL,1.0\nH\n".as_bytes(), "Resp", None).unwrap_err();
        assert!(matches!(err, DoeError::Parse { row: 3, .. }), "{err}");

        let err = parse_results_csv("X,Resp\nL,1.0\nQ,2.0\n".as_bytes(), "Resp", None).unwrap_err();
        match err {
            DoeError::Parse { row, column, .. } => {
                assert_eq!(row, 3);
                assert_eq!(column.as_deref(), Some("X"));
            }
            other => panic!("{other}"),
        }

        let err = parse_results_csv("X,Resp\nL,abc\n".as_bytes(), "Resp", None).unwrap_err();
        assert!(matches!(err, DoeError::Parse { row: 2, .. }));
        assert!(parse_results_csv("X,Y\nL,1\n".as_bytes(), "Resp", None).is_err());
        assert!(parse_results_csv("X,X,Resp\nL,L,1\n".as_bytes(), "Resp", None).is_err());
    }

    #[test]
    fn center_points_infer_three_levels() {
        let d = read_design_csv("T\n-1\n0\n1\n".as_bytes(), None).unwrap();
        assert_eq!(d.factors()[0].levels().len(), 3);
        assert_eq!(d.kind(), DesignKind::Custom);
    }

    #[test]
    fn response_formatting() {
        assert_eq!(format_response(118.0), "118.0");
        assert_eq!(format_response(91.5), "91.5");
        assert_eq!(format_response(0.125), "0.125");
        assert_eq!(sidecar_path(Path::new("out/d.csv")), Path::new("out/d.labels.json"));
    }
}
