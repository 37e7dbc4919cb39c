//! Command-line driver: design generation, randomization, simulation,
//! screening analysis and plotting, chained through CSV/JSON files.
//!
//! Exit codes: 0 on success, 1 on usage or validation errors, 2 on I/O errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use factorscreen::io::{
    load_design, load_results, sidecar_path, write_design_csv, write_results_csv, write_text, DesignSidecar,
};
use factorscreen::plot::{render_design_geometry, render_main_effects, render_structured, PlotConfig};
use factorscreen::screening::DEFAULT_RELATIVE_THRESHOLD;
use factorscreen::simulate::DEFAULT_RESPONSE_NAME;
use factorscreen::{
    cross_with_factor, full_factorial, main_effects_panels, ofat_design, pb12_named, randomize_order, screen,
    simulate_response, structured_plot_layout, validate_design, DesignMatrix, DoeError, FactorSpec, Level,
    SimModel,
};

#[derive(Debug, Parser)]
#[command(name = "factorscreen", version, about = "Factorial and screening designs for experimental quality control")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a design and write it as CSV plus a label sidecar
    #[command(subcommand)]
    Design(DesignCmd),
    /// Permute the run order of a design CSV
    Randomize {
        input: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Simulate responses for a design from a model config JSON
    Simulate {
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        /// Overrides the seed in the model file; required
        #[arg(long)]
        seed: Option<u64>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Rank effects, flag the active factors and write the report
    Analyze {
        input: PathBuf,
        #[arg(long, default_value = DEFAULT_RESPONSE_NAME)]
        response: String,
        #[arg(long, default_value_t = DEFAULT_RELATIVE_THRESHOLD)]
        threshold: f64,
        /// Report JSON path; the text summary goes next to it with a .txt extension
        #[arg(short, long)]
        out: PathBuf,
        #[arg(long)]
        summary: Option<PathBuf>,
    },
    /// Render an SVG figure
    #[command(subcommand)]
    Plot(PlotCmd),
}

#[derive(Debug, Args)]
struct FactorArgs {
    /// Comma-separated factor names
    #[arg(long, value_delimiter = ',', required = true)]
    factors: Vec<String>,
    /// Factors that get a center level (three-level, -1/0/1)
    #[arg(long, value_delimiter = ',')]
    center: Vec<String>,
}

impl FactorArgs {
    fn specs(&self) -> factorscreen::Result<Vec<FactorSpec>> {
        for c in &self.center {
            if !self.factors.contains(c) {
                return Err(DoeError::Validation(format!("--center names unknown factor {c}")));
            }
        }
        Ok(self
            .factors
            .iter()
            .map(|f| {
                if self.center.contains(f) {
                    FactorSpec::three_level(f.as_str())
                } else {
                    FactorSpec::two_level(f.as_str())
                }
            })
            .collect())
    }
}

#[derive(Debug, Subcommand)]
enum DesignCmd {
    /// Every level combination, first factor varying slowest
    Full {
        #[command(flatten)]
        factors: FactorArgs,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Baseline run plus one-factor excursions, optionally crossed with a control factor
    Ofat {
        #[command(flatten)]
        factors: FactorArgs,
        /// Coded baseline, one value per factor (e.g. -1,0)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        baseline: Vec<i8>,
        /// Excursions as NAME=LEVEL (e.g. Q=1,T=-1,T=1)
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        excursions: Vec<String>,
        /// Repeat every run at both levels of this new two-level factor
        #[arg(long)]
        cross: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// 12-run Plackett-Burman screening design (up to 11 factors)
    Pb12 {
        #[arg(long, value_delimiter = ',', required = true)]
        factors: Vec<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
enum PlotCmd {
    /// One panel per factor with level means joined
    MainEffects {
        input: PathBuf,
        #[arg(long, default_value = DEFAULT_RESPONSE_NAME)]
        response: String,
        /// Factor drawn rightmost as the reference panel
        #[arg(long)]
        benchmark: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Four panels of response vs a focal factor, split by two conditioners
    Structured {
        input: PathBuf,
        #[arg(long, default_value = DEFAULT_RESPONSE_NAME)]
        response: String,
        #[arg(long)]
        focal: String,
        #[arg(long, value_delimiter = ',', required = true)]
        conditioners: Vec<String>,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Design points on two squares, one per level of the slice factor
    Geometry {
        input: PathBuf,
        /// Horizontal, vertical and slice factors
        #[arg(long, value_delimiter = ',', required = true)]
        axes: Vec<String>,
        #[arg(long)]
        slice: String,
        #[arg(short, long)]
        out: PathBuf,
    },
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run_cli<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                write!(stdout, "{text}")
            } else {
                write!(stderr, "{text}")
            };
            return code;
        }
    };
    match execute(cli.command) {
        Ok(line) => {
            let _ = writeln!(stdout, "{line}");
            0
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_io() {
                2
            } else {
                1
            }
        }
    }
}

type Outputs = Vec<(PathBuf, String)>;

fn execute(command: Command) -> factorscreen::Result<String> {
    let (outputs, line) = match command {
        Command::Design(cmd) => design(cmd)?,
        Command::Randomize { input, seed, out } => {
            let seed = seed.ok_or_else(|| DoeError::Validation("randomize requires an explicit --seed".into()))?;
            let design = load_design(&input)?;
            let shuffled = randomize_order(&design, seed);
            let line = format!("randomized {} runs with seed {seed} -> {}", shuffled.n_runs(), out.display());
            (design_outputs(&shuffled, &out), line)
        }
        Command::Simulate {
            input,
            model,
            seed,
            out,
        } => {
            let seed = seed.ok_or_else(|| DoeError::Validation("simulate requires an explicit --seed".into()))?;
            let design = load_design(&input)?;
            let text = factorscreen::io::read_text(&model)?;
            let model: SimModel = serde_json::from_str(&text).map_err(|e| DoeError::Parse {
                row: e.line(),
                column: None,
                message: format!("model config: {e}"),
            })?;
            let data = simulate_response(&design, &model.with_seed(seed))?;
            let outputs = vec![
                (out.clone(), write_results_csv(&data)),
                (sidecar_path(&out), DesignSidecar::from_design(data.design()).to_json()),
            ];
            let line = format!("simulated {} responses with seed {seed} -> {}", data.response().len(), out.display());
            (outputs, line)
        }
        Command::Analyze {
            input,
            response,
            threshold,
            out,
            summary,
        } => {
            let data = load_results(&input, &response)?;
            let report = screen(&data, threshold)?;
            let mut json = serde_json::to_string_pretty(&report).expect("report serializes");
            json.push('\n');
            let summary = summary.unwrap_or_else(|| out.with_extension("txt"));
            let line = format!(
                "analyzed {} runs: active [{}], threshold {:.3} -> {}",
                data.response().len(),
                report.active.join(", "),
                report.threshold_used,
                out.display()
            );
            (vec![(out, json), (summary, report.summary_text())], line)
        }
        Command::Plot(cmd) => plot(cmd)?,
    };
    for (path, contents) in &outputs {
        write_text(path, contents)?;
    }
    Ok(line)
}

fn design_outputs(design: &DesignMatrix, out: &Path) -> Outputs {
    vec![
        (out.to_owned(), write_design_csv(design)),
        (sidecar_path(out), DesignSidecar::from_design(design).to_json()),
    ]
}

fn design_line(design: &DesignMatrix, out: &Path) -> String {
    let diag = validate_design(design);
    format!(
        "{} design: {} runs x {} factors, balanced={}, orthogonal={} -> {}",
        design.kind(),
        design.n_runs(),
        design.n_factors(),
        diag.is_balanced(),
        diag.is_orthogonal(),
        out.display()
    )
}

fn parse_excursion(spec: &str, factors: &[FactorSpec]) -> factorscreen::Result<(usize, Level)> {
    let (name, code) = spec
        .split_once('=')
        .ok_or_else(|| DoeError::Validation(format!("excursion {spec:?} is not NAME=LEVEL")))?;
    let index = factors
        .iter()
        .position(|f| f.name() == name.trim())
        .ok_or_else(|| DoeError::Validation(format!("excursion names unknown factor {name}")))?;
    let code: i8 = code
        .trim()
        .trim_start_matches('+')
        .parse()
        .map_err(|_| DoeError::Validation(format!("excursion level {code:?} is not -1, 0 or 1")))?;
    Ok((index, Level::new(code)?))
}

fn design(cmd: DesignCmd) -> factorscreen::Result<(Outputs, String)> {
    let (design, out) = match cmd {
        DesignCmd::Full { factors, out } => (full_factorial(&factors.specs()?)?, out),
        DesignCmd::Ofat {
            factors,
            baseline,
            excursions,
            cross,
            out,
        } => {
            let specs = factors.specs()?;
            let baseline = baseline.into_iter().map(Level::new).collect::<factorscreen::Result<Vec<_>>>()?;
            let excursions = excursions
                .iter()
                .map(|e| parse_excursion(e, &specs))
                .collect::<factorscreen::Result<Vec<_>>>()?;
            let mut design = ofat_design(&specs, &baseline, &excursions)?;
            if let Some(name) = cross {
                design = cross_with_factor(&design, FactorSpec::two_level(name))?;
            }
            (design, out)
        }
        DesignCmd::Pb12 { factors, out } => (pb12_named(&factors)?, out),
    };
    let line = design_line(&design, &out);
    Ok((design_outputs(&design, &out), line))
}

fn plot(cmd: PlotCmd) -> factorscreen::Result<(Outputs, String)> {
    let config = PlotConfig::default();
    let (svg, out, what) = match cmd {
        PlotCmd::MainEffects {
            input,
            response,
            benchmark,
            out,
        } => {
            let data = load_results(&input, &response)?;
            let panels = main_effects_panels(&data);
            let svg = render_main_effects(&panels, &config, benchmark.as_deref())?;
            (svg, out, format!("main-effects plot, {} panels", panels.panels.len()))
        }
        PlotCmd::Structured {
            input,
            response,
            focal,
            conditioners,
            out,
        } => {
            let data = load_results(&input, &response)?;
            let layout = structured_plot_layout(&data, &focal, &conditioners)?;
            let svg = render_structured(&layout, &config)?;
            (svg, out, format!("structured plot of {focal} by {}", conditioners.join(", ")))
        }
        PlotCmd::Geometry {
            input,
            axes,
            slice,
            out,
        } => {
            let design = load_design(&input)?;
            let axes: [&str; 3] = match axes.as_slice() {
                [a, b, c] => [a.as_str(), b.as_str(), c.as_str()],
                _ => return Err(DoeError::Validation(format!("--axes needs 3 factors, got {}", axes.len()))),
            };
            let svg = render_design_geometry(&design, axes, &slice, &config)?;
            (svg, out, format!("design geometry sliced by {slice}"))
        }
    };
    let line = format!("{what} -> {}", out.display());
    Ok((vec![(out, svg)], line))
}
