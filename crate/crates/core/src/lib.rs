//! Factorial and screening designs for experimental quality control.
//!
//! The crate builds coded designs (one-factor-at-a-time, full factorial,
//! 12-run Plackett–Burman), simulates responses from a linear model with
//! interactions, estimates main/interaction/conditional effects, flags the
//! active factors of a screening run, and renders the supporting plots as SVG.
//!
//! ```
//! use factorscreen::{fixtures, screening};
//!
//! let data = fixtures::table3();
//! let report = screening::screen(&data, 1.0 / 3.0).unwrap();
//! assert_eq!(report.active, ["X", "A", "B"]);
//! ```

pub mod design;
pub mod effects;
pub mod error;
pub mod exec;
pub mod fixtures;
pub mod io;
pub mod plot;
mod rng;
pub mod screening;
pub mod simulate;

pub use design::{
    cross_with_factor, full_factorial, ofat_design, pb12_design, pb12_named, project_design,
    randomize_order, validate_design, DesignDiagnostics, DesignKind, DesignMatrix, FactorSpec,
    Level, Run,
};
pub use effects::{
    cell_means, conditional_effect, edge_differences, interaction_effect, main_effect,
    paired_interaction, EffectEstimate, EffectTarget, ExperimentData,
};
pub use error::{DoeError, Result};
pub use exec::Strategy;
pub use rng::SeededRng;
pub use screening::{
    flag_active, main_effects_panels, rank_effects, screen, structured_plot_layout, PanelData,
    ScreeningReport, StructuredLayout,
};
pub use simulate::{seeded_gaussian, simulate_response, SimModel};
