//! Worked-example data: the constructed 12-run screening results and the
//! two 8-run designs of the two-factor-plus-control example.

use crate::design::{levels, DesignKind, DesignMatrix, FactorSpec, Level, Run};
use crate::effects::ExperimentData;
use crate::io::parse_results_csv;

/// The 12-run screening results with `L`/`H` level tokens.
pub const TABLE3_CSV: &str = include_str!("../fixtures/table3.csv");

pub fn table3() -> ExperimentData {
    parse_results_csv(TABLE3_CSV.as_bytes(), "Resp", None).expect("bundled fixture parses")
}

fn example_factors() -> Vec<FactorSpec> {
    vec![
        FactorSpec::two_level("M").with_labels([(Level::LOW, "-"), (Level::HIGH, "+")]),
        FactorSpec::two_level("Q").with_labels([(Level::LOW, "1"), (Level::HIGH, "2")]),
        FactorSpec::three_level("T").with_labels([
            (Level::LOW, "-"),
            (Level::CENTER, "0"),
            (Level::HIGH, "+"),
        ]),
    ]
}

fn rows(first_id: u32, codes: &[[i8; 3]]) -> Vec<Run> {
    codes
        .iter()
        .zip(first_id..)
        .map(|(c, id)| Run::new(id, levels(c)))
        .collect()
}

/// OFAT settings over (M, Q batch, temperature), run IDs 1–8.
pub fn table1_design() -> DesignMatrix {
    let codes = [
        [1, -1, 0],
        [1, 1, 0],
        [1, -1, -1],
        [1, -1, 1],
        [-1, -1, 0],
        [-1, 1, 0],
        [-1, -1, -1],
        [-1, -1, 1],
    ];
    DesignMatrix::new(example_factors(), rows(1, &codes), DesignKind::Ofat).expect("valid fixture")
}

/// Factorial settings over (M, Q batch, temperature), run IDs 9–16.
pub fn table2_design() -> DesignMatrix {
    let codes = [
        [1, -1, -1],
        [1, 1, -1],
        [1, -1, 1],
        [1, 1, 1],
        [-1, -1, -1],
        [-1, 1, -1],
        [-1, -1, 1],
        [-1, 1, 1],
    ];
    let mut factors = example_factors();
    factors[2] = FactorSpec::two_level("T").with_labels([(Level::LOW, "-"), (Level::HIGH, "+")]);
    DesignMatrix::new(factors, rows(9, &codes), DesignKind::FullFactorial).expect("valid fixture")
}
