//! Synthetic responses from an intercept-plus-main-effects-plus-two-factor
//! interactions model with seeded Gaussian noise:
//!
//! ```text
//! y = round(intercept + Σ b_f·x_f + Σ c_fg·x_f·x_g + sd·z, decimals)
//! ```
//!
//! `z` are the first `n_runs` variates of [`seeded_gaussian`] for the model
//! seed, assigned to runs in design order. Rounding is half away from zero
//! and happens after the noise is added.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::design::DesignMatrix;
use crate::effects::ExperimentData;
use crate::error::{DoeError, Result};
use crate::exec::Strategy;
pub use crate::rng::seeded_gaussian;

pub const DEFAULT_RESPONSE_NAME: &str = "Resp";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractionTerm {
    pub a: String,
    pub b: String,
    pub coef: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimModel {
    pub intercept: f64,
    #[serde(default)]
    pub main: BTreeMap<String, f64>,
    #[serde(default)]
    pub interactions: Vec<InteractionTerm>,
    #[serde(default)]
    pub sd: f64,
    #[serde(default = "default_round")]
    pub round: u32,
    #[serde(default)]
    pub seed: u64,
}

fn default_round() -> u32 {
    1
}

impl SimModel {
    pub fn new(intercept: f64) -> Self {
        Self {
            intercept,
            main: BTreeMap::new(),
            interactions: Vec::new(),
            sd: 0.0,
            round: 1,
            seed: 0,
        }
    }

    pub fn with_main(mut self, factor: impl Into<String>, coef: f64) -> Self {
        self.main.insert(factor.into(), coef);
        self
    }

    pub fn with_interaction(mut self, a: impl Into<String>, b: impl Into<String>, coef: f64) -> Self {
        self.interactions.push(InteractionTerm {
            a: a.into(),
            b: b.into(),
            coef,
        });
        self
    }

    pub fn with_noise(mut self, sd: f64, seed: u64) -> Self {
        self.sd = sd;
        self.seed = seed;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_rounding(mut self, decimals: u32) -> Self {
        self.round = decimals;
        self
    }

    /// `100 + 10·X + 3·A + 2·B + 3·X·B`, noise sd 3, one decimal.
    pub fn screening_example(seed: u64) -> Self {
        Self::new(100.0)
            .with_main("X", 10.0)
            .with_main("A", 3.0)
            .with_main("B", 2.0)
            .with_interaction("X", "B", 3.0)
            .with_noise(3.0, seed)
            .with_rounding(1)
    }

    fn compile(&self, design: &DesignMatrix) -> Result<Compiled> {
        if !(self.sd.is_finite() && self.sd >= 0.0) {
            return Err(DoeError::validation(format!(
                "noise sd must be finite and >= 0, got {}",
                self.sd
            )));
        }
        if self.round > 15 {
            return Err(DoeError::validation(format!(
                "round must be at most 15 decimals, got {}",
                self.round
            )));
        }
        let coef_ok = |c: f64| {
            c.is_finite()
                .then_some(())
                .ok_or_else(|| DoeError::validation("model coefficients must be finite"))
        };
        coef_ok(self.intercept)?;
        let main = self
            .main
            .iter()
            .map(|(name, &coef)| {
                coef_ok(coef)?;
                Ok((design.factor_index(name)?, coef))
            })
            .collect::<Result<Vec<_>>>()?;
        let interactions = self
            .interactions
            .iter()
            .map(|t| {
                coef_ok(t.coef)?;
                let (a, b) = (design.factor_index(&t.a)?, design.factor_index(&t.b)?);
                if a == b {
                    return Err(DoeError::validation(format!(
                        "interaction of {} with itself",
                        t.a
                    )));
                }
                Ok((a, b, t.coef))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Compiled { main, interactions })
    }
}

struct Compiled {
    main: Vec<(usize, f64)>,
    interactions: Vec<(usize, usize, f64)>,
}

fn round_to(value: f64, decimals: u32) -> f64 {
    let scale = 10f64.powi(decimals as i32);
    (value * scale).round() / scale
}

pub fn simulate_response(design: &DesignMatrix, model: &SimModel) -> Result<ExperimentData> {
    let compiled = model.compile(design)?;
    let noise = seeded_gaussian(model.seed, design.n_runs());
    let response = design
        .runs()
        .iter()
        .zip(noise)
        .map(|(run, z)| {
            let x = |j: usize| run.settings[j].value();
            let mut y = model.intercept;
            for &(j, coef) in &compiled.main {
                y += coef * x(j);
            }
            for &(a, b, coef) in &compiled.interactions {
                y += coef * x(a) * x(b);
            }
            round_to(y + model.sd * z, model.round)
        })
        .collect();
    ExperimentData::new(design.clone(), response, DEFAULT_RESPONSE_NAME)
}

/// Simulates once per seed (overriding the model seed) and applies `measure`
/// to each data set. Results come back in seed order for either strategy.
pub fn replicate<T, F>(
    design: &DesignMatrix,
    model: &SimModel,
    seeds: &[u64],
    strategy: Strategy,
    measure: F,
) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&ExperimentData) -> Result<T> + Sync + Send,
{
    model.compile(design)?;
    strategy.try_map_range(seeds.len(), |i| {
        let data = simulate_response(design, &model.clone().with_seed(seeds[i]))?;
        measure(&data)
    })
}
