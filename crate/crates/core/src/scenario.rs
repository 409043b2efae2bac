//! Deep model, noise model and the dynamic noisy-example sampler.
//!
//! A scenario lists, for each goal (failure mode), the readings it affects when
//! there is no noise, how often it occurs and how much it matters. The product
//! of frequency and importance is the goal's sampling weight. Examples are never
//! materialized: each draw picks a goal by weight, encodes its clean pattern and
//! then flips every input independently with that input's noise probability.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::Rng;

/// Per-input flip probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel(Vec<f64>);

impl NoiseModel {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        for (k, &pk) in p.iter().enumerate() {
            if !(0.0..=1.0).contains(&pk) {
                return Err(Error::validation(
                    format!("inputs[{k}].noise"),
                    format!("probability {pk} outside [0, 1]"),
                ));
            }
        }
        Ok(NoiseModel(p))
    }

    pub fn zeros(n: usize) -> Self {
        NoiseModel(vec![0.0; n])
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    /// Probability that a draw comes through with no input flipped.
    pub fn clean_probability(&self) -> f64 {
        self.0.iter().map(|p| 1.0 - p).product()
    }
}

/// A fully specified bipolar input vector and the goal that produced it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Example {
    pub inputs: Vec<i8>,
    pub true_goal: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeepModelRow {
    pub goal: usize,
    pub clean_pattern: Vec<bool>,
    pub frequency: u64,
    pub importance: u64,
}

impl DeepModelRow {
    pub fn final_ratio(&self) -> u64 {
        self.frequency * self.importance
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputSpec {
    pub name: String,
    pub description: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalSpec {
    pub name: String,
    pub description: Option<String>,
}

/// Validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    inputs: Vec<InputSpec>,
    goals: Vec<GoalSpec>,
    rows: Vec<DeepModelRow>,
    noise: NoiseModel,
    total_weight: u64,
}

/// On-disk scenario layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub inputs: Vec<InputEntry>,
    pub goals: Vec<GoalEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GoalEntry {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub frequency: u64,
    pub importance: u64,
    pub pattern: Pattern,
}

/// Clean reading pattern: either one flag per input, or the names of the
/// inputs that read True.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Pattern {
    Names(Vec<String>),
    Flags(Vec<bool>),
}

impl Scenario {
    pub fn from_file(file: ScenarioFile) -> Result<Self> {
        let n = file.inputs.len();
        if n == 0 {
            return Err(Error::validation("inputs", "need at least one input"));
        }
        if file.goals.len() < 2 {
            return Err(Error::validation("goals", "need at least two goals"));
        }
        let mut inputs = Vec::with_capacity(n);
        let mut probs = Vec::with_capacity(n);
        for (k, entry) in file.inputs.into_iter().enumerate() {
            if entry.name.is_empty() {
                return Err(Error::validation(format!("inputs[{k}].name"), "empty name"));
            }
            if inputs.iter().any(|i: &InputSpec| i.name == entry.name) {
                return Err(Error::validation(
                    format!("inputs[{k}].name"),
                    format!("duplicate name {:?}", entry.name),
                ));
            }
            if !(0.0..=1.0).contains(&entry.noise) {
                return Err(Error::validation(
                    format!("inputs[{k}].noise"),
                    format!("probability {} outside [0, 1]", entry.noise),
                ));
            }
            probs.push(entry.noise);
            inputs.push(InputSpec {
                name: entry.name,
                description: entry.description,
            });
        }

        let mut goals = Vec::with_capacity(file.goals.len());
        let mut rows = Vec::with_capacity(file.goals.len());
        let mut total_weight = 0u64;
        for (g, entry) in file.goals.into_iter().enumerate() {
            let path = |field: &str| format!("goals[{g}].{field}");
            if entry.name.is_empty() {
                return Err(Error::validation(path("name"), "empty name"));
            }
            if goals.iter().any(|s: &GoalSpec| s.name == entry.name) {
                return Err(Error::validation(
                    path("name"),
                    format!("duplicate name {:?}", entry.name),
                ));
            }
            if entry.frequency == 0 {
                return Err(Error::validation(
                    path("frequency"),
                    "must be a positive integer",
                ));
            }
            if entry.importance == 0 {
                return Err(Error::validation(
                    path("importance"),
                    "must be a positive integer",
                ));
            }
            let ratio = entry
                .frequency
                .checked_mul(entry.importance)
                .ok_or_else(|| Error::validation(path("importance"), "final ratio overflows"))?;
            total_weight = total_weight
                .checked_add(ratio)
                .ok_or_else(|| Error::validation(path("importance"), "total weight overflows"))?;

            let clean_pattern = match entry.pattern {
                Pattern::Flags(flags) => {
                    if flags.len() != n {
                        return Err(Error::validation(
                            path("pattern"),
                            format!("expected {n} entries, found {}", flags.len()),
                        ));
                    }
                    flags
                }
                Pattern::Names(names) => {
                    let mut flags = vec![false; n];
                    for (i, name) in names.iter().enumerate() {
                        let k = inputs.iter().position(|s| &s.name == name).ok_or_else(|| {
                            Error::validation(
                                format!("goals[{g}].pattern[{i}]"),
                                format!("unknown input variable {name:?}"),
                            )
                        })?;
                        flags[k] = true;
                    }
                    flags
                }
            };
            rows.push(DeepModelRow {
                goal: g,
                clean_pattern,
                frequency: entry.frequency,
                importance: entry.importance,
            });
            goals.push(GoalSpec {
                name: entry.name,
                description: entry.description,
            });
        }

        Ok(Scenario {
            inputs,
            goals,
            rows,
            noise: NoiseModel(probs),
            total_weight,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    /// Back to the on-disk layout, patterns as flag lists.
    pub fn to_file(&self) -> ScenarioFile {
        ScenarioFile {
            inputs: self
                .inputs
                .iter()
                .zip(self.noise.probabilities())
                .map(|(i, &noise)| InputEntry {
                    name: i.name.clone(),
                    description: i.description.clone(),
                    noise,
                })
                .collect(),
            goals: self
                .goals
                .iter()
                .zip(&self.rows)
                .map(|(g, row)| GoalEntry {
                    name: g.name.clone(),
                    description: g.description.clone(),
                    frequency: row.frequency,
                    importance: row.importance,
                    pattern: Pattern::Flags(row.clean_pattern.clone()),
                })
                .collect(),
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn m_goals(&self) -> usize {
        self.goals.len()
    }

    pub fn inputs(&self) -> &[InputSpec] {
        &self.inputs
    }

    pub fn goals(&self) -> &[GoalSpec] {
        &self.goals
    }

    pub fn input_names(&self) -> Vec<String> {
        self.inputs.iter().map(|i| i.name.clone()).collect()
    }

    pub fn goal_names(&self) -> Vec<String> {
        self.goals.iter().map(|g| g.name.clone()).collect()
    }

    pub fn rows(&self) -> &[DeepModelRow] {
        &self.rows
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn total_weight(&self) -> u64 {
        self.total_weight
    }

    pub fn final_ratio(&self, goal: usize) -> u64 {
        self.rows[goal].final_ratio()
    }

    /// Noise-free example for `goal`.
    pub fn clean_example(&self, goal: usize) -> Example {
        Example {
            inputs: self.rows[goal]
                .clean_pattern
                .iter()
                .map(|&b| if b { 1 } else { -1 })
                .collect(),
            true_goal: goal,
        }
    }

    /// Picks a goal with probability `final_ratio / total_weight`. Consumes one draw.
    pub fn sample_goal(&self, rng: &mut Rng) -> usize {
        let mut ticket = rng.below(self.total_weight);
        for row in &self.rows {
            let r = row.final_ratio();
            if ticket < r {
                return row.goal;
            }
            ticket -= r;
        }
        unreachable!("ticket below total weight")
    }

    pub fn sample_clean(&self, rng: &mut Rng) -> Example {
        self.clean_example(self.sample_goal(rng))
    }

    pub fn sample_noisy(&self, rng: &mut Rng) -> Example {
        let e = self.sample_clean(rng);
        inject_noise(e, &self.noise, rng)
    }
}

/// Flips each input independently with its own probability. Always consumes
/// exactly one draw per input; the goal is never touched.
pub fn inject_noise(mut e: Example, noise: &NoiseModel, rng: &mut Rng) -> Example {
    for (x, &p) in e.inputs.iter_mut().zip(noise.probabilities()) {
        if rng.unit() < p {
            *x = -*x;
        }
    }
    e
}
