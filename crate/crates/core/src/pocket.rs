//! Pocket training for a winner-take-all choice group.
//!
//! Each step presents one example. If the firing cell `i` is not the true goal
//! `j`, row `i` loses `(1, x)` and row `j` gains it; the bias acts as a weight on
//! a constant `+1` input. A run of consecutive correct responses is tracked for
//! the group as a whole, and whenever the run beats the longest run seen so far
//! the entire matrix is copied into the pocket.

use std::num::NonZeroU64;

use crate::error::Result;
use crate::model::KnowledgeBase;
use crate::rng::Rng;
use crate::scenario::{Example, Scenario};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrainerConfig {
    pub iterations: NonZeroU64,
    pub seed: u64,
    /// Draw noisy examples (`true`) or clean deep-model examples (`false`).
    pub noise: bool,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        TrainerConfig {
            iterations: NonZeroU64::new(10_000).unwrap(),
            seed: 1,
            noise: true,
        }
    }
}

/// One perceptron step on the choice group. Returns whether the example was
/// already classified correctly (in which case nothing changes).
pub fn perceptron_step(current: &mut KnowledgeBase, e: &Example) -> bool {
    let fired = current.winner_bipolar(&e.inputs);
    if fired == e.true_goal {
        return true;
    }
    apply_update(current.row_mut(fired), &e.inputs, -1);
    apply_update(current.row_mut(e.true_goal), &e.inputs, 1);
    false
}

fn apply_update(row: &mut [i64], inputs: &[i8], sign: i64) {
    row[0] += sign;
    for (w, &x) in row[1..].iter_mut().zip(inputs) {
        *w += sign * i64::from(x);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    pub correct: bool,
    pub pocket_replaced: bool,
}

/// Current and pocketed matrices plus the run bookkeeping.
#[derive(Debug, Clone)]
pub struct PocketState {
    current: KnowledgeBase,
    pocket: KnowledgeBase,
    current_run: u64,
    best_run: u64,
    /// `current` has not changed since it was last copied into the pocket.
    in_sync: bool,
    steps: u64,
    mistakes: u64,
    replacements: u64,
}

impl PocketState {
    /// Starts from the all-zero matrix.
    pub fn new(inputs: Vec<String>, goals: Vec<String>) -> Result<Self> {
        let zeros = KnowledgeBase::zeros(inputs, goals)?;
        Ok(PocketState {
            current: zeros.clone(),
            pocket: zeros,
            current_run: 0,
            best_run: 0,
            in_sync: true,
            steps: 0,
            mistakes: 0,
            replacements: 0,
        })
    }

    pub fn step(&mut self, e: &Example) -> StepOutcome {
        self.steps += 1;
        let correct = perceptron_step(&mut self.current, e);
        let mut pocket_replaced = false;
        if correct {
            self.current_run += 1;
            if self.current_run > self.best_run {
                self.best_run = self.current_run;
                if !self.in_sync {
                    self.pocket.clone_from(&self.current);
                    self.in_sync = true;
                    self.replacements += 1;
                    pocket_replaced = true;
                }
            }
        } else {
            self.current_run = 0;
            self.in_sync = false;
            self.mistakes += 1;
        }
        StepOutcome {
            correct,
            pocket_replaced,
        }
    }

    pub fn current(&self) -> &KnowledgeBase {
        &self.current
    }

    pub fn pocket(&self) -> &KnowledgeBase {
        &self.pocket
    }

    pub fn current_run(&self) -> u64 {
        self.current_run
    }

    pub fn best_run(&self) -> u64 {
        self.best_run
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn mistakes(&self) -> u64 {
        self.mistakes
    }

    /// Times the pocket received a matrix different from the one it held.
    pub fn replacements(&self) -> u64 {
        self.replacements
    }

    pub fn into_pocket(self) -> KnowledgeBase {
        self.pocket
    }
}

#[derive(Debug, Clone)]
pub struct Trained {
    pub knowledge_base: KnowledgeBase,
    pub best_run: u64,
    pub mistakes: u64,
    pub replacements: u64,
}

/// Runs the pocket algorithm on examples drawn from the scenario.
pub fn train(scenario: &Scenario, cfg: &TrainerConfig) -> Trained {
    let mut rng = Rng::seeded(cfg.seed);
    let mut state = PocketState::new(scenario.input_names(), scenario.goal_names())
        .expect("validated scenario has valid names");
    for _ in 0..cfg.iterations.get() {
        let e = if cfg.noise {
            scenario.sample_noisy(&mut rng)
        } else {
            scenario.sample_clean(&mut rng)
        };
        state.step(&e);
    }
    Trained {
        best_run: state.best_run(),
        mistakes: state.mistakes(),
        replacements: state.replacements(),
        knowledge_base: state.into_pocket(),
    }
}
