//! Figure of merit, analytic baselines and clean-pattern accuracy.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::KnowledgeBase;
use crate::rng::Rng;
use crate::scenario::Scenario;

/// Noisy examples scored per group.
pub const GROUP_SIZE: u32 = 1000;

pub const DEFAULT_GROUPS: u32 = 10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FigureOfMerit {
    /// Correct classifications in each group of [`GROUP_SIZE`] draws.
    pub points: Vec<u32>,
    pub mean: f64,
    /// Sample standard deviation across groups (0 for a single group).
    pub stddev: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Baselines {
    /// Points per 1000 when guessing a goal uniformly.
    pub random: f64,
    /// Points per 1000 when always answering the most likely goal.
    pub majority: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CleanAccuracy {
    pub correct: usize,
    pub total: usize,
    /// `correct / total` over the distinct deep-model patterns.
    pub distinct: f64,
    /// Correct patterns weighted by their final ratio.
    pub weighted: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub seed: u64,
    pub groups: u32,
    pub group_size: u32,
    pub fom_points: Vec<u32>,
    pub fom_mean: f64,
    pub fom_stddev: f64,
    pub baseline_random: f64,
    pub baseline_majority: f64,
    /// Goal names whose clean pattern is classified correctly.
    pub clean_correct: Vec<String>,
    pub clean_accuracy_distinct: f64,
    pub clean_accuracy_weighted: f64,
}

/// Fails unless the knowledge base and scenario have the same shape.
pub fn check_compatible(kb: &KnowledgeBase, s: &Scenario) -> Result<()> {
    if kb.n_inputs() != s.n_inputs() {
        return Err(Error::Mismatch(format!(
            "kb expects {} inputs, scenario has {}",
            kb.n_inputs(),
            s.n_inputs()
        )));
    }
    if kb.m_goals() != s.m_goals() {
        return Err(Error::Mismatch(format!(
            "kb has {} goals, scenario has {}",
            kb.m_goals(),
            s.m_goals()
        )));
    }
    Ok(())
}

/// Scores `groups` groups of noisy draws. Each group runs on its own stream
/// forked from `rng`, so groups are independent of evaluation order.
pub fn figure_of_merit(
    kb: &KnowledgeBase,
    s: &Scenario,
    groups: u32,
    rng: &mut Rng,
) -> Result<FigureOfMerit> {
    check_compatible(kb, s)?;
    if groups == 0 {
        return Err(Error::Mismatch("need at least one group".into()));
    }
    let streams: Vec<Rng> = (0..groups).map(|_| rng.fork()).collect();
    let points: Vec<u32> = streams
        .into_iter()
        .map(|mut r| {
            (0..GROUP_SIZE)
                .filter(|_| {
                    let e = s.sample_noisy(&mut r);
                    kb.winner_bipolar(&e.inputs) == e.true_goal
                })
                .count() as u32
        })
        .collect();
    let (mean, stddev) = mean_and_stddev(&points);
    Ok(FigureOfMerit {
        points,
        mean,
        stddev,
    })
}

fn mean_and_stddev(points: &[u32]) -> (f64, f64) {
    let n = points.len() as f64;
    let mean = points.iter().map(|&p| f64::from(p)).sum::<f64>() / n;
    if points.len() < 2 {
        return (mean, 0.0);
    }
    let var = points
        .iter()
        .map(|&p| (f64::from(p) - mean).powi(2))
        .sum::<f64>()
        / (n - 1.0);
    (mean, var.sqrt())
}

pub fn baselines(s: &Scenario) -> Baselines {
    let best = s.rows().iter().map(|r| r.final_ratio()).max().unwrap_or(0);
    Baselines {
        random: f64::from(GROUP_SIZE) / s.m_goals() as f64,
        majority: f64::from(GROUP_SIZE) * best as f64 / s.total_weight() as f64,
    }
}

pub fn clean_accuracy(kb: &KnowledgeBase, s: &Scenario) -> Result<CleanAccuracy> {
    check_compatible(kb, s)?;
    let hits: Vec<bool> = clean_hits(kb, s);
    let correct = hits.iter().filter(|h| **h).count();
    let weight: u64 = hits
        .iter()
        .enumerate()
        .filter(|(_, h)| **h)
        .map(|(g, _)| s.final_ratio(g))
        .sum();
    Ok(CleanAccuracy {
        correct,
        total: hits.len(),
        distinct: correct as f64 / hits.len() as f64,
        weighted: weight as f64 / s.total_weight() as f64,
    })
}

fn clean_hits(kb: &KnowledgeBase, s: &Scenario) -> Vec<bool> {
    (0..s.m_goals())
        .map(|g| kb.winner_bipolar(&s.clean_example(g).inputs) == g)
        .collect()
}

/// Full report for one knowledge base against one scenario.
pub fn evaluate(kb: &KnowledgeBase, s: &Scenario, groups: u32, seed: u64) -> Result<EvalReport> {
    let mut rng = Rng::seeded(seed);
    let fom = figure_of_merit(kb, s, groups, &mut rng)?;
    let base = baselines(s);
    let clean = clean_accuracy(kb, s)?;
    let clean_correct = clean_hits(kb, s)
        .into_iter()
        .enumerate()
        .filter(|(_, h)| *h)
        .map(|(g, _)| s.goals()[g].name.clone())
        .collect();
    Ok(EvalReport {
        seed,
        groups,
        group_size: GROUP_SIZE,
        fom_points: fom.points,
        fom_mean: fom.mean,
        fom_stddev: fom.stddev,
        baseline_random: base.random,
        baseline_majority: base.majority,
        clean_correct,
        clean_accuracy_distinct: clean.distinct,
        clean_accuracy_weighted: clean.weighted,
    })
}

impl EvalReport {
    /// `fom_mean=<f> baseline_majority=<f> baseline_random=<f>`
    pub fn summary_line(&self) -> String {
        format!(
            "fom_mean={:.1} baseline_majority={:.1} baseline_random={:.1}",
            self.fom_mean, self.baseline_majority, self.baseline_random
        )
    }

    pub fn to_table(&self, goal_count: usize) -> String {
        let mut out = String::new();
        let pts: Vec<String> = self.fom_points.iter().map(u32::to_string).collect();
        let _ = writeln!(out, "figure of merit (per {} draws)", self.group_size);
        let _ = writeln!(out, "  groups            {}", self.groups);
        let _ = writeln!(out, "  points            {}", pts.join(" "));
        let _ = writeln!(
            out,
            "  mean              {:.1} (sd {:.1})",
            self.fom_mean, self.fom_stddev
        );
        let _ = writeln!(out, "baselines");
        let _ = writeln!(out, "  random choice     {:.1}", self.baseline_random);
        let _ = writeln!(out, "  most frequent     {:.1}", self.baseline_majority);
        let _ = writeln!(out, "clean patterns");
        let _ = writeln!(
            out,
            "  distinct          {}/{} = {:.3}",
            self.clean_correct.len(),
            goal_count,
            self.clean_accuracy_distinct
        );
        let _ = writeln!(
            out,
            "  ratio-weighted    {:.3}",
            self.clean_accuracy_weighted
        );
        let _ = writeln!(out, "  correct           {}", self.clean_correct.join(" "));
        out
    }
}
