//! Learning matrix, variables and the winner-take-all primitives.
//!
//! A [`KnowledgeBase`] is one integer weight row per choice cell (goal). Column 0 of
//! each row is the bias; column `k + 1` weighs input `k`. Inputs are bipolar:
//! True is `+1`, False is `-1`, and an unknown or unavailable reading contributes 0.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

/// Current value of an input variable during a consultation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TruthValue {
    True,
    False,
    /// Not known yet; may still be asked.
    Unknown,
    /// Not known and cannot be obtained; never asked again.
    Unavailable,
}

impl TruthValue {
    pub fn encode(self) -> i64 {
        match self {
            TruthValue::True => 1,
            TruthValue::False => -1,
            TruthValue::Unknown | TruthValue::Unavailable => 0,
        }
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            TruthValue::True
        } else {
            TruthValue::False
        }
    }

    /// `Some(bool)` for True/False, `None` otherwise.
    pub fn as_bool(self) -> Option<bool> {
        match self {
            TruthValue::True => Some(true),
            TruthValue::False => Some(false),
            _ => None,
        }
    }

    pub fn is_known(self) -> bool {
        self.as_bool().is_some()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            TruthValue::True => "true",
            TruthValue::False => "false",
            TruthValue::Unknown => "unknown",
            TruthValue::Unavailable => "unavailable",
        }
    }
}

impl fmt::Display for TruthValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TruthValue::True => "True",
            TruthValue::False => "False",
            TruthValue::Unknown => "Unknown",
            TruthValue::Unavailable => "Unavailable",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for TruthValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "true" | "t" => Ok(TruthValue::True),
            "false" | "f" => Ok(TruthValue::False),
            "unknown" | "?" => Ok(TruthValue::Unknown),
            "unavailable" | "u" => Ok(TruthValue::Unavailable),
            other => Err(Error::Parse(format!("unrecognized truth value {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VariableKind {
    Input,
    Goal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableSpec {
    pub id: usize,
    pub name: String,
    pub kind: VariableKind,
}

/// Values of the input variables, in input order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment(Vec<TruthValue>);

impl Assignment {
    /// All inputs unknown.
    pub fn unknown(n_inputs: usize) -> Self {
        Assignment(vec![TruthValue::Unknown; n_inputs])
    }

    pub fn from_values(values: Vec<TruthValue>) -> Self {
        Assignment(values)
    }

    pub fn from_bools(values: &[bool]) -> Self {
        Assignment(values.iter().copied().map(TruthValue::from_bool).collect())
    }

    pub fn from_bipolar(values: &[i8]) -> Self {
        Assignment(
            values
                .iter()
                .map(|&v| TruthValue::from_bool(v > 0))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, k: usize) -> TruthValue {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, v: TruthValue) {
        self.0[k] = v;
    }

    pub fn values(&self) -> &[TruthValue] {
        &self.0
    }

    /// Inputs whose value is Unknown or Unavailable.
    pub fn unknown_indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_known())
            .map(|(k, _)| k)
    }
}

/// The learning matrix together with its variable names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KnowledgeBase {
    inputs: Vec<String>,
    goals: Vec<String>,
    /// Row-major, `goals.len()` rows of `inputs.len() + 1` columns.
    weights: Vec<i64>,
}

impl KnowledgeBase {
    /// Builds a knowledge base from per-goal rows `[bias, w1, ..., wn]`.
    pub fn new(inputs: Vec<String>, goals: Vec<String>, rows: Vec<Vec<i64>>) -> Result<Self> {
        check_names("input", &inputs)?;
        check_names("goal", &goals)?;
        if goals.len() < 2 {
            return Err(Error::Parse(format!(
                "need at least 2 goals, found {}",
                goals.len()
            )));
        }
        if rows.len() != goals.len() {
            return Err(Error::Parse(format!(
                "expected {} rows, found {}",
                goals.len(),
                rows.len()
            )));
        }
        let cols = inputs.len() + 1;
        let mut weights = Vec::with_capacity(cols * rows.len());
        for (g, row) in rows.into_iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row {} ({}): expected {} columns, found {}",
                    g + 1,
                    goals[g],
                    cols,
                    row.len()
                )));
            }
            weights.extend(row);
        }
        Ok(KnowledgeBase {
            inputs,
            goals,
            weights,
        })
    }

    /// All-zero matrix.
    pub fn zeros(inputs: Vec<String>, goals: Vec<String>) -> Result<Self> {
        let rows = vec![vec![0; inputs.len() + 1]; goals.len()];
        Self::new(inputs, goals, rows)
    }

    pub fn n_inputs(&self) -> usize {
        self.inputs.len()
    }

    pub fn m_goals(&self) -> usize {
        self.goals.len()
    }

    pub fn columns(&self) -> usize {
        self.inputs.len() + 1
    }

    pub fn input_names(&self) -> &[String] {
        &self.inputs
    }

    pub fn goal_names(&self) -> &[String] {
        &self.goals
    }

    pub fn input_name(&self, k: usize) -> &str {
        &self.inputs[k]
    }

    pub fn goal_name(&self, g: usize) -> &str {
        &self.goals[g]
    }

    pub fn input_index(&self, name: &str) -> Option<usize> {
        self.inputs.iter().position(|n| n == name)
    }

    pub fn goal_index(&self, name: &str) -> Option<usize> {
        self.goals.iter().position(|n| n == name)
    }

    pub fn variables(&self) -> Vec<VariableSpec> {
        let inputs = self
            .inputs
            .iter()
            .enumerate()
            .map(|(id, name)| VariableSpec {
                id,
                name: name.clone(),
                kind: VariableKind::Input,
            });
        let goals = self
            .goals
            .iter()
            .enumerate()
            .map(|(id, name)| VariableSpec {
                id,
                name: name.clone(),
                kind: VariableKind::Goal,
            });
        inputs.chain(goals).collect()
    }

    /// Row `g` as `[bias, w1, ..., wn]`.
    pub fn row(&self, g: usize) -> &[i64] {
        let c = self.columns();
        &self.weights[g * c..(g + 1) * c]
    }

    pub(crate) fn row_mut(&mut self, g: usize) -> &mut [i64] {
        let c = self.columns();
        &mut self.weights[g * c..(g + 1) * c]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i64]> {
        self.weights.chunks(self.columns())
    }

    pub fn bias(&self, g: usize) -> i64 {
        self.row(g)[0]
    }

    /// Weight of input `k` in row `g`.
    pub fn weight(&self, g: usize, k: usize) -> i64 {
        self.row(g)[k + 1]
    }

    /// Bias plus the weighted contribution of every known input.
    pub fn weighted_sum(&self, cell: usize, a: &Assignment) -> Result<i64> {
        if cell >= self.m_goals() {
            return Err(Error::Index {
                kind: "goal",
                index: cell,
                len: self.m_goals(),
            });
        }
        if a.len() != self.n_inputs() {
            return Err(Error::Mismatch(format!(
                "assignment has {} inputs, knowledge base expects {}",
                a.len(),
                self.n_inputs()
            )));
        }
        Ok(self.sum_assigned(cell, a))
    }

    pub(crate) fn sum_assigned(&self, cell: usize, a: &Assignment) -> i64 {
        let row = self.row(cell);
        row[0]
            + row[1..]
                .iter()
                .zip(a.values())
                .map(|(w, v)| w * v.encode())
                .sum::<i64>()
    }

    /// Weighted sum for a fully specified bipolar input vector.
    pub fn sum_bipolar(&self, cell: usize, inputs: &[i8]) -> i64 {
        let row = self.row(cell);
        row[0]
            + row[1..]
                .iter()
                .zip(inputs)
                .map(|(w, &x)| w * i64::from(x))
                .sum::<i64>()
    }

    /// Weighted sums of every cell.
    pub fn sums(&self, a: &Assignment) -> Vec<i64> {
        (0..self.m_goals())
            .map(|g| self.sum_assigned(g, a))
            .collect()
    }

    /// The cell that fires: highest weighted sum, ties to the lowest goal index.
    pub fn winner(&self, a: &Assignment) -> usize {
        argmax((0..self.m_goals()).map(|g| self.sum_assigned(g, a)))
    }

    pub fn winner_bipolar(&self, inputs: &[i8]) -> usize {
        argmax((0..self.m_goals()).map(|g| self.sum_bipolar(g, inputs)))
    }

    /// Every weight multiplied by `factor`.
    pub fn scaled(&self, factor: i64) -> Self {
        KnowledgeBase {
            inputs: self.inputs.clone(),
            goals: self.goals.clone(),
            weights: self.weights.iter().map(|w| w * factor).collect(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: KbFile = serde_json::from_str(text)?;
        let cols = file.inputs.len() + 1;
        let mut rows = Vec::with_capacity(file.weights.len());
        for (r, row) in file.weights.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::Parse(format!(
                    "row {}: expected {} columns, found {}",
                    r + 1,
                    cols,
                    row.len()
                )));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(c, v)| {
                    v.as_i64().ok_or_else(|| {
                        Error::Parse(format!(
                            "row {}, column {}: weight {} is not an integer",
                            r + 1,
                            c,
                            v
                        ))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(parsed);
        }
        Self::new(file.inputs, file.goals, rows)
    }

    /// Canonical JSON text: fixed key order, one matrix row per line.
    pub fn to_json(&self) -> String {
        let names = |v: &[String]| {
            v.iter()
                .map(|s| serde_json::to_string(s).expect("string serializes"))
                .collect::<Vec<_>>()
                .join(", ")
        };
        let mut out = String::new();
        out.push_str("{\n");
        out.push_str(&format!("  \"inputs\": [{}],\n", names(&self.inputs)));
        out.push_str(&format!("  \"goals\": [{}],\n", names(&self.goals)));
        out.push_str("  \"weights\": [\n");
        let rows: Vec<String> = self
            .rows()
            .map(|row| {
                let cells: Vec<String> = row.iter().map(i64::to_string).collect();
                format!("    [{}]", cells.join(", "))
            })
            .collect();
        out.push_str(&rows.join(",\n"));
        out.push_str("\n  ]\n}\n");
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_json())?;
        Ok(())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct KbFile {
    inputs: Vec<String>,
    goals: Vec<String>,
    weights: Vec<Vec<Value>>,
}

fn check_names(kind: &str, names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::Parse(format!("need at least one {kind}")));
    }
    for (i, name) in names.iter().enumerate() {
        if name.is_empty() {
            return Err(Error::Parse(format!("{kind} {} has an empty name", i + 1)));
        }
        if names[..i].contains(name) {
            return Err(Error::Parse(format!("duplicate {kind} name {name:?}")));
        }
    }
    Ok(())
}

/// Index of the maximum, first occurrence on ties.
pub(crate) fn argmax(values: impl Iterator<Item = i64>) -> usize {
    let mut best = 0;
    let mut best_val = i64::MIN;
    for (i, v) in values.enumerate() {
        if v > best_val {
            best = i;
            best_val = v;
        }
    }
    best
}
