//! Matrix controlled inference: forward chaining by dominance, backward chaining
//! to pick the next question, and IF-THEN justification of eliminations.
//!
//! Goal `i` dominates goal `j` when the gap between their current sums exceeds
//! the largest swing the unknown inputs could still produce in that gap,
//! `sum_k |w[i][k] - w[j][k]|` over the unknown inputs. A dominated goal can never
//! fire whatever the unknowns turn out to be, so it is eliminated. Unavailable
//! inputs still count as unknown for the bound since their real value is ±1.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{argmax, Assignment, KnowledgeBase, TruthValue};

/// Largest change the `unknowns` can make to `sum_i - sum_j`.
pub fn dominance_bound(
    kb: &KnowledgeBase,
    i: usize,
    j: usize,
    unknowns: impl IntoIterator<Item = usize>,
) -> i64 {
    unknowns
        .into_iter()
        .map(|k| (kb.weight(i, k) - kb.weight(j, k)).abs())
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Elimination {
    pub goal: usize,
    pub dominator: usize,
    pub gap: i64,
    pub bound: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Answered { variable: usize, value: TruthValue },
    Eliminated(Elimination),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "index", rename_all = "snake_case")]
pub enum Verdict {
    /// Exactly this goal can fire, whatever the unknowns are.
    Concluded(usize),
    /// Ask for this input next.
    NeedsInput(usize),
    /// Nothing left to ask; best guess from the current sums.
    Unconfirmed(usize),
}

impl Verdict {
    pub fn status(&self) -> &'static str {
        match self {
            Verdict::Concluded(_) => "concluded",
            Verdict::NeedsInput(_) => "needs_input",
            Verdict::Unconfirmed(_) => "unconfirmed",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Literal {
    pub variable: usize,
    pub value: bool,
}

/// `IF literals THEN not rival`, with the goal whose dominance backs it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Rule {
    pub rival: usize,
    pub dominator: usize,
    pub literals: Vec<Literal>,
}

impl Rule {
    pub fn display<'a>(&'a self, kb: &'a KnowledgeBase) -> RuleDisplay<'a> {
        RuleDisplay { rule: self, kb }
    }
}

pub struct RuleDisplay<'a> {
    rule: &'a Rule,
    kb: &'a KnowledgeBase,
}

impl fmt::Display for RuleDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let conds: Vec<String> = self
            .rule
            .literals
            .iter()
            .map(|l| {
                format!(
                    "{}={}",
                    self.kb.input_name(l.variable),
                    TruthValue::from_bool(l.value)
                )
            })
            .collect();
        let cond = if conds.is_empty() {
            "nothing else is known".to_string()
        } else {
            conds.join(" AND ")
        };
        write!(
            f,
            "IF {cond} THEN not {} (because {})",
            self.kb.goal_name(self.rule.rival),
            self.kb.goal_name(self.rule.dominator)
        )
    }
}

/// Conclusion plus one rule per eliminated rival.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Justification {
    pub concluded: Option<usize>,
    pub rules: Vec<Rule>,
}

/// One consultation against a shared knowledge base.
#[derive(Debug, Clone)]
pub struct Session {
    kb: Arc<KnowledgeBase>,
    assignment: Assignment,
    viable: Vec<bool>,
    eliminations: Vec<Elimination>,
    transcript: Vec<Event>,
}

impl Session {
    pub fn new(kb: Arc<KnowledgeBase>) -> Self {
        let n = kb.n_inputs();
        let m = kb.m_goals();
        let mut s = Session {
            kb,
            assignment: Assignment::unknown(n),
            viable: vec![true; m],
            eliminations: Vec::new(),
            transcript: Vec::new(),
        };
        s.eliminate();
        s
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn assignment(&self) -> &Assignment {
        &self.assignment
    }

    pub fn transcript(&self) -> &[Event] {
        &self.transcript
    }

    pub fn eliminations(&self) -> &[Elimination] {
        &self.eliminations
    }

    pub fn is_viable(&self, g: usize) -> bool {
        self.viable[g]
    }

    pub fn viable(&self) -> Vec<usize> {
        self.viable
            .iter()
            .enumerate()
            .filter(|(_, v)| **v)
            .map(|(g, _)| g)
            .collect()
    }

    /// Current weighted sums of every goal.
    pub fn sums(&self) -> Vec<i64> {
        self.kb.sums(&self.assignment)
    }

    /// Removes every dominated goal, repeating until nothing changes.
    /// Returns the goals eliminated by this call.
    pub fn eliminate(&mut self) -> Vec<usize> {
        let unknowns: Vec<usize> = self.assignment.unknown_indices().collect();
        let all_known = unknowns.is_empty();
        let sums = self.sums();
        let mut removed = Vec::new();
        loop {
            let mut changed = false;
            for j in 0..self.viable.len() {
                if !self.viable[j] {
                    continue;
                }
                let mut best: Option<(i64, usize, i64, i64)> = None;
                for i in (0..self.viable.len()).filter(|&i| i != j && self.viable[i]) {
                    let gap = sums[i] - sums[j];
                    let bound = dominance_bound(&self.kb, i, j, unknowns.iter().copied());
                    let slack = gap - bound;
                    // With every input known, a tie goes to the lower index.
                    let dominated = slack > 0 || (all_known && slack == 0 && i < j);
                    if dominated && best.is_none_or(|(s, ..)| slack > s) {
                        best = Some((slack, i, gap, bound));
                    }
                }
                if let Some((_, i, gap, bound)) = best {
                    self.viable[j] = false;
                    let e = Elimination {
                        goal: j,
                        dominator: i,
                        gap,
                        bound,
                    };
                    self.eliminations.push(e);
                    self.transcript.push(Event::Eliminated(e));
                    removed.push(j);
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        removed
    }

    /// Unknown (not unavailable) input with the widest weight spread across
    /// the viable goals; lowest index on ties.
    pub fn next_question(&self) -> Option<usize> {
        let viable = self.viable();
        if viable.len() < 2 {
            return None;
        }
        let mut best: Option<(i64, usize)> = None;
        for k in 0..self.kb.n_inputs() {
            if self.assignment.get(k) != TruthValue::Unknown {
                continue;
            }
            let ws = viable.iter().map(|&g| self.kb.weight(g, k));
            let score = ws.clone().max().unwrap() - ws.min().unwrap();
            if best.is_none_or(|(s, _)| score > s) {
                best = Some((score, k));
            }
        }
        best.map(|(_, k)| k)
    }

    /// A viable goal that no completion of the unknowns can unseat.
    fn settled_winner(&self, viable: &[usize]) -> Option<usize> {
        let unknowns: Vec<usize> = self.assignment.unknown_indices().collect();
        let sums = self.sums();
        viable.iter().copied().find(|&i| {
            viable.iter().all(|&j| {
                if i == j {
                    return true;
                }
                let slack =
                    sums[i] - sums[j] - dominance_bound(&self.kb, i, j, unknowns.iter().copied());
                slack > 0 || (slack == 0 && i < j)
            })
        })
    }

    pub fn verdict(&self) -> Verdict {
        let viable = self.viable();
        if viable.len() == 1 {
            return Verdict::Concluded(viable[0]);
        }
        if let Some(g) = self.settled_winner(&viable) {
            return Verdict::Concluded(g);
        }
        match self.next_question() {
            Some(k) => Verdict::NeedsInput(k),
            None => {
                let sums = self.sums();
                Verdict::Unconfirmed(viable[argmax(viable.iter().map(|&g| sums[g]))])
            }
        }
    }

    /// Records a value for an input that is still Unknown and re-runs elimination.
    pub fn answer(&mut self, variable: usize, value: TruthValue) -> Result<Verdict> {
        let n = self.kb.n_inputs();
        if variable >= n {
            return Err(Error::Index {
                kind: "input",
                index: variable,
                len: n,
            });
        }
        if value == TruthValue::Unknown {
            return Err(Error::State(
                "an answer must be true, false or unavailable".into(),
            ));
        }
        let current = self.assignment.get(variable);
        if current != TruthValue::Unknown {
            return Err(Error::State(format!(
                "{} is already {}",
                self.kb.input_name(variable),
                current
            )));
        }
        self.assignment.set(variable, value);
        self.transcript.push(Event::Answered { variable, value });
        self.eliminate();
        Ok(self.verdict())
    }

    /// Shortest greedy conjunction of known inputs that, on its own, still
    /// eliminates `rival` through the goal that eliminated it.
    pub fn justify(&self, rival: usize) -> Result<Rule> {
        let elim = self
            .eliminations
            .iter()
            .find(|e| e.goal == rival)
            .ok_or_else(|| {
                Error::State(format!(
                    "{} has not been eliminated",
                    self.kb.goal_name(rival)
                ))
            })?;
        let i = elim.dominator;
        let kb = &self.kb;
        let n = kb.n_inputs();
        let diff = |k: usize| kb.weight(i, k) - kb.weight(rival, k);

        let mut known: Vec<(usize, bool)> = (0..n)
            .filter_map(|k| self.assignment.get(k).as_bool().map(|b| (k, b)))
            .collect();
        let bipolar = |b: bool| if b { 1 } else { -1 };
        // Making input k known moves the gap by diff*value and shrinks the bound by |diff|.
        let gain = |&(k, b): &(usize, bool)| diff(k) * bipolar(b) + diff(k).abs();
        known.sort_by(|a, b| gain(b).cmp(&gain(a)).then(a.0.cmp(&b.0)));

        let mut gap = kb.bias(i) - kb.bias(rival);
        let mut bound: i64 = (0..n).map(|k| diff(k).abs()).sum();
        let mut literals = Vec::new();
        let holds = |gap: i64, bound: i64, used: usize| {
            let slack = gap - bound;
            slack > 0 || (used == n && slack == 0 && i < rival)
        };
        let mut pending = known.iter();
        while !holds(gap, bound, literals.len()) {
            let Some(&(k, b)) = pending.next() else {
                return Err(Error::State(format!(
                    "known inputs no longer eliminate {}",
                    kb.goal_name(rival)
                )));
            };
            gap += diff(k) * bipolar(b);
            bound -= diff(k).abs();
            literals.push(Literal {
                variable: k,
                value: b,
            });
        }
        Ok(Rule {
            rival,
            dominator: i,
            literals,
        })
    }

    /// Rules for every eliminated goal, with the conclusion if there is one.
    pub fn explain(&self) -> Result<Justification> {
        let concluded = match self.verdict() {
            Verdict::Concluded(g) => Some(g),
            _ => None,
        };
        let rules = self
            .eliminations
            .iter()
            .map(|e| self.justify(e.goal))
            .collect::<Result<Vec<_>>>()?;
        Ok(Justification { concluded, rules })
    }
}
