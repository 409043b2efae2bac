//! Terminal consultation loop.

use std::io::{self, BufRead, Write};
use std::sync::Arc;

use macie_core::{KnowledgeBase, Session, TruthValue, Verdict};

/// How a consultation ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Finished(Verdict),
    Quit,
}

enum Command {
    Answer(TruthValue),
    Why(Option<String>),
    Quit,
}

fn parse(line: &str) -> Option<Command> {
    let mut words = line.split_whitespace();
    let head = words.next()?.to_ascii_lowercase();
    match head.as_str() {
        "t" | "true" | "y" | "yes" => Some(Command::Answer(TruthValue::True)),
        "f" | "false" | "n" | "no" => Some(Command::Answer(TruthValue::False)),
        "u" | "unavailable" => Some(Command::Answer(TruthValue::Unavailable)),
        "why" => Some(Command::Why(words.next().map(str::to_string))),
        "q" | "quit" | "exit" => Some(Command::Quit),
        _ => None,
    }
}

fn print_state<W: Write>(s: &Session, out: &mut W) -> io::Result<()> {
    let sums = s.sums();
    let kb = s.kb();
    let viable: Vec<String> = s
        .viable()
        .into_iter()
        .map(|g| format!("{}({})", kb.goal_name(g), sums[g]))
        .collect();
    writeln!(out, "viable: {}", viable.join(" "))
}

fn print_rules<W: Write>(s: &Session, goal: Option<&str>, out: &mut W) -> io::Result<()> {
    let kb = s.kb();
    let targets: Vec<usize> = match goal {
        Some(name) => match kb.goal_index(name) {
            Some(g) => vec![g],
            None => {
                writeln!(out, "no goal named {name}")?;
                return Ok(());
            }
        },
        None => s.eliminations().iter().map(|e| e.goal).collect(),
    };
    if targets.is_empty() {
        writeln!(out, "nothing has been ruled out yet")?;
    }
    for g in targets {
        match s.justify(g) {
            Ok(rule) => writeln!(out, "{}", rule.display(kb))?,
            Err(e) => writeln!(out, "{e}")?,
        }
    }
    Ok(())
}

/// Runs a consultation, reading answers line by line from `input`.
pub fn run<R: BufRead, W: Write>(
    kb: Arc<KnowledgeBase>,
    known: &[(usize, TruthValue)],
    input: R,
    out: &mut W,
) -> anyhow::Result<Outcome> {
    let mut s = Session::new(kb);
    for &(k, v) in known {
        s.answer(k, v)?;
    }
    let mut lines = input.lines();
    loop {
        print_state(&s, out)?;
        let verdict = s.verdict();
        let k = match verdict {
            Verdict::Concluded(g) => {
                writeln!(out, "Concluded: {}", s.kb().goal_name(g))?;
                print_rules(&s, None, out)?;
                return Ok(Outcome::Finished(verdict));
            }
            Verdict::Unconfirmed(g) => {
                writeln!(
                    out,
                    "Unconfirmed best guess: {} (no further information available)",
                    s.kb().goal_name(g)
                )?;
                print_rules(&s, None, out)?;
                return Ok(Outcome::Finished(verdict));
            }
            Verdict::NeedsInput(k) => k,
        };
        loop {
            write!(out, "{}? [t/f/u/why/quit] ", s.kb().input_name(k))?;
            out.flush()?;
            let Some(line) = lines.next() else {
                writeln!(out)?;
                return Ok(Outcome::Quit);
            };
            match parse(&line?) {
                Some(Command::Answer(v)) => {
                    s.answer(k, v)?;
                    break;
                }
                Some(Command::Why(goal)) => print_rules(&s, goal.as_deref(), out)?,
                Some(Command::Quit) => return Ok(Outcome::Quit),
                None => writeln!(out, "please answer t, f, u, why [goal] or quit")?,
            }
        }
    }
}
