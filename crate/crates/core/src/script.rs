//! Proof scripts: a header naming the conjecture and strategy, then one
//! step per line.
//!
//! ```text
//! Proof for 'Sets$intsct-comm
//! Strategy: Reduce to TRUE
//!
//! set-extensionality (L-to-R) @ with x = x
//! in-intersect (L-to-R) @1.1
//! ```
//!
//! A rendered transcript is also a valid script: quoted justification
//! lines are steps, and indented goal lines are checked against the replay.

use thiserror::Error;

use crate::focus::FocusPath;
use crate::proof::{ProofError, ProofState, Strategy};
use crate::syntax::{is_identifier, parse_path, parse_term, render_term, SyntaxError};
use crate::term::{Binding, Term};
use crate::theory::{Direction, TheoryStack};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptStep {
    pub law: String,
    pub direction: Direction,
    pub path: FocusPath,
    /// `(name, instance)` pairs in source order.
    pub instances: Vec<(String, Term)>,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Script {
    pub theory: String,
    pub name: String,
    pub strategy: Strategy,
    /// The header promised a complete proof.
    pub claims_complete: bool,
    /// `Goal :` line text and its line number.
    pub goal: Option<(String, usize)>,
    /// Indented goal lines: how many steps precede each, its text and line.
    pub checkpoints: Vec<(usize, String, usize)>,
    pub steps: Vec<ScriptStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ScriptError {
    pub line: usize,
    pub message: String,
}

fn err(line: usize, message: impl Into<String>) -> ScriptError {
    ScriptError {
        line,
        message: message.into(),
    }
}

fn syntax_err(line: usize, what: &str, e: SyntaxError) -> ScriptError {
    err(line, format!("{what}: {e}"))
}

const GOAL_INDENT: &str = "     ";
const JUSTIFICATION_PREFIX: &str = " ===   \"";

fn parse_header(text: &str, line: usize) -> Result<(String, String, bool), ScriptError> {
    let (complete, rest) = match text.strip_prefix("Complete ") {
        Some(r) => (true, r),
        None => (false, text),
    };
    let qualified = rest
        .strip_prefix("Proof for '")
        .ok_or_else(|| err(line, "expected `Proof for 'Theory$name`"))?;
    let (theory, name) = qualified
        .split_once('$')
        .ok_or_else(|| err(line, "expected `Theory$name` after `Proof for '`"))?;
    if theory.is_empty() || name.is_empty() {
        return Err(err(line, "theory and conjecture names must be non-empty"));
    }
    Ok((theory.to_string(), name.trim_end().to_string(), complete))
}

fn parse_step(body: &str, line: usize) -> Result<ScriptStep, ScriptError> {
    let found = ["(L-to-R)", "(R-to-L)"]
        .iter()
        .filter_map(|d| body.rfind(d).map(|i| (i, *d)))
        .max_by_key(|(i, _)| *i);
    let (at, dir_text) = found.ok_or_else(|| err(line, "expected a direction `(L-to-R)` or `(R-to-L)`"))?;
    let law = body[..at].trim();
    if law.is_empty() {
        return Err(err(line, "missing law name"));
    }
    let direction: Direction = dir_text[1..dir_text.len() - 1]
        .parse()
        .map_err(|e: String| err(line, e))?;
    let rest = body[at + dir_text.len()..].trim();
    let (path_text, with) = match rest.split_once(char::is_whitespace) {
        Some((p, w)) => (p, w.trim()),
        None => (rest, ""),
    };
    let path = parse_path(path_text).map_err(|e| syntax_err(line, "path", e))?;
    let mut instances = Vec::new();
    if !with.is_empty() {
        let list = with
            .strip_prefix("with")
            .filter(|l| l.starts_with(char::is_whitespace))
            .ok_or_else(|| err(line, format!("unexpected `{with}` after the path")))?;
        for item in list.split(',') {
            let (name, term) = item
                .split_once('=')
                .ok_or_else(|| err(line, format!("expected `name = term`, found `{}`", item.trim())))?;
            let name = name.trim().trim_end_matches(':').trim_end().trim_start_matches('?');
            if !is_identifier(name) {
                return Err(err(line, format!("`{name}` is not a variable name")));
            }
            let term = parse_term(term.trim()).map_err(|e| syntax_err(line, name, e))?;
            instances.push((name.to_string(), term));
        }
    }
    Ok(ScriptStep {
        law: law.to_string(),
        direction,
        path,
        instances,
        line,
    })
}

/// Parse a script or transcript.
pub fn parse_script(src: &str) -> Result<Script, ScriptError> {
    let mut lines = src
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let (hl, header) = lines.next().ok_or_else(|| err(1, "empty script"))?;
    let (theory, name, claims_complete) = parse_header(header, hl)?;
    let mut script = Script {
        theory,
        name,
        strategy: Strategy::Reduce,
        claims_complete,
        goal: None,
        checkpoints: Vec::new(),
        steps: Vec::new(),
    };
    let mut strategy_seen = false;
    for (n, text) in lines {
        if let Some(g) = text.strip_prefix("Goal :") {
            if strategy_seen || script.goal.is_some() {
                return Err(err(n, "`Goal :` must precede the strategy line"));
            }
            script.goal = Some((g.trim().to_string(), n));
        } else if let Some(s) = text.strip_prefix("Strategy:") {
            if strategy_seen {
                return Err(err(n, "duplicate strategy line"));
            }
            script.strategy = s.trim().parse().map_err(|e: String| err(n, e))?;
            strategy_seen = true;
        } else if !strategy_seen {
            return Err(err(n, "expected `Strategy: ...`"));
        } else if let Some(q) = text.strip_prefix(JUSTIFICATION_PREFIX) {
            let body = q
                .trim_end()
                .strip_suffix('"')
                .ok_or_else(|| err(n, "unterminated justification"))?;
            script.steps.push(parse_step(body, n)?);
        } else if let Some(g) = text.strip_prefix(GOAL_INDENT) {
            script.checkpoints.push((script.steps.len(), g.trim_end().to_string(), n));
        } else {
            script.steps.push(parse_step(text.trim(), n)?);
        }
    }
    if !strategy_seen {
        return Err(err(hl, "missing `Strategy: ...` line"));
    }
    Ok(script)
}

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("{0}")]
    Parse(#[from] ScriptError),
    #[error("cannot start proof: {0}")]
    Start(#[source] Box<ProofError>),
    #[error("line {line}: goal is `{actual}`, but the script says `{expected}`")]
    GoalMismatch {
        line: usize,
        expected: String,
        actual: String,
    },
    #[error("step {index} (line {line}): {source}")]
    Step {
        index: usize,
        line: usize,
        #[source]
        source: Box<ProofError>,
    },
    #[error("the script claims a complete proof, but the goal is still `{goal}`")]
    Incomplete { goal: String },
}

impl ReplayError {
    /// 1-based step index, when the failure is tied to a step.
    pub fn step_index(&self) -> Option<usize> {
        match self {
            ReplayError::Step { index, .. } => Some(*index),
            _ => None,
        }
    }
}

fn instances(step: &ScriptStep) -> Binding {
    let mut b = Binding::new();
    for (name, term) in &step.instances {
        b.terms.insert(name.clone(), term.clone());
    }
    b
}

/// Run a parsed script against a stack, checking every goal line it carries.
pub fn replay(stack: &TheoryStack, script: &Script) -> Result<ProofState, ReplayError> {
    let mut st = ProofState::start(stack, &script.theory, &script.name, script.strategy).map_err(|e| ReplayError::Start(Box::new(e)))?;
    if let Some((goal, line)) = &script.goal {
        let actual = render_term(&st.schema);
        if *goal != actual {
            return Err(ReplayError::GoalMismatch {
                line: *line,
                expected: goal.clone(),
                actual,
            });
        }
    }
    let check = |st: &ProofState, done: usize| -> Result<(), ReplayError> {
        for (_, expected, line) in script.checkpoints.iter().filter(|(k, _, _)| *k == done) {
            let actual = render_term(st.current());
            if *expected != actual {
                return Err(ReplayError::GoalMismatch {
                    line: *line,
                    expected: expected.clone(),
                    actual,
                });
            }
        }
        Ok(())
    };
    check(&st, 0)?;
    for (i, step) in script.steps.iter().enumerate() {
        st.apply_named(stack, &step.law, step.direction, &step.path, &instances(step))
            .map_err(|source| ReplayError::Step {
                index: i + 1,
                line: step.line,
                source: Box::new(source),
            })?;
        check(&st, i + 1)?;
    }
    if script.claims_complete && !st.is_complete() {
        return Err(ReplayError::Incomplete {
            goal: render_term(st.current()),
        });
    }
    Ok(st)
}

/// Parse and replay in one go.
pub fn replay_text(stack: &TheoryStack, src: &str) -> Result<ProofState, ReplayError> {
    replay(stack, &parse_script(src)?)
}
