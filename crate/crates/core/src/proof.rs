//! Proof sessions: strategies, stepping, undo, completion, promotion and
//! transcripts.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::focus::{FocusError, FocusPath, Focused, Move};
use crate::matcher::{
    applicable_laws, apply_law, fill_defaults, match_named, MatchError, MatchLookupError, MatchResult,
    RankingHeuristic, UnboundKind,
};
use crate::syntax::render_term;
use crate::term::{alpha_equal, Binding, Connective, Operator, SideCondition, Term};
use crate::theory::{Direction, StoreError, StoredProof, StoredStep, TheoryStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Rewrite the whole goal to `TRUE`.
    Reduce,
    /// Rewrite the left side until it equals the right side.
    LeftToRight,
    /// Rewrite either side until both agree.
    ReduceBoth,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Reduce, Strategy::LeftToRight, Strategy::ReduceBoth];

    /// Header text used in transcripts.
    pub fn phrase(self) -> &'static str {
        match self {
            Strategy::Reduce => "Reduce to TRUE",
            Strategy::LeftToRight => "LHS to RHS",
            Strategy::ReduceBoth => "Reduce both sides",
        }
    }

    pub fn key(self) -> &'static str {
        match self {
            Strategy::Reduce => "reduce",
            Strategy::LeftToRight => "left-to-right",
            Strategy::ReduceBoth => "reduce-both",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.phrase())
    }
}

impl FromStr for Strategy {
    type Err = String;

    /// Accepts either the key (`reduce`) or the header phrase.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.key() == s || st.phrase() == s)
            .ok_or_else(|| format!("unknown strategy `{s}`"))
    }
}

/// Sides of a top-level `==` or `=`.
pub fn equation_sides(t: &Term) -> Option<(&Term, &Term)> {
    match t {
        Term::Conn(Connective::Equiv, a) | Term::App(Operator::Eq, a) => Some((&a[0], &a[1])),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub law: String,
    pub direction: Direction,
    pub path: FocusPath,
    /// Instances supplied for the law's unbound names.
    pub instantiation: Binding,
    pub before: Term,
    pub after: Term,
}

impl Step {
    /// Justification line, e.g. ` ===   " in-intersect (L-to-R) @1.1 "`.
    pub fn justification(&self) -> String {
        format!(" ===   \" {} ({}) {} \"", self.law, self.direction, self.path)
    }

    fn instantiation_text(&self) -> BTreeMap<String, String> {
        self.instantiation
            .binders
            .iter()
            .map(|(k, v)| (k.clone(), v.clone()))
            .chain(
                self.instantiation
                    .terms
                    .iter()
                    .map(|(k, v)| (k.clone(), render_term(v))),
            )
            .collect()
    }
}

#[derive(Debug, Error)]
pub enum ProofError {
    #[error("no conjecture `{name}` in theory `{theory}`")]
    UnknownConjecture { theory: String, name: String },
    #[error("strategy `{strategy}` needs a goal of the form A == B or A = B")]
    StrategyInapplicable { strategy: Strategy },
    #[error("the proof is already complete")]
    ProofAlreadyComplete,
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("the proof is not complete")]
    NotComplete,
    #[error("focus must stay inside the active side")]
    OutsideActiveSide,
    #[error("only the reduce-both strategy has sides")]
    NoSides,
    #[error("match was computed at {matched}, but the focus is at {focus}")]
    StaleMatch { matched: FocusPath, focus: FocusPath },
    #[error(transparent)]
    Focus(#[from] FocusError),
    #[error(transparent)]
    Match(#[from] MatchError),
    #[error(transparent)]
    Lookup(#[from] MatchLookupError),
    #[error(transparent)]
    Store(#[from] StoreError),
}

/// One proof in progress.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofState {
    pub theory: String,
    pub name: String,
    pub schema: Term,
    pub side_condition: SideCondition,
    pub strategy: Strategy,
    /// What is being rewritten: the whole goal, or for left-to-right its
    /// left side. For reduce-both this is the whole equation.
    current: Term,
    /// Right side for left-to-right.
    target: Option<Term>,
    focus: FocusPath,
    steps: Vec<Step>,
    complete: bool,
}

impl ProofState {
    /// Open a proof of a conjecture of `theory`.
    pub fn start(stack: &TheoryStack, theory: &str, name: &str, strategy: Strategy) -> Result<Self, ProofError> {
        let conj = stack
            .theory(theory)?
            .conjecture(name)
            .ok_or_else(|| ProofError::UnknownConjecture {
                theory: theory.to_string(),
                name: name.to_string(),
            })?;
        Self::for_goal(theory, name, conj.schema.clone(), conj.side_condition.clone(), strategy)
    }

    /// Open a proof of an arbitrary goal.
    pub fn for_goal(
        theory: &str,
        name: &str,
        schema: Term,
        side_condition: SideCondition,
        strategy: Strategy,
    ) -> Result<Self, ProofError> {
        let (current, target, focus) = match strategy {
            Strategy::Reduce => (schema.clone(), None, FocusPath::root()),
            Strategy::LeftToRight => {
                let (l, r) = equation_sides(&schema).ok_or(ProofError::StrategyInapplicable { strategy })?;
                (l.clone(), Some(r.clone()), FocusPath::root())
            }
            Strategy::ReduceBoth => {
                equation_sides(&schema).ok_or(ProofError::StrategyInapplicable { strategy })?;
                (schema.clone(), None, FocusPath(vec![1]))
            }
        };
        let mut st = ProofState {
            theory: theory.to_string(),
            name: name.to_string(),
            schema,
            side_condition,
            strategy,
            current,
            target,
            focus,
            steps: Vec::new(),
            complete: false,
        };
        st.complete = st.completion();
        Ok(st)
    }

    pub fn current(&self) -> &Term {
        &self.current
    }

    pub fn target(&self) -> Option<&Term> {
        self.target.as_ref()
    }

    /// What the strategy is heading for, as shown next to the goal.
    pub fn target_text(&self) -> String {
        match self.strategy {
            Strategy::Reduce => "TRUE".to_string(),
            Strategy::LeftToRight => render_term(self.target.as_ref().expect("left-to-right has a target")),
            Strategy::ReduceBoth => "both sides equal".to_string(),
        }
    }

    pub fn focus_path(&self) -> &FocusPath {
        &self.focus
    }

    pub fn focused(&self) -> Focused {
        Focused::at_path(self.current.clone(), &self.focus).expect("focus path stays valid")
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_complete(&self) -> bool {
        self.complete
    }

    /// Active side for reduce-both: 1 (left) or 2 (right).
    pub fn active_side(&self) -> Option<usize> {
        (self.strategy == Strategy::ReduceBoth).then(|| self.focus.segments()[0])
    }

    fn completion(&self) -> bool {
        match self.strategy {
            Strategy::Reduce => alpha_equal(&self.current, &Term::Const(true)),
            Strategy::LeftToRight => alpha_equal(&self.current, self.target.as_ref().expect("target")),
            Strategy::ReduceBoth => {
                let (l, r) = equation_sides(&self.current).expect("reduce-both keeps the equation");
                alpha_equal(l, r)
            }
        }
    }

    fn check_focus(&self, path: &FocusPath) -> Result<(), ProofError> {
        Focused::at_path(self.current.clone(), path)?;
        if self.strategy == Strategy::ReduceBoth {
            match path.segments().first() {
                Some(&s) if Some(s) == self.active_side() => {}
                _ => return Err(ProofError::OutsideActiveSide),
            }
        }
        Ok(())
    }

    pub fn set_focus(&mut self, path: FocusPath) -> Result<(), ProofError> {
        self.check_focus(&path)?;
        self.focus = path;
        Ok(())
    }

    /// Arrow-key move. A move that would leave the goal or the active side
    /// is an error and leaves the focus unchanged.
    pub fn move_focus(&mut self, m: Move) -> Result<(), ProofError> {
        let next = self.focused().apply_move(m)?.path();
        self.set_focus(next)
    }

    /// Reduce-both: focus the other side.
    pub fn switch_side(&mut self) -> Result<(), ProofError> {
        let side = self.active_side().ok_or(ProofError::NoSides)?;
        self.focus = FocusPath(vec![3 - side]);
        Ok(())
    }

    /// Ranked laws applicable at the focus.
    pub fn menu(
        &self,
        stack: &TheoryStack,
        limit: usize,
        heuristic: RankingHeuristic,
    ) -> Result<Vec<MatchResult>, ProofError> {
        if self.complete {
            return Ok(Vec::new());
        }
        Ok(applicable_laws(&self.focused(), stack, &self.theory, limit, heuristic)?)
    }

    /// Apply a match computed at the current focus.
    pub fn step(&mut self, m: &MatchResult, inst: &Binding) -> Result<(), ProofError> {
        if self.complete {
            return Err(ProofError::ProofAlreadyComplete);
        }
        if m.path != self.focus {
            return Err(ProofError::StaleMatch {
                matched: m.path.clone(),
                focus: self.focus.clone(),
            });
        }
        let after = apply_law(&self.focused(), m, inst)?;
        let mut recorded = Binding::new();
        for u in &m.unbound {
            match u.kind {
                UnboundKind::Binder => {
                    let to = inst
                        .binders
                        .get(&u.name)
                        .cloned()
                        .or_else(|| match inst.terms.get(&u.name) {
                            Some(Term::Var(v)) => Some(v.clone()),
                            _ => None,
                        })
                        .expect("apply_law checked instances");
                    recorded.binders.insert(u.name.clone(), to);
                }
                _ => {
                    recorded
                        .terms
                        .insert(u.name.clone(), inst.terms[&u.name].clone());
                }
            }
        }
        self.steps.push(Step {
            law: m.law.name.clone(),
            direction: m.direction,
            path: self.focus.clone(),
            instantiation: recorded,
            before: self.current.clone(),
            after: after.clone(),
        });
        self.current = after;
        self.complete = self.completion();
        Ok(())
    }

    /// Look a law up by name, match it at `path` and apply it. Unbound
    /// names missing from `inst` take their default instances.
    pub fn apply_named(
        &mut self,
        stack: &TheoryStack,
        law: &str,
        direction: Direction,
        path: &FocusPath,
        inst: &Binding,
    ) -> Result<(), ProofError> {
        if self.complete {
            return Err(ProofError::ProofAlreadyComplete);
        }
        let saved = self.focus.clone();
        self.set_focus(path.clone())?;
        let result = (|| {
            let focused = self.focused();
            let m = match_named(&focused, stack, &self.theory, law, direction)?;
            let inst = fill_defaults(&m, &focused, inst);
            self.step(&m, &inst)
        })();
        if result.is_err() {
            self.focus = saved;
        }
        result
    }

    pub fn undo(&mut self) -> Result<(), ProofError> {
        let last = self.steps.pop().ok_or(ProofError::NothingToUndo)?;
        self.current = last.before;
        self.focus = last.path;
        self.complete = self.completion();
        Ok(())
    }

    /// Goal as shown on transcript goal lines.
    pub fn goal_text(&self, t: &Term) -> String {
        render_term(t)
    }

    /// Transcript text; the header says `Complete Proof` once finished.
    pub fn transcript(&self) -> String {
        let mut out = String::new();
        if self.complete {
            out.push_str("Complete ");
        }
        out.push_str(&format!("Proof for '{}${}\n", self.theory, self.name));
        out.push_str(&format!("Goal : {}\n", render_term(&self.schema)));
        out.push_str(&format!("Strategy: {}\n", self.strategy.phrase()));
        out.push('\n');
        let first = self.steps.first().map_or(&self.current, |s| &s.before);
        out.push_str(&format!("     {}\n", self.goal_text(first)));
        for s in &self.steps {
            out.push_str(&s.justification());
            out.push('\n');
            out.push_str(&format!("     {}\n", self.goal_text(&s.after)));
        }
        out
    }

    fn stored(&self) -> StoredProof {
        StoredProof {
            strategy: self.strategy.phrase().to_string(),
            steps: self
                .steps
                .iter()
                .map(|s| StoredStep {
                    law: s.law.clone(),
                    direction: s.direction,
                    path: s.path.clone(),
                    instantiation: s.instantiation_text(),
                    goal: render_term(&s.after),
                })
                .collect(),
            transcript: self.transcript(),
        }
    }
}

/// A finished proof.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Proof {
    pub state: ProofState,
    pub transcript: String,
}

impl Proof {
    pub fn finish(state: ProofState) -> Result<Proof, ProofError> {
        if !state.is_complete() {
            return Err(ProofError::NotComplete);
        }
        let transcript = state.transcript();
        Ok(Proof { state, transcript })
    }
}

/// Byte-exact transcript of a complete proof.
pub fn render_proof(state: &ProofState) -> Result<String, ProofError> {
    Ok(Proof::finish(state.clone())?.transcript)
}

/// Move the proven conjecture to the theorems table.
pub fn promote(stack: &TheoryStack, state: &ProofState) -> Result<TheoryStack, ProofError> {
    if !state.is_complete() {
        return Err(ProofError::NotComplete);
    }
    Ok(stack.promote_conjecture(&state.theory, &state.name, state.stored())?)
}
