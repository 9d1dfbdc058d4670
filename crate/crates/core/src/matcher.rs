//! Law matching, the ranked menu of applicable laws, and law application.

use std::cmp::{Ordering, Reverse};
use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::focus::{FocusPath, Focused};
use crate::syntax::render_term;
use crate::term::{
    alpha_equal, check_side_condition, fresh_name, free_vars, substitute, Binding, KernelError,
    MetaClass, Operator, SideCondition, Term,
};
use crate::theory::{Direction, Law, StoreError, TheoryStack};
use crate::types::{infer, infer_focus, types_compatible, TypeError};

pub const DEFAULT_MENU_LIMIT: usize = 20;

/// Can a schematic variable of this class stand for `t`?
pub fn class_admits(class: MetaClass, t: &Term) -> bool {
    match class {
        MetaClass::Expr => matches!(t, Term::Var(_) | Term::App(..)),
        MetaClass::Pred => !matches!(t, Term::App(Operator::Intsct | Operator::Union, _)),
    }
}

struct Matcher {
    binding: Binding,
    pattern_scope: Vec<String>,
    subject_scope: Vec<String>,
}

fn level(scope: &[String], name: &str) -> Option<usize> {
    scope.iter().rposition(|n| n == name)
}

impl Matcher {
    fn go(&mut self, p: &Term, s: &Term) -> bool {
        match (p, s) {
            (Term::Meta(name, class), _) => {
                if s.has_metas() || !class_admits(*class, s) {
                    return false;
                }
                match self.binding.terms.get(name) {
                    Some(prev) => alpha_equal(prev, s),
                    None => {
                        self.binding.terms.insert(name.clone(), s.clone());
                        true
                    }
                }
            }
            (Term::Var(pv), Term::Var(sv)) => {
                match (level(&self.pattern_scope, pv), level(&self.subject_scope, sv)) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => pv == sv,
                    _ => false,
                }
            }
            (Term::Const(a), Term::Const(b)) => a == b,
            (Term::Conn(o1, a1), Term::Conn(o2, a2)) => o1 == o2 && self.all(a1, a2),
            (Term::App(o1, a1), Term::App(o2, a2)) => o1 == o2 && self.all(a1, a2),
            (Term::Quant(k1, b1, body1), Term::Quant(k2, b2, body2)) => {
                if k1 != k2 || b1.len() != b2.len() {
                    return false;
                }
                for (pb, sb) in b1.iter().zip(b2) {
                    match self.binding.binders.get(pb) {
                        Some(prev) if prev != sb => return false,
                        Some(_) => {}
                        None => {
                            self.binding.binders.insert(pb.clone(), sb.clone());
                        }
                    }
                }
                let mark = self.pattern_scope.len();
                self.pattern_scope.extend(b1.iter().cloned());
                self.subject_scope.extend(b2.iter().cloned());
                let ok = self.go(body1, body2);
                self.pattern_scope.truncate(mark);
                self.subject_scope.truncate(mark);
                ok
            }
            _ => false,
        }
    }

    fn all(&mut self, ps: &[Term], ss: &[Term]) -> bool {
        ps.len() == ss.len() && ps.iter().zip(ss).all(|(p, s)| self.go(p, s))
    }
}

/// First-order matching modulo renaming of bound variables. Law binders are
/// paired with subject binders by position.
pub fn match_pattern(pattern: &Term, subject: &Term) -> Option<Binding> {
    let mut m = Matcher {
        binding: Binding::new(),
        pattern_scope: Vec::new(),
        subject_scope: Vec::new(),
    };
    m.go(pattern, subject).then_some(m.binding)
}

/// What kind of instance an unbound name needs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum UnboundKind {
    /// A law binder: the instance must be a variable name.
    Binder,
    Expr,
    Pred,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Unbound {
    pub name: String,
    pub kind: UnboundKind,
}

/// Selectable menu ordering.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RankingHeuristic {
    /// Fewest unbound names, smallest preview, most specific pattern,
    /// nearest theory, then law name.
    #[default]
    Standard,
    /// Smallest preview first.
    SmallestResult,
    /// Nearest theory first, then law name.
    Nearest,
    /// Law name only.
    Alphabetical,
}

impl FromStr for RankingHeuristic {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "standard" => Ok(Self::Standard),
            "smallest-result" => Ok(Self::SmallestResult),
            "nearest" => Ok(Self::Nearest),
            "alphabetical" => Ok(Self::Alphabetical),
            other => Err(format!("unknown ranking heuristic `{other}`")),
        }
    }
}

/// Raw ranking inputs of one match.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Score {
    pub unbound: usize,
    pub preview_size: usize,
    pub pattern_size: usize,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchResult {
    pub law: Law,
    pub direction: Direction,
    pub path: FocusPath,
    /// Bindings obtained from the pattern side.
    pub binding: Binding,
    pub unbound: Vec<Unbound>,
    /// Whole goal after applying with the default instantiation.
    pub preview: Term,
    pub score: Score,
}

impl MatchResult {
    pub fn pattern(&self) -> &Term {
        self.law.oriented(self.direction).expect("matched laws are rewritable").0
    }

    pub fn replacement(&self) -> &Term {
        self.law.oriented(self.direction).expect("matched laws are rewritable").1
    }

    pub fn unbound_kind(&self, name: &str) -> Option<UnboundKind> {
        self.unbound.iter().find(|u| u.name == name).map(|u| u.kind)
    }

    fn rank_key(&self, h: RankingHeuristic) -> impl Ord + '_ {
        let s = &self.score;
        let primary = match h {
            RankingHeuristic::Standard => (s.unbound, s.preview_size, Reverse(s.pattern_size), s.depth),
            RankingHeuristic::SmallestResult => (0, s.preview_size, Reverse(0), 0),
            RankingHeuristic::Nearest => (0, 0, Reverse(0), s.depth),
            RankingHeuristic::Alphabetical => (0, 0, Reverse(0), 0),
        };
        (primary, self.law.name.as_str(), self.direction)
    }
}

/// One menu row as sent to clients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MenuEntry {
    pub law_name: String,
    pub theory: String,
    pub direction: Direction,
    pub path: FocusPath,
    pub preview: String,
    pub unbound: Vec<String>,
    pub side_condition: String,
}

impl From<&MatchResult> for MenuEntry {
    fn from(m: &MatchResult) -> Self {
        MenuEntry {
            law_name: m.law.name.clone(),
            theory: m.law.owner.clone(),
            direction: m.direction,
            path: m.path.clone(),
            preview: render_term(&m.preview),
            unbound: m.unbound.iter().map(|u| u.name.clone()).collect(),
            side_condition: m.law.side_condition.to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchError {
    #[error("law `{law}` ({direction}) does not match the focus")]
    NoMatch { law: String, direction: Direction },
    #[error("law `{0}` is not an equation and cannot rewrite")]
    NotRewritable(String),
    #[error("`{0}` needs an instance")]
    IncompleteBinding(String),
    #[error("`{0}` is not an unbound name of this match")]
    UnknownInstance(String),
    #[error("instance for binder `{0}` must be a variable")]
    BinderNotVariable(String),
    #[error("instance for `{name}` must be {expected}")]
    ClassMismatch { name: String, expected: &'static str },
    #[error("side condition {condition} of `{law}` does not hold")]
    SideConditionViolated { law: String, condition: SideCondition },
    #[error("ill-typed instance of `{law}`")]
    TypeMismatch { law: String },
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

fn meta_classes(t: &Term, out: &mut BTreeMap<String, MetaClass>) {
    if let Term::Meta(n, c) = t {
        out.entry(n.clone()).or_insert(*c);
    }
    for c in t.children() {
        meta_classes(c, out);
    }
}

fn unbound_names(pattern: &Term, replacement: &Term) -> Vec<Unbound> {
    let pattern_binders = pattern.binder_names();
    let mut out: Vec<Unbound> = replacement
        .binder_names()
        .into_iter()
        .filter(|b| !pattern_binders.contains(b))
        .map(|name| Unbound {
            name,
            kind: UnboundKind::Binder,
        })
        .collect();
    let pattern_metas = pattern.metas();
    let mut classes = BTreeMap::new();
    meta_classes(replacement, &mut classes);
    out.extend(
        classes
            .into_iter()
            .filter(|(n, _)| !pattern_metas.contains(n))
            .map(|(name, class)| Unbound {
                name,
                kind: match class {
                    MetaClass::Expr => UnboundKind::Expr,
                    MetaClass::Pred => UnboundKind::Pred,
                },
            }),
    );
    out
}

/// Match one law in one direction at the focus, computing unbound names and
/// the default-instantiated preview. Side conditions and types are not
/// checked here.
pub fn match_law(focused: &Focused, law: &Law, direction: Direction) -> Option<MatchResult> {
    let (pattern, replacement) = law.oriented(direction)?;
    let binding = match_pattern(pattern, focused.focus())?;
    let unbound = unbound_names(pattern, replacement);
    let mut m = MatchResult {
        law: law.clone(),
        direction,
        path: focused.path(),
        binding,
        unbound,
        preview: focused.root(),
        score: Score {
            unbound: 0,
            preview_size: 0,
            pattern_size: pattern.size(),
            depth: 0,
        },
    };
    m.score.unbound = m.unbound.len();
    let completed = m.binding.merged(&default_instantiation(&m, focused));
    let image = substitute(replacement, &completed).ok()?;
    m.preview = focused.replace_focus(image);
    m.score.preview_size = m.preview.size();
    Some(m)
}

/// Default instances for every unbound name: binders and expression
/// variables get a fresh variable named after them, predicates get `TRUE`.
pub fn default_instantiation(m: &MatchResult, focused: &Focused) -> Binding {
    let mut avoid: BTreeSet<String> = free_vars(&focused.root());
    avoid.extend(focused.binders_in_scope());
    for image in m.binding.terms.values() {
        avoid.extend(free_vars(image));
    }
    avoid.extend(m.binding.binders.values().cloned());
    let mut out = Binding::new();
    for u in &m.unbound {
        match u.kind {
            UnboundKind::Binder => {
                let name = fresh_name(&u.name, &avoid, true);
                avoid.insert(name.clone());
                out.binders.insert(u.name.clone(), name);
            }
            UnboundKind::Expr => {
                let name = fresh_name(&u.name, &avoid, true);
                avoid.insert(name.clone());
                out.terms.insert(u.name.clone(), Term::Var(name));
            }
            UnboundKind::Pred => {
                out.terms.insert(u.name.clone(), Term::Const(true));
            }
        }
    }
    out
}

/// `inst` plus default instances for every unbound name it leaves out.
pub fn fill_defaults(m: &MatchResult, focused: &Focused, inst: &Binding) -> Binding {
    let defaults = default_instantiation(m, focused);
    let mut out = inst.clone();
    for u in &m.unbound {
        if inst.terms.contains_key(&u.name) || inst.binders.contains_key(&u.name) {
            continue;
        }
        if let Some(b) = defaults.binders.get(&u.name) {
            out.binders.insert(u.name.clone(), b.clone());
        }
        if let Some(t) = defaults.terms.get(&u.name) {
            out.terms.insert(u.name.clone(), t.clone());
        }
    }
    out
}

/// Combine the match's own binding with user instances for the unbound
/// names. Binder instances may be given in either map of `inst`.
pub fn complete_binding(m: &MatchResult, inst: &Binding) -> Result<Binding, MatchError> {
    for name in inst.terms.keys().chain(inst.binders.keys()) {
        if m.unbound_kind(name).is_none() {
            return Err(MatchError::UnknownInstance(name.clone()));
        }
    }
    let mut out = m.binding.clone();
    for u in &m.unbound {
        match u.kind {
            UnboundKind::Binder => {
                let to = match (inst.binders.get(&u.name), inst.terms.get(&u.name)) {
                    (Some(v), _) => v.clone(),
                    (None, Some(Term::Var(v))) => v.clone(),
                    (None, Some(_)) => return Err(MatchError::BinderNotVariable(u.name.clone())),
                    (None, None) => return Err(MatchError::IncompleteBinding(u.name.clone())),
                };
                if !crate::syntax::is_identifier(&to) {
                    return Err(MatchError::BinderNotVariable(u.name.clone()));
                }
                out.binders.insert(u.name.clone(), to);
            }
            UnboundKind::Expr | UnboundKind::Pred => {
                let t = inst
                    .terms
                    .get(&u.name)
                    .ok_or_else(|| MatchError::IncompleteBinding(u.name.clone()))?;
                let class = if u.kind == UnboundKind::Expr {
                    MetaClass::Expr
                } else {
                    MetaClass::Pred
                };
                if t.has_metas() || !class_admits(class, t) {
                    return Err(MatchError::ClassMismatch {
                        name: u.name.clone(),
                        expected: if class == MetaClass::Expr {
                            "an expression"
                        } else {
                            "a predicate"
                        },
                    });
                }
                out.terms.insert(u.name.clone(), t.clone());
            }
        }
    }
    Ok(out)
}

/// Apply a matched law at the focus with the given instances, returning the
/// new whole goal.
pub fn apply_law(focused: &Focused, m: &MatchResult, inst: &Binding) -> Result<Term, MatchError> {
    let completed = complete_binding(m, inst)?;
    if !check_side_condition(&m.law.side_condition, &completed)? {
        return Err(MatchError::SideConditionViolated {
            law: m.law.name.clone(),
            condition: m.law.side_condition.clone(),
        });
    }
    let law_env = infer(&m.law.schema)?;
    let goal_env = infer_focus(focused)?;
    if !types_compatible(&completed, &law_env, &goal_env) {
        return Err(MatchError::TypeMismatch {
            law: m.law.name.clone(),
        });
    }
    let image = substitute(m.replacement(), &completed)?;
    let result = focused.replace_focus(image);
    infer(&result)?;
    Ok(result)
}

/// Re-run matching for a law picked by name, as when replaying a script.
pub fn match_named(
    focused: &Focused,
    stack: &TheoryStack,
    from: &str,
    law_name: &str,
    direction: Direction,
) -> Result<MatchResult, MatchLookupError> {
    let law = stack
        .visible_laws(from)?
        .into_iter()
        .find(|l| l.name == law_name)
        .ok_or_else(|| MatchLookupError::UnknownLaw(law_name.to_string()))?;
    if !law.is_rewritable() {
        return Err(MatchError::NotRewritable(law.name).into());
    }
    let mut m = match_law(focused, &law, direction).ok_or_else(|| MatchError::NoMatch {
        law: law.name.clone(),
        direction,
    })?;
    m.score.depth = stack.depth_below(from, &law.owner).unwrap_or(0);
    Ok(m)
}

#[derive(Debug, Error)]
pub enum MatchLookupError {
    #[error("no visible law named `{0}`")]
    UnknownLaw(String),
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Match(#[from] MatchError),
}

/// Every visible law that applies at the focus in either direction, ranked
/// and truncated to `limit`. A result is kept only if its types agree with
/// the goal, its side condition holds under the default instances, and its
/// preview type-checks.
pub fn applicable_laws(
    focused: &Focused,
    stack: &TheoryStack,
    from: &str,
    limit: usize,
    heuristic: RankingHeuristic,
) -> Result<Vec<MatchResult>, StoreError> {
    let Ok(goal_env) = infer_focus(focused) else {
        return Ok(Vec::new());
    };
    let mut out = Vec::new();
    for law in stack.visible_laws(from)? {
        let Ok(law_env) = infer(&law.schema) else {
            continue;
        };
        for dir in Direction::BOTH {
            let Some(mut m) = match_law(focused, &law, dir) else {
                continue;
            };
            let completed = m.binding.merged(&default_instantiation(&m, focused));
            if !types_compatible(&completed, &law_env, &goal_env) {
                continue;
            }
            if !matches!(check_side_condition(&law.side_condition, &completed), Ok(true)) {
                continue;
            }
            if infer(&m.preview).is_err() {
                continue;
            }
            m.score.depth = stack.depth_below(from, &law.owner).unwrap_or(0);
            out.push(m);
        }
    }
    out.sort_by(|a, b| compare(a, b, heuristic));
    out.truncate(limit);
    Ok(out)
}

fn compare(a: &MatchResult, b: &MatchResult, h: RankingHeuristic) -> Ordering {
    a.rank_key(h).cmp(&b.rank_key(h))
}
