//! The term language shared by goals and law schemas.
//!
//! Predicates and expressions live in one [`Term`] type. Schematic variables
//! (pattern metavariables) have their own variant and only occur inside law
//! schemas and not-yet-instantiated previews.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Prime appended to a name when a fresh variant is needed.
pub const PRIME: char = '\u{2032}';

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Connective {
    And,
    Or,
    Not,
    Implies,
    Equiv,
}

impl Connective {
    pub fn symbol(self) -> &'static str {
        match self {
            Connective::And => "/\\",
            Connective::Or => "\\/",
            Connective::Not => "~",
            Connective::Implies => "=>",
            Connective::Equiv => "==",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Connective::Not => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Quantifier {
    Forall,
    Exists,
}

impl Quantifier {
    pub fn keyword(self) -> &'static str {
        match self {
            Quantifier::Forall => "forall",
            Quantifier::Exists => "exists",
        }
    }
}

/// Built-in infix operators. Equality is expression-level; equivalence
/// (`==`) is a [`Connective`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Operator {
    Eq,
    In,
    Intsct,
    Union,
}

impl Operator {
    pub fn symbol(self) -> &'static str {
        match self {
            Operator::Eq => "=",
            Operator::In => "in",
            Operator::Intsct => "intsct",
            Operator::Union => "union",
        }
    }
}

/// Syntactic class of a schematic variable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetaClass {
    Expr,
    Pred,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// `TRUE` / `FALSE`.
    Const(bool),
    Conn(Connective, Vec<Term>),
    Quant(Quantifier, Vec<String>, Box<Term>),
    App(Operator, Vec<Term>),
    Var(String),
    /// Schematic variable, rendered `?name` outside law tables.
    Meta(String, MetaClass),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn meta(name: impl Into<String>, class: MetaClass) -> Term {
        Term::Meta(name.into(), class)
    }

    pub fn conn(op: Connective, args: Vec<Term>) -> Term {
        Term::Conn(op, args)
    }

    pub fn and(a: Term, b: Term) -> Term {
        Term::Conn(Connective::And, vec![a, b])
    }

    pub fn or(a: Term, b: Term) -> Term {
        Term::Conn(Connective::Or, vec![a, b])
    }

    pub fn negate(a: Term) -> Term {
        Term::Conn(Connective::Not, vec![a])
    }

    pub fn implies(a: Term, b: Term) -> Term {
        Term::Conn(Connective::Implies, vec![a, b])
    }

    pub fn equiv(a: Term, b: Term) -> Term {
        Term::Conn(Connective::Equiv, vec![a, b])
    }

    pub fn app(op: Operator, a: Term, b: Term) -> Term {
        Term::App(op, vec![a, b])
    }

    pub fn eq(a: Term, b: Term) -> Term {
        Term::app(Operator::Eq, a, b)
    }

    pub fn member(a: Term, b: Term) -> Term {
        Term::app(Operator::In, a, b)
    }

    pub fn intsct(a: Term, b: Term) -> Term {
        Term::app(Operator::Intsct, a, b)
    }

    pub fn union(a: Term, b: Term) -> Term {
        Term::app(Operator::Union, a, b)
    }

    pub fn forall(binders: &[&str], body: Term) -> Term {
        Term::Quant(
            Quantifier::Forall,
            binders.iter().map(|b| b.to_string()).collect(),
            Box::new(body),
        )
    }

    pub fn exists(binders: &[&str], body: Term) -> Term {
        Term::Quant(
            Quantifier::Exists,
            binders.iter().map(|b| b.to_string()).collect(),
            Box::new(body),
        )
    }

    /// Navigable children in focus order. A quantifier's only child is its body.
    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Conn(_, args) | Term::App(_, args) => args.iter().collect(),
            Term::Quant(_, _, body) => vec![body],
            Term::Const(_) | Term::Var(_) | Term::Meta(..) => Vec::new(),
        }
    }

    pub fn child_count(&self) -> usize {
        match self {
            Term::Conn(_, args) | Term::App(_, args) => args.len(),
            Term::Quant(..) => 1,
            _ => 0,
        }
    }

    /// Node count.
    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    /// True for connectives, quantifiers and the predicate constants.
    pub fn is_predicate_form(&self) -> bool {
        matches!(self, Term::Const(_) | Term::Conn(..) | Term::Quant(..))
    }

    /// Structural well-formedness: connective and operator arities, nonempty
    /// duplicate-free binder lists.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Term::Const(_) | Term::Var(_) | Term::Meta(..) => true,
            Term::Conn(op, args) => {
                args.len() == op.arity() && args.iter().all(Term::is_well_formed)
            }
            Term::App(_, args) => args.len() == 2 && args.iter().all(Term::is_well_formed),
            Term::Quant(_, binders, body) => {
                let distinct: BTreeSet<_> = binders.iter().collect();
                !binders.is_empty() && distinct.len() == binders.len() && body.is_well_formed()
            }
        }
    }

    /// Names of the schematic variables occurring in the term.
    pub fn metas(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_metas(&mut out);
        out
    }

    fn collect_metas(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Meta(name, _) => {
                out.insert(name.clone());
            }
            _ => self.children().into_iter().for_each(|c| c.collect_metas(out)),
        }
    }

    pub fn has_metas(&self) -> bool {
        match self {
            Term::Meta(..) => true,
            _ => self.children().into_iter().any(Term::has_metas),
        }
    }

    /// Names introduced by any quantifier in the term.
    pub fn binder_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders(&self, out: &mut BTreeSet<String>) {
        if let Term::Quant(_, binders, _) = self {
            out.extend(binders.iter().cloned());
        }
        self.children().into_iter().for_each(|c| c.collect_binders(out));
    }

    /// Every variable name occurring anywhere, free or bound (binders included).
    pub fn all_var_names(&self) -> BTreeSet<String> {
        let mut out = self.binder_names();
        self.collect_var_occurrences(&mut out);
        out
    }

    fn collect_var_occurrences(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(name) => {
                out.insert(name.clone());
            }
            _ => self
                .children()
                .into_iter()
                .for_each(|c| c.collect_var_occurrences(out)),
        }
    }
}

impl Term {
    /// Copy with every schematic variable's class fixed by its position:
    /// operands of operators are expressions, all other positions predicates.
    pub fn with_meta_classes(self) -> Term {
        classify_metas(self, true)
    }

    /// Copy with every free plain variable turned into a schematic variable,
    /// classes fixed by position. This is how a stored schema or a theorem
    /// becomes a law pattern.
    pub fn schematized(&self) -> Term {
        classify_metas(schematize(self.clone(), &mut Vec::new()), true)
    }
}

fn classify_metas(t: Term, pred_position: bool) -> Term {
    match t {
        Term::Meta(name, _) => Term::Meta(
            name,
            if pred_position {
                MetaClass::Pred
            } else {
                MetaClass::Expr
            },
        ),
        Term::Conn(op, args) => Term::Conn(
            op,
            args.into_iter().map(|a| classify_metas(a, true)).collect(),
        ),
        Term::App(op, args) => Term::App(
            op,
            args.into_iter().map(|a| classify_metas(a, false)).collect(),
        ),
        Term::Quant(k, bs, body) => Term::Quant(k, bs, Box::new(classify_metas(*body, true))),
        other => other,
    }
}

fn schematize(t: Term, bound: &mut Vec<String>) -> Term {
    match t {
        Term::Var(name) if !bound.contains(&name) => Term::Meta(name, MetaClass::Expr),
        Term::Conn(op, args) => Term::Conn(op, args.into_iter().map(|a| schematize(a, bound)).collect()),
        Term::App(op, args) => Term::App(op, args.into_iter().map(|a| schematize(a, bound)).collect()),
        Term::Quant(k, bs, body) => {
            let mark = bound.len();
            bound.extend(bs.iter().cloned());
            let body = schematize(*body, bound);
            bound.truncate(mark);
            Term::Quant(k, bs, Box::new(body))
        }
        other => other,
    }
}

/// `var` must not occur free in whatever the schematic variable `target` is bound to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NotFreeIn {
    pub var: String,
    pub target: String,
}

/// Conjunction of freeness constraints. Empty means trivially true.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct SideCondition(pub Vec<NotFreeIn>);

impl SideCondition {
    pub fn none() -> Self {
        SideCondition(Vec::new())
    }

    pub fn not_free_in(pairs: &[(&str, &str)]) -> Self {
        SideCondition(
            pairs
                .iter()
                .map(|(v, t)| NotFreeIn {
                    var: v.to_string(),
                    target: t.to_string(),
                })
                .collect(),
        )
    }

    pub fn is_trivial(&self) -> bool {
        self.0.is_empty()
    }
}

impl std::fmt::Display for SideCondition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|c| format!("{} notin {}", c.var, c.target))
            .collect();
        f.write_str(&parts.join(", "))
    }
}

/// Instantiation of a law: schematic variables to terms, law binders to the
/// names they are renamed to.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Binding {
    pub terms: BTreeMap<String, Term>,
    pub binders: BTreeMap<String, String>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_term(mut self, name: impl Into<String>, t: Term) -> Self {
        self.terms.insert(name.into(), t);
        self
    }

    pub fn with_binder(mut self, from: impl Into<String>, to: impl Into<String>) -> Self {
        self.binders.insert(from.into(), to.into());
        self
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.binders.is_empty()
    }

    /// Entries of `other` are added; existing entries win.
    pub fn merged(&self, other: &Binding) -> Binding {
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.terms.entry(k.clone()).or_insert_with(|| v.clone());
        }
        for (k, v) in &other.binders {
            out.binders.entry(k.clone()).or_insert_with(|| v.clone());
        }
        out
    }

    /// Complete: every mapped term is free of schematic variables.
    pub fn is_complete(&self) -> bool {
        self.terms.values().all(|t| !t.has_metas())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("schematic variable ?{0} has no instance")]
    IncompleteBinding(String),
}

pub fn free_vars(t: &Term) -> BTreeSet<String> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(t, &mut bound, &mut out);
    out
}

fn collect_free<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
    match t {
        Term::Var(name) => {
            if !bound.contains(&name.as_str()) {
                out.insert(name.clone());
            }
        }
        Term::Quant(_, binders, body) => {
            let mark = bound.len();
            bound.extend(binders.iter().map(String::as_str));
            collect_free(body, bound, out);
            bound.truncate(mark);
        }
        _ => t
            .children()
            .into_iter()
            .for_each(|c| collect_free(c, bound, out)),
    }
}

/// Smallest primed variant of `base` (`x′`, `x′′`, ...) not in `avoid`.
/// With `allow_base`, `base` itself is tried first.
pub fn fresh_name(base: &str, avoid: &BTreeSet<String>, allow_base: bool) -> String {
    if allow_base && !avoid.contains(base) {
        return base.to_string();
    }
    let mut candidate = base.to_string();
    loop {
        candidate.push(PRIME);
        if !avoid.contains(&candidate) {
            return candidate;
        }
    }
}

/// Simultaneous, capture-avoiding substitution of `b` into `t`.
///
/// Law binders listed in `b.binders` are renamed as instructed. Other binders
/// keep their name unless it would capture a free variable of an inserted
/// term, in which case they get the smallest fresh primed variant.
pub fn substitute(t: &Term, b: &Binding) -> Result<Term, KernelError> {
    let mut renames = Vec::new();
    subst(t, b, &mut renames)
}

fn subst(t: &Term, b: &Binding, renames: &mut Vec<(String, String)>) -> Result<Term, KernelError> {
    Ok(match t {
        Term::Const(_) => t.clone(),
        Term::Var(name) => match renames.iter().rev().find(|(from, _)| from == name) {
            Some((_, to)) => Term::Var(to.clone()),
            None => t.clone(),
        },
        Term::Meta(name, _) => b
            .terms
            .get(name)
            .cloned()
            .ok_or_else(|| KernelError::IncompleteBinding(name.clone()))?,
        Term::Conn(op, args) => Term::Conn(
            *op,
            args.iter()
                .map(|a| subst(a, b, renames))
                .collect::<Result<_, _>>()?,
        ),
        Term::App(op, args) => Term::App(
            *op,
            args.iter()
                .map(|a| subst(a, b, renames))
                .collect::<Result<_, _>>()?,
        ),
        Term::Quant(kind, binders, body) => {
            let mut inserted_free = BTreeSet::new();
            for m in body.metas() {
                if let Some(image) = b.terms.get(&m) {
                    inserted_free.extend(free_vars(image));
                }
            }
            let mut avoid = inserted_free.clone();
            avoid.extend(body.all_var_names());
            avoid.extend(binders.iter().cloned());

            let mark = renames.len();
            let mut new_binders = Vec::with_capacity(binders.len());
            for x in binders {
                let target = match b.binders.get(x) {
                    Some(y) => y.clone(),
                    None if inserted_free.contains(x) => {
                        let fresh = fresh_name(x, &avoid, false);
                        avoid.insert(fresh.clone());
                        fresh
                    }
                    None => x.clone(),
                };
                renames.push((x.clone(), target.clone()));
                new_binders.push(target);
            }
            let new_body = subst(body, b, renames);
            renames.truncate(mark);
            Term::Quant(*kind, new_binders, Box::new(new_body?))
        }
    })
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_equal(a: &Term, b: &Term) -> bool {
    alpha_eq(a, b, &mut Vec::new(), &mut Vec::new())
}

fn bound_level(scope: &[String], name: &str) -> Option<usize> {
    scope.iter().rposition(|n| n == name)
}

fn alpha_eq(a: &Term, b: &Term, sa: &mut Vec<String>, sb: &mut Vec<String>) -> bool {
    match (a, b) {
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::Var(x), Term::Var(y)) => match (bound_level(sa, x), bound_level(sb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::Meta(x, cx), Term::Meta(y, cy)) => x == y && cx == cy,
        (Term::Conn(o1, a1), Term::Conn(o2, a2)) => {
            o1 == o2
                && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(x, y)| alpha_eq(x, y, sa, sb))
        }
        (Term::App(o1, a1), Term::App(o2, a2)) => {
            o1 == o2
                && a1.len() == a2.len()
                && a1.iter().zip(a2).all(|(x, y)| alpha_eq(x, y, sa, sb))
        }
        (Term::Quant(k1, b1, body1), Term::Quant(k2, b2, body2)) => {
            if k1 != k2 || b1.len() != b2.len() {
                return false;
            }
            let (ma, mb) = (sa.len(), sb.len());
            sa.extend(b1.iter().cloned());
            sb.extend(b2.iter().cloned());
            let eq = alpha_eq(body1, body2, sa, sb);
            sa.truncate(ma);
            sb.truncate(mb);
            eq
        }
        _ => false,
    }
}

/// Resolve the law-side variable named in a side condition to the goal-side
/// name it stands for under `b`.
fn resolve_var(var: &str, b: &Binding) -> String {
    if let Some(renamed) = b.binders.get(var) {
        return renamed.clone();
    }
    if let Some(Term::Var(v)) = b.terms.get(var) {
        return v.clone();
    }
    var.to_string()
}

pub fn check_side_condition(sc: &SideCondition, b: &Binding) -> Result<bool, KernelError> {
    for c in &sc.0 {
        let image = b
            .terms
            .get(&c.target)
            .ok_or_else(|| KernelError::IncompleteBinding(c.target.clone()))?;
        if free_vars(image).contains(&resolve_var(&c.var, b)) {
            return Ok(false);
        }
    }
    Ok(true)
}
