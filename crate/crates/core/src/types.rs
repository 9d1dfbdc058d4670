//! Monomorphic type inference for goals and law schemas.
//!
//! Operator signatures are fixed:
//!
//! ```text
//! in             : (t, Set(t)) -> B
//! intsct, union  : (Set(t), Set(t)) -> Set(t)
//! =              : (t, t) -> B
//! connectives    : B ... -> B
//! quantifiers    : body B -> B
//! ```
//!
//! Each free variable gets one type per goal. Results are reported with type
//! variables renamed `t1, t2, ...` in first-use order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::focus::{all_paths, subterm_at, FocusPath, Focused};
use crate::term::{Binding, MetaClass, Operator, Term};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Bool,
    Set(Box<Type>),
    Var(String),
}

impl Type {
    pub fn set(elem: Type) -> Type {
        Type::Set(Box::new(elem))
    }

    pub fn var(name: impl Into<String>) -> Type {
        Type::Var(name.into())
    }

    fn occurs(&self, v: &str) -> bool {
        match self {
            Type::Bool => false,
            Type::Set(e) => e.occurs(v),
            Type::Var(w) => v == w,
        }
    }

    fn collect_vars(&self, out: &mut Vec<String>) {
        match self {
            Type::Bool => {}
            Type::Set(e) => e.collect_vars(out),
            Type::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
        }
    }

    fn rename(&self, f: &dyn Fn(&str) -> String) -> Type {
        match self {
            Type::Bool => Type::Bool,
            Type::Set(e) => Type::set(e.rename(f)),
            Type::Var(v) => Type::Var(f(v)),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Bool => f.write_str("B"),
            Type::Set(e) => write!(f, "Set({e})"),
            Type::Var(v) => f.write_str(v),
        }
    }
}

impl Serialize for Type {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("cannot unify {0} with {1}")]
    UnifyFail(Type, Type),
    #[error("type variable {0} occurs in {1}")]
    OccursCheck(String, Type),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error at {at}: {cause}")]
pub struct TypeError {
    pub at: FocusPath,
    pub cause: UnifyError,
}

/// Idempotent substitution over type variables.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Subst(pub BTreeMap<String, Type>);

impl Subst {
    pub fn apply(&self, t: &Type) -> Type {
        match t {
            Type::Bool => Type::Bool,
            Type::Set(e) => Type::set(self.apply(e)),
            Type::Var(v) => self.0.get(v).cloned().unwrap_or_else(|| t.clone()),
        }
    }

    fn bind(&mut self, v: &str, t: Type) {
        let single = Subst(BTreeMap::from([(v.to_string(), t.clone())]));
        for existing in self.0.values_mut() {
            *existing = single.apply(existing);
        }
        self.0.insert(v.to_string(), t);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Most general unifier of `a` and `b`.
pub fn unify(a: &Type, b: &Type) -> Result<Subst, UnifyError> {
    let mut s = Subst::default();
    unify_into(a, b, &mut s)?;
    Ok(s)
}

fn unify_into(a: &Type, b: &Type, s: &mut Subst) -> Result<(), UnifyError> {
    let (a, b) = (s.apply(a), s.apply(b));
    match (&a, &b) {
        (Type::Bool, Type::Bool) => Ok(()),
        (Type::Var(x), Type::Var(y)) if x == y => Ok(()),
        (Type::Var(x), t) | (t, Type::Var(x)) => {
            if t.occurs(x) {
                return Err(UnifyError::OccursCheck(x.clone(), t.clone()));
            }
            s.bind(x, t.clone());
            Ok(())
        }
        (Type::Set(x), Type::Set(y)) => unify_into(x, y, s),
        _ => Err(UnifyError::UnifyFail(a, b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FocusClass {
    #[serde(rename = "EXPR")]
    Expr,
    #[serde(rename = "PRED")]
    Pred,
}

impl FocusClass {
    pub fn of(t: &Term) -> FocusClass {
        if t.is_predicate_form() {
            FocusClass::Pred
        } else {
            FocusClass::Expr
        }
    }
}

impl fmt::Display for FocusClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FocusClass::Expr => "EXPR",
            FocusClass::Pred => "PRED",
        })
    }
}

/// Result of inference: variable types plus the class and type of the
/// analyzed (focused) subterm. Schematic variables are keyed `?name`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TypeAssignment {
    pub var_types: BTreeMap<String, Type>,
    pub focus_class: FocusClass,
    pub focus_type: Type,
}

impl TypeAssignment {
    /// `EXPR : B`-style status text.
    pub fn status_line(&self) -> String {
        format!("{} : {}", self.focus_class, self.focus_type)
    }
}

/// Key under which a schematic variable's type is stored.
pub fn meta_key(name: &str) -> String {
    format!("?{name}")
}

struct Inferencer {
    prefix: &'static str,
    counter: usize,
    subst: Subst,
    free: BTreeMap<String, Type>,
    free_order: Vec<String>,
    scope: Vec<(String, Type)>,
    target: Option<FocusPath>,
    at_target: Option<(Type, Vec<(String, Type)>)>,
}

impl Inferencer {
    fn new(prefix: &'static str) -> Self {
        Inferencer {
            prefix,
            counter: 0,
            subst: Subst::default(),
            free: BTreeMap::new(),
            free_order: Vec::new(),
            scope: Vec::new(),
            target: None,
            at_target: None,
        }
    }

    fn fresh(&mut self) -> Type {
        self.counter += 1;
        Type::Var(format!("{}{}", self.prefix, self.counter))
    }

    fn free_var(&mut self, key: String) -> Type {
        if let Some(t) = self.free.get(&key) {
            return t.clone();
        }
        let t = self.fresh();
        self.free.insert(key.clone(), t.clone());
        self.free_order.push(key);
        t
    }

    fn constrain(&mut self, a: &Type, b: &Type, at: &[usize]) -> Result<(), TypeError> {
        unify_into(a, b, &mut self.subst).map_err(|cause| TypeError {
            at: FocusPath(at.to_vec()),
            cause,
        })
    }

    fn infer(&mut self, t: &Term, path: &mut Vec<usize>) -> Result<Type, TypeError> {
        let ty = self.infer_node(t, path)?;
        if self.target.as_ref().is_some_and(|p| p.0 == *path) {
            self.at_target = Some((ty.clone(), self.scope.clone()));
        }
        Ok(ty)
    }

    fn child(&mut self, t: &Term, path: &mut Vec<usize>, i: usize) -> Result<Type, TypeError> {
        path.push(i);
        let ty = self.infer(t, path);
        path.pop();
        ty
    }

    fn infer_node(&mut self, t: &Term, path: &mut Vec<usize>) -> Result<Type, TypeError> {
        match t {
            Term::Const(_) => Ok(Type::Bool),
            Term::Var(name) => {
                if let Some((_, ty)) = self.scope.iter().rev().find(|(n, _)| n == name) {
                    return Ok(ty.clone());
                }
                Ok(self.free_var(name.clone()))
            }
            Term::Meta(name, class) => {
                let ty = self.free_var(meta_key(name));
                if *class == MetaClass::Pred {
                    self.constrain(&ty, &Type::Bool, path)?;
                }
                Ok(ty)
            }
            Term::Conn(_, args) => {
                for (i, a) in args.iter().enumerate() {
                    let ty = self.child(a, path, i + 1)?;
                    path.push(i + 1);
                    let r = self.constrain(&ty, &Type::Bool, path);
                    path.pop();
                    r?;
                }
                Ok(Type::Bool)
            }
            Term::Quant(_, binders, body) => {
                let mark = self.scope.len();
                for b in binders {
                    let ty = self.fresh();
                    self.scope.push((b.clone(), ty));
                }
                let ty = self.child(body, path, 1);
                self.scope.truncate(mark);
                let ty = ty?;
                path.push(1);
                let r = self.constrain(&ty, &Type::Bool, path);
                path.pop();
                r?;
                Ok(Type::Bool)
            }
            Term::App(op, args) => {
                let left = self.child(&args[0], path, 1)?;
                let right = self.child(&args[1], path, 2)?;
                let mut blame = |me: &mut Self, i: usize, a: &Type, b: &Type| {
                    path.push(i);
                    let r = me.constrain(a, b, path);
                    path.pop();
                    r
                };
                match op {
                    Operator::In => {
                        blame(self, 2, &right, &Type::set(left.clone()))?;
                        Ok(Type::Bool)
                    }
                    Operator::Eq => {
                        blame(self, 2, &right, &left)?;
                        Ok(Type::Bool)
                    }
                    Operator::Intsct | Operator::Union => {
                        let elem = Type::set(self.fresh());
                        blame(self, 1, &left, &elem)?;
                        blame(self, 2, &right, &elem)?;
                        Ok(elem)
                    }
                }
            }
        }
    }
}

/// Rename type variables to `t1, t2, ...` in the order they first appear
/// across `types`.
fn normalize_names<'a>(types: impl Iterator<Item = &'a Type>) -> BTreeMap<String, String> {
    let mut order = Vec::new();
    for t in types {
        t.collect_vars(&mut order);
    }
    order
        .into_iter()
        .enumerate()
        .map(|(i, v)| (v, format!("t{}", i + 1)))
        .collect()
}

fn finish(
    inf: &Inferencer,
    extra: &[(String, Type)],
    focus_class: FocusClass,
    focus_type: &Type,
) -> TypeAssignment {
    let mut ordered: Vec<(String, Type)> = inf
        .free_order
        .iter()
        .map(|k| (k.clone(), inf.subst.apply(&inf.free[k])))
        .collect();
    for (name, ty) in extra {
        ordered.retain(|(k, _)| k != name);
        ordered.push((name.clone(), inf.subst.apply(ty)));
    }
    let focus_type = inf.subst.apply(focus_type);
    let names = normalize_names(ordered.iter().map(|(_, t)| t).chain([&focus_type]));
    let rename = |v: &str| names.get(v).cloned().unwrap_or_else(|| v.to_string());
    TypeAssignment {
        var_types: ordered
            .into_iter()
            .map(|(k, t)| (k, t.rename(&rename)))
            .collect(),
        focus_class,
        focus_type: focus_type.rename(&rename),
    }
}

/// Infer types for a whole term, reporting the term itself as the focus.
pub fn infer(t: &Term) -> Result<TypeAssignment, TypeError> {
    let mut inf = Inferencer::new("_");
    let ty = inf.infer(t, &mut Vec::new())?;
    Ok(finish(&inf, &[], FocusClass::of(t), &ty))
}

/// Infer types for the whole goal and report the focused subterm. The
/// variable map covers the free variables of the goal plus the binders in
/// scope at the focus, which together are the free variables of the focus.
pub fn infer_focus(f: &Focused) -> Result<TypeAssignment, TypeError> {
    infer_at(&f.root(), &f.path())
}

fn infer_at(root: &Term, path: &FocusPath) -> Result<TypeAssignment, TypeError> {
    let focus = subterm_at(root, path).expect("caller passes a valid path");
    let mut inf = Inferencer::new("_");
    inf.target = Some(path.clone());
    inf.infer(root, &mut Vec::new())?;
    let (ty, scope) = inf.at_target.clone().expect("target path visited");
    Ok(finish(&inf, &scope, FocusClass::of(focus), &ty))
}

/// Type of every node of `t`, keyed by path. Used by tests and the UI.
pub fn node_types(t: &Term) -> Result<BTreeMap<FocusPath, Type>, TypeError> {
    let mut out = BTreeMap::new();
    for p in all_paths(t) {
        let a = infer_at(t, &p)?;
        out.insert(p, a.focus_type);
    }
    Ok(out)
}

/// Does every instantiated schematic variable get a term whose type (in the
/// goal environment) agrees with the type the law demands? One substitution
/// is shared across the whole binding.
pub fn types_compatible(binding: &Binding, law_env: &TypeAssignment, goal_env: &TypeAssignment) -> bool {
    let mut inf = Inferencer::new("_c");
    for (name, ty) in &goal_env.var_types {
        inf.free.insert(name.clone(), ty.clone());
    }
    let law_vars: BTreeSet<String> = {
        let mut vs = Vec::new();
        law_env.var_types.values().for_each(|t| t.collect_vars(&mut vs));
        vs.into_iter().collect()
    };
    let apart = |v: &str| {
        if law_vars.contains(v) {
            format!("_law{v}")
        } else {
            v.to_string()
        }
    };
    for (name, image) in &binding.terms {
        let Some(law_ty) = law_env.var_types.get(&meta_key(name)) else {
            continue;
        };
        let law_ty = law_ty.rename(&apart);
        let Ok(image_ty) = inf.infer(image, &mut Vec::new()) else {
            return false;
        };
        if unify_into(&law_ty, &image_ty, &mut inf.subst).is_err() {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_schema, parse_term};

    fn tv(n: &str) -> Type {
        Type::var(n)
    }

    #[test]
    fn unify_examples() {
        let s = unify(&Type::set(tv("t")), &Type::set(Type::Bool)).unwrap();
        assert_eq!(s.0, BTreeMap::from([("t".to_string(), Type::Bool)]));
        assert!(unify(&tv("t"), &tv("t")).unwrap().is_empty());
        assert_eq!(
            unify(&tv("t"), &Type::set(tv("t"))),
            Err(UnifyError::OccursCheck("t".into(), Type::set(tv("t"))))
        );
        assert!(matches!(
            unify(&Type::Bool, &Type::set(tv("a"))),
            Err(UnifyError::UnifyFail(..))
        ));
    }

    #[test]
    fn substitution_stays_idempotent() {
        let a = Type::set(tv("a"));
        let mut s = Subst::default();
        unify_into(&tv("b"), &a, &mut s).unwrap();
        unify_into(&tv("a"), &Type::Bool, &mut s).unwrap();
        assert_eq!(s.apply(&tv("b")), Type::set(Type::Bool));
        assert_eq!(s.0["b"], Type::set(Type::Bool));
    }

    #[test]
    fn intersection_equation() {
        let a = infer(&parse_term("e1 intsct e2 = e2 intsct e1").unwrap()).unwrap();
        let st = Type::set(tv("t1"));
        assert_eq!(a.var_types["e1"], st);
        assert_eq!(a.var_types["e2"], st);
        assert_eq!(a.focus_class, FocusClass::Expr);
        assert_eq!(a.focus_type, Type::Bool);
        let goal = parse_term("e1 intsct e2 = e2 intsct e1").unwrap();
        for side in [1, 2] {
            let f = Focused::at_path(goal.clone(), &FocusPath(vec![side])).unwrap();
            let s = infer_focus(&f).unwrap();
            assert_eq!(s.focus_type, st);
        }
    }

    #[test]
    fn predicate_constant() {
        let a = infer(&Term::Const(true)).unwrap();
        assert_eq!(a.focus_class, FocusClass::Pred);
        assert_eq!(a.status_line(), "PRED : B");
    }

    #[test]
    fn membership_focus() {
        let a = infer(&parse_term("x in (e1 intsct e2)").unwrap()).unwrap();
        assert_eq!(a.focus_class, FocusClass::Expr);
        assert_eq!(a.focus_type, Type::Bool);
        assert_eq!(a.var_types["x"], tv("t1"));
        assert_eq!(a.var_types["e1"], Type::set(tv("t1")));
        assert_eq!(a.var_types["e2"], Type::set(tv("t1")));
    }

    #[test]
    fn focus_inside_binder_sees_bound_variable() {
        let goal =
            parse_term("forall x @ (x in (e1 intsct e2)) == (x in (e2 intsct e1))").unwrap();
        let f = Focused::at_path(goal, &FocusPath(vec![1, 1])).unwrap();
        let a = infer_focus(&f).unwrap();
        assert_eq!(a.status_line(), "EXPR : B");
        assert_eq!(a.var_types["x"], tv("t1"));
        assert_eq!(a.var_types["e1"], Type::set(tv("t1")));
    }

    #[test]
    fn type_errors_point_at_subterm() {
        let e = infer(&parse_term("(x in e1) intsct e2").unwrap()).unwrap_err();
        assert_eq!(e.at, FocusPath(vec![1]));
        let e = infer(&parse_term("p /\\ (a intsct b)").unwrap()).unwrap_err();
        assert_eq!(e.at, FocusPath(vec![2]));
        let e = infer(&parse_term("x in x").unwrap()).unwrap_err();
        assert!(matches!(e.cause, UnifyError::OccursCheck(..)));
    }

    #[test]
    fn law_schema_types() {
        let law = parse_schema("(x in (S intsct T)) == ((x in S) /\\ (x in T))").unwrap();
        let a = infer(&law).unwrap();
        assert_eq!(a.var_types["?x"], tv("t1"));
        assert_eq!(a.var_types["?S"], Type::set(tv("t1")));
        let law = parse_schema("P /\\ Q == Q /\\ P").unwrap();
        assert_eq!(infer(&law).unwrap().var_types["?P"], Type::Bool);
    }

    #[test]
    fn compatibility_of_bindings() {
        let law = parse_schema("(x in (S intsct T)) == ((x in S) /\\ (x in T))").unwrap();
        let law_env = infer(&law).unwrap();
        let goal =
            parse_term("forall x @ (x in (e1 intsct e2)) == (x in (e2 intsct e1))").unwrap();
        let goal_env = infer_focus(&Focused::at_path(goal, &FocusPath(vec![1, 1])).unwrap()).unwrap();
        let ok = Binding::new()
            .with_term("x", Term::var("x"))
            .with_term("S", Term::var("e1"))
            .with_term("T", Term::var("e2"));
        assert!(types_compatible(&ok, &law_env, &goal_env));
        assert!(types_compatible(&Binding::new(), &law_env, &goal_env));

        // S must be a set; `x in e1` is boolean
        let other = parse_term("(x in e1) /\\ (e2 = e2)").unwrap();
        let env = infer(&other).unwrap();
        let bad = Binding::new()
            .with_term("S", parse_term("x in e1").unwrap())
            .with_term("T", Term::var("e2"));
        assert!(!types_compatible(&bad, &law_env, &env));
        // element type must agree between x and S
        let mixed = Binding::new()
            .with_term("x", Term::var("e1"))
            .with_term("S", Term::var("e1"));
        assert!(!types_compatible(&mixed, &law_env, &env));
    }
}
