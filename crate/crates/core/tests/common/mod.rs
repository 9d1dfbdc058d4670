#![allow(dead_code)]

use eqproof::focus::FocusPath;
use eqproof::term::{substitute, Binding, Connective, MetaClass, Operator, Quantifier, Term};
use proptest::prelude::*;

pub const NAMES: &[&str] = &["a", "b", "e1", "e2", "x", "y"];

pub fn name() -> impl Strategy<Value = String> {
    prop::sample::select(NAMES).prop_map(str::to_string)
}

/// Set-valued expressions.
pub fn expr() -> impl Strategy<Value = Term> {
    name().prop_map(Term::Var).prop_recursive(3, 12, 2, |inner| {
        (prop::sample::select(&[Operator::Intsct, Operator::Union][..]), inner.clone(), inner)
            .prop_map(|(op, a, b)| Term::app(op, a, b))
    })
}

/// Names used as propositional variables.
pub const PRED_NAMES: &[&str] = &["p", "q"];

fn atom_pred() -> impl Strategy<Value = Term> {
    prop_oneof![
        any::<bool>().prop_map(Term::Const),
        prop::sample::select(PRED_NAMES).prop_map(Term::var),
        (name(), expr()).prop_map(|(x, s)| Term::member(Term::Var(x), s)),
        (expr(), expr()).prop_map(|(a, b)| Term::eq(a, b)),
    ]
}

/// Predicates over the names above.
pub fn pred() -> impl Strategy<Value = Term> {
    atom_pred().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::negate),
            (
                prop::sample::select(
                    &[Connective::And, Connective::Or, Connective::Implies, Connective::Equiv][..]
                ),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Term::conn(op, vec![a, b])),
            (
                prop::sample::select(&[Quantifier::Forall, Quantifier::Exists][..]),
                prop::sample::subsequence(NAMES, 1..=2),
                inner
            )
                .prop_map(|(k, bs, body)| Term::Quant(
                    k,
                    bs.into_iter().map(str::to_string).collect(),
                    Box::new(body)
                )),
        ]
    })
}

/// Any term a parser could produce, including odd operand shapes.
pub fn any_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        any::<bool>().prop_map(Term::Const),
        name().prop_map(Term::Var),
    ];
    leaf.prop_recursive(4, 32, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Term::negate),
            (
                prop::sample::select(
                    &[Connective::And, Connective::Or, Connective::Implies, Connective::Equiv][..]
                ),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Term::conn(op, vec![a, b])),
            (
                prop::sample::select(&[Operator::Eq, Operator::In, Operator::Intsct, Operator::Union][..]),
                inner.clone(),
                inner.clone()
            )
                .prop_map(|(op, a, b)| Term::app(op, a, b)),
            (
                prop::sample::select(&[Quantifier::Forall, Quantifier::Exists][..]),
                prop::sample::subsequence(NAMES, 1..=2),
                inner
            )
                .prop_map(|(k, bs, body)| Term::Quant(
                    k,
                    bs.into_iter().map(str::to_string).collect(),
                    Box::new(body)
                )),
        ]
    })
}

pub fn path() -> impl Strategy<Value = FocusPath> {
    prop::collection::vec(1usize..=12, 0..=8).prop_map(FocusPath)
}

/// Replace the subterm at `path` by `new`, written without the zipper.
pub fn replace_at(t: &Term, path: &[usize], new: &Term) -> Option<Term> {
    let Some((&k, rest)) = path.split_first() else {
        return Some(new.clone());
    };
    match t {
        Term::Conn(op, args) if (1..=args.len()).contains(&k) => {
            let mut args = args.clone();
            args[k - 1] = replace_at(&args[k - 1], rest, new)?;
            Some(Term::Conn(*op, args))
        }
        Term::App(op, args) if (1..=args.len()).contains(&k) => {
            let mut args = args.clone();
            args[k - 1] = replace_at(&args[k - 1], rest, new)?;
            Some(Term::App(*op, args))
        }
        Term::Quant(q, bs, body) if k == 1 => Some(Term::Quant(*q, bs.clone(), Box::new(replace_at(body, rest, new)?))),
        _ => None,
    }
}

/// Subterm at `path`, written without the zipper.
pub fn get_at<'a>(t: &'a Term, path: &[usize]) -> Option<&'a Term> {
    let Some((&k, rest)) = path.split_first() else {
        return Some(t);
    };
    match t {
        Term::Conn(_, args) | Term::App(_, args) => get_at(args.get(k.checked_sub(1)?)?, rest),
        Term::Quant(_, _, body) if k == 1 => get_at(body, rest),
        _ => None,
    }
}

/// Every valid path of `t`, computed without the zipper.
pub fn paths_of(t: &Term) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    let kids: Vec<&Term> = match t {
        Term::Conn(_, a) | Term::App(_, a) => a.iter().collect(),
        Term::Quant(_, _, b) => vec![b.as_ref()],
        _ => vec![],
    };
    for (i, c) in kids.into_iter().enumerate() {
        for mut p in paths_of(c) {
            p.insert(0, i + 1);
            out.push(p);
        }
    }
    out
}

/// A term with a random one of its paths.
pub fn term_and_path(t: impl Strategy<Value = Term>) -> impl Strategy<Value = (Term, Vec<usize>)> {
    t.prop_flat_map(|t| {
        let ps = paths_of(&t);
        (Just(t), prop::sample::select(ps))
    })
}

fn meta_classes(t: &Term, out: &mut Vec<(String, MetaClass)>) {
    if let Term::Meta(n, c) = t {
        if !out.iter().any(|(m, _)| m == n) {
            out.push((n.clone(), *c));
        }
    }
    for c in t.children() {
        meta_classes(c, out);
    }
}

pub fn metas_with_class(t: &Term) -> Vec<(String, MetaClass)> {
    let mut out = Vec::new();
    meta_classes(t, &mut out);
    out
}

/// A law-like pattern (free variables schematic) with a complete binding
/// whose images suit each schematic variable's class.
pub fn pattern_and_binding() -> impl Strategy<Value = (Term, Binding)> {
    pred()
        .prop_filter("law binders are distinct", |t| {
            eqproof::theory::repeated_binder(t).is_none()
        })
        .prop_flat_map(|t| {
            let pattern = t.schematized();
            let metas = metas_with_class(&pattern);
            let images: Vec<BoxedStrategy<Term>> = metas
                .iter()
                .map(|(_, c)| match c {
                    MetaClass::Expr => expr().boxed(),
                    MetaClass::Pred => pred().boxed(),
                })
                .collect();
            (Just(pattern), Just(metas), images).prop_map(|(p, metas, imgs)| {
                let mut b = Binding::new();
                for ((n, _), img) in metas.into_iter().zip(imgs) {
                    b.terms.insert(n, img);
                }
                (p, b)
            })
        })
}

/// Rename every binder of `t` to `b<n>`, keeping free variables.
pub fn rebind(t: &Term, n: &mut usize, scope: &mut Vec<(String, String)>) -> Term {
    match t {
        Term::Var(v) => match scope.iter().rev().find(|(f, _)| f == v) {
            Some((_, to)) => Term::Var(to.clone()),
            None => t.clone(),
        },
        Term::Conn(op, a) => Term::Conn(*op, a.iter().map(|c| rebind(c, n, scope)).collect()),
        Term::App(op, a) => Term::App(*op, a.iter().map(|c| rebind(c, n, scope)).collect()),
        Term::Quant(q, bs, body) => {
            let mark = scope.len();
            let nb: Vec<String> = bs
                .iter()
                .map(|b| {
                    *n += 1;
                    let to = format!("b{n}");
                    scope.push((b.clone(), to.clone()));
                    to
                })
                .collect();
            let body = rebind(body, n, scope);
            scope.truncate(mark);
            Term::Quant(*q, nb, Box::new(body))
        }
        _ => t.clone(),
    }
}

pub fn subject_for() -> impl Strategy<Value = (Term, Term)> {
    prop_oneof![
        // instance of the pattern, binders renamed apart
        pattern_and_binding().prop_map(|(p, b)| {
            let s = substitute(&p, &b).unwrap();
            let s = rebind(&s, &mut 0, &mut Vec::new());
            (p, s)
        }),
        // unrelated subject
        (pattern_and_binding(), pred()).prop_map(|((p, _), s)| (p, s)),
        // subject built from a sibling pattern
        (pattern_and_binding(), pattern_and_binding())
            .prop_map(|((p, _), (q, c))| (p, substitute(&q, &c).unwrap())),
    ]
}
