//! The preloaded stack: `_ROOT`, Logic, Equality and Sets.

use crate::theory::{
    conjecture_from_row, law_from_row, Provenance, RowInput, SideConditionFile, Theory, TheoryStack,
    ROOT_THEORY,
};

type LawRow<'a> = (&'a str, &'a str, &'a [(&'a str, &'a str)]);

const ROOT_LAWS: &[LawRow] = &[("false-def", "FALSE == ~TRUE", &[])];

const LOGIC_LAWS: &[LawRow] = &[
    ("/\\-comm", "P /\\ Q == Q /\\ P", &[]),
    ("\\/-comm", "P \\/ Q == Q \\/ P", &[]),
    ("Ax-==-id", "TRUE == (P == P)", &[]),
    ("forall-vac", "(forall x @ P) == P", &[("x", "P")]),
    ("or-absorb", "A \\/ (A /\\ B) == A", &[]),
];

const EQUALITY_LAWS: &[LawRow] = &[("=-refl", "(e = e) == TRUE", &[])];

const SETS_LAWS: &[LawRow] = &[
    (
        "set-extensionality",
        "(S = T) == (forall x @ (x in S) == (x in T))",
        &[("x", "S"), ("x", "T")],
    ),
    ("in-intersect", "(x in (S intsct T)) == ((x in S) /\\ (x in T))", &[]),
    ("in-union", "(x in (S union T)) == ((x in S) \\/ (x in T))", &[]),
];

const SETS_CONJECTURES: &[(&str, &str)] = &[
    ("intsct-comm", "e1 intsct e2 = e2 intsct e1"),
    ("intsct-idem", "e1 intsct e1 = e1"),
];

fn row(name: &str, schema: &str, sc: &[(&str, &str)]) -> RowInput {
    RowInput {
        name: name.to_string(),
        schema: schema.to_string(),
        side_conditions: sc
            .iter()
            .map(|(v, m)| SideConditionFile {
                not_free_in: (v.to_string(), m.to_string()),
            })
            .collect(),
        provenance: Some(Provenance::Axiom),
    }
}

fn theory(name: &str, laws: &[LawRow], conjectures: &[(&str, &str)]) -> Theory {
    let mut th = Theory::new(name);
    for (n, s, sc) in laws {
        th.laws
            .push(law_from_row(&row(n, s, sc), name, Provenance::Axiom, n).expect("seed law is valid"));
    }
    for (n, s) in conjectures {
        th.conjectures
            .push(conjecture_from_row(&row(n, s, &[]), n).expect("seed conjecture is valid"));
    }
    th
}

/// The four preloaded theories, bottom first.
pub fn seed_stack() -> TheoryStack {
    TheoryStack::from_theories(vec![
        theory(ROOT_THEORY, ROOT_LAWS, &[]),
        theory("Logic", LOGIC_LAWS, &[]),
        theory("Equality", EQUALITY_LAWS, &[]),
        theory("Sets", SETS_LAWS, SETS_CONJECTURES),
    ])
    .expect("seed stack is valid")
}
