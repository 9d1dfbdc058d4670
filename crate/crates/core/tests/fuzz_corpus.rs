//! Runs the fuzz targets' checks over the checked-in corpus seeds and over
//! random text, so they are exercised on a stable toolchain too.

use std::path::{Path, PathBuf};

use eqproof::script::{parse_script, replay};
use eqproof::seed::seed_stack;
use eqproof::syntax::{parse_path, parse_schema, parse_term, render_path, render_schema, render_term};
use eqproof::theory::TheoryStack;
use proptest::prelude::*;

fn check_term(src: &str) {
    if let Ok(t) = parse_term(src) {
        let text = render_term(&t);
        assert_eq!(parse_term(&text).as_ref(), Ok(&t), "{text}");
    }
}

fn check_schema(src: &str) {
    if let Ok(t) = parse_schema(src) {
        let text = render_schema(&t);
        assert_eq!(parse_schema(&text).as_ref(), Ok(&t), "{text}");
    }
}

fn check_path(src: &str) {
    if let Ok(p) = parse_path(src) {
        assert_eq!(parse_path(&render_path(&p)), Ok(p));
    }
}

fn check_script(src: &str) {
    if let Ok(script) = parse_script(src) {
        let _ = replay(&seed_stack(), &script);
    }
}

fn check_stack(src: &str) {
    if let Ok(stack) = TheoryStack::from_json(src, "fuzz") {
        let again = TheoryStack::from_json(&stack.to_json(), "fuzz").expect("saved stack reloads");
        assert_eq!(again, stack);
    }
}

fn seeds(target: &str) -> Vec<(PathBuf, String)> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus").join(target);
    let mut out: Vec<_> = std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .map(|e| {
            let p = e.unwrap().path();
            let text = std::fs::read_to_string(&p).unwrap();
            (p, text)
        })
        .collect();
    out.sort();
    assert!(!out.is_empty(), "no seeds for {target}");
    out
}

#[test]
fn corpus_seeds_pass_target_checks() {
    type Check = fn(&str);
    let targets: [(&str, Check); 5] = [
        ("parse_term", check_term),
        ("parse_schema", check_schema),
        ("parse_path", check_path),
        ("parse_script", check_script),
        ("load_stack_json", check_stack),
    ];
    for (target, check) in targets {
        for (path, text) in seeds(target) {
            eprintln!("{}", path.display());
            check(&text);
        }
    }
}

#[test]
fn seed_corpus_parses() {
    for (p, text) in seeds("parse_term").iter().filter(|(p, _)| !p.ends_with("truncated")) {
        assert!(parse_term(text).is_ok(), "{}", p.display());
    }
    for (p, text) in seeds("parse_schema") {
        assert!(parse_schema(&text).is_ok(), "{}", p.display());
    }
    assert!(TheoryStack::from_json(&seeds("load_stack_json")[1].1, "seed").is_ok());
}

const ALPHABET: &str = "[a-z0-9 ()@.,=~/\\\\?′'$:\n\"{}\\[\\]]{0,40}";

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn random_text_never_panics(src in ALPHABET) {
        check_term(&src);
        check_schema(&src);
        check_path(&src);
        check_script(&src);
        check_stack(&src);
    }

    #[test]
    fn token_soup_never_panics(toks in prop::collection::vec(prop::sample::select(&[
        "forall", "exists", "x", "e1", "@", "(", ")", "==", "=>", "\\/", "/\\", "~", "=", "in",
        "intsct", "union", "TRUE", "FALSE", "?P", ",", "1", ".",
    ][..]), 0..16)) {
        let src = toks.join(" ");
        check_term(&src);
        check_schema(&src);
        check_path(&src);
    }
}
