use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eqproof::seed::seed_stack;
use eqproof::theory::{EditAction, RowInput, Table};

fn data(file: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(file)
}

fn eqproof(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqproof")).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SCRIPT: &str = include_str!("../../../data/intsct-comm.script");
const GOLDEN: &str = include_str!("../../../data/intsct-comm.golden");

#[test]
fn flag_and_positional_forms_agree() {
    let stack = data("seed.stack");
    let script = data("intsct-comm.script");
    let a = eqproof(&["replay", stack.to_str().unwrap(), script.to_str().unwrap()]);
    let b = eqproof(&["replay", "--stack", stack.to_str().unwrap(), "--script", script.to_str().unwrap()]);
    let c = eqproof(&["replay", script.to_str().unwrap()]);
    for o in [&a, &b, &c] {
        assert_eq!(o.status.code(), Some(0), "{}", stderr(o));
        assert_eq!(String::from_utf8_lossy(&o.stdout), GOLDEN);
    }
}

#[test]
fn out_flag_writes_the_transcript() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t.txt");
    let o = eqproof(&["replay", "--script", data("intsct-comm.script").to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(out).unwrap(), GOLDEN);
}

#[test]
fn transcript_replays_as_a_script() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("golden.script");
    std::fs::write(&file, GOLDEN).unwrap();
    let o = eqproof(&["replay", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(String::from_utf8_lossy(&o.stdout), GOLDEN);
}

#[test]
fn wrong_path_names_the_step() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.script");
    std::fs::write(&file, SCRIPT.replace("in-intersect (L-to-R) @1.1", "in-intersect (L-to-R) @2.1")).unwrap();
    let o = eqproof(&["replay", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("step 2"), "{}", stderr(&o));
}

#[test]
fn side_condition_violation_is_diagnosed() {
    let dir = tempfile::tempdir().unwrap();
    let stack_file = dir.path().join("stack.json");
    let mut stack = seed_stack()
        .edit_table(
            "Logic",
            Table::Conjectures,
            EditAction::Add,
            &RowInput {
                name: "vac".into(),
                schema: "forall x @ x in s".into(),
                ..Default::default()
            },
        )
        .unwrap();
    stack.save(&stack_file).unwrap();
    let script = dir.path().join("vac.script");
    std::fs::write(&script, "Proof for 'Logic$vac\nStrategy: Reduce to TRUE\nforall-vac (L-to-R) @\n").unwrap();
    let o = eqproof(&["replay", stack_file.to_str().unwrap(), script.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("step 1") && err.contains("side condition"), "{err}");
}

#[test]
fn incomplete_script_fails() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("part.script");
    let partial: Vec<&str> = SCRIPT.lines().take(5).collect();
    std::fs::write(&file, partial.join("\n")).unwrap();
    let o = eqproof(&["replay", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("incomplete"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(eqproof(&["replay"]).status.code(), Some(2));
    assert_eq!(eqproof(&["replay", "/no/such/file"]).status.code(), Some(2));
    assert_eq!(eqproof(&["frobnicate"]).status.code(), Some(2));
    let o = eqproof(&["menu", "--theory", "Sets", "--goal", "TRUE", "--path", "@3"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn menu_lists_set_extensionality_first_goal() {
    let o = eqproof(&["menu", "--theory", "Sets", "--goal", "e1 intsct e2 = e2 intsct e1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("EXPR : B"));
    let rows: Vec<&str> = lines.collect();
    assert!(!rows.is_empty() && rows.len() <= 20);
    assert!(rows.iter().any(|l| l.contains("set-extensionality (L-to-R) [Sets]")
        && l.contains("forall x @ (x in (e1 intsct e2)) == (x in (e2 intsct e1))")));
    let again = eqproof(&["menu", "--theory", "Sets", "--goal", "e1 intsct e2 = e2 intsct e1"]);
    assert_eq!(String::from_utf8(again.stdout).unwrap(), text);
}

#[test]
fn menu_respects_limit_and_ranking() {
    let o = eqproof(&["menu", "--theory", "Sets", "--goal", "TRUE", "--limit", "2", "--ranking", "alphabetical"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().count() <= 3, "{text}");
}

#[test]
fn seed_matches_shipped_stack() {
    let o = eqproof(&["seed"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(o.stdout, std::fs::read(data("seed.stack")).unwrap());
}
