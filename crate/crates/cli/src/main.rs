//! `eqproof`: replay proof scripts, list applicable laws, write the seed stack.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use eqproof::focus::{FocusPath, Focused};
use eqproof::matcher::{applicable_laws, RankingHeuristic, DEFAULT_MENU_LIMIT};
use eqproof::script::replay_text;
use eqproof::seed::seed_stack;
use eqproof::syntax::{parse_path, parse_term};
use eqproof::theory::TheoryStack;
use eqproof::types::infer_focus;

#[derive(Debug, Parser)]
#[command(name = "eqproof", version, about = "Equational proof assistant driver")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replay a proof script and print its transcript.
    Replay {
        /// Stack file (positional form).
        #[arg(value_name = "STACK")]
        stack_pos: Option<PathBuf>,
        /// Script file (positional form).
        #[arg(value_name = "SCRIPT")]
        script_pos: Option<PathBuf>,
        /// Theory stack; the built-in seed if omitted.
        #[arg(long)]
        stack: Option<PathBuf>,
        #[arg(long)]
        script: Option<PathBuf>,
        /// Write the transcript here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the ranked laws applicable to a focus.
    Menu {
        #[arg(long)]
        stack: Option<PathBuf>,
        #[arg(long)]
        theory: String,
        #[arg(long)]
        goal: String,
        #[arg(long, default_value = "@")]
        path: String,
        #[arg(long, default_value_t = DEFAULT_MENU_LIMIT)]
        limit: usize,
        #[arg(long, default_value = "standard")]
        ranking: RankingHeuristic,
    },
    /// Write the built-in seed stack as JSON.
    Seed {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure with its exit code: 1 for a failed proof, 2 for bad input.
struct Failure(u8, String);

fn usage(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn load_stack(path: Option<&Path>) -> Result<TheoryStack, Failure> {
    match path {
        Some(p) => TheoryStack::load(p).map_err(|e| usage(e.to_string())),
        None => Ok(seed_stack()),
    }
}

fn write_out(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn replay(stack: Option<&Path>, script: &Path, out: Option<&Path>) -> Result<(), Failure> {
    let stack = load_stack(stack)?;
    let src = fs::read_to_string(script).map_err(|e| usage(format!("{}: {e}", script.display())))?;
    let state = replay_text(&stack, &src).map_err(|e| {
        let msg = match e.step_index() {
            Some(i) => format!("proof failed at step {i}: {e}"),
            None => format!("proof failed: {e}"),
        };
        Failure(1, msg)
    })?;
    write_out(out, &state.transcript())?;
    if state.is_complete() {
        Ok(())
    } else {
        Err(Failure(
            1,
            format!("proof incomplete after {} steps", state.steps().len()),
        ))
    }
}

fn menu(
    stack: Option<&Path>,
    theory: &str,
    goal: &str,
    path: &str,
    limit: usize,
    ranking: RankingHeuristic,
) -> Result<(), Failure> {
    let stack = load_stack(stack)?;
    let goal = parse_term(goal).map_err(|e| usage(format!("goal: {e}")))?;
    let path: FocusPath = parse_path(path).map_err(|e| usage(format!("path: {e}")))?;
    let focused = Focused::at_path(goal, &path).map_err(|e| usage(e.to_string()))?;
    if let Ok(a) = infer_focus(&focused) {
        println!("{}", a.status_line());
    }
    let menu = applicable_laws(&focused, &stack, theory, limit, ranking).map_err(|e| usage(e.to_string()))?;
    for (i, m) in menu.iter().enumerate() {
        let unbound: Vec<&str> = m.unbound.iter().map(|u| u.name.as_str()).collect();
        let note = if unbound.is_empty() {
            String::new()
        } else {
            format!("  ?{}", unbound.join(" ?"))
        };
        println!(
            "{i:>2}  {} ({}) [{}]  {}{note}",
            m.law.name,
            m.direction.label(),
            m.law.owner,
            eqproof::syntax::render_term(&m.preview)
        );
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Replay {
            stack_pos,
            script_pos,
            stack,
            script,
            out,
        } => {
            // a single positional argument is the script
            let (stack, script) = match (stack_pos, script_pos, stack, script) {
                (Some(s), None, st, None) => (st, s),
                (Some(st), Some(s), None, None) => (Some(st), s),
                (None, None, st, Some(s)) => (st, s),
                _ => return Err(usage("give a script, either positionally or with --script")),
            };
            replay(stack.as_deref(), &script, out.as_deref())
        }
        Command::Menu {
            stack,
            theory,
            goal,
            path,
            limit,
            ranking,
        } => menu(stack.as_deref(), &theory, &goal, &path, limit, ranking),
        Command::Seed { out } => write_out(out.as_deref(), &seed_stack().to_json()),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
