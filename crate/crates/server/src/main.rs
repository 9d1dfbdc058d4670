use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use clap::Parser;

use eqproof::matcher::RankingHeuristic;
use eqproof::seed::seed_stack;
use eqproof::theory::TheoryStack;
use eqproof_server::{router, AppState};

/// Serve proof sessions over HTTP/JSON.
#[derive(Debug, Parser)]
#[command(name = "eqproof-server", version)]
struct Args {
    /// Theory stack file. Created from the built-in seed if missing.
    #[arg(long)]
    stack: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Save changes to the stack file every N seconds (0 disables).
    #[arg(long, default_value_t = 5)]
    autosave: u64,
    /// Default menu ordering.
    #[arg(long, default_value = "standard")]
    ranking: RankingHeuristic,
}

#[tokio::main]
async fn main() {
    let args = Args::parse();
    let stack = match &args.stack {
        Some(p) if p.exists() => match TheoryStack::load(p) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
        },
        Some(p) => {
            let mut s = seed_stack();
            if let Err(e) = s.save(p) {
                eprintln!("error: {e}");
                std::process::exit(2);
            }
            s
        }
        None => seed_stack(),
    };
    let mut state = AppState::new(stack).with_ranking(args.ranking);
    if let Some(p) = &args.stack {
        state = state.with_stack_path(p);
    }
    let state = Arc::new(state);

    if args.stack.is_some() && args.autosave > 0 {
        let saver = state.clone();
        tokio::spawn(async move {
            let mut tick = tokio::time::interval(Duration::from_secs(args.autosave));
            loop {
                tick.tick().await;
                if let Err(e) = saver.save() {
                    eprintln!("autosave failed: {e}");
                }
            }
        });
    }

    let listener = match tokio::net::TcpListener::bind(args.addr).await {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: cannot bind {}: {e}", args.addr);
            std::process::exit(2);
        }
    };
    eprintln!("listening on http://{}", args.addr);
    let shutdown_state = state.clone();
    let served = axum::serve(listener, router(state))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await;
    if let Err(e) = shutdown_state.save() {
        eprintln!("save failed: {e}");
    }
    if let Err(e) = served {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
