//! Command-line front end: merges defaults, an optional config file, and
//! flags into a run configuration, executes it, and reports failures as a
//! single machine-readable line on stderr with a nonzero exit code.

use caprsoc_bench::{commands, config, Overrides};
use clap::Parser;
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(
    name = "caprsoc-bench",
    about = "Benchmarks for capped-cone projection and sparse regression solvers",
    long_about = "Runs one of four benchmark commands and writes CSV results plus a config \
                  echo into <out>/<cmd>/. Values come from built-in defaults, then the \
                  --config file (key = value lines), then flags."
)]
struct Cli {
    /// Config file with `key = value` lines; flags override it
    #[arg(long)]
    config: Option<PathBuf>,

    /// Command: proj-bench | reg-solve | group-solve | trace
    #[arg(long)]
    cmd: Option<String>,

    /// Comma-separated batch sizes (proj-bench) or the column count (others)
    #[arg(long)]
    n: Option<String>,

    /// Observation count for synthetic instances
    #[arg(long)]
    t: Option<usize>,

    /// Group count for group-solve
    #[arg(long)]
    q: Option<usize>,

    /// Indicator penalty weight
    #[arg(long)]
    gamma1: Option<f64>,

    /// Quadratic penalty weight
    #[arg(long)]
    gamma2: Option<f64>,

    /// Seed for every random draw in the run
    #[arg(long)]
    seed: Option<u64>,

    /// Solver: pg | fista
    #[arg(long)]
    method: Option<String>,

    /// Step rule: const | backtrack
    #[arg(long)]
    step: Option<String>,

    /// Iteration cap
    #[arg(long = "max-iter")]
    max_iter: Option<u32>,

    /// Stop when the fixed-point optimality residual drops below this
    #[arg(long = "stop-gap")]
    stop_gap: Option<f64>,

    /// CSV dataset for reg-solve (requires --schema)
    #[arg(long)]
    data: Option<PathBuf>,

    /// Column kinds, e.g. "seg:categorical,x1:numeric,y:target"
    #[arg(long)]
    schema: Option<String>,

    /// Output directory; results land in <out>/<cmd>/
    #[arg(long)]
    out: Option<PathBuf>,
}

fn json_escape(s: &str) -> String {
    s.chars()
        .flat_map(|c| match c {
            '"' => "\\\"".chars().collect::<Vec<_>>(),
            '\\' => "\\\\".chars().collect(),
            '\n' => "\\n".chars().collect(),
            '\r' => "\\r".chars().collect(),
            '\t' => "\\t".chars().collect(),
            c => vec![c],
        })
        .collect()
}

fn main() {
    let cli = Cli::parse();
    let overrides = Overrides {
        cmd: cli.cmd,
        n: cli.n,
        t: cli.t,
        q: cli.q,
        gamma1: cli.gamma1,
        gamma2: cli.gamma2,
        seed: cli.seed,
        method: cli.method,
        step: cli.step,
        max_iter: cli.max_iter,
        stop_gap: cli.stop_gap,
        data: cli.data,
        schema: cli.schema,
        out: cli.out,
    };
    let outcome = config::build_config(cli.config.as_deref(), &overrides)
        .and_then(|cfg| commands::run(&cfg));
    match outcome {
        Ok(dir) => println!("wrote {}", dir.display()),
        Err(e) => {
            eprintln!(
                "{{\"error\":\"{}\",\"message\":\"{}\"}}",
                e.kind(),
                json_escape(&e.to_string())
            );
            std::process::exit(1);
        }
    }
}
