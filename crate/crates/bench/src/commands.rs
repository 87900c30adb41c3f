//! The four benchmark commands. Each writes a config echo plus its CSVs
//! into `<out>/<command>/`; every column except wall-clock timing is a pure
//! function of (config, seed).

use crate::config::{Command, MethodOpt, RunConfig, StepOpt};
use crate::instance::{derive_seed, gen_random_points, load_dataset, synth_instance};
use crate::{BenchError, Result};
use caprsoc::model::SparseRegressionProblem;
use caprsoc::oracle::projection_certificate;
use caprsoc::projection::project_cartesian;
use caprsoc::solvers::{solve, solve_grouped, SolveReport, TraceRow};
use caprsoc::{CappedRsoc, RsocVector};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Repetitions per batch size in proj-bench (the protocol fixes one
/// repetition count for every row).
pub const PROJ_REPS: usize = 100;

/// Feasible-point samples per certificate evaluation.
pub const CERT_SAMPLES: usize = 200;

/// Runs the configured command, returning the directory its files landed in.
pub fn run(cfg: &RunConfig) -> Result<PathBuf> {
    let dir = cfg.out.join(cfg.command.dir_name());
    std::fs::create_dir_all(&dir)?;
    std::fs::write(dir.join("config.txt"), cfg.render())?;
    match cfg.command {
        Command::ProjBench => proj_bench(cfg, &dir)?,
        Command::RegSolve => reg_solve(cfg, &dir)?,
        Command::GroupSolve => group_solve(cfg, &dir)?,
        Command::Trace => trace(cfg, &dir)?,
    }
    Ok(dir)
}

/// Positive part of the worst constraint violation of `p`.
fn infeasibility(p: &RsocVector, set: &CappedRsoc) -> f64 {
    let cone = p.x_norm_sq() - p.y * p.z;
    cone.max(-p.y).max(-p.z).max(p.z - set.u).max(0.0)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let len = values.len() as f64;
    let mean = values.iter().sum::<f64>() / len;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (len - 1.0);
    (mean, var.sqrt())
}

/// Timed batch projections per configured size: per repetition the batch is
/// regenerated, projected (timed), and summarized by its worst
/// infeasibility and worst certificate gap; the CSV row holds mean/std over
/// repetitions.
fn proj_bench(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let set = CappedRsoc::new(1.0, 1)?;
    let mut wtr = csv::Writer::from_path(dir.join("proj_bench.csv"))?;
    wtr.write_record([
        "n",
        "time_mean_s",
        "time_std_s",
        "infeas_mean",
        "infeas_std",
        "cert_gap_mean",
        "cert_gap_std",
    ])?;
    for &n in &cfg.n {
        let mut times = Vec::with_capacity(PROJ_REPS);
        let mut worst_infeas = Vec::with_capacity(PROJ_REPS);
        let mut worst_gap = Vec::with_capacity(PROJ_REPS);
        for rep in 0..PROJ_REPS {
            let points = gen_random_points(n, derive_seed(cfg.seed, &[n as u64, rep as u64]));
            let clock = Instant::now();
            let projected = project_cartesian(&points, &set)?;
            times.push(clock.elapsed().as_secs_f64());
            let mut infeas = 0.0_f64;
            let mut gap = 0.0_f64;
            for (i, (v, r)) in points.iter().zip(&projected).enumerate() {
                infeas = infeas.max(infeasibility(&r.point, &set));
                let cert_seed = derive_seed(cfg.seed, &[n as u64, rep as u64, i as u64]);
                let cert = projection_certificate(v, &r.point, &set, CERT_SAMPLES, cert_seed)?;
                gap = gap.max(cert.max(0.0));
            }
            worst_infeas.push(infeas);
            worst_gap.push(gap);
        }
        let (tm, ts) = mean_std(&times);
        let (im, is) = mean_std(&worst_infeas);
        let (gm, gs) = mean_std(&worst_gap);
        wtr.write_record([
            n.to_string(),
            tm.to_string(),
            ts.to_string(),
            im.to_string(),
            is.to_string(),
            gm.to_string(),
            gs.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_trace(path: &Path, trace: &[TraceRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(["k", "objective", "step", "residual", "time_ms"])?;
    for row in trace {
        wtr.write_record([
            row.k.to_string(),
            row.objective.to_string(),
            row.step.to_string(),
            row.residual.to_string(),
            row.time_ms.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

fn write_summary(path: &Path, header: &[&str], row: &[String]) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)?;
    wtr.write_record(header)?;
    wtr.write_record(row)?;
    wtr.flush()?;
    Ok(())
}

fn summary_fields(report: &SolveReport) -> [String; 4] {
    let last = report.trace.last().expect("trace always has the starting row");
    [
        report.iterations.to_string(),
        last.objective.to_string(),
        report.residual.to_string(),
        report.reason.as_str().to_string(),
    ]
}

/// Builds the problem for the regression commands: a dataset when given,
/// otherwise a synthetic instance. Also returns the encoding provenance
/// text when a dataset was encoded.
fn build_problem(cfg: &RunConfig) -> Result<(SparseRegressionProblem, Option<String>)> {
    match (&cfg.data, &cfg.schema) {
        (Some(path), Some(schema)) => {
            let ds = load_dataset(path, schema, cfg.gamma1, cfg.gamma2)?;
            let mut text = ds.report.render();
            text.push_str(&format!(
                "target: {}\nencoded columns: {}\n",
                ds.target,
                ds.column_names.join(", ")
            ));
            Ok((ds.problem, Some(text)))
        }
        _ => {
            let n = cfg.scalar_n()?;
            let p = synth_instance(
                cfg.t,
                n,
                cfg.effective_sparsity(n),
                cfg.noise,
                cfg.seed,
                cfg.gamma1,
                cfg.gamma2,
            )?;
            Ok((p, None))
        }
    }
}

/// One solver run; emits `trace.csv` and a one-row `summary.csv`.
fn reg_solve(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let (problem, encoding) = build_problem(cfg)?;
    if let Some(text) = encoding {
        std::fs::write(dir.join("encoding.txt"), text)?;
    }
    let solver_cfg = cfg.solver_config(&problem)?;
    let clock = Instant::now();
    let report = solve(&problem, &solver_cfg)?;
    let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    write_trace(&dir.join("trace.csv"), &report.trace)?;
    let [iters, fin, res, reason] = summary_fields(&report);
    write_summary(
        &dir.join("summary.csv"),
        &["t", "n", "iterations", "final_objective", "residual", "reason", "time_ms"],
        &[
            problem.t().to_string(),
            problem.n().to_string(),
            iters,
            fin,
            res,
            reason,
            wall_ms.to_string(),
        ],
    )?;
    Ok(())
}

/// Consecutive equal groups: `n/q` columns each, remainder folded into the
/// last group.
pub fn consecutive_groups(n: usize, q: usize) -> Result<Vec<Vec<usize>>> {
    if q == 0 || q > n {
        return Err(BenchError::Config(format!("q must satisfy 1 <= q <= n, got q={q}, n={n}")));
    }
    let size = n / q;
    let mut groups: Vec<Vec<usize>> = (0..q)
        .map(|g| (g * size..(g + 1) * size).collect())
        .collect();
    for rest in (q * size)..n {
        groups.last_mut().expect("q >= 1").push(rest);
    }
    Ok(groups)
}

/// Group-sparsity run on a synthetic instance; same outputs as reg-solve
/// plus the group count in the summary.
fn group_solve(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let n = cfg.scalar_n()?;
    let base = synth_instance(
        cfg.t,
        n,
        cfg.effective_sparsity(n),
        cfg.noise,
        cfg.seed,
        cfg.gamma1,
        cfg.gamma2,
    )?;
    let grouped = base.with_groups(consecutive_groups(n, cfg.q)?)?;
    let solver_cfg = cfg.solver_config(&grouped)?;
    let clock = Instant::now();
    let report = solve_grouped(&grouped, &solver_cfg)?;
    let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
    write_trace(&dir.join("trace.csv"), &report.trace)?;
    let [iters, fin, res, reason] = summary_fields(&report);
    write_summary(
        &dir.join("summary.csv"),
        &["t", "n", "q", "iterations", "final_objective", "residual", "reason", "time_ms"],
        &[
            grouped.t().to_string(),
            grouped.n().to_string(),
            cfg.q.to_string(),
            iters,
            fin,
            res,
            reason,
            wall_ms.to_string(),
        ],
    )?;
    Ok(())
}

/// All four method/step combinations on one synthetic instance, one trace
/// file per combination plus a comparison summary.
fn trace(cfg: &RunConfig, dir: &Path) -> Result<()> {
    let (problem, _) = build_problem(cfg)?;
    let combos = [
        (MethodOpt::Pg, StepOpt::Const, "pg_constant"),
        (MethodOpt::Pg, StepOpt::Backtrack, "pg_backtracking"),
        (MethodOpt::Fista, StepOpt::Const, "fista_constant"),
        (MethodOpt::Fista, StepOpt::Backtrack, "fista_backtracking"),
    ];
    let mut wtr = csv::Writer::from_path(dir.join("summary.csv"))?;
    wtr.write_record([
        "method",
        "step",
        "iterations",
        "final_objective",
        "residual",
        "reason",
        "time_ms",
    ])?;
    for (method, step, name) in combos {
        let solver_cfg = cfg.solver_config_for(method, step, &problem)?;
        let clock = Instant::now();
        let report = solve(&problem, &solver_cfg)?;
        let wall_ms = clock.elapsed().as_secs_f64() * 1e3;
        write_trace(&dir.join(format!("{name}.csv")), &report.trace)?;
        let [iters, fin, res, reason] = summary_fields(&report);
        let (m, s) = name.split_once('_').expect("combo names are method_step");
        wtr.write_record([
            m.to_string(),
            s.to_string(),
            iters,
            fin,
            res,
            reason,
            wall_ms.to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfigBuilder;

    fn cfg_from(text: &str) -> RunConfig {
        let mut b = RunConfigBuilder::new();
        b.apply_file_text(text).unwrap();
        b.finish().unwrap()
    }

    #[test]
    fn group_partition_covers_with_remainder_in_last() {
        let g = consecutive_groups(10, 3).unwrap();
        assert_eq!(g, vec![vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 8, 9]]);
        assert_eq!(consecutive_groups(4, 4).unwrap().len(), 4);
        assert!(consecutive_groups(3, 4).is_err());
    }

    #[test]
    fn reg_solve_writes_trace_and_summary() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cfg_from(&format!(
            "cmd = reg-solve\nn = 12\nt = 18\nmax-iter = 40\nout = {}\n",
            dir.path().display()
        ));
        let out = run(&cfg).unwrap();
        assert!(out.join("config.txt").exists());
        let trace = std::fs::read_to_string(out.join("trace.csv")).unwrap();
        let mut lines = trace.lines();
        assert_eq!(lines.next().unwrap(), "k,objective,step,residual,time_ms");
        // zero start: the first row is k=0 at objective zero
        assert!(lines.next().unwrap().starts_with("0,0,"));
        let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
        assert!(summary.starts_with("t,n,iterations,final_objective,residual,reason,time_ms"));
    }

    #[test]
    fn proj_bench_emits_one_row_per_size() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cfg_from(&format!(
            "cmd = proj-bench\nn = 5,9\nout = {}\n",
            dir.path().display()
        ));
        let out = run(&cfg).unwrap();
        let table = std::fs::read_to_string(out.join("proj_bench.csv")).unwrap();
        let lines: Vec<&str> = table.lines().collect();
        assert_eq!(lines.len(), 3, "header plus one row per size");
        assert!(lines[1].starts_with("5,"));
        assert!(lines[2].starts_with("9,"));
    }

    #[test]
    fn trace_command_covers_all_four_solvers() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cfg_from(&format!(
            "cmd = trace\nn = 8\nt = 12\nmax-iter = 25\nout = {}\n",
            dir.path().display()
        ));
        let out = run(&cfg).unwrap();
        for name in ["pg_constant", "pg_backtracking", "fista_constant", "fista_backtracking"] {
            assert!(out.join(format!("{name}.csv")).exists(), "{name} trace missing");
        }
        let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 5);
    }

    #[test]
    fn group_solve_runs_and_reports_q() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = cfg_from(&format!(
            "cmd = group-solve\nn = 9\nt = 14\nq = 3\nmax-iter = 30\nout = {}\n",
            dir.path().display()
        ));
        let out = run(&cfg).unwrap();
        let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
        let row = summary.lines().nth(1).unwrap();
        assert!(row.starts_with("14,9,3,"));
    }

    #[test]
    fn dataset_backed_solve_writes_encoding_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let toy = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy.csv");
        let cfg = cfg_from(&format!(
            "cmd = reg-solve\nmax-iter = 60\ndata = {}\nschema = segment:categorical,x1:numeric,x2:numeric,y:target\nout = {}\n",
            toy.display(),
            dir.path().display()
        ));
        let out = run(&cfg).unwrap();
        let encoding = std::fs::read_to_string(out.join("encoding.txt")).unwrap();
        assert!(encoding.contains("segment"));
        let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
        assert!(summary.lines().nth(1).unwrap().starts_with("12,11,"), "12 rows, 11 columns");
    }
}
