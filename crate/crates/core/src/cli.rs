//! `lq-sweep solve|check|compare`.
//!
//! Exit codes: 0 success, 2 unreadable or invalid input, 3 numerical
//! failure (singular Φ22, Φ11 or D, non-finite state), 4 a declared
//! tolerance was exceeded.

use crate::error::Error;
use crate::hamiltonian::{max_symplectic_residual, BlockTrajectory};
use crate::oracle::{compare, oracle_solve, CompareTolerances};
use crate::pipeline::{block_trajectory, missing_data, solve_with, Fundamental, Method};
use crate::problem::{parse_problem, validate, LqProblem};
use crate::sweep::{build_sweep_system, sweep_symmetry_residual, Diagnostics, Solution};
use clap::{Parser, Subcommand};
use serde::Serialize;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;

const VALIDATION_SAMPLES: usize = 21;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub symmetry: f64,
    pub bc: f64,
    pub compare_cost: f64,
    pub duality: f64,
    /// Sweep vs augmented missing data.
    pub methods: f64,
    /// Sup distance between trajectories of different methods.
    pub trajectory: f64,
    /// Sup distance between direct and factorized blocks.
    pub blocks: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            symmetry: 1e-6,
            bc: 1e-6,
            compare_cost: 1e-3,
            duality: 1e-6,
            methods: 1e-8,
            trajectory: 2e-3,
            blocks: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub problem_path: PathBuf,
    pub method: Method,
    pub fundamental: Fundamental,
    pub steps: usize,
    pub oracle_n: usize,
    pub out_dir: PathBuf,
    pub tolerances: Tolerances,
}

impl RunConfig {
    pub fn new(problem_path: impl Into<PathBuf>) -> Self {
        Self {
            problem_path: problem_path.into(),
            method: Method::Sweep,
            fundamental: Fundamental::Direct,
            steps: 2000,
            oracle_n: 2000,
            out_dir: PathBuf::from("."),
            tolerances: Tolerances::default(),
        }
    }

    fn check(&self) -> Result<(), String> {
        if self.steps < 10 {
            return Err(format!("--steps must be at least 10, got {}", self.steps));
        }
        if self.problem_path.as_os_str().is_empty() || self.out_dir.as_os_str().is_empty() {
            return Err("paths must be non-empty".into());
        }
        Ok(())
    }
}

#[derive(Debug, Parser)]
#[command(name = "lq-sweep", version, about = "LQ optimal control with coupled two-point boundary conditions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve and write trajectory.csv and report.json.
    Solve(RunArgs),
    /// Validate the problem and print structural residuals.
    Check(RunArgs),
    /// Run sweep, augmented and transcription oracle; write compare.json.
    Compare(RunArgs),
}

#[derive(Debug, clap::Args)]
struct RunArgs {
    #[arg(long)]
    problem: PathBuf,
    #[arg(long, default_value = "sweep")]
    method: Method,
    #[arg(long, default_value = "direct")]
    fundamental: Fundamental,
    #[arg(long, default_value_t = 2000)]
    steps: usize,
    #[arg(long = "oracle-n", default_value_t = 2000)]
    oracle_n: usize,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

impl From<RunArgs> for RunConfig {
    fn from(a: RunArgs) -> Self {
        RunConfig {
            problem_path: a.problem,
            method: a.method,
            fundamental: a.fundamental,
            steps: a.steps,
            oracle_n: a.oracle_n,
            out_dir: a.out,
            tolerances: Tolerances::default(),
        }
    }
}

/// Parse arguments and dispatch; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match cli.command {
        Command::Solve(a) => cmd_solve(&a.into()),
        Command::Check(a) => cmd_check(&a.into()),
        Command::Compare(a) => cmd_compare(&a.into()),
    }
}

fn exit_for(e: &Error) -> i32 {
    if e.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn fail(e: Error) -> i32 {
    eprintln!("error: {e}");
    exit_for(&e)
}

/// Read, parse and validate; on failure the message is printed and the exit
/// code returned.
fn load(cfg: &RunConfig) -> Result<LqProblem, i32> {
    if let Err(msg) = cfg.check() {
        eprintln!("error: {msg}");
        return Err(EXIT_INPUT);
    }
    let text = fs::read_to_string(&cfg.problem_path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", cfg.problem_path.display());
        EXIT_INPUT
    })?;
    let p = parse_problem(&text).map_err(fail)?;
    let report = validate(&p, VALIDATION_SAMPLES);
    for f in &report.findings {
        eprintln!("{:?} [{}]: {}", f.severity, f.code, f.message);
    }
    if !report.ok {
        eprintln!("error: problem failed validation");
        return Err(EXIT_INPUT);
    }
    Ok(p)
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<(), i32> {
    fs::create_dir_all(dir)
        .and_then(|_| fs::write(dir.join(name), contents))
        .map_err(|e| {
            eprintln!("error: cannot write {}: {e}", dir.join(name).display());
            EXIT_INPUT
        })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub x0: Vec<f64>,
    pub nu: Vec<f64>,
    pub cost: f64,
    pub diagnostics: Diagnostics,
    pub method: Method,
    pub fundamental: Fundamental,
    pub steps: usize,
}

impl Report {
    pub fn new(sol: &Solution, method: Method, fundamental: Fundamental) -> Self {
        Self {
            x0: sol.x0.iter().copied().collect(),
            nu: sol.nu.iter().copied().collect(),
            cost: sol.cost,
            diagnostics: sol.diagnostics,
            method,
            fundamental,
            steps: sol.grid.steps(),
        }
    }
}

/// One row per node: `t, x1..xn, u1..um, lambda1..lambdan`.
pub fn trajectory_csv(sol: &Solution) -> String {
    let (n, m) = (sol.x0.len(), sol.u.first().map_or(0, |u| u.len()));
    let mut out = String::from("t");
    for (prefix, count) in [("x", n), ("u", m), ("lambda", n)] {
        for i in 1..=count {
            let _ = write!(out, ",{prefix}{i}");
        }
    }
    out.push('\n');
    for (i, t) in sol.grid.nodes().enumerate() {
        let _ = write!(out, "{t:.16e}");
        for v in sol.x[i].iter().chain(sol.u[i].iter()).chain(sol.lambda[i].iter()) {
            let _ = write!(out, ",{v:.16e}");
        }
        out.push('\n');
    }
    out
}

/// Names of the solution diagnostics that exceed their tolerance.
fn solution_violations(d: &Diagnostics, tol: &Tolerances, method: Method) -> Vec<String> {
    let mut bad = Vec::new();
    // the augmented path never needs Φ22⁻¹, so D may legitimately be absent
    let symmetry_ok = d.d_symmetry <= tol.symmetry || (method == Method::Augmented && d.d_symmetry.is_nan());
    if !symmetry_ok {
        bad.push(format!("d_symmetry {:.3e} > {:.1e}", d.d_symmetry, tol.symmetry));
    }
    if !(d.bc_residual <= tol.bc) {
        bad.push(format!("bc_residual {:.3e} > {:.1e}", d.bc_residual, tol.bc));
    }
    if !(d.duality_gap <= tol.duality) {
        bad.push(format!("duality_gap {:.3e} > {:.1e}", d.duality_gap, tol.duality));
    }
    bad
}

fn report_violations(bad: &[String]) -> i32 {
    if bad.is_empty() {
        EXIT_OK
    } else {
        for b in bad {
            eprintln!("tolerance violated: {b}");
        }
        EXIT_TOLERANCE
    }
}

fn trajectory_for(p: &LqProblem, cfg: &RunConfig) -> Result<BlockTrajectory, i32> {
    let grid = p.grid(cfg.steps).map_err(fail)?;
    block_trajectory(p, &grid, cfg.fundamental).map_err(fail)
}

pub fn cmd_solve(cfg: &RunConfig) -> i32 {
    let run = || -> Result<i32, i32> {
        let p = load(cfg)?;
        let traj = trajectory_for(&p, cfg)?;
        let sol = solve_with(&p, &traj, cfg.method).map_err(fail)?;
        let report = Report::new(&sol, cfg.method, cfg.fundamental);
        write_file(&cfg.out_dir, "trajectory.csv", &trajectory_csv(&sol))?;
        write_file(&cfg.out_dir, "report.json", &to_json(&report))?;
        println!("cost {:.10}", sol.cost);
        Ok(report_violations(&solution_violations(
            &sol.diagnostics,
            &cfg.tolerances,
            cfg.method,
        )))
    };
    run().unwrap_or_else(|code| code)
}

pub fn cmd_check(cfg: &RunConfig) -> i32 {
    let run = || -> Result<i32, i32> {
        let p = load(cfg)?;
        let tol = &cfg.tolerances;
        let report = validate(&p, VALIDATION_SAMPLES);
        let mut bad = Vec::new();
        println!("validation          ok");
        match report.gramian_min_eig {
            Some(g) => println!("gramian_min_eig     {g:.6e}"),
            None => println!("gramian_min_eig     unavailable"),
        }
        println!("bc_rank             {} (augmented {})", report.bc_rank, report.bc_rank_augmented);

        let grid = p.grid(cfg.steps).map_err(fail)?;
        let direct = block_trajectory(&p, &grid, Fundamental::Direct).map_err(fail)?;
        let sym = max_symplectic_residual(&direct);
        println!("symplectic_direct   {sym:.6e}");
        if !(sym <= tol.symmetry) {
            bad.push(format!("symplectic_direct {sym:.3e} > {:.1e}", tol.symmetry));
        }
        match block_trajectory(&p, &grid, Fundamental::ZakharItkin) {
            Ok(fact) => {
                let sym_f = max_symplectic_residual(&fact);
                let dist = direct
                    .blocks()
                    .iter()
                    .zip(fact.blocks())
                    .map(|(a, b)| a.max_abs_diff(b))
                    .fold(0.0, f64::max);
                println!("symplectic_factored {sym_f:.6e}");
                println!("block_distance      {dist:.6e}");
                if !(dist <= tol.blocks) {
                    bad.push(format!("block_distance {dist:.3e} > {:.1e}", tol.blocks));
                }
            }
            Err(e) => println!("block_distance      skipped ({e})"),
        }
        let sys = build_sweep_system(&p, direct.last()).map_err(fail)?;
        let d_sym = sweep_symmetry_residual(&sys);
        println!("d_symmetry          {d_sym:.6e}");
        if !(d_sym <= tol.symmetry) {
            bad.push(format!("d_symmetry {d_sym:.3e} > {:.1e}", tol.symmetry));
        }
        Ok(report_violations(&bad))
    };
    run().unwrap_or_else(|code| code)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct AugmentedSummary {
    x0: Vec<f64>,
    nu: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct OracleSummary {
    cost: f64,
    kkt_residual: f64,
    steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct Pairwise {
    sweep_vs_oracle_cost_rel: f64,
    sweep_vs_augmented_x0: f64,
    sweep_vs_augmented_nu: f64,
    x_sup_diff: f64,
    u_sup_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct CompareDoc {
    sweep: Report,
    augmented: AugmentedSummary,
    oracle: OracleSummary,
    pairwise: Pairwise,
}

pub fn cmd_compare(cfg: &RunConfig) -> i32 {
    let run = || -> Result<i32, i32> {
        let p = load(cfg)?;
        let tol = &cfg.tolerances;
        let traj = trajectory_for(&p, cfg)?;
        let sol = solve_with(&p, &traj, Method::Sweep).map_err(fail)?;
        let aug = missing_data(&p, &traj, Method::Augmented).map_err(fail)?;
        let osol = oracle_solve(&p, cfg.oracle_n).map_err(fail)?;
        let cmp = compare(
            &sol,
            &osol,
            &CompareTolerances {
                cost_rel: tol.compare_cost,
                trajectory: tol.trajectory,
            },
        );
        let doc = CompareDoc {
            sweep: Report::new(&sol, Method::Sweep, cfg.fundamental),
            augmented: AugmentedSummary {
                x0: aug.x0.iter().copied().collect(),
                nu: aug.nu.iter().copied().collect(),
            },
            oracle: OracleSummary {
                cost: osol.cost,
                kkt_residual: osol.kkt_residual,
                steps: cfg.oracle_n,
            },
            pairwise: Pairwise {
                sweep_vs_oracle_cost_rel: cmp.cost_rel_diff,
                sweep_vs_augmented_x0: (&sol.x0 - &aug.x0).amax(),
                sweep_vs_augmented_nu: (&sol.nu - &aug.nu).amax(),
                x_sup_diff: cmp.x_sup_diff,
                u_sup_diff: cmp.u_sup_diff,
            },
        };
        write_file(&cfg.out_dir, "compare.json", &to_json(&doc))?;
        println!("sweep cost  {:.10}", sol.cost);
        println!("oracle cost {:.10}", osol.cost);

        let mut bad = solution_violations(&sol.diagnostics, tol, Method::Sweep);
        let pw = &doc.pairwise;
        if !cmp.pass {
            bad.push(format!(
                "oracle distance: cost {:.3e}, x {:.3e}, u {:.3e}",
                pw.sweep_vs_oracle_cost_rel, pw.x_sup_diff, pw.u_sup_diff
            ));
        }
        let method_gap = pw.sweep_vs_augmented_x0.max(pw.sweep_vs_augmented_nu);
        if !(method_gap <= tol.methods) {
            bad.push(format!("sweep vs augmented {method_gap:.3e} > {:.1e}", tol.methods));
        }
        Ok(report_violations(&bad))
    };
    run().unwrap_or_else(|code| code)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::solve;
    use crate::problem::parse_problem;

    const P1: &str = r#"{"n": 1, "m": 1, "k": 1, "t0": 0, "tau": 1,
        "F": {"constant": [[0]]}, "G": {"constant": [[1]]},
        "R": {"constant": [[1]]}, "C": {"constant": [[1]]},
        "Phi1": [[1]], "Phi2": [[1]], "q": [1]}"#;

    #[test]
    fn csv_layout() {
        let p = parse_problem(P1).unwrap();
        let sol = solve(&p, Method::Sweep, Fundamental::Direct, 10).unwrap();
        let csv = trajectory_csv(&sol);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some("t,x1,u1,lambda1"));
        let first: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first[0], 0.0);
        assert_eq!(first[1], sol.x0[0]);
        assert_eq!(csv.lines().count(), 12);
    }

    #[test]
    fn report_schema() {
        let p = parse_problem(P1).unwrap();
        let sol = solve(&p, Method::Sweep, Fundamental::ZakharItkin, 50).unwrap();
        let v: serde_json::Value = serde_json::from_str(&to_json(&Report::new(
            &sol,
            Method::Sweep,
            Fundamental::ZakharItkin,
        )))
        .unwrap();
        assert_eq!(v["fundamental"], "zakhar-itkin");
        assert_eq!(v["method"], "sweep");
        assert_eq!(v["steps"], 50);
        for key in ["d_symmetry", "symplectic_max", "bc_residual", "dynamics_residual", "duality_gap"] {
            assert!(v["diagnostics"][key].is_number(), "{key}");
        }
    }

    #[test]
    fn tolerance_checks() {
        let tol = Tolerances::default();
        let good = Diagnostics {
            d_symmetry: 0.0,
            symplectic_max: 0.0,
            bc_residual: 0.0,
            dynamics_residual: 0.0,
            duality_gap: 0.0,
        };
        assert!(solution_violations(&good, &tol, Method::Sweep).is_empty());
        let nan = Diagnostics {
            d_symmetry: f64::NAN,
            ..good
        };
        assert!(solution_violations(&nan, &tol, Method::Augmented).is_empty());
        assert_eq!(solution_violations(&nan, &tol, Method::Sweep).len(), 1);
        let gap = Diagnostics {
            duality_gap: 1e-3,
            ..good
        };
        assert_eq!(solution_violations(&gap, &tol, Method::Sweep).len(), 1);
    }

    #[test]
    fn small_step_count_rejected() {
        let mut cfg = RunConfig::new("p.json");
        cfg.steps = 5;
        assert_eq!(cmd_solve(&cfg), EXIT_INPUT);
    }

    #[test]
    fn unknown_argument_is_input_error() {
        assert_eq!(run(["lq-sweep", "solve", "--bogus"]), EXIT_INPUT);
        assert_eq!(run(["lq-sweep", "--help"]), EXIT_OK);
    }
}
