//! `dv` — command-line front end for the Distinct Vectors toolkit.
//!
//! Exit codes are the machine contract:
//!   0  success (solution found, verified, or command completed)
//!   1  a valid negative answer: no solution, infeasible, verification failed
//!   2  usage or input error
//!   3  a resource limit was hit
//!
//! Results go to stdout, diagnostics to stderr.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use dv_core::bitmatrix::{format_instance_text, parse_solution_text};
use dv_core::harness::{
    gen_random_formula, gen_random_matrix, run_equivalence_campaign, run_solver_bench,
    CampaignConfig,
};
use dv_core::reduction::{
    build_instance_capped, cost_report, decode_solution, format_metadata, parse_metadata,
    DEFAULT_MAX_COLS,
};
use dv_core::solver::{
    solve_brute_force, solve_exact, solve_greedy, verify_solution, DvInstance, Outcome,
    SolveReport, SolverConfig, DEFAULT_NODE_LIMIT,
};
use dv_core::{cnf::CnfFormula, Error};

#[derive(Parser)]
#[command(
    name = "dv",
    version,
    about = "Distinct Vectors solvers and 3-CNF instance construction"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum SolverKind {
    Exact,
    Brute,
    Greedy,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance; prints the canonical solution.
    Solve {
        /// Instance file (`p dv <m> <n> <k>` header plus 0/1 rows).
        instance: PathBuf,
        /// Override the instance's budget (0 = minimize).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, value_enum, default_value_t = SolverKind::Exact)]
        solver: SolverKind,
        /// Worker threads for the exact solver; the answer is identical for
        /// any count.
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Trace node counts and timing on stderr.
        #[arg(long)]
        verbose: bool,
    },
    /// Build a Distinct Vectors instance from a 3-CNF formula; writes
    /// `<prefix>.dv` and `<prefix>.meta`.
    Reduce {
        /// DIMACS CNF file with three literals per clause.
        cnf: PathBuf,
        /// Output path prefix.
        out_prefix: String,
        /// Cap on constructed assignment columns.
        #[arg(long, default_value_t = DEFAULT_MAX_COLS)]
        max_cols: u64,
    },
    /// Map a solution of a constructed instance back to a truth assignment.
    Decode {
        instance: PathBuf,
        metadata: PathBuf,
        solution: PathBuf,
    },
    /// Check a solution file against an instance; prints OK or FAIL.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Print the exact construction sizes for a formula without building it.
    Cost { cnf: PathBuf },
    /// Emit a seeded random formula or matrix instance.
    #[command(subcommand)]
    Gen(GenKind),
    /// Cross-check the SAT oracle against the exact solver on constructed
    /// instances, with solution round-trips.
    Campaign {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        r_min: u32,
        #[arg(long, default_value_t = 8)]
        r_max: u32,
        #[arg(long, default_value_t = 1)]
        clauses_min: u32,
        #[arg(long, default_value_t = 7)]
        clauses_max: u32,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        /// Write the offending formula here on a mismatch.
        #[arg(long)]
        replay_dir: Option<PathBuf>,
        /// Also print one machine-readable line per trial.
        #[arg(long)]
        machine: bool,
    },
    /// Time exact, brute-force, and greedy solvers on random matrices and
    /// constructed instances.
    Bench {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 10)]
        trials: u64,
        #[arg(long, default_value_t = 2)]
        m_min: u32,
        #[arg(long, default_value_t = 10)]
        m_max: u32,
        #[arg(long, default_value_t = 4)]
        n_min: u32,
        #[arg(long, default_value_t = 14)]
        n_max: u32,
        #[arg(long, default_value_t = 1)]
        r_min: u32,
        #[arg(long, default_value_t = 8)]
        r_max: u32,
        #[arg(long, default_value_t = 1)]
        clauses_min: u32,
        #[arg(long, default_value_t = 7)]
        clauses_max: u32,
        #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
        node_limit: u64,
        #[arg(long, default_value_t = 10_000)]
        time_limit_ms: u64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
}

#[derive(Subcommand)]
enum GenKind {
    /// A random 3-CNF formula in DIMACS, deterministic in (seed, index).
    Formula {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, default_value_t = 1)]
        r_min: u32,
        #[arg(long, default_value_t = 8)]
        r_max: u32,
        #[arg(long, default_value_t = 1)]
        clauses_min: u32,
        #[arg(long, default_value_t = 7)]
        clauses_max: u32,
    },
    /// A random distinct-row matrix instance, deterministic in (seed, index).
    Matrix {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        index: u64,
        #[arg(long, default_value_t = 2)]
        m_min: u32,
        #[arg(long, default_value_t = 10)]
        m_max: u32,
        #[arg(long, default_value_t = 4)]
        n_min: u32,
        #[arg(long, default_value_t = 14)]
        n_max: u32,
        /// Budget written into the instance header (0 = minimize).
        #[arg(long, default_value_t = 0)]
        k: u64,
    },
}

const EXIT_OK: u8 = 0;
const EXIT_NO: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::ResourceLimit(_) => EXIT_RESOURCE,
        Error::Infeasible(_) => EXIT_NO,
        Error::CampaignMismatch { .. } => EXIT_NO,
        _ => EXIT_USAGE,
    }
}

fn fail(err: &Error) -> u8 {
    eprintln!("error: {err}");
    exit_code_for(err)
}

fn read_file(path: &PathBuf) -> Result<String, u8> {
    fs::read_to_string(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load_formula(path: &PathBuf) -> Result<CnfFormula, u8> {
    let text = read_file(path)?;
    CnfFormula::parse_dimacs(&text).map_err(|e| fail(&e))
}

fn no_solution_line(inst: &DvInstance) -> String {
    let k = if inst.budget() == 0 {
        inst.matrix().col_count()
    } else {
        inst.budget()
    };
    format!("UNSAT-LIKE: no column subset of size <= {k}")
}

fn run_solve(
    instance: PathBuf,
    k: Option<usize>,
    solver: SolverKind,
    workers: usize,
    node_limit: u64,
    verbose: bool,
) -> u8 {
    let text = match read_file(&instance) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let mut inst = match DvInstance::from_text(&text) {
        Ok(i) => i,
        Err(e) => return fail(&e),
    };
    if let Some(k) = k {
        inst = match inst.with_budget(k) {
            Ok(i) => i,
            Err(e) => return fail(&e),
        };
    }
    let cfg = SolverConfig {
        node_limit,
        workers,
    };

    if solver == SolverKind::Greedy {
        return match solve_greedy(inst.matrix()) {
            Ok(set) => {
                if inst.budget() > 0 && set.len() > inst.budget() {
                    eprintln!(
                        "note: greedy set has {} columns, above the budget {}",
                        set.len(),
                        inst.budget()
                    );
                }
                println!("{set}");
                EXIT_OK
            }
            Err(e @ Error::Infeasible(_)) => {
                eprintln!("note: {e}");
                println!("{}", no_solution_line(&inst));
                EXIT_NO
            }
            Err(e) => fail(&e),
        };
    }

    let report: SolveReport = match solver {
        SolverKind::Exact => solve_exact(&inst, &cfg),
        SolverKind::Brute => match solve_brute_force(&inst, &cfg) {
            Ok(r) => r,
            Err(e) => return fail(&e),
        },
        SolverKind::Greedy => unreachable!(),
    };
    if verbose {
        eprintln!(
            "nodes={} lower_bound={} ms={:.3}",
            report.nodes_explored,
            report.lower_bound_used,
            report.wall_time.as_secs_f64() * 1e3
        );
    }
    match report.outcome {
        Outcome::Solution(set) => {
            println!("{set}");
            EXIT_OK
        }
        Outcome::Infeasible => {
            eprintln!("note: duplicate rows, no column subset can separate them");
            println!("{}", no_solution_line(&inst));
            EXIT_NO
        }
        Outcome::BudgetExceeded => {
            println!("{}", no_solution_line(&inst));
            EXIT_NO
        }
    }
}

fn run_reduce(cnf: PathBuf, out_prefix: String, max_cols: u64) -> u8 {
    let formula = match load_formula(&cnf) {
        Ok(f) => f,
        Err(code) => return code,
    };
    let (inst, map) = match build_instance_capped(&formula, max_cols) {
        Ok(pair) => pair,
        Err(e) => return fail(&e),
    };
    let dv_path = format!("{out_prefix}.dv");
    let meta_path = format!("{out_prefix}.meta");
    if let Err(e) = fs::write(&dv_path, inst.to_text()) {
        eprintln!("error: cannot write {dv_path}: {e}");
        return EXIT_USAGE;
    }
    if let Err(e) = fs::write(&meta_path, format_metadata(&map)) {
        eprintln!("error: cannot write {meta_path}: {e}");
        return EXIT_USAGE;
    }
    eprintln!(
        "wrote {dv_path} ({}x{}, k={}) and {meta_path}",
        inst.matrix().row_count(),
        inst.matrix().col_count(),
        inst.budget()
    );
    EXIT_OK
}

fn run_decode(instance: PathBuf, metadata: PathBuf, solution: PathBuf) -> u8 {
    let inst_text = match read_file(&instance) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let inst = match DvInstance::from_text(&inst_text) {
        Ok(i) => i,
        Err(e) => return fail(&e),
    };
    let meta_text = match read_file(&metadata) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let map = match parse_metadata(&meta_text) {
        Ok(m) => m,
        Err(e) => return fail(&e),
    };
    let sol_text = match read_file(&solution) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let set = match parse_solution_text(&sol_text) {
        Ok(Some(set)) => set,
        Ok(None) => {
            eprintln!("note: empty solution file, nothing to decode");
            return EXIT_NO;
        }
        Err(e) => return fail(&e),
    };
    match verify_solution(inst.matrix(), &set) {
        Ok(true) => {}
        Ok(false) => {
            eprintln!("error: solution does not verify against the instance");
            return EXIT_USAGE;
        }
        Err(e) => return fail(&e),
    }
    match decode_solution(&map, &set) {
        Ok(assignment) => {
            println!("{assignment}");
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

fn run_verify(instance: PathBuf, solution: PathBuf) -> u8 {
    let inst_text = match read_file(&instance) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let inst = match DvInstance::from_text(&inst_text) {
        Ok(i) => i,
        Err(e) => return fail(&e),
    };
    let sol_text = match read_file(&solution) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let set = match parse_solution_text(&sol_text) {
        Ok(Some(set)) => set,
        Ok(None) => {
            eprintln!("error: empty solution file, nothing to verify");
            return EXIT_USAGE;
        }
        Err(e) => return fail(&e),
    };
    let separates = match verify_solution(inst.matrix(), &set) {
        Ok(v) => v,
        Err(e) => return fail(&e),
    };
    let within_budget = inst.budget() == 0 || set.len() <= inst.budget();
    if separates && within_budget {
        println!("OK");
        EXIT_OK
    } else {
        if separates && !within_budget {
            eprintln!(
                "note: set separates all rows but has {} columns, budget is {}",
                set.len(),
                inst.budget()
            );
        }
        println!("FAIL");
        EXIT_NO
    }
}

fn run_cost(cnf: PathBuf) -> u8 {
    let formula = match load_formula(&cnf) {
        Ok(f) => f,
        Err(code) => return code,
    };
    match cost_report(&formula) {
        Ok(report) => {
            print!("{}", report.text());
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

fn run_gen(kind: GenKind) -> u8 {
    match kind {
        GenKind::Formula {
            seed,
            index,
            r_min,
            r_max,
            clauses_min,
            clauses_max,
        } => {
            let cfg = CampaignConfig {
                seed,
                formula_r_range: r_min..=r_max,
                clause_count_range: clauses_min..=clauses_max,
                ..CampaignConfig::default()
            };
            if let Err(e) = cfg.validate() {
                return fail(&e);
            }
            print!("{}", gen_random_formula(&cfg, index).to_dimacs());
            EXIT_OK
        }
        GenKind::Matrix {
            seed,
            index,
            m_min,
            m_max,
            n_min,
            n_max,
            k,
        } => {
            let cfg = CampaignConfig {
                seed,
                matrix_m_range: m_min..=m_max,
                matrix_n_range: n_min..=n_max,
                ..CampaignConfig::default()
            };
            if let Err(e) = cfg.validate() {
                return fail(&e);
            }
            let matrix = gen_random_matrix(&cfg, index);
            if k as usize > matrix.col_count() {
                eprintln!(
                    "error: budget {k} exceeds the generated column count {}",
                    matrix.col_count()
                );
                return EXIT_USAGE;
            }
            print!("{}", format_instance_text(&matrix, k as usize));
            EXIT_OK
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_campaign(
    seed: u64,
    trials: u64,
    r_min: u32,
    r_max: u32,
    clauses_min: u32,
    clauses_max: u32,
    workers: usize,
    node_limit: u64,
    replay_dir: Option<PathBuf>,
    machine: bool,
) -> u8 {
    let cfg = CampaignConfig {
        seed,
        trials,
        formula_r_range: r_min..=r_max,
        clause_count_range: clauses_min..=clauses_max,
        workers,
        node_limit,
        replay_dir,
        ..CampaignConfig::default()
    };
    match run_equivalence_campaign(&cfg) {
        Ok(report) => {
            if machine {
                print!("{}", report.machine_lines());
            }
            print!("{}", report.table());
            EXIT_OK
        }
        Err(e) => {
            if let Error::CampaignMismatch {
                replay: Some(path), ..
            } = &e
            {
                eprintln!("replay written to {}", path.display());
            }
            fail(&e)
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn run_bench(
    seed: u64,
    trials: u64,
    m_range: (u32, u32),
    n_range: (u32, u32),
    r_range: (u32, u32),
    clauses_range: (u32, u32),
    node_limit: u64,
    time_limit_ms: u64,
    workers: usize,
) -> u8 {
    let cfg = CampaignConfig {
        seed,
        trials,
        matrix_m_range: m_range.0..=m_range.1,
        matrix_n_range: n_range.0..=n_range.1,
        formula_r_range: r_range.0..=r_range.1,
        clause_count_range: clauses_range.0..=clauses_range.1,
        node_limit,
        time_limit_ms,
        workers,
        ..CampaignConfig::default()
    };
    match run_solver_bench(&cfg) {
        Ok(report) => {
            print!("{}", report.table());
            EXIT_OK
        }
        Err(e) => fail(&e),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Solve {
            instance,
            k,
            solver,
            workers,
            node_limit,
            verbose,
        } => run_solve(instance, k, solver, workers, node_limit, verbose),
        Command::Reduce {
            cnf,
            out_prefix,
            max_cols,
        } => run_reduce(cnf, out_prefix, max_cols),
        Command::Decode {
            instance,
            metadata,
            solution,
        } => run_decode(instance, metadata, solution),
        Command::Verify { instance, solution } => run_verify(instance, solution),
        Command::Cost { cnf } => run_cost(cnf),
        Command::Gen(kind) => run_gen(kind),
        Command::Campaign {
            seed,
            trials,
            r_min,
            r_max,
            clauses_min,
            clauses_max,
            workers,
            node_limit,
            replay_dir,
            machine,
        } => run_campaign(
            seed,
            trials,
            r_min,
            r_max,
            clauses_min,
            clauses_max,
            workers,
            node_limit,
            replay_dir,
            machine,
        ),
        Command::Bench {
            seed,
            trials,
            m_min,
            m_max,
            n_min,
            n_max,
            r_min,
            r_max,
            clauses_min,
            clauses_max,
            node_limit,
            time_limit_ms,
            workers,
        } => run_bench(
            seed,
            trials,
            (m_min, m_max),
            (n_min, n_max),
            (r_min, r_max),
            (clauses_min, clauses_max),
            node_limit,
            time_limit_ms,
            workers,
        ),
    };
    ExitCode::from(code)
}
