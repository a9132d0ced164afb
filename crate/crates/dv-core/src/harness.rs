//! Seeded validation campaigns and a benchmark runner.
//!
//! Every generated input is a pure function of `(seed, trial index)`, so a
//! campaign is reproducible input-by-input and any failure can be replayed
//! from its serialized formula alone. Trials are independent and may run on a
//! worker pool; reports are always assembled in trial-index order, which
//! makes them byte-identical across worker counts (timing columns aside).

use std::fs;
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitmatrix::{BinaryMatrix, ColumnSet};
use crate::cnf::{self, CnfFormula};
use crate::reduction;
use crate::solver::{self, DvInstance, SolverConfig};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub seed: u64,
    pub formula_r_range: std::ops::RangeInclusive<u32>,
    pub clause_count_range: std::ops::RangeInclusive<u32>,
    pub trials: u64,
    pub matrix_m_range: std::ops::RangeInclusive<u32>,
    pub matrix_n_range: std::ops::RangeInclusive<u32>,
    pub node_limit: u64,
    pub time_limit_ms: u64,
    pub workers: usize,
    /// Campaigns cross-check against brute force, so the padded variable
    /// count is capped (8 keeps everything comfortably enumerable).
    pub max_padded_vars: u32,
    /// Where to serialize the offending formula on a mismatch.
    pub replay_dir: Option<PathBuf>,
}

impl Default for CampaignConfig {
    fn default() -> Self {
        CampaignConfig {
            seed: 1,
            formula_r_range: 1..=8,
            clause_count_range: 1..=7,
            trials: 1000,
            matrix_m_range: 2..=10,
            matrix_n_range: 4..=14,
            node_limit: solver::DEFAULT_NODE_LIMIT,
            time_limit_ms: 10_000,
            workers: 1,
            max_padded_vars: 8,
            replay_dir: None,
        }
    }
}

impl CampaignConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, range) in [
            ("formula_r_range", &self.formula_r_range),
            ("clause_count_range", &self.clause_count_range),
            ("matrix_m_range", &self.matrix_m_range),
            ("matrix_n_range", &self.matrix_n_range),
        ] {
            if range.is_empty() {
                return Err(Error::InvalidArgument(format!("{name} is empty")));
            }
            if *range.start() == 0 {
                return Err(Error::InvalidArgument(format!("{name} must start at 1 or higher")));
            }
        }
        let max_m = *self.matrix_m_range.end() as u64;
        let min_n = (*self.matrix_n_range.start()).min(63);
        if (1u64 << min_n) < max_m {
            return Err(Error::InvalidArgument(format!(
                "matrix ranges cannot yield distinct rows: 2^{min_n} < {max_m}"
            )));
        }
        Ok(())
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

const DOMAIN_FORMULA: u64 = 0xF0;
const DOMAIN_MATRIX: u64 = 0x3A;

fn trial_rng(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mixed = splitmix64(splitmix64(splitmix64(seed) ^ domain) ^ index);
    ChaCha8Rng::seed_from_u64(mixed)
}

/// A 3-literal-per-clause formula, a deterministic function of
/// `(cfg.seed, index)`. Literals are drawn uniformly; repeats are allowed.
pub fn gen_random_formula(cfg: &CampaignConfig, index: u64) -> CnfFormula {
    let mut rng = trial_rng(cfg.seed, DOMAIN_FORMULA, index);
    let r = rng.random_range(cfg.formula_r_range.clone());
    let s = rng.random_range(cfg.clause_count_range.clone());
    let mut clauses = Vec::with_capacity(s as usize);
    for _ in 0..s {
        let mut clause = [0i32; 3];
        for lit in &mut clause {
            let var = rng.random_range(1..=r) as i32;
            *lit = if rng.random::<bool>() { var } else { -var };
        }
        clauses.push(clause);
    }
    CnfFormula::new(r, clauses).expect("generated literals are in range")
}

/// A random matrix with pairwise-distinct rows, a deterministic function of
/// `(cfg.seed, index)`. Duplicate rows are resampled.
pub fn gen_random_matrix(cfg: &CampaignConfig, index: u64) -> BinaryMatrix {
    let mut rng = trial_rng(cfg.seed, DOMAIN_MATRIX, index);
    let m = rng.random_range(cfg.matrix_m_range.clone()) as usize;
    let n = rng.random_range(cfg.matrix_n_range.clone()) as usize;
    let mut rows: Vec<Vec<u8>> = Vec::with_capacity(m);
    let mut attempts = 0u32;
    while rows.len() < m {
        let row: Vec<u8> = (0..n).map(|_| rng.random::<bool>() as u8).collect();
        if rows.contains(&row) {
            attempts += 1;
            assert!(
                attempts < 100_000,
                "cannot sample {m} distinct rows over {n} columns"
            );
            continue;
        }
        rows.push(row);
    }
    BinaryMatrix::from_rows(&rows).expect("rows are bits")
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialOutcome {
    pub index: u64,
    pub satisfiable: bool,
    pub dv_solved: bool,
    pub ok: bool,
    pub solution: Option<ColumnSet>,
    pub ms: f64,
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub trials: Vec<TrialOutcome>,
    pub mismatches: u64,
    pub p50_ms: f64,
    pub p90_ms: f64,
    pub max_ms: f64,
}

impl EquivalenceReport {
    /// One machine-readable line per trial:
    /// `trial <i> sat=<0|1> dv=<0|1> ok=<0|1> ms=<t>`.
    pub fn machine_lines(&self) -> String {
        let mut out = String::new();
        for t in &self.trials {
            out.push_str(&format!(
                "trial {} sat={} dv={} ok={} ms={:.3}\n",
                t.index, t.satisfiable as u8, t.dv_solved as u8, t.ok as u8, t.ms
            ));
        }
        out
    }

    /// Everything except timing — two runs with the same seed must produce
    /// byte-identical keys no matter how many workers they used.
    pub fn determinism_key(&self) -> String {
        let mut out = String::new();
        for t in &self.trials {
            let sol = match &t.solution {
                Some(k) => k.to_string(),
                None => "-".into(),
            };
            out.push_str(&format!(
                "trial {} sat={} dv={} ok={} sol={}\n",
                t.index, t.satisfiable as u8, t.dv_solved as u8, t.ok as u8, sol
            ));
        }
        out
    }

    pub fn table(&self) -> String {
        format!(
            "equivalence campaign: {} trials, {} mismatches\n\
             satisfiable: {}  unsatisfiable: {}\n\
             timing: p50={:.3}ms p90={:.3}ms max={:.3}ms\n",
            self.trials.len(),
            self.mismatches,
            self.trials.iter().filter(|t| t.satisfiable).count(),
            self.trials.iter().filter(|t| !t.satisfiable).count(),
            self.p50_ms,
            self.p90_ms,
            self.max_ms,
        )
    }
}

fn write_replay(cfg: &CampaignConfig, index: u64, formula: &CnfFormula, detail: &str) -> Option<PathBuf> {
    let dir = cfg.replay_dir.as_ref()?;
    let path = dir.join(format!("trial_{index}.cnf"));
    let body = format!(
        "c equivalence mismatch replay\nc seed {} trial {index}\nc detail: {detail}\n{}",
        cfg.seed,
        formula.to_dimacs()
    );
    if fs::create_dir_all(dir).and_then(|_| fs::write(&path, body)).is_err() {
        return None;
    }
    Some(path)
}

fn equivalence_trial(cfg: &CampaignConfig, index: u64) -> Result<TrialOutcome> {
    let formula = gen_random_formula(cfg, index);
    let start = Instant::now();
    let sat = cnf::solve_sat_brute_force(&formula)?;
    let (inst, map) = reduction::build_instance(&formula)?;
    let solver_cfg = SolverConfig {
        node_limit: cfg.node_limit,
        workers: 1,
    };
    let rep = solver::solve_exact(&inst, &solver_cfg);
    let solution = rep.outcome.solution().cloned();

    let mut detail = String::new();
    let mut ok = sat.is_some() == solution.is_some();
    if !ok {
        detail = format!(
            "SAT oracle says {}, solver says {}",
            if sat.is_some() { "satisfiable" } else { "unsatisfiable" },
            if solution.is_some() { "solvable" } else { "unsolvable" },
        );
    }
    if let (Some(model), Some(sol)) = (&sat, &solution) {
        match reduction::decode_solution(&map, sol) {
            Ok(back) => {
                if !formula.evaluate(&back)? || !map.padded().formula().evaluate(&back)? {
                    ok = false;
                    detail = "decoded assignment does not satisfy the formula".into();
                }
            }
            Err(e) => {
                ok = false;
                detail = format!("decoding the solver's solution failed: {e}");
            }
        }
        let extended = model.extended(map.padded().formula().num_vars());
        match reduction::encode_solution(&map, &extended) {
            Ok(encoded) => {
                if encoded.len() != map.budget()
                    || !solver::verify_solution(inst.matrix(), &encoded)?
                {
                    ok = false;
                    detail = "encoded oracle model does not verify".into();
                }
            }
            Err(e) => {
                ok = false;
                detail = format!("encoding the oracle model failed: {e}");
            }
        }
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    if !ok {
        let replay = write_replay(cfg, index, &formula, &detail);
        return Err(Error::CampaignMismatch {
            trial: index,
            detail,
            replay,
        });
    }
    Ok(TrialOutcome {
        index,
        satisfiable: sat.is_some(),
        dv_solved: solution.is_some(),
        ok,
        solution,
        ms,
    })
}

fn run_pool<T: Send>(
    trials: u64,
    workers: usize,
    job: impl Fn(u64) -> T + Sync,
) -> Vec<T> {
    let next = AtomicU64::new(0);
    let results: Mutex<Vec<(u64, T)>> = Mutex::new(Vec::with_capacity(trials as usize));
    std::thread::scope(|scope| {
        for _ in 0..workers.max(1) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, AtomicOrdering::Relaxed);
                if i >= trials {
                    break;
                }
                let out = job(i);
                results.lock().unwrap().push((i, out));
            });
        }
    });
    let mut collected = results.into_inner().unwrap();
    collected.sort_by_key(|(i, _)| *i);
    collected.into_iter().map(|(_, t)| t).collect()
}

fn percentile(sorted_ms: &[f64], p: f64) -> f64 {
    if sorted_ms.is_empty() {
        return 0.0;
    }
    let idx = ((sorted_ms.len() as f64 - 1.0) * p).round() as usize;
    sorted_ms[idx]
}

/// Per trial: generate a formula, ask the SAT oracle, build the instance,
/// solve it exactly, and require the verdicts to match; on satisfiable
/// trials also round-trip solutions through encode/decode. Any violation
/// fails the campaign with the offending formula serialized for replay.
pub fn run_equivalence_campaign(cfg: &CampaignConfig) -> Result<EquivalenceReport> {
    cfg.validate()?;
    let max_padded = cfg.formula_r_range.end().next_power_of_two().max(2);
    if max_padded > cfg.max_padded_vars {
        return Err(Error::InvalidArgument(format!(
            "formula range pads to {max_padded} variables, above the cross-check cap {}",
            cfg.max_padded_vars
        )));
    }
    let outcomes = run_pool(cfg.trials, cfg.workers, |i| equivalence_trial(cfg, i));
    let mut trials = Vec::with_capacity(outcomes.len());
    for out in outcomes {
        trials.push(out?);
    }
    let mut ms: Vec<f64> = trials.iter().map(|t| t.ms).collect();
    ms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(EquivalenceReport {
        mismatches: trials.iter().filter(|t| !t.ok).count() as u64,
        p50_ms: percentile(&ms, 0.5),
        p90_ms: percentile(&ms, 0.9),
        max_ms: ms.last().copied().unwrap_or(0.0),
        trials,
    })
}

#[derive(Clone, Debug)]
pub struct SolverCell {
    pub outcome: String,
    pub solution_size: Option<usize>,
    pub nodes: u64,
    pub ms: f64,
    pub timed_out: bool,
}

#[derive(Clone, Debug)]
pub struct BenchRow {
    pub id: String,
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub exact: SolverCell,
    pub brute: SolverCell,
    pub greedy: SolverCell,
    /// Exact and brute force returned the same outcome (vacuously true when
    /// the brute force hit its node limit).
    pub agree: bool,
    /// Greedy verified and was no smaller than the exact minimum.
    pub greedy_ok: bool,
}

#[derive(Clone, Debug)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
}

impl BenchReport {
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<8} {:>3} {:>3} {:>3}  {:<18} {:>9} {:>9}  {:<18} {:>9} {:>9}  {:<12} {:>9}  {:>5} {:>9} {:<8}\n",
            "id", "m", "n", "k", "exact", "nodes", "ms", "brute", "nodes", "ms", "greedy", "ms",
            "agree", "greedy_ok", "timeout"
        ));
        for r in &self.rows {
            let mut timeouts: Vec<&str> = Vec::new();
            for (name, cell) in [("exact", &r.exact), ("brute", &r.brute), ("greedy", &r.greedy)] {
                if cell.timed_out {
                    timeouts.push(name);
                }
            }
            let timeout = if timeouts.is_empty() {
                "-".to_string()
            } else {
                timeouts.join(",")
            };
            out.push_str(&format!(
                "{:<8} {:>3} {:>3} {:>3}  {:<18} {:>9} {:>9.3}  {:<18} {:>9} {:>9.3}  {:<12} {:>9.3}  {:>5} {:>9} {:<8}\n",
                r.id,
                r.m,
                r.n,
                r.k,
                r.exact.outcome,
                r.exact.nodes,
                r.exact.ms,
                r.brute.outcome,
                r.brute.nodes,
                r.brute.ms,
                r.greedy.outcome,
                r.greedy.ms,
                r.agree,
                r.greedy_ok,
                timeout
            ));
        }
        out
    }
}

fn outcome_label(outcome: &solver::Outcome) -> (String, Option<usize>) {
    match outcome {
        solver::Outcome::Solution(k) => (format!("sol({})", k.len()), Some(k.len())),
        solver::Outcome::Infeasible => ("infeasible".into(), None),
        solver::Outcome::BudgetExceeded => ("budget-exceeded".into(), None),
    }
}

fn bench_instance(cfg: &CampaignConfig, id: String, inst: &DvInstance) -> BenchRow {
    let solver_cfg = SolverConfig {
        node_limit: cfg.node_limit,
        workers: 1,
    };
    let time_limit = cfg.time_limit_ms as f64;

    let t0 = Instant::now();
    let exact_rep = solver::solve_exact(inst, &solver_cfg);
    let exact_ms = t0.elapsed().as_secs_f64() * 1e3;
    let (exact_label, exact_size) = outcome_label(&exact_rep.outcome);

    let t0 = Instant::now();
    let brute_res = solver::solve_brute_force(inst, &solver_cfg);
    let brute_ms = t0.elapsed().as_secs_f64() * 1e3;
    let (brute_label, brute_size, brute_nodes, brute_comparable) = match &brute_res {
        Ok(rep) => {
            let (label, size) = outcome_label(&rep.outcome);
            (label, size, rep.nodes_explored, true)
        }
        Err(_) => ("node-limit".into(), None, 0, false),
    };

    let t0 = Instant::now();
    let greedy_res = solver::solve_greedy(inst.matrix());
    let greedy_ms = t0.elapsed().as_secs_f64() * 1e3;
    let (greedy_label, greedy_size) = match &greedy_res {
        Ok(k) => (format!("sol({})", k.len()), Some(k.len())),
        Err(_) => ("infeasible".into(), None),
    };

    let agree = !brute_comparable
        || brute_res.as_ref().map(|r| &r.outcome).ok() == Some(&exact_rep.outcome);
    let greedy_ok = match (exact_size, greedy_size, &greedy_res) {
        (Some(min), Some(g), Ok(k)) => {
            g >= min && solver::verify_solution(inst.matrix(), k).unwrap_or(false)
        }
        (None, None, _) => true,
        _ => exact_size.is_none(),
    };
    let _ = brute_size;

    BenchRow {
        id,
        m: inst.matrix().row_count(),
        n: inst.matrix().col_count(),
        k: inst.budget(),
        exact: SolverCell {
            outcome: exact_label,
            solution_size: exact_size,
            nodes: exact_rep.nodes_explored,
            ms: exact_ms,
            timed_out: exact_ms > time_limit,
        },
        brute: SolverCell {
            outcome: brute_label,
            solution_size: brute_size,
            nodes: brute_nodes,
            ms: brute_ms,
            timed_out: brute_ms > time_limit,
        },
        greedy: SolverCell {
            outcome: greedy_label,
            solution_size: greedy_size,
            nodes: 0,
            ms: greedy_ms,
            timed_out: greedy_ms > time_limit,
        },
        agree,
        greedy_ok,
    }
}

/// Times all three solvers on random distinct-row matrices and on
/// constructed instances from random formulas; two rows per trial index.
pub fn run_solver_bench(cfg: &CampaignConfig) -> Result<BenchReport> {
    cfg.validate()?;
    let rows = run_pool(cfg.trials, cfg.workers, |i| -> Result<Vec<BenchRow>> {
        let matrix = gen_random_matrix(cfg, i);
        let mat_inst = DvInstance::new(matrix, 0)?;
        let mut rows = vec![bench_instance(cfg, format!("mat{i}"), &mat_inst)];
        let formula = gen_random_formula(cfg, i);
        let (red_inst, _) = reduction::build_instance(&formula)?;
        rows.push(bench_instance(cfg, format!("red{i}"), &red_inst));
        Ok(rows)
    });
    let mut flat = Vec::new();
    for pair in rows {
        flat.extend(pair?);
    }
    Ok(BenchReport { rows: flat })
}
