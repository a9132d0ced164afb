//! Distinct Vectors solvers.
//!
//! Three routes to the same answer: [`solve_brute_force`] enumerates column
//! subsets by size then lexicographic order and serves as the oracle,
//! [`solve_exact`] is a branch-and-bound over unseparated row pairs, and
//! [`solve_greedy`] is a set-cover style heuristic. The exact solver and the
//! brute force return the same canonical solution — minimum cardinality,
//! then lexicographically smallest — so they can be checked against each
//! other on any instance small enough for both.

use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use itertools::Itertools;

use crate::bitmatrix::{format_instance_text, parse_instance_text, BinaryMatrix, ColumnSet};
use crate::{Error, Result};

/// One Distinct Vectors instance: a matrix plus a column budget.
/// `budget = 0` means "find the minimum".
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DvInstance {
    matrix: BinaryMatrix,
    budget: usize,
}

impl DvInstance {
    pub fn new(matrix: BinaryMatrix, budget: usize) -> Result<Self> {
        if budget > matrix.col_count() {
            return Err(Error::InvalidArgument(format!(
                "budget {budget} exceeds column count {}",
                matrix.col_count()
            )));
        }
        Ok(DvInstance { matrix, budget })
    }

    pub fn matrix(&self) -> &BinaryMatrix {
        &self.matrix
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// Replaces the budget (still capped by the column count).
    pub fn with_budget(self, budget: usize) -> Result<Self> {
        DvInstance::new(self.matrix, budget)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let (matrix, budget) = parse_instance_text(text)?;
        DvInstance::new(matrix, budget)
    }

    pub fn to_text(&self) -> String {
        format_instance_text(&self.matrix, self.budget)
    }
}

/// What a solver concluded about an instance.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Outcome {
    /// The canonical solution: minimum size, then lexicographically smallest.
    Solution(ColumnSet),
    /// Duplicate rows — no column set of any size separates them.
    Infeasible,
    /// Solutions exist, but none within the budget.
    BudgetExceeded,
}

impl Outcome {
    pub fn solution(&self) -> Option<&ColumnSet> {
        match self {
            Outcome::Solution(k) => Some(k),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub nodes_explored: u64,
    pub wall_time: Duration,
    pub lower_bound_used: usize,
}

pub const DEFAULT_NODE_LIMIT: u64 = 100_000_000;

#[derive(Clone, Debug)]
pub struct SolverConfig {
    /// Enumeration / branching node cap; the brute force refuses to start a
    /// subset size whose combination count would blow past it.
    pub node_limit: u64,
    /// Worker threads for the exact solver. The final answer is canonical and
    /// therefore identical for any worker count.
    pub workers: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            node_limit: DEFAULT_NODE_LIMIT,
            workers: 1,
        }
    }
}

/// True iff the rows of `A[*, K]` are pairwise distinct.
///
/// The empty set verifies only single-row matrices (nothing to distinguish).
pub fn verify_solution(a: &BinaryMatrix, k: &ColumnSet) -> Result<bool> {
    if k.max_col() > a.col_count() {
        return Err(Error::InvalidArgument(format!(
            "column {} out of range 1..={}",
            k.max_col(),
            a.col_count()
        )));
    }
    if k.is_empty() {
        return Ok(a.row_count() <= 1);
    }
    Ok(a.restrict(k)?.rows_pairwise_distinct())
}

/// `⌈log₂ m⌉`: `t` columns distinguish at most `2^t` rows, so every solution
/// has at least this many columns.
pub fn lower_bound(a: &BinaryMatrix) -> usize {
    (a.row_count() as u64).next_power_of_two().trailing_zeros() as usize
}

/// The difference sets of all row pairs `i < j`, packed one column-bitmask
/// per pair. A column set is a solution iff it intersects every mask.
pub(crate) struct PairSystem {
    words: usize,
    count: usize,
    masks: Vec<u64>,
}

impl PairSystem {
    pub(crate) fn build(a: &BinaryMatrix) -> (Self, bool) {
        let m = a.row_count();
        let words = a.col_count().div_ceil(64);
        let count = m * (m - 1) / 2;
        let mut masks = Vec::with_capacity(count * words);
        let mut scratch = Vec::with_capacity(words);
        let mut has_duplicate = false;
        for i in 0..m {
            for j in (i + 1)..m {
                a.xor_rows_into(i, j, &mut scratch);
                if scratch.iter().all(|&w| w == 0) {
                    has_duplicate = true;
                }
                masks.extend_from_slice(&scratch);
            }
        }
        (
            PairSystem {
                words,
                count,
                masks,
            },
            has_duplicate,
        )
    }

    pub(crate) fn len(&self) -> usize {
        self.count
    }

    pub(crate) fn mask(&self, p: usize) -> &[u64] {
        &self.masks[p * self.words..(p + 1) * self.words]
    }

    fn mask_contains(&self, p: usize, col0: usize) -> bool {
        self.mask(p)[col0 / 64] >> (col0 % 64) & 1 == 1
    }

    fn effective_count(&self, p: usize, banned: &[u64]) -> u32 {
        self.mask(p)
            .iter()
            .zip(banned)
            .map(|(&m, &b)| (m & !b).count_ones())
            .sum()
    }

    fn hits_all(&self, cand: &[u64]) -> bool {
        (0..self.count).all(|p| {
            self.mask(p)
                .iter()
                .zip(cand)
                .any(|(&m, &c)| m & c != 0)
        })
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

fn effective_cap(inst: &DvInstance) -> usize {
    if inst.budget() == 0 {
        inst.matrix().col_count()
    } else {
        inst.budget()
    }
}

fn report(outcome: Outcome, nodes: u64, start: Instant, lb: usize) -> SolveReport {
    SolveReport {
        outcome,
        nodes_explored: nodes,
        wall_time: start.elapsed(),
        lower_bound_used: lb,
    }
}

/// Exhaustive oracle: enumerates column subsets by increasing size starting
/// at the lower bound, lexicographically within each size, and returns the
/// first verifying subset within budget.
pub fn solve_brute_force(inst: &DvInstance, cfg: &SolverConfig) -> Result<SolveReport> {
    let start = Instant::now();
    let a = inst.matrix();
    let n = a.col_count();
    let lb = lower_bound(a);
    let (pairs, has_duplicate) = PairSystem::build(a);
    if has_duplicate {
        return Ok(report(Outcome::Infeasible, 0, start, lb));
    }
    if pairs.len() == 0 {
        return Ok(report(Outcome::Solution(ColumnSet::empty()), 1, start, lb));
    }
    let cap = effective_cap(inst);
    let words = n.div_ceil(64);
    let mut cand = vec![0u64; words];
    let mut nodes: u64 = 0;
    for size in lb..=cap {
        let planned = binomial(n, size);
        if planned + nodes as u128 > cfg.node_limit as u128 {
            return Err(Error::ResourceLimit(format!(
                "enumerating {planned} subsets of size {size} exceeds the node limit {}",
                cfg.node_limit
            )));
        }
        for combo in (0..n).combinations(size) {
            nodes += 1;
            cand.iter_mut().for_each(|w| *w = 0);
            for &c in &combo {
                cand[c / 64] |= 1 << (c % 64);
            }
            if pairs.hits_all(&cand) {
                let cols = ColumnSet::from_sorted(combo.iter().map(|c| c + 1).collect());
                return Ok(report(Outcome::Solution(cols), nodes, start, lb));
            }
        }
    }
    Ok(report(Outcome::BudgetExceeded, nodes, start, lb))
}

/// Every verifying column subset of size at most `max_size`, in canonical
/// order. Used to audit structural claims about the full solution space.
pub fn enumerate_solutions(
    a: &BinaryMatrix,
    max_size: usize,
    node_limit: u64,
) -> Result<Vec<ColumnSet>> {
    let n = a.col_count();
    let (pairs, _) = PairSystem::build(a);
    let words = n.div_ceil(64);
    let mut cand = vec![0u64; words];
    let mut nodes: u64 = 0;
    let mut found = Vec::new();
    for size in 0..=max_size.min(n) {
        let planned = binomial(n, size);
        if planned + nodes as u128 > node_limit as u128 {
            return Err(Error::ResourceLimit(format!(
                "enumerating {planned} subsets of size {size} exceeds the node limit {node_limit}"
            )));
        }
        for combo in (0..n).combinations(size) {
            nodes += 1;
            cand.iter_mut().for_each(|w| *w = 0);
            for &c in &combo {
                cand[c / 64] |= 1 << (c % 64);
            }
            if pairs.hits_all(&cand) {
                found.push(ColumnSet::from_sorted(combo.iter().map(|c| c + 1).collect()));
            }
        }
    }
    Ok(found)
}

struct SearchCtx<'a> {
    pairs: &'a PairSystem,
    lb: usize,
    cap: usize,
    nodes: &'a AtomicU64,
    best: &'a Mutex<Option<Vec<usize>>>,
    best_size: &'a AtomicUsize,
}

impl SearchCtx<'_> {
    fn offer(&self, mut cand: Vec<usize>) {
        cand.sort_unstable();
        let mut best = self.best.lock().unwrap();
        let better = match &*best {
            None => true,
            Some(b) => (cand.len(), &cand) < (b.len(), b),
        };
        if better {
            self.best_size.store(cand.len(), AtomicOrdering::Relaxed);
            *best = Some(cand);
        }
    }

    /// Picks the unseparated pair with the smallest effective difference set
    /// (ties: smallest pair index, i.e. smallest first-row index). Returns
    /// `None` when some pair can no longer be separated at all.
    fn select_pair(&self, alive: &[u32], banned: &[u64]) -> Option<u32> {
        let mut best: Option<(u32, u32)> = None;
        for &p in alive {
            let count = self.pairs.effective_count(p as usize, banned);
            if count == 0 {
                return None;
            }
            if best.is_none_or(|(c, _)| count < c) {
                best = Some((count, p));
            }
        }
        best.map(|(_, p)| p)
    }

    fn search(&self, chosen: &mut Vec<usize>, banned: &mut Vec<u64>, alive: &[u32]) {
        self.nodes.fetch_add(1, AtomicOrdering::Relaxed);
        if alive.is_empty() {
            self.offer(chosen.clone());
            return;
        }
        // Any extension needs at least one more column, and at least the
        // information-theoretic lower bound in total.
        let projected = (chosen.len() + 1).max(self.lb);
        let allowed = self.cap.min(self.best_size.load(AtomicOrdering::Relaxed));
        if projected > allowed {
            return;
        }
        let Some(pair) = self.select_pair(alive, banned) else {
            return;
        };
        let mask: Vec<u64> = self
            .pairs
            .mask(pair as usize)
            .iter()
            .zip(banned.iter())
            .map(|(&m, &b)| m & !b)
            .collect();
        let mut branched: Vec<usize> = Vec::new();
        for (w, &word) in mask.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let col = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                chosen.push(col);
                let next_alive: Vec<u32> = alive
                    .iter()
                    .copied()
                    .filter(|&p| !self.pairs.mask_contains(p as usize, col))
                    .collect();
                self.search(chosen, banned, &next_alive);
                chosen.pop();
                // Later branches must avoid this column so the subtrees
                // partition the solution space.
                banned[col / 64] |= 1 << (col % 64);
                branched.push(col);
            }
        }
        for col in branched {
            banned[col / 64] &= !(1 << (col % 64));
        }
    }
}

/// Branch-and-bound exact solver. Same outcome contract and same canonical
/// answer as [`solve_brute_force`]; the final answer is deterministic for any
/// `workers` setting.
pub fn solve_exact(inst: &DvInstance, cfg: &SolverConfig) -> SolveReport {
    let start = Instant::now();
    let a = inst.matrix();
    let lb = lower_bound(a);
    let (pairs, has_duplicate) = PairSystem::build(a);
    if has_duplicate {
        return report(Outcome::Infeasible, 0, start, lb);
    }
    if pairs.len() == 0 {
        return report(Outcome::Solution(ColumnSet::empty()), 1, start, lb);
    }
    let cap = effective_cap(inst);
    if lb > cap {
        return report(Outcome::BudgetExceeded, 0, start, lb);
    }

    let words = a.col_count().div_ceil(64);
    let nodes = AtomicU64::new(0);
    let best: Mutex<Option<Vec<usize>>> = Mutex::new(None);
    let best_size = AtomicUsize::new(usize::MAX);
    let ctx = SearchCtx {
        pairs: &pairs,
        lb,
        cap,
        nodes: &nodes,
        best: &best,
        best_size: &best_size,
    };
    let alive: Vec<u32> = (0..pairs.len() as u32).collect();

    if cfg.workers <= 1 {
        ctx.search(&mut Vec::new(), &mut vec![0u64; words], &alive);
    } else {
        // Split the root branching across workers: work item t explores the
        // solutions containing the root pair's t-th column and none of the
        // earlier ones. The canonical merge makes the result order-free.
        let root = ctx
            .select_pair(&alive, &vec![0u64; words])
            .expect("pairs are nonempty and unbanned");
        let mut items: Vec<(usize, Vec<u64>)> = Vec::new();
        let mut banned = vec![0u64; words];
        let root_mask = pairs.mask(root as usize).to_vec();
        for (w, &word) in root_mask.iter().enumerate() {
            let mut bits = word;
            while bits != 0 {
                let col = w * 64 + bits.trailing_zeros() as usize;
                bits &= bits - 1;
                items.push((col, banned.clone()));
                banned[col / 64] |= 1 << (col % 64);
            }
        }
        nodes.fetch_add(1, AtomicOrdering::Relaxed); // the root node itself
        let queue: Mutex<Vec<(usize, Vec<u64>)>> = Mutex::new(items);
        std::thread::scope(|scope| {
            for _ in 0..cfg.workers {
                scope.spawn(|| loop {
                    let Some((col, mut banned)) = queue.lock().unwrap().pop() else {
                        break;
                    };
                    let mut chosen = vec![col];
                    let next_alive: Vec<u32> = alive
                        .iter()
                        .copied()
                        .filter(|&p| !ctx.pairs.mask_contains(p as usize, col))
                        .collect();
                    ctx.search(&mut chosen, &mut banned, &next_alive);
                });
            }
        });
    }

    let outcome = match best.into_inner().unwrap() {
        Some(cols) => Outcome::Solution(ColumnSet::from_sorted(
            cols.into_iter().map(|c| c + 1).collect(),
        )),
        None => Outcome::BudgetExceeded,
    };
    report(outcome, nodes.into_inner(), start, lb)
}

/// Greedy heuristic: repeatedly add the column separating the most
/// still-unseparated row pairs (ties: lowest column index). The result always
/// verifies; it is not guaranteed minimal.
pub fn solve_greedy(a: &BinaryMatrix) -> Result<ColumnSet> {
    let (pairs, has_duplicate) = PairSystem::build(a);
    if has_duplicate {
        return Err(Error::Infeasible(
            "duplicate rows cannot be separated by any column set".into(),
        ));
    }
    let n = a.col_count();
    let mut alive: Vec<u32> = (0..pairs.len() as u32).collect();
    let mut chosen: Vec<usize> = Vec::new();
    let mut counts = vec![0u32; n];
    while !alive.is_empty() {
        counts.iter_mut().for_each(|c| *c = 0);
        for &p in &alive {
            let mask = pairs.mask(p as usize);
            for (w, &word) in mask.iter().enumerate() {
                let mut bits = word;
                while bits != 0 {
                    let col = w * 64 + bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    counts[col] += 1;
                }
            }
        }
        let (col, _) = counts
            .iter()
            .enumerate()
            .max_by(|(i, a), (j, b)| a.cmp(b).then(j.cmp(i)))
            .expect("at least one column");
        debug_assert!(counts[col] > 0);
        chosen.push(col);
        alive.retain(|&p| !pairs.mask_contains(p as usize, col));
    }
    chosen.sort_unstable();
    Ok(ColumnSet::from_sorted(chosen.into_iter().map(|c| c + 1).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[u8]]) -> BinaryMatrix {
        BinaryMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn cs(cols: &[usize]) -> ColumnSet {
        ColumnSet::new(cols.to_vec()).unwrap()
    }

    fn inst(rows: &[&[u8]], k: usize) -> DvInstance {
        DvInstance::new(mat(rows), k).unwrap()
    }

    #[test]
    fn verify_examples() {
        let a = mat(&[&[0, 0], &[0, 1], &[1, 1]]);
        assert!(verify_solution(&a, &cs(&[1, 2])).unwrap());
        assert!(!verify_solution(&a, &cs(&[1])).unwrap());
        assert!(!verify_solution(&a, &cs(&[2])).unwrap());
        assert!(matches!(
            verify_solution(&a, &cs(&[3])),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound(&mat(&[&[0], &[1]])), 1);
        let rows5: Vec<&[u8]> = vec![&[0, 0, 0]; 5];
        assert_eq!(lower_bound(&mat(&rows5)), 3);
        let rows8: Vec<&[u8]> = vec![&[0, 0, 0]; 8];
        assert_eq!(lower_bound(&mat(&rows8)), 3);
    }

    #[test]
    fn brute_force_examples() {
        let cfg = SolverConfig::default();
        let r = solve_brute_force(&inst(&[&[0, 0], &[0, 1], &[1, 1]], 2), &cfg).unwrap();
        assert_eq!(r.outcome, Outcome::Solution(cs(&[1, 2])));

        for k in 0..=2 {
            let r = solve_brute_force(&inst(&[&[0, 1], &[0, 1]], k), &cfg).unwrap();
            assert_eq!(r.outcome, Outcome::Infeasible);
        }

        // Column 3 is the XOR of columns 1 and 2, so {1,3} and {2,3} also
        // solve it; the lexicographic rule picks {1,2}.
        let r = solve_brute_force(
            &inst(&[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]], 2),
            &cfg,
        )
        .unwrap();
        assert_eq!(r.outcome, Outcome::Solution(cs(&[1, 2])));
    }

    #[test]
    fn brute_force_budget_exceeded() {
        let cfg = SolverConfig::default();
        let r = solve_brute_force(&inst(&[&[0, 0], &[0, 1], &[1, 1]], 1), &cfg).unwrap();
        assert_eq!(r.outcome, Outcome::BudgetExceeded);
    }

    #[test]
    fn brute_force_node_limit() {
        let cfg = SolverConfig {
            node_limit: 3,
            workers: 1,
        };
        let err = solve_brute_force(
            &inst(&[&[0, 0, 0, 0], &[1, 1, 1, 1], &[0, 1, 0, 1], &[1, 0, 1, 0]], 0),
            &cfg,
        )
        .unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn exact_matches_brute_on_examples() {
        let cfg = SolverConfig::default();
        for (rows, k) in [
            (vec![vec![0u8, 0], vec![0, 1], vec![1, 1]], 2usize),
            (vec![vec![0, 1], vec![0, 1]], 1),
            (vec![vec![0, 0, 0], vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]], 2),
            (vec![vec![0, 0], vec![0, 1], vec![1, 1]], 1),
        ] {
            let instance = DvInstance::new(BinaryMatrix::from_rows(&rows).unwrap(), k).unwrap();
            let bf = solve_brute_force(&instance, &cfg).unwrap();
            let ex = solve_exact(&instance, &cfg);
            assert_eq!(bf.outcome, ex.outcome, "rows={rows:?} k={k}");
        }
    }

    #[test]
    fn exact_needs_every_column_of_full_code() {
        // All 2^t rows over t columns: the lower bound forces all t columns.
        for t in [2usize, 3] {
            let rows: Vec<Vec<u8>> = (0..1usize << t)
                .map(|v| (0..t).map(|b| ((v >> (t - 1 - b)) & 1) as u8).collect())
                .collect();
            let instance = DvInstance::new(BinaryMatrix::from_rows(&rows).unwrap(), t).unwrap();
            let r = solve_exact(&instance, &SolverConfig::default());
            assert_eq!(r.outcome, Outcome::Solution(ColumnSet::full(t)));
            assert_eq!(r.lower_bound_used, t);
        }
    }

    #[test]
    fn exact_is_deterministic_across_worker_counts() {
        // A deterministic pseudo-random matrix with a few equal-size optima.
        let rows: Vec<Vec<u8>> = (0..9u64)
            .map(|i| {
                (0..11u64)
                    .map(|j| (((i * 31 + j * 17 + (i * j) % 7) >> 1) % 2) as u8)
                    .collect()
            })
            .collect();
        let matrix = BinaryMatrix::from_rows(&rows).unwrap();
        if !matrix.rows_pairwise_distinct() {
            panic!("test matrix must have distinct rows");
        }
        let instance = DvInstance::new(matrix, 0).unwrap();
        let single = solve_exact(
            &instance,
            &SolverConfig {
                workers: 1,
                ..SolverConfig::default()
            },
        );
        for workers in [2, 4, 8] {
            let multi = solve_exact(
                &instance,
                &SolverConfig {
                    workers,
                    ..SolverConfig::default()
                },
            );
            assert_eq!(single.outcome, multi.outcome, "workers={workers}");
        }
    }

    #[test]
    fn greedy_examples() {
        assert_eq!(
            solve_greedy(&mat(&[&[0, 0], &[0, 1], &[1, 1]])).unwrap(),
            cs(&[1, 2])
        );
        assert_eq!(
            solve_greedy(&mat(&[&[0, 0], &[0, 1], &[1, 0], &[1, 1]])).unwrap(),
            cs(&[1, 2])
        );
        assert_eq!(solve_greedy(&mat(&[&[0, 0, 0], &[1, 1, 1]])).unwrap(), cs(&[1]));
        assert!(matches!(
            solve_greedy(&mat(&[&[0, 1], &[0, 1]])),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn greedy_always_verifies() {
        let a = mat(&[
            &[0, 0, 1, 0, 1],
            &[1, 0, 0, 0, 1],
            &[0, 1, 1, 1, 0],
            &[1, 1, 0, 1, 0],
            &[0, 0, 0, 1, 1],
        ]);
        let g = solve_greedy(&a).unwrap();
        assert!(verify_solution(&a, &g).unwrap());
    }

    #[test]
    fn enumerate_solutions_lists_all() {
        let a = mat(&[&[0, 0, 0], &[0, 1, 1], &[1, 0, 1], &[1, 1, 0]]);
        let sols = enumerate_solutions(&a, 2, 1_000).unwrap();
        assert_eq!(sols, vec![cs(&[1, 2]), cs(&[1, 3]), cs(&[2, 3])]);
    }

    #[test]
    fn single_row_matrix_needs_no_columns() {
        let cfg = SolverConfig::default();
        let instance = inst(&[&[0, 1, 0]], 0);
        let bf = solve_brute_force(&instance, &cfg).unwrap();
        let ex = solve_exact(&instance, &cfg);
        assert_eq!(bf.outcome, Outcome::Solution(ColumnSet::empty()));
        assert_eq!(ex.outcome, Outcome::Solution(ColumnSet::empty()));
    }

    #[test]
    fn instance_text_round_trip() {
        let instance = inst(&[&[0, 0], &[0, 1], &[1, 1]], 2);
        let text = instance.to_text();
        assert_eq!(DvInstance::from_text(&text).unwrap(), instance);
    }
}
