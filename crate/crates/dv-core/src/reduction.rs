//! Builds a Distinct Vectors instance from a 3-CNF formula so that the
//! instance has a solution within its budget exactly when the formula is
//! satisfiable, and maps solutions back and forth between the two sides.
//!
//! Shape of the construction, for a padded formula with `r` variables
//! (a power of two) and `s = 2^ℓ − 1` clauses:
//!
//! * Variables are split into `log r` *bundles* of `r' = ⌈r / log r⌉` slots;
//!   each bundle contributes `ρ = 2^{r'}` columns, one per candidate truth
//!   assignment to its variables.
//! * The first `ℓ` *consistency* columns carry the clause index; every
//!   solution is forced to take all of them.
//! * Rows: one all-zero row, one indicator row per bundle, and per clause `q`
//!   an odd/even row pair that differs exactly in the columns of bundle
//!   assignments satisfying clause `q`. Distinguishing the pair forces a
//!   satisfying assignment column into the solution.
//! * The budget is `k = ℓ + log r`.

use std::ops::RangeInclusive;

use num_bigint::BigUint;

use crate::bitmatrix::{ColumnSet, MatrixBuilder};
use crate::cnf::{Assignment, CnfFormula};
use crate::solver::DvInstance;
use crate::{Error, Result};

/// A formula normalized for the construction: the variable count is a power
/// of two (at least 2) and the clause count is `2^ℓ − 1`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PaddedFormula {
    formula: CnfFormula,
    original_vars: u32,
    original_clauses: u32,
    ell: u32,
}

impl PaddedFormula {
    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    /// `ℓ` with clause count `2^ℓ − 1`.
    pub fn ell(&self) -> u32 {
        self.ell
    }

    pub fn log_r(&self) -> u32 {
        self.formula.num_vars().trailing_zeros()
    }

    pub fn original_vars(&self) -> u32 {
        self.original_vars
    }

    pub fn original_clauses(&self) -> u32 {
        self.original_clauses
    }
}

/// Normalizes a formula: the variable count is rounded up to the next power
/// of two (minimum 2, so at least one bundle exists) by appending variables
/// that occur in no clause, and the clause count is extended to the next
/// `2^ℓ − 1` by repeating the first clause.
pub fn pad_formula(f: &CnfFormula) -> Result<PaddedFormula> {
    if f.clauses().is_empty() {
        return Err(Error::InvalidArgument("padding needs at least one clause".into()));
    }
    let original_vars = f.num_vars();
    let original_clauses = f.clauses().len() as u32;
    let r = original_vars.next_power_of_two().max(2);
    // Smallest ℓ ≥ 1 with 2^ℓ − 1 ≥ s.
    let ell = (original_clauses + 1).next_power_of_two().trailing_zeros();
    let s = (1u32 << ell) - 1;
    let mut clauses = f.clauses().to_vec();
    while (clauses.len() as u32) < s {
        clauses.push(f.clauses()[0]);
    }
    Ok(PaddedFormula {
        formula: CnfFormula::new(r, clauses)?,
        original_vars,
        original_clauses,
        ell,
    })
}

/// The partition of the padded variables into `log r` bundles, plus the slot
/// lists that cyclically repeat each bundle's variables up to `r'` entries.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BundlePlan {
    slots: Vec<Vec<u32>>,
    distinct: Vec<Vec<u32>>,
    r_prime: u32,
}

impl BundlePlan {
    pub fn num_bundles(&self) -> usize {
        self.slots.len()
    }

    /// `r' = ⌈r / log r⌉`, the slot count of every bundle.
    pub fn r_prime(&self) -> u32 {
        self.r_prime
    }

    /// Slot list of bundle `i` (1-based), repetitions included.
    pub fn slots(&self, bundle: usize) -> &[u32] {
        &self.slots[bundle - 1]
    }

    /// The distinct variables of bundle `i`, ascending.
    pub fn distinct_vars(&self, bundle: usize) -> &[u32] {
        &self.distinct[bundle - 1]
    }
}

/// Deals variables `1..=r` into `log r` contiguous blocks of `r'` (the last
/// block may hold fewer distinct variables), then fills each bundle's slot
/// list by cycling through its own variables.
pub fn make_bundle_plan(padded: &PaddedFormula) -> BundlePlan {
    let r = padded.formula().num_vars();
    let g = padded.log_r();
    let r_prime = r.div_ceil(g);
    let mut slots = Vec::with_capacity(g as usize);
    let mut distinct = Vec::with_capacity(g as usize);
    for i in 0..g {
        let lo = i * r_prime + 1;
        let hi = ((i + 1) * r_prime).min(r);
        let vars: Vec<u32> = (lo..=hi).collect();
        debug_assert!(!vars.is_empty());
        let filled: Vec<u32> = (0..r_prime as usize)
            .map(|t| vars[t % vars.len()])
            .collect();
        slots.push(filled);
        distinct.push(vars);
    }
    BundlePlan {
        slots,
        distinct,
        r_prime,
    }
}

/// Everything needed to lay out the constructed matrix and to translate
/// between truth assignments and column choices.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ReductionMap {
    padded: PaddedFormula,
    plan: BundlePlan,
}

impl ReductionMap {
    pub fn new(padded: PaddedFormula, plan: BundlePlan) -> Result<Self> {
        let r = padded.formula().num_vars();
        let g = padded.log_r();
        if plan.num_bundles() != g as usize || plan.r_prime() != r.div_ceil(g) {
            return Err(Error::InvalidArgument(
                "bundle plan does not match the padded formula".into(),
            ));
        }
        if plan.r_prime() >= 63 {
            return Err(Error::ResourceLimit(format!(
                "2^{} assignment columns per bundle is beyond any supported size",
                plan.r_prime()
            )));
        }
        Ok(ReductionMap { padded, plan })
    }

    pub fn padded(&self) -> &PaddedFormula {
        &self.padded
    }

    pub fn plan(&self) -> &BundlePlan {
        &self.plan
    }

    pub fn ell(&self) -> u32 {
        self.padded.ell()
    }

    pub fn num_bundles(&self) -> usize {
        self.plan.num_bundles()
    }

    /// `ρ = 2^{r'}`, the column count of each bundle.
    pub fn rho(&self) -> u64 {
        1u64 << self.plan.r_prime()
    }

    pub fn padded_clause_count(&self) -> usize {
        self.padded.formula().clauses().len()
    }

    /// `n = ℓ + ρ · log r`.
    pub fn num_cols(&self) -> usize {
        self.ell() as usize + self.rho() as usize * self.num_bundles()
    }

    /// `m = 1 + log r + 2s`.
    pub fn num_rows(&self) -> usize {
        1 + self.num_bundles() + 2 * self.padded_clause_count()
    }

    /// `k = ℓ + log r`.
    pub fn budget(&self) -> usize {
        self.ell() as usize + self.num_bundles()
    }

    /// Columns `1..=ℓ` carrying the binary clause index.
    pub fn consistency_cols(&self) -> RangeInclusive<usize> {
        1..=self.ell() as usize
    }

    /// Columns `ℓ + (i−1)ρ + 1 ..= ℓ + iρ` of bundle `i` (1-based).
    pub fn bundle_col_range(&self, bundle: usize) -> RangeInclusive<usize> {
        assert!(bundle >= 1 && bundle <= self.num_bundles());
        let ell = self.ell() as usize;
        let rho = self.rho() as usize;
        ell + (bundle - 1) * rho + 1..=ell + bundle * rho
    }

    /// The `p`-th truth assignment to bundle `i`'s distinct variables
    /// (`p ∈ [ρ]`, 1-based): a binary counter over the distinct variables,
    /// lowest variable index as the most significant bit, `false < true`,
    /// cycling once all `2^{d_i}` assignments are exhausted.
    pub fn assignment_of(&self, bundle: usize, p: u64) -> Vec<(u32, bool)> {
        assert!(p >= 1 && p <= self.rho(), "assignment index {p} out of range 1..={}", self.rho());
        let vars = self.plan.distinct_vars(bundle);
        let d = vars.len();
        let idx = (p - 1) % (1u64 << d);
        vars.iter()
            .enumerate()
            .map(|(t, &v)| (v, (idx >> (d - 1 - t)) & 1 == 1))
            .collect()
    }

    /// Bit `p` is set iff some literal of clause `q` whose variable lies in
    /// bundle `i` is satisfied by the `p`-th assignment to that bundle.
    pub fn sat_table(&self, bundle: usize, clause: usize) -> Vec<bool> {
        assert!(bundle >= 1 && bundle <= self.num_bundles());
        assert!(clause >= 1 && clause <= self.padded_clause_count());
        let lits = self.padded.formula().clauses()[clause - 1];
        let vars = self.plan.distinct_vars(bundle);
        let d = vars.len();
        let period = 1usize << d;
        let base: Vec<bool> = (0..period)
            .map(|idx| {
                lits.iter().any(|&lit| match vars.binary_search(&lit.unsigned_abs()) {
                    Ok(pos) => {
                        let val = (idx >> (d - 1 - pos)) & 1 == 1;
                        if lit > 0 {
                            val
                        } else {
                            !val
                        }
                    }
                    Err(_) => false,
                })
            })
            .collect();
        (0..self.rho() as usize).map(|p0| base[p0 % period]).collect()
    }
}

/// Default cap on the constructed column count (`ρ · log r`).
pub const DEFAULT_MAX_COLS: u64 = 1 << 20;

pub fn build_instance(f: &CnfFormula) -> Result<(DvInstance, ReductionMap)> {
    build_instance_capped(f, DEFAULT_MAX_COLS)
}

/// Runs the construction: pads the formula, plans the bundles, and lays out
/// the `(1 + log r + 2s) × (ℓ + ρ·log r)` matrix with budget `k = ℓ + log r`.
pub fn build_instance_capped(
    f: &CnfFormula,
    max_cols: u64,
) -> Result<(DvInstance, ReductionMap)> {
    let padded = pad_formula(f)?;
    let plan = make_bundle_plan(&padded);
    let g = plan.num_bundles() as u128;
    let rho_cols = if plan.r_prime() >= 63 {
        u128::MAX
    } else {
        (1u128 << plan.r_prime()) * g
    };
    if rho_cols > max_cols as u128 {
        return Err(Error::ResourceLimit(format!(
            "construction needs {rho_cols} assignment columns, cap is {max_cols}"
        )));
    }
    let map = ReductionMap::new(padded, plan)?;

    let ell = map.ell() as usize;
    let g = map.num_bundles();
    let s = map.padded_clause_count();
    let rho = map.rho() as usize;
    let mut b = MatrixBuilder::zeros(map.num_rows(), map.num_cols());
    // Row 1 stays all-zero. Rows 2..=g+1 indicate one bundle each.
    for i in 1..=g {
        for c in map.bundle_col_range(i) {
            b.set(i + 1, c);
        }
    }
    // Per clause q: an odd row (clause index ∘ satisfying-assignment bits)
    // and an even row (clause index ∘ zeros).
    for q in 1..=s {
        let odd = g + 2 * q;
        let even = g + 2 * q + 1;
        for c in 1..=ell {
            if (q >> (ell - c)) & 1 == 1 {
                b.set(odd, c);
                b.set(even, c);
            }
        }
        for i in 1..=g {
            let base = ell + (i - 1) * rho;
            for (p0, hit) in map.sat_table(i, q).into_iter().enumerate() {
                if hit {
                    b.set(odd, base + p0 + 1);
                }
            }
        }
    }
    let instance = DvInstance::new(b.finish(), map.budget())?;
    Ok((instance, map))
}

/// Turns a satisfying assignment into a solution of the constructed
/// instance: all `ℓ` consistency columns plus, per bundle, the column of the
/// first assignment agreeing with `a` on the bundle's distinct variables.
/// The result always has exactly `ℓ + log r` columns.
pub fn encode_solution(map: &ReductionMap, a: &Assignment) -> Result<ColumnSet> {
    let formula = map.padded().formula();
    if (a.len() as u32) < formula.num_vars() {
        return Err(Error::InvalidArgument(format!(
            "assignment covers {} variables, the padded formula has {}",
            a.len(),
            formula.num_vars()
        )));
    }
    if !formula.evaluate(a)? {
        return Err(Error::InvalidArgument(
            "assignment does not satisfy the formula".into(),
        ));
    }
    let ell = map.ell() as usize;
    let rho = map.rho() as usize;
    let mut cols: Vec<usize> = (1..=ell).collect();
    for i in 1..=map.num_bundles() {
        let vars = map.plan().distinct_vars(i);
        let mut idx: usize = 0;
        for &v in vars {
            idx = (idx << 1) | a.value(v) as usize;
        }
        cols.push(ell + (i - 1) * rho + idx + 1);
    }
    Ok(ColumnSet::from_sorted(cols))
}

/// Reads a solution of the constructed instance back into a truth
/// assignment: checks that all consistency columns are present and that each
/// bundle contributes exactly one column, then maps those columns to their
/// assignments. Padding variables are set to `false`.
pub fn decode_solution(map: &ReductionMap, k: &ColumnSet) -> Result<Assignment> {
    let ell = map.ell() as usize;
    let n = map.num_cols();
    if k.max_col() > n {
        return Err(Error::Structure(format!(
            "column {} out of range 1..={n}",
            k.max_col()
        )));
    }
    for c in 1..=ell {
        if !k.contains(c) {
            return Err(Error::Structure(format!(
                "consistency column {c} missing from the solution"
            )));
        }
    }
    let r = map.padded().formula().num_vars();
    let mut values = vec![false; r as usize];
    let rho = map.rho() as usize;
    for i in 1..=map.num_bundles() {
        let range = map.bundle_col_range(i);
        let in_range: Vec<usize> = k.iter().filter(|c| range.contains(c)).collect();
        if in_range.len() != 1 {
            return Err(Error::Structure(format!(
                "bundle {i} contributes {} columns, expected exactly 1",
                in_range.len()
            )));
        }
        let p = (in_range[0] - ell - (i - 1) * rho) as u64;
        for (v, val) in map.assignment_of(i, p) {
            values[(v - 1) as usize] = val;
        }
    }
    for v in map.padded().original_vars()..r {
        values[v as usize] = false;
    }
    Ok(Assignment::new(values))
}

/// Exact size accounting for the construction, computed without building the
/// matrix. `rho` and `cols` are arbitrary-precision because they grow as
/// `2^{r/log r}`.
#[derive(Clone, PartialEq, Debug)]
pub struct CostReport {
    pub padded_vars: u64,
    pub padded_clauses: u64,
    pub ell: u32,
    pub log_r: u32,
    pub r_prime: u64,
    pub rho: BigUint,
    pub cols: BigUint,
    pub rows: u64,
    pub budget: u64,
    /// `log₂(2s) + log₂(r)`, an upper bound on the budget.
    pub budget_bound: f64,
}

impl CostReport {
    /// One `<field> <value>` line each, matching the construction metadata
    /// naming.
    pub fn text(&self) -> String {
        format!(
            "r {}\ns {}\nell {}\nrprime {}\nrho {}\nn {}\nm {}\nk {}\nbound {:.6}\n",
            self.padded_vars,
            self.padded_clauses,
            self.ell,
            self.r_prime,
            self.rho,
            self.cols,
            self.rows,
            self.budget,
            self.budget_bound,
        )
    }
}

pub fn cost_report(f: &CnfFormula) -> Result<CostReport> {
    let padded = pad_formula(f)?;
    let r = padded.formula().num_vars() as u64;
    let s = padded.formula().clauses().len() as u64;
    let ell = padded.ell();
    let log_r = padded.log_r();
    let r_prime = r.div_ceil(log_r as u64);
    let rho = BigUint::from(1u8) << r_prime;
    let cols = BigUint::from(ell) + &rho * log_r;
    let rows = 1 + log_r as u64 + 2 * s;
    let budget = ell as u64 + log_r as u64;
    let budget_bound = ((2 * s) as f64).log2() + (r as f64).log2();
    assert!(
        (budget as f64) <= budget_bound + 1e-9,
        "budget {budget} must stay within its bound {budget_bound}"
    );
    Ok(CostReport {
        padded_vars: r,
        padded_clauses: s,
        ell,
        log_r,
        r_prime,
        rho,
        cols,
        rows,
        budget,
        budget_bound,
    })
}

/// Writes the construction metadata: layout parameters, bundle slot lists,
/// and the padded formula in canonical DIMACS after a `formula` line.
/// [`parse_metadata`] reconstructs the mapping bit-exactly.
pub fn format_metadata(map: &ReductionMap) -> String {
    let mut out = String::new();
    out.push_str("c format v1\n");
    out.push_str(&format!("ell {}\n", map.ell()));
    out.push_str(&format!("logr {}\n", map.num_bundles()));
    out.push_str(&format!("rprime {}\n", map.plan().r_prime()));
    out.push_str(&format!("rho {}\n", map.rho()));
    out.push_str(&format!(
        "orig {} {}\n",
        map.padded().original_vars(),
        map.padded().original_clauses()
    ));
    for i in 1..=map.num_bundles() {
        out.push_str(&format!("bundle {i}"));
        for &v in map.plan().slots(i) {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
    }
    out.push_str("formula\n");
    out.push_str(&map.padded().formula().to_dimacs());
    out
}

pub fn parse_metadata(text: &str) -> Result<ReductionMap> {
    let mut ell: Option<u32> = None;
    let mut logr: Option<usize> = None;
    let mut r_prime: Option<u32> = None;
    let mut rho: Option<u64> = None;
    let mut orig: Option<(u32, u32)> = None;
    let mut bundles: Vec<Vec<u32>> = Vec::new();
    let mut dimacs = String::new();
    let mut saw_formula = false;

    let mut lines = text.lines().enumerate();
    for (idx, raw) in &mut lines {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        if line == "formula" {
            saw_formula = true;
            break;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap();
        let values: Vec<&str> = toks.collect();
        let one = |name: &str| -> Result<u64> {
            if values.len() != 1 {
                return Err(Error::parse(lineno, format!("`{name}` takes one value")));
            }
            values[0]
                .parse()
                .map_err(|_| Error::parse(lineno, format!("bad `{name}` value `{}`", values[0])))
        };
        match key {
            "ell" => ell = Some(one("ell")? as u32),
            "logr" => logr = Some(one("logr")? as usize),
            "rprime" => r_prime = Some(one("rprime")? as u32),
            "rho" => rho = Some(one("rho")?),
            "orig" => {
                if values.len() != 2 {
                    return Err(Error::parse(lineno, "`orig` takes two values"));
                }
                let r0 = values[0]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad original variable count"))?;
                let s0 = values[1]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad original clause count"))?;
                orig = Some((r0, s0));
            }
            "bundle" => {
                let nums: Vec<u32> = values
                    .iter()
                    .map(|v| v.parse())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| Error::parse(lineno, "bad bundle line"))?;
                if nums.len() < 2 {
                    return Err(Error::parse(lineno, "`bundle` needs an index and slots"));
                }
                if nums[0] as usize != bundles.len() + 1 {
                    return Err(Error::parse(
                        lineno,
                        format!("expected bundle {}, found bundle {}", bundles.len() + 1, nums[0]),
                    ));
                }
                bundles.push(nums[1..].to_vec());
            }
            other => {
                return Err(Error::parse(lineno, format!("unknown metadata key `{other}`")));
            }
        }
    }
    if saw_formula {
        for (_, raw) in lines {
            dimacs.push_str(raw);
            dimacs.push('\n');
        }
    } else {
        return Err(Error::parse(1, "missing `formula` section"));
    }

    let ell = ell.ok_or_else(|| Error::parse(1, "missing `ell`"))?;
    let logr = logr.ok_or_else(|| Error::parse(1, "missing `logr`"))?;
    let r_prime = r_prime.ok_or_else(|| Error::parse(1, "missing `rprime`"))?;
    let rho = rho.ok_or_else(|| Error::parse(1, "missing `rho`"))?;
    let (original_vars, original_clauses) = orig.ok_or_else(|| Error::parse(1, "missing `orig`"))?;

    let formula = CnfFormula::parse_dimacs(&dimacs)?;
    let r = formula.num_vars();
    let s = formula.clauses().len();
    let bad = |msg: String| Error::parse(1, msg);
    if !r.is_power_of_two() || r < 2 || r.trailing_zeros() as usize != logr {
        return Err(bad(format!("variable count {r} does not match logr {logr}")));
    }
    if ell == 0 || ell >= 32 || s != (1usize << ell) - 1 {
        return Err(bad(format!("clause count {s} does not match ell {ell}")));
    }
    if r_prime != r.div_ceil(logr as u32) {
        return Err(bad(format!("rprime {r_prime} does not match ⌈r/logr⌉")));
    }
    if r_prime >= 63 || rho != 1u64 << r_prime {
        return Err(bad(format!("rho {rho} does not match 2^rprime")));
    }
    if original_vars == 0 || original_vars > r || original_clauses == 0 || original_clauses as usize > s {
        return Err(bad("original sizes exceed padded sizes".into()));
    }
    if bundles.len() != logr {
        return Err(bad(format!("expected {logr} bundle lines, found {}", bundles.len())));
    }
    let mut distinct = Vec::with_capacity(bundles.len());
    let mut var_seen = vec![false; r as usize];
    for slots in &bundles {
        if slots.len() != r_prime as usize {
            return Err(bad(format!(
                "bundle has {} slots, expected {r_prime}",
                slots.len()
            )));
        }
        let mut vars: Vec<u32> = slots.to_vec();
        vars.sort_unstable();
        vars.dedup();
        for &v in &vars {
            if v == 0 || v > r {
                return Err(bad(format!("bundle variable {v} out of range 1..={r}")));
            }
            if var_seen[(v - 1) as usize] {
                return Err(bad(format!("variable {v} appears in two bundles")));
            }
            var_seen[(v - 1) as usize] = true;
        }
        distinct.push(vars);
    }
    if !var_seen.iter().all(|&b| b) {
        return Err(bad("bundles do not cover every variable".into()));
    }
    // Padding variables must not occur in any clause.
    for clause in formula.clauses() {
        for &lit in clause {
            if lit.unsigned_abs() > original_vars {
                return Err(bad(format!(
                    "padding variable {} occurs in a clause",
                    lit.unsigned_abs()
                )));
            }
        }
    }

    let padded = PaddedFormula {
        formula,
        original_vars,
        original_clauses,
        ell,
    };
    let plan = BundlePlan {
        slots: bundles,
        distinct,
        r_prime,
    };
    ReductionMap::new(padded, plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::{solve_exact, verify_solution, SolverConfig};

    fn f(vars: u32, clauses: &[[i32; 3]]) -> CnfFormula {
        CnfFormula::new(vars, clauses.to_vec()).unwrap()
    }

    #[test]
    fn padding_examples() {
        let p = pad_formula(&f(3, &[[1, -2, 3], [2, 3, 3]])).unwrap();
        assert_eq!(p.formula().num_vars(), 4);
        assert_eq!(p.formula().clauses().len(), 3);
        assert_eq!(p.ell(), 2);
        assert_eq!(p.formula().clauses()[2], [1, -2, 3]);

        let q = pad_formula(&f(4, &[[1, 2, 3], [2, 3, 4], [1, 1, 1]])).unwrap();
        assert_eq!(q.formula().num_vars(), 4);
        assert_eq!(q.formula().clauses().len(), 3);
        assert_eq!(q.ell(), 2);
        assert_eq!(q.original_vars(), 4);

        let tiny = pad_formula(&f(1, &[[1, 1, 1]])).unwrap();
        assert_eq!(tiny.formula().num_vars(), 2);
        assert_eq!(tiny.formula().clauses().len(), 1);
        assert_eq!(tiny.ell(), 1);
    }

    #[test]
    fn bundle_plan_examples() {
        let plan4 = make_bundle_plan(&pad_formula(&f(4, &[[1, 2, 3]])).unwrap());
        assert_eq!(plan4.num_bundles(), 2);
        assert_eq!(plan4.r_prime(), 2);
        assert_eq!(plan4.slots(1), &[1, 2]);
        assert_eq!(plan4.slots(2), &[3, 4]);

        let plan8 = make_bundle_plan(&pad_formula(&f(8, &[[1, 2, 3]])).unwrap());
        assert_eq!(plan8.num_bundles(), 3);
        assert_eq!(plan8.r_prime(), 3);
        assert_eq!(plan8.slots(1), &[1, 2, 3]);
        assert_eq!(plan8.slots(2), &[4, 5, 6]);
        assert_eq!(plan8.slots(3), &[7, 8, 7]);
        assert_eq!(plan8.distinct_vars(3), &[7, 8]);

        let plan2 = make_bundle_plan(&pad_formula(&f(2, &[[1, 2, 2]])).unwrap());
        assert_eq!(plan2.num_bundles(), 1);
        assert_eq!(plan2.slots(1), &[1, 2]);
    }

    fn map_for(formula: &CnfFormula) -> ReductionMap {
        let padded = pad_formula(formula).unwrap();
        let plan = make_bundle_plan(&padded);
        ReductionMap::new(padded, plan).unwrap()
    }

    #[test]
    fn assignment_order_is_a_binary_counter() {
        // r = 2: one bundle over {x1, x2}; order FF, FT, TF, TT.
        let map = map_for(&f(2, &[[1, 2, 2]]));
        assert_eq!(map.rho(), 4);
        assert_eq!(map.assignment_of(1, 1), vec![(1, false), (2, false)]);
        assert_eq!(map.assignment_of(1, 2), vec![(1, false), (2, true)]);
        assert_eq!(map.assignment_of(1, 3), vec![(1, true), (2, false)]);
        assert_eq!(map.assignment_of(1, 4), vec![(1, true), (2, true)]);
    }

    #[test]
    fn assignment_order_cycles_for_small_bundles() {
        // r = 8: bundle 3 has distinct vars {7, 8} but ρ = 8 columns.
        let map = map_for(&f(8, &[[1, 2, 3]]));
        assert_eq!(map.rho(), 8);
        assert_eq!(map.assignment_of(3, 1), map.assignment_of(3, 5));
        assert_eq!(map.assignment_of(3, 4), map.assignment_of(3, 8));
        assert_ne!(map.assignment_of(3, 1), map.assignment_of(3, 2));
    }

    #[test]
    fn sat_table_examples() {
        // Bundle 1 of an r=4 formula holds {x1, x2}; clause (x1 ∨ ¬x2 ∨ x3)
        // has x3 outside the bundle, so its bits follow x1 ∨ ¬x2 over the
        // order FF, FT, TF, TT.
        let map = map_for(&f(4, &[[1, -2, 3]]));
        assert_eq!(map.sat_table(1, 1), vec![true, false, true, true]);

        // No variable of the clause in bundle 2 of an r=4 formula over
        // {x3, x4}? Use a clause on x1 only.
        let map = map_for(&f(4, &[[1, 1, 1]]));
        assert_eq!(map.sat_table(2, 1), vec![false, false, false, false]);

        // Tautological clause: every assignment of the home bundle works.
        let map = map_for(&f(4, &[[1, -1, 1]]));
        assert_eq!(map.sat_table(1, 1), vec![true, true, true, true]);
    }

    #[test]
    fn build_matches_size_formulas() {
        // Padded shape r=4, s=3: n = 2 + 4·2 = 10, m = 1 + 2 + 6 = 9, k = 4.
        let formula = f(3, &[[1, -2, 3], [2, 3, 3]]);
        let (inst, map) = build_instance(&formula).unwrap();
        assert_eq!(inst.matrix().col_count(), 10);
        assert_eq!(inst.matrix().row_count(), 9);
        assert_eq!(inst.budget(), 4);
        assert_eq!(map.num_cols(), 10);
        assert_eq!(map.num_rows(), 9);

        // Row 2 is the first bundle indicator: 00 1111 0000.
        let row2: Vec<u8> = (1..=10).map(|j| inst.matrix().entry(2, j)).collect();
        assert_eq!(row2, vec![0, 0, 1, 1, 1, 1, 0, 0, 0, 0]);

        // The even row for clause q=2 is bin(2,2) ∘ 0^8 = 10 00000000,
        // at row index log r + 2q + 1 = 7.
        let row7: Vec<u8> = (1..=10).map(|j| inst.matrix().entry(7, j)).collect();
        assert_eq!(row7, vec![1, 0, 0, 0, 0, 0, 0, 0, 0, 0]);

        assert!(inst.matrix().rows_pairwise_distinct());
    }

    #[test]
    fn built_rows_are_always_distinct() {
        for formula in [
            f(1, &[[1, 1, 1]]),
            f(2, &[[1, -2, 1], [-1, 2, -1]]),
            f(5, &[[1, 2, 3], [-4, 5, -1], [2, -3, 4], [5, 5, 5]]),
            f(3, &[[1, 1, 1], [-1, -1, -1], [2, 2, 2]]),
        ] {
            let (inst, _) = build_instance(&formula).unwrap();
            assert!(inst.matrix().rows_pairwise_distinct());
        }
    }

    #[test]
    fn build_respects_column_cap() {
        let err = build_instance_capped(&f(16, &[[1, 2, 3]]), 32).unwrap_err();
        assert!(matches!(err, Error::ResourceLimit(_)));
    }

    #[test]
    fn encode_example_single_bundle() {
        // r = 2 padded, s = 1 (ℓ = 1): assignment (T, F) sits at position 3
        // of the order FF, FT, TF, TT, so K = {1, 1 + 3} = {1, 4}.
        let formula = f(2, &[[1, 1, -2]]);
        let (inst, map) = build_instance(&formula).unwrap();
        let a = Assignment::new(vec![true, false]);
        let k = encode_solution(&map, &a).unwrap();
        assert_eq!(k.as_slice(), &[1, 4]);
        assert_eq!(k.len(), map.budget());
        assert!(verify_solution(inst.matrix(), &k).unwrap());
    }

    #[test]
    fn encode_rejects_falsifying_assignment() {
        let formula = f(2, &[[1, 1, 1]]);
        let (_, map) = build_instance(&formula).unwrap();
        let err = encode_solution(&map, &Assignment::new(vec![false, false])).unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }

    #[test]
    fn decode_round_trips_clause_variables() {
        let formula = f(3, &[[1, -2, 3], [2, 3, 3]]);
        let (inst, map) = build_instance(&formula).unwrap();
        let padded_vars = map.padded().formula().num_vars();
        for bits in 0..1u32 << 3 {
            let a = Assignment::from_index(bits as u64, 3).extended(padded_vars);
            if !formula.evaluate(&a).unwrap() {
                continue;
            }
            let k = encode_solution(&map, &a).unwrap();
            assert!(verify_solution(inst.matrix(), &k).unwrap());
            let back = decode_solution(&map, &k).unwrap();
            for v in 1..=3 {
                assert_eq!(back.value(v), a.value(v), "variable {v}");
            }
            assert!(formula.evaluate(&back).unwrap());
            // encode(decode(K)) is again a valid solution of the same size.
            let k2 = encode_solution(&map, &back).unwrap();
            assert_eq!(k2.len(), map.budget());
            assert!(verify_solution(inst.matrix(), &k2).unwrap());
        }
    }

    #[test]
    fn decode_rejects_malformed_solutions() {
        let formula = f(2, &[[1, 1, -2]]);
        let (_, map) = build_instance(&formula).unwrap();
        // Missing the consistency column.
        let err = decode_solution(&map, &ColumnSet::new(vec![2, 3]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        // Two columns in the bundle range.
        let err = decode_solution(&map, &ColumnSet::new(vec![1, 2, 3]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
        // Out of range.
        let err = decode_solution(&map, &ColumnSet::new(vec![1, 99]).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Structure(_)));
    }

    #[test]
    fn solver_finds_encoded_budget_on_satisfiable_formulas() {
        let formula = f(4, &[[1, -2, 3], [2, -3, 4], [-1, 2, 2]]);
        let (inst, map) = build_instance(&formula).unwrap();
        let rep = solve_exact(&inst, &SolverConfig::default());
        let sol = rep.outcome.solution().expect("satisfiable formula");
        assert_eq!(sol.len(), map.budget());
        let back = decode_solution(&map, sol).unwrap();
        assert!(formula.evaluate(&back).unwrap());
    }

    #[test]
    fn cost_report_examples() {
        let report = cost_report(&f(4, &[[1, 2, 3], [2, 3, 4], [1, 1, 1]])).unwrap();
        assert_eq!(
            (report.ell, report.r_prime, report.rho.to_string()),
            (2, 2, "4".into())
        );
        assert_eq!(report.cols.to_string(), "10");
        assert_eq!((report.rows, report.budget), (9, 4));
        assert!(report.budget_bound >= 4.0 && report.budget_bound < 4.6);

        let clauses7: Vec<[i32; 3]> = (0..7).map(|i| [1 + (i % 8), 2, 3]).collect();
        let report = cost_report(&f(8, &clauses7)).unwrap();
        assert_eq!((report.ell, report.r_prime, report.rho.to_string()), (3, 3, "8".into()));
        assert_eq!(report.cols.to_string(), "27");
        assert_eq!((report.rows, report.budget), (18, 6));

        let clauses15: Vec<[i32; 3]> = (0..15).map(|i| [1 + (i % 16), 2, 3]).collect();
        let report = cost_report(&f(16, &clauses15)).unwrap();
        assert_eq!((report.ell, report.r_prime, report.rho.to_string()), (4, 4, "16".into()));
        assert_eq!(report.cols.to_string(), "68");
        assert_eq!((report.rows, report.budget), (35, 8));
    }

    #[test]
    fn metadata_round_trip() {
        let formula = f(3, &[[1, -2, 3], [2, 3, 3]]);
        let (_, map) = build_instance(&formula).unwrap();
        let text = format_metadata(&map);
        let parsed = parse_metadata(&text).unwrap();
        assert_eq!(parsed, map);
        assert_eq!(format_metadata(&parsed), text);
    }

    #[test]
    fn metadata_rejects_inconsistencies() {
        let formula = f(3, &[[1, -2, 3], [2, 3, 3]]);
        let (_, map) = build_instance(&formula).unwrap();
        let good = format_metadata(&map);
        assert!(parse_metadata(&good.replace("rho 4", "rho 8")).is_err());
        assert!(parse_metadata(&good.replace("bundle 2 3 4\n", "")).is_err());
        assert!(parse_metadata(&good.replace("formula\n", "")).is_err());
        assert!(parse_metadata(&good.replace("bundle 1 1 2", "bundle 1 1 3")).is_err());
    }
}
