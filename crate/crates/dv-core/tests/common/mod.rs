//! Naive entry-by-entry reference implementations. These deliberately avoid
//! the packed code paths (and the solvers' pair-mask machinery) so they can
//! serve as independent oracles.

#![allow(dead_code)] // each integration test binary uses a different subset

use dv_core::bitmatrix::BinaryMatrix;
use dv_core::cnf::{Assignment, CnfFormula};
use itertools::Itertools;

/// Unpacks a matrix through its public 1-based accessor.
pub fn to_rows(a: &BinaryMatrix) -> Vec<Vec<u8>> {
    (1..=a.row_count())
        .map(|i| (1..=a.col_count()).map(|j| a.entry(i, j)).collect())
        .collect()
}

pub fn naive_distinct(rows: &[Vec<u8>]) -> bool {
    for i in 0..rows.len() {
        for j in (i + 1)..rows.len() {
            if rows[i] == rows[j] {
                return false;
            }
        }
    }
    true
}

pub fn naive_restrict(rows: &[Vec<u8>], cols: &[usize]) -> Vec<Vec<u8>> {
    rows.iter()
        .map(|r| cols.iter().map(|&c| r[c - 1]).collect())
        .collect()
}

pub fn naive_diff_set(rows: &[Vec<u8>], i: usize, j: usize) -> Vec<usize> {
    (1..=rows[0].len())
        .filter(|&c| rows[i - 1][c - 1] != rows[j - 1][c - 1])
        .collect()
}

pub fn naive_verify(rows: &[Vec<u8>], cols: &[usize]) -> bool {
    if cols.is_empty() {
        return rows.len() <= 1;
    }
    naive_distinct(&naive_restrict(rows, cols))
}

/// Every verifying column subset of size at most `max`, by exhaustive
/// enumeration against the naive verifier. Ascending (size, lex) order.
pub fn naive_all_solutions(rows: &[Vec<u8>], max: usize) -> Vec<Vec<usize>> {
    let n = rows[0].len();
    let mut out = Vec::new();
    for size in 0..=max.min(n) {
        for combo in (1..=n).combinations(size) {
            if naive_verify(rows, &combo) {
                out.push(combo);
            }
        }
    }
    out
}

/// Second, structurally different clause evaluator: counts satisfied clauses
/// instead of short-circuiting.
pub fn count_satisfied_clauses(f: &CnfFormula, a: &Assignment) -> usize {
    f.clauses()
        .iter()
        .filter(|clause| {
            let mut hit = false;
            for &lit in clause.iter() {
                let value = a.value(lit.unsigned_abs());
                if (lit > 0 && value) || (lit < 0 && !value) {
                    hit = true;
                }
            }
            hit
        })
        .count()
}
