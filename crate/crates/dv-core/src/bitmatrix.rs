//! Bit-packed binary matrices and column sets.
//!
//! Rows are packed into `u64` words so that row-pair difference sets reduce to
//! word-wise XOR plus bit iteration; that pair-distinguishing check is the
//! inner loop of every solver in this crate. All indices exposed by this
//! module are 1-based (row `i ∈ [m]`, column `j ∈ [n]`); the packed layout is
//! an internal detail.

use std::cmp::Ordering;
use std::fmt;

use crate::{Error, Result};

const WORD_BITS: usize = 64;

/// An immutable `m × n` matrix over `{0, 1}`.
///
/// Duplicate rows are representable on purpose: solvers report such instances
/// as infeasible instead of the type rejecting them at construction.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BinaryMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl BinaryMatrix {
    /// Builds a matrix from explicit row vectors of `0`/`1` entries.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidArgument("matrix needs at least one row".into()));
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::InvalidArgument("matrix needs at least one column".into()));
        }
        let mut builder = MatrixBuilder::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::InvalidArgument(format!(
                    "row {} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    cols
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                match v {
                    0 => {}
                    1 => builder.set(i + 1, j + 1),
                    other => {
                        return Err(Error::InvalidArgument(format!(
                            "entry ({}, {}) is {}, expected 0 or 1",
                            i + 1,
                            j + 1,
                            other
                        )))
                    }
                }
            }
        }
        Ok(builder.finish())
    }

    pub fn row_count(&self) -> usize {
        self.rows
    }

    pub fn col_count(&self) -> usize {
        self.cols
    }

    /// Entry `A[i, j]` with 1-based `i`, `j`. Panics when out of range.
    pub fn entry(&self, i: usize, j: usize) -> u8 {
        assert!(i >= 1 && i <= self.rows, "row index {i} out of range 1..={}", self.rows);
        assert!(j >= 1 && j <= self.cols, "column index {j} out of range 1..={}", self.cols);
        let word = self.bits[(i - 1) * self.words_per_row + (j - 1) / WORD_BITS];
        ((word >> ((j - 1) % WORD_BITS)) & 1) as u8
    }

    pub(crate) fn row_words(&self, row0: usize) -> &[u64] {
        let start = row0 * self.words_per_row;
        &self.bits[start..start + self.words_per_row]
    }

    /// True iff no two rows have identical entry sequences.
    pub fn rows_pairwise_distinct(&self) -> bool {
        let mut order: Vec<usize> = (0..self.rows).collect();
        order.sort_unstable_by(|&a, &b| self.row_words(a).cmp(self.row_words(b)));
        order
            .windows(2)
            .all(|w| self.row_words(w[0]) != self.row_words(w[1]))
    }

    /// The `m × |K|` submatrix `A[*, K]`, columns in `K`'s ascending order.
    pub fn restrict(&self, k: &ColumnSet) -> Result<BinaryMatrix> {
        if k.is_empty() {
            return Err(Error::InvalidArgument(
                "cannot restrict to an empty column set".into(),
            ));
        }
        if k.max_col() > self.cols {
            return Err(Error::InvalidArgument(format!(
                "column {} out of range 1..={}",
                k.max_col(),
                self.cols
            )));
        }
        let mut builder = MatrixBuilder::zeros(self.rows, k.len());
        for i in 1..=self.rows {
            for (jj, col) in k.iter().enumerate() {
                if self.entry(i, col) == 1 {
                    builder.set(i, jj + 1);
                }
            }
        }
        Ok(builder.finish())
    }

    /// The set of columns where rows `i` and `j` disagree (possibly empty).
    pub fn difference_set(&self, i: usize, j: usize) -> Result<ColumnSet> {
        if i == j {
            return Err(Error::InvalidArgument(format!(
                "difference set needs two distinct rows, got ({i}, {j})"
            )));
        }
        for row in [i, j] {
            if row < 1 || row > self.rows {
                return Err(Error::InvalidArgument(format!(
                    "row {} out of range 1..={}",
                    row, self.rows
                )));
            }
        }
        let a = self.row_words(i - 1);
        let b = self.row_words(j - 1);
        let mut cols = Vec::new();
        for (w, (&x, &y)) in a.iter().zip(b).enumerate() {
            let mut diff = x ^ y;
            while diff != 0 {
                let bit = diff.trailing_zeros() as usize;
                cols.push(w * WORD_BITS + bit + 1);
                diff &= diff - 1;
            }
        }
        Ok(ColumnSet::from_sorted(cols))
    }

    /// XOR of two packed rows, written into `out` (internal solver fast path).
    pub(crate) fn xor_rows_into(&self, i0: usize, j0: usize, out: &mut Vec<u64>) {
        out.clear();
        out.extend(
            self.row_words(i0)
                .iter()
                .zip(self.row_words(j0))
                .map(|(&x, &y)| x ^ y),
        );
    }
}

impl fmt::Debug for BinaryMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BinaryMatrix {}x{} [", self.rows, self.cols)?;
        for i in 1..=self.rows {
            write!(f, "  ")?;
            for j in 1..=self.cols {
                write!(f, "{}", self.entry(i, j))?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Incrementally sets bits, then freezes into an immutable [`BinaryMatrix`].
pub struct MatrixBuilder {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl MatrixBuilder {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        let words_per_row = cols.div_ceil(WORD_BITS);
        MatrixBuilder {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    /// Sets `A[i, j] = 1` (1-based).
    pub fn set(&mut self, i: usize, j: usize) {
        assert!(i >= 1 && i <= self.rows && j >= 1 && j <= self.cols);
        self.bits[(i - 1) * self.words_per_row + (j - 1) / WORD_BITS] |= 1 << ((j - 1) % WORD_BITS);
    }

    pub fn finish(self) -> BinaryMatrix {
        BinaryMatrix {
            rows: self.rows,
            cols: self.cols,
            words_per_row: self.words_per_row,
            bits: self.bits,
        }
    }
}

/// A set of 1-based column indices, kept strictly ascending.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct ColumnSet {
    cols: Vec<usize>,
}

impl ColumnSet {
    /// Builds a set from arbitrary indices; sorts and deduplicates.
    pub fn new(mut cols: Vec<usize>) -> Result<Self> {
        if cols.contains(&0) {
            return Err(Error::InvalidArgument("column indices are 1-based".into()));
        }
        cols.sort_unstable();
        cols.dedup();
        Ok(ColumnSet { cols })
    }

    /// Builds a set from indices already strictly ascending and ≥ 1.
    pub fn from_sorted(cols: Vec<usize>) -> Self {
        debug_assert!(cols.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(cols.first().is_none_or(|&c| c >= 1));
        ColumnSet { cols }
    }

    pub fn empty() -> Self {
        ColumnSet { cols: Vec::new() }
    }

    /// The full set `{1, …, n}`.
    pub fn full(n: usize) -> Self {
        ColumnSet {
            cols: (1..=n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.cols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cols.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.cols.iter().copied()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.cols
    }

    pub fn contains(&self, col: usize) -> bool {
        self.cols.binary_search(&col).is_ok()
    }

    pub fn max_col(&self) -> usize {
        self.cols.last().copied().unwrap_or(0)
    }

    /// Canonical order on solutions: smaller size first, then lexicographic.
    pub fn canonical_cmp(&self, other: &ColumnSet) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.cols.cmp(&other.cols))
    }

    /// Parses a single line of ascending indices; rejects descending or
    /// duplicated entries.
    pub fn parse(line: &str) -> Result<Self> {
        let mut cols = Vec::new();
        for tok in line.split_whitespace() {
            let c: usize = tok
                .parse()
                .map_err(|_| Error::parse(1, format!("bad column index `{tok}`")))?;
            if c == 0 {
                return Err(Error::parse(1, "column indices are 1-based"));
            }
            if let Some(&last) = cols.last() {
                if c <= last {
                    return Err(Error::parse(
                        1,
                        format!("column indices must be strictly ascending, got {last} then {c}"),
                    ));
                }
            }
            cols.push(c);
        }
        Ok(ColumnSet { cols })
    }
}

impl fmt::Display for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.cols.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for ColumnSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{self}}}")
    }
}

fn is_comment(line: &str) -> bool {
    line == "c" || line.starts_with("c ")
}

/// Parses the instance text format:
///
/// ```text
/// c format v1
/// p dv <m> <n> <k>
/// 0101…   (m lines of exactly n characters from {0,1})
/// ```
///
/// `k = 0` means "minimize". Lines beginning `c ` are ignored anywhere.
pub fn parse_instance_text(text: &str) -> Result<(BinaryMatrix, usize)> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut rows: Vec<(usize, &str)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || is_comment(line) {
            continue;
        }
        if header.is_none() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 5 || toks[0] != "p" || toks[1] != "dv" {
                return Err(Error::parse(lineno, "expected header `p dv <m> <n> <k>`"));
            }
            let nums: Vec<usize> = toks[2..]
                .iter()
                .map(|t| t.parse())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::parse(lineno, "header fields must be nonnegative integers"))?;
            let (m, n, k) = (nums[0], nums[1], nums[2]);
            if m == 0 || n == 0 {
                return Err(Error::parse(lineno, "matrix dimensions must be positive"));
            }
            if k > n {
                return Err(Error::parse(lineno, format!("budget k={k} exceeds n={n}")));
            }
            header = Some((m, n, k));
        } else {
            rows.push((lineno, line));
        }
    }
    let Some((m, n, k)) = header else {
        return Err(Error::parse(1, "missing `p dv` header"));
    };
    if rows.len() != m {
        return Err(Error::parse(
            rows.last().map_or(1, |r| r.0),
            format!("expected {m} matrix rows, found {}", rows.len()),
        ));
    }
    let mut builder = MatrixBuilder::zeros(m, n);
    for (i, (lineno, line)) in rows.iter().enumerate() {
        if line.len() != n {
            return Err(Error::parse(
                *lineno,
                format!("row has {} characters, expected {n}", line.len()),
            ));
        }
        for (j, ch) in line.bytes().enumerate() {
            match ch {
                b'0' => {}
                b'1' => builder.set(i + 1, j + 1),
                other => {
                    return Err(Error::parse(
                        *lineno,
                        format!("unexpected character `{}` in matrix row", other as char),
                    ))
                }
            }
        }
    }
    Ok((builder.finish(), k))
}

/// Writes the instance text format; `parse_instance_text` reads it back
/// bit-exactly.
pub fn format_instance_text(a: &BinaryMatrix, k: usize) -> String {
    let mut out = String::new();
    out.push_str("c format v1\n");
    out.push_str(&format!("p dv {} {} {}\n", a.row_count(), a.col_count(), k));
    for i in 1..=a.row_count() {
        for j in 1..=a.col_count() {
            out.push(if a.entry(i, j) == 1 { '1' } else { '0' });
        }
        out.push('\n');
    }
    out
}

/// Parses the solution text format: a single line of ascending 1-based column
/// indices. A completely empty file means "no solution"; an empty line is the
/// empty column set.
pub fn parse_solution_text(text: &str) -> Result<Option<ColumnSet>> {
    let mut content: Option<(usize, &str)> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if is_comment(line) {
            continue;
        }
        if content.is_some() {
            if !line.trim().is_empty() {
                return Err(Error::parse(idx + 1, "trailing content after solution line"));
            }
            continue;
        }
        content = Some((idx + 1, line));
    }
    match content {
        None => Ok(None),
        Some((lineno, line)) => ColumnSet::parse(line)
            .map(Some)
            .map_err(|e| match e {
                Error::Parse { msg, .. } => Error::parse(lineno, msg),
                other => other,
            }),
    }
}

/// Writes the solution text format (`None` = empty file = no solution).
pub fn format_solution_text(sol: Option<&ColumnSet>) -> String {
    match sol {
        None => String::new(),
        Some(k) => format!("{k}\n"),
    }
}
