//! 3-CNF formulas: DIMACS parsing and printing, assignment evaluation, and a
//! brute-force satisfiability oracle.
//!
//! Every clause has exactly three literals. Repeated literals, repeated
//! clauses, and tautological clauses are all permitted — the instance builder
//! in [`crate::reduction`] relies on repetition when it pads formulas.

use std::fmt;

use crate::{Error, Result};

/// A signed 1-based variable index (`3` = x₃, `-3` = ¬x₃). Never zero.
pub type Literal = i32;

/// A CNF formula whose clauses all have exactly three literals.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CnfFormula {
    num_vars: u32,
    clauses: Vec<[Literal; 3]>,
}

impl CnfFormula {
    pub fn new(num_vars: u32, clauses: Vec<[Literal; 3]>) -> Result<Self> {
        if num_vars == 0 {
            return Err(Error::InvalidArgument("formula needs at least one variable".into()));
        }
        for (q, clause) in clauses.iter().enumerate() {
            for &lit in clause {
                if lit == 0 || lit.unsigned_abs() > num_vars {
                    return Err(Error::InvalidArgument(format!(
                        "clause {}: literal {} out of range ±[1..={}]",
                        q + 1,
                        lit,
                        num_vars
                    )));
                }
            }
        }
        Ok(CnfFormula { num_vars, clauses })
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn clauses(&self) -> &[[Literal; 3]] {
        &self.clauses
    }

    /// True iff every clause contains at least one literal made true by `a`.
    ///
    /// `a` must assign at least the formula's variables; extra values are
    /// ignored, which lets an assignment for a padded formula evaluate the
    /// original one.
    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        if (a.len() as u32) < self.num_vars {
            return Err(Error::InvalidArgument(format!(
                "partial assignment: {} values for {} variables",
                a.len(),
                self.num_vars
            )));
        }
        Ok(self
            .clauses
            .iter()
            .all(|clause| clause.iter().any(|&lit| a.satisfies(lit))))
    }

    /// Parses standard DIMACS CNF, rejecting clauses that do not have exactly
    /// three literals.
    pub fn parse_dimacs(text: &str) -> Result<Self> {
        let mut header: Option<(u32, usize)> = None;
        let mut clauses: Vec<[Literal; 3]> = Vec::new();
        let mut current: Vec<Literal> = Vec::new();
        let mut last_line = 1;
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.is_empty() || line.starts_with('c') {
                continue;
            }
            last_line = lineno;
            if line.starts_with('p') {
                if header.is_some() {
                    return Err(Error::parse(lineno, "duplicate `p cnf` header"));
                }
                let toks: Vec<&str> = line.split_whitespace().collect();
                if toks.len() != 4 || toks[0] != "p" || toks[1] != "cnf" {
                    return Err(Error::parse(lineno, "expected header `p cnf <vars> <clauses>`"));
                }
                let vars: u32 = toks[2]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad variable count"))?;
                let count: usize = toks[3]
                    .parse()
                    .map_err(|_| Error::parse(lineno, "bad clause count"))?;
                if vars == 0 {
                    return Err(Error::parse(lineno, "variable count must be positive"));
                }
                header = Some((vars, count));
                continue;
            }
            let Some((vars, _)) = header else {
                return Err(Error::parse(lineno, "clause before `p cnf` header"));
            };
            for tok in line.split_whitespace() {
                let lit: Literal = tok
                    .parse()
                    .map_err(|_| Error::parse(lineno, format!("bad literal `{tok}`")))?;
                if lit == 0 {
                    let len = current.len();
                    let clause: [Literal; 3] = current
                        .as_slice()
                        .try_into()
                        .map_err(|_| Error::parse(lineno, format!("clause has {len} literals, expected 3")))?;
                    clauses.push(clause);
                    current.clear();
                } else {
                    if lit.unsigned_abs() > vars {
                        return Err(Error::parse(
                            lineno,
                            format!("literal {lit} out of range ±[1..={vars}]"),
                        ));
                    }
                    current.push(lit);
                }
            }
        }
        let Some((vars, count)) = header else {
            return Err(Error::parse(last_line, "missing `p cnf` header"));
        };
        if !current.is_empty() {
            return Err(Error::parse(last_line, "unterminated clause (missing 0)"));
        }
        if clauses.len() != count {
            return Err(Error::parse(
                last_line,
                format!("header declares {count} clauses, found {}", clauses.len()),
            ));
        }
        CnfFormula::new(vars, clauses)
    }

    /// Canonical DIMACS: clauses in original order, single spaces, trailing
    /// ` 0`. `parse_dimacs` reads it back exactly.
    pub fn to_dimacs(&self) -> String {
        let mut out = String::new();
        out.push_str("c format v1\n");
        out.push_str(&format!("p cnf {} {}\n", self.num_vars, self.clauses.len()));
        for clause in &self.clauses {
            out.push_str(&format!("{} {} {} 0\n", clause[0], clause[1], clause[2]));
        }
        out
    }
}

/// A total truth assignment: `values[v - 1]` is the value of variable `v`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Assignment {
    values: Vec<bool>,
}

impl Assignment {
    pub fn new(values: Vec<bool>) -> Self {
        Assignment { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value of variable `var` (1-based). Panics when out of range.
    pub fn value(&self, var: u32) -> bool {
        self.values[(var - 1) as usize]
    }

    pub fn values(&self) -> &[bool] {
        &self.values
    }

    fn satisfies(&self, lit: Literal) -> bool {
        let v = self.values[(lit.unsigned_abs() - 1) as usize];
        if lit > 0 {
            v
        } else {
            !v
        }
    }

    /// Same assignment extended with `false` values up to `num_vars` total.
    pub fn extended(&self, num_vars: u32) -> Assignment {
        let mut values = self.values.clone();
        values.resize((num_vars as usize).max(values.len()), false);
        Assignment { values }
    }

    /// The `index`-th assignment over `num_vars` variables in lexicographic
    /// order: variable 1 is the most significant bit, `false < true`.
    pub fn from_index(index: u64, num_vars: u32) -> Assignment {
        let values = (0..num_vars)
            .map(|v| (index >> (num_vars - 1 - v)) & 1 == 1)
            .collect();
        Assignment { values }
    }

    /// One signed literal per variable, ascending: `1 -2 3 …`.
    pub fn to_literal_line(&self) -> String {
        let mut out = String::new();
        for (i, &v) in self.values.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            if !v {
                out.push('-');
            }
            out.push_str(&(i + 1).to_string());
        }
        out
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal_line())
    }
}

/// Variable cap for [`solve_sat_brute_force`].
pub const SAT_BRUTE_FORCE_VAR_CAP: u32 = 24;

/// Tries all `2^r` assignments in lexicographic order (variable 1 most
/// significant, `false < true`) and returns the first satisfying one.
pub fn solve_sat_brute_force(f: &CnfFormula) -> Result<Option<Assignment>> {
    solve_sat_brute_force_capped(f, SAT_BRUTE_FORCE_VAR_CAP)
}

pub fn solve_sat_brute_force_capped(f: &CnfFormula, var_cap: u32) -> Result<Option<Assignment>> {
    if f.num_vars() > var_cap {
        return Err(Error::ResourceLimit(format!(
            "brute-force SAT on {} variables exceeds the cap of {var_cap}",
            f.num_vars()
        )));
    }
    for index in 0..(1u64 << f.num_vars()) {
        let a = Assignment::from_index(index, f.num_vars());
        if f.evaluate(&a)? {
            return Ok(Some(a));
        }
    }
    Ok(None)
}
