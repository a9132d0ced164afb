//! Property tests: the packed matrix operations against naive reference
//! implementations, the solver pair against each other, and the text formats
//! against themselves.

mod common;

use common::*;
use dv_core::bitmatrix::{
    format_instance_text, format_solution_text, parse_instance_text, parse_solution_text,
    BinaryMatrix, ColumnSet,
};
use dv_core::cnf::{solve_sat_brute_force, Assignment, CnfFormula};
use dv_core::solver::{
    lower_bound, solve_brute_force, solve_exact, solve_greedy, verify_solution, DvInstance,
    Outcome, SolverConfig,
};
use proptest::prelude::*;

fn rows_strategy(max_m: usize, max_n: usize) -> impl Strategy<Value = Vec<Vec<u8>>> {
    (1..=max_m, 1..=max_n).prop_flat_map(|(m, n)| {
        proptest::collection::vec(proptest::collection::vec(0u8..=1, n), m)
    })
}

fn rows_and_cols(
    max_m: usize,
    max_n: usize,
) -> impl Strategy<Value = (Vec<Vec<u8>>, Vec<usize>)> {
    rows_strategy(max_m, max_n).prop_flat_map(|rows| {
        let n = rows[0].len();
        let cols = proptest::collection::btree_set(1..=n, 1..=n)
            .prop_map(|s| s.into_iter().collect::<Vec<_>>());
        (Just(rows), cols)
    })
}

fn formula_strategy(max_vars: u32, max_clauses: usize) -> impl Strategy<Value = CnfFormula> {
    (1..=max_vars, 1..=max_clauses).prop_flat_map(|(r, s)| {
        proptest::collection::vec(
            proptest::collection::vec((1..=r, any::<bool>()), 3),
            s,
        )
        .prop_map(move |raw| {
            let clauses = raw
                .into_iter()
                .map(|lits| {
                    let signed: Vec<i32> = lits
                        .into_iter()
                        .map(|(v, sign)| if sign { v as i32 } else { -(v as i32) })
                        .collect();
                    [signed[0], signed[1], signed[2]]
                })
                .collect();
            CnfFormula::new(r, clauses).unwrap()
        })
    })
}

proptest! {
    /// Bit-packed and naive implementations agree on distinctness,
    /// restriction, and difference sets.
    #[test]
    fn packed_matches_naive((rows, cols) in rows_and_cols(32, 128)) {
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        prop_assert_eq!(a.rows_pairwise_distinct(), naive_distinct(&rows));

        let k = ColumnSet::new(cols.clone()).unwrap();
        let restricted = a.restrict(&k).unwrap();
        prop_assert_eq!(to_rows(&restricted), naive_restrict(&rows, &cols));

        let m = rows.len();
        for i in 1..=m {
            for j in (i + 1)..=m {
                let packed: Vec<usize> = a.difference_set(i, j).unwrap().iter().collect();
                prop_assert_eq!(&packed, &naive_diff_set(&rows, i, j));
            }
        }
    }

    /// A column set verifies exactly when it intersects every row pair's
    /// difference set.
    #[test]
    fn verification_is_hitting_every_difference_set((rows, cols) in rows_and_cols(16, 24)) {
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        let k = ColumnSet::new(cols.clone()).unwrap();
        let verified = verify_solution(&a, &k).unwrap();
        let mut hits_all = true;
        for i in 1..=rows.len() {
            for j in (i + 1)..=rows.len() {
                let diff = a.difference_set(i, j).unwrap();
                if !diff.iter().any(|c| k.contains(c)) {
                    hits_all = false;
                }
            }
        }
        prop_assert_eq!(verified, hits_all);
    }

    #[test]
    fn restricting_to_all_columns_is_identity(rows in rows_strategy(12, 40)) {
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        prop_assert_eq!(&a.restrict(&ColumnSet::full(a.col_count())).unwrap(), &a);
    }

    /// Supersets of verifying sets verify.
    #[test]
    fn verification_is_monotone((rows, cols) in rows_and_cols(10, 12)) {
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        let k = ColumnSet::new(cols).unwrap();
        if verify_solution(&a, &k).unwrap() {
            for extra in 1..=a.col_count() {
                let mut bigger: Vec<usize> = k.iter().collect();
                bigger.push(extra);
                let sup = ColumnSet::new(bigger).unwrap();
                prop_assert!(verify_solution(&a, &sup).unwrap());
            }
        }
    }

    #[test]
    fn instance_text_round_trips(rows in rows_strategy(12, 40), k_raw in 0usize..40) {
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        let k = k_raw % (a.col_count() + 1);
        let inst = DvInstance::new(a, k).unwrap();
        let text = inst.to_text();
        prop_assert_eq!(DvInstance::from_text(&text).unwrap(), inst);
        // The writer output parses to the same bytes when re-written.
        let (matrix, budget) = parse_instance_text(&text).unwrap();
        prop_assert_eq!(format_instance_text(&matrix, budget), text);
    }

    #[test]
    fn solution_text_round_trips(cols in proptest::collection::btree_set(1usize..200, 0..24)) {
        let set = ColumnSet::new(cols.into_iter().collect()).unwrap();
        let text = format_solution_text(Some(&set));
        prop_assert_eq!(parse_solution_text(&text).unwrap(), Some(set));
    }

    #[test]
    fn dimacs_round_trips(f in formula_strategy(6, 6)) {
        prop_assert_eq!(CnfFormula::parse_dimacs(&f.to_dimacs()).unwrap(), f);
    }

    /// The brute-force SAT oracle agrees with an independent clause-counting
    /// evaluator, both on its verdict and on the model it returns.
    #[test]
    fn sat_oracle_matches_counting_evaluator(f in formula_strategy(6, 6)) {
        match solve_sat_brute_force(&f).unwrap() {
            Some(model) => {
                prop_assert!(f.evaluate(&model).unwrap());
                prop_assert_eq!(count_satisfied_clauses(&f, &model), f.clauses().len());
            }
            None => {
                for index in 0..(1u64 << f.num_vars()) {
                    let a = Assignment::from_index(index, f.num_vars());
                    prop_assert!(count_satisfied_clauses(&f, &a) < f.clauses().len());
                }
            }
        }
        // The two evaluators agree everywhere, not just on models.
        for index in 0..(1u64 << f.num_vars()) {
            let a = Assignment::from_index(index, f.num_vars());
            prop_assert_eq!(
                f.evaluate(&a).unwrap(),
                count_satisfied_clauses(&f, &a) == f.clauses().len()
            );
        }
    }

    /// Exact and brute force agree on every budget, including instances with
    /// duplicate rows.
    #[test]
    fn exact_agrees_with_brute_force(rows in rows_strategy(8, 10)) {
        let cfg = SolverConfig::default();
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        for k in 0..=a.col_count() {
            let inst = DvInstance::new(a.clone(), k).unwrap();
            let bf = solve_brute_force(&inst, &cfg).unwrap();
            let ex = solve_exact(&inst, &cfg);
            if let Outcome::Solution(sol) = &ex.outcome {
                prop_assert!(verify_solution(&a, sol).unwrap());
                prop_assert!(k == 0 || sol.len() <= k);
            }
            prop_assert_eq!(bf.outcome, ex.outcome, "k={}", k);
        }
    }

    /// Greedy output verifies, respects the lower bound, and is never
    /// smaller than the exact minimum.
    #[test]
    fn greedy_is_sound(rows in rows_strategy(8, 10)) {
        let a = BinaryMatrix::from_rows(&rows).unwrap();
        prop_assume!(naive_distinct(&rows));
        let greedy = solve_greedy(&a).unwrap();
        prop_assert!(verify_solution(&a, &greedy).unwrap());
        let exact = solve_exact(
            &DvInstance::new(a.clone(), 0).unwrap(),
            &SolverConfig::default(),
        );
        match exact.outcome {
            Outcome::Solution(min) => {
                prop_assert!(greedy.len() >= min.len());
                prop_assert!(min.len() >= lower_bound(&a));
            }
            other => prop_assert!(false, "minimization failed: {:?}", other),
        }
    }
}
