//! Fixtures shared by the criterion benches.

use amplisat::{generate_planted, CnfFormula};

/// Planted 3-SAT instance with its exact model count.
pub fn planted_instance(n: usize, clauses: usize, seed: u64) -> (CnfFormula, u64) {
    let (formula, _) = generate_planted(n, clauses, 3, None, seed).expect("valid parameters");
    let count = formula
        .count_solutions(false, amplisat::DEFAULT_N_LIMIT)
        .expect("n within limit")
        .count;
    (formula, count)
}
