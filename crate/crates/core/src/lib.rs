//! Continuous relaxation of Boolean k-SAT and amplitude-amplification-style
//! conditioning of its objective.
//!
//! * [`formula`]: CNF model, DIMACS I/O, planted instances, exact counting.
//! * [`relaxation`]: clause functions `K_m`, energy `E`, value `V` and their
//!   gradients on `[-1, 1]^n`.
//! * [`amplify`]: oracle functions, the expectation ledger and pointwise
//!   evaluation of the conditioned objective `f_ℓ`.
//! * [`landscape`]: exhaustive vertex sweeps, the explicit-vector reference
//!   and landscape statistics.
//! * [`solvers`]: simulated annealing, projected gradient ascent and an
//!   ensemble benchmark.

pub mod amplify;
pub mod error;
pub mod formula;
pub mod landscape;
pub mod relaxation;
pub mod solvers;

pub use amplify::{
    build_ledger, condition_gradient, condition_value, optimal_iterations, oracle_gradient,
    oracle_value, ConditionedObjective, ExpectationLedger, InitialObjective, OracleKind,
};
pub use error::{Error, Result};
pub use formula::{
    assignment_to_point, generate_planted, parse_dimacs, point_to_assignment, serialize_dimacs,
    Assignment, Clause, CnfFormula, InstanceJson, Literal, DEFAULT_N_LIMIT,
};
pub use landscape::{brute_force_amplify, stats, vertex_sweep, LandscapeStats, VertexSweep};
pub use relaxation::{
    clause_gradient, clause_value, energy, value, value_gradient, GradientVector, Point,
};
pub use solvers::{
    benchmark, gradient_ascent, simulated_annealing, AnnealConfig, BenchInstance, BenchOptions,
    BenchRow, CoolingSchedule, Direction, GradientConfig, ObjectiveHandle, SolveReport,
    SolverConfig, OPTIMAL_ELL,
};
