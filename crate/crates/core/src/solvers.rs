//! Simulated annealing and projected gradient ascent over conditioned
//! objectives, plus an ensemble benchmark comparing iteration counts.
//!
//! Satisfaction is always certified by evaluating the formula on a vertex,
//! never by thresholding the objective.

use std::cell::Cell;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplify::{optimal_iterations, ConditionedObjective, InitialObjective, OracleKind};
use crate::error::{Error, Result};
use crate::formula::{point_to_assignment, Assignment, CnfFormula};
use crate::relaxation::{GradientVector, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Search for large `f_ℓ`; annealing energy is `-f_ℓ`.
    Maximize,
    /// Search for small `f_ℓ`; annealing energy is `f_ℓ`.
    Minimize,
}

/// A conditioned objective with call counting.
#[derive(Debug)]
pub struct ObjectiveHandle {
    objective: ConditionedObjective,
    direction: Direction,
    evaluations: Cell<u64>,
}

impl ObjectiveHandle {
    pub fn new(objective: ConditionedObjective, direction: Direction) -> Self {
        ObjectiveHandle {
            objective,
            direction,
            evaluations: Cell::new(0),
        }
    }

    pub fn maximize(objective: ConditionedObjective) -> Self {
        Self::new(objective, Direction::Maximize)
    }

    pub fn objective(&self) -> &ConditionedObjective {
        &self.objective
    }

    pub fn formula(&self) -> &CnfFormula {
        self.objective.formula()
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Objective and gradient calls made so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    pub fn reset_evaluations(&self) {
        self.evaluations.set(0);
    }

    fn sign(&self) -> f64 {
        match self.direction {
            Direction::Maximize => 1.0,
            Direction::Minimize => -1.0,
        }
    }

    /// `f_ℓ(s)`
    pub fn value(&self, s: &Point) -> Result<f64> {
        self.evaluations.set(self.evaluations.get() + 1);
        self.objective.value(s)
    }

    /// Annealing energy: lower is better.
    pub fn energy(&self, s: &Point) -> Result<f64> {
        Ok(-self.sign() * self.value(s)?)
    }

    /// `(f_ℓ(s), ∇f_ℓ(s))` as one call.
    pub fn value_and_gradient(&self, s: &Point) -> Result<(f64, GradientVector)> {
        self.evaluations.set(self.evaluations.get() + 1);
        self.objective.value_and_gradient(s)
    }

    /// True when `a` is better than `b` in the handle's direction.
    fn better(&self, a: f64, b: f64) -> bool {
        self.sign() * a > self.sign() * b
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum CoolingSchedule {
    /// `T_t = T_0·α^t`
    Geometric { alpha: f64 },
    /// `T_t = min(T_0, c / ln(t + 2))`
    Logarithmic { c: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnealConfig {
    pub initial_temperature: f64,
    pub schedule: CoolingSchedule,
    pub steps: usize,
    #[serde(default = "one")]
    pub restarts: usize,
    #[serde(default)]
    pub seed: u64,
}

fn one() -> usize {
    1
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            initial_temperature: 2.0,
            schedule: CoolingSchedule::Geometric { alpha: 0.995 },
            steps: 2000,
            restarts: 1,
            seed: 0,
        }
    }
}

impl AnnealConfig {
    /// Temperature 0 is allowed and makes the search greedy.
    pub fn validate(&self) -> Result<()> {
        if !(self.initial_temperature >= 0.0 && self.initial_temperature.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "initial_temperature must be finite and >= 0, got {}",
                self.initial_temperature
            )));
        }
        match self.schedule {
            CoolingSchedule::Geometric { alpha } if !(alpha > 0.0 && alpha < 1.0) => {
                return Err(Error::InvalidConfig(format!(
                    "alpha must lie in (0, 1), got {alpha}"
                )));
            }
            CoolingSchedule::Logarithmic { c } if !(c > 0.0 && c.is_finite()) => {
                return Err(Error::InvalidConfig(format!("c must be > 0, got {c}")));
            }
            _ => {}
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be >= 1".into()));
        }
        Ok(())
    }

    pub fn temperature(&self, step: usize) -> f64 {
        match self.schedule {
            CoolingSchedule::Geometric { alpha } => {
                self.initial_temperature * alpha.powf(step as f64)
            }
            CoolingSchedule::Logarithmic { c } => {
                self.initial_temperature.min(c / (step as f64 + 2.0).ln())
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GradientConfig {
    pub step_size: f64,
    pub iterations: usize,
    #[serde(default = "one")]
    pub restarts: usize,
    /// Round to the nearest vertex and test it every this many steps.
    #[serde(default = "one")]
    pub rounding_period: usize,
    #[serde(default)]
    pub seed: u64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        GradientConfig {
            step_size: 0.05,
            iterations: 500,
            restarts: 1,
            rounding_period: 10,
            seed: 0,
        }
    }
}

impl GradientConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step_size > 0.0 && self.step_size.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "step_size must be > 0, got {}",
                self.step_size
            )));
        }
        if self.iterations == 0 || self.restarts == 0 || self.rounding_period == 0 {
            return Err(Error::InvalidConfig(
                "iterations, restarts and rounding_period must be >= 1".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub step: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub best_assignment: Assignment,
    pub satisfied: bool,
    /// `f_ℓ` at `best_assignment`.
    pub best_value: f64,
    pub trace: Vec<TracePoint>,
    pub evaluations: u64,
    pub seed: u64,
    pub wall_time_ms: f64,
}

struct Best {
    assignment: Assignment,
    value: f64,
    satisfied: bool,
}

impl Best {
    fn offer(
        &mut self,
        h: &ObjectiveHandle,
        assignment: &Assignment,
        value: f64,
        satisfied: bool,
    ) -> bool {
        let improves = (satisfied && !self.satisfied)
            || (satisfied == self.satisfied && h.better(value, self.value));
        if improves {
            self.assignment = assignment.clone();
            self.value = value;
            self.satisfied = satisfied;
        }
        improves
    }
}

fn finish(
    h: &ObjectiveHandle,
    best: Best,
    trace: Vec<TracePoint>,
    seed: u64,
    start: Instant,
) -> Result<SolveReport> {
    // re-certify against the formula rather than trusting bookkeeping
    let satisfied = h.formula().evaluate(&best.assignment)?;
    debug_assert_eq!(satisfied, best.satisfied);
    Ok(SolveReport {
        best_assignment: best.assignment,
        satisfied,
        best_value: best.value,
        trace,
        evaluations: h.evaluations(),
        seed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Metropolis search over vertices with single-bit-flip proposals.
///
/// The trace holds `f_ℓ` at the current vertex after every accepted move.
pub fn simulated_annealing(h: &ObjectiveHandle, cfg: &AnnealConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    h.reset_evaluations();
    let formula = h.formula();
    let n = formula.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<Best> = None;
    let mut trace = Vec::new();

    'restarts: for restart in 0..cfg.restarts {
        let mut current = Assignment::new((0..n).map(|_| rng.gen()).collect());
        let mut energy = h.energy(&Point::vertex(current.bits()))?;
        let mut satisfied = formula.evaluate(&current)?;
        let offset = restart * (cfg.steps + 1);
        let best = best.get_or_insert_with(|| Best {
            assignment: current.clone(),
            value: -h.sign() * energy,
            satisfied,
        });
        best.offer(h, &current, -h.sign() * energy, satisfied);
        trace.push(TracePoint {
            step: offset,
            value: -h.sign() * energy,
        });
        if satisfied {
            break 'restarts;
        }
        for step in 0..cfg.steps {
            let temperature = cfg.temperature(step);
            let flip = rng.gen_range(0..n);
            current.flip(flip);
            let proposed = h.energy(&Point::vertex(current.bits()))?;
            let delta = proposed - energy;
            let accept = delta <= 0.0
                || (temperature > 0.0 && rng.gen::<f64>() < (-delta / temperature).exp());
            if !accept {
                current.flip(flip);
                continue;
            }
            energy = proposed;
            satisfied = formula.evaluate(&current)?;
            best.offer(h, &current, -h.sign() * energy, satisfied);
            trace.push(TracePoint {
                step: offset + step + 1,
                value: -h.sign() * energy,
            });
            if satisfied {
                break 'restarts;
            }
        }
    }
    let best = best.expect("at least one restart");
    finish(h, best, trace, cfg.seed, start)
}

/// Fixed-step projected ascent on `f_ℓ` (descent when minimizing).
pub fn gradient_ascent(h: &ObjectiveHandle, cfg: &GradientConfig) -> Result<SolveReport> {
    cfg.validate()?;
    let start = Instant::now();
    h.reset_evaluations();
    let formula = h.formula();
    let n = formula.num_vars();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut best: Option<Best> = None;
    let mut trace = Vec::new();

    'restarts: for restart in 0..cfg.restarts {
        let mut s: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..=1.0)).collect();
        for it in 1..=cfg.iterations {
            let (_, grad) = h.value_and_gradient(&Point::clamped(s.clone()))?;
            for (x, g) in s.iter_mut().zip(grad.as_slice()) {
                *x = (*x + cfg.step_size * h.sign() * g).clamp(-1.0, 1.0);
            }
            if it % cfg.rounding_period != 0 && it != cfg.iterations {
                continue;
            }
            let vertex = point_to_assignment(&Point::clamped(s.clone()));
            let value = h.value(&Point::vertex(vertex.bits()))?;
            let satisfied = formula.evaluate(&vertex)?;
            trace.push(TracePoint {
                step: restart * cfg.iterations + it,
                value,
            });
            let best = best.get_or_insert_with(|| Best {
                assignment: vertex.clone(),
                value,
                satisfied,
            });
            best.offer(h, &vertex, value, satisfied);
            if satisfied {
                break 'restarts;
            }
        }
    }
    let best = best.expect("at least one rounding per restart");
    finish(h, best, trace, cfg.seed, start)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "solver", rename_all = "lowercase")]
pub enum SolverConfig {
    Anneal(AnnealConfig),
    Gradient(GradientConfig),
}

impl SolverConfig {
    pub fn name(&self) -> &'static str {
        match self {
            SolverConfig::Anneal(_) => "anneal",
            SolverConfig::Gradient(_) => "gradient",
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SolverConfig::Anneal(c) => c.seed,
            SolverConfig::Gradient(c) => c.seed,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        match self {
            SolverConfig::Anneal(c) => SolverConfig::Anneal(AnnealConfig { seed, ..c.clone() }),
            SolverConfig::Gradient(c) => {
                SolverConfig::Gradient(GradientConfig { seed, ..c.clone() })
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            SolverConfig::Anneal(c) => c.validate(),
            SolverConfig::Gradient(c) => c.validate(),
        }
    }

    pub fn run(&self, h: &ObjectiveHandle) -> Result<SolveReport> {
        match self {
            SolverConfig::Anneal(c) => simulated_annealing(h, c),
            SolverConfig::Gradient(c) => gradient_ascent(h, c),
        }
    }
}

/// `ell_choices` entry that resolves to `optimal_iterations(n, L)`.
pub const OPTIMAL_ELL: i64 = -1;

#[derive(Debug, Clone)]
pub struct BenchInstance {
    pub id: usize,
    pub formula: CnfFormula,
    pub solution_count: u64,
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub oracle: OracleKind,
    pub f0: InitialObjective,
    pub base_seed: u64,
    /// Record wall-clock time; when false `wall_ms` is written as 0 so that
    /// output files are byte-reproducible.
    pub measure_time: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub instance_id: usize,
    pub n: usize,
    pub m: usize,
    pub k: Option<usize>,
    pub solution_count: u64,
    /// Requested choice (may be [`OPTIMAL_ELL`]).
    pub ell_choice: i64,
    pub ell: usize,
    pub oracle: OracleKind,
    pub f0: InitialObjective,
    pub solver: &'static str,
    pub seed: u64,
    pub satisfied: bool,
    pub evaluations: u64,
    pub best_value: f64,
    pub wall_ms: f64,
}

pub const BENCH_CSV_HEADER: &str =
    "instance_id,n,M,k,L,ell,oracle,f0,solver,seed,satisfied,evaluations,best_value,wall_ms";

impl BenchRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{:?},{:?}",
            self.instance_id,
            self.n,
            self.m,
            self.k.map(|k| k.to_string()).unwrap_or_default(),
            self.solution_count,
            self.ell,
            self.oracle,
            self.f0,
            self.solver,
            self.seed,
            self.satisfied,
            self.evaluations,
            self.best_value,
            self.wall_ms
        )
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed for one (instance, ℓ-choice) run.
pub fn run_seed(base_seed: u64, instance_id: usize, ell_choice: i64) -> u64 {
    splitmix64(splitmix64(base_seed ^ splitmix64(instance_id as u64)) ^ ell_choice as u64)
}

/// Generator seed for instance `instance_id` of an ensemble.
pub fn instance_seed(base_seed: u64, instance_id: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(!(instance_id as u64)))
}

fn resolve_ell(choice: i64, n: usize, solution_count: u64) -> Result<usize> {
    match choice {
        OPTIMAL_ELL => optimal_iterations(n, solution_count),
        c if c >= 0 => Ok(c as usize),
        c => Err(Error::InvalidConfig(format!("ell choice {c} is negative"))),
    }
}

fn bench_one(
    instance: &BenchInstance,
    solver: &SolverConfig,
    choice: i64,
    opts: &BenchOptions,
) -> Result<BenchRow> {
    let ell = resolve_ell(choice, instance.formula.num_vars(), instance.solution_count)?;
    let objective = ConditionedObjective::new(
        instance.formula.clone(),
        opts.oracle,
        opts.f0,
        ell,
        instance.solution_count,
    )?;
    let handle = ObjectiveHandle::maximize(objective);
    let seed = run_seed(opts.base_seed, instance.id, choice);
    let report = solver.with_seed(seed).run(&handle)?;
    Ok(BenchRow {
        instance_id: instance.id,
        n: instance.formula.num_vars(),
        m: instance.formula.num_clauses(),
        k: instance.formula.uniform_k(),
        solution_count: instance.solution_count,
        ell_choice: choice,
        ell,
        oracle: opts.oracle,
        f0: opts.f0,
        solver: solver.name(),
        seed,
        satisfied: report.satisfied,
        evaluations: report.evaluations,
        best_value: report.best_value,
        wall_ms: if opts.measure_time {
            report.wall_time_ms
        } else {
            0.0
        },
    })
}

/// Runs every (instance, ℓ choice) pair, handing rows to `sink` in a fixed
/// order, `chunk` instances at a time. Runs inside a chunk execute in
/// parallel on the current rayon pool.
pub fn benchmark_streaming(
    instances: &[BenchInstance],
    solver: &SolverConfig,
    ell_choices: &[i64],
    opts: &BenchOptions,
    chunk: usize,
    mut sink: impl FnMut(&[BenchRow]) -> Result<()>,
) -> Result<()> {
    solver.validate()?;
    for batch in instances.chunks(chunk.max(1)) {
        let jobs: Vec<(&BenchInstance, i64)> = batch
            .iter()
            .flat_map(|inst| ell_choices.iter().map(move |&c| (inst, c)))
            .collect();
        let rows = jobs
            .par_iter()
            .map(|&(inst, choice)| bench_one(inst, solver, choice, opts))
            .collect::<Result<Vec<_>>>()?;
        sink(&rows)?;
    }
    Ok(())
}

pub fn benchmark(
    instances: &[BenchInstance],
    solver: &SolverConfig,
    ell_choices: &[i64],
    opts: &BenchOptions,
) -> Result<Vec<BenchRow>> {
    let mut rows = Vec::with_capacity(instances.len() * ell_choices.len());
    benchmark_streaming(
        instances,
        solver,
        ell_choices,
        opts,
        instances.len(),
        |batch| {
            rows.extend_from_slice(batch);
            Ok(())
        },
    )?;
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub ell_choice: i64,
    pub runs: usize,
    pub success_rate: f64,
    /// Median evaluations, counting unsolved runs at their exhausted budget.
    pub median_evaluations: f64,
    pub mean_best_value: f64,
}

pub fn summarize(rows: &[BenchRow]) -> Vec<BenchSummary> {
    let mut choices: Vec<i64> = rows.iter().map(|r| r.ell_choice).collect();
    choices.sort_unstable();
    choices.dedup();
    choices
        .into_iter()
        .map(|choice| {
            let group: Vec<&BenchRow> = rows.iter().filter(|r| r.ell_choice == choice).collect();
            let runs = group.len();
            let solved = group.iter().filter(|r| r.satisfied).count();
            let mut evals: Vec<u64> = group.iter().map(|r| r.evaluations).collect();
            evals.sort_unstable();
            let median = if runs % 2 == 1 {
                evals[runs / 2] as f64
            } else {
                (evals[runs / 2 - 1] + evals[runs / 2]) as f64 / 2.0
            };
            BenchSummary {
                ell_choice: choice,
                runs,
                success_rate: solved as f64 / runs as f64,
                median_evaluations: median,
                mean_best_value: group.iter().map(|r| r.best_value).sum::<f64>() / runs as f64,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::{generate_planted, parse_dimacs};

    fn handle(formula: CnfFormula, ell: usize) -> ObjectiveHandle {
        let l = formula.count_solutions(false, 24).unwrap().count;
        ObjectiveHandle::maximize(
            ConditionedObjective::new(
                formula,
                OracleKind::Product,
                InitialObjective::ClauseCount,
                ell,
                l,
            )
            .unwrap(),
        )
    }

    #[test]
    fn anneal_solves_unit_clause() {
        let h = handle(parse_dimacs("p cnf 1 1\n1 0").unwrap(), 0);
        for seed in 0..20 {
            let cfg = AnnealConfig {
                steps: 2,
                seed,
                ..AnnealConfig::default()
            };
            let r = simulated_annealing(&h, &cfg).unwrap();
            assert!(r.satisfied);
            assert_eq!(r.best_assignment.bits(), &[true]);
            assert!(r.evaluations > 0);
        }
    }

    #[test]
    fn anneal_is_deterministic() {
        let (f, _) = generate_planted(12, 50, 3, None, 5).unwrap();
        let h = handle(f, 2);
        let cfg = AnnealConfig {
            steps: 500,
            restarts: 2,
            seed: 99,
            ..AnnealConfig::default()
        };
        let a = simulated_annealing(&h, &cfg).unwrap();
        let b = simulated_annealing(&h, &cfg).unwrap();
        assert_eq!(a.trace, b.trace);
        assert_eq!(a.best_assignment, b.best_assignment);
        assert_eq!(a.evaluations, b.evaluations);
    }

    #[test]
    fn evaluation_counts_are_exact() {
        // unsatisfiable, so the full budget is always spent
        let f = parse_dimacs("p cnf 3 2\n1 0\n-1 0").unwrap();
        let ledger =
            crate::amplify::build_ledger(3, 1, &f.widths(), InitialObjective::ClauseCount, 0)
                .unwrap();
        let c = ConditionedObjective::with_ledger(f, OracleKind::Product, 0, ledger).unwrap();
        let h = ObjectiveHandle::maximize(c);
        let cfg = AnnealConfig {
            steps: 40,
            restarts: 3,
            ..AnnealConfig::default()
        };
        let r = simulated_annealing(&h, &cfg).unwrap();
        assert!(!r.satisfied);
        assert_eq!(r.evaluations, 3 * 41);
        let g = GradientConfig {
            iterations: 25,
            rounding_period: 10,
            restarts: 2,
            ..GradientConfig::default()
        };
        let r = gradient_ascent(&h, &g).unwrap();
        // 25 gradient calls plus roundings at 10, 20 and the final step
        assert_eq!(r.evaluations, 2 * (25 + 3));
        assert_eq!(r.trace.len(), 6);
    }

    #[test]
    fn zero_temperature_never_worsens() {
        let (f, _) = generate_planted(10, 45, 3, None, 8).unwrap();
        let h = handle(f, 0);
        let cfg = AnnealConfig {
            initial_temperature: 0.0,
            steps: 400,
            seed: 4,
            ..AnnealConfig::default()
        };
        let r = simulated_annealing(&h, &cfg).unwrap();
        assert!(r.trace.len() > 1);
        for w in r.trace.windows(2) {
            assert!(w[1].value >= w[0].value);
        }
        assert_eq!(r.best_value, r.trace.last().unwrap().value);
    }

    #[test]
    fn config_validation() {
        let h = handle(parse_dimacs("p cnf 1 1\n1 0").unwrap(), 0);
        let bad = AnnealConfig {
            schedule: CoolingSchedule::Geometric { alpha: 1.5 },
            ..AnnealConfig::default()
        };
        assert!(matches!(
            simulated_annealing(&h, &bad),
            Err(Error::InvalidConfig(_))
        ));
        let bad = GradientConfig {
            step_size: 0.0,
            ..GradientConfig::default()
        };
        assert!(matches!(
            gradient_ascent(&h, &bad),
            Err(Error::InvalidConfig(_))
        ));
        let parsed: std::result::Result<AnnealConfig, _> = serde_json::from_str(
            r#"{"initial_temperature": 1, "schedule": {"kind": "geometric", "alpha": 0.9}, "steps": 10, "bogus": 1}"#,
        );
        assert!(parsed.is_err());
        let parsed: AnnealConfig = serde_json::from_str(
            r#"{"initial_temperature": 1, "schedule": {"kind": "logarithmic", "c": 3}, "steps": 10}"#,
        )
        .unwrap();
        assert_eq!(parsed.restarts, 1);
        assert_eq!(parsed.temperature(0), 1.0);
        assert!((parsed.temperature(100) - 3.0 / 102f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn ascent_drives_unit_clause_to_true() {
        let h = handle(parse_dimacs("p cnf 1 1\n1 0").unwrap(), 0);
        for seed in 0..10 {
            let cfg = GradientConfig {
                step_size: 0.1,
                iterations: 50,
                rounding_period: 50,
                seed,
                ..GradientConfig::default()
            };
            let r = gradient_ascent(&h, &cfg).unwrap();
            assert!(r.satisfied);
            assert_eq!(r.trace.len(), 1);
        }
    }

    #[test]
    fn ascent_iterates_stay_in_cube() {
        // large steps on an amplified objective push hard against the walls
        let (f, _) = generate_planted(8, 34, 3, None, 2).unwrap();
        let h = handle(f, 4);
        let formula = h.formula().clone();
        let cfg = GradientConfig {
            step_size: 5.0,
            iterations: 30,
            rounding_period: 1,
            seed: 1,
            ..GradientConfig::default()
        };
        let r = gradient_ascent(&h, &cfg).unwrap();
        assert!(!r.trace.is_empty());
        assert_eq!(r.satisfied, formula.evaluate(&r.best_assignment).unwrap());
    }

    #[test]
    fn benchmark_rows_and_sentinel() {
        let instances: Vec<BenchInstance> = (0..4)
            .map(|id| {
                let (formula, _) = generate_planted(6, 20, 3, None, id as u64).unwrap();
                let solution_count = formula.count_solutions(false, 24).unwrap().count;
                BenchInstance {
                    id,
                    formula,
                    solution_count,
                }
            })
            .collect();
        let opts = BenchOptions {
            oracle: OracleKind::Product,
            f0: InitialObjective::ClauseCount,
            base_seed: 3,
            measure_time: false,
        };
        let solver = SolverConfig::Anneal(AnnealConfig {
            steps: 100,
            ..AnnealConfig::default()
        });
        let rows = benchmark(&instances, &solver, &[0, OPTIMAL_ELL], &opts).unwrap();
        assert_eq!(rows.len(), 8);
        for (row, inst) in rows.chunks(2).zip(&instances) {
            assert_eq!(row[0].ell, 0);
            assert_eq!(
                row[1].ell,
                optimal_iterations(6, inst.solution_count).unwrap()
            );
            assert_ne!(row[0].seed, row[1].seed);
        }
        let again = benchmark(&instances, &solver, &[0, OPTIMAL_ELL], &opts).unwrap();
        assert_eq!(rows, again);

        let mut streamed = Vec::new();
        benchmark_streaming(&instances, &solver, &[0, OPTIMAL_ELL], &opts, 3, |b| {
            streamed.extend_from_slice(b);
            Ok(())
        })
        .unwrap();
        assert_eq!(rows, streamed);

        let summary = summarize(&rows);
        assert_eq!(summary.len(), 2);
        assert_eq!(summary[0].ell_choice, OPTIMAL_ELL);
        assert_eq!(summary[1].runs, 4);

        let line = rows[0].to_csv_line();
        assert_eq!(line.split(',').count(), BENCH_CSV_HEADER.split(',').count());
    }
}
