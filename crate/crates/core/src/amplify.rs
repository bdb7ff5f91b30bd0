//! Amplitude-amplification-style conditioning of the relaxed objective.
//!
//! Starting from an initial objective `f_0`, each iteration multiplies by an
//! oracle function `T` (-1 on satisfying vertices, +1 on the rest) and
//! reflects about the vertex average:
//!
//! ```text
//! f_ℓ(s) = 2·E[W_{ℓ-1}] - W_{ℓ-1}(s),   W_ℓ = T·f_ℓ
//! ```
//!
//! The averages `E[W_ℓ]` depend only on `n`, `L`, `M`, the clause widths and
//! the choice of `f_0`, so they are precomputed once in an
//! [`ExpectationLedger`]. Conditioned values can then be queried at any single
//! point without touching the other `2^n - 1` vertices.

use std::f64::consts::FRAC_PI_4;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::CnfFormula;
use crate::relaxation::{
    accumulate_clause_gradient, clause_values, value, value_gradient, GradientVector, Point,
};

/// Continuous oracle functions. All take exactly -1 at satisfying vertices
/// and +1 at every other vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OracleKind {
    /// `T = -2(∏_m K̃_m - 1/2)`
    Product,
    /// `T₂ = -2(min_m K̃_m - 1/2)`
    Min,
    /// `T₃ = -2((V/M)·min_m K̃_m - 1/2)`
    WeightedMin,
}

impl OracleKind {
    pub const ALL: [OracleKind; 3] = [
        OracleKind::Product,
        OracleKind::Min,
        OracleKind::WeightedMin,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OracleKind::Product => "product",
            OracleKind::Min => "min",
            OracleKind::WeightedMin => "weighted-min",
        }
    }
}

impl fmt::Display for OracleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OracleKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "product" | "T" | "t1" => Ok(OracleKind::Product),
            "min" | "T2" | "t2" => Ok(OracleKind::Min),
            "weighted-min" | "weighted_min" | "T3" | "t3" => Ok(OracleKind::WeightedMin),
            other => Err(format!(
                "unknown oracle `{other}` (product, min, weighted-min)"
            )),
        }
    }
}

/// Initial objective `f_0`. Both are constant on the satisfying set, which the
/// closed-form averages require.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialObjective {
    /// `f_0 ≡ 1`
    Unit,
    /// `f_0 = V`, the relaxed count of satisfied clauses.
    ClauseCount,
}

impl InitialObjective {
    pub const ALL: [InitialObjective; 2] = [InitialObjective::Unit, InitialObjective::ClauseCount];

    pub fn name(self) -> &'static str {
        match self {
            InitialObjective::Unit => "unit",
            InitialObjective::ClauseCount => "clause-count",
        }
    }

    pub fn value(self, formula: &CnfFormula, s: &Point) -> Result<f64> {
        match self {
            InitialObjective::Unit => Ok(1.0),
            InitialObjective::ClauseCount => value(formula, s),
        }
    }

    pub fn gradient(self, formula: &CnfFormula, s: &Point) -> Result<GradientVector> {
        match self {
            InitialObjective::Unit => Ok(GradientVector::zeros(formula.num_vars())),
            InitialObjective::ClauseCount => value_gradient(formula, s),
        }
    }
}

impl fmt::Display for InitialObjective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for InitialObjective {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unit" | "1" => Ok(InitialObjective::Unit),
            "clause-count" | "clause_count" | "v" | "V" => Ok(InitialObjective::ClauseCount),
            other => Err(format!("unknown f0 `{other}` (unit, clause-count)")),
        }
    }
}

/// Oracle value together with the clause data needed for its gradient.
struct OracleEval {
    value: f64,
    /// `K_m(s)` for every clause.
    clause_values: Vec<f64>,
}

fn argmax_lowest(values: &[f64]) -> usize {
    // max K is min K̃; strict comparison keeps the first index on ties
    let mut best = 0;
    for (m, &k) in values.iter().enumerate().skip(1) {
        if k > values[best] {
            best = m;
        }
    }
    best
}

fn eval_oracle(formula: &CnfFormula, kind: OracleKind, s: &Point) -> Result<OracleEval> {
    let ks = clause_values(formula, s)?;
    let value = match kind {
        OracleKind::Product => {
            let prod: f64 = ks.iter().map(|k| 1.0 - k).product();
            -2.0 * (prod - 0.5)
        }
        OracleKind::Min => {
            let min = 1.0 - ks[argmax_lowest(&ks)];
            -2.0 * (min - 0.5)
        }
        OracleKind::WeightedMin => {
            let m = ks.len() as f64;
            let v: f64 = ks.iter().map(|k| 1.0 - k).sum();
            let min = 1.0 - ks[argmax_lowest(&ks)];
            -2.0 * (v / m * min - 0.5)
        }
    };
    Ok(OracleEval {
        value,
        clause_values: ks,
    })
}

fn oracle_gradient_from(
    formula: &CnfFormula,
    kind: OracleKind,
    s: &Point,
    ks: &[f64],
) -> GradientVector {
    let clauses = formula.clauses();
    let mut grad = GradientVector::zeros(formula.num_vars());
    match kind {
        OracleKind::Product => {
            // ∇T = 2 Σ_m ∇K_m ∏_{m'≠m} K̃_{m'}
            let mut suffix = vec![1.0; ks.len() + 1];
            for m in (0..ks.len()).rev() {
                suffix[m] = suffix[m + 1] * (1.0 - ks[m]);
            }
            let mut prefix = 1.0;
            for (m, clause) in clauses.iter().enumerate() {
                let others = prefix * suffix[m + 1];
                if others != 0.0 {
                    accumulate_clause_gradient(clause, s, 2.0 * others, &mut grad);
                }
                prefix *= 1.0 - ks[m];
            }
        }
        OracleKind::Min => {
            let m = argmax_lowest(ks);
            accumulate_clause_gradient(&clauses[m], s, 2.0, &mut grad);
        }
        OracleKind::WeightedMin => {
            // T₃ = -2(V·K̃_min/M - 1/2), ∇V = -Σ∇K_m, ∇K̃_min = -∇K_min
            let count = ks.len() as f64;
            let v: f64 = ks.iter().map(|k| 1.0 - k).sum();
            let m = argmax_lowest(ks);
            let min = 1.0 - ks[m];
            for clause in clauses {
                accumulate_clause_gradient(clause, s, 2.0 * min / count, &mut grad);
            }
            accumulate_clause_gradient(&clauses[m], s, 2.0 * v / count, &mut grad);
        }
    }
    grad
}

pub fn oracle_value(formula: &CnfFormula, kind: OracleKind, s: &Point) -> Result<f64> {
    Ok(eval_oracle(formula, kind, s)?.value)
}

/// Gradient of the oracle. The min variants return the gradient of the
/// argmin clause, breaking ties toward the lowest clause index.
pub fn oracle_gradient(
    formula: &CnfFormula,
    kind: OracleKind,
    s: &Point,
) -> Result<GradientVector> {
    let eval = eval_oracle(formula, kind, s)?;
    Ok(oracle_gradient_from(formula, kind, s, &eval.clause_values))
}

/// Precomputed vertex averages for the conditioning recursion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectationLedger {
    pub n: usize,
    #[serde(rename = "L")]
    pub solution_count: u64,
    #[serde(rename = "M")]
    pub clause_count: usize,
    pub widths: Vec<usize>,
    pub f0: InitialObjective,
    /// `E[T]`
    pub e_t: f64,
    /// `E[f_0]`
    pub e_f0: f64,
    /// `f_0` on the satisfying set.
    pub f0_star: f64,
    /// `E[W_0] ..= E[W_ℓmax]`
    pub e_w: Vec<f64>,
}

impl ExpectationLedger {
    pub fn ell_max(&self) -> usize {
        self.e_w.len() - 1
    }

    /// Vertex average of `f_ℓ`: `E[f_0]` for ℓ = 0, else `E[W_{ℓ-1}]`.
    pub fn mean_f(&self, ell: usize) -> f64 {
        if ell == 0 {
            self.e_f0
        } else {
            self.e_w[ell - 1]
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("ledger serializes")
    }
}

pub fn build_ledger(
    n: usize,
    solution_count: u64,
    widths: &[usize],
    f0: InitialObjective,
    ell_max: usize,
) -> Result<ExpectationLedger> {
    if solution_count == 0 {
        return Err(Error::NoSolutions);
    }
    let vertices = (n as f64).exp2();
    if n < 64 && solution_count > 1u64 << n {
        return Err(Error::SolutionCountTooLarge {
            l: solution_count,
            n,
        });
    }
    let m = widths.len();
    let fraction = solution_count as f64 / vertices;
    let e_t = 1.0 - 2.0 * fraction;
    let (e_f0, f0_star) = match f0 {
        InitialObjective::Unit => (1.0, 1.0),
        InitialObjective::ClauseCount => {
            let unsat: f64 = widths.iter().map(|&k| (-(k as f64)).exp2()).sum();
            (m as f64 - unsat, m as f64)
        }
    };
    let mut e_w = Vec::with_capacity(ell_max + 1);
    e_w.push(e_f0 - 2.0 * f0_star * fraction);
    if ell_max >= 1 {
        e_w.push(2.0 * e_w[0] * e_t - e_f0);
    }
    for ell in 2..=ell_max {
        let next = 2.0 * e_w[ell - 1] * e_t - e_w[ell - 2];
        e_w.push(next);
    }
    Ok(ExpectationLedger {
        n,
        solution_count,
        clause_count: m,
        widths: widths.to_vec(),
        f0,
        e_t,
        e_f0,
        f0_star,
        e_w,
    })
}

/// `⌊(π/4)·√(2^n / L)⌋`
pub fn optimal_iterations(n: usize, solution_count: u64) -> Result<usize> {
    if solution_count == 0 {
        return Err(Error::NoSolutions);
    }
    if n < 64 && solution_count > 1u64 << n {
        return Err(Error::SolutionCountTooLarge {
            l: solution_count,
            n,
        });
    }
    let ratio = (n as f64).exp2() / solution_count as f64;
    Ok((FRAC_PI_4 * ratio.sqrt()).floor() as usize)
}

/// `f_ℓ` for a formula, oracle and initial objective, evaluable pointwise.
#[derive(Debug, Clone)]
pub struct ConditionedObjective {
    formula: CnfFormula,
    oracle: OracleKind,
    f0: InitialObjective,
    ell: usize,
    ledger: ExpectationLedger,
}

impl ConditionedObjective {
    /// Builds the ledger from a known solution count.
    pub fn new(
        formula: CnfFormula,
        oracle: OracleKind,
        f0: InitialObjective,
        ell: usize,
        solution_count: u64,
    ) -> Result<Self> {
        let ledger = build_ledger(
            formula.num_vars(),
            solution_count,
            &formula.widths(),
            f0,
            ell,
        )?;
        Self::with_ledger(formula, oracle, ell, ledger)
    }

    pub fn with_ledger(
        formula: CnfFormula,
        oracle: OracleKind,
        ell: usize,
        ledger: ExpectationLedger,
    ) -> Result<Self> {
        if ledger.n != formula.num_vars() {
            return Err(Error::LedgerMismatch(format!(
                "n = {} vs {}",
                ledger.n,
                formula.num_vars()
            )));
        }
        if ledger.widths != formula.widths() {
            return Err(Error::LedgerMismatch("clause widths differ".into()));
        }
        if ledger.e_w.len() < ell {
            return Err(Error::LedgerTooShort {
                requested: ell,
                available: ledger.e_w.len(),
            });
        }
        Ok(ConditionedObjective {
            f0: ledger.f0,
            formula,
            oracle,
            ell,
            ledger,
        })
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn oracle(&self) -> OracleKind {
        self.oracle
    }

    pub fn f0(&self) -> InitialObjective {
        self.f0
    }

    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn ledger(&self) -> &ExpectationLedger {
        &self.ledger
    }

    /// Same objective with a different iteration count (ledger must cover it).
    pub fn with_ell(&self, ell: usize) -> Result<Self> {
        Self::with_ledger(self.formula.clone(), self.oracle, ell, self.ledger.clone())
    }

    /// `f_ℓ(s)`. The oracle is evaluated once and reused across iterations.
    pub fn value(&self, s: &Point) -> Result<f64> {
        let mut y = self.f0.value(&self.formula, s)?;
        if self.ell == 0 {
            return Ok(y);
        }
        let t = oracle_value(&self.formula, self.oracle, s)?;
        for &e_w in &self.ledger.e_w[..self.ell] {
            y = 2.0 * e_w - t * y;
        }
        Ok(y)
    }

    /// `(f_ℓ(s), ∇f_ℓ(s))` by forward accumulation.
    pub fn value_and_gradient(&self, s: &Point) -> Result<(f64, GradientVector)> {
        let mut y = self.f0.value(&self.formula, s)?;
        let mut g = self.f0.gradient(&self.formula, s)?;
        if self.ell == 0 {
            return Ok((y, g));
        }
        let t = eval_oracle(&self.formula, self.oracle, s)?;
        let grad_t = oracle_gradient_from(&self.formula, self.oracle, s, &t.clause_values);
        for &e_w in &self.ledger.e_w[..self.ell] {
            // ∇(2E - T·y) = -(T·∇y + y·∇T)
            g.scale(-t.value);
            g.add_scaled(-y, &grad_t);
            y = 2.0 * e_w - t.value * y;
        }
        Ok((y, g))
    }

    pub fn gradient(&self, s: &Point) -> Result<GradientVector> {
        Ok(self.value_and_gradient(s)?.1)
    }
}

pub fn condition_value(c: &ConditionedObjective, s: &Point) -> Result<f64> {
    c.value(s)
}

pub fn condition_gradient(c: &ConditionedObjective, s: &Point) -> Result<GradientVector> {
    c.gradient(s)
}
