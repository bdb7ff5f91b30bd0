//! Continuous relaxation of a CNF formula over the hypercube `[-1, 1]^n`.
//!
//! Each clause becomes `K_m(s) = 2^{-k_m} ∏ (1 - c_{m,i} s_i)` over the
//! variables it mentions. `K_m` is 0 at vertices satisfying the clause and 1
//! at vertices violating it. `E = Σ K_m` counts violated clauses at vertices
//! and `V = M - E` counts satisfied ones.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::formula::{Clause, CnfFormula};

/// Coordinates within this distance of ±1 are snapped to ±1.
pub const CLAMP_TOLERANCE: f64 = 1e-12;

/// A point of the hypercube `[-1, 1]^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(mut coords: Vec<f64>) -> Result<Self> {
        for (index, x) in coords.iter_mut().enumerate() {
            if !x.is_finite() || x.abs() > 1.0 + CLAMP_TOLERANCE {
                return Err(Error::PointOutOfRange { index, value: *x });
            }
            if (x.abs() - 1.0).abs() <= CLAMP_TOLERANCE {
                *x = x.signum();
            }
        }
        Ok(Point { coords })
    }

    /// Projects arbitrary finite coordinates onto the hypercube.
    pub fn clamped(coords: Vec<f64>) -> Self {
        let coords = coords
            .into_iter()
            .map(|x| {
                let x = if x.is_nan() { 0.0 } else { x.clamp(-1.0, 1.0) };
                if (x.abs() - 1.0).abs() <= CLAMP_TOLERANCE {
                    x.signum()
                } else {
                    x
                }
            })
            .collect();
        Point { coords }
    }

    /// Vertex for a Boolean assignment: FALSE ↦ -1, TRUE ↦ +1.
    pub fn vertex(bits: &[bool]) -> Self {
        Point {
            coords: bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect(),
        }
    }

    /// Vertex for index `x` under the project-wide bit order.
    pub fn from_index(x: u64, n: usize) -> Self {
        Point {
            coords: (0..n)
                .map(|i| if x >> i & 1 == 1 { 1.0 } else { -1.0 })
                .collect(),
        }
    }

    pub fn origin(n: usize) -> Self {
        Point {
            coords: vec![0.0; n],
        }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn is_vertex(&self) -> bool {
        self.coords.iter().all(|x| x.abs() == 1.0)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.coords
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

/// Partial derivatives with respect to each coordinate.
#[derive(Debug, Clone, PartialEq)]
pub struct GradientVector(Vec<f64>);

impl GradientVector {
    pub fn zeros(n: usize) -> Self {
        GradientVector(vec![0.0; n])
    }

    pub fn from_vec(partials: Vec<f64>) -> Self {
        GradientVector(partials)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    /// `self += factor * other`
    pub fn add_scaled(&mut self, factor: f64, other: &GradientVector) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += factor * b;
        }
    }

    pub fn scale(&mut self, factor: f64) {
        for a in &mut self.0 {
            *a *= factor;
        }
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}

impl Index<usize> for GradientVector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for GradientVector {
    fn index_mut(&mut self, i: usize) -> &mut f64 {
        &mut self.0[i]
    }
}

fn check_dim(formula: &CnfFormula, s: &Point) -> Result<()> {
    if s.dim() != formula.num_vars() {
        return Err(Error::LengthMismatch {
            expected: formula.num_vars(),
            found: s.dim(),
        });
    }
    Ok(())
}

fn width_scale(clause: &Clause) -> f64 {
    (-(clause.width() as f64)).exp2()
}

pub(crate) fn clause_value_unchecked(clause: &Clause, s: &Point) -> f64 {
    let product: f64 = clause
        .literals()
        .iter()
        .map(|l| 1.0 - l.sign() * s[l.index()])
        .product();
    width_scale(clause) * product
}

/// Adds `factor * ∇K` for one clause into `grad`.
pub(crate) fn accumulate_clause_gradient(
    clause: &Clause,
    s: &Point,
    factor: f64,
    grad: &mut GradientVector,
) {
    let lits = clause.literals();
    let factors: Vec<f64> = lits.iter().map(|l| 1.0 - l.sign() * s[l.index()]).collect();
    // leave-one-out products via a suffix pass and a running prefix
    let mut suffix = vec![1.0; lits.len() + 1];
    for j in (0..lits.len()).rev() {
        suffix[j] = suffix[j + 1] * factors[j];
    }
    let scale = width_scale(clause);
    let mut prefix = 1.0;
    for (j, lit) in lits.iter().enumerate() {
        grad[lit.index()] += factor * -lit.sign() * scale * prefix * suffix[j + 1];
        prefix *= factors[j];
    }
}

/// `K_m(s)` for 0-based clause `m`.
pub fn clause_value(formula: &CnfFormula, m: usize, s: &Point) -> Result<f64> {
    check_dim(formula, s)?;
    Ok(clause_value_unchecked(formula.clause(m)?, s))
}

/// All clause values `K_1(s) .. K_M(s)`.
pub fn clause_values(formula: &CnfFormula, s: &Point) -> Result<Vec<f64>> {
    check_dim(formula, s)?;
    Ok(formula
        .clauses()
        .iter()
        .map(|c| clause_value_unchecked(c, s))
        .collect())
}

/// `E(s) = Σ_m K_m(s)`.
pub fn energy(formula: &CnfFormula, s: &Point) -> Result<f64> {
    Ok(clause_values(formula, s)?.iter().sum())
}

/// `V(s) = Σ_m (1 - K_m(s))`.
pub fn value(formula: &CnfFormula, s: &Point) -> Result<f64> {
    Ok(clause_values(formula, s)?.iter().map(|k| 1.0 - k).sum())
}

pub fn clause_gradient(formula: &CnfFormula, m: usize, s: &Point) -> Result<GradientVector> {
    check_dim(formula, s)?;
    let clause = formula.clause(m)?;
    let mut grad = GradientVector::zeros(formula.num_vars());
    accumulate_clause_gradient(clause, s, 1.0, &mut grad);
    Ok(grad)
}

/// `∇V = -Σ_m ∇K_m`.
pub fn value_gradient(formula: &CnfFormula, s: &Point) -> Result<GradientVector> {
    check_dim(formula, s)?;
    let mut grad = GradientVector::zeros(formula.num_vars());
    for clause in formula.clauses() {
        accumulate_clause_gradient(clause, s, -1.0, &mut grad);
    }
    Ok(grad)
}
