//! CNF data model, DIMACS I/O, planted instance generation and exhaustive
//! evaluation.
//!
//! Variables are 1-based in DIMACS and JSON, 0-based everywhere inside the
//! library. Vertex indices follow one convention project-wide: bit `i` of the
//! index is variable `i + 1`, with a clear bit meaning FALSE.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::relaxation::Point;

/// Default bound on `n` for anything that enumerates all `2^n` vertices.
pub const DEFAULT_N_LIMIT: usize = 24;

/// Attempts made by [`generate_planted`] before giving up on a target count.
pub const PLANTED_MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Literal {
    index: usize,
    negated: bool,
}

impl Literal {
    /// Literal over the 0-based variable `index`.
    pub fn new(index: usize, negated: bool) -> Self {
        Literal { index, negated }
    }

    /// Builds a literal from a signed DIMACS integer (`-3` is `¬x3`).
    pub fn from_dimacs(lit: i64) -> Option<Self> {
        if lit == 0 {
            return None;
        }
        Some(Literal {
            index: (lit.unsigned_abs() - 1) as usize,
            negated: lit < 0,
        })
    }

    pub fn to_dimacs(self) -> i64 {
        let v = self.variable() as i64;
        if self.negated {
            -v
        } else {
            v
        }
    }

    /// 0-based variable index.
    pub fn index(self) -> usize {
        self.index
    }

    /// 1-based variable number.
    pub fn variable(self) -> usize {
        self.index + 1
    }

    pub fn is_negated(self) -> bool {
        self.negated
    }

    /// Coefficient of this literal's variable: +1 for `x`, -1 for `¬x`.
    pub fn sign(self) -> f64 {
        if self.negated {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_satisfied_by(self, value: bool) -> bool {
        value != self.negated
    }
}

/// A disjunction of literals over pairwise distinct variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Clause {
    literals: Vec<Literal>,
}

impl Clause {
    /// Validates distinctness. `position` is only used for error messages.
    fn validated(literals: Vec<Literal>, position: usize) -> Result<Self> {
        if literals.is_empty() {
            return Err(Error::EmptyClause { clause: position });
        }
        for (i, a) in literals.iter().enumerate() {
            for b in &literals[..i] {
                if a.index == b.index {
                    return Err(if a.negated == b.negated {
                        Error::DuplicateLiteral {
                            clause: position,
                            variable: a.variable(),
                        }
                    } else {
                        Error::TautologicalClause {
                            clause: position,
                            variable: a.variable(),
                        }
                    });
                }
            }
        }
        Ok(Clause { literals })
    }

    pub fn new(literals: Vec<Literal>) -> Result<Self> {
        Self::validated(literals, 1)
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn width(&self) -> usize {
        self.literals.len()
    }

    pub fn is_satisfied(&self, bits: &[bool]) -> bool {
        self.literals
            .iter()
            .any(|l| l.is_satisfied_by(bits[l.index]))
    }

    fn sorted(&self) -> Clause {
        let mut literals = self.literals.clone();
        literals.sort_by_key(|l| l.index);
        Clause { literals }
    }

    /// Masks `(positive, negative)` over vertex-index bits.
    fn masks(&self) -> (u64, u64) {
        self.literals.iter().fold((0, 0), |(pos, neg), l| {
            if l.negated {
                (pos, neg | 1 << l.index)
            } else {
                (pos | 1 << l.index, neg)
            }
        })
    }
}

/// A CNF formula `F = C_1 ∧ ... ∧ C_M` over `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CnfFormula {
    n: usize,
    clauses: Vec<Clause>,
    uniform_k: Option<usize>,
}

impl CnfFormula {
    pub fn new(n: usize, clauses: Vec<Clause>) -> Result<Self> {
        if n == 0 {
            return Err(Error::NoVariables);
        }
        if clauses.is_empty() {
            return Err(Error::NoClauses);
        }
        for clause in &clauses {
            for lit in &clause.literals {
                if lit.index >= n {
                    return Err(Error::VariableOutOfRange {
                        variable: lit.variable() as i64,
                        n,
                    });
                }
            }
        }
        let first = clauses[0].width();
        let uniform_k = clauses.iter().all(|c| c.width() == first).then_some(first);
        Ok(CnfFormula {
            n,
            clauses,
            uniform_k,
        })
    }

    /// Builds a formula from signed DIMACS-style clause lists.
    pub fn from_signed(n: usize, clauses: &[Vec<i64>]) -> Result<Self> {
        let mut built = Vec::with_capacity(clauses.len());
        for (m, raw) in clauses.iter().enumerate() {
            built.push(parse_clause(raw, n, m + 1)?);
        }
        Self::new(n, built)
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn clause(&self, m: usize) -> Result<&Clause> {
        self.clauses.get(m).ok_or(Error::IndexOutOfRange {
            index: m,
            bound: self.clauses.len(),
        })
    }

    pub fn uniform_k(&self) -> Option<usize> {
        self.uniform_k
    }

    pub fn widths(&self) -> Vec<usize> {
        self.clauses.iter().map(Clause::width).collect()
    }

    /// Same formula with literals sorted by variable inside every clause.
    pub fn canonical(&self) -> CnfFormula {
        CnfFormula {
            n: self.n,
            clauses: self.clauses.iter().map(Clause::sorted).collect(),
            uniform_k: self.uniform_k,
        }
    }

    /// `c_{m,i}` for 0-based clause `m` and variable `i`.
    pub fn clause_coefficient(&self, m: usize, i: usize) -> Result<i8> {
        let clause = self.clause(m)?;
        if i >= self.n {
            return Err(Error::IndexOutOfRange {
                index: i,
                bound: self.n,
            });
        }
        Ok(clause
            .literals
            .iter()
            .find(|l| l.index == i)
            .map_or(0, |l| if l.negated { -1 } else { 1 }))
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<bool> {
        if a.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                found: a.len(),
            });
        }
        Ok(self.clauses.iter().all(|c| c.is_satisfied(&a.bits)))
    }

    /// Evaluates the formula at vertex `index` (see module docs for the bit order).
    pub fn evaluate_index(&self, index: u64) -> bool {
        VertexChecker::new(self).satisfied(index)
    }

    /// Number of clauses violated by `a`.
    pub fn unsatisfied_count(&self, a: &Assignment) -> usize {
        self.clauses
            .iter()
            .filter(|c| !c.is_satisfied(&a.bits))
            .count()
    }

    /// Exhaustive model count over all `2^n` assignments.
    pub fn count_solutions(&self, enumerate: bool, n_limit: usize) -> Result<SolutionCount> {
        if self.n > n_limit || self.n >= 64 {
            return Err(Error::TooManyVariables {
                n: self.n,
                limit: n_limit.min(63),
            });
        }
        let checker = VertexChecker::new(self);
        let total = 1u64 << self.n;
        if enumerate {
            let indices: Vec<u64> = (0..total)
                .into_par_iter()
                .filter(|&x| checker.satisfied(x))
                .collect();
            Ok(SolutionCount {
                count: indices.len() as u64,
                solutions: Some(
                    indices
                        .iter()
                        .map(|&x| Assignment::from_index(x, self.n))
                        .collect(),
                ),
            })
        } else {
            let count = (0..total)
                .into_par_iter()
                .filter(|&x| checker.satisfied(x))
                .count() as u64;
            Ok(SolutionCount {
                count,
                solutions: None,
            })
        }
    }

    /// Indices of all satisfying vertices, ascending.
    pub fn solution_indices(&self, n_limit: usize) -> Result<Vec<u64>> {
        if self.n > n_limit || self.n >= 64 {
            return Err(Error::TooManyVariables {
                n: self.n,
                limit: n_limit.min(63),
            });
        }
        let checker = VertexChecker::new(self);
        Ok((0..1u64 << self.n)
            .into_par_iter()
            .filter(|&x| checker.satisfied(x))
            .collect())
    }

    pub fn to_dimacs(&self) -> String {
        let mut out = format!("p cnf {} {}\n", self.n, self.clauses.len());
        for clause in &self.clauses {
            for lit in &clause.sorted().literals {
                out.push_str(&lit.to_dimacs().to_string());
                out.push(' ');
            }
            out.push_str("0\n");
        }
        out
    }

    pub fn signed_clauses(&self) -> Vec<Vec<i64>> {
        self.clauses
            .iter()
            .map(|c| c.literals.iter().map(|l| l.to_dimacs()).collect())
            .collect()
    }
}

impl fmt::Display for CnfFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_dimacs())
    }
}

impl FromStr for CnfFormula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_dimacs(s)
    }
}

fn parse_clause(raw: &[i64], n: usize, position: usize) -> Result<Clause> {
    let mut literals = Vec::with_capacity(raw.len());
    for &lit in raw {
        if lit == 0 || lit.unsigned_abs() as usize > n {
            return Err(Error::VariableOutOfRange { variable: lit, n });
        }
        literals.push(Literal::from_dimacs(lit).expect("nonzero"));
    }
    Clause::validated(literals, position)
}

/// Bitmask evaluator for vertex indices (requires `n < 64`).
#[derive(Debug, Clone)]
pub(crate) struct VertexChecker {
    masks: Vec<(u64, u64)>,
}

impl VertexChecker {
    pub(crate) fn new(formula: &CnfFormula) -> Self {
        VertexChecker {
            masks: formula.clauses.iter().map(Clause::masks).collect(),
        }
    }

    pub(crate) fn satisfied(&self, x: u64) -> bool {
        self.masks
            .iter()
            .all(|&(pos, neg)| x & pos != 0 || !x & neg != 0)
    }

    /// Number of clauses satisfied at vertex `x`.
    pub(crate) fn satisfied_count(&self, x: u64) -> usize {
        self.masks
            .iter()
            .filter(|&&(pos, neg)| x & pos != 0 || !x & neg != 0)
            .count()
    }
}

/// Parses DIMACS CNF text.
///
/// Accepts `c` comment lines, a single `p cnf n m` header, and clauses that
/// may span lines, each terminated by `0`. A trailing `%` line (SATLIB style)
/// ends the input.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<i64> = Vec::new();

    for (lineno, line) in text.lines().enumerate() {
        let line_no = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('%') {
            break;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(Error::Malformed {
                    line: line_no,
                    reason: "duplicate header".into(),
                });
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(Error::Malformed {
                    line: line_no,
                    reason: format!("bad header `{trimmed}`"),
                });
            }
            let parse = |s: &str| {
                s.parse::<usize>().map_err(|_| Error::Malformed {
                    line: line_no,
                    reason: format!("bad header field `{s}`"),
                })
            };
            header = Some((parse(parts[2])?, parse(parts[3])?));
            continue;
        }
        let Some((n, _)) = header else {
            return Err(Error::MissingHeader);
        };
        for token in trimmed.split_whitespace() {
            let lit: i64 = token.parse().map_err(|_| Error::Malformed {
                line: line_no,
                reason: format!("bad literal `{token}`"),
            })?;
            if lit == 0 {
                clauses.push(parse_clause(&current, n, clauses.len() + 1)?);
                current.clear();
            } else {
                if lit.unsigned_abs() as usize > n {
                    return Err(Error::VariableOutOfRange { variable: lit, n });
                }
                current.push(lit);
            }
        }
    }

    let (n, m) = header.ok_or(Error::MissingHeader)?;
    if !current.is_empty() {
        // last clause without its terminating 0
        clauses.push(parse_clause(&current, n, clauses.len() + 1)?);
    }
    if clauses.len() != m {
        return Err(Error::ClauseCountMismatch {
            expected: m,
            found: clauses.len(),
        });
    }
    CnfFormula::new(n, clauses)
}

pub fn serialize_dimacs(formula: &CnfFormula) -> String {
    formula.to_dimacs()
}

/// A Boolean assignment to all `n` variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn new(bits: Vec<bool>) -> Self {
        Assignment { bits }
    }

    pub fn from_index(index: u64, n: usize) -> Self {
        Assignment {
            bits: (0..n).map(|i| index >> i & 1 == 1).collect(),
        }
    }

    pub fn to_index(&self) -> u64 {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | (b as u64) << i)
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn flip(&mut self, i: usize) {
        self.bits[i] = !self.bits[i];
    }

    /// `'1'`/`'0'` per variable, variable 1 first.
    pub fn to_bit_string(&self) -> String {
        self.bits
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn from_bit_string(s: &str) -> Option<Self> {
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(Assignment::new)
    }
}

impl Serialize for Assignment {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_bit_string())
    }
}

impl<'de> Deserialize<'de> for Assignment {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Assignment::from_bit_string(&s)
            .ok_or_else(|| serde::de::Error::custom(format!("invalid bit string `{s}`")))
    }
}

/// FALSE ↦ -1, TRUE ↦ +1.
pub fn assignment_to_point(a: &Assignment) -> Point {
    Point::vertex(&a.bits)
}

/// Sign rounding; exact zero rounds to FALSE.
pub fn point_to_assignment(s: &Point) -> Assignment {
    Assignment::new(s.coords().iter().map(|&x| x > 0.0).collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionCount {
    pub count: u64,
    pub solutions: Option<Vec<Assignment>>,
}

/// Random formula satisfied by a hidden planted assignment.
///
/// Each clause picks `k` distinct variables and uniform polarities and is
/// redrawn until the plant satisfies it. With `target_l`, whole instances are
/// redrawn until the exact model count matches.
pub fn generate_planted(
    n: usize,
    m: usize,
    k: usize,
    target_l: Option<u64>,
    seed: u64,
) -> Result<(CnfFormula, Assignment)> {
    if k == 0 || k > n {
        return Err(Error::InvalidWidth { k, n });
    }
    if m == 0 {
        return Err(Error::NoClauses);
    }
    if target_l.is_some() && n > DEFAULT_N_LIMIT {
        return Err(Error::TooManyVariables {
            n,
            limit: DEFAULT_N_LIMIT,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let attempts = if target_l.is_some() {
        PLANTED_MAX_ATTEMPTS
    } else {
        1
    };
    for _ in 0..attempts {
        let planted = Assignment::new((0..n).map(|_| rng.gen()).collect());
        let mut clauses = Vec::with_capacity(m);
        while clauses.len() < m {
            let mut vars = sample(&mut rng, n, k).into_vec();
            vars.sort_unstable();
            let literals: Vec<Literal> = vars
                .into_iter()
                .map(|i| Literal::new(i, rng.gen()))
                .collect();
            let clause = Clause { literals };
            if clause.is_satisfied(&planted.bits) {
                clauses.push(clause);
            }
        }
        let formula = CnfFormula::new(n, clauses)?;
        match target_l {
            None => return Ok((formula, planted)),
            Some(target) => {
                if formula.count_solutions(false, DEFAULT_N_LIMIT)?.count == target {
                    return Ok((formula, planted));
                }
            }
        }
    }
    Err(Error::TargetUnreachable {
        target: target_l.unwrap_or(0),
        attempts,
    })
}

/// JSON export of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceJson {
    pub n: usize,
    pub clauses: Vec<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub planted: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub solution_count: Option<u64>,
}

impl InstanceJson {
    pub fn new(formula: &CnfFormula, planted: Option<&Assignment>, seed: Option<u64>) -> Self {
        InstanceJson {
            n: formula.num_vars(),
            clauses: formula.canonical().signed_clauses(),
            planted: planted.map(Assignment::to_bit_string),
            seed,
            solution_count: None,
        }
    }

    pub fn formula(&self) -> Result<CnfFormula> {
        CnfFormula::from_signed(self.n, &self.clauses)
    }
}
