//! Exhaustive analysis over the `2^n` vertices.
//!
//! [`brute_force_amplify`] materializes the full cost vector and applies
//! sign flips and reflections to it directly. It never reads an
//! [`ExpectationLedger`](crate::amplify::ExpectationLedger), which makes it
//! the reference that the pointwise path in [`vertex_sweep`] is checked
//! against.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::amplify::{ConditionedObjective, InitialObjective};
use crate::error::{Error, Result};
use crate::formula::{CnfFormula, VertexChecker};
use crate::relaxation::Point;

/// Largest `n` for which full sweeps are materialized.
pub const SWEEP_N_LIMIT: usize = 20;

/// Values of a function at every vertex, in index order.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexSweep {
    pub n: usize,
    pub ell: usize,
    pub values: Vec<f64>,
    /// Ascending indices of satisfying vertices.
    pub solution_indices: Vec<u64>,
}

impl VertexSweep {
    pub fn is_solution(&self, index: u64) -> bool {
        self.solution_indices.binary_search(&index).is_ok()
    }

    pub fn mean(&self) -> f64 {
        pairwise_sum(&self.values) / self.values.len() as f64
    }

    /// `index,bits,value,is_solution`, one row per vertex. `bits` is the
    /// index written in binary with variable `n` leftmost.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 32);
        out.push_str("index,bits,value,is_solution\n");
        for (index, value) in self.values.iter().enumerate() {
            let index = index as u64;
            writeln!(
                out,
                "{index},{:0width$b},{value:?},{}",
                index,
                self.is_solution(index),
                width = self.n
            )
            .expect("writing to a String");
        }
        out
    }
}

/// Summary statistics of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LandscapeStats {
    pub ell: usize,
    /// Smallest value on the solution set minus the largest value off it.
    pub gap: f64,
    /// Smallest value on the solution set divided by the largest magnitude
    /// off it.
    pub ratio: f64,
    /// Deepest non-global local minimum of the energy `-value`.
    pub max_local_min_depth: f64,
    /// Local minima of `-value` under single bit flips, global ones included.
    pub n_local_minima: usize,
}

/// Sum with a fixed binary reduction tree, so the result does not depend on
/// how the work is split.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    let (left, right) = values.split_at(mid);
    if values.len() >= 1 << 14 {
        let (a, b) = rayon::join(|| pairwise_sum(left), || pairwise_sum(right));
        a + b
    } else {
        pairwise_sum(left) + pairwise_sum(right)
    }
}

fn check_n(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        return Err(Error::TooManyVariables { n, limit });
    }
    Ok(())
}

/// Explicit-vector reference: flip solution entries, reflect about the mean,
/// `ell` times.
pub fn brute_force_amplify(
    formula: &CnfFormula,
    f0: InitialObjective,
    ell: usize,
) -> Result<VertexSweep> {
    let n = formula.num_vars();
    check_n(n, SWEEP_N_LIMIT)?;
    let solution_indices = formula.solution_indices(SWEEP_N_LIMIT)?;
    if solution_indices.is_empty() {
        return Err(Error::NoSolutions);
    }
    let checker = VertexChecker::new(formula);
    let mut values: Vec<f64> = (0..1u64 << n)
        .into_par_iter()
        .map(|x| match f0 {
            InitialObjective::Unit => 1.0,
            InitialObjective::ClauseCount => checker.satisfied_count(x) as f64,
        })
        .collect();
    for _ in 0..ell {
        for &i in &solution_indices {
            values[i as usize] = -values[i as usize];
        }
        let mean = pairwise_sum(&values) / values.len() as f64;
        values.par_iter_mut().for_each(|v| *v = 2.0 * mean - *v);
        debug_assert!({
            let after = pairwise_sum(&values) / values.len() as f64;
            (after - mean).abs() <= 1e-9 * mean.abs().max(1.0)
        });
    }
    Ok(VertexSweep {
        n,
        ell,
        values,
        solution_indices,
    })
}

/// Pointwise conditioned values at every vertex.
pub fn vertex_sweep(c: &ConditionedObjective) -> Result<VertexSweep> {
    let formula = c.formula();
    let n = formula.num_vars();
    check_n(n, SWEEP_N_LIMIT)?;
    let values = (0..1u64 << n)
        .into_par_iter()
        .map(|x| c.value(&Point::from_index(x, n)))
        .collect::<Result<Vec<f64>>>()?;
    Ok(VertexSweep {
        n,
        ell: c.ell(),
        values,
        solution_indices: formula.solution_indices(SWEEP_N_LIMIT)?,
    })
}

struct UnionFind {
    parent: Vec<usize>,
    min_energy: Vec<f64>,
    /// Unresolved local minima, all at the component's minimum energy.
    pending: Vec<Vec<usize>>,
}

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Escape depth of every non-global local minimum of `energies` on the
/// `n`-cube (vertices adjacent iff they differ in one bit).
///
/// A vertex is a local minimum when no neighbour is strictly lower. Its depth
/// is the smallest rise above its own energy needed to reach a vertex of
/// strictly lower energy. Vertices are added in ascending energy order and
/// merged by union-find; when two components meet at level `h`, minima of the
/// component with the higher floor escape with depth `h - e`.
pub fn local_minimum_depths(energies: &[f64], n: usize) -> Vec<(usize, f64)> {
    let size = energies.len();
    assert_eq!(size, 1usize << n, "energy vector must have 2^n entries");
    let is_local_min = |v: usize| (0..n).all(|b| energies[v ^ (1 << b)] >= energies[v]);

    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]).then(a.cmp(&b)));

    let mut uf = UnionFind {
        parent: (0..size).collect(),
        min_energy: energies.to_vec(),
        pending: vec![Vec::new(); size],
    };
    let mut added = vec![false; size];
    let mut depths = Vec::new();

    for &u in &order {
        added[u] = true;
        if is_local_min(u) {
            uf.pending[u].push(u);
        }
        let level = energies[u];
        for b in 0..n {
            let w = u ^ (1 << b);
            if !added[w] {
                continue;
            }
            let (ru, rw) = (uf.find(u), uf.find(w));
            if ru == rw {
                continue;
            }
            let (low, high) = if uf.min_energy[ru] <= uf.min_energy[rw] {
                (ru, rw)
            } else {
                (rw, ru)
            };
            let mut moved = std::mem::take(&mut uf.pending[high]);
            if uf.min_energy[high] > uf.min_energy[low] {
                depths.extend(moved.drain(..).map(|v| (v, level - energies[v])));
            }
            uf.pending[low].append(&mut moved);
            uf.parent[high] = low;
        }
    }
    depths.sort_by_key(|&(v, _)| v);
    depths
}

pub fn count_local_minima(energies: &[f64], n: usize) -> usize {
    (0..energies.len())
        .filter(|&v| (0..n).all(|b| energies[v ^ (1 << b)] >= energies[v]))
        .count()
}

pub fn stats(sweep: &VertexSweep) -> Result<LandscapeStats> {
    if sweep.solution_indices.is_empty() {
        return Err(Error::EmptySolutionSet);
    }
    let mut best_solution = f64::INFINITY;
    let mut best_other = f64::NEG_INFINITY;
    let mut largest_other = 0.0f64;
    for (i, &v) in sweep.values.iter().enumerate() {
        if sweep.is_solution(i as u64) {
            best_solution = best_solution.min(v);
        } else {
            best_other = best_other.max(v);
            largest_other = largest_other.max(v.abs());
        }
    }
    let energies: Vec<f64> = sweep.values.iter().map(|v| -v).collect();
    let max_depth = local_minimum_depths(&energies, sweep.n)
        .into_iter()
        .map(|(_, d)| d)
        .fold(0.0, f64::max);
    Ok(LandscapeStats {
        ell: sweep.ell,
        gap: best_solution - best_other,
        ratio: best_solution / largest_other,
        max_local_min_depth: max_depth,
        n_local_minima: count_local_minima(&energies, sweep.n),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amplify::OracleKind;
    use crate::formula::{generate_planted, parse_dimacs};
    use proptest::prelude::*;

    /// Depths via all-pairs minimax paths (Floyd–Warshall on vertex weights).
    fn depths_by_barrier_search(energies: &[f64], n: usize) -> Vec<(usize, f64)> {
        let size = energies.len();
        let mut bottleneck = vec![vec![f64::INFINITY; size]; size];
        for v in 0..size {
            bottleneck[v][v] = energies[v];
            for b in 0..n {
                let w = v ^ (1 << b);
                bottleneck[v][w] = energies[v].max(energies[w]);
            }
        }
        for k in 0..size {
            for i in 0..size {
                for j in 0..size {
                    let via = bottleneck[i][k].max(bottleneck[k][j]);
                    if via < bottleneck[i][j] {
                        bottleneck[i][j] = via;
                    }
                }
            }
        }
        let mut out = Vec::new();
        for v in 0..size {
            if !(0..n).all(|b| energies[v ^ (1 << b)] >= energies[v]) {
                continue;
            }
            let escape = (0..size)
                .filter(|&w| energies[w] < energies[v])
                .map(|w| bottleneck[v][w])
                .fold(f64::INFINITY, f64::min);
            if escape.is_finite() {
                out.push((v, escape - energies[v]));
            }
        }
        out
    }

    #[test]
    fn four_vertex_hand_example() {
        // n = 2, only vertex 0 (both FALSE) satisfies
        let f = parse_dimacs("p cnf 2 2\n-1 0\n-2 0").unwrap();
        let s0 = brute_force_amplify(&f, InitialObjective::Unit, 0).unwrap();
        assert_eq!(s0.values, vec![1.0; 4]);
        let s1 = brute_force_amplify(&f, InitialObjective::Unit, 1).unwrap();
        assert_eq!(s1.values, vec![2.0, 0.0, 0.0, 0.0]);
        assert_eq!(s1.solution_indices, vec![0]);
        let st = stats(&s1).unwrap();
        assert_eq!(st.gap, 2.0);
        assert_eq!(st.ratio, f64::INFINITY);
        assert_eq!(st.max_local_min_depth, 0.0);
    }

    #[test]
    fn constant_sweep_has_no_depth() {
        let sweep = VertexSweep {
            n: 3,
            ell: 0,
            values: vec![1.0; 8],
            solution_indices: vec![2],
        };
        let st = stats(&sweep).unwrap();
        assert_eq!(st.gap, 0.0);
        assert_eq!(st.max_local_min_depth, 0.0);
        assert_eq!(st.n_local_minima, 8);
        let empty = VertexSweep {
            solution_indices: vec![],
            ..sweep
        };
        assert_eq!(stats(&empty), Err(Error::EmptySolutionSet));
    }

    #[test]
    fn grover_value_for_figure_parameters() {
        let (f, plant) = generate_planted(4, 25, 3, Some(1), 7).unwrap();
        let sweep = brute_force_amplify(&f, InitialObjective::Unit, 3).unwrap();
        let expected = 4.0 * (7.0 * 0.25f64.asin()).sin();
        assert!((sweep.values[plant.to_index() as usize] - expected).abs() < 1e-12);
    }

    #[test]
    fn zero_iteration_sweep_is_clause_count() {
        let (f, _) = generate_planted(5, 20, 3, None, 3).unwrap();
        let l = f.count_solutions(false, 24).unwrap().count;
        let c = ConditionedObjective::new(
            f.clone(),
            OracleKind::Product,
            InitialObjective::ClauseCount,
            0,
            l,
        )
        .unwrap();
        let sweep = vertex_sweep(&c).unwrap();
        for (x, v) in sweep.values.iter().enumerate() {
            let a = crate::formula::Assignment::from_index(x as u64, 5);
            assert_eq!(*v, (20 - f.unsatisfied_count(&a)) as f64);
        }
    }

    #[test]
    fn pointwise_sweep_matches_reference() {
        for seed in 0..6 {
            let (f, _) = generate_planted(7, 28, 3, None, seed).unwrap();
            let l = f.count_solutions(false, 24).unwrap().count;
            for f0 in InitialObjective::ALL {
                for ell in 0..6 {
                    let reference = brute_force_amplify(&f, f0, ell).unwrap();
                    for oracle in OracleKind::ALL {
                        let c = ConditionedObjective::new(f.clone(), oracle, f0, ell, l).unwrap();
                        let sweep = vertex_sweep(&c).unwrap();
                        for (a, b) in sweep.values.iter().zip(&reference.values) {
                            assert!((a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn ratio_uses_magnitudes_off_the_solution_set() {
        let sweep = VertexSweep {
            n: 2,
            ell: 3,
            values: vec![8.0, -4.0, 1.0, 2.0],
            solution_indices: vec![0],
        };
        let st = stats(&sweep).unwrap();
        assert_eq!(st.gap, 6.0);
        assert_eq!(st.ratio, 2.0);
    }

    #[test]
    fn csv_layout() {
        let sweep = VertexSweep {
            n: 2,
            ell: 1,
            values: vec![2.0, 0.0, 0.1, -0.5],
            solution_indices: vec![0],
        };
        assert_eq!(
            sweep.to_csv(),
            "index,bits,value,is_solution\n0,00,2.0,true\n1,01,0.0,false\n2,10,0.1,false\n3,11,-0.5,false\n"
        );
    }

    #[test]
    fn limits() {
        let f = CnfFormula::from_signed(21, &[vec![1]]).unwrap();
        assert!(matches!(
            brute_force_amplify(&f, InitialObjective::Unit, 1),
            Err(Error::TooManyVariables { .. })
        ));
        let unsat = parse_dimacs("p cnf 1 2\n1 0\n-1 0").unwrap();
        assert_eq!(
            brute_force_amplify(&unsat, InitialObjective::Unit, 1),
            Err(Error::NoSolutions)
        );
    }

    #[test]
    fn pairwise_sum_matches_naive() {
        let values: Vec<f64> = (0..100_000).map(|i| (i % 17) as f64 * 0.5).collect();
        assert_eq!(pairwise_sum(&values), values.iter().sum::<f64>());
    }

    #[test]
    fn depth_of_simple_double_well() {
        // n = 2 ring 0-1-3-2-0 with energies: 0 at v0, 2 at v1, 1 at v3, 3 at v2
        let energies = [0.0, 2.0, 3.0, 1.0];
        assert_eq!(local_minimum_depths(&energies, 2), vec![(3, 1.0)]);
        assert_eq!(depths_by_barrier_search(&energies, 2), vec![(3, 1.0)]);
    }

    proptest! {
        #[test]
        fn depth_matches_barrier_search(
            n in 1usize..=6,
            raw in prop::collection::vec(0u8..6, 64),
        ) {
            // small integer energies force plenty of ties
            let energies: Vec<f64> = raw[..1 << n].iter().map(|&e| e as f64).collect();
            prop_assert_eq!(
                local_minimum_depths(&energies, n),
                depths_by_barrier_search(&energies, n)
            );
        }
    }
}
