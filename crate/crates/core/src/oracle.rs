//! Exhaustive searches used as ground truth for the solver.
//!
//! Assignments are enumerated as integers `u` in `0..2^V`, with variable `v`
//! stored in bit `V - 1 - v`, so ascending `u` is lexicographic order on the
//! bit vectors. Work is split by the high-order bits and merged in order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gf2::Gf2System;
use crate::matrix::SymbolicMatrix;
use crate::solver::{assign_signs, compute_divisions, DivisionTable};

pub const DEFAULT_SIGN_LIMIT: usize = 28;
pub const DEFAULT_GF2_LIMIT: usize = 20;

/// Hard ceiling regardless of the requested limit; masks are `u64`.
const MAX_VARIABLES: usize = 40;

/// One Boolean per couple variable, in variable order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignAssignment {
    pub bits: Vec<bool>,
}

impl SignAssignment {
    /// The special matrix these couple values produce (column 0 positive).
    pub fn materialize(&self, m: &SymbolicMatrix, table: &DivisionTable) -> Result<SymbolicMatrix> {
        assign_signs(&m.erase_signs(), table, &self.bits)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSearch {
    pub variables: usize,
    pub count: u64,
    pub witnesses: Vec<SignAssignment>,
    pub table: DivisionTable,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Search {
    pub consistent: bool,
    pub all_solutions: Vec<Vec<bool>>,
}

/// Parity constraints `popcount(u & mask) % 2 == parity`.
struct Constraints {
    checks: Vec<(u64, bool)>,
    impossible: bool,
}

impl Constraints {
    fn new(mut raw: Vec<(u64, bool)>) -> Self {
        raw.sort_unstable();
        raw.dedup();
        let impossible = raw.iter().any(|&(m, p)| m == 0 && p);
        raw.retain(|&(m, _)| m != 0);
        Self {
            checks: raw,
            impossible,
        }
    }

    fn holds(&self, u: u64) -> bool {
        self.checks
            .iter()
            .all(|&(mask, parity)| ((u & mask).count_ones() & 1 == 1) == parity)
    }

    /// Every satisfying `u` in ascending order.
    fn enumerate(&self, variables: usize) -> Vec<u64> {
        if self.impossible {
            return Vec::new();
        }
        let total = 1u64 << variables;
        let split = variables.min(8);
        let chunk = total >> split;
        (0..1u64 << split)
            .into_par_iter()
            .map(|c| {
                (c * chunk..(c + 1) * chunk)
                    .filter(|&u| self.holds(u))
                    .collect::<Vec<u64>>()
            })
            .collect::<Vec<_>>()
            .concat()
    }
}

fn check_limit(variables: usize, limit: usize) -> Result<()> {
    let limit = limit.min(MAX_VARIABLES);
    if variables > limit {
        return Err(Error::TooLarge { variables, limit });
    }
    Ok(())
}

fn unpack(u: u64, variables: usize) -> Vec<bool> {
    (0..variables)
        .map(|v| u >> (variables - 1 - v) & 1 == 1)
        .collect()
}

/// Count couple-value assignments under which every column pair meets the
/// exchange-and-negate condition, listing them lexicographically.
///
/// Column 0 is held positive. The sign of cell `(r, j)`, `j >= 1`, is
/// `!x` if `r` is the lower row of its couple in column `j`'s division and
/// `x` otherwise; each pairwise condition is then a parity constraint.
pub fn brute_force_signs(m: &SymbolicMatrix, limit: usize) -> Result<SignSearch> {
    let table = compute_divisions(&m.erase_signs())?;
    let variables = table.variables();
    check_limit(variables, limit)?;
    let n = m.order();
    let bit = |v: usize| 1u64 << (variables - 1 - v);
    // affine sign of cell (r, c): (mask, constant)
    let sign = |r: usize, c: usize| -> (u64, bool) {
        if c == 0 {
            return (0, false);
        }
        let v = table.variable_of(c - 1, r);
        let lower = table.division(c - 1).couple_of(r).lo == r;
        (bit(v), lower)
    };
    let pos = m.positions();
    let mut raw = Vec::new();
    for i in 0..n {
        for (j, rows_of) in pos.iter().enumerate().skip(i + 1) {
            for k in 0..n {
                let l = rows_of[m.entry(k, i).index];
                if k > l {
                    continue;
                }
                let terms = [sign(k, i), sign(k, j), sign(l, i), sign(l, j)];
                let (mask, constant) = terms
                    .iter()
                    .fold((0u64, false), |(a, b), &(m, c)| (a ^ m, b ^ c));
                // required: XOR of the four signs is 1
                raw.push((mask, !constant));
            }
        }
    }
    let found = Constraints::new(raw).enumerate(variables);
    Ok(SignSearch {
        variables,
        count: found.len() as u64,
        witnesses: found
            .into_iter()
            .map(|u| SignAssignment {
                bits: unpack(u, variables),
            })
            .collect(),
        table,
    })
}

/// All solutions of a small XOR system, lexicographically.
pub fn brute_force_gf2(sys: &Gf2System, limit: usize) -> Result<Gf2Search> {
    let variables = sys.variables();
    check_limit(variables, limit)?;
    let raw = (0..sys.rows())
        .map(|r| {
            let mask = sys
                .row_variables(r)
                .into_iter()
                .fold(0u64, |acc, v| acc | 1 << (variables - 1 - v));
            (mask, sys.constant(r))
        })
        .collect();
    let all_solutions: Vec<Vec<bool>> = Constraints::new(raw)
        .enumerate(variables)
        .into_iter()
        .map(|u| unpack(u, variables))
        .collect();
    Ok(Gf2Search {
        consistent: !all_solutions.is_empty(),
        all_solutions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::generate_ordered_type;
    use crate::matrix::validate_special_orthogonal;
    use crate::solver::{build_equations, find_solution};

    fn sys(cols: usize, rows: &[&[u8]]) -> Gf2System {
        let rows: Vec<Vec<bool>> = rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect();
        Gf2System::from_rows(cols, &rows).unwrap()
    }

    #[test]
    fn gf2_small_examples() {
        let out = brute_force_gf2(&sys(3, &[&[1, 1, 1], &[0, 1, 1]]), 20).unwrap();
        assert!(out.consistent);
        assert_eq!(out.all_solutions, vec![vec![false, true]]);
        let out = brute_force_gf2(&sys(2, &[&[1, 0], &[1, 1]]), 20).unwrap();
        assert!(!out.consistent);
        assert!(out.all_solutions.is_empty());
    }

    #[test]
    fn gf2_enumeration_is_lexicographic() {
        let out = brute_force_gf2(&Gf2System::new(0, 3).unwrap(), 20).unwrap();
        let b = |x: u8| vec![x & 2 != 0, x & 1 != 0];
        assert_eq!(out.all_solutions, (0..4).map(b).collect::<Vec<_>>());
    }

    #[test]
    fn gf2_limit() {
        let err = brute_force_gf2(&Gf2System::new(0, 22).unwrap(), 20).unwrap_err();
        assert_eq!(err, Error::TooLarge { variables: 21, limit: 20 });
    }

    #[test]
    fn two_by_two_has_two_sign_choices() {
        let out = brute_force_signs(&generate_ordered_type(1), 28).unwrap();
        assert_eq!(out.count, 2);
    }

    #[test]
    fn four_by_four_agrees_with_solver() {
        let m = generate_ordered_type(2);
        let out = brute_force_signs(&m, 28).unwrap();
        assert_eq!(out.count, 16);
        for w in &out.witnesses {
            assert!(validate_special_orthogonal(&w.materialize(&m, &out.table).unwrap()).unwrap());
        }
        let solved = find_solution(&m).unwrap();
        let x = solved.gf2.solution.unwrap();
        assert!(out.witnesses.iter().any(|w| w.bits == x));
        let gf2 = brute_force_gf2(&build_equations(&out.table).unwrap(), 20).unwrap();
        let signs: Vec<Vec<bool>> = out.witnesses.iter().map(|w| w.bits.clone()).collect();
        assert_eq!(gf2.all_solutions, signs);
    }

    #[test]
    fn sixteen_is_too_large() {
        let err = brute_force_signs(&generate_ordered_type(4), DEFAULT_SIGN_LIMIT).unwrap_err();
        assert_eq!(err.kind(), "TooLarge");
    }
}
