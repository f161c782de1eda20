//! From a semi-orthogonal layout to a signed solution.
//!
//! The pipeline has four stages:
//!
//! 1. [`compute_divisions`]: the division of the operator carrying column 0
//!    to column `j`, for every `j >= 1`.
//! 2. [`build_equations`]: for every pair of operators and every 4-tuple of
//!    rows they trace out, one XOR equation saying the closed path
//!    `i -> j -> k -> l -> i` is negated an odd number of times.
//! 3. XOR elimination ([`Gf2System::eliminate_and_solve`]).
//! 4. [`assign_signs`]: turn couple values back into matrix signs.
//!
//! Variable `m * N/2 + s` is the couple with serial number `s` (position by
//! ascending `lo`) in the division of operator `m` (column `m + 1`).

use crate::error::{Error, Result};
use crate::gf2::{Gf2Solution, Gf2System};
use crate::matrix::{
    validate_semi_orthogonal, validate_special_orthogonal, Mode, Sign, SignedEntry,
    SymbolicMatrix,
};
use crate::operator::{Couple, Division};

/// Row `m` holds the division of the operator for column `m + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DivisionTable {
    order: usize,
    rows: Vec<Division>,
}

impl DivisionTable {
    pub fn new(order: usize, rows: Vec<Division>) -> Result<Self> {
        if rows.len() + 1 != order || rows.iter().any(|d| d.order() != order) {
            return Err(Error::InvalidDivision(format!(
                "table of {} divisions for order {order}",
                rows.len()
            )));
        }
        Ok(Self { order, rows })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn operators(&self) -> usize {
        self.rows.len()
    }

    pub fn division(&self, m: usize) -> &Division {
        &self.rows[m]
    }

    pub fn divisions(&self) -> &[Division] {
        &self.rows
    }

    /// `N (N - 1) / 2`, one per couple.
    pub fn variables(&self) -> usize {
        self.order * (self.order - 1) / 2
    }

    /// Variable index of the couple of operator `m` that contains `row`.
    pub fn variable_of(&self, m: usize, row: usize) -> usize {
        m * (self.order / 2) + self.rows[m].serial_of(row)
    }

    /// `(operator, couple)` for a variable index.
    pub fn variable_info(&self, v: usize) -> (usize, Couple) {
        let half = self.order / 2;
        let (m, s) = (v / half, v % half);
        (m, self.rows[m].couples()[s])
    }

    /// Copy with every couple valued from `x`.
    pub fn with_solution(&self, x: &[bool]) -> Result<Self> {
        if x.len() != self.variables() {
            return Err(Error::DimensionMismatch {
                expected: self.variables(),
                found: x.len(),
            });
        }
        let half = self.order / 2;
        let rows = self
            .rows
            .iter()
            .enumerate()
            .map(|(m, d)| {
                let vals: Vec<Option<bool>> =
                    x[m * half..(m + 1) * half].iter().map(|&b| Some(b)).collect();
                d.with_values(&vals)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { order: self.order, rows })
    }

    /// Couple values in variable order, if every couple is valued.
    pub fn solution(&self) -> Option<Vec<bool>> {
        self.rows
            .iter()
            .flat_map(|d| d.couples().iter().map(|c| c.value))
            .collect()
    }

    /// True if two operators share a couple joining the same rows.
    pub fn has_repeated_couple(&self) -> bool {
        (0..self.rows.len()).any(|a| {
            (a + 1..self.rows.len()).any(|b| self.rows[a].shares_couple_with(&self.rows[b]))
        })
    }

    /// Sidecar listing: one `variable operator lo hi` line per variable.
    pub fn variable_listing(&self) -> String {
        (0..self.variables())
            .map(|v| {
                let (m, c) = self.variable_info(v);
                format!("{v} {m} {} {}\n", c.lo, c.hi)
            })
            .collect()
    }
}

/// Divisions of all column operators, keyed against column 0.
///
/// For special matrices the couple values are read from the signs; a couple
/// must negate exactly one of its two rows relative to column 0.
pub fn compute_divisions(m: &SymbolicMatrix) -> Result<DivisionTable> {
    m.check_columns()?;
    let n = m.order();
    // row of column 0 holding each index
    let mut h = vec![0; n];
    for i in 0..n {
        h[m.entry(i, 0).index] = i;
    }
    let neg = |r: usize, c: usize| m.entry(r, c).sign == Sign::Minus;
    let mut rows = Vec::with_capacity(n - 1);
    for j in 1..n {
        let mut done = vec![false; n];
        let mut couples = Vec::with_capacity(n / 2);
        for i in 0..n {
            if done[i] {
                continue;
            }
            let t = h[m.entry(i, j).index];
            if t == i || m.entry(t, j).index != m.entry(i, 0).index {
                return Err(Error::NotSemiOrthogonal(format!(
                    "row {i} of column {j} cannot be paired with column 0"
                )));
            }
            done[i] = true;
            done[t] = true;
            let couple = match m.mode() {
                Mode::Semi => Couple::unknown(i, t),
                Mode::Special => {
                    // i < t: t is the hi row
                    let hi_flipped = neg(t, j) ^ neg(i, 0);
                    let lo_flipped = neg(i, j) ^ neg(t, 0);
                    if hi_flipped == lo_flipped {
                        return Err(Error::InconsistentSigns { column: j, lo: i, hi: t });
                    }
                    Couple::new(i, t, hi_flipped)
                }
            };
            couples.push(couple);
        }
        rows.push(Division::new(couples, n)?);
    }
    DivisionTable::new(n, rows)
}

/// One matching equation: the 4-tuple it came from, its four variables
/// (ascending) and its constant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchingEquation {
    pub tuple: [usize; 4],
    pub variables: [usize; 4],
    pub constant: bool,
}

/// Trace `start -> j` in operator `a`, `-> k` in `b`, `-> l` in `a`, and back
/// through `b`, which must land on `start` again.
pub fn matching_equation(
    t: &DivisionTable,
    a: usize,
    b: usize,
    start: usize,
) -> Result<MatchingEquation> {
    let (da, db) = (t.division(a), t.division(b));
    let i = start;
    let j = da.partner(i);
    let k = db.partner(j);
    let l = da.partner(k);
    let back = db.partner(l);
    let broken = Error::BrokenPath { a, b, start };
    if back != i {
        return Err(broken);
    }
    let tuple = [i, j, k, l];
    for x in 0..4 {
        for y in x + 1..4 {
            if tuple[x] == tuple[y] {
                return Err(broken);
            }
        }
    }
    // each step x -> y is stored as (min, max); a step against that order
    // reads <x,y> = stored ^ 1, moving the 1 into the constant
    let steps = [(i, j, a), (j, k, b), (k, l, a), (l, i, b)];
    let mut constant = true;
    let mut variables = [0; 4];
    for (slot, &(x, y, op)) in steps.iter().enumerate() {
        if x > y {
            constant = !constant;
        }
        variables[slot] = t.variable_of(op, x);
    }
    variables.sort_unstable();
    Ok(MatchingEquation {
        tuple,
        variables,
        constant,
    })
}

/// Every matching equation of the table, operator pairs in lexicographic
/// order, each 4-tuple once (from its smallest row).
pub fn matching_equations(t: &DivisionTable) -> Result<Vec<MatchingEquation>> {
    let n = t.order();
    let mut out = Vec::with_capacity(n * (n - 1) * (n - 2) / 8);
    for a in 0..t.operators() {
        for b in a + 1..t.operators() {
            let mut visited = vec![false; n];
            for i in 0..n {
                if visited[i] {
                    continue;
                }
                let eq = matching_equation(t, a, b, i)?;
                for &r in &eq.tuple {
                    visited[r] = true;
                }
                out.push(eq);
            }
        }
    }
    Ok(out)
}

/// The `R x C` augmented system, `R = N(N-1)(N-2)/8`, `C = N(N-1)/2 + 1`.
pub fn build_equations(t: &DivisionTable) -> Result<Gf2System> {
    let mut sys = Gf2System::new(0, t.variables() + 1)?;
    for eq in matching_equations(t)? {
        sys.push_equation(&eq.variables, eq.constant)?;
    }
    Ok(sys)
}

/// Column 0 all positive; column `j` from the valued couples of operator
/// `j - 1`. The result is validated before it is returned.
pub fn assign_signs(m: &SymbolicMatrix, t: &DivisionTable, x: &[bool]) -> Result<SymbolicMatrix> {
    let n = m.order();
    if t.order() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: t.order(),
        });
    }
    if x.len() != t.variables() {
        return Err(Error::DimensionMismatch {
            expected: t.variables(),
            found: x.len(),
        });
    }
    let base: Vec<usize> = (0..n).map(|r| m.entry(r, 0).index).collect();
    let mut rows: Vec<Vec<SignedEntry>> = base
        .iter()
        .map(|&k| {
            let mut row = vec![SignedEntry::plus(0); n];
            row[0] = SignedEntry::plus(k);
            row
        })
        .collect();
    for j in 1..n {
        for c in t.division(j - 1).couples() {
            let v = x[t.variable_of(j - 1, c.lo)];
            rows[c.lo][j] = SignedEntry::new(base[c.hi], Sign::from_negative(!v));
            rows[c.hi][j] = SignedEntry::new(base[c.lo], Sign::from_negative(v));
        }
    }
    let out = SymbolicMatrix::new(Mode::Special, rows)?;
    if !validate_special_orthogonal(&out)? {
        return Err(Error::SolutionMismatch);
    }
    Ok(out)
}

/// Everything produced by one run of [`find_solution`].
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub found: bool,
    pub matrix: Option<SymbolicMatrix>,
    pub table: DivisionTable,
    pub system: Gf2System,
    pub gf2: Gf2Solution,
}

impl SolveOutcome {
    pub fn rank_full(&self) -> usize {
        self.gf2.rank_full
    }

    pub fn rank_coeff(&self) -> usize {
        self.gf2.rank_coeff
    }
}

/// Decide whether a semi-orthogonal layout admits signs making it orthogonal,
/// and produce one such special matrix when it does.
pub fn find_solution(m: &SymbolicMatrix) -> Result<SolveOutcome> {
    if !validate_semi_orthogonal(m)? {
        return Err(Error::NotSemiOrthogonal(
            "some column pair is not an exchange of 2-tuples".into(),
        ));
    }
    let skeleton = m.erase_signs();
    let table = compute_divisions(&skeleton)?;
    let system = build_equations(&table)?;
    let gf2 = system.eliminate_and_solve();
    let matrix = match &gf2.solution {
        Some(x) => Some(assign_signs(&skeleton, &table, x)?),
        None => None,
    };
    Ok(SolveOutcome {
        found: gf2.consistent,
        matrix,
        table,
        system,
        gf2,
    })
}
