//! Bit-packed XOR linear systems and their Gaussian elimination.
//!
//! A [`Gf2System`] is an `R x C` augmented Boolean matrix: columns
//! `0..C-1` are variable coefficients and column `C-1` is the constant.
//! Rows are packed into `u64` words, row-major, trailing bits zero.

use crate::error::{Error, Result};

const WORD: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Gf2System {
    rows: usize,
    cols: usize,
    words: usize,
    bits: Vec<u64>,
}

impl Gf2System {
    /// All-zero system with `cols` columns, the last one being the constant.
    pub fn new(rows: usize, cols: usize) -> Result<Self> {
        if cols == 0 {
            return Err(Error::MalformedSystem("no constant column".into()));
        }
        let words = cols.div_ceil(WORD);
        Ok(Self {
            rows,
            cols,
            words,
            bits: vec![0; rows * words],
        })
    }

    /// Build from unpacked rows, each `cols` wide (constant last).
    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Result<Self> {
        let mut sys = Self::new(rows.len(), cols)?;
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::MalformedSystem(format!(
                    "row {r} has {} columns, expected {cols}",
                    row.len()
                )));
            }
            for (c, &b) in row.iter().enumerate() {
                if b {
                    sys.set(r, c, true);
                }
            }
        }
        Ok(sys)
    }

    /// Append the equation `XOR_{v in vars} x_v = constant`.
    pub fn push_equation(&mut self, vars: &[usize], constant: bool) -> Result<()> {
        let r = self.rows;
        self.rows += 1;
        self.bits.resize(self.rows * self.words, 0);
        for &v in vars {
            if v >= self.variables() {
                return Err(Error::MalformedSystem(format!("variable {v} out of range")));
            }
            self.toggle(r, v);
        }
        if constant {
            self.set(r, self.cols - 1, true);
        }
        Ok(())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Column count including the constant column.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn variables(&self) -> usize {
        self.cols - 1
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.words + c / WORD] >> (c % WORD) & 1 == 1
    }

    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        let w = &mut self.bits[r * self.words + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    fn toggle(&mut self, r: usize, c: usize) {
        self.bits[r * self.words + c / WORD] ^= 1u64 << (c % WORD);
    }

    pub fn constant(&self, r: usize) -> bool {
        self.get(r, self.cols - 1)
    }

    pub fn row(&self, r: usize) -> Vec<bool> {
        (0..self.cols).map(|c| self.get(r, c)).collect()
    }

    /// Number of set coefficient bits in row `r` (constant excluded).
    pub fn row_weight(&self, r: usize) -> usize {
        (0..self.variables()).filter(|&c| self.get(r, c)).count()
    }

    /// Variables with a nonzero coefficient in row `r`, ascending.
    pub fn row_variables(&self, r: usize) -> Vec<usize> {
        (0..self.variables()).filter(|&c| self.get(r, c)).collect()
    }

    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.words..(r + 1) * self.words]
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words {
            self.bits.swap(a * self.words + w, b * self.words + w);
        }
    }

    /// `row[dst] ^= row[src]`.
    pub fn xor_row(&mut self, dst: usize, src: usize) {
        for w in 0..self.words {
            let s = self.bits[src * self.words + w];
            self.bits[dst * self.words + w] ^= s;
        }
    }

    /// Does `x` (one bit per variable) satisfy every equation?
    pub fn is_satisfied_by(&self, x: &[bool]) -> bool {
        if x.len() != self.variables() {
            return false;
        }
        let mut packed = vec![0u64; self.words];
        for (v, &b) in x.iter().enumerate() {
            if b {
                packed[v / WORD] |= 1 << (v % WORD);
            }
        }
        (0..self.rows).all(|r| {
            let parity = self
                .row_words(r)
                .iter()
                .zip(&packed)
                .map(|(a, b)| (a & b).count_ones())
                .sum::<u32>()
                & 1;
            (parity == 1) == self.constant(r)
        })
    }

    /// One line per row of `0`/`1`, constant column after a `|`.
    pub fn dump(&self) -> String {
        let mut out = String::with_capacity(self.rows * (self.cols + 2));
        for r in 0..self.rows {
            for c in 0..self.variables() {
                out.push(if self.get(r, c) { '1' } else { '0' });
            }
            out.push('|');
            out.push(if self.constant(r) { '1' } else { '0' });
            out.push('\n');
        }
        out
    }

    /// Reduce to row simplest form using only row swaps and row XORs.
    ///
    /// Pivots are taken column by column (the constant column included), the
    /// first row at or below the current rank with a 1 winning. Every pivot
    /// column is then cleared above its pivot.
    pub fn eliminate(&self) -> Elimination {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut k = 0;
        for j in 0..a.cols {
            if k == a.rows {
                break;
            }
            let Some(p) = (k..a.rows).find(|&i| a.get(i, j)) else {
                continue;
            };
            a.swap_rows(p, k);
            for i in k + 1..a.rows {
                if a.get(i, j) {
                    a.xor_row(i, k);
                }
            }
            pivots.push(j);
            k += 1;
        }
        for (i, &j) in pivots.iter().enumerate().rev() {
            for m in 0..i {
                if a.get(m, j) {
                    a.xor_row(m, i);
                }
            }
        }
        let rank_full = pivots.len();
        let rank_coeff = pivots.iter().filter(|&&j| j < a.cols - 1).count();
        Elimination {
            reduced: a,
            pivots,
            rank_full,
            rank_coeff,
        }
    }

    /// Consistency verdict, ranks and the special solution (free variables 0).
    pub fn eliminate_and_solve(&self) -> Gf2Solution {
        let elim = self.eliminate();
        let consistent = elim.rank_full == elim.rank_coeff;
        let solution = consistent.then(|| {
            let mut x = vec![false; self.variables()];
            for (i, &j) in elim.pivots.iter().enumerate() {
                x[j] = elim.reduced.constant(i);
            }
            assert!(
                self.is_satisfied_by(&x),
                "eliminated solution fails substitution"
            );
            x
        });
        Gf2Solution {
            consistent,
            rank_full: elim.rank_full,
            rank_coeff: elim.rank_coeff,
            solution,
        }
    }
}

/// Output of [`Gf2System::eliminate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    pub reduced: Gf2System,
    /// Pivot column of each of the first `rank_full` rows.
    pub pivots: Vec<usize>,
    /// Rank of the augmented matrix.
    pub rank_full: usize,
    /// Rank of the coefficient part.
    pub rank_coeff: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Gf2Solution {
    pub consistent: bool,
    pub rank_full: usize,
    pub rank_coeff: usize,
    pub solution: Option<Vec<bool>>,
}

impl Gf2Solution {
    pub fn summary(&self) -> String {
        format!(
            "consistent={} rank_full={} rank_coeff={}",
            self.consistent, self.rank_full, self.rank_coeff
        )
    }
}
