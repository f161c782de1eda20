//! Symbolic sign-permutation matrices.
//!
//! A [`SymbolicMatrix`] of order `N = 2^n` stores in every cell a parameter
//! index `k` (standing for `a_k`) and a sign. In *semi* mode all signs are
//! unknown and only the index layout matters; in *special* mode every sign is
//! `+1` or `-1`. Indices are 0-based everywhere.

use std::fmt;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Absolute tolerance used for unit-norm and orthogonality checks.
pub const TOLERANCE: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
    Unknown,
}

impl Sign {
    /// `Some(true)` for a minus sign, `None` when unknown.
    pub fn is_negative(self) -> Option<bool> {
        match self {
            Sign::Plus => Some(false),
            Sign::Minus => Some(true),
            Sign::Unknown => None,
        }
    }

    pub fn from_negative(neg: bool) -> Self {
        if neg {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
            Sign::Unknown => Sign::Unknown,
        }
    }

    pub fn factor(self) -> f64 {
        match self {
            Sign::Minus => -1.0,
            _ => 1.0,
        }
    }
}

/// One cell: `sign * a_index`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedEntry {
    pub index: usize,
    pub sign: Sign,
}

impl SignedEntry {
    pub fn new(index: usize, sign: Sign) -> Self {
        Self { index, sign }
    }

    pub fn unsigned(index: usize) -> Self {
        Self::new(index, Sign::Unknown)
    }

    pub fn plus(index: usize) -> Self {
        Self::new(index, Sign::Plus)
    }

    pub fn minus(index: usize) -> Self {
        Self::new(index, Sign::Minus)
    }

    pub fn negated(self) -> Self {
        Self::new(self.index, self.sign.flipped())
    }
}

impl fmt::Display for SignedEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Minus => write!(f, "-a{}", self.index),
            _ => write!(f, "a{}", self.index),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Semi,
    Special,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Semi => "semi",
            Mode::Special => "special",
        }
    }
}

/// Square grid of [`SignedEntry`] of order `N = 2^n`, stored row-major.
///
/// Construction checks shape, index range and sign/mode agreement. Whether
/// each column is a permutation of `[N]` is checked by [`check_columns`],
/// which every validator and reader calls first.
///
/// [`check_columns`]: SymbolicMatrix::check_columns
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SymbolicMatrix {
    qubits: u32,
    order: usize,
    mode: Mode,
    cells: Vec<SignedEntry>,
}

impl SymbolicMatrix {
    pub fn new(mode: Mode, rows: Vec<Vec<SignedEntry>>) -> Result<Self> {
        let order = rows.len();
        if order < 2 || !order.is_power_of_two() {
            return Err(Error::MalformedMatrix(format!(
                "order {order} is not a power of two >= 2"
            )));
        }
        let mut cells = Vec::with_capacity(order * order);
        for (r, row) in rows.into_iter().enumerate() {
            if row.len() != order {
                return Err(Error::MalformedMatrix(format!(
                    "row {r} has {} cells, expected {order}",
                    row.len()
                )));
            }
            cells.extend(row);
        }
        for (pos, e) in cells.iter().enumerate() {
            let (r, c) = (pos / order, pos % order);
            if e.index >= order {
                return Err(Error::MalformedMatrix(format!(
                    "cell ({r},{c}) holds index {} >= {order}",
                    e.index
                )));
            }
            match (mode, e.sign) {
                (Mode::Semi, Sign::Unknown) | (Mode::Special, Sign::Plus | Sign::Minus) => {}
                (Mode::Semi, _) => {
                    return Err(Error::MalformedMatrix(format!(
                        "cell ({r},{c}) carries a sign in a semi matrix"
                    )))
                }
                (Mode::Special, Sign::Unknown) => {
                    return Err(Error::MalformedMatrix(format!(
                        "cell ({r},{c}) has no sign in a special matrix"
                    )))
                }
            }
        }
        Ok(Self {
            qubits: order.trailing_zeros(),
            order,
            mode,
            cells,
        })
    }

    /// Semi matrix from plain index rows.
    pub fn semi(rows: &[Vec<usize>]) -> Result<Self> {
        Self::new(
            Mode::Semi,
            rows.iter()
                .map(|row| row.iter().map(|&k| SignedEntry::unsigned(k)).collect())
                .collect(),
        )
    }

    /// Decode rows in the file encoding: `v` stands for index `|v| - 1` with
    /// the sign of `v`. Zero is rejected; semi mode requires `v > 0`.
    pub fn from_encoded(mode: Mode, rows: &[Vec<i64>]) -> Result<Self> {
        let mut decoded = Vec::with_capacity(rows.len());
        for (r, row) in rows.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (c, &v) in row.iter().enumerate() {
                if v == 0 {
                    return Err(Error::MalformedMatrix(format!("cell ({r},{c}) is 0")));
                }
                let index = (v.unsigned_abs() - 1) as usize;
                let sign = match mode {
                    Mode::Semi if v < 0 => {
                        return Err(Error::MalformedMatrix(format!(
                            "cell ({r},{c}) is negative in a semi matrix"
                        )))
                    }
                    Mode::Semi => Sign::Unknown,
                    Mode::Special => Sign::from_negative(v < 0),
                };
                out.push(SignedEntry::new(index, sign));
            }
            decoded.push(out);
        }
        Self::new(mode, decoded)
    }

    /// Inverse of [`from_encoded`](Self::from_encoded).
    pub fn encoded_rows(&self) -> Vec<Vec<i64>> {
        self.rows()
            .map(|row| {
                row.iter()
                    .map(|e| {
                        let v = e.index as i64 + 1;
                        if e.sign == Sign::Minus {
                            -v
                        } else {
                            v
                        }
                    })
                    .collect()
            })
            .collect()
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    pub fn entry(&self, row: usize, col: usize) -> SignedEntry {
        self.cells[row * self.order + col]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[SignedEntry]> {
        self.cells.chunks(self.order)
    }

    pub fn column(&self, col: usize) -> Vec<SignedEntry> {
        (0..self.order).map(|r| self.entry(r, col)).collect()
    }

    /// `MalformedMatrix` unless every column is a permutation of `[N]`.
    pub fn check_columns(&self) -> Result<()> {
        let n = self.order;
        let mut seen = vec![usize::MAX; n];
        for c in 0..n {
            for r in 0..n {
                let k = self.entry(r, c).index;
                if seen[k] == c {
                    return Err(Error::MalformedMatrix(format!(
                        "column {c} repeats index {k}"
                    )));
                }
                seen[k] = c;
            }
        }
        Ok(())
    }

    /// `positions()[c][k]` is the row of column `c` that holds `a_k`.
    pub(crate) fn positions(&self) -> Vec<Vec<usize>> {
        let n = self.order;
        let mut pos = vec![vec![0; n]; n];
        for r in 0..n {
            for c in 0..n {
                pos[c][self.entry(r, c).index] = r;
            }
        }
        pos
    }

    /// Drop all signs, producing the semi matrix with the same layout.
    pub fn erase_signs(&self) -> Self {
        Self {
            mode: Mode::Semi,
            cells: self
                .cells
                .iter()
                .map(|e| SignedEntry::unsigned(e.index))
                .collect(),
            ..self.clone()
        }
    }

    /// New row `r` is old row `perm[r]`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.order)?;
        let n = self.order;
        let mut cells = Vec::with_capacity(n * n);
        for &src in perm {
            cells.extend_from_slice(&self.cells[src * n..(src + 1) * n]);
        }
        Ok(Self {
            cells,
            ..self.clone()
        })
    }

    /// New column `c` is old column `perm[c]`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.order)?;
        let n = self.order;
        let mut cells = Vec::with_capacity(n * n);
        for r in 0..n {
            for &src in perm {
                cells.push(self.entry(r, src));
            }
        }
        Ok(Self {
            cells,
            ..self.clone()
        })
    }

    /// Rename parameter indices: `a_k` becomes `a_{rename[k]}`.
    pub fn relabel(&self, rename: &[usize]) -> Result<Self> {
        check_permutation(rename, self.order)?;
        Ok(Self {
            cells: self
                .cells
                .iter()
                .map(|e| SignedEntry::new(rename[e.index], e.sign))
                .collect(),
            ..self.clone()
        })
    }

    /// Multiply column `col` by `-1`.
    pub fn negate_column(&self, col: usize) -> Self {
        let mut out = self.clone();
        for r in 0..self.order {
            let e = &mut out.cells[r * self.order + col];
            e.sign = e.sign.flipped();
        }
        out
    }

    /// The upper-left `size x size` block, which must itself use indices `0..size`.
    pub fn upper_left_block(&self, size: usize) -> Result<Self> {
        if size > self.order {
            return Err(Error::DimensionMismatch {
                expected: self.order,
                found: size,
            });
        }
        let rows = (0..size)
            .map(|r| (0..size).map(|c| self.entry(r, c)).collect())
            .collect();
        let block = Self::new(self.mode, rows)?;
        block.check_columns()?;
        Ok(block)
    }

    /// Dense view with entry `(r, c) = sign * p[index]`.
    pub fn instantiate(&self, params: &ParameterVector) -> Result<DMatrix<f64>> {
        instantiate_numeric(self, params)
    }
}

impl fmt::Display for SymbolicMatrix {
    /// Plain-text form, one row per line. Special matrices write every sign.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.rows() {
            let line: Vec<String> = row
                .iter()
                .map(|e| match e.sign {
                    Sign::Plus => format!("+a{}", e.index),
                    _ => e.to_string(),
                })
                .collect();
            writeln!(f, "{}", line.join(" "))?;
        }
        Ok(())
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(Error::MalformedMatrix(format!(
                "{perm:?} is not a permutation of 0..{n}"
            )));
        }
    }
    Ok(())
}

/// Real parameters `a_0..a_{N-1}` with unit Euclidean norm.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterVector {
    values: Vec<f64>,
}

impl ParameterVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        let norm2: f64 = values.iter().map(|v| v * v).sum();
        if !norm2.is_finite() || (norm2 - 1.0).abs() > TOLERANCE {
            return Err(Error::NonUnitParameters(format!(
                "sum of squares is {norm2}"
            )));
        }
        Ok(Self { values })
    }

    /// Gaussian direction, normalized: uniform on the unit sphere.
    pub fn random<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        loop {
            let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-6 {
                return Self {
                    values: v.into_iter().map(|x| x / norm).collect(),
                };
            }
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// True iff every pair of columns splits into 2-tuples of rows whose indices
/// are exactly swapped between the two columns. Signs are ignored.
pub fn validate_semi_orthogonal(m: &SymbolicMatrix) -> Result<bool> {
    m.check_columns()?;
    Ok(pairwise_check(m, false))
}

/// Exchange condition plus, for every paired rows `(k, l)` of columns
/// `(i, j)`, `s_ki ^ s_kj == s_li ^ s_lj ^ 1`.
pub fn validate_special_orthogonal(m: &SymbolicMatrix) -> Result<bool> {
    if m.mode() != Mode::Special {
        return Err(Error::ModeMismatch {
            expected: "special",
            found: m.mode().as_str(),
        });
    }
    m.check_columns()?;
    Ok(pairwise_check(m, true))
}

fn pairwise_check(m: &SymbolicMatrix, signs: bool) -> bool {
    let n = m.order();
    let pos = m.positions();
    let neg = |r: usize, c: usize| m.entry(r, c).sign == Sign::Minus;
    for i in 0..n {
        for (j, rows_of) in pos.iter().enumerate().skip(i + 1) {
            for k in 0..n {
                let (a, b) = (m.entry(k, i).index, m.entry(k, j).index);
                if a == b {
                    return false;
                }
                let l = rows_of[a];
                if m.entry(l, i).index != b {
                    return false;
                }
                if signs && (neg(k, i) ^ neg(k, j)) == (neg(l, i) ^ neg(l, j)) {
                    return false;
                }
            }
        }
    }
    true
}

/// Entry `(r, c) = sign * p[index]`.
pub fn instantiate_numeric(m: &SymbolicMatrix, p: &ParameterVector) -> Result<DMatrix<f64>> {
    if m.mode() != Mode::Special {
        return Err(Error::ModeMismatch {
            expected: "special",
            found: m.mode().as_str(),
        });
    }
    m.check_columns()?;
    if p.len() != m.order() {
        return Err(Error::DimensionMismatch {
            expected: m.order(),
            found: p.len(),
        });
    }
    let n = m.order();
    Ok(DMatrix::from_fn(n, n, |r, c| {
        let e = m.entry(r, c);
        e.sign.factor() * p.values()[e.index]
    }))
}

/// `max |(G^T G - I)_{rc}|`.
pub fn orthogonality_residual(g: &DMatrix<f64>) -> f64 {
    let gram = g.transpose() * g;
    let n = gram.nrows();
    let mut worst: f64 = 0.0;
    for r in 0..n {
        for c in 0..n {
            let target = if r == c { 1.0 } else { 0.0 };
            worst = worst.max((gram[(r, c)] - target).abs());
        }
    }
    worst
}
