//! Couples, divisions and (semi-)matching operators.
//!
//! Every operator here is a scattered matrix (exactly one `±1` per row and
//! column), kept as a [`SignedPermutation`] rather than a dense grid.

use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::SignedEntry;

/// Exchange of rows `lo` and `hi` followed by negating one of them.
///
/// `value == Some(false)` negates the row at `lo` after the exchange,
/// `Some(true)` the row at `hi`. `None` is an exchange whose sign is not yet
/// decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Couple {
    pub lo: usize,
    pub hi: usize,
    pub value: Option<bool>,
}

impl Couple {
    /// Couple `<i,j>` with the given value. Stored with `lo < hi`; when `i > j`
    /// the value is flipped, since `<j,i> = <i,j> ^ 1`.
    pub fn new(i: usize, j: usize, value: bool) -> Self {
        if i < j {
            Self { lo: i, hi: j, value: Some(value) }
        } else {
            Self { lo: j, hi: i, value: Some(!value) }
        }
    }

    pub fn unknown(i: usize, j: usize) -> Self {
        Self { lo: i.min(j), hi: i.max(j), value: None }
    }

    /// Value of the couple read as `<from, partner>`.
    pub fn value_from(&self, from: usize) -> Option<bool> {
        debug_assert!(from == self.lo || from == self.hi);
        if from == self.lo {
            self.value
        } else {
            self.value.map(|v| !v)
        }
    }

    pub fn partner(&self, row: usize) -> usize {
        if row == self.lo {
            self.hi
        } else {
            self.lo
        }
    }

    pub fn with_value(self, value: Option<bool>) -> Self {
        Self { value, ..self }
    }

    /// Same pair of rows, regardless of value.
    pub fn is_similar(&self, other: &Couple) -> bool {
        self.lo == other.lo && self.hi == other.hi
    }
}

impl fmt::Display for Couple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value {
            Some(v) => write!(f, "<{},{}>={}", self.lo, self.hi, u8::from(v)),
            None => write!(f, "<{},{}>", self.lo, self.hi),
        }
    }
}

/// `N/2` disjoint couples covering `[N]`, ordered by `lo`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Division {
    order: usize,
    couples: Vec<Couple>,
    /// Serial number (position in `couples`) of the couple holding each row.
    serial: Vec<usize>,
}

impl Division {
    pub fn new(mut couples: Vec<Couple>, order: usize) -> Result<Self> {
        if order < 2 || !order.is_multiple_of(2) {
            return Err(Error::InvalidDivision(format!("order {order} is not even")));
        }
        if couples.len() != order / 2 {
            return Err(Error::InvalidDivision(format!(
                "{} couples for order {order}",
                couples.len()
            )));
        }
        couples.sort_by_key(|c| c.lo);
        let mut serial = vec![usize::MAX; order];
        for (s, c) in couples.iter().enumerate() {
            if c.lo >= c.hi || c.hi >= order {
                return Err(Error::InvalidDivision(format!("bad couple {c}")));
            }
            for row in [c.lo, c.hi] {
                if serial[row] != usize::MAX {
                    return Err(Error::InvalidDivision(format!("row {row} repeated")));
                }
                serial[row] = s;
            }
        }
        Ok(Self { order, couples, serial })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn couples(&self) -> &[Couple] {
        &self.couples
    }

    /// Position of the couple containing `row`.
    pub fn serial_of(&self, row: usize) -> usize {
        self.serial[row]
    }

    pub fn couple_of(&self, row: usize) -> &Couple {
        &self.couples[self.serial[row]]
    }

    pub fn partner(&self, row: usize) -> usize {
        self.couple_of(row).partner(row)
    }

    pub fn is_fully_signed(&self) -> bool {
        self.couples.iter().all(|c| c.value.is_some())
    }

    pub fn is_unsigned(&self) -> bool {
        self.couples.iter().all(|c| c.value.is_none())
    }

    /// Replace couple values, one per serial number.
    pub fn with_values(&self, values: &[Option<bool>]) -> Result<Self> {
        if values.len() != self.couples.len() {
            return Err(Error::DimensionMismatch {
                expected: self.couples.len(),
                found: values.len(),
            });
        }
        Ok(Self {
            couples: self
                .couples
                .iter()
                .zip(values)
                .map(|(c, &v)| c.with_value(v))
                .collect(),
            ..self.clone()
        })
    }

    /// True if some couple of `self` joins the same two rows as one of `other`.
    pub fn shares_couple_with(&self, other: &Division) -> bool {
        self.couples
            .iter()
            .any(|c| other.couple_of(c.lo).is_similar(c))
    }

    /// Uniformly random fixed-point-free pairing of `[order]`; couple values
    /// are random bits when `signed`, unknown otherwise.
    pub fn random<R: Rng + ?Sized>(order: usize, signed: bool, rng: &mut R) -> Self {
        let mut rows: Vec<usize> = (0..order).collect();
        rows.shuffle(rng);
        let couples = rows
            .chunks(2)
            .map(|p| {
                if signed {
                    Couple::new(p[0], p[1], rng.random())
                } else {
                    Couple::unknown(p[0], p[1])
                }
            })
            .collect();
        Self::new(couples, order).expect("shuffled pairing is a division")
    }
}

/// Entries that can be moved by an operator and negated.
pub trait Negate: Clone {
    fn negate(&self) -> Self;
}

impl Negate for f64 {
    fn negate(&self) -> Self {
        -*self
    }
}

impl Negate for num_complex::Complex64 {
    fn negate(&self) -> Self {
        -*self
    }
}

impl Negate for SignedEntry {
    fn negate(&self) -> Self {
        self.negated()
    }
}

/// Scattered matrix: row `i` has its single `±1` in column `perm[i]`, negative
/// when `neg[i]`. Applied to a vector, output row `i` is `±input[perm[i]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignedPermutation {
    perm: Vec<usize>,
    neg: Vec<bool>,
}

impl SignedPermutation {
    pub fn new(perm: Vec<usize>, neg: Vec<bool>) -> Result<Self> {
        if perm.len() != neg.len() {
            return Err(Error::DimensionMismatch {
                expected: perm.len(),
                found: neg.len(),
            });
        }
        let mut hit = vec![false; perm.len()];
        for &p in &perm {
            if p >= perm.len() || std::mem::replace(&mut hit[p], true) {
                return Err(Error::NotScattered(format!(
                    "column {p} holds zero or several nonzeros"
                )));
            }
        }
        Ok(Self { perm, neg })
    }

    pub fn identity(order: usize) -> Self {
        Self {
            perm: (0..order).collect(),
            neg: vec![false; order],
        }
    }

    /// Read a dense `{-1, 0, 1}` grid; anything but one `±1` per row and column
    /// is `NotScattered`.
    pub fn from_dense(rows: &[Vec<i8>]) -> Result<Self> {
        let n = rows.len();
        let mut perm = Vec::with_capacity(n);
        let mut neg = Vec::with_capacity(n);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::NotScattered(format!("row {r} has {} cells", row.len())));
            }
            let nz: Vec<(usize, i8)> = row
                .iter()
                .copied()
                .enumerate()
                .filter(|&(_, v)| v != 0)
                .collect();
            match nz.as_slice() {
                [(c, v)] if v.abs() == 1 => {
                    perm.push(*c);
                    neg.push(*v < 0);
                }
                _ => {
                    return Err(Error::NotScattered(format!(
                        "row {r} is not a single +-1"
                    )))
                }
            }
        }
        Self::new(perm, neg)
    }

    pub fn to_dense(&self) -> Vec<Vec<i8>> {
        let n = self.order();
        (0..n)
            .map(|r| {
                let mut row = vec![0i8; n];
                row[self.perm[r]] = if self.neg[r] { -1 } else { 1 };
                row
            })
            .collect()
    }

    pub fn order(&self) -> usize {
        self.perm.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn neg(&self) -> &[bool] {
        &self.neg
    }

    pub fn negated(&self) -> Self {
        Self {
            perm: self.perm.clone(),
            neg: self.neg.iter().map(|b| !b).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        let n = self.order();
        let mut perm = vec![0; n];
        let mut neg = vec![false; n];
        for i in 0..n {
            perm[self.perm[i]] = i;
            neg[self.perm[i]] = self.neg[i];
        }
        Self { perm, neg }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p) && self.neg.iter().all(|b| !b)
    }

    pub fn has_fixed_point(&self) -> bool {
        self.perm.iter().enumerate().any(|(i, &p)| i == p)
    }

    pub fn apply<T: Negate>(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.order() {
            return Err(Error::DimensionMismatch {
                expected: self.order(),
                found: v.len(),
            });
        }
        Ok(self
            .perm
            .iter()
            .zip(&self.neg)
            .map(|(&p, &n)| if n { v[p].negate() } else { v[p].clone() })
            .collect())
    }

    /// Conjugate `P X P^T` by the row permutation sending row `i` to `pi[i]`.
    pub fn conjugate(&self, pi: &[usize]) -> Result<Self> {
        crate::matrix::check_permutation(pi, self.order())?;
        let n = self.order();
        let mut perm = vec![0; n];
        let mut neg = vec![false; n];
        for i in 0..n {
            perm[pi[i]] = pi[self.perm[i]];
            neg[pi[i]] = self.neg[i];
        }
        Ok(Self { perm, neg })
    }
}

/// Exact product `a * b` of two scattered matrices.
pub fn compose(a: &SignedPermutation, b: &SignedPermutation) -> Result<SignedPermutation> {
    if a.order() != b.order() {
        return Err(Error::DimensionMismatch {
            expected: a.order(),
            found: b.order(),
        });
    }
    // (a b v)[i] = s_a[i] * (b v)[pa[i]] = s_a[i] s_b[pa[i]] v[pb[pa[i]]]
    let perm = a.perm.iter().map(|&p| b.perm[p]).collect();
    let neg = a
        .perm
        .iter()
        .zip(&a.neg)
        .map(|(&p, &n)| n ^ b.neg[p])
        .collect();
    Ok(SignedPermutation { perm, neg })
}

/// Signed matching operator test: `X^T == -X` (which forces a zero diagonal).
pub fn is_matching_operator(x: &SignedPermutation) -> bool {
    x.transpose() == x.negated()
}

/// Semi-matching operator test: all entries `+1`, `X^T == X`, zero diagonal.
pub fn is_semi_matching_operator(x: &SignedPermutation) -> bool {
    x.neg.iter().all(|b| !b) && !x.has_fixed_point() && x.transpose() == *x
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OperatorKind {
    /// Exchange-and-negate; `M^2 = -I`.
    Signed,
    /// Exchange only; `M^2 = I`.
    Semi,
}

/// A fixed-point-free involutive (signed) permutation, built from a division.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatchingOperator {
    kind: OperatorKind,
    matrix: SignedPermutation,
}

impl MatchingOperator {
    /// Fully signed divisions give signed operators, fully unsigned ones
    /// semi-matching operators; a mixture is rejected.
    pub fn from_division(d: &Division) -> Result<Self> {
        let n = d.order();
        let mut perm = vec![0; n];
        let mut neg = vec![false; n];
        let kind = if d.is_fully_signed() {
            OperatorKind::Signed
        } else if d.is_unsigned() {
            OperatorKind::Semi
        } else {
            return Err(Error::InvalidDivision(
                "mixes signed and unsigned couples".into(),
            ));
        };
        for c in d.couples() {
            perm[c.lo] = c.hi;
            perm[c.hi] = c.lo;
            if let Some(v) = c.value {
                // value 1: new[hi] = -old[lo]; value 0: new[lo] = -old[hi]
                neg[c.hi] = v;
                neg[c.lo] = !v;
            }
        }
        Ok(Self {
            kind,
            matrix: SignedPermutation { perm, neg },
        })
    }

    /// Recognize a scattered matrix as an operator of either kind.
    pub fn from_scattered(x: SignedPermutation) -> Option<Self> {
        if is_matching_operator(&x) {
            Some(Self { kind: OperatorKind::Signed, matrix: x })
        } else if is_semi_matching_operator(&x) {
            Some(Self { kind: OperatorKind::Semi, matrix: x })
        } else {
            None
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.matrix.order()
    }

    pub fn matrix(&self) -> &SignedPermutation {
        &self.matrix
    }

    /// Row paired with `i`.
    pub fn partner(&self, i: usize) -> usize {
        self.matrix.perm[i]
    }

    pub fn division(&self) -> Division {
        let couples = (0..self.order())
            .filter(|&i| i < self.matrix.perm[i])
            .map(|lo| {
                let hi = self.matrix.perm[lo];
                match self.kind {
                    OperatorKind::Signed => Couple::new(lo, hi, self.matrix.neg[hi]),
                    OperatorKind::Semi => Couple::unknown(lo, hi),
                }
            })
            .collect();
        Division::new(couples, self.order()).expect("operator pairs form a division")
    }

    /// `-M`, again a matching operator for signed `M`.
    pub fn negated(&self) -> Option<Self> {
        Self::from_scattered(self.matrix.negated())
    }

    pub fn apply<T: Negate>(&self, v: &[T]) -> Result<Vec<T>> {
        self.matrix.apply(v)
    }
}

/// Build the operator of a division checked against `order`.
pub fn operator_from_division(d: &Division, order: usize) -> Result<MatchingOperator> {
    if d.order() != order {
        return Err(Error::DimensionMismatch {
            expected: order,
            found: d.order(),
        });
    }
    MatchingOperator::from_division(d)
}

/// `A` and `B` cooperate iff `B A` is again a matching operator of their kind.
pub fn cooperates(a: &MatchingOperator, b: &MatchingOperator) -> Result<bool> {
    if a.kind != b.kind {
        return Err(Error::KindMismatch);
    }
    let ba = compose(&b.matrix, &a.matrix)?;
    Ok(match a.kind {
        OperatorKind::Signed => is_matching_operator(&ba),
        OperatorKind::Semi => is_semi_matching_operator(&ba),
    })
}
