//! The ordered type, generator sets, mapping tables and simplification.
//!
//! A semi-orthogonal matrix of order `N = 2^n` carries `N - 1` column
//! operators that form, with the identity, an Abelian group of fixed-point
//! free involutions. The ordered type is the unique layout where column `c`
//! holds `a_{r XOR c}` in row `r`; every semi-orthogonal matrix reaches it by
//! a row permutation `E` and a column permutation `F`.

use std::collections::HashSet;
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{validate_semi_orthogonal, SymbolicMatrix};
use crate::operator::{cooperates, MatchingOperator, OperatorKind, SignedPermutation};
use crate::solver::{compute_divisions, find_solution};

/// Semi matrix with index `r XOR c` at row `r`, column `c`.
pub fn generate_ordered_type(n: u32) -> SymbolicMatrix {
    assert!(n >= 1, "ordered type needs at least one qubit");
    let order = 1usize << n;
    let rows: Vec<Vec<usize>> = (0..order)
        .map(|r| (0..order).map(|c| r ^ c).collect())
        .collect();
    SymbolicMatrix::semi(&rows).expect("xor layout is a semi matrix")
}

/// Semi-matching operators of columns `1..N`, taken against column 0.
pub fn column_operators(m: &SymbolicMatrix) -> Result<Vec<MatchingOperator>> {
    let table = compute_divisions(&m.erase_signs())?;
    table
        .divisions()
        .iter()
        .map(MatchingOperator::from_division)
        .collect()
}

/// True if, after renaming column 0's indices to `0..N` in row order, every
/// cell `(r, c)` holds `r XOR c`.
pub fn has_ordered_pattern(m: &SymbolicMatrix) -> bool {
    let n = m.order();
    let mut rename = vec![usize::MAX; n];
    for r in 0..n {
        rename[m.entry(r, 0).index] = r;
    }
    (0..n).all(|r| (0..n).all(|c| rename[m.entry(r, c).index] == r ^ c))
}

/// `n` independent, pairwise semi-cooperative semi-matching operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneratorSet {
    order: usize,
    ops: Vec<MatchingOperator>,
}

impl GeneratorSet {
    pub fn new(ops: Vec<MatchingOperator>) -> Result<Self> {
        let Some(first) = ops.first() else {
            return Err(Error::NotGeneratorSet(0));
        };
        let order = first.order();
        if !order.is_power_of_two() || order < 2 {
            return Err(Error::DimensionMismatch {
                expected: order.next_power_of_two(),
                found: order,
            });
        }
        let qubits = order.trailing_zeros() as usize;
        if ops.len() != qubits {
            return Err(Error::DimensionMismatch {
                expected: qubits,
                found: ops.len(),
            });
        }
        for op in &ops {
            if op.order() != order {
                return Err(Error::DimensionMismatch {
                    expected: order,
                    found: op.order(),
                });
            }
            if op.kind() != OperatorKind::Semi {
                return Err(Error::KindMismatch);
            }
        }
        for a in 0..ops.len() {
            for b in a + 1..ops.len() {
                if !cooperates(&ops[a], &ops[b])? {
                    return Err(Error::NotCooperative(a, b));
                }
            }
        }
        let mut group: HashSet<Vec<usize>> = HashSet::new();
        group.insert((0..order).collect());
        for (i, op) in ops.iter().enumerate() {
            if group.contains(op.matrix().perm()) {
                return Err(Error::NotGeneratorSet(i));
            }
            let extended: Vec<Vec<usize>> = group
                .iter()
                .map(|g| g.iter().map(|&x| op.partner(x)).collect())
                .collect();
            for g in extended {
                if (0..order).any(|x| g[x] == x) {
                    return Err(Error::NotGeneratorSet(i));
                }
                group.insert(g);
            }
        }
        Ok(Self { order, ops })
    }

    /// `M_1, M_2, M_4, ...` of the ordered type: `M_c(i) = i XOR c`.
    pub fn canonical(n: u32) -> Self {
        let order = 1usize << n;
        let ops = (0..n)
            .map(|k| xor_operator(order, 1 << k))
            .collect();
        Self::new(ops).expect("xor generators are valid")
    }

    /// `pi M pi^-1` for every generator.
    pub fn conjugate(&self, pi: &[usize]) -> Result<Self> {
        let ops = self
            .ops
            .iter()
            .map(|op| {
                let x = op.matrix().conjugate(pi)?;
                MatchingOperator::from_scattered(x)
                    .ok_or_else(|| Error::InvalidMatrix("conjugate is not an operator".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(ops)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn ops(&self) -> &[MatchingOperator] {
        &self.ops
    }

    /// Group element for a subset of generators: bit `k` of `mask` selects
    /// generator `k`, applied as a row map.
    pub fn element(&self, mask: usize) -> Vec<usize> {
        (0..self.order)
            .map(|mut x| {
                for (k, op) in self.ops.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        x = op.partner(x);
                    }
                }
                x
            })
            .collect()
    }
}

fn xor_operator(order: usize, c: usize) -> MatchingOperator {
    let perm = (0..order).map(|i| i ^ c).collect();
    let x = SignedPermutation::new(perm, vec![false; order]).expect("xor is a permutation");
    MatchingOperator::from_scattered(x).expect("xor by nonzero c is a semi-matching operator")
}

/// A permutation `t` of `[N]`; position `p` holds row `t[p]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MappingTable {
    t: Vec<usize>,
}

impl MappingTable {
    pub fn new(t: Vec<usize>) -> Result<Self> {
        crate::matrix::check_permutation(&t, t.len())?;
        Ok(Self { t })
    }

    pub fn identity(order: usize) -> Self {
        Self {
            t: (0..order).collect(),
        }
    }

    pub fn entries(&self) -> &[usize] {
        &self.t
    }

    pub fn into_entries(self) -> Vec<usize> {
        self.t
    }

    /// Generator `m` (0-based) sends the row at position `p` to the row at
    /// position `p XOR 2^m`, for every generator and position.
    pub fn is_ordered_for(&self, g: &GeneratorSet) -> bool {
        self.t.len() == g.order()
            && g.ops().iter().enumerate().all(|(m, op)| {
                (0..self.t.len()).all(|p| op.partner(self.t[p]) == self.t[p ^ (1 << m)])
            })
    }
}

/// Reorder `[N]` level by level until every generator pairs aligned blocks
/// leftmost-to-leftmost.
///
/// At level `m` the aligned blocks of size `2^(m-1)` are orbits of the first
/// `m - 1` generators. They are first regrouped so each block sits next to
/// its image under generator `m`; the second block of each pair is then
/// relabeled by half-swaps until the image of the first block's leftmost row
/// is its leftmost row.
pub fn order_mapping_table(g: &GeneratorSet) -> Result<MappingTable> {
    let n = g.order();
    let mut t: Vec<usize> = (0..n).collect();
    let mut pos: Vec<usize> = (0..n).collect();
    for (level, op) in g.ops().iter().enumerate() {
        let half = 1usize << level;
        let blocks = n / half;
        // pair up blocks
        let mut placed = vec![false; blocks];
        let mut next = Vec::with_capacity(n);
        for b in 0..blocks {
            if placed[b] {
                continue;
            }
            let partner = pos[op.partner(t[b * half])] / half;
            if partner == b || placed[partner] {
                return Err(Error::NotGeneratorSet(level));
            }
            placed[b] = true;
            placed[partner] = true;
            next.extend_from_slice(&t[b * half..(b + 1) * half]);
            next.extend_from_slice(&t[partner * half..(partner + 1) * half]);
        }
        t = next;
        refresh(&t, &mut pos);
        // align leftmost elements
        for x in (0..n).step_by(2 * half) {
            let j = op.partner(t[x]);
            let right = x + half;
            let mut k = half;
            while k > 1 {
                let h = k / 2;
                let offset = pos[j] - right;
                if offset & h != 0 {
                    for y in (right..right + half).step_by(k) {
                        for q in 0..h {
                            t.swap(y + q, y + h + q);
                        }
                    }
                    refresh(&t, &mut pos);
                }
                k = h;
            }
            if t[right] != j {
                return Err(Error::NotGeneratorSet(level));
            }
        }
    }
    let table = MappingTable { t };
    if !table.is_ordered_for(g) {
        return Err(Error::NotGeneratorSet(g.ops().len() - 1));
    }
    Ok(table)
}

fn refresh(t: &[usize], pos: &mut [usize]) {
    for (p, &x) in t.iter().enumerate() {
        pos[x] = p;
    }
}

/// Row permutation `row_perm` (new row `r` is old row `row_perm[r]`) and
/// column permutation `col_perm` (new column `c` is old column
/// `col_perm[c]`) carrying a semi-orthogonal matrix to the ordered type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Simplification {
    pub row_perm: Vec<usize>,
    pub col_perm: Vec<usize>,
    pub generators: Vec<usize>,
    pub table: MappingTable,
}

impl Simplification {
    /// `E m F`.
    pub fn apply(&self, m: &SymbolicMatrix) -> Result<SymbolicMatrix> {
        m.permute_rows(&self.row_perm)?
            .permute_columns(&self.col_perm)
    }
}

/// Find `E`, `F` with `E m F` equal to the ordered type up to renaming the
/// parameters of column 0.
///
/// Generators are chosen greedily: the operator pairing row 0 with the
/// smallest row `j` whose operator is not yet in the generated subgroup.
pub fn simplify_to_ordered(m: &SymbolicMatrix) -> Result<Simplification> {
    if !validate_semi_orthogonal(m)? {
        return Err(Error::NotSemiOrthogonal(
            "some column pair is not an exchange of 2-tuples".into(),
        ));
    }
    let n = m.order();
    let ops = column_operators(m)?;
    // column (1-based) whose operator pairs row 0 with row j
    let mut column_of = vec![0; n];
    for (c, op) in ops.iter().enumerate() {
        column_of[op.partner(0)] = c + 1;
    }
    let mut group: HashSet<Vec<usize>> = HashSet::new();
    group.insert((0..n).collect());
    let mut generators = Vec::new();
    let mut chosen = Vec::new();
    for j in 1..n {
        let op = &ops[column_of[j] - 1];
        if group.contains(op.matrix().perm()) {
            continue;
        }
        let extended: Vec<Vec<usize>> = group
            .iter()
            .map(|g| g.iter().map(|&x| op.partner(x)).collect())
            .collect();
        group.extend(extended);
        generators.push(column_of[j]);
        chosen.push(op.clone());
    }
    let set = GeneratorSet::new(chosen)?;
    let table = order_mapping_table(&set)?;
    let t = table.entries();
    let col_perm = (0..n)
        .map(|c| if c == 0 { 0 } else { column_of[t[c]] })
        .collect();
    Ok(Simplification {
        row_perm: t.to_vec(),
        col_perm,
        generators,
        table,
    })
}

/// Verdict on the existence of an `N = 2^n` special orthogonal matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Feasibility {
    pub qubits: u32,
    pub feasible: bool,
    pub witness: Option<SymbolicMatrix>,
    pub basis: FeasibilityBasis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FeasibilityBasis {
    /// The ordered type's system was eliminated directly.
    Solved { rank_full: usize, rank_coeff: usize },
    /// The upper-left `2^anchor` block of any solution would solve the
    /// smaller ordered type, which has none.
    NestedBlock { anchor: u32 },
}

/// Largest `n` solved directly; beyond it the verdict follows from nesting.
pub const DIRECT_LIMIT: u32 = 4;

static ANCHOR: OnceLock<Feasibility> = OnceLock::new();

pub fn feasibility(n: u32) -> Feasibility {
    assert!(n >= 1, "feasibility needs at least one qubit");
    if n == DIRECT_LIMIT {
        return ANCHOR.get_or_init(|| solve_ordered(n)).clone();
    }
    if n < DIRECT_LIMIT {
        return solve_ordered(n);
    }
    let anchor = feasibility(DIRECT_LIMIT);
    assert!(!anchor.feasible, "nesting shortcut needs an infeasible anchor");
    Feasibility {
        qubits: n,
        feasible: false,
        witness: None,
        basis: FeasibilityBasis::NestedBlock {
            anchor: DIRECT_LIMIT,
        },
    }
}

fn solve_ordered(n: u32) -> Feasibility {
    let out = find_solution(&generate_ordered_type(n)).expect("ordered type is semi-orthogonal");
    Feasibility {
        qubits: n,
        feasible: out.found,
        basis: FeasibilityBasis::Solved {
            rank_full: out.rank_full(),
            rank_coeff: out.rank_coeff(),
        },
        witness: out.matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::parse_text;
    use crate::matrix::validate_special_orthogonal;
    use crate::operator::{compose, Couple, Division};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const S4: &str = "a0 a1 a2 a3
a1 a0 a3 a2
a2 a3 a0 a1
a3 a2 a1 a0";

    const S8: &str = "a0 a1 a2 a3 a4 a5 a6 a7
a1 a0 a3 a2 a5 a4 a7 a6
a2 a3 a0 a1 a6 a7 a4 a5
a3 a2 a1 a0 a7 a6 a5 a4
a4 a5 a6 a7 a0 a1 a2 a3
a5 a4 a7 a6 a1 a0 a3 a2
a6 a7 a4 a5 a2 a3 a0 a1
a7 a6 a5 a4 a3 a2 a1 a0";

    fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    }

    #[test]
    fn ordered_type_matches_reference_layouts() {
        assert_eq!(generate_ordered_type(2), parse_text(S4).unwrap());
        assert_eq!(generate_ordered_type(3), parse_text(S8).unwrap());
        assert_eq!(generate_ordered_type(1), parse_text("a0 a1\na1 a0").unwrap());
    }

    #[test]
    fn ordered_type_nests() {
        let big = generate_ordered_type(4);
        for m in 1..=4 {
            assert_eq!(big.upper_left_block(1 << m).unwrap(), generate_ordered_type(m));
        }
    }

    #[test]
    fn canonical_table_is_identity() {
        for n in 1..=4 {
            let g = GeneratorSet::canonical(n);
            let t = order_mapping_table(&g).unwrap();
            assert_eq!(t, MappingTable::identity(1 << n));
        }
    }

    #[test]
    fn conjugated_generators_get_ordered_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 1..=5 {
            for _ in 0..20 {
                let pi = shuffled(1 << n, &mut rng);
                let g = GeneratorSet::canonical(n).conjugate(&pi).unwrap();
                let t = order_mapping_table(&g).unwrap();
                assert!(t.is_ordered_for(&g));
                assert_eq!(t.entries()[0], 0);
            }
        }
    }

    #[test]
    fn shared_couple_is_not_cooperative() {
        let d = |c| Division::new(c, 4).unwrap();
        let a = MatchingOperator::from_division(&d(vec![
            Couple::unknown(0, 1),
            Couple::unknown(2, 3),
        ]))
        .unwrap();
        let b = MatchingOperator::from_division(&d(vec![
            Couple::unknown(0, 1),
            Couple::unknown(2, 3),
        ]))
        .unwrap();
        assert_eq!(GeneratorSet::new(vec![a, b]).unwrap_err(), Error::NotCooperative(0, 1));
    }

    #[test]
    fn dependent_generators_rejected() {
        let g = GeneratorSet::canonical(3);
        let mut ops = g.ops().to_vec();
        let m3 = compose(ops[0].matrix(), ops[1].matrix()).unwrap();
        ops[2] = MatchingOperator::from_scattered(m3).unwrap();
        assert_eq!(GeneratorSet::new(ops).unwrap_err(), Error::NotGeneratorSet(2));
    }

    #[test]
    fn xor_group_law() {
        let ops = column_operators(&generate_ordered_type(3)).unwrap();
        for a in 1..8 {
            for b in 1..8 {
                let ab = compose(ops[a - 1].matrix(), ops[b - 1].matrix()).unwrap();
                if a == b {
                    assert!(ab.is_identity());
                } else {
                    assert_eq!(&ab, ops[(a ^ b) - 1].matrix());
                }
            }
        }
    }

    #[test]
    fn ordered_input_simplifies_to_identity() {
        for n in 1..=4 {
            let s = simplify_to_ordered(&generate_ordered_type(n)).unwrap();
            let id: Vec<usize> = (0..1 << n).collect();
            assert_eq!(s.row_perm, id);
            assert_eq!(s.col_perm, id);
        }
    }

    #[test]
    fn scrambled_ordered_types_recover_pattern() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            let base = generate_ordered_type(n);
            for _ in 0..25 {
                let rows = shuffled(1 << n, &mut rng);
                let cols = shuffled(1 << n, &mut rng);
                let m = base.permute_rows(&rows).unwrap().permute_columns(&cols).unwrap();
                let s = simplify_to_ordered(&m).unwrap();
                assert!(has_ordered_pattern(&s.apply(&m).unwrap()));
            }
        }
    }

    #[test]
    fn rotated_columns() {
        let base = generate_ordered_type(3);
        let rot: Vec<usize> = (0..8).map(|c| (c + 1) % 8).collect();
        let m = base.permute_columns(&rot).unwrap();
        let s = simplify_to_ordered(&m).unwrap();
        assert!(has_ordered_pattern(&s.apply(&m).unwrap()));
        assert_eq!(s.row_perm[0], 0);
    }

    #[test]
    fn identity_rows_rotated_columns() {
        // keep column 0 in place and rotate the others: E stays the identity
        let base = generate_ordered_type(3);
        let rot: Vec<usize> = std::iter::once(0).chain((1..8).map(|c| c % 7 + 1)).collect();
        let m = base.permute_columns(&rot).unwrap();
        let s = simplify_to_ordered(&m).unwrap();
        assert_eq!(s.row_perm, (0..8).collect::<Vec<_>>());
        let mut inverse = vec![0; 8];
        for (c, &r) in rot.iter().enumerate() {
            inverse[r] = c;
        }
        assert_eq!(s.col_perm, inverse);
    }

    #[test]
    fn solution_transport() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let base = generate_ordered_type(3);
        let rows = shuffled(8, &mut rng);
        let m = base.permute_rows(&rows).unwrap();
        let sol = find_solution(&m).unwrap().matrix.unwrap();
        let s = simplify_to_ordered(&m).unwrap();
        let moved = s.apply(&sol).unwrap();
        assert!(validate_special_orthogonal(&moved).unwrap());
        assert!(has_ordered_pattern(&moved));
    }

    #[test]
    fn feasibility_verdicts() {
        for n in 1..=3 {
            let f = feasibility(n);
            assert!(f.feasible);
            assert!(validate_special_orthogonal(f.witness.as_ref().unwrap()).unwrap());
        }
        let f = feasibility(4);
        assert!(!f.feasible);
        match f.basis {
            FeasibilityBasis::Solved { rank_full, rank_coeff } => assert!(rank_full > rank_coeff),
            other => panic!("unexpected basis {other:?}"),
        }
        let f = feasibility(6);
        assert!(!f.feasible);
        assert_eq!(f.basis, FeasibilityBasis::NestedBlock { anchor: 4 });
    }
}
