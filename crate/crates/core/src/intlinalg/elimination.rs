//! Sparse block elimination with unimodular pivots.
//!
//! A matrix is viewed as a grid of `b × b` blocks. Whenever some block is
//! invertible over `Z`, its row and column can be removed by a Schur
//! complement without changing either the kernel lattice (the pivot
//! coordinates are integral functions of the others) or the cokernel. What
//! is left when no unimodular block remains is a dense residual handed to
//! the Smith normal form. For the Fox matrices of Schreier presentations
//! almost every block row is consumed by pivots, so the residual is tiny.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Signed, Zero};

use super::{smith_divisors, smith_right, AbelianGroup, IntMatrix};

/// Block-sparse integer matrix with uniform square blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockSparseMatrix {
    block: usize,
    block_cols: usize,
    rows: Vec<BTreeMap<usize, IntMatrix>>,
}

impl BlockSparseMatrix {
    pub fn new(block: usize, block_rows: usize, block_cols: usize) -> Self {
        assert!(block > 0, "block size must be positive");
        BlockSparseMatrix {
            block,
            block_cols,
            rows: vec![BTreeMap::new(); block_rows],
        }
    }

    /// Scalar view of a dense matrix (block size 1).
    pub fn from_dense(a: &IntMatrix) -> Self {
        let mut m = Self::new(1, a.rows(), a.cols());
        for (i, j, v) in a.entries() {
            if !v.is_zero() {
                m.rows[i].insert(j, IntMatrix::from_fn(1, 1, |_, _| v.clone()));
            }
        }
        m
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn block_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn block_cols(&self) -> usize {
        self.block_cols
    }

    pub fn scalar_rows(&self) -> usize {
        self.rows.len() * self.block
    }

    pub fn scalar_cols(&self) -> usize {
        self.block_cols * self.block
    }

    /// Adds `m` into block `(i, j)`, dropping the block if it becomes zero.
    pub fn add_block(&mut self, i: usize, j: usize, m: &IntMatrix) {
        assert_eq!((m.rows(), m.cols()), (self.block, self.block));
        assert!(j < self.block_cols);
        let row = &mut self.rows[i];
        match row.get_mut(&j) {
            Some(b) => {
                b.add_assign_ref(m);
                if b.is_zero() {
                    row.remove(&j);
                }
            }
            None => {
                if !m.is_zero() {
                    row.insert(j, m.clone());
                }
            }
        }
    }

    /// Appends a block row and returns its index.
    pub fn push_row(&mut self, blocks: BTreeMap<usize, IntMatrix>) -> usize {
        let blocks = blocks.into_iter().filter(|(_, b)| !b.is_zero()).collect();
        self.rows.push(blocks);
        self.rows.len() - 1
    }

    pub fn block(&self, i: usize, j: usize) -> Option<&IntMatrix> {
        self.rows[i].get(&j)
    }

    pub fn row_blocks(&self, i: usize) -> &BTreeMap<usize, IntMatrix> {
        &self.rows[i]
    }

    pub fn nonzero_blocks(&self) -> usize {
        self.rows.iter().map(BTreeMap::len).sum()
    }

    pub fn to_dense(&self) -> IntMatrix {
        let b = self.block;
        let mut out = IntMatrix::zeros(self.scalar_rows(), self.scalar_cols());
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, blk) in row {
                out.set_block(i * b, j * b, blk);
            }
        }
        out
    }

    /// `self · x` for a dense `x` with `scalar_cols` rows.
    pub fn mul_dense(&self, x: &IntMatrix) -> IntMatrix {
        assert_eq!(x.rows(), self.scalar_cols());
        let b = self.block;
        let mut out = IntMatrix::zeros(self.scalar_rows(), x.cols());
        for (i, row) in self.rows.iter().enumerate() {
            for (&j, blk) in row {
                for r in 0..b {
                    for c in 0..b {
                        let a = blk.get(r, c);
                        if a.is_zero() {
                            continue;
                        }
                        for k in 0..x.cols() {
                            let v = x.get(j * b + c, k);
                            if !v.is_zero() {
                                *out.entry_mut(i * b + r, k) += a * v;
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
struct PivotRecord {
    col: usize,
    inverse: IntMatrix,
    /// The pivot row without its pivot block.
    rest: BTreeMap<usize, IntMatrix>,
}

/// Result of eliminating every unimodular block pivot.
#[derive(Clone, Debug)]
pub struct Elimination {
    block: usize,
    block_cols: usize,
    pivots: Vec<PivotRecord>,
    free_cols: Vec<usize>,
    residual: IntMatrix,
    residual_rows: usize,
    zero_rows: usize,
}

struct Entry {
    m: IntMatrix,
    unimodular: Option<bool>,
}

impl Entry {
    fn new(m: IntMatrix) -> Self {
        Entry {
            m,
            unimodular: None,
        }
    }

    fn is_unimodular(&mut self) -> bool {
        *self.unimodular.get_or_insert_with(|| {
            if self.m.rows() == 1 {
                self.m.get(0, 0).abs().is_one()
            } else {
                self.m.is_unimodular()
            }
        })
    }
}

/// Runs the unimodular-pivot Schur elimination.
pub fn eliminate(a: &BlockSparseMatrix) -> Elimination {
    let b = a.block;
    let mut rows: Vec<BTreeMap<usize, Entry>> = a
        .rows
        .iter()
        .map(|r| r.iter().map(|(&j, m)| (j, Entry::new(m.clone()))).collect())
        .collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); a.block_cols];
    for (i, r) in rows.iter().enumerate() {
        for &j in r.keys() {
            col_rows[j].insert(i);
        }
    }
    let mut active: BTreeSet<usize> = (0..rows.len()).filter(|&i| !rows[i].is_empty()).collect();
    let mut zero_rows = rows.len() - active.len();
    let mut pivoted = vec![false; a.block_cols];
    let mut pivots = Vec::new();

    loop {
        // Markowitz-style choice among unimodular blocks.
        let mut best: Option<(usize, usize, usize)> = None;
        'search: for &i in &active {
            let len = rows[i].len();
            for (&j, e) in rows[i].iter_mut() {
                let cost = (len - 1) * (col_rows[j].len() - 1);
                if best.is_some_and(|(c, _, _)| cost >= c) {
                    continue;
                }
                if e.is_unimodular() {
                    best = Some((cost, i, j));
                    if cost == 0 {
                        break 'search;
                    }
                }
            }
        }
        let Some((_, pi, pj)) = best else { break };

        active.remove(&pi);
        let mut prow = std::mem::take(&mut rows[pi]);
        for &k in prow.keys() {
            col_rows[k].remove(&pi);
        }
        let pivot = prow.remove(&pj).unwrap().m;
        let inverse = pivot.inverse_unimodular().expect("unimodular pivot");
        let rest: BTreeMap<usize, IntMatrix> = prow.into_iter().map(|(k, e)| (k, e.m)).collect();

        let targets: Vec<usize> = col_rows[pj].iter().copied().collect();
        for l in targets {
            let alj = rows[l].remove(&pj).unwrap().m;
            col_rows[pj].remove(&l);
            let factor = &alj * &inverse;
            for (&k, aik) in &rest {
                let delta = &factor * aik;
                match rows[l].get_mut(&k) {
                    Some(e) => {
                        e.m.sub_assign_ref(&delta);
                        e.unimodular = None;
                        if e.m.is_zero() {
                            rows[l].remove(&k);
                            col_rows[k].remove(&l);
                        }
                    }
                    None => {
                        rows[l].insert(k, Entry::new(-&delta));
                        col_rows[k].insert(l);
                    }
                }
            }
            if rows[l].is_empty() {
                active.remove(&l);
                zero_rows += 1;
            }
        }
        debug_assert!(col_rows[pj].is_empty());
        pivoted[pj] = true;
        pivots.push(PivotRecord {
            col: pj,
            inverse,
            rest,
        });
    }

    let free_cols: Vec<usize> = (0..a.block_cols).filter(|&j| !pivoted[j]).collect();
    let col_pos: BTreeMap<usize, usize> =
        free_cols.iter().enumerate().map(|(p, &j)| (j, p)).collect();
    let residual_rows = active.len();
    let mut residual = IntMatrix::zeros(residual_rows * b, free_cols.len() * b);
    for (ri, &i) in active.iter().enumerate() {
        for (j, e) in &rows[i] {
            residual.set_block(ri * b, col_pos[j] * b, &e.m);
        }
    }
    Elimination {
        block: b,
        block_cols: a.block_cols,
        pivots,
        free_cols,
        residual,
        residual_rows,
        zero_rows,
    }
}

impl Elimination {
    pub fn pivot_count(&self) -> usize {
        self.pivots.len()
    }

    /// Residual block rows left for the dense Smith form.
    pub fn residual_block_rows(&self) -> usize {
        self.residual_rows
    }

    pub fn free_block_cols(&self) -> &[usize] {
        &self.free_cols
    }

    /// Scalar rank of the eliminated matrix.
    pub fn rank(&self) -> usize {
        let r = smith_divisors(&self.residual)
            .iter()
            .filter(|d| !d.is_zero())
            .count();
        self.pivots.len() * self.block + r
    }

    /// `Z^rows / (column lattice)`.
    pub fn cokernel(&self) -> AbelianGroup {
        let d = smith_divisors(&self.residual);
        let rows = self.residual.rows();
        let rank = d.iter().filter(|x| !x.is_zero()).count();
        AbelianGroup::from_cyclic_orders(
            self.zero_rows * self.block + rows - rank,
            d.into_iter().filter(|x| !x.is_zero()),
        )
    }

    /// The integer kernel lattice.
    pub fn kernel(&self) -> KernelLattice {
        let b = self.block;
        let free_positions: Vec<usize> = self
            .free_cols
            .iter()
            .flat_map(|&j| (j * b)..(j * b + b))
            .collect();
        let nfree = free_positions.len();
        let (lattice, coords) = if self.residual.rows() == 0 {
            (IntMatrix::identity(nfree), IntMatrix::identity(nfree))
        } else {
            let (d, v, v_inv) = smith_right(&self.residual);
            let rank = d.iter().filter(|x| !x.is_zero()).count();
            let ker_idx: Vec<usize> = (rank..nfree).collect();
            let all_rows: Vec<usize> = (0..nfree).collect();
            (
                v.submatrix(&all_rows, &ker_idx),
                v_inv.submatrix(&ker_idx, &all_rows),
            )
        };
        KernelLattice {
            block: b,
            block_cols: self.block_cols,
            free_positions,
            lattice,
            coords,
            pivots: self.pivots.clone(),
        }
    }
}

/// Lattice basis of `ker A ∩ Z^n` together with a coordinate map.
///
/// A kernel vector is determined by its free coordinates; `coords` maps
/// those to coefficients with respect to the basis.
#[derive(Clone, Debug)]
pub struct KernelLattice {
    block: usize,
    block_cols: usize,
    free_positions: Vec<usize>,
    /// Basis in free coordinates (columns).
    lattice: IntMatrix,
    coords: IntMatrix,
    pivots: Vec<PivotRecord>,
}

impl KernelLattice {
    pub fn rank(&self) -> usize {
        self.lattice.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.block_cols * self.block
    }

    /// Coefficients of the columns of `x` (which must lie in the kernel)
    /// with respect to [`KernelLattice::basis`].
    pub fn coordinates(&self, x: &IntMatrix) -> IntMatrix {
        assert_eq!(x.rows(), self.ambient_dim());
        let all: Vec<usize> = (0..x.cols()).collect();
        let free = x.submatrix(&self.free_positions, &all);
        &self.coords * &free
    }

    /// Explicit basis in ambient coordinates (columns), obtained by back
    /// substitution through the pivot records.
    pub fn basis(&self) -> IntMatrix {
        let b = self.block;
        let n = self.ambient_dim();
        let k = self.rank();
        let mut out = IntMatrix::zeros(n, k);
        for (fi, &pos) in self.free_positions.iter().enumerate() {
            for c in 0..k {
                out.set(pos, c, self.lattice.get(fi, c).clone());
            }
        }
        let all: Vec<usize> = (0..k).collect();
        for p in self.pivots.iter().rev() {
            let mut acc = IntMatrix::zeros(b, k);
            for (&j, blk) in &p.rest {
                let rows: Vec<usize> = (j * b..j * b + b).collect();
                let xj = out.submatrix(&rows, &all);
                acc.add_assign_ref(&(blk * &xj));
            }
            let xp = -&(&p.inverse * &acc);
            out.set_block(p.col * b, 0, &xp);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::kernel_basis_snf;
    use num_bigint::BigInt;
    use proptest::prelude::*;

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=6, 1usize..=6).prop_flat_map(|(r, c)| {
            proptest::collection::vec(prop_oneof![3 => Just(0i64), 2 => -3i64..=3], r * c)
                .prop_map(move |v| IntMatrix::from_fn(r, c, |i, j| BigInt::from(v[i * c + j])))
        })
    }

    fn lattice_index(basis: &IntMatrix) -> Vec<BigInt> {
        smith_divisors(&basis.transpose())
    }

    #[test]
    fn unit_pivots_consume_everything() {
        let a = IntMatrix::from_rows(&[vec![1, 2, 0], vec![0, 1, 3]]);
        let e = eliminate(&BlockSparseMatrix::from_dense(&a));
        assert_eq!(e.pivot_count(), 2);
        assert_eq!(e.residual_block_rows(), 0);
        let k = e.kernel();
        assert_eq!(k.rank(), 1);
        let basis = k.basis();
        assert!((&a * &basis).is_zero());
        assert_eq!(e.cokernel(), AbelianGroup::trivial());
    }

    #[test]
    fn block_pivots() {
        // Two 2×2 blocks: [[S, T]] with S unimodular.
        let s = IntMatrix::from_rows(&[vec![2, 1], vec![1, 1]]);
        let t = IntMatrix::from_rows(&[vec![4, 0], vec![0, 6]]);
        let mut m = BlockSparseMatrix::new(2, 1, 2);
        m.add_block(0, 0, &s);
        m.add_block(0, 1, &t);
        let e = eliminate(&m);
        assert_eq!(e.pivot_count(), 1);
        let k = e.kernel();
        assert_eq!(k.rank(), 2);
        assert!(m.mul_dense(&k.basis()).is_zero());
    }

    proptest! {
        #[test]
        fn kernel_matches_snf_route(a in small_matrix()) {
            let e = eliminate(&BlockSparseMatrix::from_dense(&a));
            let k = e.kernel();
            let basis = k.basis();
            let reference = kernel_basis_snf(&a);
            prop_assert_eq!(basis.cols(), reference.cols());
            prop_assert!((&a * &basis).is_zero());
            // Both bases span saturated lattices of equal rank; the
            // coordinates of the reference basis must be unimodular.
            if basis.cols() > 0 {
                let c = k.coordinates(&reference);
                prop_assert_eq!(&basis * &c, reference.clone());
                prop_assert!(c.determinant().abs().is_one());
                prop_assert!(lattice_index(&basis).iter().all(|d| d.is_one()));
            }
        }

        #[test]
        fn cokernel_matches_snf(a in small_matrix()) {
            let e = eliminate(&BlockSparseMatrix::from_dense(&a));
            let d = smith_divisors(&a);
            let rank = d.iter().filter(|x| !x.is_zero()).count();
            let direct = AbelianGroup::from_cyclic_orders(
                a.rows() - rank,
                d.into_iter().filter(|x| !x.is_zero()),
            );
            prop_assert_eq!(e.cokernel(), direct);
            prop_assert_eq!(e.rank(), rank);
        }
    }
}
