//! Kernels, cokernels and cochain cohomology.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::elimination::{eliminate, BlockSparseMatrix, KernelLattice};
use super::{smith_right, AbelianGroup, IntMatrix};
use crate::error::{Error, Result};

/// `Z^rows / (column lattice of A)`.
pub fn cokernel_group(a: &IntMatrix) -> AbelianGroup {
    eliminate(&BlockSparseMatrix::from_dense(a)).cokernel()
}

/// Lattice basis (as columns) of the integer kernel of `A`.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    eliminate(&BlockSparseMatrix::from_dense(a))
        .kernel()
        .basis()
}

/// Integer kernel read off directly from the Smith transform: the columns
/// of `V` belonging to zero divisors.
pub fn kernel_basis_snf(a: &IntMatrix) -> IntMatrix {
    let (d, v, _) = smith_right(a);
    let rank = d.iter().filter(|x| !x.is_zero()).count();
    let rows: Vec<usize> = (0..a.cols()).collect();
    let cols: Vec<usize> = (rank..a.cols()).collect();
    v.submatrix(&rows, &cols)
}

/// `ker(d_out) / im(d_in)`.
///
/// The image is rewritten in coordinates of a lattice basis of the kernel
/// and the cokernel of the resulting matrix is returned.
pub fn cochain_cohomology(d_in: &IntMatrix, d_out: &IntMatrix) -> Result<AbelianGroup> {
    if d_out.cols() != d_in.rows() {
        return Err(Error::DimensionMismatch(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.cols(),
            d_in.rows()
        )));
    }
    if !(d_out * d_in).is_zero() {
        return Err(Error::CompositionNonzero);
    }
    let kernel = eliminate(&BlockSparseMatrix::from_dense(d_out)).kernel();
    Ok(cokernel_group(&kernel.coordinates(d_in)))
}

/// Block-sparse variant of [`cochain_cohomology`]; also hands back the
/// kernel lattice of `d_out` for reuse.
pub fn cochain_cohomology_blocks(
    d_in: &IntMatrix,
    d_out: &BlockSparseMatrix,
) -> Result<(AbelianGroup, KernelLattice)> {
    if d_out.scalar_cols() != d_in.rows() {
        return Err(Error::DimensionMismatch(format!(
            "d_out has {} columns but d_in has {} rows",
            d_out.scalar_cols(),
            d_in.rows()
        )));
    }
    if !d_out.mul_dense(d_in).is_zero() {
        return Err(Error::CompositionNonzero);
    }
    let kernel = eliminate(d_out).kernel();
    let h = cokernel_group(&kernel.coordinates(d_in));
    Ok((h, kernel))
}

/// Solutions of `A·v ≡ 0 (mod q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModKernel {
    pub modulus: u64,
    /// Canonical generators: the rows of the Howell form of the solution
    /// module, entries in `[0, q)`.
    pub generators: Vec<Vec<u64>>,
    /// Isomorphism type of the solution module.
    pub group: AbelianGroup,
}

impl ModKernel {
    /// Number of solutions, `q^cols / [Z^cols : lattice]` in lattice terms.
    pub fn solution_count(&self) -> BigInt {
        self.group.torsion_order()
    }

    /// Membership test for a vector reduced modulo `q`.
    pub fn contains(&self, v: &[u64]) -> bool {
        let q = self.modulus;
        let mut v: Vec<u64> = v.iter().map(|x| x % q).collect();
        for g in &self.generators {
            let Some(j) = g.iter().position(|&x| x != 0) else {
                continue;
            };
            if !v[j].is_multiple_of(g[j]) {
                return false;
            }
            let f = v[j] / g[j];
            for (a, b) in v.iter_mut().zip(g) {
                *a = (*a + q - (f * b) % q) % q;
            }
        }
        v.iter().all(|&x| x == 0)
    }
}

/// Generating set of `{v : A·v ≡ 0 (mod q)}` via the Smith transform.
pub fn kernel_mod(a: &IntMatrix, q: u64) -> Result<ModKernel> {
    if q < 2 {
        return Err(Error::ModulusTooSmall(q));
    }
    let bq = BigInt::from(q);
    let (d, v, _) = smith_right(&a.reduce_mod(&bq));
    let mut gens = Vec::new();
    let mut orders = Vec::new();
    for i in 0..a.cols() {
        let di = d.get(i).cloned().unwrap_or_else(BigInt::zero);
        let g = di.gcd(&bq);
        if g == BigInt::from(1) {
            continue;
        }
        let scale = &bq / &g;
        let col: Vec<u64> = (0..a.cols())
            .map(|r| (v.get(r, i) * &scale).mod_floor(&bq).to_u64().unwrap())
            .collect();
        gens.push(col);
        orders.push(g);
    }
    let generators = howell_form(gens, q);
    let group = AbelianGroup::from_cyclic_orders(0, orders);
    debug_assert_eq!(
        howell_order(&generators, q),
        group.torsion_order(),
        "Howell form and Smith form disagree on the kernel size"
    );
    Ok(ModKernel {
        modulus: q,
        generators,
        group,
    })
}

fn howell_order(rows: &[Vec<u64>], q: u64) -> BigInt {
    rows.iter()
        .filter_map(|r| r.iter().find(|&&x| x != 0))
        .map(|&p| BigInt::from(q / p))
        .product()
}

fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

fn unit_normaliser(a: u64, q: u64) -> u64 {
    let g = a.gcd(&q);
    let (a1, q1) = ((a / g) as i128, (q / g) as i128);
    let w0 = if q1 == 1 {
        1
    } else {
        let (_, x, _) = ext_gcd(a1, q1);
        x.rem_euclid(q1)
    } as u64;
    let q1 = q1 as u64;
    (0..).map(|k| w0 + k * q1).find(|w| w.gcd(&q) == 1).unwrap() % q
}

/// Howell normal form of the submodule of `(Z/q)^n` spanned by `rows`.
///
/// Rows are returned in echelon order with pivots dividing `q` and the
/// entries above each pivot reduced into `[0, pivot)`. The form is unique,
/// so two generating sets span the same module iff their forms agree.
pub fn howell_form(rows: Vec<Vec<u64>>, q: u64) -> Vec<Vec<u64>> {
    let Some(n) = rows.first().map(Vec::len) else {
        return Vec::new();
    };
    let qq = q as i128;
    let mut pool: Vec<Vec<u64>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(|x| x % q).collect::<Vec<_>>())
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut result: Vec<Vec<u64>> = Vec::new();
    let combine = |s: i128, x: &[u64], t: i128, y: &[u64]| -> Vec<u64> {
        x.iter()
            .zip(y)
            .map(|(&a, &b)| (s * a as i128 + t * b as i128).rem_euclid(qq) as u64)
            .collect()
    };
    for j in 0..n {
        let mut pivot: Option<Vec<u64>> = None;
        let mut rest = Vec::new();
        for r in pool {
            if r[j] == 0 {
                rest.push(r);
                continue;
            }
            pivot = Some(match pivot {
                None => r,
                Some(p) => {
                    let (a, b) = (p[j] as i128, r[j] as i128);
                    let (g, s, t) = ext_gcd(a, b);
                    let new_p = combine(s, &p, t, &r);
                    let new_r = combine(-b / g, &p, a / g, &r);
                    if new_r.iter().any(|&x| x != 0) {
                        rest.push(new_r);
                    }
                    new_p
                }
            });
        }
        if let Some(p) = pivot {
            let w = unit_normaliser(p[j], q) as i128;
            let p = combine(w, &p, 0, &p);
            let pj = p[j];
            let annihilated = combine((q / pj) as i128, &p, 0, &p);
            if annihilated.iter().any(|&x| x != 0) {
                rest.push(annihilated);
            }
            for r in result.iter_mut() {
                let f = (r[j] / pj) as i128;
                if f != 0 {
                    *r = combine(1, r, -f, &p);
                }
            }
            result.push(p);
        }
        pool = rest;
    }
    result
}
