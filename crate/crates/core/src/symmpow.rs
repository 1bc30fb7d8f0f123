//! The action of `SL(2,Z)` on `M_n`, the degree-`n` homogeneous part of
//! `Z[x,y]`, in the monomial basis `xⁿ, xⁿ⁻¹y, …, yⁿ`.
//!
//! `g = [[a,b],[c,d]]` acts by `f(x,y) ↦ f(ax+cy, bx+dy)`. This reproduces
//! `s₁: x ↦ x−y` and `s₂: y ↦ x+y` and makes `g ↦ ρ(g)` a homomorphism.

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_traits::{One, Zero};

use crate::error::Result;
use crate::intlinalg::{
    eliminate, kernel_mod, AbelianGroup, BlockSparseMatrix, IntMatrix, ModKernel,
};
use crate::sl2::Mat2Z;

/// The matrix of a group element on `M_n`, over `Z` (`modulus = 0`) or
/// reduced into `[0, q)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepMatrix {
    pub n: usize,
    pub modulus: u64,
    pub matrix: IntMatrix,
}

/// Coefficients of `(u x + v y)^e` in the basis `x^e, …, y^e`.
fn linear_power(u: &BigInt, v: &BigInt, e: usize) -> Vec<BigInt> {
    let mut up = vec![BigInt::one(); e + 1];
    let mut vp = vec![BigInt::one(); e + 1];
    for i in 1..=e {
        up[i] = &up[i - 1] * u;
        vp[i] = &vp[i - 1] * v;
    }
    (0..=e)
        .map(|j| binomial(BigInt::from(e), BigInt::from(j)) * &up[e - j] * &vp[j])
        .collect()
}

fn poly_mul(f: &[BigInt], g: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); f.len() + g.len() - 1];
    for (i, a) in f.iter().enumerate() {
        if a.is_zero() {
            continue;
        }
        for (j, b) in g.iter().enumerate() {
            out[i + j] += a * b;
        }
    }
    out
}

/// Integral matrix of `g` on `M_n`.
pub fn rho(g: &Mat2Z, n: usize) -> IntMatrix {
    let [a, b, c, d] = g.entries();
    let mut out = IntMatrix::zeros(n + 1, n + 1);
    for k in 0..=n {
        // Column k is the image of x^{n-k} y^k.
        let col = poly_mul(&linear_power(a, c, n - k), &linear_power(b, d, k));
        for (i, v) in col.into_iter().enumerate() {
            out.set(i, k, v);
        }
    }
    out
}

pub fn rep_matrix(g: &Mat2Z, n: usize, modulus: u64) -> RepMatrix {
    let mut matrix = rho(g, n);
    if modulus != 0 {
        matrix = matrix.reduce_mod(&BigInt::from(modulus));
    }
    RepMatrix { n, modulus, matrix }
}

/// The stacked matrix `[ρ(g₁)−I; ρ(g₂)−I; …]`, shape `(k(n+1)) × (n+1)`.
pub fn stacked_fixed_point_matrix(gens: &[Mat2Z], n: usize) -> IntMatrix {
    let blocks: Vec<IntMatrix> = gens.iter().map(|g| rho(g, n).minus_identity()).collect();
    if blocks.is_empty() {
        return IntMatrix::zeros(0, n + 1);
    }
    IntMatrix::vstack(&blocks.iter().collect::<Vec<_>>())
}

/// `(M_n ⊗ Z/q)^G` for the group generated by `gens`.
pub fn invariant_submodule(gens: &[Mat2Z], n: usize, q: u64) -> Result<ModKernel> {
    kernel_mod(&stacked_fixed_point_matrix(gens, n), q)
}

/// `M_n^G` over `Z`, a free group.
pub fn integral_invariants(gens: &[Mat2Z], n: usize) -> AbelianGroup {
    let a = stacked_fixed_point_matrix(gens, n);
    let rank = eliminate(&BlockSparseMatrix::from_dense(&a)).rank();
    AbelianGroup::free(n + 1 - rank)
}

/// Evaluates a polynomial vector at integer `(x, y)`; used for sanity checks.
pub fn evaluate(poly: &[BigInt], x: &BigInt, y: &BigInt) -> BigInt {
    let n = poly.len() - 1;
    poly.iter()
        .enumerate()
        .map(|(k, c)| c * num_traits::pow(x.clone(), n - k) * num_traits::pow(y.clone(), k))
        .sum()
}

/// `ρ(-I)` is `(-1)^n`.
pub fn central_sign(n: usize) -> i64 {
    if n.is_odd() {
        -1
    } else {
        1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::{Letter, Word};
    use num_traits::Signed;
    use proptest::prelude::*;

    fn w(s: &str) -> Mat2Z {
        s.parse::<Word>().unwrap().eval()
    }

    fn v(xs: &[i64]) -> Vec<BigInt> {
        xs.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_examples() {
        assert_eq!(rho(&Mat2Z::identity(), 4), IntMatrix::identity(5));
        assert_eq!(
            rho(&w("b"), 1),
            IntMatrix::from_rows(&[vec![1, 1], vec![0, 1]])
        );
        assert_eq!(
            rho(&w("a"), 1),
            IntMatrix::from_rows(&[vec![1, 0], vec![-1, 1]])
        );
        // s₁²: x ↦ x − 2y, so x² ↦ x² − 4xy + 4y², xy ↦ xy − 2y².
        let r = rho(&w("aa"), 2);
        assert_eq!(r.column(0), v(&[1, -4, 4]));
        assert_eq!(r.column(1), v(&[0, 1, -2]));
        assert_eq!(r.column(2), v(&[0, 0, 1]));
    }

    #[test]
    fn reduction_mod_q() {
        let r = rep_matrix(&w("aa"), 2, 3);
        assert_eq!(r.matrix.column(0), v(&[1, 2, 1]));
        assert_eq!(r.modulus, 3);
    }

    #[test]
    fn substitution_matches_evaluation() {
        // (ρ(g)f)(x, y) = f((x, y)·g).
        let g = w("abAbb");
        let [a, b, c, d] = g.entries();
        let f = v(&[3, -1, 0, 2]);
        let gf = rho(&g, 3).mul_vec(&f);
        let (x, y) = (BigInt::from(2), BigInt::from(-5));
        let xs = a * &x + c * &y;
        let ys = b * &x + d * &y;
        assert_eq!(evaluate(&gf, &x, &y), evaluate(&f, &xs, &ys));
    }

    #[test]
    fn invariants_mod_q() {
        let gens = [w("aa"), w("bb"), Mat2Z::minus_identity()];
        let k = invariant_submodule(&gens, 1, 4).unwrap();
        assert_eq!(k.generators, vec![vec![2, 0], vec![0, 2]]);
        assert_eq!(k.group, "Z/2 + Z/2".parse().unwrap());
        let all = invariant_submodule(&[Mat2Z::minus_identity()], 3, 2).unwrap();
        assert_eq!(all.group, "Z/2 + Z/2 + Z/2 + Z/2".parse().unwrap());
        let none = invariant_submodule(&[], 2, 3).unwrap();
        assert_eq!(none.group.torsion_order(), BigInt::from(27));
    }

    #[test]
    fn integral() {
        let five = [w("a").pow(5), w("b").pow(5)];
        assert_eq!(integral_invariants(&five, 0), AbelianGroup::free(1));
        assert_eq!(integral_invariants(&five, 4), AbelianGroup::trivial());
        assert_eq!(integral_invariants(&[], 3), AbelianGroup::free(4));
        for m in 2..6 {
            let gens = [w("a").pow(m), w("b").pow(m)];
            assert_eq!(integral_invariants(&gens, 0), AbelianGroup::free(1));
            for n in 1..5 {
                assert!(integral_invariants(&gens, n).is_trivial());
            }
        }
    }

    fn word() -> impl Strategy<Value = Word> {
        let l = prop_oneof![
            Just(Letter::S1),
            Just(Letter::S1Inv),
            Just(Letter::S2),
            Just(Letter::S2Inv)
        ];
        proptest::collection::vec(l, 0..=8).prop_map(Word::new)
    }

    proptest! {
        #[test]
        fn homomorphism(u in word(), t in word(), n in 0usize..6) {
            let (a, b) = (u.eval(), t.eval());
            prop_assert_eq!(rho(&(&a * &b), n), &rho(&a, n) * &rho(&b, n));
        }

        #[test]
        fn minus_identity_is_sign(n in 0usize..10) {
            let expected = IntMatrix::identity(n + 1).scale(&BigInt::from(central_sign(n)));
            prop_assert_eq!(rho(&Mat2Z::minus_identity(), n), expected);
        }

        #[test]
        fn reduction_commutes(u in word(), n in 0usize..6, q in 2u64..10) {
            let g = u.eval();
            let direct = rep_matrix(&g, n, q).matrix;
            prop_assert_eq!(rho(&g, n).reduce_mod(&BigInt::from(q)), direct);
        }

        #[test]
        fn unimodular(u in word(), n in 0usize..6) {
            prop_assert!(rho(&u.eval(), n).determinant().abs().is_one());
        }
    }
}
