//! Divided power algebras and the closed-form predictors for `Γ(m)`.
//!
//! `Δ[x] ⊂ Q[x]` is spanned by `x_i = xⁱ/i!`, and `Δ_{p^a}[x]` is its
//! quotient by `(p^{v(i)+a} x_i)`, so the degree-`i` piece is cyclic of order
//! `p^{a+v_p(i)}`. Several variables are combined by tensor product.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::{binomial, Integer};
use num_rational::BigRational;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, is_prime};
use crate::error::{Error, Result};
use crate::intlinalg::{cokernel_group, AbelianGroup, IntMatrix};
use crate::sl2::group_order;

pub use crate::arith::valuation;

/// `Δ_{p^a}[x₁, …, x_k]` with `deg xⱼ = weights[j]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DividedAlgebraSpec {
    weights: Vec<u64>,
    p: u64,
    a: u32,
}

impl DividedAlgebraSpec {
    pub fn new(weights: Vec<u64>, p: u64, a: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::BadParams(format!("{p} is not prime")));
        }
        if a == 0 {
            return Err(Error::BadParams("torsion exponent a must be >= 1".into()));
        }
        if weights.contains(&0) {
            return Err(Error::BadParams("variable weights must be >= 1".into()));
        }
        Ok(DividedAlgebraSpec { weights, p, a })
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    /// Calls `f` on every exponent tuple of total weighted degree `d`.
    fn for_each_tuple(&self, d: u64, f: &mut impl FnMut(&[u64])) {
        fn rec(w: &[u64], d: u64, cur: &mut Vec<u64>, f: &mut impl FnMut(&[u64])) {
            match w.split_first() {
                None => {
                    if d == 0 {
                        f(cur)
                    }
                }
                Some((&w0, rest)) => {
                    for i in 0..=d / w0 {
                        cur.push(i);
                        rec(rest, d - i * w0, cur, f);
                        cur.pop();
                    }
                }
            }
        }
        rec(&self.weights, d, &mut Vec::new(), f);
    }

    /// Exponents `e` (and multiplicities) of the summands `Z/p^e` in degree
    /// `d`, plus the number of free summands.
    fn summands(&self, d: u64) -> (usize, BTreeMap<u32, usize>) {
        let mut free = 0;
        let mut torsion = BTreeMap::new();
        self.for_each_tuple(d, &mut |t| match t
            .iter()
            .filter(|&&i| i > 0)
            .map(|&i| valuation(self.p, i))
            .min()
        {
            None => free += 1,
            Some(v) => *torsion.entry(self.a + v).or_insert(0) += 1,
        });
        (free, torsion)
    }
}

fn group_of(p: u64, free: usize, torsion: &BTreeMap<u32, usize>) -> AbelianGroup {
    let orders = torsion
        .iter()
        .flat_map(|(&e, &k)| std::iter::repeat_n(prime_power(p, e), k));
    AbelianGroup::from_cyclic_orders(free, orders)
}

/// Degree-`d` component of `Δ_{p^a}[x₁, …]`.
pub fn delta_component(spec: &DividedAlgebraSpec, d: u64) -> AbelianGroup {
    let (free, torsion) = spec.summands(d);
    group_of(spec.p, free, &torsion)
}

/// Degree-`d` component of `Δ⁺_{p^a}[x₁, …]` (positive degrees only).
pub fn delta_plus_component(spec: &DividedAlgebraSpec, d: u64) -> AbelianGroup {
    if d == 0 {
        AbelianGroup::trivial()
    } else {
        delta_component(spec, d)
    }
}

/// A graded direct sum `⊕ (Z/p^e)^k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionPrediction {
    pub degree: u64,
    /// `(prime, exponent, multiplicity)`, sorted.
    pub summands: Vec<(u64, u32, usize)>,
}

impl TorsionPrediction {
    pub fn to_group(&self) -> AbelianGroup {
        AbelianGroup::from_cyclic_orders(
            0,
            self.summands
                .iter()
                .flat_map(|&(p, e, k)| std::iter::repeat_n(BigInt::from(p).pow(e), k)),
        )
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }
}

/// The `p`-primary part of the torsion of `H¹(Γ(m); M_n)`.
///
/// If `p^a ∥ m` with `a ≥ 1` this is the degree-`n` part of
/// `Δ⁺_{p^a}[x, y]`. If `p ∤ m` it is the degree-`2n` part of
/// `Δ⁺_p[P, Q]` with `deg P = 2(p+1)`, `deg Q = 2p(p-1)`.
pub fn predict_h1_torsion(m: u64, n: u64, p: u64) -> Result<TorsionPrediction> {
    if n == 0 {
        return Err(Error::BadDegree(0));
    }
    if m < 2 {
        return Err(Error::MTooSmall { m, min: 2 });
    }
    let a = if m.is_multiple_of(p) {
        valuation(p, m)
    } else {
        0
    };
    let (spec, degree) = if a > 0 {
        (DividedAlgebraSpec::new(vec![1, 1], p, a)?, n)
    } else {
        (
            DividedAlgebraSpec::new(vec![2 * (p + 1), 2 * p * (p - 1)], p, 1)?,
            2 * n,
        )
    };
    let (_, torsion) = spec.summands(degree);
    Ok(TorsionPrediction {
        degree,
        summands: torsion.into_iter().map(|(e, k)| (p, e, k)).collect(),
    })
}

/// Sum of [`predict_h1_torsion`] over `primes`.
pub fn predict_h1_torsion_total(m: u64, n: u64, primes: &[u64]) -> Result<AbelianGroup> {
    let parts = primes
        .iter()
        .map(|&p| predict_h1_torsion(m, n, p).map(|t| t.to_group()))
        .collect::<Result<Vec<_>>>()?;
    Ok(AbelianGroup::direct_sum_all(&parts))
}

/// Degree-`d` component of `Z[ξ₁, ξ_p, ξ_{p²}, …] / J` with `deg ξ_{p^i} = p^i`
/// and `J = (p^a ξ₁, ξ_{p^i}^p − p ξ_{p^{i+1}} for i ≥ 0)`.
pub fn xi_presentation_component(p: u64, a: u32, d: u64) -> AbelianGroup {
    let mut degs = vec![1u64];
    while degs.last().unwrap() * p <= d.max(1) {
        let next = degs.last().unwrap() * p;
        degs.push(next);
    }
    let k = degs.len();
    let spec_weights = degs.clone();
    let monomials_of = |deg: u64| -> Vec<Vec<u64>> {
        let mut out = Vec::new();
        let spec = DividedAlgebraSpec {
            weights: spec_weights.clone(),
            p,
            a,
        };
        spec.for_each_tuple(deg, &mut |t| out.push(t.to_vec()));
        out
    };
    let rows = monomials_of(d);
    let index: BTreeMap<Vec<u64>, usize> = rows
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    let mut triplets: Vec<(usize, usize, BigInt)> = Vec::new();
    let mut col = 0;
    let unit = |e: usize| {
        let mut v = vec![0u64; k];
        v[e] = 1;
        v
    };
    let add = |x: &[u64], y: &[u64]| -> Vec<u64> { x.iter().zip(y).map(|(a, b)| a + b).collect() };
    // μ · p^a ξ₁
    if d >= 1 {
        for mu in monomials_of(d - 1) {
            let t = add(&mu, &unit(0));
            triplets.push((index[&t], col, BigInt::from(p).pow(a)));
            col += 1;
        }
    }
    // μ · (ξ_{p^i}^p − p ξ_{p^{i+1}})
    for i in 0..k.saturating_sub(1) {
        let rd = degs[i + 1];
        if rd > d {
            break;
        }
        for mu in monomials_of(d - rd) {
            let mut pw = unit(i);
            pw[i] = p;
            triplets.push((index[&add(&mu, &pw)], col, BigInt::one()));
            triplets.push((index[&add(&mu, &unit(i + 1))], col, -BigInt::from(p)));
            col += 1;
        }
    }
    cokernel_group(&IntMatrix::from_triplets(rows.len(), col, triplets))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * i)
}

/// One comparison made by [`delta_presentation_report`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaCheck {
    pub degree: u64,
    pub presented: AbelianGroup,
    pub expected: AbelianGroup,
    /// The normal monomial `∏ ξ_{p^i}^{e_i}` (base-`p` digits of the degree)
    /// maps to a `p`-unit multiple of `x_d`.
    pub generator_is_unit: bool,
}

impl DeltaCheck {
    pub fn holds(&self) -> bool {
        self.presented == self.expected && self.generator_is_unit
    }
}

/// Degree-by-degree comparison of the `ξ`-presentation with `Δ_{p^a}[x]`.
pub fn delta_presentation_report(p: u64, a: u32, max_degree: u64) -> Result<Vec<DeltaCheck>> {
    let spec = DividedAlgebraSpec::new(vec![1], p, a)?;
    let bp = BigInt::from(p);
    let mut out = Vec::new();
    for d in 0..=max_degree {
        // ∏ x_{p^i}^{e_i} = (d! / ∏ (p^i)!^{e_i}) x_d.
        let mut denom = BigInt::one();
        let (mut rest, mut pi) = (d, 1u64);
        while rest > 0 {
            let e = rest % p;
            denom *= factorial(pi).pow(e as u32);
            rest /= p;
            pi *= p;
        }
        let coeff = factorial(d) / denom;
        out.push(DeltaCheck {
            degree: d,
            presented: xi_presentation_component(p, a, d),
            expected: delta_component(&spec, d),
            generator_is_unit: !coeff.is_multiple_of(&bp),
        });
    }
    Ok(out)
}

/// `x_i x_j = C(i+j, i) x_{i+j}` in `Q[x]`, checked on coefficients.
pub fn divided_product_identity(i: u64, j: u64) -> bool {
    let inv_fact = |n: u64| BigRational::new(BigInt::one(), factorial(n));
    let lhs = inv_fact(i) * inv_fact(j);
    let c = binomial(BigInt::from(i + j), BigInt::from(i));
    lhs == BigRational::from_integer(c) * inv_fact(i + j)
}

pub fn verify_delta_presentation(p: u64, a: u32, max_degree: u64) -> Result<bool> {
    if max_degree < 1 {
        return Err(Error::BadParams("max_degree must be >= 1".into()));
    }
    let products =
        (0..=max_degree).all(|i| (0..=max_degree - i).all(|j| divided_product_identity(i, j)));
    Ok(products
        && delta_presentation_report(p, a, max_degree)?
            .iter()
            .all(DeltaCheck::holds))
}

/// One way of computing the rank of the free group `Γ(m)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRoute {
    pub prime: u64,
    /// `[Γ(p): Γ(m)]`.
    pub index: u64,
    /// Rank derived by the Schreier index formula through `Γ(p)`.
    pub rank: u64,
    /// The closed form printed for composite `m`: `i/2+1` for `p = 2`,
    /// `i(p(p²−1)−1)+1` for odd `p`.
    pub printed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedFormRanks {
    pub m: u64,
    pub order: u64,
    pub rank: u64,
    pub routes: Vec<RankRoute>,
}

impl ClosedFormRanks {
    /// Rank of `H¹(Γ(m); M_n ⊗ Q)`.
    pub fn h1_rank(&self, n: u64) -> u64 {
        if n == 0 {
            self.rank
        } else {
            (self.rank - 1) * (n + 1)
        }
    }

    /// Routes whose printed closed form disagrees with the Schreier route.
    pub fn printed_discrepancies(&self) -> Vec<&RankRoute> {
        self.routes
            .iter()
            .filter(|r| r.printed.is_some_and(|x| x != r.rank))
            .collect()
    }
}

/// `N(p) = 1 + p(p²−1)/12`, the rank of `Γ(p)` for odd `p`.
pub fn gamma_p_rank(p: u64) -> u64 {
    1 + p * (p * p - 1) / 12
}

pub fn closed_form_ranks(m: u64) -> Result<ClosedFormRanks> {
    if m < 3 {
        return Err(Error::MTooSmall { m, min: 3 });
    }
    let order = group_order(m);
    let composite = !is_prime(m);
    let routes: Vec<RankRoute> = factorize(m)
        .into_iter()
        .map(|(p, _)| {
            let index = order / (p * (p * p - 1));
            if p == 2 {
                RankRoute {
                    prime: p,
                    index,
                    rank: index / 2 + 1,
                    printed: composite.then_some(index / 2 + 1),
                }
            } else {
                RankRoute {
                    prime: p,
                    index,
                    rank: index * (gamma_p_rank(p) - 1) + 1,
                    printed: composite.then_some(index * (p * (p * p - 1) - 1) + 1),
                }
            }
        })
        .collect();
    let rank = routes[0].rank;
    if let Some(r) = routes.iter().find(|r| r.rank != rank) {
        return Err(Error::Mismatch {
            what: format!("rank of Gamma({m})"),
            left: format!("{rank} via p = {}", routes[0].prime),
            right: format!("{} via p = {}", r.rank, r.prime),
        });
    }
    Ok(ClosedFormRanks {
        m,
        order,
        rank,
        routes,
    })
}

/// Coefficients `f_0, …, f_max` of `t⁴(1+t⁴−t¹²+t¹⁶) / ((1−t⁸)(1−t¹²))`,
/// expanded by counting solutions of `8a + 12b = k − e`.
pub fn sl2_free_rank_series(max_degree: usize) -> Vec<i64> {
    const NUM: [(usize, i64); 4] = [(4, 1), (8, 1), (16, -1), (20, 1)];
    (0..=max_degree)
        .map(|k| {
            NUM.iter()
                .filter(|&&(e, _)| e <= k)
                .map(|&(e, c)| {
                    let r = k - e;
                    let count = (0..=r / 12).filter(|b| (r - 12 * b) % 8 == 0).count();
                    c * count as i64
                })
                .sum()
        })
        .collect()
}

/// `series · (1−t⁸)(1−t¹²) = t⁴ + t⁸ − t¹⁶ + t²⁰` through degree `max`.
pub fn series_identity_holds(max_degree: usize) -> bool {
    let f = sl2_free_rank_series(max_degree);
    let mut den = vec![0i64; max_degree + 1];
    for (e, c) in [(0, 1), (8, -1), (12, -1), (20, 1)] {
        if e <= max_degree {
            den[e] += c;
        }
    }
    let mut num = vec![0i64; max_degree + 1];
    for e in [4usize, 8, 16, 20] {
        if e <= max_degree {
            num[e] += if e == 16 { -1 } else { 1 };
        }
    }
    (0..=max_degree).all(|k| (0..=k).map(|i| f[i] * den[k - i]).sum::<i64>() == num[k])
}

/// `p^e` as a `BigInt`.
pub fn prime_power(p: u64, e: u32) -> BigInt {
    BigInt::from(p).pow(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(w: &[u64], p: u64, a: u32) -> DividedAlgebraSpec {
        DividedAlgebraSpec::new(w.to_vec(), p, a).unwrap()
    }

    fn g(s: &str) -> AbelianGroup {
        s.parse().unwrap()
    }

    #[test]
    fn components() {
        assert_eq!(delta_component(&spec(&[1], 2, 1), 4), g("Z/8"));
        assert_eq!(
            delta_component(&spec(&[1, 1], 2, 1), 2),
            g("Z/2 + Z/4 + Z/4")
        );
        assert_eq!(delta_component(&spec(&[1, 1], 2, 1), 0), g("Z"));
        assert!(delta_plus_component(&spec(&[1, 1], 2, 1), 0).is_trivial());
        assert!(DividedAlgebraSpec::new(vec![1], 4, 1).is_err());
    }

    #[test]
    fn predictions() {
        let t = |m, n, p| predict_h1_torsion(m, n, p).unwrap().to_group();
        assert_eq!(t(2, 2, 2), g("Z/2 + Z/4 + Z/4"));
        assert_eq!(t(3, 2, 3), g("Z/3 + Z/3 + Z/3"));
        assert_eq!(t(3, 2, 2), g("Z/2"));
        assert_eq!(predict_h1_torsion(3, 0, 2), Err(Error::BadDegree(0)));
        for n in (1..=15).step_by(2) {
            let two = BigInt::from(2);
            assert_eq!(
                t(2, n, 2),
                AbelianGroup::free(n as usize + 1).tensor_mod(&two)
            );
        }
    }

    #[test]
    fn xi_presentation() {
        assert_eq!(xi_presentation_component(2, 1, 1), g("Z/2"));
        assert_eq!(xi_presentation_component(3, 2, 1), g("Z/9"));
        assert_eq!(xi_presentation_component(2, 1, 0), g("Z"));
        assert!(divided_product_identity(1, 1));
        assert!(verify_delta_presentation(2, 1, 16).unwrap());
        assert!(verify_delta_presentation(3, 2, 16).unwrap());
    }

    #[test]
    fn ranks() {
        let r = closed_form_ranks(5).unwrap();
        assert_eq!((r.rank, r.h1_rank(1), r.h1_rank(0)), (11, 20, 11));
        assert_eq!(r.routes[0].printed, None);
        let r6 = closed_form_ranks(6).unwrap();
        assert_eq!(r6.rank, 13);
        let routes: Vec<_> = r6
            .routes
            .iter()
            .map(|x| (x.prime, x.index, x.rank))
            .collect();
        assert_eq!(routes, vec![(2, 24, 13), (3, 6, 13)]);
        assert_eq!(r6.printed_discrepancies().len(), 1);
        assert_eq!(r6.printed_discrepancies()[0].printed, Some(139));
        assert_eq!(closed_form_ranks(4).unwrap().rank, 5);
        assert!(closed_form_ranks(4)
            .unwrap()
            .printed_discrepancies()
            .is_empty());
        assert!(closed_form_ranks(2).is_err());
        for m in 3..=12 {
            assert_eq!(closed_form_ranks(m).unwrap().rank, 1 + group_order(m) / 12);
        }
    }

    #[test]
    fn series() {
        let f = sl2_free_rank_series(40);
        assert_eq!((f[4], f[10], f[20]), (1, 0, 3));
        assert!(series_identity_holds(40));
        assert!(f.iter().enumerate().all(|(k, &c)| k % 4 == 0 || c == 0));
    }

    proptest! {
        #[test]
        fn one_variable_orders(p in prop::sample::select(vec![2u64, 3, 5, 7]), a in 1u32..3, i in 1u64..60) {
            let c = delta_component(&spec(&[1], p, a), i);
            prop_assert_eq!(c, AbelianGroup::cyclic(prime_power(p, a + valuation(p, i))));
        }

        #[test]
        fn two_variable_dims_convolve(p in prop::sample::select(vec![2u64, 3, 5]), d in 0u64..30) {
            let bp = BigInt::from(p);
            let one = spec(&[1], p, 1);
            let dim = |g: AbelianGroup| g.tensor_mod(&bp).invariant_factors().len();
            let two = dim(delta_component(&spec(&[1, 1], p, 1), d));
            let conv: usize = (0..=d).map(|i| dim(delta_component(&one, i)) * dim(delta_component(&one, d - i))).sum();
            prop_assert_eq!(two, conv);
        }
    }
}
