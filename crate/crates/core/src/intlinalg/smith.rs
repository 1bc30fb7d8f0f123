//! Smith normal form with smallest-magnitude pivoting.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// `U · A · V = S` with `U`, `V` unimodular and `S` diagonal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Diagonal of `S`, length `min(rows, cols)`, non-negative, each entry
    /// dividing the next; zeros only at the tail.
    pub divisors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.divisors.iter().filter(|d| !d.is_zero()).count()
    }
}

/// Full Smith normal form including both transforms.
pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let mut w = Worker::new(a, true, true, false);
    w.run();
    let divisors = w.divisors();
    let s = IntMatrix::from_fn(a.rows(), a.cols(), |i, j| {
        if i == j {
            divisors[i].clone()
        } else {
            BigInt::zero()
        }
    });
    let form = SmithForm {
        u: w.u.map(|u| IntMatrix::from_row_vecs(u, a.rows())).unwrap(),
        v: w.v.map(|v| IntMatrix::from_row_vecs(v, a.cols())).unwrap(),
        s,
        divisors,
    };
    #[cfg(debug_assertions)]
    check_form(a, &form);
    form
}

/// Divisors only, without recording any transform.
pub fn smith_divisors(a: &IntMatrix) -> Vec<BigInt> {
    let mut w = Worker::new(a, false, false, false);
    w.run();
    w.divisors()
}

/// Divisors together with `V` and `V⁻¹`.
pub(crate) fn smith_right(a: &IntMatrix) -> (Vec<BigInt>, IntMatrix, IntMatrix) {
    let mut w = Worker::new(a, false, true, true);
    w.run();
    let d = w.divisors();
    let n = a.cols();
    (
        d,
        IntMatrix::from_row_vecs(w.v.unwrap(), n),
        IntMatrix::from_row_vecs(w.v_inv.unwrap(), n),
    )
}

#[cfg(debug_assertions)]
fn check_form(a: &IntMatrix, f: &SmithForm) {
    assert_eq!(&(&f.u * a) * &f.v, f.s, "U·A·V != S");
    assert!(f.u.determinant().abs().is_one());
    assert!(f.v.determinant().abs().is_one());
    check_chain(&f.divisors);
}

pub(crate) fn check_chain(d: &[BigInt]) {
    for w in d.windows(2) {
        assert!(!w[0].is_negative());
        if w[0].is_zero() {
            assert!(w[1].is_zero(), "zero divisor before nonzero one");
        } else {
            assert!(w[1].is_multiple_of(&w[0]), "divisibility chain broken");
        }
    }
}

/// Quotient of `a / b` rounded to the nearest integer.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    if b.is_negative() {
        return round_div(&-a, &-b);
    }
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

struct Worker {
    a: Vec<Vec<BigInt>>,
    rows: usize,
    cols: usize,
    u: Option<Vec<Vec<BigInt>>>,
    v: Option<Vec<Vec<BigInt>>>,
    v_inv: Option<Vec<Vec<BigInt>>>,
}

fn identity_rows(n: usize) -> Vec<Vec<BigInt>> {
    IntMatrix::identity(n).into_rows()
}

fn row_axpy(rows: &mut [Vec<BigInt>], target: usize, src: usize, q: &BigInt) {
    let (t, s) = if target < src {
        let (lo, hi) = rows.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = rows.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in t.iter_mut().zip(s.iter()) {
        if !y.is_zero() {
            *x -= q * y;
        }
    }
}

impl Worker {
    fn new(a: &IntMatrix, want_u: bool, want_v: bool, want_v_inv: bool) -> Self {
        Worker {
            a: a.to_rows(),
            rows: a.rows(),
            cols: a.cols(),
            u: want_u.then(|| identity_rows(a.rows())),
            v: want_v.then(|| identity_rows(a.cols())),
            v_inv: want_v_inv.then(|| identity_rows(a.cols())),
        }
    }

    fn divisors(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self.a[i][i].abs())
            .collect()
    }

    fn swap_rows(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        self.a.swap(i, j);
        if let Some(u) = &mut self.u {
            u.swap(i, j);
        }
    }

    fn swap_cols(&mut self, i: usize, j: usize) {
        if i == j {
            return;
        }
        for r in &mut self.a {
            r.swap(i, j);
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                r.swap(i, j);
            }
        }
        if let Some(vi) = &mut self.v_inv {
            vi.swap(i, j);
        }
    }

    /// row[target] -= q * row[src]
    fn row_op(&mut self, target: usize, src: usize, q: &BigInt) {
        row_axpy(&mut self.a, target, src, q);
        if let Some(u) = &mut self.u {
            row_axpy(u, target, src, q);
        }
    }

    /// col[target] -= q * col[src]
    fn col_op(&mut self, target: usize, src: usize, q: &BigInt) {
        for r in &mut self.a {
            if !r[src].is_zero() {
                let d = q * &r[src];
                r[target] -= d;
            }
        }
        if let Some(v) = &mut self.v {
            for r in v.iter_mut() {
                if !r[src].is_zero() {
                    let d = q * &r[src];
                    r[target] -= d;
                }
            }
        }
        // V ← V·E with E = I - q e_src e_targetᵀ, so V⁻¹ ← E⁻¹·V⁻¹:
        // row[src] += q * row[target].
        if let Some(vi) = &mut self.v_inv {
            let neg = -q;
            row_axpy(vi, src, target, &neg);
        }
    }

    fn negate_row(&mut self, i: usize) {
        for x in &mut self.a[i] {
            *x = -&*x;
        }
        if let Some(u) = &mut self.u {
            for x in &mut u[i] {
                *x = -&*x;
            }
        }
    }

    fn smallest_in(&self, t: usize) -> Option<(usize, usize)> {
        let mut best: Option<(BigInt, usize, usize)> = None;
        for i in t..self.rows {
            for j in t..self.cols {
                let x = &self.a[i][j];
                if x.is_zero() {
                    continue;
                }
                let m = x.abs();
                if best.as_ref().is_none_or(|(b, _, _)| m < *b) {
                    let unit = m.is_one();
                    best = Some((m, i, j));
                    if unit {
                        let (_, i, j) = best.unwrap();
                        return Some((i, j));
                    }
                }
            }
        }
        best.map(|(_, i, j)| (i, j))
    }

    fn run(&mut self) {
        let n = self.rows.min(self.cols);
        let mut t = 0;
        while t < n {
            let Some((pi, pj)) = self.smallest_in(t) else {
                break;
            };
            self.swap_rows(t, pi);
            self.swap_cols(t, pj);
            loop {
                // Clear column t by row operations.
                let mut dirty = false;
                for i in t + 1..self.rows {
                    if self.a[i][t].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[i][t], &self.a[t][t]);
                    if !q.is_zero() {
                        self.row_op(i, t, &q);
                    }
                    if !self.a[i][t].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    let i = (t..self.rows)
                        .filter(|&i| !self.a[i][t].is_zero())
                        .min_by_key(|&i| self.a[i][t].abs())
                        .unwrap();
                    self.swap_rows(t, i);
                    continue;
                }
                // Clear row t by column operations.
                for j in t + 1..self.cols {
                    if self.a[t][j].is_zero() {
                        continue;
                    }
                    let q = round_div(&self.a[t][j], &self.a[t][t]);
                    if !q.is_zero() {
                        self.col_op(j, t, &q);
                    }
                    if !self.a[t][j].is_zero() {
                        dirty = true;
                    }
                }
                if dirty {
                    let j = (t..self.cols)
                        .filter(|&j| !self.a[t][j].is_zero())
                        .min_by_key(|&j| self.a[t][j].abs())
                        .unwrap();
                    self.swap_cols(t, j);
                    continue;
                }
                // Enforce divisibility of the remaining block by the pivot.
                let p = self.a[t][t].clone();
                let bad = if p.abs().is_one() {
                    None
                } else {
                    (t + 1..self.rows)
                        .find(|&i| self.a[i][t + 1..].iter().any(|x| !x.is_multiple_of(&p)))
                };
                match bad {
                    Some(i) => {
                        let minus_one = BigInt::from(-1);
                        self.row_op(t, i, &minus_one);
                    }
                    None => break,
                }
            }
            if self.a[t][t].is_negative() {
                self.negate_row(t);
            }
            t += 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn divs(a: &IntMatrix) -> Vec<i64> {
        smith_normal_form(a)
            .divisors
            .iter()
            .map(|d| i64::try_from(d).unwrap())
            .collect()
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(divs(&IntMatrix::identity(3)), vec![1, 1, 1]);
        assert_eq!(divs(&IntMatrix::zeros(2, 3)), vec![0, 0]);
    }

    #[test]
    fn two_by_two() {
        // gcd of entries is 2 and |det| = 8, so the divisors are (2, 4).
        let a = IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]);
        assert_eq!(divs(&a), vec![2, 4]);
    }

    #[test]
    fn needs_divisibility_fix() {
        let a = IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]]);
        assert_eq!(divs(&a), vec![1, 6]);
    }

    #[test]
    fn right_transform_inverse_is_consistent() {
        let a = IntMatrix::from_rows(&[vec![3, 5, 7], vec![2, -4, 6], vec![1, 1, 1]]);
        let (_, v, vi) = smith_right(&a);
        assert_eq!(&v * &vi, IntMatrix::identity(3));
    }

    /// Brute-force oracle: gcd of all k×k minors.
    fn minor_gcd(a: &IntMatrix, k: usize) -> BigInt {
        fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
            if k == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for last in (k - 1)..n {
                for mut s in subsets(last, k - 1) {
                    s.push(last);
                    out.push(s);
                }
            }
            out
        }
        let mut g = BigInt::zero();
        for rs in subsets(a.rows(), k) {
            for cs in subsets(a.cols(), k) {
                g = g.gcd(&a.submatrix(&rs, &cs).determinant());
            }
        }
        g
    }

    fn small_matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..=5, 1usize..=5).prop_flat_map(|(r, c)| {
            proptest::collection::vec(-6i64..=6, r * c)
                .prop_map(move |v| IntMatrix::from_fn(r, c, |i, j| BigInt::from(v[i * c + j])))
        })
    }

    proptest! {
        #[test]
        fn smith_invariants(a in small_matrix()) {
            let f = smith_normal_form(&a);
            prop_assert_eq!(&(&f.u * &a) * &f.v, f.s.clone());
            prop_assert!(f.u.determinant().abs().is_one());
            prop_assert!(f.v.determinant().abs().is_one());
            check_chain(&f.divisors);
            prop_assert_eq!(smith_divisors(&a), f.divisors.clone());
        }

        #[test]
        fn divisor_products_match_minor_gcds(a in small_matrix()) {
            let d = smith_divisors(&a);
            let mut prod = BigInt::one();
            for (k, dk) in d.iter().enumerate() {
                prod *= dk;
                prop_assert_eq!(prod.clone(), minor_gcd(&a, k + 1));
            }
        }
    }
}
