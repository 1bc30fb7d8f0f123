//! Words and matrices in `SL(2,Z)`, reduction modulo `m`, and the finite
//! groups `SL₂(Z/m)`.
//!
//! Generators are `s₁ = [[1,0],[-1,1]]` and `s₂ = [[1,1],[0,1]]`. Words are
//! written with `a = s₁`, `b = s₂` and capitals for inverses.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Letter {
    S1,
    S1Inv,
    S2,
    S2Inv,
}

impl Letter {
    /// Edge order used by every breadth-first search in the crate.
    pub const ALL: [Letter; 4] = [Letter::S1, Letter::S1Inv, Letter::S2, Letter::S2Inv];

    pub fn inverse(self) -> Letter {
        match self {
            Letter::S1 => Letter::S1Inv,
            Letter::S1Inv => Letter::S1,
            Letter::S2 => Letter::S2Inv,
            Letter::S2Inv => Letter::S2,
        }
    }

    pub fn is_inverse(self) -> bool {
        matches!(self, Letter::S1Inv | Letter::S2Inv)
    }

    /// The underlying positive generator.
    pub fn base(self) -> Letter {
        if self.is_inverse() {
            self.inverse()
        } else {
            self
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn matrix(self) -> Mat2Z {
        match self {
            Letter::S1 => Mat2Z::from_i64(1, 0, -1, 1),
            Letter::S1Inv => Mat2Z::from_i64(1, 0, 1, 1),
            Letter::S2 => Mat2Z::from_i64(1, 1, 0, 1),
            Letter::S2Inv => Mat2Z::from_i64(1, -1, 0, 1),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Letter::S1 => 'a',
            Letter::S1Inv => 'A',
            Letter::S2 => 'b',
            Letter::S2Inv => 'B',
        }
    }

    pub fn from_symbol(c: char) -> Option<Letter> {
        Some(match c {
            'a' => Letter::S1,
            'A' => Letter::S1Inv,
            'b' => Letter::S2,
            'B' => Letter::S2Inv,
            _ => return None,
        })
    }
}

/// A freely reduced word in `s₁^{±1}, s₂^{±1}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn new(letters: impl IntoIterator<Item = Letter>) -> Word {
        let mut out: Vec<Letter> = Vec::new();
        for l in letters {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: Letter) -> Word {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    /// `w^k`; negative `k` uses the inverse.
    pub fn pow(&self, k: i64) -> Word {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Word::empty();
        for _ in 0..k.unsigned_abs() {
            out = out.concat(&base);
        }
        out
    }

    pub fn eval(&self) -> Mat2Z {
        eval_word(self)
    }
}

impl fmt::Display for Word {
    /// `aBbA`-style; the empty word prints as `1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        for l in &self.0 {
            write!(f, "{}", l.symbol())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "1" {
            return Ok(Word::empty());
        }
        s.chars()
            .map(|c| Letter::from_symbol(c).ok_or_else(|| Error::UnknownSymbol(c.to_string())))
            .collect::<Result<Vec<_>>>()
            .map(Word::new)
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A matrix in `SL(2,Z)` stored as `[[a11, a12], [a21, a22]]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Mat2Z {
    e: [BigInt; 4],
}

impl Mat2Z {
    /// Checked constructor; fails unless the determinant is 1.
    pub fn new(a11: BigInt, a12: BigInt, a21: BigInt, a22: BigInt) -> Result<Mat2Z> {
        let m = Mat2Z {
            e: [a11, a12, a21, a22],
        };
        if m.det().is_one() {
            Ok(m)
        } else {
            Err(Error::BadParams(format!("determinant of {m} is not 1")))
        }
    }

    pub(crate) fn from_i64(a11: i64, a12: i64, a21: i64, a22: i64) -> Mat2Z {
        let m = Mat2Z {
            e: [a11.into(), a12.into(), a21.into(), a22.into()],
        };
        debug_assert!(m.det().is_one());
        m
    }

    pub fn identity() -> Mat2Z {
        Mat2Z::from_i64(1, 0, 0, 1)
    }

    pub fn minus_identity() -> Mat2Z {
        Mat2Z::from_i64(-1, 0, 0, -1)
    }

    /// `U_m = [[m+1, -m], [m, 1-m]]`, an element of `Γ(m)`.
    pub fn u(m: i64) -> Mat2Z {
        Mat2Z::from_i64(m + 1, -m, m, 1 - m)
    }

    pub fn entries(&self) -> &[BigInt; 4] {
        &self.e
    }

    pub fn a11(&self) -> &BigInt {
        &self.e[0]
    }
    pub fn a12(&self) -> &BigInt {
        &self.e[1]
    }
    pub fn a21(&self) -> &BigInt {
        &self.e[2]
    }
    pub fn a22(&self) -> &BigInt {
        &self.e[3]
    }

    pub fn det(&self) -> BigInt {
        &self.e[0] * &self.e[3] - &self.e[1] * &self.e[2]
    }

    pub fn inverse(&self) -> Mat2Z {
        let [a, b, c, d] = &self.e;
        Mat2Z {
            e: [d.clone(), -b, -c, a.clone()],
        }
    }

    pub fn pow(&self, k: i64) -> Mat2Z {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        (0..k.unsigned_abs()).fold(Mat2Z::identity(), |acc, _| &acc * &base)
    }

    pub fn reduce(&self, m: u64) -> Mat2Mod {
        let bm = BigInt::from(m);
        let r = |x: &BigInt| x.mod_floor(&bm).to_u64().unwrap();
        Mat2Mod {
            m,
            e: [r(&self.e[0]), r(&self.e[1]), r(&self.e[2]), r(&self.e[3])],
        }
    }
}

impl Mul for &Mat2Z {
    type Output = Mat2Z;
    fn mul(self, o: &Mat2Z) -> Mat2Z {
        let [a, b, c, d] = &self.e;
        let [p, q, r, s] = &o.e;
        Mat2Z {
            e: [a * p + b * r, a * q + b * s, c * p + d * r, c * q + d * s],
        }
    }
}

impl fmt::Display for Mat2Z {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = &self.e;
        write!(f, "[[{a},{b}],[{c},{d}]]")
    }
}

impl Serialize for Mat2Z {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows = [
            [self.e[0].to_string(), self.e[1].to_string()],
            [self.e[2].to_string(), self.e[3].to_string()],
        ];
        rows.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Mat2Z {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let rows = <[[String; 2]; 2]>::deserialize(d)?;
        let p = |s: &String| s.parse::<BigInt>().map_err(D::Error::custom);
        Mat2Z::new(
            p(&rows[0][0])?,
            p(&rows[0][1])?,
            p(&rows[1][0])?,
            p(&rows[1][1])?,
        )
        .map_err(D::Error::custom)
    }
}

/// Product of the generator matrices in letter order.
pub fn eval_word(w: &Word) -> Mat2Z {
    w.letters()
        .iter()
        .fold(Mat2Z::identity(), |acc, l| &acc * &l.matrix())
}

/// An element of `SL₂(Z/m)` with residues in `[0, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2Mod {
    m: u64,
    e: [u64; 4],
}

impl Mat2Mod {
    pub fn new(m: u64, e: [u64; 4]) -> Result<Mat2Mod> {
        if m < 2 {
            return Err(Error::ModulusTooSmall(m));
        }
        let e = e.map(|x| x % m);
        let det = (e[0] as u128 * e[3] as u128 + (m - e[1]) as u128 * e[2] as u128) % m as u128;
        if det != 1 {
            return Err(Error::BadParams(format!(
                "determinant of {e:?} is not 1 mod {m}"
            )));
        }
        Ok(Mat2Mod { m, e })
    }

    pub fn identity(m: u64) -> Mat2Mod {
        Mat2Mod { m, e: [1, 0, 0, 1] }
    }

    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn entries(&self) -> [u64; 4] {
        self.e
    }

    pub fn is_identity(&self) -> bool {
        self.e == [1, 0, 0, 1]
    }

    /// The smallest non-negative integer lift; it has determinant `1 mod m`
    /// but is generally not in `SL(2,Z)`.
    pub fn lift_entries(&self) -> [BigInt; 4] {
        self.e.map(BigInt::from)
    }
}

impl Mul for Mat2Mod {
    type Output = Mat2Mod;
    fn mul(self, o: Mat2Mod) -> Mat2Mod {
        debug_assert_eq!(self.m, o.m);
        let m = self.m as u128;
        let [a, b, c, d] = self.e.map(|x| x as u128);
        let [p, q, r, s] = o.e.map(|x| x as u128);
        let f = |x: u128| (x % m) as u64;
        Mat2Mod {
            m: self.m,
            e: [
                f(a * p + b * r),
                f(a * q + b * s),
                f(c * p + d * r),
                f(c * q + d * s),
            ],
        }
    }
}

impl fmt::Display for Mat2Mod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a, b, c, d] = self.e;
        write!(f, "[[{a},{b}],[{c},{d}]] mod {}", self.m)
    }
}

/// The Cayley graph of `SL₂(Z/m)` with respect to `s₁^{±1}, s₂^{±1}`,
/// explored breadth-first from the identity.
#[derive(Clone, Debug)]
pub struct CayleyGraph {
    modulus: u64,
    elements: Vec<Mat2Mod>,
    index: HashMap<Mat2Mod, usize>,
    /// `edges[g][l]` is the index of `g · l` for `l` in [`Letter::ALL`] order.
    edges: Vec<[usize; 4]>,
    /// BFS-tree parent: `parent[h] = (g, l)` with `h = g · l`.
    parent: Vec<Option<(usize, Letter)>>,
}

impl CayleyGraph {
    pub fn new(m: u64) -> Result<CayleyGraph> {
        if m < 2 {
            return Err(Error::ModulusTooSmall(m));
        }
        let gens = Letter::ALL.map(|l| l.matrix().reduce(m));
        let id = Mat2Mod::identity(m);
        let mut elements = vec![id];
        let mut index = HashMap::from([(id, 0)]);
        let mut parent = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(g) = queue.pop_front() {
            for (l, s) in Letter::ALL.iter().zip(&gens) {
                let h = elements[g] * *s;
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(h) {
                    e.insert(elements.len());
                    elements.push(h);
                    parent.push(Some((g, *l)));
                    queue.push_back(elements.len() - 1);
                }
            }
        }
        let edges = elements
            .iter()
            .map(|g| gens.map(|s| index[&(*g * s)]))
            .collect();
        Ok(CayleyGraph {
            modulus: m,
            elements,
            index,
            edges,
            parent,
        })
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[Mat2Mod] {
        &self.elements
    }

    pub fn index_of(&self, g: &Mat2Mod) -> Option<usize> {
        self.index.get(g).copied()
    }

    pub fn step(&self, g: usize, l: Letter) -> usize {
        self.edges[g][l.index()]
    }

    pub fn parent(&self, g: usize) -> Option<(usize, Letter)> {
        self.parent[g]
    }

    /// Whether the edge `g --l--> g·l` belongs to the BFS spanning tree
    /// (in either direction).
    pub fn is_tree_edge(&self, g: usize, l: Letter) -> bool {
        let h = self.step(g, l);
        self.parent[h] == Some((g, l)) || self.parent[g] == Some((h, l.inverse()))
    }

    /// The tree path from the identity to `g`, as a word.
    pub fn transversal_word(&self, mut g: usize) -> Word {
        let mut rev = Vec::new();
        while let Some((p, l)) = self.parent[g] {
            rev.push(l);
            g = p;
        }
        rev.reverse();
        Word::new(rev)
    }
}

/// All of `SL₂(Z/m)` in breadth-first order from the identity.
pub fn enumerate_group(m: u64) -> Result<Vec<Mat2Mod>> {
    Ok(CayleyGraph::new(m)?.elements)
}

/// `|SL₂(Z/m)| = ∏ p^{3(a-1)} · p(p²-1)` over `p^a ∥ m`.
pub fn group_order(m: u64) -> u64 {
    factorize(m)
        .into_iter()
        .map(|(p, a)| p.pow(3 * (a - 1)) * p * (p * p - 1))
        .product()
}

/// `M ≡ I (mod m)`, decided by exact reduction.
pub fn gamma_membership(mat: &Mat2Z, m: u64) -> bool {
    if m == 0 {
        return *mat == Mat2Z::identity();
    }
    let bm = BigInt::from(m);
    let r = |x: &BigInt| x.mod_floor(&bm);
    let [a, b, c, d] = mat.entries();
    let one = BigInt::one().mod_floor(&bm);
    r(a) == one && r(b).is_zero() && r(c).is_zero() && r(d) == one
}

/// The sign map `Γ(2) → Z/4^* ≅ {±1}`, `M ↦ a₁₁ mod 4`.
pub fn pi2(mat: &Mat2Z) -> Result<i8> {
    if !gamma_membership(mat, 2) {
        return Err(Error::NotInGamma2);
    }
    Ok(if mat.a11().mod_floor(&BigInt::from(4)) == BigInt::one() {
        1
    } else {
        -1
    })
}

/// Size of the subgroup of `SL₂(Z/m)` generated by the reductions of
/// `words`, and whether it is everything.
pub fn generated_image(words: &[Word], m: u64) -> Result<(usize, bool)> {
    if m < 2 {
        return Err(Error::ModulusTooSmall(m));
    }
    let gens: Vec<Mat2Mod> = words.iter().map(|w| eval_word(w).reduce(m)).collect();
    let id = Mat2Mod::identity(m);
    let mut seen = std::collections::HashSet::from([id]);
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in &gens {
            let h = g * *s;
            if seen.insert(h) {
                queue.push_back(h);
            }
        }
    }
    let size = seen.len();
    Ok((size, size as u64 == group_order(m)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(s: &str) -> Word {
        s.parse().unwrap()
    }

    #[test]
    fn generator_matrices() {
        assert_eq!(eval_word(&w("a")), Mat2Z::from_i64(1, 0, -1, 1));
        assert_eq!(eval_word(&w("b")), Mat2Z::from_i64(1, 1, 0, 1));
        assert_eq!(eval_word(&w("abb").pow(2)), Mat2Z::minus_identity());
        assert_eq!(eval_word(&w("aba").pow(4)), Mat2Z::identity());
        assert_eq!(eval_word(&w("aba")), Mat2Z::from_i64(0, 1, -1, 0));
        assert_eq!(eval_word(&Word::empty()), Mat2Z::identity());
    }

    #[test]
    fn word_reduction_and_parsing() {
        assert_eq!(w("aAbB"), Word::empty());
        assert_eq!(w("abBa").to_string(), "aa");
        assert_eq!(Word::empty().to_string(), "1");
        assert_eq!(w("1"), Word::empty());
        assert!("abx".parse::<Word>().is_err());
        assert_eq!(w("ab").inverse(), w("BA"));
        assert_eq!(w("ab").pow(-2), w("BABA"));
    }

    #[test]
    fn group_orders() {
        for (m, d) in [(2, 6), (3, 24), (4, 48), (5, 120), (6, 144)] {
            assert_eq!(enumerate_group(m).unwrap().len(), d);
            assert_eq!(group_order(m), d as u64);
        }
    }

    #[test]
    fn bfs_tree_is_spanning() {
        let g = CayleyGraph::new(5).unwrap();
        let tree_edges = (0..g.order())
            .flat_map(|i| Letter::ALL.map(|l| (i, l)))
            .filter(|&(i, l)| g.is_tree_edge(i, l))
            .count();
        // Each tree edge is seen from both ends, once as `l` and once as `l⁻¹`.
        assert_eq!(tree_edges, 2 * (g.order() - 1));
        for i in 0..g.order() {
            assert_eq!(eval_word(&g.transversal_word(i)).reduce(5), g.elements()[i]);
        }
    }

    #[test]
    fn membership() {
        assert!(gamma_membership(&Mat2Z::identity(), 7));
        assert!(gamma_membership(&w("a").pow(5).eval(), 5));
        assert!(gamma_membership(&Mat2Z::u(6), 6));
        assert!(!gamma_membership(&w("a").eval(), 2));
    }

    #[test]
    fn sign_map() {
        assert_eq!(pi2(&Mat2Z::minus_identity()), Ok(-1));
        assert_eq!(pi2(&w("aa").eval()), Ok(1));
        assert_eq!(pi2(&w("bb").eval()), Ok(1));
        assert_eq!(pi2(&Mat2Z::u(2)), Ok(-1));
        assert_eq!(pi2(&w("a").eval()), Err(Error::NotInGamma2));
    }

    #[test]
    fn images() {
        assert_eq!(generated_image(&[w("a"), w("b")], 7).unwrap(), (336, true));
        assert!(generated_image(&[w("aa"), w("bb")], 3).unwrap().1);
        assert_eq!(generated_image(&[w("aa"), w("bb")], 2).unwrap(), (1, false));
    }

    #[test]
    fn serde_roundtrip() {
        let m = Mat2Z::u(6);
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(serde_json::from_str::<Mat2Z>(&s).unwrap(), m);
        let word = w("abAB");
        let s = serde_json::to_string(&word).unwrap();
        assert_eq!(s, "\"abAB\"");
        assert_eq!(serde_json::from_str::<Word>(&s).unwrap(), word);
    }

    fn letter() -> impl Strategy<Value = Letter> {
        prop_oneof![
            Just(Letter::S1),
            Just(Letter::S1Inv),
            Just(Letter::S2),
            Just(Letter::S2Inv)
        ]
    }

    fn word(max: usize) -> impl Strategy<Value = Word> {
        proptest::collection::vec(letter(), 0..max).prop_map(Word::new)
    }

    fn gamma2_element() -> impl Strategy<Value = (Mat2Z, i8)> {
        (-3i64..=3, -3i64..=3, -3i64..=3, any::<bool>()).prop_map(|(a, b, c, eps)| {
            let aa = w("aa").eval();
            let bb = w("bb").eval();
            let mut m = &(&aa.pow(a) * &bb.pow(b)) * &aa.pow(c);
            if eps {
                m = &m * &Mat2Z::minus_identity();
            }
            (m, if eps { -1 } else { 1 })
        })
    }

    proptest! {
        #[test]
        fn eval_is_homomorphism(v in word(12), u in word(12)) {
            prop_assert_eq!(eval_word(&v.concat(&u)), &eval_word(&v) * &eval_word(&u));
            prop_assert_eq!(eval_word(&v.inverse()), eval_word(&v).inverse());
        }

        #[test]
        fn determinant_one(v in word(20)) {
            prop_assert!(eval_word(&v).det().is_one());
        }

        #[test]
        fn crt_orders(m1 in 2u64..=6, m2 in 2u64..=6) {
            prop_assume!(m1.gcd(&m2) == 1);
            let prod = enumerate_group(m1 * m2).unwrap().len();
            prop_assert_eq!(prod, enumerate_group(m1).unwrap().len() * enumerate_group(m2).unwrap().len());
        }

        #[test]
        fn pi2_multiplicative((x, ex) in gamma2_element(), (y, ey) in gamma2_element()) {
            prop_assert_eq!(pi2(&x).unwrap(), ex);
            prop_assert_eq!(pi2(&(&x * &y)).unwrap(), ex * ey);
        }
    }
}
