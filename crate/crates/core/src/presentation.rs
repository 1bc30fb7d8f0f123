//! Finite presentations of `SL(2,Z)`, of `Γ(m)` by Reidemeister–Schreier
//! rewriting, the product models of `Γ(2)` and `B_Γ(m)`, and Fox calculus.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intlinalg::{cokernel_group, AbelianGroup, BlockSparseMatrix, IntMatrix};
use crate::sl2::{gamma_membership, CayleyGraph, Letter, Mat2Z, Word};

/// A generator of a presentation raised to `±1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Syllable {
    pub gen: usize,
    pub inverse: bool,
}

impl Syllable {
    pub fn pos(gen: usize) -> Syllable {
        Syllable {
            gen,
            inverse: false,
        }
    }

    pub fn neg(gen: usize) -> Syllable {
        Syllable { gen, inverse: true }
    }

    pub fn invert(self) -> Syllable {
        Syllable {
            gen: self.gen,
            inverse: !self.inverse,
        }
    }

    /// `+(gen+1)` or `-(gen+1)`.
    pub fn signed_index(self) -> i64 {
        let i = self.gen as i64 + 1;
        if self.inverse {
            -i
        } else {
            i
        }
    }

    pub fn from_signed_index(i: i64) -> Result<Syllable> {
        if i == 0 {
            return Err(Error::Parse("generator index 0 in relator".into()));
        }
        Ok(Syllable {
            gen: (i.unsigned_abs() - 1) as usize,
            inverse: i < 0,
        })
    }
}

/// A freely reduced word in the abstract generators of a presentation.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FreeWord(Vec<Syllable>);

impl FreeWord {
    pub fn empty() -> FreeWord {
        FreeWord(Vec::new())
    }

    pub fn new(syllables: impl IntoIterator<Item = Syllable>) -> FreeWord {
        let mut out: Vec<Syllable> = Vec::new();
        for s in syllables {
            if out.last() == Some(&s.invert()) {
                out.pop();
            } else {
                out.push(s);
            }
        }
        FreeWord(out)
    }

    pub fn syllables(&self) -> &[Syllable] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &FreeWord) -> FreeWord {
        FreeWord::new(self.0.iter().chain(&other.0).copied())
    }

    pub fn inverse(&self) -> FreeWord {
        FreeWord(self.0.iter().rev().map(|s| s.invert()).collect())
    }

    pub fn pow(&self, k: usize) -> FreeWord {
        (0..k).fold(FreeWord::empty(), |acc, _| acc.concat(self))
    }

    pub fn signed_indices(&self) -> Vec<i64> {
        self.0.iter().map(|s| s.signed_index()).collect()
    }

    pub fn from_signed_indices(v: &[i64]) -> Result<FreeWord> {
        Ok(FreeWord::new(
            v.iter()
                .map(|&i| Syllable::from_signed_index(i))
                .collect::<Result<Vec<_>>>()?,
        ))
    }

    /// Exponent sum of each generator.
    pub fn exponent_sums(&self, ngens: usize) -> Vec<i64> {
        let mut out = vec![0; ngens];
        for s in &self.0 {
            out[s.gen] += if s.inverse { -1 } else { 1 };
        }
        out
    }

    fn max_gen(&self) -> Option<usize> {
        self.0.iter().map(|s| s.gen).max()
    }
}

/// Integer combination of free-group elements, an element of `Z[F]`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoxSum(BTreeMap<FreeWord, i64>);

impl FoxSum {
    pub fn zero() -> FoxSum {
        FoxSum::default()
    }

    pub fn term(w: FreeWord, c: i64) -> FoxSum {
        let mut s = FoxSum::zero();
        s.add_term(w, c);
        s
    }

    pub fn add_term(&mut self, w: FreeWord, c: i64) {
        let e = self.0.entry(w).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.retain(|_, v| *v != 0);
        }
    }

    pub fn add(&self, other: &FoxSum) -> FoxSum {
        let mut out = self.clone();
        for (w, &c) in &other.0 {
            out.add_term(w.clone(), c);
        }
        out
    }

    /// Ring product in `Z[F]`.
    pub fn mul(&self, other: &FoxSum) -> FoxSum {
        let mut out = FoxSum::zero();
        for (u, &a) in &self.0 {
            for (v, &b) in &other.0 {
                out.add_term(u.concat(v), a * b);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FreeWord, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }
}

/// `∂r/∂x` for the generator with index `gen`.
pub fn fox_derivative(relator: &FreeWord, gen: usize) -> FoxSum {
    let mut out = FoxSum::zero();
    let mut prefix = FreeWord::empty();
    for &s in relator.syllables() {
        if s.gen == gen {
            if s.inverse {
                out.add_term(prefix.concat(&FreeWord(vec![s])), -1);
            } else {
                out.add_term(prefix.clone(), 1);
            }
        }
        prefix = prefix.concat(&FreeWord(vec![s]));
    }
    out
}

/// Generators with values in `SL(2,Z)` and relators in those generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PresentationData", into = "PresentationData")]
pub struct GroupPresentation {
    label: String,
    names: Vec<String>,
    words: Vec<Word>,
    values: Vec<Mat2Z>,
    relators: Vec<FreeWord>,
}

/// Serialized form of a [`GroupPresentation`]; relators are lists of signed
/// one-based generator indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PresentationData {
    pub label: String,
    pub names: Vec<String>,
    pub words: Vec<Word>,
    pub values: Vec<Mat2Z>,
    pub relators: Vec<Vec<i64>>,
}

impl TryFrom<PresentationData> for GroupPresentation {
    type Error = Error;

    fn try_from(d: PresentationData) -> Result<Self> {
        let relators = d
            .relators
            .iter()
            .map(|r| FreeWord::from_signed_indices(r))
            .collect::<Result<Vec<_>>>()?;
        let p = GroupPresentation::new(d.label, d.names, d.words, relators)?;
        if p.values != d.values {
            return Err(Error::Parse(
                "stored generator values disagree with their words".into(),
            ));
        }
        Ok(p)
    }
}

impl From<GroupPresentation> for PresentationData {
    fn from(p: GroupPresentation) -> Self {
        PresentationData {
            relators: p.relators.iter().map(FreeWord::signed_indices).collect(),
            label: p.label,
            names: p.names,
            words: p.words,
            values: p.values,
        }
    }
}

impl GroupPresentation {
    /// Checked constructor: generator words must be distinct and every
    /// relator must evaluate to the identity.
    pub fn new(
        label: impl Into<String>,
        names: Vec<String>,
        words: Vec<Word>,
        relators: Vec<FreeWord>,
    ) -> Result<GroupPresentation> {
        if names.len() != words.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} names for {} generators",
                names.len(),
                words.len()
            )));
        }
        let mut seen = HashSet::new();
        for (name, w) in names.iter().zip(&words) {
            if !seen.insert(w) {
                return Err(Error::DuplicateGenerator(format!("{name} = {w}")));
            }
        }
        let mut seen_names = HashSet::new();
        for name in &names {
            if !seen_names.insert(name) {
                return Err(Error::DuplicateGenerator(name.clone()));
            }
        }
        let values: Vec<Mat2Z> = words.iter().map(Word::eval).collect();
        let p = GroupPresentation {
            label: label.into(),
            names,
            words,
            values,
            relators,
        };
        for (index, r) in p.relators.iter().enumerate() {
            if r.max_gen().is_some_and(|g| g >= p.words.len()) {
                return Err(Error::UnknownSymbol(format!(
                    "generator index in relator {index}"
                )));
            }
            if p.evaluate(r) != Mat2Z::identity() {
                return Err(Error::RelatorNotTrivial { index });
            }
        }
        Ok(p)
    }

    /// A free presentation (no relators).
    pub fn free(label: impl Into<String>, gens: &[(&str, Word)]) -> Result<GroupPresentation> {
        GroupPresentation::new(
            label,
            gens.iter().map(|(n, _)| n.to_string()).collect(),
            gens.iter().map(|(_, w)| w.clone()).collect(),
            Vec::new(),
        )
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn generator_words(&self) -> &[Word] {
        &self.words
    }

    pub fn generator_values(&self) -> &[Mat2Z] {
        &self.values
    }

    pub fn relators(&self) -> &[FreeWord] {
        &self.relators
    }

    pub fn generator_count(&self) -> usize {
        self.words.len()
    }

    pub fn generator_index(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// Parses `"x y X"`-style text: space-separated names, with a trailing
    /// `^-1` or an upper-cased single-letter name for inverses.
    pub fn parse_word(&self, text: &str) -> Result<FreeWord> {
        let mut out = Vec::new();
        for tok in text.split_whitespace() {
            if let Some(base) = tok.strip_suffix("^-1") {
                out.push(Syllable::neg(self.generator_index(base)?));
            } else if let Ok(i) = self.generator_index(tok) {
                out.push(Syllable::pos(i));
            } else {
                let lower = tok.to_lowercase();
                if lower != tok {
                    out.push(Syllable::neg(self.generator_index(&lower)?));
                } else {
                    return Err(Error::UnknownSymbol(tok.to_string()));
                }
            }
        }
        Ok(FreeWord::new(out))
    }

    pub fn evaluate(&self, w: &FreeWord) -> Mat2Z {
        w.syllables().iter().fold(Mat2Z::identity(), |acc, s| {
            let v = &self.values[s.gen];
            if s.inverse {
                &acc * &v.inverse()
            } else {
                &acc * v
            }
        })
    }

    /// `∂r/∂x` for the generator called `name`.
    pub fn fox_derivative(&self, relator: &FreeWord, name: &str) -> Result<FoxSum> {
        let g = self.generator_index(name)?;
        if relator
            .max_gen()
            .is_some_and(|x| x >= self.generator_count())
        {
            return Err(Error::UnknownSymbol(format!(
                "generator index in {relator:?}"
            )));
        }
        Ok(fox_derivative(relator, g))
    }

    /// Relator-by-generator exponent-sum matrix.
    pub fn exponent_matrix(&self) -> IntMatrix {
        let k = self.generator_count();
        let rows: Vec<Vec<i64>> = self.relators.iter().map(|r| r.exponent_sums(k)).collect();
        if rows.is_empty() {
            return IntMatrix::zeros(0, k);
        }
        IntMatrix::from_rows(&rows)
    }

    /// `G^{ab} = Z^{gens} / ⟨relator exponent vectors⟩`.
    pub fn abelianization(&self) -> AbelianGroup {
        cokernel_group(&self.exponent_matrix().transpose())
    }

    /// The Fox Jacobian evaluated in a representation: block `(r, x)` is the
    /// image of `∂r/∂x`. `mats[x]` and `inv[x]` are the images of `x` and
    /// `x⁻¹`.
    pub fn fox_jacobian(&self, mats: &[IntMatrix], inv: &[IntMatrix]) -> BlockSparseMatrix {
        let dim = mats.first().map_or(1, IntMatrix::rows);
        let mut out = BlockSparseMatrix::new(dim, self.relators.len(), self.generator_count());
        for (ri, r) in self.relators.iter().enumerate() {
            let mut prefix = IntMatrix::identity(dim);
            let mut blocks: BTreeMap<usize, IntMatrix> = BTreeMap::new();
            for s in r.syllables() {
                if s.inverse {
                    prefix = &prefix * &inv[s.gen];
                    let b = blocks
                        .entry(s.gen)
                        .or_insert_with(|| IntMatrix::zeros(dim, dim));
                    b.sub_assign_ref(&prefix);
                } else {
                    let b = blocks
                        .entry(s.gen)
                        .or_insert_with(|| IntMatrix::zeros(dim, dim));
                    b.add_assign_ref(&prefix);
                    prefix = &prefix * &mats[s.gen];
                }
            }
            for (g, b) in blocks {
                if !b.is_zero() {
                    out.add_block(ri, g, &b);
                }
            }
        }
        out
    }
}

impl fmt::Display for GroupPresentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}: {} generators, {} relators",
            self.label,
            self.generator_count(),
            self.relators.len()
        )
    }
}

/// `SL(2,Z) = ⟨a, b | aba = bab, (aba)⁴⟩` with `a ↦ s₁`, `b ↦ s₂`.
pub fn sl2_presentation() -> GroupPresentation {
    let (a, b) = (Syllable::pos(0), Syllable::pos(1));
    let (ai, bi) = (a.invert(), b.invert());
    GroupPresentation::new(
        "SL(2,Z)",
        vec!["a".into(), "b".into()],
        vec![Word::letter(Letter::S1), Word::letter(Letter::S2)],
        vec![
            FreeWord::new([a, b, a, bi, ai, bi]),
            FreeWord::new([a, b, a]).pow(4),
        ],
    )
    .expect("SL(2,Z) relators hold")
}

fn syllable_letter(s: Syllable) -> Letter {
    let l = if s.gen == 0 { Letter::S1 } else { Letter::S2 };
    if s.inverse {
        l.inverse()
    } else {
        l
    }
}

/// Reidemeister–Schreier presentation of `Γ(m)` from the BFS transversal of
/// `SL₂(Z/m)`. Non-tree edges `(g, s)` give generators `t_g · s · t_{gs}⁻¹`.
pub fn schreier_presentation(m: u64) -> Result<GroupPresentation> {
    if m < 3 {
        return Err(Error::MTooSmall { m, min: 3 });
    }
    let graph = CayleyGraph::new(m)?;
    let base = sl2_presentation();
    let mut gen_of: HashMap<(usize, usize), usize> = HashMap::new();
    let mut words = Vec::new();
    let mut names = Vec::new();
    for g in 0..graph.order() {
        for (k, l) in [Letter::S1, Letter::S2].into_iter().enumerate() {
            if graph.is_tree_edge(g, l) {
                continue;
            }
            let h = graph.step(g, l);
            let w = graph
                .transversal_word(g)
                .concat(&Word::letter(l))
                .concat(&graph.transversal_word(h).inverse());
            gen_of.insert((g, k), words.len());
            names.push(format!("x{}", words.len()));
            words.push(w);
        }
    }
    let mut relators = Vec::new();
    for t in 0..graph.order() {
        for r in base.relators() {
            let mut cur = t;
            let mut out = Vec::new();
            for &s in r.syllables() {
                let l = syllable_letter(s);
                if s.inverse {
                    let prev = graph.step(cur, l);
                    if let Some(&x) = gen_of.get(&(prev, s.gen)) {
                        out.push(Syllable::neg(x));
                    }
                    cur = prev;
                } else {
                    if let Some(&x) = gen_of.get(&(cur, s.gen)) {
                        out.push(Syllable::pos(x));
                    }
                    cur = graph.step(cur, l);
                }
            }
            debug_assert_eq!(cur, t);
            let w = FreeWord::new(out);
            if !w.is_empty() {
                relators.push(w);
            }
        }
    }
    let p = GroupPresentation::new(format!("Gamma({m})"), names, words, relators)?;
    debug_assert!(p.values.iter().all(|v| gamma_membership(v, m)));
    Ok(p)
}

/// A presentation `P` together with a central factor and an optional
/// order-2 factor: the group `⟨P⟩ × ⟨z⟩ (× ⟨w | w²⟩)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProductModel {
    pub base: GroupPresentation,
    /// The infinite cyclic central factor `z` and its image in `SL(2,Z)`.
    pub central: Option<(String, Mat2Z)>,
    /// The order-two factor and its image.
    pub torsion: Option<(String, Mat2Z)>,
}

impl ProductModel {
    pub fn new(
        base: GroupPresentation,
        central: Option<(String, Mat2Z)>,
        torsion: Option<(String, Mat2Z)>,
    ) -> Result<ProductModel> {
        for (_, v) in central.iter().chain(&torsion) {
            for (i, g) in base.generator_values().iter().enumerate() {
                if (v * g) != (g * v) {
                    return Err(Error::NotCentral(i));
                }
            }
        }
        if let Some((_, w)) = &torsion {
            if (w * w) != Mat2Z::identity() {
                return Err(Error::BadParams(
                    "torsion letter must have order dividing 2".into(),
                ));
            }
        }
        Ok(ProductModel {
            base,
            central,
            torsion,
        })
    }

    pub fn z_value(&self) -> Option<&Mat2Z> {
        self.central.as_ref().map(|(_, v)| v)
    }

    pub fn w_value(&self) -> Option<&Mat2Z> {
        self.torsion.as_ref().map(|(_, v)| v)
    }
}

fn gamma2_free_part() -> GroupPresentation {
    GroupPresentation::free(
        "F2 = <s1^2, s2^2>",
        &[
            ("A", Word::letter(Letter::S1).pow(2)),
            ("B", Word::letter(Letter::S2).pow(2)),
        ],
    )
    .expect("free presentation")
}

/// `Γ(2) = F₂ × Z/2` with `F₂ = ⟨s₁², s₂²⟩` and `Z/2 = ⟨w₂ = -I⟩`.
pub fn gamma2_model() -> ProductModel {
    ProductModel::new(gamma2_free_part(), None, Some(("w".into(), w2().eval())))
        .expect("-I is central")
}

/// `w₂ = (s₁ s₂ s₂)²`.
pub fn w2() -> Word {
    "abb".parse::<Word>().unwrap().pow(2)
}

/// The presentation `⟨A, B, w | w², [A,w], [B,w]⟩` of `Γ(2)`.
pub fn gamma2_presentation() -> GroupPresentation {
    let (a, b, w) = (Syllable::pos(0), Syllable::pos(1), Syllable::pos(2));
    GroupPresentation::new(
        "Gamma(2)",
        vec!["A".into(), "B".into(), "w".into()],
        vec![
            Word::letter(Letter::S1).pow(2),
            Word::letter(Letter::S2).pow(2),
            w2(),
        ],
        vec![
            FreeWord::new([w, w]),
            FreeWord::new([a, w, a.invert(), w.invert()]),
            FreeWord::new([b, w, b.invert(), w.invert()]),
        ],
    )
    .expect("Gamma(2) relators hold")
}

/// The image of `Γ(m)` in its chosen presentation: Schreier for `m ≥ 3`,
/// the product presentation for `m = 2`.
pub fn gamma_presentation(m: u64) -> Result<GroupPresentation> {
    match m {
        2 => Ok(gamma2_presentation()),
        _ => schreier_presentation(m),
    }
}

/// `B_Γ(m) ≅ Γ̃ × Z`. For `m > 2` the base is the Schreier presentation and
/// the central generator acts trivially; for `m = 2` the base is `⟨s₁², s₂²⟩`
/// and the central generator maps to `-I`.
pub fn b_gamma_model(m: u64) -> Result<ProductModel> {
    match m {
        0 | 1 => Err(Error::MTooSmall { m, min: 2 }),
        2 => ProductModel::new(gamma2_free_part(), Some(("z".into(), w2().eval())), None),
        _ => b_gamma_model_over(schreier_presentation(m)?),
    }
}

/// `base × ⟨z⟩` with `z` acting trivially.
pub fn b_gamma_model_over(base: GroupPresentation) -> Result<ProductModel> {
    ProductModel::new(base, Some(("z".into(), Mat2Z::identity())), None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intlinalg::smith_divisors;
    use crate::sl2::group_order;
    use crate::symmpow::rho;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn xy() -> GroupPresentation {
        GroupPresentation::free(
            "free",
            &[("x", "a".parse().unwrap()), ("y", "b".parse().unwrap())],
        )
        .unwrap()
    }

    #[test]
    fn sl2_relators_and_abelianization() {
        let p = sl2_presentation();
        for r in p.relators() {
            assert_eq!(p.evaluate(r), Mat2Z::identity());
        }
        assert_eq!(p.abelianization(), AbelianGroup::cyclic(12));
    }

    #[test]
    fn construction_checks() {
        let bad = GroupPresentation::new(
            "bad",
            vec!["a".into()],
            vec!["a".parse().unwrap()],
            vec![FreeWord::new([Syllable::pos(0)])],
        );
        assert_eq!(bad, Err(Error::RelatorNotTrivial { index: 0 }));
        let dup = GroupPresentation::free(
            "dup",
            &[("a", "a".parse().unwrap()), ("b", "a".parse().unwrap())],
        );
        assert!(matches!(dup, Err(Error::DuplicateGenerator(_))));
        assert_eq!(
            schreier_presentation(2),
            Err(Error::MTooSmall { m: 2, min: 3 })
        );
    }

    #[test]
    fn fox_examples() {
        let p = xy();
        let one = FoxSum::term(FreeWord::empty(), 1);
        assert_eq!(
            p.fox_derivative(&p.parse_word("x y").unwrap(), "x")
                .unwrap(),
            one
        );
        let xinv = p.parse_word("X").unwrap();
        assert_eq!(
            p.fox_derivative(&xinv, "x").unwrap(),
            FoxSum::term(xinv.clone(), -1)
        );
        let comm = p.parse_word("x y X Y").unwrap();
        let mut expected = FoxSum::term(p.parse_word("x").unwrap(), 1);
        expected.add_term(comm.clone(), -1);
        assert_eq!(p.fox_derivative(&comm, "y").unwrap(), expected);
        assert_eq!(
            p.fox_derivative(&comm, "z"),
            Err(Error::UnknownSymbol("z".into()))
        );
    }

    /// `Σ_x (∂r/∂x)(x − 1) = r − 1` in `Z[F]`.
    fn fox_identity_holds(r: &FreeWord, ngens: usize) -> bool {
        let mut lhs = FoxSum::zero();
        for x in 0..ngens {
            let mut xm1 = FoxSum::term(FreeWord::new([Syllable::pos(x)]), 1);
            xm1.add_term(FreeWord::empty(), -1);
            lhs = lhs.add(&fox_derivative(r, x).mul(&xm1));
        }
        let mut rhs = FoxSum::term(r.clone(), 1);
        rhs.add_term(FreeWord::empty(), -1);
        lhs == rhs
    }

    #[test]
    fn schreier_ranks() {
        for (m, rank) in [(3, 3), (4, 5), (5, 11), (6, 13)] {
            let p = schreier_presentation(m).unwrap();
            let d = group_order(m) as usize;
            assert_eq!(p.generator_count(), d + 1);
            assert_eq!(p.relators().len(), 2 * d);
            assert!(p.generator_values().iter().all(|v| gamma_membership(v, m)));
            let ab = p.abelianization();
            assert_eq!(ab, AbelianGroup::free(rank));
            let divs = smith_divisors(&p.exponent_matrix());
            assert!(divs.iter().all(|x| x.is_zero() || x.is_one()));
        }
    }

    #[test]
    fn schreier_fox_identity_in_representation() {
        let p = schreier_presentation(3).unwrap();
        let n = 2;
        let mats: Vec<IntMatrix> = p.generator_values().iter().map(|g| rho(g, n)).collect();
        let inv: Vec<IntMatrix> = p
            .generator_values()
            .iter()
            .map(|g| rho(&g.inverse(), n))
            .collect();
        let j = p.fox_jacobian(&mats, &inv);
        let d0 = IntMatrix::vstack(
            &mats
                .iter()
                .map(|m| m.minus_identity())
                .collect::<Vec<_>>()
                .iter()
                .collect::<Vec<_>>(),
        );
        assert!(j.mul_dense(&d0).is_zero());
        for r in p.relators().iter().take(10) {
            assert!(fox_identity_holds(r, p.generator_count()));
        }
    }

    #[test]
    fn product_models() {
        let g2 = gamma2_model();
        assert_eq!(g2.base.generator_values()[0], Mat2Z::from_i64(1, 0, -2, 1));
        assert_eq!(g2.base.generator_values()[1], Mat2Z::from_i64(1, 2, 0, 1));
        assert_eq!(g2.w_value(), Some(&Mat2Z::minus_identity()));
        assert!(g2.z_value().is_none());
        assert_eq!(
            b_gamma_model(3).unwrap().z_value(),
            Some(&Mat2Z::identity())
        );
        let b2 = b_gamma_model(2).unwrap();
        assert_eq!(b2.z_value(), Some(&Mat2Z::minus_identity()));
        assert_eq!(b2.base.generator_words()[0].to_string(), "aa");
        assert_eq!(b2.base.generator_words()[1].to_string(), "bb");
        let not_central = ProductModel::new(
            gamma2_free_part(),
            Some(("z".into(), "a".parse::<Word>().unwrap().eval())),
            None,
        );
        assert_eq!(not_central, Err(Error::NotCentral(1)));
        assert_eq!(
            gamma2_presentation().abelianization(),
            "Z^2 + Z/2".parse().unwrap()
        );
    }

    #[test]
    fn serde_roundtrip() {
        let p = schreier_presentation(3).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        let q: GroupPresentation = serde_json::from_str(&s).unwrap();
        assert_eq!(p, q);
        let mut data: PresentationData = p.into();
        data.relators[0].push(1);
        let s = serde_json::to_string(&data).unwrap();
        assert!(serde_json::from_str::<GroupPresentation>(&s).is_err());
    }

    fn free_word(ngens: usize) -> impl Strategy<Value = FreeWord> {
        proptest::collection::vec((0..ngens, any::<bool>()), 0..10).prop_map(|v| {
            FreeWord::new(
                v.into_iter()
                    .map(|(gen, inverse)| Syllable { gen, inverse }),
            )
        })
    }

    proptest! {
        #[test]
        fn fundamental_identity(r in free_word(3)) {
            prop_assert!(fox_identity_holds(&r, 3));
        }

        #[test]
        fn product_rule(u in free_word(3), v in free_word(3), x in 0usize..3) {
            let lhs = fox_derivative(&u.concat(&v), x);
            let rhs = fox_derivative(&u, x).add(&FoxSum::term(u.clone(), 1).mul(&fox_derivative(&v, x)));
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn jacobian_matches_formal_derivative(r in free_word(2), n in 0usize..3) {
            let p = xy();
            let mats: Vec<IntMatrix> = p.generator_values().iter().map(|g| rho(g, n)).collect();
            let inv: Vec<IntMatrix> = p.generator_values().iter().map(|g| rho(&g.inverse(), n)).collect();
            let q = GroupPresentation { relators: vec![r.clone()], ..p.clone() };
            let j = q.fox_jacobian(&mats, &inv);
            for x in 0..2 {
                let mut formal = IntMatrix::zeros(n + 1, n + 1);
                for (w, c) in fox_derivative(&r, x).terms() {
                    formal = &formal + &rho(&p.evaluate(w), n).scale(&BigInt::from(c));
                }
                let block = j.block(0, x).cloned().unwrap_or_else(|| IntMatrix::zeros(n + 1, n + 1));
                prop_assert_eq!(block, formal);
            }
        }
    }
}
