//! Cohomology of `Γ(m)` and `B_Γ(m)` with coefficients in `M_n`.
//!
//! * degrees 0 and 1 of any presented group come from the Fox complex
//!   `M → M^{gens} → M^{relators}`;
//! * `Γ(2) = F₂ × Z/2` is handled in all degrees by the product of the
//!   free resolution of `F₂` with the periodic resolution of `Z/2`;
//! * `B_Γ(m) = Γ̃ × Z` uses the product with the two-term resolution of `Z`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::arith::valuation;
use crate::error::{Error, Result};
use crate::intlinalg::{
    cochain_cohomology, cochain_cohomology_blocks, cokernel_group, eliminate, AbelianGroup,
    BlockSparseMatrix, IntMatrix, KernelLattice,
};
use crate::presentation::{
    b_gamma_model, gamma2_model, gamma_presentation, GroupPresentation, ProductModel,
};
use crate::sl2::Mat2Z;
use crate::symmpow::{invariant_submodule, rho, stacked_fixed_point_matrix};

/// A cochain complex `C⁰ → C¹ → … → C^k` of free abelian groups, optionally
/// tensored with `Z/q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CochainComplexSpec {
    differentials: Vec<IntMatrix>,
    modulus: u64,
}

impl CochainComplexSpec {
    pub fn new(differentials: Vec<IntMatrix>, modulus: u64) -> Result<Self> {
        if modulus == 1 {
            return Err(Error::ModulusTooSmall(1));
        }
        for (i, pair) in differentials.windows(2).enumerate() {
            if pair[1].cols() != pair[0].rows() {
                return Err(Error::DimensionMismatch(format!(
                    "d{} has {} columns, d{} has {} rows",
                    i + 1,
                    pair[1].cols(),
                    i,
                    pair[0].rows()
                )));
            }
            if !(&pair[1] * &pair[0]).is_zero() {
                return Err(Error::CompositionNonzero);
            }
        }
        Ok(CochainComplexSpec {
            differentials,
            modulus,
        })
    }

    pub fn differentials(&self) -> &[IntMatrix] {
        &self.differentials
    }

    /// `H⁰, …, H^k` where `k` is the number of differentials.
    pub fn cohomology(&self) -> Result<Vec<AbelianGroup>> {
        let d = &self.differentials;
        if d.is_empty() {
            return Ok(Vec::new());
        }
        let mut integral = Vec::with_capacity(d.len() + 2);
        for k in 0..=d.len() {
            let d_in = if k == 0 {
                IntMatrix::zeros(d[0].cols(), 0)
            } else {
                d[k - 1].clone()
            };
            let d_out = if k < d.len() {
                d[k].clone()
            } else {
                IntMatrix::zeros(0, d_in.rows())
            };
            integral.push(cochain_cohomology(&d_in, &d_out)?);
        }
        if self.modulus == 0 {
            return Ok(integral);
        }
        let q = BigInt::from(self.modulus);
        let mut out = Vec::with_capacity(integral.len());
        for k in 0..integral.len() {
            let mut g = integral[k].tensor_mod(&q);
            if let Some(next) = integral.get(k + 1) {
                g = g.direct_sum(&next.tor_mod(&q));
            }
            out.push(g);
        }
        Ok(out)
    }
}

/// Cohomology groups indexed by degree, with a description of the model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohomologyResult {
    pub model: String,
    pub m: Option<u64>,
    pub n: usize,
    pub modulus: u64,
    pub groups: BTreeMap<usize, AbelianGroup>,
}

impl CohomologyResult {
    pub fn get(&self, k: usize) -> Option<&AbelianGroup> {
        self.groups.get(&k)
    }

    pub fn h(&self, k: usize) -> AbelianGroup {
        self.groups.get(&k).cloned().unwrap_or_default()
    }
}

/// The Fox complex of a presentation in the representation `M_n`.
#[derive(Clone, Debug)]
pub struct FoxComplex {
    pub n: usize,
    /// `d⁰(v) = ((ρ(g)−I)v)_g`.
    pub d0: IntMatrix,
    /// Block `(r, g)` is the image of `∂r/∂g`.
    pub d1: BlockSparseMatrix,
}

impl FoxComplex {
    pub fn new(pres: &GroupPresentation, n: usize) -> FoxComplex {
        let vals = pres.generator_values();
        let mats: Vec<IntMatrix> = vals.iter().map(|g| rho(g, n)).collect();
        let inv: Vec<IntMatrix> = vals.iter().map(|g| rho(&g.inverse(), n)).collect();
        FoxComplex {
            n,
            d0: stacked_fixed_point_matrix(vals, n),
            d1: pres.fox_jacobian(&mats, &inv),
        }
    }

    /// `H⁰`, `H¹` over `Z` and the kernel lattice `Z¹ = ker d¹`.
    pub fn integral(&self) -> Result<(AbelianGroup, AbelianGroup, KernelLattice)> {
        let h0 = AbelianGroup::free(
            self.n + 1 - eliminate(&BlockSparseMatrix::from_dense(&self.d0)).rank(),
        );
        let (h1, z1) = cochain_cohomology_blocks(&self.d0, &self.d1)?;
        Ok((h0, h1, z1))
    }

    /// `coker d¹`, the degree-2 group of this (non-aspherical) complex; only
    /// needed for universal coefficients in degree 1.
    pub fn top_cokernel(&self) -> AbelianGroup {
        eliminate(&self.d1).cokernel()
    }
}

fn uct(h: &AbelianGroup, next: &AbelianGroup, q: u64) -> AbelianGroup {
    let q = BigInt::from(q);
    h.tensor_mod(&q).direct_sum(&next.tor_mod(&q))
}

/// `H⁰` and `H¹` of the presented group with coefficients in `M_n`
/// (`modulus = 0`) or `M_n ⊗ Z/q`.
pub fn presentation_cohomology(
    pres: &GroupPresentation,
    n: usize,
    modulus: u64,
) -> Result<CohomologyResult> {
    if modulus == 1 {
        return Err(Error::ModulusTooSmall(1));
    }
    let fox = FoxComplex::new(pres, n);
    let (h0, h1, _) = fox.integral()?;
    let (h0, h1) = if modulus == 0 {
        (h0, h1)
    } else {
        (
            uct(&h0, &h1, modulus),
            uct(&h1, &fox.top_cokernel(), modulus),
        )
    };
    Ok(CohomologyResult {
        model: pres.label().to_string(),
        m: None,
        n,
        modulus,
        groups: BTreeMap::from([(0, h0), (1, h1)]),
    })
}

/// `H⁰, H¹` of `Γ(m)` over `Z`.
pub fn gamma_cohomology(m: u64, n: usize) -> Result<CohomologyResult> {
    let pres = gamma_presentation(m)?;
    let mut r = presentation_cohomology(&pres, n, 0)?;
    r.m = Some(m);
    Ok(r)
}

/// Torsion of `coker d⁰`. Because `Z¹ ⊂ M^{gens}` is saturated, this equals
/// the torsion of `H¹` for any generating set, without using relators.
pub fn h1_torsion_from_coboundaries(gens: &[Mat2Z], n: usize) -> AbelianGroup {
    cokernel_group(&stacked_fixed_point_matrix(gens, n)).torsion()
}

fn block_diag(blocks: &[&IntMatrix]) -> IntMatrix {
    let rows = blocks.iter().map(|b| b.rows()).sum();
    let cols = blocks.iter().map(|b| b.cols()).sum();
    let mut out = IntMatrix::zeros(rows, cols);
    let (mut r, mut c) = (0, 0);
    for b in blocks {
        out.set_block(r, c, b);
        r += b.rows();
        c += b.cols();
    }
    out
}

/// The total complex of the product of `F₂ = ⟨A,B⟩` (vertical) and the
/// periodic resolution of `⟨w | w²⟩` (horizontal) with coefficients `M_n`.
/// `T^k = C^{0,k} ⊕ C^{1,k-1}` with `C^{0,q} = M`, `C^{1,q} = M²`.
pub fn gamma2_double_complex(n: usize, max_k: usize) -> Result<CochainComplexSpec> {
    let model = gamma2_model();
    let vals = model.base.generator_values();
    let dim = n + 1;
    let dv = stacked_fixed_point_matrix(vals, n);
    let w = rho(model.w_value().expect("Gamma(2) has a torsion factor"), n);
    let id = IntMatrix::identity(dim);
    let dh = |q: usize| {
        if q.is_multiple_of(2) {
            &w - &id
        } else {
            &w + &id
        }
    };
    let mut diffs = Vec::new();
    for k in 0..=max_k {
        // Source T^k: C^{0,k} (dim) then C^{1,k-1} (2·dim) if k ≥ 1.
        // Target T^{k+1}: C^{0,k+1} (dim) then C^{1,k} (2·dim).
        let src = if k == 0 { dim } else { 3 * dim };
        let mut d = IntMatrix::zeros(3 * dim, src);
        // C^{0,k} → C^{0,k+1}: d_h, and C^{0,k} → C^{1,k}: d_v.
        d.set_block(0, 0, &dh(k));
        d.set_block(dim, 0, &dv);
        if k >= 1 {
            // C^{1,k-1} → C^{1,k}: −d_h on each of the two blocks.
            let h = dh(k - 1).scale(&BigInt::from(-1));
            d.set_block(dim, dim, &block_diag(&[&h, &h]));
        }
        diffs.push(d);
    }
    CochainComplexSpec::new(diffs, 0)
}

/// `H^k(Γ(2); M_n)` as stated in closed form, with `H¹(F₂; M_n) = coker d⁰`.
pub fn gamma2_closed_form(n: usize, k: usize) -> AbelianGroup {
    let two = BigInt::from(2);
    let m_mod2 = AbelianGroup::free(n + 1).tensor_mod(&two);
    let mm_mod2 = AbelianGroup::free(2 * (n + 1)).tensor_mod(&two);
    let f2 = gamma2_model();
    let h1_f2 = cokernel_group(&stacked_fixed_point_matrix(f2.base.generator_values(), n));
    if n.is_multiple_of(2) {
        match k {
            0 => AbelianGroup::free(if n == 0 { 1 } else { 0 }),
            1 => h1_f2,
            k if k % 2 == 0 => m_mod2,
            _ => h1_f2.tensor_mod(&two),
        }
    } else {
        match k {
            0 => AbelianGroup::trivial(),
            k if k % 2 == 1 => m_mod2,
            _ => mm_mod2,
        }
    }
}

/// `H^k(Γ(2); M_n)` for `k ≤ max_k`, from the double complex, checked
/// against the closed forms.
pub fn gamma2_cohomology(n: usize, max_k: usize) -> Result<CohomologyResult> {
    let computed = gamma2_double_complex(n, max_k)?.cohomology()?;
    let mut groups = BTreeMap::new();
    for (k, g) in computed.into_iter().take(max_k + 1).enumerate() {
        let closed = gamma2_closed_form(n, k);
        if g != closed {
            return Err(Error::Mismatch {
                what: format!("H^{k}(Gamma(2); M_{n})"),
                left: g.to_string(),
                right: closed.to_string(),
            });
        }
        groups.insert(k, g);
    }
    Ok(CohomologyResult {
        model: "Gamma(2) = F2 x Z/2".into(),
        m: Some(2),
        n,
        modulus: 0,
        groups,
    })
}

/// `H⁰, H¹, H²` of `B_Γ(m)`.
///
/// The base complex is truncated to `M → Z¹` with `Z¹ = ker d¹`, which has
/// the cohomology of the free group `Γ(m)` (resp. `F₂` for `m = 2`); the
/// central factor contributes the differential `ρ(z) − I`.
pub fn b_gamma_cohomology(m: u64, n: usize) -> Result<CohomologyResult> {
    b_gamma_model_cohomology(&b_gamma_model(m)?, m, n)
}

/// As [`b_gamma_cohomology`], for an already constructed model.
pub fn b_gamma_model_cohomology(
    model: &ProductModel,
    m: u64,
    n: usize,
) -> Result<CohomologyResult> {
    let fox = FoxComplex::new(&model.base, n);
    let z1 = eliminate(&fox.d1).kernel();
    let basis = z1.basis();
    let c0 = z1.coordinates(&fox.d0);
    let z = rho(
        model
            .z_value()
            .expect("B_Gamma models have a central factor"),
        n,
    );
    let zi = &z - &IntMatrix::identity(n + 1);
    let gens = model.base.generator_count();
    let z_blocks = block_diag(&vec![&z; gens]);
    let zc = &z1.coordinates(&(&z_blocks * &basis)) - &IntMatrix::identity(z1.rank());
    let d0 = IntMatrix::vstack(&[&c0, &zi]);
    let minus_c0 = c0.scale(&BigInt::from(-1));
    let d1 = IntMatrix::hstack(&[&zc, &minus_c0]);
    let h = CochainComplexSpec::new(vec![d0, d1], 0)?.cohomology()?;
    Ok(CohomologyResult {
        model: format!("B_Gamma({m}) = {} x Z", model.base.label()),
        m: Some(m),
        n,
        modulus: 0,
        groups: h.into_iter().enumerate().collect(),
    })
}

/// Generators of `Γ(m)` used for invariants: the presentation generators,
/// which for `m = 2` include `w₂`.
pub fn gamma_generators(m: u64) -> Result<Vec<Mat2Z>> {
    Ok(gamma_presentation(m)?.generator_values().to_vec())
}

/// `(M_n ⊗ Z/p^a)^{Γ(m)} ≅ H¹(Γ(m); M_n)[p^a]`, valid since `H⁰ = 0` for `n > 0`.
pub fn uct_check(m: u64, n: usize, p: u64, a: u32) -> Result<bool> {
    if n == 0 {
        return Err(Error::BadDegree(0));
    }
    let q = p.pow(a);
    let gens = gamma_generators(m)?;
    let lhs = invariant_submodule(&gens, n, q)?.group;
    let h = gamma_cohomology(m, n)?;
    if !h.h(0).is_trivial() {
        return Ok(false);
    }
    Ok(lhs == h.h(1).torsion_subgroup(&BigInt::from(q)))
}

/// Minimal exponent `e_k` such that `p^{e_k} x^{n-k} y^k` lies in the span of
/// `{c · x^{di} y^{dj} : di + dj = n, p^{b-a} | cd}`.
fn steinberg_exponents(p: u64, shift: u32, n: usize) -> Vec<u32> {
    (0..=n)
        .map(|k| {
            let g = num_integer::gcd(n - k, k) as u64;
            let best = if g == 0 {
                shift
            } else {
                (1..=g)
                    .filter(|d| g.is_multiple_of(*d))
                    .map(|d| valuation(p, d))
                    .max()
                    .unwrap_or(0)
            };
            shift.saturating_sub(best)
        })
        .collect()
}

/// Invariants of `Γ(m)` and `Γ(p^a)` modulo `p^b` coincide and are spanned
/// by polynomials `c · P(x^d, y^d)` with `p^{b-a} | cd`.
pub fn steinberg_check(m: u64, p: u64, a: u32, b: u32, n: usize) -> Result<bool> {
    if a > b {
        return Err(Error::BadParams(format!("a = {a} exceeds b = {b}")));
    }
    if a == 0 || m < 2 || valuation(p, m) != a {
        return Err(Error::BadParams(format!(
            "{p}^{a} does not exactly divide {m}"
        )));
    }
    let q = p.pow(b);
    let inv_m = invariant_submodule(&gamma_generators(m)?, n, q)?;
    let inv_pa = invariant_submodule(&gamma_generators(p.pow(a))?, n, q)?;
    if inv_m.generators != inv_pa.generators {
        return Ok(false);
    }
    let e = steinberg_exponents(p, b - a, n);
    Ok(inv_m
        .generators
        .iter()
        .all(|g| g.iter().zip(&e).all(|(&c, &ek)| c % p.pow(ek) == 0)))
}

/// Rank of `H¹(Γ(m); M_n ⊗ Q)` minus rank of `H⁰`; `(r−1)(n+1)` for free `Γ(m)`.
pub fn euler_defect(result: &CohomologyResult) -> i64 {
    result.h(1).free_rank() as i64 - result.h(0).free_rank() as i64
}
