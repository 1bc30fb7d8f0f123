use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A finitely generated abelian group `Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/d_k` in
/// invariant-factor form: every `dᵢ ≥ 2` and `dᵢ | dᵢ₊₁`.
///
/// The representation is canonical, so `==` decides isomorphism.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct AbelianGroup {
    free_rank: usize,
    invariant_factors: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self::default()
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            invariant_factors: Vec::new(),
        }
    }

    /// `Z/order`, where order 0 means `Z`.
    pub fn cyclic(order: impl Into<BigInt>) -> Self {
        Self::from_cyclic_orders(0, [order.into()])
    }

    /// Canonical form of `Z^free ⊕ ⊕ Z/cᵢ` for arbitrary orders `cᵢ`.
    /// Orders of 0 count as free summands, orders ±1 are dropped.
    pub fn from_cyclic_orders(free: usize, orders: impl IntoIterator<Item = BigInt>) -> Self {
        let mut free_rank = free;
        let mut c: Vec<BigInt> = Vec::new();
        for o in orders {
            let o = o.abs();
            if o.is_zero() {
                free_rank += 1;
            } else if !o.is_one() {
                c.push(o);
            }
        }
        // Pairwise (gcd, lcm) sweeps turn the list into a divisibility chain.
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                if !c[j].is_multiple_of(&c[i]) {
                    let g = c[i].gcd(&c[j]);
                    let l = c[i].lcm(&c[j]);
                    c[i] = g;
                    c[j] = l;
                }
            }
        }
        c.retain(|x| !x.is_one());
        AbelianGroup {
            free_rank,
            invariant_factors: c,
        }
    }

    pub fn free_rank(&self) -> usize {
        self.free_rank
    }

    pub fn invariant_factors(&self) -> &[BigInt] {
        &self.invariant_factors
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.invariant_factors.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.free_rank == 0
    }

    /// Order of the torsion subgroup.
    pub fn torsion_order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn torsion(&self) -> AbelianGroup {
        AbelianGroup {
            free_rank: 0,
            invariant_factors: self.invariant_factors.clone(),
        }
    }

    pub fn direct_sum(&self, other: &AbelianGroup) -> AbelianGroup {
        Self::from_cyclic_orders(
            self.free_rank + other.free_rank,
            self.invariant_factors
                .iter()
                .chain(&other.invariant_factors)
                .cloned(),
        )
    }

    pub fn direct_sum_all<'a>(groups: impl IntoIterator<Item = &'a AbelianGroup>) -> AbelianGroup {
        groups
            .into_iter()
            .fold(AbelianGroup::trivial(), |acc, g| acc.direct_sum(g))
    }

    /// `self ⊗ Z/q`.
    pub fn tensor_mod(&self, q: &BigInt) -> AbelianGroup {
        let orders = std::iter::repeat_n(q.clone(), self.free_rank)
            .chain(self.invariant_factors.iter().map(|d| d.gcd(q)));
        Self::from_cyclic_orders(0, orders)
    }

    /// `Tor(self, Z/q)`, which equals the `q`-torsion subgroup.
    pub fn tor_mod(&self, q: &BigInt) -> AbelianGroup {
        self.torsion_subgroup(q)
    }

    /// The subgroup `{x : q·x = 0}`.
    pub fn torsion_subgroup(&self, q: &BigInt) -> AbelianGroup {
        Self::from_cyclic_orders(0, self.invariant_factors.iter().map(|d| d.gcd(q)))
    }

    /// The `p`-primary component of the torsion subgroup.
    pub fn p_primary(&self, p: u64) -> AbelianGroup {
        let p = BigInt::from(p);
        let orders = self.invariant_factors.iter().map(|d| {
            let mut d = d.clone();
            let mut out = BigInt::one();
            while d.is_multiple_of(&p) {
                d /= &p;
                out *= &p;
            }
            out
        });
        Self::from_cyclic_orders(0, orders)
    }

    /// `d₁·…·d_k` decomposed into prime powers, in ascending order.
    pub fn elementary_divisors(&self) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        for d in &self.invariant_factors {
            let mut d = d.clone();
            let mut p = 2u64;
            while !d.is_one() {
                let bp = BigInt::from(p);
                if &bp * &bp > d {
                    let q = d.to_u64().expect("prime factor exceeds u64");
                    out.push((q, 1));
                    break;
                }
                let mut e = 0;
                while d.is_multiple_of(&bp) {
                    d /= &bp;
                    e += 1;
                }
                if e > 0 {
                    out.push((p, e));
                }
                p += 1;
            }
        }
        out.sort();
        out
    }
}

impl fmt::Display for AbelianGroup {
    /// `Z^3 + Z/2 + Z/4 + Z/4`; the trivial group prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for d in &self.invariant_factors {
            parts.push(format!("Z/{d}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

impl FromStr for AbelianGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::trivial());
        }
        let mut free = 0usize;
        let mut orders = Vec::new();
        for part in s.split('+') {
            let part = part.trim();
            if part == "Z" {
                free += 1;
            } else if let Some(r) = part.strip_prefix("Z^") {
                free += r
                    .parse::<usize>()
                    .map_err(|e| Error::Parse(format!("{part}: {e}")))?;
            } else if let Some(d) = part.strip_prefix("Z/") {
                let d: BigInt = d
                    .parse()
                    .map_err(|e| Error::Parse(format!("{part}: {e}")))?;
                if d < BigInt::from(2) {
                    return Err(Error::Parse(format!("invalid cyclic order in {part}")));
                }
                orders.push(d);
            } else {
                return Err(Error::Parse(format!("unrecognised summand {part:?}")));
            }
        }
        Ok(Self::from_cyclic_orders(free, orders))
    }
}

// Wire format: {"free_rank": r, "invariant_factors": [d1, d2, ...]}.
// Factors that do not fit in u64 are written as decimal strings.
impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("AbelianGroup", 2)?;
        st.serialize_field("free_rank", &self.free_rank)?;
        let factors: Vec<serde_json_like::Num> = self
            .invariant_factors
            .iter()
            .map(serde_json_like::Num::from)
            .collect();
        st.serialize_field("invariant_factors", &factors)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for AbelianGroup {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            free_rank: usize,
            invariant_factors: Vec<serde_json_like::Num>,
        }
        let raw = Raw::deserialize(deserializer)?;
        let mut factors = Vec::with_capacity(raw.invariant_factors.len());
        for n in raw.invariant_factors {
            factors.push(n.into_bigint().map_err(de::Error::custom)?);
        }
        let g = AbelianGroup::from_cyclic_orders(raw.free_rank, factors.iter().cloned());
        if g.invariant_factors != factors {
            return Err(de::Error::custom(
                "invariant_factors must be a divisibility chain of integers >= 2",
            ));
        }
        Ok(g)
    }
}

mod serde_json_like {
    use num_bigint::BigInt;
    use num_traits::ToPrimitive;
    use serde::{Deserialize, Serialize};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    pub enum Num {
        Small(u64),
        Big(String),
    }

    impl From<&BigInt> for Num {
        fn from(v: &BigInt) -> Self {
            match v.to_u64() {
                Some(x) => Num::Small(x),
                None => Num::Big(v.to_string()),
            }
        }
    }

    impl Num {
        pub fn into_bigint(self) -> Result<BigInt, String> {
            match self {
                Num::Small(x) => Ok(BigInt::from(x)),
                Num::Big(s) => s.parse().map_err(|e| format!("{s}: {e}")),
            }
        }
    }
}
