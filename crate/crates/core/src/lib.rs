//! Exact cohomology of principal congruence subgroups `Γ(m) ⊂ SL(2,Z)` and
//! of their preimages `B_Γ(m)` in the braid group `B₃`, with coefficients in
//! the symmetric powers `M_n` of the defining representation.
//!
//! The crate is layered bottom-up:
//!
//! * [`intlinalg`]: arbitrary-precision integer matrices, Smith normal form,
//!   kernels, cokernels and cochain cohomology;
//! * [`sl2`]: words and matrices in `SL(2,Z)`, `SL₂(Z/m)` enumeration and
//!   the `Γ(2)` sign map;
//! * [`presentation`]: Reidemeister–Schreier presentations of `Γ(m)`, the
//!   product models of `Γ(2)` and `B_Γ(m)`, Fox derivatives;
//! * [`symmpow`]: the action on `M_n` and invariant submodules;
//! * [`divided`]: divided power algebras and the closed-form predictors;
//! * [`cohomology`]: the cohomology engines and verifiers.
//!
//! All arithmetic is exact.

pub mod arith;
pub mod cohomology;
pub mod divided;
pub mod error;
pub mod intlinalg;
pub mod presentation;
pub mod sl2;
pub mod symmpow;

pub use error::{Error, Result};
pub use intlinalg::{AbelianGroup, IntMatrix, SmithForm};
