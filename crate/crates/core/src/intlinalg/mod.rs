//! Exact integer linear algebra.

mod abelian;
mod elimination;
mod kernel;
mod matrix;
mod smith;

pub use abelian::AbelianGroup;
pub use elimination::{eliminate, BlockSparseMatrix, Elimination, KernelLattice};
pub use kernel::{
    cochain_cohomology, cochain_cohomology_blocks, cokernel_group, howell_form, kernel_basis,
    kernel_basis_snf, kernel_mod, ModKernel,
};
pub use matrix::IntMatrix;
pub use smith::{smith_divisors, smith_normal_form, SmithForm};

pub(crate) use smith::smith_right;
