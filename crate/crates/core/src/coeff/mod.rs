//! Exact characteristic-p coefficient rings and the linear algebra used for
//! every invariant-subspace computation.

mod algebra;
mod field;
mod linalg;

pub use algebra::{AbelianGroupAlgebraElem, CharPRing};
pub use field::{FpElem, PrimeField};
pub use linalg::{commutant_basis, commutant_dim, nullspace, rank, rref, SparseMatrix, SparseVec, Subspace};
