//! Computational tools around Tverberg-type theorems for simplicial complexes.
//!
//! * [`complex`]: simplicial complexes, deletion `X − σ`, links, stars, cones
//!   and enumeration of pairwise disjoint face tuples.
//! * [`chain`], [`matrix`], [`field`]: exact homology over prime fields.
//! * [`deleted`]: the deleted product `X^(r)` of ordered tuples of pairwise
//!   disjoint faces, its cellular chain complex, and the free action of
//!   `Z_a^m` by permutation of the factors.
//! * [`acyclicity`]: `n`-acyclicity, `s`-complementary `n`-acyclicity and
//!   the fiber condition on `(X − σ)^(r−1)`.
//! * [`spectral`]: the filtration of `X^(r)` by preimages of skeleta under the
//!   first-factor projection, its `E¹` page and the row-zero differential.
//! * [`refinement`]: affine refinement witnesses and barycentric subdivision.
//! * [`tverberg`]: exact Tverberg witnesses for maps affine on faces.

pub mod acyclicity;
pub mod chain;
pub mod complex;
pub mod deleted;
pub mod dense;
pub mod error;
pub mod field;
pub mod io;
pub mod lp;
pub mod matrix;
pub mod rational;
pub mod refinement;
pub mod spectral;
pub mod tverberg;

pub use chain::{
    betti, chain_complex, homology_of_chain_complex, is_n_acyclic, reduced_betti, ChainComplexGF,
    HomologyProfile,
};
pub use complex::{FaceTuple, Simplex, SimplicialComplex};
pub use deleted::{DeletedProductComplex, GroupAction, ProductCell};
pub use error::{Error, Result, Verdict};
pub use field::PrimeField;
pub use matrix::MatrixGF;

#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}

/// Leftmost `Some` of `f` over `items`; with the parallel feature the checks
/// run concurrently but the result is still the leftmost hit.
#[cfg(feature = "parallel")]
pub(crate) fn par_find_map_first<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Option<R> + Sync + Send,
) -> Option<(usize, R)> {
    use rayon::prelude::*;
    items.par_iter().enumerate().find_map_first(|(i, x)| f(x).map(|r| (i, r)))
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_find_map_first<T: Sync, R: Send>(
    items: &[T],
    f: impl Fn(&T) -> Option<R> + Sync + Send,
) -> Option<(usize, R)> {
    items.iter().enumerate().find_map(|(i, x)| f(x).map(|r| (i, r)))
}
