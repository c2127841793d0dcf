//! Commutators `[b,T]` and their paraproduct decompositions, `(q,b)`-atoms,
//! `H¹_b` characterizations, atomic decomposition and molecule estimates.

mod atomic;
mod atoms;
mod decomposition;
mod h1b;
mod molecule;

pub use atomic::{atomic_decompose, AtomicDecomposition, LevelSet, PsiAtom, COARSE_FLAG};
pub use atoms::make_qb_atom;
pub use decomposition::{
    bilinear_decomposition, commutator_apply, fractional_commutator_decomposition, subbilinear_envelope,
    CommutatorDecomposition, DecompositionSummary, FractionalReport, SubbilinearEnvelope, SANDWICH_SLACK,
    SUBLINEAR_CAP_1D, SUBLINEAR_CAP_2D,
};
pub use h1b::{h1b_characterizations, H1bReport};
pub use molecule::{antisymmetric_paraproduct, molecule_norm, AntisymmetricParaproduct, AntisymmetricSummary, HYPOTHESIS_TOL};

#[cfg(test)]
mod tests;
