//! Selberg's character `χ_α` on Γ₀(4), the 6-dimensional monomial
//! representation `U_α` of PSL(2,Z) induced from it, and exact certificates
//! deciding whether `ker U_α` is a congruence subgroup.
//!
//! Everything is exact: matrix entries are arbitrary-precision integers and
//! roots of unity are elements of Q/Z.

pub mod analyzer;
pub mod cache;
pub mod character;
pub mod error;
pub mod groups;
pub mod induced;
pub mod monomial;
pub mod phase;
pub mod psl2z;

pub use analyzer::{
    abelianness_probe, alphas_up_to, gamma_d_info, newman_genus, wohlfahrt_level, AbelianProbe, Analyzer,
    CongruenceCertificate, CrossChecks, GammaDInfo, KernelId, KernelReport, ScanRow, Witness,
};
pub use character::{chi, decompose_gamma04, in_ker_chi, n_of_alpha, t_exponent, Alpha, Gamma04Word};
pub use error::{Error, Result};
pub use groups::{
    contains_gamma_n_in_kernel, diagonal_subgroup, enumerate_monomial_group, enumerate_psl2_zn,
    EnumeratedMonomialGroup, SchreierData, SchreierGenerator,
};
pub use induced::{a_generators, d_alpha, gamma4_generators, in_ker_u, u_alpha, u_zero, CosetReps, InducedRep};
pub use monomial::Monomial;
pub use phase::Phase;
pub use psl2z::{
    decompose_st, delta_gamma04, in_gamma, in_gamma0, in_h, index_gamma, index_gamma0, ModularElement, ResidueElement,
    STWord,
};
