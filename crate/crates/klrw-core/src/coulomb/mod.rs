//! Abelian Coulomb branch algebras and their Gelfand–Tsetlin weight modules.

pub mod algebra;
pub mod module;
pub mod parse;
pub mod scalars;

pub use algebra::{
    d, el_kappa_sides, forget_matter, fourier, inv_monopole, kappa, mul, phi0, phi0_prime, rxi_closed_form,
    rxi_pairing, transition_invertible, xi_negative, Coweight, FourierCocharacter, MatterWeight, MonopoleElement,
    TorusTheory,
};
pub use module::{gk_dim, hamiltonian_reduce, module_action, res_support, CosetLimit, QhrEntry, UniversalWeightModule};
