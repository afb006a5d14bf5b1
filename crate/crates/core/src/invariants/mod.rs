//! Integral homology and mod-2 cohomology with Steenrod squares.

mod homology;
mod sqmod;

pub use homology::{
    atom_homology, canonical_orders, elementary_homology, format_cyclic, format_group, gcd, integral_homology,
    kunneth, primary_parts, GradedAbelianGroup,
};
pub use sqmod::{
    atom_module, cartan_smash_sq, elementary_module, f2_rank, mod2_cohomology, poincare_mod2, summand_module,
    F2Vec, Sq, SqModule,
};
