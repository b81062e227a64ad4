//! The free monoid `F(V)` on an S-bimodule, as the colimit of the quotients
//! `Ṽ_n` of level powers of `V_+ = I ⊕ V`, and directly on graphs.

pub mod archive;
mod colimit;
mod direct;
mod monoid;
mod power;

pub use colimit::{FreeMonoid, StabilityStep};
pub use direct::{compare_constructions, forget_map, ComparisonReport, ComparisonRow, DirectFree};
pub use monoid::{
    associative, counit, evaluate, evaluate_grouped, evaluate_vectors, free_extension, free_map,
    is_monoid_morphism, verify_monoid, Monoid, MonoidPresentation, MonoidReport,
};

pub use power::{swap_relations, tau, AugmentedObject, LevelPower, TildeQuotient};
