//! Finite quantum event algebras, Boolean sites, presheaf colimits, Boolean
//! localization systems and the truth-values object.

pub mod adjunction;
pub mod algebra;
pub mod blocks;
pub mod classifier;
pub mod cli;
pub mod colimit;
pub mod corpus;
pub mod dot;
pub mod format;
pub mod localization;
pub mod morphism;
pub mod site;

pub use algebra::{validate_event_algebra, AxiomViolation, EventAlgebra, RawAlgebra};
pub use morphism::{
    enumerate_homomorphisms, two_valued_homomorphisms, validate_morphism, AlgebraMorphism, MorphismKind,
};
