//! Verification toolkit for categories enriched in commutative monoids:
//! formal morphism terms, diagram chases over schematic presentations,
//! finite biproducts, and concrete models to evaluate everything in.

pub mod biproduct;
pub mod chase;
pub mod coring;
pub mod model;
pub mod models;
pub mod report;
pub mod swindle;
pub mod term;
