pub mod finab;
pub mod lattice;
