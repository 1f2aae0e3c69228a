//! Resource estimation and verification for factoring on a small
//! fault-tolerant processor backed by a multimode quantum memory.
//!
//! - [`circuit_ir`]: gate-level IR, validation and counting
//! - [`arith_builders`]: adders, lookups, coset initialization, windowed exponentiation
//! - [`sim`]: sparse state simulator used as a ground-truth oracle
//! - [`counts`]: exact and leading-order gate counts
//! - [`ftec`]: 3D color-code geometry, logical error, timing and memory sizing
//! - [`optimizer`]: grid search and sweeps over the algorithm parameters
//! - [`verify`]: reusable exhaustive checks for the builders

pub mod arith_builders;
pub mod circuit_ir;
pub mod counts;
pub mod exec;
pub mod ftec;
pub mod optimizer;
pub mod sim;
pub mod verify;

pub use exec::Exec;
