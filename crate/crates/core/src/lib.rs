//! Finite multivariable dynamical systems and the operator algebras built
//! from them.
//!
//! A system is a finite point set with `n` self-maps. The crate decides
//! conjugacy, piecewise conjugacy and partition conjugacy between systems,
//! builds the symbolic semicrossed product (with the explicit isomorphism
//! induced by a partition witness), the finite quotients and their entry
//! signatures, free products of noncommutative disc algebras with their
//! polyball automorphisms, and concrete matrix representations.
//!
//! Points are dense indices `0..size`; map indices ("colors") are `0..arity`.
//! Words compose with the rightmost letter applied first.

pub mod conjugacy;
pub mod dynsys;
pub mod error;
pub mod freeprod;
pub mod quotient;
pub mod reps;
pub mod scalar;
pub mod semicrossed;

pub use conjugacy::{
    decide_conjugate, decide_partition, decide_piecewise, verify_partition_witness, Bijection,
    ConjugacyWitness, PartitionWitness, PermutationField, PiecewiseWitness, WitnessReport,
};
pub use dynsys::{EdgeColoredGraph, ColoredEdge, FiniteSystem, SubSystem, Word};
pub use error::{Error, Result};
pub use scalar::Scalar;
