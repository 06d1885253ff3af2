//! Finite-field laboratory for the quantized cat map: Heisenberg and Weil
//! representations over F_p built from canonical intertwiners, Hecke
//! eigenfunctions, and sup-norm / value-distribution experiments.

pub mod arith;
pub mod groups;
pub mod harness;
pub mod hecke;
pub mod linalg;
pub mod models;

pub use arith::{ArithError, FieldElement, PrimeField};
pub use groups::{CatMap, EnhancedLagrangian, GroupError, HeckeTorus, SympMatrix, TorusKind};
pub use harness::{HarnessError, SupremumRecord, SweepConfig, SweepReport};
pub use hecke::{HeckeEigenfunction, HeckeError, HeckeSpectrum};
pub use models::{CanonicalSystem, Frame, ModelError, ModelVector};

/// Any error the library can return.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Hecke(#[from] HeckeError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}
