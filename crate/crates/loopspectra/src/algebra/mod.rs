//! Diagram-algebra sector bases and generator actions.
//!
//! A sector of a loop-model transfer matrix is a standard module of the
//! relevant diagram algebra: dense/dilute Temperley–Lieb (possibly
//! periodicized) or dense/dilute Brauer. States are connectivity patterns
//! ([`LinkState`]) of `N` sites; operators act by diagram concatenation with
//! every closed contractible loop contributing one factor of the loop
//! fugacity `n`.

mod basis;
pub mod diagram;
mod family;
pub(crate) mod generator;
mod link;
mod npoly;
mod params;
mod sector;
mod symgroup;

pub use basis::{SectorBasis, DEFAULT_STATE_CAP};
pub use family::{AlgebraFamily, Boundary, FamilyKind};
pub use generator::{
    apply_generator, apply_generator_exact, DiluteTile, GeneratorId, LabeledState,
    WeightedStateSum, ALL_TILES,
};
pub use link::{LinkState, SiteContent};
pub use npoly::NPoly;
pub use params::LoopParams;
pub use sector::Sector;
pub use symgroup::{Partition, SymIrrep, ThroughPerm};

use thiserror::Error;

/// Errors raised while constructing bases or applying generators.
#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("sector is incompatible with the algebra family: {0}")]
    IncompatibleSector(String),
    #[error("basis of sector would exceed the configured cap of {cap} states")]
    SizeOverflow { cap: usize },
    #[error("generator {0} is not valid for this family or boundary")]
    InvalidGenerator(String),
    #[error("site index {index} out of range for {n_sites} sites")]
    IndexOutOfRange { index: usize, n_sites: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("invalid loop parameters: {0}")]
    InvalidParams(String),
}

pub type Result<T> = std::result::Result<T, AlgebraError>;
