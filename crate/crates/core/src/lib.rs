//! Typed, multi-target, lifecycle-managed annotations that link design
//! artefacts (task models, dialog models, prototypes, documents) kept in a
//! file-based project repository.
//!
//! * [`model`]: annotations, bodies, targets, lifecycle.
//! * [`registry`]: artefacts and their versions.
//! * [`repository`]: the on-disk project, canonical files, Web Annotation
//!   interchange.
//! * [`linker`]: cross-artefact import, replies, consistency checking.
//! * [`graph`]: the project-wide annotation graph and its DOT/JSON exports.

pub mod env;
pub mod graph;
pub mod linker;
pub mod model;
pub mod registry;
pub mod repository;

use model::ModelError;
use registry::RegistryError;
use repository::w3c::W3cError;
use repository::RepoError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Registry(#[from] RegistryError),
    #[error(transparent)]
    Repository(#[from] RepoError),
    #[error(transparent)]
    W3c(#[from] W3cError),
}

impl Error {
    /// Whether the failure came from the file system or from unreadable
    /// repository files rather than from a domain rule.
    pub fn is_io(&self) -> bool {
        match self {
            Error::Repository(e) => e.is_io(),
            Error::Registry(RegistryError::Unreadable { .. }) => true,
            _ => false,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
