//! Annotation domain model: typed bodies, multi-target anchors, creator and
//! metadata, classification vocabularies and the annotation lifecycle.
//!
//! All operations are pure. Mutating operations take `&self` and return a new
//! [`Annotation`]; the caller supplies the timestamp used for `modified_at`.

mod annotation;
mod body;
mod lifecycle;
mod metadata;
mod scenario;
mod target;
mod validate;

pub use annotation::{tally_votes, Annotation, AnnotationId, AnnotationParts, VoteTally};
pub use body::{scenario_body, Body, Choice, Glyph, Point, Polyline};
pub use lifecycle::LifecycleState;
pub use metadata::{AnnotationFunction, AnnotationMetadata, Creator, Motivation, Role, Timestamp};
pub use scenario::{parse_scenario, render_scenario, ScenarioError, ScenarioStep, StepKeyword};
pub use target::{PresentationProps, Selector, Target, VersionRef};
pub use validate::{validate_annotation, Violation};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("invalid body: {0}")]
    InvalidBody(String),
    #[error("invalid creator: {0}")]
    InvalidCreator(String),
    #[error("invalid role: {0}")]
    InvalidRole(String),
    #[error("unknown {vocabulary} value {value:?}")]
    UnknownKeyword {
        vocabulary: &'static str,
        value: String,
    },
    #[error("duplicate target: annotation already targets {0}")]
    DuplicateTarget(String),
    #[error("target index {index} out of range (annotation has {len} targets)")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("cannot remove the last target of a persisted annotation")]
    LastTargetOnPersisted,
    #[error("invalid presentation: {0}")]
    InvalidPresentation(&'static str),
    #[error("invalid selector: {0}")]
    InvalidSelector(&'static str),
    #[error("annotation body is a {0}, not a vote")]
    NotAVote(&'static str),
    #[error("annotation is disposed")]
    AnnotationDisposed,
    #[error("IllegalTransition({current:?}, {next:?})")]
    IllegalTransition {
        current: LifecycleState,
        next: LifecycleState,
    },
}
