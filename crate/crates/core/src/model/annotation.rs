use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    AnnotationFunction, AnnotationMetadata, Body, Choice, Creator, LifecycleState, ModelError,
    Motivation, PresentationProps, Role, Target, Timestamp,
};

/// Globally unique, opaque annotation identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AnnotationId(String);

impl AnnotationId {
    pub fn new(value: impl Into<String>) -> AnnotationId {
        AnnotationId(value.into())
    }

    pub fn generate() -> AnnotationId {
        AnnotationId(uuid::Uuid::new_v4().to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AnnotationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for AnnotationId {
    fn from(value: &str) -> Self {
        AnnotationId(value.to_string())
    }
}

/// Raw field bundle for building an [`Annotation`] without invariant checks,
/// e.g. when importing foreign documents. Run
/// [`validate_annotation`](super::validate_annotation) on the result.
#[derive(Debug, Clone)]
pub struct AnnotationParts {
    pub id: AnnotationId,
    pub body: Body,
    pub function: AnnotationFunction,
    pub metadata: AnnotationMetadata,
    pub targets: Vec<Target>,
    pub state: LifecycleState,
}

/// A typed statement attached to one or more artefact targets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Annotation {
    id: AnnotationId,
    body: Body,
    function: AnnotationFunction,
    metadata: AnnotationMetadata,
    targets: Vec<Target>,
    state: LifecycleState,
    #[serde(skip)]
    persisted: bool,
}

// Persistence is bookkeeping, not part of the value.
impl PartialEq for Annotation {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.body == other.body
            && self.function == other.function
            && self.metadata == other.metadata
            && self.targets == other.targets
            && self.state == other.state
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VoteTally {
    pub agree: usize,
    pub disagree: usize,
}

impl Annotation {
    /// Creates an open annotation with no targets.
    #[allow(clippy::too_many_arguments)]
    pub fn create(
        id: AnnotationId,
        body: Body,
        function: AnnotationFunction,
        creator: Creator,
        motivation: Motivation,
        audience: BTreeSet<Role>,
        now: Timestamp,
    ) -> Result<Annotation, ModelError> {
        body.check()?;
        if id.as_str().is_empty() {
            return Err(ModelError::InvalidBody(
                "annotation id must be non-empty".into(),
            ));
        }
        Ok(Annotation {
            id,
            body,
            function,
            metadata: AnnotationMetadata {
                created_at: now,
                modified_at: now,
                creator,
                audience,
                motivation,
                purpose: String::new(),
            },
            targets: Vec::new(),
            state: LifecycleState::Open,
            persisted: false,
        })
    }

    pub fn from_parts(parts: AnnotationParts) -> Annotation {
        Annotation {
            id: parts.id,
            body: parts.body,
            function: parts.function,
            metadata: parts.metadata,
            targets: parts.targets,
            state: parts.state,
            persisted: false,
        }
    }

    pub fn into_parts(self) -> AnnotationParts {
        AnnotationParts {
            id: self.id,
            body: self.body,
            function: self.function,
            metadata: self.metadata,
            targets: self.targets,
            state: self.state,
        }
    }

    pub fn id(&self) -> &AnnotationId {
        &self.id
    }

    pub fn body(&self) -> &Body {
        &self.body
    }

    pub fn function(&self) -> AnnotationFunction {
        self.function
    }

    pub fn metadata(&self) -> &AnnotationMetadata {
        &self.metadata
    }

    pub fn creator(&self) -> &Creator {
        &self.metadata.creator
    }

    pub fn targets(&self) -> &[Target] {
        &self.targets
    }

    pub fn state(&self) -> LifecycleState {
        self.state
    }

    /// True once the annotation has been written to, or read from, a
    /// repository.
    pub fn is_persisted(&self) -> bool {
        self.persisted
    }

    pub(crate) fn mark_persisted(&mut self) {
        self.persisted = true;
    }

    pub fn with_purpose(&self, purpose: impl Into<String>, now: Timestamp) -> Annotation {
        let mut next = self.clone();
        next.metadata.purpose = purpose.into();
        next.metadata.touch(now);
        next
    }

    pub fn attach_target(&self, target: Target, now: Timestamp) -> Result<Annotation, ModelError> {
        if let Some((_, rule)) = target.selector.violations().first() {
            return Err(ModelError::InvalidSelector(rule));
        }
        if let Some(rule) = target.presentation.violations().first() {
            return Err(ModelError::InvalidPresentation(rule));
        }
        if self.targets.iter().any(|t| t.same_anchor(&target)) {
            return Err(ModelError::DuplicateTarget(format!(
                "{}@{} {}",
                target.artefact, target.version, target.selector
            )));
        }
        let mut next = self.clone();
        next.targets.push(target);
        next.metadata.touch(now);
        Ok(next)
    }

    pub fn detach_target(&self, index: usize, now: Timestamp) -> Result<Annotation, ModelError> {
        self.check_index(index)?;
        if self.persisted && self.targets.len() == 1 {
            return Err(ModelError::LastTargetOnPersisted);
        }
        let mut next = self.clone();
        next.targets.remove(index);
        next.metadata.touch(now);
        Ok(next)
    }

    /// Moves or resizes the annotation box on one target only.
    pub fn set_target_presentation(
        &self,
        index: usize,
        presentation: PresentationProps,
        now: Timestamp,
    ) -> Result<Annotation, ModelError> {
        self.check_index(index)?;
        if let Some(rule) = presentation.violations().first() {
            return Err(ModelError::InvalidPresentation(rule));
        }
        let mut next = self.clone();
        next.targets[index].presentation = presentation;
        next.metadata.touch(now);
        Ok(next)
    }

    /// Records `voter`'s ballot, replacing any earlier ballot by the same user.
    pub fn cast_vote(
        &self,
        voter: &Creator,
        choice: Choice,
        now: Timestamp,
    ) -> Result<Annotation, ModelError> {
        if !matches!(self.body, Body::Vote { .. }) {
            return Err(ModelError::NotAVote(self.body.variant_name()));
        }
        if self.state.is_terminal() {
            return Err(ModelError::AnnotationDisposed);
        }
        let mut next = self.clone();
        if let Body::Vote { ballots, .. } = &mut next.body {
            ballots.insert(voter.user_id.clone(), choice);
        }
        next.metadata.touch(now);
        Ok(next)
    }

    pub fn tally_votes(&self) -> Result<VoteTally, ModelError> {
        tally_votes(&self.body)
    }

    pub fn transition_state(
        &self,
        next_state: LifecycleState,
        now: Timestamp,
    ) -> Result<Annotation, ModelError> {
        let state = self.state.transition(next_state)?;
        let mut next = self.clone();
        next.state = state;
        next.metadata.touch(now);
        Ok(next)
    }

    fn check_index(&self, index: usize) -> Result<(), ModelError> {
        if index < self.targets.len() {
            Ok(())
        } else {
            Err(ModelError::IndexOutOfRange {
                index,
                len: self.targets.len(),
            })
        }
    }
}

pub fn tally_votes(body: &Body) -> Result<VoteTally, ModelError> {
    match body {
        Body::Vote { ballots, .. } => {
            let agree = ballots.values().filter(|c| **c == Choice::Agree).count();
            Ok(VoteTally {
                agree,
                disagree: ballots.len() - agree,
            })
        }
        other => Err(ModelError::NotAVote(other.variant_name())),
    }
}
