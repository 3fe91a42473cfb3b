use super::metadata::keyword_enum;
use super::ModelError;

keyword_enum! {
    /// Annotation lifecycle. `Disposed` is terminal.
    LifecycleState {
        Open => "open",
        InReview => "in-review",
        Resolved => "resolved",
        Disposed => "disposed",
    }
}

impl LifecycleState {
    pub fn can_transition_to(self, next: LifecycleState) -> bool {
        use LifecycleState::*;
        matches!(
            (self, next),
            (Open, InReview)
                | (InReview, Open)
                | (InReview, Resolved)
                | (Resolved, Open)
                | (Open, Disposed)
                | (InReview, Disposed)
                | (Resolved, Disposed)
        )
    }

    pub fn transition(self, next: LifecycleState) -> Result<LifecycleState, ModelError> {
        if self.can_transition_to(next) {
            Ok(next)
        } else {
            Err(ModelError::IllegalTransition {
                current: self,
                next,
            })
        }
    }

    pub fn is_terminal(self) -> bool {
        self == LifecycleState::Disposed
    }
}
