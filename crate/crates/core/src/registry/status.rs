use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::RegistryError;

/// Lifecycle status of one artefact version. `Archived` is terminal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VersionStatus {
    Writing,
    WaitingReview,
    Reviewed,
    Updating,
    Archived,
}

impl VersionStatus {
    pub const ALL: &'static [VersionStatus] = &[
        VersionStatus::Writing,
        VersionStatus::WaitingReview,
        VersionStatus::Reviewed,
        VersionStatus::Updating,
        VersionStatus::Archived,
    ];

    pub fn can_transition_to(self, next: VersionStatus) -> bool {
        use VersionStatus::*;
        match (self, next) {
            (Archived, _) => false,
            (_, Archived) => true,
            (Writing, WaitingReview)
            | (WaitingReview, Writing)
            | (WaitingReview, Reviewed)
            | (Reviewed, Updating)
            | (Updating, WaitingReview) => true,
            _ => false,
        }
    }

    pub fn transition(self, next: VersionStatus) -> Result<VersionStatus, RegistryError> {
        if self.can_transition_to(next) {
            Ok(next)
        } else {
            Err(RegistryError::IllegalStatusTransition {
                current: self,
                next,
            })
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            VersionStatus::Writing => "writing",
            VersionStatus::WaitingReview => "waiting-review",
            VersionStatus::Reviewed => "reviewed",
            VersionStatus::Updating => "updating",
            VersionStatus::Archived => "archived",
        }
    }
}

impl fmt::Display for VersionStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for VersionStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        VersionStatus::ALL
            .iter()
            .copied()
            .find(|v| v.as_str() == s)
            .ok_or_else(|| format!("unknown version status {s:?}"))
    }
}
