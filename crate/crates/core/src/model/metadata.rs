//! Creator identity, roles, classification vocabularies and timestamps.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, SubsecRound, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// A UTC instant truncated to whole seconds, serialized as ISO-8601
/// (`2024-05-01T09:30:00Z`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<Utc>);

impl Timestamp {
    pub fn now() -> Self {
        Self::from_datetime(Utc::now())
    }

    pub fn from_datetime(dt: DateTime<Utc>) -> Self {
        Timestamp(dt.trunc_subsecs(0))
    }

    /// Seconds since the Unix epoch.
    pub fn from_unix(secs: i64) -> Option<Self> {
        DateTime::from_timestamp(secs, 0).map(Timestamp)
    }

    pub fn unix(&self) -> i64 {
        self.0.timestamp()
    }

    pub fn as_datetime(&self) -> DateTime<Utc> {
        self.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.format("%Y-%m-%dT%H:%M:%SZ"))
    }
}

impl FromStr for Timestamp {
    type Err = chrono::ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let dt = DateTime::parse_from_rfc3339(s)?;
        Ok(Self::from_datetime(dt.with_timezone(&Utc)))
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// A project role. Custom labels cover anything outside the four stakeholder
/// roles found in interactive-system design teams.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Client,
    EndUser,
    Designer,
    Developer,
    Custom(String),
}

const BUILTIN_ROLE_NAMES: &[&str] = &["client", "end-user", "enduser", "designer", "developer"];

impl Role {
    /// Parses a role name. Built-in names match case-insensitively; anything
    /// else becomes a custom role.
    pub fn parse(label: &str) -> Result<Role, ModelError> {
        let trimmed = label.trim();
        match trimmed.to_ascii_lowercase().as_str() {
            "" => Err(ModelError::InvalidRole("empty role label".into())),
            "client" => Ok(Role::Client),
            "end-user" | "enduser" => Ok(Role::EndUser),
            "designer" => Ok(Role::Designer),
            "developer" => Ok(Role::Developer),
            _ => Ok(Role::Custom(trimmed.to_string())),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Role::Client => "client",
            Role::EndUser => "end-user",
            Role::Designer => "designer",
            Role::Developer => "developer",
            Role::Custom(label) => label,
        }
    }

    /// Whether a custom label is acceptable: non-empty and not a built-in name.
    pub fn is_well_formed(&self) -> bool {
        match self {
            Role::Custom(label) => {
                !label.trim().is_empty()
                    && !BUILTIN_ROLE_NAMES.contains(&label.to_ascii_lowercase().as_str())
            }
            _ => true,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Role {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for Role {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(deserializer)?;
        // Custom labels are kept verbatim so that malformed ones can be
        // reported by validation instead of being rewritten here.
        Ok(match raw.as_str() {
            "client" => Role::Client,
            "end-user" => Role::EndUser,
            "designer" => Role::Designer,
            "developer" => Role::Developer,
            _ => Role::Custom(raw),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Creator {
    pub user_id: String,
    pub display_name: String,
    pub roles: BTreeSet<Role>,
}

impl Creator {
    pub fn new(
        user_id: impl Into<String>,
        display_name: impl Into<String>,
        roles: impl IntoIterator<Item = Role>,
    ) -> Result<Creator, ModelError> {
        let creator = Creator {
            user_id: user_id.into(),
            display_name: display_name.into(),
            roles: roles.into_iter().collect(),
        };
        if creator.user_id.trim().is_empty() {
            return Err(ModelError::InvalidCreator(
                "user_id must be non-empty".into(),
            ));
        }
        if creator.roles.is_empty() {
            return Err(ModelError::InvalidCreator(
                "at least one role is required".into(),
            ));
        }
        if let Some(bad) = creator.roles.iter().find(|r| !r.is_well_formed()) {
            return Err(ModelError::InvalidRole(format!(
                "custom role label {:?} is empty or shadows a built-in role",
                bad.as_str()
            )));
        }
        Ok(creator)
    }
}

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, ::serde::Serialize, ::serde::Deserialize)]
        pub enum $name {
            $(#[serde(rename = $text)] $variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(&self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl ::std::fmt::Display for $name {
            fn fmt(&self, f: &mut ::std::fmt::Formatter<'_>) -> ::std::fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl ::std::str::FromStr for $name {
            type Err = $crate::model::ModelError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($text => Ok($name::$variant),)+
                    other => Err($crate::model::ModelError::UnknownKeyword {
                        vocabulary: stringify!($name),
                        value: other.to_string(),
                    }),
                }
            }
        }
    };
}
pub(crate) use keyword_enum;

keyword_enum! {
    /// Why the annotation was made. The terms are the lower-case motivation
    /// names of the Web Annotation vocabulary.
    Motivation {
        Commenting => "commenting",
        Describing => "describing",
        Questioning => "questioning",
        Replying => "replying",
        Assessing => "assessing",
        Editing => "editing",
        Bookmarking => "bookmarking",
        Tagging => "tagging",
    }
}

keyword_enum! {
    /// What the annotation does for its readers.
    AnnotationFunction {
        Attentional => "attentional",
        Associative => "associative",
        Contributive => "contributive",
        Descriptive => "descriptive",
        Organizational => "organizational",
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationMetadata {
    pub created_at: Timestamp,
    pub modified_at: Timestamp,
    pub creator: Creator,
    /// Empty means everyone.
    pub audience: BTreeSet<Role>,
    pub motivation: Motivation,
    #[serde(default)]
    pub purpose: String,
}

impl AnnotationMetadata {
    /// Bumps `modified_at`, never moving it before `created_at`.
    pub(crate) fn touch(&mut self, now: Timestamp) {
        self.modified_at = now.max(self.created_at);
    }
}
