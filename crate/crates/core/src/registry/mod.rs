//! Artefact registry: project files (task models, dialog models, prototypes,
//! documents, annotation sets), their versions and version status.
//!
//! Artefact content is opaque; files are only read to compute digests.

mod status;

use std::fmt;
use std::fs;
use std::path::{Component, Path};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{Timestamp, VersionRef};

pub use status::VersionStatus;

/// Name of the digest algorithm recorded in every project index.
pub const DIGEST_ALGORITHM: &str = "sha256";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RegistryError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("could not read {path}: {detail}")]
    Unreadable { path: String, detail: String },
    #[error("an artefact named {0:?} is already registered")]
    DuplicateName(String),
    #[error("artefact id {0:?} is already registered")]
    DuplicateId(String),
    #[error("artefact name must be non-empty")]
    EmptyName,
    #[error("invalid artefact id {0:?}")]
    InvalidId(String),
    #[error("invalid editor id {0:?}: expected lowercase letters and digits")]
    InvalidEditor(String),
    #[error("invalid path {0:?}: must be inside the project without `..` segments")]
    InvalidPath(String),
    #[error("new version of {0} has the same content as its latest version")]
    IdenticalContent(String),
    #[error("unknown artefact {0:?}")]
    UnknownArtefact(String),
    #[error("artefact {artefact} has no version {version}")]
    UnknownVersion { artefact: String, version: u32 },
    #[error("IllegalStatusTransition({current:?}, {next:?})")]
    IllegalStatusTransition {
        current: VersionStatus,
        next: VersionStatus,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArtefactId(String);

impl ArtefactId {
    pub fn new(value: impl Into<String>) -> ArtefactId {
        ArtefactId(value.into())
    }

    /// Derives an id from a display name: lowercase ASCII alphanumerics with
    /// runs of anything else collapsed to `-`.
    pub fn slug(name: &str) -> ArtefactId {
        let mut out = String::new();
        for c in name.chars() {
            if c.is_ascii_alphanumeric() {
                out.push(c.to_ascii_lowercase());
            } else if !out.ends_with('-') {
                out.push('-');
            }
        }
        ArtefactId(out.trim_matches('-').to_string())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArtefactId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ArtefactId {
    fn from(value: &str) -> Self {
        ArtefactId(value.to_string())
    }
}

impl From<String> for ArtefactId {
    fn from(value: String) -> Self {
        ArtefactId(value)
    }
}

impl From<&ArtefactId> for ArtefactId {
    fn from(value: &ArtefactId) -> Self {
        value.clone()
    }
}

/// Which tool edits the artefact.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EditorBinding {
    pub editor_id: String,
    pub display_name: String,
    /// Command or locator used to launch the editor. Informative only.
    #[serde(default)]
    pub launch_hint: String,
}

impl EditorBinding {
    pub fn new(
        editor_id: impl Into<String>,
        display_name: impl Into<String>,
        launch_hint: impl Into<String>,
    ) -> Result<EditorBinding, RegistryError> {
        let editor_id = editor_id.into();
        let ok = !editor_id.is_empty()
            && editor_id
                .chars()
                .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
        if !ok {
            return Err(RegistryError::InvalidEditor(editor_id));
        }
        Ok(EditorBinding {
            editor_id,
            display_name: display_name.into(),
            launch_hint: launch_hint.into(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArtefactKind {
    TaskModel,
    DialogModel,
    Prototype,
    Document,
    /// An annotation-set file registered so its annotations can be annotated.
    AnnotationSet,
}

impl ArtefactKind {
    pub const ALL: &'static [ArtefactKind] = &[
        ArtefactKind::TaskModel,
        ArtefactKind::DialogModel,
        ArtefactKind::Prototype,
        ArtefactKind::Document,
        ArtefactKind::AnnotationSet,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ArtefactKind::TaskModel => "task-model",
            ArtefactKind::DialogModel => "dialog-model",
            ArtefactKind::Prototype => "prototype",
            ArtefactKind::Document => "document",
            ArtefactKind::AnnotationSet => "annotation-set",
        }
    }
}

impl fmt::Display for ArtefactKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ArtefactKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ArtefactKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| {
                let known: Vec<_> = ArtefactKind::ALL.iter().map(|k| k.as_str()).collect();
                format!(
                    "unknown artefact kind {s:?} (expected one of {})",
                    known.join(", ")
                )
            })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArtefactVersion {
    pub version_id: u32,
    /// Project-relative, forward slashes.
    pub path: String,
    pub status: VersionStatus,
    pub created_at: Timestamp,
    /// Lowercase hex digest of the file content.
    pub content_digest: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Artefact {
    pub id: ArtefactId,
    pub name: String,
    pub editor: EditorBinding,
    pub kind: ArtefactKind,
    pub versions: Vec<ArtefactVersion>,
}

impl Artefact {
    /// The version with the highest id.
    pub fn latest_version(&self) -> &ArtefactVersion {
        self.versions
            .iter()
            .max_by_key(|v| v.version_id)
            .expect("registered artefacts have at least one version")
    }

    pub fn version(&self, version_id: u32) -> Option<&ArtefactVersion> {
        self.versions.iter().find(|v| v.version_id == version_id)
    }

    pub fn resolve(&self, version: VersionRef) -> Result<&ArtefactVersion, RegistryError> {
        match version {
            VersionRef::Any => Ok(self.latest_version()),
            VersionRef::Pinned(v) => self
                .version(v)
                .ok_or_else(|| RegistryError::UnknownVersion {
                    artefact: self.id.to_string(),
                    version: v,
                }),
        }
    }

    /// Appends a new version read from `path` (relative to `root`).
    pub fn add_version(
        &self,
        root: &Path,
        path: &Path,
        now: Timestamp,
    ) -> Result<Artefact, RegistryError> {
        let rel = project_relative(root, path)?;
        let digest = digest_file(root, &rel)?;
        let latest = self.latest_version();
        if digest == latest.content_digest {
            return Err(RegistryError::IdenticalContent(self.id.to_string()));
        }
        let mut next = self.clone();
        next.versions.push(ArtefactVersion {
            version_id: latest.version_id + 1,
            path: rel,
            status: VersionStatus::Writing,
            created_at: now,
            content_digest: digest,
        });
        Ok(next)
    }

    pub fn set_version_status(
        &self,
        version_id: u32,
        next_status: VersionStatus,
    ) -> Result<Artefact, RegistryError> {
        let idx = self
            .versions
            .iter()
            .position(|v| v.version_id == version_id)
            .ok_or_else(|| RegistryError::UnknownVersion {
                artefact: self.id.to_string(),
                version: version_id,
            })?;
        let status = self.versions[idx].status.transition(next_status)?;
        let mut next = self.clone();
        next.versions[idx].status = status;
        Ok(next)
    }
}

/// Request to register a new artefact.
#[derive(Debug, Clone)]
pub struct NewArtefact {
    /// Derived from the name when absent.
    pub id: Option<ArtefactId>,
    pub name: String,
    pub path: std::path::PathBuf,
    pub editor: EditorBinding,
    pub kind: ArtefactKind,
}

/// The set of artefacts registered in a project, in registration order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Registry {
    artefacts: Vec<Artefact>,
}

impl Registry {
    pub fn new(artefacts: Vec<Artefact>) -> Registry {
        Registry { artefacts }
    }

    pub fn artefacts(&self) -> &[Artefact] {
        &self.artefacts
    }

    pub fn is_empty(&self) -> bool {
        self.artefacts.is_empty()
    }

    pub fn get(&self, id: &ArtefactId) -> Option<&Artefact> {
        self.artefacts.iter().find(|a| &a.id == id)
    }

    pub fn find_by_path(&self, path: &str) -> Option<(&Artefact, &ArtefactVersion)> {
        self.artefacts.iter().find_map(|a| {
            a.versions
                .iter()
                .rev()
                .find(|v| v.path == path)
                .map(|v| (a, v))
        })
    }

    /// Builds (but does not insert) a new artefact with a single version.
    pub fn register_artefact(
        &self,
        root: &Path,
        request: NewArtefact,
        now: Timestamp,
    ) -> Result<Artefact, RegistryError> {
        if request.name.trim().is_empty() {
            return Err(RegistryError::EmptyName);
        }
        if self.artefacts.iter().any(|a| a.name == request.name) {
            return Err(RegistryError::DuplicateName(request.name));
        }
        let id = request
            .id
            .unwrap_or_else(|| ArtefactId::slug(&request.name));
        if id.as_str().is_empty() || id.as_str().chars().any(|c| c.is_whitespace() || c == '/') {
            return Err(RegistryError::InvalidId(id.to_string()));
        }
        if self.get(&id).is_some() {
            return Err(RegistryError::DuplicateId(id.to_string()));
        }
        let rel = project_relative(root, &request.path)?;
        let digest = digest_file(root, &rel)?;
        Ok(Artefact {
            id,
            name: request.name,
            editor: request.editor,
            kind: request.kind,
            versions: vec![ArtefactVersion {
                version_id: 1,
                path: rel,
                status: VersionStatus::Writing,
                created_at: now,
                content_digest: digest,
            }],
        })
    }

    /// Inserts a new artefact or replaces the one with the same id.
    pub fn with_artefact(&self, artefact: Artefact) -> Registry {
        let mut next = self.clone();
        match next.artefacts.iter_mut().find(|a| a.id == artefact.id) {
            Some(slot) => *slot = artefact,
            None => next.artefacts.push(artefact),
        }
        next
    }

    pub fn without_artefact(&self, id: &ArtefactId) -> Result<Registry, RegistryError> {
        if self.get(id).is_none() {
            return Err(RegistryError::UnknownArtefact(id.to_string()));
        }
        let mut next = self.clone();
        next.artefacts.retain(|a| &a.id != id);
        Ok(next)
    }

    /// Resolves a version reference; `Any` resolves to the latest version.
    pub fn resolve_ref(
        &self,
        artefact: &ArtefactId,
        version: VersionRef,
    ) -> Result<&ArtefactVersion, RegistryError> {
        self.get(artefact)
            .ok_or_else(|| RegistryError::UnknownArtefact(artefact.to_string()))?
            .resolve(version)
    }
}

/// Hex SHA-256 of `bytes`.
pub fn digest_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the project file at `rel`.
pub fn digest_file(root: &Path, rel: &str) -> Result<String, RegistryError> {
    let full = root.join(rel);
    if !full.is_file() {
        return Err(RegistryError::FileNotFound(rel.to_string()));
    }
    let bytes = fs::read(&full).map_err(|e| RegistryError::Unreadable {
        path: rel.to_string(),
        detail: e.to_string(),
    })?;
    Ok(digest_bytes(&bytes))
}

/// Normalizes `path` into a forward-slash path relative to `root`. Absolute
/// paths must lie under `root`; relative paths are taken relative to `root`.
pub fn project_relative(root: &Path, path: &Path) -> Result<String, RegistryError> {
    let invalid = || RegistryError::InvalidPath(path.display().to_string());
    let relative = if path.is_absolute() {
        match path.strip_prefix(root) {
            Ok(rel) => rel.to_path_buf(),
            Err(_) => {
                let canon_root = root.canonicalize().map_err(|_| invalid())?;
                let canon = path
                    .canonicalize()
                    .map_err(|_| RegistryError::FileNotFound(path.display().to_string()))?;
                canon
                    .strip_prefix(&canon_root)
                    .map_err(|_| invalid())?
                    .to_path_buf()
            }
        }
    } else {
        path.to_path_buf()
    };
    let mut parts = Vec::new();
    for component in relative.components() {
        match component {
            Component::Normal(part) => parts.push(part.to_str().ok_or_else(invalid)?.to_string()),
            Component::CurDir => {}
            _ => return Err(invalid()),
        }
    }
    if parts.is_empty() {
        return Err(invalid());
    }
    Ok(parts.join("/"))
}
