//! File-based project repository.
//!
//! Layout of a project directory:
//!
//! ```text
//! annoglue.index.json        catalogue of artefacts and annotation sets
//! annotations/<set_id>.json  one annotation-set file each
//! annoglue.lock              advisory writer lock (only while held)
//! ```
//!
//! All files are canonical JSON (see [`canonical`]) and are replaced
//! atomically. A loaded [`Project`] is an immutable snapshot; mutating
//! methods write to disk and return the next snapshot. Callers serialize
//! writers (see [`lock::ProjectLock`]).

pub mod canonical;
pub mod lock;
mod rebuild;
pub mod storage;
pub mod w3c;

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::model::{
    validate_annotation, Annotation, AnnotationId, ModelError, Timestamp, Violation,
};
use crate::registry::{
    Artefact, ArtefactId, NewArtefact, Registry, RegistryError, VersionStatus, DIGEST_ALGORITHM,
};
use crate::Error;

pub use rebuild::{rebuild_index, write_index, IndexFinding};
use storage::{FsStorage, Storage};

pub const INDEX_FILE: &str = "annoglue.index.json";
pub const ANNOTATION_DIR: &str = "annotations";
pub const LOCK_FILE: &str = "annoglue.lock";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum RepoError {
    #[error("{0} already contains a project")]
    AlreadyInitialized(PathBuf),
    #[error("{0} is not a project (no {INDEX_FILE})")]
    NotAProject(PathBuf),
    #[error("I/O failure on {path}: {source}")]
    IoFailure {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("corrupt index: {0}")]
    CorruptIndex(String),
    #[error("corrupt annotation set {path}{}: {detail}", .offset.map(|o| format!(" at byte {o}")).unwrap_or_default())]
    CorruptSet {
        path: String,
        offset: Option<usize>,
        detail: String,
    },
    #[error("unsupported project format {0}")]
    UnsupportedFormat(String),
    #[error("annotation {annotation} failed validation: {}", format_violations(.violations))]
    ValidationFailed {
        annotation: AnnotationId,
        violations: Vec<Violation>,
    },
    #[error("annotation {annotation} target {target_index}: {detail}")]
    UnresolvedTarget {
        annotation: AnnotationId,
        target_index: usize,
        detail: String,
    },
    #[error("annotation {annotation} already stored in set {set_id}")]
    DuplicateAnnotation {
        annotation: AnnotationId,
        set_id: String,
    },
    #[error("unknown annotation {0}")]
    UnknownAnnotation(AnnotationId),
    #[error("invalid set id {0:?}")]
    InvalidSetId(String),
    #[error("project is locked by {0}")]
    Locked(String),
}

fn format_violations(violations: &[Violation]) -> String {
    violations
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

impl RepoError {
    pub(crate) fn io(path: &Path, source: io::Error) -> RepoError {
        RepoError::IoFailure {
            path: path.to_path_buf(),
            source,
        }
    }

    /// I/O and on-disk corruption, as opposed to domain rule violations.
    pub fn is_io(&self) -> bool {
        matches!(
            self,
            RepoError::IoFailure { .. }
                | RepoError::NotAProject(_)
                | RepoError::CorruptIndex(_)
                | RepoError::CorruptSet { .. }
                | RepoError::UnsupportedFormat(_)
                | RepoError::AlreadyInitialized(_)
                | RepoError::Locked(_)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationSetEntry {
    pub set_id: String,
    /// Project-relative path of the set file.
    pub path: String,
    /// Artefacts targeted by annotations in the set, sorted.
    pub artefacts: Vec<ArtefactId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectIndex {
    pub project_name: String,
    pub format_version: u32,
    pub digest_algorithm: String,
    pub artefacts: Registry,
    pub annotation_sets: Vec<AnnotationSetEntry>,
}

impl ProjectIndex {
    pub fn new(project_name: impl Into<String>) -> ProjectIndex {
        ProjectIndex {
            project_name: project_name.into(),
            format_version: FORMAT_VERSION,
            digest_algorithm: DIGEST_ALGORITHM.to_string(),
            artefacts: Registry::default(),
            annotation_sets: Vec::new(),
        }
    }

    pub fn to_canonical(&self) -> String {
        canonical::to_canonical_file(self).expect("index serializes")
    }
}

/// One annotation-set file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotationSetFile {
    pub set_id: String,
    /// User who created the set.
    pub username: String,
    /// Free-form session label, stored verbatim.
    pub session: String,
    pub date: Timestamp,
    /// Artefact file paths referenced by the annotations, sorted.
    pub files: Vec<String>,
    pub annotations: Vec<Annotation>,
}

impl AnnotationSetFile {
    pub fn new(
        set_id: impl Into<String>,
        username: impl Into<String>,
        session: impl Into<String>,
        date: Timestamp,
    ) -> AnnotationSetFile {
        AnnotationSetFile {
            set_id: set_id.into(),
            username: username.into(),
            session: session.into(),
            date,
            files: Vec::new(),
            annotations: Vec::new(),
        }
    }

    pub fn relative_path(set_id: &str) -> String {
        format!("{ANNOTATION_DIR}/{set_id}.json")
    }

    pub fn to_canonical(&self) -> String {
        canonical::to_canonical_file(self).expect("annotation set serializes")
    }

    pub fn get(&self, id: &AnnotationId) -> Option<&Annotation> {
        self.annotations.iter().find(|a| a.id() == id)
    }

    fn referenced_artefacts(&self) -> Vec<ArtefactId> {
        self.annotations
            .iter()
            .flat_map(|a| a.targets().iter().map(|t| t.artefact.clone()))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }
}

/// Where a new annotation goes when it is not yet stored in any set.
#[derive(Debug, Clone)]
pub struct SetPlacement {
    pub set_id: String,
    pub username: String,
    pub session: String,
    pub date: Timestamp,
}

fn valid_set_id(set_id: &str) -> bool {
    !set_id.is_empty()
        && !set_id.starts_with('.')
        && set_id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

/// In-memory snapshot of a project directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Project {
    root: PathBuf,
    index: ProjectIndex,
    sets: Vec<AnnotationSetFile>,
}

impl Project {
    /// Creates the index and annotation directory in an existing directory.
    pub fn init(dir: &Path, name: &str) -> Result<Project, RepoError> {
        Self::init_with(dir, name, &FsStorage)
    }

    pub fn init_with(dir: &Path, name: &str, storage: &dyn Storage) -> Result<Project, RepoError> {
        if !dir.is_dir() {
            return Err(RepoError::io(
                dir,
                io::Error::new(io::ErrorKind::NotFound, "project directory does not exist"),
            ));
        }
        let index_path = dir.join(INDEX_FILE);
        if index_path.exists() {
            return Err(RepoError::AlreadyInitialized(dir.to_path_buf()));
        }
        let ann_dir = dir.join(ANNOTATION_DIR);
        fs::create_dir_all(&ann_dir).map_err(|e| RepoError::io(&ann_dir, e))?;
        let index = ProjectIndex::new(name);
        storage
            .write_atomic(&index_path, index.to_canonical().as_bytes())
            .map_err(|e| RepoError::io(&index_path, e))?;
        Ok(Project {
            root: dir.to_path_buf(),
            index,
            sets: Vec::new(),
        })
    }

    pub fn load(dir: &Path) -> Result<Project, RepoError> {
        let index = read_index(dir)?;
        let mut sets = Vec::with_capacity(index.annotation_sets.len());
        for entry in &index.annotation_sets {
            let mut set = read_set(dir, &entry.path)?;
            for a in &mut set.annotations {
                a.mark_persisted();
            }
            sets.push(set);
        }
        Ok(Project {
            root: dir.to_path_buf(),
            index,
            sets,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn index(&self) -> &ProjectIndex {
        &self.index
    }

    pub fn name(&self) -> &str {
        &self.index.project_name
    }

    pub fn registry(&self) -> &Registry {
        &self.index.artefacts
    }

    pub fn sets(&self) -> &[AnnotationSetFile] {
        &self.sets
    }

    pub fn set(&self, set_id: &str) -> Option<&AnnotationSetFile> {
        self.sets.iter().find(|s| s.set_id == set_id)
    }

    /// All annotations, set by set in index order.
    pub fn annotations(&self) -> impl Iterator<Item = &Annotation> {
        self.sets.iter().flat_map(|s| s.annotations.iter())
    }

    pub fn annotation(&self, id: &AnnotationId) -> Option<&Annotation> {
        self.annotations().find(|a| a.id() == id)
    }

    /// The set holding annotation `id`.
    pub fn set_of(&self, id: &AnnotationId) -> Option<&AnnotationSetFile> {
        self.sets.iter().find(|s| s.get(id).is_some())
    }

    /// Validates `set`, writes it to `annotations/<set_id>.json` and updates
    /// the index. Both files are replaced atomically; if the index cannot be
    /// written the set file is restored.
    pub fn persist_annotation_set(&self, set: AnnotationSetFile) -> Result<Project, RepoError> {
        self.persist_annotation_set_with(set, &FsStorage)
    }

    pub fn persist_annotation_set_with(
        &self,
        mut set: AnnotationSetFile,
        storage: &dyn Storage,
    ) -> Result<Project, RepoError> {
        if !valid_set_id(&set.set_id) {
            return Err(RepoError::InvalidSetId(set.set_id));
        }
        let mut seen = BTreeSet::new();
        for annotation in &set.annotations {
            let mut violations = validate_annotation(annotation);
            if annotation.targets().is_empty() {
                violations.push(Violation::new("targets", "at least one target"));
            }
            if !violations.is_empty() {
                return Err(RepoError::ValidationFailed {
                    annotation: annotation.id().clone(),
                    violations,
                });
            }
            for (i, target) in annotation.targets().iter().enumerate() {
                self.registry()
                    .resolve_ref(&target.artefact, target.version)
                    .map_err(|e| RepoError::UnresolvedTarget {
                        annotation: annotation.id().clone(),
                        target_index: i,
                        detail: e.to_string(),
                    })?;
            }
            if !seen.insert(annotation.id().clone()) {
                return Err(RepoError::DuplicateAnnotation {
                    annotation: annotation.id().clone(),
                    set_id: set.set_id.clone(),
                });
            }
            if let Some(other) = self
                .sets
                .iter()
                .filter(|s| s.set_id != set.set_id)
                .find(|s| s.get(annotation.id()).is_some())
            {
                return Err(RepoError::DuplicateAnnotation {
                    annotation: annotation.id().clone(),
                    set_id: other.set_id.clone(),
                });
            }
        }

        set.files = set
            .annotations
            .iter()
            .flat_map(|a| a.targets())
            .filter_map(|t| self.registry().resolve_ref(&t.artefact, t.version).ok())
            .map(|v| v.path.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        for a in &mut set.annotations {
            a.mark_persisted();
        }

        let rel = AnnotationSetFile::relative_path(&set.set_id);
        let entry = AnnotationSetEntry {
            set_id: set.set_id.clone(),
            path: rel.clone(),
            artefacts: set.referenced_artefacts(),
        };
        let mut index = self.index.clone();
        match index
            .annotation_sets
            .iter_mut()
            .find(|e| e.set_id == set.set_id)
        {
            Some(slot) => *slot = entry,
            None => index.annotation_sets.push(entry),
        }

        let set_path = self.root.join(&rel);
        let previous = fs::read(&set_path).ok();
        storage
            .write_atomic(&set_path, set.to_canonical().as_bytes())
            .map_err(|e| RepoError::io(&set_path, e))?;
        let index_path = self.root.join(INDEX_FILE);
        if let Err(e) = storage.write_atomic(&index_path, index.to_canonical().as_bytes()) {
            // Put the set file back so the index and directory stay in step.
            let _ = match previous {
                Some(bytes) => storage.write_atomic(&set_path, &bytes),
                None => storage.remove(&set_path),
            };
            return Err(RepoError::io(&index_path, e));
        }

        let mut sets = self.sets.clone();
        match sets.iter_mut().find(|s| s.set_id == set.set_id) {
            Some(slot) => *slot = set,
            None => sets.push(set),
        }
        Ok(Project {
            root: self.root.clone(),
            index,
            sets,
        })
    }

    fn with_registry(&self, registry: Registry) -> Result<Project, RepoError> {
        let mut index = self.index.clone();
        index.artefacts = registry;
        let index_path = self.root.join(INDEX_FILE);
        storage::write_atomic(&index_path, index.to_canonical().as_bytes())
            .map_err(|e| RepoError::io(&index_path, e))?;
        Ok(Project {
            root: self.root.clone(),
            index,
            sets: self.sets.clone(),
        })
    }

    /// Registers a new artefact from a file inside the project.
    pub fn register_artefact(
        &self,
        request: NewArtefact,
        now: Timestamp,
    ) -> Result<(Project, ArtefactId), Error> {
        let artefact = self
            .registry()
            .register_artefact(&self.root, request, now)?;
        let id = artefact.id.clone();
        let next = self.with_registry(self.registry().with_artefact(artefact))?;
        Ok((next, id))
    }

    pub fn add_version(
        &self,
        artefact: &ArtefactId,
        path: &Path,
        now: Timestamp,
    ) -> Result<Project, Error> {
        let updated = self
            .artefact(artefact)?
            .add_version(&self.root, path, now)?;
        Ok(self.with_registry(self.registry().with_artefact(updated))?)
    }

    pub fn set_version_status(
        &self,
        artefact: &ArtefactId,
        version_id: u32,
        status: VersionStatus,
    ) -> Result<Project, Error> {
        let updated = self
            .artefact(artefact)?
            .set_version_status(version_id, status)?;
        Ok(self.with_registry(self.registry().with_artefact(updated))?)
    }

    /// Drops an artefact from the registry. Annotations that target it are
    /// left alone and show up as dangling in consistency checks.
    pub fn remove_artefact(&self, artefact: &ArtefactId) -> Result<Project, Error> {
        let registry = self.registry().without_artefact(artefact)?;
        Ok(self.with_registry(registry)?)
    }

    /// Inserts an already-built artefact (e.g. an annotation set registered
    /// on demand).
    pub(crate) fn insert_artefact(&self, artefact: Artefact) -> Result<Project, RepoError> {
        self.with_registry(self.registry().with_artefact(artefact))
    }

    fn artefact(&self, id: &ArtefactId) -> Result<&Artefact, RegistryError> {
        self.registry()
            .get(id)
            .ok_or_else(|| RegistryError::UnknownArtefact(id.to_string()))
    }

    /// Stores `annotation`: replaces it in the set that already holds it, or
    /// adds it to the set named by `placement` (created when missing).
    pub fn put_annotation(
        &self,
        annotation: Annotation,
        placement: &SetPlacement,
    ) -> Result<Project, RepoError> {
        let mut set = match self.set_of(annotation.id()) {
            Some(existing) => existing.clone(),
            None => self.set(&placement.set_id).cloned().unwrap_or_else(|| {
                AnnotationSetFile::new(
                    &placement.set_id,
                    &placement.username,
                    &placement.session,
                    placement.date,
                )
            }),
        };
        match set
            .annotations
            .iter_mut()
            .find(|a| a.id() == annotation.id())
        {
            Some(slot) => *slot = annotation,
            None => set.annotations.push(annotation),
        }
        self.persist_annotation_set(set)
    }

    /// Applies `change` to a stored annotation and persists its set.
    pub fn update_annotation<F>(&self, id: &AnnotationId, change: F) -> Result<Project, Error>
    where
        F: FnOnce(&Annotation) -> Result<Annotation, ModelError>,
    {
        let set = self
            .set_of(id)
            .ok_or_else(|| RepoError::UnknownAnnotation(id.clone()))?;
        let mut set = set.clone();
        let slot = set
            .annotations
            .iter_mut()
            .find(|a| a.id() == id)
            .expect("set_of found the annotation");
        *slot = change(slot)?;
        Ok(self.persist_annotation_set(set)?)
    }

    /// Byte-level canonical rendering of every repository file, keyed by
    /// project-relative path. Used for comparisons and golden tests.
    pub fn canonical_files(&self) -> Vec<(String, String)> {
        let mut out = vec![(INDEX_FILE.to_string(), self.index.to_canonical())];
        for set in &self.sets {
            out.push((
                AnnotationSetFile::relative_path(&set.set_id),
                set.to_canonical(),
            ));
        }
        out
    }
}

pub(crate) fn read_index(dir: &Path) -> Result<ProjectIndex, RepoError> {
    let path = dir.join(INDEX_FILE);
    let text = match fs::read_to_string(&path) {
        Ok(text) => text,
        Err(e) if e.kind() == io::ErrorKind::NotFound => {
            return Err(RepoError::NotAProject(dir.to_path_buf()))
        }
        Err(e) => return Err(RepoError::io(&path, e)),
    };
    let index: ProjectIndex = serde_json::from_str(&text).map_err(|e| {
        RepoError::CorruptIndex(format!("{e} (byte {})", canonical::error_offset(&text, &e)))
    })?;
    if index.format_version == 0 || index.format_version > FORMAT_VERSION {
        return Err(RepoError::UnsupportedFormat(format!(
            "format_version {}",
            index.format_version
        )));
    }
    if index.digest_algorithm != DIGEST_ALGORITHM {
        return Err(RepoError::UnsupportedFormat(format!(
            "digest algorithm {}",
            index.digest_algorithm
        )));
    }
    Ok(index)
}

pub(crate) fn read_set(dir: &Path, rel: &str) -> Result<AnnotationSetFile, RepoError> {
    let path = dir.join(rel);
    let text = fs::read_to_string(&path).map_err(|e| RepoError::CorruptSet {
        path: rel.to_string(),
        offset: None,
        detail: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| RepoError::CorruptSet {
        path: rel.to_string(),
        offset: Some(canonical::error_offset(&text, &e)),
        detail: e.to_string(),
    })
}
