//! Reconstructs the index's annotation-set catalogue from the files actually
//! present under `annotations/`.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    read_index, read_set, AnnotationSetEntry, AnnotationSetFile, ProjectIndex, RepoError,
    ANNOTATION_DIR,
};
use crate::model::AnnotationId;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum IndexFinding {
    /// Listed in the index but absent on disk; the entry is dropped.
    MissingFile { set_id: String, path: String },
    /// Present on disk but not listed; the entry is restored.
    UnlistedSet { set_id: String, path: String },
    /// Present on disk but not parseable; left out of the rebuilt index.
    UnreadableSet { path: String, detail: String },
    /// The same annotation id stored in more than one set.
    DuplicateAnnotation {
        annotation: AnnotationId,
        sets: Vec<String>,
    },
}

impl fmt::Display for IndexFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IndexFinding::MissingFile { set_id, path } => {
                write!(
                    f,
                    "missing-file {set_id}: {path} is listed but does not exist"
                )
            }
            IndexFinding::UnlistedSet { set_id, path } => {
                write!(f, "unlisted-set {set_id}: {path} exists but was not listed")
            }
            IndexFinding::UnreadableSet { path, detail } => {
                write!(f, "unreadable-set {path}: {detail}")
            }
            IndexFinding::DuplicateAnnotation { annotation, sets } => {
                write!(
                    f,
                    "duplicate-annotation {annotation}: stored in {}",
                    sets.join(", ")
                )
            }
        }
    }
}

/// Scans `dir/annotations` and returns the corrected index together with
/// every discrepancy against the index currently on disk. Nothing is written.
pub fn rebuild_index(dir: &Path) -> Result<(ProjectIndex, Vec<IndexFinding>), RepoError> {
    let old = read_index(dir)?;
    let ann_dir = dir.join(ANNOTATION_DIR);

    let mut on_disk: BTreeMap<String, String> = BTreeMap::new();
    for entry in fs::read_dir(&ann_dir).map_err(|e| RepoError::io(&ann_dir, e))? {
        let entry = entry.map_err(|e| RepoError::io(&ann_dir, e))?;
        let name = entry.file_name();
        let Some(name) = name.to_str() else { continue };
        if name.starts_with('.') || !entry.path().is_file() {
            continue;
        }
        if let Some(stem) = name.strip_suffix(".json") {
            on_disk.insert(stem.to_string(), AnnotationSetFile::relative_path(stem));
        }
    }

    let mut findings = Vec::new();
    let mut order: Vec<String> = Vec::new();
    for entry in &old.annotation_sets {
        if on_disk.contains_key(&entry.set_id) && dir.join(&entry.path).is_file() {
            order.push(entry.set_id.clone());
        } else {
            findings.push(IndexFinding::MissingFile {
                set_id: entry.set_id.clone(),
                path: entry.path.clone(),
            });
        }
    }
    for (set_id, path) in &on_disk {
        if !old.annotation_sets.iter().any(|e| &e.set_id == set_id) {
            findings.push(IndexFinding::UnlistedSet {
                set_id: set_id.clone(),
                path: path.clone(),
            });
            order.push(set_id.clone());
        }
    }

    let mut entries = Vec::new();
    let mut holders: BTreeMap<AnnotationId, Vec<String>> = BTreeMap::new();
    for set_id in order {
        let path = on_disk[&set_id].clone();
        match read_set(dir, &path) {
            Ok(set) => {
                for a in &set.annotations {
                    holders
                        .entry(a.id().clone())
                        .or_default()
                        .push(set_id.clone());
                }
                entries.push(AnnotationSetEntry {
                    set_id,
                    path,
                    artefacts: set.referenced_artefacts(),
                });
            }
            Err(e) => findings.push(IndexFinding::UnreadableSet {
                path,
                detail: e.to_string(),
            }),
        }
    }
    for (annotation, sets) in holders {
        if sets.len() > 1 {
            findings.push(IndexFinding::DuplicateAnnotation { annotation, sets });
        }
    }

    let mut index = old;
    index.annotation_sets = entries;
    Ok((index, findings))
}

/// Writes `index` as the project's index file.
pub fn write_index(dir: &Path, index: &ProjectIndex) -> Result<(), RepoError> {
    let path = dir.join(super::INDEX_FILE);
    super::storage::write_atomic(&path, index.to_canonical().as_bytes())
        .map_err(|e| RepoError::io(&path, e))
}
