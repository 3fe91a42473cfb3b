//! Cross-referencing: carrying annotations over to further artefacts,
//! annotating annotations, and project-wide consistency checks.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::env::Environment;
use crate::model::{
    Annotation, AnnotationFunction, AnnotationId, Body, Creator, Motivation, PresentationProps,
    Selector, Target, VersionRef,
};
use crate::registry::{digest_file, ArtefactId, ArtefactKind, EditorBinding, NewArtefact};
use crate::repository::{AnnotationSetFile, Project, RepoError, SetPlacement};
use crate::Result;

/// Editor id recorded for annotation sets registered as artefacts.
pub const ANNOTATION_SET_EDITOR: &str = "annoglue";

/// Adds a whole-artefact target on `dest` to every listed annotation. The new
/// target starts at the coordinates of the annotation's first target; bodies
/// and existing targets are untouched. Every change is checked before any
/// set is written.
pub fn import_into_artefact(
    project: &Project,
    ids: &[AnnotationId],
    dest: &ArtefactId,
    version: VersionRef,
    env: &mut dyn Environment,
) -> Result<Project> {
    project.registry().resolve_ref(dest, version)?;
    let now = env.now();

    let mut updated: BTreeMap<AnnotationId, Annotation> = BTreeMap::new();
    for id in ids {
        let current = match updated.get(id) {
            Some(a) => a,
            None => project
                .annotation(id)
                .ok_or_else(|| RepoError::UnknownAnnotation(id.clone()))?,
        };
        let presentation = current
            .targets()
            .first()
            .map(|t| t.presentation)
            .unwrap_or(PresentationProps::DEFAULT);
        let target =
            Target::new(dest, version, Selector::WholeArtefact).with_presentation(presentation);
        let next = current.attach_target(target, now)?;
        updated.insert(id.clone(), next);
    }

    let mut next = project.clone();
    for set in project.sets() {
        if !set.annotations.iter().any(|a| updated.contains_key(a.id())) {
            continue;
        }
        let mut set = set.clone();
        for slot in &mut set.annotations {
            if let Some(a) = updated.remove(slot.id()) {
                *slot = a;
            }
        }
        next = next.persist_annotation_set(set)?;
    }
    Ok(next)
}

/// Creates a reply-style annotation whose single target is `source`, reached
/// through the source's annotation set registered as an artefact. The set is
/// registered on first use. The new annotation is stored alongside the
/// source.
pub fn annotate_annotation(
    project: &Project,
    source: &AnnotationId,
    body: Body,
    function: AnnotationFunction,
    creator: Creator,
    motivation: Motivation,
    env: &mut dyn Environment,
) -> Result<(Project, AnnotationId)> {
    let set = project
        .set_of(source)
        .ok_or_else(|| RepoError::UnknownAnnotation(source.clone()))?
        .clone();
    body.check()?;
    let now = env.now();

    let annotation = Annotation::create(
        env.fresh_id(),
        body,
        function,
        creator,
        motivation,
        BTreeSet::new(),
        now,
    )?;
    let id = annotation.id().clone();
    if let Some(holder) = project.set_of(&id) {
        return Err(RepoError::DuplicateAnnotation {
            annotation: id,
            set_id: holder.set_id.clone(),
        }
        .into());
    }
    let (project, set_artefact) = ensure_set_artefact(project, &set, now)?;
    let target = Target::new(
        set_artefact,
        VersionRef::Any,
        Selector::element_id([source.as_str()]),
    );
    let annotation = annotation.attach_target(target, now)?;
    let placement = SetPlacement {
        set_id: set.set_id.clone(),
        username: set.username.clone(),
        session: set.session.clone(),
        date: set.date,
    };
    let project = project.put_annotation(annotation, &placement)?;
    Ok((project, id))
}

fn ensure_set_artefact(
    project: &Project,
    set: &AnnotationSetFile,
    now: crate::model::Timestamp,
) -> Result<(Project, ArtefactId)> {
    let rel = AnnotationSetFile::relative_path(&set.set_id);
    if let Some(existing) = project
        .registry()
        .artefacts()
        .iter()
        .find(|a| a.kind == ArtefactKind::AnnotationSet && a.latest_version().path == rel)
    {
        return Ok((project.clone(), existing.id.clone()));
    }
    let base = format!("set-{}", set.set_id);
    let mut id = ArtefactId::new(base.clone());
    let mut n = 1;
    while project.registry().get(&id).is_some() {
        n += 1;
        id = ArtefactId::new(format!("{base}-{n}"));
    }
    let editor = EditorBinding::new(ANNOTATION_SET_EDITOR, "annoglue", "")?;
    let artefact = project.registry().register_artefact(
        project.root(),
        NewArtefact {
            id: Some(id.clone()),
            name: rel.clone(),
            path: rel.clone().into(),
            editor,
            kind: ArtefactKind::AnnotationSet,
        },
        now,
    )?;
    Ok((project.insert_artefact(artefact)?, id))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingKind {
    DanglingArtefact,
    DanglingVersion,
    StaleTarget,
    BrokenExternalFile,
    DigestMismatch,
    OrphanAnnotationTarget,
}

impl FindingKind {
    pub fn severity(self) -> Severity {
        match self {
            FindingKind::StaleTarget | FindingKind::DigestMismatch => Severity::Warning,
            _ => Severity::Error,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            FindingKind::DanglingArtefact => "dangling-artefact",
            FindingKind::DanglingVersion => "dangling-version",
            FindingKind::StaleTarget => "stale-target",
            FindingKind::BrokenExternalFile => "broken-external-file",
            FindingKind::DigestMismatch => "digest-mismatch",
            FindingKind::OrphanAnnotationTarget => "orphan-annotation-target",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ConsistencyFinding {
    pub severity: Severity,
    pub kind: FindingKind,
    pub annotation: AnnotationId,
    /// Absent for body-level findings.
    pub target_index: Option<usize>,
    pub detail: String,
}

impl ConsistencyFinding {
    fn new(
        kind: FindingKind,
        annotation: &AnnotationId,
        target_index: Option<usize>,
        detail: String,
    ) -> Self {
        ConsistencyFinding {
            severity: kind.severity(),
            kind,
            annotation: annotation.clone(),
            target_index,
            detail,
        }
    }
}

/// `SEVERITY kind annotation-id[target-index]: detail`
impl fmt::Display for ConsistencyFinding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let severity = match self.severity {
            Severity::Error => "ERROR",
            Severity::Warning => "WARNING",
        };
        write!(f, "{severity} {} {}", self.kind.as_str(), self.annotation)?;
        if let Some(i) = self.target_index {
            write!(f, "[{i}]")?;
        }
        write!(f, ": {}", self.detail)
    }
}

/// A link is checked only when it looks like a project-relative path: no URI
/// scheme and not absolute.
pub fn is_project_relative_link(link: &str) -> bool {
    if link.is_empty() || link.starts_with('/') || link.starts_with('\\') {
        return false;
    }
    if let Some((scheme, _)) = link.split_once(':') {
        let looks_like_scheme = scheme.len() > 1
            && scheme
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        let drive_letter = scheme.len() == 1;
        if looks_like_scheme || drive_letter {
            return false;
        }
    }
    !Path::new(link).is_absolute()
}

/// Reports dangling references, stale pins, broken external links, edited
/// files and orphaned replies, ordered by annotation id then target index.
/// Reads files to compare digests but never writes.
pub fn check_consistency(project: &Project) -> Vec<ConsistencyFinding> {
    let registry = project.registry();
    let known: BTreeSet<&AnnotationId> = project.annotations().map(|a| a.id()).collect();
    let mut annotations: Vec<&Annotation> = project.annotations().collect();
    annotations.sort_by(|a, b| a.id().cmp(b.id()));

    let mut digests: BTreeMap<(ArtefactId, u32), Option<String>> = BTreeMap::new();
    let mut findings = Vec::new();
    for annotation in annotations {
        let id = annotation.id();
        if let Body::ExternalFile { link, .. } = annotation.body() {
            if is_project_relative_link(link) && !project.root().join(link).exists() {
                findings.push(ConsistencyFinding::new(
                    FindingKind::BrokenExternalFile,
                    id,
                    None,
                    format!("linked file {link:?} does not exist"),
                ));
            }
        }
        for (i, target) in annotation.targets().iter().enumerate() {
            let Some(artefact) = registry.get(&target.artefact) else {
                findings.push(ConsistencyFinding::new(
                    FindingKind::DanglingArtefact,
                    id,
                    Some(i),
                    format!("artefact {:?} is not registered", target.artefact.as_str()),
                ));
                continue;
            };
            let latest = artefact.latest_version();
            let version = match target.version {
                VersionRef::Any => latest,
                VersionRef::Pinned(v) => match artefact.version(v) {
                    Some(found) => found,
                    None => {
                        findings.push(ConsistencyFinding::new(
                            FindingKind::DanglingVersion,
                            id,
                            Some(i),
                            format!("artefact {} has no version {v}", artefact.id),
                        ));
                        continue;
                    }
                },
            };
            if version.version_id != latest.version_id {
                findings.push(ConsistencyFinding::new(
                    FindingKind::StaleTarget,
                    id,
                    Some(i),
                    format!(
                        "pinned to {} v{} but latest is v{}",
                        artefact.id, version.version_id, latest.version_id
                    ),
                ));
            }
            if artefact.kind == ArtefactKind::AnnotationSet {
                if let Selector::ElementId { path } = &target.selector {
                    let named = path.last().map(|s| AnnotationId::new(s.as_str()));
                    if !named.as_ref().is_some_and(|n| known.contains(n)) {
                        findings.push(ConsistencyFinding::new(
                            FindingKind::OrphanAnnotationTarget,
                            id,
                            Some(i),
                            format!("no annotation {:?} in the project", path.join("/")),
                        ));
                    }
                }
            } else {
                let actual = digests
                    .entry((artefact.id.clone(), version.version_id))
                    .or_insert_with(|| digest_file(project.root(), &version.path).ok());
                match actual {
                    None => findings.push(ConsistencyFinding::new(
                        FindingKind::DigestMismatch,
                        id,
                        Some(i),
                        format!(
                            "{} v{}: file {:?} is missing",
                            artefact.id, version.version_id, version.path
                        ),
                    )),
                    Some(d) if *d != version.content_digest => {
                        findings.push(ConsistencyFinding::new(
                            FindingKind::DigestMismatch,
                            id,
                            Some(i),
                            format!(
                                "{} v{}: file {:?} changed since it was registered",
                                artefact.id, version.version_id, version.path
                            ),
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
    }
    findings.sort_by(|a, b| {
        (&a.annotation, a.target_index, a.kind).cmp(&(&b.annotation, b.target_index, b.kind))
    });
    findings
}
