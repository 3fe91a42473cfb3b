use std::fmt;

use serde::{Deserialize, Serialize};

use super::{Annotation, Role, VersionRef};

/// A broken invariant: which field, and which rule it breaks.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Violation {
    pub field: String,
    pub rule: String,
}

impl Violation {
    pub fn new(field: impl Into<String>, rule: impl Into<String>) -> Violation {
        Violation {
            field: field.into(),
            rule: rule.into(),
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.rule)
    }
}

fn join(prefix: &str, field: &str) -> String {
    if field.is_empty() {
        prefix.to_string()
    } else {
        format!("{prefix}.{field}")
    }
}

fn check_roles<'a>(field: &str, roles: impl Iterator<Item = &'a Role>, out: &mut Vec<Violation>) {
    for role in roles {
        if !role.is_well_formed() {
            out.push(Violation::new(
                field,
                "custom role label non-empty and distinct from built-in roles",
            ));
        }
    }
}

/// Lists every invariant violation of `annotation`. An empty list means the
/// annotation is valid. The at-least-one-target rule only applies when
/// persisting and is not checked here.
pub fn validate_annotation(annotation: &Annotation) -> Vec<Violation> {
    let mut out = Vec::new();
    if annotation.id().as_str().is_empty() {
        out.push(Violation::new("id", "non-empty id"));
    }

    let meta = annotation.metadata();
    if meta.creator.user_id.trim().is_empty() {
        out.push(Violation::new(
            "metadata.creator.user_id",
            "non-empty user_id",
        ));
    }
    if meta.creator.roles.is_empty() {
        out.push(Violation::new(
            "metadata.creator.roles",
            "at least one role",
        ));
    }
    check_roles(
        "metadata.creator.roles",
        meta.creator.roles.iter(),
        &mut out,
    );
    check_roles("metadata.audience", meta.audience.iter(), &mut out);
    if meta.modified_at < meta.created_at {
        out.push(Violation::new(
            "metadata.modified_at",
            "modified_at >= created_at",
        ));
    }

    for (field, rule) in annotation.body().violations() {
        out.push(Violation::new(join("body", &field), rule));
    }

    let targets = annotation.targets();
    for (i, target) in targets.iter().enumerate() {
        let prefix = format!("targets[{i}]");
        if target.artefact.as_str().is_empty() {
            out.push(Violation::new(
                join(&prefix, "artefact"),
                "non-empty artefact id",
            ));
        }
        if target.version == VersionRef::Pinned(0) {
            out.push(Violation::new(join(&prefix, "version"), "version >= 1"));
        }
        let sel = join(&prefix, "selector");
        for (field, rule) in target.selector.violations() {
            out.push(Violation::new(join(&sel, field), rule));
        }
        for rule in target.presentation.violations() {
            out.push(Violation::new(join(&prefix, "presentation"), rule));
        }
    }
    for (j, target) in targets.iter().enumerate() {
        if targets[..j]
            .iter()
            .any(|earlier| earlier.same_anchor(target))
        {
            out.push(Violation::new(
                "targets",
                format!("duplicate target triple (index {j})"),
            ));
        }
    }
    out
}
