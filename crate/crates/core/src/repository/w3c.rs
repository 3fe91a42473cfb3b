//! Web Annotation (JSON-LD) interchange.
//!
//! Export maps the native model onto the Web Annotation vocabulary. Anything
//! the vocabulary has no term for (structured bodies, element-path
//! selectors, per-target presentation, function, audience, lifecycle state)
//! travels under the `ext:` prefix so that our own exports re-import
//! losslessly. Foreign documents import with sensible defaults; targets that
//! match no registered artefact are dropped with a warning.

use std::collections::BTreeSet;

use serde_json::{json, Map, Value};

use super::Project;
use crate::env::Environment;
use crate::model::{
    validate_annotation, Annotation, AnnotationFunction, AnnotationId, AnnotationMetadata,
    AnnotationParts, Body, Creator, LifecycleState, Motivation, PresentationProps, Role, Selector,
    Target, Timestamp, VersionRef,
};
use crate::registry::ArtefactId;

pub const WEB_ANNOTATION_CONTEXT: &str = "http://www.w3.org/ns/anno.jsonld";
pub const EXT_NAMESPACE: &str = "https://annoglue.dev/ns/ext#";
pub const MEDIA_FRAGMENTS: &str = "http://www.w3.org/TR/media-frags/";

const ANNOTATION_URN: &str = "urn:annoglue:annotation:";
const USER_URN: &str = "urn:annoglue:user:";
const FOREIGN_ROLE: &str = "contributor";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum W3cError {
    #[error("not an annotation document: {0}")]
    NotAnAnnotation(String),
    #[error("no target matches a registered artefact")]
    NoMappableTarget,
    #[error("invalid annotation document: {0}")]
    InvalidDocument(String),
    #[error("annotation {annotation} target {target_index}: {detail}")]
    UnresolvedTarget {
        annotation: AnnotationId,
        target_index: usize,
        detail: String,
    },
}

/// An imported annotation plus notes about anything that was dropped or
/// defaulted.
#[derive(Debug, Clone)]
pub struct Imported {
    pub annotation: Annotation,
    pub warnings: Vec<String>,
}

fn ext(key: &str) -> String {
    format!("ext:{key}")
}

/// Builds the JSON-LD document for `annotation`.
pub fn export_w3c_value(annotation: &Annotation, project: &Project) -> Result<Value, W3cError> {
    let meta = annotation.metadata();
    let mut targets = Vec::new();
    for (i, target) in annotation.targets().iter().enumerate() {
        let version = project
            .registry()
            .resolve_ref(&target.artefact, target.version)
            .map_err(|e| W3cError::UnresolvedTarget {
                annotation: annotation.id().clone(),
                target_index: i,
                detail: e.to_string(),
            })?;
        let mut t = Map::new();
        t.insert("source".into(), json!(version.path));
        t.insert(ext("artefact"), json!(target.artefact));
        t.insert(ext("version"), json!(target.version));
        t.insert(ext("presentation"), json!(target.presentation));
        if let Some(selector) = export_selector(&target.selector) {
            t.insert("selector".into(), selector);
        }
        targets.push(Value::Object(t));
    }

    let mut doc = Map::new();
    doc.insert(
        "@context".into(),
        json!([WEB_ANNOTATION_CONTEXT, { "ext": EXT_NAMESPACE }]),
    );
    doc.insert(
        "id".into(),
        json!(format!("{ANNOTATION_URN}{}", annotation.id())),
    );
    doc.insert("type".into(), json!("Annotation"));
    doc.insert("created".into(), json!(meta.created_at));
    doc.insert("modified".into(), json!(meta.modified_at));
    doc.insert(
        "creator".into(),
        json!({
            "id": format!("{USER_URN}{}", meta.creator.user_id),
            "type": "Person",
            "name": meta.creator.display_name,
            "ext:roles": meta.creator.roles,
        }),
    );
    doc.insert("motivation".into(), json!(meta.motivation));
    doc.insert("body".into(), export_body(annotation.body()));
    doc.insert("target".into(), Value::Array(targets));
    doc.insert(ext("function"), json!(annotation.function()));
    doc.insert(ext("audience"), json!(meta.audience));
    doc.insert(ext("state"), json!(annotation.state()));
    doc.insert(ext("purpose"), json!(meta.purpose));
    Ok(Value::Object(doc))
}

/// Serializes the JSON-LD document for `annotation` as indented text.
pub fn export_w3c(annotation: &Annotation, project: &Project) -> Result<String, W3cError> {
    let value = export_w3c_value(annotation, project)?;
    Ok(super::canonical::to_canonical_file(&value).expect("json value serializes"))
}

fn export_body(body: &Body) -> Value {
    match body {
        Body::Text { content } => json!({
            "type": "TextualBody",
            "value": content,
            "format": "text/plain",
        }),
        other => {
            let mut out = Map::new();
            out.insert("type".into(), json!(ext(other.variant_name())));
            out.insert("value".into(), json!(other.textual()));
            if let Value::Object(fields) = serde_json::to_value(other).expect("body serializes") {
                for (k, v) in fields {
                    if k != "kind" {
                        out.insert(ext(&k), v);
                    }
                }
            }
            Value::Object(out)
        }
    }
}

fn export_selector(selector: &Selector) -> Option<Value> {
    match selector {
        Selector::WholeArtefact => None,
        Selector::Region { x, y, w, h } => Some(json!({
            "type": "FragmentSelector",
            "conformsTo": MEDIA_FRAGMENTS,
            "value": format!("xywh={x},{y},{w},{h}"),
        })),
        Selector::ElementId { path } => Some(json!({
            "type": "ext:ElementIdSelector",
            "value": path.join("/"),
            "ext:path": path,
        })),
        Selector::Fragment { scheme, expression } => Some(json!({
            "type": "FragmentSelector",
            "conformsTo": scheme,
            "value": expression,
        })),
    }
}

/// Parses a JSON-LD document and maps it onto the project.
pub fn import_w3c(
    doc: &str,
    project: &Project,
    env: &mut dyn Environment,
) -> Result<Imported, W3cError> {
    let value: Value = serde_json::from_str(doc)
        .map_err(|e| W3cError::NotAnAnnotation(format!("not JSON: {e}")))?;
    import_w3c_value(&value, project, env)
}

pub fn import_w3c_value(
    doc: &Value,
    project: &Project,
    env: &mut dyn Environment,
) -> Result<Imported, W3cError> {
    let obj = doc
        .as_object()
        .ok_or_else(|| W3cError::NotAnAnnotation("document is not a JSON object".into()))?;
    if !one_or_many(obj.get("type"))
        .iter()
        .any(|t| t.as_str() == Some("Annotation"))
    {
        return Err(W3cError::NotAnAnnotation(
            "missing type \"Annotation\"".into(),
        ));
    }
    let mut warnings = Vec::new();

    let id = match obj.get("id").and_then(Value::as_str) {
        Some(raw) if !raw.is_empty() => {
            AnnotationId::new(raw.strip_prefix(ANNOTATION_URN).unwrap_or(raw))
        }
        _ => {
            let fresh = env.fresh_id();
            warnings.push(format!("document has no id; assigned {fresh}"));
            fresh
        }
    };

    let now = env.now();
    let created_at = timestamp_field(obj, "created", &mut warnings).unwrap_or(now);
    let modified_at = timestamp_field(obj, "modified", &mut warnings)
        .unwrap_or(created_at)
        .max(created_at);

    let creator = import_creator(obj.get("creator"), &mut warnings);
    let motivation = import_motivation(obj.get("motivation"), &mut warnings);
    let body = import_body(obj, &mut warnings)?;

    let mut targets: Vec<Target> = Vec::new();
    let raw_targets = one_or_many(obj.get("target"));
    for (i, raw) in raw_targets.iter().enumerate() {
        match import_target(raw, project, &mut warnings) {
            Some(t) if targets.iter().any(|e| e.same_anchor(&t)) => {
                warnings.push(format!("target {i}: duplicate anchor dropped"));
            }
            Some(t) => targets.push(t),
            None => warnings.push(format!(
                "target {i}: no registered artefact matches; dropped"
            )),
        }
    }
    if targets.is_empty() {
        return Err(W3cError::NoMappableTarget);
    }

    let function = match obj.get(&ext("function")) {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| W3cError::InvalidDocument(format!("ext:function: {e}")))?,
        None => AnnotationFunction::Attentional,
    };
    let audience: BTreeSet<Role> = match obj.get(&ext("audience")) {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| W3cError::InvalidDocument(format!("ext:audience: {e}")))?,
        None => BTreeSet::new(),
    };
    let state = match obj.get(&ext("state")) {
        Some(v) => serde_json::from_value(v.clone())
            .map_err(|e| W3cError::InvalidDocument(format!("ext:state: {e}")))?,
        None => LifecycleState::Open,
    };
    let purpose = obj
        .get(&ext("purpose"))
        .and_then(Value::as_str)
        .unwrap_or_default()
        .to_string();

    let annotation = Annotation::from_parts(AnnotationParts {
        id,
        body,
        function,
        metadata: AnnotationMetadata {
            created_at,
            modified_at,
            creator,
            audience,
            motivation,
            purpose,
        },
        targets,
        state,
    });
    let violations = validate_annotation(&annotation);
    if !violations.is_empty() {
        let detail = violations
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join("; ");
        return Err(W3cError::InvalidDocument(detail));
    }
    Ok(Imported {
        annotation,
        warnings,
    })
}

fn one_or_many(value: Option<&Value>) -> Vec<&Value> {
    match value {
        None | Some(Value::Null) => Vec::new(),
        Some(Value::Array(items)) => items.iter().collect(),
        Some(other) => vec![other],
    }
}

fn timestamp_field(
    obj: &Map<String, Value>,
    key: &str,
    warnings: &mut Vec<String>,
) -> Option<Timestamp> {
    let raw = obj.get(key)?.as_str()?;
    match raw.parse() {
        Ok(ts) => Some(ts),
        Err(_) => {
            warnings.push(format!("unparseable {key} timestamp {raw:?} ignored"));
            None
        }
    }
}

fn import_creator(value: Option<&Value>, warnings: &mut Vec<String>) -> Creator {
    let first = one_or_many(value).into_iter().next();
    let (raw_id, name, roles) = match first {
        Some(Value::String(id)) => (id.clone(), String::new(), None),
        Some(Value::Object(o)) => (
            o.get("id")
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            o.get("name")
                .or_else(|| o.get("nickname"))
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            o.get(&ext("roles"))
                .and_then(|r| serde_json::from_value::<BTreeSet<Role>>(r.clone()).ok()),
        ),
        _ => (String::new(), String::new(), None),
    };
    let mut user_id = raw_id.strip_prefix(USER_URN).unwrap_or(&raw_id).to_string();
    if user_id.is_empty() {
        user_id = "anonymous".into();
        warnings.push("document has no creator id; using \"anonymous\"".into());
    }
    let roles = roles
        .filter(|r| !r.is_empty())
        .unwrap_or_else(|| BTreeSet::from([Role::Custom(FOREIGN_ROLE.into())]));
    Creator {
        display_name: if name.is_empty() {
            user_id.clone()
        } else {
            name
        },
        user_id,
        roles,
    }
}

fn import_motivation(value: Option<&Value>, warnings: &mut Vec<String>) -> Motivation {
    let candidates = one_or_many(value);
    for c in &candidates {
        if let Some(m) = c
            .as_str()
            .map(|s| s.strip_prefix("oa:").unwrap_or(s))
            .and_then(|s| s.parse::<Motivation>().ok())
        {
            return m;
        }
    }
    if !candidates.is_empty() {
        warnings.push("motivation not in the supported vocabulary; using commenting".into());
    }
    Motivation::Commenting
}

fn import_body(obj: &Map<String, Value>, warnings: &mut Vec<String>) -> Result<Body, W3cError> {
    if let Some(text) = obj.get("bodyValue").and_then(Value::as_str) {
        return Ok(Body::text(text));
    }
    let bodies = one_or_many(obj.get("body"));
    if bodies.len() > 1 {
        warnings.push(format!(
            "{} bodies present; only the first is kept",
            bodies.len()
        ));
    }
    let body = bodies
        .into_iter()
        .next()
        .ok_or_else(|| W3cError::InvalidDocument("annotation has no body".into()))?;
    let body = match body {
        Value::String(iri) => {
            return Ok(Body::Image {
                uri: iri.clone(),
                alt: String::new(),
            })
        }
        Value::Object(o) => o,
        _ => return Err(W3cError::InvalidDocument("unsupported body".into())),
    };
    let kind = body
        .get("type")
        .and_then(Value::as_str)
        .unwrap_or("TextualBody");
    let fallback = body
        .get("value")
        .and_then(Value::as_str)
        .unwrap_or_default();
    if let Some(variant) = kind.strip_prefix("ext:") {
        let mut fields = Map::new();
        fields.insert("kind".into(), json!(kebab(variant)));
        for (k, v) in body {
            if let Some(field) = k.strip_prefix("ext:") {
                fields.insert(field.to_string(), v.clone());
            }
        }
        match serde_json::from_value::<Body>(Value::Object(fields)) {
            Ok(parsed) => return Ok(parsed),
            Err(e) => warnings.push(format!("body {kind} not understood ({e}); kept as text")),
        }
    } else if kind != "TextualBody" {
        warnings.push(format!("body type {kind} imported as text"));
    }
    if fallback.is_empty() {
        return Err(W3cError::InvalidDocument(
            "body has no textual value".into(),
        ));
    }
    Ok(Body::text(fallback))
}

fn kebab(variant: &str) -> String {
    let mut out = String::new();
    for (i, c) in variant.chars().enumerate() {
        if c.is_ascii_uppercase() {
            if i > 0 {
                out.push('-');
            }
            out.push(c.to_ascii_lowercase());
        } else {
            out.push(c);
        }
    }
    out
}

fn import_target(raw: &Value, project: &Project, warnings: &mut Vec<String>) -> Option<Target> {
    let (source, obj) = match raw {
        Value::String(s) => (s.clone(), None),
        Value::Object(o) => (
            o.get("source")
                .or_else(|| o.get("id"))
                .and_then(Value::as_str)
                .unwrap_or_default()
                .to_string(),
            Some(o),
        ),
        _ => return None,
    };

    let native = obj.and_then(|o| {
        let artefact = ArtefactId::new(o.get(&ext("artefact"))?.as_str()?);
        project.registry().get(&artefact)?;
        let version = o
            .get(&ext("version"))
            .and_then(|v| serde_json::from_value::<VersionRef>(v.clone()).ok())
            .unwrap_or(VersionRef::Any);
        Some((artefact, version))
    });
    let (artefact, version) = match native {
        Some(found) => found,
        None => {
            let (art, _) = project.registry().find_by_path(&source)?;
            (art.id.clone(), VersionRef::Any)
        }
    };

    let selector = obj
        .and_then(|o| one_or_many(o.get("selector")).into_iter().next())
        .map(|s| import_selector(s, warnings))
        .unwrap_or(Selector::WholeArtefact);
    let presentation = obj
        .and_then(|o| o.get(&ext("presentation")))
        .and_then(|p| serde_json::from_value::<PresentationProps>(p.clone()).ok())
        .unwrap_or_default();
    Some(Target {
        artefact,
        version,
        selector,
        presentation,
    })
}

fn import_selector(raw: &Value, warnings: &mut Vec<String>) -> Selector {
    let kind = raw.get("type").and_then(Value::as_str).unwrap_or_default();
    let value = raw.get("value").and_then(Value::as_str).unwrap_or_default();
    match kind {
        "FragmentSelector" => {
            let conforms = raw.get("conformsTo").and_then(Value::as_str);
            if conforms.is_none() || conforms == Some(MEDIA_FRAGMENTS) {
                if let Some(region) = parse_xywh(value) {
                    return region;
                }
            }
            Selector::Fragment {
                scheme: conforms.unwrap_or("fragment").to_string(),
                expression: value.to_string(),
            }
        }
        "ext:ElementIdSelector" => {
            let path = raw
                .get("ext:path")
                .and_then(|p| serde_json::from_value::<Vec<String>>(p.clone()).ok())
                .unwrap_or_else(|| value.split('/').map(str::to_string).collect());
            Selector::ElementId { path }
        }
        other => {
            warnings.push(format!(
                "selector type {other:?} kept as an opaque fragment"
            ));
            Selector::Fragment {
                scheme: if other.is_empty() {
                    "selector".into()
                } else {
                    other.into()
                },
                expression: super::canonical::to_canonical_string(raw)
                    .expect("json value serializes"),
            }
        }
    }
}

fn parse_xywh(value: &str) -> Option<Selector> {
    let rest = value.strip_prefix("xywh=")?;
    let rest = rest.strip_prefix("pixel:").unwrap_or(rest);
    let nums: Vec<f64> = rest
        .split(',')
        .map(|p| p.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .ok()?;
    match nums[..] {
        [x, y, w, h] if w > 0.0 && h > 0.0 => Some(Selector::Region { x, y, w, h }),
        _ => None,
    }
}
