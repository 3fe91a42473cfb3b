use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::metadata::keyword_enum;
use super::scenario::{render_scenario, ScenarioStep};
use super::ModelError;

/// A point in artefact-canvas units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

pub type Polyline = Vec<Point>;

keyword_enum! {
    /// Fixed marker glyph catalogue.
    Glyph {
        Warning => "warning",
        Question => "question",
        Todo => "todo",
        Check => "check",
        Cross => "cross",
        Info => "info",
    }
}

keyword_enum! {
    Choice {
        Agree => "agree",
        Disagree => "disagree",
    }
}

/// The content of an annotation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Body {
    Text {
        content: String,
    },
    Drawing {
        strokes: Vec<Polyline>,
    },
    Image {
        uri: String,
        alt: String,
    },
    Marker {
        glyph: Glyph,
        label: String,
    },
    /// Raw ballots keyed by voter user id; counters are derived.
    Vote {
        label: String,
        ballots: BTreeMap<String, Choice>,
    },
    Scenario {
        title: String,
        steps: Vec<ScenarioStep>,
    },
    ExternalFile {
        label: String,
        link: String,
    },
}

impl Body {
    pub fn text(content: impl Into<String>) -> Body {
        Body::Text {
            content: content.into(),
        }
    }

    pub fn vote(label: impl Into<String>) -> Body {
        Body::Vote {
            label: label.into(),
            ballots: BTreeMap::new(),
        }
    }

    pub fn external_file(label: impl Into<String>, link: impl Into<String>) -> Body {
        Body::ExternalFile {
            label: label.into(),
            link: link.into(),
        }
    }

    pub fn marker(glyph: &str, label: impl Into<String>) -> Result<Body, ModelError> {
        let glyph = Glyph::from_str(glyph)
            .map_err(|_| ModelError::InvalidBody(format!("unknown marker glyph {glyph:?}")))?;
        Ok(Body::Marker {
            glyph,
            label: label.into(),
        })
    }

    /// Variant name as used in exports and graph labels.
    pub fn variant_name(&self) -> &'static str {
        match self {
            Body::Text { .. } => "Text",
            Body::Drawing { .. } => "Drawing",
            Body::Image { .. } => "Image",
            Body::Marker { .. } => "Marker",
            Body::Vote { .. } => "Vote",
            Body::Scenario { .. } => "Scenario",
            Body::ExternalFile { .. } => "ExternalFile",
        }
    }

    /// Plain-text rendering of the body, used for search and as the textual
    /// fallback in interchange documents.
    pub fn textual(&self) -> String {
        match self {
            Body::Text { content } => content.clone(),
            Body::Drawing { strokes } => format!("drawing ({} strokes)", strokes.len()),
            Body::Image { uri, alt } if alt.is_empty() => format!("image {uri}"),
            Body::Image { alt, .. } => alt.clone(),
            Body::Marker { glyph, label } => format!("[{glyph}] {label}"),
            Body::Vote { label, ballots } => {
                let agree = ballots.values().filter(|c| **c == Choice::Agree).count();
                format!(
                    "{label} ({agree} agree / {} disagree)",
                    ballots.len() - agree
                )
            }
            Body::Scenario { title, steps } if title.is_empty() => render_scenario(steps),
            Body::Scenario { title, steps } => format!("{title}\n{}", render_scenario(steps)),
            Body::ExternalFile { label, link } => format!("{label} <{link}>"),
        }
    }

    /// One-line summary of at most `max` characters.
    pub fn summary(&self, max: usize) -> String {
        let full = match self {
            Body::Scenario { title, steps } if !title.is_empty() => {
                format!("{title} ({} steps)", steps.len())
            }
            other => other.textual(),
        };
        let one_line = full.split_whitespace().collect::<Vec<_>>().join(" ");
        if one_line.chars().count() <= max {
            one_line
        } else {
            let mut cut: String = one_line.chars().take(max.saturating_sub(3)).collect();
            cut.push_str("...");
            cut
        }
    }

    /// Checks the variant invariants, returning `(field, rule)` pairs for each
    /// violation. Field names are relative to the body.
    pub fn violations(&self) -> Vec<(String, &'static str)> {
        let mut out = Vec::new();
        match self {
            Body::Text { content } => {
                if content.is_empty() {
                    out.push(("content".to_string(), "non-empty text"));
                }
            }
            Body::Drawing { strokes } => {
                for (i, line) in strokes.iter().enumerate() {
                    if line.len() < 2 {
                        out.push((format!("strokes[{i}]"), "at least 2 points"));
                    }
                    if line.iter().any(|p| !p.x.is_finite() || !p.y.is_finite()) {
                        out.push((format!("strokes[{i}]"), "finite coordinates"));
                    }
                }
            }
            Body::Image { uri, .. } => {
                if uri.is_empty() {
                    out.push(("uri".to_string(), "non-empty uri"));
                }
            }
            Body::Marker { .. } | Body::Vote { .. } => {}
            Body::Scenario { steps, .. } => {
                match steps.first() {
                    None => out.push(("steps".to_string(), "at least 1 step")),
                    Some(first) if !first.keyword.may_open() => out.push((
                        "steps[0].keyword".to_string(),
                        "first step is Given or When",
                    )),
                    Some(_) => {}
                }
                for (i, step) in steps.iter().enumerate() {
                    if step.text.trim().is_empty() {
                        out.push((format!("steps[{i}].text"), "non-empty step text"));
                    }
                }
            }
            Body::ExternalFile { link, .. } => {
                if link.is_empty() {
                    out.push(("link".to_string(), "non-empty link"));
                }
            }
        }
        out
    }

    pub fn check(&self) -> Result<(), ModelError> {
        match self.violations().first() {
            None => Ok(()),
            Some((field, rule)) => Err(ModelError::InvalidBody(format!(
                "{} body: {field}: {rule}",
                self.variant_name()
            ))),
        }
    }
}

/// Builds a scenario body from raw step text.
pub fn scenario_body(title: impl Into<String>, raw: &str) -> Result<Body, ModelError> {
    let steps = super::scenario::parse_scenario(raw)?;
    Ok(Body::Scenario {
        title: title.into(),
        steps,
    })
}
