//! Where an annotation attaches: artefact, version, selector and the
//! target-local placement of the annotation box.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::registry::ArtefactId;

/// Selects a part of an artefact version.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Selector {
    WholeArtefact,
    /// Outermost-first element path.
    ElementId {
        path: Vec<String>,
    },
    Region {
        x: f64,
        y: f64,
        w: f64,
        h: f64,
    },
    Fragment {
        scheme: String,
        expression: String,
    },
}

impl Selector {
    pub fn element_id<I, S>(path: I) -> Selector
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Selector::ElementId {
            path: path.into_iter().map(Into::into).collect(),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Selector::WholeArtefact => "whole",
            Selector::ElementId { .. } => "id",
            Selector::Region { .. } => "region",
            Selector::Fragment { .. } => "frag",
        }
    }

    /// `(field, rule)` pairs relative to the selector.
    pub fn violations(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        match self {
            Selector::WholeArtefact => {}
            Selector::ElementId { path } => {
                if path.is_empty() {
                    out.push(("path", "non-empty element path"));
                } else if path.iter().any(|p| p.is_empty()) {
                    out.push(("path", "non-empty element identifiers"));
                }
            }
            Selector::Region { x, y, w, h } => {
                if [x, y, w, h].iter().any(|v| !v.is_finite()) {
                    out.push(("", "finite coordinates"));
                }
                if w.is_nan() || *w <= 0.0 {
                    out.push(("", "w > 0"));
                }
                if h.is_nan() || *h <= 0.0 {
                    out.push(("", "h > 0"));
                }
            }
            Selector::Fragment { expression, .. } => {
                if expression.is_empty() {
                    out.push(("expression", "non-empty expression"));
                }
            }
        }
        out
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Selector::WholeArtefact => f.write_str("whole"),
            Selector::ElementId { path } => write!(f, "id:{}", path.join("/")),
            Selector::Region { x, y, w, h } => write!(f, "region:{x},{y},{w},{h}"),
            Selector::Fragment { scheme, expression } => write!(f, "frag:{scheme}:{expression}"),
        }
    }
}

/// Placement of the annotation box on the hosting artefact's canvas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PresentationProps {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl PresentationProps {
    pub const DEFAULT: PresentationProps = PresentationProps {
        x: 0.0,
        y: 0.0,
        width: 160.0,
        height: 40.0,
    };

    pub fn new(x: f64, y: f64, width: f64, height: f64) -> Self {
        PresentationProps {
            x,
            y,
            width,
            height,
        }
    }

    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if [self.x, self.y, self.width, self.height]
            .iter()
            .any(|v| !v.is_finite())
        {
            out.push("finite coordinates");
        }
        if self.width.is_nan() || self.width <= 0.0 {
            out.push("width > 0");
        }
        if self.height.is_nan() || self.height <= 0.0 {
            out.push("height > 0");
        }
        out
    }
}

impl Default for PresentationProps {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// A concrete version number, or whatever the latest version is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VersionRef {
    Pinned(u32),
    Any,
}

impl fmt::Display for VersionRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VersionRef::Pinned(v) => write!(f, "{v}"),
            VersionRef::Any => f.write_str("any"),
        }
    }
}

impl std::str::FromStr for VersionRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("any") {
            return Ok(VersionRef::Any);
        }
        match s.parse::<u32>() {
            Ok(v) if v >= 1 => Ok(VersionRef::Pinned(v)),
            _ => Err(format!(
                "expected a version number >= 1 or `any`, got {s:?}"
            )),
        }
    }
}

impl Serialize for VersionRef {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            VersionRef::Pinned(v) => serializer.serialize_u32(*v),
            VersionRef::Any => serializer.serialize_str("any"),
        }
    }
}

impl<'de> Deserialize<'de> for VersionRef {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Num(v) => Ok(VersionRef::Pinned(v)),
            Raw::Text(t) if t == "any" => Ok(VersionRef::Any),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "invalid version reference {t:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Target {
    pub artefact: ArtefactId,
    pub version: VersionRef,
    pub selector: Selector,
    pub presentation: PresentationProps,
}

impl Target {
    pub fn new(artefact: impl Into<ArtefactId>, version: VersionRef, selector: Selector) -> Target {
        Target {
            artefact: artefact.into(),
            version,
            selector,
            presentation: PresentationProps::DEFAULT,
        }
    }

    pub fn with_presentation(mut self, presentation: PresentationProps) -> Target {
        self.presentation = presentation;
        self
    }

    /// Two targets are duplicates when artefact, version and selector agree;
    /// presentation does not participate.
    pub fn same_anchor(&self, other: &Target) -> bool {
        self.artefact == other.artefact
            && self.version == other.version
            && self.selector == other.selector
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn version_ref_serializes_as_number_or_any() {
        assert_eq!(serde_json::to_string(&VersionRef::Pinned(3)).unwrap(), "3");
        assert_eq!(serde_json::to_string(&VersionRef::Any).unwrap(), "\"any\"");
        let v: VersionRef = serde_json::from_str("\"any\"").unwrap();
        assert_eq!(v, VersionRef::Any);
        assert!(serde_json::from_str::<VersionRef>("\"latest\"").is_err());
        assert_eq!("2".parse::<VersionRef>().unwrap(), VersionRef::Pinned(2));
        assert!("0".parse::<VersionRef>().is_err());
    }

    #[test]
    fn region_dimensions_must_be_positive() {
        let r = Selector::Region {
            x: 0.0,
            y: 0.0,
            w: -3.0,
            h: 4.0,
        };
        assert_eq!(r.violations(), vec![("", "w > 0")]);
        let r = Selector::Region {
            x: 0.0,
            y: 0.0,
            w: 1.0,
            h: 0.0,
        };
        assert_eq!(r.violations(), vec![("", "h > 0")]);
    }

    #[test]
    fn presentation_positivity() {
        assert!(PresentationProps::DEFAULT.violations().is_empty());
        assert_eq!(
            PresentationProps::new(0.0, 0.0, 0.0, 1.0).violations(),
            vec!["width > 0"]
        );
    }

    #[test]
    fn selector_display_uses_expression_syntax() {
        assert_eq!(
            Selector::element_id(["MODE_SELECTION", "WXON"]).to_string(),
            "id:MODE_SELECTION/WXON"
        );
        assert_eq!(
            Selector::Region {
                x: 10.0,
                y: 20.0,
                w: 160.0,
                h: 40.5
            }
            .to_string(),
            "region:10,20,160,40.5"
        );
    }

    #[test]
    fn anchor_identity_ignores_presentation() {
        let a = Target::new("proto", VersionRef::Pinned(1), Selector::WholeArtefact);
        let b = a
            .clone()
            .with_presentation(PresentationProps::new(5.0, 5.0, 10.0, 10.0));
        assert!(a.same_anchor(&b));
        assert_ne!(a, b);
    }
}
