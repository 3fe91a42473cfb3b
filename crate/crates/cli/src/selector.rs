//! Selector and placement expressions accepted on the command line.

use std::fmt;

use annoglue_core::model::{PresentationProps, Selector};

/// `position` is the byte offset in the expression where parsing failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BadSelectorSyntax {
    pub position: usize,
    pub reason: String,
}

impl fmt::Display for BadSelectorSyntax {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BadSelectorSyntax at {}: {}", self.position, self.reason)
    }
}

impl std::error::Error for BadSelectorSyntax {}

fn bad(position: usize, reason: impl Into<String>) -> BadSelectorSyntax {
    BadSelectorSyntax {
        position,
        reason: reason.into(),
    }
}

/// Parses `n` comma-separated finite numbers starting at byte `offset` of
/// the original expression.
fn numbers<const N: usize>(text: &str, offset: usize) -> Result<[f64; N], BadSelectorSyntax> {
    let mut out = [0.0; N];
    let mut pos = offset;
    let mut parts = text.split(',');
    for (i, slot) in out.iter_mut().enumerate() {
        let Some(part) = parts.next() else {
            return Err(bad(
                offset + text.len(),
                format!("expected {N} numbers, found {i}"),
            ));
        };
        *slot = part
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(pos, format!("{part:?} is not a finite number")))?;
        pos += part.len() + 1;
    }
    if parts.next().is_some() {
        return Err(bad(pos - 1, format!("expected {N} numbers, found more")));
    }
    Ok(out)
}

/// `whole` | `id:a/b/c` | `region:x,y,w,h` | `frag:<scheme>:<expression>`
pub fn parse_selector_expr(expr: &str) -> Result<Selector, BadSelectorSyntax> {
    if expr.is_empty() {
        return Err(bad(0, "empty selector"));
    }
    if expr == "whole" {
        return Ok(Selector::WholeArtefact);
    }
    let Some((head, rest)) = expr.split_once(':') else {
        return Err(bad(0, "expected whole, id:, region: or frag:"));
    };
    let start = head.len() + 1;
    match head {
        "id" => {
            let mut pos = start;
            let mut path = Vec::new();
            for part in rest.split('/') {
                if part.is_empty() {
                    return Err(bad(pos, "empty element identifier"));
                }
                path.push(part.to_string());
                pos += part.len() + 1;
            }
            Ok(Selector::ElementId { path })
        }
        "region" => {
            let [x, y, w, h] = numbers::<4>(rest, start)?;
            if w <= 0.0 {
                return Err(bad(start, "w must be > 0"));
            }
            if h <= 0.0 {
                return Err(bad(start, "h must be > 0"));
            }
            Ok(Selector::Region { x, y, w, h })
        }
        "frag" => {
            let Some((scheme, expression)) = rest.split_once(':') else {
                return Err(bad(
                    start + rest.len(),
                    "expected frag:<scheme>:<expression>",
                ));
            };
            if scheme.is_empty() {
                return Err(bad(start, "empty fragment scheme"));
            }
            if expression.is_empty() {
                return Err(bad(start + scheme.len() + 1, "empty fragment expression"));
            }
            Ok(Selector::Fragment {
                scheme: scheme.to_string(),
                expression: expression.to_string(),
            })
        }
        _ => Err(bad(0, format!("unknown selector kind {head:?}"))),
    }
}

/// `x,y,w,h` for `--at`.
pub fn parse_placement(text: &str) -> Result<PresentationProps, BadSelectorSyntax> {
    let [x, y, w, h] = numbers::<4>(text, 0)?;
    let props = PresentationProps::new(x, y, w, h);
    if let Some(rule) = props.violations().first() {
        return Err(bad(0, *rule));
    }
    Ok(props)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn grammar() {
        assert_eq!(
            parse_selector_expr("whole").unwrap(),
            Selector::WholeArtefact
        );
        assert_eq!(
            parse_selector_expr("region:10,20,160,40").unwrap(),
            Selector::Region {
                x: 10.0,
                y: 20.0,
                w: 160.0,
                h: 40.0
            }
        );
        assert_eq!(
            parse_selector_expr("id:MODE_SELECTION/WXON").unwrap(),
            Selector::ElementId {
                path: vec!["MODE_SELECTION".into(), "WXON".into()]
            }
        );
        assert_eq!(
            parse_selector_expr("frag:xpointer:/a/b[2]").unwrap(),
            Selector::Fragment {
                scheme: "xpointer".into(),
                expression: "/a/b[2]".into()
            }
        );
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(
            parse_selector_expr("region:10,20,0,40")
                .unwrap_err()
                .position,
            7
        );
        assert_eq!(
            parse_selector_expr("region:10,x,5,5").unwrap_err().position,
            10
        );
        assert_eq!(
            parse_selector_expr("region:1,2,3").unwrap_err().position,
            12
        );
        assert_eq!(parse_selector_expr("id:a//b").unwrap_err().position, 5);
        assert_eq!(parse_selector_expr("id:").unwrap_err().position, 3);
        assert_eq!(parse_selector_expr("frag:xp").unwrap_err().position, 7);
        assert_eq!(parse_selector_expr("box:1").unwrap_err().position, 0);
        assert_eq!(parse_selector_expr("").unwrap_err().position, 0);
        assert!(parse_selector_expr("region:1,2,3,4,5").is_err());
        assert!(parse_selector_expr("region:1,2,inf,4").is_err());
    }

    #[test]
    fn placement() {
        assert_eq!(
            parse_placement("1,2,3,4").unwrap(),
            PresentationProps::new(1.0, 2.0, 3.0, 4.0)
        );
        assert!(parse_placement("1,2,0,4").is_err());
        assert!(parse_placement("1,2,3").is_err());
    }

    proptest! {
        // Displaying a parsed selector and parsing it again is the identity.
        #[test]
        fn display_round_trip(
            path in proptest::collection::vec("[A-Za-z0-9_]{1,8}", 1..4),
            x in -1e6f64..1e6, y in -1e6f64..1e6, w in 0.001f64..1e6, h in 0.001f64..1e6,
            scheme in "[a-z]{1,6}", expression in "[ -~]{1,12}",
        ) {
            for sel in [
                Selector::WholeArtefact,
                Selector::ElementId { path: path.clone() },
                Selector::Region { x, y, w, h },
                Selector::Fragment { scheme: scheme.clone(), expression: expression.clone() },
            ] {
                prop_assert_eq!(parse_selector_expr(&sel.to_string()).unwrap(), sel);
            }
        }

        #[test]
        fn never_panics(expr in "\\PC{0,24}") {
            let _ = parse_selector_expr(&expr);
        }
    }
}
