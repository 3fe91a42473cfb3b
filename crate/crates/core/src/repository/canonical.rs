//! Canonical JSON: UTF-8, object keys sorted lexicographically, arrays in
//! insertion order, LF line endings, no trailing whitespace.
//!
//! Values are routed through [`serde_json::Value`], whose object map is a
//! `BTreeMap`, so key order never depends on struct field order.

use serde::Serialize;

/// Compact single-line form.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    serde_json::to_string(&value)
}

/// Two-space indented form terminated by a single LF. Used for repository
/// files so they diff cleanly under version control.
pub fn to_canonical_file<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let value = serde_json::to_value(value)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

/// Byte offset of a parse error inside `text`, from serde_json's 1-based
/// line and column.
pub fn error_offset(text: &str, err: &serde_json::Error) -> usize {
    let line = err.line().max(1);
    let before: usize = text
        .split_inclusive('\n')
        .take(line - 1)
        .map(str::len)
        .sum();
    (before + err.column().saturating_sub(1)).min(text.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Serialize;

    #[derive(Serialize)]
    struct Unordered {
        zeta: u32,
        alpha: Vec<&'static str>,
        mid: f64,
    }

    #[test]
    fn keys_sorted_arrays_kept() {
        let v = Unordered {
            zeta: 1,
            alpha: vec!["b", "a"],
            mid: 10.0,
        };
        assert_eq!(
            to_canonical_string(&v).unwrap(),
            r#"{"alpha":["b","a"],"mid":10.0,"zeta":1}"#
        );
    }

    #[test]
    fn file_form_has_no_trailing_whitespace() {
        let v = Unordered {
            zeta: 1,
            alpha: vec![],
            mid: 0.5,
        };
        let text = to_canonical_file(&v).unwrap();
        assert!(text.ends_with("}\n"));
        assert!(!text.contains('\r'));
        assert!(text.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn floats_round_trip_exactly() {
        for x in [0.1, 1e-300, 123456.789, -0.0, 1e21, f64::MAX] {
            let text = to_canonical_string(&x).unwrap();
            let back: f64 = serde_json::from_str(&text).unwrap();
            assert_eq!(back.to_bits(), x.to_bits(), "{text}");
            assert_eq!(to_canonical_string(&back).unwrap(), text);
        }
    }

    #[test]
    fn offsets_point_into_text() {
        let text = "{\n  \"a\": 1,\n  \"b\": \n";
        let err = serde_json::from_str::<serde_json::Value>(text).unwrap_err();
        let off = error_offset(text, &err);
        assert!(off <= text.len());
        assert!(off >= text.find("\"b\"").unwrap());
    }
}
