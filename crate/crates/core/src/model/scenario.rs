//! Line grammar for scenario bodies.
//!
//! Every non-blank line is `<Keyword> <text>` where the keyword is one of
//! `Given`, `When`, `Then`, `And` (case-sensitive) followed by exactly one
//! space. The first step must start with `Given` or `When`. Lines are trimmed
//! before matching, so indentation and trailing whitespace are not
//! significant.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::metadata::keyword_enum;
use super::ModelError;

keyword_enum! {
    StepKeyword {
        Given => "Given",
        When => "When",
        Then => "Then",
        And => "And",
    }
}

impl StepKeyword {
    pub fn may_open(&self) -> bool {
        matches!(self, StepKeyword::Given | StepKeyword::When)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScenarioStep {
    pub keyword: StepKeyword,
    pub text: String,
}

impl fmt::Display for ScenarioStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.keyword, self.text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario has no steps")]
    EmptyScenario,
    #[error("line {0}: expected one of Given, When, Then, And followed by a single space")]
    BadKeyword(usize),
    #[error("first step must start with Given or When")]
    BadFirstStep,
    #[error("line {0}: step text is empty")]
    EmptyStepText(usize),
}

impl From<ScenarioError> for ModelError {
    fn from(err: ScenarioError) -> Self {
        ModelError::InvalidBody(err.to_string())
    }
}

/// Parses scenario text into steps. Line numbers in errors are 1-based and
/// count blank lines.
pub fn parse_scenario(raw: &str) -> Result<Vec<ScenarioStep>, ScenarioError> {
    let mut steps = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (word, text) = match line.split_once(' ') {
            Some((word, text)) => (word, text),
            None => (line, ""),
        };
        let keyword: StepKeyword = word
            .parse()
            .map_err(|_| ScenarioError::BadKeyword(line_no))?;
        if text.is_empty() {
            return Err(ScenarioError::EmptyStepText(line_no));
        }
        if text.starts_with(char::is_whitespace) {
            return Err(ScenarioError::BadKeyword(line_no));
        }
        if steps.is_empty() && !keyword.may_open() {
            return Err(ScenarioError::BadFirstStep);
        }
        steps.push(ScenarioStep {
            keyword,
            text: text.to_string(),
        });
    }
    if steps.is_empty() {
        return Err(ScenarioError::EmptyScenario);
    }
    Ok(steps)
}

/// Inverse of [`parse_scenario`] on normalized input.
pub fn render_scenario(steps: &[ScenarioStep]) -> String {
    steps
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("\n")
}
