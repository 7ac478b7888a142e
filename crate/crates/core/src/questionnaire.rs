//! Engagement questionnaire scoring: eleven five-point Likert items
//! reduced to cognitive (items 1-3), behavioral (4-6) and affective (7-11)
//! means.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::canonical::parse_json;
use crate::error::{Error, Result};

pub const ITEM_COUNT: usize = 11;
const COGNITIVE: std::ops::Range<usize> = 0..3;
const BEHAVIORAL: std::ops::Range<usize> = 3..6;
const AFFECTIVE: std::ops::Range<usize> = 6..11;

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Demographics {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub age: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gender: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub education: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuestionnaireRecord {
    pub participant_id: String,
    #[serde(default)]
    pub demographics: Demographics,
    pub answers: Vec<u8>,
}

impl QuestionnaireRecord {
    pub fn validate(&self) -> Result<()> {
        if self.answers.len() != ITEM_COUNT {
            return Err(Error::validation(
                "answers",
                format!("expected {ITEM_COUNT} answers, got {}", self.answers.len()),
            ));
        }
        if let Some(i) = self.answers.iter().position(|a| !(1..=5).contains(a)) {
            return Err(Error::validation(
                format!("answers[{i}]"),
                format!("answer {} is outside the 1-5 scale", self.answers[i]),
            ));
        }
        Ok(())
    }
}

/// A group mean kept as an exact fraction so rounding is exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GroupMean {
    pub sum: u32,
    pub count: u32,
}

impl GroupMean {
    fn of(answers: &[u8], range: std::ops::Range<usize>) -> GroupMean {
        GroupMean {
            sum: answers[range.clone()].iter().map(|&a| a as u32).sum(),
            count: range.len() as u32,
        }
    }

    pub fn value(self) -> f64 {
        self.sum as f64 / self.count as f64
    }

    /// Hundredths, rounded half-up, computed in integers.
    pub fn rounded_hundredths(self) -> u32 {
        (200 * self.sum + self.count) / (2 * self.count)
    }

    pub fn rounded(self) -> f64 {
        self.rounded_hundredths() as f64 / 100.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngagementScores {
    pub cognitive: GroupMean,
    pub behavioral: GroupMean,
    pub affective: GroupMean,
}

impl EngagementScores {
    pub fn unrounded(&self) -> [f64; 3] {
        [
            self.cognitive.value(),
            self.behavioral.value(),
            self.affective.value(),
        ]
    }

    pub fn rounded(&self) -> [f64; 3] {
        [
            self.cognitive.rounded(),
            self.behavioral.rounded(),
            self.affective.rounded(),
        ]
    }

    /// Display strings with two decimals, e.g. `"2.33"`.
    pub fn display(&self) -> [String; 3] {
        [self.cognitive, self.behavioral, self.affective]
            .map(|g| format_hundredths(g.rounded_hundredths()))
    }
}

pub fn format_hundredths(h: u32) -> String {
    format!("{}.{:02}", h / 100, h % 100)
}

pub fn score(record: &QuestionnaireRecord) -> Result<EngagementScores> {
    record.validate()?;
    let a = &record.answers;
    Ok(EngagementScores {
        cognitive: GroupMean::of(a, COGNITIVE),
        behavioral: GroupMean::of(a, BEHAVIORAL),
        affective: GroupMean::of(a, AFFECTIVE),
    })
}

/// Per-participant scores as written to the scores file (rounded) plus the
/// unrounded means used for cohort aggregation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub participant_id: String,
    pub cognitive: f64,
    pub behavioral: f64,
    pub affective: f64,
    pub unrounded: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortMeans {
    pub cognitive: f64,
    pub behavioral: f64,
    pub affective: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohortSummary {
    pub participants: Vec<ScoreRow>,
    /// Means over unrounded per-participant scores.
    pub cohort: CohortMeans,
}

pub fn cohort_summary(records: &[QuestionnaireRecord]) -> Result<CohortSummary> {
    if records.is_empty() {
        return Err(Error::NoData("no questionnaire responses".into()));
    }
    let mut seen = HashSet::new();
    let mut rows = Vec::with_capacity(records.len());
    for (i, r) in records.iter().enumerate() {
        if !seen.insert(r.participant_id.as_str()) {
            return Err(Error::validation(
                format!("responses[{i}].participant_id"),
                format!("duplicate participant {:?}", r.participant_id),
            ));
        }
        let s = score(r).map_err(|e| match e {
            Error::Validation { field, message } => {
                Error::validation(format!("responses[{i}].{field}"), message)
            }
            other => other,
        })?;
        let [c, b, a] = s.rounded();
        rows.push(ScoreRow {
            participant_id: r.participant_id.clone(),
            cognitive: c,
            behavioral: b,
            affective: a,
            unrounded: s.unrounded(),
        });
    }
    rows.sort_by(|a, b| a.participant_id.cmp(&b.participant_id));
    let n = rows.len() as f64;
    let m = |k: usize| rows.iter().map(|r| r.unrounded[k]).sum::<f64>() / n;
    let cohort = CohortMeans {
        cognitive: m(0),
        behavioral: m(1),
        affective: m(2),
    };
    Ok(CohortSummary {
        participants: rows,
        cohort,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResponsesFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    pub responses: Vec<QuestionnaireRecord>,
}

pub fn parse_responses(bytes: &[u8]) -> Result<Vec<QuestionnaireRecord>> {
    let f: ResponsesFile = parse_json(bytes)?;
    Ok(f.responses)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, answers: &[u8]) -> QuestionnaireRecord {
        QuestionnaireRecord {
            participant_id: id.into(),
            demographics: Demographics::default(),
            answers: answers.to_vec(),
        }
    }

    #[test]
    fn uniform_answers() {
        assert_eq!(
            score(&rec("1", &[4; 11])).unwrap().display(),
            ["4.00", "4.00", "4.00"].map(String::from)
        );
        assert_eq!(
            score(&rec("2", &[5; 11])).unwrap().display(),
            ["5.00", "5.00", "5.00"].map(String::from)
        );
    }

    #[test]
    fn thirds_and_fifths() {
        let s = score(&rec("3", &[2, 2, 3, 2, 2, 3, 4, 4, 4, 4, 3])).unwrap();
        assert_eq!(s.display(), ["2.33", "2.33", "3.80"].map(String::from));
        assert_eq!(s.rounded(), [2.33, 2.33, 3.8]);
        assert_eq!(GroupMean { sum: 14, count: 3 }.rounded_hundredths(), 467);
        // Exact halves round up.
        assert_eq!(GroupMean { sum: 1, count: 8 }.rounded_hundredths(), 13);
    }

    #[test]
    fn validation_names_index() {
        let mut a = [3u8; 11];
        a[6] = 6;
        assert!(
            matches!(score(&rec("x", &a)), Err(Error::Validation { field, .. }) if field == "answers[6]")
        );
        assert!(
            matches!(score(&rec("x", &[3; 10])), Err(Error::Validation { field, .. }) if field == "answers")
        );
        a[6] = 0;
        assert!(score(&rec("x", &a)).is_err());
    }

    #[test]
    fn cohort_rules() {
        assert!(matches!(cohort_summary(&[]), Err(Error::NoData(_))));
        let one = cohort_summary(&[rec("a", &[3; 11])]).unwrap();
        assert_eq!(one.participants.len(), 1);
        assert_eq!(one.cohort.cognitive, 3.0);
        let dup = cohort_summary(&[rec("a", &[3; 11]), rec("a", &[4; 11])]);
        assert!(
            matches!(dup, Err(Error::Validation { field, .. }) if field == "responses[1].participant_id")
        );
        let sorted = cohort_summary(&[rec("b", &[3; 11]), rec("a", &[4; 11])]).unwrap();
        assert_eq!(sorted.participants[0].participant_id, "a");
    }
}
