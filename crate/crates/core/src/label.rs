use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Cohort class of a subject-day.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassLabel {
    Control,
    PreTx,
    PostTx,
    Unlabeled,
}

impl ClassLabel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ClassLabel::Control => "Control",
            ClassLabel::PreTx => "PreTx",
            ClassLabel::PostTx => "PostTx",
            ClassLabel::Unlabeled => "Unlabeled",
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.as_str())
    }
}

impl FromStr for ClassLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "control" | "con" => Ok(ClassLabel::Control),
            "pretx" | "pre" => Ok(ClassLabel::PreTx),
            "posttx" | "post" => Ok(ClassLabel::PostTx),
            "unlabeled" | "" => Ok(ClassLabel::Unlabeled),
            other => Err(Error::Parse(format!("unknown class label `{other}`"))),
        }
    }
}

/// Identity of one subject-day: the unit that gets symbolized and clustered.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SubjectDay {
    pub subject: String,
    pub day: u32,
    pub label: ClassLabel,
}

impl SubjectDay {
    pub fn new(subject: impl Into<String>, day: u32, label: ClassLabel) -> Self {
        SubjectDay {
            subject: subject.into(),
            day,
            label,
        }
    }
}

/// Rendered as `subject:day:label`, the id form used in matrix headers.
impl fmt::Display for SubjectDay {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.subject, self.day, self.label)
    }
}

impl FromStr for SubjectDay {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.trim().rsplitn(3, ':');
        let label = parts.next();
        let day = parts.next();
        let subject = parts.next();
        match (subject, day, label) {
            (Some(subject), Some(day), Some(label)) if !subject.is_empty() => {
                let day = day
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad day index in id `{s}`")))?;
                Ok(SubjectDay::new(subject, day, label.parse()?))
            }
            _ => Err(Error::Parse(format!(
                "id `{s}` is not of the form subject:day:label"
            ))),
        }
    }
}
