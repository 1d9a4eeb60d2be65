use std::fs;
use std::path::Path;

use super::news::lines;
use crate::error::{Error, Result};

/// One row of `behaviors.tsv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImpressionRecord {
    pub impression_id: String,
    pub user_id: String,
    /// Opaque; never parsed.
    pub time: String,
    /// Clicked news ids before this impression, oldest first.
    pub history: Vec<String>,
    /// Shown news ids with click labels.
    pub impressions: Vec<(String, bool)>,
}

pub const BEHAVIOR_COLUMNS: usize = 5;

impl ImpressionRecord {
    pub fn to_tsv_line(&self) -> String {
        let impressions: Vec<String> = self
            .impressions
            .iter()
            .map(|(id, clicked)| format!("{id}-{}", u8::from(*clicked)))
            .collect();
        [
            self.impression_id.clone(),
            self.user_id.clone(),
            self.time.clone(),
            self.history.join(" "),
            impressions.join(" "),
        ]
        .join("\t")
    }

    pub fn clicked(&self) -> impl Iterator<Item = &str> {
        self.impressions
            .iter()
            .filter(|(_, c)| *c)
            .map(|(id, _)| id.as_str())
    }
}

/// Splits `N123-1` into `("N123", true)`.
pub fn parse_impression_token(token: &str) -> Option<(String, bool)> {
    let (id, label) = token.rsplit_once('-')?;
    if id.is_empty() {
        return None;
    }
    match label {
        "1" => Some((id.to_string(), true)),
        "0" => Some((id.to_string(), false)),
        _ => None,
    }
}

pub fn parse_behaviors_str(text: &str, path: &Path) -> Result<Vec<ImpressionRecord>> {
    let mut out = Vec::new();
    for (line_no, line) in lines(text) {
        let err = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: line_no,
            message,
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != BEHAVIOR_COLUMNS {
            return Err(err(format!(
                "expected {BEHAVIOR_COLUMNS} columns, found {}",
                cols.len()
            )));
        }
        let history = cols[3].split_whitespace().map(str::to_string).collect();
        let impressions = cols[4]
            .split_whitespace()
            .map(|tok| {
                parse_impression_token(tok).ok_or_else(|| {
                    err(format!("impression token {tok:?} lacks a -0/-1 click suffix"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(ImpressionRecord {
            impression_id: cols[0].into(),
            user_id: cols[1].into(),
            time: cols[2].into(),
            history,
            impressions,
        });
    }
    Ok(out)
}

pub fn parse_behaviors_tsv(path: impl AsRef<Path>) -> Result<Vec<ImpressionRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_behaviors_str(&text, path)
}
