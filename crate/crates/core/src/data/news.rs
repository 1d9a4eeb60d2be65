use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One row of `news.tsv`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NewsRecord {
    pub news_id: String,
    pub category: String,
    pub subcategory: String,
    pub title: String,
    pub r#abstract: String,
    pub url: String,
    /// Raw JSON text, kept verbatim.
    pub title_entities: String,
    pub abstract_entities: String,
}

pub const NEWS_COLUMNS: usize = 8;

impl NewsRecord {
    pub fn to_tsv_line(&self) -> String {
        [
            self.news_id.as_str(),
            &self.category,
            &self.subcategory,
            &self.title,
            &self.r#abstract,
            &self.url,
            &self.title_entities,
            &self.abstract_entities,
        ]
        .join("\t")
    }
}

pub(crate) fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.split('\n')
        .enumerate()
        .map(|(i, l)| (i + 1, l.strip_suffix('\r').unwrap_or(l)))
        .filter(|(_, l)| !l.is_empty())
}

/// Parses `news.tsv` content. `path` is only used in error messages.
pub fn parse_news_str(text: &str, path: &Path) -> Result<Vec<NewsRecord>> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::new();
    for (line_no, line) in lines(text) {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != NEWS_COLUMNS {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: format!("expected {NEWS_COLUMNS} columns, found {}", cols.len()),
            });
        }
        if cols[0].is_empty() {
            return Err(Error::Parse {
                path: path.to_path_buf(),
                line: line_no,
                message: "empty news id".into(),
            });
        }
        if seen.insert(cols[0].to_string(), line_no).is_some() {
            return Err(Error::DuplicateId {
                path: path.to_path_buf(),
                line: line_no,
                id: cols[0].to_string(),
            });
        }
        out.push(NewsRecord {
            news_id: cols[0].into(),
            category: cols[1].into(),
            subcategory: cols[2].into(),
            title: cols[3].into(),
            r#abstract: cols[4].into(),
            url: cols[5].into(),
            title_entities: cols[6].into(),
            abstract_entities: cols[7].into(),
        });
    }
    Ok(out)
}

pub fn parse_news_tsv(path: impl AsRef<Path>) -> Result<Vec<NewsRecord>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_news_str(&text, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Vec<NewsRecord>> {
        parse_news_str(text, Path::new("news.tsv"))
    }

    #[test]
    fn maps_fields() {
        let recs = parse("N1\tsports\tsoccer\tTeam wins\t\thttps://x\t[]\t[]\n").unwrap();
        assert_eq!(recs.len(), 1);
        let r = &recs[0];
        assert_eq!(r.news_id, "N1");
        assert_eq!(r.category, "sports");
        assert_eq!(r.subcategory, "soccer");
        assert_eq!(r.title, "Team wins");
        assert_eq!(r.r#abstract, "");
        assert_eq!(r.url, "https://x");
    }

    #[test]
    fn empty_file() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn wrong_column_count_cites_line() {
        let err = parse("N1\tsports\tsoccer\tTeam wins\t\thttps://x\t[]\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn duplicate_ids() {
        let text = "N1\ta\tb\tt\t\tu\t[]\t[]\nN1\ta\tb\tt\t\tu\t[]\t[]\n";
        let err = parse(text).unwrap_err();
        assert!(matches!(err, Error::DuplicateId { line: 2, ref id, .. } if id == "N1"));
    }

    #[test]
    fn crlf_line_endings() {
        let recs = parse("N1\ta\tb\tt\t\tu\t[]\t[]\r\n").unwrap();
        assert_eq!(recs[0].abstract_entities, "[]");
    }
}
