use std::collections::BTreeMap;

use super::NewsRecord;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoryCount {
    pub category: String,
    pub count: usize,
    pub subcategories: Vec<(String, usize)>,
}

impl CategoryCount {
    /// `category<TAB>count<TAB>sub:count,sub:count`
    pub fn to_tsv_row(&self) -> String {
        let subs: Vec<String> = self
            .subcategories
            .iter()
            .map(|(s, c)| format!("{s}:{c}"))
            .collect();
        format!("{}\t{}\t{}", self.category, self.count, subs.join(","))
    }
}

/// Category and subcategory histogram, sorted by count descending then name.
pub fn category_stats(news: &[NewsRecord]) -> Vec<CategoryCount> {
    let mut tree: BTreeMap<&str, BTreeMap<&str, usize>> = BTreeMap::new();
    for r in news {
        *tree
            .entry(&r.category)
            .or_default()
            .entry(&r.subcategory)
            .or_default() += 1;
    }
    let mut out: Vec<CategoryCount> = tree
        .into_iter()
        .map(|(category, subs)| {
            let mut subcategories: Vec<(String, usize)> =
                subs.into_iter().map(|(s, c)| (s.to_string(), c)).collect();
            subcategories.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            CategoryCount {
                category: category.to_string(),
                count: subcategories.iter().map(|(_, c)| c).sum(),
                subcategories,
            }
        })
        .collect();
    out.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.category.cmp(&b.category)));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, cat: &str, sub: &str) -> NewsRecord {
        NewsRecord {
            news_id: id.into(),
            category: cat.into(),
            subcategory: sub.into(),
            title: String::new(),
            r#abstract: String::new(),
            url: String::new(),
            title_entities: String::new(),
            abstract_entities: String::new(),
        }
    }

    #[test]
    fn empty() {
        assert!(category_stats(&[]).is_empty());
    }

    #[test]
    fn same_category_two_subcategories() {
        let s = category_stats(&[rec("1", "news", "a"), rec("2", "news", "b")]);
        assert_eq!(s.len(), 1);
        assert_eq!(s[0].count, 2);
        assert_eq!(s[0].subcategories, [("a".into(), 1), ("b".into(), 1)]);
        assert_eq!(s[0].to_tsv_row(), "news\t2\ta:1,b:1");
    }

    #[test]
    fn ordering() {
        let s = category_stats(&[
            rec("1", "sports", "x"),
            rec("2", "news", "y"),
            rec("3", "sports", "x"),
            rec("4", "autos", "z"),
        ]);
        let names: Vec<&str> = s.iter().map(|c| c.category.as_str()).collect();
        assert_eq!(names, ["sports", "autos", "news"]);
    }
}
