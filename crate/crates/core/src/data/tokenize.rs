/// Lowercases and splits on every maximal run of non-alphanumeric
/// characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(
            tokenize("A news report is due next Wednesday"),
            ["a", "news", "report", "is", "due", "next", "wednesday"]
        );
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("COVID-19 U.S."), ["covid", "19", "u", "s"]);
        assert_eq!(tokenize("  --  "), Vec::<String>::new());
        assert_eq!(tokenize("Café's ÉCLAIR"), ["café", "s", "éclair"]);
    }
}
