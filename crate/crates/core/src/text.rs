//! Key normalization shared by lookup, matching and gazetteer search.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases and strips diacritics (`Montaña` -> `montana`).
pub fn normalize(token: &str) -> String {
    token
        .nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Returns true when the first character is uppercase.
pub fn is_capitalized(token: &str) -> bool {
    token.chars().next().is_some_and(char::is_uppercase)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn folds_case_and_accents() {
        assert_eq!(normalize("Montaña"), "montana");
        assert_eq!(normalize("ELEVACIÓN"), "elevacion");
        assert_eq!(normalize("cartón"), "carton");
        assert_eq!(normalize(""), "");
    }

    #[test]
    fn capitalization() {
        assert!(is_capitalized("Galicia"));
        assert!(!is_capitalized("galicia"));
        assert!(!is_capitalized("2569"));
    }
}
