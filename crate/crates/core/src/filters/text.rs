//! String normalization shared by the filters.

/// Function words ignored when comparing SRL argument spans.
pub const STOPWORDS: &[&str] = &[
    "a", "able", "all", "also", "an", "and", "any", "are", "as", "at", "be", "been", "being",
    "but", "by", "can", "could", "each", "every", "for", "from", "in", "into", "is", "it", "its",
    "may", "might", "more", "most", "must", "no", "not", "of", "on", "only", "or", "shall",
    "should", "so", "such", "than", "that", "the", "their", "them", "there", "these", "they",
    "this", "those", "to", "up", "was", "were", "what", "when", "where", "which", "who", "whom",
    "will", "with", "would",
];

pub fn is_stopword(word: &str) -> bool {
    STOPWORDS.binary_search(&word).is_ok()
}

/// Case-folds, replaces punctuation with spaces and collapses whitespace.
/// Hyphens and apostrophes between letters are kept.
pub fn normalize(s: &str) -> String {
    let chars: Vec<char> = s.chars().collect();
    let mut out = String::with_capacity(s.len());
    for (i, &c) in chars.iter().enumerate() {
        let keep = c.is_alphanumeric()
            || ((c == '-' || c == '\'')
                && i > 0
                && i + 1 < chars.len()
                && chars[i - 1].is_alphanumeric()
                && chars[i + 1].is_alphanumeric());
        if keep {
            out.extend(c.to_lowercase());
        } else if !out.ends_with(' ') {
            out.push(' ');
        }
    }
    out.trim().to_string()
}

/// Normalized words of `s`.
pub fn words(s: &str) -> Vec<String> {
    normalize(s).split(' ').filter(|w| !w.is_empty()).map(str::to_string).collect()
}

/// Suffix stripping for matching inflected forms: plural `-s`/`-es`/`-ies`,
/// then `-ing` or `-ed`, then a trailing `e` and a doubled final consonant
/// (other than `s`). Words of three characters or fewer are left alone.
pub fn light_stem(word: &str) -> String {
    let mut w = word.to_string();
    if w.chars().count() <= 3 || !w.chars().all(|c| c.is_alphabetic()) {
        return w;
    }
    if w.ends_with("ies") && w.len() > 4 {
        w.truncate(w.len() - 3);
        w.push('y');
    } else if w.ends_with("es")
        && ["ses", "xes", "zes", "ches", "shes"].iter().any(|s| w.ends_with(s))
        && w.len() > 4
    {
        w.truncate(w.len() - 2);
    } else if w.ends_with('s') && !["ss", "us", "is"].iter().any(|s| w.ends_with(s)) {
        w.truncate(w.len() - 1);
    }
    if w.ends_with("ing") && w.len() >= 6 {
        w.truncate(w.len() - 3);
    } else if w.ends_with("ed") && w.len() >= 5 {
        w.truncate(w.len() - 2);
    }
    if w.ends_with('e') && w.len() > 3 {
        w.pop();
    }
    let b = w.as_bytes();
    if b.len() > 3 && b[b.len() - 1] == b[b.len() - 2] && !b"aeiouys".contains(&b[b.len() - 1]) {
        w.pop();
    }
    w
}

/// Normalizes a phrase and stems each word, unless `strict`.
pub fn match_key(s: &str, strict: bool) -> String {
    let n = normalize(s);
    if strict {
        return n;
    }
    n.split(' ').map(light_stem).collect::<Vec<_>>().join(" ")
}
