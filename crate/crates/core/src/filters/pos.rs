//! Rule-based part-of-speech tagger producing Penn Treebank tags.
//!
//! This is a fallback for when no tagged annotation file is supplied. It is
//! tuned for the "The <actor> shall <verb> <object> ..." register of
//! requirement sentences and makes no attempt at general-purpose accuracy.
//!
//! Tokens are lowercased runs of letters and digits; `-` and `'` are kept
//! between alphanumerics and `.` between digits. Any other non-space
//! character is a token on its own.
//!
//! Tags are assigned left to right, first matching rule wins:
//!
//! | rule | condition | tag |
//! |---|---|---|
//! | punctuation | `. ! ?` / `,` / `: ; -` / `( )` / `$ #` / quotes | `.` `,` `:` `(` `)` `$` `#` `''` |
//! | other symbol | any other non-alphanumeric token | `SYM` |
//! | number | starts with a digit, or a number word | `CD` |
//! | lexicon | closed-class words (see [`LEXICON`]) | listed tag |
//! | `-ly` | length > 6 | `RB` |
//! | after modal | previous non-adverb tag is `MD` | `VB` |
//! | after `to` | previous tag is `TO`, word not ending in `s` | `VB` |
//! | coordination | `VB` then `CC` then a word not ending in `s` | `VB` |
//! | `-ing` | length > 4; after `DT` it is `NN` | `VBG` |
//! | `-ed` | length > 4; after a form of be/have `VBN`, after `DT IN JJ PRP$` `JJ`, after `NN NNS PRP` `VBD`, else `VBN` | |
//! | adjective suffix | `-able -ible -ful -ous -ive -less -ical` | `JJ` |
//! | plural | ends in `s` but not `ss us is`, length > 3 | `NNS` |
//! | default | | `NN` |

use crate::error::{Error, Result};

/// Penn Treebank part-of-speech and punctuation tags accepted in annotation
/// files.
pub const TAGSET: &[&str] = &[
    "#", "$", "''", "(", ")", ",", "-LRB-", "-RRB-", ".", ":", "CC", "CD", "DT", "EX", "FW",
    "HYPH", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NFP", "NN", "NNP", "NNPS", "NNS", "PDT",
    "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB", "VBD", "VBG", "VBN",
    "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", "``",
];

pub fn is_known_tag(tag: &str) -> bool {
    TAGSET.contains(&tag)
}

pub fn is_noun_tag(tag: &str) -> bool {
    matches!(tag, "NN" | "NNS" | "NNP" | "NNPS")
}

pub fn is_verb_tag(tag: &str) -> bool {
    tag.starts_with("VB")
}

/// Closed-class vocabulary.
pub const LEXICON: &[(&str, &str)] = &[
    ("a", "DT"), ("able", "JJ"), ("about", "IN"), ("above", "IN"), ("after", "IN"),
    ("against", "IN"), ("all", "DT"), ("also", "RB"), ("always", "RB"), ("am", "VBP"),
    ("among", "IN"), ("an", "DT"), ("and", "CC"), ("another", "DT"), ("any", "DT"),
    ("are", "VBP"), ("as", "IN"), ("at", "IN"), ("be", "VB"), ("been", "VBN"),
    ("before", "IN"), ("being", "VBG"), ("below", "IN"), ("between", "IN"), ("both", "DT"),
    ("but", "CC"), ("by", "IN"), ("can", "MD"), ("could", "MD"), ("did", "VBD"),
    ("do", "VBP"), ("does", "VBZ"), ("during", "IN"), ("each", "DT"), ("either", "DT"),
    ("every", "DT"), ("few", "JJ"), ("for", "IN"), ("from", "IN"), ("had", "VBD"),
    ("has", "VBZ"), ("have", "VBP"), ("he", "PRP"), ("her", "PRP$"), ("his", "PRP$"),
    ("how", "WRB"), ("i", "PRP"), ("if", "IN"), ("in", "IN"), ("into", "IN"), ("is", "VBZ"),
    ("it", "PRP"), ("its", "PRP$"), ("least", "JJS"), ("less", "JJR"), ("many", "JJ"),
    ("may", "MD"), ("might", "MD"), ("more", "JJR"), ("most", "JJS"), ("must", "MD"),
    ("my", "PRP$"), ("neither", "DT"), ("never", "RB"), ("no", "DT"), ("nor", "CC"),
    ("not", "RB"), ("of", "IN"), ("off", "IN"), ("on", "IN"), ("once", "RB"), ("only", "RB"),
    ("onto", "IN"), ("or", "CC"), ("our", "PRP$"), ("out", "IN"), ("over", "IN"),
    ("per", "IN"), ("shall", "MD"), ("she", "PRP"), ("should", "MD"), ("since", "IN"),
    ("some", "DT"), ("than", "IN"), ("that", "WDT"), ("the", "DT"), ("their", "PRP$"),
    ("them", "PRP"), ("then", "RB"), ("there", "EX"), ("these", "DT"), ("they", "PRP"),
    ("this", "DT"), ("those", "DT"), ("through", "IN"), ("to", "TO"), ("under", "IN"),
    ("until", "IN"), ("up", "RP"), ("upon", "IN"), ("us", "PRP"), ("via", "IN"),
    ("was", "VBD"), ("we", "PRP"), ("were", "VBD"), ("what", "WP"), ("when", "WRB"),
    ("where", "WRB"), ("whether", "IN"), ("which", "WDT"), ("while", "IN"), ("who", "WP"),
    ("whom", "WP"), ("whose", "WP$"), ("will", "MD"), ("with", "IN"), ("within", "IN"),
    ("without", "IN"), ("would", "MD"), ("you", "PRP"), ("your", "PRP$"),
];

const NUMBER_WORDS: &[&str] = &[
    "eight", "eighteen", "eighty", "eleven", "fifteen", "fifty", "five", "forty", "four",
    "fourteen", "hundred", "million", "nine", "nineteen", "ninety", "one", "seven",
    "seventeen", "seventy", "six", "sixteen", "sixty", "ten", "thirteen", "thirty", "thousand",
    "three", "twelve", "twenty", "two", "zero",
];

const BE_HAVE: &[&str] = &[
    "am", "are", "be", "been", "being", "had", "has", "have", "is", "was", "were",
];

/// Copula and auxiliary forms. They carry verb tags but are not content
/// verbs.
pub fn is_auxiliary(word: &str) -> bool {
    BE_HAVE.contains(&word) || matches!(word, "do" | "does" | "did")
}

fn lexicon(word: &str) -> Option<&'static str> {
    LEXICON
        .binary_search_by(|(w, _)| w.cmp(&word))
        .ok()
        .map(|i| LEXICON[i].1)
}

/// Splits text into lowercased word and punctuation tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let prev = i.checked_sub(1).map(|j| chars[j]);
        let next = chars.get(i + 1).copied();
        let joins = match c {
            '-' | '\'' => {
                prev.is_some_and(char::is_alphanumeric) && next.is_some_and(char::is_alphanumeric)
            }
            '.' | ',' => {
                prev.is_some_and(|p| p.is_ascii_digit()) && next.is_some_and(|n| n.is_ascii_digit())
            }
            _ => false,
        };
        if c.is_alphanumeric() || (joins && !cur.is_empty()) {
            cur.extend(c.to_lowercase());
            continue;
        }
        if !cur.is_empty() {
            tokens.push(std::mem::take(&mut cur));
        }
        if !c.is_whitespace() {
            tokens.push(c.to_string());
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    tokens
}

fn punct_tag(tok: &str) -> Option<&'static str> {
    let tag = match tok {
        "." | "!" | "?" => ".",
        "," => ",",
        ":" | ";" | "-" => ":",
        "(" | "[" | "{" => "(",
        ")" | "]" | "}" => ")",
        "$" => "$",
        "#" => "#",
        "\"" | "'" | "`" => "''",
        t if !t.chars().any(char::is_alphanumeric) => "SYM",
        _ => return None,
    };
    Some(tag)
}

fn plural_like(w: &str) -> bool {
    w.len() > 3 && w.ends_with('s') && !["ss", "us", "is"].iter().any(|s| w.ends_with(s))
}

fn tag_word(word: &str, tags: &[(String, String)]) -> &'static str {
    if word.starts_with(|c: char| c.is_ascii_digit()) || NUMBER_WORDS.contains(&word) {
        return "CD";
    }
    if let Some(tag) = lexicon(word) {
        return tag;
    }
    let prev = tags.last().map(|(w, t)| (w.as_str(), t.as_str()));
    if word.chars().count() > 6 && word.ends_with("ly") {
        return "RB";
    }
    let prev_non_adverb = tags.iter().rev().find(|(_, t)| t != "RB").map(|(_, t)| t.as_str());
    if prev_non_adverb == Some("MD") {
        return "VB";
    }
    if prev.map(|p| p.1) == Some("TO") && !word.ends_with('s') {
        return "VB";
    }
    if prev.map(|p| p.1) == Some("CC")
        && tags.len() >= 2
        && tags[tags.len() - 2].1 == "VB"
        && !word.ends_with('s')
    {
        return "VB";
    }
    let n = word.chars().count();
    if n > 4 && word.ends_with("ing") {
        return if prev.map(|p| p.1) == Some("DT") { "NN" } else { "VBG" };
    }
    if n > 4 && word.ends_with("ed") {
        return match prev {
            Some((w, _)) if BE_HAVE.contains(&w) => "VBN",
            Some((_, "DT" | "IN" | "JJ" | "PRP$")) => "JJ",
            Some((_, "NN" | "NNS" | "PRP")) => "VBD",
            _ => "VBN",
        };
    }
    if ["able", "ible", "ful", "ous", "ive", "less", "ical"]
        .iter()
        .any(|s| word.ends_with(s) && n > s.len() + 2)
    {
        return "JJ";
    }
    if plural_like(word) {
        return "NNS";
    }
    "NN"
}

/// Tags `text`. Fails on text with no tokens.
pub fn builtin_pos_tag(text: &str) -> Result<Vec<(String, String)>> {
    let tokens = tokenize(text);
    if tokens.is_empty() {
        return Err(Error::InvalidArgument("cannot tag empty text".into()));
    }
    let mut tags: Vec<(String, String)> = Vec::with_capacity(tokens.len());
    for tok in tokens {
        let tag = punct_tag(&tok).unwrap_or_else(|| tag_word(&tok, &tags));
        tags.push((tok, tag.to_string()));
    }
    Ok(tags)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tags(text: &str) -> Vec<(String, String)> {
        builtin_pos_tag(text).unwrap()
    }

    fn pairs(v: &[(&str, &str)]) -> Vec<(String, String)> {
        v.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect()
    }

    #[test]
    fn tables_sorted() {
        assert!(LEXICON.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(TAGSET.windows(2).all(|w| w[0] < w[1]));
        assert!(LEXICON.iter().all(|(_, t)| is_known_tag(t)));
    }

    #[test]
    fn simple_requirement() {
        assert_eq!(
            tags("The UAV shall accept commands"),
            pairs(&[
                ("the", "DT"),
                ("uav", "NN"),
                ("shall", "MD"),
                ("accept", "VB"),
                ("commands", "NNS"),
            ])
        );
    }

    #[test]
    fn adverb_between_modal_and_verb() {
        let t = tags("The UAV shall only accept commands from an authenticated Pilot controller.");
        assert_eq!(t[3], ("only".into(), "RB".into()));
        assert_eq!(t[4], ("accept".into(), "VB".into()));
        assert_eq!(t[8], ("authenticated".into(), "JJ".into()));
        assert_eq!(t.last().unwrap().1, ".");
    }

    #[test]
    fn infinitive_and_coordination() {
        let t = tags("A single adult shall be able to lift and carry the UAV.");
        let got: Vec<&str> = t.iter().map(|(_, t)| t.as_str()).collect();
        assert_eq!(got, ["DT", "NN", "NN", "MD", "VB", "JJ", "TO", "VB", "CC", "VB", "DT", "NN", "."]);
    }

    #[test]
    fn numbers_and_symbols() {
        let t = tags("The UAV shall charge to 75% in less than 3.5 hours.");
        assert!(t.contains(&("75".into(), "CD".into())));
        assert!(t.contains(&("%".into(), "SYM".into())));
        assert!(t.contains(&("3.5".into(), "CD".into())));
        assert!(t.contains(&("hours".into(), "NNS".into())));
    }

    #[test]
    fn hyphenated_token() {
        let toks = tokenize("accessible-by-air location");
        assert_eq!(toks, ["accessible-by-air", "location"]);
    }

    #[test]
    fn empty_text_rejected() {
        assert!(builtin_pos_tag("   ").is_err());
    }

    #[test]
    fn idempotent() {
        let s = "The system shall periodically send the Pilot real-time data.";
        assert_eq!(tags(s), tags(s));
    }
}
