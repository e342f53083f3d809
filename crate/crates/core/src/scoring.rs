//! Per-post hate scores and the lexicon-matching baseline.
//!
//! Classifier scores are produced externally and loaded from disk; this
//! module validates them and provides the keyword baseline: a post matches
//! when any lexicon term occurs as a whole-token sequence, case-insensitive,
//! optionally also matching a naive `-s` plural of the term.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};

/// Hate likelihood for one post, in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PostScore {
    pub post_id: String,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScoreError {
    OutOfRange { post_id: String, score: f64 },
    Duplicate { post_id: String },
}

impl fmt::Display for ScoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreError::OutOfRange { post_id, score } => {
                write!(f, "score {score} for post {post_id} is outside [0, 1]")
            }
            ScoreError::Duplicate { post_id } => {
                write!(f, "duplicate score for post {post_id}")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for ScoreError {}

/// Validated score table with at most one entry per post.
#[derive(Debug, Clone, Default)]
pub struct ScoreSet {
    by_post: HashMap<String, f64>,
}

impl ScoreSet {
    pub fn from_rows(rows: impl IntoIterator<Item = (String, f64)>) -> Result<Self, ScoreError> {
        let mut by_post = HashMap::new();
        for (post_id, score) in rows {
            if !(0.0..=1.0).contains(&score) {
                return Err(ScoreError::OutOfRange { post_id, score });
            }
            if by_post.insert(post_id.clone(), score).is_some() {
                return Err(ScoreError::Duplicate { post_id });
            }
        }
        Ok(Self { by_post })
    }

    pub fn get(&self, post_id: &str) -> Option<f64> {
        self.by_post.get(post_id).copied()
    }

    pub fn len(&self) -> usize {
        self.by_post.len()
    }

    pub fn is_empty(&self) -> bool {
        self.by_post.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> + '_ {
        self.by_post.iter().map(|(id, &s)| (id.as_str(), s))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LexiconError {
    Empty,
    EmptyTerm,
    Duplicate(String),
}

impl fmt::Display for LexiconError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LexiconError::Empty => write!(f, "lexicon contains no terms"),
            LexiconError::EmptyTerm => write!(f, "lexicon contains an empty term"),
            LexiconError::Duplicate(t) => write!(f, "duplicate lexicon term: {t}"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for LexiconError {}

/// Ordered list of lowercase hate terms; multi-word terms match as token
/// sequences.
#[derive(Debug, Clone)]
pub struct Lexicon {
    terms: Vec<String>,
    token_seqs: Vec<Vec<String>>,
    /// Also match each term with `s` appended to its final token.
    plural_s: bool,
}

fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(|t| t.to_lowercase())
        .collect()
}

impl Lexicon {
    pub fn new(terms: Vec<String>, plural_s: bool) -> Result<Self, LexiconError> {
        if terms.is_empty() {
            return Err(LexiconError::Empty);
        }
        let mut seen = HashSet::new();
        let mut normalized = Vec::with_capacity(terms.len());
        let mut token_seqs = Vec::with_capacity(terms.len());
        for term in terms {
            let lower = term.to_lowercase();
            let tokens = tokenize(&lower);
            if tokens.is_empty() {
                return Err(LexiconError::EmptyTerm);
            }
            if !seen.insert(lower.clone()) {
                return Err(LexiconError::Duplicate(lower));
            }
            normalized.push(lower);
            token_seqs.push(tokens);
        }
        Ok(Self {
            terms: normalized,
            token_seqs,
            plural_s,
        })
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Terms occurring in `text`; empty means no match. A matching post
    /// scores 1.0 under the baseline, anything else 0.0.
    pub fn match_text(&self, text: &str) -> Vec<&str> {
        let tokens = tokenize(text);
        let mut hits = Vec::new();
        for (term, seq) in self.terms.iter().zip(&self.token_seqs) {
            if self.seq_occurs(seq, &tokens) {
                hits.push(term.as_str());
            }
        }
        hits
    }

    pub fn is_match(&self, text: &str) -> bool {
        let tokens = tokenize(text);
        self.token_seqs.iter().any(|seq| self.seq_occurs(seq, &tokens))
    }

    fn seq_occurs(&self, seq: &[String], tokens: &[String]) -> bool {
        if seq.len() > tokens.len() {
            return false;
        }
        'outer: for start in 0..=(tokens.len() - seq.len()) {
            for (k, want) in seq.iter().enumerate() {
                let got = &tokens[start + k];
                let last = k + 1 == seq.len();
                let ok = got == want
                    || (self.plural_s
                        && last
                        && got.len() == want.len() + 1
                        && got.starts_with(want.as_str())
                        && got.ends_with('s'));
                if !ok {
                    continue 'outer;
                }
            }
            return true;
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn lexicon(terms: &[&str], plural: bool) -> Lexicon {
        Lexicon::new(terms.iter().map(|t| t.to_string()).collect(), plural).unwrap()
    }

    #[test]
    fn plural_expansion_matches_naive_s_form() {
        let lex = lexicon(&["kike"], true);
        assert!(lex.is_match("I hate kikes so much"));
        assert_eq!(lex.match_text("I hate kikes so much"), vec!["kike"]);
        let strict = lexicon(&["kike"], false);
        assert!(!strict.is_match("I hate kikes so much"));
        assert!(strict.is_match("that kike over there"));
    }

    #[test]
    fn empty_body_never_matches() {
        let lex = lexicon(&["cunt"], true);
        assert!(!lex.is_match(""));
    }

    #[test]
    fn word_boundaries_respected() {
        let lex = lexicon(&["cunt"], true);
        assert!(!lex.is_match("scuntthorpe"));
        assert!(lex.is_match("what a CUNT."));
    }

    #[test]
    fn case_insensitive() {
        let lex = lexicon(&["paki"], false);
        assert_eq!(lex.is_match("PAKI"), lex.is_match("paki"));
    }

    #[test]
    fn multi_word_terms_match_token_sequences() {
        let lex = lexicon(&["white power"], true);
        assert!(lex.is_match("they chanted WHITE-POWER slogans"));
        assert!(!lex.is_match("white house power grid"));
        assert!(lex.is_match("white powers rising"));
    }

    #[test]
    fn adding_a_term_is_monotone() {
        let small = lexicon(&["kike"], true);
        let large = lexicon(&["kike", "paki"], true);
        for text in ["kikes everywhere", "nothing here", "a paki slur"] {
            if small.is_match(text) {
                assert!(large.is_match(text));
            }
        }
    }

    #[test]
    fn lexicon_validation() {
        assert!(matches!(Lexicon::new(vec![], true), Err(LexiconError::Empty)));
        assert!(matches!(
            Lexicon::new(vec!["".to_string()], true),
            Err(LexiconError::EmptyTerm)
        ));
        assert!(matches!(
            Lexicon::new(vec!["kike".into(), "KIKE".into()], true),
            Err(LexiconError::Duplicate(_))
        ));
    }

    #[test]
    fn score_validation() {
        let ok = ScoreSet::from_rows(vec![("p1".to_string(), 0.96)]).unwrap();
        assert_eq!(ok.get("p1"), Some(0.96));
        assert!(matches!(
            ScoreSet::from_rows(vec![("p1".to_string(), 1.2)]),
            Err(ScoreError::OutOfRange { .. })
        ));
        assert!(matches!(
            ScoreSet::from_rows(vec![("p1".to_string(), 0.5), ("p1".to_string(), 0.5)]),
            Err(ScoreError::Duplicate { .. })
        ));
        assert!(ScoreSet::from_rows(vec![]).unwrap().is_empty());
    }
}
