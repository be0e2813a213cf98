//! Lexicon-based headline sentiment on a dual 1..5 scale.

use std::collections::HashMap;

use serde::Serialize;

/// Positive and negative strengths, each in `1..=5`. `(1, 1)` is neutral.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct EmotionAnnotation {
    pub positive: u8,
    pub negative: u8,
}

impl EmotionAnnotation {
    pub const NEUTRAL: Self = Self { positive: 1, negative: 1 };
}

/// Token scores in `-5..=-1` or `1..=5`, keyed by lowercased token.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    scores: HashMap<String, i8>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("lexicon score for {token:?} must be in -5..=-1 or 1..=5, got {score}")]
pub struct InvalidScore {
    pub token: String,
    pub score: i64,
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, token: &str, score: i64) -> Result<(), InvalidScore> {
        if score == 0 || !(-5..=5).contains(&score) {
            return Err(InvalidScore { token: token.to_owned(), score });
        }
        self.scores.insert(token.to_lowercase(), score as i8);
        Ok(())
    }

    pub fn get(&self, token: &str) -> Option<i8> {
        self.scores.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Lowercased runs of letters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphabetic()).filter(|t| !t.is_empty()).map(str::to_lowercase)
}

/// The strongest positive and strongest negative token scores, each
/// defaulting to 1.
pub fn score_sentiment(headline: &str, lexicon: &Lexicon) -> EmotionAnnotation {
    let mut out = EmotionAnnotation::NEUTRAL;
    for score in tokenize(headline).filter_map(|t| lexicon.get(&t)) {
        if score > 0 {
            out.positive = out.positive.max(score as u8);
        } else {
            out.negative = out.negative.max(score.unsigned_abs());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lexicon() -> Lexicon {
        let mut l = Lexicon::new();
        for (t, s) in [("victory", 3), ("war", -4), ("great", 2), ("sad", -2)] {
            l.insert(t, s).unwrap();
        }
        l
    }

    #[test]
    fn neutral_without_lexicon_tokens() {
        assert_eq!(score_sentiment("Nothing to see here", &lexicon()), EmotionAnnotation::NEUTRAL);
    }

    #[test]
    fn single_negative_token() {
        assert_eq!(
            score_sentiment("War in the east", &lexicon()),
            EmotionAnnotation { positive: 1, negative: 4 }
        );
    }

    #[test]
    fn tokens_split_on_non_letters() {
        assert_eq!(
            score_sentiment("¿Great-victory?", &lexicon()),
            EmotionAnnotation { positive: 3, negative: 1 }
        );
    }

    #[test]
    fn rejects_out_of_range_scores() {
        assert!(Lexicon::new().insert("x", 0).is_err());
        assert!(Lexicon::new().insert("x", 6).is_err());
    }

    proptest! {
        #[test]
        fn order_invariant(
            words in proptest::collection::vec(prop::sample::select(vec!["victory", "war", "great", "sad", "the", "a"]), 0..10),
            seed in any::<u64>(),
        ) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let mut shuffled = words.clone();
            shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
            let l = lexicon();
            let a = score_sentiment(&words.join(" "), &l);
            prop_assert_eq!(a, score_sentiment(&shuffled.join(" "), &l));
            // Direct max oracle.
            let pos = words.iter().filter_map(|w| l.get(w)).filter(|s| *s > 0).max().unwrap_or(1) as u8;
            let neg = words.iter().filter_map(|w| l.get(w)).filter(|s| *s < 0).map(|s| s.unsigned_abs()).max().unwrap_or(1);
            prop_assert_eq!(a, EmotionAnnotation { positive: pos, negative: neg });
        }
    }
}
