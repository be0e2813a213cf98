//! Gazetteer-based mention annotation.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::linker::ResourceId;

/// A gazetteer hit. Offsets count characters, not bytes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mention {
    pub surface: String,
    pub start: usize,
    pub end: usize,
    pub target: ResourceId,
}

/// Surface forms mapped to the resources they denote.
#[derive(Debug, Clone, Default)]
pub struct Gazetteer {
    entries: BTreeMap<String, ResourceId>,
    // First character -> (lowercased remaining chars, surface), longest first.
    by_first: HashMap<char, Vec<(Vec<char>, String)>>,
}

impl Gazetteer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds or replaces an entry. Empty surfaces are ignored.
    pub fn insert(&mut self, surface: &str, target: ResourceId) {
        let mut chars = surface.chars();
        let Some(first) = chars.next() else { return };
        let rest: Vec<char> = chars.flat_map(char::to_lowercase).collect();
        if self.entries.insert(surface.to_owned(), target).is_none() {
            let bucket = self.by_first.entry(first).or_default();
            bucket.push((rest, surface.to_owned()));
            bucket.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.1.cmp(&b.1)));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &ResourceId)> {
        self.entries.iter().map(|(s, r)| (s.as_str(), r))
    }
}

impl FromIterator<(String, ResourceId)> for Gazetteer {
    fn from_iter<I: IntoIterator<Item = (String, ResourceId)>>(iter: I) -> Self {
        let mut g = Self::new();
        for (surface, target) in iter {
            g.insert(&surface, target);
        }
        g
    }
}

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric()
}

/// Scans `text` left to right for gazetteer surfaces. At each word start
/// the longest matching surface wins; matching resumes after it. The first
/// character must match exactly and the rest case-insensitively, and a
/// match must end at a word boundary.
pub fn annotate_mentions(text: &str, gazetteer: &Gazetteer) -> Vec<Mention> {
    let chars: Vec<char> = text.chars().collect();
    let mut mentions = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let at_word_start = i == 0 || !is_word_char(chars[i - 1]);
        let hit = at_word_start
            .then(|| gazetteer.by_first.get(&chars[i]))
            .flatten()
            .and_then(|bucket| {
                bucket.iter().find(|(rest, _)| {
                    let end = i + 1 + rest.len();
                    end <= chars.len()
                        && (end == chars.len() || !is_word_char(chars[end]))
                        && chars[i + 1..end]
                            .iter()
                            .zip(rest)
                            .all(|(&c, &r)| c == r || c.to_lowercase().eq(std::iter::once(r)))
                })
            });
        match hit {
            Some((rest, surface)) => {
                let end = i + 1 + rest.len();
                mentions.push(Mention {
                    surface: chars[i..end].iter().collect(),
                    start: i,
                    end,
                    target: gazetteer.entries[surface].clone(),
                });
                i = end;
            }
            None => i += 1,
        }
    }
    mentions
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rid(s: &str) -> ResourceId {
        ResourceId::new(s).unwrap()
    }

    fn gazetteer(entries: &[(&str, &str)]) -> Gazetteer {
        entries.iter().map(|(s, t)| (s.to_string(), rid(t))).collect()
    }

    #[test]
    fn olympic_park_headline() {
        let text = "Boris Johnson takes charge of Olympic Park's future";
        let m = annotate_mentions(text, &gazetteer(&[("Olympic Park", "olympic_park")]));
        assert_eq!(m.len(), 1);
        assert_eq!((m[0].start, m[0].end), (30, 42));
        assert_eq!(m[0].surface, "Olympic Park");
        assert_eq!(m[0].target, rid("olympic_park"));
    }

    #[test]
    fn empty_gazetteer_finds_nothing() {
        assert!(annotate_mentions("anything at all", &Gazetteer::new()).is_empty());
    }

    #[test]
    fn longest_match_wins() {
        let g = gazetteer(&[("New York", "ny"), ("York", "york")]);
        let m = annotate_mentions("New York", &g);
        assert_eq!(m.len(), 1);
        assert_eq!(m[0].target, rid("ny"));
    }

    #[test]
    fn case_and_boundaries() {
        let g = gazetteer(&[("WWE", "wwe"), ("John Cena", "cena")]);
        // First character is case-sensitive, the rest is not.
        assert_eq!(annotate_mentions("wwe Wwe WWE", &g).len(), 2);
        // No match inside a longer word.
        assert!(annotate_mentions("WWEs", &g).is_empty());
        assert_eq!(annotate_mentions("John CENA, ¿WWE?", &g).len(), 2);
    }

    #[test]
    fn offsets_count_characters() {
        let g = gazetteer(&[("WWE", "wwe")]);
        let text = "¿Qué luchador tiene el mayor porcentaje de victorias en la historia de WWE?";
        let m = annotate_mentions(text, &g);
        let chars: Vec<char> = text.chars().collect();
        assert_eq!(chars[m[0].start..m[0].end].iter().collect::<String>(), "WWE");
    }

    /// Greedy longest-match over an explicit enumeration of every
    /// (start, entry) candidate.
    fn oracle(text: &str, entries: &[(String, String)]) -> Vec<(usize, usize)> {
        let chars: Vec<char> = text.chars().collect();
        let matches_at = |i: usize, surface: &str| -> Option<usize> {
            let s: Vec<char> = surface.chars().collect();
            let end = i + s.len();
            if s.is_empty() || end > chars.len() {
                return None;
            }
            if i > 0 && chars[i - 1].is_alphanumeric() {
                return None;
            }
            if end < chars.len() && chars[end].is_alphanumeric() {
                return None;
            }
            if chars[i] != s[0] {
                return None;
            }
            let lower = |c: char| c.to_lowercase().collect::<String>();
            (1..s.len()).all(|k| lower(chars[i + k]) == lower(s[k])).then_some(end)
        };
        let mut out = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let best = entries.iter().filter_map(|(s, _)| matches_at(i, s)).max();
            match best {
                Some(end) => {
                    out.push((i, end));
                    i = end;
                }
                None => i += 1,
            }
        }
        out
    }

    proptest! {
        #[test]
        fn matches_brute_force_oracle(
            text in "[abAB ]{0,30}",
            surfaces in proptest::collection::vec("[abAB][abAB ]{0,4}[abAB]", 0..6),
        ) {
            let entries: Vec<(String, String)> =
                surfaces.iter().enumerate().map(|(n, s)| (s.clone(), format!("e{n}"))).collect();
            let g: Gazetteer = entries.iter().map(|(s, t)| (s.clone(), rid(t))).collect();
            let found = annotate_mentions(&text, &g);
            let spans: Vec<(usize, usize)> = found.iter().map(|m| (m.start, m.end)).collect();
            prop_assert_eq!(spans, oracle(&text, &entries));
            let chars: Vec<char> = text.chars().collect();
            for pair in found.windows(2) {
                prop_assert!(pair[0].end <= pair[1].start);
            }
            for m in &found {
                prop_assert_eq!(&m.surface, &chars[m.start..m.end].iter().collect::<String>());
            }
        }
    }
}
