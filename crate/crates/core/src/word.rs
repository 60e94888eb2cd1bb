use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

/// A finite word over an alphabet of named symbols. The empty word is `ϵ`.
///
/// Words order shortlex: shorter words first, then lexicographically, so the
/// first element of a sorted set of counterexamples is a shortest one.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Word(Vec<String>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(symbols: Vec<String>) -> Self {
        Word(symbols)
    }

    /// Splits `text` into symbols: comma-separated if it contains a comma,
    /// otherwise one symbol per character. `""` and `"ϵ"` are the empty word.
    pub fn parse(text: &str) -> Self {
        let text = text.trim();
        if text.is_empty() || text == "ϵ" {
            return Word::empty();
        }
        if text.contains(',') {
            Word(
                text.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect(),
            )
        } else {
            Word(text.chars().map(|c| c.to_string()).collect())
        }
    }

    pub fn symbols(&self) -> &[String] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, symbol: impl Into<String>) {
        self.0.push(symbol.into());
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }

    pub fn prefix(&self, len: usize) -> Word {
        Word(self.0[..len].to_vec())
    }
}

impl<S: Into<String>> FromIterator<S> for Word {
    fn from_iter<I: IntoIterator<Item = S>>(iter: I) -> Self {
        Word(iter.into_iter().map(Into::into).collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Bare concatenation when every symbol is one character, else
/// comma-separated; `ϵ` for the empty word.
impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ϵ");
        }
        if self.0.iter().all(|s| s.chars().count() == 1) {
            for s in &self.0 {
                f.write_str(s)?;
            }
            Ok(())
        } else {
            for (i, s) in self.0.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                f.write_str(s)?;
            }
            Ok(())
        }
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "\"{self}\"")
    }
}

/// All words of length exactly `len` over `alphabet`, in lexicographic order
/// of symbol positions in `alphabet`.
pub fn words_of_length(alphabet: &[String], len: usize) -> Vec<Word> {
    let mut out = alloc::vec![Word::empty()];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * alphabet.len());
        for w in &out {
            for s in alphabet {
                let mut w2 = w.clone();
                w2.push(s.clone());
                next.push(w2);
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn parse_and_display() {
        assert_eq!(Word::parse("aab").to_string(), "aab");
        assert_eq!(Word::parse("l1,l2").symbols(), &["l1", "l2"]);
        assert_eq!(Word::parse("l1,l2").to_string(), "l1,l2");
        assert!(Word::parse("").is_empty());
        assert_eq!(Word::empty().to_string(), "ϵ");
    }

    #[test]
    fn shortlex() {
        let mut ws = vec![Word::parse("b"), Word::parse("aa"), Word::parse("a")];
        ws.sort();
        assert_eq!(ws, vec![Word::parse("a"), Word::parse("b"), Word::parse("aa")]);
    }

    #[test]
    fn enumeration_counts() {
        let sigma = vec!["a".to_string(), "b".to_string()];
        let total: usize = (1..=6).map(|k| words_of_length(&sigma, k).len()).sum();
        assert_eq!(total, 126);
    }
}
