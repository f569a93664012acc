//! Finite presentations of subshift languages.
//!
//! Every system exposes a [`Corpus`]: a handful of admissible strings such
//! that every admissible word up to a requested length occurs in one of them.
//! Searches over "all points of a cylinder" become scans over the corpus.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::words::{Alphabet, Symbol, Word};

/// A system whose language can be presented by a corpus.
pub trait Subshift: Send + Sync {
    fn alphabet(&self) -> Alphabet;

    /// Strings whose factors of length `<= coverage` are exactly the
    /// admissible words of those lengths.
    fn corpus(&self, coverage: usize) -> Result<Corpus>;

    /// Canonical text form, used for hashing and certificates.
    fn describe(&self) -> String;

    fn language(&self, n: usize) -> Result<BTreeSet<Word>> {
        Ok(self.corpus(n)?.factors(n))
    }
}

#[derive(Clone, Debug)]
pub struct Corpus {
    strings: Vec<Vec<Symbol>>,
    coverage: usize,
}

impl Corpus {
    pub fn new(strings: Vec<Vec<Symbol>>, coverage: usize) -> Self {
        let mut strings = strings;
        strings.sort();
        strings.dedup();
        Corpus { strings, coverage }
    }

    pub fn coverage(&self) -> usize {
        self.coverage
    }

    pub fn strings(&self) -> &[Vec<Symbol>] {
        &self.strings
    }

    pub fn factors(&self, n: usize) -> BTreeSet<Word> {
        debug_assert!(n <= self.coverage);
        let mut out = BTreeSet::new();
        for s in &self.strings {
            if s.len() < n {
                continue;
            }
            for w in s.windows(n.max(1)) {
                out.insert(Word(w[..n].to_vec()));
            }
        }
        out
    }

    pub fn contains(&self, w: &[Symbol]) -> bool {
        self.strings
            .iter()
            .any(|s| s.len() >= w.len() && s.windows(w.len().max(1)).any(|x| &x[..w.len()] == w))
    }

    /// Every position `p` (in string `i`) with `s[p - r ..= p + r]` in the
    /// corpus, grouped by that centered word.
    pub fn centered_index(&self, r: usize) -> HashMap<Vec<Symbol>, Vec<Site>> {
        let mut idx: HashMap<Vec<Symbol>, Vec<Site>> = HashMap::new();
        for (i, s) in self.strings.iter().enumerate() {
            if s.len() < 2 * r + 1 {
                continue;
            }
            for p in r..s.len() - r {
                idx.entry(s[p - r..=p + r].to_vec())
                    .or_default()
                    .push(Site { string: i, pos: p });
            }
        }
        idx
    }

    /// Sites whose centered word of radius `r` equals `u` (`|u| = 2r + 1`).
    pub fn sites_of(&self, u: &[Symbol]) -> Vec<Site> {
        let r = u.len() / 2;
        let mut out = Vec::new();
        for (i, s) in self.strings.iter().enumerate() {
            if s.len() < u.len() {
                continue;
            }
            for p in r..s.len() - r {
                if &s[p - r..=p + r] == u {
                    out.push(Site { string: i, pos: p });
                }
            }
        }
        out
    }

    /// Symbols at offsets `lo..=hi` relative to `site`, if inside the string.
    pub fn around(&self, site: Site, lo: i64, hi: i64) -> Option<&[Symbol]> {
        let s = &self.strings[site.string];
        let a = site.pos as i64 + lo;
        let b = site.pos as i64 + hi;
        if a < 0 || b >= s.len() as i64 || a > b {
            return None;
        }
        Some(&s[a as usize..=b as usize])
    }
}

/// A position inside a corpus string, standing for the origin of a point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub string: usize,
    pub pos: usize,
}

/// Admissible words by length.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LanguageTable {
    pub alphabet: Alphabet,
    pub by_len: BTreeMap<usize, BTreeSet<Word>>,
}

impl LanguageTable {
    pub fn build(system: &dyn Subshift, max_len: usize) -> Result<Self> {
        let corpus = system.corpus(max_len)?;
        Ok(Self::from_corpus(system.alphabet(), &corpus, max_len))
    }

    pub fn from_corpus(alphabet: Alphabet, corpus: &Corpus, max_len: usize) -> Self {
        let by_len = (1..=max_len).map(|n| (n, corpus.factors(n))).collect();
        LanguageTable { alphabet, by_len }
    }

    pub fn max_len(&self) -> usize {
        self.by_len.keys().next_back().copied().unwrap_or(0)
    }

    pub fn words(&self, n: usize) -> Option<&BTreeSet<Word>> {
        self.by_len.get(&n)
    }

    pub fn complexity(&self, n: usize) -> usize {
        self.by_len.get(&n).map_or(0, |s| s.len())
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.by_len.get(&w.len()).is_some_and(|s| s.contains(w))
    }

    /// Every length-(n-1) factor of a length-n word is admissible, and every
    /// length-(n-1) word extends on both sides.
    pub fn is_factor_closed(&self) -> bool {
        self.by_len.iter().all(|(&n, words)| {
            if n == 1 {
                return !words.is_empty();
            }
            let Some(shorter) = self.by_len.get(&(n - 1)) else {
                return true;
            };
            let closed = words.iter().all(|w| {
                shorter.contains(&Word(w.0[..n - 1].to_vec())) && shorter.contains(&Word(w.0[1..].to_vec()))
            });
            let extendable = shorter.iter().all(|v| {
                words.iter().any(|w| w.0[..n - 1] == v.0[..]) && words.iter().any(|w| w.0[1..] == v.0[..])
            });
            closed && extendable
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_factors_and_sites() {
        let s: Word = "0110100110010110".parse().unwrap();
        let c = Corpus::new(vec![s.0.clone()], 4);
        assert_eq!(c.factors(2).len(), 4);
        assert!(c.contains(&"1001".parse::<Word>().unwrap().0));
        assert!(!c.contains(&"000".parse::<Word>().unwrap().0));
        let sites = c.sites_of(&"101".parse::<Word>().unwrap().0);
        assert_eq!(sites, vec![Site { string: 0, pos: 3 }, Site { string: 0, pos: 12 }]);
        assert_eq!(c.around(sites[0], -1, 1).unwrap(), &"101".parse::<Word>().unwrap().0[..]);
        assert_eq!(c.centered_index(1)[&"101".parse::<Word>().unwrap().0], sites);
    }
}
