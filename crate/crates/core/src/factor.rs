//! Sliding-block codes.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::{Corpus, LanguageTable, Subshift};
use crate::system::System;
use crate::words::{Alphabet, Symbol, Word};

/// Local rule on source words of the factor's span.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum LocalRule {
    /// Sum of the block's symbols modulo `n`.
    SumMod(u8),
    /// Explicit table; must cover every admissible source block.
    Table(BTreeMap<Word, Symbol>),
}

impl LocalRule {
    fn apply(&self, block: &[Symbol]) -> Option<Symbol> {
        match self {
            LocalRule::SumMod(n) => {
                Some(Symbol((block.iter().map(|s| s.0 as u32).sum::<u32>() % *n as u32) as u8))
            }
            LocalRule::Table(t) => t.get(&Word::from(block)).copied(),
        }
    }

    fn out_size(&self, source: Alphabet) -> usize {
        match self {
            LocalRule::SumMod(n) => *n as usize,
            LocalRule::Table(t) => t.values().map(|s| s.index() + 1).max().unwrap_or(source.size()),
        }
    }
}

impl fmt::Display for LocalRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LocalRule::SumMod(n) => write!(f, "sum-mod-{n}"),
            LocalRule::Table(t) => {
                let parts: Vec<String> = t.iter().map(|(k, v)| format!("{k}>{v}")).collect();
                write!(f, "table[{}]", parts.join(","))
            }
        }
    }
}

/// `y_n = rule(x_n .. x_{n+span-1})`.
///
/// The block starts at `n` rather than being centered on it; the factor
/// differs from the centered code by a shift, which changes neither the
/// language nor any rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlidingBlockFactor {
    source: Box<System>,
    span: usize,
    rule: LocalRule,
    alphabet: Alphabet,
}

impl SlidingBlockFactor {
    pub fn new(source: System, span: usize, rule: LocalRule) -> Result<Self> {
        if span == 0 {
            return Err(Error::PartialRule("span must be positive".into()));
        }
        for w in source.language(span)? {
            if rule.apply(w.as_slice()).is_none() {
                return Err(Error::PartialRule(w.to_string()));
            }
        }
        let alphabet = Alphabet::new(rule.out_size(source.alphabet()))?;
        Ok(SlidingBlockFactor {
            source: Box::new(source),
            span,
            rule,
            alphabet,
        })
    }

    pub fn source(&self) -> &System {
        &self.source
    }

    pub fn span(&self) -> usize {
        self.span
    }

    pub fn rule(&self) -> &LocalRule {
        &self.rule
    }

    pub fn map(&self, x: &[Symbol]) -> Vec<Symbol> {
        x.windows(self.span)
            .map(|b| self.rule.apply(b).expect("rule checked total"))
            .collect()
    }
}

impl Subshift for SlidingBlockFactor {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn corpus(&self, coverage: usize) -> Result<Corpus> {
        let src = self.source.corpus(coverage + self.span - 1)?;
        let strings = src
            .strings()
            .iter()
            .filter(|s| s.len() >= self.span)
            .map(|s| self.map(s))
            .collect();
        Ok(Corpus::new(strings, coverage))
    }

    fn describe(&self) -> String {
        format!("factor span={} rule={} of ({})", self.span, self.rule, self.source.describe())
    }
}

/// Image language up to length `max_len` of the sliding-block code.
pub fn sliding_block_factor(source: System, span: usize, rule: LocalRule, max_len: usize) -> Result<LanguageTable> {
    let f = SlidingBlockFactor::new(source, span, rule)?;
    LanguageTable::build(&f, max_len)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::Substitution;

    fn tm() -> System {
        System::Substitution(Substitution::from_images(&["01", "10"]).unwrap())
    }

    #[test]
    fn identity_factor_keeps_language() {
        let id: BTreeMap<Word, Symbol> = [("0", 0), ("1", 1)]
            .into_iter()
            .map(|(w, s)| (w.parse().unwrap(), Symbol(s)))
            .collect();
        let image = sliding_block_factor(tm(), 1, LocalRule::Table(id), 10).unwrap();
        assert_eq!(image, LanguageTable::build(&tm(), 10).unwrap());
    }

    #[test]
    fn thue_morse_xor_is_the_eleven_ten_substitution() {
        let image = sliding_block_factor(tm(), 2, LocalRule::SumMod(2), 12).unwrap();
        let other = Substitution::from_images(&["11", "10"]).unwrap();
        assert_eq!(image, LanguageTable::build(&other, 12).unwrap());
        assert!(image.is_factor_closed());
    }

    #[test]
    fn partial_rule_is_rejected() {
        let partial: BTreeMap<Word, Symbol> = [("00".parse().unwrap(), Symbol(0))].into_iter().collect();
        assert!(matches!(
            SlidingBlockFactor::new(tm(), 2, LocalRule::Table(partial)),
            Err(Error::PartialRule(_))
        ));
    }
}
