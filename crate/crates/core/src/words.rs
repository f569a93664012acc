//! Alphabets, finite words, centered windows and the dyadic subshift metric.
//!
//! A point of a subshift is only ever seen through a finite window that
//! straddles the origin. Distances are `d(x, y) = 2^{-k}` where `k` is the
//! smallest `|n|` at which the two sequences differ, so every comparison is
//! reported as a [`Comparison`] carrying the radius over which it is certified.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SYMBOL_NAMES: &[u8] = b"0123456789abcdefghijklmnopqrstuvwxyz";

/// Index of a letter in an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[repr(transparent)]
pub struct Symbol(pub u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn name(self) -> char {
        SYMBOL_NAMES[self.0 as usize] as char
    }

    pub fn from_name(c: char) -> Option<Symbol> {
        SYMBOL_NAMES
            .iter()
            .position(|&b| b as char == c)
            .map(|i| Symbol(i as u8))
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

/// A finite alphabet `{0, .., size-1}`; symbols print as `0-9a-z`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Alphabet {
    size: u8,
}

impl Alphabet {
    pub const MAX_SIZE: usize = 36;

    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || size > Self::MAX_SIZE {
            return Err(Error::InvalidAlphabet(size));
        }
        Ok(Alphabet { size: size as u8 })
    }

    pub fn size(self) -> usize {
        self.size as usize
    }

    pub fn contains(self, s: Symbol) -> bool {
        s.0 < self.size
    }

    pub fn symbols(self) -> impl Iterator<Item = Symbol> {
        (0..self.size).map(Symbol)
    }

    pub fn check(self, symbols: &[Symbol]) -> Result<()> {
        match symbols.iter().find(|s| !self.contains(**s)) {
            Some(s) => Err(Error::SymbolOutOfRange {
                symbol: s.0 as usize,
                size: self.size(),
            }),
            None => Ok(()),
        }
    }
}

/// Finite word over an alphabet.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub struct Word(pub Vec<Symbol>);

impl Word {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.0
    }

    /// Parses a word from symbol names, checking it against `alphabet`.
    pub fn parse_in(s: &str, alphabet: Alphabet) -> Result<Word> {
        let w: Word = s.parse()?;
        alphabet.check(&w.0)?;
        Ok(w)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            write!(f, "{}", s.name())?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Word> {
        s.chars()
            .map(|c| Symbol::from_name(c).ok_or_else(|| Error::Parse(format!("bad symbol {c:?}"))))
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

impl From<Word> for String {
    fn from(w: Word) -> String {
        w.to_string()
    }
}

impl TryFrom<String> for Word {
    type Error = Error;

    fn try_from(s: String) -> Result<Word> {
        s.parse()
    }
}

impl From<&[Symbol]> for Word {
    fn from(s: &[Symbol]) -> Word {
        Word(s.to_vec())
    }
}

/// Finite window `x_left .. x_{left+len-1}` of a point, always containing
/// coordinate 0.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CenteredWord {
    symbols: Vec<Symbol>,
    left: i64,
}

impl CenteredWord {
    pub fn new(symbols: Vec<Symbol>, left: i64) -> Result<Self> {
        let len = symbols.len() as i64;
        if left > 0 || left + len - 1 < 0 {
            return Err(Error::OriginOutsideWindow { left, len: len as usize });
        }
        Ok(CenteredWord { symbols, left })
    }

    /// Window whose symbol at index `center` sits at coordinate 0.
    pub fn centered_at(symbols: Vec<Symbol>, center: usize) -> Result<Self> {
        Self::new(symbols, -(center as i64))
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn left(&self) -> i64 {
        self.left
    }

    /// Last covered coordinate.
    pub fn right(&self) -> i64 {
        self.left + self.symbols.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Largest `R` with `[-R, R]` inside the window.
    pub fn radius(&self) -> u64 {
        (-self.left).min(self.right()) as u64
    }

    pub fn at(&self, n: i64) -> Option<Symbol> {
        if n < self.left || n > self.right() {
            None
        } else {
            Some(self.symbols[(n - self.left) as usize])
        }
    }

    /// Symbols on coordinates `lo..=hi`, if covered.
    pub fn slice(&self, lo: i64, hi: i64) -> Option<&[Symbol]> {
        if lo < self.left || hi > self.right() || lo > hi {
            return None;
        }
        let a = (lo - self.left) as usize;
        let b = (hi - self.left) as usize;
        Some(&self.symbols[a..=b])
    }

    /// The centered sub-window on `[-r, r]`.
    pub fn truncate(&self, r: u64) -> Option<CenteredWord> {
        let r = r as i64;
        self.slice(-r, r).map(|s| CenteredWord {
            symbols: s.to_vec(),
            left: -r,
        })
    }

    pub fn word(&self) -> Word {
        Word(self.symbols.clone())
    }

    pub fn check_alphabet(&self, alphabet: Alphabet) -> Result<()> {
        alphabet.check(&self.symbols)
    }
}

impl fmt::Display for CenteredWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "offset:left={} word={}", self.left, Word(self.symbols.clone()))
    }
}

impl FromStr for CenteredWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("expected `offset:left=<n> word=<w>`, got {s:?}"));
        let rest = s.trim().strip_prefix("offset:left=").ok_or_else(bad)?;
        let (left, word) = rest.split_once(" word=").ok_or_else(bad)?;
        let left: i64 = left.trim().parse().map_err(|_| bad())?;
        let word: Word = word.trim().parse()?;
        CenteredWord::new(word.0, left)
    }
}

impl Serialize for CenteredWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CenteredWord {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Exponent of the metric: `Finite(k)` means `d = 2^{-k}`; `Beyond` means no
/// difference was seen in the compared overlap.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DistanceScale {
    Finite(u64),
    Beyond,
}

impl DistanceScale {
    /// Metric value; `Beyond` maps to zero.
    pub fn metric<F: Float>(self) -> F {
        match self {
            DistanceScale::Finite(k) => F::from(2.0).unwrap().powi(-(k.min(i32::MAX as u64) as i32)),
            DistanceScale::Beyond => F::zero(),
        }
    }

    /// True when the points are at distance `>= 2^{-k}` (differ within `[-k, k]`).
    pub fn at_least(self, k: u64) -> bool {
        matches!(self, DistanceScale::Finite(s) if s <= k)
    }

    /// True when the points are at distance `< 2^{-k}` (agree on `[-k, k]`).
    pub fn below(self, k: u64) -> bool {
        !self.at_least(k)
    }
}

impl PartialOrd for DistanceScale {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Ordered by exponent: a larger scale is a smaller distance.
impl Ord for DistanceScale {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        use DistanceScale::*;
        match (self, other) {
            (Finite(a), Finite(b)) => a.cmp(b),
            (Finite(_), Beyond) => std::cmp::Ordering::Less,
            (Beyond, Finite(_)) => std::cmp::Ordering::Greater,
            (Beyond, Beyond) => std::cmp::Ordering::Equal,
        }
    }
}

impl fmt::Display for DistanceScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DistanceScale::Finite(k) => write!(f, "{k}"),
            DistanceScale::Beyond => write!(f, "inf"),
        }
    }
}

/// A scale together with the symmetric radius on which the two windows were
/// both defined.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comparison {
    pub scale: DistanceScale,
    pub certified_radius: u64,
}

impl Comparison {
    /// Whether `scale` equals the true exponent of the infinite points.
    pub fn is_exact(&self) -> bool {
        matches!(self.scale, DistanceScale::Finite(k) if k <= self.certified_radius)
    }
}

/// `min{|n| : a_n != b_n}` over the overlap of the two windows.
pub fn scale_of_difference(a: &CenteredWord, b: &CenteredWord, alphabet: Alphabet) -> Result<Comparison> {
    a.check_alphabet(alphabet)?;
    b.check_alphabet(alphabet)?;
    let lo = a.left.max(b.left);
    let hi = a.right().min(b.right());
    let certified_radius = (-lo).min(hi) as u64;
    let reach = (-lo).max(hi);
    for k in 0..=reach {
        for n in [-k, k] {
            if n < lo || n > hi {
                continue;
            }
            if a.at(n) != b.at(n) {
                return Ok(Comparison {
                    scale: DistanceScale::Finite(k as u64),
                    certified_radius,
                });
            }
        }
    }
    Ok(Comparison {
        scale: DistanceScale::Beyond,
        certified_radius,
    })
}

/// The window of `g·x`: coordinate `n` of the output is coordinate `n + g`
/// of the input.
pub fn shift_window(w: &CenteredWord, g: i64) -> Result<CenteredWord> {
    CenteredWord::new(w.symbols.clone(), w.left - g)
}

/// Whether two windows differ somewhere on `[lo, hi]`; both must cover it.
pub fn differ_on(a: &CenteredWord, b: &CenteredWord, lo: i64, hi: i64) -> Option<bool> {
    Some(a.slice(lo, hi)? != b.slice(lo, hi)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cw(s: &str, left: i64) -> CenteredWord {
        CenteredWord::new(s.parse::<Word>().unwrap().0, left).unwrap()
    }

    fn bin() -> Alphabet {
        Alphabet::new(2).unwrap()
    }

    #[test]
    fn identical_windows_are_beyond_with_radius() {
        let a = cw("01101001011", -5);
        let c = scale_of_difference(&a, &a, bin()).unwrap();
        assert_eq!(c.scale, DistanceScale::Beyond);
        assert_eq!(c.certified_radius, 5);
    }

    #[test]
    fn difference_at_origin_is_scale_zero() {
        let c = scale_of_difference(&cw("010", -1), &cw("000", -1), bin()).unwrap();
        assert_eq!(c.scale, DistanceScale::Finite(0));
        assert_eq!(c.scale.metric::<f64>(), 1.0);
    }

    #[test]
    fn thue_morse_windows_differ_at_plus_one() {
        let c = scale_of_difference(&cw("0110100", -3), &cw("0110010", -3), bin()).unwrap();
        assert_eq!(c.scale, DistanceScale::Finite(1));
        assert!(c.is_exact());
    }

    #[test]
    fn alphabet_mismatch_is_rejected() {
        let a = cw("012", -1);
        assert!(scale_of_difference(&a, &a, bin()).is_err());
    }

    #[test]
    fn shift_relabels() {
        let w = cw("01", 0);
        assert_eq!(shift_window(&w, 0).unwrap(), w);
        let s = shift_window(&w, 1).unwrap();
        assert_eq!(s.left(), -1);
        assert_eq!(s.at(-1), Some(Symbol(0)));
        assert_eq!(s.at(0), Some(Symbol(1)));
        assert!(shift_window(&w, 2).is_err());
    }

    #[test]
    fn shift_round_trip_on_thue_morse_window() {
        let tm: Word = "01101001100101101".parse().unwrap();
        let w = CenteredWord::centered_at(tm.0, 8).unwrap();
        for g in -8..=8 {
            let back = shift_window(&shift_window(&w, g).unwrap(), -g).unwrap();
            assert_eq!(back, w);
        }
    }

    #[test]
    fn centered_word_text_form() {
        let w = cw("0110100", -3);
        assert_eq!(w.to_string(), "offset:left=-3 word=0110100");
        assert_eq!(w.to_string().parse::<CenteredWord>().unwrap(), w);
    }

    #[test]
    fn scales_reverse_metric_order() {
        let near = DistanceScale::Finite(5);
        let far = DistanceScale::Finite(1);
        assert!(near > far);
        assert!(near.metric::<f32>() < far.metric::<f32>());
        assert!(DistanceScale::Beyond > near);
    }
}
