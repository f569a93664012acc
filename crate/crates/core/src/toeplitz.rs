//! Toeplitz subshifts from hole-filling skeletons.
//!
//! A skeleton is a cyclic list of stages. Each stage fills every residue
//! class of the current hole class modulo the next period except one, which
//! stays a hole for the following stage. With a constant period ratio `ℓ`
//! the positions filled by stage `i` are periodic with period `ℓ^i`, and the
//! maximal equicontinuous factor is the `ℓ`-adic odometer.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::sync::{Arc, Mutex};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::{Corpus, Subshift};
use crate::odometer::OdometerResidue;
use crate::words::{Alphabet, CenteredWord, Symbol, Word};

/// Cells of one stage: `None` is the hole passed on to the next stage.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Pattern(pub Vec<Option<Symbol>>);

impl Pattern {
    fn hole(&self) -> Option<usize> {
        self.0.iter().position(|c| c.is_none())
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            match c {
                Some(s) => write!(f, "{s}")?,
                None => write!(f, "?")?,
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ToeplitzSkeleton {
    alphabet: Alphabet,
    ratio: usize,
    patterns: Vec<Pattern>,
    cache: FactorCache,
}

type FactorSet = Arc<HashSet<Vec<Symbol>>>;

/// Memoized corpora and factor sets; invisible to equality and hashing.
#[derive(Clone, Debug, Default)]
struct FactorCache {
    corpora: Arc<Mutex<HashMap<usize, Corpus>>>,
    factors: Arc<Mutex<HashMap<usize, FactorSet>>>,
}

impl PartialEq for FactorCache {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}

impl Eq for FactorCache {}

impl std::hash::Hash for FactorCache {
    fn hash<H: std::hash::Hasher>(&self, _: &mut H) {}
}

impl ToeplitzSkeleton {
    /// Patterns over symbol names and `?`, used cyclically, e.g. `["0?", "1?"]`.
    pub fn from_patterns(patterns: &[&str]) -> Result<Self> {
        let parsed = patterns
            .iter()
            .map(|p| {
                p.chars()
                    .map(|c| {
                        if c == '?' {
                            Ok(None)
                        } else {
                            Symbol::from_name(c)
                                .map(Some)
                                .ok_or_else(|| Error::Skeleton(format!("bad cell {c:?}")))
                        }
                    })
                    .collect::<Result<Vec<_>>>()
                    .map(Pattern)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(parsed)
    }

    pub fn new(patterns: Vec<Pattern>) -> Result<Self> {
        let first = patterns.first().ok_or_else(|| Error::Skeleton("no stages".into()))?;
        let ratio = first.0.len();
        if ratio < 2 {
            return Err(Error::Skeleton("period ratio must be at least 2".into()));
        }
        let mut max_sym = 0u8;
        for (i, p) in patterns.iter().enumerate() {
            if p.0.len() != ratio {
                return Err(Error::Skeleton(format!("stage {i} has ratio {} != {ratio}", p.0.len())));
            }
            let holes = p.0.iter().filter(|c| c.is_none()).count();
            if holes == ratio {
                return Err(Error::Skeleton(format!("stage {i} fills nothing: residue class left permanently unfilled")));
            }
            if holes > 1 {
                return Err(Error::Skeleton(format!("stage {i} leaves {holes} holes; exactly one is supported")));
            }
            if holes == 0 && i + 1 != patterns.len() {
                return Err(Error::Skeleton(format!("stage {i} fills every class but later stages follow")));
            }
            max_sym = max_sym.max(p.0.iter().flatten().map(|s| s.0).max().unwrap_or(0));
        }
        Ok(ToeplitzSkeleton {
            alphabet: Alphabet::new(max_sym as usize + 1)?,
            ratio,
            patterns,
            cache: FactorCache::default(),
        })
    }

    pub fn ratio(&self) -> usize {
        self.ratio
    }

    pub fn patterns(&self) -> &[Pattern] {
        &self.patterns
    }

    /// A skeleton whose last stage leaves no hole generates a periodic sequence.
    pub fn is_degenerate(&self) -> bool {
        self.patterns.last().is_some_and(|p| p.hole().is_none())
    }

    /// Periods `ℓ, ℓ^2, ..` of the first `n` stages.
    pub fn periods(&self, n: usize) -> Vec<u64> {
        (1..=n as u32).map(|i| (self.ratio as u64).pow(i)).collect()
    }

    fn stage(&self, i: usize) -> &Pattern {
        &self.patterns[i % self.patterns.len()]
    }

    /// Symbol at the position whose `ℓ`-adic digits are `digits`; `None`
    /// when every digit up to the end hits a hole.
    fn resolve(&self, digits: impl Iterator<Item = usize>) -> Option<Symbol> {
        for (i, d) in digits.enumerate() {
            if self.is_degenerate() && i >= self.patterns.len() {
                return None;
            }
            match self.stage(i).0[d] {
                Some(s) => return Some(s),
                None => continue,
            }
        }
        None
    }

    /// `x_n` for `n >= 0`, `None` at the (at most one) never-filled position.
    pub fn symbol_at(&self, n: u64) -> Option<Symbol> {
        let l = self.ratio as u64;
        let mut m = n;
        let digits = std::iter::from_fn(move || {
            let d = (m % l) as usize;
            m /= l;
            Some(d)
        })
        .take(64 + 2 * self.patterns.len() * 64);
        self.resolve(digits)
    }

    /// A run of `len` consecutive determined symbols.
    pub fn prefix(&self, len: usize) -> Vec<Symbol> {
        let mut start = 0u64;
        loop {
            let run: Option<Vec<Symbol>> = (start..start + len as u64).map(|n| self.symbol_at(n)).collect();
            match run {
                Some(v) => return v,
                None => {
                    let bad = (start..start + len as u64).find(|&n| self.symbol_at(n).is_none()).unwrap();
                    start = bad + 1;
                }
            }
        }
    }

    /// Toeplitz property on a run of the sequence, checked against the
    /// skeleton's own periods.
    pub fn check_toeplitz(&self, len: usize) -> ToeplitzCheck {
        let periods = self.periods(64.min(((len as f64).log(self.ratio as f64)).ceil() as usize + 2));
        check_toeplitz_property(&self.prefix(len), &periods)
    }

    /// Distinct radius-`L` windows over the odometer point named by `r`.
    pub fn fiber_census(&self, r: OdometerResidue, radius: u64) -> Result<Vec<CenteredWord>> {
        if r.q != self.ratio as u64 {
            return Err(Error::Hypotheses(format!("residue base {} but skeleton ratio {}", r.q, self.ratio)));
        }
        let period = (r.depth as usize).max(1) * self.patterns.len();
        let ndig = 64 + 4 * period + 2 * (radius.max(1) as f64).log2().ceil() as usize;
        let base: Vec<usize> = (1..=ndig).map(|i| r.extended_digit(i) as usize).collect();
        let mut cells: Vec<Option<Symbol>> = Vec::with_capacity(2 * radius as usize + 1);
        for n in -(radius as i64)..=radius as i64 {
            let digits = add_small(&base, n, self.ratio);
            cells.push(self.resolve(digits.into_iter()));
        }
        let len = 2 * radius as usize + 1;
        let language = self.factor_set(len)?;
        let free: Vec<usize> = (0..len).filter(|&i| cells[i].is_none()).collect();
        let mut out = BTreeSet::new();
        let fills = self.alphabet.size().pow(free.len() as u32);
        for f in 0..fills {
            let mut w: Vec<Symbol> = cells.iter().map(|c| c.unwrap_or(Symbol(0))).collect();
            let mut code = f;
            for &i in &free {
                w[i] = Symbol((code % self.alphabet.size()) as u8);
                code /= self.alphabet.size();
            }
            if language.contains(&w) {
                out.insert(CenteredWord::new(w, -(radius as i64))?);
            }
        }
        Ok(out.into_iter().collect())
    }
}

/// `y + n` for an `ℓ`-adic integer truncated to `digits.len()` digits.
fn add_small(digits: &[usize], n: i64, l: usize) -> Vec<usize> {
    let mut out = digits.to_vec();
    let l = l as i64;
    let mut carry = n;
    for d in out.iter_mut() {
        if carry == 0 {
            break;
        }
        let v = *d as i64 + carry;
        *d = v.rem_euclid(l) as usize;
        carry = v.div_euclid(l);
    }
    out
}

impl fmt::Display for ToeplitzSkeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.patterns.iter().map(|p| p.to_string()).collect();
        write!(f, "toeplitz {}", parts.join(" "))
    }
}

impl Subshift for ToeplitzSkeleton {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// A run long enough that its length-`coverage` factors are unchanged
    /// by doubling it.
    fn corpus(&self, coverage: usize) -> Result<Corpus> {
        if let Some(c) = self.cache.corpora.lock().unwrap().get(&coverage) {
            return Ok(c.clone());
        }
        let c = self.build_corpus(coverage)?;
        self.cache.corpora.lock().unwrap().insert(coverage, c.clone());
        Ok(c)
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl ToeplitzSkeleton {
    fn factor_set(&self, n: usize) -> Result<FactorSet> {
        if let Some(f) = self.cache.factors.lock().unwrap().get(&n) {
            return Ok(f.clone());
        }
        let corpus = self.corpus(n)?;
        let set: HashSet<Vec<Symbol>> = corpus.strings().iter().flat_map(|s| s.windows(n).map(|w| w.to_vec())).collect();
        let set = Arc::new(set);
        self.cache.factors.lock().unwrap().insert(n, set.clone());
        Ok(set)
    }

    fn build_corpus(&self, coverage: usize) -> Result<Corpus> {
        let n = coverage.max(1);
        let mut len = (64 * n).max(1024);
        let mut prev = factors(&self.prefix(len), n);
        loop {
            let next_seq = self.prefix(2 * len);
            let next = factors(&next_seq, n);
            if next == prev {
                return Ok(Corpus::new(vec![next_seq], coverage));
            }
            if len > 1 << 24 {
                return Err(Error::Skeleton("language did not stabilize".into()));
            }
            prev = next;
            len *= 2;
        }
    }
}

fn factors(s: &[Symbol], n: usize) -> BTreeSet<Vec<Symbol>> {
    s.windows(n).map(|w| w.to_vec()).collect()
}

/// Builds a skeleton from absolute periods and per-stage fills
/// `(residue mod period, symbol)`. The stage list repeats cyclically; every
/// stage must fill all but one sub-class of the current hole class.
pub fn toeplitz_from_skeleton(periods: &[u64], fillers: &[Vec<(u64, Symbol)>]) -> Result<ToeplitzSkeleton> {
    if periods.is_empty() || periods.len() != fillers.len() {
        return Err(Error::Skeleton("need one filler list per period".into()));
    }
    let ratio = periods[0];
    if ratio < 2 {
        return Err(Error::Skeleton("first period must be at least 2".into()));
    }
    let mut prev = 1u64;
    let mut hole = 0u64;
    let mut patterns = Vec::new();
    for (i, (&p, fills)) in periods.iter().zip(fillers).enumerate() {
        if p % prev != 0 || p / prev != ratio {
            return Err(Error::Skeleton(format!(
                "period {p} at stage {i} is not {ratio} times the previous period {prev}"
            )));
        }
        let mut cells: Vec<Option<Symbol>> = vec![None; ratio as usize];
        for &(res, sym) in fills {
            let res = res % p;
            if res % prev != hole {
                return Err(Error::Skeleton(format!(
                    "stage {i} fills residue {res} mod {p}, which an earlier stage already filled"
                )));
            }
            let t = ((res - hole) / prev) as usize;
            if cells[t].replace(sym).is_some_and(|old| old != sym) {
                return Err(Error::Skeleton(format!("conflicting fills for residue {res} mod {p}")));
            }
        }
        if let Some(t) = cells.iter().position(|c| c.is_none()) {
            hole += t as u64 * prev;
        }
        patterns.push(Pattern(cells));
        prev = p;
    }
    ToeplitzSkeleton::new(patterns)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToeplitzCheck {
    pub positions: usize,
    /// Positions whose period recurs at least once inside the run.
    pub nonvacuous: usize,
    pub failures: Vec<usize>,
}

impl ToeplitzCheck {
    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }
}

/// For every position `n`, some period `p` with `x_{n+kp} = x_n` for all `k`
/// keeping the index in range.
pub fn check_toeplitz_property(seq: &[Symbol], periods: &[u64]) -> ToeplitzCheck {
    let mut nonvacuous = 0;
    let mut failures = Vec::new();
    for n in 0..seq.len() {
        let found = periods.iter().find(|&&p| {
            let p = p as usize;
            let mut i = n % p;
            while i < seq.len() {
                if seq[i] != seq[n] {
                    return false;
                }
                i += p;
            }
            true
        });
        match found {
            Some(&p) => {
                if (p as usize) < seq.len() && (n >= p as usize || n + (p as usize) < seq.len()) {
                    nonvacuous += 1;
                }
            }
            None => failures.push(n),
        }
    }
    ToeplitzCheck {
        positions: seq.len(),
        nonvacuous,
        failures,
    }
}

/// Word form of a run, for tests and reports.
pub fn prefix_word(t: &ToeplitzSkeleton, len: usize) -> Word {
    Word(t.prefix(len))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::substitution::Substitution;

    #[test]
    fn doubling_skeleton_is_period_doubling() {
        let t = ToeplitzSkeleton::from_patterns(&["0?", "1?"]).unwrap();
        let pd = Substitution::from_images(&["01", "00"]).unwrap();
        let fixed = pd.apply_power(&[Symbol(0)], 10);
        assert_eq!(t.prefix(1024), fixed);
        assert!(t.check_toeplitz(1 << 12).holds());
        for n in 1..=10 {
            assert_eq!(t.language(n).unwrap(), pd.language(n).unwrap());
        }
    }

    #[test]
    fn residue_form_matches_patterns() {
        let t = toeplitz_from_skeleton(&[2, 4], &[vec![(0, Symbol(0))], vec![(1, Symbol(1))]]).unwrap();
        assert_eq!(t, ToeplitzSkeleton::from_patterns(&["0?", "1?"]).unwrap());
    }

    #[test]
    fn skeleton_errors() {
        assert!(ToeplitzSkeleton::from_patterns(&["??"]).is_err());
        assert!(toeplitz_from_skeleton(&[2, 4], &[vec![(0, Symbol(0))], vec![(2, Symbol(1))]]).is_err());
        assert!(toeplitz_from_skeleton(&[2, 6], &[vec![(0, Symbol(0))], vec![(1, Symbol(1))]]).is_err());
        assert!(toeplitz_from_skeleton(&[2], &[vec![]]).is_err());
    }

    #[test]
    fn degenerate_skeleton_is_periodic() {
        let t = ToeplitzSkeleton::from_patterns(&["01"]).unwrap();
        assert!(t.is_degenerate());
        assert_eq!(t.language(3).unwrap().len(), 2);
    }

    #[test]
    fn censuses_over_the_hole_orbit() {
        let t = ToeplitzSkeleton::from_patterns(&["0?", "1?", "2?"]).unwrap();
        // digits all 1 = the never-filled position -1
        let hole = OdometerResidue::new(2, 1, 1).unwrap();
        assert_eq!(t.fiber_census(hole, 16).unwrap().len(), 3);
        let generic = OdometerResidue::new(2, 3, 5).unwrap();
        assert_eq!(t.fiber_census(generic, 16).unwrap().len(), 1);
    }
}
