//! Substitutions, their languages, seeds and structural predicates.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::{Corpus, Subshift};
use crate::words::{Alphabet, CenteredWord, Symbol, Word};

/// Defaults for the height computation: prefix length `q^8`, checked stable
/// over the two preceding depths.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightConfig {
    pub max_exponent: u32,
    pub max_prefix: usize,
}

impl Default for HeightConfig {
    fn default() -> Self {
        HeightConfig {
            max_exponent: 8,
            max_prefix: 1 << 20,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Substitution {
    alphabet: Alphabet,
    rules: Vec<Word>,
}

impl Substitution {
    pub fn new(rules: Vec<Word>) -> Result<Self> {
        let alphabet = Alphabet::new(rules.len())?;
        for (i, r) in rules.iter().enumerate() {
            if r.is_empty() {
                return Err(Error::EmptyImage(i));
            }
            alphabet.check(r.as_slice())?;
        }
        Ok(Substitution { alphabet, rules })
    }

    /// Builds from images written as strings, e.g. `["01", "10"]`.
    pub fn from_images(images: &[&str]) -> Result<Self> {
        let rules = images.iter().map(|s| s.parse()).collect::<Result<Vec<Word>>>()?;
        Self::new(rules)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn image(&self, a: Symbol) -> &[Symbol] {
        self.rules[a.index()].as_slice()
    }

    pub fn rules(&self) -> &[Word] {
        &self.rules
    }

    /// Common image length `q`, if every image has the same length.
    pub fn constant_length(&self) -> Option<usize> {
        let q = self.rules[0].len();
        self.rules.iter().all(|r| r.len() == q).then_some(q)
    }

    pub fn require_constant_length(&self) -> Result<usize> {
        self.constant_length().ok_or(Error::NotConstantLength)
    }

    pub fn apply(&self, w: &[Symbol]) -> Vec<Symbol> {
        w.iter().flat_map(|&a| self.image(a).iter().copied()).collect()
    }

    pub fn apply_power(&self, w: &[Symbol], k: u32) -> Vec<Symbol> {
        let mut cur = w.to_vec();
        for _ in 0..k {
            cur = self.apply(&cur);
        }
        cur
    }

    /// `M[a][b]` = number of occurrences of `b` in the image of `a`.
    pub fn incidence(&self) -> Vec<Vec<u64>> {
        let n = self.alphabet.size();
        let mut m = vec![vec![0u64; n]; n];
        for (a, img) in self.rules.iter().enumerate() {
            for s in img.as_slice() {
                m[a][s.index()] += 1;
            }
        }
        m
    }

    /// Some power of the incidence matrix (up to `n^2`) is entrywise positive.
    pub fn is_primitive(&self) -> bool {
        let n = self.alphabet.size();
        let base: Vec<Vec<bool>> = self
            .incidence()
            .into_iter()
            .map(|row| row.into_iter().map(|x| x > 0).collect())
            .collect();
        let mut cur = base.clone();
        for _ in 0..(n * n).max(1) {
            if cur.iter().all(|row| row.iter().all(|&x| x)) {
                return true;
            }
            let mut next = vec![vec![false; n]; n];
            for i in 0..n {
                for k in 0..n {
                    if cur[i][k] {
                        for j in 0..n {
                            next[i][j] |= base[k][j];
                        }
                    }
                }
            }
            cur = next;
        }
        cur.iter().all(|row| row.iter().all(|&x| x))
    }

    pub fn require_primitive(&self) -> Result<()> {
        if self.is_primitive() {
            Ok(())
        } else {
            Err(Error::NotPrimitive)
        }
    }

    fn is_growing(&self) -> bool {
        self.rules.iter().any(|r| r.len() > 1)
    }

    /// Admissible two-letter words: the least set containing the 2-factors of
    /// every image and closed under taking 2-factors of `θ(b)θ(c)`.
    pub fn two_letter_words(&self) -> BTreeSet<(Symbol, Symbol)> {
        let mut found: BTreeSet<(Symbol, Symbol)> = BTreeSet::new();
        let mut todo: Vec<(Symbol, Symbol)> = Vec::new();
        let push = |p: (Symbol, Symbol), found: &mut BTreeSet<_>, todo: &mut Vec<_>| {
            if found.insert(p) {
                todo.push(p);
            }
        };
        for img in &self.rules {
            for w in img.as_slice().windows(2) {
                push((w[0], w[1]), &mut found, &mut todo);
            }
        }
        while let Some((b, c)) = todo.pop() {
            let joined = self.apply(&[b, c]);
            for w in joined.windows(2) {
                push((w[0], w[1]), &mut found, &mut todo);
            }
        }
        found
    }

    /// Length-`n` factors of the subshift.
    pub fn language(&self, n: usize) -> Result<BTreeSet<Word>> {
        Subshift::language(self, n)
    }

    /// Seeds `b.a`: `a` is a fixed point of the first-letter map and `b` of the
    /// last-letter map under a common power `p`, and `ba` is admissible.
    pub fn seed_pairs(&self) -> Result<Vec<SeedPair>> {
        self.require_primitive()?;
        let n = self.alphabet.size();
        let first: Vec<usize> = self.rules.iter().map(|r| r.as_slice()[0].index()).collect();
        let last: Vec<usize> = self.rules.iter().map(|r| r.as_slice()[r.len() - 1].index()).collect();
        let (first_cyc, p1) = periodic_points(&first);
        let (last_cyc, p2) = periodic_points(&last);
        let period = lcm(p1, p2);
        let legal = self.two_letter_words();
        let mut out = Vec::new();
        for &b in &last_cyc {
            for &a in &first_cyc {
                if legal.contains(&(Symbol(b as u8), Symbol(a as u8))) {
                    out.push(SeedPair {
                        left: Symbol(b as u8),
                        right: Symbol(a as u8),
                        period,
                    });
                }
            }
        }
        debug_assert!(n >= 1);
        out.sort();
        Ok(out)
    }

    /// Applies `θ^k` to the window; the output origin sits at offset `cut`
    /// inside the block of the old coordinate-0 symbol.
    pub fn expand(&self, w: &CenteredWord, k: u32, cut: u64) -> Result<CenteredWord> {
        let q = self.require_constant_length()? as u64;
        let block = q.checked_pow(k).ok_or(Error::CutOutOfRange { cut, bound: u64::MAX })?;
        if cut >= block {
            return Err(Error::CutOutOfRange { cut, bound: block });
        }
        w.check_alphabet(self.alphabet)?;
        let symbols = self.apply_power(w.symbols(), k);
        CenteredWord::new(symbols, w.left() * block as i64 - cut as i64)
    }

    /// Window `θ^{pk}(b).θ^{pk}(a)` of the two-sided fixed point of a seed.
    pub fn seed_window(&self, seed: SeedPair, k: u32) -> Result<CenteredWord> {
        let base = CenteredWord::new(vec![seed.left, seed.right], -1)?;
        let sym = self.apply_power(base.symbols(), seed.period * k);
        let left_len = self.apply_power(&[seed.left], seed.period * k).len();
        CenteredWord::new(sym, -(left_len as i64))
    }

    /// Largest `h` coprime to `q` dividing the gcd of return times of the
    /// first letter of a one-sided fixed point.
    pub fn height(&self) -> Result<HeightResult> {
        self.height_with(HeightConfig::default())
    }

    pub fn height_with(&self, cfg: HeightConfig) -> Result<HeightResult> {
        self.require_primitive()?;
        let q = self.require_constant_length()?;
        if self.alphabet.size() == 1 {
            return Ok(HeightResult::Value(1));
        }
        let first: Vec<usize> = self.rules.iter().map(|r| r.as_slice()[0].index()).collect();
        let (fixed, p) = periodic_points(&first);
        let a = Symbol(fixed[0] as u8);
        // one-sided fixed point of θ^p starting with a
        let mut u = vec![a];
        let target = (q as u64).saturating_pow(cfg.max_exponent).min(cfg.max_prefix as u64) as usize;
        while u.len() < target {
            u = self.apply_power(&u, p);
        }
        let mut values = Vec::new();
        for e in [cfg.max_exponent.saturating_sub(2), cfg.max_exponent.saturating_sub(1), cfg.max_exponent] {
            let len = (q as u64).saturating_pow(e).min(cfg.max_prefix as u64) as usize;
            let g = u[1..len.min(u.len())]
                .iter()
                .enumerate()
                .filter(|(_, &s)| s == a)
                .fold(0u64, |g, (i, _)| gcd(g, i as u64 + 1));
            values.push(coprime_part(g, q as u64));
        }
        if values.iter().all(|&h| h == values[0]) && values[0] > 0 {
            Ok(HeightResult::Value(values[0]))
        } else {
            Ok(HeightResult::Exhausted { observed: values })
        }
    }

    /// Morse–Hedlund check on the complexity function up to `n_max`.
    pub fn aperiodicity_check(&self, n_max: usize) -> Result<AperiodicityVerdict> {
        self.require_primitive()?;
        let corpus = self.corpus(n_max + 1)?;
        let complexity: Vec<usize> = (1..=n_max + 1).map(|n| corpus.factors(n).len()).collect();
        Ok(classify_complexity(&complexity, n_max))
    }

    pub fn regime(&self) -> Regime {
        let primitive = self.is_primitive();
        let constant_length = self.constant_length();
        let aperiodic = primitive
            && self.is_growing()
            && matches!(self.aperiodicity_check(24), Ok(AperiodicityVerdict::Witnessed { .. }));
        let height = if primitive && aperiodic && constant_length.is_some() {
            match self.height() {
                Ok(HeightResult::Value(h)) => Some(h),
                _ => None,
            }
        } else {
            None
        };
        Regime {
            primitive,
            constant_length,
            aperiodic,
            height,
            trivial: self.alphabet.size() == 1 && primitive,
        }
    }
}

/// Tri-state answer of [`Substitution::aperiodicity_check`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AperiodicityVerdict {
    /// Strictly increasing complexity with `p(n_max) > n_max`.
    Witnessed { complexity: Vec<usize> },
    /// `p(n) = p(n+1)`: the subshift is periodic with period `p(n)`.
    Refuted { period: usize },
    Exhausted { n_max: usize },
}

pub(crate) fn classify_complexity(complexity: &[usize], n_max: usize) -> AperiodicityVerdict {
    for n in 1..=n_max {
        if complexity[n] == complexity[n - 1] {
            return AperiodicityVerdict::Refuted {
                period: complexity[n - 1],
            };
        }
    }
    if complexity[n_max - 1] > n_max {
        AperiodicityVerdict::Witnessed {
            complexity: complexity[..n_max].to_vec(),
        }
    } else {
        AperiodicityVerdict::Exhausted { n_max }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HeightResult {
    Value(u64),
    Exhausted { observed: Vec<u64> },
}

/// Hypotheses under which the odometer is the full maximal equicontinuous
/// factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Regime {
    pub primitive: bool,
    pub constant_length: Option<usize>,
    pub aperiodic: bool,
    pub height: Option<u64>,
    /// One-letter alphabet: a single fixed point.
    pub trivial: bool,
}

impl Regime {
    pub fn is_exact(&self) -> bool {
        self.primitive && self.constant_length.is_some() && self.aperiodic && self.height == Some(1)
    }

    pub fn describe_failure(&self) -> String {
        let mut why = Vec::new();
        if !self.primitive {
            why.push("not primitive");
        }
        if self.constant_length.is_none() {
            why.push("not constant length");
        }
        if !self.aperiodic {
            why.push("not aperiodic");
        }
        if self.height != Some(1) {
            why.push("height is not 1");
        }
        why.join(", ")
    }
}

/// Seed `b.a` of a two-sided fixed point of `θ^period`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SeedPair {
    pub left: Symbol,
    pub right: Symbol,
    pub period: u32,
}

impl fmt::Display for SeedPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.left, self.right)
    }
}

impl Subshift for Substitution {
    fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    fn corpus(&self, coverage: usize) -> Result<Corpus> {
        self.require_primitive()?;
        if !self.is_growing() {
            return Err(Error::NotGrowing);
        }
        let pairs = self.two_letter_words();
        let mut k = 0u32;
        let need = coverage.saturating_sub(1).max(1);
        loop {
            let shortest = self
                .alphabet
                .symbols()
                .map(|a| self.apply_power(&[a], k).len())
                .min()
                .unwrap_or(0);
            if shortest >= need {
                break;
            }
            k += 1;
        }
        let strings = pairs.iter().map(|&(b, c)| self.apply_power(&[b, c], k)).collect();
        Ok(Corpus::new(strings, coverage))
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Substitution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .alphabet
            .symbols()
            .map(|a| format!("{} -> {}", a, self.rules[a.index()]))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

/// Parses `"0 -> 01"` rules separated by newlines or commas; `#` starts a
/// comment. Rules must cover `0..n` exactly once.
impl FromStr for Substitution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut rules: Vec<Option<Word>> = Vec::new();
        for raw in s.split(['\n', ',', ';']) {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected `symbol -> image`, got {line:?}")))?;
            let lhs = lhs.trim();
            let mut chars = lhs.chars();
            let sym = match (chars.next(), chars.next()) {
                (Some(c), None) => Symbol::from_name(c),
                _ => None,
            }
            .ok_or_else(|| Error::Parse(format!("bad symbol {lhs:?}")))?;
            let img: Word = rhs.trim().parse()?;
            if rules.len() <= sym.index() {
                rules.resize(sym.index() + 1, None);
            }
            if rules[sym.index()].replace(img).is_some() {
                return Err(Error::Parse(format!("duplicate rule for {sym}")));
            }
        }
        if rules.is_empty() {
            return Err(Error::Parse("no rules".into()));
        }
        let rules = rules
            .into_iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| Error::Parse(format!("missing rule for symbol {}", Symbol(i as u8)))))
            .collect::<Result<Vec<_>>>()?;
        Substitution::new(rules)
    }
}

/// Points on cycles of `f` and the lcm of the cycle lengths.
fn periodic_points(f: &[usize]) -> (Vec<usize>, u32) {
    let mut on_cycle = Vec::new();
    let mut period = 1u64;
    for start in 0..f.len() {
        let mut x = start;
        for _ in 0..f.len() {
            x = f[x];
        }
        // x is now on a cycle; test whether start is
        let mut seen = HashSet::new();
        let mut y = x;
        while seen.insert(y) {
            y = f[y];
        }
        if seen.contains(&start) {
            on_cycle.push(start);
            period = lcm(period as u32, seen.len() as u32) as u64;
        }
    }
    (on_cycle, period as u32)
}

pub(crate) fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u32, b: u32) -> u32 {
    (a as u64 * b as u64 / gcd(a as u64, b as u64)) as u32
}

/// Largest divisor of `g` sharing no prime factor with `q`.
fn coprime_part(mut g: u64, q: u64) -> u64 {
    if g == 0 {
        return 0;
    }
    loop {
        let d = gcd(g, q);
        if d == 1 {
            return g;
        }
        g /= d;
    }
}
