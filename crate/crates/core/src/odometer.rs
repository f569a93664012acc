//! The `q`-adic odometer as maximal equicontinuous factor of a
//! constant-length substitution subshift.
//!
//! Digit conventions: a residue `j mod q^k` has digits `d_1 .. d_k` with
//! `j = Σ d_i q^{i-1}`; `d_i` is the position of the origin inside its
//! level-`i` block relative to the level-`(i-1)` blocks.
//!
//! A finite residue names an odometer point by periodic extension of its
//! digit block (`d_{i+k} = d_i`). Residue 0 and residue `q^k - 1` extend to
//! the integers 0 and -1, i.e. the orbit of the seed points; a block that is
//! not constant extends to a point outside ℤ.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::Subshift;
use crate::substitution::Substitution;
use crate::words::{CenteredWord, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OdometerResidue {
    pub q: u64,
    pub depth: u32,
    pub value: u64,
}

impl OdometerResidue {
    pub fn new(q: u64, depth: u32, value: u64) -> Result<Self> {
        if q < 2 {
            return Err(Error::Hypotheses(format!("odometer base {q} < 2")));
        }
        let m = modulus(q, depth)?;
        if value >= m {
            return Err(Error::CutOutOfRange { cut: value, bound: m });
        }
        Ok(OdometerResidue { q, depth, value })
    }

    pub fn modulus(&self) -> u64 {
        self.q.pow(self.depth)
    }

    /// `d_1 .. d_depth`, least significant first.
    pub fn digits(&self) -> Vec<u64> {
        let mut v = self.value;
        (0..self.depth)
            .map(|_| {
                let d = v % self.q;
                v /= self.q;
                d
            })
            .collect()
    }

    pub fn from_digits(q: u64, digits: &[u64]) -> Result<Self> {
        let value = digits.iter().rev().fold(0u64, |acc, &d| acc * q + d);
        Self::new(q, digits.len() as u32, value)
    }

    /// The odometer rotation: `j + 1 mod q^k`.
    pub fn successor(&self) -> OdometerResidue {
        OdometerResidue {
            value: (self.value + 1) % self.modulus(),
            ..*self
        }
    }

    /// Digit `d_i` (1-based) of the periodic extension.
    pub fn extended_digit(&self, i: usize) -> u64 {
        if self.depth == 0 {
            return 0;
        }
        let d = self.digits();
        d[(i - 1) % d.len()]
    }

    /// Whether the periodic extension is an integer (constant digit block of
    /// 0 or `q - 1`).
    pub fn extends_to_orbit_of_zero(&self) -> bool {
        let d = self.digits();
        d.iter().all(|&x| x == 0) || d.iter().all(|&x| x == self.q - 1)
    }
}

impl std::fmt::Display for OdometerResidue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} mod {}^{}", self.value, self.q, self.depth)
    }
}

fn modulus(q: u64, depth: u32) -> Result<u64> {
    q.checked_pow(depth)
        .ok_or_else(|| Error::Hypotheses(format!("{q}^{depth} overflows")))
}

/// Columns of `θ^k`: column `i` is `{θ^k(a)_i : a}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnStructure {
    pub depth: u32,
    pub columns: Vec<BTreeSet<Symbol>>,
}

pub fn column_sets(s: &Substitution, k: u32) -> Result<ColumnStructure> {
    s.require_constant_length()?;
    if k == 0 {
        return Err(Error::Hypotheses("column depth must be >= 1".into()));
    }
    let images: Vec<Vec<Symbol>> = s.alphabet().symbols().map(|a| s.apply_power(&[a], k)).collect();
    let len = images[0].len();
    let columns = (0..len)
        .map(|i| images.iter().map(|img| img[i]).collect())
        .collect();
    Ok(ColumnStructure { depth: k, columns })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnNumber {
    pub c: usize,
    pub depth_witness: u32,
    pub stabilized: bool,
}

/// Minimum column cardinality of `θ^k` over `1 <= k <= k_max`.
pub fn column_number(s: &Substitution, k_max: u32) -> Result<ColumnNumber> {
    require_exact_or_trivial(s)?;
    let q = s.require_constant_length()?;
    // only the distinct column sets matter: columns of θ^{k+1} are θ_i(C)
    let mut cols: BTreeSet<BTreeSet<Symbol>> = column_sets(s, 1)?.columns.into_iter().collect();
    let mut best = usize::MAX;
    let mut witness = 1;
    let mut history = Vec::new();
    for k in 1..=k_max.max(1) {
        let m = cols.iter().map(|c| c.len()).min().unwrap_or(0);
        if m < best {
            best = m;
            witness = k;
        }
        history.push(best);
        cols = cols
            .iter()
            .flat_map(|c| {
                (0..q).map(move |i| c.iter().map(|&a| s.image(a)[i]).collect::<BTreeSet<_>>())
            })
            .collect();
    }
    let n = history.len();
    let stabilized = n >= 2 && history[n - 1] == history[n - 2];
    Ok(ColumnNumber {
        c: best,
        depth_witness: witness,
        stabilized,
    })
}

pub(crate) fn require_exact_or_trivial(s: &Substitution) -> Result<()> {
    let regime = s.regime();
    if regime.is_exact() || (regime.trivial && s.constant_length().is_some_and(|q| q >= 2)) {
        Ok(())
    } else {
        Err(Error::Hypotheses(regime.describe_failure()))
    }
}

/// All `(cut, v)` with `expand(v, k, cut)` agreeing with `w` on its window
/// and `v` admissible.
pub fn desubstitute(s: &Substitution, w: &CenteredWord, k: u32) -> Result<Vec<(u64, CenteredWord)>> {
    let q = s.require_constant_length()? as u64;
    s.require_primitive()?;
    w.check_alphabet(s.alphabet())?;
    if k == 0 {
        return Ok(vec![(0, w.clone())]);
    }
    let block = modulus(q, k)?;
    let images: Vec<Vec<Symbol>> = s.alphabet().symbols().map(|a| s.apply_power(&[a], k)).collect();
    let (l, r) = (w.left(), w.right());
    let max_len = ((r - l) as u64 / block + 2) as usize;
    let corpus = s.corpus(max_len)?;
    let mut out = Vec::new();
    for cut in 0..block {
        let lo = (l + cut as i64).div_euclid(block as i64);
        let hi = (r + cut as i64).div_euclid(block as i64);
        let m = (hi - lo + 1) as usize;
        'cand: for v in corpus.factors(m) {
            for n in l..=r {
                let pos = n + cut as i64 - lo * block as i64;
                let letter = v.as_slice()[(pos / block as i64) as usize];
                if images[letter.index()][(pos % block as i64) as usize] != w.at(n).unwrap() {
                    continue 'cand;
                }
            }
            out.push((cut, CenteredWord::new(v.0, lo)?));
        }
    }
    Ok(out)
}

/// Residues `j mod q^k` of the origin consistent with `w`; empty means `w`
/// is inadmissible.
pub fn residue_of_window(s: &Substitution, w: &CenteredWord, k: u32) -> Result<BTreeSet<OdometerResidue>> {
    let q = s.require_constant_length()? as u64;
    desubstitute(s, w, k)?
        .into_iter()
        .map(|(cut, _)| OdometerResidue::new(q.max(2), k, cut))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberCensus {
    pub residue: OdometerResidue,
    pub radius: u64,
    /// Level of the supertiles actually enumerated (`q^level > radius`).
    pub level: u32,
    pub classes: Vec<CenteredWord>,
}

impl FiberCensus {
    pub fn count(&self) -> usize {
        self.classes.len()
    }

    /// `{q, depth, residue, radius, count, representatives}`.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "q": self.residue.q,
            "depth": self.residue.depth,
            "residue": self.residue.value,
            "radius": self.radius,
            "count": self.count(),
            "representatives": self.classes.iter().map(|c| c.word().to_string()).collect::<Vec<_>>(),
        })
    }
}

/// Distinct radius-`L` windows of the points over the odometer point named
/// by `r` (periodic digit extension).
///
/// Admissible level-`K` triples around the origin's supertile are pushed down
/// from arbitrarily high levels through the column maps of the extended
/// digits until the set stops shrinking, so the count is exact in the depth
/// direction for the given radius.
pub fn fiber_census(s: &Substitution, r: OdometerResidue, radius: u64) -> Result<FiberCensus> {
    require_exact_or_trivial(s)?;
    fiber_census_unchecked(s, r, radius)
}

/// `fiber_census` for callers that already checked the regime, which costs
/// more than the census itself.
pub(crate) fn fiber_census_unchecked(s: &Substitution, r: OdometerResidue, radius: u64) -> Result<FiberCensus> {
    let q = s.require_constant_length()? as u64;
    if r.q != q {
        return Err(Error::Hypotheses(format!("residue base {} but substitution length {q}", r.q)));
    }
    let mut level = 0u32;
    while q.pow(level) < radius + 1 {
        level += 1;
    }
    let level = level.max(1);
    let block = q.pow(level);
    let period = (r.depth as usize).max(1);
    let corpus = s.corpus(3)?;
    let mut triples: BTreeSet<[Symbol; 3]> = corpus
        .factors(3)
        .into_iter()
        .map(|w| [w.0[0], w.0[1], w.0[2]])
        .collect();
    // one period of digits above `level`, applied top-down
    let digits: Vec<usize> = (level as usize + 1..=level as usize + period)
        .map(|i| r.extended_digit(i) as usize)
        .collect();
    loop {
        let mut next = triples.clone();
        for &d in digits.iter().rev() {
            next = next.iter().map(|t| descend(s, t, d, q as usize)).collect();
        }
        if next == triples {
            break;
        }
        triples = next;
    }
    let cut: u64 = (1..=level as usize)
        .map(|i| r.extended_digit(i) * q.pow(i as u32 - 1))
        .sum();
    let origin = (block + cut) as usize;
    let rad = radius as usize;
    let classes: BTreeSet<CenteredWord> = triples
        .iter()
        .map(|t| {
            let img = s.apply_power(t, level);
            CenteredWord::new(img[origin - rad..=origin + rad].to_vec(), -(radius as i64))
        })
        .collect::<Result<_>>()?;
    Ok(FiberCensus {
        residue: r,
        radius,
        level,
        classes: classes.into_iter().collect(),
    })
}

/// Level-`j` triple around the origin's block from the level-`(j+1)` triple,
/// given the digit `d` of the origin at level `j+1`.
fn descend(s: &Substitution, t: &[Symbol; 3], d: usize, q: usize) -> [Symbol; 3] {
    let mid = s.image(t[1]);
    let left = if d > 0 { mid[d - 1] } else { s.image(t[0])[q - 1] };
    let right = if d + 1 < q { mid[d + 1] } else { s.image(t[2])[0] };
    [left, mid[d], right]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::words::Word;

    fn tm() -> Substitution {
        Substitution::from_images(&["01", "10"]).unwrap()
    }

    fn pd() -> Substitution {
        Substitution::from_images(&["01", "00"]).unwrap()
    }

    fn trivial() -> Substitution {
        Substitution::from_images(&["00"]).unwrap()
    }

    fn set(xs: &[&[u8]]) -> Vec<BTreeSet<Symbol>> {
        xs.iter().map(|c| c.iter().map(|&x| Symbol(x)).collect()).collect()
    }

    fn cw(s: &str, left: i64) -> CenteredWord {
        CenteredWord::new(s.parse::<Word>().unwrap().0, left).unwrap()
    }

    #[test]
    fn columns() {
        assert_eq!(column_sets(&tm(), 1).unwrap().columns, set(&[&[0, 1], &[0, 1]]));
        assert_eq!(column_sets(&pd(), 1).unwrap().columns, set(&[&[0], &[0, 1]]));
        assert!(column_sets(&trivial(), 3).unwrap().columns.iter().all(|c| c.len() == 1));
        let chacon = Substitution::from_images(&["0010", "1"]).unwrap();
        assert!(matches!(column_sets(&chacon, 1), Err(Error::NotConstantLength)));
    }

    #[test]
    fn column_numbers() {
        let tm = column_number(&tm(), 6).unwrap();
        assert_eq!((tm.c, tm.stabilized), (2, true));
        let pd = column_number(&pd(), 6).unwrap();
        assert_eq!((pd.c, pd.depth_witness, pd.stabilized), (1, 1, true));
        assert_eq!(column_number(&trivial(), 4).unwrap().c, 1);
        let id = Substitution::from_images(&["0", "1"]).unwrap();
        assert!(column_number(&id, 3).is_err());
    }

    #[test]
    fn desubstitution_examples() {
        let s = tm();
        let w = cw("0110", 0);
        let pre = desubstitute(&s, &w, 2).unwrap();
        assert!(pre.contains(&(0, cw("0", 0))));
        assert_eq!(desubstitute(&s, &w, 0).unwrap(), vec![(0, w)]);
        // brute force over both cuts: θ(1) = 00 at cut 0, and θ(1)θ(0) = 00|01 at cut 1
        let cuts: BTreeSet<u64> = desubstitute(&pd(), &cw("00", 0), 1).unwrap().into_iter().map(|x| x.0).collect();
        assert_eq!(cuts, BTreeSet::from([0, 1]));
    }

    #[test]
    fn residues() {
        let s = tm();
        let w = cw("0110", 0);
        assert_eq!(
            residue_of_window(&s, &w, 0).unwrap(),
            BTreeSet::from([OdometerResidue::new(2, 0, 0).unwrap()])
        );
        let seed = s.seed_pairs().unwrap()[0];
        let big = s.seed_window(seed, 3).unwrap().truncate(32).unwrap();
        let res = residue_of_window(&s, &big, 3).unwrap();
        assert_eq!(res.len(), 1);
        assert!(residue_of_window(&s, &cw("000", -1), 1).unwrap().is_empty());
    }

    #[test]
    fn successor_wraps_and_carries() {
        let r = OdometerResidue::new(2, 3, 7).unwrap();
        assert_eq!(r.successor().value, 0);
        assert_eq!(OdometerResidue::new(2, 3, 3).unwrap().successor().value, 4);
    }

    #[test]
    fn residue_is_shift_equivariant() {
        let s = tm();
        let seed = s.seed_pairs().unwrap()[1];
        let x = s.seed_window(seed, 4).unwrap();
        // move to a generic position first
        let w = crate::words::shift_window(&x, 37).unwrap().truncate(64).unwrap();
        let r = residue_of_window(&s, &w, 3).unwrap();
        assert_eq!(r.len(), 1);
        let shifted = crate::words::shift_window(&x, 38).unwrap().truncate(64).unwrap();
        let r1 = residue_of_window(&s, &shifted, 3).unwrap();
        assert_eq!(r1, BTreeSet::from([r.first().unwrap().successor()]));
    }

    #[test]
    fn thue_morse_censuses() {
        let s = tm();
        let zero = OdometerResidue::new(2, 3, 0).unwrap();
        assert_eq!(fiber_census(&s, zero, 64).unwrap().count(), 4);
        let five = OdometerResidue::new(2, 3, 5).unwrap();
        assert_eq!(fiber_census(&s, five, 64).unwrap().count(), 2);
        let all_ones = OdometerResidue::new(2, 3, 7).unwrap();
        assert_eq!(fiber_census(&s, all_ones, 64).unwrap().count(), 4);
        let t = fiber_census(&trivial(), OdometerResidue::new(2, 2, 1).unwrap(), 16).unwrap();
        assert_eq!(t.count(), 1);
    }

    #[test]
    fn census_json_shape() {
        let c = fiber_census(&tm(), OdometerResidue::new(2, 1, 0).unwrap(), 2).unwrap();
        let j = c.to_json();
        assert_eq!(j["count"], 4);
        assert_eq!(j["q"], 2);
        assert_eq!(j["representatives"].as_array().unwrap().len(), 4);
    }

    #[test]
    fn census_classes_refine_with_radius() {
        for s in [tm(), pd()] {
            for v in 0..8 {
                let r = OdometerResidue::new(2, 3, v).unwrap();
                for l in [1u64, 3, 7, 15] {
                    let small = fiber_census(&s, r, l).unwrap();
                    let big = fiber_census(&s, r, l + 1).unwrap();
                    assert!(big.count() >= small.count());
                    let images: BTreeSet<CenteredWord> = big.classes.iter().map(|c| c.truncate(l).unwrap()).collect();
                    assert_eq!(images.into_iter().collect::<Vec<_>>(), small.classes);
                }
            }
        }
    }
}
