//! Enumeration of the points of a cylinder through corpus sites.

use std::collections::BTreeMap;

use super::certificate::{scale_at, SensitivityWitness};
use crate::error::Result;
use crate::language::{Corpus, Site};
use crate::words::{CenteredWord, DistanceScale, Symbol};

/// `0, -1, 1, -2, 2, ..` up to `|g| <= n`.
pub(crate) fn shifts(n: u64) -> impl Iterator<Item = i64> {
    let n = n as i64;
    std::iter::once(0).chain((1..=n).flat_map(|g| [-g, g]))
}

/// Corpus length needed to see the cylinder of radius `radius` together
/// with coordinates up to `reach` on either side.
pub(crate) fn coverage_for(radius: u64, reach: u64) -> usize {
    (radius + reach.max(radius) + 1) as usize
}

/// Sites of the central word `u` (odd length).
pub(crate) struct Cylinder<'a> {
    pub corpus: &'a Corpus,
    pub word: Vec<Symbol>,
    pub radius: u64,
    pub sites: Vec<Site>,
}

impl<'a> Cylinder<'a> {
    pub fn new(corpus: &'a Corpus, word: Vec<Symbol>, sites: Vec<Site>) -> Self {
        let radius = (word.len() / 2) as u64;
        Cylinder {
            corpus,
            word,
            radius,
            sites,
        }
    }

    pub fn centered(&self) -> CenteredWord {
        CenteredWord::new(self.word.clone(), -(self.radius as i64)).expect("odd central word")
    }

    fn span(&self, lo: i64, hi: i64) -> (i64, i64) {
        (lo.min(-(self.radius as i64)), hi.max(self.radius as i64))
    }

    /// Distinct contents of `[lo, hi]` over the cylinder's points, each with
    /// the first site realizing it.
    pub fn windows(&self, lo: i64, hi: i64) -> BTreeMap<&'a [Symbol], Site> {
        let (a, b) = self.span(lo, hi);
        let mut out = BTreeMap::new();
        for &site in &self.sites {
            if self.corpus.around(site, a, b).is_none() {
                continue;
            }
            if let Some(w) = self.corpus.around(site, lo, hi) {
                out.entry(w).or_insert(site);
            }
        }
        out
    }

    /// The point at `site`, cut to the window covering the cylinder and `[lo, hi]`.
    pub fn point(&self, site: Site, lo: i64, hi: i64) -> CenteredWord {
        let (a, b) = self.span(lo, hi);
        let w = self.corpus.around(site, a, b).expect("site checked by windows()");
        CenteredWord::new(w.to_vec(), a).expect("span contains the origin")
    }

    /// First `m` distinct windows at radius `k` around `g`, scanning shifts
    /// in order: pairwise distance `>= 2^{-k}` at `g`.
    pub fn plain_tuple(&self, m: usize, k: u64, horizon: u64) -> Option<SensitivityWitness> {
        let k = k as i64;
        for g in shifts(horizon) {
            let w = self.windows(g - k, g + k);
            if w.len() < m {
                continue;
            }
            let points: Vec<CenteredWord> = w.values().take(m).map(|&s| self.point(s, g - k, g + k)).collect();
            let scales = matrix(&points, |a, b| scale_at(a, b, g, k as u64).expect("window covers the shift"));
            return Some(SensitivityWitness {
                cylinder: self.centered(),
                points,
                shift: g,
                block: None,
                scales,
            });
        }
        None
    }

    /// `m` points pairwise at distance `> 2^{-k}` for every shift in
    /// `[h-b, h+b]`, first center `h` in scan order, lexicographically first
    /// tuple.
    pub fn block_tuple(&self, m: usize, k: u64, b: u64, horizon: u64) -> Option<SensitivityWitness> {
        if k == 0 {
            return None;
        }
        let (k, b) = (k as i64 - 1, b as i64);
        for h in shifts(horizon) {
            let (lo, hi) = (h - b - k, h + b + k);
            let w = self.windows(lo, hi);
            if w.len() < m {
                continue;
            }
            let keys: Vec<&[Symbol]> = w.keys().copied().collect();
            let separated = |x: &[Symbol], y: &[Symbol]| {
                // relative coordinate of g - k is g - k - lo
                (0..=2 * b).all(|t| (t..=t + 2 * k).any(|p| x[p as usize] != y[p as usize]))
            };
            let mut compat = vec![vec![false; keys.len()]; keys.len()];
            for i in 0..keys.len() {
                for j in i + 1..keys.len() {
                    let ok = separated(keys[i], keys[j]);
                    compat[i][j] = ok;
                    compat[j][i] = ok;
                }
            }
            let Some(clique) = first_clique(&compat, m) else {
                continue;
            };
            let points: Vec<CenteredWord> = clique.iter().map(|&i| self.point(w[keys[i]], lo, hi)).collect();
            let scales = matrix(&points, |x, y| {
                (h - b..=h + b)
                    .map(|g| scale_at(x, y, g, k as u64).expect("window covers the block"))
                    .max()
                    .expect("nonempty block")
            });
            return Some(SensitivityWitness {
                cylinder: self.centered(),
                points,
                shift: h,
                block: Some(b as u64),
                scales,
            });
        }
        None
    }
}

fn matrix(points: &[CenteredWord], f: impl Fn(&CenteredWord, &CenteredWord) -> DistanceScale) -> Vec<Vec<DistanceScale>> {
    (0..points.len())
        .map(|i| {
            (0..points.len())
                .map(|j| if i == j { DistanceScale::Beyond } else { f(&points[i], &points[j]) })
                .collect()
        })
        .collect()
}

/// Lexicographically first `m`-clique.
fn first_clique(compat: &[Vec<bool>], m: usize) -> Option<Vec<usize>> {
    fn go(compat: &[Vec<bool>], m: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
        if chosen.len() == m {
            return true;
        }
        for v in start..compat.len() {
            if compat.len() - v < m - chosen.len() {
                return false;
            }
            if chosen.iter().all(|&c| compat[c][v]) {
                chosen.push(v);
                if go(compat, m, v + 1, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    go(compat, m, 0, &mut chosen).then_some(chosen)
}

/// Cylinders of radius `radius` in the corpus, in word order.
pub(crate) fn cylinders(corpus: &Corpus, radius: u64) -> Vec<(Vec<Symbol>, Vec<Site>)> {
    let idx = corpus.centered_index(radius as usize);
    let mut v: Vec<_> = idx.into_iter().collect();
    v.sort();
    v
}

pub(crate) fn point_cylinder<'a>(corpus: &'a Corpus, x: &CenteredWord, w: u64) -> Result<Cylinder<'a>> {
    let u = x
        .truncate(w)
        .ok_or(crate::error::Error::WindowTooSmall { need: w, have: x.radius() })?;
    let sites = corpus.sites_of(u.symbols());
    if sites.is_empty() {
        return Err(crate::error::Error::Inadmissible(u.to_string()));
    }
    Ok(Cylinder::new(corpus, u.symbols().to_vec(), sites))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shift_order() {
        assert_eq!(shifts(2).collect::<Vec<_>>(), vec![0, -1, 1, -2, 2]);
    }

    #[test]
    fn cliques() {
        let t = true;
        let f = false;
        let c = vec![vec![f, t, f, t], vec![t, f, t, t], vec![f, t, f, t], vec![t, t, t, f]];
        assert_eq!(first_clique(&c, 3), Some(vec![0, 1, 3]));
        assert_eq!(first_clique(&c, 4), None);
    }
}
