use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::language::Subshift;
use crate::system::System;
use crate::words::Word;

/// `N(U, V) = {g : U ∩ gV ≠ ∅}` for the cylinders `U = [u]` and `V = [v]`
/// (both words placed at coordinate 0), restricted to `|g| <= N`.
///
/// With `(g·x)_n = x_{n+g}`, `x ∈ gV` means `x` carries `v` at `-g`.
pub fn return_set(system: &System, u: &Word, v: &Word, horizon: u64) -> Result<BTreeSet<i64>> {
    let n = horizon as i64;
    let corpus = system.corpus(2 * horizon as usize + u.len() + v.len())?;
    for w in [u, v] {
        if w.is_empty() || !corpus.contains(w.as_slice()) {
            return Err(Error::Inadmissible(w.to_string()));
        }
    }
    let mut out = BTreeSet::new();
    for s in corpus.strings() {
        if s.len() < u.len() {
            continue;
        }
        for p in 0..=s.len() - u.len() {
            if s[p..p + u.len()] != *u.as_slice() {
                continue;
            }
            for g in -n..=n {
                let at = p as i64 - g;
                if at >= 0 && at as usize + v.len() <= s.len() && s[at as usize..at as usize + v.len()] == *v.as_slice() {
                    out.insert(g);
                }
            }
        }
    }
    Ok(out)
}

/// Longest run of consecutive integers in `[-N, N]` missing from `set`.
pub fn max_gap(set: &BTreeSet<i64>, horizon: u64) -> u64 {
    let n = horizon as i64;
    let mut best = 0;
    let mut run = 0;
    for g in -n..=n {
        if set.contains(&g) {
            run = 0;
        } else {
            run += 1;
            best = best.max(run);
        }
    }
    best
}
