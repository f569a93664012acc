use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, Witness};
use super::search::{coverage_for, point_cylinder, shifts};
use super::{SearchBudget, Verdict};
use crate::error::{Error, Result};
use crate::language::Subshift;
use crate::odometer::{require_exact_or_trivial, residue_of_window};
use crate::substitution::Substitution;
use crate::system::System;
use crate::words::{CenteredWord, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Proximity {
    Proximal,
    Distal,
}

/// Pair graph: `(a, b) → (θ(a)_i, θ(b)_i)`; proximal iff a diagonal pair is
/// reachable.
pub fn proximal_pair_exact(s: &Substitution, a: Symbol, b: Symbol) -> Result<Proximity> {
    require_exact_or_trivial(s)?;
    s.alphabet().check(&[a, b])?;
    let mut seen = BTreeSet::from([(a, b)]);
    let mut todo = VecDeque::from([(a, b)]);
    while let Some((x, y)) = todo.pop_front() {
        if x == y {
            return Ok(Proximity::Proximal);
        }
        for (&u, &v) in s.image(x).iter().zip(s.image(y)) {
            if seen.insert((u, v)) {
                todo.push_back((u, v));
            }
        }
    }
    Ok(Proximity::Distal)
}

/// `θ^k(c).θ^k(a)` and `θ^k(d).θ^k(b)` with `ca`, `db` admissible: two
/// points with the same cut digits down to depth `k`. The left letters are
/// chosen to form a distal pair when one exists, so a distal `(a, b)` gives
/// a pair that never comes close.
pub fn aligned_pair(s: &Substitution, a: Symbol, b: Symbol, k: u32) -> Result<(CenteredWord, CenteredWord)> {
    let two = s.two_letter_words();
    let left_of = |x: Symbol| -> Vec<Symbol> { two.iter().filter(|(_, r)| *r == x).map(|(l, _)| *l).collect() };
    let (ls, rs) = (left_of(a), left_of(b));
    let mut best = None;
    for &c in &ls {
        for &d in &rs {
            let distal = c != d && proximal_pair_exact(s, c, d)? == Proximity::Distal;
            if best.is_none() || (distal && !best.is_some_and(|(_, _, bd)| bd)) {
                best = Some((c, d, distal));
            }
        }
    }
    let (c, d, _) = best.ok_or_else(|| Error::Inadmissible(format!("no left extension of {a} or {b}")))?;
    let window = |l: Symbol, r: Symbol| {
        let left = s.apply_power(&[l], k);
        let mut w = left.clone();
        w.extend(s.apply_power(&[r], k));
        CenteredWord::new(w, -(left.len() as i64))
    };
    Ok((window(c, a)?, window(d, b)?))
}

/// A shift `|g| <= N` at which the windows agree on `[-K, K]`.
pub fn proximal_pair_search(
    name: &str,
    system: &System,
    x: &CenteredWord,
    y: &CenteredWord,
    budget: &SearchBudget,
) -> Result<Verdict> {
    budget.validate()?;
    let (n, k) = (budget.horizon as i64, budget.scale as i64);
    for w in [x, y] {
        w.check_alphabet(system.alphabet())?;
        if w.left() > -(n + k) || w.right() < n + k {
            return Err(Error::WindowTooSmall {
                need: (n + k) as u64,
                have: w.radius(),
            });
        }
    }
    for g in shifts(budget.horizon) {
        if x.slice(g - k, g + k) == y.slice(g - k, g + k) {
            return Ok(Verdict::Witnessed(Box::new(Certificate::new(
                name,
                system,
                budget,
                Witness::Proximal {
                    x: x.clone(),
                    y: y.clone(),
                    shift: g,
                    scale: k as u64,
                },
            ))));
        }
    }
    Ok(Verdict::Exhausted {
        budget: budget.clone(),
        note: None,
    })
}

/// Admissible `x'_i`, each agreeing with `x_i` on `[-K, K]`, and one
/// `|g| <= N` bringing all of them within `ε` of each other.
pub fn regional_proximal_search(
    name: &str,
    system: &System,
    tuple: &[CenteredWord],
    budget: &SearchBudget,
) -> Result<Verdict> {
    budget.validate()?;
    let (n, k) = (budget.horizon, budget.scale);
    let longest = tuple.iter().map(|x| x.len()).max().unwrap_or(0);
    let corpus = system.corpus(coverage_for(k, n + k).max(longest))?;
    for x in tuple {
        if !corpus.contains(x.symbols()) {
            return Err(Error::Inadmissible(x.to_string()));
        }
    }
    let cyls = tuple
        .iter()
        .map(|x| point_cylinder(&corpus, x, k))
        .collect::<Result<Vec<_>>>()?;
    let k = k as i64;
    for g in shifts(n) {
        let windows: Vec<_> = cyls.iter().map(|c| c.windows(g - k, g + k)).collect();
        let common = windows[0]
            .keys()
            .find(|w| windows[1..].iter().all(|other| other.contains_key(*w)));
        if let Some(w) = common {
            let perturbed = cyls
                .iter()
                .zip(&windows)
                .map(|(c, ws)| c.point(ws[w], g - k, g + k))
                .collect();
            return Ok(Verdict::Witnessed(Box::new(Certificate::new(
                name,
                system,
                budget,
                Witness::RegionalProximal {
                    originals: tuple.to_vec(),
                    perturbed,
                    shift: g,
                    scale: k as u64,
                },
            ))));
        }
    }
    Ok(Verdict::Exhausted {
        budget: budget.clone(),
        note: residue_mismatch(system, tuple),
    })
}

/// Points over different odometer points are never regionally proximal;
/// say so when the depth-2 residues already disagree.
fn residue_mismatch(system: &System, tuple: &[CenteredWord]) -> Option<String> {
    let s = system.as_substitution()?;
    let residues: Vec<BTreeSet<_>> = tuple.iter().map(|x| residue_of_window(s, x, 2).ok()).collect::<Option<_>>()?;
    for i in 0..residues.len() {
        for j in i + 1..residues.len() {
            if residues[i].is_disjoint(&residues[j]) {
                let show = |r: &BTreeSet<_>| r.iter().map(|x: &crate::odometer::OdometerResidue| x.value.to_string()).collect::<Vec<_>>().join("|");
                return Some(format!(
                    "residue mismatch: points {i} and {j} lie over residues {} and {} mod {}",
                    show(&residues[i]),
                    show(&residues[j]),
                    residues[i].iter().next().map_or(0, |r| r.modulus())
                ));
            }
        }
    }
    None
}
