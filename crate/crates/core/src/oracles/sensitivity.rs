use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::certificate::{Certificate, SensitivityWitness, Witness};
use super::search::{coverage_for, cylinders, point_cylinder, Cylinder};
use super::{SearchBudget, Verdict};
use crate::error::Result;
use crate::language::Subshift;
use crate::system::System;
use crate::words::{CenteredWord, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CylinderOutcome {
    pub cylinder: Word,
    pub witness: Option<SensitivityWitness>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityReport {
    pub per_cylinder: Vec<CylinderOutcome>,
    pub verdict: Verdict,
}

impl SensitivityReport {
    pub fn witness_free(&self) -> Vec<&Word> {
        self.per_cylinder
            .iter()
            .filter(|c| c.witness.is_none())
            .map(|c| &c.cylinder)
            .collect()
    }
}

fn per_cylinder(
    system: &System,
    budget: &SearchBudget,
    reach: u64,
    find: impl Fn(&Cylinder) -> Option<SensitivityWitness> + Sync,
) -> Result<Vec<CylinderOutcome>> {
    budget.validate()?;
    let corpus = system.corpus(coverage_for(budget.cylinder_radius, reach))?;
    let cyls = cylinders(&corpus, budget.cylinder_radius);
    Ok(cyls
        .into_par_iter()
        .map(|(word, sites)| {
            let c = Cylinder::new(&corpus, word.clone(), sites);
            CylinderOutcome {
                cylinder: Word(word),
                witness: find(&c),
            }
        })
        .collect())
}

fn aggregate(
    name: &str,
    system: &System,
    budget: &SearchBudget,
    outcomes: Vec<CylinderOutcome>,
    wrap: impl FnOnce(Vec<SensitivityWitness>) -> Witness,
) -> SensitivityReport {
    let verdict = if outcomes.iter().all(|o| o.witness.is_some()) {
        let tuples = outcomes.iter().map(|o| o.witness.clone().unwrap()).collect();
        Verdict::Witnessed(Box::new(Certificate::new(name, system, budget, wrap(tuples))))
    } else {
        let free: Vec<String> = outcomes
            .iter()
            .filter(|o| o.witness.is_none())
            .map(|o| o.cylinder.to_string())
            .collect();
        Verdict::Exhausted {
            budget: budget.clone(),
            note: Some(format!("{} of {} cylinders without witness: {}", free.len(), outcomes.len(), free.join(" "))),
        }
    };
    SensitivityReport {
        per_cylinder: outcomes,
        verdict,
    }
}

/// Every cylinder of radius `L` holds `m` points pairwise `ε`-apart at some
/// `|g| <= N`.
pub fn m_sensitivity_test(name: &str, system: &System, budget: &SearchBudget) -> Result<SensitivityReport> {
    let (m, k, n) = (budget.arity, budget.scale, budget.horizon);
    let outcomes = per_cylinder(system, budget, n + k, |c| c.plain_tuple(m, k, n))?;
    Ok(aggregate(name, system, budget, outcomes, |tuples| Witness::Sensitivity {
        arity: m,
        scale: k,
        tuples,
    }))
}

/// As [`m_sensitivity_test`], with the separation `> ε` held on a whole
/// block `[h-B, h+B]`, `|h| <= N`.
pub fn block_m_sensitivity_test(name: &str, system: &System, budget: &SearchBudget) -> Result<SensitivityReport> {
    let (m, k, b, n) = (budget.arity, budget.scale, budget.block, budget.horizon);
    let outcomes = per_cylinder(system, budget, n + b + k, |c| c.block_tuple(m, k, b, n))?;
    Ok(aggregate(name, system, budget, outcomes, |tuples| Witness::Block {
        arity: m,
        scale: k,
        tuples,
    }))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointVerdict {
    /// Every ladder cylinder of the point holds a separated m-tuple.
    CounterexampleFound(Box<Certificate>),
    /// The cylinder of this radius holds none within the budget.
    ConsistentUpTo { radius: u64, budget: SearchBudget },
}

impl PointVerdict {
    pub fn class(&self) -> &'static str {
        match self {
            PointVerdict::CounterexampleFound(_) => "CounterexampleFound",
            PointVerdict::ConsistentUpTo { .. } => "ConsistentUpTo",
        }
    }
}

fn ladder_corpus(system: &System, x: &CenteredWord, budget: &SearchBudget, reach: u64) -> Result<crate::language::Corpus> {
    budget.validate()?;
    let w_max = *budget.ladder.last().unwrap();
    if x.radius() < w_max {
        return Err(crate::error::Error::WindowTooSmall {
            need: w_max,
            have: x.radius(),
        });
    }
    system.corpus(coverage_for(w_max, reach))
}

/// Whether `x` fails to be an m-equicontinuity point at `ε = 2^{-K}` for
/// every `δ`-cylinder of the ladder.
pub fn m_equicontinuity_point_test(
    name: &str,
    system: &System,
    x: &CenteredWord,
    budget: &SearchBudget,
) -> Result<PointVerdict> {
    let (m, k, n) = (budget.arity, budget.scale, budget.horizon);
    let corpus = ladder_corpus(system, x, budget, n + k)?;
    let mut tuples = Vec::new();
    for &w in &budget.ladder {
        let c = point_cylinder(&corpus, x, w)?;
        match c.plain_tuple(m, k, n) {
            Some(t) => tuples.push(t),
            None => {
                return Ok(PointVerdict::ConsistentUpTo {
                    radius: w,
                    budget: budget.clone(),
                })
            }
        }
    }
    let point = x.truncate(*budget.ladder.last().unwrap()).unwrap();
    Ok(PointVerdict::CounterexampleFound(Box::new(Certificate::new(
        name,
        system,
        budget,
        Witness::PointCounterexample {
            arity: m,
            scale: k,
            point,
            tuples,
        },
    ))))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoverVerdict {
    /// In the cylinder of this radius, no m-tuple avoids `ε`-closeness on a
    /// block of half-length `block`: the return set has gaps `<= 2B+1`.
    Witnessed { radius: u64, block: u64 },
    /// Every ladder cylinder holds a tuple with a gap longer than `2B+1`.
    FalsifiedUpTo(Box<Certificate>),
    /// The horizon is too short to see a single block.
    Exhausted { budget: SearchBudget },
}

impl CoverVerdict {
    pub fn class(&self) -> &'static str {
        match self {
            CoverVerdict::Witnessed { .. } => "Witnessed",
            CoverVerdict::FalsifiedUpTo(_) => "FalsifiedUpTo",
            CoverVerdict::Exhausted { .. } => "Exhausted",
        }
    }
}

/// Syndeticity of the times at which some pair of an m-tuple near `x` is
/// within `ε`, uniformly over the tuples of a ladder cylinder.
pub fn cover_m_equicontinuity_test(
    name: &str,
    system: &System,
    x: &CenteredWord,
    budget: &SearchBudget,
) -> Result<CoverVerdict> {
    let (m, k, b_max, n) = (budget.arity, budget.scale, budget.block, budget.horizon);
    if 2 * b_max + 1 > 2 * n + 1 {
        return Ok(CoverVerdict::Exhausted { budget: budget.clone() });
    }
    let corpus = ladder_corpus(system, x, budget, n + b_max + k)?;
    let mut tuples = Vec::new();
    for &w in &budget.ladder {
        let c = point_cylinder(&corpus, x, w)?;
        // a gap of half-length b contains one of every smaller half-length
        for b in 0..=b_max {
            match c.block_tuple(m, k, b, n) {
                None => return Ok(CoverVerdict::Witnessed { radius: w, block: b }),
                Some(t) if b == b_max => tuples.push(t),
                Some(_) => {}
            }
        }
    }
    let point = x.truncate(*budget.ladder.last().unwrap()).unwrap();
    Ok(CoverVerdict::FalsifiedUpTo(Box::new(Certificate::new(
        name,
        system,
        budget,
        Witness::CoverGap {
            arity: m,
            scale: k,
            point,
            tuples,
        },
    ))))
}
