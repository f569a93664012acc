use serde::{Deserialize, Serialize};

use super::SearchBudget;
use crate::error::{Error, Result};
use crate::language::Subshift;
use crate::system::System;
use crate::words::{scale_of_difference, shift_window, Alphabet, CenteredWord, DistanceScale};

pub const SCHEMA_VERSION: u32 = 1;

/// An m-tuple of points sharing a cylinder, separated at a shift `g` or
/// over a whole block centered at `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensitivityWitness {
    pub cylinder: CenteredWord,
    pub points: Vec<CenteredWord>,
    /// The shift `g`, or the block center `h`.
    pub shift: i64,
    /// Block half-length; `None` for a single shift.
    pub block: Option<u64>,
    /// Pairwise scale at `g`, or the largest (closest) pairwise scale over
    /// the block.
    pub scales: Vec<Vec<DistanceScale>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Proximal {
        x: CenteredWord,
        y: CenteredWord,
        shift: i64,
        scale: u64,
    },
    RegionalProximal {
        originals: Vec<CenteredWord>,
        perturbed: Vec<CenteredWord>,
        shift: i64,
        scale: u64,
    },
    /// One tuple per cylinder of the given radius.
    Sensitivity {
        arity: usize,
        scale: u64,
        tuples: Vec<SensitivityWitness>,
    },
    Block {
        arity: usize,
        scale: u64,
        tuples: Vec<SensitivityWitness>,
    },
    /// One tuple per ladder radius, each inside the cylinder of `point`.
    PointCounterexample {
        arity: usize,
        scale: u64,
        point: CenteredWord,
        tuples: Vec<SensitivityWitness>,
    },
    /// Block tuples inside every ladder cylinder of `point`: gaps of the
    /// return set longer than `2B+1`.
    CoverGap {
        arity: usize,
        scale: u64,
        point: CenteredWord,
        tuples: Vec<SensitivityWitness>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: u32,
    pub system: String,
    pub system_hash: String,
    pub budget: SearchBudget,
    pub witness: Witness,
}

impl Certificate {
    pub(crate) fn new(name: &str, system: &System, budget: &SearchBudget, witness: Witness) -> Self {
        Certificate {
            schema: SCHEMA_VERSION,
            system: name.to_string(),
            system_hash: system.hash(),
            budget: budget.clone(),
            witness,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    fn points(&self) -> Vec<&CenteredWord> {
        match &self.witness {
            Witness::Proximal { x, y, .. } => vec![x, y],
            Witness::RegionalProximal { perturbed, .. } => perturbed.iter().collect(),
            Witness::Sensitivity { tuples, .. }
            | Witness::Block { tuples, .. }
            | Witness::PointCounterexample { tuples, .. }
            | Witness::CoverGap { tuples, .. } => tuples.iter().flat_map(|t| t.points.iter()).collect(),
        }
    }
}

/// Scale of `g·a` against `g·b`, looking only at `[-radius, radius]`.
/// `Beyond` means they agree there.
pub(crate) fn scale_at(a: &CenteredWord, b: &CenteredWord, g: i64, radius: u64) -> Option<DistanceScale> {
    let a = shift_window(a, g).ok()?.truncate(radius)?;
    let b = shift_window(b, g).ok()?.truncate(radius)?;
    let alphabet = Alphabet::new(36).ok()?;
    Some(scale_of_difference(&a, &b, alphabet).ok()?.scale)
}

fn reject(msg: impl Into<String>) -> Error {
    Error::Certificate(msg.into())
}

fn check_tuple(t: &SensitivityWitness, arity: usize, scale: u64, radius: u64) -> Result<()> {
    if t.points.len() != arity {
        return Err(reject(format!("tuple has {} points, expected {arity}", t.points.len())));
    }
    if t.cylinder.left() != -(radius as i64) || t.cylinder.right() != radius as i64 {
        return Err(reject(format!("cylinder {} is not centered of radius {radius}", t.cylinder)));
    }
    for x in &t.points {
        if x.slice(-(radius as i64), radius as i64) != Some(t.cylinder.symbols()) {
            return Err(reject(format!("point {x} leaves the cylinder {}", t.cylinder)));
        }
    }
    if t.scales.len() != arity || t.scales.iter().any(|row| row.len() != arity) {
        return Err(reject("scale matrix has the wrong shape"));
    }
    for i in 0..arity {
        for j in 0..arity {
            if i == j {
                continue;
            }
            let claimed = t.scales[i][j];
            let (a, b) = (&t.points[i], &t.points[j]);
            match t.block {
                None => {
                    let s = scale_at(a, b, t.shift, scale)
                        .ok_or_else(|| reject(format!("points too short for shift {}", t.shift)))?;
                    if !s.at_least(scale) || s != claimed {
                        return Err(reject(format!("pair ({i},{j}) at g={} has scale {s}, claimed {claimed}", t.shift)));
                    }
                }
                Some(half) => {
                    if scale == 0 {
                        return Err(reject("block separation needs K >= 1"));
                    }
                    let mut worst = DistanceScale::Finite(0);
                    for g in t.shift - half as i64..=t.shift + half as i64 {
                        let s = scale_at(a, b, g, scale - 1)
                            .ok_or_else(|| reject(format!("points too short for shift {g}")))?;
                        if !s.at_least(scale - 1) {
                            return Err(reject(format!("pair ({i},{j}) is within ε at g={g}")));
                        }
                        worst = worst.max(s);
                    }
                    if worst != claimed {
                        return Err(reject(format!("pair ({i},{j}) block scale {worst}, claimed {claimed}")));
                    }
                }
            }
        }
    }
    Ok(())
}

/// Re-checks the defining inequalities of a certificate with window
/// comparisons only.
pub fn replay(cert: &Certificate) -> Result<()> {
    if cert.schema != SCHEMA_VERSION {
        return Err(reject(format!("schema {} is not {SCHEMA_VERSION}", cert.schema)));
    }
    let b = &cert.budget;
    match &cert.witness {
        Witness::Proximal { x, y, shift, scale } => {
            if shift.unsigned_abs() > b.horizon {
                return Err(reject("shift beyond the horizon"));
            }
            match scale_at(x, y, *shift, *scale) {
                Some(DistanceScale::Beyond) => Ok(()),
                _ => Err(reject(format!("windows do not agree on [-{scale}, {scale}] at g={shift}"))),
            }
        }
        Witness::RegionalProximal {
            originals,
            perturbed,
            shift,
            scale,
        } => {
            if originals.len() != perturbed.len() || originals.is_empty() {
                return Err(reject("tuple sizes differ"));
            }
            let k = *scale as i64;
            for (x, y) in originals.iter().zip(perturbed) {
                if x.slice(-k, k).is_none() || x.slice(-k, k) != y.slice(-k, k) {
                    return Err(reject(format!("perturbed point {y} is not ε-close to {x}")));
                }
            }
            for i in 0..perturbed.len() {
                for j in i + 1..perturbed.len() {
                    if scale_at(&perturbed[i], &perturbed[j], *shift, *scale) != Some(DistanceScale::Beyond) {
                        return Err(reject(format!("pair ({i},{j}) not ε-close at g={shift}")));
                    }
                }
            }
            Ok(())
        }
        Witness::Sensitivity { arity, scale, tuples } => {
            if tuples.is_empty() {
                return Err(reject("no tuples"));
            }
            for t in tuples {
                if t.block.is_some() || t.shift.unsigned_abs() > b.horizon {
                    return Err(reject("shift beyond the horizon"));
                }
                check_tuple(t, *arity, *scale, b.cylinder_radius)?;
            }
            Ok(())
        }
        Witness::Block { arity, scale, tuples } => {
            for t in tuples {
                if t.block != Some(b.block) || t.shift.unsigned_abs() > b.horizon {
                    return Err(reject("block or center outside the budget"));
                }
                check_tuple(t, *arity, *scale, b.cylinder_radius)?;
            }
            if tuples.is_empty() {
                return Err(reject("no tuples"));
            }
            Ok(())
        }
        Witness::PointCounterexample {
            arity,
            scale,
            point,
            tuples,
        }
        | Witness::CoverGap {
            arity,
            scale,
            point,
            tuples,
        } => {
            let cover = matches!(cert.witness, Witness::CoverGap { .. });
            if tuples.len() != b.ladder.len() {
                return Err(reject("need one tuple per ladder radius"));
            }
            for (t, &w) in tuples.iter().zip(&b.ladder) {
                if t.shift.unsigned_abs() > b.horizon || t.block.is_some() != cover {
                    return Err(reject("tuple does not match the witness kind"));
                }
                if cover && t.block != Some(b.block) {
                    return Err(reject("cover gap must use the budget's block"));
                }
                let u = point
                    .truncate(w)
                    .ok_or_else(|| reject(format!("point too short for radius {w}")))?;
                if t.cylinder != u {
                    return Err(reject(format!("cylinder {} is not the point's radius-{w} window", t.cylinder)));
                }
                check_tuple(t, *arity, *scale, w)?;
            }
            Ok(())
        }
    }
}

/// [`replay`] plus: the certificate was issued for this system, and every
/// window in it is admissible.
pub fn replay_against(cert: &Certificate, system: &System) -> Result<()> {
    if cert.system_hash != system.hash() {
        return Err(reject(format!("certificate is for a different system than {}", cert.system)));
    }
    replay(cert)?;
    let points = cert.points();
    let longest = points.iter().map(|p| p.len()).max().unwrap_or(1);
    let corpus = system.corpus(longest)?;
    for p in points {
        if !corpus.contains(p.symbols()) {
            return Err(reject(format!("window {p} is not admissible")));
        }
    }
    Ok(())
}
