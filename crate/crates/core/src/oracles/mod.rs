//! Finite-horizon witness searches for proximality, regional proximality,
//! m-sensitivity (plain and block), m-equicontinuity points, cover
//! m-equicontinuity and return sets.
//!
//! Open sets are cylinders on central words and points are admissible
//! windows, enumerated from a corpus long enough to contain every joint
//! configuration the horizon can see. Negative answers are never claimed
//! outright: an empty search reports `Exhausted` together with its budget.
//!
//! Scale conventions, with `ε = 2^{-K}` and the shift `g·x` read as
//! `(g·x)_n = x_{n+g}`:
//! - `d < ε`  ⇔ the windows agree on `[-K, K]` (proximality);
//! - `d >= ε` ⇔ they differ somewhere on `[-K, K]` (sensitivity);
//! - `d > ε`  ⇔ they differ on `[-(K-1), K-1]` (block sensitivity).

mod certificate;
mod proximal;
mod returns;
mod search;
mod sensitivity;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use certificate::{replay, replay_against, Certificate, SensitivityWitness, Witness, SCHEMA_VERSION};
pub use proximal::{aligned_pair, proximal_pair_exact, proximal_pair_search, regional_proximal_search, Proximity};
pub use returns::{max_gap, return_set};
pub use sensitivity::{
    block_m_sensitivity_test, cover_m_equicontinuity_test, m_equicontinuity_point_test, m_sensitivity_test,
    CoverVerdict, CylinderOutcome, PointVerdict, SensitivityReport,
};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SearchBudget {
    /// `L`: radius of the cylinder playing the role of the δ-neighbourhood.
    pub cylinder_radius: u64,
    /// `N`: shifts `|g| <= N` are searched.
    pub horizon: u64,
    /// `K`: `ε = 2^{-K}`.
    pub scale: u64,
    /// `B`: half-length of the blocks `[h-B, h+B]`.
    pub block: u64,
    /// `m`.
    pub arity: usize,
    /// Increasing cylinder radii for point tests.
    pub ladder: Vec<u64>,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            cylinder_radius: 2,
            horizon: 256,
            scale: 2,
            block: 8,
            arity: 2,
            ladder: vec![2, 4, 8],
        }
    }
}

impl SearchBudget {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("L", self.cylinder_radius),
            ("N", self.horizon),
            ("K", self.scale),
            ("B", self.block),
            ("m", self.arity as u64),
        ];
        for (name, v) in positive {
            if v == 0 {
                return Err(Error::Budget(format!("{name} must be positive")));
            }
        }
        if self.ladder.is_empty() || self.ladder[0] == 0 || self.ladder.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Budget("ladder must be positive and strictly increasing".into()));
        }
        Ok(())
    }

    pub fn with_arity(&self, m: usize) -> Self {
        SearchBudget {
            arity: m,
            ..self.clone()
        }
    }

    /// Applies `key=value` pairs separated by commas. Keys: `L N K B m`,
    /// and `ladder` as colon-separated radii.
    pub fn with_overrides(&self, spec: &str) -> Result<Self> {
        let mut b = self.clone();
        for part in spec.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Budget(format!("expected key=value, got {part:?}")))?;
            let num = |v: &str| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Budget(format!("bad value for {key}: {v:?}")))
            };
            match key.trim() {
                "L" => b.cylinder_radius = num(value)?,
                "N" => b.horizon = num(value)?,
                "K" => b.scale = num(value)?,
                "B" => b.block = num(value)?,
                "m" => b.arity = num(value)? as usize,
                "ladder" => b.ladder = value.split(':').map(num).collect::<Result<_>>()?,
                other => return Err(Error::Budget(format!("unknown budget key {other:?}"))),
            }
        }
        b.validate()?;
        Ok(b)
    }
}

impl fmt::Display for SearchBudget {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ladder: Vec<String> = self.ladder.iter().map(|w| w.to_string()).collect();
        write!(
            f,
            "L={},N={},K={},B={},m={},ladder={}",
            self.cylinder_radius,
            self.horizon,
            self.scale,
            self.block,
            self.arity,
            ladder.join(":")
        )
    }
}

impl FromStr for SearchBudget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SearchBudget::default().with_overrides(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Witnessed(Box<Certificate>),
    /// Only issued when an exact theory certifies the negative answer.
    Refuted { reason: String },
    Exhausted { budget: SearchBudget, note: Option<String> },
}

impl Verdict {
    pub fn is_witnessed(&self) -> bool {
        matches!(self, Verdict::Witnessed(_))
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Verdict::Witnessed(c) => Some(c),
            _ => None,
        }
    }

    pub fn class(&self) -> &'static str {
        match self {
            Verdict::Witnessed(_) => "Witnessed",
            Verdict::Refuted { .. } => "Refuted",
            Verdict::Exhausted { .. } => "Exhausted",
        }
    }
}
