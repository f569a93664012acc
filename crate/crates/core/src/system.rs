//! The concrete systems the oracles and rank estimators run on.

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::factor::SlidingBlockFactor;
use crate::language::{Corpus, Subshift};
use crate::odometer::{fiber_census, fiber_census_unchecked, require_exact_or_trivial, FiberCensus, OdometerResidue};
use crate::substitution::Substitution;
use crate::toeplitz::ToeplitzSkeleton;
use crate::words::{Alphabet, CenteredWord, Symbol};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum System {
    Substitution(Substitution),
    Toeplitz(ToeplitzSkeleton),
    Factor(SlidingBlockFactor),
}

impl System {
    pub fn as_substitution(&self) -> Option<&Substitution> {
        match self {
            System::Substitution(s) => Some(s),
            _ => None,
        }
    }

    /// Base of the odometer factor, when the system has a known one.
    pub fn odometer_base(&self) -> Option<u64> {
        match self {
            System::Substitution(s) => s.constant_length().map(|q| q as u64),
            System::Toeplitz(t) => Some(t.ratio() as u64),
            System::Factor(_) => None,
        }
    }

    /// Fiber over the odometer point named by `r`.
    pub fn census(&self, r: OdometerResidue, radius: u64) -> Result<FiberCensus> {
        match self {
            System::Substitution(s) => fiber_census(s, r, radius),
            _ => self.census_prechecked(r, radius),
        }
    }

    /// Hypotheses checked once up front; see `check_census`.
    pub(crate) fn census_prechecked(&self, r: OdometerResidue, radius: u64) -> Result<FiberCensus> {
        match self {
            System::Substitution(s) => fiber_census_unchecked(s, r, radius),
            System::Toeplitz(t) => Ok(FiberCensus {
                residue: r,
                radius,
                level: 0,
                classes: t.fiber_census(r, radius)?,
            }),
            System::Factor(_) => Err(Error::Hypotheses("no odometer structure known for a sliding-block factor".into())),
        }
    }

    pub(crate) fn check_census(&self) -> Result<()> {
        match self {
            System::Substitution(s) => require_exact_or_trivial(s),
            _ => Ok(()),
        }
    }

    /// Hex SHA-256 of the canonical description.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.describe().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// A window of radius at least `radius` around a seed point `b.a` of a
    /// substitution (the first seed when `seed` is `None`), or around some
    /// point for other systems.
    pub fn seed_point(&self, seed: Option<(Symbol, Symbol)>, radius: u64) -> Result<CenteredWord> {
        let System::Substitution(s) = self else {
            return match seed {
                None => self.sample_point(radius),
                Some(_) => Err(Error::Hypotheses("seed points need a substitution".into())),
            };
        };
        let seeds = s.seed_pairs()?;
        let seed = match seed {
            None => seeds[0],
            Some((b, a)) => *seeds
                .iter()
                .find(|p| p.left == b && p.right == a)
                .ok_or_else(|| Error::Inadmissible(format!("{b}.{a} is not a seed")))?,
        };
        for k in 1..=64 {
            let w = s.seed_window(seed, k)?;
            if w.left() <= -(radius as i64) && w.right() >= radius as i64 {
                return Ok(w);
            }
        }
        Err(Error::NotGrowing)
    }

    /// A window of radius `radius` around some point, for systems without seeds.
    pub fn sample_point(&self, radius: u64) -> Result<CenteredWord> {
        let len = 2 * radius as usize + 1;
        let corpus = self.corpus(len)?;
        let s = corpus
            .strings()
            .iter()
            .find(|s| s.len() >= len)
            .ok_or(Error::WindowTooSmall { need: radius, have: 0 })?;
        let mid = s.len() / 2;
        CenteredWord::new(s[mid - radius as usize..=mid + radius as usize].to_vec(), -(radius as i64))
    }
}

impl Subshift for System {
    fn alphabet(&self) -> Alphabet {
        match self {
            System::Substitution(s) => s.alphabet(),
            System::Toeplitz(t) => t.alphabet(),
            System::Factor(f) => f.alphabet(),
        }
    }

    fn corpus(&self, coverage: usize) -> Result<Corpus> {
        match self {
            System::Substitution(s) => s.corpus(coverage),
            System::Toeplitz(t) => t.corpus(coverage),
            System::Factor(f) => f.corpus(coverage),
        }
    }

    fn describe(&self) -> String {
        match self {
            System::Substitution(s) => s.describe(),
            System::Toeplitz(t) => t.describe(),
            System::Factor(f) => f.describe(),
        }
    }
}

impl From<Substitution> for System {
    fn from(s: Substitution) -> Self {
        System::Substitution(s)
    }
}

impl From<ToeplitzSkeleton> for System {
    fn from(t: ToeplitzSkeleton) -> Self {
        System::Toeplitz(t)
    }
}

impl From<SlidingBlockFactor> for System {
    fn from(f: SlidingBlockFactor) -> Self {
        System::Factor(f)
    }
}
