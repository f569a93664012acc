//! Coincidence, minimal and maximal rank estimates, the profile they
//! predict, and the extension inequality.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::odometer::{column_number, column_sets, require_exact_or_trivial, OdometerResidue};
use crate::oracles::{proximal_pair_exact, Proximity};
use crate::substitution::Substitution;
use crate::system::System;
use crate::words::Symbol;

pub use crate::factor::{sliding_block_factor, LocalRule, SlidingBlockFactor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RankValue {
    Finite(u64),
    /// Only ever supplied by hand, never computed.
    Infinite,
}

impl Serialize for RankValue {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RankValue::Finite(v) => s.serialize_u64(*v),
            RankValue::Infinite => s.serialize_str("inf"),
        }
    }
}

impl fmt::Display for RankValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankValue::Finite(v) => write!(f, "{v}"),
            RankValue::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum EstimateKind {
    Exact,
    Stabilized,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Evidence {
    pub method: String,
    pub depth: u32,
    pub radius: u64,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Estimate {
    pub value: RankValue,
    pub kind: EstimateKind,
    pub evidence: Evidence,
}

impl Estimate {
    fn new(value: u64, kind: EstimateKind, method: &str, depth: u32, radius: u64, detail: String) -> Self {
        Estimate {
            value: RankValue::Finite(value),
            kind,
            evidence: Evidence {
                method: method.into(),
                depth,
                radius,
                detail,
            },
        }
    }

    pub fn finite(&self) -> Option<u64> {
        match self.value {
            RankValue::Finite(v) => Some(v),
            RankValue::Infinite => None,
        }
    }

    /// A hand-made estimate, for synthetic inputs.
    pub fn given(value: RankValue) -> Self {
        Estimate {
            value,
            kind: EstimateKind::Exact,
            evidence: Evidence {
                method: "given".into(),
                depth: 0,
                radius: 0,
                detail: String::new(),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegimeFlags {
    pub primitive: bool,
    pub aperiodic: bool,
    pub constant_length: Option<usize>,
    pub height: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankReport {
    pub system: String,
    pub r_c: Estimate,
    pub r_m: Estimate,
    #[serde(rename = "r_M")]
    pub r_max: Estimate,
    pub regime: Option<RegimeFlags>,
    /// Some fiber is a singleton.
    pub almost_automorphic: bool,
}

impl RankReport {
    /// An equicontinuous system (e.g. an odometer): every fiber is a point.
    pub fn equicontinuous(system: &str) -> Self {
        let one = |what: &str| Estimate::new(1, EstimateKind::Exact, "equicontinuous", 0, 0, what.into());
        RankReport {
            system: system.into(),
            r_c: one("identity factor map"),
            r_m: one("identity factor map"),
            r_max: one("identity factor map"),
            regime: None,
            almost_automorphic: true,
        }
    }

    pub fn synthetic(system: &str, r_c: RankValue, r_m: RankValue, r_max: RankValue) -> Self {
        RankReport {
            system: system.into(),
            r_c: Estimate::given(r_c),
            r_m: Estimate::given(r_m),
            r_max: Estimate::given(r_max),
            regime: None,
            almost_automorphic: r_m == RankValue::Finite(1),
        }
    }

    /// `r_c <= r_m <= r_M`.
    pub fn chain_holds(&self) -> bool {
        self.r_c.value <= self.r_m.value && self.r_m.value <= self.r_max.value
    }
}

/// Sampling plan for the census-based estimates.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RankConfig {
    /// Every residue of depth `<= depth` is sampled.
    pub depth: u32,
    /// While an estimate is not stable, sampling deepens one level at a
    /// time up to here.
    pub max_depth: u32,
    pub radius: u64,
    pub random_samples: usize,
    pub random_depth: u32,
    pub seed: u64,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            depth: 4,
            max_depth: 6,
            radius: 64,
            random_samples: 16,
            random_depth: 8,
            seed: 0x5eed,
        }
    }
}

fn regime_flags(s: &Substitution) -> RegimeFlags {
    let r = s.regime();
    RegimeFlags {
        primitive: r.primitive,
        aperiodic: r.aperiodic,
        constant_length: r.constant_length,
        height: r.height,
    }
}

/// Largest subset of a minimal column of `θ^k` whose pairs are all distal.
pub fn coincidence_rank(s: &Substitution) -> Result<Estimate> {
    if let Err(e) = require_exact_or_trivial(s) {
        return Ok(Estimate::new(1, EstimateKind::LowerBound, "none", 0, 0, format!("{e}")));
    }
    let cn = column_number(s, 8)?;
    let cols = column_sets(s, cn.depth_witness)?;
    let column: Vec<Symbol> = cols
        .columns
        .iter()
        .find(|c| c.len() == cn.c)
        .expect("column number is attained")
        .iter()
        .copied()
        .collect();
    let n = column.len();
    let mut distal = vec![vec![false; n]; n];
    for i in 0..n {
        for j in 0..n {
            distal[i][j] = i != j && proximal_pair_exact(s, column[i], column[j])? == Proximity::Distal;
        }
    }
    let best = max_clique(&distal);
    let shown: Vec<String> = column.iter().map(|a| a.to_string()).collect();
    Ok(Estimate::new(
        best as u64,
        EstimateKind::Exact,
        "pair-graph",
        cn.depth_witness,
        0,
        format!("column {{{}}}; column number {}", shown.join(","), cn.c),
    ))
}

fn max_clique(adj: &[Vec<bool>]) -> usize {
    fn go(adj: &[Vec<bool>], chosen: &mut Vec<usize>, start: usize, best: &mut usize) {
        *best = (*best).max(chosen.len());
        for v in start..adj.len() {
            if chosen.len() + (adj.len() - v) <= *best {
                return;
            }
            if chosen.iter().all(|&c| adj[c][v]) {
                chosen.push(v);
                go(adj, chosen, v + 1, best);
                chosen.pop();
            }
        }
    }
    let mut best = usize::from(!adj.is_empty());
    go(adj, &mut Vec::new(), 0, &mut best);
    best
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Extremum {
    Min,
    Max,
}

struct Sampled {
    residue: OdometerResidue,
    /// Counts at radius/4, radius/2, radius.
    counts: [u64; 3],
}

fn level(q: u64, d: u32) -> Result<Vec<OdometerResidue>> {
    let m = q
        .checked_pow(d)
        .ok_or_else(|| Error::Hypotheses(format!("{q}^{d} overflows")))?;
    (0..m).map(|v| OdometerResidue::new(q, d, v)).collect()
}

fn random_residues(q: u64, cfg: &RankConfig) -> Result<Vec<OdometerResidue>> {
    let Some(m) = q.checked_pow(cfg.random_depth) else {
        return Ok(Vec::new());
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.random_samples)
        .map(|_| OdometerResidue::new(q, cfg.random_depth, rng.gen_range(0..m)))
        .collect()
}

fn count(system: &System, residues: Vec<OdometerResidue>, cfg: &RankConfig) -> Result<Vec<Sampled>> {
    let radii = [(cfg.radius / 4).max(1), (cfg.radius / 2).max(1), cfg.radius.max(1)];
    residues
        .into_par_iter()
        .map(|r| {
            let mut counts = [0; 3];
            for (c, &rad) in counts.iter_mut().zip(&radii) {
                *c = system.census_prechecked(r, rad)?.count() as u64;
            }
            Ok(Sampled { residue: r, counts })
        })
        .collect()
}

/// Census samples and the depth they are complete to.
fn sample(system: &System, cfg: &RankConfig) -> Result<(Vec<Sampled>, u32)> {
    let q = system
        .odometer_base()
        .ok_or_else(|| Error::Hypotheses("no odometer factor known".into()))?;
    system.check_census()?;
    let mut residues = random_residues(q, cfg)?;
    for d in 1..=cfg.depth {
        residues.extend(level(q, d)?);
    }
    let mut samples = count(system, residues, cfg)?;
    let mut d = cfg.depth;
    while d < cfg.max_depth
        && [Extremum::Min, Extremum::Max]
            .iter()
            .any(|&e| census_estimate(&samples, d, cfg, e).kind != EstimateKind::Stabilized)
    {
        d += 1;
        samples.extend(count(system, level(q, d)?, cfg)?);
    }
    Ok((samples, d))
}

/// Extremum of census counts; stabilized when the value is unchanged over
/// the last two depth increments and the last two radius doublings, and the
/// random deep samples do not move it.
fn census_estimate(samples: &[Sampled], d: u32, cfg: &RankConfig, ext: Extremum) -> Estimate {
    let pick = |it: &mut dyn Iterator<Item = (u64, OdometerResidue)>| -> Option<(u64, OdometerResidue)> {
        match ext {
            // shallowest residue attaining it
            Extremum::Min => it.min_by_key(|(c, r)| (*c, r.depth)),
            Extremum::Max => it.max_by_key(|(c, r)| (*c, std::cmp::Reverse(r.depth))),
        }
    };
    let upto = |depth: u32, ri: usize| {
        pick(
            &mut samples
                .iter()
                .filter(|s| s.residue.depth <= depth)
                .map(|s| (s.counts[ri], s.residue)),
        )
    };
    let all = pick(&mut samples.iter().map(|s| (s.counts[2], s.residue))).expect("nonempty sample");
    let by_depth: Vec<u64> = (d.saturating_sub(2).max(1)..=d).filter_map(|k| upto(k, 2).map(|x| x.0)).collect();
    let by_radius: Vec<u64> = (0..3).filter_map(|ri| upto(d, ri).map(|x| x.0)).collect();
    let stable = by_depth.len() == 3
        && by_depth.iter().all(|&v| v == all.0)
        && by_radius.iter().all(|&v| v == all.0);
    Estimate::new(
        all.0,
        if stable { EstimateKind::Stabilized } else { EstimateKind::LowerBound },
        "fiber-census",
        d,
        cfg.radius,
        format!(
            "attained at residue {}; by depth {:?}, by radius {:?}, {} residues sampled",
            all.1,
            by_depth,
            by_radius,
            samples.len()
        ),
    )
}

/// Minimum over sampled residues of the census count.
pub fn minimal_rank(system: &System, cfg: &RankConfig) -> Result<Estimate> {
    let (samples, d) = sample(system, cfg)?;
    Ok(census_estimate(&samples, d, cfg, Extremum::Min))
}

/// Maximum over sampled residues (all shallow residues, which include the
/// orbit of zero) of the census count.
pub fn maximal_rank(system: &System, cfg: &RankConfig) -> Result<Estimate> {
    let (samples, d) = sample(system, cfg)?;
    Ok(census_estimate(&samples, d, cfg, Extremum::Max))
}

fn lower_bound_one(why: String) -> Estimate {
    Estimate::new(1, EstimateKind::LowerBound, "none", 0, 0, why)
}

/// All three ranks; systems outside the census' reach get trivial lower
/// bounds.
pub fn rank_report(name: &str, system: &System, cfg: &RankConfig) -> Result<RankReport> {
    let regime = system.as_substitution().map(regime_flags);
    let samples = match system {
        System::Substitution(s) => match require_exact_or_trivial(s) {
            Ok(()) => Some(sample(system, cfg)?),
            Err(e) => {
                let why = format!("{e}");
                return Ok(RankReport {
                    system: name.into(),
                    r_c: lower_bound_one(why.clone()),
                    r_m: lower_bound_one(why.clone()),
                    r_max: lower_bound_one(why),
                    regime,
                    almost_automorphic: false,
                });
            }
        },
        System::Toeplitz(_) => Some(sample(system, cfg)?),
        System::Factor(_) => None,
    };
    let Some(samples) = samples else {
        let why = "no odometer factor known for this system".to_string();
        return Ok(RankReport {
            system: name.into(),
            r_c: lower_bound_one(why.clone()),
            r_m: lower_bound_one(why.clone()),
            r_max: lower_bound_one(why),
            regime,
            almost_automorphic: false,
        });
    };
    let (samples, d) = samples;
    let r_m = census_estimate(&samples, d, cfg, Extremum::Min);
    let r_max = census_estimate(&samples, d, cfg, Extremum::Max);
    let r_c = match system {
        System::Substitution(s) => coincidence_rank(s)?,
        // r_c <= r_m, so a singleton fiber pins it down
        _ if r_m.finite() == Some(1) && r_m.kind != EstimateKind::LowerBound => Estimate::new(
            1,
            r_m.kind,
            "rank-chain",
            r_m.evidence.depth,
            r_m.evidence.radius,
            "r_c <= r_m = 1".into(),
        ),
        _ => lower_bound_one("no pair graph for this system".into()),
    };
    let almost_automorphic = r_m.finite() == Some(1);
    Ok(RankReport {
        system: name.into(),
        r_c,
        r_m,
        r_max,
        regime,
        almost_automorphic,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ProfileRow {
    pub m: usize,
    pub equicontinuous: bool,
    pub sensitive: bool,
    pub compactly_sensitive: bool,
    pub cover_equicontinuous: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MultivariateProfile {
    pub system: String,
    pub rows: Vec<ProfileRow>,
}

impl MultivariateProfile {
    pub fn row(&self, m: usize) -> Option<&ProfileRow> {
        self.rows.iter().find(|r| r.m == m)
    }
}

/// m-equicontinuous iff `r_M <= m-1`, m-sensitive iff `r_M >= m`,
/// compactly m-sensitive iff `r_c >= m`, cover m-equicontinuous iff `r_c < m`.
pub fn predict_profile(r: &RankReport, m_max: usize) -> MultivariateProfile {
    let at_least = |v: RankValue, m: usize| v >= RankValue::Finite(m as u64);
    let rows = (2..=m_max.max(2))
        .map(|m| {
            let sensitive = at_least(r.r_max.value, m);
            let compact = at_least(r.r_c.value, m);
            ProfileRow {
                m,
                equicontinuous: !sensitive,
                sensitive,
                compactly_sensitive: compact,
                cover_equicontinuous: !compact,
            }
        })
        .collect();
    MultivariateProfile {
        system: r.system.clone(),
        rows,
    }
}

/// `r_c(Y) <= r_c(X) <= r_m(Y)` for a proximal factor map `X → Y`.
/// Proximality is the caller's claim.
pub fn check_extension_inequality(x: &RankReport, y: &RankReport, proximal: bool) -> Result<bool> {
    if !proximal {
        return Err(Error::NotProximal);
    }
    Ok(y.r_c.value <= x.r_c.value && x.r_c.value <= y.r_m.value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_compares_above_everything() {
        assert!(RankValue::Infinite > RankValue::Finite(u64::MAX));
        let r = RankReport::synthetic("s", RankValue::Finite(2), RankValue::Infinite, RankValue::Infinite);
        assert!(r.chain_holds());
        assert!(predict_profile(&r, 9).rows.iter().all(|row| row.sensitive));
        assert_eq!(serde_json::to_value(r.r_m.value).unwrap(), serde_json::json!("inf"));
    }

    #[test]
    fn cliques() {
        assert_eq!(max_clique(&[]), 0);
        assert_eq!(max_clique(&[vec![false]]), 1);
        let t = true;
        let f = false;
        assert_eq!(max_clique(&[vec![f, t, t], vec![t, f, f], vec![t, f, f]]), 2);
    }
}
