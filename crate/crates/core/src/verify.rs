//! Predicted profile against oracle verdicts, cell by cell.

use std::fmt;

use serde::Serialize;

use crate::catalog::SystemSpec;
use crate::error::Result;
use crate::oracles::{block_m_sensitivity_test, m_sensitivity_test, Certificate, SearchBudget, Verdict};
use crate::ranks::{predict_profile, rank_report, EstimateKind, MultivariateProfile, RankConfig, RankReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CellTest {
    /// m-sensitivity, predicted iff `r_M >= m`.
    Sensitivity,
    /// Block m-sensitivity, predicted iff `r_c >= m`.
    Block,
}

impl fmt::Display for CellTest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellTest::Sensitivity => "sensitivity",
            CellTest::Block => "block",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CellStatus {
    Consistent,
    Inconsistent,
    /// An empty search where a witness was predicted, or a witness against
    /// a rank that is only a lower bound.
    Inconclusive,
}

impl fmt::Display for CellStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CellStatus::Consistent => "CONSISTENT",
            CellStatus::Inconsistent => "INCONSISTENT",
            CellStatus::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cell {
    pub m: usize,
    pub test: CellTest,
    pub predicted: bool,
    pub verdict: String,
    pub status: CellStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub system: String,
    pub budget: SearchBudget,
    pub ranks: RankReport,
    pub profile: MultivariateProfile,
    pub cells: Vec<Cell>,
}

impl VerifyReport {
    pub fn inconsistent(&self) -> usize {
        self.cells.iter().filter(|c| c.status == CellStatus::Inconsistent).count()
    }
}

fn status(predicted: bool, witnessed: bool, rank_is_bound: bool) -> CellStatus {
    match (witnessed, predicted) {
        (true, true) | (false, false) => CellStatus::Consistent,
        (true, false) if rank_is_bound => CellStatus::Inconclusive,
        (true, false) => CellStatus::Inconsistent,
        (false, true) => CellStatus::Inconclusive,
    }
}

/// Ranks, their predicted profile, then one plain and one block sensitivity
/// search per `m` in `2..=m_max`.
pub fn verify(spec: &SystemSpec, budget: &SearchBudget, m_max: usize, cfg: &RankConfig) -> Result<VerifyReport> {
    budget.validate()?;
    let ranks = rank_report(&spec.name, &spec.system, cfg)?;
    let profile = predict_profile(&ranks, m_max);
    let mut cells = Vec::new();
    for row in &profile.rows {
        let b = budget.with_arity(row.m);
        for test in [CellTest::Sensitivity, CellTest::Block] {
            let (predicted, bound, verdict) = match test {
                CellTest::Sensitivity => (
                    row.sensitive,
                    ranks.r_max.kind == EstimateKind::LowerBound,
                    m_sensitivity_test(&spec.name, &spec.system, &b)?.verdict,
                ),
                CellTest::Block => (
                    row.compactly_sensitive,
                    ranks.r_c.kind == EstimateKind::LowerBound,
                    block_m_sensitivity_test(&spec.name, &spec.system, &b)?.verdict,
                ),
            };
            cells.push(Cell {
                m: row.m,
                test,
                predicted,
                verdict: verdict.class().to_string(),
                status: status(predicted, verdict.is_witnessed(), bound),
                certificate: match verdict {
                    Verdict::Witnessed(c) => Some(*c),
                    _ => None,
                },
            });
        }
    }
    Ok(VerifyReport {
        system: spec.name.clone(),
        budget: budget.clone(),
        ranks,
        profile,
        cells,
    })
}
