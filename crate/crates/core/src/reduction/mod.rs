//! DC Ward network reduction.
//!
//! The pipeline selects the lowest-ranked nodes, Kron-eliminates them,
//! prunes abnormal equivalent branches, re-runs the elimination with every
//! generator bus retained (or relocates eliminated generation when that is
//! disabled), and finally sets the retained loads so that the reduced DC
//! power flow reproduces the full model's angles.

mod adjust;
mod pipeline;
mod prune;
mod ward;

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use adjust::{redistribute_loads, relocate_generators};
pub use pipeline::{reduce_pipeline, FlowCheck, ReductionConfig, ReductionOutcome, ReductionReport};
pub use prune::prune_abnormal_branches;
pub use ward::ward_eliminate;

use crate::centrality::NodeScoreVector;
use crate::graph;
use crate::grid::io::{document_json, CaseDocument};
use crate::grid::{BusId, GridCase};
use crate::{Error, Result};

/// Split of the buses into retained and eliminated sets (internal indices,
/// sorted).
#[derive(Debug, Clone, PartialEq)]
pub struct NodePartition {
    retained: Vec<usize>,
    eliminated: Vec<usize>,
    retained_connected: bool,
}

impl NodePartition {
    pub fn new(case: &GridCase, mut eliminated: Vec<usize>) -> Result<Self> {
        let n = case.bus_count();
        eliminated.sort_unstable();
        eliminated.dedup();
        if eliminated.last().is_some_and(|&e| e >= n) {
            return Err(Error::Domain("eliminated bus index out of range".into()));
        }
        let mut is_elim = vec![false; n];
        for &e in &eliminated {
            is_elim[e] = true;
        }
        let retained: Vec<usize> = (0..n).filter(|&i| !is_elim[i]).collect();
        if retained.is_empty() {
            return Err(Error::Domain("at least one bus must be retained".into()));
        }
        let retained_connected = case.induced(&retained).is_connected();
        Ok(Self {
            retained,
            eliminated,
            retained_connected,
        })
    }

    pub fn from_ids(case: &GridCase, ids: &[BusId]) -> Result<Self> {
        let idx = ids
            .iter()
            .map(|&id| {
                case.index_of(id)
                    .ok_or_else(|| Error::Domain(format!("bus {id} is not in the case")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(case, idx)
    }

    pub fn retained(&self) -> &[usize] {
        &self.retained
    }

    pub fn eliminated(&self) -> &[usize] {
        &self.eliminated
    }

    pub fn bus_count(&self) -> usize {
        self.retained.len() + self.eliminated.len()
    }

    /// `false` when the retained buses are not connected among themselves
    /// in the original network. Elimination still connects them through
    /// equivalent branches.
    pub fn retained_connected(&self) -> bool {
        self.retained_connected
    }
}

/// Eliminates the `k` lowest-ranked nodes.
pub fn select_nodes(case: &GridCase, ranking: &NodeScoreVector, k: usize) -> Result<NodePartition> {
    let n = case.bus_count();
    if ranking.ids != case.bus_ids() {
        return Err(Error::Domain("ranking does not cover the case buses".into()));
    }
    if k == 0 || k + 2 > n {
        return Err(Error::Domain(format!(
            "eliminate count {k} outside 1..={}",
            n.saturating_sub(2)
        )));
    }
    NodePartition::from_ids(case, &ranking.bottom(k))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum NodeStatus {
    Retained,
    Eliminated,
    /// Selected for elimination but kept because it hosts generation.
    RetainedGenerator,
    /// Eliminated generator whose output moved to `to`.
    Relocated { to: BusId },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquivalentBranch {
    pub from: BusId,
    pub to: BusId,
    pub x_pu: f64,
    pub rate_mw: f64,
    /// The rating is a surrogate (sum of interface ratings), not data.
    #[serde(default = "yes")]
    pub synthetic_rating: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrunedBranch {
    pub from: BusId,
    pub to: BusId,
    pub x_pu: f64,
}

/// The `provenance` section of a reduced case document.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Provenance {
    pub eliminated: Vec<BusId>,
    pub generator_map: BTreeMap<BusId, BusId>,
    pub equivalent_branches: Vec<EquivalentBranch>,
    pub pruned: Vec<PrunedBranch>,
}

/// An equivalent network together with how it was derived from its source.
#[derive(Debug, Clone)]
pub struct ReducedCase {
    /// The equivalent network over the retained buses.
    pub case: GridCase,
    /// For each branch of `case`, the source-case branch it copies;
    /// `None` marks an equivalent branch.
    pub source_branch: Vec<Option<usize>>,
    pub pruned: Vec<PrunedBranch>,
    /// Source generator bus to the retained bus that now carries its output.
    pub generator_map: BTreeMap<BusId, BusId>,
    /// Load change per retained bus in MW (reduced minus source).
    pub load_adjustments: BTreeMap<BusId, f64>,
    pub eliminated: Vec<BusId>,
    pub status: BTreeMap<BusId, NodeStatus>,
    /// Exact Kron-reduced bus matrix, before any pruning, in the bus order
    /// of `case`.
    pub kron_susceptance: DMatrix<f64>,
    /// Ward shift of eliminated injections onto each retained bus (MW).
    /// Diagnostic only: load redistribution overwrites it.
    pub ward_shift_mw: Vec<f64>,
    pub warnings: Vec<String>,
}

impl ReducedCase {
    /// Indices into `case.branches()` of the equivalent branches.
    pub fn equivalent_indices(&self) -> Vec<usize> {
        self.source_branch
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_none())
            .map(|(i, _)| i)
            .collect()
    }

    pub fn equivalent_branches(&self) -> Vec<EquivalentBranch> {
        self.equivalent_indices()
            .into_iter()
            .map(|i| {
                let br = &self.case.branches()[i];
                EquivalentBranch {
                    from: self.case.bus(br.from).id,
                    to: self.case.bus(br.to).id,
                    x_pu: br.reactance,
                    rate_mw: br.capacity,
                    synthetic_rating: true,
                }
            })
            .collect()
    }

    pub fn provenance(&self) -> Provenance {
        Provenance {
            eliminated: self.eliminated.clone(),
            generator_map: self.generator_map.clone(),
            equivalent_branches: self.equivalent_branches(),
            pruned: self.pruned.clone(),
        }
    }

    pub fn to_document(&self) -> CaseDocument {
        let mut doc = CaseDocument::from_case(&self.case);
        doc.provenance = Some(self.provenance());
        doc
    }

    /// Native JSON with the provenance section.
    pub fn to_json(&self) -> String {
        document_json(&self.to_document())
    }

    pub fn is_connected(&self) -> bool {
        graph::components(
            self.case.bus_count(),
            self.case.in_service_branches().map(|(_, b)| (b.from, b.to)),
        )
        .len()
            <= 1
    }
}
