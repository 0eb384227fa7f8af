//! Node-importance criteria.

mod betweenness;
mod capacity;
mod congestion;
mod efficiency;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use betweenness::{classical_betweenness, extended_betweenness};
pub use capacity::{transmission_capacity, TransmissionCapacityTable};
pub use congestion::congestion_criterion;
pub use efficiency::{electrical_efficiency, global_efficiency, net_ability};
pub(crate) use efficiency::graph_efficiency;

use crate::grid::BusId;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    ClassicalBetweenness,
    ExtendedBetweenness,
    NetAbility,
    Congestion,
    Comprehensive,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Criterion::ClassicalBetweenness => "classical_betweenness",
            Criterion::ExtendedBetweenness => "extended_betweenness",
            Criterion::NetAbility => "net_ability",
            Criterion::Congestion => "congestion",
            Criterion::Comprehensive => "comprehensive",
        })
    }
}

/// The four ranking criteria compared when building reduced models.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CriterionCode {
    /// Evidential fusion of C2 and C3.
    C1,
    /// Extended betweenness.
    C2,
    /// Net-ability.
    C3,
    /// Line congestion.
    C4,
}

impl CriterionCode {
    pub const ALL: [CriterionCode; 4] = [Self::C1, Self::C2, Self::C3, Self::C4];

    pub fn criterion(self) -> Criterion {
        match self {
            Self::C1 => Criterion::Comprehensive,
            Self::C2 => Criterion::ExtendedBetweenness,
            Self::C3 => Criterion::NetAbility,
            Self::C4 => Criterion::Congestion,
        }
    }

    pub fn number(self) -> usize {
        self as usize + 1
    }
}

impl fmt::Display for CriterionCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "c{}", self.number())
    }
}

impl FromStr for CriterionCode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "c1" => Ok(Self::C1),
            "c2" => Ok(Self::C2),
            "c3" => Ok(Self::C3),
            "c4" => Ok(Self::C4),
            other => Err(Error::Config(format!("unknown criterion '{other}' (expected c1..c4)"))),
        }
    }
}

/// Per-node scores with their descending ordinal ranks (1 = most important).
///
/// Scores that agree to 12 significant digits (relative to the largest
/// score) are ties; ties go to the lower bus id.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodeScoreVector {
    pub criterion: Criterion,
    pub ids: Vec<BusId>,
    pub scores: Vec<f64>,
    pub ranks: Vec<usize>,
}

impl NodeScoreVector {
    pub fn from_scores(criterion: Criterion, ids: Vec<BusId>, scores: Vec<f64>) -> Self {
        assert_eq!(ids.len(), scores.len(), "one score per node");
        let scale = scores.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        let keys: Vec<i64> = scores
            .iter()
            .map(|s| {
                if scale > 0.0 {
                    (s / scale * 1e12).round() as i64
                } else {
                    0
                }
            })
            .collect();
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| keys[b].cmp(&keys[a]).then(ids[a].cmp(&ids[b])));
        let mut ranks = vec![0; scores.len()];
        for (pos, &node) in order.iter().enumerate() {
            ranks[node] = pos + 1;
        }
        Self {
            criterion,
            ids,
            scores,
            ranks,
        }
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Node positions ordered from rank 1 to rank N.
    pub fn ordered(&self) -> Vec<usize> {
        let mut order = vec![0; self.ranks.len()];
        for (node, &r) in self.ranks.iter().enumerate() {
            order[r - 1] = node;
        }
        order
    }

    /// Ids of the `k` lowest-ranked nodes, from rank `N-k+1` to rank `N`.
    pub fn bottom(&self, k: usize) -> Vec<BusId> {
        let order = self.ordered();
        let start = order.len().saturating_sub(k);
        order[start..].iter().map(|&i| self.ids[i]).collect()
    }

    pub fn rank_of(&self, id: BusId) -> Option<usize> {
        self.ids.iter().position(|&x| x == id).map(|i| self.ranks[i])
    }
}
