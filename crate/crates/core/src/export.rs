//! CSV renderings of rankings.

use std::fmt::Write as _;

use crate::centrality::NodeScoreVector;
use crate::evidential::ComprehensiveRanking;

/// `node_id,score,rank`, one row per node in rank order.
pub fn scores_csv(vector: &NodeScoreVector) -> String {
    let mut out = String::from("node_id,score,rank\n");
    for i in vector.ordered() {
        let _ = writeln!(out, "{},{},{}", vector.ids[i], vector.scores[i], vector.ranks[i]);
    }
    out
}

/// `node_id,u_min,u_max,u_avg,rank,delta_S`, one row per node in rank order.
pub fn fusion_csv(fused: &ComprehensiveRanking) -> String {
    let mut out = String::from("node_id,u_min,u_max,u_avg,rank,delta_S\n");
    let r = &fused.ranking;
    for i in r.ordered() {
        let u = &fused.utilities[i];
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            r.ids[i], u.u_min, u.u_max, u.u_avg, r.ranks[i], fused.assessments[i].residual_uncertainty
        );
    }
    out
}

/// Lowest-ranked `k` nodes per criterion: `position,<label>,<label>...`
/// where position 1 is the least important node.
pub fn bottom_k_csv(vectors: &[(String, &NodeScoreVector)], k: usize) -> String {
    let mut out = String::from("position");
    for (label, _) in vectors {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    let columns: Vec<Vec<String>> = vectors
        .iter()
        .map(|(_, v)| v.bottom(k).iter().rev().map(|id| id.to_string()).collect())
        .collect();
    for pos in 0..k {
        let _ = write!(out, "{}", pos + 1);
        for col in &columns {
            out.push(',');
            if let Some(id) = col.get(pos) {
                out.push_str(id);
            }
        }
        out.push('\n');
    }
    out
}
