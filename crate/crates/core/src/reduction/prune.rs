use super::{PrunedBranch, ReducedCase};
use crate::graph::DisjointSet;
use crate::grid::GridCase;

/// Removes equivalent branches whose reactance is negative or larger than
/// `x_max` (per-unit). Original branches are never touched.
///
/// When a removal would split the network, removed branches are restored in
/// descending `|x|` order, skipping any that would not join two separate
/// parts, until the network is connected again.
pub fn prune_abnormal_branches(reduced: &ReducedCase, x_max: f64) -> ReducedCase {
    let branches = reduced.case.branches();
    let abnormal: Vec<usize> = reduced
        .equivalent_indices()
        .into_iter()
        .filter(|&i| {
            let x = branches[i].reactance;
            x < 0.0 || x.abs() > x_max
        })
        .collect();
    if abnormal.is_empty() {
        return reduced.clone();
    }

    let n = reduced.case.bus_count();
    let mut remove = vec![false; branches.len()];
    for &i in &abnormal {
        remove[i] = true;
    }
    let mut dsu = DisjointSet::new(n);
    let mut parts = n;
    for (i, br) in reduced.case.in_service_branches() {
        if !remove[i] && dsu.union(br.from, br.to) {
            parts -= 1;
        }
    }
    let mut warnings = reduced.warnings.clone();
    if parts > 1 {
        let mut by_size = abnormal.clone();
        by_size.sort_by(|&a, &b| {
            branches[b]
                .reactance
                .abs()
                .total_cmp(&branches[a].reactance.abs())
                .then(a.cmp(&b))
        });
        for i in by_size {
            if parts == 1 {
                break;
            }
            let br = &branches[i];
            if dsu.union(br.from, br.to) {
                parts -= 1;
                remove[i] = false;
                warnings.push(format!(
                    "kept abnormal equivalent branch {}-{} (x = {}) to stay connected",
                    reduced.case.bus(br.from).id,
                    reduced.case.bus(br.to).id,
                    br.reactance
                ));
            }
        }
    }

    let mut kept = Vec::new();
    let mut source = Vec::new();
    let mut pruned = reduced.pruned.clone();
    for (i, br) in branches.iter().enumerate() {
        if remove[i] {
            pruned.push(PrunedBranch {
                from: reduced.case.bus(br.from).id,
                to: reduced.case.bus(br.to).id,
                x_pu: br.reactance,
            });
        } else {
            kept.push(br.clone());
            source.push(reduced.source_branch[i]);
        }
    }
    ReducedCase {
        case: GridCase::new_unchecked(
            reduced.case.name(),
            reduced.case.base_mva(),
            reduced.case.buses().to_vec(),
            kept,
        ),
        source_branch: source,
        pruned,
        warnings,
        ..reduced.clone()
    }
}
