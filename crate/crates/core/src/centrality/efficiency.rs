use super::{transmission_capacity, Criterion, NodeScoreVector, TransmissionCapacityTable};
use crate::graph::SimpleGraph;
use crate::grid::{bus_impedance, compute_ptdf, GridCase, ImpedanceTable};
use crate::{Error, Result};

/// Mean inverse shortest-path length over ordered node pairs. Unreachable
/// pairs contribute zero. The weighted variant measures paths in
/// reactance.
pub fn global_efficiency(case: &GridCase, weighted: bool) -> f64 {
    let graph = if weighted {
        SimpleGraph::reactance_weighted(case, 1.0)
    } else {
        SimpleGraph::unweighted(case)
    };
    graph_efficiency(&graph)
}

pub(crate) fn graph_efficiency(graph: &SimpleGraph) -> f64 {
    let n = graph.node_count();
    if n < 2 {
        return 0.0;
    }
    let mut total = 0.0;
    for s in 0..n {
        let dist = graph.shortest_paths(s).dist;
        total += dist
            .iter()
            .enumerate()
            .filter(|&(t, d)| t != s && d.is_finite())
            .map(|(_, d)| 1.0 / d)
            .sum::<f64>();
    }
    total / (n * (n - 1)) as f64
}

/// `A = (1 / (N_Gen N_D)) Σ κ_g^d / Z_g^d` over generator/load pairs.
pub fn electrical_efficiency(kappa: &TransmissionCapacityTable, z: &ImpedanceTable) -> f64 {
    let pairs = kappa.generators.len() * kappa.loads.len();
    if pairs == 0 {
        return 0.0;
    }
    efficiency_terms(kappa, z) / pairs as f64
}

fn efficiency_terms(kappa: &TransmissionCapacityTable, z: &ImpedanceTable) -> f64 {
    kappa
        .pairs()
        .map(|(g, d, k, _)| {
            let zgd = z.pair(g, d);
            if zgd > 0.0 {
                k / zgd
            } else {
                0.0
            }
        })
        .sum()
}

/// Un-normalised efficiency sum of one connected island.
fn island_terms(island: &GridCase) -> Result<f64> {
    if island.bus_count() < 2 || island.generators().is_empty() || island.loads().is_empty() {
        return Ok(0.0);
    }
    let ptdf = compute_ptdf(island, island.default_slack())?;
    let kappa = transmission_capacity(island, &ptdf)?;
    let z = bus_impedance(island)?;
    Ok(efficiency_terms(&kappa, &z))
}

/// Electrical efficiency of a possibly islanded network. Pairs in
/// different islands contribute zero; the normalisation counts every
/// generator and load bus that remains.
pub(crate) fn islanded_efficiency(case: &GridCase) -> Result<f64> {
    let pairs = case.generators().len() * case.loads().len();
    if pairs == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for island in case.islands() {
        total += island_terms(&case.induced(&island))?;
    }
    Ok(total / pairs as f64)
}

/// Relative drop of electrical efficiency when each node (and its branches)
/// is removed. Capacities and impedances are recomputed on every reduced
/// network.
pub fn net_ability(case: &GridCase) -> Result<NodeScoreVector> {
    let base = islanded_efficiency(case)?;
    if base.is_nan() || base <= 0.0 {
        return Err(Error::Domain(
            "network has no generator/load pair with positive efficiency".into(),
        ));
    }
    let n = case.bus_count();
    let mut scores = Vec::with_capacity(n);
    for v in 0..n {
        let keep: Vec<usize> = (0..n).filter(|&i| i != v).collect();
        let removed = islanded_efficiency(&case.induced(&keep))?;
        scores.push((base - removed).abs() / base);
    }
    Ok(NodeScoreVector::from_scores(Criterion::NetAbility, case.bus_ids(), scores))
}
