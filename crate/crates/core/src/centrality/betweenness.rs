use super::{Criterion, NodeScoreVector, TransmissionCapacityTable};
use crate::graph::SimpleGraph;
use crate::grid::{GridCase, PtdfMatrix};

/// Shortest-path betweenness over unordered pairs with endpoints excluded.
/// The weighted variant uses branch reactances as path lengths.
pub fn classical_betweenness(case: &GridCase, weighted: bool) -> NodeScoreVector {
    let graph = if weighted {
        SimpleGraph::reactance_weighted(case, 1.0)
    } else {
        SimpleGraph::unweighted(case)
    };
    NodeScoreVector::from_scores(
        Criterion::ClassicalBetweenness,
        case.bus_ids(),
        graph.betweenness(),
    )
}

/// Half the PTDF-weighted transit through each node when every
/// generator/load pair transfers its maximum `κ_g^d`.
///
/// Pairs in which the node itself is the generator or the load do not
/// count as transit for that node.
pub fn extended_betweenness(
    case: &GridCase,
    ptdf: &PtdfMatrix,
    kappa: &TransmissionCapacityTable,
) -> NodeScoreVector {
    let n = case.bus_count();
    let mut scores = vec![0.0; n];
    let mut through = vec![0.0; n];
    for (g, d, k, _) in kappa.pairs() {
        through.iter_mut().for_each(|t| *t = 0.0);
        for (l, br) in case.in_service_branches() {
            let tau = ptdf.pair(l, g, d).abs();
            through[br.from] += tau;
            through[br.to] += tau;
        }
        for v in 0..n {
            if v != g && v != d {
                scores[v] += k * through[v];
            }
        }
    }
    scores.iter_mut().for_each(|s| *s *= 0.5);
    NodeScoreVector::from_scores(Criterion::ExtendedBetweenness, case.bus_ids(), scores)
}
