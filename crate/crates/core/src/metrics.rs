//! Topological properties of a network and relative errors between a full
//! model and its reductions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::centrality::graph_efficiency;
use crate::graph::SimpleGraph;
use crate::grid::GridCase;

/// How branch reactances become dimensionless edge weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// Divide by the largest branch reactance of the network.
    #[default]
    MaxReactance,
    /// Divide by the mean branch reactance of the network.
    MeanReactance,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TopologyReport {
    /// Unweighted global efficiency.
    pub e_glob: f64,
    pub density: f64,
    pub avg_path_weighted: f64,
    pub avg_path_unweighted: f64,
    pub closeness_weighted: f64,
    pub closeness_unweighted: f64,
    /// Mean node betweenness, weighted paths.
    pub betweenness_weighted: f64,
    /// Mean node betweenness, hop-count paths.
    pub betweenness_unweighted: f64,
    pub avg_degree: f64,
}

/// Short names in report order.
pub const METRIC_NAMES: [&str; 9] = ["E_glob", "rho", "l_w", "l_0", "C_w", "C_0", "B_w", "B_0", "d_avg"];

impl TopologyReport {
    /// Values in the order of [`METRIC_NAMES`].
    pub fn values(&self) -> [f64; 9] {
        [
            self.e_glob,
            self.density,
            self.avg_path_weighted,
            self.avg_path_unweighted,
            self.closeness_weighted,
            self.closeness_unweighted,
            self.betweenness_weighted,
            self.betweenness_unweighted,
            self.avg_degree,
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        METRIC_NAMES
            .iter()
            .position(|m| *m == name)
            .map(|i| self.values()[i])
    }
}

pub fn topology_report(case: &GridCase) -> TopologyReport {
    topology_report_with(case, Normalization::default())
}

/// Weighted metrics use `|x| / x_norm` as edge length. Reduced networks can
/// keep a negative equivalent reactance when it is needed for
/// connectivity, hence the absolute value.
pub fn topology_report_with(case: &GridCase, normalization: Normalization) -> TopologyReport {
    let xs: Vec<f64> = case.in_service_branches().map(|(_, b)| b.reactance.abs()).collect();
    let norm = match normalization {
        Normalization::MaxReactance => xs.iter().copied().fold(0.0, f64::max),
        Normalization::MeanReactance => xs.iter().sum::<f64>() / xs.len().max(1) as f64,
    };
    let norm = if norm > 0.0 { norm } else { 1.0 };
    let hop = SimpleGraph::unweighted(case);
    let weighted = SimpleGraph::from_edges(
        case.bus_count(),
        case.in_service_branches()
            .map(|(_, b)| (b.from, b.to, b.reactance.abs() / norm)),
    );

    let n = case.bus_count();
    let pairs = (n * n.saturating_sub(1) / 2) as f64;
    let edges = hop.edge_count() as f64;
    let (l_0, c_0) = path_and_closeness(&hop);
    let (l_w, c_w) = path_and_closeness(&weighted);
    TopologyReport {
        e_glob: graph_efficiency(&hop),
        density: if pairs > 0.0 { edges / pairs } else { 0.0 },
        avg_path_weighted: l_w,
        avg_path_unweighted: l_0,
        closeness_weighted: c_w,
        closeness_unweighted: c_0,
        betweenness_weighted: mean(&weighted.betweenness()),
        betweenness_unweighted: mean(&hop.betweenness()),
        avg_degree: if n > 0 { 2.0 * edges / n as f64 } else { 0.0 },
    }
}

fn mean(v: &[f64]) -> f64 {
    if v.is_empty() {
        0.0
    } else {
        v.iter().sum::<f64>() / v.len() as f64
    }
}

/// Mean shortest-path length over reachable unordered pairs, and mean over
/// nodes of `1 / Σ_t d(v, t)`.
fn path_and_closeness(graph: &SimpleGraph) -> (f64, f64) {
    let n = graph.node_count();
    let mut total = 0.0;
    let mut count = 0usize;
    let mut closeness = 0.0;
    for s in 0..n {
        let dist = graph.shortest_paths(s).dist;
        let sum: f64 = dist
            .iter()
            .enumerate()
            .filter(|&(t, d)| t != s && d.is_finite())
            .map(|(_, d)| *d)
            .sum();
        count += dist
            .iter()
            .enumerate()
            .filter(|&(t, d)| t != s && d.is_finite())
            .count();
        total += sum;
        if sum > 0.0 {
            closeness += 1.0 / sum;
        }
    }
    let l = if count > 0 { total / count as f64 } else { 0.0 };
    let c = if n > 0 { closeness / n as f64 } else { 0.0 };
    (l, c)
}

/// Per-metric relative error `|reduced - full| / |full|`. `None` where the
/// full value is zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorIndex {
    pub errors: Vec<(String, Option<f64>)>,
}

impl ErrorIndex {
    pub fn get(&self, name: &str) -> Option<f64> {
        self.errors.iter().find(|(m, _)| m == name).and_then(|(_, e)| *e)
    }

    /// Mean over the defined errors.
    pub fn mean(&self) -> Option<f64> {
        let defined: Vec<f64> = self.errors.iter().filter_map(|(_, e)| *e).collect();
        (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64)
    }
}

pub fn relative_errors(full: &TopologyReport, reduced: &TopologyReport) -> ErrorIndex {
    let errors = METRIC_NAMES
        .iter()
        .zip(full.values().iter().zip(reduced.values()))
        .map(|(name, (f, r))| {
            let e = (*f != 0.0).then(|| (r - f).abs() / f.abs());
            (name.to_string(), e)
        })
        .collect();
    ErrorIndex { errors }
}

/// `metric,ori,eq1,...`; `models` pairs a column label with its report.
pub fn topology_csv(models: &[(String, TopologyReport)]) -> String {
    let mut out = String::from("metric");
    for (label, _) in models {
        out.push(',');
        out.push_str(label);
    }
    out.push('\n');
    for (i, name) in METRIC_NAMES.iter().enumerate() {
        out.push_str(name);
        for (_, report) in models {
            let _ = write!(out, ",{}", report.values()[i]);
        }
        out.push('\n');
    }
    out
}

/// `metric,model,rel_error`; undefined errors are written as an empty field.
pub fn errors_csv(models: &[(String, ErrorIndex)]) -> String {
    let mut out = String::from("metric,model,rel_error\n");
    for name in METRIC_NAMES {
        for (label, index) in models {
            let value = index
                .errors
                .iter()
                .find(|(m, _)| m == name)
                .and_then(|(_, e)| *e)
                .map(|e| e.to_string())
                .unwrap_or_default();
            let _ = writeln!(out, "{name},{label},{value}");
        }
    }
    out
}
