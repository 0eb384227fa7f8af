//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Every export returns a JSON document; the `*_json` functions behind them
//! are plain Rust so they can be tested natively.

use netreduce_core::centrality::{
    congestion_criterion, extended_betweenness, net_ability, transmission_capacity, CriterionCode, NodeScoreVector,
};
use netreduce_core::evidential::{
    combine_evidence, comprehensive_rank, encode_ranking, evaluate_utility, AttributeWeights, GradeFrame,
};
use netreduce_core::grid::{compute_ptdf, ieee30};
use netreduce_core::metrics::{relative_errors, topology_report, TopologyReport, METRIC_NAMES};
use netreduce_core::reduction::{reduce_pipeline, ReductionConfig};
use netreduce_core::GridCase;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

type Result<T> = std::result::Result<T, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn parse_ranks(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|s| s.trim().parse::<usize>().map_err(|_| format!("not a rank: {s:?}")))
        .collect()
}

/// Fuses two rankings of the same nodes, e.g. `"3,2,1"` and `"1,2,3"`.
pub fn fuse_rankings_json(first: &str, second: &str, weight_first: f64, beta: f64) -> Result<String> {
    let a = parse_ranks(first)?;
    let b = parse_ranks(second)?;
    if a.len() != b.len() {
        return Err("both rankings need the same number of nodes".into());
    }
    let n = a.len();
    for ranks in [&a, &b] {
        let mut sorted = (*ranks).clone();
        sorted.sort_unstable();
        if sorted != (1..=n).collect::<Vec<_>>() {
            return Err(format!("each ranking must be a permutation of 1..{n}"));
        }
    }
    if !(0.0..=1.0).contains(&weight_first) {
        return Err("the weight must lie in [0, 1]".into());
    }
    let frame = GradeFrame::new(n).map_err(err)?;
    let ea = encode_ranking(&a, frame, beta).map_err(err)?;
    let eb = encode_ranking(&b, frame, beta).map_err(err)?;
    let weights = AttributeWeights::new(vec![weight_first, 1.0 - weight_first]).map_err(err)?;
    let mut nodes = Vec::with_capacity(n);
    for i in 0..n {
        let c = combine_evidence(&[ea[i].clone(), eb[i].clone()], &weights).map_err(err)?;
        let u = evaluate_utility(&c);
        nodes.push(json!({
            "node": i + 1,
            "beliefs": c.combined_beliefs,
            "uncertainty": c.residual_uncertainty,
            "u_min": u.u_min,
            "u_max": u.u_max,
            "u_avg": u.u_avg,
        }));
    }
    Ok(json!({ "grades": n, "nodes": nodes }).to_string())
}

fn network(case: &GridCase) -> Value {
    let buses: Vec<Value> = case
        .buses()
        .iter()
        .map(|b| json!({ "id": b.id, "generator": b.is_generator(), "load": b.load }))
        .collect();
    let branches: Vec<Value> = case
        .in_service_branches()
        .map(|(_, br)| json!({ "from": case.bus(br.from).id, "to": case.bus(br.to).id, "x": br.reactance }))
        .collect();
    json!({ "buses": buses, "branches": branches })
}

fn all_criteria(case: &GridCase, weights: &AttributeWeights, beta: f64) -> Result<Vec<NodeScoreVector>> {
    let ptdf = compute_ptdf(case, case.default_slack()).map_err(err)?;
    let kappa = transmission_capacity(case, &ptdf).map_err(err)?;
    let c2 = extended_betweenness(case, &ptdf, &kappa);
    let c3 = net_ability(case).map_err(err)?;
    let c4 = congestion_criterion(case).map_err(err)?;
    let c1 = comprehensive_rank(&[c2.clone(), c3.clone()], weights, beta).map_err(err)?.ranking;
    Ok(vec![c1, c2, c3, c4])
}

/// Scores and ranks the built-in 30-bus case under all four criteria.
pub fn rank_grid_json(weight_c2: f64, beta: f64) -> Result<String> {
    if !(0.0..=1.0).contains(&weight_c2) {
        return Err("the weight must lie in [0, 1]".into());
    }
    let case = ieee30();
    let weights = AttributeWeights::new(vec![weight_c2, 1.0 - weight_c2]).map_err(err)?;
    let vectors = all_criteria(&case, &weights, beta)?;
    let criteria: Vec<Value> = CriterionCode::ALL
        .iter()
        .zip(&vectors)
        .map(|(code, v)| json!({ "code": code.to_string(), "name": v.criterion.to_string(), "ids": v.ids, "scores": v.scores, "ranks": v.ranks }))
        .collect();
    Ok(json!({ "network": network(&case), "criteria": criteria }).to_string())
}

fn metrics(report: &TopologyReport) -> Value {
    METRIC_NAMES.iter().zip(report.values()).map(|(n, v)| (n.to_string(), json!(v))).collect()
}

/// Reduces the built-in 30-bus case by one criterion.
pub fn reduce_grid_json(criterion: &str, k: usize, x_max: f64, retain_generators: bool) -> Result<String> {
    let code: CriterionCode = criterion.parse().map_err(err)?;
    let case = ieee30();
    let weights = AttributeWeights::equal(2).map_err(err)?;
    let vectors = all_criteria(&case, &weights, 0.9)?;
    let ranking = &vectors[code.number() - 1];
    let config = ReductionConfig { x_max, retain_generators };
    let outcome = reduce_pipeline(&case, ranking, k, &config).map_err(err)?;
    let full = topology_report(&case);
    let reduced = topology_report(&outcome.reduced.case);
    let errors: Vec<Value> = relative_errors(&full, &reduced)
        .errors
        .iter()
        .map(|(name, e)| json!({ "metric": name, "error": e }))
        .collect();
    Ok(json!({
        "full": network(&case),
        "reduced": network(&outcome.reduced.case),
        "eliminated": outcome.reduced.eliminated,
        "equivalents": outcome.reduced.equivalent_branches(),
        "metrics": { "full": metrics(&full), "reduced": metrics(&reduced) },
        "errors": errors,
        "report": outcome.report.to_string(),
    })
    .to_string())
}

#[wasm_bindgen]
pub fn fuse_rankings(first: &str, second: &str, weight_first: f64, beta: f64) -> std::result::Result<String, JsValue> {
    fuse_rankings_json(first, second, weight_first, beta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn rank_grid(weight_c2: f64, beta: f64) -> std::result::Result<String, JsValue> {
    rank_grid_json(weight_c2, beta).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn reduce_grid(criterion: &str, k: usize, x_max: f64, retain_generators: bool) -> std::result::Result<String, JsValue> {
    reduce_grid_json(criterion, k, x_max, retain_generators).map_err(|e| JsValue::from_str(&e))
}
