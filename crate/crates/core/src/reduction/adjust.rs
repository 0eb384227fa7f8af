use std::collections::HashMap;

use super::{NodeStatus, ReducedCase};
use crate::graph::SimpleGraph;
use crate::grid::{bus_susceptance, dc_power_flow, Bus, GridCase, ReducedFactor};
use crate::{Error, Result};

/// Moves the output of every eliminated generator to the retained bus with
/// the shortest reactance-weighted path in the full network. Ties go to the
/// lower bus id.
pub fn relocate_generators(full: &GridCase, reduced: &ReducedCase) -> ReducedCase {
    let reduced_index: HashMap<_, _> = reduced
        .case
        .bus_ids()
        .into_iter()
        .enumerate()
        .map(|(i, id)| (id, i))
        .collect();
    let moved: Vec<usize> = full
        .generators()
        .into_iter()
        .filter(|&g| !reduced_index.contains_key(&full.bus(g).id))
        .collect();
    if moved.is_empty() {
        return reduced.clone();
    }

    let graph = SimpleGraph::reactance_weighted(full, 1.0);
    let mut out = reduced.clone();
    let mut buses: Vec<Bus> = reduced.case.buses().to_vec();
    for g in moved {
        let dist = graph.shortest_paths(g).dist;
        let mut best: Option<(f64, usize)> = None;
        for (v, d) in dist.iter().enumerate() {
            let Some(&target) = reduced_index.get(&full.bus(v).id) else {
                continue;
            };
            let closer = match best {
                None => true,
                Some((bd, bt)) => {
                    let tol = 1e-12 * bd.max(1.0);
                    *d < bd - tol || ((*d - bd).abs() <= tol && buses[target].id < buses[bt].id)
                }
            };
            if d.is_finite() && closer {
                best = Some((*d, target));
            }
        }
        let Some((_, target)) = best else {
            out.warnings
                .push(format!("generator at bus {} has no path to a retained bus", full.bus(g).id));
            continue;
        };
        let mw = full.bus(g).generation_mw();
        buses[target].generation = Some(buses[target].generation_mw() + mw);
        let from = full.bus(g).id;
        let to = buses[target].id;
        out.generator_map.insert(from, to);
        out.status.insert(from, NodeStatus::Relocated { to });
    }
    out.case = GridCase::new_unchecked(
        reduced.case.name(),
        reduced.case.base_mva(),
        buses,
        reduced.case.branches().to_vec(),
    );
    out
}

/// Sets each retained bus's load so that the reduced network, under its
/// own DC power flow, reproduces the full model's angles at the retained
/// buses: `load = generation - B' θ_retained`.
///
/// `slack` is a full-case bus index and must be retained. It keeps the
/// imbalance of the full case so total generation minus total load is
/// unchanged.
pub fn redistribute_loads(full: &GridCase, reduced: &ReducedCase, slack: usize) -> Result<ReducedCase> {
    let slack_id = full.bus(slack).id;
    let reduced_slack = reduced.case.index_of(slack_id).ok_or_else(|| {
        Error::Domain(format!("slack bus {slack_id} is not retained"))
    })?;
    let b = bus_susceptance(&reduced.case);
    ReducedFactor::new(&b, reduced_slack).map_err(|_| {
        Error::Singular("reduced network susceptance matrix is singular".into())
    })?;

    let full_flow = dc_power_flow(full, &full.injections_mw(), slack)?;
    let theta: Vec<f64> = reduced
        .case
        .buses()
        .iter()
        .map(|bus| {
            full.index_of(bus.id)
                .map(|i| full_flow.angles[i])
                .ok_or_else(|| Error::Domain(format!("bus {} is not in the full case", bus.id)))
        })
        .collect::<Result<_>>()?;
    let base = full.base_mva();
    let imbalance = full.total_generation() - full.total_load();

    let mut out = reduced.clone();
    let mut buses = reduced.case.buses().to_vec();
    for (i, bus) in buses.iter_mut().enumerate() {
        let p: f64 = (0..theta.len()).map(|j| b[(i, j)] * theta[j]).sum::<f64>() * base;
        let mut load = bus.generation_mw() - p;
        if i == reduced_slack {
            load -= imbalance;
        }
        bus.load = load;
        let original = full.bus(full.index_of(bus.id).unwrap()).load;
        out.load_adjustments.insert(bus.id, load - original);
    }
    out.case = GridCase::new_unchecked(
        reduced.case.name(),
        reduced.case.base_mva(),
        buses,
        reduced.case.branches().to_vec(),
    );
    Ok(out)
}
