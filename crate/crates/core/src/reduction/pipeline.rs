use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{
    prune_abnormal_branches, redistribute_loads, relocate_generators, select_nodes, ward_eliminate,
    EquivalentBranch, NodePartition, NodeStatus, PrunedBranch, ReducedCase,
};
use crate::centrality::{Criterion, NodeScoreVector};
use crate::grid::{dc_power_flow, BusId, GridCase};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReductionConfig {
    /// Equivalent branches above this reactance (per-unit) are abnormal.
    pub x_max: f64,
    /// Keep every generator bus, re-running the elimination without them.
    /// When off, eliminated generation is relocated instead.
    pub retain_generators: bool,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        Self {
            x_max: 1e3,
            retain_generators: true,
        }
    }
}

/// Agreement between the reduced and full DC power flows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FlowCheck {
    /// Largest retained-bus angle difference (radians).
    pub max_angle_mismatch: f64,
    /// Largest flow difference on retained original branches (MW).
    pub max_flow_mismatch_mw: f64,
}

impl FlowCheck {
    /// Solves both models with the same slack and compares them.
    pub fn evaluate(full: &GridCase, reduced: &ReducedCase, slack_id: BusId) -> Result<Self> {
        let full_slack = full.index_of(slack_id).unwrap_or(0);
        let red_slack = reduced.case.index_of(slack_id).unwrap_or(0);
        let f = dc_power_flow(full, &full.injections_mw(), full_slack)?;
        let r = dc_power_flow(&reduced.case, &reduced.case.injections_mw(), red_slack)?;
        let mut max_angle = 0.0_f64;
        for (i, bus) in reduced.case.buses().iter().enumerate() {
            if let Some(j) = full.index_of(bus.id) {
                max_angle = max_angle.max((r.angles[i] - f.angles[j]).abs());
            }
        }
        let mut max_flow = 0.0_f64;
        for (i, src) in reduced.source_branch.iter().enumerate() {
            if let Some(l) = src {
                max_flow = max_flow.max((r.flows[i] - f.flows[*l]).abs());
            }
        }
        Ok(Self {
            max_angle_mismatch: max_angle,
            max_flow_mismatch_mw: max_flow,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReductionReport {
    pub case_name: String,
    pub criterion: Criterion,
    pub eliminate_count: usize,
    pub config: ReductionConfig,
    /// Buses chosen by the ranking.
    pub selected: Vec<BusId>,
    /// Selected generator buses put back into the retained set.
    pub generators_restored: Vec<BusId>,
    pub eliminated: Vec<BusId>,
    pub first_pass_equivalents: Vec<EquivalentBranch>,
    pub equivalent_branches: Vec<EquivalentBranch>,
    pub pruned: Vec<PrunedBranch>,
    pub generator_map: BTreeMap<BusId, BusId>,
    pub slack: BusId,
    pub flow_check: FlowCheck,
    pub generation_mw: (f64, f64),
    pub load_mw: (f64, f64),
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct ReductionOutcome {
    pub reduced: ReducedCase,
    pub report: ReductionReport,
}

/// Full reduction: select, eliminate, prune, handle generators, match
/// loads to the full DC solution.
pub fn reduce_pipeline(
    case: &GridCase,
    criterion: &NodeScoreVector,
    k: usize,
    config: &ReductionConfig,
) -> Result<ReductionOutcome> {
    let selection = select_nodes(case, criterion, k)?;
    let mut warnings = Vec::new();
    if !selection.retained_connected() {
        warnings.push("retained buses are not connected among themselves; equivalent branches join them".to_string());
    }
    let first = prune_abnormal_branches(&ward_eliminate(case, &selection)?, config.x_max);
    let first_pass_equivalents = first.equivalent_branches();

    let mut restored = Vec::new();
    let mut reduced = if config.retain_generators {
        let (gens, rest): (Vec<usize>, Vec<usize>) = selection
            .eliminated()
            .iter()
            .partition(|&&e| case.bus(e).is_generator());
        if gens.is_empty() {
            first
        } else {
            restored = gens.iter().map(|&g| case.bus(g).id).collect();
            let partition = NodePartition::new(case, rest)?;
            let mut second = prune_abnormal_branches(&ward_eliminate(case, &partition)?, config.x_max);
            for id in &restored {
                second.status.insert(*id, NodeStatus::RetainedGenerator);
            }
            second
        }
    } else {
        relocate_generators(case, &first)
    };

    let slack_id = if reduced.case.index_of(case.bus(case.default_slack()).id).is_some() {
        case.bus(case.default_slack()).id
    } else {
        reduced.case.bus(reduced.case.default_slack()).id
    };
    let slack = case.index_of(slack_id).expect("retained bus is in the full case");
    reduced = redistribute_loads(case, &reduced, slack)?;
    reduced.case.validate()?;
    let flow_check = FlowCheck::evaluate(case, &reduced, slack_id)?;
    warnings.extend(reduced.warnings.iter().cloned());

    let report = ReductionReport {
        case_name: case.name().to_string(),
        criterion: criterion.criterion,
        eliminate_count: k,
        config: *config,
        selected: selection.eliminated().iter().map(|&i| case.bus(i).id).collect(),
        generators_restored: restored,
        eliminated: reduced.eliminated.clone(),
        first_pass_equivalents,
        equivalent_branches: reduced.equivalent_branches(),
        pruned: reduced.pruned.clone(),
        generator_map: reduced.generator_map.clone(),
        slack: slack_id,
        flow_check,
        generation_mw: (case.total_generation(), reduced.case.total_generation()),
        load_mw: (case.total_load(), reduced.case.total_load()),
        warnings,
    };
    Ok(ReductionOutcome { reduced, report })
}

fn ids(list: &[BusId]) -> String {
    if list.is_empty() {
        return "-".into();
    }
    list.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(", ")
}

fn branch_lines(f: &mut fmt::Formatter<'_>, list: &[EquivalentBranch]) -> fmt::Result {
    if list.is_empty() {
        return writeln!(f, "  -");
    }
    for b in list {
        writeln!(f, "  {}-{}  x = {:.6} pu  rate = {} MW (synthetic)", b.from, b.to, b.x_pu, b.rate_mw)?;
    }
    Ok(())
}

impl fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Reduction of {} by {} (k = {})", self.case_name, self.criterion, self.eliminate_count)?;
        writeln!(
            f,
            "x_max = {} pu, retain generators = {}",
            self.config.x_max, self.config.retain_generators
        )?;
        writeln!(f, "selected for elimination: {}", ids(&self.selected))?;
        writeln!(f, "generator buses restored: {}", ids(&self.generators_restored))?;
        writeln!(f, "eliminated: {}", ids(&self.eliminated))?;
        writeln!(f, "equivalent branches:")?;
        branch_lines(f, &self.equivalent_branches)?;
        if self.first_pass_equivalents != self.equivalent_branches {
            writeln!(f, "first-pass equivalent branches:")?;
            branch_lines(f, &self.first_pass_equivalents)?;
        }
        writeln!(f, "pruned branches:")?;
        if self.pruned.is_empty() {
            writeln!(f, "  -")?;
        }
        for p in &self.pruned {
            writeln!(f, "  {}-{}  x = {} pu", p.from, p.to, p.x_pu)?;
        }
        writeln!(f, "generator map:")?;
        for (from, to) in &self.generator_map {
            writeln!(f, "  {from} -> {to}")?;
        }
        writeln!(f, "slack bus: {}", self.slack)?;
        writeln!(
            f,
            "flow check: max angle mismatch {:.3e} rad, max flow mismatch {:.3e} MW",
            self.flow_check.max_angle_mismatch, self.flow_check.max_flow_mismatch_mw
        )?;
        writeln!(
            f,
            "generation: {:.4} -> {:.4} MW; load: {:.4} -> {:.4} MW",
            self.generation_mw.0, self.generation_mw.1, self.load_mw.0, self.load_mw.1
        )?;
        for w in &self.warnings {
            writeln!(f, "warning: {w}")?;
        }
        Ok(())
    }
}
