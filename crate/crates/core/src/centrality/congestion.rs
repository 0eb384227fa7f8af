use super::{Criterion, NodeScoreVector};
use crate::grid::{dc_power_flow, GridCase};
use crate::{Error, Result};

/// Scores each node by the loading (|flow| / rating) of its most congested
/// incident branch under the case's own dispatch.
pub fn congestion_criterion(case: &GridCase) -> Result<NodeScoreVector> {
    if case.total_generation() <= 0.0 {
        return Err(Error::Config(
            "congestion ranking needs a base-case dispatch (no generation in case)".into(),
        ));
    }
    let flow = dc_power_flow(case, &case.injections_mw(), case.default_slack())?;
    let mut scores = vec![0.0_f64; case.bus_count()];
    for (l, br) in case.in_service_branches() {
        let loading = flow.flows[l].abs() / br.capacity;
        scores[br.from] = scores[br.from].max(loading);
        scores[br.to] = scores[br.to].max(loading);
    }
    Ok(NodeScoreVector::from_scores(Criterion::Congestion, case.bus_ids(), scores))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{Branch, Bus};

    #[test]
    fn two_bus_half_loaded() {
        let case = GridCase::new(
            "two",
            100.0,
            vec![Bus::new(1, Some(40.0), 0.0), Bus::new(2, None, 40.0)],
            vec![Branch::new(0, 1, 0.1, 80.0)],
        )
        .unwrap();
        let c = congestion_criterion(&case).unwrap();
        assert!((c.scores[0] - 0.5).abs() < 1e-12);
        assert!((c.scores[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn unloaded_spur_scores_zero() {
        let case = GridCase::new(
            "spur",
            100.0,
            vec![
                Bus::new(1, Some(40.0), 0.0),
                Bus::new(2, None, 40.0),
                Bus::new(3, None, 0.0),
            ],
            vec![Branch::new(0, 1, 0.1, 80.0), Branch::new(1, 2, 0.1, 80.0)],
        )
        .unwrap();
        let c = congestion_criterion(&case).unwrap();
        assert!(c.scores[2].abs() < 1e-12);
    }

    #[test]
    fn needs_dispatch() {
        let case = GridCase::new(
            "idle",
            100.0,
            vec![Bus::new(1, Some(0.0), 0.0), Bus::new(2, None, 10.0)],
            vec![Branch::new(0, 1, 0.1, 80.0)],
        )
        .unwrap();
        assert!(matches!(congestion_criterion(&case), Err(Error::Config(_))));
    }
}
