use nalgebra::DMatrix;

use super::case::GridCase;
use super::dc::build_susceptance;
use crate::Result;

/// Branch-by-bus DC sensitivities: entry `(l, v)` is the per-unit flow on
/// branch `l` for a unit injection at `v` withdrawn at the slack.
///
/// Callers should use [`PtdfMatrix::pair`], which does not depend on the
/// slack choice.
#[derive(Debug, Clone)]
pub struct PtdfMatrix {
    pub values: DMatrix<f64>,
    pub slack: usize,
}

impl PtdfMatrix {
    pub fn branch_count(&self) -> usize {
        self.values.nrows()
    }

    /// Pair sensitivity `τ_l^{gd}`: flow on `branch` per unit transferred
    /// from `g` to `d`.
    pub fn pair(&self, branch: usize, g: usize, d: usize) -> f64 {
        self.values[(branch, g)] - self.values[(branch, d)]
    }

    /// Branch flows in MW for MW injections. The slack column is zero, so
    /// any imbalance is implicitly taken at the slack.
    pub fn flows(&self, injections_mw: &[f64]) -> Vec<f64> {
        (0..self.values.nrows())
            .map(|l| {
                self.values
                    .row(l)
                    .iter()
                    .zip(injections_mw)
                    .map(|(a, p)| a * p)
                    .sum()
            })
            .collect()
    }
}

/// Computes the PTDF matrix by factoring the slack-reduced bus matrix.
pub fn compute_ptdf(case: &GridCase, slack: usize) -> Result<PtdfMatrix> {
    let system = build_susceptance(case, slack)?;
    let inverse = system.factor()?.embedded_inverse();
    let n = case.bus_count();
    let mut values = DMatrix::zeros(case.branch_count(), n);
    for (l, br) in case.in_service_branches() {
        let y = br.susceptance();
        for v in 0..n {
            values[(l, v)] = y * (inverse[(br.from, v)] - inverse[(br.to, v)]);
        }
    }
    Ok(PtdfMatrix { values, slack })
}
