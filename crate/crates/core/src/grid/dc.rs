use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use super::case::GridCase;
use crate::{Error, Result};

/// Nodal susceptance matrix and signed branch incidence of the DC model.
///
/// Entries are per-unit (`b = 1/x`). Out-of-service branches contribute
/// nothing and keep an all-zero incidence row.
#[derive(Debug, Clone)]
pub struct SusceptanceSystem {
    pub bus_matrix: DMatrix<f64>,
    /// `L x N`, `+1` at the from bus and `-1` at the to bus.
    pub branch_incidence: DMatrix<f64>,
    pub slack: usize,
}

pub fn build_susceptance(case: &GridCase, slack: usize) -> Result<SusceptanceSystem> {
    let n = case.bus_count();
    if slack >= n {
        return Err(Error::Domain(format!("slack index {slack} out of range 0..{n}")));
    }
    Ok(SusceptanceSystem {
        bus_matrix: bus_susceptance(case),
        branch_incidence: incidence(case),
        slack,
    })
}

pub(crate) fn bus_susceptance(case: &GridCase) -> DMatrix<f64> {
    let n = case.bus_count();
    let mut b = DMatrix::zeros(n, n);
    for (_, br) in case.in_service_branches() {
        let y = br.susceptance();
        b[(br.from, br.from)] += y;
        b[(br.to, br.to)] += y;
        b[(br.from, br.to)] -= y;
        b[(br.to, br.from)] -= y;
    }
    b
}

fn incidence(case: &GridCase) -> DMatrix<f64> {
    let mut a = DMatrix::zeros(case.branch_count(), case.bus_count());
    for (l, br) in case.in_service_branches() {
        a[(l, br.from)] = 1.0;
        a[(l, br.to)] = -1.0;
    }
    a
}

/// Factorisation of the bus matrix with the slack row and column removed.
pub(crate) struct ReducedFactor {
    slack: usize,
    chol: Cholesky<f64, Dyn>,
}

impl ReducedFactor {
    pub(crate) fn new(bus_matrix: &DMatrix<f64>, slack: usize) -> Result<Self> {
        let reduced = bus_matrix.clone().remove_row(slack).remove_column(slack);
        let chol = Cholesky::new(reduced).ok_or_else(|| {
            Error::Singular("slack-reduced susceptance matrix is not positive definite (islanded network?)".into())
        })?;
        Ok(Self { slack, chol })
    }

    /// Solves `B θ = p` with `θ[slack] = 0`. The slack entry of `p` is
    /// ignored, which makes the slack absorb any imbalance.
    pub(crate) fn solve(&self, p: &[f64]) -> Vec<f64> {
        let rhs: DVector<f64> = DVector::from_iterator(
            p.len() - 1,
            p.iter()
                .enumerate()
                .filter(|(i, _)| *i != self.slack)
                .map(|(_, v)| *v),
        );
        let x = self.chol.solve(&rhs);
        let mut theta = Vec::with_capacity(p.len());
        let mut it = x.iter();
        for i in 0..p.len() {
            theta.push(if i == self.slack { 0.0 } else { *it.next().unwrap() });
        }
        theta
    }

    /// Inverse of the reduced matrix embedded in `N x N` with a zero slack
    /// row and column.
    pub(crate) fn embedded_inverse(&self) -> DMatrix<f64> {
        let inv = self.chol.inverse();
        let n = inv.nrows() + 1;
        let mut full = DMatrix::zeros(n, n);
        let map = |i: usize| if i < self.slack { i } else { i + 1 };
        for r in 0..n - 1 {
            for c in 0..n - 1 {
                full[(map(r), map(c))] = inv[(r, c)];
            }
        }
        full
    }
}

impl SusceptanceSystem {
    pub(crate) fn factor(&self) -> Result<ReducedFactor> {
        ReducedFactor::new(&self.bus_matrix, self.slack)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DcSolution {
    /// Bus voltage angles in radians, zero at the slack.
    pub angles: Vec<f64>,
    /// Branch flows in MW, positive from `from` to `to`. Zero for
    /// out-of-service branches.
    pub flows: Vec<f64>,
}

/// Solves the DC power flow for injections given in MW. The slack bus
/// absorbs whatever the other injections leave unbalanced.
pub fn dc_power_flow(case: &GridCase, injections_mw: &[f64], slack: usize) -> Result<DcSolution> {
    if injections_mw.len() != case.bus_count() {
        return Err(Error::Domain(format!(
            "expected {} injections, got {}",
            case.bus_count(),
            injections_mw.len()
        )));
    }
    let system = build_susceptance(case, slack)?;
    let factor = system.factor()?;
    let base = case.base_mva();
    let p_pu: Vec<f64> = injections_mw.iter().map(|p| p / base).collect();
    let angles = factor.solve(&p_pu);
    let flows = branch_flows(case, &angles);
    Ok(DcSolution { angles, flows })
}

/// Branch flows in MW implied by a set of angles.
pub fn branch_flows(case: &GridCase, angles: &[f64]) -> Vec<f64> {
    let base = case.base_mva();
    case.branches()
        .iter()
        .map(|br| {
            if br.in_service {
                (angles[br.from] - angles[br.to]) / br.reactance * base
            } else {
                0.0
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{ieee30, Branch, Bus};

    fn triangle() -> GridCase {
        GridCase::new(
            "tri",
            100.0,
            vec![
                Bus::new(0, Some(10.0), 0.0),
                Bus::new(1, None, 10.0),
                Bus::new(2, None, 0.0),
            ],
            vec![
                Branch::new(0, 1, 1.0, 90.0),
                Branch::new(1, 2, 1.0, 90.0),
                Branch::new(0, 2, 1.0, 90.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn two_bus_matrix() {
        let case = GridCase::new(
            "two",
            100.0,
            vec![Bus::new(0, Some(1.0), 0.0), Bus::new(1, None, 1.0)],
            vec![Branch::new(0, 1, 0.5, 10.0)],
        )
        .unwrap();
        let s = build_susceptance(&case, 0).unwrap();
        assert_eq!(s.bus_matrix, DMatrix::from_row_slice(2, 2, &[2.0, -2.0, -2.0, 2.0]));
        assert_eq!(s.branch_incidence, DMatrix::from_row_slice(1, 2, &[1.0, -1.0]));
    }

    #[test]
    fn triangle_diagonal_is_degree() {
        let s = build_susceptance(&triangle(), 0).unwrap();
        for i in 0..3 {
            assert_eq!(s.bus_matrix[(i, i)], 2.0);
        }
    }

    #[test]
    fn case30_rows_sum_to_zero_and_symmetric() {
        let s = build_susceptance(&ieee30(), 0).unwrap();
        assert_eq!(s.bus_matrix.nrows(), 30);
        for r in 0..30 {
            assert!(s.bus_matrix.row(r).sum().abs() < 1e-9);
            for c in 0..30 {
                assert_eq!(s.bus_matrix[(r, c)], s.bus_matrix[(c, r)]);
            }
        }
        for l in 0..s.branch_incidence.nrows() {
            assert_eq!(s.branch_incidence.row(l).sum(), 0.0);
        }
    }

    #[test]
    fn two_bus_flow() {
        let case = GridCase::new(
            "two",
            100.0,
            vec![Bus::new(0, Some(100.0), 0.0), Bus::new(1, None, 100.0)],
            vec![Branch::new(0, 1, 0.1, 150.0)],
        )
        .unwrap();
        let sol = dc_power_flow(&case, &[100.0, -100.0], 0).unwrap();
        assert!((sol.flows[0] - 100.0).abs() < 1e-10);
    }

    #[test]
    fn zero_injection_zero_flow() {
        let sol = dc_power_flow(&triangle(), &[0.0; 3], 1).unwrap();
        assert!(sol.angles.iter().all(|&a| a == 0.0));
        assert!(sol.flows.iter().all(|&f| f == 0.0));
    }

    #[test]
    fn case30_nodal_balance() {
        let case = ieee30();
        let slack = case.default_slack();
        let mut p = case.injections_mw();
        let sol = dc_power_flow(&case, &p, slack).unwrap();
        // the slack entry is whatever balances the rest
        p[slack] = -p.iter().enumerate().filter(|(i, _)| *i != slack).map(|(_, v)| v).sum::<f64>();
        let mut net = vec![0.0; case.bus_count()];
        for (br, f) in case.branches().iter().zip(&sol.flows) {
            net[br.from] += f;
            net[br.to] -= f;
        }
        for (n, pi) in net.iter().zip(&p) {
            assert!(((n - pi) / case.base_mva()).abs() < 1e-8);
        }
    }

    #[test]
    fn islanded_network_is_singular() {
        let case = GridCase::new_unchecked(
            "split",
            100.0,
            vec![
                Bus::new(0, Some(1.0), 0.0),
                Bus::new(1, None, 1.0),
                Bus::new(2, None, 1.0),
            ],
            vec![Branch::new(0, 1, 0.1, 1.0)],
        );
        assert!(matches!(
            dc_power_flow(&case, &[1.0, -1.0, 0.0], 0),
            Err(Error::Singular(_))
        ));
    }
}
