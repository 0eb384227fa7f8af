use std::collections::BTreeMap;

use nalgebra::{Cholesky, DMatrix, DVector};

use super::{NodePartition, NodeStatus, ReducedCase};
use crate::graph;
use crate::grid::{bus_susceptance, Branch, Bus, GridCase};
use crate::{Error, Result};

/// Kron-reduces the nodal susceptance matrix onto the retained buses.
///
/// Every retained pair that gains coupling through an eliminated island
/// receives one equivalent branch carrying exactly the added susceptance,
/// in parallel with any original branch between the pair. Original
/// retained-retained branches are kept as they are. Injections of the
/// eliminated buses are moved to retained buses with the Ward distribution
/// matrix `-B_re B_ee⁻¹` and folded into the retained loads.
///
/// An empty elimination set returns an electrically identical copy.
pub fn ward_eliminate(case: &GridCase, partition: &NodePartition) -> Result<ReducedCase> {
    let n = case.bus_count();
    if partition.bus_count() != n {
        return Err(Error::Domain("partition does not match the case".into()));
    }
    let retained = partition.retained();
    let eliminated = partition.eliminated();
    let full_b = bus_susceptance(case);

    let mut local = vec![usize::MAX; n];
    for (i, &r) in retained.iter().enumerate() {
        local[r] = i;
    }
    let mut elim_pos = vec![usize::MAX; n];
    for (i, &e) in eliminated.iter().enumerate() {
        elim_pos[e] = i;
    }

    // islands of eliminated buses and the retained buses they touch
    let islands = graph::components(
        eliminated.len(),
        case.in_service_branches()
            .filter(|(_, b)| elim_pos[b.from] != usize::MAX && elim_pos[b.to] != usize::MAX)
            .map(|(_, b)| (elim_pos[b.from], elim_pos[b.to])),
    );
    let mut island_of = vec![usize::MAX; n];
    for (k, island) in islands.iter().enumerate() {
        for &p in island {
            island_of[eliminated[p]] = k;
        }
    }
    // per island: retained neighbour -> summed rating of the interface branches
    let mut interface: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); islands.len()];
    for (_, br) in case.in_service_branches() {
        for (e, r) in [(br.from, br.to), (br.to, br.from)] {
            if island_of[e] != usize::MAX && local[r] != usize::MAX {
                *interface[island_of[e]].entry(local[r]).or_insert(0.0) += br.capacity;
            }
        }
    }
    for (k, island) in islands.iter().enumerate() {
        if interface[k].is_empty() {
            return Err(Error::FloatingIsland(
                island.iter().map(|&p| case.bus(eliminated[p]).id).collect(),
            ));
        }
    }

    let b_rr = select(&full_b, retained, retained);
    let (kron, shift_pu) = if eliminated.is_empty() {
        (b_rr.clone(), vec![0.0; retained.len()])
    } else {
        let b_ee = select(&full_b, eliminated, eliminated);
        let b_er = select(&full_b, eliminated, retained);
        let chol = Cholesky::new(b_ee).ok_or_else(|| {
            Error::Singular("eliminated susceptance block is not positive definite".into())
        })?;
        // X = B_ee⁻¹ B_er, so B' = B_rr - B_erᵀ X and the distribution matrix is -Xᵀ
        let x = chol.solve(&b_er);
        let kron = &b_rr - b_er.transpose() * &x;
        let base = case.base_mva();
        let p_e = DVector::from_iterator(
            eliminated.len(),
            eliminated.iter().map(|&e| case.bus(e).injection_mw() / base),
        );
        let shift = -(x.transpose() * p_e);
        (kron, shift.iter().copied().collect())
    };

    // structural fill-in pairs with their surrogate ratings
    let mut fill: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for neighbours in &interface {
        let members: Vec<(&usize, &f64)> = neighbours.iter().collect();
        for a in 0..members.len() {
            for b in a + 1..members.len() {
                let (i, ci) = members[a];
                let (j, cj) = members[b];
                *fill.entry((*i, *j)).or_insert(0.0) += ci + cj;
            }
        }
    }

    let mut branches = Vec::new();
    let mut source_branch = Vec::new();
    for (l, br) in case.branches().iter().enumerate() {
        if local[br.from] != usize::MAX && local[br.to] != usize::MAX {
            branches.push(Branch {
                from: local[br.from],
                to: local[br.to],
                ..br.clone()
            });
            source_branch.push(Some(l));
        }
    }
    let mut warnings = Vec::new();
    for (&(i, j), &rating) in &fill {
        let added = -(kron[(i, j)] - b_rr[(i, j)]);
        if added == 0.0 {
            warnings.push(format!(
                "coupling between buses {} and {} cancelled numerically",
                case.bus(retained[i]).id,
                case.bus(retained[j]).id
            ));
            continue;
        }
        branches.push(Branch {
            from: i,
            to: j,
            reactance: 1.0 / added,
            capacity: rating,
            in_service: true,
        });
        source_branch.push(None);
    }

    let base = case.base_mva();
    let buses: Vec<Bus> = retained
        .iter()
        .zip(&shift_pu)
        .map(|(&r, s)| {
            let bus = case.bus(r);
            Bus {
                load: bus.load - s * base,
                ..bus.clone()
            }
        })
        .collect();
    let ward_shift_mw: Vec<f64> = shift_pu.iter().map(|s| s * base).collect();
    let load_adjustments = retained
        .iter()
        .zip(&ward_shift_mw)
        .map(|(&r, s)| (case.bus(r).id, -s))
        .collect();

    let mut status = BTreeMap::new();
    for &r in retained {
        status.insert(case.bus(r).id, NodeStatus::Retained);
    }
    for &e in eliminated {
        status.insert(case.bus(e).id, NodeStatus::Eliminated);
    }
    let generator_map = case
        .generators()
        .into_iter()
        .filter(|&g| local[g] != usize::MAX)
        .map(|g| (case.bus(g).id, case.bus(g).id))
        .collect();

    let name = if eliminated.is_empty() {
        case.name().to_string()
    } else {
        format!("{}_reduced", case.name())
    };
    Ok(ReducedCase {
        case: GridCase::new_unchecked(name, base, buses, branches),
        source_branch,
        pruned: Vec::new(),
        generator_map,
        load_adjustments,
        eliminated: eliminated.iter().map(|&e| case.bus(e).id).collect(),
        status,
        kron_susceptance: kron,
        ward_shift_mw,
        warnings,
    })
}

fn select(m: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| m[(rows[i], cols[j])])
}
