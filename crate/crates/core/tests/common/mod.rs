//! Random cases and independent reference computations shared by the
//! integration tests. Nothing here calls into the crate's linear algebra.

#![allow(dead_code)]

use std::collections::{HashSet, VecDeque};

use netreduce_core::{Branch, Bus, GridCase};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Connected random network: a random spanning tree plus extra edges.
/// Bus 1 always generates and the last bus always consumes.
pub fn random_case(rng: &mut ChaCha8Rng, n: usize, extra_edges: usize) -> GridCase {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = HashSet::new();
    let mut branches = Vec::new();
    for i in 1..n {
        let a = order[i];
        let b = order[rng.random_range(0..i)];
        pairs.insert((a.min(b), a.max(b)));
        branches.push(random_branch(rng, a, b));
    }
    let mut attempts = 0;
    while branches.len() < n - 1 + extra_edges && attempts < 50 * (extra_edges + 1) {
        attempts += 1;
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        if a != b && pairs.insert((a.min(b), a.max(b))) {
            branches.push(random_branch(rng, a, b));
        }
    }
    let buses = (0..n)
        .map(|i| {
            let generation = (i == 0 || rng.random_bool(0.3)).then(|| rng.random_range(10.0..120.0));
            let load = if i == n - 1 || rng.random_bool(0.6) {
                rng.random_range(5.0..80.0)
            } else {
                0.0
            };
            Bus::new(i as u32 + 1, generation, load)
        })
        .collect();
    GridCase::new("random", 100.0, buses, branches).expect("generated case is valid")
}

fn random_branch(rng: &mut ChaCha8Rng, a: usize, b: usize) -> Branch {
    Branch::new(a, b, rng.random_range(0.02..0.6), rng.random_range(20.0..200.0))
}

/// Random tree on `n` buses.
pub fn random_tree(rng: &mut ChaCha8Rng, n: usize) -> GridCase {
    random_case(rng, n, 0)
}

/// Dense nodal susceptance matrix assembled directly from the branch list.
pub fn laplacian(case: &GridCase) -> Vec<Vec<f64>> {
    let n = case.bus_count();
    let mut b = vec![vec![0.0; n]; n];
    for br in case.branches().iter().filter(|b| b.in_service) {
        let s = 1.0 / br.reactance;
        b[br.from][br.from] += s;
        b[br.to][br.to] += s;
        b[br.from][br.to] -= s;
        b[br.to][br.from] -= s;
    }
    b
}

/// Schur complement by pivoting the eliminated buses out one at a time
/// (star-mesh transformation), then keeping the retained rows and columns.
pub fn schur_by_pivoting(b: &[Vec<f64>], eliminated: &[usize]) -> Vec<Vec<f64>> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = b.to_vec();
    let mut gone = vec![false; n];
    for &k in eliminated {
        let pivot = m[k][k];
        for i in 0..n {
            if gone[i] || i == k {
                continue;
            }
            for j in 0..n {
                if gone[j] || j == k {
                    continue;
                }
                m[i][j] -= m[i][k] * m[k][j] / pivot;
            }
        }
        gone[k] = true;
    }
    let keep: Vec<usize> = (0..n).filter(|&i| !gone[i]).collect();
    keep.iter()
        .map(|&i| keep.iter().map(|&j| m[i][j]).collect())
        .collect()
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], rhs: &[f64]) -> Vec<f64> {
    let n = rhs.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(rhs)
        .map(|(row, r)| {
            let mut row = row.clone();
            row.push(*r);
            row
        })
        .collect();
    for col in 0..n {
        let p = (col..n)
            .max_by(|&x, &y| m[x][col].abs().total_cmp(&m[y][col].abs()))
            .unwrap();
        m.swap(col, p);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for c in col..=n {
                m[row][c] -= f * m[col][c];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| m[row][c] * x[c]).sum();
        x[row] = (m[row][n] - s) / m[row][row];
    }
    x
}

/// Branch flows (per-unit of transfer) for one unit injected at `g` and
/// withdrawn at `d`, from a direct solve with bus `slack` grounded.
pub fn unit_transfer_flows(case: &GridCase, g: usize, d: usize, slack: usize) -> Vec<f64> {
    let b = laplacian(case);
    let n = b.len();
    let idx: Vec<usize> = (0..n).filter(|&i| i != slack).collect();
    let a: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| b[i][j]).collect()).collect();
    let rhs: Vec<f64> = idx
        .iter()
        .map(|&i| f64::from(i == g) - f64::from(i == d))
        .collect();
    let sol = solve_dense(&a, &rhs);
    let mut theta = vec![0.0; n];
    for (k, &i) in idx.iter().enumerate() {
        theta[i] = sol[k];
    }
    case.branches()
        .iter()
        .map(|br| (theta[br.from] - theta[br.to]) / br.reactance)
        .collect()
}

/// Hop-count betweenness by explicit pair enumeration: for each unordered
/// pair, the fraction of shortest paths through each intermediate node.
pub fn brute_force_betweenness(case: &GridCase) -> Vec<f64> {
    let n = case.bus_count();
    let mut adj = vec![Vec::new(); n];
    for br in case.branches().iter().filter(|b| b.in_service) {
        if !adj[br.from].contains(&br.to) {
            adj[br.from].push(br.to);
            adj[br.to].push(br.from);
        }
    }
    let bfs = |s: usize| {
        let mut dist = vec![usize::MAX; n];
        let mut count = vec![0.0_f64; n];
        dist[s] = 0;
        count[s] = 1.0;
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
                if dist[v] == dist[u] + 1 {
                    count[v] += count[u];
                }
            }
        }
        (dist, count)
    };
    let all: Vec<_> = (0..n).map(bfs).collect();
    let mut score = vec![0.0; n];
    for s in 0..n {
        for t in s + 1..n {
            let (ds, cs) = &all[s];
            let (dt, ct) = &all[t];
            if ds[t] == usize::MAX {
                continue;
            }
            for v in 0..n {
                if v != s && v != t && ds[v] != usize::MAX && dt[v] != usize::MAX && ds[v] + dt[v] == ds[t] {
                    score[v] += cs[v] * ct[v] / cs[t];
                }
            }
        }
    }
    score
}

/// Same network with the bus order permuted; `perm[i]` is the new position
/// of bus `i`.
pub fn permuted(case: &GridCase, perm: &[usize]) -> GridCase {
    let mut buses = vec![case.bus(0).clone(); case.bus_count()];
    for (i, &p) in perm.iter().enumerate() {
        buses[p] = case.bus(i).clone();
    }
    let branches = case
        .branches()
        .iter()
        .map(|b| Branch {
            from: perm[b.from],
            to: perm[b.to],
            ..b.clone()
        })
        .collect();
    GridCase::new(case.name(), case.base_mva(), buses, branches).unwrap()
}

pub fn max_abs_diff(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()))
        .fold(0.0, f64::max)
}
