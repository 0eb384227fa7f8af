use crate::grid::{GridCase, PtdfMatrix};
use crate::{Error, Result};

/// Pair sensitivities below this magnitude never bind.
pub(crate) const SENSITIVITY_FLOOR: f64 = 1e-9;

/// Maximum transfer `κ_g^d` (MW) for every generator/load pair, with the
/// branch that reaches its rating first.
#[derive(Debug, Clone, PartialEq)]
pub struct TransmissionCapacityTable {
    /// Generator bus indices (rows).
    pub generators: Vec<usize>,
    /// Load bus indices (columns).
    pub loads: Vec<usize>,
    values: Vec<Option<f64>>,
    binding: Vec<Option<usize>>,
}

impl TransmissionCapacityTable {
    /// `None` when the generator and load are the same bus.
    pub fn get(&self, gen_pos: usize, load_pos: usize) -> Option<f64> {
        self.values[gen_pos * self.loads.len() + load_pos]
    }

    pub fn binding_line(&self, gen_pos: usize, load_pos: usize) -> Option<usize> {
        self.binding[gen_pos * self.loads.len() + load_pos]
    }

    /// `(g, d, κ, binding branch)` for every pair with `g != d`, by bus index.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64, usize)> + '_ {
        self.generators.iter().enumerate().flat_map(move |(gi, &g)| {
            self.loads.iter().enumerate().filter_map(move |(di, &d)| {
                let k = self.get(gi, di)?;
                Some((g, d, k, self.binding_line(gi, di)?))
            })
        })
    }

    /// Multiplies every capacity by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.map(|k| k * factor)).collect(),
            ..self.clone()
        }
    }
}

/// `κ_g^d = min_l P_l^max / |τ_l^{gd}|` over branches with a non-negligible
/// pair sensitivity.
pub fn transmission_capacity(case: &GridCase, ptdf: &PtdfMatrix) -> Result<TransmissionCapacityTable> {
    let generators = case.generators();
    let loads = case.loads();
    let mut values = Vec::with_capacity(generators.len() * loads.len());
    let mut binding = Vec::with_capacity(values.capacity());
    for &g in &generators {
        for &d in &loads {
            if g == d {
                values.push(None);
                binding.push(None);
                continue;
            }
            let mut best: Option<(f64, usize)> = None;
            for (l, br) in case.in_service_branches() {
                let tau = ptdf.pair(l, g, d).abs();
                if tau < SENSITIVITY_FLOOR {
                    continue;
                }
                let limit = br.capacity / tau;
                if best.is_none_or(|(b, _)| limit < b) {
                    best = Some((limit, l));
                }
            }
            let (k, l) = best.ok_or_else(|| {
                Error::Internal(format!(
                    "no branch is sensitive to a transfer from bus {} to bus {}",
                    case.bus(g).id,
                    case.bus(d).id
                ))
            })?;
            values.push(Some(k));
            binding.push(Some(l));
        }
    }
    Ok(TransmissionCapacityTable {
        generators,
        loads,
        values,
        binding,
    })
}
