use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::graph;
use crate::{Error, Result};

/// External bus number as it appears in case files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BusId(pub u32);

impl fmt::Display for BusId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Bus {
    pub id: BusId,
    /// Declared generation in MW. `Some` marks a generator bus, even at zero
    /// output.
    pub generation: Option<f64>,
    /// Demand in MW. Equivalent loads of a reduced model may be negative.
    pub load: f64,
}

impl Bus {
    pub fn new(id: u32, generation: Option<f64>, load: f64) -> Self {
        Self {
            id: BusId(id),
            generation,
            load,
        }
    }

    pub fn is_generator(&self) -> bool {
        self.generation.is_some()
    }

    pub fn is_load(&self) -> bool {
        self.load > 0.0
    }

    pub fn generation_mw(&self) -> f64 {
        self.generation.unwrap_or(0.0)
    }

    /// Net injection (generation minus load) in MW.
    pub fn injection_mw(&self) -> f64 {
        self.generation_mw() - self.load
    }
}

/// A branch between two buses, addressed by internal bus index.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub from: usize,
    pub to: usize,
    /// Series reactance in per-unit.
    pub reactance: f64,
    /// Thermal rating in MW.
    pub capacity: f64,
    pub in_service: bool,
}

impl Branch {
    pub fn new(from: usize, to: usize, reactance: f64, capacity: f64) -> Self {
        Self {
            from,
            to,
            reactance,
            capacity,
            in_service: true,
        }
    }

    pub fn susceptance(&self) -> f64 {
        1.0 / self.reactance
    }

    pub fn touches(&self, bus: usize) -> bool {
        self.from == bus || self.to == bus
    }

    pub fn other_end(&self, bus: usize) -> usize {
        if self.from == bus {
            self.to
        } else {
            self.from
        }
    }
}

/// Full network model: buses, branches and the system base.
///
/// Buses are addressed internally by their position (`0..bus_count()`);
/// branches refer to those positions. Case parsers order buses by id so the
/// internal order is also the id order.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCase {
    name: String,
    base_mva: f64,
    buses: Vec<Bus>,
    branches: Vec<Branch>,
}

impl GridCase {
    /// Builds and validates a case.
    pub fn new(
        name: impl Into<String>,
        base_mva: f64,
        buses: Vec<Bus>,
        branches: Vec<Branch>,
    ) -> Result<Self> {
        let case = Self::new_unchecked(name, base_mva, buses, branches);
        case.validate()?;
        Ok(case)
    }

    /// Builds a case without the connectivity and generator/load checks.
    /// Used for intermediate networks (islands, partially reduced models).
    pub(crate) fn new_unchecked(
        name: impl Into<String>,
        base_mva: f64,
        buses: Vec<Bus>,
        branches: Vec<Branch>,
    ) -> Self {
        Self {
            name: name.into(),
            base_mva,
            buses,
            branches,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base_mva(&self) -> f64 {
        self.base_mva
    }

    pub fn buses(&self) -> &[Bus] {
        &self.buses
    }

    pub fn branches(&self) -> &[Branch] {
        &self.branches
    }

    pub fn bus_count(&self) -> usize {
        self.buses.len()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn bus(&self, index: usize) -> &Bus {
        &self.buses[index]
    }

    pub fn bus_ids(&self) -> Vec<BusId> {
        self.buses.iter().map(|b| b.id).collect()
    }

    pub fn index_of(&self, id: BusId) -> Option<usize> {
        self.buses.iter().position(|b| b.id == id)
    }

    pub fn in_service_branches(&self) -> impl Iterator<Item = (usize, &Branch)> {
        self.branches.iter().enumerate().filter(|(_, b)| b.in_service)
    }

    /// Indices of generator buses (the set `Gen`).
    pub fn generators(&self) -> Vec<usize> {
        (0..self.buses.len())
            .filter(|&i| self.buses[i].is_generator())
            .collect()
    }

    /// Indices of load buses (the set `D`).
    pub fn loads(&self) -> Vec<usize> {
        (0..self.buses.len())
            .filter(|&i| self.buses[i].is_load())
            .collect()
    }

    /// Net injections in MW.
    pub fn injections_mw(&self) -> Vec<f64> {
        self.buses.iter().map(Bus::injection_mw).collect()
    }

    pub fn total_generation(&self) -> f64 {
        self.buses.iter().map(Bus::generation_mw).sum()
    }

    pub fn total_load(&self) -> f64 {
        self.buses.iter().map(|b| b.load).sum()
    }

    /// Lowest-index generator bus, or bus 0 when the case has none.
    pub fn default_slack(&self) -> usize {
        self.buses.iter().position(Bus::is_generator).unwrap_or(0)
    }

    /// Indices of in-service branches incident to `bus` (the set `L^v`).
    pub fn incident_branches(&self, bus: usize) -> Vec<usize> {
        self.in_service_branches()
            .filter(|(_, b)| b.touches(bus))
            .map(|(i, _)| i)
            .collect()
    }

    /// Connected components of the in-service branch graph.
    pub fn islands(&self) -> Vec<Vec<usize>> {
        graph::components(
            self.buses.len(),
            self.in_service_branches().map(|(_, b)| (b.from, b.to)),
        )
    }

    pub fn is_connected(&self) -> bool {
        self.islands().len() <= 1
    }

    /// Returns the sub-network induced by `keep` (internal indices, sorted),
    /// without validation.
    pub(crate) fn induced(&self, keep: &[usize]) -> GridCase {
        let mut map = vec![usize::MAX; self.buses.len()];
        for (new, &old) in keep.iter().enumerate() {
            map[old] = new;
        }
        let buses = keep.iter().map(|&i| self.buses[i].clone()).collect();
        let branches = self
            .branches
            .iter()
            .filter(|b| map[b.from] != usize::MAX && map[b.to] != usize::MAX)
            .map(|b| Branch {
                from: map[b.from],
                to: map[b.to],
                ..b.clone()
            })
            .collect();
        GridCase::new_unchecked(self.name.clone(), self.base_mva, buses, branches)
    }

    /// Checks every structural invariant of a valid case.
    pub fn validate(&self) -> Result<()> {
        self.validate_elements()?;
        let islands = self.islands();
        if islands.len() > 1 {
            return Err(Error::Islands(
                islands
                    .iter()
                    .map(|c| c.iter().map(|&i| self.buses[i].id).collect())
                    .collect(),
            ));
        }
        if !self.buses.iter().any(Bus::is_generator) {
            return Err(Error::Validation("case has no generator bus".into()));
        }
        if !self.buses.iter().any(Bus::is_load) {
            return Err(Error::Validation("case has no load bus".into()));
        }
        Ok(())
    }

    pub(crate) fn validate_elements(&self) -> Result<()> {
        if !(self.base_mva.is_finite() && self.base_mva > 0.0) {
            return Err(Error::Validation(format!(
                "base_mva must be positive, got {}",
                self.base_mva
            )));
        }
        if self.buses.is_empty() {
            return Err(Error::Validation("case has no buses".into()));
        }
        let mut seen = HashSet::new();
        for bus in &self.buses {
            if !seen.insert(bus.id) {
                return Err(Error::Validation(format!("duplicate bus id {}", bus.id)));
            }
            if let Some(g) = bus.generation {
                if !(g.is_finite() && g >= 0.0) {
                    return Err(Error::Validation(format!(
                        "bus {}: generation must be finite and non-negative, got {g}",
                        bus.id
                    )));
                }
            }
            if !bus.load.is_finite() {
                return Err(Error::Validation(format!("bus {}: load is not finite", bus.id)));
            }
        }
        let n = self.buses.len();
        for (i, br) in self.branches.iter().enumerate() {
            if br.from >= n || br.to >= n {
                return Err(Error::Validation(format!(
                    "branch {i} references a missing bus"
                )));
            }
            let label = format!("branch {}-{}", self.buses[br.from].id, self.buses[br.to].id);
            if br.from == br.to {
                return Err(Error::Validation(format!("{label} is a self loop")));
            }
            if !(br.reactance.is_finite() && br.reactance > 0.0) {
                return Err(Error::Validation(format!(
                    "{label}: reactance must be positive, got {}",
                    br.reactance
                )));
            }
            if !(br.capacity.is_finite() && br.capacity > 0.0) {
                return Err(Error::Validation(format!(
                    "{label}: capacity must be positive, got {}",
                    br.capacity
                )));
            }
        }
        Ok(())
    }
}
