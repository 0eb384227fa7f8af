//! Grid case model, case file IO and the DC electrical kernels.

mod case;
mod dc;
mod impedance;
pub mod io;
mod ptdf;

pub use case::{Branch, Bus, BusId, GridCase};
pub use dc::{branch_flows, build_susceptance, dc_power_flow, DcSolution, SusceptanceSystem};
pub(crate) use dc::{bus_susceptance, ReducedFactor};
pub use impedance::{bus_impedance, ImpedanceTable};
pub use io::{ieee30, parse_case, CaseDocument};
pub use ptdf::{compute_ptdf, PtdfMatrix};
