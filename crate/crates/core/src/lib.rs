//! Node importance ranking and DC Ward network reduction for power grids.
//!
//! The crate is organised bottom-up:
//!
//! * [`grid`] holds the case model, case file IO and the DC kernels
//!   (susceptance assembly, DC power flow, PTDF, bus impedance).
//! * [`centrality`] scores nodes: classical betweenness, extended
//!   betweenness, net-ability and line congestion.
//! * [`evidential`] fuses several rankings into one comprehensive ranking
//!   with an evidential-reasoning combination and utility evaluation.
//! * [`reduction`] builds DC Ward equivalents from a ranking.
//! * [`metrics`] compares full and reduced networks on topological
//!   properties.

pub mod centrality;
mod error;
pub mod evidential;
pub mod export;
pub mod graph;
pub mod grid;
pub mod metrics;
pub mod reduction;

pub use error::{Error, Result};
pub use grid::{Branch, Bus, BusId, GridCase};
