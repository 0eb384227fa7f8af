use nalgebra::DMatrix;

use super::case::GridCase;
use super::dc::bus_susceptance;
use crate::{Error, Result};

/// DC bus impedance: the Moore-Penrose pseudo-inverse of the nodal
/// susceptance matrix, in per-unit.
#[derive(Debug, Clone)]
pub struct ImpedanceTable {
    pub values: DMatrix<f64>,
}

impl ImpedanceTable {
    /// Equivalent (Thevenin) impedance between two buses,
    /// `z_gg + z_dd - 2 z_gd`.
    pub fn pair(&self, g: usize, d: usize) -> f64 {
        if g == d {
            return 0.0;
        }
        let z = &self.values;
        (z[(g, g)] + z[(d, d)] - 2.0 * z[(g, d)]).max(0.0)
    }
}

/// For a connected network the Laplacian `B` satisfies
/// `B⁺ = (B + J/n)⁻¹ - J/n`, with `J` the all-ones matrix.
pub fn bus_impedance(case: &GridCase) -> Result<ImpedanceTable> {
    let n = case.bus_count();
    let shift = 1.0 / n as f64;
    let mut m = bus_susceptance(case);
    m.add_scalar_mut(shift);
    let chol = nalgebra::Cholesky::new(m).ok_or_else(|| {
        Error::Singular("bus impedance requires a connected network".into())
    })?;
    let mut values = chol.inverse();
    values.add_scalar_mut(-shift);
    Ok(ImpedanceTable { values })
}
