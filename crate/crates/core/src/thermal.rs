//! Boltzmann states and thermodynamic scalars (k_B = 1, energies in units of J).

use crate::error::{invalid, Error, Result};
use crate::policy::POLICY;
use crate::spectral::{eigh_values, SpectralDecomposition};
use crate::tensor::{DensityState, Operator};

/// A thermal state together with its thermodynamic scalars.
#[derive(Clone, Debug)]
pub struct ThermalPoint {
    pub kt: f64,
    pub state: DensityState,
    /// Boltzmann populations of the eigenvectors, in spectral order.
    pub populations: Vec<f64>,
    /// Z computed from energies measured relative to E₀.
    pub partition_function: f64,
    pub energy: f64,
    pub entropy: f64,
}

impl ThermalPoint {
    /// ln Z with energies measured from zero: ln Z_shifted − E₀/kT.
    pub fn ln_partition_function(&self, ground_energy: f64) -> f64 {
        self.partition_function.ln() - ground_energy / self.kt
    }
}

/// −Σ p ln p with 0 ln 0 = 0.
pub(crate) fn shannon(p: impl IntoIterator<Item = f64>) -> f64 {
    p.into_iter()
        .filter(|&x| x > POLICY.log_zero)
        .map(|x| -x * x.ln())
        .sum()
}

/// Thermal state at temperature `kt`. At `kt = 0` this is the uniform mixture
/// over the ground manifold, which is also the `kt → 0⁺` limit.
pub fn thermal_state(spec: &SpectralDecomposition, kt: f64) -> Result<ThermalPoint> {
    if !(kt >= 0.0) || !kt.is_finite() {
        return invalid(format!(
            "temperature must be finite and non-negative, got {kt}"
        ));
    }
    let e0 = spec.ground_energy();
    let weights: Vec<f64> = if kt == 0.0 {
        let g = spec.ground_degeneracy();
        (0..spec.dim())
            .map(|i| if i < g { 1.0 } else { 0.0 })
            .collect()
    } else {
        spec.eigenvalues
            .iter()
            .map(|&e| (-(e - e0) / kt).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    let populations: Vec<f64> = weights.iter().map(|w| w / z).collect();
    let energy = populations
        .iter()
        .zip(&spec.eigenvalues)
        .map(|(p, e)| p * e)
        .sum();
    let entropy = shannon(populations.iter().copied());
    let matrix = spec.weighted(&populations);
    Ok(ThermalPoint {
        kt,
        state: DensityState::from_parts_unchecked(matrix, spec.shape().clone()),
        populations,
        partition_function: z,
        energy,
        entropy,
    })
}

/// Von Neumann entropy −Tr ρ ln ρ (natural log).
pub fn vn_entropy(rho: &DensityState) -> f64 {
    shannon(eigh_values(rho.matrix()))
}

/// Tr(ρH).
pub fn energy_expectation(rho: &DensityState, h: &Operator) -> Result<f64> {
    if rho.shape() != h.shape() {
        return invalid("state and Hamiltonian shapes differ");
    }
    let (r, m) = (rho.matrix(), h.matrix());
    let d = r.nrows();
    let mut acc = crate::tensor::ZERO;
    for i in 0..d {
        for j in 0..d {
            acc += r[(i, j)] * m[(j, i)];
        }
    }
    if acc.im.abs() > POLICY.imaginary {
        return Err(Error::Numerical(format!(
            "Tr(ρH) has imaginary part {:.3e}",
            acc.im
        )));
    }
    Ok(acc.re)
}
