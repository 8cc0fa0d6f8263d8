use serde::Serialize;

use crate::error::{invalid, Result};
use crate::partition::{bipartitions, Partition};
use crate::tensor::PureState;

#[derive(Clone, Debug, Serialize)]
pub struct GmeConcurrenceReport {
    pub value: f64,
    pub minimizing_bipartition: Partition,
}

/// min over bipartitions A|B of √(2(1 − Tr ρ_A²)); zero exactly when the
/// state is biseparable, and at most 1 on qubits.
pub fn gme_concurrence_pure(psi: &PureState) -> Result<GmeConcurrenceReport> {
    let n = psi.shape().n_sites();
    if n < 2 {
        return invalid("gme-concurrence needs at least two sites");
    }
    let mut best: Option<(f64, Partition)> = None;
    for gamma in bipartitions(n)? {
        let purity = psi.reduced(&gamma.blocks()[0])?.purity();
        let c = (2.0 * (1.0 - purity)).max(0.0).sqrt();
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, gamma));
        }
    }
    let (value, minimizing_bipartition) = best.expect("n >= 2 has a bipartition");
    Ok(GmeConcurrenceReport {
        value,
        minimizing_bipartition,
    })
}
