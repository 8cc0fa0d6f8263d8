//! Density-matrix-element criteria Q₀ and Q_m. A positive value certifies
//! genuine multipartite entanglement; a non-positive value says nothing.
//!
//! On qudits the two levels are |0⟩ and |d−1⟩ of each site.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::partition::bipartitions;
use crate::random::{derive_seed, random_local_unitary, seeded};
use crate::tensor::{two_copy_basis_diagonal, DensityState};

use super::{DetectionVerdict, Direction};

fn levels(rho: &DensityState, excited: &[bool]) -> Vec<usize> {
    rho.shape()
        .local_dims()
        .iter()
        .zip(excited)
        .map(|(&d, &e)| if e { d - 1 } else { 0 })
        .collect()
}

fn element(rho: &DensityState, a: &[usize], b: &[usize]) -> f64 {
    let s = rho.shape();
    rho.matrix()[(s.index(a), s.index(b))].norm()
}

/// Q₀ = |⟨0…0|ρ|1…1⟩| − Σ_γ √⟨0…0|⊗⟨1…1| P_γ ρ⊗ρ P_γ† |0…0⟩⊗|1…1⟩
pub fn q0(rho: &DensityState) -> Result<f64> {
    let n = rho.shape().n_sites();
    if n < 2 {
        return invalid("Q0 needs at least two sites");
    }
    let low = levels(rho, &vec![false; n]);
    let high = levels(rho, &vec![true; n]);
    let mut value = element(rho, &low, &high);
    for gamma in bipartitions(n)? {
        value -= two_copy_basis_diagonal(rho, &low, &high, &gamma.blocks()[0])?.sqrt();
    }
    Ok(value)
}

/// All `m`-element subsets of `0..n`, lexicographic.
pub(crate) fn subsets(n: usize, m: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, m: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < m - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, m, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, m, &mut Vec::new(), &mut out);
    out
}

/// Q_m for 1 ≤ m ≤ n/2. The pair sum runs over ordered pairs (α, β) with
/// |α| = |β| = m and |α ∩ β| = m − 1; |d_α⟩ has the excited level on α.
pub fn qm(rho: &DensityState, m: usize) -> Result<f64> {
    let n = rho.shape().n_sites();
    if m == 0 || 2 * m > n {
        return invalid(format!("m = {m} out of range 1..={}", n / 2));
    }
    let alphas = subsets(n, m);
    let dicke: Vec<Vec<usize>> = alphas
        .iter()
        .map(|a| {
            let mut mask = vec![false; n];
            for &s in a {
                mask[s] = true;
            }
            levels(rho, &mask)
        })
        .collect();
    let mut value = 0.0;
    for (i, alpha) in alphas.iter().enumerate() {
        for (j, beta) in alphas.iter().enumerate() {
            let shared = alpha.iter().filter(|s| beta.contains(s)).count();
            if shared + 1 != m {
                continue;
            }
            value += element(rho, &dicke[i], &dicke[j]);
            value -= two_copy_basis_diagonal(rho, &dicke[i], &dicke[j], alpha)?.sqrt();
        }
    }
    let populations: f64 = dicke.iter().map(|d| element(rho, d, d)).sum();
    value -= (m * (n - m - 1)) as f64 * populations;
    Ok(value)
}

/// Settings for the combined Q evaluation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QOptions {
    /// Random local-unitary trials tried on systems with a site of
    /// dimension > 2; the largest Q over all trials (and the identity) wins.
    pub unitary_trials: usize,
    pub seed: u64,
}

impl Default for QOptions {
    fn default() -> Self {
        Self {
            unitary_trials: 20,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QReport {
    pub q0: f64,
    /// Q_m for m = 1..=n/2.
    pub qm: Vec<f64>,
}

impl QReport {
    pub fn best(&self) -> f64 {
        self.qm.iter().copied().fold(self.q0, f64::max)
    }

    pub fn verdict(&self) -> DetectionVerdict {
        DetectionVerdict::new("Q", self.best(), 0.0, Direction::Above, 2, None)
    }
}

fn report(rho: &DensityState) -> Result<QReport> {
    let n = rho.shape().n_sites();
    Ok(QReport {
        q0: q0(rho)?,
        qm: (1..=n / 2).map(|m| qm(rho, m)).collect::<Result<_>>()?,
    })
}

/// Q₀ and every Q_m. Local unitaries preserve GME, so on qudit systems each
/// criterion is maximized over seeded random local unitaries.
pub fn q_criteria(rho: &DensityState, opts: &QOptions) -> Result<QReport> {
    let mut best = report(rho)?;
    if rho.shape().local_dims().iter().all(|&d| d == 2) {
        return Ok(best);
    }
    for t in 0..opts.unitary_trials {
        let mut rng = seeded(derive_seed(opts.seed, &[t as u64]));
        let u = random_local_unitary(rho.shape(), &mut rng);
        let r = report(&rho.conjugate(&u)?)?;
        best.q0 = best.q0.max(r.q0);
        for (b, v) in best.qm.iter_mut().zip(r.qm) {
            *b = b.max(v);
        }
    }
    Ok(best)
}
