//! Minimum energy over k-separable states and the k-entanglement gap.
//!
//! The minimum over pure product states is found by alternating
//! ("see-saw") optimization: each block's factor is replaced in turn by the
//! ground eigenvector of the effective operator obtained by contracting the
//! Hamiltonian with every other factor. Every step solves its sub-problem
//! exactly, so the energy never increases within a run. Multi-start with
//! Haar-random factors searches for the global minimum, which is not
//! guaranteed: the result is an upper bound on the true minimum.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::partition::{enumerate_partitions, Partition};
use crate::policy::POLICY;
use crate::random::{derive_seed, random_unit_vector, seeded};
use crate::spectral::{eig_hermitian, lowest_eigenpair};
use crate::tensor::{CMatrix, CVector, Operator, PureState, SystemShape, ONE, ZERO};

/// Fraction of restarts that must land on the best energy for the result to
/// count as corroborated.
pub const CONSENSUS_FRACTION: f64 = 0.9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizerConfig {
    pub restarts: usize,
    pub max_sweeps: usize,
    pub rel_energy_tol: f64,
    pub seed: u64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            restarts: 50,
            max_sweeps: 1000,
            rel_energy_tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if !(self.rel_energy_tol > 0.0) {
            return invalid("rel_energy_tol must be positive");
        }
        if self.max_sweeps == 0 {
            return invalid("max_sweeps must be at least 1");
        }
        Ok(())
    }
}

/// A product of one normalized factor per partition block. Each factor's
/// basis follows the block's sites in ascending order.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    shape: SystemShape,
    partition: Partition,
    factors: Vec<PureState>,
}

impl ProductState {
    pub fn new(shape: SystemShape, partition: Partition, factors: Vec<PureState>) -> Result<Self> {
        if partition.n_sites() != shape.n_sites() {
            return invalid("partition and shape disagree on the number of sites");
        }
        if factors.len() != partition.k() {
            return invalid(format!(
                "{} factors for {} blocks",
                factors.len(),
                partition.k()
            ));
        }
        for (f, block) in factors.iter().zip(partition.blocks()) {
            if f.shape() != &shape.subshape(block)? {
                return invalid(format!("factor for block {block:?} has the wrong shape"));
            }
        }
        Ok(Self {
            shape,
            partition,
            factors,
        })
    }

    /// Independent Haar-random factors.
    pub fn random<R: rand::Rng + ?Sized>(
        shape: &SystemShape,
        partition: &Partition,
        rng: &mut R,
    ) -> Self {
        let factors = partition
            .blocks()
            .iter()
            .map(|b| {
                let sub = shape.subshape(b).expect("partition matches shape");
                PureState::from_parts_unchecked(random_unit_vector(sub.total_dim(), rng), sub)
            })
            .collect();
        Self {
            shape: shape.clone(),
            partition: partition.clone(),
            factors,
        }
    }

    pub fn partition(&self) -> &Partition {
        &self.partition
    }

    pub fn factors(&self) -> &[PureState] {
        &self.factors
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    /// The global state vector.
    pub fn assemble(&self) -> PureState {
        let layout = BlockLayout::new(&self.shape, &self.partition);
        let amps = CVector::from_fn(self.shape.total_dim(), |g, _| {
            self.factors
                .iter()
                .enumerate()
                .fold(ONE, |acc, (b, f)| acc * f.amplitudes()[layout.local[g][b]])
        });
        PureState::from_parts_unchecked(amps, self.shape.clone())
    }

    /// The same state expressed over a coarser partition, if `target` is one.
    pub fn coarsen(&self, target: &Partition) -> Option<ProductState> {
        if !self.partition.refines(target) {
            return None;
        }
        let factors = target
            .blocks()
            .iter()
            .map(|block| {
                let sub = self.shape.subshape(block).expect("partition matches shape");
                let amps = CVector::from_fn(sub.total_dim(), |i, _| {
                    let digits = sub.digits(i);
                    let mut amp = ONE;
                    for (b, fine) in self.partition.blocks().iter().enumerate() {
                        if !fine.iter().all(|s| block.contains(s)) {
                            continue;
                        }
                        let fine_digits: Vec<usize> = fine
                            .iter()
                            .map(|s| digits[block.iter().position(|x| x == s).unwrap()])
                            .collect();
                        let f = &self.factors[b];
                        amp *= f.amplitudes()[f.shape().index(&fine_digits)];
                    }
                    amp
                });
                PureState::from_parts_unchecked(amps, sub)
            })
            .collect();
        Some(ProductState {
            shape: self.shape.clone(),
            partition: target.clone(),
            factors,
        })
    }
}

/// Per-block local index of every global basis index.
struct BlockLayout {
    block_dims: Vec<usize>,
    local: Vec<Vec<usize>>,
}

impl BlockLayout {
    fn new(shape: &SystemShape, partition: &Partition) -> Self {
        let dims = shape.local_dims();
        let block_dims = partition
            .blocks()
            .iter()
            .map(|b| b.iter().map(|&s| dims[s]).product())
            .collect();
        let local = (0..shape.total_dim())
            .map(|g| {
                let digits = shape.digits(g);
                partition
                    .blocks()
                    .iter()
                    .map(|b| b.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]))
                    .collect()
            })
            .collect();
        Self { block_dims, local }
    }

    /// ⟨others| H |others⟩ acting on block `b`.
    fn effective(&self, h: &CMatrix, factors: &[CVector], b: usize) -> CMatrix {
        let d = h.nrows();
        let env: Vec<_> = (0..d)
            .map(|g| {
                factors
                    .iter()
                    .enumerate()
                    .filter(|(o, _)| *o != b)
                    .fold(ONE, |acc, (o, f)| acc * f[self.local[g][o]])
            })
            .collect();
        let db = self.block_dims[b];
        let mut out = CMatrix::zeros(db, db);
        for gp in 0..d {
            let right = env[gp];
            if right == ZERO {
                continue;
            }
            let j = self.local[gp][b];
            for g in 0..d {
                let left = env[g];
                if left == ZERO {
                    continue;
                }
                out[(self.local[g][b], j)] += left.conj() * h[(g, gp)] * right;
            }
        }
        out
    }
}

/// One alternating-optimization run from a given start.
#[derive(Clone, Debug)]
pub struct SeesawRun {
    pub energy: f64,
    pub state: ProductState,
    /// Energy after every block update.
    pub history: Vec<f64>,
    pub sweeps: usize,
    pub converged: bool,
}

/// Runs the alternating optimization from `start` until the relative energy
/// change over a sweep drops below the tolerance.
pub fn seesaw(h: &Operator, start: ProductState, cfg: &OptimizerConfig) -> Result<SeesawRun> {
    h.ensure_hermitian()?;
    if h.shape() != start.shape() {
        return invalid("product state and Hamiltonian shapes differ");
    }
    let layout = BlockLayout::new(h.shape(), start.partition());
    Ok(seesaw_unchecked(h, &layout, start, cfg))
}

fn seesaw_unchecked(
    h: &Operator,
    layout: &BlockLayout,
    start: ProductState,
    cfg: &OptimizerConfig,
) -> SeesawRun {
    let k = start.partition.k();
    let mut factors: Vec<CVector> = start
        .factors
        .iter()
        .map(|f| f.amplitudes().clone())
        .collect();
    let mut history = Vec::new();
    let mut previous = f64::INFINITY;
    let mut converged = false;
    let mut sweeps = 0;
    while sweeps < cfg.max_sweeps {
        sweeps += 1;
        let mut energy = previous;
        for b in 0..k {
            let heff = layout.effective(h.matrix(), &factors, b);
            let (e, v) = lowest_eigenpair(&heff);
            factors[b] = v;
            energy = e;
            history.push(e);
        }
        if (previous - energy).abs() <= cfg.rel_energy_tol * energy.abs().max(1.0) {
            converged = true;
            break;
        }
        previous = energy;
    }
    let state = ProductState {
        factors: factors
            .into_iter()
            .zip(start.factors.iter())
            .map(|(v, f)| PureState::from_parts_unchecked(v, f.shape().clone()))
            .collect(),
        ..start
    };
    let energy = state.assemble().expectation(h).expect("shapes match");
    SeesawRun {
        energy,
        state,
        history,
        sweeps,
        converged,
    }
}

/// Best energy found for one partition.
#[derive(Clone, Debug)]
pub struct PartitionOptimum {
    pub partition: Partition,
    pub energy: f64,
    pub state: ProductState,
    pub converged: bool,
    /// Fraction of random restarts within the consensus tolerance of `energy`.
    pub consensus: f64,
}

fn optimize_partition(
    h: &Operator,
    partition: &Partition,
    cfg: &OptimizerConfig,
    warm: &[ProductState],
) -> PartitionOptimum {
    let layout = BlockLayout::new(h.shape(), partition);
    let base = derive_seed(cfg.seed, &[partition.fingerprint()]);
    let starts: Vec<ProductState> = (0..cfg.restarts)
        .map(|r| {
            ProductState::random(
                h.shape(),
                partition,
                &mut seeded(derive_seed(base, &[r as u64])),
            )
        })
        .chain(warm.iter().filter_map(|w| w.coarsen(partition)))
        .collect();
    let runs: Vec<SeesawRun> = starts
        .into_par_iter()
        .map(|s| seesaw_unchecked(h, &layout, s, cfg))
        .collect();
    let best = runs
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.energy.total_cmp(&b.energy).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one restart");
    let e = runs[best].energy;
    let agree = runs[..cfg.restarts]
        .iter()
        .filter(|r| r.energy - e <= POLICY.consensus)
        .count();
    PartitionOptimum {
        partition: partition.clone(),
        energy: e,
        converged: runs[best].converged,
        consensus: agree as f64 / cfg.restarts as f64,
        state: runs[best].state.clone(),
    }
}

/// Minimum of ⟨ψ|H|ψ⟩ over product states with respect to one partition.
pub fn min_energy_for_partition(
    h: &Operator,
    partition: &Partition,
    cfg: &OptimizerConfig,
) -> Result<PartitionOptimum> {
    cfg.validate()?;
    h.ensure_hermitian()?;
    if partition.n_sites() != h.shape().n_sites() {
        return invalid("partition does not match the Hamiltonian's sites");
    }
    Ok(optimize_partition(h, partition, cfg, &[]))
}

/// Estimated minimum energy over k-separable states.
#[derive(Clone, Debug)]
pub struct KsepResult {
    pub k: usize,
    pub energy: f64,
    pub argmin: ProductState,
    pub per_partition: Vec<PartitionOptimum>,
    /// The winning partition's best run converged.
    pub converged: bool,
    /// Restart consensus of the winning partition.
    pub consensus: f64,
}

impl KsepResult {
    /// Whether restart consensus backs the estimate.
    pub fn corroborated(&self) -> bool {
        self.consensus >= CONSENSUS_FRACTION
    }

    fn negated(mut self) -> Self {
        self.energy = -self.energy;
        for p in &mut self.per_partition {
            p.energy = -p.energy;
        }
        self
    }
}

/// E_{k-sep} over all k-partitions.
pub fn ksep_energy(h: &Operator, k: usize, cfg: &OptimizerConfig) -> Result<KsepResult> {
    ksep_energy_with_starts(h, k, cfg, &[])
}

/// As [`ksep_energy`], additionally starting from each warm state on every
/// partition it refines.
pub fn ksep_energy_with_starts(
    h: &Operator,
    k: usize,
    cfg: &OptimizerConfig,
    warm: &[ProductState],
) -> Result<KsepResult> {
    cfg.validate()?;
    h.ensure_hermitian()?;
    let partitions = enumerate_partitions(h.shape().n_sites(), k)?;
    let per_partition: Vec<PartitionOptimum> = partitions
        .par_iter()
        .map(|p| optimize_partition(h, p, cfg, warm))
        .collect();
    let best = per_partition
        .iter()
        .enumerate()
        .min_by(|(i, a), (j, b)| a.energy.total_cmp(&b.energy).then(i.cmp(j)))
        .map(|(i, _)| i)
        .expect("at least one partition");
    let winner = &per_partition[best];
    Ok(KsepResult {
        k,
        energy: winner.energy,
        argmin: winner.state.clone(),
        converged: winner.converged,
        consensus: winner.consensus,
        per_partition,
    })
}

/// E_{k-sep} for every k in `2..=n`, computed from the finest level down.
/// Each level is warm-started from the next finer level's minimizer, so the
/// estimates are ordered E₂ ≤ E₃ ≤ … ≤ Eₙ by construction.
pub fn ksep_levels(h: &Operator, cfg: &OptimizerConfig) -> Result<Vec<KsepResult>> {
    let n = h.shape().n_sites();
    ksep_levels_for(h, &(2..=n).collect::<Vec<_>>(), cfg)
}

/// As [`ksep_levels`] restricted to the given levels, returned in ascending
/// order of k.
pub fn ksep_levels_for(
    h: &Operator,
    ks: &[usize],
    cfg: &OptimizerConfig,
) -> Result<Vec<KsepResult>> {
    let mut ks = ks.to_vec();
    ks.sort_unstable();
    ks.dedup();
    let mut out: Vec<KsepResult> = Vec::new();
    for &k in ks.iter().rev() {
        let warm: Vec<ProductState> = out
            .last()
            .map(|r| vec![r.argmin.clone()])
            .unwrap_or_default();
        out.push(ksep_energy_with_starts(h, k, cfg, &warm)?);
    }
    out.reverse();
    Ok(out)
}

/// E_{k-sep} − E₀, reported as zero when below the clamp tolerance.
pub fn gap_from(ground_energy: f64, ksep: f64) -> f64 {
    let gap = ksep - ground_energy;
    if gap < POLICY.gap_clamp {
        0.0
    } else {
        gap
    }
}

/// The k-entanglement gap of `h` (the GME gap for k = 2).
pub fn entanglement_gap(h: &Operator, k: usize, cfg: &OptimizerConfig) -> Result<f64> {
    let e0 = eig_hermitian(h)?.ground_energy();
    Ok(gap_from(e0, ksep_energy(h, k, cfg)?.energy))
}

/// Maximum energy over k-separable states, as −E_{k-sep}(−h). `argmin`
/// holds the maximizer.
pub fn max_energy_variant(h: &Operator, k: usize, cfg: &OptimizerConfig) -> Result<KsepResult> {
    Ok(ksep_energy(&h.scale(-1.0), k, cfg)?.negated())
}
