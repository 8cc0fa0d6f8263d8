//! Seeded random states, unitaries and Hermitian operators.
//!
//! Every parallel work item draws from its own generator whose seed is
//! derived from a base seed and the item's coordinates, so results do not
//! depend on scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::tensor::{CMatrix, CVector, DensityState, Operator, PureState, SystemShape, C64};

pub type SeededRng = ChaCha8Rng;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with work-item coordinates.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    parts
        .iter()
        .fold(splitmix64(base), |acc, &p| splitmix64(acc ^ splitmix64(p)))
}

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random unit vector of length `d`.
pub fn random_unit_vector<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CVector {
    loop {
        let v = CVector::from_fn(d, |_, _| complex_gaussian(rng));
        let n = v.norm();
        if n > 1e-300 {
            return v.unscale(n);
        }
    }
}

pub fn random_state<R: Rng + ?Sized>(shape: &SystemShape, rng: &mut R) -> PureState {
    PureState::from_parts_unchecked(random_unit_vector(shape.total_dim(), rng), shape.clone())
}

/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
pub fn random_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

/// Tensor product of independent Haar unitaries, one per site.
pub fn random_local_unitary<R: Rng + ?Sized>(shape: &SystemShape, rng: &mut R) -> CMatrix {
    shape
        .local_dims()
        .iter()
        .map(|&d| random_unitary(d, rng))
        .reduce(|a, b| a.kronecker(&b))
        .expect("shape has at least one site")
}

/// GUE-distributed Hermitian operator.
pub fn random_hermitian<R: Rng + ?Sized>(shape: &SystemShape, rng: &mut R) -> Operator {
    let d = shape.total_dim();
    let g = CMatrix::from_fn(d, d, |_, _| complex_gaussian(rng));
    let h = (&g + g.adjoint()).unscale(2.0);
    Operator::new(h, shape.clone()).expect("dimensions match shape")
}

/// Random mixed state ρ = G G† / Tr(G G†) with `rank` columns.
pub fn random_density<R: Rng + ?Sized>(
    shape: &SystemShape,
    rank: usize,
    rng: &mut R,
) -> DensityState {
    let d = shape.total_dim();
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| complex_gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityState::from_parts_unchecked(m.unscale(tr), shape.clone())
}
