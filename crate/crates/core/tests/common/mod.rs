//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::collections::BTreeSet;

use kgap::random::random_unit_vector;
use kgap::tensor::{CMatrix, CVector, DensityState, PureState, SystemShape, C64};
use rand::Rng;

/// Mixed-radix digits, site 0 most significant.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for s in (0..dims.len()).rev() {
        out[s] = index % dims[s];
        index /= dims[s];
    }
    out
}

pub fn index(digits: &[usize], dims: &[usize]) -> usize {
    digits.iter().zip(dims).fold(0, |acc, (&x, &d)| acc * d + x)
}

/// ρ⊗ρ built entry by entry.
pub fn two_copy(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    CMatrix::from_fn(d * d, d * d, |r, c| {
        rho[(r / d, c / d)] * rho[(r % d, c % d)]
    })
}

/// Permutation matrix on two copies that exchanges the sites in `swap`
/// between copy A and copy B.
pub fn swap_matrix(dims: &[usize], swap: &[usize]) -> CMatrix {
    let d: usize = dims.iter().product();
    let mut p = CMatrix::zeros(d * d, d * d);
    for a in 0..d {
        for b in 0..d {
            let (mut da, mut db) = (digits(a, dims), digits(b, dims));
            for &s in swap {
                std::mem::swap(&mut da[s], &mut db[s]);
            }
            p[(index(&da, dims) * d + index(&db, dims), a * d + b)] = C64::new(1.0, 0.0);
        }
    }
    p
}

/// ⟨x|⊗⟨y| P ρ⊗ρ P† |x⟩⊗|y⟩ from the explicit doubled matrices.
pub fn literal_two_copy_diagonal(
    rho: &CMatrix,
    dims: &[usize],
    x: &[usize],
    y: &[usize],
    swap: &[usize],
) -> f64 {
    let p = swap_matrix(dims, swap);
    let m = &p * two_copy(rho) * p.adjoint();
    let d: usize = dims.iter().product();
    let g = index(x, dims) * d + index(y, dims);
    assert!(m[(g, g)].im.abs() < 1e-12);
    m[(g, g)].re
}

/// Subsets of 0..n containing site 0, excluding the full set: one
/// representative per bipartition.
pub fn bipartition_sides(n: usize) -> Vec<Vec<usize>> {
    (0..1usize << (n - 1))
        .map(|mask| {
            let mut side = vec![0];
            side.extend((1..n).filter(|s| mask >> (s - 1) & 1 == 1));
            side
        })
        .filter(|side| side.len() < n)
        .collect()
}

/// Q₀ of an n-qubit ρ through the explicit ρ⊗ρ construction.
pub fn q0_literal(rho: &CMatrix, n: usize) -> f64 {
    let dims = vec![2; n];
    let zeros = vec![0; n];
    let ones = vec![1; n];
    let mut q = rho[(0, rho.ncols() - 1)].norm();
    for side in bipartition_sides(n) {
        q -= literal_two_copy_diagonal(rho, &dims, &zeros, &ones, &side).sqrt();
    }
    q
}

fn excited(n: usize, alpha: &[usize]) -> Vec<usize> {
    (0..n).map(|s| usize::from(alpha.contains(&s))).collect()
}

/// Q_m of an n-qubit ρ through the explicit ρ⊗ρ construction, summing over
/// ordered pairs (α, β).
pub fn qm_literal(rho: &CMatrix, n: usize, m: usize) -> f64 {
    let dims = vec![2; n];
    let subsets: Vec<Vec<usize>> = (0..1usize << n)
        .filter(|mask| mask.count_ones() as usize == m)
        .map(|mask| (0..n).filter(|s| mask >> (n - 1 - s) & 1 == 1).collect())
        .collect();
    let mut q = 0.0;
    for a in &subsets {
        for b in &subsets {
            if a.iter().filter(|s| b.contains(s)).count() + 1 != m {
                continue;
            }
            let (da, db) = (excited(n, a), excited(n, b));
            q += rho[(index(&da, &dims), index(&db, &dims))].norm();
            q -= literal_two_copy_diagonal(rho, &dims, &da, &db, a).sqrt();
        }
    }
    let pop: f64 = subsets
        .iter()
        .map(|a| rho[(index(&excited(n, a), &dims), index(&excited(n, a), &dims))].re)
        .sum();
    q - (m * (n - m - 1)) as f64 * pop
}

/// |ψ_A⟩⊗|ψ_B⟩ written directly in site order for a side A of n qubits.
pub fn bipartite_product<R: Rng + ?Sized>(n: usize, side: &[usize], rng: &mut R) -> PureState {
    let rest: Vec<usize> = (0..n).filter(|s| !side.contains(s)).collect();
    let a = random_unit_vector(1 << side.len(), rng);
    let b = random_unit_vector(1 << rest.len(), rng);
    let dims = vec![2; n];
    let amps = CVector::from_fn(1 << n, |g, _| {
        let dg = digits(g, &dims);
        let ia = side.iter().fold(0, |acc, &s| acc * 2 + dg[s]);
        let ib = rest.iter().fold(0, |acc, &s| acc * 2 + dg[s]);
        a[ia] * b[ib]
    });
    PureState::new(amps, SystemShape::qubits(n).unwrap()).unwrap()
}

/// A mixture of up to 8 bipartite product states over random bipartitions.
pub fn random_biseparable<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DensityState {
    let count = rng.random_range(1..=8);
    let sides = bipartition_sides(n);
    let mut weights: Vec<f64> = (0..count).map(|_| rng.random::<f64>() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    let mut rho = CMatrix::zeros(1 << n, 1 << n);
    for w in weights {
        let side = &sides[rng.random_range(0..sides.len())];
        let psi = bipartite_product(n, side, rng);
        let v = psi.amplitudes();
        rho += v * v.adjoint() * C64::new(w, 0.0);
    }
    DensityState::new(rho, SystemShape::qubits(n).unwrap()).unwrap()
}

/// Every set partition of 0..n into exactly k blocks, as canonical label
/// vectors, by scanning all k^n labelings.
pub fn brute_partitions(n: usize, k: usize) -> BTreeSet<Vec<usize>> {
    let mut out = BTreeSet::new();
    for code in 0..k.pow(n as u32) {
        let labels = digits(code, &vec![k; n]);
        let mut relabel = vec![usize::MAX; k];
        let mut next = 0;
        let canon: Vec<usize> = labels
            .iter()
            .map(|&l| {
                if relabel[l] == usize::MAX {
                    relabel[l] = next;
                    next += 1;
                }
                relabel[l]
            })
            .collect();
        if next == k {
            out.insert(canon);
        }
    }
    out
}

/// Stirling numbers of the second kind by the triangle recurrence.
pub fn stirling2(n: usize, k: usize) -> u64 {
    let mut s = vec![vec![0u64; k + 1]; n + 1];
    s[0][0] = 1;
    for i in 1..=n {
        for j in 1..=k.min(i) {
            s[i][j] = j as u64 * s[i - 1][j] + s[i - 1][j - 1];
        }
    }
    s[n][k]
}

/// Qubit state with Bloch angles (θ, φ).
pub fn bloch(theta: f64, phi: f64) -> [C64; 2] {
    [
        C64::new((theta / 2.0).cos(), 0.0),
        C64::from_polar((theta / 2.0).sin(), phi),
    ]
}

/// ⟨a⊗b|H|a⊗b⟩ for a two-qubit Hamiltonian matrix.
pub fn product_energy(h: &CMatrix, a: &[C64; 2], b: &[C64; 2]) -> f64 {
    let v = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    let mut e = C64::new(0.0, 0.0);
    for i in 0..4 {
        for j in 0..4 {
            e += v[i].conj() * h[(i, j)] * v[j];
        }
    }
    e.re
}

fn grid_search(h: &CMatrix, theta1: &[f64], theta2: &[f64], phi2: &[f64]) -> (f64, [f64; 3]) {
    let firsts: Vec<[C64; 2]> = theta1.iter().map(|&t| bloch(t, 0.0)).collect();
    let mut best = (f64::INFINITY, [0.0; 3]);
    for &t2 in theta2 {
        for &p2 in phi2 {
            let b = bloch(t2, p2);
            for (a, &t1) in firsts.iter().zip(theta1) {
                let e = product_energy(h, a, &b);
                if e < best.0 {
                    best = (e, [t1, t2, p2]);
                }
            }
        }
    }
    best
}

fn window(center: f64, half_width: f64, step: f64, lo: f64, hi: f64) -> Vec<f64> {
    let n = (half_width / step).ceil() as i64;
    (-n..=n)
        .map(|i| center + i as f64 * step)
        .filter(|x| (lo..=hi).contains(x))
        .collect()
}

/// Minimum of ⟨ψ_1⊗ψ_2|H|ψ_1⊗ψ_2⟩ over Bloch-sphere grids: a full coarse
/// grid with `coarse_steps` polar intervals, then a grid of spacing at most
/// `resolution` over the coarse cell around the coarse minimizer. The first
/// azimuth is fixed at 0, which loses nothing when H commutes with rotations
/// about z.
pub fn bloch_grid_minimum(h: &CMatrix, coarse_steps: usize, resolution: f64) -> f64 {
    use std::f64::consts::PI;
    let dc = PI / coarse_steps as f64;
    let polar: Vec<f64> = (0..=coarse_steps).map(|i| i as f64 * dc).collect();
    let azimuth: Vec<f64> = (0..2 * coarse_steps).map(|i| i as f64 * dc).collect();
    let (coarse, [t1, t2, p2]) = grid_search(h, &polar, &polar, &azimuth);
    let step = dc / (dc / resolution).ceil();
    let (fine, _) = grid_search(
        h,
        &window(t1, dc, step, 0.0, PI),
        &window(t2, dc, step, 0.0, PI),
        &window(p2, dc, step, -PI, 3.0 * PI),
    );
    coarse.min(fine)
}

/// Random product over the given blocks of n qubits, written directly in
/// site order.
pub fn block_product<R: Rng + ?Sized>(n: usize, blocks: &[Vec<usize>], rng: &mut R) -> CVector {
    let factors: Vec<CVector> = blocks
        .iter()
        .map(|b| random_unit_vector(1 << b.len(), rng))
        .collect();
    let dims = vec![2; n];
    CVector::from_fn(1 << n, |g, _| {
        let dg = digits(g, &dims);
        blocks
            .iter()
            .zip(&factors)
            .map(|(b, f)| f[b.iter().fold(0, |acc, &s| acc * 2 + dg[s])])
            .product()
    })
}

/// ⟨v|H|v⟩.
pub fn energy(h: &CMatrix, v: &CVector) -> f64 {
    (v.adjoint() * h * v)[(0, 0)].re
}
