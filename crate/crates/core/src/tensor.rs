//! Dense complex operators and states on multi-site Hilbert spaces.
//!
//! Basis indices are mixed-radix numbers with site 0 as the most significant
//! digit, so `kron(a, b)` places `a` on the leading sites.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::policy::POLICY;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Per-site Hilbert space dimensions of a composite system.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "ShapeRecord", into = "ShapeRecord")]
pub struct SystemShape {
    local_dims: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ShapeRecord {
    local_dims: Vec<usize>,
}

impl TryFrom<ShapeRecord> for SystemShape {
    type Error = Error;
    fn try_from(r: ShapeRecord) -> Result<Self> {
        SystemShape::new(r.local_dims)
    }
}

impl From<SystemShape> for ShapeRecord {
    fn from(s: SystemShape) -> Self {
        ShapeRecord {
            local_dims: s.local_dims,
        }
    }
}

impl SystemShape {
    pub fn new(local_dims: Vec<usize>) -> Result<Self> {
        if local_dims.is_empty() {
            return invalid("a system needs at least one site");
        }
        if let Some(d) = local_dims.iter().find(|&&d| d < 2) {
            return invalid(format!("local dimension {d} < 2"));
        }
        local_dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| Error::InvalidArgument("total dimension overflows".into()))?;
        Ok(Self { local_dims })
    }

    /// `n` sites of dimension `d`.
    pub fn uniform(n: usize, d: usize) -> Result<Self> {
        Self::new(vec![d; n])
    }

    pub fn qubits(n: usize) -> Result<Self> {
        Self::uniform(n, 2)
    }

    pub fn local_dims(&self) -> &[usize] {
        &self.local_dims
    }

    pub fn n_sites(&self) -> usize {
        self.local_dims.len()
    }

    pub fn total_dim(&self) -> usize {
        self.local_dims.iter().product()
    }

    /// Place value of each site's digit.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.local_dims.len()];
        for i in (0..self.local_dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.local_dims[i + 1];
        }
        strides
    }

    /// Mixed-radix digits of a basis index.
    pub fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.local_dims.len()];
        for (slot, &d) in out.iter_mut().zip(&self.local_dims).rev() {
            *slot = index % d;
            index /= d;
        }
        out
    }

    pub fn index(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.local_dims)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    pub fn concat(&self, other: &SystemShape) -> SystemShape {
        let mut local_dims = self.local_dims.clone();
        local_dims.extend_from_slice(&other.local_dims);
        SystemShape { local_dims }
    }

    /// Shape of the listed sites, in the listed order.
    pub fn subshape(&self, sites: &[usize]) -> Result<SystemShape> {
        self.check_sites(sites)?;
        SystemShape::new(sites.iter().map(|&s| self.local_dims[s]).collect())
    }

    pub(crate) fn check_sites(&self, sites: &[usize]) -> Result<()> {
        let mut seen = vec![false; self.n_sites()];
        for &s in sites {
            if s >= self.n_sites() {
                return invalid(format!(
                    "site {s} out of range for {} sites",
                    self.n_sites()
                ));
            }
            if std::mem::replace(&mut seen[s], true) {
                return invalid(format!("site {s} listed twice"));
            }
        }
        Ok(())
    }
}

fn max_anti_hermitian(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn check_square(m: &CMatrix, shape: &SystemShape) -> Result<()> {
    let d = shape.total_dim();
    if m.nrows() != d || m.ncols() != d {
        return invalid(format!(
            "matrix is {}x{}, shape {:?} needs {d}x{d}",
            m.nrows(),
            m.ncols(),
            shape.local_dims()
        ));
    }
    Ok(())
}

/// A dense operator together with the site structure it acts on.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    shape: SystemShape,
}

impl Operator {
    pub fn new(matrix: CMatrix, shape: SystemShape) -> Result<Self> {
        check_square(&matrix, &shape)?;
        Ok(Self { matrix, shape })
    }

    /// Like [`Operator::new`] but also rejects non-Hermitian matrices.
    pub fn hermitian(matrix: CMatrix, shape: SystemShape) -> Result<Self> {
        let op = Self::new(matrix, shape)?;
        op.ensure_hermitian()?;
        Ok(op)
    }

    pub fn identity(shape: SystemShape) -> Self {
        let d = shape.total_dim();
        Self {
            matrix: CMatrix::identity(d, d),
            shape,
        }
    }

    pub fn zeros(shape: SystemShape) -> Self {
        let d = shape.total_dim();
        Self {
            matrix: CMatrix::zeros(d, d),
            shape,
        }
    }

    /// Tensor product of single-site factors, identity on unlisted sites.
    pub fn local_product(shape: &SystemShape, factors: &[(usize, &CMatrix)]) -> Result<Self> {
        let sites: Vec<usize> = factors.iter().map(|(s, _)| *s).collect();
        shape.check_sites(&sites)?;
        for &(s, m) in factors {
            let d = shape.local_dims()[s];
            if m.nrows() != d || m.ncols() != d {
                return invalid(format!("factor on site {s} is not {d}x{d}"));
            }
        }
        let mut acc: Option<CMatrix> = None;
        for (site, &d) in shape.local_dims().iter().enumerate() {
            let eye;
            let m = match factors.iter().find(|(s, _)| *s == site) {
                Some((_, m)) => *m,
                None => {
                    eye = CMatrix::identity(d, d);
                    &eye
                }
            };
            acc = Some(match acc {
                None => m.clone(),
                Some(a) => a.kronecker(m),
            });
        }
        Ok(Self {
            matrix: acc.expect("shape has at least one site"),
            shape: shape.clone(),
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest entry of `M - M†`.
    pub fn hermiticity_error(&self) -> f64 {
        max_anti_hermitian(&self.matrix)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_error() <= POLICY.hermitian
    }

    pub(crate) fn ensure_hermitian(&self) -> Result<()> {
        let err = self.hermiticity_error();
        if err > POLICY.hermitian {
            return invalid(format!(
                "operator is not Hermitian (max |M - M†| = {err:.3e})"
            ));
        }
        Ok(())
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            matrix: &self.matrix * C64::new(factor, 0.0),
            shape: self.shape.clone(),
        }
    }

    pub fn add(&self, other: &Operator) -> Result<Self> {
        self.same_shape(other.shape())?;
        Ok(Self {
            matrix: &self.matrix + &other.matrix,
            shape: self.shape.clone(),
        })
    }

    pub fn mul(&self, other: &Operator) -> Result<Self> {
        self.same_shape(other.shape())?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix,
            shape: self.shape.clone(),
        })
    }

    pub fn commutator(&self, other: &Operator) -> Result<Self> {
        self.same_shape(other.shape())?;
        Ok(Self {
            matrix: &self.matrix * &other.matrix - &other.matrix * &self.matrix,
            shape: self.shape.clone(),
        })
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    fn same_shape(&self, other: &SystemShape) -> Result<()> {
        if &self.shape != other {
            return invalid(format!(
                "shape mismatch: {:?} vs {:?}",
                self.shape.local_dims(),
                other.local_dims()
            ));
        }
        Ok(())
    }
}

/// A normalized state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    amplitudes: CVector,
    shape: SystemShape,
}

impl PureState {
    pub fn new(amplitudes: CVector, shape: SystemShape) -> Result<Self> {
        if amplitudes.len() != shape.total_dim() {
            return invalid(format!(
                "{} amplitudes for total dimension {}",
                amplitudes.len(),
                shape.total_dim()
            ));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > POLICY.norm {
            return invalid(format!("state norm is {norm}, expected 1"));
        }
        Ok(Self { amplitudes, shape })
    }

    /// Normalizes the vector first. Fails on the zero vector.
    pub fn normalized(amplitudes: CVector, shape: SystemShape) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm > 0.0) || !norm.is_finite() {
            return invalid("cannot normalize a zero or non-finite vector");
        }
        Self::new(amplitudes.unscale(norm), shape)
    }

    /// Computational basis state with the given per-site levels.
    pub fn basis(shape: SystemShape, levels: &[usize]) -> Result<Self> {
        if levels.len() != shape.n_sites() {
            return invalid("one level per site is required");
        }
        for (&l, &d) in levels.iter().zip(shape.local_dims()) {
            if l >= d {
                return invalid(format!("level {l} exceeds local dimension {d}"));
            }
        }
        let mut v = CVector::zeros(shape.total_dim());
        v[shape.index(levels)] = ONE;
        Ok(Self {
            amplitudes: v,
            shape,
        })
    }

    pub(crate) fn from_parts_unchecked(amplitudes: CVector, shape: SystemShape) -> Self {
        Self { amplitudes, shape }
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn density(&self) -> DensityState {
        DensityState {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            shape: self.shape.clone(),
        }
    }

    /// ⟨ψ|A|ψ⟩, real part.
    pub fn expectation(&self, op: &Operator) -> Result<f64> {
        if op.shape() != &self.shape {
            return invalid("operator and state shapes differ");
        }
        Ok(self.amplitudes.dotc(&(op.matrix() * &self.amplitudes)).re)
    }

    pub fn overlap(&self, other: &PureState) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }

    /// Reduced state on `keep`, computed without forming |ψ⟩⟨ψ|.
    pub fn reduced(&self, keep: &[usize]) -> Result<DensityState> {
        let split = SiteSplit::new(&self.shape, keep)?;
        let mut m = CMatrix::zeros(split.kept_dim, split.traced_dim);
        for (g, amp) in self.amplitudes.iter().enumerate() {
            let (a, t) = split.map[g];
            m[(a, t)] = *amp;
        }
        Ok(DensityState {
            matrix: &m * m.adjoint(),
            shape: split.kept_shape,
        })
    }
}

/// A positive, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityState {
    matrix: CMatrix,
    shape: SystemShape,
}

impl DensityState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix, shape: SystemShape) -> Result<Self> {
        check_square(&matrix, &shape)?;
        let herm = max_anti_hermitian(&matrix);
        if herm > POLICY.hermitian {
            return invalid(format!("density matrix is not Hermitian ({herm:.3e})"));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > POLICY.trace || tr.im.abs() > POLICY.trace {
            return invalid(format!("density matrix trace is {tr}, expected 1"));
        }
        let min = crate::spectral::eigh_values(&matrix)
            .first()
            .copied()
            .unwrap_or(0.0);
        if min < POLICY.min_eigenvalue {
            return invalid(format!("density matrix has eigenvalue {min:.3e} < 0"));
        }
        Ok(Self { matrix, shape })
    }

    pub(crate) fn from_parts_unchecked(matrix: CMatrix, shape: SystemShape) -> Self {
        Self { matrix, shape }
    }

    pub fn maximally_mixed(shape: SystemShape) -> Self {
        let d = shape.total_dim();
        Self {
            matrix: CMatrix::identity(d, d).unscale(d as f64),
            shape,
        }
    }

    /// Convex combination Σ wᵢ |ψᵢ⟩⟨ψᵢ|; weights are normalized.
    pub fn mixture(components: &[(f64, PureState)]) -> Result<Self> {
        let Some((_, first)) = components.first() else {
            return invalid("empty mixture");
        };
        let shape = first.shape().clone();
        let total: f64 = components.iter().map(|(w, _)| *w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || !(total > 0.0) {
            return invalid("mixture weights must be non-negative with positive sum");
        }
        let d = shape.total_dim();
        let mut m = CMatrix::zeros(d, d);
        for (w, psi) in components {
            if psi.shape() != &shape {
                return invalid("mixture components have different shapes");
            }
            m += psi.amplitudes() * psi.amplitudes().adjoint() * C64::new(w / total, 0.0);
        }
        Ok(Self { matrix: m, shape })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn shape(&self) -> &SystemShape {
        &self.shape
    }

    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ |ρ_ij|² for Hermitian ρ
        self.matrix.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Conjugates by `u`: ρ ↦ U ρ U†.
    pub fn conjugate(&self, u: &CMatrix) -> Result<Self> {
        if u.nrows() != self.matrix.nrows() || u.ncols() != self.matrix.ncols() {
            return invalid("unitary dimension mismatch");
        }
        Ok(Self {
            matrix: u * &self.matrix * u.adjoint(),
            shape: self.shape.clone(),
        })
    }
}

impl From<&PureState> for DensityState {
    fn from(psi: &PureState) -> Self {
        psi.density()
    }
}

/// Kronecker product with the first operand on the most significant sites.
pub trait Kron {
    fn kron(&self, other: &Self) -> Self;
}

impl Kron for Operator {
    fn kron(&self, other: &Self) -> Self {
        Operator {
            matrix: self.matrix.kronecker(&other.matrix),
            shape: self.shape.concat(&other.shape),
        }
    }
}

impl Kron for PureState {
    fn kron(&self, other: &Self) -> Self {
        PureState {
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
            shape: self.shape.concat(&other.shape),
        }
    }
}

impl Kron for DensityState {
    fn kron(&self, other: &Self) -> Self {
        DensityState {
            matrix: self.matrix.kronecker(&other.matrix),
            shape: self.shape.concat(&other.shape),
        }
    }
}

/// Index bookkeeping for splitting a system into kept and traced sites.
struct SiteSplit {
    kept_shape: SystemShape,
    kept_dim: usize,
    traced_dim: usize,
    /// global index -> (kept index, traced index)
    map: Vec<(usize, usize)>,
}

impl SiteSplit {
    fn new(shape: &SystemShape, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return invalid("keep set must be non-empty");
        }
        shape.check_sites(keep)?;
        let mut kept: Vec<usize> = keep.to_vec();
        kept.sort_unstable();
        let traced: Vec<usize> = (0..shape.n_sites()).filter(|s| !kept.contains(s)).collect();
        let kept_shape = shape.subshape(&kept)?;
        let dims = shape.local_dims();
        let traced_dim = traced.iter().map(|&s| dims[s]).product();
        let map = (0..shape.total_dim())
            .map(|g| {
                let digits = shape.digits(g);
                let a = kept.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]);
                let t = traced.iter().fold(0, |acc, &s| acc * dims[s] + digits[s]);
                (a, t)
            })
            .collect();
        Ok(Self {
            kept_dim: kept_shape.total_dim(),
            kept_shape,
            traced_dim,
            map,
        })
    }
}

/// Reduced state on the sites in `keep` (0-based), ordered ascending.
pub fn partial_trace(rho: &DensityState, keep: &[usize]) -> Result<DensityState> {
    let split = SiteSplit::new(rho.shape(), keep)?;
    let mut by_traced: Vec<Vec<(usize, usize)>> = vec![Vec::new(); split.traced_dim];
    for (g, &(a, t)) in split.map.iter().enumerate() {
        by_traced[t].push((a, g));
    }
    let mut out = CMatrix::zeros(split.kept_dim, split.kept_dim);
    for block in &by_traced {
        for &(a, g) in block {
            for &(b, h) in block {
                out[(a, b)] += rho.matrix()[(g, h)];
            }
        }
    }
    Ok(DensityState {
        matrix: out,
        shape: split.kept_shape,
    })
}

fn check_permutation(n: usize, perm: &[usize]) -> Result<()> {
    if perm.len() != n {
        return invalid(format!(
            "permutation has {} entries for {n} sites",
            perm.len()
        ));
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return invalid(format!("{perm:?} is not a permutation of 0..{n}"));
        }
    }
    Ok(())
}

/// For each basis index of the permuted system, the source index.
fn permutation_source_map(
    shape: &SystemShape,
    perm: &[usize],
) -> Result<(SystemShape, Vec<usize>)> {
    check_permutation(shape.n_sites(), perm)?;
    let new_shape = SystemShape::new(perm.iter().map(|&p| shape.local_dims()[p]).collect())?;
    let strides = shape.strides();
    let map = (0..new_shape.total_dim())
        .map(|i| {
            new_shape
                .digits(i)
                .iter()
                .zip(perm)
                .map(|(&digit, &src)| digit * strides[src])
                .sum()
        })
        .collect();
    Ok((new_shape, map))
}

/// Relabels sites: position `j` of the result holds site `perm[j]` of the input.
pub trait PermuteSites: Sized {
    fn permute_sites(&self, perm: &[usize]) -> Result<Self>;
}

impl PermuteSites for PureState {
    fn permute_sites(&self, perm: &[usize]) -> Result<Self> {
        let (shape, map) = permutation_source_map(&self.shape, perm)?;
        let amplitudes = CVector::from_iterator(map.len(), map.iter().map(|&s| self.amplitudes[s]));
        Ok(PureState { amplitudes, shape })
    }
}

impl PermuteSites for Operator {
    fn permute_sites(&self, perm: &[usize]) -> Result<Self> {
        let (shape, map) = permutation_source_map(&self.shape, perm)?;
        let d = map.len();
        let matrix = CMatrix::from_fn(d, d, |i, j| self.matrix[(map[i], map[j])]);
        Ok(Operator { matrix, shape })
    }
}

impl PermuteSites for DensityState {
    fn permute_sites(&self, perm: &[usize]) -> Result<Self> {
        let (shape, map) = permutation_source_map(&self.shape, perm)?;
        let d = map.len();
        let matrix = CMatrix::from_fn(d, d, |i, j| self.matrix[(map[i], map[j])]);
        Ok(DensityState { matrix, shape })
    }
}

/// Inverse of a site permutation.
pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (j, &p) in perm.iter().enumerate() {
        inv[p] = j;
    }
    inv
}

/// Index of the doubled-system basis state obtained by exchanging the digits
/// of `swap_sites` between copy A (`x`) and copy B (`y`).
fn swap_between_copies(shape: &SystemShape, x: usize, y: usize, swap: &[bool]) -> (usize, usize) {
    let mut dx = shape.digits(x);
    let mut dy = shape.digits(y);
    for (s, &flag) in swap.iter().enumerate() {
        if flag {
            std::mem::swap(&mut dx[s], &mut dy[s]);
        }
    }
    (shape.index(&dx), shape.index(&dy))
}

fn swap_mask(shape: &SystemShape, swap_sites: &[usize]) -> Result<Vec<bool>> {
    shape.check_sites(swap_sites)?;
    let mut mask = vec![false; shape.n_sites()];
    for &s in swap_sites {
        mask[s] = true;
    }
    Ok(mask)
}

/// ⟨bra| P (ρ⊗ρ) P† |ket⟩ on the doubled system, where P exchanges the sites
/// in `swap_sites` between the two copies.
pub fn two_copy_element(
    rho: &DensityState,
    bra: &PureState,
    ket: &PureState,
    swap_sites: &[usize],
) -> Result<C64> {
    let shape = rho.shape();
    let doubled = shape.concat(shape);
    if bra.shape() != &doubled || ket.shape() != &doubled {
        return invalid("bra and ket must live on two copies of the state's system");
    }
    let mask = swap_mask(shape, swap_sites)?;
    let d = shape.total_dim();
    let support = |v: &CVector| -> Vec<(usize, usize, C64)> {
        v.iter()
            .enumerate()
            .filter(|(_, a)| a.norm_sqr() > 0.0)
            .map(|(g, a)| {
                let (x, y) = swap_between_copies(shape, g / d, g % d, &mask);
                (x, y, *a)
            })
            .collect()
    };
    let left = support(bra.amplitudes());
    let right = support(ket.amplitudes());
    let m = rho.matrix();
    let mut acc = ZERO;
    for &(x, y, a) in &left {
        for &(xp, yp, b) in &right {
            acc += a.conj() * b * m[(x, xp)] * m[(y, yp)];
        }
    }
    Ok(acc)
}

/// Real, non-negative value of a diagonal two-copy element (`bra == ket`).
pub fn two_copy_matrix_element(
    rho: &DensityState,
    bra: &PureState,
    ket: &PureState,
    swap_sites: &[usize],
) -> Result<f64> {
    let z = two_copy_element(rho, bra, ket, swap_sites)?;
    if z.im.abs() > POLICY.imaginary || z.re < -POLICY.imaginary {
        return Err(Error::Numerical(format!(
            "two-copy element {z} is not a non-negative real; is bra == ket?"
        )));
    }
    Ok(z.re.max(0.0))
}

/// Fast path of [`two_copy_matrix_element`] for a product basis bra = ket =
/// |x⟩⊗|y⟩: the value is ρ[x',x']·ρ[y',y'] with x', y' the exchanged labels.
pub fn two_copy_basis_diagonal(
    rho: &DensityState,
    x: &[usize],
    y: &[usize],
    swap_sites: &[usize],
) -> Result<f64> {
    let shape = rho.shape();
    if x.len() != shape.n_sites() || y.len() != shape.n_sites() {
        return invalid("basis labels need one level per site");
    }
    let mask = swap_mask(shape, swap_sites)?;
    let (xs, ys) = swap_between_copies(shape, shape.index(x), shape.index(y), &mask);
    let m = rho.matrix();
    Ok((m[(xs, xs)].re * m[(ys, ys)].re).max(0.0))
}
