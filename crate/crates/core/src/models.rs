//! Spin operators, lattices and the two model Hamiltonians.
//!
//! Sites are 0-based throughout the API. Energies are in units of the
//! coupling `J`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{config_err, invalid, Result};
use crate::tensor::{CMatrix, Operator, SystemShape, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    Half,
    One,
}

impl Spin {
    pub fn dim(self) -> usize {
        match self {
            Spin::Half => 2,
            Spin::One => 3,
        }
    }

    /// Parses `"1/2"`, `"0.5"` or `"1"`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "1/2" | "0.5" | "half" => Ok(Spin::Half),
            "1" | "one" => Ok(Spin::One),
            other => invalid(format!(
                "unsupported spin {other:?}; only 1/2 and 1 are available"
            )),
        }
    }
}

/// Single-site spin matrices. Spin-1/2 gives the Pauli matrices (eigenvalues
/// ±1); spin-1 gives the angular momentum matrices with ħ = 1 in the basis
/// m = +1, 0, -1.
#[derive(Clone, Debug)]
pub struct SpinOperators {
    pub x: Operator,
    pub y: Operator,
    pub z: Operator,
}

impl SpinOperators {
    pub fn components(&self) -> [&Operator; 3] {
        [&self.x, &self.y, &self.z]
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn spin_operators(spin: Spin) -> SpinOperators {
    let (x, y, z) = match spin {
        Spin::Half => (
            CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)]),
            CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]),
            CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)]),
        ),
        Spin::One => {
            let s = std::f64::consts::FRAC_1_SQRT_2;
            let o = c(0., 0.);
            (
                CMatrix::from_row_slice(
                    3,
                    3,
                    &[o, c(s, 0.), o, c(s, 0.), o, c(s, 0.), o, c(s, 0.), o],
                ),
                CMatrix::from_row_slice(
                    3,
                    3,
                    &[o, c(0., -s), o, c(0., s), o, c(0., -s), o, c(0., s), o],
                ),
                CMatrix::from_row_slice(3, 3, &[c(1., 0.), o, o, o, o, o, o, o, c(-1., 0.)]),
            )
        }
    };
    let shape = SystemShape::uniform(1, spin.dim()).expect("valid single-site shape");
    let wrap = |m| Operator::new(m, shape.clone()).expect("dimensions match");
    SpinOperators {
        x: wrap(x),
        y: wrap(y),
        z: wrap(z),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    #[default]
    Open,
    Periodic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LatticeKind {
    Chain,
    SquareGrid,
}

/// Sites and nearest-neighbour bonds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    n_sites: usize,
    edges: Vec<(usize, usize)>,
    label: String,
}

impl Lattice {
    pub fn new(
        n_sites: usize,
        edges: Vec<(usize, usize)>,
        label: impl Into<String>,
    ) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for &(a, b) in &edges {
            if a == b {
                return invalid(format!("self-edge on site {a}"));
            }
            if a >= n_sites || b >= n_sites {
                return invalid(format!("edge ({a}, {b}) out of range for {n_sites} sites"));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return invalid(format!("duplicate edge ({a}, {b})"));
            }
        }
        Ok(Self {
            n_sites,
            edges,
            label: label.into(),
        })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [", self.label)?;
        for (i, (a, b)) in self.edges.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "({}, {})", a + 1, b + 1)?;
        }
        write!(f, "]")
    }
}

/// Nearest-neighbour lattice. A periodic wrap is only added along axes of
/// length ≥ 3; on shorter axes it would repeat an existing bond.
pub fn make_lattice(kind: LatticeKind, dims: &[usize], boundary: Boundary) -> Result<Lattice> {
    if dims.contains(&0) {
        return invalid("lattice dimensions must be positive");
    }
    let wraps = |len: usize| boundary == Boundary::Periodic && len >= 3;
    let tag = match boundary {
        Boundary::Open => "open",
        Boundary::Periodic => "periodic",
    };
    match kind {
        LatticeKind::Chain => {
            let [n] = dims else {
                return invalid("a chain takes exactly one dimension");
            };
            let n = *n;
            let mut edges: Vec<(usize, usize)> =
                (0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect();
            if wraps(n) {
                edges.push((n - 1, 0));
            }
            Lattice::new(n, edges, format!("chain-{n}-{tag}"))
        }
        LatticeKind::SquareGrid => {
            let [rows, cols] = dims else {
                return invalid("a square grid takes exactly two dimensions");
            };
            let (rows, cols) = (*rows, *cols);
            let site = |r: usize, col: usize| r * cols + col;
            let mut edges = Vec::new();
            for r in 0..rows {
                for col in 0..cols.saturating_sub(1) {
                    edges.push((site(r, col), site(r, col + 1)));
                }
                if wraps(cols) {
                    edges.push((site(r, cols - 1), site(r, 0)));
                }
            }
            for col in 0..cols {
                for r in 0..rows.saturating_sub(1) {
                    edges.push((site(r, col), site(r + 1, col)));
                }
                if wraps(rows) {
                    edges.push((site(rows - 1, col), site(0, col)));
                }
            }
            Lattice::new(rows * cols, edges, format!("{rows}x{cols}-square-{tag}"))
        }
    }
}

/// Parameters of the anisotropic Heisenberg model.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HeisenbergParams {
    pub j: f64,
    pub gamma: f64,
    pub delta: f64,
    pub h: f64,
}

impl Default for HeisenbergParams {
    fn default() -> Self {
        Self {
            j: 1.0,
            gamma: 0.0,
            delta: 1.0,
            h: 0.0,
        }
    }
}

/// H = (J/2) Σ_⟨ij⟩ [(1+γ) σˣσˣ + (1-γ) σʸσʸ + 2Δ σᶻσᶻ] - h Σᵢ σᶻᵢ
pub fn heisenberg_hamiltonian(lattice: &Lattice, p: &HeisenbergParams) -> Result<Operator> {
    if !(-1.0..=1.0).contains(&p.gamma) {
        log::warn!("anisotropy gamma = {} lies outside [-1, 1]", p.gamma);
    }
    let shape = SystemShape::qubits(lattice.n_sites())?;
    let pauli = spin_operators(Spin::Half);
    let coeffs = [
        0.5 * p.j * (1.0 + p.gamma),
        0.5 * p.j * (1.0 - p.gamma),
        p.j * p.delta,
    ];
    let mut h = Operator::zeros(shape.clone());
    for &(a, b) in lattice.edges() {
        for (coeff, s) in coeffs.iter().zip(pauli.components()) {
            if *coeff == 0.0 {
                continue;
            }
            let term = Operator::local_product(&shape, &[(a, s.matrix()), (b, s.matrix())])?;
            h = h.add(&term.scale(*coeff))?;
        }
    }
    if p.h != 0.0 {
        for site in 0..lattice.n_sites() {
            let term = Operator::local_product(&shape, &[(site, pauli.z.matrix())])?;
            h = h.add(&term.scale(-p.h))?;
        }
    }
    Ok(h)
}

/// Parameters of the bilinear-biquadratic spin-1 chain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Spin1ChainParams {
    pub n: usize,
    pub beta: f64,
    pub h: f64,
    #[serde(default = "periodic")]
    pub boundary: Boundary,
}

fn periodic() -> Boundary {
    Boundary::Periodic
}

/// S⃗ᵢ·S⃗ⱼ on a multi-site system.
pub fn spin_dot(shape: &SystemShape, spin: Spin, a: usize, b: usize) -> Result<Operator> {
    let ops = spin_operators(spin);
    let mut out = Operator::zeros(shape.clone());
    for s in ops.components() {
        out = out.add(&Operator::local_product(
            shape,
            &[(a, s.matrix()), (b, s.matrix())],
        )?)?;
    }
    Ok(out)
}

/// H = Σᵢ [S⃗ᵢ·S⃗ᵢ₊₁ + β (S⃗ᵢ·S⃗ᵢ₊₁)²] + h Σᵢ Sᶻᵢ
pub fn spin1_chain_hamiltonian(p: &Spin1ChainParams) -> Result<Operator> {
    if p.n < 2 {
        return invalid(format!("spin-1 chain needs n >= 2, got {}", p.n));
    }
    let lattice = make_lattice(LatticeKind::Chain, &[p.n], p.boundary)?;
    let shape = SystemShape::uniform(p.n, 3)?;
    let mut h = Operator::zeros(shape.clone());
    for &(a, b) in lattice.edges() {
        let dot = spin_dot(&shape, Spin::One, a, b)?;
        let sq = dot.mul(&dot)?;
        h = h.add(&dot)?.add(&sq.scale(p.beta))?;
    }
    if p.h != 0.0 {
        h = h.add(&total_spin_z(&shape, Spin::One)?.scale(p.h))?;
    }
    Ok(h)
}

/// Σᵢ Sᶻᵢ (Σᵢ σᶻᵢ for spin-1/2).
pub fn total_spin_z(shape: &SystemShape, spin: Spin) -> Result<Operator> {
    let z = spin_operators(spin).z;
    let mut out = Operator::zeros(shape.clone());
    for site in 0..shape.n_sites() {
        out = out.add(&Operator::local_product(shape, &[(site, z.matrix())])?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub dims: Vec<usize>,
    #[serde(default)]
    pub boundary: Boundary,
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice> {
        make_lattice(self.kind, &self.dims, self.boundary)
    }
}

fn one() -> f64 {
    1.0
}

/// Serializable model description, as read from config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelSpec {
    Heisenberg {
        lattice: LatticeSpec,
        #[serde(default = "one")]
        j: f64,
        #[serde(default)]
        gamma: f64,
        #[serde(default = "one")]
        delta: f64,
        #[serde(default)]
        h: f64,
    },
    Spin1Chain {
        n: usize,
        #[serde(default = "one")]
        beta: f64,
        #[serde(default)]
        h: f64,
        #[serde(default = "periodic")]
        boundary: Boundary,
    },
}

impl ModelSpec {
    pub fn heisenberg(lattice: LatticeSpec, p: HeisenbergParams) -> Self {
        ModelSpec::Heisenberg {
            lattice,
            j: p.j,
            gamma: p.gamma,
            delta: p.delta,
            h: p.h,
        }
    }

    pub fn spin1_chain(p: Spin1ChainParams) -> Self {
        ModelSpec::Spin1Chain {
            n: p.n,
            beta: p.beta,
            h: p.h,
            boundary: p.boundary,
        }
    }

    pub fn build(&self) -> Result<Operator> {
        match self {
            ModelSpec::Heisenberg {
                lattice,
                j,
                gamma,
                delta,
                h,
            } => heisenberg_hamiltonian(
                &lattice.build()?,
                &HeisenbergParams {
                    j: *j,
                    gamma: *gamma,
                    delta: *delta,
                    h: *h,
                },
            ),
            ModelSpec::Spin1Chain {
                n,
                beta,
                h,
                boundary,
            } => spin1_chain_hamiltonian(&Spin1ChainParams {
                n: *n,
                beta: *beta,
                h: *h,
                boundary: *boundary,
            }),
        }
    }

    pub fn n_sites(&self) -> usize {
        match self {
            ModelSpec::Heisenberg { lattice, .. } => lattice.dims.iter().product(),
            ModelSpec::Spin1Chain { n, .. } => *n,
        }
    }

    /// Names accepted by [`ModelSpec::set_param`].
    pub fn param_names(&self) -> &'static [&'static str] {
        match self {
            ModelSpec::Heisenberg { .. } => &["j", "gamma", "delta", "h"],
            ModelSpec::Spin1Chain { .. } => &["beta", "h"],
        }
    }

    pub fn set_param(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match (self, name) {
            (ModelSpec::Heisenberg { j, .. }, "j") => j,
            (ModelSpec::Heisenberg { gamma, .. }, "gamma") => gamma,
            (ModelSpec::Heisenberg { delta, .. }, "delta") => delta,
            (ModelSpec::Heisenberg { h, .. }, "h") => h,
            (ModelSpec::Spin1Chain { beta, .. }, "beta") => beta,
            (ModelSpec::Spin1Chain { h, .. }, "h") => h,
            (_, other) => return config_err("model", format!("unknown parameter {other:?}")),
        };
        *slot = value;
        Ok(())
    }
}
