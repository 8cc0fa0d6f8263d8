//! Numeric tolerances shared by every module.
//!
//! Validation, degeneracy detection and detection margins all read from
//! [`POLICY`] so a single record controls how strict the toolkit is.

/// Tolerance record. See [`POLICY`] for the values in use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NumericPolicy {
    /// Max entry of `M - M†` for an operator to count as Hermitian.
    pub hermitian: f64,
    /// |‖ψ‖ - 1| allowed for a pure state.
    pub norm: f64,
    /// |Tr ρ - 1| allowed for a density state.
    pub trace: f64,
    /// Most negative eigenvalue allowed for a density state.
    pub min_eigenvalue: f64,
    /// Eigenvalues within this of the minimum belong to the ground manifold.
    pub degeneracy: f64,
    /// Eigenvalues below this are treated as exact zeros in `x ln x`.
    pub log_zero: f64,
    /// Weight of ρ outside supp(σ) above which S(ρ|σ) is infinite.
    pub support: f64,
    /// Strict margin a witness value must clear its threshold by.
    pub detection_margin: f64,
    /// Gaps below this are reported as zero.
    pub gap_clamp: f64,
    /// Max imaginary part tolerated in an expectation value.
    pub imaginary: f64,
    /// Restart energies within this of the best count toward consensus.
    pub consensus: f64,
}

pub const POLICY: NumericPolicy = NumericPolicy {
    hermitian: 1e-12,
    norm: 1e-12,
    trace: 1e-10,
    min_eigenvalue: -1e-10,
    degeneracy: 1e-8,
    log_zero: 1e-14,
    support: 1e-12,
    detection_margin: 1e-9,
    gap_clamp: 1e-8,
    imaginary: 1e-10,
    consensus: 1e-8,
};

impl Default for NumericPolicy {
    fn default() -> Self {
        POLICY
    }
}
