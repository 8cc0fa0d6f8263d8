//! JSON interchange for complex matrices and states.
//!
//! A matrix is stored row-major as `[re, im]` pairs next to the shape of the
//! system it acts on:
//!
//! ```json
//! {"shape": {"local_dims": [2, 2]}, "rows": 4, "cols": 4, "data": [[0.5, 0.0], ...]}
//! ```
//!
//! A pure state is a single column (`cols = 1`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::models::ModelSpec;
use crate::tensor::{CMatrix, CVector, DensityState, Operator, PureState, SystemShape, C64};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixRecord {
    pub shape: SystemShape,
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

impl MatrixRecord {
    fn from_matrix(shape: &SystemShape, m: &CMatrix) -> Self {
        let data = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self {
            shape: shape.clone(),
            rows: m.nrows(),
            cols: m.ncols(),
            data,
        }
    }

    fn to_matrix(&self) -> Result<CMatrix> {
        if self.data.len() != self.rows * self.cols {
            return invalid(format!(
                "{} entries for a {}x{} matrix",
                self.data.len(),
                self.rows,
                self.cols
            ));
        }
        if self.data.iter().flatten().any(|x| !x.is_finite()) {
            return invalid("matrix entries must be finite");
        }
        Ok(CMatrix::from_row_iterator(
            self.rows,
            self.cols,
            self.data.iter().map(|[re, im]| C64::new(*re, *im)),
        ))
    }

    pub fn from_density(rho: &DensityState) -> Self {
        Self::from_matrix(rho.shape(), rho.matrix())
    }

    pub fn from_pure(psi: &PureState) -> Self {
        let col =
            CMatrix::from_column_slice(psi.amplitudes().len(), 1, psi.amplitudes().as_slice());
        Self::from_matrix(psi.shape(), &col)
    }

    pub fn from_operator(op: &Operator) -> Self {
        Self::from_matrix(op.shape(), op.matrix())
    }

    pub fn to_operator(&self) -> Result<Operator> {
        Operator::new(self.to_matrix()?, self.shape.clone())
    }

    /// Interprets the record as a state: a column is a pure state, a square
    /// matrix a density matrix.
    pub fn to_state(&self) -> Result<StateData> {
        let m = self.to_matrix()?;
        if self.cols == 1 && self.rows == self.shape.total_dim() {
            let v = CVector::from_iterator(self.rows, m.iter().copied());
            return Ok(StateData::Pure(PureState::new(v, self.shape.clone())?));
        }
        Ok(StateData::Density(DensityState::new(
            m,
            self.shape.clone(),
        )?))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum StateData {
    Pure(PureState),
    Density(DensityState),
}

impl StateData {
    pub fn density(&self) -> DensityState {
        match self {
            StateData::Pure(p) => p.density(),
            StateData::Density(d) => d.clone(),
        }
    }

    pub fn shape(&self) -> &SystemShape {
        match self {
            StateData::Pure(p) => p.shape(),
            StateData::Density(d) => d.shape(),
        }
    }
}

pub fn read_record(path: &Path) -> Result<MatrixRecord> {
    let text = fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

pub fn write_record(path: &Path, record: &MatrixRecord) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(record)?)?;
    Ok(())
}

pub fn read_state(path: &Path) -> Result<StateData> {
    read_record(path)?.to_state()
}

/// Reads a model description such as
/// `{"kind": "spin1-chain", "n": 3, "beta": 1.0}`.
pub fn read_model(path: &Path) -> Result<ModelSpec> {
    let text = fs::read_to_string(path)?;
    let model: ModelSpec = serde_json::from_str(&text).map_err(|e| Error::Config {
        path: format!("{}:{}:{}", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    if let Err(e) = model.build() {
        return Err(Error::Config {
            path: path.display().to_string(),
            message: e.to_string(),
        });
    }
    Ok(model)
}
