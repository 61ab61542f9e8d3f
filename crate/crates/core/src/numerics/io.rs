use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{c, CMatrix, CVector, DensityMatrix, PureState};
use crate::{Error, Result};

/// On-disk state: `{"n": .., "kind": "pure"|"mixed", "data": [[re, im], ..]}`.
/// Pure data lists `2^n` amplitudes in basis-index order; mixed data lists the
/// `4^n` matrix entries row-major.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub n: usize,
    pub kind: String,
    pub data: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LoadedState {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl LoadedState {
    pub fn n(&self) -> usize {
        match self {
            LoadedState::Pure(p) => p.n(),
            LoadedState::Mixed(m) => m.n(),
        }
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        match self {
            LoadedState::Pure(p) => p.to_density(),
            LoadedState::Mixed(m) => Ok(m.clone()),
        }
    }
}

impl StateFile {
    pub fn from_pure(state: &PureState) -> Self {
        Self {
            n: state.n(),
            kind: "pure".into(),
            data: state.amplitudes().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn from_mixed(state: &DensityMatrix) -> Self {
        let m = state.matrix();
        let d = m.nrows();
        let data = (0..d)
            .flat_map(|i| (0..d).map(move |j| (i, j)))
            .map(|(i, j)| [m[(i, j)].re, m[(i, j)].im])
            .collect();
        Self {
            n: state.n(),
            kind: "mixed".into(),
            data,
        }
    }

    pub fn into_state(self) -> Result<LoadedState> {
        let bad = |msg: String| Error::StateFile(msg);
        if self.n == 0 || self.n > super::MAX_SITES {
            return Err(bad(format!("unsupported site count {}", self.n)));
        }
        let d = 1usize << self.n;
        match self.kind.as_str() {
            "pure" => {
                if self.data.len() != d {
                    return Err(bad(format!("expected {d} amplitudes, found {}", self.data.len())));
                }
                let amps = CVector::from_iterator(d, self.data.iter().map(|[re, im]| c(*re, *im)));
                PureState::new(self.n, amps)
                    .map(LoadedState::Pure)
                    .map_err(|e| bad(e.to_string()))
            }
            "mixed" => {
                if self.n > super::MAX_MATRIX_SITES || self.data.len() != d * d {
                    return Err(bad(format!("expected {} entries, found {}", d * d, self.data.len())));
                }
                let m = CMatrix::from_row_iterator(d, d, self.data.iter().map(|[re, im]| c(*re, *im)));
                DensityMatrix::new(self.n, m)
                    .map(LoadedState::Mixed)
                    .map_err(|e| bad(e.to_string()))
            }
            other => Err(bad(format!("unknown kind {other:?}"))),
        }
    }

    pub fn parse(text: &str) -> Result<LoadedState> {
        let file: StateFile = serde_json::from_str(text).map_err(|e| Error::StateFile(e.to_string()))?;
        file.into_state()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("state file serializes")
    }
}

pub fn read_state(path: &Path) -> Result<LoadedState> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))?;
    StateFile::parse(&text)
}

pub fn write_state(path: &Path, file: &StateFile) -> Result<()> {
    std::fs::write(path, file.to_json()).map_err(|e| Error::StateFile(format!("{}: {e}", path.display())))
}
