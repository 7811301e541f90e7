//! Wire formats for channels.
//!
//! * Kraus channel: `{"dim_in", "dim_out", "kraus": [matrix, ..]}`
//! * Stochastic channel: `{"dim", "nu", "weights": [{"a", "b", "w"}, ..]}`,
//!   listing only the nonzero weights.
//! * Choi matrix: `{"dim_in", "dim_out", "matrix": matrix}`

use serde::{Deserialize, Serialize};

use super::{ChoiMatrix, KrausChannel, StochasticChannel};
use crate::error::{Error, Result};
use crate::linalg::json::MatrixJson;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannelJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightJson {
    pub a: usize,
    pub b: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StochasticChannelJson {
    pub dim: usize,
    pub nu: f64,
    pub weights: Vec<WeightJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiMatrixJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub matrix: MatrixJson,
}

impl<T: Real> From<&KrausChannel<T>> for KrausChannelJson {
    fn from(ch: &KrausChannel<T>) -> Self {
        Self {
            dim_in: ch.dim_in(),
            dim_out: ch.dim_out(),
            kraus: ch.kraus_ops().iter().map(MatrixJson::from).collect(),
        }
    }
}

impl KrausChannelJson {
    pub fn to_channel<T: Real>(&self) -> Result<KrausChannel<T>> {
        let ops = self.kraus.iter().map(MatrixJson::to_matrix).collect::<Result<Vec<_>>>()?;
        KrausChannel::new(self.dim_in, self.dim_out, ops)
    }
}

impl<T: Real> From<&StochasticChannel<T>> for StochasticChannelJson {
    fn from(ch: &StochasticChannel<T>) -> Self {
        let dim = ch.dim();
        let weights = ch
            .weights()
            .iter()
            .enumerate()
            .filter(|(_, &w)| w != T::zero())
            .map(|(k, &w)| WeightJson {
                a: k / dim,
                b: k % dim,
                w: w.to_f64_lossy(),
            })
            .collect();
        Self {
            dim,
            nu: ch.nu().to_f64_lossy(),
            weights,
        }
    }
}

impl StochasticChannelJson {
    /// Rebuilds the channel; the declared `nu` must match the weight sum to 1e-9.
    pub fn to_channel<T: Real>(&self) -> Result<StochasticChannel<T>> {
        let entries: Vec<(usize, usize, T)> = self
            .weights
            .iter()
            .map(|e| (e.a, e.b, T::from_f64(e.w).unwrap_or_else(T::nan)))
            .collect();
        let ch = StochasticChannel::from_entries(self.dim, &entries)?;
        let sum: f64 = self.weights.iter().map(|e| e.w).sum();
        if !((sum - self.nu).abs() <= 1e-9) {
            return Err(Error::InvalidStochastic(format!(
                "declared nu = {} but weights sum to {sum}",
                self.nu
            )));
        }
        Ok(ch)
    }
}

impl<T: Real> From<&ChoiMatrix<T>> for ChoiMatrixJson {
    fn from(j: &ChoiMatrix<T>) -> Self {
        Self {
            dim_in: j.dim_in(),
            dim_out: j.dim_out(),
            matrix: MatrixJson::from(j.matrix()),
        }
    }
}

impl ChoiMatrixJson {
    pub fn to_choi<T: Real>(&self) -> Result<ChoiMatrix<T>> {
        ChoiMatrix::new(self.dim_in, self.dim_out, self.matrix.to_matrix()?)
    }
}

impl<T: Real> KrausChannel<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&KrausChannelJson::from(self)).expect("channel serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<KrausChannelJson>(s)?.to_channel()
    }
}

impl<T: Real> StochasticChannel<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&StochasticChannelJson::from(self)).expect("channel serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<StochasticChannelJson>(s)?.to_channel()
    }
}

impl<T: Real> ChoiMatrix<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&ChoiMatrixJson::from(self)).expect("Choi matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str::<ChoiMatrixJson>(s)?.to_choi()
    }
}
