//! JSON wire format for matrices: `{"rows", "cols", "re": [[..]], "im": [[..]]}`
//! with row-major nested arrays of doubles.

use serde::{Deserialize, Serialize};

use super::ComplexMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl<T: Real> From<&ComplexMatrix<T>> for MatrixJson {
    fn from(m: &ComplexMatrix<T>) -> Self {
        let (rows, cols) = (m.rows(), m.cols());
        let part = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..rows).map(|r| (0..cols).map(|c| f(r, c)).collect()).collect()
        };
        Self {
            rows,
            cols,
            re: part(&|r, c| m[(r, c)].re.to_f64_lossy()),
            im: part(&|r, c| m[(r, c)].im.to_f64_lossy()),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix<T: Real>(&self) -> Result<ComplexMatrix<T>> {
        let shape_ok = self.re.len() == self.rows
            && self.im.len() == self.rows
            && self.re.iter().chain(&self.im).all(|r| r.len() == self.cols);
        if !shape_ok {
            return Err(Error::Parse(format!(
                "matrix declared {}x{} but re/im arrays disagree",
                self.rows, self.cols
            )));
        }
        let conv = |rows: &[Vec<f64>]| -> Vec<Vec<T>> {
            rows.iter()
                .map(|r| r.iter().map(|&x| T::from_f64(x).unwrap_or_else(T::nan)).collect())
                .collect()
        };
        ComplexMatrix::from_parts(&conv(&self.re), &conv(&self.im))
    }
}

impl<T: Real> ComplexMatrix<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(&MatrixJson::from(self)).expect("matrix serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let wire: MatrixJson = serde_json::from_str(s)?;
        wire.to_matrix()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::c;

    #[test]
    fn layout() {
        let m = ComplexMatrix::<f64>::from_fn(1, 2, |_, col| c(col as f64, -1.0));
        assert_eq!(
            m.to_json(),
            r#"{"rows":1,"cols":2,"re":[[0.0,1.0]],"im":[[-1.0,-1.0]]}"#
        );
    }

    #[test]
    fn shape_disagreement_is_a_parse_error() {
        let bad = r#"{"rows":2,"cols":1,"re":[[1.0]],"im":[[0.0]]}"#;
        assert!(matches!(ComplexMatrix::<f64>::from_json(bad), Err(Error::Parse(_))));
    }
}
