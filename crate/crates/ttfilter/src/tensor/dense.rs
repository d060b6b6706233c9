use ndarray::{ArrayD, ArrayViewD, IxDyn};

use super::{TtError, DENSE_CAP};

/// A dense d-way tensor with row-major data (last index fastest).
///
/// Used for inputs to TT compression, for verification against TT results,
/// and for small factor evaluations during operator assembly. Construction
/// validates the shape/data length match and that every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseTensor {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl DenseTensor {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self, TtError> {
        if shape.is_empty() || shape.iter().any(|&n| n == 0) {
            return Err(TtError::Empty);
        }
        let len: usize = shape.iter().product();
        if len != data.len() {
            return Err(TtError::ShapeMismatch(format!(
                "shape {:?} implies {} entries, data has {}",
                shape,
                len,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(TtError::NonFinite("dense tensor data".into()));
        }
        Ok(Self { shape, data })
    }

    pub fn zeros(shape: Vec<usize>) -> Result<Self, TtError> {
        let len: usize = shape.iter().product();
        Self::new(shape, vec![0.0; len])
    }

    /// Fill from a function of the multi-index.
    pub fn from_fn(shape: Vec<usize>, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self, TtError> {
        let len: usize = shape.iter().product();
        if len > DENSE_CAP {
            return Err(TtError::DenseCap { size: len, cap: DENSE_CAP });
        }
        let mut idx = vec![0usize; shape.len()];
        let mut data = Vec::with_capacity(len);
        for _ in 0..len {
            data.push(f(&idx));
            for ax in (0..shape.len()).rev() {
                idx[ax] += 1;
                if idx[ax] < shape[ax] {
                    break;
                }
                idx[ax] = 0;
            }
        }
        Self::new(shape, data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Row-major linear offset of a multi-index.
    pub fn offset(&self, index: &[usize]) -> usize {
        debug_assert_eq!(index.len(), self.shape.len());
        let mut off = 0;
        for (&i, &n) in index.iter().zip(&self.shape) {
            debug_assert!(i < n);
            off = off * n + i;
        }
        off
    }

    pub fn get(&self, index: &[usize]) -> f64 {
        self.data[self.offset(index)]
    }

    pub fn view(&self) -> ArrayViewD<'_, f64> {
        ArrayViewD::from_shape(IxDyn(&self.shape), &self.data).expect("validated shape")
    }

    pub fn to_array(&self) -> ArrayD<f64> {
        self.view().to_owned()
    }

    pub fn from_array(a: ArrayD<f64>) -> Result<Self, TtError> {
        let shape = a.shape().to_vec();
        let standard = a.as_standard_layout();
        Self::new(shape, standard.iter().copied().collect())
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Max absolute entrywise difference; shapes must match.
    pub fn max_abs_diff(&self, other: &DenseTensor) -> Result<f64, TtError> {
        if self.shape != other.shape {
            return Err(TtError::ShapeMismatch(format!(
                "{:?} vs {:?}",
                self.shape, other.shape
            )));
        }
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offset_is_row_major() {
        let t = DenseTensor::from_fn(vec![2, 3, 4], |ix| (ix[0] * 12 + ix[1] * 4 + ix[2]) as f64)
            .unwrap();
        // last index fastest
        for (k, &v) in t.data().iter().enumerate() {
            assert_eq!(v, k as f64);
        }
        assert_eq!(t.get(&[1, 2, 3]), 23.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(DenseTensor::new(vec![], vec![]).is_err());
        assert!(DenseTensor::new(vec![2, 2], vec![0.0; 3]).is_err());
        assert!(DenseTensor::new(vec![2], vec![f64::NAN, 0.0]).is_err());
    }
}
