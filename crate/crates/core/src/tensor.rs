//! Evaluated tensors at a point.

use serde::Serialize;

/// Components of a type `(r, s)` tensor at one point, row-major over the
/// index order documented by the producing operation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TensorValue {
    pub contravariant: usize,
    pub covariant: usize,
    pub dim: usize,
    pub point: Vec<f64>,
    pub data: Vec<f64>,
}

impl TensorValue {
    pub fn zeros(contravariant: usize, covariant: usize, dim: usize, point: &[f64]) -> TensorValue {
        let rank = contravariant + covariant;
        TensorValue {
            contravariant,
            covariant,
            dim,
            point: point.to_vec(),
            data: vec![0.0; dim.pow(rank as u32)],
        }
    }

    pub fn from_fn(
        contravariant: usize,
        covariant: usize,
        dim: usize,
        point: &[f64],
        mut f: impl FnMut(&[usize]) -> f64,
    ) -> TensorValue {
        let mut t = TensorValue::zeros(contravariant, covariant, dim, point);
        let rank = t.rank();
        let mut idx = vec![0usize; rank];
        for slot in t.data.iter_mut() {
            *slot = f(&idx);
            for pos in (0..rank).rev() {
                idx[pos] += 1;
                if idx[pos] < dim {
                    break;
                }
                idx[pos] = 0;
            }
        }
        t
    }

    pub fn rank(&self) -> usize {
        self.contravariant + self.covariant
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank());
        idx.iter().fold(0, |acc, &i| acc * self.dim + i)
    }

    pub fn get(&self, idx: &[usize]) -> f64 {
        self.data[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: f64) {
        let o = self.offset(idx);
        self.data[o] = v;
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|x| x.is_finite())
    }
}
