use rand::Rng;
use serde::{Deserialize, Serialize};

/// Dense row-major matrix of `f64`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == cols), "ragged rows");
        Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        }
    }

    /// Uniform in `[-scale, scale]`.
    pub fn random(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Self {
        Self {
            rows,
            cols,
            data: (0..rows * cols)
                .map(|_| rng.gen_range(-scale..=scale))
                .collect(),
        }
    }

    /// Glorot-uniform initialization for a `rows x cols` weight.
    pub fn glorot(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::random(rows, cols, (6.0 / (rows + cols) as f64).sqrt(), rng)
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    #[inline]
    pub fn add_at(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] += v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `self * w^T`: applies the linear map `w` (out x in) to every row.
    pub fn linear(&self, w: &Matrix) -> Matrix {
        assert_eq!(self.cols, w.cols, "shape mismatch");
        let mut out = Matrix::zeros(self.rows, w.rows);
        for i in 0..self.rows {
            let x = self.row(i);
            for o in 0..w.rows {
                out.set(i, o, dot(x, w.row(o)));
            }
        }
        out
    }

    /// `w * x` for a single vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len(), "shape mismatch");
        (0..self.rows).map(|o| dot(self.row(o), x)).collect()
    }

    /// `w^T * g` for a single vector.
    pub fn apply_transposed(&self, g: &[f64]) -> Vec<f64> {
        assert_eq!(self.rows, g.len(), "shape mismatch");
        let mut out = vec![0.0; self.cols];
        for (o, go) in g.iter().enumerate() {
            for (c, w) in self.row(o).iter().enumerate() {
                out[c] += go * w;
            }
        }
        out
    }

    /// `self += a * b^T` (outer product accumulation).
    pub fn add_outer(&mut self, a: &[f64], b: &[f64]) {
        assert_eq!((self.rows, self.cols), (a.len(), b.len()), "shape mismatch");
        for (r, av) in a.iter().enumerate() {
            if *av == 0.0 {
                continue;
            }
            for (c, bv) in b.iter().enumerate() {
                self.data[r * self.cols + c] += av * bv;
            }
        }
    }

    pub fn scale(&mut self, s: f64) {
        self.data.iter_mut().for_each(|v| *v *= s);
    }

    pub fn add_assign(&mut self, other: &Matrix) {
        assert_eq!(
            (self.rows, self.cols),
            (other.rows, other.cols),
            "shape mismatch"
        );
        self.data
            .iter_mut()
            .zip(&other.data)
            .for_each(|(a, b)| *a += b);
    }

    pub fn norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_transposed_agree() {
        let w = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![-1.0, 0.5, 0.0]]);
        let x = [2.0, -1.0, 4.0];
        assert_eq!(w.apply(&x), vec![12.0, -2.5]);
        let h = Matrix::from_rows(&[x.to_vec()]);
        assert_eq!(h.linear(&w).row(0), &[12.0, -2.5]);
        // <w x, g> == <x, w^T g>
        let g = [0.5, 2.0];
        let lhs = dot(&w.apply(&x), &g);
        let rhs = dot(&x, &w.apply_transposed(&g));
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn outer_product_accumulates() {
        let mut m = Matrix::zeros(2, 2);
        m.add_outer(&[1.0, 2.0], &[3.0, 4.0]);
        m.add_outer(&[1.0, 0.0], &[1.0, 1.0]);
        assert_eq!(m.data, vec![4.0, 5.0, 6.0, 8.0]);
        assert_eq!(Matrix::from_rows(&[vec![3.0, 4.0]]).norm(), 5.0);
    }
}
