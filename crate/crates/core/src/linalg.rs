//! Small dense kernels for the concurrent-group power systems (a handful of
//! rows, one per cell in the group).

use nalgebra::DMatrix;

/// Row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Square {
    n: usize,
    data: Vec<f64>,
}

impl Square {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    /// Largest eigenvalue modulus, from the full (complex) spectrum.
    pub fn spectral_radius(&self) -> f64 {
        match self.n {
            0 => 0.0,
            1 => self.data[0].abs(),
            n => DMatrix::from_row_slice(n, n, &self.data)
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max),
        }
    }

    /// Solves `(I - self) x = rhs` for a non-negative `self`.
    ///
    /// `I - self` is a Z-matrix, and it is a nonsingular M-matrix (i.e. the
    /// spectral radius of `self` is below one) exactly when Gaussian
    /// elimination without pivoting meets only positive pivots. Returns `None`
    /// when a pivot is not positive. For a positive `rhs` the solution is then
    /// positive as well.
    pub fn solve_identity_minus(&self, rhs: &[f64]) -> Option<Vec<f64>> {
        let n = self.n;
        debug_assert_eq!(rhs.len(), n);
        let mut a: Vec<f64> = self.data.iter().map(|v| -v).collect();
        for i in 0..n {
            a[i * n + i] += 1.0;
        }
        let mut x = rhs.to_vec();
        for k in 0..n {
            let pivot = a[k * n + k];
            if !pivot.is_finite() || pivot <= 0.0 {
                return None;
            }
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    a[i * n + j] -= f * a[k * n + j];
                }
                x[i] -= f * x[k];
            }
        }
        for k in (0..n).rev() {
            let mut s = x[k];
            for j in k + 1..n {
                s -= a[k * n + j] * x[j];
            }
            x[k] = s / a[k * n + k];
        }
        Some(x)
    }
}
