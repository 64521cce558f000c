//! Small sparse solver for the diagonally dominant systems of the implicit
//! upwind scheme.

use alloc::vec;
use alloc::vec::Vec;

use crate::math::abs;
use crate::{Error, Result};

/// Square matrix stored as a diagonal plus per-row off-diagonal entries.
#[derive(Clone, Debug)]
pub(crate) struct SparseMatrix {
    diag: Vec<f64>,
    off: Vec<Vec<(usize, f64)>>,
}

impl SparseMatrix {
    pub(crate) fn new(n: usize) -> Self {
        SparseMatrix {
            diag: vec![0.0; n],
            off: vec![Vec::new(); n],
        }
    }

    pub(crate) fn add(&mut self, row: usize, col: usize, value: f64) {
        if row == col {
            self.diag[row] += value;
        } else if let Some(entry) = self.off[row].iter_mut().find(|(c, _)| *c == col) {
            entry.1 += value;
        } else {
            self.off[row].push((col, value));
        }
    }

    fn row_product(&self, row: usize, x: &[f64]) -> f64 {
        self.off[row]
            .iter()
            .fold(self.diag[row] * x[row], |acc, &(c, a)| acc + a * x[c])
    }

    pub(crate) fn residual_norm(&self, x: &[f64], b: &[f64]) -> f64 {
        (0..self.diag.len())
            .map(|i| abs(b[i] - self.row_product(i, x)))
            .fold(0.0, f64::max)
    }

    fn relax(&self, i: usize, x: &mut [f64], b: &[f64]) {
        let sum = self.off[i]
            .iter()
            .fold(b[i], |acc, &(c, a)| acc - a * x[c]);
        x[i] = sum / self.diag[i];
    }

    /// Symmetric Gauss-Seidel from the initial guess `x` until
    /// `‖b - Ax‖_∞ ≤ tol (‖b - Ax_0‖_∞ + 1)`.
    pub(crate) fn solve(
        &self,
        b: &[f64],
        x: &mut [f64],
        tol: f64,
        max_sweeps: usize,
    ) -> Result<usize> {
        let n = self.diag.len();
        if let Some(i) = self.diag.iter().position(|&d| !(d > 0.0)) {
            return Err(Error::LinearSolver {
                iterations: 0,
                residual: self.diag[i],
            });
        }
        let target = tol * (self.residual_norm(x, b) + 1.0);
        let mut residual = self.residual_norm(x, b);
        let mut sweeps = 0;
        while residual > target {
            if sweeps >= max_sweeps || !residual.is_finite() {
                return Err(Error::LinearSolver {
                    iterations: sweeps,
                    residual,
                });
            }
            for i in 0..n {
                self.relax(i, x, b);
            }
            for i in (0..n).rev() {
                self.relax(i, x, b);
            }
            sweeps += 1;
            residual = self.residual_norm(x, b);
        }
        Ok(sweeps)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_upwind_transport_system() {
        // 2 cells, flow K -> L: [2 0; -1 1] x = [2 1]
        let mut a = SparseMatrix::new(2);
        a.add(0, 0, 2.0);
        a.add(1, 1, 1.0);
        a.add(1, 0, -1.0);
        let mut x = vec![2.0, 1.0];
        a.solve(&[2.0, 1.0], &mut x, 1e-14, 100).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_positive_diagonal() {
        let a = SparseMatrix::new(1);
        let mut x = vec![0.0];
        assert!(a.solve(&[1.0], &mut x, 1e-10, 10).is_err());
    }
}
