//! Minimal dense linear algebra for small covariance matrices: Cholesky
//! factorization, triangular solves, and SPD inversion. Dimensions here are
//! the chain dimension d (single digits in practice), so simplicity beats
//! cleverness.

use crate::error::{Error, Result};

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1);
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn n(&self) -> usize {
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

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn scaled(&self, c: f64) -> Matrix {
        Matrix {
            n: self.n,
            data: self.data.iter().map(|v| c * v).collect(),
        }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.n, other.n);
        Matrix {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

/// Lower-triangular Cholesky factor `L` with `L L^T = m`.
///
/// Fails with a decomposition error if the input is not symmetric or not
/// positive definite; this doubles as the positive-definiteness check used
/// when validating chain specifications.
pub fn cholesky(m: &Matrix) -> Result<Matrix> {
    let n = m.n();
    let scale = (0..n).map(|i| m.get(i, i).abs()).fold(0.0f64, f64::max);
    for i in 0..n {
        for j in 0..i {
            if (m.get(i, j) - m.get(j, i)).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::NotPositiveDefinite(format!(
                    "matrix is not symmetric at ({i}, {j})"
                )));
            }
        }
    }
    let mut l = Matrix::zeros(n);
    for j in 0..n {
        let mut diag = m.get(j, j);
        for k in 0..j {
            diag -= l.get(j, k) * l.get(j, k);
        }
        if diag <= 0.0 {
            return Err(Error::NotPositiveDefinite(format!(
                "pivot {diag} at column {j} is not positive"
            )));
        }
        let diag = diag.sqrt();
        l.set(j, j, diag);
        for i in j + 1..n {
            let mut v = m.get(i, j);
            for k in 0..j {
                v -= l.get(i, k) * l.get(j, k);
            }
            l.set(i, j, v / diag);
        }
    }
    Ok(l)
}

/// Solves `(L L^T) x = b` given the Cholesky factor `L`.
pub fn solve_with_cholesky(l: &Matrix, b: &[f64]) -> Vec<f64> {
    let n = l.n();
    assert_eq!(b.len(), n);
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l.get(i, k) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l.get(k, i) * y[k];
        }
        y[i] /= l.get(i, i);
    }
    y
}

/// Inverse of an SPD matrix from its Cholesky factor, one solve per column.
pub fn spd_inverse(l: &Matrix) -> Matrix {
    let n = l.n();
    let mut inv = Matrix::zeros(n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e[j] = 1.0;
        let col = solve_with_cholesky(l, &e);
        e[j] = 0.0;
        for (i, v) in col.iter().enumerate() {
            inv.set(i, j, *v);
        }
    }
    inv
}

/// `y = L z` for lower-triangular `L`.
pub fn lower_matvec(l: &Matrix, z: &[f64]) -> Vec<f64> {
    let n = l.n();
    assert_eq!(z.len(), n);
    (0..n)
        .map(|i| (0..=i).map(|j| l.get(i, j) * z[j]).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_identity_and_diagonal() {
        let l = cholesky(&Matrix::identity(3)).unwrap();
        assert_eq!(l, Matrix::identity(3));

        let mut m = Matrix::zeros(2);
        m.set(0, 0, 4.0);
        m.set(1, 1, 9.0);
        let l = cholesky(&m).unwrap();
        assert_eq!(l.get(0, 0), 2.0);
        assert_eq!(l.get(1, 1), 3.0);
        assert_eq!(l.get(1, 0), 0.0);
    }

    #[test]
    fn cholesky_round_trip() {
        // Tridiagonal with unit diagonal and 0.25 off-diagonal, d = 3.
        let mut m = Matrix::identity(3);
        m.set(0, 1, 0.25);
        m.set(1, 0, 0.25);
        m.set(1, 2, 0.25);
        m.set(2, 1, 0.25);
        let l = cholesky(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let mut v = 0.0;
                for k in 0..3 {
                    v += l.get(i, k) * l.get(j, k);
                }
                assert!(
                    (v - m.get(i, j)).abs() <= 1e-10,
                    "L L^T mismatch at ({i}, {j})"
                );
            }
        }
    }

    #[test]
    fn cholesky_rejects_bad_input() {
        let mut asym = Matrix::identity(2);
        asym.set(0, 1, 0.5);
        assert!(cholesky(&asym).is_err());

        let mut indef = Matrix::identity(2);
        indef.set(0, 1, 2.0);
        indef.set(1, 0, 2.0);
        assert!(matches!(
            cholesky(&indef),
            Err(Error::NotPositiveDefinite(_))
        ));
    }

    #[test]
    fn solve_and_inverse_agree() {
        let mut m = Matrix::identity(3);
        m.set(0, 1, 0.25);
        m.set(1, 0, 0.25);
        m.set(1, 2, 0.25);
        m.set(2, 1, 0.25);
        let l = cholesky(&m).unwrap();
        let b = vec![1.0, -2.0, 0.5];
        let x = solve_with_cholesky(&l, &b);
        let back = m.matvec(&x);
        for (got, want) in back.iter().zip(&b) {
            assert!((got - want).abs() <= 1e-12);
        }
        let inv = spd_inverse(&l);
        let prod_b = inv.matvec(&b);
        for (got, want) in prod_b.iter().zip(&x) {
            assert!((got - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn lower_matvec_uses_lower_part_only() {
        let mut l = Matrix::zeros(2);
        l.set(0, 0, 2.0);
        l.set(1, 0, 1.0);
        l.set(1, 1, 3.0);
        assert_eq!(lower_matvec(&l, &[1.0, 1.0]), vec![2.0, 4.0]);
    }
}
