//! Dense row-major complex matrices.
//!
//! Square matrices double as operators on qubit registers. Qubit ordering is
//! big-endian everywhere in this crate: in an `n`-qubit register, qubit 0 is
//! the most significant bit of the basis index, so `|q0 q1 q2 q3>` sits at
//! index `8*q0 + 4*q1 + 2*q2 + q3`.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

/// A complex scalar.
pub type Amplitude = Complex64;

pub const ZERO: Amplitude = Complex64::new(0.0, 0.0);
pub const ONE: Amplitude = Complex64::new(1.0, 0.0);
pub const I: Amplitude = Complex64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<Amplitude>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for k in 0..dim {
            m[(k, k)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major data.
    ///
    /// Panics if `data.len() != rows * cols`.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Amplitude>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length mismatch");
        Self { rows, cols, data }
    }

    /// Builds a matrix from nested rows. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Amplitude>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Self::from_vec(r, c, data)
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Self {
        Self::from_vec(rows, cols, data.iter().map(|&x| Amplitude::new(x, 0.0)).collect())
    }

    pub fn diag(entries: &[Amplitude]) -> Self {
        let mut m = Self::zeros(entries.len(), entries.len());
        for (k, &e) in entries.iter().enumerate() {
            m[(k, k)] = e;
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[&[Amplitude]]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.len());
        let mut m = Self::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for (i, &v) in col.iter().enumerate() {
                m[(i, j)] = v;
            }
        }
        m
    }

    /// `|ket><bra|`
    pub fn outer(ket: &[Amplitude], bra: &[Amplitude]) -> Self {
        let mut m = Self::zeros(ket.len(), bra.len());
        for (i, &k) in ket.iter().enumerate() {
            for (j, &b) in bra.iter().enumerate() {
                m[(i, j)] = k * b.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Side length of a square matrix.
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    pub fn data(&self) -> &[Amplitude] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Amplitude] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Amplitude> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, c: Amplitude) -> Self {
        Self::from_vec(self.rows, self.cols, self.data.iter().map(|&x| x * c).collect())
    }

    pub fn trace(&self) -> Amplitude {
        (0..self.rows.min(self.cols)).map(|k| self[(k, k)]).sum()
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Amplitude]) -> Vec<Amplitude> {
        assert_eq!(v.len(), self.cols, "apply: dimension mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Kronecker product; the qubits of `self` precede those of `other`.
    pub fn kron(&self, other: &Self) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self[(i, j)];
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out[(i * other.rows + k, j * other.cols + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest deviation from Hermiticity.
    pub fn hermiticity_deviation(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = Amplitude;

    fn index(&self, (i, j): (usize, usize)) -> &Amplitude {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Amplitude {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;

    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matmul: dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out.data[i * rhs.cols + j] += a * rhs.data[k * rhs.cols + j];
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;

    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        )
    }
}

impl Sub for &Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        Matrix::from_vec(
            self.rows,
            self.cols,
            self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        )
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Single-qubit Pauli operators.
pub mod pauli {
    use super::{Amplitude, Matrix, I, ONE, ZERO};

    pub fn identity() -> Matrix {
        Matrix::identity(2)
    }

    pub fn x() -> Matrix {
        Matrix::from_vec(2, 2, vec![ZERO, ONE, ONE, ZERO])
    }

    pub fn y() -> Matrix {
        Matrix::from_vec(2, 2, vec![ZERO, -I, I, ZERO])
    }

    pub fn z() -> Matrix {
        Matrix::from_vec(2, 2, vec![ONE, ZERO, ZERO, -ONE])
    }

    pub fn hadamard() -> Matrix {
        let h = Amplitude::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Matrix::from_vec(2, 2, vec![h, h, h, -h])
    }

    /// The unified index map `sigma(00) = I`, `sigma(01) = X`,
    /// `sigma(10) = Y`, `sigma(11) = Z`, keyed by `2*m + n`.
    pub fn sigma(mn: usize) -> Matrix {
        match mn {
            0 => identity(),
            1 => x(),
            2 => y(),
            3 => z(),
            _ => panic!("sigma index {mn} out of range 0..4"),
        }
    }
}

/// Inner product `<a|b>`.
pub fn inner(a: &[Amplitude], b: &[Amplitude]) -> Amplitude {
    assert_eq!(a.len(), b.len(), "inner: length mismatch");
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm_sqr(v: &[Amplitude]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Kronecker product of two vectors; `a` supplies the leading qubits.
pub fn kron_vec(a: &[Amplitude], b: &[Amplitude]) -> Vec<Amplitude> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for &x in a {
        for &y in b {
            out.push(x * y);
        }
    }
    out
}

/// True iff `max |u^dag u - I| <= tol`.
pub fn is_unitary(u: &Matrix, tol: f64) -> bool {
    unitarity_deviation(u) <= tol
}

/// `max |u^dag u - I|`, or infinity for non-square input.
pub fn unitarity_deviation(u: &Matrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    (&u.adjoint() * u).max_abs_diff(&Matrix::identity(u.dim()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_kron_identity() {
        let i4 = Matrix::identity(2).kron(&Matrix::identity(2));
        assert_eq!(i4, Matrix::identity(4));
    }

    #[test]
    fn kron_ordering_is_big_endian() {
        let zero = [ONE, ZERO];
        let one = [ZERO, ONE];
        let v = kron_vec(&zero, &one);
        assert_eq!(v, vec![ZERO, ONE, ZERO, ZERO]);

        // X on the first qubit flips the most significant bit.
        let x1 = pauli::x().kron(&pauli::identity());
        let e0 = [ONE, ZERO, ZERO, ZERO];
        assert_eq!(x1.apply(&e0)[2], ONE);
    }

    #[test]
    fn pauli_matrices_are_unitary() {
        for k in 0..4 {
            assert!(is_unitary(&pauli::sigma(k), 1e-10));
        }
        assert!(is_unitary(&pauli::hadamard(), 1e-12));
    }

    #[test]
    fn zero_and_scaling_are_not_unitary() {
        assert!(!is_unitary(&Matrix::zeros(2, 2), 1e-10));
        assert!(!is_unitary(&Matrix::from_real(2, 2, &[1.0, 0.0, 0.0, 2.0]), 1e-10));
        assert!(!is_unitary(&Matrix::zeros(2, 3), 1e-10));
    }

    #[test]
    fn pauli_products() {
        // XY = iZ
        let xy = &pauli::x() * &pauli::y();
        assert!(xy.max_abs_diff(&pauli::z().scale(I)) < 1e-15);
        assert_eq!(pauli::y().trace(), ZERO);
    }
}
