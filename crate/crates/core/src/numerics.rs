//! Dense complex linear algebra used by the detectors.
//!
//! Matrices are stored column-major: entry `(r, c)` lives at `c * rows + r`.
//! Column gathers (`H[:, Ω]`) are therefore contiguous copies, which is the
//! dominant access pattern of the greedy recovery loops.

use num_complex::Complex64;
use thiserror::Error;

/// Relative threshold on the diagonal of `R` below which a least-squares
/// system is treated as rank deficient.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: {op} got {lhs:?} and {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },
    /// The selected columns do not span an `n`-dimensional subspace. Callers
    /// treat the candidate support as invalid.
    #[error("degenerate support: {rows}x{cols} system is rank deficient")]
    DegenerateSupport { rows: usize, cols: usize },
}

pub type ComplexVector = Vec<Complex64>;

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    /// Builds a matrix from column-major data. Returns `None` if the length
    /// does not equal `rows * cols`.
    pub fn from_col_major(rows: usize, cols: usize, data: Vec<Complex64>) -> Option<Self> {
        (data.len() == rows * cols).then_some(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for c in 0..cols {
            for r in 0..rows {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    /// Single-column matrix holding `v`.
    pub fn column_vector(v: &[Complex64]) -> Self {
        Self {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn column(&self, c: usize) -> &[Complex64] {
        &self.data[c * self.rows..(c + 1) * self.rows]
    }

    pub fn column_mut(&mut self, c: usize) -> &mut [Complex64] {
        &mut self.data[c * self.rows..(c + 1) * self.rows]
    }

    /// Copies the listed columns, in list order, into a new matrix.
    pub fn gather_columns(&self, cols: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * cols.len());
        for &c in cols {
            data.extend_from_slice(self.column(c));
        }
        Self {
            rows: self.rows,
            cols: cols.len(),
            data,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
        if self.cols != rhs.rows {
            return Err(NumericsError::DimensionMismatch {
                op: "mul",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for j in 0..rhs.cols {
            let dst = &mut out.data[j * self.rows..(j + 1) * self.rows];
            for (k, &b) in rhs.column(j).iter().enumerate() {
                if b == Complex64::new(0.0, 0.0) {
                    continue;
                }
                axpy(dst, b, self.column(k));
            }
        }
        Ok(out)
    }

    /// `self - rhs`.
    pub fn sub(&self, rhs: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
        if self.shape() != rhs.shape() {
            return Err(NumericsError::DimensionMismatch {
                op: "sub",
                lhs: self.shape(),
                rhs: rhs.shape(),
            });
        }
        let data = self
            .data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[c * self.rows + r]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[c * self.rows + r]
    }
}

/// `dst += alpha * x`
#[inline]
pub fn axpy(dst: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (d, &v) in dst.iter_mut().zip(x) {
        *d += alpha * v;
    }
}

/// Inner product `a^H b`.
#[inline]
pub fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

pub fn norm_sqr(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

/// Returns `A^H B`.
pub fn hermitian_mul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    if a.rows != b.rows {
        return Err(NumericsError::DimensionMismatch {
            op: "hermitian_mul",
            lhs: a.shape(),
            rhs: b.shape(),
        });
    }
    Ok(ComplexMatrix::from_fn(a.cols, b.cols, |i, j| {
        dot_conj(a.column(i), b.column(j))
    }))
}

pub fn frobenius_norm(a: &ComplexMatrix) -> f64 {
    norm_sqr(&a.data).sqrt()
}

/// Least-squares solution of `A X ≈ B` via Householder QR.
///
/// Requires `A` to be tall (`m >= n`) with full column rank; otherwise
/// [`NumericsError::DegenerateSupport`] is returned. A diagonal entry of `R`
/// smaller than [`RANK_TOLERANCE`] times the largest one counts as rank loss.
pub fn lstsq(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, NumericsError> {
    let (m, n) = a.shape();
    if b.rows != m {
        return Err(NumericsError::DimensionMismatch {
            op: "lstsq",
            lhs: a.shape(),
            rhs: b.shape(),
        });
    }
    if n > m {
        return Err(NumericsError::DegenerateSupport { rows: m, cols: n });
    }
    let p = b.cols;
    let mut r = a.clone();
    let mut qtb = b.clone();
    let mut diag = vec![Complex64::new(0.0, 0.0); n];
    let mut v = vec![Complex64::new(0.0, 0.0); m];

    for k in 0..n {
        let x = &r.column(k)[k..];
        let xnorm = norm_sqr(x).sqrt();
        if xnorm == 0.0 {
            // Column already annihilated; leave R[k,k] = 0 for the rank test.
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        let vk = &mut v[k..m];
        vk.copy_from_slice(x);
        vk[0] -= alpha;
        let vnorm = norm_sqr(vk).sqrt();
        if vnorm == 0.0 {
            diag[k] = alpha;
            continue;
        }
        for z in vk.iter_mut() {
            *z /= vnorm;
        }
        diag[k] = alpha;
        // Apply H = I - 2 v v^H to the trailing columns of R and to B.
        for c in (k + 1)..n {
            let col = &mut r.column_mut(c)[k..];
            let s = dot_conj(vk, col) * 2.0;
            axpy(col, -s, vk);
        }
        for c in 0..p {
            let col = &mut qtb.column_mut(c)[k..];
            let s = dot_conj(vk, col) * 2.0;
            axpy(col, -s, vk);
        }
    }

    let max_diag = diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
    if n > 0 && (max_diag == 0.0 || diag.iter().any(|d| d.norm() < RANK_TOLERANCE * max_diag)) {
        return Err(NumericsError::DegenerateSupport { rows: m, cols: n });
    }

    // Back substitution on the upper-triangular R (diagonal kept in `diag`).
    let mut x = ComplexMatrix::zeros(n, p);
    for c in 0..p {
        let rhs = qtb.column(c);
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for j in (i + 1)..n {
                acc -= r[(i, j)] * x[(j, c)];
            }
            x[(i, c)] = acc / diag[i];
        }
    }
    Ok(x)
}

/// Least-squares solve for a single right-hand side.
pub fn lstsq_vec(a: &ComplexMatrix, b: &[Complex64]) -> Result<ComplexVector, NumericsError> {
    let x = lstsq(a, &ComplexMatrix::column_vector(b))?;
    Ok(x.data)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_system_returns_rhs() {
        let a = ComplexMatrix::identity(3);
        let b = ComplexMatrix::from_fn(3, 2, |r, k| c(r as f64 + 1.0, k as f64 - 0.5));
        let x = lstsq(&a, &b).unwrap();
        for (u, w) in x.as_slice().iter().zip(b.as_slice()) {
            assert!((u - w).norm() < 1e-14);
        }
    }

    #[test]
    fn orthonormal_columns_give_identity() {
        // Columns e1 and (e2 + i e3)/sqrt(2) of C^4.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let a = ComplexMatrix::from_col_major(
            4,
            2,
            vec![
                c(1.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(0.0, 0.0),
                c(s, 0.0),
                c(0.0, s),
                c(0.0, 0.0),
            ],
        )
        .unwrap();
        let x = lstsq(&a, &a).unwrap();
        let eye = ComplexMatrix::identity(2);
        for (u, w) in x.as_slice().iter().zip(eye.as_slice()) {
            assert!((u - w).norm() < 1e-14);
        }
    }

    #[test]
    fn hermitian_mul_conjugates_lhs() {
        let a = ComplexMatrix::column_vector(&[c(0.0, 1.0), c(0.0, 0.0)]);
        let g = hermitian_mul(&a, &a).unwrap();
        assert_eq!(g.shape(), (1, 1));
        assert!((g[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);

        let eye = ComplexMatrix::identity(2);
        assert_eq!(hermitian_mul(&eye, &eye).unwrap(), eye);
    }

    #[test]
    fn hermitian_mul_rejects_row_mismatch() {
        let a = ComplexMatrix::zeros(3, 2);
        let b = ComplexMatrix::zeros(4, 2);
        assert!(matches!(
            hermitian_mul(&a, &b),
            Err(NumericsError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn frobenius_small_cases() {
        assert_eq!(frobenius_norm(&ComplexMatrix::zeros(3, 3)), 0.0);
        assert!((frobenius_norm(&ComplexMatrix::identity(4)) - 2.0).abs() < 1e-15);
        let ones = ComplexMatrix::from_fn(2, 2, |_, _| c(1.0, 1.0));
        assert!((frobenius_norm(&ones) - 8f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rank_deficient_is_degenerate() {
        let col = [c(1.0, 2.0), c(-0.5, 0.0), c(0.0, 3.0)];
        let mut data = col.to_vec();
        data.extend(col.iter().map(|z| z * c(2.0, -1.0)));
        let a = ComplexMatrix::from_col_major(3, 2, data).unwrap();
        let b = ComplexMatrix::column_vector(&col);
        assert!(matches!(
            lstsq(&a, &b),
            Err(NumericsError::DegenerateSupport { .. })
        ));
    }

    #[test]
    fn wide_system_is_degenerate() {
        let a = ComplexMatrix::from_fn(2, 3, |r, k| c((r + k) as f64, 1.0));
        let b = ComplexMatrix::zeros(2, 1);
        assert!(lstsq(&a, &b).is_err());
    }

    #[test]
    fn zero_column_is_degenerate() {
        let a = ComplexMatrix::zeros(4, 1);
        let b = ComplexMatrix::zeros(4, 1);
        assert!(lstsq(&a, &b).is_err());
    }

    #[test]
    fn empty_support_solves_to_empty() {
        let a = ComplexMatrix::zeros(5, 0);
        let b = ComplexMatrix::zeros(5, 2);
        let x = lstsq(&a, &b).unwrap();
        assert_eq!(x.shape(), (0, 2));
    }
}
