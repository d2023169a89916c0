//! Dense complex matrices and the handful of multipartite operations the
//! rest of the crate is built on.
//!
//! Matrices are stored row-major. Subsystem ordering follows the usual
//! Kronecker convention: for dims `[d0, d1, ...]` the first factor is the
//! most significant digit of a basis index.

mod eigen;
pub mod real;

pub use eigen::{eig_hermitian, eigh, HERMITIAN_TOL};

use std::ops::{Add, AddAssign, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::DimMismatch(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(rows, cols, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let n = values.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(values[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    /// Column vector from amplitudes.
    pub fn column(amps: &[C64]) -> Self {
        Self {
            rows: amps.len(),
            cols: 1,
            data: amps.to_vec(),
        }
    }

    /// Computational basis vector `|index>` in dimension `dim`.
    pub fn ket(dim: usize, index: usize) -> Self {
        let mut v = Self::zeros(dim, 1);
        v.data[index] = ONE;
        v
    }

    /// `|a><b|` for two column vectors.
    pub fn outer(a: &Self, b: &Self) -> Self {
        debug_assert!(a.cols == 1 && b.cols == 1);
        Self::from_fn(a.rows, b.rows, |i, j| a.data[i] * b.data[j].conj())
    }

    /// Projector `|v><v|`.
    pub fn projector(v: &Self) -> Self {
        Self::outer(v, v)
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| {
            self.data[j * self.cols + i].conj()
        })
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.data[j * self.cols + i])
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.data[i * self.cols + i])
            .sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_c(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `Tr(self * other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> C64 {
        assert_eq!(self.cols, other.rows);
        assert_eq!(self.rows, other.cols);
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * other.data[k * other.cols + i];
            }
        }
        acc
    }

    /// `Re Tr(self * other)`; for Hermitian arguments this is the full value.
    pub fn re_trace_product(&self, other: &Self) -> f64 {
        self.trace_product(other).re
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entry of `|H - H^dagger|`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                dev = dev.max(d);
            }
        }
        dev
    }

    /// `(H + H^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        let n = self.rows;
        Self::from_fn(n, n, |i, j| {
            (self.data[i * n + j] + self.data[j * n + i].conj()) * 0.5
        })
    }

    /// Error unless the matrix is square and Hermitian within `tol`.
    pub fn check_hermitian(&self, tol: f64) -> Result<()> {
        if !self.is_square() {
            return Err(Error::NonSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let deviation = self.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NonHermitian { deviation });
        }
        Ok(())
    }

    /// `self * other` with a shape check.
    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::DimMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let (n, m, p) = (self.rows, self.cols, other.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * p..(k + 1) * p];
                for (o, b) in row.iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Self {
            rows: n,
            cols: p,
            data: out,
        }
    }

    /// `A X A^dagger`.
    pub fn sandwich(&self, x: &Self) -> Self {
        &(self * x) * &self.adjoint()
    }

    /// Restriction to the block of rows `r0..r0+nr` and columns `c0..c0+nc`.
    pub fn submatrix(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(
            self.cols, rhs.rows,
            "matrix product shape mismatch: {}x{} * {}x{}",
            self.rows, self.cols, rhs.rows, rhs.cols
        );
        self.mul_unchecked(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale(-1.0)
    }
}

impl AddAssign<&ComplexMatrix> for ComplexMatrix {
    fn add_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a += b;
        }
    }
}

impl SubAssign<&ComplexMatrix> for ComplexMatrix {
    fn sub_assign(&mut self, rhs: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        for (a, b) in self.data.iter_mut().zip(&rhs.data) {
            *a -= b;
        }
    }
}

/// Ordered subsystem dimensions of a multipartite space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DimList(Vec<usize>);

impl DimList {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::DimMismatch(format!(
                "invalid subsystem dims {dims:?}"
            )));
        }
        Ok(Self(dims))
    }

    pub fn dims(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total(&self) -> usize {
        self.0.iter().product()
    }

    /// Error unless `m` is square with side equal to the product of dims.
    pub fn check(&self, m: &ComplexMatrix) -> Result<()> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() != self.total() {
            return Err(Error::DimMismatch(format!(
                "dims {:?} (product {}) do not match a {}x{} matrix",
                self.0,
                self.total(),
                m.rows(),
                m.cols()
            )));
        }
        Ok(())
    }

    fn digits(&self, mut index: usize, out: &mut [usize]) {
        for (slot, &d) in out.iter_mut().zip(&self.0).rev() {
            *slot = index % d;
            index /= d;
        }
    }

    fn compose(&self, digits: &[usize]) -> usize {
        digits
            .iter()
            .zip(&self.0)
            .fold(0, |acc, (&x, &d)| acc * d + x)
    }

    /// Same list with entry `sys` replaced.
    pub fn with_replaced(&self, sys: usize, dim: usize) -> Result<Self> {
        let mut dims = self.0.clone();
        *dims
            .get_mut(sys)
            .ok_or_else(|| Error::DimMismatch(format!("subsystem {sys} out of range")))? = dim;
        Self::new(dims)
    }
}

/// Kronecker product.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (ar, ac, br, bc) = (a.rows(), a.cols(), b.rows(), b.cols());
    ComplexMatrix::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// Kronecker product of a list of factors (left to right).
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut out = ComplexMatrix::identity(1);
    for f in factors {
        out = kron(&out, f);
    }
    out
}

/// Reduce `m` to the subsystems listed in `keep` (kept in ascending order).
pub fn partial_trace(m: &ComplexMatrix, dims: &DimList, keep: &[usize]) -> Result<ComplexMatrix> {
    dims.check(m)?;
    let n_sub = dims.len();
    let mut keep_sorted: Vec<usize> = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.iter().any(|&k| k >= n_sub) {
        return Err(Error::DimMismatch(format!(
            "keep set {keep:?} out of range for {n_sub} subsystems"
        )));
    }
    let kept_dims: Vec<usize> = keep_sorted.iter().map(|&k| dims.dims()[k]).collect();
    let out_side: usize = kept_dims.iter().product();
    let mut out = ComplexMatrix::zeros(out_side, out_side);
    let is_kept: Vec<bool> = (0..n_sub).map(|s| keep_sorted.contains(&s)).collect();

    let total = dims.total();
    let mut ri = vec![0; n_sub];
    let mut ci = vec![0; n_sub];
    for r in 0..total {
        dims.digits(r, &mut ri);
        for c in 0..total {
            dims.digits(c, &mut ci);
            if (0..n_sub).any(|s| !is_kept[s] && ri[s] != ci[s]) {
                continue;
            }
            let (mut kr, mut kc) = (0, 0);
            for s in 0..n_sub {
                if is_kept[s] {
                    kr = kr * dims.dims()[s] + ri[s];
                    kc = kc * dims.dims()[s] + ci[s];
                }
            }
            out[(kr, kc)] += m[(r, c)];
        }
    }
    Ok(out)
}

/// Transpose the indices of one subsystem.
pub fn partial_transpose(
    m: &ComplexMatrix,
    dims: &DimList,
    subsystem: usize,
) -> Result<ComplexMatrix> {
    dims.check(m)?;
    if subsystem >= dims.len() {
        return Err(Error::DimMismatch(format!(
            "subsystem {subsystem} out of range"
        )));
    }
    let total = dims.total();
    let n_sub = dims.len();
    let mut out = ComplexMatrix::zeros(total, total);
    let mut ri = vec![0; n_sub];
    let mut ci = vec![0; n_sub];
    for r in 0..total {
        dims.digits(r, &mut ri);
        for c in 0..total {
            dims.digits(c, &mut ci);
            std::mem::swap(&mut ri[subsystem], &mut ci[subsystem]);
            let (r2, c2) = (dims.compose(&ri), dims.compose(&ci));
            std::mem::swap(&mut ri[subsystem], &mut ci[subsystem]);
            out[(r2, c2)] = m[(r, c)];
        }
    }
    Ok(out)
}

/// Realignment `R(M)_{(i,k),(j,l)} = M_{(i,j),(k,l)}` of a bipartite operator;
/// the result is `d_A^2 x d_B^2`.
pub fn realign(m: &ComplexMatrix, dims: &DimList) -> Result<ComplexMatrix> {
    if dims.len() != 2 {
        return Err(Error::DimMismatch(format!(
            "realignment needs exactly two subsystems, got {:?}",
            dims.dims()
        )));
    }
    dims.check(m)?;
    let (da, db) = (dims.dims()[0], dims.dims()[1]);
    let mut out = ComplexMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = m[(i * db + j, k * db + l)];
                }
            }
        }
    }
    Ok(out)
}

/// Apply `f` to the spectrum of the Hermitian part of `h`.
pub fn hermitian_map(h: &ComplexMatrix, f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let (vals, vecs) = eigh(h);
    let n = h.rows();
    let mut out = ComplexMatrix::zeros(n, n);
    for (k, &v) in vals.iter().enumerate() {
        let fv = f(v);
        if fv == 0.0 {
            continue;
        }
        for i in 0..n {
            let a = vecs[(i, k)] * fv;
            for j in 0..n {
                out[(i, j)] += a * vecs[(j, k)].conj();
            }
        }
    }
    out
}

/// Closest isometry to a tall matrix `a` (the unitary factor of its polar
/// decomposition), `a (a^dagger a)^{-1/2}`. Directions with vanishing
/// singular value are completed by Gram-Schmidt against the range.
pub fn polar_isometry(a: &ComplexMatrix) -> ComplexMatrix {
    let gram = &a.adjoint() * a;
    let scale = gram.max_abs().max(1e-300);
    let inv_sqrt = hermitian_map(&gram, |v| {
        if v > 1e-14 * scale {
            1.0 / v.sqrt()
        } else {
            0.0
        }
    });
    let mut v = a * &inv_sqrt;
    let (rows, cols) = (v.rows(), v.cols());
    // fill rank-deficient columns
    let mut basis = 0;
    for c in 0..cols {
        let norm: f64 = (0..rows).map(|r| v[(r, c)].norm_sqr()).sum::<f64>().sqrt();
        if norm > 0.5 {
            continue;
        }
        loop {
            let mut cand: Vec<C64> = (0..rows)
                .map(|r| if r == basis { ONE } else { ZERO })
                .collect();
            basis += 1;
            for c2 in 0..cols {
                if c2 == c {
                    continue;
                }
                let ov: C64 = (0..rows).map(|r| v[(r, c2)].conj() * cand[r]).sum();
                for (r, x) in cand.iter_mut().enumerate() {
                    *x -= v[(r, c2)] * ov;
                }
            }
            let n: f64 = cand.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-6 {
                for (r, x) in cand.iter().enumerate() {
                    v[(r, c)] = x / n;
                }
                break;
            }
            assert!(basis < rows, "polar_isometry needs rows >= cols");
        }
    }
    v
}

/// Singular values, as square roots of the spectrum of `M^dagger M`
/// (negative rounding clipped to zero), in descending order.
pub fn singular_values(m: &ComplexMatrix) -> Vec<f64> {
    let gram = if m.rows() >= m.cols() {
        &m.adjoint() * m
    } else {
        m * &m.adjoint()
    };
    let (vals, _) = eigh(&gram);
    let mut sv: Vec<f64> = vals.into_iter().map(|v| v.max(0.0).sqrt()).collect();
    sv.reverse();
    sv
}

/// Sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> f64 {
    singular_values(m).iter().sum()
}
