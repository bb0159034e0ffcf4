//! Dense complex matrix kernel.
//!
//! Row-major `Complex<T>` storage, Hilbert–Schmidt geometry, and the three
//! decompositions everything else is built on: one-sided Jacobi SVD
//! (rank / null space / orthonormalisation), two-sided Jacobi for Hermitian
//! eigenproblems, and a shifted-QR Schur decomposition for general complex
//! spectra. Vectorisation is column-stacking throughout:
//! `vec(x·y·z) = (zᵀ ⊗ x)·vec(y)`.

mod eig;
mod herm;
mod svd;

pub use eig::{eig, eigenvalues, schur, Eig};
pub use herm::{eigh, inv_sqrt_psd};
pub use svd::{svd, Svd};

use num_complex::Complex;
use num_traits::{One, Zero};
use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use crate::{Error, Real, Result, C};

/// Tolerance bundle for rank decisions, eigenvalue comparisons and
/// residual checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    /// Relative singular-value cutoff for rank / null-space decisions.
    pub rank_eps: T,
    /// Eigenvalue comparison tolerance (peripheral cutoff is `1 - eig_eps`).
    pub eig_eps: T,
    /// Residual tolerance for identity checks (`‖Σ a*a − I‖ ≤ residual_eps` etc.).
    pub residual_eps: T,
}

impl<T: Real> Tolerance<T> {
    pub fn new(rank_eps: T, eig_eps: T, residual_eps: T) -> Result<Self> {
        let zero = T::zero();
        if rank_eps <= zero || eig_eps <= zero || residual_eps <= zero {
            return Err(Error::Precondition(
                "tolerances must be strictly positive".into(),
            ));
        }
        if rank_eps >= T::one() {
            return Err(Error::Precondition("rank_eps must be < 1".into()));
        }
        Ok(Self {
            rank_eps,
            eig_eps,
            residual_eps,
        })
    }

    fn of(v: f64) -> T {
        T::from_f64(v).expect("tolerance constant representable")
    }
}

impl<T: Real> Default for Tolerance<T> {
    fn default() -> Self {
        Self {
            rank_eps: Self::of(1e-10),
            eig_eps: Self::of(1e-8),
            residual_eps: Self::of(1e-9),
        }
    }
}

/// Dense complex matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct CMatrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<Complex<T>>,
}

impl<T: Real> CMatrix<T> {
    /// Builds a matrix from row-major data, rejecting non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex<T>>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Shape(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Shape("non-finite entry in matrix".into()));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a square matrix from real row-major entries.
    pub fn from_real(n: usize, entries: &[f64]) -> Self {
        let data = entries
            .iter()
            .map(|&x| Complex::new(T::from_f64(x).unwrap(), T::zero()))
            .collect();
        Self::from_vec(n, n, data).expect("static entries are finite")
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C<T>) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Rank-one operator ξη* mapping x ↦ ⟨x,η⟩ξ.
    pub fn outer(xi: &[C<T>], eta: &[C<T>]) -> Self {
        Self::from_fn(xi.len(), eta.len(), |i, j| xi[i] * eta[j].conj())
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

    pub fn data(&self) -> &[C<T>] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C<T>] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn col(&self, j: usize) -> Vec<C<T>> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn conj(&self) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, z: C<T>) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&w| w * z).collect(),
        }
    }

    pub fn scale_re(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    pub fn trace(&self) -> C<T> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Frobenius norm; equals the Hilbert–Schmidt norm tr(a·a*)^½.
    pub fn hs_norm(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |a, b| a + b)
            .sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(T::zero(), |a, b| a.max(b))
    }

    pub fn matvec(&self, v: &[C<T>]) -> Vec<C<T>> {
        assert_eq!(v.len(), self.cols, "matvec dimension mismatch");
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .map(|(&a, &x)| a * x)
                    .fold(Complex::zero(), |s, t| s + t)
            })
            .collect()
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (r1, c1, r2, c2) = (self.rows, self.cols, other.rows, other.cols);
        Self::from_fn(r1 * r2, c1 * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Column-stacking vectorisation: entry (i,j) lands at index j·rows + i.
    pub fn vectorize(&self) -> Vec<C<T>> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                v.push(self[(i, j)]);
            }
        }
        v
    }

    /// Inverse of [`CMatrix::vectorize`] for square d×d targets.
    pub fn unvectorize(d: usize, v: &[C<T>]) -> Self {
        assert_eq!(v.len(), d * d, "unvectorize length mismatch");
        Self::from_fn(d, d, |i, j| v[j * d + i])
    }

    pub fn is_hermitian(&self, tol: T) -> bool {
        self.is_square() && (self - &self.adjoint()).hs_norm() <= tol
    }

    /// Residual of unitarity, ‖a*a − I‖.
    pub fn unitary_residual(&self) -> T {
        (&(&self.adjoint() * self) - &Self::identity(self.cols)).hs_norm()
    }

    /// Permissive finite check used as a guard after long iterations.
    pub fn all_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl<T: Real> Index<(usize, usize)> for CMatrix<T> {
    type Output = C<T>;
    fn index(&self, (i, j): (usize, usize)) -> &C<T> {
        &self.data[i * self.cols + j]
    }
}

impl<T: Real> IndexMut<(usize, usize)> for CMatrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C<T> {
        &mut self.data[i * self.cols + j]
    }
}

impl<T: Real> Mul for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn mul(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl<T: Real> Add for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn add(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &CMatrix<T> {
    type Output = CMatrix<T>;
    fn sub(self, rhs: &CMatrix<T>) -> CMatrix<T> {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Real> fmt::Debug for CMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

/// Hilbert–Schmidt inner product ⟨a,b⟩ = tr(a·b*).
pub fn hs_inner<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<C<T>> {
    if !a.is_square() || a.rows() != b.rows() || a.cols() != b.cols() {
        return Err(Error::Shape(format!(
            "hs_inner needs equal square matrices, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    // tr(a·b*) = Σ_ij a_ij · conj(b_ij)
    Ok(a.data()
        .iter()
        .zip(b.data())
        .map(|(&x, &y)| x * y.conj())
        .fold(Complex::zero(), |s, t| s + t))
}

/// Result of a rank decision; `borderline` flags a singular-value gap of
/// less than 10× the cutoff at the rank boundary.
#[derive(Debug, Clone)]
pub struct NullSpace<T> {
    pub basis: Vec<Vec<C<T>>>,
    pub borderline: bool,
}

/// Orthonormal basis of { v : ‖m·v‖ ≤ rank_eps·σ_max·‖v‖ }, via SVD.
pub fn null_space<T: Real>(m: &CMatrix<T>, tol: &Tolerance<T>) -> NullSpace<T> {
    null_space_scaled(m, tol, T::zero())
}

/// [`null_space`] with an external scale floor on the cutoff:
/// `rank_eps·max(σ_max, scale)`. Callers whose matrix derives from
/// unit-scale data (superoperators, normalised generators) pass `scale = 1`
/// so that a matrix that is numerically zero is treated as zero rather than
/// as roundoff of full rank.
pub fn null_space_scaled<T: Real>(m: &CMatrix<T>, tol: &Tolerance<T>, scale: T) -> NullSpace<T> {
    let dec = svd(m);
    let n = m.cols();
    let smax = dec.singular_values.first().copied().unwrap_or(T::zero());
    let cutoff = tol.rank_eps * smax.max(scale);
    let mut basis = Vec::new();
    let mut borderline = false;
    let mut last_kept: Option<T> = None;
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= cutoff {
            if let Some(prev) = last_kept {
                if prev - s < cutoff * T::from_f64(10.0).unwrap() {
                    borderline = true;
                }
            }
            for j in k..n {
                basis.push(dec.v.col(j));
            }
            break;
        }
        last_kept = Some(s);
    }
    NullSpace { basis, borderline }
}

/// Numerical rank with the same cutoff convention as [`null_space`].
pub fn rank<T: Real>(m: &CMatrix<T>, tol: &Tolerance<T>) -> usize {
    m.cols() - null_space(m, tol).basis.len()
}

/// Orthonormalisation of a family of same-shaped matrices in the
/// Hilbert–Schmidt geometry. Returns an HS-orthonormal basis of the span
/// (SVD-based rank decision, not sequential Gram–Schmidt) plus the
/// borderline flag of that decision.
pub fn orthonormalize<T: Real>(
    mats: &[CMatrix<T>],
    tol: &Tolerance<T>,
) -> Result<(Vec<CMatrix<T>>, bool)> {
    if mats.is_empty() {
        return Ok((Vec::new(), false));
    }
    let (r, c) = (mats[0].rows(), mats[0].cols());
    if mats.iter().any(|m| m.rows() != r || m.cols() != c) {
        return Err(Error::Shape("orthonormalize: mixed dimensions".into()));
    }
    // Stack vectorised matrices as columns; the left singular vectors of the
    // stack span the same subspace, orthonormally.
    let stack = CMatrix::from_fn(r * c, mats.len(), |i, j| {
        let (col, row) = (i / r, i % r);
        mats[j][(row, col)]
    });
    let dec = svd(&stack);
    let smax = dec.singular_values.first().copied().unwrap_or(T::zero());
    let cutoff = tol.rank_eps * smax;
    let mut basis = Vec::new();
    let mut borderline = false;
    let mut last_kept: Option<T> = None;
    for (k, &s) in dec.singular_values.iter().enumerate() {
        if s <= cutoff || s == T::zero() {
            if let (Some(prev), true) = (last_kept, s > T::zero()) {
                if prev - s < cutoff * T::from_f64(10.0).unwrap() {
                    borderline = true;
                }
            }
            break;
        }
        basis.push(CMatrix::unvectorize_rect(r, c, &dec.u.col(k)));
        last_kept = Some(s);
    }
    Ok((basis, borderline))
}

impl<T: Real> CMatrix<T> {
    /// Column-stacked inverse vectorisation for rectangular shapes.
    pub fn unvectorize_rect(rows: usize, cols: usize, v: &[C<T>]) -> Self {
        assert_eq!(v.len(), rows * cols);
        Self::from_fn(rows, cols, |i, j| v[j * rows + i])
    }
}

/// Orthonormal basis of the column space of m (SVD-based), with the
/// borderline flag of the rank decision.
pub fn orthonormal_columns<T: Real>(m: &CMatrix<T>, tol: &Tolerance<T>) -> (CMatrix<T>, bool) {
    let dec = svd(m);
    let smax = dec.singular_values.first().copied().unwrap_or_else(T::zero);
    let cutoff = tol.rank_eps * smax;
    let mut keep = 0;
    let mut borderline = false;
    let mut last_kept: Option<T> = None;
    for &s in &dec.singular_values {
        if s <= cutoff || s == T::zero() {
            if let (Some(prev), true) = (last_kept, s > T::zero()) {
                if prev - s < cutoff * T::from_f64(10.0).unwrap() {
                    borderline = true;
                }
            }
            break;
        }
        keep += 1;
        last_kept = Some(s);
    }
    let basis = CMatrix::from_fn(m.rows(), keep, |i, j| dec.u[(i, j)]);
    (basis, borderline)
}

/// Solves a·x = b by LU with partial pivoting (small dense systems).
pub fn solve<T: Real>(a: &CMatrix<T>, b: &CMatrix<T>) -> Result<CMatrix<T>> {
    if !a.is_square() || a.rows() != b.rows() {
        return Err(Error::Shape("solve: incompatible shapes".into()));
    }
    let n = a.rows();
    let mut lu = a.clone();
    let mut x = b.clone();
    for k in 0..n {
        let (mut piv, mut pmax) = (k, lu[(k, k)].norm());
        for i in k + 1..n {
            let v = lu[(i, k)].norm();
            if v > pmax {
                piv = i;
                pmax = v;
            }
        }
        if pmax == T::zero() {
            return Err(Error::Numeric("solve: singular matrix".into()));
        }
        if piv != k {
            for j in 0..n {
                let t = lu[(k, j)];
                lu[(k, j)] = lu[(piv, j)];
                lu[(piv, j)] = t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(k, j)] = x[(piv, j)];
                x[(piv, j)] = t;
            }
        }
        let d = lu[(k, k)];
        for i in k + 1..n {
            let f = lu[(i, k)] / d;
            lu[(i, k)] = f;
            for j in k + 1..n {
                let t = lu[(k, j)];
                lu[(i, j)] -= f * t;
            }
            for j in 0..x.cols() {
                let t = x[(k, j)];
                x[(i, j)] -= f * t;
            }
        }
    }
    for k in (0..n).rev() {
        for j in 0..x.cols() {
            let mut s = x[(k, j)];
            for i in k + 1..n {
                s -= lu[(k, i)] * x[(i, j)];
            }
            x[(k, j)] = s / lu[(k, k)];
        }
    }
    Ok(x)
}

/// Householder QR; returns (q, r) with q unitary (m×m) and r upper
/// trapezoidal, a = q·r.
pub fn qr<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = CMatrix::identity(m);
    for k in 0..n.min(m.saturating_sub(1)) {
        let mut v: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
        let xnorm = v
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |s, t| s + t)
            .sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let phase = if v[0].norm() > T::zero() {
            v[0] / v[0].norm()
        } else {
            Complex::one()
        };
        let alpha = -phase * xnorm;
        v[0] -= alpha;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, t| s + t);
        if vnorm2 == T::zero() {
            continue;
        }
        let two = T::from_f64(2.0).unwrap();
        // r ← (I − 2vv*/v*v)·r on rows k.., q ← q·(I − 2vv*/v*v)
        for j in 0..n {
            let w = (k..m)
                .map(|i| v[i - k].conj() * r[(i, j)])
                .fold(Complex::zero(), |s, t| s + t)
                * (two / vnorm2);
            for i in k..m {
                r[(i, j)] -= w * v[i - k];
            }
        }
        for i in 0..m {
            let w = (k..m)
                .map(|j| q[(i, j)] * v[j - k])
                .fold(Complex::zero(), |s, t| s + t)
                * (two / vnorm2);
            for j in k..m {
                q[(i, j)] -= w * v[j - k].conj();
            }
        }
    }
    (q, r)
}
