//! Completely positive maps on M_d in Kraus, superoperator and Choi form.
//!
//! A channel acts as `E(x) = Σ_j a_j x a_j*`. Trace preservation means
//! `Σ a_j* a_j = I`, unitality means `Σ a_j a_j* = I`. The superoperator is
//! the d²×d² matrix of the map under column-stacking vectorisation,
//! `S = Σ conj(a_j) ⊗ a_j`, and the Choi matrix is `Σ vec(a_j)·vec(a_j)*`.

use crate::linalg::{eigh, CMatrix, Tolerance};
use crate::{Error, Real, Result, C};

/// Structural verdicts with their residuals.
#[derive(Debug, Clone, Copy)]
pub struct ChannelFlags<T> {
    /// Complete positivity; always true for maps presented in Kraus form.
    pub cp: bool,
    pub tp: bool,
    pub unital: bool,
    /// ‖Σ a_j* a_j − I‖ in Hilbert–Schmidt norm.
    pub tp_residual: T,
    /// ‖Σ a_j a_j* − I‖ in Hilbert–Schmidt norm.
    pub unital_residual: T,
}

/// A channel as a list of d×d Kraus operators plus cached structural flags.
#[derive(Clone)]
pub struct KrausChannel<T> {
    dim: usize,
    kraus: Vec<CMatrix<T>>,
    flags: ChannelFlags<T>,
}

impl<T: Real> KrausChannel<T> {
    /// Builds a channel from Kraus operators, computing the structural flags
    /// eagerly against `tol.residual_eps`.
    pub fn new(kraus: Vec<CMatrix<T>>, tol: &Tolerance<T>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::Shape("channel needs at least one Kraus operator".into()));
        }
        let d = kraus[0].rows();
        for k in &kraus {
            if !k.is_square() || k.rows() != d {
                return Err(Error::Shape("Kraus operators must all be d×d".into()));
            }
            if !k.all_finite() {
                return Err(Error::Shape("non-finite Kraus entry".into()));
            }
        }
        let id = CMatrix::identity(d);
        let mut tp_sum = CMatrix::zeros(d, d);
        let mut un_sum = CMatrix::zeros(d, d);
        for k in &kraus {
            tp_sum = &tp_sum + &(&k.adjoint() * k);
            un_sum = &un_sum + &(k * &k.adjoint());
        }
        let tp_residual = (&tp_sum - &id).hs_norm();
        let unital_residual = (&un_sum - &id).hs_norm();
        let flags = ChannelFlags {
            cp: true,
            tp: tp_residual <= tol.residual_eps,
            unital: unital_residual <= tol.residual_eps,
            tp_residual,
            unital_residual,
        };
        Ok(Self { dim: d, kraus, flags })
    }

    /// The identity channel on M_d.
    pub fn identity(d: usize) -> Self {
        Self::new(vec![CMatrix::identity(d)], &Tolerance::default()).expect("identity is valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus(&self) -> &[CMatrix<T>] {
        &self.kraus
    }

    pub fn flags(&self) -> ChannelFlags<T> {
        self.flags
    }

    pub fn is_unital_tp(&self) -> bool {
        self.flags.tp && self.flags.unital
    }

    /// Errors unless the channel is unital and trace preserving, naming the
    /// violated residual.
    pub fn require_unital_tp(&self) -> Result<()> {
        if !self.flags.tp {
            return Err(Error::Precondition(format!(
                "channel is not trace preserving: ‖Σ a*a − I‖ = {}",
                self.flags.tp_residual
            )));
        }
        if !self.flags.unital {
            return Err(Error::Precondition(format!(
                "channel is not unital: ‖Σ aa* − I‖ = {}",
                self.flags.unital_residual
            )));
        }
        Ok(())
    }

    pub fn require_unital(&self) -> Result<()> {
        if !self.flags.unital {
            return Err(Error::Precondition(format!(
                "map is not unital: ‖Σ aa* − I‖ = {}",
                self.flags.unital_residual
            )));
        }
        Ok(())
    }

    /// Applies the channel: `Σ_j a_j x a_j*`.
    pub fn apply(&self, x: &CMatrix<T>) -> Result<CMatrix<T>> {
        if !x.is_square() || x.rows() != self.dim {
            return Err(Error::Shape(format!(
                "apply: argument must be {0}×{0}",
                self.dim
            )));
        }
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for a in &self.kraus {
            out = &out + &(&(a * x) * &a.adjoint());
        }
        Ok(out)
    }

    /// Hilbert–Schmidt adjoint: the channel with Kraus operators `{a_j*}`,
    /// satisfying tr(E(a)·b) = tr(a·E*(b)).
    pub fn adjoint_channel(&self, tol: &Tolerance<T>) -> Self {
        let kraus = self.kraus.iter().map(|a| a.adjoint()).collect();
        Self::new(kraus, tol).expect("adjoint of a valid channel is valid")
    }

    /// Superoperator matrix `Σ conj(a_j) ⊗ a_j` (column-stacking convention).
    pub fn superop(&self) -> Superoperator<T> {
        let d2 = self.dim * self.dim;
        let mut m = CMatrix::zeros(d2, d2);
        for a in &self.kraus {
            m = &m + &a.conj().kron(a);
        }
        Superoperator { dim: self.dim, mat: m }
    }

    /// Choi matrix `Σ vec(a_j)·vec(a_j)*`; positive semidefinite by
    /// construction.
    pub fn choi(&self) -> ChoiMatrix<T> {
        let d2 = self.dim * self.dim;
        let mut m = CMatrix::zeros(d2, d2);
        for a in &self.kraus {
            let v = a.vectorize();
            m = &m + &CMatrix::outer(&v, &v);
        }
        ChoiMatrix { dim: self.dim, mat: m }
    }

    /// Composition `outer ∘ inner` with Kraus list `{b_i·a_j}`.
    pub fn compose(outer: &Self, inner: &Self, tol: &Tolerance<T>) -> Result<Self> {
        if outer.dim != inner.dim {
            return Err(Error::Shape("compose: dimension mismatch".into()));
        }
        let mut kraus = Vec::with_capacity(outer.kraus.len() * inner.kraus.len());
        for b in &outer.kraus {
            for a in &inner.kraus {
                kraus.push(b * a);
            }
        }
        Self::new(kraus, tol)
    }

    /// n-fold composition. n = 0 returns the identity channel. The Kraus
    /// list is pruned through the Choi matrix whenever it grows past d²,
    /// keeping the Kraus rank minimal.
    pub fn power(&self, n: usize, tol: &Tolerance<T>) -> Result<Self> {
        if n == 0 {
            return Ok(Self::identity(self.dim));
        }
        let mut acc = self.clone();
        for _ in 1..n {
            acc = Self::compose(&acc, self, tol)?;
            if acc.kraus.len() > self.dim * self.dim {
                acc = acc.pruned(tol)?;
            }
        }
        Ok(acc)
    }

    /// Re-extracts a minimal Kraus list from the Choi matrix, discarding
    /// operators with negligible weight.
    pub fn pruned(&self, tol: &Tolerance<T>) -> Result<Self> {
        kraus_from_choi(&self.choi(), tol)
    }

    /// Convex mixture `p·self + (1−p)·other` as a Kraus channel.
    pub fn mix(&self, other: &Self, p: T, tol: &Tolerance<T>) -> Result<Self> {
        if self.dim != other.dim {
            return Err(Error::Shape("mix: dimension mismatch".into()));
        }
        let mut kraus: Vec<CMatrix<T>> = self
            .kraus
            .iter()
            .map(|k| k.scale_re(p.sqrt()))
            .collect();
        kraus.extend(other.kraus.iter().map(|k| k.scale_re((T::one() - p).sqrt())));
        Self::new(kraus, tol)
    }

    /// Structural verification; recomputes residuals rather than trusting
    /// the cached flags.
    pub fn verify(&self, tol: &Tolerance<T>) -> ChannelFlags<T> {
        Self::new(self.kraus.clone(), tol)
            .expect("already validated")
            .flags
    }
}

impl<T: Real> std::fmt::Debug for KrausChannel<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "KrausChannel {{ dim: {}, kraus: {}, tp: {}, unital: {} }}",
            self.dim,
            self.kraus.len(),
            self.flags.tp,
            self.flags.unital
        )
    }
}

/// The d²×d² matrix of a channel in the column-stacking vectorisation.
#[derive(Clone)]
pub struct Superoperator<T> {
    dim: usize,
    mat: CMatrix<T>,
}

impl<T: Real> Superoperator<T> {
    pub fn from_matrix(dim: usize, mat: CMatrix<T>) -> Result<Self> {
        if mat.rows() != dim * dim || mat.cols() != dim * dim {
            return Err(Error::Shape(format!(
                "superoperator for d={dim} must be {0}×{0}",
                dim * dim
            )));
        }
        if !mat.all_finite() {
            return Err(Error::Shape("non-finite superoperator entry".into()));
        }
        Ok(Self { dim, mat })
    }

    pub fn identity(dim: usize) -> Self {
        Self { dim, mat: CMatrix::identity(dim * dim) }
    }

    /// Matrix of the completely depolarizing map x ↦ tr(x)·I/d.
    pub fn depolarizing(dim: usize) -> Self {
        let v = CMatrix::<T>::identity(dim).vectorize();
        let mat = CMatrix::outer(&v, &v).scale_re(T::one() / T::from_usize(dim).unwrap());
        Self { dim, mat }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }

    /// Applies the superoperator to a matrix through vectorisation.
    pub fn apply(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let v = self.mat.matvec(&x.vectorize());
        CMatrix::unvectorize(self.dim, &v)
    }

    pub fn compose(&self, inner: &Self) -> Self {
        Self { dim: self.dim, mat: &self.mat * &inner.mat }
    }

    /// n-th power by repeated squaring.
    pub fn pow(&self, n: usize) -> Self {
        let d2 = self.dim * self.dim;
        let mut result = CMatrix::identity(d2);
        let mut base = self.mat.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        Self { dim: self.dim, mat: result }
    }

    pub fn dagger(&self) -> Self {
        Self { dim: self.dim, mat: self.mat.adjoint() }
    }

    /// ‖S·S† − S†·S‖, the normality defect.
    pub fn normality_residual(&self) -> T {
        let sd = self.mat.adjoint();
        (&(&self.mat * &sd) - &(&sd * &self.mat)).hs_norm()
    }
}

impl<T: Real> std::fmt::Debug for Superoperator<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Superoperator {{ dim: {} }}", self.dim)
    }
}

/// Choi matrix carrier; Hermitian, and PSD exactly when the underlying map
/// is completely positive.
#[derive(Clone)]
pub struct ChoiMatrix<T> {
    dim: usize,
    mat: CMatrix<T>,
}

impl<T: Real> ChoiMatrix<T> {
    pub fn from_matrix(dim: usize, mat: CMatrix<T>, tol: &Tolerance<T>) -> Result<Self> {
        if mat.rows() != dim * dim || mat.cols() != dim * dim {
            return Err(Error::Shape("Choi matrix has wrong dimension".into()));
        }
        let herm = (&mat - &mat.adjoint()).hs_norm();
        if herm > tol.residual_eps * mat.hs_norm().max(T::one()) {
            return Err(Error::Precondition(format!(
                "Choi matrix is not Hermitian: defect {herm}"
            )));
        }
        Ok(Self { dim, mat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.mat
    }
}

/// Converts a superoperator to the Choi matrix by the index shuffle
/// C[(j₁,i₁),(j₂,i₂)] = S[(i₂,i₁),(j₂,j₁)].
pub fn choi_from_superop<T: Real>(s: &Superoperator<T>) -> ChoiMatrix<T> {
    let d = s.dim();
    let m = s.matrix();
    let mat = CMatrix::from_fn(d * d, d * d, |r, c| {
        let (j1, i1) = (r / d, r % d);
        let (j2, i2) = (c / d, c % d);
        m[(i2 * d + i1, j2 * d + j1)]
    });
    ChoiMatrix { dim: d, mat }
}

/// Extracts a minimal Kraus list from a Choi matrix by eigendecomposition,
/// keeping eigenvalues above `rank_eps·λ_max`. Fails on eigenvalues below
/// `−residual_eps·λ_max` (the map is then not completely positive).
pub fn kraus_from_choi<T: Real>(c: &ChoiMatrix<T>, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    let (vals, vecs) = eigh(&c.mat)?;
    let lmax = vals.first().copied().unwrap_or_else(T::zero).max(T::zero());
    let mut kraus = Vec::new();
    for (k, &l) in vals.iter().enumerate() {
        if l < -tol.residual_eps * lmax.max(T::one()) {
            return Err(Error::NotCompletelyPositive(format!(
                "Choi eigenvalue {l} is negative"
            )));
        }
        if l > tol.rank_eps * lmax {
            let col = vecs.col(k);
            let scaled: Vec<C<T>> = col.iter().map(|z| z.scale(l.sqrt())).collect();
            kraus.push(CMatrix::unvectorize(c.dim, &scaled));
        }
    }
    if kraus.is_empty() {
        // zero map; keep a single zero Kraus operator so the type invariant
        // (n ≥ 1) holds
        kraus.push(CMatrix::zeros(c.dim, c.dim));
    }
    KrausChannel::new(kraus, tol)
}

impl<T: Real> std::ops::Add for &Superoperator<T> {
    type Output = Superoperator<T>;
    fn add(self, rhs: &Superoperator<T>) -> Superoperator<T> {
        assert_eq!(self.dim, rhs.dim);
        Superoperator { dim: self.dim, mat: &self.mat + &rhs.mat }
    }
}

impl<T: Real> std::ops::Sub for &Superoperator<T> {
    type Output = Superoperator<T>;
    fn sub(self, rhs: &Superoperator<T>) -> Superoperator<T> {
        assert_eq!(self.dim, rhs.dim);
        Superoperator { dim: self.dim, mat: &self.mat - &rhs.mat }
    }
}
