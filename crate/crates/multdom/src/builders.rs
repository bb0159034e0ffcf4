//! Constructors for the channel families used throughout: unitary
//! conjugations, Pauli and Weyl–Heisenberg mixtures, the Fourier rank-one
//! family, the κ=3 construction, the projective pair and its deformation
//! path, plus seeded random generators for property-test populations.

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::channel::KrausChannel;
use crate::linalg::{qr, CMatrix, Tolerance};
use crate::{Error, Real, Result, C};

/// JSON-facing description of a channel family instance.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum ChannelSpec {
    /// Single named or seeded unitary conjugation.
    Unitary {
        dim: usize,
        /// Named 2×2 unitaries ("i", "x", "y", "z", "h") take precedence
        /// over the seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
    Pauli { probs: [f64; 4] },
    Weyl { dim: usize, probs: Vec<f64> },
    Fourier { dim: usize },
    Kappa3,
    Projective,
    PathT { t: f64 },
    RandomUnitaryMixture { dim: usize, kraus: usize, seed: u64 },
    Custom,
}

impl ChannelSpec {
    /// Instantiates the described channel.
    pub fn build<T: Real>(&self, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
        match self {
            ChannelSpec::Unitary { dim, name, seed } => {
                let u = match name.as_deref() {
                    Some(n) => named_unitary::<T>(n, *dim)?,
                    None => haar_ish_unitary(*dim, seed.unwrap_or(0)),
                };
                unitary_channel(&u, tol)
            }
            ChannelSpec::Pauli { probs } => pauli_channel(probs, tol),
            ChannelSpec::Weyl { dim, probs } => weyl_channel(*dim, probs, tol),
            ChannelSpec::Fourier { dim } => fourier_example(*dim, tol),
            ChannelSpec::Kappa3 => kappa3_example(tol),
            ChannelSpec::Projective => projective_channel(tol),
            ChannelSpec::PathT { t } => path_channel(T::from_f64(*t).unwrap(), tol),
            ChannelSpec::RandomUnitaryMixture { dim, kraus, seed } => {
                Ok(random_unitary_mixture(*dim, *kraus, *seed, tol))
            }
            ChannelSpec::Custom => Err(Error::Precondition(
                "custom channels are supplied as explicit Kraus data".into(),
            )),
        }
    }
}

fn named_unitary<T: Real>(name: &str, dim: usize) -> Result<CMatrix<T>> {
    if dim != 2 && !name.eq_ignore_ascii_case("i") {
        return Err(Error::Precondition(format!(
            "named unitary '{name}' is 2×2; got dim {dim}"
        )));
    }
    let m = match name.to_ascii_lowercase().as_str() {
        "i" | "id" => CMatrix::identity(dim),
        "x" => pauli_matrix(1),
        "y" => pauli_matrix(2),
        "z" => pauli_matrix(3),
        "h" => {
            let s = T::from_f64(std::f64::consts::FRAC_1_SQRT_2).unwrap();
            CMatrix::from_real(2, &[1.0, 1.0, 1.0, -1.0]).scale_re(s)
        }
        other => {
            return Err(Error::Precondition(format!("unknown unitary name '{other}'")));
        }
    };
    Ok(m)
}

/// σ_0..σ_3 as complex matrices.
pub fn pauli_matrix<T: Real>(which: usize) -> CMatrix<T> {
    match which {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]),
        2 => {
            let mut m = CMatrix::zeros(2, 2);
            m[(0, 1)] = Complex::new(T::zero(), -T::one());
            m[(1, 0)] = Complex::new(T::zero(), T::one());
            m
        }
        3 => CMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0]),
        _ => panic!("Pauli index out of range"),
    }
}

/// Conjugation x ↦ u·x·u* for a unitary u.
pub fn unitary_channel<T: Real>(u: &CMatrix<T>, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    if !u.is_square() {
        return Err(Error::Shape("unitary_channel: u must be square".into()));
    }
    let res = u.unitary_residual();
    if res > tol.residual_eps * T::from_usize(u.rows()).unwrap() {
        return Err(Error::Precondition(format!(
            "unitary_channel: ‖u*u − I‖ = {res} exceeds tolerance"
        )));
    }
    KrausChannel::new(vec![u.clone()], tol)
}

fn validate_probs<T: Real>(probs: &[f64], tol: &Tolerance<T>) -> Result<()> {
    if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
        return Err(Error::Precondition("probabilities must be nonnegative".into()));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > tol.residual_eps.to_f64().unwrap_or(1e-9).max(1e-12) {
        return Err(Error::Precondition(format!(
            "probabilities sum to {total}, expected 1"
        )));
    }
    Ok(())
}

/// Mixture of the four Pauli conjugations with the given probabilities.
pub fn pauli_channel<T: Real>(probs: &[f64; 4], tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    validate_probs(probs, tol)?;
    let mut kraus = Vec::new();
    for (i, &p) in probs.iter().enumerate() {
        if p > 0.0 {
            kraus.push(pauli_matrix::<T>(i).scale_re(T::from_f64(p).unwrap().sqrt()));
        }
    }
    KrausChannel::new(kraus, tol)
}

/// Discrete Weyl–Heisenberg unitaries W_jk = shift^j · clock^k.
pub fn weyl_unitaries<T: Real>(d: usize) -> Vec<CMatrix<T>> {
    let omega = |k: usize| -> C<T> {
        let theta = T::from_f64(2.0 * std::f64::consts::PI).unwrap()
            * T::from_usize(k % d).unwrap()
            / T::from_usize(d).unwrap();
        Complex::new(theta.cos(), theta.sin())
    };
    let mut shift = CMatrix::<T>::zeros(d, d);
    for i in 0..d {
        shift[((i + 1) % d, i)] = Complex::one();
    }
    let mut clock = CMatrix::<T>::zeros(d, d);
    for i in 0..d {
        clock[(i, i)] = omega(i);
    }
    let mut out = Vec::with_capacity(d * d);
    let mut sj = CMatrix::identity(d);
    for _ in 0..d {
        let mut w = sj.clone();
        for _ in 0..d {
            out.push(w.clone());
            w = &w * &clock;
        }
        sj = &sj * &shift;
    }
    out
}

/// Random mixture of Weyl–Heisenberg unitaries; normal superoperator.
pub fn weyl_channel<T: Real>(d: usize, probs: &[f64], tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    if probs.len() != d * d {
        return Err(Error::Precondition(format!(
            "weyl_channel needs d² = {} probabilities, got {}",
            d * d,
            probs.len()
        )));
    }
    validate_probs(probs, tol)?;
    let ws = weyl_unitaries::<T>(d);
    let mut kraus = Vec::new();
    for (w, &p) in ws.iter().zip(probs) {
        if p > 0.0 {
            kraus.push(w.scale_re(T::from_f64(p).unwrap().sqrt()));
        }
    }
    KrausChannel::new(kraus, tol)
}

/// Rank-one Kraus family s_k = f_k·e_k* built from the discrete Fourier
/// basis f_k (k-th column of the unitary DFT matrix). The square of this
/// channel is completely depolarizing, so its multiplicative index is 2.
pub fn fourier_example<T: Real>(d: usize, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    if d < 2 {
        return Err(Error::Precondition("fourier_example needs d ≥ 2".into()));
    }
    let root = T::one() / T::from_usize(d).unwrap().sqrt();
    let mut kraus = Vec::with_capacity(d);
    for k in 0..d {
        let f: Vec<C<T>> = (0..d)
            .map(|j| {
                let theta = T::from_f64(2.0 * std::f64::consts::PI).unwrap()
                    * T::from_usize((j * k) % d).unwrap()
                    / T::from_usize(d).unwrap();
                Complex::new(theta.cos(), theta.sin()).scale(root)
            })
            .collect();
        let mut e = vec![Complex::<T>::zero(); d];
        e[k] = Complex::one();
        kraus.push(CMatrix::outer(&f, &e));
    }
    KrausChannel::new(kraus, tol)
}

/// The three real Kraus operators of the multiplicative-index-3 channel
/// on M₃.
pub fn kappa3_example<T: Real>(tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let s1 = CMatrix::from_real(3, &[0.0, 0.0, r, 0.0, 0.0, r, 0.0, 0.0, 0.0]);
    let s2 = CMatrix::from_real(3, &[0.0, r, 0.0, 0.0, -r, 0.0, 0.0, 0.0, 0.0]);
    let s3 = CMatrix::from_real(3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
    KrausChannel::new(vec![s1, s2, s3], tol)
}

/// x ↦ p·x·p + q·x·q for the projections p = diag(1,0), q = diag(0,1).
pub fn projective_channel<T: Real>(tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    let p = CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]);
    let q = CMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]);
    KrausChannel::new(vec![p, q], tol)
}

/// Deformation Φ_t of the projective channel: Kraus p(t), q(t) with
/// p(t) = [[1+t, 0],[t, 0]]/c, q(t) = [[0, −t],[0, 1+t]]/c and
/// c = √((1+t)² + t²). Unital and trace preserving for every t ∈ [0,1];
/// Φ_0 is the projective channel.
pub fn path_channel<T: Real>(t: T, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    if t < T::zero() || t > T::one() {
        return Err(Error::Precondition("path parameter t must lie in [0,1]".into()));
    }
    let one = T::one();
    let c = ((one + t) * (one + t) + t * t).sqrt();
    let re = |x: T| Complex::new(x / c, T::zero());
    let mut p = CMatrix::zeros(2, 2);
    p[(0, 0)] = re(one + t);
    p[(1, 0)] = re(t);
    let mut q = CMatrix::zeros(2, 2);
    q[(0, 1)] = re(-t);
    q[(1, 1)] = re(one + t);
    KrausChannel::new(vec![p, q], tol)
}

/// QR-orthogonalised complex Gaussian matrix with the phase fix that makes
/// the R diagonal positive.
pub fn haar_ish_unitary<T: Real>(d: usize, seed: u64) -> CMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = gaussian_matrix(d, d, &mut rng);
    let (q, r) = qr(&g);
    let mut fixed = q;
    for j in 0..d {
        let rj = r[(j, j)];
        if rj.norm() > T::zero() {
            let phase = rj / rj.norm();
            for i in 0..d {
                fixed[(i, j)] *= phase;
            }
        }
    }
    fixed
}

fn gaussian_matrix<T: Real>(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix<T> {
    CMatrix::from_fn(rows, cols, |_, _| {
        Complex::new(
            T::from_f64(gaussian(rng)).unwrap(),
            T::from_f64(gaussian(rng)).unwrap(),
        )
    })
}

/// Box–Muller transform on the top of the uniform stream.
fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Mixture Σ p_i·u_i·x·u_i* of seeded Haar-ish unitaries with flat-Dirichlet
/// probabilities. Deterministic per seed; always unital and TP.
pub fn random_unitary_mixture<T: Real>(
    d: usize,
    k: usize,
    seed: u64,
    tol: &Tolerance<T>,
) -> KrausChannel<T> {
    assert!(k >= 1, "mixture needs at least one unitary");
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xa5a5_5a5a_0f0f_f0f0);
    let mut weights: Vec<f64> = (0..k).map(|_| -f64::ln(rng.gen_range(f64::MIN_POSITIVE..1.0))).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    let kraus: Vec<CMatrix<T>> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            haar_ish_unitary::<T>(d, seed.wrapping_mul(0x9e37).wrapping_add(i as u64))
                .scale_re(T::from_f64(w).unwrap().sqrt())
        })
        .collect();
    KrausChannel::new(kraus, tol).expect("unitary mixture is always a valid channel")
}

/// Seeded unital CP map that is generally not trace preserving: random
/// Kraus operators renormalised so that Σ g_i·g_i* = I.
pub fn random_unital_cp<T: Real>(
    d: usize,
    k: usize,
    seed: u64,
    tol: &Tolerance<T>,
) -> Result<KrausChannel<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x1234_fedc_9876_0abc);
    let gs: Vec<CMatrix<T>> = (0..k).map(|_| gaussian_matrix(d, d, &mut rng)).collect();
    let mut total = CMatrix::zeros(d, d);
    for g in &gs {
        total = &total + &(g * &g.adjoint());
    }
    let w = crate::linalg::inv_sqrt_psd(&total, T::epsilon())?;
    let kraus: Vec<CMatrix<T>> = gs.iter().map(|g| &w * g).collect();
    KrausChannel::new(kraus, tol)
}
