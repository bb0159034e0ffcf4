//! Multiplicative domains of unital completely positive maps that need not
//! be trace preserving (Heisenberg picture).
//!
//! Without trace preservation the Kraus-commutant characterisation fails,
//! so the domain is computed from the minimal Stinespring dilation: an
//! element a lies in the multiplicative domain exactly when range(V) reduces
//! π(a), i.e. when the projection onto range(V) commutes with π(a)
//! compressed to the minimal dilation space.

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::algebra::{intersect, OperatorSubspace};
use crate::channel::KrausChannel;
use crate::linalg::{null_space_scaled, orthonormal_columns, CMatrix, Tolerance};
use crate::{Error, Real, Result};

/// Minimal Stinespring dilation data for a unital CP map with n Kraus
/// operators: the (n·d)×d isometry V with V*·(Iₙ⊗x)·V = E(x), an
/// orthonormal basis of the minimal invariant subspace K_min containing
/// range(V), and the range projection expressed in K_min coordinates.
#[derive(Clone)]
pub struct StinespringData<T> {
    pub dim: usize,
    pub env: usize,
    pub v: CMatrix<T>,
    pub min_basis: CMatrix<T>,
    pub p_min: CMatrix<T>,
}

impl<T: Real> StinespringData<T> {
    /// dim K_min ≤ n·d.
    pub fn min_dim(&self) -> usize {
        self.min_basis.cols()
    }

    /// π(x) = Iₙ⊗x compressed to K_min.
    pub fn pi_min(&self, x: &CMatrix<T>) -> CMatrix<T> {
        let lifted = apply_i_tensor(self.env, x, &self.min_basis);
        &self.min_basis.adjoint() * &lifted
    }
}

/// (Iₙ ⊗ x)·m for an (n·d)×k matrix m, computed blockwise.
fn apply_i_tensor<T: Real>(n: usize, x: &CMatrix<T>, m: &CMatrix<T>) -> CMatrix<T> {
    let d = x.rows();
    let mut out = CMatrix::zeros(m.rows(), m.cols());
    for block in 0..n {
        for r in 0..d {
            for c in 0..m.cols() {
                let mut acc = Complex::<T>::zero();
                for s in 0..d {
                    acc += x[(r, s)] * m[(block * d + s, c)];
                }
                out[(block * d + r, c)] = acc;
            }
        }
    }
    out
}

/// Builds the minimal Stinespring dilation of a unital CP map.
///
/// K_min is generated constructively: starting from range(V), vectors are
/// closed under Iₙ⊗E_rs until the dimension stabilises. Minimality matters —
/// commutation with the range projection characterises the multiplicative
/// domain only on the minimal dilation space.
pub fn stinespring<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<StinespringData<T>> {
    ch.require_unital()?;
    let d = ch.dim();
    let n = ch.kraus().len();
    // V = Σ e_i ⊗ a_i*, so that V*(I⊗x)V = Σ a_i x a_i*
    let mut v = CMatrix::zeros(n * d, d);
    for (i, a) in ch.kraus().iter().enumerate() {
        let adj = a.adjoint();
        for r in 0..d {
            for c in 0..d {
                v[(i * d + r, c)] = adj[(r, c)];
            }
        }
    }
    // reconstruction check on matrix units
    for r in 0..d {
        for c in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(r, c)] = Complex::one();
            let lhs = &v.adjoint() * &apply_i_tensor(n, &e, &v);
            let rhs = ch.apply(&e)?;
            if (&lhs - &rhs).hs_norm() > tol.residual_eps * T::from_usize(d).unwrap() {
                return Err(Error::Consistency(
                    "Stinespring reconstruction V*(I⊗x)V ≠ E(x)".into(),
                ));
            }
        }
    }
    // closure of range(V) under π
    let (mut basis, _) = orthonormal_columns(&v, tol);
    loop {
        let cur = basis.cols();
        let mut extended = Vec::with_capacity(cur * (d * d + 1));
        for j in 0..cur {
            extended.push(basis.col(j));
        }
        for r in 0..d {
            for c in 0..d {
                let mut e = CMatrix::zeros(d, d);
                e[(r, c)] = Complex::one();
                let image = apply_i_tensor(n, &e, &basis);
                for j in 0..cur {
                    extended.push(image.col(j));
                }
            }
        }
        let stacked = CMatrix::from_fn(n * d, extended.len(), |i, j| extended[j][i]);
        let (next, _) = orthonormal_columns(&stacked, tol);
        if next.cols() == cur {
            basis = next;
            break;
        }
        basis = next;
    }
    // projection onto range(V) in K_min coordinates
    let (vq, _) = orthonormal_columns(&v, tol);
    let pv = &vq * &vq.adjoint();
    let p_min = &(&basis.adjoint() * &pv) * &basis;
    Ok(StinespringData { dim: d, env: n, v, min_basis: basis, p_min })
}

/// Multiplicative domain of a unital CP map through the reducing-subspace
/// criterion: solve {a : [P_min, π_min(a)] = 0}.
///
/// The result is verified to be a *-algebra and checked against the
/// defining identities E(ab) = E(a)E(b), E(ba) = E(b)E(a) over a full
/// matrix-unit basis of b's.
pub fn mult_domain_ucp<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    let data = stinespring(ch, tol)?;
    let d = ch.dim();
    let d2 = d * d;
    let k = data.min_dim();
    // columns: vec([P, π(E_rs)]) per matrix unit, in vec ordering
    let mut map = CMatrix::zeros(k * k, d2);
    for j in 0..d2 {
        let mut e = CMatrix::zeros(d, d);
        e[(j % d, j / d)] = Complex::one();
        let pi = data.pi_min(&e);
        let comm = &(&data.p_min * &pi) - &(&pi * &data.p_min);
        let col = comm.vectorize();
        for i in 0..k * k {
            map[(i, j)] = col[i];
        }
    }
    let ns = null_space_scaled(&map, tol, T::one());
    let mats: Vec<CMatrix<T>> = ns.basis.iter().map(|v| CMatrix::unvectorize(d, v)).collect();
    let domain = OperatorSubspace::from_span(d, &mats, tol)?;

    if !domain.is_star_closed(tol) || !domain.is_mult_closed(tol) {
        return Err(Error::Consistency(
            "computed multiplicative domain is not a *-algebra (non-minimal dilation?)".into(),
        ));
    }
    // nonlinear definition check on basis elements against all matrix units
    let scale = T::from_usize(d).unwrap();
    for a in domain.basis() {
        let ea = ch.apply(a)?;
        for r in 0..d {
            for c in 0..d {
                let mut b = CMatrix::zeros(d, d);
                b[(r, c)] = Complex::one();
                let eb = ch.apply(&b)?;
                let lhs = ch.apply(&(a * &b))?;
                let rhs = &ea * &eb;
                let lhs2 = ch.apply(&(&b * a))?;
                let rhs2 = &eb * &ea;
                if (&lhs - &rhs).hs_norm() > tol.residual_eps * scale
                    || (&lhs2 - &rhs2).hs_norm() > tol.residual_eps * scale
                {
                    return Err(Error::Consistency(
                        "multiplicative-domain element fails E(ab) = E(a)E(b)".into(),
                    ));
                }
            }
        }
    }
    Ok(domain)
}

/// Mixture (1−1/n)·Φ + (1/n)·tr(·)·I/d from the density construction. The
/// result is unital, strictly positive, and has trivial multiplicative
/// domain; its distance to Φ is bounded by 2/n in cb norm (recorded
/// analytically, not computed).
pub fn density_perturbation<T: Real>(
    phi: &KrausChannel<T>,
    n: usize,
    tol: &Tolerance<T>,
) -> Result<KrausChannel<T>> {
    if n < 2 {
        return Err(Error::Precondition("density_perturbation needs n ≥ 2".into()));
    }
    phi.require_unital()?;
    let d = phi.dim();
    let nf = T::from_usize(n).unwrap();
    let keep = (T::one() - T::one() / nf).sqrt();
    let dep = (T::one() / (nf * T::from_usize(d).unwrap())).sqrt();
    let mut kraus: Vec<CMatrix<T>> = phi.kraus().iter().map(|k| k.scale_re(keep)).collect();
    for i in 0..d {
        for j in 0..d {
            let mut e = CMatrix::zeros(d, d);
            e[(i, j)] = Complex::new(dep, T::zero());
            kraus.push(e);
        }
    }
    KrausChannel::new(kraus, tol)
}

/// Cb-norm distance bound of [`density_perturbation`] to its input.
pub fn density_cb_bound<T: Real>(n: usize) -> T {
    T::from_f64(2.0).unwrap() / T::from_usize(n).unwrap()
}

/// Both sides of the averaging identity for E = ½(Φ+Ψ):
/// M_E = M_Φ ∩ M_Ψ ∩ {x : E(x) = Φ(x) = Ψ(x)}.
#[derive(Clone)]
pub struct AveragingReport<T> {
    pub left: OperatorSubspace<T>,
    pub right: OperatorSubspace<T>,
    pub equal: bool,
}

pub fn averaging_intersection_check<T: Real>(
    phi: &KrausChannel<T>,
    psi: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<AveragingReport<T>> {
    phi.require_unital()?;
    psi.require_unital()?;
    if phi.dim() != psi.dim() {
        return Err(Error::Shape("averaging check needs equal dimensions".into()));
    }
    let d = phi.dim();
    let d2 = d * d;
    let half = T::from_f64(0.5).unwrap();
    let e = phi.mix(psi, half, tol)?;
    let left = mult_domain_ucp(&e, tol)?;

    let m_phi = mult_domain_ucp(phi, tol)?;
    let m_psi = mult_domain_ucp(psi, tol)?;
    // agreement subspace at superoperator level: ker(S_E−S_Φ) ∩ ker(S_E−S_Ψ)
    let se = e.superop();
    let dphi = se.matrix() - phi.superop().matrix();
    let dpsi = se.matrix() - psi.superop().matrix();
    let mut stack = CMatrix::zeros(2 * d2, d2);
    for i in 0..d2 {
        for j in 0..d2 {
            stack[(i, j)] = dphi[(i, j)];
            stack[(d2 + i, j)] = dpsi[(i, j)];
        }
    }
    let ns = null_space_scaled(&stack, tol, T::one());
    let agree_mats: Vec<CMatrix<T>> = ns.basis.iter().map(|v| CMatrix::unvectorize(d, v)).collect();
    let agree = OperatorSubspace::from_span(d, &agree_mats, tol)?;
    let right = intersect(&intersect(&m_phi, &m_psi, tol)?, &agree, tol)?;
    let equal = left.equals(&right, tol);
    if !equal {
        return Err(Error::Consistency(format!(
            "averaging identity failed: M_E dim {} vs intersection dim {}",
            left.dimension(),
            right.dimension()
        )));
    }
    Ok(AveragingReport { left, right, equal })
}

/// The unital, non-trace-preserving map on M₃ with Kraus operators
/// k₁ = e₁e₁*, k₂ = e₂e₂*, k₃ = e₃e₁*/√2, k₄ = e₃e₂*/√2, acting as
/// x ↦ diag(x₁₁, x₂₂, (x₁₁+x₂₂)/2). Its multiplicative domain contains
/// diag(1,1,0), which does not commute with k₃ — the commutant criterion
/// genuinely needs trace preservation.
pub fn counterexample_phi<T: Real>(tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let k1 = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
    let k2 = CMatrix::from_real(3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let k3 = CMatrix::from_real(3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, r, 0.0, 0.0]);
    let k4 = CMatrix::from_real(3, &[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, r, 0.0]);
    KrausChannel::new(vec![k1, k2, k3, k4], tol)
}

/// Minimum eigenvalue of E(x) for PSD x — strict positivity diagnostic for
/// perturbed maps.
pub fn image_min_eigenvalue<T: Real>(
    ch: &KrausChannel<T>,
    x: &CMatrix<T>,
) -> Result<T> {
    let image = ch.apply(x)?;
    let (vals, _) = crate::linalg::eigh(&image)?;
    Ok(vals.last().copied().unwrap_or_else(T::zero))
}

/// Superoperator-norm distance between two maps (Frobenius norm of the
/// superoperator difference).
pub fn superop_distance<T: Real>(a: &KrausChannel<T>, b: &KrausChannel<T>) -> T {
    (a.superop().matrix() - b.superop().matrix()).hs_norm()
}
