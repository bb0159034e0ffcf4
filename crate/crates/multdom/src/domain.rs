//! Multiplicative domains of unital trace-preserving channels.
//!
//! For a unital channel the multiplicative domain equals the fixed-point set
//! of E*∘E, so every `M_{E^n}` here is computed as the kernel of
//! `(Sⁿ)†·Sⁿ − I` at superoperator level. Two independent routes guard the
//! result: the commutant of `{a_i*·a_j}` at n = 1 and the recursion
//! `M_{E^n} = {a ∈ M_{E^{n-1}} : E(a) ∈ M_{E^{n-1}}}` for n ≥ 2. The chain
//! is decreasing and stabilises at the multiplicative index κ; on the
//! stabilised algebra the channel acts as a *-automorphism whose inverse is
//! the adjoint channel.

use crate::algebra::{fixed_point_algebra, generated_algebra, OperatorSubspace};
use crate::channel::{KrausChannel, Superoperator};
use crate::linalg::{eigenvalues, null_space_scaled, solve, CMatrix, Tolerance};
use crate::spectral::peripheral_clusters;
use crate::{Error, Real, Result, C};

/// The chain M_E ⊇ M_{E²} ⊇ … with its stabilisation point.
#[derive(Clone)]
pub struct MultChainResult<T> {
    /// Chain entries M_{E¹}, …, M_{E^{κ+1}}; the last two agree (the
    /// stabilisation witness).
    pub chain: Vec<OperatorSubspace<T>>,
    /// Multiplicative index: smallest n with M_{E^n} = M_{E^{n+1}}.
    pub kappa: usize,
    /// Dimensions of the chain entries (length κ+1, non-increasing).
    pub dims: Vec<usize>,
    pub warnings: Vec<String>,
}

impl<T: Real> MultChainResult<T> {
    /// The stabilising algebra M_{E^∞}.
    pub fn stabilized(&self) -> &OperatorSubspace<T> {
        self.chain.last().expect("chain is nonempty")
    }

    /// Dimensions of the strictly evolving part, `dims[0..kappa]`.
    pub fn reported_dims(&self) -> &[usize] {
        &self.dims[..self.kappa]
    }
}

/// Multiplicative domain M_E = ker(S†S − I), cross-checked against the
/// commutant of `{a_i*·a_j}`.
pub fn mult_domain<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    ch.require_unital_tp()?;
    let s = ch.superop();
    let a = Superoperator::from_matrix(ch.dim(), &s.matrix().adjoint() * s.matrix())?;
    let mut fixed = fixed_point_algebra(&a, tol);

    let mut products = Vec::with_capacity(ch.kraus().len() * ch.kraus().len());
    for ai in ch.kraus() {
        for aj in ch.kraus() {
            products.push(&ai.adjoint() * aj);
        }
    }
    let comm = crate::algebra::commutant(ch.dim(), &products, tol)?;
    if !fixed.equals(&comm, tol) {
        return Err(Error::Consistency(format!(
            "multiplicative domain mismatch: fixed-point route dim {} vs Kraus-commutant route dim {}",
            fixed.dimension(),
            comm.dimension()
        )));
    }
    for w in comm.warnings() {
        fixed.push_warning(w.clone());
    }
    Ok(fixed)
}

/// M_{E^n} for a single n, from the kernel of (Sⁿ)†Sⁿ − I.
pub fn mult_domain_at<T: Real>(
    ch: &KrausChannel<T>,
    n: usize,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    if n == 0 {
        return Err(Error::Precondition("mult_domain_at needs n ≥ 1".into()));
    }
    ch.require_unital_tp()?;
    let sn = ch.superop().pow(n);
    let a = Superoperator::from_matrix(ch.dim(), &sn.matrix().adjoint() * sn.matrix())?;
    Ok(fixed_point_algebra(&a, tol))
}

/// Runs the chain M_{E^n} until two consecutive entries agree as subspaces.
///
/// `max_n` defaults to d². Stabilisation is permanent (the recursion of the
/// chain only references the previous entry), so the first agreement is κ.
pub fn mult_chain<T: Real>(
    ch: &KrausChannel<T>,
    max_n: Option<usize>,
    tol: &Tolerance<T>,
) -> Result<MultChainResult<T>> {
    ch.require_unital_tp()?;
    let d = ch.dim();
    let d2 = d * d;
    let max_n = max_n.unwrap_or(d2).max(1);
    let s = ch.superop();

    let mut chain: Vec<OperatorSubspace<T>> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let mut sn = s.clone();
    let mut kappa = None;

    for n in 1..=max_n + 1 {
        let m_n = if n == 1 {
            mult_domain(ch, tol)?
        } else {
            let a = Superoperator::from_matrix(d, &sn.matrix().adjoint() * sn.matrix())?;
            let m_n = fixed_point_algebra(&a, tol);
            // independent recursive route: {a ∈ M_{E^{n−1}} : E(a) ∈ M_{E^{n−1}}}
            let rec = restrict_by_image(&chain[n - 2], &s, tol)?;
            if !m_n.equals(&rec, tol) {
                return Err(Error::Consistency(format!(
                    "chain entry {n}: kernel route dim {} disagrees with recursive route dim {}",
                    m_n.dimension(),
                    rec.dimension()
                )));
            }
            m_n
        };
        warnings.extend(m_n.warnings().iter().cloned());
        if let Some(prev) = chain.last() {
            if m_n.dimension() > prev.dimension() {
                return Err(Error::Consistency(format!(
                    "chain dimension increased from {} to {} at n = {n}",
                    prev.dimension(),
                    m_n.dimension()
                )));
            }
            if m_n.dimension() == prev.dimension() && !m_n.equals(prev, tol) {
                return Err(Error::Consistency(format!(
                    "chain entries at n = {} and {n} have equal dimension but different spans",
                    n - 1
                )));
            }
            if m_n.equals(prev, tol) {
                kappa = Some(n - 1);
                chain.push(m_n);
                break;
            }
        }
        chain.push(m_n);
        sn = sn.compose(&s);
    }

    let kappa = kappa.ok_or_else(|| {
        Error::Numeric(format!(
            "multiplicative chain did not stabilise within {max_n} steps (tolerance failure?)"
        ))
    })?;
    let dims: Vec<usize> = chain.iter().map(|m| m.dimension()).collect();

    if kappa >= d2 {
        return Err(Error::Consistency(format!(
            "multiplicative index {kappa} is not < d² = {d2}"
        )));
    }
    // a normal channel (S†S = SS†) must have index 1
    if s.normality_residual() <= tol.residual_eps && kappa != 1 {
        return Err(Error::Consistency(format!(
            "normal channel produced multiplicative index {kappa} ≠ 1"
        )));
    }
    // dimension bound for proper unital *-subalgebras of M_d
    if dims[0] < d2 && dims[0] > d2 - d + 1 {
        warnings.push(format!(
            "dim M_E = {} exceeds the maximal proper subalgebra bound d²−d+1 = {}",
            dims[0],
            d2 - d + 1
        ));
    }
    Ok(MultChainResult { chain, kappa, dims, warnings })
}

/// {a ∈ span(prev) : S(a) ∈ span(prev)}, solved in the coefficient space of
/// the previous chain entry.
fn restrict_by_image<T: Real>(
    prev: &OperatorSubspace<T>,
    s: &Superoperator<T>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    let d = prev.dim_ambient();
    let d2 = d * d;
    let c = prev.stacked_columns();
    let p = &c * &c.adjoint();
    let complement = &CMatrix::identity(d2) - &p;
    let map = &(&complement * s.matrix()) * &c;
    let ns = null_space_scaled(&map, tol, T::one());
    let basis: Vec<CMatrix<T>> = ns
        .basis
        .iter()
        .map(|coeff| {
            let v = c.matvec(coeff);
            CMatrix::unvectorize(d, &v)
        })
        .collect();
    OperatorSubspace::from_orthonormal(d, basis, tol)
}

/// M_{E^∞} with the peripheral cross-check of the structure theorem: the
/// stabilised algebra must equal the algebra generated by the peripheral
/// eigen-operators.
pub fn stabilizing_algebra<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<OperatorSubspace<T>> {
    let result = mult_chain(ch, None, tol)?;
    let stab = result.stabilized().clone();
    let clusters = peripheral_clusters(&ch.superop(), tol)?;
    let mut eigenops: Vec<CMatrix<T>> = Vec::new();
    for ops in &clusters.right_ops {
        eigenops.extend(ops.iter().cloned());
    }
    let generated = generated_algebra(ch.dim(), &eigenops, false, tol)?;
    if !stab.equals(&generated, tol) {
        return Err(Error::Consistency(format!(
            "stabilising algebra (dim {}) differs from the algebra generated by \
             peripheral eigen-operators (dim {})",
            stab.dimension(),
            generated.dimension()
        )));
    }
    Ok(stab)
}

/// Residuals of the automorphism checks on a candidate stabilising algebra.
#[derive(Debug, Clone)]
pub struct AutomorphismReport<T> {
    /// Worst residual of E(b) against the algebra.
    pub invariance: T,
    /// Worst ‖E*(E(b)) − b‖ over basis elements.
    pub left_inverse: T,
    /// Worst ‖E(E*(b)) − b‖ over basis elements.
    pub right_inverse: T,
    /// Worst ‖E(ab) − E(a)E(b)‖ over basis pairs.
    pub multiplicativity: T,
    /// ‖R†R − I‖ for the superoperator restricted to the algebra.
    pub restricted_unitarity: T,
    pub threshold: T,
}

impl<T: Real> AutomorphismReport<T> {
    pub fn passed(&self) -> bool {
        self.failed_check().is_none()
    }

    /// Name of the first failing check, if any.
    pub fn failed_check(&self) -> Option<&'static str> {
        let t = self.threshold;
        if self.invariance > t {
            Some("invariance E(alg) ⊆ alg")
        } else if self.left_inverse > t {
            Some("left inverse E*∘E = id")
        } else if self.right_inverse > t {
            Some("right inverse E∘E* = id")
        } else if self.multiplicativity > t {
            Some("multiplicativity E(ab) = E(a)E(b)")
        } else if self.restricted_unitarity > t {
            Some("restricted superoperator unitarity")
        } else {
            None
        }
    }
}

/// Checks that the channel restricts to a *-automorphism of `alg` with
/// inverse E*. All residuals are reported; `passed` compares them against
/// `residual_eps` (scaled mildly with the algebra dimension).
pub fn verify_automorphism<T: Real>(
    ch: &KrausChannel<T>,
    alg: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<AutomorphismReport<T>> {
    ch.require_unital_tp()?;
    if alg.dim_ambient() != ch.dim() {
        return Err(Error::Shape("algebra lives in the wrong ambient dimension".into()));
    }
    let adj = ch.adjoint_channel(tol);
    let mut invariance = T::zero();
    let mut left_inverse = T::zero();
    let mut right_inverse = T::zero();
    let mut multiplicativity = T::zero();
    for b in alg.basis() {
        let eb = ch.apply(b)?;
        invariance = invariance.max(alg.residual(&eb));
        left_inverse = left_inverse.max((&adj.apply(&eb)? - b).hs_norm());
        right_inverse = right_inverse.max((&ch.apply(&adj.apply(b)?)? - b).hs_norm());
    }
    for a in alg.basis() {
        for b in alg.basis() {
            let lhs = ch.apply(&(a * b))?;
            let rhs = &ch.apply(a)? * &ch.apply(b)?;
            multiplicativity = multiplicativity.max((&lhs - &rhs).hs_norm());
        }
    }
    let c = alg.stacked_columns();
    let restricted = &(&c.adjoint() * ch.superop().matrix()) * &c;
    let restricted_unitarity = restricted.unitary_residual();
    let dscale = T::from_usize(ch.dim()).unwrap();
    Ok(AutomorphismReport {
        invariance,
        left_inverse,
        right_inverse,
        multiplicativity,
        restricted_unitarity,
        threshold: tol.residual_eps * dscale,
    })
}

/// Norm trajectory of repeated channel application on the component of x
/// orthogonal to the stabilising algebra.
#[derive(Debug, Clone)]
pub struct DecayReport<T> {
    /// ‖Eⁿ(x⊥)‖ for n = 0, 1, …; the run ends at `target` or at `n_max`.
    pub norms: Vec<T>,
    /// First n with norm below `target`, when reached.
    pub reached_at: Option<usize>,
    /// 1 − max{|λ| : λ non-peripheral}; computed when the target was not
    /// reached (slow mixing).
    pub spectral_gap: Option<T>,
    /// Whether the sequence was non-increasing within residual_eps.
    pub monotone: bool,
}

/// Applies Eⁿ to the complement component of x, recording Hilbert–Schmidt
/// norms. The theory makes the sequence non-increasing with limit 0.
pub fn complement_decay<T: Real>(
    ch: &KrausChannel<T>,
    x: &CMatrix<T>,
    n_max: usize,
    target: T,
    tol: &Tolerance<T>,
) -> Result<DecayReport<T>> {
    let stab = stabilizing_algebra(ch, tol)?;
    let mut cur = x - &stab.project(x);
    let s = ch.superop();
    let mut norms = vec![cur.hs_norm()];
    let mut monotone = true;
    let mut reached_at = (norms[0] < target).then_some(0);
    for n in 1..=n_max {
        cur = s.apply(&cur);
        let nn = cur.hs_norm();
        if nn > *norms.last().unwrap() + tol.residual_eps {
            monotone = false;
        }
        norms.push(nn);
        if nn < target {
            reached_at = Some(n);
            break;
        }
    }
    let spectral_gap = if reached_at.is_none() {
        let vals = eigenvalues(s.matrix())?;
        let sub = vals
            .iter()
            .map(|v| v.norm())
            .filter(|&m| m < T::one() - tol.eig_eps)
            .fold(T::zero(), |a, b| a.max(b));
        Some(T::one() - sub)
    } else {
        None
    };
    Ok(DecayReport { norms, reached_at, spectral_gap, monotone })
}

/// Spectral projection onto the span of the peripheral eigen-operators,
/// P = R·(L†R)⁻¹·L† from right and left peripheral eigenvectors.
///
/// Peripheral Jordan blocks of a unital TP channel are one-dimensional, so a
/// defective peripheral eigenvalue flags an invalid input.
pub fn peripheral_projection<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<Superoperator<T>> {
    ch.require_unital_tp()?;
    let s = ch.superop();
    let d = ch.dim();
    let d2 = d * d;
    let clusters = peripheral_clusters(&s, tol)?;
    let mut right_cols: Vec<Vec<C<T>>> = Vec::new();
    let mut left_cols: Vec<Vec<C<T>>> = Vec::new();
    let sd = s.matrix().adjoint();
    for (idx, lambda) in clusters.values.iter().enumerate() {
        for op in &clusters.right_ops[idx] {
            right_cols.push(op.vectorize());
        }
        // left eigenvectors: ker(S† − conj(λ)·I)
        let mut shifted = sd.clone();
        for i in 0..d2 {
            shifted[(i, i)] -= lambda.conj();
        }
        let ns = null_space_scaled(&shifted, tol, T::one());
        if ns.basis.len() != clusters.multiplicities[idx] {
            return Err(Error::Numeric(format!(
                "left eigenspace of peripheral eigenvalue {lambda} has dimension {} \
                 instead of {} (defective input?)",
                ns.basis.len(),
                clusters.multiplicities[idx]
            )));
        }
        left_cols.extend(ns.basis);
    }
    let k = right_cols.len();
    let r = CMatrix::from_fn(d2, k, |i, j| right_cols[j][i]);
    let l = CMatrix::from_fn(d2, k, |i, j| left_cols[j][i]);
    let gram = &l.adjoint() * &r;
    let x = solve(&gram, &l.adjoint())?;
    let p = &r * &x;
    let idem = (&(&p * &p) - &p).hs_norm();
    if idem > tol.residual_eps * T::from_usize(d2).unwrap() {
        return Err(Error::Consistency(format!(
            "peripheral projection is not idempotent: ‖P² − P‖ = {idem}"
        )));
    }
    Superoperator::from_matrix(d, p)
}

/// Product a ⊙ b = P(a·b) on the range of the peripheral projection; with
/// this multiplication the range becomes a C*-algebra.
pub fn choi_effros_product<T: Real>(
    p: &Superoperator<T>,
    a: &CMatrix<T>,
    b: &CMatrix<T>,
    tol: &Tolerance<T>,
) -> Result<CMatrix<T>> {
    let idem = (&(p.matrix() * p.matrix()) - p.matrix()).hs_norm();
    if idem > tol.residual_eps * T::from_usize(p.dim() * p.dim()).unwrap() {
        return Err(Error::Precondition(
            "choi_effros_product needs an idempotent projection".into(),
        ));
    }
    for (name, m) in [("a", a), ("b", b)] {
        let proj = p.apply(m);
        let res = (&proj - m).hs_norm();
        if res > tol.residual_eps * m.hs_norm().max(T::one()) {
            return Err(Error::Precondition(format!(
                "{name} is outside the range of the projection (residual {res})"
            )));
        }
    }
    Ok(p.apply(&(a * b)))
}

/// Projection of x onto the orthogonal complement of a subspace — the
/// entry point for decay experiments.
pub fn complement_component<T: Real>(space: &OperatorSubspace<T>, x: &CMatrix<T>) -> CMatrix<T> {
    x - &space.project(x)
}
