//! Peripheral spectra, irreducibility and primitivity of unital channels.
//!
//! Irreducibility is decided through the fixed-point algebra: for a unital
//! trace-preserving channel, sub-invariance E(p) ≤ λp of a projection forces
//! E(p) = p (trace preservation plus faithfulness of the trace), so the
//! channel is irreducible exactly when the fixed-point algebra is C·I. The
//! verdict is therefore restricted to unital TP completely positive inputs.

use num_complex::Complex;

use crate::algebra::{commutant, fixed_point_algebra, OperatorSubspace};
use crate::channel::{KrausChannel, Superoperator};
use crate::domain::{mult_domain, stabilizing_algebra};
use crate::linalg::{eigenvalues, eigh, null_space_scaled, orthonormalize, CMatrix, Tolerance};
use crate::{Error, Real, Result, C};

/// Distinct peripheral eigenvalues with orthonormal eigen-operators.
pub(crate) struct PeripheralClusterData<T> {
    pub values: Vec<C<T>>,
    pub multiplicities: Vec<usize>,
    pub right_ops: Vec<Vec<CMatrix<T>>>,
    pub warnings: Vec<String>,
}

/// Extracts eigenvalues with |λ| ≥ 1 − eig_eps, clustered, with orthonormal
/// eigen-operators per cluster from the kernels of S − λI.
///
/// A geometric multiplicity below the algebraic one means a defective
/// peripheral block, which cannot happen for unital or trace-preserving
/// positive maps; it is reported as an error naming that suspicion.
pub(crate) fn peripheral_clusters<T: Real>(
    s: &Superoperator<T>,
    tol: &Tolerance<T>,
) -> Result<PeripheralClusterData<T>> {
    let d = s.dim();
    let d2 = d * d;
    let vals = eigenvalues(s.matrix())?;
    let peripheral_cut = T::one() - tol.eig_eps;
    let grey_cut = T::one() - tol.eig_eps * T::from_f64(100.0).unwrap();
    let mut warnings = Vec::new();
    for v in &vals {
        let m = v.norm();
        if m < peripheral_cut && m > grey_cut {
            warnings.push(format!(
                "eigenvalue {v} has modulus within 100·eig_eps of the peripheral cutoff"
            ));
        }
    }
    let peripheral: Vec<C<T>> = vals.into_iter().filter(|v| v.norm() >= peripheral_cut).collect();

    // cluster in the complex plane; genuine distinct peripheral values of a
    // channel are separated by O(1), solver noise by ~1e-12
    let radius = tol.eig_eps * T::from_f64(100.0).unwrap();
    let mut clusters: Vec<(C<T>, Vec<C<T>>)> = Vec::new();
    for v in peripheral {
        match clusters.iter_mut().find(|(mean, _)| (*mean - v).norm() <= radius) {
            Some((mean, members)) => {
                members.push(v);
                let n = T::from_usize(members.len()).unwrap();
                let sum = members.iter().fold(Complex::new(T::zero(), T::zero()), |a, &b| a + b);
                *mean = sum.scale(T::one() / n);
            }
            None => clusters.push((v, vec![v])),
        }
    }

    let mut values = Vec::new();
    let mut multiplicities = Vec::new();
    let mut right_ops = Vec::new();
    for (mean, members) in clusters {
        let mut shifted = s.matrix().clone();
        for i in 0..d2 {
            shifted[(i, i)] -= mean;
        }
        let ns = null_space_scaled(&shifted, tol, T::one());
        if ns.basis.len() != members.len() {
            return Err(Error::Numeric(format!(
                "peripheral eigenvalue {mean} has geometric multiplicity {} but algebraic \
                 multiplicity {} — defective block, input is likely not a unital TP channel",
                ns.basis.len(),
                members.len()
            )));
        }
        let ops: Vec<CMatrix<T>> = ns.basis.iter().map(|v| CMatrix::unvectorize(d, v)).collect();
        // residual contract for every returned eigenpair
        for op in &ops {
            let r = (&s.apply(op) - &op.scale(mean)).hs_norm();
            if r > tol.residual_eps * T::from_usize(d2).unwrap() {
                return Err(Error::Numeric(format!(
                    "peripheral eigenpair residual {r} exceeds tolerance"
                )));
            }
        }
        values.push(mean);
        multiplicities.push(members.len());
        right_ops.push(ops);
    }
    Ok(PeripheralClusterData { values, multiplicities, right_ops, warnings })
}

/// Peripheral eigendata of a channel: unit-circle eigenvalues with their
/// unit-norm eigen-operators.
#[derive(Clone)]
pub struct PeripheralData<T> {
    /// One eigenvalue per eigenvector (repeated with multiplicity).
    pub values: Vec<C<T>>,
    /// Unit-HS-norm eigen-operators, orthonormal within each eigenvalue
    /// cluster.
    pub vectors: Vec<CMatrix<T>>,
    /// Cyclic group order, filled in by [`cyclic_group_check`].
    pub group_order: Option<usize>,
    pub warnings: Vec<String>,
}

impl<T: Real> PeripheralData<T> {
    /// Distinct eigenvalues with multiplicities.
    pub fn clusters(&self) -> Vec<(C<T>, usize)> {
        let mut out: Vec<(C<T>, usize)> = Vec::new();
        let radius = T::from_f64(1e-6).unwrap();
        for v in &self.values {
            match out.iter_mut().find(|(m, _)| (*m - *v).norm() <= radius) {
                Some((_, c)) => *c += 1,
                None => out.push((*v, 1)),
            }
        }
        out
    }
}

/// Peripheral eigenpairs of a unital TP channel.
pub fn peripheral_eigenpairs<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<PeripheralData<T>> {
    ch.require_unital_tp()?;
    peripheral_eigenpairs_of_superop(&ch.superop(), tol)
}

/// Peripheral eigenpairs without the TP precondition (used by the boundary
/// diagnostics, which accept any unital CP map).
pub fn peripheral_eigenpairs_of_superop<T: Real>(
    s: &Superoperator<T>,
    tol: &Tolerance<T>,
) -> Result<PeripheralData<T>> {
    let clusters = peripheral_clusters(s, tol)?;
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    for (idx, v) in clusters.values.iter().enumerate() {
        for op in &clusters.right_ops[idx] {
            values.push(*v);
            vectors.push(op.clone());
        }
    }
    Ok(PeripheralData { values, vectors, group_order: None, warnings: clusters.warnings })
}

/// Irreducibility verdict with a witness projection when reducible.
#[derive(Clone)]
pub struct Irreducibility<T> {
    pub irreducible: bool,
    /// A nontrivial projection fixed by the channel, when reducible.
    pub witness: Option<CMatrix<T>>,
    /// Dimension of the fixed-point algebra the verdict is based on.
    pub fixed_dim: usize,
}

/// Decides irreducibility of a unital TP channel via dim F_E = 1.
pub fn is_irreducible<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<Irreducibility<T>> {
    ch.require_unital_tp()?;
    let fixed = fixed_point_algebra(&ch.superop(), tol);
    let dim = fixed.dimension();
    if dim <= 1 {
        return Ok(Irreducibility { irreducible: true, witness: None, fixed_dim: dim });
    }
    let p = nontrivial_projection(&fixed, tol)?;
    // the witness really is fixed: E(p) = p
    let ep = ch.apply(&p)?;
    if (&ep - &p).hs_norm() > tol.residual_eps * T::from_usize(ch.dim()).unwrap() {
        return Err(Error::Consistency(
            "reducibility witness is not fixed by the channel".into(),
        ));
    }
    Ok(Irreducibility { irreducible: false, witness: Some(p), fixed_dim: dim })
}

/// Extracts a nontrivial projection from a *-closed subspace of dimension
/// > 1 by taking spectral projections of a non-scalar self-adjoint element.
pub(crate) fn nontrivial_projection<T: Real>(
    space: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Result<CMatrix<T>> {
    let d = space.dim_ambient();
    let half = T::from_f64(0.5).unwrap();
    let mut candidates: Vec<CMatrix<T>> = Vec::new();
    for b in space.basis() {
        candidates.push((b + &b.adjoint()).scale_re(half));
        candidates.push((b - &b.adjoint()).scale(Complex::new(T::zero(), -half)));
    }
    for h in candidates {
        //  skip scalar multiples of I
        let tr_part = CMatrix::identity(d).scale(h.trace().scale(T::one() / T::from_usize(d).unwrap()));
        if (&h - &tr_part).hs_norm() <= tol.residual_eps {
            continue;
        }
        let (vals, vecs) = eigh(&h)?;
        // spectral projection onto the top eigenvalue cluster
        let split = (vals[0] - vals[vals.len() - 1]) * T::from_f64(0.5).unwrap();
        let mut p = CMatrix::zeros(d, d);
        let mut count = 0;
        for (k, &v) in vals.iter().enumerate() {
            if v > vals[vals.len() - 1] + split {
                let col = vecs.col(k);
                p = &p + &CMatrix::outer(&col, &col);
                count += 1;
            }
        }
        if count == 0 || count == d {
            continue;
        }
        if space.contains(&p, tol) {
            return Ok(p);
        }
    }
    Err(Error::Numeric(
        "no nontrivial projection found in the subspace (is it an algebra?)".into(),
    ))
}

/// Primitivity: irreducible with trivial peripheral spectrum; cross-checked
/// against dim M_{E^∞} = 1.
pub fn is_primitive<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<bool> {
    let irr = is_irreducible(ch, tol)?;
    let pd = peripheral_eigenpairs(ch, tol)?;
    let trivial_peripheral = pd.values.len() == 1
        && (pd.values[0] - Complex::new(T::one(), T::zero())).norm() <= tol.eig_eps;
    let spectral_verdict = irr.irreducible && trivial_peripheral;
    let stab = stabilizing_algebra(ch, tol)?;
    let algebraic_verdict = stab.dimension() == 1;
    if spectral_verdict != algebraic_verdict {
        return Err(Error::Consistency(format!(
            "primitivity criteria disagree: spectral says {spectral_verdict} \
             (irreducible {}, peripheral count {}), M_{{E^∞}} has dimension {}",
            irr.irreducible,
            pd.values.len(),
            stab.dimension()
        )));
    }
    Ok(spectral_verdict)
}

/// Result of matching the peripheral eigenvalues of an irreducible channel
/// against the cyclic group exp(2πi·Z_m).
#[derive(Debug, Clone)]
pub struct CyclicGroupReport<T> {
    pub order: usize,
    pub max_angle_deviation: T,
    /// Worst ‖u*u − I/d·tr(u*u)‖ over peripheral eigenvectors (each must be
    /// a scalar multiple of a unitary).
    pub unitary_defect: T,
    pub ok: bool,
}

/// Verifies the cyclic-group structure of the peripheral spectrum of an
/// irreducible channel and the unitarity of its eigenvectors.
pub fn cyclic_group_check<T: Real>(
    pd: &PeripheralData<T>,
    tol: &Tolerance<T>,
) -> Result<CyclicGroupReport<T>> {
    let clusters = pd.clusters();
    if clusters.iter().any(|&(_, m)| m != 1) {
        return Err(Error::Precondition(
            "peripheral eigenvalues are not simple; input is not an irreducible channel".into(),
        ));
    }
    let m = clusters.len();
    let two_pi = T::from_f64(2.0 * std::f64::consts::PI).unwrap();
    // sort angles and match against 2πk/m
    let mut angles: Vec<T> = clusters
        .iter()
        .map(|(v, _)| {
            let a = v.im.atan2(v.re);
            if a < T::zero() {
                a + two_pi
            } else {
                a
            }
        })
        .collect();
    angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut max_dev = T::zero();
    for (k, &a) in angles.iter().enumerate() {
        let target = two_pi * T::from_usize(k).unwrap() / T::from_usize(m).unwrap();
        let dev = (a - target).abs();
        let circular = dev.min(two_pi - dev);
        max_dev = max_dev.max(circular);
    }
    let mut unitary_defect = T::zero();
    for u in &pd.vectors {
        let d = u.rows();
        let w = &u.adjoint() * u;
        let scale = w.trace().re / T::from_usize(d).unwrap();
        let dev = (&w - &CMatrix::identity(d).scale_re(scale)).hs_norm();
        unitary_defect = unitary_defect.max(dev);
    }
    let angle_tol = tol.eig_eps * T::from_f64(100.0).unwrap();
    let unit_tol = tol.residual_eps * T::from_f64(100.0).unwrap();
    Ok(CyclicGroupReport {
        order: m,
        max_angle_deviation: max_dev,
        unitary_defect,
        ok: max_dev <= angle_tol && unitary_defect <= unit_tol,
    })
}

/// Primitivity of a commuting composition: if either factor of a commuting
/// pair is primitive, the composition must be.
pub fn compose_primitivity<T: Real>(
    phi: &KrausChannel<T>,
    psi: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<(bool, bool, bool)> {
    phi.require_unital_tp()?;
    psi.require_unital_tp()?;
    let sp = phi.superop();
    let sq = psi.superop();
    let comm = (&(sp.matrix() * sq.matrix()) - &(sq.matrix() * sp.matrix())).hs_norm();
    if comm > tol.residual_eps * T::from_usize(phi.dim()).unwrap() {
        return Err(Error::Precondition(format!(
            "channels do not commute: ‖S_φS_ψ − S_ψS_φ‖ = {comm}"
        )));
    }
    let composed = KrausChannel::compose(phi, psi, tol)?.pruned(tol)?;
    let p_phi = is_primitive(phi, tol)?;
    let p_psi = is_primitive(psi, tol)?;
    let p_comp = is_primitive(&composed, tol)?;
    if (p_phi || p_psi) && !p_comp {
        return Err(Error::Consistency(
            "composition of a commuting pair with a primitive factor is not primitive".into(),
        ));
    }
    Ok((p_phi, p_psi, p_comp))
}

/// The normalised mixture ½(E + E²) as a channel.
pub fn half_e_plus_e2<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<KrausChannel<T>> {
    let e2 = ch.power(2, tol)?;
    ch.mix(&e2, T::from_f64(0.5).unwrap(), tol)?.pruned(tol)
}

/// Equivalence "E irreducible ⟺ ½(E + E²) primitive". The ½ keeps the
/// mixture trace preserving; rescaling a map by a positive constant rescales
/// every eigenvalue, so primitivity of the mixture stands in for the
/// unnormalised sum.
pub fn one_plus_e_primitivity<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<(bool, bool)> {
    let irr = is_irreducible(ch, tol)?.irreducible;
    let mixture = half_e_plus_e2(ch, tol)?;
    let prim = is_primitive(&mixture, tol)?;
    if irr != prim {
        return Err(Error::Consistency(format!(
            "irreducibility of E ({irr}) must match primitivity of ½(E+E²) ({prim})"
        )));
    }
    Ok((irr, prim))
}

/// Outcome of the projection/unitary obstruction test: E*∘E is irreducible
/// exactly when no projection p < 1 maps to a unitary conjugate of itself.
#[derive(Clone)]
pub struct ObstructionReport<T> {
    /// Whether E*∘E is irreducible (trivial multiplicative domain).
    pub ee_irreducible: bool,
    /// When reducible: p ∈ M_E with E(p) a projection of the same rank.
    pub witness: Option<(CMatrix<T>, CMatrix<T>)>,
}

pub fn projection_unitary_obstruction<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<ObstructionReport<T>> {
    let m = mult_domain(ch, tol)?;
    if m.dimension() == 1 {
        return Ok(ObstructionReport { ee_irreducible: true, witness: None });
    }
    let p = nontrivial_projection(&m, tol)?;
    let ep = ch.apply(&p)?;
    let proj_defect = (&(&ep * &ep) - &ep).hs_norm();
    let d = ch.dim();
    if proj_defect > tol.residual_eps * T::from_usize(d).unwrap() {
        return Err(Error::Consistency(format!(
            "E(p) for p in the multiplicative domain failed to be a projection \
             (defect {proj_defect})"
        )));
    }
    let rank_diff = (ep.trace().re - p.trace().re).abs();
    if rank_diff > tol.residual_eps * T::from_usize(d).unwrap() {
        return Err(Error::Consistency(
            "E(p) has a different rank than p despite trace preservation".into(),
        ));
    }
    Ok(ObstructionReport { ee_irreducible: false, witness: Some((p, ep)) })
}

/// Operator irreducibility: no nontrivial projection commutes with a.
pub fn is_irreducible_operator<T: Real>(a: &CMatrix<T>, tol: &Tolerance<T>) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::Shape("is_irreducible_operator needs a square matrix".into()));
    }
    if a.rows() == 1 {
        return Ok(true);
    }
    let c = commutant(a.rows(), std::slice::from_ref(a), tol)?;
    Ok(c.dimension() == 1)
}

/// Report of the boundary-type diagnostics for a unital CP map.
#[derive(Debug, Clone)]
pub struct BoundaryReport<T> {
    /// An irreducible operator was found among the fixed points.
    pub fixed_irreducible: bool,
    /// ‖S − I‖ when the fixed-irreducible hypothesis held.
    pub identity_residual: Option<T>,
    /// An irreducible operator was found among the peripheral eigen-operators.
    pub peripheral_irreducible: bool,
    /// dim span(N_E), checked against d² when the hypothesis held.
    pub peripheral_span_dim: usize,
    /// Whether every applicable conclusion verified.
    pub verified: bool,
    /// No hypothesis applied (report is vacuous).
    pub applicable: bool,
}

/// Boundary-theorem diagnostics: an irreducible fixed point forces the map
/// to be the identity; an irreducible peripheral eigen-operator forces the
/// peripheral eigen-operators to span all of M_d.
pub fn boundary_checks<T: Real>(
    ch: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<BoundaryReport<T>> {
    ch.require_unital()?;
    let s = ch.superop();
    let d = ch.dim();
    let fixed = fixed_point_algebra(&s, tol);
    let fixed_irreducible = search_irreducible(fixed.basis(), tol)?;
    let identity_residual = if fixed_irreducible {
        Some((s.matrix() - &CMatrix::identity(d * d)).hs_norm())
    } else {
        None
    };

    let pd = peripheral_eigenpairs_of_superop(&s, tol)?;
    let peripheral_irreducible = search_irreducible(&pd.vectors, tol)?;
    let (span, _) = orthonormalize(&pd.vectors, tol)?;
    let peripheral_span_dim = span.len();

    let mut verified = true;
    let mut applicable = false;
    if fixed_irreducible {
        applicable = true;
        verified &= identity_residual.unwrap() <= tol.residual_eps * T::from_usize(d * d).unwrap();
    }
    if peripheral_irreducible {
        applicable = true;
        verified &= peripheral_span_dim == d * d;
    }
    Ok(BoundaryReport {
        fixed_irreducible,
        identity_residual,
        peripheral_irreducible,
        peripheral_span_dim,
        verified,
        applicable,
    })
}

/// Looks for an irreducible operator among the given elements and a few
/// deterministic random combinations of them.
fn search_irreducible<T: Real>(ops: &[CMatrix<T>], tol: &Tolerance<T>) -> Result<bool> {
    if ops.is_empty() {
        return Ok(false);
    }
    for op in ops {
        if is_irreducible_operator(op, tol)? {
            return Ok(true);
        }
    }
    let d = ops[0].rows();
    let mut stream = 0x0b5e_55ed_u64;
    for _ in 0..8 {
        let mut combo = CMatrix::zeros(d, d);
        for op in ops {
            let re = crate::algebra::rand_real::<T>(&mut stream);
            let im = crate::algebra::rand_real::<T>(&mut stream);
            combo = &combo + &op.scale(Complex::new(re, im));
        }
        if is_irreducible_operator(&combo, tol)? {
            return Ok(true);
        }
    }
    Ok(false)
}
