//! Error-correction structure of unital channels.
//!
//! Unitarily correctable codes are exactly the Wedderburn blocks of the
//! multiplicative domain M_E; unitarily noiseless subsystems are those of
//! the stabilising algebra M_{E^∞}. The two coincide precisely when the
//! multiplicative index is 1. A unital recovery map can never enlarge the
//! correctable set: F_{R∘E} ⊆ M_E for every unital channel R, with
//! equality at R = E*.

use crate::algebra::{fixed_point_algebra, intersect, wedderburn, OperatorSubspace, StarAlgebraStructure};
use crate::channel::{KrausChannel, Superoperator};
use crate::domain::{mult_chain, mult_domain, mult_domain_at, stabilizing_algebra};
use crate::linalg::{CMatrix, Tolerance};
use crate::spectral::nontrivial_projection;
use crate::{Error, Real, Result};

/// Which algebra a code structure was extracted from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CodeKind {
    /// Unitarily correctable codes — multiplicative domain.
    Ucc,
    /// Unitarily noiseless subsystems — stabilising algebra.
    Uns,
    /// Noiseless subsystems — fixed-point algebra.
    Ns,
}

/// One subsystem record from a Wedderburn block M_{n}⊗I_{m}.
#[derive(Debug, Clone, Copy)]
pub struct SubsystemCode {
    /// Dimension of the protected factor.
    pub code_dim: usize,
    /// Multiplicity of the block.
    pub multiplicity: usize,
    /// A protected subsystem is nontrivial when it is larger than a scalar.
    pub nontrivial: bool,
}

/// Code structure extracted from an algebra: the algebra itself, its
/// Wedderburn decomposition, and the per-block subsystem records.
#[derive(Clone)]
pub struct CodeStructure<T> {
    pub algebra: OperatorSubspace<T>,
    pub structure: StarAlgebraStructure<T>,
    pub codes: Vec<SubsystemCode>,
    pub kind: CodeKind,
}

impl<T: Real> CodeStructure<T> {
    fn from_algebra(algebra: OperatorSubspace<T>, kind: CodeKind, tol: &Tolerance<T>) -> Result<Self> {
        let structure = wedderburn(&algebra, tol)?;
        let codes = structure
            .blocks
            .iter()
            .map(|&(n, m)| SubsystemCode {
                code_dim: n,
                multiplicity: m,
                nontrivial: n > 1,
            })
            .collect();
        Ok(Self { algebra, structure, codes, kind })
    }

    pub fn has_nontrivial_code(&self) -> bool {
        self.codes.iter().any(|c| c.nontrivial)
    }
}

/// Unitarily correctable code structure: Wedderburn data of M_E.
pub fn ucc_codes<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<CodeStructure<T>> {
    let algebra = mult_domain(ch, tol)?;
    CodeStructure::from_algebra(algebra, CodeKind::Ucc, tol)
}

/// Unitarily noiseless subsystem structure: Wedderburn data of M_{E^∞},
/// independently verified against ⋂_{n ≤ κ} F_{(E*)ⁿ∘Eⁿ}.
pub fn uns_codes<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<CodeStructure<T>> {
    let chain = mult_chain(ch, None, tol)?;
    let algebra = stabilizing_algebra(ch, tol)?;
    let mut meet: Option<OperatorSubspace<T>> = None;
    for n in 1..=chain.kappa {
        let f_n = mult_domain_at(ch, n, tol)?;
        meet = Some(match meet {
            None => f_n,
            Some(acc) => intersect(&acc, &f_n, tol)?,
        });
    }
    let meet = meet.expect("kappa ≥ 1");
    if !meet.equals(&algebra, tol) {
        return Err(Error::Consistency(format!(
            "UNS algebra (dim {}) disagrees with ⋂ F_{{(E*)ⁿEⁿ}} (dim {})",
            algebra.dimension(),
            meet.dimension()
        )));
    }
    CodeStructure::from_algebra(algebra, CodeKind::Uns, tol)
}

/// Fixed-point (noiseless-subsystem) structure of a unital channel.
pub fn ns_codes<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<CodeStructure<T>> {
    ch.require_unital_tp()?;
    let algebra = fixed_point_algebra(&ch.superop(), tol);
    CodeStructure::from_algebra(algebra, CodeKind::Ns, tol)
}

/// Outcome of checking a recovery channel: fixed points of R∘E sit inside
/// the multiplicative domain of E.
#[derive(Debug, Clone)]
pub struct RecoveryReport<T> {
    pub fixed_dim: usize,
    pub domain_dim: usize,
    /// Worst residual of F_{R∘E} basis elements against M_E.
    pub containment_residual: T,
    pub contained: bool,
    /// Span equality F_{R∘E} = M_E (guaranteed for R = E*).
    pub equal: bool,
}

/// Verifies F_{R∘E} ⊆ M_E for a unital TP recovery channel R.
pub fn unital_recovery_check<T: Real>(
    ch: &KrausChannel<T>,
    recovery: &KrausChannel<T>,
    tol: &Tolerance<T>,
) -> Result<RecoveryReport<T>> {
    ch.require_unital_tp()?;
    recovery.require_unital_tp()?;
    if ch.dim() != recovery.dim() {
        return Err(Error::Shape("recovery channel has mismatched dimension".into()));
    }
    let composed = Superoperator::from_matrix(
        ch.dim(),
        recovery.superop().matrix() * ch.superop().matrix(),
    )?;
    let fixed = fixed_point_algebra(&composed, tol);
    let domain = mult_domain(ch, tol)?;
    let containment_residual = fixed
        .basis()
        .iter()
        .map(|b| domain.residual(b))
        .fold(T::zero(), |a, b| a.max(b));
    let contained = containment_residual <= tol.residual_eps * T::from_usize(ch.dim()).unwrap();
    let equal = contained && fixed.dimension() == domain.dimension();
    Ok(RecoveryReport {
        fixed_dim: fixed.dimension(),
        domain_dim: domain.dimension(),
        containment_residual,
        contained,
        equal,
    })
}

/// κ-branch comparison of UCC and UNS structure.
#[derive(Clone)]
pub struct UcsUnsVerdict<T> {
    pub kappa: usize,
    /// M_E = M_{E^∞}, exactly the κ = 1 case.
    pub equal: bool,
    /// For κ > 1: an element of M_E that is not in M_{E²} (a code
    /// correctable once but not noiseless), preferably a projection.
    pub witness: Option<CMatrix<T>>,
}

/// Checks the equivalence "every UCC is UNS ⟺ κ = 1" and produces the
/// κ > 1 witness from the proper inclusion M_{E²} ⊂ M_E.
pub fn ucs_vs_uns<T: Real>(ch: &KrausChannel<T>, tol: &Tolerance<T>) -> Result<UcsUnsVerdict<T>> {
    let chain = mult_chain(ch, None, tol)?;
    let kappa = chain.kappa;
    let m1 = &chain.chain[0];
    let stab = chain.stabilized();
    let equal = m1.equals(stab, tol);
    if (kappa == 1) != equal {
        return Err(Error::Consistency(format!(
            "κ = {kappa} but M_E = M_{{E^∞}} is {equal}"
        )));
    }
    if kappa == 1 {
        return Ok(UcsUnsVerdict { kappa, equal, witness: None });
    }
    let m2 = &chain.chain[1];
    // prefer a projection witness: spectral projections of generic
    // self-adjoint elements of M_E that fall outside M_{E²}
    let witness = projection_witness(m1, m2, tol).or_else(|| {
        let scale = T::from_usize(ch.dim()).unwrap();
        m1.basis()
            .iter()
            .map(|b| {
                let rem = b - &m2.project(b);
                (rem.hs_norm(), rem)
            })
            .filter(|(n, _)| *n > tol.residual_eps * scale)
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .map(|(n, rem)| rem.scale_re(T::one() / n))
    });
    if witness.is_none() {
        return Err(Error::Consistency(
            "κ > 1 but no element of M_E escapes M_{E²}".into(),
        ));
    }
    Ok(UcsUnsVerdict { kappa, equal, witness })
}

/// Searches the spectral projections of self-adjoint elements of `m1` for a
/// projection outside `m2`.
fn projection_witness<T: Real>(
    m1: &OperatorSubspace<T>,
    m2: &OperatorSubspace<T>,
    tol: &Tolerance<T>,
) -> Option<CMatrix<T>> {
    let d = m1.dim_ambient();
    let scale = T::from_usize(d).unwrap();
    // rank-style search: spectral projections of each self-adjointised
    // basis element
    let half = T::from_f64(0.5).unwrap();
    for b in m1.basis() {
        for h in [
            (b + &b.adjoint()).scale_re(half),
            (b - &b.adjoint()).scale(num_complex::Complex::new(T::zero(), -half)),
        ] {
            if h.hs_norm() <= tol.residual_eps {
                continue;
            }
            let Ok((vals, vecs)) = crate::linalg::eigh(&h) else {
                continue;
            };
            // group eigenvalues, build the projection of each cluster
            let mut start = 0;
            while start < vals.len() {
                let mut end = start + 1;
                while end < vals.len()
                    && (vals[end - 1] - vals[end]).abs() <= T::from_f64(1e-6).unwrap()
                {
                    end += 1;
                }
                let mut p = CMatrix::zeros(d, d);
                for k in start..end {
                    let col = vecs.col(k);
                    p = &p + &CMatrix::outer(&col, &col);
                }
                start = end;
                if !m1.contains(&p, tol) {
                    continue;
                }
                if m2.residual(&p) > tol.residual_eps * scale && p.trace().re < T::from_usize(d).unwrap() - half {
                    return Some(p);
                }
            }
        }
    }
    // last resort: any nontrivial projection of the algebra that escapes m2
    if let Ok(p) = nontrivial_projection(m1, tol) {
        if m2.residual(&p) > tol.residual_eps * scale {
            return Some(p);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::{
        fourier_example, haar_ish_unitary, kappa3_example, pauli_channel, projective_channel,
        random_unitary_mixture, unitary_channel,
    };
    fn tol() -> Tolerance<f64> {
        Tolerance::default()
    }

    #[test]
    fn fourier_ucc_three_scalar_blocks() {
        let t = tol();
        let codes = ucc_codes(&fourier_example::<f64>(3, &t).unwrap(), &t).unwrap();
        assert_eq!(codes.structure.blocks, vec![(1, 1), (1, 1), (1, 1)]);
        assert!(!codes.has_nontrivial_code());
        assert_eq!(codes.kind, CodeKind::Ucc);
    }

    #[test]
    fn unitary_channel_whole_space_correctable() {
        let t = tol();
        let ch = unitary_channel(&haar_ish_unitary::<f64>(3, 2), &t).unwrap();
        let codes = ucc_codes(&ch, &t).unwrap();
        assert_eq!(codes.structure.blocks, vec![(3, 1)]);
        assert!(codes.has_nontrivial_code());
        let uns = uns_codes(&ch, &t).unwrap();
        assert_eq!(uns.structure.blocks, vec![(3, 1)]);
    }

    #[test]
    fn projective_channel_two_scalar_blocks() {
        let t = tol();
        let codes = ucc_codes(&projective_channel::<f64>(&t).unwrap(), &t).unwrap();
        assert_eq!(codes.structure.blocks, vec![(1, 1), (1, 1)]);
    }

    #[test]
    fn kappa3_uns_is_trivial_while_ucc_is_not() {
        let t = tol();
        let ch = kappa3_example::<f64>(&t).unwrap();
        let ucc = ucc_codes(&ch, &t).unwrap();
        assert_eq!(ucc.algebra.dimension(), 3);
        let uns = uns_codes(&ch, &t).unwrap();
        assert_eq!(uns.algebra.dimension(), 1);
        // C·I inside M₃ is the single block M₁ ⊗ I₃
        assert_eq!(uns.structure.blocks, vec![(1, 3)]);
    }

    #[test]
    fn pauli_ucc_equals_uns() {
        let t = tol();
        let ch = pauli_channel(&[0.4, 0.3, 0.2, 0.1], &t).unwrap();
        let ucc = ucc_codes(&ch, &t).unwrap();
        let uns = uns_codes(&ch, &t).unwrap();
        assert!(ucc.algebra.equals(&uns.algebra, &t));
        let verdict = ucs_vs_uns(&ch, &t).unwrap();
        assert_eq!(verdict.kappa, 1);
        assert!(verdict.equal);
        assert!(verdict.witness.is_none());
    }

    #[test]
    fn kappa3_witness_is_a_projection_outside_m2() {
        let t = tol();
        let ch = kappa3_example::<f64>(&t).unwrap();
        let verdict = ucs_vs_uns(&ch, &t).unwrap();
        assert_eq!(verdict.kappa, 3);
        assert!(!verdict.equal);
        let w = verdict.witness.unwrap();
        // the witness lies in M_E
        let m1 = mult_domain(&ch, &t).unwrap();
        assert!(m1.residual(&w) < 1e-8);
        // but not in M_{E²}
        let chain = mult_chain(&ch, None, &t).unwrap();
        assert!(chain.chain[1].residual(&w) > 1e-3);
        // and it is a projection (the search prefers projections here)
        assert!((&(&w * &w) - &w).hs_norm() < 1e-8, "witness should be a projection");
    }

    #[test]
    fn fourier_witness_exists() {
        let t = tol();
        let ch = fourier_example::<f64>(3, &t).unwrap();
        let verdict = ucs_vs_uns(&ch, &t).unwrap();
        assert_eq!(verdict.kappa, 2);
        let w = verdict.witness.unwrap();
        assert!(w.hs_norm() > 0.9);
    }

    #[test]
    fn recovery_with_adjoint_gives_equality() {
        let t = tol();
        let ch = fourier_example::<f64>(3, &t).unwrap();
        let rep = unital_recovery_check(&ch, &ch.adjoint_channel(&t), &t).unwrap();
        assert!(rep.contained);
        assert!(rep.equal);
        assert_eq!(rep.fixed_dim, 3);
    }

    #[test]
    fn recovery_with_random_mixture_gives_containment() {
        let t = tol();
        let ch = kappa3_example::<f64>(&t).unwrap();
        for seed in [1u64, 2, 3] {
            let r = random_unitary_mixture::<f64>(3, 2, seed, &t);
            let rep = unital_recovery_check(&ch, &r, &t).unwrap();
            assert!(rep.contained, "containment failed at seed {seed}");
            assert!(rep.fixed_dim <= rep.domain_dim);
        }
    }

    #[test]
    fn identity_recovery_gives_fixed_points() {
        let t = tol();
        let ch = fourier_example::<f64>(3, &t).unwrap();
        let rep = unital_recovery_check(&ch, &KrausChannel::identity(3), &t).unwrap();
        assert!(rep.contained);
        // F_E = C·I here, strictly inside the diagonal algebra
        assert_eq!(rep.fixed_dim, 1);
        assert_eq!(rep.domain_dim, 3);
        assert!(!rep.equal);
    }

    #[test]
    fn ns_codes_of_projective_channel() {
        let t = tol();
        let ch = projective_channel::<f64>(&t).unwrap();
        let ns = ns_codes(&ch, &t).unwrap();
        assert_eq!(ns.kind, CodeKind::Ns);
        assert_eq!(ns.structure.blocks, vec![(1, 1), (1, 1)]);
    }

    #[test]
    fn uns_invariant_under_channel_and_adjoint() {
        let t = tol();
        let ch = fourier_example::<f64>(3, &t).unwrap();
        let uns = uns_codes(&ch, &t).unwrap();
        let adj = ch.adjoint_channel(&t);
        for b in uns.algebra.basis() {
            assert!(uns.algebra.residual(&ch.apply(b).unwrap()) < 1e-8);
            assert!(uns.algebra.residual(&adj.apply(b).unwrap()) < 1e-8);
        }
    }

    #[test]
    fn witness_projection_is_genuinely_rank_one_diag_for_kappa3() {
        let t = tol();
        let ch = kappa3_example::<f64>(&t).unwrap();
        let verdict = ucs_vs_uns(&ch, &t).unwrap();
        let w = verdict.witness.unwrap();
        // diag(0,0,1) and diag(0,1,0) both work; the witness must be
        // diagonal with integer trace
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert!(w[(i, j)].norm() < 1e-8);
                }
            }
        }
        let trace = w.trace().re;
        assert!((trace - trace.round()).abs() < 1e-8);
    }
}
