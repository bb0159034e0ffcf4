//! Full-channel analysis orchestration and the regression table over the
//! named example families.
//!
//! [`analyze`] runs verification → multiplicative chain → stabilising
//! algebra → peripheral spectrum → irreducibility/primitivity →
//! code-structure extraction, and flattens everything into a serialisable
//! report whose numeric claims carry their residuals. Unital maps that are
//! not trace preserving get the Stinespring-based analysis instead of the
//! chain machinery.

use serde::Serialize;

use crate::algebra::wedderburn;
use crate::builders::ChannelSpec;
use crate::channel::KrausChannel;
use crate::domain::{mult_chain, stabilizing_algebra, verify_automorphism};
use crate::linalg::Tolerance;
use crate::qec::{ucc_codes, ucs_vs_uns, uns_codes};
use crate::spectral::{cyclic_group_check, is_irreducible, is_primitive, peripheral_eigenpairs};
use crate::ucp::mult_domain_ucp;
use crate::{Error, Real, Result};

/// Default cap on the system dimension (superoperators ≤ 1024×1024).
pub const DEFAULT_DIM_CAP: usize = 32;

#[derive(Debug, Clone, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum InputEcho {
    Spec(ChannelSpec),
    Kraus { dim: usize, count: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct ToleranceEcho {
    pub rank_eps: f64,
    pub eig_eps: f64,
    pub residual_eps: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FlagsReport {
    pub cp: bool,
    pub tp: bool,
    pub unital: bool,
    pub tp_residual: f64,
    pub unital_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ChainReport {
    /// Dimensions of M_{E¹} … M_{E^κ} (the stabilised value is dims[κ−1]).
    pub dims: Vec<usize>,
    pub kappa: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct AutomorphismResiduals {
    pub invariance: f64,
    pub left_inverse: f64,
    pub right_inverse: f64,
    pub multiplicativity: f64,
    pub restricted_unitarity: f64,
    pub threshold: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeripheralEigenvalueReport {
    pub re: f64,
    pub im: f64,
    pub multiplicity: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PeripheralReport {
    pub eigenvalues: Vec<PeripheralEigenvalueReport>,
    /// Peripheral cutoff used: |λ| ≥ 1 − eig_eps.
    pub cutoff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerdictsReport {
    pub irreducible: bool,
    pub primitive: bool,
    pub normal: bool,
    pub normality_residual: f64,
    pub fixed_point_dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cyclic_group_order: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct QecReport {
    pub ucc_blocks: Vec<(usize, usize)>,
    pub uns_blocks: Vec<(usize, usize)>,
    /// M_E = M_{E^∞}, equivalent to κ = 1.
    pub ucc_equals_uns: bool,
    pub nontrivial_uns_code: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UcpReport {
    pub mult_domain_dim: usize,
    pub blocks: Vec<(usize, usize)>,
}

/// Flattened analysis output; `chain`, `verdicts` and `qec` are present for
/// unital TP channels, `ucp` for unital channels that are not TP.
#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub input: InputEcho,
    pub dim: usize,
    pub kraus_count: usize,
    pub tolerances: ToleranceEcho,
    pub flags: FlagsReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<ChainReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mult_domain_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilizing_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<AutomorphismResiduals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub peripheral: Option<PeripheralReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdicts: Option<VerdictsReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qec: Option<QecReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ucp: Option<UcpReport>,
    pub warnings: Vec<String>,
}

fn f<T: Real>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}

/// Runs the full analysis pipeline on a channel.
pub fn analyze<T: Real>(
    ch: &KrausChannel<T>,
    input: InputEcho,
    tol: &Tolerance<T>,
) -> Result<AnalysisReport> {
    if ch.dim() > DEFAULT_DIM_CAP {
        return Err(Error::Precondition(format!(
            "dimension {} exceeds the cap {DEFAULT_DIM_CAP}",
            ch.dim()
        )));
    }
    let flags = ch.flags();
    let report_flags = FlagsReport {
        cp: flags.cp,
        tp: flags.tp,
        unital: flags.unital,
        tp_residual: f(flags.tp_residual),
        unital_residual: f(flags.unital_residual),
    };
    let tolerances = ToleranceEcho {
        rank_eps: f(tol.rank_eps),
        eig_eps: f(tol.eig_eps),
        residual_eps: f(tol.residual_eps),
    };
    let mut report = AnalysisReport {
        input,
        dim: ch.dim(),
        kraus_count: ch.kraus().len(),
        tolerances,
        flags: report_flags,
        chain: None,
        mult_domain_dim: None,
        stabilizing_dim: None,
        automorphism: None,
        peripheral: None,
        verdicts: None,
        qec: None,
        ucp: None,
        warnings: Vec::new(),
    };
    if !flags.unital {
        return Err(Error::Precondition(format!(
            "analysis requires a unital map: ‖Σ aa* − I‖ = {}",
            flags.unital_residual
        )));
    }

    if !flags.tp {
        // Heisenberg-picture analysis only
        let domain = mult_domain_ucp(ch, tol)?;
        let structure = wedderburn(&domain, tol)?;
        report.warnings.extend(domain.warnings().iter().cloned());
        report.mult_domain_dim = Some(domain.dimension());
        report.ucp = Some(UcpReport {
            mult_domain_dim: domain.dimension(),
            blocks: structure.blocks,
        });
        return Ok(report);
    }

    let chain = mult_chain(ch, None, tol)?;
    report.warnings.extend(chain.warnings.iter().cloned());
    report.chain = Some(ChainReport {
        dims: chain.reported_dims().to_vec(),
        kappa: chain.kappa,
    });
    report.mult_domain_dim = Some(chain.dims[0]);

    let stab = stabilizing_algebra(ch, tol)?;
    report.stabilizing_dim = Some(stab.dimension());
    let auto = verify_automorphism(ch, &stab, tol)?;
    report.automorphism = Some(AutomorphismResiduals {
        invariance: f(auto.invariance),
        left_inverse: f(auto.left_inverse),
        right_inverse: f(auto.right_inverse),
        multiplicativity: f(auto.multiplicativity),
        restricted_unitarity: f(auto.restricted_unitarity),
        threshold: f(auto.threshold),
        passed: auto.passed(),
    });
    if !auto.passed() {
        return Err(Error::Consistency(format!(
            "automorphism verification failed on {}",
            auto.failed_check().unwrap_or("unknown check")
        )));
    }

    let pd = peripheral_eigenpairs(ch, tol)?;
    report.warnings.extend(pd.warnings.iter().cloned());
    report.peripheral = Some(PeripheralReport {
        eigenvalues: pd
            .clusters()
            .iter()
            .map(|&(v, m)| PeripheralEigenvalueReport { re: f(v.re), im: f(v.im), multiplicity: m })
            .collect(),
        cutoff: 1.0 - f(tol.eig_eps),
    });

    let irr = is_irreducible(ch, tol)?;
    let primitive = is_primitive(ch, tol)?;
    let normality = ch.superop().normality_residual();
    let cyclic_group_order = if irr.irreducible {
        Some(cyclic_group_check(&pd, tol)?.order)
    } else {
        None
    };
    report.verdicts = Some(VerdictsReport {
        irreducible: irr.irreducible,
        primitive,
        normal: normality <= tol.residual_eps,
        normality_residual: f(normality),
        fixed_point_dim: irr.fixed_dim,
        cyclic_group_order,
    });

    let ucc = ucc_codes(ch, tol)?;
    let uns = uns_codes(ch, tol)?;
    let verdict = ucs_vs_uns(ch, tol)?;
    report.qec = Some(QecReport {
        ucc_blocks: ucc.structure.blocks.clone(),
        uns_blocks: uns.structure.blocks.clone(),
        ucc_equals_uns: verdict.equal,
        nontrivial_uns_code: uns.has_nontrivial_code(),
    });
    Ok(report)
}

/// One expected-vs-computed row of the example regression table.
#[derive(Debug, Clone, Serialize)]
pub struct ReproRow {
    pub name: String,
    pub expected: String,
    pub computed: String,
    pub pass: bool,
}

/// Deterministic probability vector for seeded regression rows.
fn seeded_probs(k: usize, seed: u64) -> Vec<f64> {
    let mut stream = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1);
    let mut out: Vec<f64> = (0..k)
        .map(|_| {
            stream = stream.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = stream;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            ((z >> 11) as f64 / (1u64 << 53) as f64) + 0.05
        })
        .collect();
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    out
}

/// Runs the regression table over every documented example expectation.
/// `filter` keeps only rows whose name contains the given substring.
pub fn reproduce(filter: Option<&str>, tol: &Tolerance<f64>) -> Vec<ReproRow> {
    let mut rows: Vec<ReproRow> = Vec::new();
    let mut push = |name: String, expected: String, outcome: Result<(String, bool)>| {
        if let Some(f) = filter {
            if !name.contains(f) {
                return;
            }
        }
        let (computed, pass) = match outcome {
            Ok((c, p)) => (c, p),
            Err(e) => (format!("error: {e}"), false),
        };
        rows.push(ReproRow { name, expected, computed, pass });
    };

    fourier_rows(&mut push, tol);
    kappa3_rows(&mut push, tol);
    unitary_rows(&mut push, tol);
    mixture_rows(&mut push, tol);
    path_rows(&mut push, tol);
    counterexample_rows(&mut push, tol);
    qec_rows(&mut push, tol);
    density_rows(&mut push, tol);
    primitivity_rows(&mut push, tol);
    rows
}

type Push<'a> = &'a mut dyn FnMut(String, String, Result<(String, bool)>);

fn fourier_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::builders::fourier_example;
    use crate::channel::Superoperator;

    for d in 2..=6usize {
        push(
            format!("fourier{d}/square_is_depolarizing"),
            "residual <= 1e-9".into(),
            (|| {
                let ch = fourier_example::<f64>(d, tol)?;
                let r = (ch.superop().pow(2).matrix() - Superoperator::depolarizing(d).matrix())
                    .hs_norm();
                Ok((format!("residual {r:.3e}"), r <= 1e-9))
            })(),
        );
    }
    for d in 2..=4usize {
        push(
            format!("fourier{d}/chain"),
            format!("dims [{d}, 1], kappa 2"),
            (|| {
                let ch = fourier_example::<f64>(d, tol)?;
                let chain = mult_chain(&ch, None, tol)?;
                let ok = chain.kappa == 2 && chain.reported_dims() == [d, 1];
                Ok((
                    format!("dims {:?}, kappa {}", chain.reported_dims(), chain.kappa),
                    ok,
                ))
            })(),
        );
    }
    push(
        "fourier3/mult_domain_is_diagonal".into(),
        "dim 3, contains diag units".into(),
        (|| {
            let ch = fourier_example::<f64>(3, tol)?;
            let m = crate::domain::mult_domain(&ch, tol)?;
            let mut ok = m.dimension() == 3;
            for i in 0..3 {
                let mut e = crate::linalg::CMatrix::<f64>::zeros(3, 3);
                e[(i, i)] = num_complex::Complex::new(1.0, 0.0);
                ok &= m.contains(&e, tol);
            }
            Ok((format!("dim {}", m.dimension()), ok))
        })(),
    );
    push(
        "fourier3/estar_e_fixed_points_diagonal".into(),
        "fixed algebra of E*∘E = diagonals".into(),
        (|| {
            let ch = fourier_example::<f64>(3, tol)?;
            let ee = KrausChannel::compose(&ch.adjoint_channel(tol), &ch, tol)?;
            let fixed = crate::algebra::fixed_point_algebra(&ee.superop(), tol);
            let mut diag = Vec::new();
            for i in 0..3 {
                let mut e = crate::linalg::CMatrix::<f64>::zeros(3, 3);
                e[(i, i)] = num_complex::Complex::new(1.0, 0.0);
                diag.push(e);
            }
            let expect = crate::algebra::OperatorSubspace::from_span(3, &diag, tol)?;
            Ok((format!("dim {}", fixed.dimension()), fixed.equals(&expect, tol)))
        })(),
    );
    push(
        "fourier3/primitive".into(),
        "irreducible and primitive".into(),
        (|| {
            let ch = fourier_example::<f64>(3, tol)?;
            let irr = is_irreducible(&ch, tol)?.irreducible;
            let prim = is_primitive(&ch, tol)?;
            Ok((format!("irreducible {irr}, primitive {prim}"), irr && prim))
        })(),
    );
}

fn kappa3_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::builders::kappa3_example;
    use crate::linalg::CMatrix;

    push(
        "kappa3/chain".into(),
        "dims [3, 2, 1], kappa 3".into(),
        (|| {
            let ch = kappa3_example::<f64>(tol)?;
            let chain = mult_chain(&ch, None, tol)?;
            let ok = chain.kappa == 3 && chain.reported_dims() == [3, 2, 1];
            Ok((
                format!("dims {:?}, kappa {}", chain.reported_dims(), chain.kappa),
                ok,
            ))
        })(),
    );
    push(
        "kappa3/m_e2_span".into(),
        "span{diag(0,1,1), diag(1,0,0)}, residual <= 1e-8".into(),
        (|| {
            let ch = kappa3_example::<f64>(tol)?;
            let chain = mult_chain(&ch, None, tol)?;
            let m2 = &chain.chain[1];
            let gens = [
                CMatrix::from_real(3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
                CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
            ];
            let expect = crate::algebra::OperatorSubspace::from_span(3, &gens, tol)?;
            let residual = m2.equality_residual(&expect).max(expect.equality_residual(m2));
            Ok((
                format!("dim {}, residual {residual:.3e}", m2.dimension()),
                m2.equals(&expect, tol) && residual <= 1e-8,
            ))
        })(),
    );
    push(
        "kappa3/e_of_p".into(),
        "E(diag(0,0,1)) = [[.5,.5,0],[.5,.5,0],[0,0,0]] within 1e-12".into(),
        (|| {
            let ch = kappa3_example::<f64>(tol)?;
            let mut p = CMatrix::<f64>::zeros(3, 3);
            p[(2, 2)] = num_complex::Complex::new(1.0, 0.0);
            let ep = ch.apply(&p)?;
            let expect =
                CMatrix::from_real(3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
            let dev = (&ep - &expect).max_abs();
            Ok((format!("max entry deviation {dev:.3e}"), dev <= 1e-12))
        })(),
    );
    push(
        "kappa3/estar_e_diagonal_compression".into(),
        "E*∘E acts as x ↦ Σ e_j e_j* x e_j e_j*".into(),
        (|| {
            let ch = kappa3_example::<f64>(tol)?;
            let ee = KrausChannel::compose(&ch.adjoint_channel(tol), &ch, tol)?;
            let mut kraus = Vec::new();
            for j in 0..3 {
                let mut e = CMatrix::<f64>::zeros(3, 3);
                e[(j, j)] = num_complex::Complex::new(1.0, 0.0);
                kraus.push(e);
            }
            let compress = KrausChannel::new(kraus, tol)?;
            let r = (ee.superop().matrix() - compress.superop().matrix()).hs_norm();
            Ok((format!("superoperator residual {r:.3e}"), r <= 1e-9))
        })(),
    );
    push(
        "kappa3/ucs_not_uns_witness".into(),
        "projection in M_E but not M_{E²}".into(),
        (|| {
            let ch = kappa3_example::<f64>(tol)?;
            let verdict = ucs_vs_uns(&ch, tol)?;
            let chain = mult_chain(&ch, None, tol)?;
            match verdict.witness {
                Some(w) => {
                    let in_m1 = chain.chain[0].residual(&w) <= 1e-8;
                    let out_m2 = chain.chain[1].residual(&w) > 1e-3;
                    Ok((format!("witness trace {:.3}", w.trace().re), in_m1 && out_m2))
                }
                None => Ok(("no witness".into(), false)),
            }
        })(),
    );
}

fn unitary_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::builders::{haar_ish_unitary, unitary_channel};
    for (d, seed) in [(2usize, 1u64), (2, 2), (3, 3), (3, 4), (4, 5)] {
        push(
            format!("unitary_d{d}_seed{seed}/kappa_and_full_algebra"),
            format!("kappa 1, dim M_inf {}", d * d),
            (|| {
                let ch = unitary_channel(&haar_ish_unitary::<f64>(d, seed), tol)?;
                let chain = mult_chain(&ch, None, tol)?;
                let ok = chain.kappa == 1 && chain.stabilized().dimension() == d * d;
                Ok((
                    format!("kappa {}, dim {}", chain.kappa, chain.stabilized().dimension()),
                    ok,
                ))
            })(),
        );
    }
}

fn mixture_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::builders::{pauli_channel, weyl_channel};
    for i in 0..10u64 {
        push(
            format!("pauli_seed{i}/normal_kappa_one"),
            "normality <= 1e-9, kappa 1".into(),
            (|| {
                let p = seeded_probs(4, i);
                let ch = pauli_channel(&[p[0], p[1], p[2], p[3]], tol)?;
                let n = ch.superop().normality_residual();
                let chain = mult_chain(&ch, None, tol)?;
                Ok((
                    format!("normality {n:.3e}, kappa {}", chain.kappa),
                    n <= 1e-9 && chain.kappa == 1,
                ))
            })(),
        );
    }
    for i in 0..10u64 {
        push(
            format!("weyl3_seed{i}/normal_kappa_one"),
            "normality <= 1e-9, kappa 1".into(),
            (|| {
                let p = seeded_probs(9, 1000 + i);
                let ch = weyl_channel::<f64>(3, &p, tol)?;
                let n = ch.superop().normality_residual();
                let chain = mult_chain(&ch, None, tol)?;
                Ok((
                    format!("normality {n:.3e}, kappa {}", chain.kappa),
                    n <= 1e-9 && chain.kappa == 1,
                ))
            })(),
        );
    }
}

fn path_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::builders::path_channel;
    use crate::linalg::CMatrix;

    push(
        "path_t0/kappa_one".into(),
        "kappa 1, M_Φ = diagonals".into(),
        (|| {
            let ch = path_channel(0.0, tol)?;
            let chain = mult_chain(&ch, None, tol)?;
            Ok((
                format!("kappa {}, dim M {}", chain.kappa, chain.dims[0]),
                chain.kappa == 1 && chain.dims[0] == 2,
            ))
        })(),
    );
    for t in [0.1, 0.5, 1.0] {
        push(
            format!("path_t{t}/fixed_algebra_and_kappa"),
            "F(Φ_t*∘Φ_t) = diagonals (dim 2), kappa >= 2".into(),
            (|| {
                let ch = path_channel(t, tol)?;
                let ee = KrausChannel::compose(&ch.adjoint_channel(tol), &ch, tol)?;
                let fixed = crate::algebra::fixed_point_algebra(&ee.superop(), tol);
                let diag_ok = fixed.dimension() == 2
                    && fixed.contains(&CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]), tol);
                let chain = mult_chain(&ch, None, tol)?;
                Ok((
                    format!("fixed dim {}, kappa {}", fixed.dimension(), chain.kappa),
                    diag_ok && chain.kappa >= 2,
                ))
            })(),
        );
        push(
            format!("path_t{t}/displaced_projection"),
            "Φ_t(diag(1,0)) matches the rank-one formula".into(),
            (|| {
                let ch = path_channel(t, tol)?;
                let p = CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]);
                let c2 = (1.0 + t) * (1.0 + t) + t * t;
                let expect = CMatrix::from_real(
                    2,
                    &[
                        (1.0 + t) * (1.0 + t) / c2,
                        (1.0 + t) * t / c2,
                        (1.0 + t) * t / c2,
                        t * t / c2,
                    ],
                );
                let dev = (&ch.apply(&p)? - &expect).max_abs();
                Ok((format!("max deviation {dev:.3e}"), dev <= 1e-12))
            })(),
        );
    }
}

fn counterexample_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::linalg::CMatrix;
    use crate::ucp::counterexample_phi;

    push(
        "counterexample/unital_not_tp".into(),
        "unital true, tp false".into(),
        (|| {
            let phi = counterexample_phi::<f64>(tol)?;
            let fl = phi.flags();
            Ok((
                format!("unital {}, tp {}", fl.unital, fl.tp),
                fl.unital && !fl.tp,
            ))
        })(),
    );
    push(
        "counterexample/action_formula".into(),
        "Φ(x) = diag(x11, x22, (x11+x22)/2)".into(),
        (|| {
            let phi = counterexample_phi::<f64>(tol)?;
            let mut x = CMatrix::<f64>::zeros(3, 3);
            for i in 0..3 {
                for j in 0..3 {
                    x[(i, j)] = num_complex::Complex::new(
                        (1 + i * 3 + j) as f64 / 10.0,
                        ((i + 2 * j) as f64) / 7.0,
                    );
                }
            }
            let out = phi.apply(&x)?;
            let mut expect = CMatrix::<f64>::zeros(3, 3);
            expect[(0, 0)] = x[(0, 0)];
            expect[(1, 1)] = x[(1, 1)];
            expect[(2, 2)] = (x[(0, 0)] + x[(1, 1)]).scale(0.5);
            let dev = (&out - &expect).max_abs();
            Ok((format!("max deviation {dev:.3e}"), dev <= 1e-12))
        })(),
    );
    push(
        "counterexample/a_in_mult_domain".into(),
        "diag(1,1,0) ∈ M_Φ via the Stinespring route".into(),
        (|| {
            let phi = counterexample_phi::<f64>(tol)?;
            let m = mult_domain_ucp(&phi, tol)?;
            let a = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
            let r = m.residual(&a);
            Ok((format!("residual {r:.3e}, dim {}", m.dimension()), r <= 1e-8))
        })(),
    );
    push(
        "counterexample/commutant_violation".into(),
        "‖a·k₃ − k₃·a‖ >= 0.1".into(),
        (|| {
            let phi = counterexample_phi::<f64>(tol)?;
            let a = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
            let k3 = &phi.kraus()[2];
            let v = (&(&a * k3) - &(k3 * &a)).hs_norm();
            Ok((format!("violation {v:.3}"), v >= 0.1))
        })(),
    );
    push(
        "counterexample/phi_of_a_is_identity".into(),
        "Φ(diag(1,1,0)) = I".into(),
        (|| {
            let phi = counterexample_phi::<f64>(tol)?;
            let a = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
            let dev = (&phi.apply(&a)? - &CMatrix::identity(3)).hs_norm();
            Ok((format!("deviation {dev:.3e}"), dev <= 1e-12))
        })(),
    );
}

fn qec_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::builders::{haar_ish_unitary, pauli_channel, unitary_channel};
    push(
        "pauli/ucc_equals_uns".into(),
        "UCC algebra = UNS algebra (kappa 1)".into(),
        (|| {
            let ch = pauli_channel(&[0.4, 0.3, 0.2, 0.1], tol)?;
            let ucc = ucc_codes(&ch, tol)?;
            let uns = uns_codes(&ch, tol)?;
            Ok((
                format!("ucc dim {}, uns dim {}", ucc.algebra.dimension(), uns.algebra.dimension()),
                ucc.algebra.equals(&uns.algebra, tol),
            ))
        })(),
    );
    push(
        "unitary/whole_space_correctable".into(),
        "single block (d, 1)".into(),
        (|| {
            let ch = unitary_channel(&haar_ish_unitary::<f64>(3, 11), tol)?;
            let ucc = ucc_codes(&ch, tol)?;
            Ok((
                format!("blocks {:?}", ucc.structure.blocks),
                ucc.structure.blocks == vec![(3, 1)],
            ))
        })(),
    );
    push(
        "recovery/adjoint_equality".into(),
        "F_{E*∘E} = M_E".into(),
        (|| {
            let ch = crate::builders::fourier_example::<f64>(3, tol)?;
            let rep = crate::qec::unital_recovery_check(&ch, &ch.adjoint_channel(tol), tol)?;
            Ok((
                format!("fixed dim {}, domain dim {}", rep.fixed_dim, rep.domain_dim),
                rep.equal,
            ))
        })(),
    );
}

fn density_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::ucp::{density_perturbation, mult_domain_ucp as ucp_domain};
    push(
        "density/identity_n2_trivial_domain".into(),
        "M_E = C·I".into(),
        (|| {
            let e = density_perturbation(&KrausChannel::<f64>::identity(2), 2, tol)?;
            let m = ucp_domain(&e, tol)?;
            Ok((format!("dim {}", m.dimension()), m.dimension() == 1))
        })(),
    );
    push(
        "density/projective_n3_domain_drop".into(),
        "dim 2 → dim 1".into(),
        (|| {
            let proj = crate::builders::projective_channel::<f64>(tol)?;
            let before = ucp_domain(&proj, tol)?.dimension();
            let after = ucp_domain(&density_perturbation(&proj, 3, tol)?, tol)?.dimension();
            Ok((format!("dim {before} → {after}"), before == 2 && after == 1))
        })(),
    );
}

fn primitivity_rows(push: Push<'_>, tol: &Tolerance<f64>) {
    use crate::spectral::one_plus_e_primitivity;
    push(
        "projective/e_plus_e2_not_primitive".into(),
        "reducible ⟹ mixture not primitive".into(),
        (|| {
            let ch = crate::builders::projective_channel::<f64>(tol)?;
            let (irr, prim) = one_plus_e_primitivity(&ch, tol)?;
            Ok((format!("irreducible {irr}, primitive {prim}"), !irr && !prim))
        })(),
    );
    push(
        "fourier3/e_plus_e2_primitive".into(),
        "irreducible ⟹ mixture primitive".into(),
        (|| {
            let ch = crate::builders::fourier_example::<f64>(3, tol)?;
            let (irr, prim) = one_plus_e_primitivity(&ch, tol)?;
            Ok((format!("irreducible {irr}, primitive {prim}"), irr && prim))
        })(),
    );
}
