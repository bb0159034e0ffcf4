//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! per sub-check. Thresholds are pinned in the assertions.

use std::time::Instant;

use multdom::algebra::{fixed_point_algebra, generated_algebra, wedderburn, OperatorSubspace};
use multdom::builders::{
    fourier_example, haar_ish_unitary, kappa3_example, path_channel, pauli_channel,
    projective_channel, random_unital_cp, random_unitary_mixture, unitary_channel, weyl_channel,
};
use multdom::channel::{KrausChannel, Superoperator};
use multdom::domain::{complement_decay, mult_chain, mult_domain, stabilizing_algebra, verify_automorphism};
use multdom::linalg::{CMatrix, Tolerance};
use multdom::qec::{ucs_vs_uns, unital_recovery_check};
use multdom::spectral::{
    cyclic_group_check, is_irreducible, is_primitive, one_plus_e_primitivity,
    peripheral_eigenpairs,
};
use multdom::ucp::{density_cb_bound, density_perturbation, mult_domain_ucp, superop_distance};
use num_complex::Complex;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn check(name: &str, ok: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} ({detail})",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "{name} failed: {detail}");
}

/// The seeded population shared by criteria 2–4 and 7: 50 random
/// unital TP channels with d in {2,3,4}.
fn population() -> Vec<(String, KrausChannel<f64>)> {
    let t = tol();
    let mut out = Vec::new();
    for i in 0..50u64 {
        let d = [2, 3, 4][(i % 3) as usize];
        let k = [1, 2, 3, 4][(i % 4) as usize];
        let ch = random_unitary_mixture::<f64>(d, k, 1000 + i, &t);
        out.push((format!("pop{i}_d{d}_k{k}"), ch));
    }
    out
}

#[test]
fn criterion_1_named_example_reproduction() {
    let start = Instant::now();
    let t = tol();

    // fourier(3): structure of the multiplicative chain
    let fr = fourier_example::<f64>(3, &t).unwrap();
    let chain = mult_chain(&fr, None, &t).unwrap();
    let m_e = &chain.chain[0];
    let diagonal = (0..3).all(|i| {
        let mut e = CMatrix::<f64>::zeros(3, 3);
        e[(i, i)] = Complex::new(1.0, 0.0);
        m_e.contains(&e, &t)
    });
    check(
        "1a fourier3 chain",
        chain.dims[0] == 3 && chain.dims[1] == 1 && chain.kappa == 2 && diagonal,
        &format!(
            "dims {:?}, kappa {}, M_E diagonal {diagonal}",
            chain.reported_dims(),
            chain.kappa
        ),
    );
    let dep_res = (fr.superop().pow(2).matrix() - Superoperator::depolarizing(3).matrix()).hs_norm();
    check(
        "1a fourier3 E² = tr(x)I/3",
        dep_res <= 1e-9,
        &format!("residual {dep_res:.3e}"),
    );

    // kappa3 example
    let k3 = kappa3_example::<f64>(&t).unwrap();
    let chain3 = mult_chain(&k3, None, &t).unwrap();
    check(
        "1b kappa3 chain",
        chain3.reported_dims() == [3, 2, 1] && chain3.kappa == 3,
        &format!("dims {:?}, kappa {}", chain3.reported_dims(), chain3.kappa),
    );
    let span = OperatorSubspace::from_span(
        3,
        &[
            CMatrix::from_real(3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]),
            CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]),
        ],
        &t,
    )
    .unwrap();
    let m2 = &chain3.chain[1];
    let span_residual = m2.equality_residual(&span).max(span.equality_residual(m2));
    check(
        "1b kappa3 M_{E²} span",
        m2.dimension() == 2 && span_residual <= 1e-8,
        &format!("residual {span_residual:.3e}"),
    );
    let mut p = CMatrix::<f64>::zeros(3, 3);
    p[(2, 2)] = Complex::new(1.0, 0.0);
    let ep = k3.apply(&p).unwrap();
    let expect = CMatrix::from_real(3, &[0.5, 0.5, 0.0, 0.5, 0.5, 0.0, 0.0, 0.0, 0.0]);
    let entry_dev = (&ep - &expect).max_abs();
    check(
        "1b kappa3 E(diag(0,0,1))",
        entry_dev <= 1e-12,
        &format!("max entry deviation {entry_dev:.3e}"),
    );

    // seeded unitary channels
    for (i, (d, seed)) in [(2usize, 11u64), (2, 12), (3, 13), (3, 14), (4, 15)]
        .into_iter()
        .enumerate()
    {
        let ch = unitary_channel(&haar_ish_unitary::<f64>(d, seed), &t).unwrap();
        let chain = mult_chain(&ch, None, &t).unwrap();
        check(
            &format!("1c unitary {i} (d={d})"),
            chain.kappa == 1 && chain.stabilized().dimension() == d * d,
            &format!("kappa {}, dim {}", chain.kappa, chain.stabilized().dimension()),
        );
    }

    // Pauli and Weyl mixtures: normal superoperators with index 1
    for i in 0..10u64 {
        let probs = seeded_probs(4, 42 + i);
        let ch = pauli_channel(&[probs[0], probs[1], probs[2], probs[3]], &t).unwrap();
        let normality = ch.superop().normality_residual();
        let chain = mult_chain(&ch, None, &t).unwrap();
        check(
            &format!("1d pauli {i}"),
            normality <= 1e-9 && chain.kappa == 1,
            &format!("normality {normality:.3e}, kappa {}", chain.kappa),
        );
    }
    for i in 0..10u64 {
        let probs = seeded_probs(9, 142 + i);
        let ch = weyl_channel::<f64>(3, &probs, &t).unwrap();
        let normality = ch.superop().normality_residual();
        let chain = mult_chain(&ch, None, &t).unwrap();
        check(
            &format!("1d weyl {i}"),
            normality <= 1e-9 && chain.kappa == 1,
            &format!("normality {normality:.3e}, kappa {}", chain.kappa),
        );
    }

    // the deformation path
    let p0 = path_channel(0.0, &t).unwrap();
    let chain0 = mult_chain(&p0, None, &t).unwrap();
    check("1e path t=0", chain0.kappa == 1, &format!("kappa {}", chain0.kappa));
    for tt in [0.1, 0.5, 1.0] {
        let ch = path_channel(tt, &t).unwrap();
        let ee = KrausChannel::compose(&ch.adjoint_channel(&t), &ch, &t).unwrap();
        let fixed = fixed_point_algebra(&ee.superop(), &t);
        let diag_ok = fixed.dimension() == 2
            && fixed.contains(&CMatrix::from_real(2, &[1.0, 0.0, 0.0, 0.0]), &t)
            && fixed.contains(&CMatrix::from_real(2, &[0.0, 0.0, 0.0, 1.0]), &t);
        let chain = mult_chain(&ch, None, &t).unwrap();
        check(
            &format!("1e path t={tt}"),
            diag_ok && chain.kappa >= 2,
            &format!("fixed dim {}, kappa {}", fixed.dimension(), chain.kappa),
        );
    }

    // the non-TP counterexample
    let phi = multdom::ucp::counterexample_phi::<f64>(&t).unwrap();
    let m = mult_domain_ucp(&phi, &t).unwrap();
    let a = CMatrix::from_real(3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    let in_domain = m.residual(&a) <= 1e-8;
    let k3m = &phi.kraus()[2];
    let violation = (&(&a * k3m) - &(k3m * &a)).hs_norm();
    check(
        "1f counterexample",
        in_domain && violation >= 0.1,
        &format!("residual {:.3e}, ‖a·k₃ − k₃·a‖ = {violation:.3}", m.residual(&a)),
    );

    let elapsed = start.elapsed();
    check(
        "1g runtime",
        elapsed.as_secs_f64() < 5.0,
        &format!("{:.2}s", elapsed.as_secs_f64()),
    );
}

fn seeded_probs(k: usize, seed: u64) -> Vec<f64> {
    let mut stream = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(7);
    let mut out: Vec<f64> = (0..k)
        .map(|_| {
            stream = stream.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = stream;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            ((z >> 11) as f64 / (1u64 << 53) as f64) + 0.02
        })
        .collect();
    let total: f64 = out.iter().sum();
    for p in &mut out {
        *p /= total;
    }
    out
}

#[test]
fn criterion_2_dual_theorem_agreement() {
    let t = tol();
    let mut worst = 0.0f64;
    for (name, ch) in population() {
        // route 1: fixed points of E*∘E at superoperator level
        let s = ch.superop();
        let a = Superoperator::from_matrix(ch.dim(), &s.matrix().adjoint() * s.matrix()).unwrap();
        let fixed = fixed_point_algebra(&a, &t);
        // route 2: commutant of {a_i* a_j}
        let mut products = Vec::new();
        for ai in ch.kraus() {
            for aj in ch.kraus() {
                products.push(&ai.adjoint() * aj);
            }
        }
        let comm = multdom::algebra::commutant(ch.dim(), &products, &t).unwrap();
        let residual = fixed
            .equality_residual(&comm)
            .max(comm.equality_residual(&fixed));
        worst = worst.max(residual);
        assert!(
            fixed.equals(&comm, &t) && residual <= 1e-8,
            "{name}: kernel dim {} vs commutant dim {} (residual {residual:.3e})",
            fixed.dimension(),
            comm.dimension()
        );
    }
    check(
        "2 dual-theorem agreement (50/50)",
        true,
        &format!("worst subspace residual {worst:.3e}"),
    );
}

#[test]
fn criterion_3_main_theorem_invariants() {
    let t = tol();
    let mut slow_channels = 0usize;
    for (name, ch) in population() {
        let chain = mult_chain(&ch, None, &t).unwrap();
        // (a) non-increasing dims
        for w in chain.dims.windows(2) {
            assert!(w[1] <= w[0], "{name}: chain dims increased: {:?}", chain.dims);
        }
        // (b) automorphism residuals on the stabilised algebra
        let stab = stabilizing_algebra(&ch, &t).unwrap();
        let auto = verify_automorphism(&ch, &stab, &t).unwrap();
        assert!(
            auto.left_inverse <= 1e-8 && auto.right_inverse <= 1e-8,
            "{name}: inverse residuals {:.3e}/{:.3e}",
            auto.left_inverse,
            auto.right_inverse
        );
        assert!(
            auto.multiplicativity <= 1e-8,
            "{name}: multiplicativity residual {:.3e}",
            auto.multiplicativity
        );
        // (c) stabilising algebra = algebra generated by peripheral eigenvectors
        let pd = peripheral_eigenpairs(&ch, &t).unwrap();
        let gen = generated_algebra(ch.dim(), &pd.vectors, false, &t).unwrap();
        assert!(
            stab.equals(&gen, &t),
            "{name}: stabilising dim {} vs peripheral-generated dim {}",
            stab.dimension(),
            gen.dimension()
        );
        // (d) decay of complement components
        let mut stream = 0xdeca_0000u64 ^ name.len() as u64;
        for j in 0..10 {
            let x = random_matrix(ch.dim(), &mut stream);
            let rep = complement_decay(&ch, &x, 2000, 1e-6, &t).unwrap();
            assert!(rep.monotone, "{name}: decay not monotone (elt {j})");
            if rep.reached_at.is_none() {
                slow_channels += 1;
                println!(
                    "ACCEPTANCE 3d note: {name} elt {j} did not reach 1e-6 in 2000 steps, \
                     spectral gap {:?}",
                    rep.spectral_gap
                );
            }
        }
    }
    check(
        "3 main-theorem invariants",
        slow_channels == 0,
        &format!("{slow_channels} slow decays"),
    );
}

fn random_matrix(d: usize, stream: &mut u64) -> CMatrix<f64> {
    CMatrix::from_fn(d, d, |_, _| {
        let mut next = || {
            *stream = stream.wrapping_add(0x9e3779b97f4a7c15);
            let mut z = *stream;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
        };
        Complex::new(next(), next())
    })
}

#[test]
fn criterion_4_irreducibility_theorems() {
    let t = tol();
    // (a) + (b) + (d) on the shared population
    for (name, ch) in population() {
        let ee = KrausChannel::compose(&ch.adjoint_channel(&t), &ch, &t).unwrap();
        let pd = peripheral_eigenpairs(&ee, &t).unwrap();
        for v in &pd.values {
            assert!(
                (v - Complex::new(1.0, 0.0)).norm() <= 1e-8,
                "{name}: E*∘E has peripheral eigenvalue {v}"
            );
        }
        let ee_irreducible = is_irreducible(&ee, &t).unwrap().irreducible;
        if ee_irreducible {
            assert!(
                is_primitive(&ch, &t).unwrap(),
                "{name}: E*∘E irreducible but E not primitive"
            );
        }
        let irr = is_irreducible(&ch, &t).unwrap();
        if irr.irreducible {
            let stab = stabilizing_algebra(&ch, &t).unwrap();
            assert!(
                stab.commutator_defect() <= 1e-8,
                "{name}: irreducible channel with non-commutative stabiliser"
            );
            let rep = cyclic_group_check(&pd_of(&ch, &t), &t).unwrap();
            assert!(rep.ok, "{name}: peripheral set is not a cyclic group");
        }
    }
    check("4ab peripheral/irreducibility on population", true, "50 channels");

    // (c) equivalence on a mixed 20-channel population
    let mut reducible_seen = 0;
    let mut irreducible_seen = 0;
    let mixed: Vec<(String, KrausChannel<f64>)> = mixed_population(&t);
    assert_eq!(mixed.len(), 20);
    for (name, ch) in &mixed {
        let (irr, prim) = one_plus_e_primitivity(ch, &t)
            .unwrap_or_else(|e| panic!("{name}: equivalence check failed: {e}"));
        assert_eq!(irr, prim, "{name}: equivalence violated");
        if irr {
            irreducible_seen += 1;
        } else {
            reducible_seen += 1;
        }
    }
    check(
        "4c E+E² equivalence",
        reducible_seen >= 5 && irreducible_seen >= 5,
        &format!("{reducible_seen} reducible, {irreducible_seen} irreducible"),
    );
}

fn pd_of(ch: &KrausChannel<f64>, t: &Tolerance<f64>) -> multdom::spectral::PeripheralData<f64> {
    peripheral_eigenpairs(ch, t).unwrap()
}

fn mixed_population(t: &Tolerance<f64>) -> Vec<(String, KrausChannel<f64>)> {
    let mut out: Vec<(String, KrausChannel<f64>)> = Vec::new();
    // reducible: unitary conjugations and projective-type channels
    for (i, seed) in (0..7u64).enumerate() {
        let d = [2, 3][i % 2];
        let ch = unitary_channel(&haar_ish_unitary::<f64>(d, 300 + seed), t).unwrap();
        out.push((format!("mixed_unitary{i}"), ch));
    }
    out.push(("mixed_projective".into(), projective_channel(t).unwrap()));
    out.push(("mixed_path0".into(), path_channel(0.0, t).unwrap()));
    out.push(("mixed_path03".into(), path_channel(0.3, t).unwrap()));
    // irreducible: fourier and generic mixtures
    out.push(("mixed_fourier2".into(), fourier_example(2, t).unwrap()));
    out.push(("mixed_fourier3".into(), fourier_example(3, t).unwrap()));
    for i in 0..8u64 {
        let d = [2, 3][(i % 2) as usize];
        out.push((
            format!("mixed_random{i}"),
            random_unitary_mixture(d, 3, 500 + i, t),
        ));
    }
    out
}

#[test]
fn criterion_5_density_construction() {
    let t = tol();
    for i in 0..10u64 {
        let d = [2, 3][(i % 2) as usize];
        let phi = random_unital_cp::<f64>(d, 2 + (i % 3) as usize, 700 + i, &t).unwrap();
        let mut prev = f64::INFINITY;
        for n in [2usize, 8, 32] {
            let e = density_perturbation(&phi, n, &t).unwrap();
            let m = mult_domain_ucp(&e, &t).unwrap();
            assert_eq!(
                m.dimension(),
                1,
                "perturbed map {i} (n={n}) has nontrivial domain"
            );
            let dist = superop_distance(&e, &phi);
            assert!(
                dist < prev,
                "distance did not shrink at map {i}, n={n}: {dist} vs {prev}"
            );
            println!(
                "ACCEPTANCE 5 note: map {i} n={n}: superop distance {dist:.3e}, \
                 analytic cb bound {:.3e}",
                density_cb_bound::<f64>(n)
            );
            prev = dist;
        }
    }
    check("5 density construction", true, "10 maps × n ∈ {2,8,32}");
}

#[test]
fn criterion_6_qec_suite() {
    let t = tol();
    // Prop 6.2 containment for 20 random (E, R) pairs
    for i in 0..20u64 {
        let d = [2, 3][(i % 2) as usize];
        let e = random_unitary_mixture::<f64>(d, 2 + (i % 2) as usize, 800 + i, &t);
        let r = random_unitary_mixture::<f64>(d, 2, 900 + i, &t);
        let rep = unital_recovery_check(&e, &r, &t).unwrap();
        assert!(
            rep.contained,
            "pair {i}: containment residual {:.3e}",
            rep.containment_residual
        );
    }
    check("6a recovery containment", true, "20 pairs");

    // equality at R = E*
    for seed in [801u64, 802, 803] {
        let e = random_unitary_mixture::<f64>(3, 2, seed, &t);
        let rep = unital_recovery_check(&e, &e.adjoint_channel(&t), &t).unwrap();
        assert!(rep.equal, "R = E* must give F_(R∘E) = M_E (seed {seed})");
    }
    check("6b adjoint recovery equality", true, "3 seeds");

    // Prop 6.4 branches
    let pauli = pauli_channel(&[0.4, 0.3, 0.2, 0.1], &t).unwrap();
    let v1 = ucs_vs_uns(&pauli, &t).unwrap();
    check("6c kappa=1 branch", v1.kappa == 1 && v1.equal, "pauli channel");

    // the equivalence "UCC algebra = UNS algebra ⟺ κ = 1" across a slice of
    // the random population
    for (name, ch) in population().into_iter().step_by(7) {
        let v = ucs_vs_uns(&ch, &t)
            .unwrap_or_else(|e| panic!("{name}: ucs_vs_uns failed: {e}"));
        assert_eq!(v.equal, v.kappa == 1, "{name}: equivalence violated");
    }
    let k3 = kappa3_example::<f64>(&t).unwrap();
    let v3 = ucs_vs_uns(&k3, &t).unwrap();
    let witness = v3.witness.clone().unwrap();
    let chain = mult_chain(&k3, None, &t).unwrap();
    check(
        "6d kappa>1 witness",
        chain.chain[0].residual(&witness) <= 1e-8 && chain.chain[1].residual(&witness) > 1e-3,
        &format!("kappa {}, witness escapes M_E²", v3.kappa),
    );
}

#[test]
fn criterion_7_wedderburn_validity() {
    let t = tol();
    let mut algebras: Vec<(String, OperatorSubspace<f64>, usize)> = Vec::new();
    for (name, ch) in population().into_iter().step_by(5) {
        let d = ch.dim();
        algebras.push((format!("{name}/M_E"), mult_domain(&ch, &t).unwrap(), d));
        algebras.push((
            format!("{name}/M_inf"),
            stabilizing_algebra(&ch, &t).unwrap(),
            d,
        ));
    }
    let k3 = kappa3_example::<f64>(&t).unwrap();
    algebras.push(("kappa3/M_E".into(), mult_domain(&k3, &t).unwrap(), 3));
    let fr = fourier_example::<f64>(3, &t).unwrap();
    algebras.push(("fourier3/M_E".into(), mult_domain(&fr, &t).unwrap(), 3));

    for (name, alg, d) in algebras {
        let s = wedderburn(&alg, &t).unwrap_or_else(|e| panic!("{name}: wedderburn failed: {e}"));
        let dim_sum: usize = s.blocks.iter().map(|&(n, _)| n * n).sum();
        assert_eq!(dim_sum, alg.dimension(), "{name}: Σ n² mismatch");
        if s.unital {
            let support: usize = s.blocks.iter().map(|&(n, m)| n * m).sum();
            assert_eq!(support, d, "{name}: Σ n·m ≠ d for unital algebra");
        }
        // reconstruction residual: blocks rebuilt through the basis change
        // must span the algebra
        let mut rebuilt: Vec<CMatrix<f64>> = Vec::new();
        let u = &s.basis_change;
        let mut offset = 0usize;
        for &(n, m) in &s.blocks {
            for i in 0..n {
                for j in 0..n {
                    let mut e = CMatrix::<f64>::zeros(d, d);
                    for b in 0..m {
                        e[(offset + i * m + b, offset + j * m + b)] = Complex::new(1.0, 0.0);
                    }
                    rebuilt.push(&(u * &e) * &u.adjoint());
                }
            }
            offset += n * m;
        }
        let span = OperatorSubspace::from_span(d, &rebuilt, &t).unwrap();
        let residual = span.equality_residual(&alg).max(alg.equality_residual(&span));
        assert!(
            span.equals(&alg, &t) && residual <= 1e-8,
            "{name}: reconstruction residual {residual:.3e}"
        );
    }
    check("7 wedderburn validity", true, "population + named algebras");
}
