//! Property-based invariants over randomly generated matrices and channels.

use multdom::algebra::{commutant, generated_algebra, intersect, OperatorSubspace};
use multdom::builders::random_unitary_mixture;
use multdom::channel::{choi_from_superop, kraus_from_choi, KrausChannel};
use multdom::linalg::{
    eig, eigenvalues, hs_inner, null_space, orthonormalize, qr, CMatrix, Tolerance,
};
use num_complex::Complex;
use proptest::prelude::*;

fn tol() -> Tolerance<f64> {
    Tolerance::default()
}

fn complex_entry() -> impl Strategy<Value = Complex<f64>> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex::new(re, im))
}

fn matrix(d: usize) -> impl Strategy<Value = CMatrix<f64>> {
    proptest::collection::vec(complex_entry(), d * d)
        .prop_map(move |data| CMatrix::from_vec(d, d, data).unwrap())
}

fn channel() -> impl Strategy<Value = KrausChannel<f64>> {
    (2usize..=3, 1usize..=3, any::<u64>())
        .prop_map(|(d, k, seed)| random_unitary_mixture(d, k, seed % 10_000, &tol()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hs_inner_is_conjugate_symmetric(a in matrix(3), b in matrix(3)) {
        let lhs = hs_inner(&a, &b).unwrap();
        let rhs = hs_inner(&b, &a).unwrap().conj();
        prop_assert!((lhs - rhs).norm() < 1e-12);
        let aa = hs_inner(&a, &a).unwrap();
        prop_assert!(aa.re >= 0.0);
        prop_assert!(aa.im.abs() < 1e-12);
    }

    #[test]
    fn null_space_residual_bound(a in matrix(3), b in matrix(3)) {
        // a rank-deficient product to make kernels likely
        let m = &a * &(&b - &b);
        let t = tol();
        let ns = null_space(&m, &t);
        prop_assert_eq!(ns.basis.len(), 3);
        let m2 = &a * &b;
        let ns2 = null_space(&m2, &t);
        let smax = m2.op_norm();
        for v in &ns2.basis {
            let mv = m2.matvec(v);
            let r: f64 = mv.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(r <= 10.0 * t.rank_eps * smax.max(1.0));
        }
    }

    #[test]
    fn orthonormalize_gram_is_identity(mats in proptest::collection::vec(matrix(3), 1..6)) {
        let t = tol();
        let (basis, _) = orthonormalize(&mats, &t).unwrap();
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate() {
                let g = hs_inner(a, b).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                prop_assert!((g - Complex::new(expect, 0.0)).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn eig_on_normal_matrix_gives_unitary_vectors(seed in any::<u64>()) {
        // normal matrix with well-separated spectrum: u·diag(λ)·u*
        let g = multdom::builders::haar_ish_unitary::<f64>(4, seed % 10_000);
        let mut d = CMatrix::<f64>::zeros(4, 4);
        for k in 0..4 {
            d[(k, k)] = Complex::new(k as f64 + 0.5, 0.7 * k as f64 - 1.0);
        }
        let m = &(&g * &d) * &g.adjoint();
        let e = eig(&m).unwrap();
        prop_assert!(e.vectors.unitary_residual() < 1e-9);
    }

    #[test]
    fn adjoint_duality(ch in channel(), a in matrix(3), b in matrix(3)) {
        // adjust dimensions: only test when they match the channel
        if ch.dim() == 3 {
            let t = tol();
            let adj = ch.adjoint_channel(&t);
            let lhs = hs_inner(&ch.apply(&a).unwrap(), &b).unwrap();
            let rhs = hs_inner(&a, &adj.apply(&b).unwrap()).unwrap();
            prop_assert!((lhs - rhs).norm() <= 1e-9 * a.hs_norm() * b.hs_norm());
        }
    }

    #[test]
    fn compose_is_superop_product(x in channel(), y in channel()) {
        if x.dim() == y.dim() {
            let t = tol();
            let c = KrausChannel::compose(&x, &y, &t).unwrap();
            let lhs = c.superop();
            let rhs = x.superop().compose(&y.superop());
            prop_assert!((lhs.matrix() - rhs.matrix()).hs_norm() < 1e-10);
        }
    }

    #[test]
    fn unital_tp_spectral_radius_at_most_one(ch in channel()) {
        let vals = eigenvalues(ch.superop().matrix()).unwrap();
        for v in vals {
            prop_assert!(v.norm() <= 1.0 + 1e-8);
        }
    }

    #[test]
    fn choi_kraus_roundtrip_is_stable(ch in channel()) {
        let t = tol();
        let back = kraus_from_choi(&ch.choi(), &t).unwrap();
        prop_assert!((back.superop().matrix() - ch.superop().matrix()).hs_norm() < 1e-9);
        let shuffled = choi_from_superop(&ch.superop());
        prop_assert!((shuffled.matrix() - ch.choi().matrix()).hs_norm() < 1e-9);
    }

    #[test]
    fn double_commutant_is_generated_algebra(m in matrix(3)) {
        let t = tol();
        let gens = vec![m.clone(), m.adjoint()];
        let c1 = commutant(3, &gens, &t).unwrap();
        let c2 = commutant(3, c1.basis(), &t).unwrap();
        let alg = generated_algebra(3, &gens, true, &t).unwrap();
        prop_assert!(c2.equals(&alg, &t));
    }

    #[test]
    fn intersection_is_contained_in_both(
        a_mats in proptest::collection::vec(matrix(3), 1..5),
        b_mats in proptest::collection::vec(matrix(3), 1..5),
    ) {
        let t = tol();
        let a = OperatorSubspace::from_span(3, &a_mats, &t).unwrap();
        let b = OperatorSubspace::from_span(3, &b_mats, &t).unwrap();
        let m = intersect(&a, &b, &t).unwrap();
        prop_assert!(m.dimension() <= a.dimension().min(b.dimension()));
        for x in m.basis() {
            prop_assert!(a.residual(x) < 1e-9);
            prop_assert!(b.residual(x) < 1e-9);
        }
    }

    #[test]
    fn chain_dims_non_increasing(ch in channel()) {
        let t = tol();
        let chain = multdom::domain::mult_chain(&ch, None, &t).unwrap();
        for w in chain.dims.windows(2) {
            prop_assert!(w[1] <= w[0]);
        }
        prop_assert!(chain.kappa < ch.dim() * ch.dim());
    }

    #[test]
    fn estar_e_peripheral_only_one(ch in channel()) {
        let t = tol();
        let ee = KrausChannel::compose(&ch.adjoint_channel(&t), &ch, &t).unwrap();
        let pd = multdom::spectral::peripheral_eigenpairs(&ee, &t).unwrap();
        for v in &pd.values {
            prop_assert!((v - Complex::new(1.0, 0.0)).norm() < 1e-8);
        }
    }

    #[test]
    fn qr_of_gaussianish_matrix_is_unitary(m in matrix(3)) {
        let shifted = &m + &CMatrix::identity(3);
        let (q, r) = qr(&shifted);
        prop_assert!(q.unitary_residual() < 1e-11);
        prop_assert!((&(&q * &r) - &shifted).hs_norm() < 1e-11);
    }
}
