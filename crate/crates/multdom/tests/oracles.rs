//! Independent numerical oracles for the spectral kernel.
//!
//! The eigensolver is checked against a route that shares none of its code:
//! characteristic-polynomial coefficients from the Faddeev–LeVerrier
//! recursion and roots from a Durand–Kerner iteration.

use multdom::builders::fourier_example;
use multdom::linalg::{eigenvalues, CMatrix, Tolerance};
use multdom::C64;
use num_complex::Complex;

/// Characteristic polynomial coefficients c_0 + c_1·λ + … + λ^n by the
/// Faddeev–LeVerrier recursion (trace-based, no eigendecomposition).
fn char_poly(a: &CMatrix<f64>) -> Vec<C64> {
    let n = a.rows();
    let mut coeffs = vec![Complex::new(0.0, 0.0); n + 1];
    coeffs[n] = Complex::new(1.0, 0.0);
    let mut m = CMatrix::<f64>::zeros(n, n);
    let mut c = Complex::new(1.0, 0.0);
    for k in 1..=n {
        m = &(a * &m) + &CMatrix::identity(n).scale(c);
        c = (a * &m).trace() * Complex::new(-1.0 / k as f64, 0.0);
        coeffs[n - k] = c;
    }
    coeffs
}

/// Durand–Kerner simultaneous root iteration on a monic polynomial.
fn durand_kerner(coeffs: &[C64]) -> Vec<C64> {
    let n = coeffs.len() - 1;
    let eval = |z: C64| -> C64 {
        let mut acc = Complex::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    // standard non-real starting points on a spiral
    let mut roots: Vec<C64> = (0..n)
        .map(|k| Complex::from_polar(0.9, 0.7 + 2.1 * k as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = Complex::new(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

/// Multiset comparison up to a pairing tolerance.
fn multiset_close(mut a: Vec<C64>, mut b: Vec<C64>, tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    while let Some(x) = a.pop() {
        let Some(pos) = b
            .iter()
            .enumerate()
            .min_by(|(_, p), (_, q)| (x - **p).norm().partial_cmp(&(x - **q).norm()).unwrap())
            .map(|(i, _)| i)
        else {
            return false;
        };
        if (x - b[pos]).norm() > tol {
            return false;
        }
        b.swap_remove(pos);
    }
    true
}

#[test]
fn eigensolver_matches_characteristic_polynomial_roots() {
    // random 5×5 with a deterministic stream
    let mut state = 0x0eac_u64;
    let mut next = || {
        state = state.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^= z >> 31;
        (z >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    };
    let a = CMatrix::from_fn(5, 5, |_, _| Complex::new(next(), next()));
    let direct = eigenvalues(&a).unwrap();
    let oracle = durand_kerner(&char_poly(&a));
    assert!(
        multiset_close(direct.clone(), oracle.clone(), 1e-8),
        "eig {direct:?} vs oracle {oracle:?}"
    );
}

#[test]
fn fourier_superoperator_spectrum_in_unit_disc() {
    let t = Tolerance::default();
    let ch = fourier_example::<f64>(3, &t).unwrap();
    let s = ch.superop();
    let coeffs = char_poly(s.matrix());
    // oracle roots: the zero eigenvalue has multiplicity 8, which limits
    // polynomial root-finding accuracy to ~eps^(1/8), so the disc bound for
    // the oracle route carries that slack
    let oracle = durand_kerner(&coeffs);
    for root in &oracle {
        assert!(root.norm() <= 1.0 + 1e-2, "oracle root {root} escapes the unit disc");
    }
    let direct = eigenvalues(s.matrix()).unwrap();
    for v in &direct {
        assert!(v.norm() <= 1.0 + 1e-8, "eigenvalue {v} escapes the unit disc");
    }
    // cross-route agreement without root-finding conditioning: every direct
    // eigenvalue must annihilate the characteristic polynomial
    let eval = |z: multdom::C64| -> multdom::C64 {
        let mut acc = Complex::new(0.0, 0.0);
        for &c in coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc
    };
    for v in &direct {
        let p = eval(*v).norm();
        assert!(p <= 1e-10, "char poly at eigenvalue {v} has modulus {p:.3e}");
    }
}
