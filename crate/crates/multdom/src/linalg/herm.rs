//! Two-sided Jacobi eigensolver for Hermitian matrices.

use num_complex::Complex;

use super::CMatrix;
use crate::{Error, Real, Result, C};

const MAX_SWEEPS: usize = 60;

/// Eigendecomposition of a Hermitian matrix: real eigenvalues (descending)
/// and a unitary matrix of eigenvectors, a = v·diag(λ)·v*.
///
/// The input is symmetrised as (a + a*)/2 first; callers are expected to
/// pass matrices that are Hermitian up to roundoff.
pub fn eigh<T: Real>(a: &CMatrix<T>) -> Result<(Vec<T>, CMatrix<T>)> {
    if !a.is_square() {
        return Err(Error::Shape("eigh: matrix must be square".into()));
    }
    let n = a.rows();
    let half = T::from_f64(0.5).unwrap();
    let mut h = (a + &a.adjoint()).scale_re(half);
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon() * T::from_f64(8.0).unwrap();
    let scale = h.hs_norm().max(T::one());

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let g = h[(p, q)];
                if g.norm() <= eps * scale {
                    continue;
                }
                rotated = true;
                let app = h[(p, p)].re;
                let aqq = h[(q, q)].re;
                let (c, s, w) = rotation(app, aqq, g);
                // J = [[c, s],[−w̄·s, w̄·c]] ; h ← J†·h·J, v ← v·J
                for i in 0..n {
                    let hp = h[(i, p)];
                    let hq = h[(i, q)];
                    h[(i, p)] = hp.scale(c) - hq * w.conj().scale(s);
                    h[(i, q)] = hp.scale(s) + hq * w.conj().scale(c);
                }
                for j in 0..n {
                    let hp = h[(p, j)];
                    let hq = h[(q, j)];
                    h[(p, j)] = hp.scale(c) - hq * w.scale(s);
                    h[(q, j)] = hp.scale(s) + hq * w.scale(c);
                }
                for i in 0..n {
                    let vp = v[(i, p)];
                    let vq = v[(i, q)];
                    v[(i, p)] = vp.scale(c) - vq * w.conj().scale(s);
                    v[(i, q)] = vp.scale(s) + vq * w.conj().scale(c);
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<T> = (0..n).map(|i| h[(i, i)].re).collect();
    order.sort_by(|&x, &y| diag[y].partial_cmp(&diag[x]).unwrap());
    let vals: Vec<T> = order.iter().map(|&i| diag[i]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok((vals, vecs))
}

fn rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> (T, T, C<T>) {
    let g = apq.norm();
    let w = apq / g;
    let tau = (aqq - app) / (g + g);
    let t = if tau == T::zero() {
        T::one()
    } else {
        let sign = if tau > T::zero() { T::one() } else { -T::one() };
        sign / (tau.abs() + (T::one() + tau * tau).sqrt())
    };
    let c = T::one() / (T::one() + t * t).sqrt();
    let s = t * c;
    (c, s, w)
}

/// Inverse square root of a positive-definite Hermitian matrix.
pub fn inv_sqrt_psd<T: Real>(a: &CMatrix<T>, floor: T) -> Result<CMatrix<T>> {
    let (vals, vecs) = eigh(a)?;
    if vals.iter().any(|&l| l <= floor) {
        return Err(Error::Numeric(
            "inv_sqrt_psd: matrix is not positive definite".into(),
        ));
    }
    let n = a.rows();
    let mut d = CMatrix::zeros(n, n);
    for (i, &l) in vals.iter().enumerate() {
        d[(i, i)] = Complex::new(T::one() / l.sqrt(), T::zero());
    }
    Ok(&(&vecs * &d) * &vecs.adjoint())
}
