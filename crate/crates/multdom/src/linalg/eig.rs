//! General complex eigendecomposition: Householder Hessenberg reduction,
//! single-shift (Wilkinson) QR iteration to Schur form, and triangular
//! back-substitution for right eigenvectors.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::CMatrix;
use crate::{Error, Real, Result, C};

#[derive(Clone)]
pub struct Eig<T> {
    /// Eigenvalues with algebraic multiplicity, in Schur order.
    pub values: Vec<C<T>>,
    /// Unit-norm right eigenvectors, one column per eigenvalue. For a
    /// defective eigenvalue the returned columns repeat the available
    /// eigendirections (the residual contract still holds).
    pub vectors: CMatrix<T>,
}

/// Reduces a to upper Hessenberg form: a = q·h·q*.
fn hessenberg<T: Real>(a: &CMatrix<T>) -> (CMatrix<T>, CMatrix<T>) {
    let n = a.rows();
    let mut h = a.clone();
    let mut q = CMatrix::identity(n);
    let two = T::from_f64(2.0).unwrap();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<C<T>> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let xnorm = v
            .iter()
            .map(|z| z.norm_sqr())
            .fold(T::zero(), |s, t| s + t)
            .sqrt();
        if xnorm == T::zero() {
            continue;
        }
        let phase = if v[0].norm() > T::zero() {
            v[0] / v[0].norm()
        } else {
            Complex::one()
        };
        v[0] += phase * xnorm;
        let vnorm2 = v.iter().map(|z| z.norm_sqr()).fold(T::zero(), |s, t| s + t);
        if vnorm2 == T::zero() {
            continue;
        }
        let tau = two / vnorm2;
        // h ← P·h (rows k+1..), P = I − τ·v·v*
        for j in 0..n {
            let w = (k + 1..n)
                .map(|i| v[i - k - 1].conj() * h[(i, j)])
                .fold(Complex::zero(), |s, t| s + t)
                .scale(tau);
            for i in k + 1..n {
                h[(i, j)] -= w * v[i - k - 1];
            }
        }
        // h ← h·P (cols k+1..)
        for i in 0..n {
            let w = (k + 1..n)
                .map(|j| h[(i, j)] * v[j - k - 1])
                .fold(Complex::zero(), |s, t| s + t)
                .scale(tau);
            for j in k + 1..n {
                h[(i, j)] -= w * v[j - k - 1].conj();
            }
        }
        // q ← q·P
        for i in 0..n {
            let w = (k + 1..n)
                .map(|j| q[(i, j)] * v[j - k - 1])
                .fold(Complex::zero(), |s, t| s + t)
                .scale(tau);
            for j in k + 1..n {
                q[(i, j)] -= w * v[j - k - 1].conj();
            }
        }
        // restore exact zeros below the subdiagonal of column k
        for i in k + 2..n {
            h[(i, k)] = Complex::zero();
        }
    }
    (h, q)
}

/// Plane rotation [[c, s],[−s̄, c]] with c real ≥ 0 sending (f,g) to (r,0).
fn givens<T: Real>(f: C<T>, g: C<T>) -> (T, C<T>) {
    let fn_ = f.norm();
    let gn = g.norm();
    if gn == T::zero() {
        return (T::one(), Complex::zero());
    }
    if fn_ == T::zero() {
        return (T::zero(), g.conj() / gn);
    }
    let d = (fn_ * fn_ + gn * gn).sqrt();
    let c = fn_ / d;
    let s = (f / fn_) * g.conj().scale(T::one() / d);
    (c, s)
}

/// Schur decomposition a = z·t·z* with t upper triangular.
pub fn schur<T: Real>(a: &CMatrix<T>) -> Result<(CMatrix<T>, CMatrix<T>)> {
    if !a.is_square() {
        return Err(Error::Shape("schur: matrix must be square".into()));
    }
    let n = a.rows();
    if n == 0 {
        return Ok((a.clone(), a.clone()));
    }
    let (mut t, mut z) = hessenberg(a);
    let eps = T::epsilon();
    let norm_scale = t.hs_norm().max(T::min_positive_value());
    let mut hi = n - 1;
    let mut stalled = 0usize;
    let mut total = 0usize;
    let limit = 60 * n + 200;

    let small_at = |t: &CMatrix<T>, i: usize| {
        let local = t[(i - 1, i - 1)].norm() + t[(i, i)].norm();
        let base = if local > T::zero() { local } else { norm_scale };
        eps * base * T::from_f64(4.0).unwrap()
    };

    while hi > 0 {
        if t[(hi, hi - 1)].norm() <= small_at(&t, hi) {
            t[(hi, hi - 1)] = Complex::zero();
            hi -= 1;
            stalled = 0;
            continue;
        }
        let mut lo = hi;
        while lo > 0 && t[(lo, lo - 1)].norm() > small_at(&t, lo) {
            lo -= 1;
        }
        total += 1;
        stalled += 1;
        if total > limit {
            return Err(Error::Numeric(format!(
                "schur: QR iteration did not converge after {total} steps \
                 (n = {n}, active block {lo}..={hi})"
            )));
        }
        let mu = if stalled.is_multiple_of(16) {
            // exceptional shift to break rare limit cycles
            t[(hi, hi)] + Complex::new(t[(hi, hi - 1)].norm(), T::zero())
                .scale(T::from_f64(0.75).unwrap())
        } else {
            wilkinson_shift(&t, hi)
        };
        qr_step(&mut t, &mut z, lo, hi, mu);
    }
    // enforce exact triangularity
    for i in 1..n {
        for j in 0..i {
            t[(i, j)] = Complex::zero();
        }
    }
    Ok((t, z))
}

/// Eigenvalue of the trailing 2×2 block closest to the corner entry.
fn wilkinson_shift<T: Real>(t: &CMatrix<T>, hi: usize) -> C<T> {
    let a = t[(hi - 1, hi - 1)];
    let b = t[(hi - 1, hi)];
    let c = t[(hi, hi - 1)];
    let d = t[(hi, hi)];
    let half = T::from_f64(0.5).unwrap();
    let tr2 = (a + d).scale(half);
    let det = a * d - b * c;
    let disc = (tr2 * tr2 - det).sqrt();
    let l1 = tr2 + disc;
    let l2 = tr2 - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// One implicit single-shift QR sweep on the active block [lo..=hi].
fn qr_step<T: Real>(t: &mut CMatrix<T>, z: &mut CMatrix<T>, lo: usize, hi: usize, mu: C<T>) {
    let n = t.rows();
    for k in lo..hi {
        let (x, y) = if k == lo {
            (t[(lo, lo)] - mu, t[(lo + 1, lo)])
        } else {
            (t[(k, k - 1)], t[(k + 1, k - 1)])
        };
        let (c, s) = givens(x, y);
        // rows k, k+1 ← R·rows ; R = [[c, s],[−s̄, c]]
        let jstart = k.saturating_sub(1).max(lo);
        for j in jstart..n {
            let a = t[(k, j)];
            let b = t[(k + 1, j)];
            t[(k, j)] = a.scale(c) + s * b;
            t[(k + 1, j)] = b.scale(c) - s.conj() * a;
        }
        // cols k, k+1 ← cols·R†
        let iend = (k + 2).min(hi);
        for i in 0..=iend {
            let a = t[(i, k)];
            let b = t[(i, k + 1)];
            t[(i, k)] = a.scale(c) + b * s.conj();
            t[(i, k + 1)] = b.scale(c) - a * s;
        }
        for i in 0..n {
            let a = z[(i, k)];
            let b = z[(i, k + 1)];
            z[(i, k)] = a.scale(c) + b * s.conj();
            z[(i, k + 1)] = b.scale(c) - a * s;
        }
    }
}

/// Eigenvalues only (diagonal of the Schur form).
pub fn eigenvalues<T: Real>(a: &CMatrix<T>) -> Result<Vec<C<T>>> {
    let (t, _) = schur(a)?;
    Ok((0..a.rows()).map(|i| t[(i, i)]).collect())
}

/// Full eigendecomposition with unit-norm right eigenvectors.
pub fn eig<T: Real>(a: &CMatrix<T>) -> Result<Eig<T>> {
    let n = a.rows();
    let (t, z) = schur(a)?;
    let values: Vec<C<T>> = (0..n).map(|i| t[(i, i)]).collect();
    let tnorm = t.hs_norm().max(T::min_positive_value());
    let floor = T::epsilon() * tnorm;
    let mut vectors = CMatrix::zeros(n, n);
    for k in 0..n {
        // back-substitution on the triangular factor
        let lambda = values[k];
        let mut y = vec![Complex::<T>::zero(); n];
        y[k] = Complex::one();
        for i in (0..k).rev() {
            let mut num = Complex::<T>::zero();
            for j in i + 1..=k {
                num += t[(i, j)] * y[j];
            }
            let mut den = t[(i, i)] - lambda;
            if den.norm() < floor {
                den = Complex::new(floor, T::zero());
            }
            y[i] = -num / den;
        }
        let x = z.matvec(&y);
        let norm = x
            .iter()
            .map(|v| v.norm_sqr())
            .fold(T::zero(), |s, t| s + t)
            .sqrt();
        for i in 0..n {
            vectors[(i, k)] = x[i] / norm;
        }
    }
    let out = Eig { values, vectors };
    // residual contract: ‖a·v − λ·v‖ must be small for every returned pair
    let scale = a.hs_norm().max(T::one());
    let worst = eig_residual(a, &out);
    if worst > T::from_f64(1e-6).unwrap() * scale {
        return Err(Error::Numeric(format!(
            "eig: residual {worst} exceeds bound after QR iteration"
        )));
    }
    Ok(out)
}

fn eig_residual<T: Real>(a: &CMatrix<T>, e: &Eig<T>) -> T {
    let n = a.rows();
    let mut worst = T::zero();
    for k in 0..n {
        let v = e.vectors.col(k);
        let av = a.matvec(&v);
        let r = av
            .iter()
            .zip(&v)
            .map(|(&x, &y)| (x - y * e.values[k]).norm_sqr())
            .fold(T::zero(), |s, t| s + t)
            .sqrt();
        worst = worst.max(r);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::tests::randmat;

    #[test]
    fn diagonal_matrix() {
        let d = CMatrix::<f64>::from_real(2, &[1.0, 0.0, 0.0, -1.0]);
        let e = eig(&d).unwrap();
        let mut vals: Vec<f64> = e.values.iter().map(|z| z.re).collect();
        vals.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((vals[0] - 1.0).abs() < 1e-14);
        assert!((vals[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn jordan_block_repeats_eigendirection() {
        let j = CMatrix::<f64>::from_real(2, &[0.0, 1.0, 0.0, 0.0]);
        let e = eig(&j).unwrap();
        assert!(e.values.iter().all(|z| z.norm() < 1e-12));
        // both columns collapse onto ±e1
        for k in 0..2 {
            let v = e.vectors.col(k);
            assert!(v[1].norm() < 1e-6, "expected e1 direction, got {v:?}");
        }
    }

    #[test]
    fn random_matrices_satisfy_residuals() {
        let mut seed = 3u64;
        for n in [2usize, 3, 5, 9, 16] {
            let a: CMatrix<f64> = randmat(n, n, &mut seed);
            let e = eig(&a).unwrap();
            let scale = a.hs_norm();
            assert!(
                eig_residual(&a, &e) <= 1e-10 * scale,
                "residual too large at n={n}"
            );
        }
    }

    #[test]
    fn schur_is_similarity() {
        let mut seed = 17u64;
        let a: CMatrix<f64> = randmat(7, 7, &mut seed);
        let (t, z) = schur(&a).unwrap();
        assert!(z.unitary_residual() < 1e-12);
        let rec = &(&z * &t) * &z.adjoint();
        assert!((&rec - &a).hs_norm() < 1e-11);
    }

    #[test]
    fn trace_equals_eigenvalue_sum() {
        let mut seed = 29u64;
        let a: CMatrix<f64> = randmat(6, 6, &mut seed);
        let vals = eigenvalues(&a).unwrap();
        let sum: num_complex::Complex<f64> = vals.into_iter().sum();
        assert!((sum - a.trace()).norm() < 1e-11);
    }

    #[test]
    fn unitary_input_spectrum_on_circle() {
        let mut seed = 31u64;
        let g: CMatrix<f64> = randmat(5, 5, &mut seed);
        let (q, _) = crate::linalg::qr(&g);
        let vals = eigenvalues(&q).unwrap();
        for v in vals {
            assert!((v.norm() - 1.0).abs() < 1e-11);
        }
    }
}
