//! One-sided Jacobi SVD for complex matrices.
//!
//! Columns of the working copy are rotated pairwise until mutually
//! orthogonal; singular values are the final column norms. Slow compared to
//! bidiagonalisation but extremely accurate for small singular values, which
//! is what the rank decisions downstream care about.

use num_complex::Complex;
use num_traits::{One, Zero};

use super::CMatrix;
use crate::{Real, C};

#[derive(Clone)]
pub struct Svd<T> {
    /// Left singular vectors, one column per singular value (m×n for m ≥ n).
    pub u: CMatrix<T>,
    /// Singular values, descending.
    pub singular_values: Vec<T>,
    /// Right singular vectors (n×n), a = u·diag(σ)·v*.
    pub v: CMatrix<T>,
}

const MAX_SWEEPS: usize = 60;

/// Full SVD of an arbitrary rectangular complex matrix.
pub fn svd<T: Real>(a: &CMatrix<T>) -> Svd<T> {
    if a.rows() < a.cols() {
        // a = (a*)* : compute on the transpose-conjugate and swap factors
        let t = svd(&a.adjoint());
        return Svd {
            u: t.v,
            singular_values: t.singular_values,
            v: t.u,
        };
    }
    if a.rows() >= 2 * a.cols() && a.cols() > 0 {
        return svd_tall(a);
    }
    let (m, n) = (a.rows(), a.cols());
    let mut u = a.clone();
    let mut v = CMatrix::identity(n);
    let eps = T::epsilon() * T::from_f64(8.0).unwrap();

    // squared column norms, refreshed whenever a rotation touches a column
    let mut sq: Vec<T> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| u[(i, j)].norm_sqr())
                .fold(T::zero(), |s, t| s + t)
        })
        .collect();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n.saturating_sub(1) {
            for q in p + 1..n {
                let app = sq[p];
                let aqq = sq[q];
                let mut apq: C<T> = Complex::zero();
                for i in 0..m {
                    apq += u[(i, p)].conj() * u[(i, q)];
                }
                let denom = (app * aqq).sqrt();
                if apq.norm() <= eps * denom || denom == T::zero() {
                    continue;
                }
                rotated = true;
                let (c, s, w) = jacobi_rotation(app, aqq, apq);
                // Columns p,q ← [u_p, u_q]·J with J = [[c, s],[−s·w̄, c·w̄]]
                let mut new_p = T::zero();
                let mut new_q = T::zero();
                for i in 0..m {
                    let up = u[(i, p)];
                    let uq = u[(i, q)];
                    let tp = up.scale(c) - uq * w.conj().scale(s);
                    let tq = up.scale(s) + uq * w.conj().scale(c);
                    new_p += tp.norm_sqr();
                    new_q += tq.norm_sqr();
                    u[(i, p)] = tp;
                    u[(i, q)] = tq;
                }
                sq[p] = new_p;
                sq[q] = new_q;
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

    // Extract σ as column norms, normalise U, sort descending.
    let mut order: Vec<usize> = (0..n).collect();
    let sigmas: Vec<T> = (0..n)
        .map(|j| {
            (0..m)
                .map(|i| u[(i, j)].norm_sqr())
                .fold(T::zero(), |s, t| s + t)
                .sqrt()
        })
        .collect();
    order.sort_by(|&a, &b| sigmas[b].partial_cmp(&sigmas[a]).unwrap());

    let mut u_out = CMatrix::zeros(m, n);
    let mut v_out = CMatrix::zeros(n, n);
    let mut s_out = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        let s = sigmas[src];
        s_out.push(s);
        for i in 0..m {
            u_out[(i, dst)] = if s > T::zero() {
                u[(i, src)] / s
            } else {
                Complex::zero()
            };
        }
        for i in 0..n {
            v_out[(i, dst)] = v[(i, src)];
        }
    }
    Svd {
        u: u_out,
        singular_values: s_out,
        v: v_out,
    }
}

/// SVD of a markedly tall matrix through a Householder QR reduction: the
/// square R factor has the same singular values and right vectors, and the
/// left vectors come back through the stored reflectors, so no accuracy is
/// lost while the Jacobi sweeps run on n×n instead of m×n.
fn svd_tall<T: Real>(a: &CMatrix<T>) -> Svd<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut r = a.clone();
    let two = T::from_f64(2.0).unwrap();
    // reflectors stored as (column k, v) with H = I − 2vv*/v*v acting on
    // rows k..m
    let mut reflectors: Vec<(usize, Vec<C<T>>, T)> = Vec::with_capacity(n);
    for k in 0..n {
        let mut v: Vec<C<T>> = (k..m).map(|i| r[(i, k)]).collect();
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
        for j in k..n {
            let w = (k..m)
                .map(|i| v[i - k].conj() * r[(i, j)])
                .fold(Complex::zero(), |s, t| s + t)
                .scale(tau);
            for i in k..m {
                r[(i, j)] -= w * v[i - k];
            }
        }
        reflectors.push((k, v, tau));
    }
    let r_square = CMatrix::from_fn(n, n, |i, j| if i <= j { r[(i, j)] } else { Complex::zero() });
    let inner = svd(&r_square);
    // U = H_0 · H_1 ⋯ H_{n−1} · [U_R; 0]
    let mut u = CMatrix::zeros(m, n);
    for i in 0..n {
        for j in 0..n {
            u[(i, j)] = inner.u[(i, j)];
        }
    }
    for (k, v, tau) in reflectors.iter().rev() {
        for j in 0..n {
            let w = (*k..m)
                .map(|i| v[i - k].conj() * u[(i, j)])
                .fold(Complex::zero(), |s, t| s + t)
                .scale(*tau);
            for i in *k..m {
                u[(i, j)] -= w * v[i - k];
            }
        }
    }
    Svd { u, singular_values: inner.singular_values, v: inner.v }
}

/// Rotation diagonalising the Hermitian 2×2 [[app, apq],[āpq, aqq]].
///
/// Returns (cos, sin, w) with w = apq/|apq|; the unitary applied on the
/// right is [[c, s],[−s·w̄, c·w̄]] (phase factored onto the second column).
fn jacobi_rotation<T: Real>(app: T, aqq: T, apq: C<T>) -> (T, T, C<T>) {
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

impl<T: Real> CMatrix<T> {
    /// Largest singular value (operator norm).
    pub fn op_norm(&self) -> T {
        svd(self).singular_values.first().copied().unwrap_or_else(T::zero)
    }
}

#[allow(dead_code)]
fn _assert_send<T: Real>() {
    fn is_send<X: Send>() {}
    is_send::<Svd<T>>();
}
