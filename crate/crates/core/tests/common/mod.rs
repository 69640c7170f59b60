//! Oracles shared by the integration tests, written independently of the library.
#![allow(dead_code)]

use laguerre_core::{JacobiCoefficients, RngState};
use rand::Rng;

/// Adaptive Simpson quadrature with Richardson correction.
///
/// A panel is accepted once its error estimate reaches the tolerance or the
/// rounding level of the panel itself. The first six levels are always split,
/// so symmetric integrands cannot fool the estimate; recursion stops at depth 24.
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        let noise = 1e-14 * (b - a) * (fa.abs() + 4.0 * flm.abs() + 2.0 * fm.abs() + 4.0 * frm.abs() + fb.abs());
        if depth == 0 || (depth <= 18 && delta.abs() <= (15.0 * tol).max(noise)) {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 24)
}

/// Random Jacobi coefficients with diagonal in `[-d, d]` and off-diagonal in `[lo, hi]`.
pub fn random_jacobi(rng: &mut RngState, n: usize, d: f64, lo: f64, hi: f64) -> JacobiCoefficients {
    let diag = (0..n).map(|_| rng.random_range(-d..=d)).collect();
    let off = (0..n.saturating_sub(1)).map(|_| rng.random_range(lo..=hi)).collect();
    JacobiCoefficients::new(diag, off).unwrap()
}

/// Dense symmetric tridiagonal matrix.
pub fn dense(j: &JacobiCoefficients) -> Vec<Vec<f64>> {
    let n = j.dim();
    let mut a = vec![vec![0.0; n]; n];
    for i in 0..n {
        a[i][i] = j.diag()[i];
        if i + 1 < n {
            a[i][i + 1] = j.offdiag()[i];
            a[i + 1][i] = j.offdiag()[i];
        }
    }
    a
}

/// `(A^k)_{11}` for `k = 1..=order` by repeated dense matrix products.
pub fn dense_power_moments(j: &JacobiCoefficients, order: usize) -> Vec<f64> {
    let a = dense(j);
    let n = a.len();
    let mut p = a.clone();
    let mut out = vec![p[0][0]];
    for _ in 1..order {
        let mut q = vec![vec![0.0; n]; n];
        for i in 0..n {
            for l in 0..n {
                if p[i][l] != 0.0 {
                    for c in 0..n {
                        q[i][c] += p[i][l] * a[l][c];
                    }
                }
            }
        }
        p = q;
        out.push(p[0][0]);
    }
    out
}

/// Catalan-number semicircle moments by the recursion `C_{k+1} = Σ C_i C_{k-i}`.
pub fn catalan(k: usize) -> f64 {
    let mut c = vec![1.0f64];
    for m in 0..k {
        c.push((0..=m).map(|i| c[i] * c[m - i]).sum());
    }
    c[k]
}

pub fn sc_moment(k: usize) -> f64 {
    if k % 2 == 1 {
        0.0
    } else {
        catalan(k / 2)
    }
}
