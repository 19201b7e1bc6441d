//! Independent reference evaluations: explicit polynomial sums in
//! compensated arithmetic and tanh-sinh quadrature.

#![allow(dead_code)]

use drs_dirac::specfun::{
    hyp1f1_terminating, hyp2f1_terminating, jacobi, jacobi_h, jacobi_norm_integral, laguerre, laguerre_norm_integrals,
    pochhammer,
};
use num_complex::Complex64 as C64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

/// Neumaier-compensated sum.
pub fn compensated_sum(terms: impl IntoIterator<Item = f64>) -> f64 {
    let (mut sum, mut carry) = (0.0f64, 0.0f64);
    for t in terms {
        let s = sum + t;
        if sum.abs() >= t.abs() {
            carry += (sum - s) + t;
        } else {
            carry += (t - s) + sum;
        }
        sum = s;
    }
    sum + carry
}

/// Binomial coefficient with real top: z(z−1)…(z−k+1)/k!.
pub fn binomial(z: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (z - i as f64) / (i as f64 + 1.0))
}

fn rising(x: f64, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (x + i as f64))
}

fn factorial(k: u32) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

/// ₁F₁(−n; c; x) term by term.
pub fn series_1f1(n: u32, c: f64, x: f64) -> f64 {
    compensated_sum((0..=n).map(|k| rising(-(n as f64), k) / rising(c, k) * x.powi(k as i32) / factorial(k)))
}

/// ₂F₁(−n, b; c; x) term by term.
pub fn series_2f1(n: u32, b: f64, c: f64, x: f64) -> f64 {
    compensated_sum(
        (0..=n).map(|k| rising(-(n as f64), k) * rising(b, k) / rising(c, k) * x.powi(k as i32) / factorial(k)),
    )
}

/// L_n^α(x) = Σ (−1)^k C(n+α, n−k) x^k / k!.
pub fn laguerre_explicit(n: u32, alpha: f64, x: f64) -> f64 {
    compensated_sum((0..=n).map(|k| {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sign * binomial(n as f64 + alpha, n - k) * x.powi(k as i32) / factorial(k)
    }))
}

/// P_n^{(α,β)}(x) = Σ C(n+α, n−s) C(n+β, s) ((x−1)/2)^s ((x+1)/2)^{n−s}.
pub fn jacobi_explicit(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    let (lo, hi) = (0.5 * (x - 1.0), 0.5 * (x + 1.0));
    compensated_sum((0..=n).map(|s| {
        binomial(n as f64 + alpha, n - s) * binomial(n as f64 + beta, s) * lo.powi(s as i32) * hi.powi((n - s) as i32)
    }))
}

/// Tanh-sinh quadrature on [−1, 1]. The integrand receives (x, 1−x, 1+x)
/// with both complements computed without cancellation, so algebraic
/// endpoint singularities are integrated to full precision.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, rel_tol: f64) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let t_max = 4.0;
    let estimate = |h: f64| {
        let steps = (t_max / h) as i64;
        compensated_sum((-steps..=steps).map(|k| {
            let t = k as f64 * h;
            let u = FRAC_PI_2 * t.sinh();
            let x = u.tanh();
            // 1 − tanh u and 1 + tanh u
            let (one_minus, one_plus) = if u >= 0.0 {
                let e = (-2.0 * u).exp();
                (2.0 * e / (1.0 + e), 2.0 / (1.0 + e))
            } else {
                let e = (2.0 * u).exp();
                (2.0 / (1.0 + e), 2.0 * e / (1.0 + e))
            };
            if one_minus == 0.0 || one_plus == 0.0 {
                return 0.0;
            }
            let w = FRAC_PI_2 * t.cosh() / (u.cosh() * u.cosh());
            if w == 0.0 {
                0.0
            } else {
                h * w * f(x, one_minus, one_plus)
            }
        }))
    };
    let mut h = 0.5;
    let mut last = estimate(h);
    for _ in 0..10 {
        h *= 0.5;
        let next = estimate(h);
        if (next - last).abs() <= rel_tol * next.abs() {
            return next;
        }
        last = next;
    }
    last
}

/// Tanh-sinh on [0, x_max]; the integrand receives x computed from the
/// accurate left complement.
pub fn tanh_sinh_interval(f: impl Fn(f64) -> f64, x_max: f64, rel_tol: f64) -> f64 {
    0.5 * x_max * tanh_sinh(|_, _, one_plus| f(0.5 * x_max * one_plus), rel_tol)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Largest relative errors of the special-function identities for
/// degrees up to `max_n`.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityErrors {
    /// ₁F₁(−n; α+1; x) = n!/(α+1)_n · L_n^α(x)
    pub laguerre_conversion: f64,
    /// ₂F₁(−n, 1+α+β+n; α+1; (1−z)/2) = n!/(α+1)_n · P_n^{(α,β)}(z)
    pub jacobi_conversion: f64,
    /// P_n^{(a,b)}(x) = (−1)^n P_n^{(b,a)}(−x)
    pub jacobi_symmetry: f64,
    /// All four families against their explicit compensated sums.
    pub series: f64,
    /// Closed-form norm integrals against tanh-sinh quadrature.
    pub integrals: f64,
}

pub fn identity_errors(max_n: u32, seed: u64) -> IdentityErrors {
    let mut rng = StdRng::seed_from_u64(seed);
    let mut out = IdentityErrors::default();
    for _ in 0..50 {
        let n = rng.random_range(0..=max_n);
        let (alpha, beta) = (rng.random_range(-0.9..4.0), rng.random_range(-0.9..4.0));
        let x = rng.random_range(-5.0..5.0);
        let z = rng.random_range(-1.0..1.0);
        let scale = |a: f64| factorial(n) / pochhammer(c(a + 1.0), n).re;
        let lhs = hyp1f1_terminating(n, c(alpha + 1.0), c(x)).unwrap().re();
        out.laguerre_conversion = out.laguerre_conversion.max(rel(lhs, scale(alpha) * laguerre(n, alpha, x)));
        let lhs = hyp2f1_terminating(n, c(1.0 + alpha + beta + n as f64), c(alpha + 1.0), c(0.5 * (1.0 - z))).unwrap().re();
        out.jacobi_conversion = out.jacobi_conversion.max(rel(lhs, scale(alpha) * jacobi(n, alpha, beta, z)));
    }
    for n in 0..=max_n {
        for (a, b) in [(0.0, 0.0), (0.5, -0.5), (1.5, 2.25), (-0.7, 3.0)] {
            for i in 0..=20 {
                let x = -1.0 + 0.1 * i as f64;
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                out.jacobi_symmetry = out.jacobi_symmetry.max(rel(sign * jacobi(n, b, a, -x), jacobi(n, a, b, x)));
            }
        }
    }
    for _ in 0..100 {
        let n = rng.random_range(0..=max_n.max(10));
        let (alpha, beta) = (rng.random_range(-0.9..4.0), rng.random_range(-0.9..4.0));
        let x = rng.random_range(-5.0..5.0);
        let cc = rng.random_range(0.3..5.0);
        let errs = [
            rel(laguerre(n, alpha, x), laguerre_explicit(n, alpha, x)),
            rel(jacobi(n, alpha, beta, x), jacobi_explicit(n, alpha, beta, x)),
            rel(hyp1f1_terminating(n, c(cc), c(x)).unwrap().re(), series_1f1(n, cc, x)),
            rel(hyp2f1_terminating(n, c(beta + 1.0), c(cc), c(x)).unwrap().re(), series_2f1(n, beta + 1.0, cc, x)),
        ];
        out.series = errs.iter().fold(out.series, |m, e| m.max(*e));
    }
    for _ in 0..10 {
        let n = rng.random_range(0..=max_n);
        let a = rng.random_range(0.2..4.0);
        let b = rng.random_range(-0.5..3.0);
        let quad = tanh_sinh(|x, om, op| om.powf(a - 1.0) * op.powf(b) * jacobi(n, a, b, x).powi(2), 1e-13);
        let mut err = (quad - jacobi_norm_integral(a, b, n).unwrap()).abs() / quad.abs();
        let quad = tanh_sinh(|x, om, op| om.powf(a) * op.powf(b) * jacobi(n, a, b, x).powi(2), 1e-13);
        err = err.max((quad - jacobi_h(n, a, b).unwrap()).abs() / quad.abs());
        let (weighted, unweighted) = laguerre_norm_integrals(a, n).unwrap();
        let x_max = 3.0 * (a + 2.0 * n as f64) + 80.0;
        let qw = tanh_sinh_interval(|x| x.powf(a) * (-x).exp() * laguerre(n, a - 1.0, x).powi(2), x_max, 1e-13);
        let qu = tanh_sinh_interval(|x| x.powf(a) * (-x).exp() * laguerre(n, a, x).powi(2), x_max, 1e-13);
        err = err.max((qw - weighted).abs() / qw.abs()).max((qu - unweighted).abs() / qu.abs());
        out.integrals = out.integrals.max(err);
    }
    out
}
