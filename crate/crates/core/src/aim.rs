//! Asymptotic iteration method for y″ = λ₀(x) y′ + s₀(x) y.
//!
//! Derivatives in the recurrence are exact: λ₀ and s₀ are supplied as
//! truncated Taylor series (jets) around the expansion point, and each
//! iteration differentiates the previous pair by shifting coefficients.

use crate::specfun::{hyp2f1_terminating, pochhammer, SpecfunError};
use num_complex::Complex64 as C64;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AimError {
    #[error("iteration index must be at least 1, got {0}")]
    BadIndex(usize),
    #[error("degenerate termination: zeta + n vanishes")]
    Degenerate,
    #[error("jet has zero constant term and cannot be inverted")]
    Singular,
    #[error("no root of delta_k in [{lo}, {hi}]")]
    NoRoot { lo: f64, hi: f64 },
    #[error("no convergence by k = {0}")]
    NotConverged(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

/// Truncated Taylor series c₀ + c₁(x−x₀) + … + c_K(x−x₀)^K.
#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    coeffs: Vec<f64>,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { coeffs }
    }

    /// The independent variable x expanded around x0.
    pub fn variable(x0: f64, order: usize) -> Self {
        let mut j = Self::constant(x0, order);
        if order >= 1 {
            j.coeffs[1] = 1.0;
        }
        j
    }

    pub fn from_coefficients(coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least one coefficient");
        Self { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    /// d/dx; the top coefficient becomes zero so the order is preserved.
    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs[1..].iter().enumerate().map(|(i, c)| (i + 1) as f64 * c).chain([0.0]).collect();
        Self { coeffs }
    }

    pub fn recip(&self) -> Result<Self, AimError> {
        let c0 = self.coeffs[0];
        if c0 == 0.0 {
            return Err(AimError::Singular);
        }
        let k = self.order();
        let mut out = vec![0.0; k + 1];
        out[0] = 1.0 / c0;
        for i in 1..=k {
            let acc: f64 = (1..=i).map(|j| self.coeffs[j] * out[i - j]).sum();
            out[i] = -acc / c0;
        }
        Ok(Self { coeffs: out })
    }

    pub fn div(&self, other: &Jet) -> Result<Self, AimError> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, f: f64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * f).collect() }
    }

    /// Evaluates the polynomial at x0 + dx.
    pub fn eval(&self, dx: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * dx + c)
    }

    fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

impl Add<&Jet> for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order(), "jet orders differ");
        Jet { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect() }
    }
}

impl Sub<&Jet> for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order(), "jet orders differ");
        Jet { coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<&Jet> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        assert_eq!(self.order(), rhs.order(), "jet orders differ");
        let k = self.order();
        let mut out = vec![0.0; k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0.0 {
                continue;
            }
            for (j, b) in rhs.coeffs[..=k - i].iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }
}

impl Add<f64> for &Jet {
    type Output = Jet;
    fn add(self, rhs: f64) -> Jet {
        let mut j = self.clone();
        j.coeffs[0] += rhs;
        j
    }
}

impl Mul<f64> for &Jet {
    type Output = Jet;
    fn mul(self, rhs: f64) -> Jet {
        self.scale(rhs)
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

macro_rules! owned_ops {
    ($($tr:ident $f:ident),*) => {$(
        impl $tr<Jet> for Jet {
            type Output = Jet;
            fn $f(self, rhs: Jet) -> Jet { (&self).$f(&rhs) }
        }
        impl $tr<&Jet> for Jet {
            type Output = Jet;
            fn $f(self, rhs: &Jet) -> Jet { (&self).$f(rhs) }
        }
        impl $tr<f64> for Jet {
            type Output = Jet;
            fn $f(self, rhs: f64) -> Jet { (&self).$f(rhs) }
        }
    )*};
}
owned_ops!(Add add, Mul mul);

impl Sub<Jet> for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        &self - &rhs
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        -&self
    }
}

/// Coefficient functions (λ₀, s₀) at eigen-parameter `e`, given the variable jet.
pub type Coefficients = dyn Fn(f64, &Jet) -> (Jet, Jet) + Send + Sync;

pub struct AimProblem {
    pub coefficients: Box<Coefficients>,
    pub x0: f64,
    pub order: usize,
    pub k_max: usize,
    /// Rescale each (λ_k, s_k) pair by its magnitude to avoid overflow.
    pub rescale: bool,
}

impl std::fmt::Debug for AimProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AimProblem")
            .field("x0", &self.x0)
            .field("order", &self.order)
            .field("k_max", &self.k_max)
            .field("rescale", &self.rescale)
            .finish()
    }
}

impl AimProblem {
    pub fn new(coefficients: Box<Coefficients>, x0: f64, k_max: usize) -> Self {
        Self { coefficients, x0, order: k_max + 2, k_max, rescale: true }
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = x0;
        self
    }

    pub fn with_k_max(mut self, k_max: usize) -> Self {
        self.k_max = k_max;
        self.order = k_max + 2;
        self
    }
}

/// λ_k, s_k for k = 0..=k and δ_k for k = 1..=k at one eigen-parameter value.
///
/// When rescaling is on, the stored pair k equals the true pair divided by
/// `exp(log_scale[k])`.
#[derive(Debug, Clone, PartialEq)]
pub struct AimSeriesResult {
    pub lambdas: Vec<Jet>,
    pub ss: Vec<Jet>,
    pub log_scale: Vec<f64>,
    /// deltas[k−1] = δ_k(x0)
    pub deltas: Vec<f64>,
}

fn series_to(problem: &AimProblem, e: f64, k: usize) -> AimSeriesResult {
    let order = problem.order.max(k + 1);
    let x = Jet::variable(problem.x0, order);
    let (l0, s0) = (problem.coefficients)(e, &x);
    let mut lambdas = vec![l0.clone()];
    let mut ss = vec![s0.clone()];
    let mut log_scale = vec![0.0];
    let mut deltas = Vec::with_capacity(k);
    for i in 1..=k {
        let (lp, sp) = (&lambdas[i - 1], &ss[i - 1]);
        let mut li = &(&lp.derivative() + sp) + &(&l0 * lp);
        let mut si = &sp.derivative() + &(&s0 * lp);
        let mut ls = log_scale[i - 1];
        if problem.rescale {
            let m = li.max_abs().max(si.max_abs());
            if m > 0.0 && m.is_finite() {
                li = li.scale(1.0 / m);
                si = si.scale(1.0 / m);
                ls += m.ln();
            }
        }
        deltas.push(li.value() * sp.value() - lp.value() * si.value());
        lambdas.push(li);
        ss.push(si);
        log_scale.push(ls);
    }
    AimSeriesResult { lambdas, ss, log_scale, deltas }
}

pub fn aim_series(problem: &AimProblem, e: f64) -> AimSeriesResult {
    series_to(problem, e, problem.k_max)
}

/// δ_k(x0) = λ_k s_{k−1} − λ_{k−1} s_k at eigen-parameter `e`.
pub fn aim_delta(problem: &AimProblem, e: f64, k: usize) -> Result<f64, AimError> {
    if k == 0 {
        return Err(AimError::BadIndex(k));
    }
    Ok(series_to(problem, e, k).deltas[k - 1])
}

/// Where to look for a root of δ_k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AimSearch {
    pub center: f64,
    pub half_width: f64,
    pub panels: usize,
    pub k_min: usize,
}

impl AimSearch {
    pub fn around(center: f64, half_width: f64) -> Self {
        Self { center, half_width, panels: 64, k_min: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AimEigen {
    pub value: f64,
    /// Iteration index at which convergence was accepted.
    pub k: usize,
    /// Root of δ_k for each k tried, starting at k_min (NaN where none).
    pub history: Vec<f64>,
}

fn bisect(f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64, mut flo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Root of δ_k in the search window closest to `target`.
pub fn delta_root_near(problem: &AimProblem, k: usize, search: &AimSearch, target: f64) -> Result<f64, AimError> {
    if k == 0 {
        return Err(AimError::BadIndex(k));
    }
    let f = |e: f64| series_to(problem, e, k).deltas[k - 1];
    let lo = search.center - search.half_width;
    let hi = search.center + search.half_width;
    let h = (hi - lo) / search.panels as f64;
    let mut best: Option<f64> = None;
    let mut x0 = lo;
    let mut f0 = f(x0);
    for i in 1..=search.panels {
        let x1 = lo + i as f64 * h;
        let f1 = f(x1);
        let root = if f0 == 0.0 {
            Some(x0)
        } else if (f0 < 0.0) != (f1 < 0.0) {
            Some(bisect(&f, x0, x1, f0))
        } else {
            None
        };
        if let Some(r) = root {
            if best.is_none_or(|b| (r - target).abs() < (b - target).abs()) {
                best = Some(r);
            }
        }
        x0 = x1;
        f0 = f1;
    }
    best.ok_or(AimError::NoRoot { lo, hi })
}

/// Iterates k upward until the root of δ_k moves by less than 1e−10 for three
/// consecutive k.
pub fn aim_eigenvalue(problem: &AimProblem, search: &AimSearch) -> Result<AimEigen, AimError> {
    let mut history = Vec::new();
    let mut prev: Option<f64> = None;
    let mut streak = 0;
    for k in search.k_min.max(1)..=problem.k_max {
        let target = prev.unwrap_or(search.center);
        match delta_root_near(problem, k, search, target) {
            Ok(r) => {
                history.push(r);
                if prev.is_some_and(|p| (r - p).abs() < 1e-10) {
                    streak += 1;
                } else {
                    streak = 0;
                }
                prev = Some(r);
                if streak >= 3 {
                    return Ok(AimEigen { value: r, k, history });
                }
            }
            Err(AimError::NoRoot { .. }) => {
                history.push(f64::NAN);
                prev = None;
                streak = 0;
            }
            Err(e) => return Err(e),
        }
    }
    Err(AimError::NotConverged(problem.k_max))
}

/// Radial harmonic oscillator −u″ + (ℓ(ℓ+1)/r² + r²)u = 2E u with
/// u = r^{ℓ+1} e^{−r²/2} f; the eigen-parameter is E.
pub fn oscillator_problem(ell: f64, k_max: usize) -> AimProblem {
    let x0 = if ell > 0.0 { (ell * (ell + 1.0)).powf(0.25) } else { 1.0 };
    AimProblem::new(
        Box::new(move |e, x| {
            let inv = x.recip().expect("expansion point away from r = 0");
            let l0 = &(x * 2.0) - &(&inv * (2.0 * (ell + 1.0)));
            let s0 = Jet::constant(2.0 * ell + 3.0 - 2.0 * e, x.order());
            (l0, s0)
        }),
        x0,
        k_max,
    )
}

/// Kratzer-type radial problem u″ = (κ² − 2c/r + ζ(ζ−1)/r²) u with
/// u = r^ζ e^{−κr} f; the eigen-parameter is the decay constant κ.
pub fn kratzer_problem(zeta: f64, c: f64, k_max: usize) -> AimProblem {
    let rmin = zeta * (zeta - 1.0) / c;
    let x0 = if rmin > 0.0 && rmin.is_finite() { rmin } else { 1.0 };
    AimProblem::new(
        Box::new(move |kappa, x| {
            let inv = x.recip().expect("expansion point away from r = 0");
            let l0 = &(&inv * (-2.0 * zeta)) + 2.0 * kappa;
            let s0 = &inv * (-2.0 * (c - zeta * kappa));
            (l0, s0)
        }),
        x0,
        k_max,
    )
}

/// Polar problem in x = sin²θ for the reduced factor of H; the
/// eigen-parameter is ℓ_eff.
pub fn angular_problem(eta: f64, p: f64, k_max: usize) -> AimProblem {
    AimProblem::new(
        Box::new(move |ell, x| {
            let one_minus = &(-x) + 1.0;
            let inv = (x * &one_minus).recip().expect("expansion point inside (0, 1)");
            let lin = &(x * (-(2.0 * eta + 2.0 * p + 1.0))) + (2.0 * eta + 0.5);
            let l0 = -(&lin * &inv);
            let s0 = &inv * ((eta + p).powi(2) - 0.25 * ell * ell);
            (l0, s0)
        }),
        0.5,
        k_max,
    )
}

/// Closed-form termination of the Kratzer series: −γDr/(ζ+n).
pub fn aim_exact_kratzer(zeta: C64, gamma_dr: C64, n: u32) -> Result<C64, AimError> {
    let denom = zeta + n as f64;
    if denom.norm() == 0.0 {
        return Err(AimError::Degenerate);
    }
    Ok(-gamma_dr / denom)
}

/// η + p − (½ℓ_eff − n′); zero on the polar quantization line.
pub fn aim_exact_angular(eta: C64, p: C64, ell_eff: C64, n_prime: u32) -> C64 {
    eta + p - (0.5 * ell_eff - n_prime as f64)
}

/// σ and ρ of the normal form y″ = 2(a x^{N+1}/(1−b x^{N+2}) − (m+1)/x) y′ − W x^N/(1−b x^{N+2}) y.
pub fn sigma_rho(a: f64, b: f64, m: f64, big_n: i32) -> Result<(f64, f64), AimError> {
    let np2 = big_n as f64 + 2.0;
    if np2 == 0.0 || b == 0.0 {
        return Err(AimError::InvalidParameter(format!("need N != -2 and b != 0 (N = {big_n}, b = {b})")));
    }
    Ok(((2.0 * m + np2 + 1.0) / np2, ((2.0 * m + 1.0) * b + 2.0 * a) / (np2 * b)))
}

/// y_n(x) = (−1)ⁿ (N+2)ⁿ (σ)_n ₂F₁(−n, ρ+n; σ; b x^{N+2}), normalized so y₀ = 1.
pub fn general_eigenfunction_sr(sigma: f64, rho: f64, b: f64, big_n: i32, n: u32, x: f64) -> Result<f64, AimError> {
    let np2 = big_n as f64 + 2.0;
    let arg = b * x.powf(np2);
    let f = hyp2f1_terminating(n, C64::new(rho + n as f64, 0.0), C64::new(sigma, 0.0), C64::new(arg, 0.0))?;
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(sign * np2.powi(n as i32) * pochhammer(C64::new(sigma, 0.0), n).re * f.re())
}

pub fn general_eigenfunction(a: f64, b: f64, m: f64, big_n: i32, n: u32, x: f64) -> Result<f64, AimError> {
    let (sigma, rho) = sigma_rho(a, b, m, big_n)?;
    general_eigenfunction_sr(sigma, rho, b, big_n, n, x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn jet_ring_laws() {
        let x = Jet::variable(0.3, 6);
        let u = &(&x * &x) + 1.0;
        let v = x.recip().unwrap();
        // (x² + 1)/x · x = x² + 1
        let back = &(&u * &v) * &x;
        for (a, b) in back.coefficients().iter().zip(u.coefficients()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!((u.derivative().value() - 0.6).abs() < 1e-15);
        assert_eq!((&u + &v).order(), 6);
        assert!(Jet::constant(0.0, 3).recip().is_err());
    }

    #[test]
    fn recip_matches_geometric_series() {
        // 1/x around 2: Σ (−1)^i (x−2)^i / 2^{i+1}
        let inv = Jet::variable(2.0, 5).recip().unwrap();
        for (i, c) in inv.coefficients().iter().enumerate() {
            let want = (-1f64).powi(i as i32) / 2f64.powi(i as i32 + 1);
            assert!((c - want).abs() < 1e-15);
        }
    }

    #[test]
    fn exact_families() {
        let k = aim_exact_kratzer(C64::new(3.0, 0.0), C64::new(-6.0, 0.0), 0).unwrap();
        assert_eq!(k, C64::new(2.0, 0.0));
        let k = aim_exact_kratzer(C64::new(3.0, 0.0), C64::new(-6.0, 0.0), 1).unwrap();
        assert_eq!(k, C64::new(1.5, 0.0));
        assert!(aim_exact_kratzer(C64::new(-2.0, 0.0), C64::new(1.0, 0.0), 2).is_err());
        let c = |x: f64| C64::new(x, 0.0);
        assert_eq!(aim_exact_angular(c(0.25), c(0.5), c(1.5), 0), c(0.0));
        assert_eq!(aim_exact_angular(c(0.25), c(0.5), c(1.5), 1), c(1.0));
    }

    #[test]
    fn general_eigenfunction_values() {
        assert_eq!(general_eigenfunction(0.7, 1.3, 0.4, 1, 0, 0.6).unwrap(), 1.0);
        // (−1)·2·(2)_1·₂F₁(−1, 4; 2; 0.25) = −4·0.5
        let y = general_eigenfunction_sr(2.0, 3.0, 1.0, 0, 1, 0.5).unwrap();
        assert!((y + 2.0).abs() < 1e-14);
        assert!(general_eigenfunction_sr(-1.0, 3.0, 1.0, 0, 3, 0.5).is_err());
    }

    #[test]
    fn delta_index_zero_rejected() {
        let p = oscillator_problem(0.0, 10);
        assert!(aim_delta(&p, 1.0, 0).is_err());
    }
}
