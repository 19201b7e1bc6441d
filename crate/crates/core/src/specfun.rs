//! Gamma function, terminating hypergeometric series, Laguerre and Jacobi
//! polynomials, their norm integrals, and Gauss-Legendre nodes.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpecfunError {
    #[error("gamma function pole at {0}")]
    GammaPole(f64),
    #[error("Pochhammer pole: lower parameter {0} is a non-positive integer within the series")]
    PochhammerPole(C64),
}

/// Value of a polynomial family member together with its degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolynomialValue {
    pub value: C64,
    pub degree: u32,
}

impl PolynomialValue {
    pub fn re(&self) -> f64 {
        self.value.re
    }
}

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.round()
}

/// Γ(x) for real x, using Lanczos for x ≥ ½ and reflection below.
pub fn gamma_fn(x: f64) -> Result<f64, SpecfunError> {
    if is_nonpositive_integer(x) {
        return Err(SpecfunError::GammaPole(x));
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI / (s * gamma_fn(1.0 - x)?));
    }
    if x == x.round() && x <= 171.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return Ok(f);
    }
    Ok(ln_gamma(x)?.exp())
}

/// ln Γ(x) for x > 0.
pub fn ln_gamma(x: f64) -> Result<f64, SpecfunError> {
    if x <= 0.0 {
        if is_nonpositive_integer(x) {
            return Err(SpecfunError::GammaPole(x));
        }
        // only magnitudes are meaningful here
        let s = (PI * x).sin().abs();
        return Ok(PI.ln() - s.ln() - ln_gamma(1.0 - x)?);
    }
    if x < 0.5 {
        let s = (PI * x).sin();
        return Ok(PI.ln() - s.ln() - ln_gamma(1.0 - x)?);
    }
    let z = x - 1.0;
    let mut a = LANCZOS[0];
    let t = z + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (z + i as f64);
    }
    Ok(0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + a.ln())
}

/// Rising factorial (x)_n for complex x.
pub fn pochhammer(x: C64, n: u32) -> C64 {
    (0..n).fold(C64::new(1.0, 0.0), |acc, k| acc * (x + k as f64))
}

fn check_lower(c: C64, n: u32) -> Result<(), SpecfunError> {
    if c.im == 0.0 && is_nonpositive_integer(c.re) && (-c.re) < n as f64 {
        return Err(SpecfunError::PochhammerPole(c));
    }
    Ok(())
}

/// ₁F₁(−n; c; x) as a finite sum driven by the term ratio.
pub fn hyp1f1_terminating(n: u32, c: C64, x: C64) -> Result<PolynomialValue, SpecfunError> {
    check_lower(c, n)?;
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        term *= (kf - n as f64) * x / ((c + kf) * (kf + 1.0));
        sum += term;
    }
    Ok(PolynomialValue { value: sum, degree: n })
}

/// ₂F₁(−n, b; c; x) as a finite sum driven by the term ratio.
pub fn hyp2f1_terminating(n: u32, b: C64, c: C64, x: C64) -> Result<PolynomialValue, SpecfunError> {
    check_lower(c, n)?;
    let mut term = C64::new(1.0, 0.0);
    let mut sum = term;
    for k in 0..n {
        let kf = k as f64;
        term *= (kf - n as f64) * (b + kf) * x / ((c + kf) * (kf + 1.0));
        sum += term;
    }
    Ok(PolynomialValue { value: sum, degree: n })
}

/// Generalized Laguerre polynomial L_n^α(x) by three-term recurrence.
pub fn laguerre(n: u32, alpha: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + alpha - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + alpha - x) * cur - (kf + alpha) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Jacobi polynomial P_n^{(α,β)}(x) by three-term recurrence.
pub fn jacobi(n: u32, alpha: f64, beta: f64, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 0.5 * (alpha - beta) + 0.5 * (alpha + beta + 2.0) * x;
    let ab = alpha + beta;
    for k in 2..=n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        let a1 = 2.0 * kf * (kf + ab) * (s - 2.0);
        let a2 = (s - 1.0) * (s * (s - 2.0) * x + alpha * alpha - beta * beta);
        let a3 = 2.0 * (kf + alpha - 1.0) * (kf + beta - 1.0) * s;
        let next = (a2 * cur - a3 * prev) / a1;
        prev = cur;
        cur = next;
    }
    cur
}

fn factorial(n: u32) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// ∫₋₁¹ (1−x)^{a−1}(1+x)^b [P_n^{(a,b)}(x)]² dx
/// = 2^{a+b} Γ(a+n+1) Γ(b+n+1) / (n! · a · Γ(a+b+n+1)).
pub fn jacobi_norm_integral(a: f64, b: f64, n: u32) -> Result<f64, SpecfunError> {
    let ln = (a + b) * 2f64.ln() + ln_gamma(a + n as f64 + 1.0)? + ln_gamma(b + n as f64 + 1.0)?
        - ln_gamma(a + b + n as f64 + 1.0)?;
    Ok(ln.exp() / (factorial(n) * a))
}

/// Standard squared norm h_n = ∫₋₁¹ (1−x)^α (1+x)^β [P_n^{(α,β)}]² dx.
pub fn jacobi_h(n: u32, alpha: f64, beta: f64) -> Result<f64, SpecfunError> {
    let nf = n as f64;
    let ln = (alpha + beta + 1.0) * 2f64.ln() + ln_gamma(nf + alpha + 1.0)? + ln_gamma(nf + beta + 1.0)?
        - ln_gamma(nf + alpha + beta + 1.0)?;
    Ok(ln.exp() / ((2.0 * nf + alpha + beta + 1.0) * factorial(n)))
}

/// Returns (weighted, unweighted):
/// weighted   = ∫₀^∞ x^a e^{−x} [L_n^{a−1}(x)]² dx = (a+2n) Γ(a+n) / n!,
/// unweighted = ∫₀^∞ x^a e^{−x} [L_n^{a}(x)]² dx   = Γ(a+n+1) / n!.
pub fn laguerre_norm_integrals(a: f64, n: u32) -> Result<(f64, f64), SpecfunError> {
    let nf = n as f64;
    let fact = factorial(n);
    let weighted = (a + 2.0 * nf) * gamma_fn(a + nf)? / fact;
    let unweighted = gamma_fn(a + nf + 1.0)? / fact;
    Ok((weighted, unweighted))
}

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(count: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let nf = count as f64;
    for i in 0..count.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=count {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = nf * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[count - 1 - i] = x;
        weights[i] = w;
        weights[count - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre rule on [lo, hi] split into `panels` equal pieces.
pub fn composite_rule(lo: f64, hi: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (hi - lo) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(mid + 0.5 * h * xi);
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}

/// Pairwise summation for a deterministic, well-conditioned reduction.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= 8 {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
