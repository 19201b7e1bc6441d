//! Radial, polar and azimuthal factors, assembled spinor components and
//! their normalization.

use crate::model::{derive_coefficients, CoefficientSet, PotentialKind, ProblemSpec, SymmetryKind};
use crate::specfun::{
    composite_rule, hyp1f1_terminating, hyp2f1_terminating, jacobi, jacobi_h, laguerre_norm_integrals,
    ln_gamma, pairwise_sum, pochhammer, SpecfunError,
};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, PI};
use std::io::{self, Write};
use thiserror::Error;

/// Imaginary parts below this count as zero when deciding the real sector.
const REAL_EPS: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum WavefunError {
    #[error("complex angular sector: eta = {eta}, p = {p}")]
    ComplexAngular { eta: C64, p: C64 },
    #[error("energy {0} is not real")]
    ComplexEnergy(C64),
    #[error("non-normalizable radial factor: {0}")]
    NonNormalizable(String),
    #[error("non-convergent quadrature: {0}")]
    Quadrature(String),
    #[error(transparent)]
    Specfun(#[from] SpecfunError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Component {
    /// f, carried by spin-symmetric states.
    Upper,
    /// g, carried by pseudospin-symmetric states.
    Lower,
}

impl Component {
    pub fn of(symmetry: SymmetryKind) -> Self {
        match symmetry {
            SymmetryKind::Spin => Component::Upper,
            SymmetryKind::Pseudospin => Component::Lower,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Component::Upper => "upper",
            Component::Lower => "lower",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum RadialShape {
    /// r^ζ e^{−κr} ₁F₁(−n; 2ζ; 2κr)
    Kratzer { zeta: f64, kappa: f64 },
    /// r^{ℓ+1} e^{−w r²} ₁F₁(−n; ℓ+3/2; 2w r²)
    Oscillator { ell: f64, w: f64 },
}

/// Real exponents of one bound state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WaveParams {
    pub radial: RadialShape,
    pub eta: f64,
    pub p: f64,
    pub n: u32,
    pub n_prime: u32,
    pub m: i32,
}

fn real(z: C64) -> Option<f64> {
    (z.im.abs() <= REAL_EPS * (1.0 + z.re.abs())).then_some(z.re)
}

/// Radial decay constant: √(−β̃²) for pseudospin, √(β²) for spin.
pub fn decay_constant(spec: &ProblemSpec, coeffs: &CoefficientSet) -> Result<f64, WavefunError> {
    let arg = match spec.symmetry {
        SymmetryKind::Pseudospin => -coeffs.beta_sq,
        SymmetryKind::Spin => coeffs.beta_sq,
    };
    match real(arg) {
        Some(x) if x > 0.0 => Ok(x.sqrt()),
        _ => Err(WavefunError::NonNormalizable(format!("decay constant squared {arg}"))),
    }
}

/// Gaussian width √(−γk/8), the same form for both symmetries.
pub fn gaussian_width(spec: &ProblemSpec, coeffs: &CoefficientSet) -> Result<f64, WavefunError> {
    let k = match spec.potential {
        PotentialKind::Oscillator { k } => k,
        PotentialKind::Kratzer { .. } => {
            return Err(WavefunError::NonNormalizable("Kratzer states have no Gaussian width".into()))
        }
    };
    let arg = -coeffs.gamma * spec.potential_sign.value() * k / 8.0;
    match real(arg) {
        Some(x) if x > 0.0 => Ok(x.sqrt()),
        _ => Err(WavefunError::NonNormalizable(format!("Gaussian width squared {arg}"))),
    }
}

/// Checks the real sector at `energy` and collects the exponents.
pub fn wave_params(spec: &ProblemSpec, energy: C64) -> Result<WaveParams, WavefunError> {
    if real(energy).is_none() {
        return Err(WavefunError::ComplexEnergy(energy));
    }
    let coeffs = derive_coefficients(spec, C64::new(energy.re, 0.0));
    let (eta, p) = match (real(coeffs.eta), real(coeffs.p)) {
        (Some(eta), Some(p)) => (eta, p),
        _ => return Err(WavefunError::ComplexAngular { eta: coeffs.eta, p: coeffs.p }),
    };
    let radial = match spec.potential {
        PotentialKind::Kratzer { .. } => {
            let zeta = real(coeffs.zeta)
                .filter(|z| *z > 0.5)
                .ok_or_else(|| WavefunError::NonNormalizable(format!("zeta = {}", coeffs.zeta)))?;
            RadialShape::Kratzer { zeta, kappa: decay_constant(spec, &coeffs)? }
        }
        PotentialKind::Oscillator { .. } => {
            let ell = real(coeffs.ell_eff)
                .map(|l| l - 0.5)
                .filter(|l| *l > -1.0)
                .ok_or_else(|| WavefunError::NonNormalizable(format!("ell + 1/2 = {}", coeffs.ell_eff)))?;
            RadialShape::Oscillator { ell, w: gaussian_width(spec, &coeffs)? }
        }
    };
    Ok(WaveParams { radial, eta, p, n: spec.qn.n, n_prime: spec.qn.n_prime, m: spec.qn.m })
}

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn radial_kratzer(r: f64, zeta: f64, kappa: f64, n: u32) -> Result<f64, WavefunError> {
    if kappa <= 0.0 {
        return Err(WavefunError::NonNormalizable(format!("kappa = {kappa}")));
    }
    let f = hyp1f1_terminating(n, c(2.0 * zeta), c(2.0 * kappa * r))?;
    Ok(r.powf(zeta) * (-kappa * r).exp() * f.re())
}

pub fn radial_oscillator(r: f64, ell: f64, w: f64, n: u32) -> Result<f64, WavefunError> {
    if w <= 0.0 {
        return Err(WavefunError::NonNormalizable(format!("width = {w}")));
    }
    let f = hyp1f1_terminating(n, c(ell + 1.5), c(2.0 * w * r * r))?;
    Ok(r.powf(ell + 1.0) * (-w * r * r).exp() * f.re())
}

pub fn radial(r: f64, shape: &RadialShape, n: u32) -> Result<f64, WavefunError> {
    match *shape {
        RadialShape::Kratzer { zeta, kappa } => radial_kratzer(r, zeta, kappa, n),
        RadialShape::Oscillator { ell, w } => radial_oscillator(r, ell, w, n),
    }
}

/// cos^{2p}θ continued to (π/2, π) as cosθ·|cosθ|^{2p−1}.
fn cos_power(theta: f64, p: f64) -> f64 {
    let c = theta.cos();
    if c == 0.0 {
        0.0
    } else {
        c * c.abs().powf(2.0 * p - 1.0)
    }
}

/// sin^{2η}θ cos^{2p}θ ₂F₁(−n′, n′+2(η+p); 2η+½; sin²θ).
pub fn angular_h(theta: f64, eta: f64, p: f64, n_prime: u32) -> Result<f64, WavefunError> {
    let s2 = theta.sin().powi(2);
    let f = hyp2f1_terminating(n_prime, c(n_prime as f64 + 2.0 * (eta + p)), c(2.0 * eta + 0.5), c(s2))?;
    Ok(theta.sin().powf(2.0 * eta) * cos_power(theta, p) * f.re())
}

/// The same factor through n′!/(2η+½)_{n′} · P_{n′}^{(2η−½, 2p−½)}(cos 2θ).
pub fn angular_h_jacobi(theta: f64, eta: f64, p: f64, n_prime: u32) -> f64 {
    let ratio = jacobi_ratio(eta, n_prime);
    let pj = jacobi(n_prime, 2.0 * eta - 0.5, 2.0 * p - 0.5, (2.0 * theta).cos());
    theta.sin().powf(2.0 * eta) * cos_power(theta, p) * ratio * pj
}

fn jacobi_ratio(eta: f64, n_prime: u32) -> f64 {
    let fact: f64 = (1..=n_prime).map(f64::from).product();
    fact / pochhammer(c(2.0 * eta + 0.5), n_prime).re
}

/// Checked form of [`angular_h`] taking complex exponents.
pub fn angular_h_checked(theta: f64, eta: C64, p: C64, n_prime: u32) -> Result<f64, WavefunError> {
    match (real(eta), real(p)) {
        (Some(e), Some(q)) => angular_h(theta, e, q, n_prime),
        _ => Err(WavefunError::ComplexAngular { eta, p }),
    }
}

pub fn azimuthal_phi(phi: f64, m: i32) -> C64 {
    C64::from_polar(1.0 / (2.0 * PI).sqrt(), f64::from(m) * phi)
}

/// Gamma prefactors as printed: Γ(2η+½+n)/Γ(2η+½) times the radial ratio.
fn prefactor(params: &WaveParams) -> Result<f64, WavefunError> {
    let n = params.n as f64;
    let ang = (ln_gamma(2.0 * params.eta + 0.5 + n)? - ln_gamma(2.0 * params.eta + 0.5)?).exp();
    let rad = match params.radial {
        RadialShape::Kratzer { kappa, .. } => (ln_gamma(2.0 * kappa + n)? - ln_gamma(2.0 * kappa)?).exp(),
        RadialShape::Oscillator { ell, .. } => (ln_gamma(ell + n + 1.5)? - ln_gamma(ell + 1.5)?).exp(),
    };
    Ok(ang * rad)
}

/// ∫₀^∞ R(r)² dr in closed form.
pub fn radial_norm_integral(shape: &RadialShape, n: u32) -> Result<f64, WavefunError> {
    let nf = n as f64;
    let fact: f64 = (1..=n).map(f64::from).product();
    Ok(match *shape {
        RadialShape::Kratzer { zeta, kappa } => {
            let conv = fact * (ln_gamma(2.0 * zeta)? - ln_gamma(nf + 2.0 * zeta)?).exp();
            let (weighted, _) = laguerre_norm_integrals(2.0 * zeta, n)?;
            (2.0 * kappa).powf(-(2.0 * zeta + 1.0)) * conv * conv * weighted
        }
        RadialShape::Oscillator { ell, w } => {
            let conv = fact * (ln_gamma(ell + 1.5)? - ln_gamma(nf + ell + 1.5)?).exp();
            let (_, unweighted) = laguerre_norm_integrals(ell + 0.5, n)?;
            0.5 * (2.0 * w).powf(-(ell + 1.5)) * conv * conv * unweighted
        }
    })
}

/// ∫₀^π H(θ)² dθ in closed form.
pub fn angular_norm_integral(eta: f64, p: f64, n_prime: u32) -> Result<f64, WavefunError> {
    let ratio = jacobi_ratio(eta, n_prime);
    let h = jacobi_h(n_prime, 2.0 * eta - 0.5, 2.0 * p - 0.5)?;
    Ok(2f64.powf(-(2.0 * eta + 2.0 * p)) * ratio * ratio * h)
}

/// ∫|ψ|² r² sinθ dr dθ dφ of the component with unit constant.
pub fn norm_integral(params: &WaveParams) -> Result<f64, WavefunError> {
    let pre = prefactor(params)?;
    Ok(pre * pre * radial_norm_integral(&params.radial, params.n)? * angular_norm_integral(params.eta, params.p, params.n_prime)?)
}

/// A sampled-ready spinor component with its normalization constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinorField {
    pub spec: ProblemSpec,
    pub energy: f64,
    pub component: Component,
    pub params: WaveParams,
    pub normalization: f64,
}

impl SpinorField {
    /// Single-component normalization: the given component alone integrates to one.
    pub fn new(spec: &ProblemSpec, energy: f64) -> Result<Self, WavefunError> {
        let params = wave_params(spec, c(energy))?;
        let normalization = norm_integral(&params)?.powf(-0.5);
        Ok(Self { spec: *spec, energy, component: Component::of(spec.symmetry), params, normalization })
    }

    pub fn with_normalization(mut self, normalization: f64) -> Self {
        self.normalization = normalization;
        self
    }

    /// The component with the constant set to one.
    pub fn unnormalized(&self, r: f64, theta: f64, phi: f64) -> Result<C64, WavefunError> {
        component_value(&self.params, 1.0, r, theta, phi)
    }

    pub fn value(&self, r: f64, theta: f64, phi: f64) -> Result<C64, WavefunError> {
        component_value(&self.params, self.normalization, r, theta, phi)
    }
}

impl WaveParams {
    /// Radius beyond which |ψ|² is negligible (exponent beyond about e^{−60}).
    pub fn radial_cutoff(&self) -> f64 {
        let n = self.n as f64;
        match self.radial {
            RadialShape::Kratzer { zeta, kappa } => (2.0 * zeta + 2.0 * n + 60.0) / kappa,
            RadialShape::Oscillator { ell, w } => ((ell + 2.0 * n + 60.0) / w).sqrt(),
        }
    }
}

/// N · prefactors · R(r) H(θ) Φ(φ) / (r sin^{½}θ).
pub fn component_value(params: &WaveParams, normalization: f64, r: f64, theta: f64, phi: f64) -> Result<C64, WavefunError> {
    let pre = prefactor(params)?;
    let rad = radial(r, &params.radial, params.n)?;
    let ang = angular_h(theta, params.eta, params.p, params.n_prime)?;
    Ok(azimuthal_phi(phi, params.m) * (normalization * pre * rad * ang / (r * theta.sin().sqrt())))
}

/// Evaluates one component at a point; the state must be Class A with real exponents.
pub fn assemble_component(spec: &ProblemSpec, root: f64, r: f64, theta: f64, phi: f64) -> Result<C64, WavefunError> {
    SpinorField::new(spec, root)?.value(r, theta, phi)
}

/// Single-component constant, or the combined (A_g + A_f)^{−½} when a
/// counterpart state of the other symmetry is supplied.
pub fn normalization_constant(
    spec: &ProblemSpec,
    root: f64,
    counterpart: Option<(&ProblemSpec, f64)>,
) -> Result<f64, WavefunError> {
    let mut total = norm_integral(&wave_params(spec, c(root))?)?;
    if let Some((other, e)) = counterpart {
        total += norm_integral(&wave_params(other, c(e))?)?;
    }
    Ok(total.powf(-0.5))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureGrid {
    pub radial: usize,
    pub polar: usize,
    pub azimuthal: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        Self { radial: 200, polar: 200, azimuthal: 64 }
    }
}

fn rule(lo: f64, hi: f64, nodes: usize) -> (Vec<f64>, Vec<f64>) {
    let order = nodes.clamp(1, 20);
    composite_rule(lo, hi, nodes.div_ceil(order), order)
}

/// Gauss-Legendre product quadrature of |ψ|² r² sinθ over the full domain.
/// The polar range is split at π/2.
pub fn quadrature_norm(field: &SpinorField, grid: QuadratureGrid) -> Result<f64, WavefunError> {
    quadrature_norm_params(&field.params, field.normalization, grid)
}

pub fn quadrature_norm_params(params: &WaveParams, normalization: f64, grid: QuadratureGrid) -> Result<f64, WavefunError> {
    let (rs, rw) = rule(0.0, params.radial_cutoff(), grid.radial);
    let (mut ts, mut tw) = rule(0.0, FRAC_PI_2, grid.polar / 2);
    let (t2, w2) = rule(FRAC_PI_2, PI, grid.polar - grid.polar / 2);
    ts.extend(t2);
    tw.extend(w2);
    let (ps, pw) = rule(0.0, 2.0 * PI, grid.azimuthal);
    let mut terms = Vec::with_capacity(rs.len() * ts.len());
    for (r, wr) in rs.iter().zip(&rw) {
        for (t, wt) in ts.iter().zip(&tw) {
            // the azimuthal factor has constant modulus, so its sum factors out
            let v = component_value(params, normalization, *r, *t, 0.0)?;
            terms.push(v.norm_sqr() * r * r * t.sin() * wr * wt);
        }
    }
    let phi_sum: f64 = ps
        .iter()
        .zip(&pw)
        .map(|(p, w)| azimuthal_phi(*p, params.m).norm_sqr() * w)
        .sum::<f64>()
        * 2.0
        * PI;
    let total = pairwise_sum(&terms) * phi_sum;
    if !total.is_finite() {
        return Err(WavefunError::Quadrature(format!("integral evaluated to {total}")));
    }
    Ok(total)
}

/// |∫|ψ|² r² sinθ dr dθ dφ − 1|.
pub fn verify_normalization(field: &SpinorField, grid: QuadratureGrid) -> Result<f64, WavefunError> {
    Ok((quadrature_norm(field, grid)? - 1.0).abs())
}

/// Writes `r theta phi re im` rows preceded by `#` metadata lines.
pub fn write_samples<W: Write>(out: &mut W, field: &SpinorField, points: &[(f64, f64, f64)]) -> io::Result<()> {
    let s = &field.spec;
    writeln!(out, "# symmetry {} potential {}", s.symmetry, s.potential.name())?;
    writeln!(out, "# n {} n_prime {} m {} a {} b {}", s.qn.n, s.qn.n_prime, s.qn.m, s.ring.a, s.ring.b)?;
    writeln!(out, "# energy {} component {} normalization {:e}", field.energy, field.component.name(), field.normalization)?;
    writeln!(out, "# r theta phi re im")?;
    for &(r, t, p) in points {
        let v = field.value(r, t, p).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        writeln!(out, "{r:.8e} {t:.8e} {p:.8e} {:.10e} {:.10e}", v.re, v.im)?;
    }
    Ok(())
}
