//! Physical symbols, parameter records and quantum-number relations.
//!
//! Units: ħ = 1, energies and masses in fm⁻¹.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("kappa = 0 is not a valid spin-orbit quantum number")]
    ZeroKappa,
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SymmetryKind {
    Spin,
    Pseudospin,
}

impl SymmetryKind {
    pub fn name(self) -> &'static str {
        match self {
            SymmetryKind::Spin => "spin",
            SymmetryKind::Pseudospin => "pseudospin",
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            SymmetryKind::Spin => SymmetryKind::Pseudospin,
            SymmetryKind::Pseudospin => SymmetryKind::Spin,
        }
    }
}

impl fmt::Display for SymmetryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum PotentialKind {
    /// Kratzer radial part −2D_e(r_e/r − r_e²/2r²).
    Kratzer { de: f64, re: f64 },
    /// Oscillator radial part k r²/2.
    Oscillator { k: f64 },
}

impl PotentialKind {
    pub fn name(&self) -> &'static str {
        match self {
            PotentialKind::Kratzer { .. } => "kratzer",
            PotentialKind::Oscillator { .. } => "oscillator",
        }
    }

    /// Radial part V(r).
    pub fn radial(&self, r: f64) -> f64 {
        match *self {
            PotentialKind::Kratzer { de, re } => -2.0 * de * (re / r - 0.5 * re * re / (r * r)),
            PotentialKind::Oscillator { k } => 0.5 * k * r * r,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        match *self {
            PotentialKind::Kratzer { de, re } => {
                positive("D_e", de)?;
                positive("r_e", re)
            }
            PotentialKind::Oscillator { k } => positive("k", k),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RingParams {
    pub a: f64,
    pub b: f64,
}

impl RingParams {
    pub fn new(a: f64, b: f64) -> Result<Self, ModelError> {
        nonnegative("a", a)?;
        nonnegative("b", b)?;
        Ok(Self { a, b })
    }

    pub fn central() -> Self {
        Self { a: 0.0, b: 0.0 }
    }

    /// Angular part (b/sin²θ + a/cos²θ), to be divided by r².
    pub fn angular(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        self.b / (s * s) + self.a / (c * c)
    }
}

/// Full double ring-shaped potential V(r, θ).
pub fn potential(kind: &PotentialKind, ring: &RingParams, r: f64, theta: f64) -> f64 {
    ring.angular(theta) / (r * r) + kind.radial(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    pub mass: f64,
    /// C_s in spin symmetry, C_ps in pseudospin symmetry.
    pub symmetry_constant: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: u32,
    pub n_prime: u32,
    /// Signed; only m² and |m| enter any formula.
    pub m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, n_prime: u32, m: i32) -> Self {
        Self { n, n_prime, m }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub symmetry: SymmetryKind,
    pub potential: PotentialKind,
    pub physical: PhysicalParams,
    pub ring: RingParams,
    pub qn: QuantumNumbers,
    /// Overall sign of the potential (V → −V under the spin/pseudospin map).
    /// Multiplies every γ·V coupling; `Plus` for every physical input.
    pub potential_sign: Sign,
}

impl ProblemSpec {
    pub fn new(
        symmetry: SymmetryKind,
        potential: PotentialKind,
        physical: PhysicalParams,
        ring: RingParams,
        qn: QuantumNumbers,
    ) -> Result<Self, ModelError> {
        positive("M", physical.mass)?;
        potential.validate()?;
        RingParams::new(ring.a, ring.b)?;
        Ok(Self { symmetry, potential, physical, ring, qn, potential_sign: Sign::Plus })
    }

    /// The reference parameter set: M = 5, C_s = 5, C_ps = −5, D_e = 15,
    /// r_e = 0.4, k = 1.
    pub fn reference(symmetry: SymmetryKind, kratzer: bool, a: f64, b: f64, qn: QuantumNumbers) -> Self {
        let potential = if kratzer {
            PotentialKind::Kratzer { de: 15.0, re: 0.4 }
        } else {
            PotentialKind::Oscillator { k: 1.0 }
        };
        let c = match symmetry {
            SymmetryKind::Spin => 5.0,
            SymmetryKind::Pseudospin => -5.0,
        };
        Self::new(
            symmetry,
            potential,
            PhysicalParams { mass: 5.0, symmetry_constant: c },
            RingParams { a, b },
            qn,
        )
        .expect("reference parameters are valid")
    }

    /// γ (spin) or γ̃ (pseudospin) at energy E.
    pub fn gamma(&self, e: C64) -> C64 {
        let (m, c) = (self.physical.mass, self.physical.symmetry_constant);
        match self.symmetry {
            SymmetryKind::Spin => e + m - c,
            SymmetryKind::Pseudospin => e - m - c,
        }
    }

    /// The coupling multiplying V in the separated equations: sign·γ.
    pub fn coupling(&self, e: C64) -> C64 {
        self.gamma(e) * self.potential_sign.value()
    }

    /// β² (spin, as printed) or β̃² (pseudospin).
    pub fn beta_sq(&self, e: C64) -> C64 {
        let (m, c) = (self.physical.mass, self.physical.symmetry_constant);
        match self.symmetry {
            SymmetryKind::Spin => (e - m) * (c - e - m),
            SymmetryKind::Pseudospin => (e + m) * (e - m - c),
        }
    }
}

/// How square roots of complex arguments are taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SqrtMode {
    /// Principal branch, cut along the negative real axis (−x ↦ +i√x).
    Principal,
    /// √|z|, always real and non-negative.
    ModulusReal,
}

/// Principal square root with the cut approached from above regardless of
/// the sign of a zero imaginary part.
pub fn csqrt(z: C64) -> C64 {
    if z.im == 0.0 {
        if z.re >= 0.0 {
            C64::new(z.re.sqrt(), 0.0)
        } else {
            C64::new(0.0, (-z.re).sqrt())
        }
    } else {
        z.sqrt()
    }
}

pub fn sqrt_with(z: C64, mode: SqrtMode) -> C64 {
    match mode {
        SqrtMode::Principal => csqrt(z),
        SqrtMode::ModulusReal => C64::new(z.norm().sqrt(), 0.0),
    }
}

/// Derived symbols at a candidate energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientSet {
    pub gamma: C64,
    pub beta_sq: C64,
    /// Ω = √(aγ+¼) + √(bγ+m²).
    pub omega: C64,
    /// ℓ + ½ = Ω + 2n′ + 1.
    pub ell_eff: C64,
    /// Kratzer: ½ + √(ℓ_eff² + γD_e r_e²). Oscillator: ℓ + 1 (the r power).
    pub zeta: C64,
    pub eta: C64,
    pub p: C64,
}

pub fn derive_coefficients(spec: &ProblemSpec, e: C64) -> CoefficientSet {
    derive_coefficients_with(spec, e, SqrtMode::Principal)
}

pub fn derive_coefficients_with(spec: &ProblemSpec, e: C64, mode: SqrtMode) -> CoefficientSet {
    let g = spec.coupling(e);
    let m2 = f64::from(spec.qn.m).powi(2);
    let (a, b) = (spec.ring.a, spec.ring.b);
    let ra = sqrt_with(g * a + 0.25, mode);
    let rb = sqrt_with(g * b + m2, mode);
    let omega = ra + rb;
    let ell_eff = omega + 2.0 * f64::from(spec.qn.n_prime) + 1.0;
    let zeta = match spec.potential {
        PotentialKind::Kratzer { de, re } => 0.5 + sqrt_with(ell_eff * ell_eff + g * de * re * re, mode),
        PotentialKind::Oscillator { .. } => ell_eff + 0.5,
    };
    CoefficientSet {
        gamma: spec.gamma(e),
        beta_sq: spec.beta_sq(e),
        omega,
        ell_eff,
        zeta,
        eta: 0.25 * (1.0 + 2.0 * rb),
        p: 0.25 * (1.0 + 2.0 * ra),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Alignment {
    Aligned,
    Unaligned,
}

/// κ ↦ (ℓ, j, alignment): κ < 0 gives ℓ = −κ−1, j = ℓ+½; κ > 0 gives ℓ = κ, j = ℓ−½.
pub fn kappa_ell_map(kappa: i32) -> Result<(u32, f64, Alignment), ModelError> {
    match kappa {
        0 => Err(ModelError::ZeroKappa),
        k if k < 0 => {
            let ell = (-k - 1) as u32;
            Ok((ell, f64::from(ell) + 0.5, Alignment::Aligned))
        }
        k => {
            let ell = k as u32;
            Ok((ell, f64::from(ell) - 0.5, Alignment::Unaligned))
        }
    }
}

fn positive(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value, reason: "must be positive and finite" })
    }
}

fn nonnegative(name: &'static str, value: f64) -> Result<(), ModelError> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter { name, value, reason: "must be non-negative and finite" })
    }
}
