//! Spectral conditions as complex residuals, branch enumeration, root search
//! and classification, and the table audit.

mod audit;
mod cubic;
mod roots;
pub mod tables;

pub use audit::{audit_table, AuditEntry, AuditOptions, AuditReport, AuditSummary};
pub use cubic::cubic_roots;
pub use roots::{find_roots, Mode, SearchOptions};

use crate::model::{derive_coefficients_with, sqrt_with, PotentialKind, ProblemSpec, RingParams, Sign, SqrtMode, SymmetryKind};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("pole of the spectral condition at E = {0}")]
    Pole(C64),
    #[error("operation needs a {expected} potential")]
    WrongPotential { expected: &'static str },
    #[error("squared polynomial form needs a = b = 0 (got a = {a}, b = {b})")]
    NotCentral { a: f64, b: f64 },
    #[error("unknown table id {0} (expected 1..=4)")]
    UnknownTable(u32),
    #[error("table data line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// Which sign and square-root conventions a residual is evaluated with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BranchStrategy {
    /// Overall sign of the right-hand side.
    pub sigma_rhs: Sign,
    /// Sign attached to the large radical in the Kratzer denominator.
    pub sigma_inner: Sign,
    pub sqrt_mode: SqrtMode,
}

impl BranchStrategy {
    pub const fn canonical() -> Self {
        Self { sigma_rhs: Sign::Plus, sigma_inner: Sign::Plus, sqrt_mode: SqrtMode::Principal }
    }

    pub fn all() -> [Self; 8] {
        let mut out = [Self::canonical(); 8];
        let mut i = 0;
        for sqrt_mode in [SqrtMode::Principal, SqrtMode::ModulusReal] {
            for sigma_inner in [Sign::Plus, Sign::Minus] {
                for sigma_rhs in [Sign::Plus, Sign::Minus] {
                    out[i] = Self { sigma_rhs, sigma_inner, sqrt_mode };
                    i += 1;
                }
            }
        }
        out
    }

    pub fn with_rhs(sigma_rhs: Sign) -> Self {
        Self { sigma_rhs, ..Self::canonical() }
    }

    pub fn flip_rhs(self) -> Self {
        Self { sigma_rhs: self.sigma_rhs.flipped(), ..self }
    }

    pub fn label(&self) -> String {
        let mode = match self.sqrt_mode {
            SqrtMode::Principal => "principal",
            SqrtMode::ModulusReal => "modulus",
        };
        format!("rhs{}/inner{}/{}", self.sigma_rhs.symbol(), self.sigma_inner.symbol(), mode)
    }
}

impl fmt::Display for BranchStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RootClass {
    /// Real root on the canonical branch.
    A,
    /// Real root that needs the right-hand-side sign flipped (a squaring artefact).
    B,
    /// Complex root of the principal condition (either right-hand sign);
    /// its real part is what gets tabulated.
    C,
    /// Anything else: non-canonical inner sign or modulus square roots, or
    /// an audited value with no matching root.
    D,
}

impl RootClass {
    pub fn letter(self) -> char {
        match self {
            RootClass::A => 'A',
            RootClass::B => 'B',
            RootClass::C => 'C',
            RootClass::D => 'D',
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim() {
            "A" => Some(RootClass::A),
            "B" => Some(RootClass::B),
            "C" => Some(RootClass::C),
            "D" => Some(RootClass::D),
            _ => None,
        }
    }

    /// Class of a real root found on `branch`.
    pub fn of_real_root(branch: &BranchStrategy) -> Self {
        if branch.sqrt_mode != SqrtMode::Principal || branch.sigma_inner == Sign::Minus {
            RootClass::D
        } else if branch.sigma_rhs == Sign::Plus {
            RootClass::A
        } else {
            RootClass::B
        }
    }
}

impl fmt::Display for RootClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassifiedRoot {
    /// Full complex root. Tables report its real part.
    pub energy: C64,
    pub branch: BranchStrategy,
    pub residual_norm: f64,
    pub root_class: RootClass,
}

impl ClassifiedRoot {
    pub fn reported(&self) -> f64 {
        self.energy.re
    }
}

/// ℓ + ½ = √(aγ+¼) + √(bγ+m²) + 2n′ + 1.
pub fn angular_quantization(gamma: C64, ring: &RingParams, m: i32, n_prime: u32, mode: SqrtMode) -> C64 {
    let m2 = f64::from(m).powi(2);
    sqrt_with(gamma * ring.a + 0.25, mode) + sqrt_with(gamma * ring.b + m2, mode) + 2.0 * f64::from(n_prime) + 1.0
}

const POLE_EPS: f64 = 1e-12;

/// Kratzer spectral condition. Zero exactly at a spectrum point of `branch`.
pub fn residual_drsk(e: C64, spec: &ProblemSpec, branch: &BranchStrategy) -> Result<C64, SpectrumError> {
    let PotentialKind::Kratzer { de, re } = spec.potential else {
        return Err(SpectrumError::WrongPotential { expected: "kratzer" });
    };
    let co = derive_coefficients_with(spec, e, branch.sqrt_mode);
    let g = spec.coupling(e);
    let s = sqrt_with(co.ell_eff * co.ell_eff + g * de * re * re, branch.sqrt_mode);
    let denom = f64::from(spec.qn.n) + 0.5 + s * branch.sigma_inner.value();
    let (m, c) = (spec.physical.mass, spec.physical.symmetry_constant);
    let lhs_den = match spec.symmetry {
        SymmetryKind::Pseudospin => m - e + c,
        SymmetryKind::Spin => m + e - c,
    };
    if lhs_den.norm() < POLE_EPS || denom.norm() < POLE_EPS {
        return Err(SpectrumError::Pole(e));
    }
    let rhs = branch.sigma_rhs.value() * (de * de * re * re) / (denom * denom);
    Ok(match spec.symmetry {
        SymmetryKind::Pseudospin => (e + m) / lhs_den - rhs,
        SymmetryKind::Spin => (e - m) / lhs_den + rhs,
    })
}

/// d(E) = √(aγ+¼) + √(bγ+m²) + 2n′ + 2 + 2n.
fn oscillator_d(spec: &ProblemSpec, e: C64, mode: SqrtMode) -> C64 {
    let g = spec.coupling(e);
    angular_quantization(g, &spec.ring, spec.qn.m, spec.qn.n_prime, mode) + 1.0 + 2.0 * f64::from(spec.qn.n)
}

/// Oscillator spectral condition. σ_inner plays no role here.
pub fn residual_drso(e: C64, spec: &ProblemSpec, branch: &BranchStrategy) -> Result<C64, SpectrumError> {
    let PotentialKind::Oscillator { k } = spec.potential else {
        return Err(SpectrumError::WrongPotential { expected: "oscillator" });
    };
    let k = k * spec.potential_sign.value();
    let (m, c) = (spec.physical.mass, spec.physical.symmetry_constant);
    let mode = branch.sqrt_mode;
    let d = oscillator_d(spec, e, mode);
    let sr = branch.sigma_rhs.value();
    Ok(match spec.symmetry {
        SymmetryKind::Pseudospin => {
            (e + m) * sqrt_with(e - m - c, mode) - sr * sqrt_with(C64::new(-2.0 * k, 0.0), mode) * d
        }
        SymmetryKind::Spin => (m - e) * sqrt_with(c - e - m, mode) - sr * sqrt_with(C64::new(2.0 * k, 0.0), mode) * d,
    })
}

/// Dispatches on the potential kind.
pub fn residual(e: C64, spec: &ProblemSpec, branch: &BranchStrategy) -> Result<C64, SpectrumError> {
    match spec.potential {
        PotentialKind::Kratzer { .. } => residual_drsk(e, spec, branch),
        PotentialKind::Oscillator { .. } => residual_drso(e, spec, branch),
    }
}

/// Squared oscillator condition as a real cubic (c3, c2, c1, c0), monic.
/// Pseudospin: (M+E)²(E−M−C_ps) + 2k d² = 0; spin: (E−M)²(E−(C_s−M)) + 2k d² = 0
/// (the spin form (M−E)²(C_s−E−M) − 2k d² = 0 multiplied by −1).
pub fn squared_polynomial_drso(spec: &ProblemSpec) -> Result<[f64; 4], SpectrumError> {
    let PotentialKind::Oscillator { k } = spec.potential else {
        return Err(SpectrumError::WrongPotential { expected: "oscillator" });
    };
    if spec.ring.a != 0.0 || spec.ring.b != 0.0 {
        return Err(SpectrumError::NotCentral { a: spec.ring.a, b: spec.ring.b });
    }
    let k = k * spec.potential_sign.value();
    let d = 0.5 + f64::from(spec.qn.m.unsigned_abs()) + 2.0 * f64::from(spec.qn.n_prime) + 2.0 + 2.0 * f64::from(spec.qn.n);
    let (m, c) = (spec.physical.mass, spec.physical.symmetry_constant);
    let tail = 2.0 * k * d * d;
    Ok(match spec.symmetry {
        SymmetryKind::Pseudospin => {
            let q = m + c;
            [1.0, 2.0 * m - q, m * m - 2.0 * m * q, -m * m * q + tail]
        }
        SymmetryKind::Spin => {
            let q = c - m;
            [1.0, -2.0 * m - q, m * m + 2.0 * m * q, -m * m * q + tail]
        }
    })
}

/// Spin ↔ pseudospin map: symmetry flips, C → −C, V → −V (via the
/// potential sign), E → −E at evaluation time. An involution.
pub fn spin_pseudospin_map(spec: &ProblemSpec) -> ProblemSpec {
    let mut out = *spec;
    out.symmetry = spec.symmetry.flipped();
    out.physical.symmetry_constant = -spec.physical.symmetry_constant;
    out.potential_sign = spec.potential_sign.flipped();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::QuantumNumbers;

    fn r(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    fn spec(sym: SymmetryKind, kratzer: bool, a: f64, b: f64, n: u32, np: u32, m: i32) -> ProblemSpec {
        ProblemSpec::reference(sym, kratzer, a, b, QuantumNumbers::new(n, np, m))
    }

    #[test]
    fn eight_distinct_strategies() {
        let all = BranchStrategy::all();
        for i in 0..8 {
            for j in 0..i {
                assert_ne!(all[i], all[j]);
            }
        }
        assert_eq!(all[0], BranchStrategy::canonical());
    }

    #[test]
    fn angular_quantization_examples() {
        let p = SqrtMode::Principal;
        let central = RingParams::central();
        assert_eq!(angular_quantization(r(-3.7), &central, 0, 0, p), r(1.5));
        assert_eq!(angular_quantization(r(8.1), &central, 1, 1, p), r(4.5));
        let ring = RingParams { a: 1.0, b: 1.0 };
        let l = angular_quantization(r(2.072188142), &ring, 0, 0, p);
        assert!((l.re - 3.963382433).abs() < 1e-8);
    }

    #[test]
    fn kratzer_residual_examples() {
        let ps = spec(SymmetryKind::Pseudospin, true, 0.0, 0.0, 0, 0, 0);
        let canon = BranchStrategy::canonical();
        // published values carry 9-10 digits; measure the Newton distance to the root
        let newton_distance = |e: f64, s: &ProblemSpec, b: &BranchStrategy| {
            let f = |x: f64| residual_drsk(r(x), s, b).unwrap();
            let d = (f(e + 1e-7) - f(e - 1e-7)) / 2e-7;
            (f(e) / d).norm()
        };
        assert!(newton_distance(-0.361711704, &ps, &canon) < 1e-6);
        assert!(residual_drsk(r(-0.3617126647856243), &ps, &canon).unwrap().norm() < 1e-12);
        let flipped = BranchStrategy::with_rhs(Sign::Minus);
        assert!(residual_drsk(r(1.666666667), &ps, &flipped).unwrap().norm() < 1e-6);
        let sp = spec(SymmetryKind::Spin, true, 1.0, 1.0, 0, 0, 0);
        assert!(residual_drsk(r(2.072188142), &sp, &canon).unwrap().norm() < 1e-6);
    }

    #[test]
    fn kratzer_pole_reported() {
        let ps = spec(SymmetryKind::Pseudospin, true, 0.0, 0.0, 0, 0, 0);
        // M − E + C_ps = 0 at E = 0
        assert_eq!(residual_drsk(r(0.0), &ps, &BranchStrategy::canonical()), Err(SpectrumError::Pole(r(0.0))));
    }

    #[test]
    fn oscillator_residual_examples() {
        let canon = BranchStrategy::canonical();
        let ps = spec(SymmetryKind::Pseudospin, false, 0.0, 0.0, 0, 0, 0);
        assert!(residual_drso(r(-0.6652434115), &ps, &canon).unwrap().norm() < 1e-6);
        assert!(residual_drso(r(-2.9369721387265), &ps, &canon).unwrap().norm() < 1e-11);
        let sp = spec(SymmetryKind::Spin, false, 0.0, 0.0, 0, 0, 0);
        assert!(residual_drso(r(-0.424764518), &sp, &canon).unwrap().norm() < 1e-6);
    }

    #[test]
    fn wrong_potential_rejected() {
        let sp = spec(SymmetryKind::Spin, false, 0.0, 0.0, 0, 0, 0);
        assert!(residual_drsk(r(1.0), &sp, &BranchStrategy::canonical()).is_err());
        let sk = spec(SymmetryKind::Spin, true, 0.0, 0.0, 0, 0, 0);
        assert!(residual_drso(r(1.0), &sk, &BranchStrategy::canonical()).is_err());
        assert!(squared_polynomial_drso(&sk).is_err());
    }

    #[test]
    fn squared_polynomial_examples() {
        let ps = spec(SymmetryKind::Pseudospin, false, 0.0, 0.0, 0, 0, 0);
        assert_eq!(squared_polynomial_drso(&ps).unwrap(), [1.0, 10.0, 25.0, 12.5]);
        let ps1 = spec(SymmetryKind::Pseudospin, false, 0.0, 0.0, 1, 0, 0);
        assert_eq!(squared_polynomial_drso(&ps1).unwrap(), [1.0, 10.0, 25.0, 40.5]);
        let sp = spec(SymmetryKind::Spin, false, 0.0, 0.0, 0, 0, 0);
        assert_eq!(squared_polynomial_drso(&sp).unwrap(), [1.0, -10.0, 25.0, 12.5]);
        let ring = spec(SymmetryKind::Spin, false, 1.0, 0.0, 0, 0, 0);
        assert!(matches!(squared_polynomial_drso(&ring), Err(SpectrumError::NotCentral { .. })));
    }

    #[test]
    fn map_examples() {
        let ps = spec(SymmetryKind::Pseudospin, true, 1.0, 1.0, 0, 0, 0);
        let mapped = spin_pseudospin_map(&ps);
        assert_eq!(mapped.symmetry, SymmetryKind::Spin);
        assert_eq!(mapped.physical.mass, 5.0);
        assert_eq!(mapped.physical.symmetry_constant, 5.0);
        assert_eq!(spin_pseudospin_map(&mapped), ps);
    }
}
