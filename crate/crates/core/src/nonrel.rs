//! Non-relativistic limit: closed-form spectra, the oscillator reduction
//! check, and wavefunctions with the barred parameters.

use crate::model::{PotentialKind, QuantumNumbers, RingParams};
use crate::oracle::{fd_radial_levels, OracleError, RadialFd};
use crate::wavefun::{component_value, norm_integral, RadialShape, WaveParams, WavefunError};
use num_complex::Complex64 as C64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NonRelError {
    #[error("invalid parameter {name} = {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("operation needs the {expected} potential")]
    WrongPotential { expected: &'static str },
    #[error("energy {0} is not a bound Kratzer level")]
    Unbound(f64),
    #[error(transparent)]
    Wavefun(#[from] WavefunError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonRelParams {
    pub mu: f64,
    pub hbar: f64,
    pub potential: PotentialKind,
    pub ring: RingParams,
}

impl NonRelParams {
    pub fn new(mu: f64, hbar: f64, potential: PotentialKind, ring: RingParams) -> Result<Self, NonRelError> {
        for (name, value) in [("mu", mu), ("hbar", hbar)] {
            if !(value.is_finite() && value > 0.0) {
                return Err(NonRelError::InvalidParameter { name, value });
            }
        }
        Ok(Self { mu, hbar, potential, ring })
    }

    /// 2μ/ħ², the coupling that replaces γ in the relativistic formulas.
    pub fn coupling(&self) -> f64 {
        2.0 * self.mu / (self.hbar * self.hbar)
    }

    fn radicals(&self, m: i32) -> (f64, f64) {
        let g = self.coupling();
        ((g * self.ring.a + 0.25).sqrt(), (g * self.ring.b + f64::from(m).powi(2)).sqrt())
    }

    /// ℓ + ½ = √(2μa/ħ²+¼) + √(2μb/ħ²+m²) + 2n′ + 1.
    pub fn ell_eff(&self, qn: &QuantumNumbers) -> f64 {
        let (ra, rb) = self.radicals(qn.m);
        ra + rb + 2.0 * f64::from(qn.n_prime) + 1.0
    }
}

pub fn energy_kratzer_nr(p: &NonRelParams, qn: &QuantumNumbers) -> Result<f64, NonRelError> {
    let PotentialKind::Kratzer { de, re } = p.potential else {
        return Err(NonRelError::WrongPotential { expected: "kratzer" });
    };
    let g = p.coupling();
    let l = p.ell_eff(qn);
    let denom = f64::from(qn.n) + 0.5 + (l * l + g * de * re * re).sqrt();
    Ok(-g * de * de * re * re / (denom * denom))
}

pub fn energy_oscillator_nr(p: &NonRelParams, qn: &QuantumNumbers) -> Result<f64, NonRelError> {
    let PotentialKind::Oscillator { k } = p.potential else {
        return Err(NonRelError::WrongPotential { expected: "oscillator" });
    };
    let (ra, rb) = p.radicals(qn.m);
    Ok(p.hbar * (k / p.mu).sqrt() * (ra + rb + 2.0 * f64::from(qn.n_prime + qn.n + 1)))
}

/// Outcome of checking E = √(k/μ)(2n + 3/2 + ℓ) against the closed form
/// evaluated with 2n′ + ½ = ℓ and against a finite-difference solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReductionReport {
    pub ell: u32,
    pub n: u32,
    pub closed_form: f64,
    pub claimed: f64,
    pub finite_difference: f64,
    pub closed_form_offset: f64,
    pub finite_difference_offset: f64,
    pub consistent: bool,
}

impl std::fmt::Display for ReductionReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "l={} n={}: closed form {:.6} | claimed {:.6} | finite difference {:.6} | offsets {:+.6} {:+.2e}{}",
            self.ell,
            self.n,
            self.closed_form,
            self.claimed,
            self.finite_difference,
            self.closed_form_offset,
            self.finite_difference_offset,
            if self.consistent { "" } else { " | DISCREPANCY" }
        )
    }
}

/// Reports, does not assert: the substitution is known to disagree by ½ħω.
pub fn reduction_check_oscillator(p: &NonRelParams, ell: u32, n: u32) -> Result<ReductionReport, NonRelError> {
    let PotentialKind::Oscillator { k } = p.potential else {
        return Err(NonRelError::WrongPotential { expected: "oscillator" });
    };
    if p.ring.a != 0.0 || p.ring.b != 0.0 {
        return Err(NonRelError::InvalidParameter { name: "a or b", value: p.ring.a.max(p.ring.b) });
    }
    let omega = (k / p.mu).sqrt();
    let l = f64::from(ell);
    // closed form with m = 0 and the non-integer n′ = (ℓ − ½)/2
    let closed_form = p.hbar * omega * (0.5 + 0.0 + 2.0 * ((l - 0.5) / 2.0 + f64::from(n) + 1.0));
    let claimed = p.hbar * omega * (2.0 * f64::from(n) + 1.5 + l);
    // −u″ + (ℓ(ℓ+1)/r² + μk r²/ħ²) u = (2μE/ħ²) u
    let g = p.coupling();
    let mk = p.mu * k / (p.hbar * p.hbar);
    let v = move |r: f64| l * (l + 1.0) / (r * r) + mk * r * r;
    let scale = (1.0 / mk.sqrt()).sqrt() * (1.0 + (l + 2.0 * f64::from(n)).sqrt()) / 5.0;
    let levels = fd_radial_levels(&v, scale, n as usize + 1, &RadialFd::default())?;
    let finite_difference = levels[n as usize] / g;
    Ok(ReductionReport {
        ell,
        n,
        closed_form,
        claimed,
        finite_difference,
        closed_form_offset: closed_form - claimed,
        finite_difference_offset: finite_difference - claimed,
        consistent: (closed_form - claimed).abs() < 1e-9,
    })
}

/// Exponents of the non-relativistic state at `energy`.
pub fn nr_wave_params(p: &NonRelParams, qn: &QuantumNumbers, energy: f64) -> Result<WaveParams, NonRelError> {
    let g = p.coupling();
    let (ra, rb) = p.radicals(qn.m);
    let l = p.ell_eff(qn);
    let radial = match p.potential {
        PotentialKind::Kratzer { de, re } => {
            if energy >= 0.0 {
                return Err(NonRelError::Unbound(energy));
            }
            RadialShape::Kratzer { zeta: 0.5 + (l * l + g * de * re * re).sqrt(), kappa: (-g * energy).sqrt() }
        }
        PotentialKind::Oscillator { k } => RadialShape::Oscillator { ell: l - 0.5, w: (p.mu * k).sqrt() / (2.0 * p.hbar) },
    };
    Ok(WaveParams {
        radial,
        eta: 0.25 * (1.0 + 2.0 * rb),
        p: 0.25 * (1.0 + 2.0 * ra),
        n: qn.n,
        n_prime: qn.n_prime,
        m: qn.m,
    })
}

/// A normalized non-relativistic state at its closed-form energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NonRelField {
    pub params: NonRelParams,
    pub qn: QuantumNumbers,
    pub energy: f64,
    pub wave: WaveParams,
    pub normalization: f64,
}

impl NonRelField {
    pub fn new(p: &NonRelParams, qn: QuantumNumbers) -> Result<Self, NonRelError> {
        let energy = match p.potential {
            PotentialKind::Kratzer { .. } => energy_kratzer_nr(p, &qn)?,
            PotentialKind::Oscillator { .. } => energy_oscillator_nr(p, &qn)?,
        };
        let wave = nr_wave_params(p, &qn, energy)?;
        let normalization = norm_integral(&wave)?.powf(-0.5);
        Ok(Self { params: *p, qn, energy, wave, normalization })
    }

    pub fn value(&self, r: f64, theta: f64, phi: f64) -> Result<C64, NonRelError> {
        Ok(component_value(&self.wave, self.normalization, r, theta, phi)?)
    }
}

pub fn wavefunction_nr(p: &NonRelParams, qn: QuantumNumbers, r: f64, theta: f64, phi: f64) -> Result<C64, NonRelError> {
    NonRelField::new(p, qn)?.value(r, theta, phi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kratzer() -> NonRelParams {
        NonRelParams::new(1.0, 1.0, PotentialKind::Kratzer { de: 15.0, re: 0.4 }, RingParams::central()).unwrap()
    }

    fn oscillator(a: f64, b: f64) -> NonRelParams {
        NonRelParams::new(1.0, 1.0, PotentialKind::Oscillator { k: 1.0 }, RingParams { a, b }).unwrap()
    }

    #[test]
    fn kratzer_ground_value() {
        let e = energy_kratzer_nr(&kratzer(), &QuantumNumbers::new(0, 0, 0)).unwrap();
        let want = -72.0 / (0.5 + 7.05f64.sqrt()).powi(2);
        assert!((e - want).abs() < 1e-12);
        assert!((e + 7.2324131).abs() < 1e-7);
        assert!((e / -7.232436 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn oscillator_values() {
        let p = oscillator(0.0, 0.0);
        assert!((energy_oscillator_nr(&p, &QuantumNumbers::new(0, 0, 0)).unwrap() - 2.5).abs() < 1e-14);
        assert!((energy_oscillator_nr(&p, &QuantumNumbers::new(0, 0, 1)).unwrap() - 3.5).abs() < 1e-14);
        assert!(energy_oscillator_nr(&kratzer(), &QuantumNumbers::new(0, 0, 0)).is_err());
    }

    #[test]
    fn invalid_mass_rejected() {
        assert!(NonRelParams::new(0.0, 1.0, PotentialKind::Oscillator { k: 1.0 }, RingParams::central()).is_err());
    }
}
