//! Finite-difference eigensolvers for the separated radial and polar
//! equations, and a self-consistent loop over the energy-dependent coupling.
//!
//! Nothing here uses the closed-form spectra, so these serve as independent
//! checks on them.

use crate::model::{PotentialKind, ProblemSpec, QuantumNumbers, RingParams, SymmetryKind};
use num_complex::Complex64 as C64;
use serde::Serialize;
use std::f64::consts::FRAC_PI_2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid too coarse: {nodes} nodes for {count} eigenvalues (need at least 10 per eigenvalue)")]
    GridTooCoarse { nodes: usize, count: usize },
    #[error("complex angular sector: a*gamma + 1/4 = {a_radicand}, b*gamma + m^2 = {b_radicand}")]
    ComplexSector { a_radicand: f64, b_radicand: f64 },
    #[error("potential is not finite at r = {0}")]
    NonFinitePotential(f64),
    #[error("no bound state: {0}")]
    NoBoundState(String),
    #[error("self-consistent iteration diverged after {iterations} steps (last E = {last})")]
    Divergence { iterations: usize, last: f64 },
}

/// Uniform grid of interior nodes on (lo, hi) with Dirichlet ends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdGrid {
    lo: f64,
    hi: f64,
    nodes: usize,
}

impl FdGrid {
    pub const MIN_NODES: usize = 50;

    pub fn new(lo: f64, hi: f64, nodes: usize) -> Result<Self, OracleError> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(OracleError::InvalidGrid(format!("endpoints {lo} and {hi} are not strictly ordered")));
        }
        if nodes < Self::MIN_NODES {
            return Err(OracleError::InvalidGrid(format!("{nodes} nodes, need at least {}", Self::MIN_NODES)));
        }
        Ok(Self { lo, hi, nodes })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn h(&self) -> f64 {
        (self.hi - self.lo) / (self.nodes + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        self.lo + (i + 1) as f64 * self.h()
    }
}

/// Symmetric tridiagonal matrix: `diag[i]`, and `off[i]` coupling i and i+1.
#[derive(Debug, Clone)]
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    /// Number of eigenvalues strictly below x (negative pivots of T − x).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let coupling = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / q };
            q = self.diag[i] - x - coupling;
            if q == 0.0 {
                q = -f64::EPSILON * (1.0 + x.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.diag.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// The `count` lowest eigenvalues by Sturm bisection.
    fn lowest(&self, count: usize) -> Vec<f64> {
        let (glo, ghi) = self.gershgorin();
        (0..count)
            .map(|k| {
                let (mut lo, mut hi) = (glo, ghi);
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi || hi - lo <= 4.0 * f64::EPSILON * mid.abs().max(1.0) {
                        break;
                    }
                    if self.count_below(mid) > k {
                        hi = mid;
                    } else {
                        lo = mid;
                    }
                }
                0.5 * (lo + hi)
            })
            .collect()
    }
}

/// Lowest `count` eigenvalues of −d²/dr² + V on `grid`.
pub fn fd_radial_eigs(v: &dyn Fn(f64) -> f64, grid: &FdGrid, count: usize) -> Result<Vec<f64>, OracleError> {
    if grid.nodes < 10 * count {
        return Err(OracleError::GridTooCoarse { nodes: grid.nodes, count });
    }
    let h2 = grid.h() * grid.h();
    let diag = (0..grid.nodes)
        .map(|i| {
            let r = grid.node(i);
            let value = v(r);
            if value.is_finite() {
                Ok(2.0 / h2 + value)
            } else {
                Err(OracleError::NonFinitePotential(r))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let off = vec![-1.0 / h2; grid.nodes - 1];
    Ok(Tridiagonal { diag, off }.lowest(count))
}

/// Domain and step control for [`fd_radial_levels`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialFd {
    /// Initial r_max in units of the length scale.
    pub extent: f64,
    /// Grid points per unit of the length scale.
    pub points_per_scale: f64,
    /// Convergence threshold on eigenvalue shifts when r_max doubles.
    pub shift_tol: f64,
    pub max_doublings: usize,
    pub richardson: bool,
}

impl Default for RadialFd {
    fn default() -> Self {
        Self { extent: 25.0, points_per_scale: 400.0, shift_tol: 1e-8, max_doublings: 4, richardson: true }
    }
}

/// Radial levels on (0, r_max): r_max starts at `extent * scale` and doubles
/// at fixed h until the levels stop moving, then one Richardson step in h.
pub fn fd_radial_levels(
    v: &dyn Fn(f64) -> f64,
    scale: f64,
    count: usize,
    opts: &RadialFd,
) -> Result<Vec<f64>, OracleError> {
    if !(scale.is_finite() && scale > 0.0) {
        return Err(OracleError::InvalidGrid(format!("length scale {scale}")));
    }
    let h = scale / opts.points_per_scale;
    let grid_for = |r_max: f64, step: f64| {
        let nodes = ((r_max / step).round() as usize).saturating_sub(1).max(FdGrid::MIN_NODES);
        FdGrid::new(0.0, (nodes + 1) as f64 * step, nodes)
    };
    let mut r_max = opts.extent * scale;
    let mut levels = fd_radial_eigs(v, &grid_for(r_max, h)?, count)?;
    let mut settled = false;
    for _ in 0..opts.max_doublings {
        r_max *= 2.0;
        let next = fd_radial_eigs(v, &grid_for(r_max, h)?, count)?;
        let shift = levels.iter().zip(&next).map(|(a, b)| (a - b).abs() / a.abs().max(1.0)).fold(0.0, f64::max);
        levels = next;
        if shift < opts.shift_tol {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(OracleError::NoBoundState(format!(
            "levels still move when the domain grows to r_max = {r_max:.3}"
        )));
    }
    if opts.richardson {
        let fine = fd_radial_eigs(v, &grid_for(r_max, 0.5 * h)?, count)?;
        levels = levels.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect();
    }
    Ok(levels)
}

/// Cell count of the coarse polar grid; the fine grid doubles it.
pub const ANGULAR_CELLS: usize = 2000;

/// Eigenvalues (ℓ+½)² of the polar equation at coupling γ, extrapolated
/// from two grids.
pub fn fd_angular_eigs(gamma: f64, ring: &RingParams, m: i32, count: usize) -> Result<Vec<f64>, OracleError> {
    let coarse = fd_angular_eigs_on(gamma, ring, m, count, ANGULAR_CELLS)?;
    let fine = fd_angular_eigs_on(gamma, ring, m, count, 2 * ANGULAR_CELLS)?;
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

/// Single-grid polar solve. The equation is taken in Sturm-Liouville form
/// −(sinθ f′)′ + sinθ·V f = λ sinθ f on (0, π/2) with
/// V = (m² + γb)/sin²θ + γa/cos²θ and (ℓ+½)² = λ + ¼; bounded at θ = 0,
/// vanishing at π/2. Cell-centred, so neither singular point is sampled.
pub fn fd_angular_eigs_on(
    gamma: f64,
    ring: &RingParams,
    m: i32,
    count: usize,
    cells: usize,
) -> Result<Vec<f64>, OracleError> {
    let m2 = f64::from(m).powi(2);
    let a_radicand = ring.a * gamma + 0.25;
    let b_radicand = ring.b * gamma + m2;
    if !(gamma.is_finite() && a_radicand >= 0.0 && b_radicand >= 0.0) {
        return Err(OracleError::ComplexSector { a_radicand, b_radicand });
    }
    if cells < FdGrid::MIN_NODES || cells < 10 * count {
        return Err(OracleError::GridTooCoarse { nodes: cells, count });
    }
    let h = FRAC_PI_2 / cells as f64;
    let h2 = h * h;
    let face = |j: usize| (j as f64 * h).sin();
    let mut weight = Vec::with_capacity(cells);
    let mut diag = Vec::with_capacity(cells);
    for i in 0..cells {
        let theta = (i as f64 + 0.5) * h;
        let (s, c) = theta.sin_cos();
        let right = if i + 1 == cells { 2.0 * face(cells) } else { face(i + 1) };
        let v = b_radicand / (s * s) + gamma * ring.a / (c * c);
        weight.push(s);
        diag.push((face(i) + right) / h2 + s * v);
    }
    let off: Vec<f64> = (0..cells - 1).map(|i| -face(i + 1) / h2 / (weight[i] * weight[i + 1]).sqrt()).collect();
    let diag: Vec<f64> = diag.iter().zip(&weight).map(|(d, w)| d / w).collect();
    Ok(Tridiagonal { diag, off }.lowest(count).into_iter().map(|l| l + 0.25).collect())
}

/// Iteration control for the self-consistent solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfConsistentOptions {
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Offset of the second secant seed from the initial energy.
    pub seed_step: f64,
    pub radial: RadialFd,
}

impl Default for SelfConsistentOptions {
    fn default() -> Self {
        Self { max_iterations: 200, tolerance: 1e-10, seed_step: 1e-3, radial: RadialFd::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SelfConsistentResult {
    pub energy: f64,
    pub iterations: usize,
    /// ℓ + ½ from the polar solve at the converged coupling.
    pub ell_eff: f64,
    /// Radial eigenvalue at the converged energy.
    pub radial_eigenvalue: f64,
}

/// Open energy interval in which the radial equation can have a decaying
/// solution: (C_s − M, M) for spin, (−M, M + C_ps) for pseudospin.
pub fn bound_window(spec: &ProblemSpec) -> (f64, f64) {
    let (m, c) = (spec.physical.mass, spec.physical.symmetry_constant);
    match spec.symmetry {
        SymmetryKind::Spin => (c - m, m),
        SymmetryKind::Pseudospin => (-m, m + c),
    }
}

/// Radial eigenvalue that the energy E requires: −β² for spin, β̃² for
/// pseudospin.
pub fn target_eigenvalue(spec: &ProblemSpec, e: f64) -> f64 {
    let b = spec.beta_sq(C64::new(e, 0.0)).re;
    match spec.symmetry {
        SymmetryKind::Spin => -b,
        SymmetryKind::Pseudospin => b,
    }
}

/// ℓ + ½ for polar index n′ at coupling g.
fn polar_ell(g: f64, ring: &RingParams, qn: &QuantumNumbers) -> Result<f64, OracleError> {
    let eigs = fd_angular_eigs(g, ring, qn.m, qn.n_prime as usize + 1)?;
    Ok(eigs[qn.n_prime as usize].sqrt())
}

/// Radial level n of −u″ + [(L² − ¼)/r² + g·V(r)]u.
fn radial_level(
    potential: &PotentialKind,
    g: f64,
    ell_eff: f64,
    n: u32,
    opts: &RadialFd,
) -> Result<f64, OracleError> {
    let centrifugal = ell_eff * ell_eff - 0.25;
    let scale = match *potential {
        PotentialKind::Kratzer { de, re } => {
            let inverse_square = centrifugal + g * de * re * re;
            let coulomb = 2.0 * g * de * re;
            if inverse_square < -0.25 {
                return Err(OracleError::NoBoundState(format!("1/r^2 coefficient {inverse_square} falls to the centre")));
            }
            if coulomb <= 0.0 {
                return Err(OracleError::NoBoundState(format!("Coulomb strength {coulomb} is not attractive")));
            }
            // hydrogenic decay length for the level
            let nu = 0.5 + (inverse_square + 0.25).sqrt() + f64::from(n);
            2.0 * nu / coulomb
        }
        PotentialKind::Oscillator { k } => {
            if g * k <= 0.0 {
                return Err(OracleError::NoBoundState(format!("oscillator coupling {g} is not confining")));
            }
            if centrifugal < -0.25 {
                return Err(OracleError::NoBoundState(format!("1/r^2 coefficient {centrifugal} falls to the centre")));
            }
            (0.5 * g * k).powf(-0.25) * (1.0 + f64::from(n)).sqrt()
        }
    };
    let potential = *potential;
    let v = move |r: f64| centrifugal / (r * r) + g * potential.radial(r);
    let levels = fd_radial_levels(&v, scale, n as usize + 1, opts)?;
    Ok(levels[n as usize])
}

fn mismatch_parts(spec: &ProblemSpec, e: f64, radial: &RadialFd) -> Result<(f64, f64, f64), OracleError> {
    let g = spec.coupling(C64::new(e, 0.0)).re;
    let ell = polar_ell(g, &spec.ring, &spec.qn)?;
    let eps = radial_level(&spec.potential, g, ell, spec.qn.n, radial)?;
    Ok((eps - target_eigenvalue(spec, e), ell, eps))
}

/// Radial eigenvalue at E minus the value E requires; zero at a
/// self-consistent energy.
pub fn self_consistent_mismatch(spec: &ProblemSpec, e: f64, radial: &RadialFd) -> Result<f64, OracleError> {
    Ok(mismatch_parts(spec, e, radial)?.0)
}

/// Solves for E such that the radial eigenvalue at the coupling γ(E),
/// with ℓ from the polar equation at the same coupling, equals the value E
/// requires. Secant steps from `initial`; if one leaves the bound-state
/// window, a sign change is bracketed by stepping outward from `initial`
/// and closed by Illinois regula falsi. Every mismatch evaluation counts
/// against `max_iterations`.
pub fn self_consistent_energy(
    spec: &ProblemSpec,
    initial: f64,
    opts: &SelfConsistentOptions,
) -> Result<SelfConsistentResult, OracleError> {
    let (lo, hi) = bound_window(spec);
    let inside = |e: f64| e > lo && e < hi;
    if !inside(initial) {
        return Err(OracleError::NoBoundState(format!("initial energy {initial} outside ({lo}, {hi})")));
    }
    let mut evaluations = 0;
    let mut evaluate = |e: f64| -> Result<Option<(f64, f64, f64)>, OracleError> {
        evaluations += 1;
        if evaluations > opts.max_iterations {
            return Err(OracleError::Divergence { iterations: opts.max_iterations, last: e });
        }
        match mismatch_parts(spec, e, &opts.radial) {
            Ok(v) => Ok(Some(v)),
            Err(OracleError::NoBoundState(_) | OracleError::ComplexSector { .. }) => Ok(None),
            Err(err) => Err(err),
        }
    };
    let done = |e: f64, (_, ell, eps): (f64, f64, f64), iterations: usize| SelfConsistentResult {
        energy: e,
        iterations,
        ell_eff: ell,
        radial_eigenvalue: eps,
    };

    // secant phase
    let first = evaluate(initial)?;
    if let Some(p0) = first {
        let mut x0 = initial;
        let mut f0 = p0.0;
        let mut x1 = if inside(initial + opts.seed_step) { initial + opts.seed_step } else { initial - opts.seed_step };
        let mut p1 = evaluate(x1)?;
        let mut step = 1;
        while let Some(parts) = p1 {
            let f1 = parts.0;
            if f1 == 0.0 || (step > 1 && (x1 - x0).abs() < opts.tolerance) {
                return Ok(done(x1, parts, step));
            }
            if f1 == f0 {
                break;
            }
            let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
            if !x2.is_finite() || !inside(x2) {
                break;
            }
            (x0, f0, x1) = (x1, f1, x2);
            p1 = evaluate(x1)?;
            step += 1;
        }
    }

    // bracketing phase
    let delta = (hi - lo) / 64.0;
    let mut left = first.map(|p| (initial, p.0));
    let mut right = left;
    let mut bracket = None;
    for k in 1..64 {
        for (dir, last) in [(1.0, &mut right), (-1.0, &mut left)] {
            let x = initial + dir * k as f64 * delta;
            if !inside(x) || bracket.is_some() {
                continue;
            }
            let here = evaluate(x)?.map(|p| (x, p.0));
            if let (Some((xa, fa)), Some((xb, fb))) = (*last, here) {
                if fa.signum() != fb.signum() {
                    bracket = Some(((xa, fa), (xb, fb)));
                }
            }
            *last = here;
        }
        if bracket.is_some() || (!inside(initial + k as f64 * delta) && !inside(initial - k as f64 * delta)) {
            break;
        }
    }
    let Some(((mut a, mut fa), (mut b, mut fb))) = bracket else {
        return Err(OracleError::Divergence { iterations: evaluations, last: initial });
    };
    let mut kept_side = 0i8;
    loop {
        let x = (a * fb - b * fa) / (fb - fa);
        let Some(parts) = evaluate(x)? else {
            return Err(OracleError::Divergence { iterations: evaluations, last: x });
        };
        let fx = parts.0;
        if fx == 0.0 || (b - a).abs() < opts.tolerance || (x - a).abs().min((x - b).abs()) < 0.1 * opts.tolerance {
            return Ok(done(x, parts, evaluations));
        }
        if fx.signum() == fa.signum() {
            (a, fa) = (x, fx);
            if kept_side == 1 {
                fb *= 0.5;
            }
            kept_side = 1;
        } else {
            (b, fb) = (x, fx);
            if kept_side == -1 {
                fa *= 0.5;
            }
            kept_side = -1;
        }
    }
}

/// Non-relativistic counterpart: the coupling is fixed at 2μ/ħ², so the
/// energy follows from one polar and one radial solve.
pub fn self_consistent_energy_nr(
    params: &crate::nonrel::NonRelParams,
    qn: &QuantumNumbers,
    opts: &RadialFd,
) -> Result<f64, OracleError> {
    let g = params.coupling();
    let ell = polar_ell(g, &params.ring, qn)?;
    Ok(radial_level(&params.potential, g, ell, qn.n, opts)? / g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_on_diagonal() {
        let t = Tridiagonal { diag: vec![1.0, 2.0, 3.0], off: vec![0.0, 0.0] };
        assert_eq!(t.count_below(2.5), 2);
        let eigs = t.lowest(3);
        for (got, want) in eigs.iter().zip([1.0, 2.0, 3.0]) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_rules() {
        assert!(FdGrid::new(1.0, 0.0, 100).is_err());
        assert!(FdGrid::new(0.0, 1.0, 49).is_err());
        let g = FdGrid::new(0.0, 1.0, 99).unwrap();
        assert!((g.h() - 0.01).abs() < 1e-15);
        let v = |_r: f64| 0.0;
        assert!(matches!(fd_radial_eigs(&v, &g, 10), Err(OracleError::GridTooCoarse { .. })));
    }

    #[test]
    fn infinite_well() {
        let g = FdGrid::new(0.0, 1.0, 999).unwrap();
        let e = fd_radial_eigs(&|_r: f64| 0.0, &g, 2).unwrap();
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((e[0] / pi2 - 1.0).abs() < 1e-5);
        assert!((e[1] / (4.0 * pi2) - 1.0).abs() < 1e-5);
    }

    #[test]
    fn complex_polar_sector_rejected() {
        let ring = RingParams { a: 1.0, b: 0.0 };
        assert!(matches!(fd_angular_eigs(-1.0, &ring, 0, 1), Err(OracleError::ComplexSector { .. })));
    }
}
