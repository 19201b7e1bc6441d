use super::{cubic_roots, residual, squared_polynomial_drso, BranchStrategy, ClassifiedRoot, RootClass};
use crate::model::{PotentialKind, ProblemSpec, Sign, SqrtMode};
use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Which classes a search reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    /// Class A only.
    Strict,
    /// Classes A, B and C, as the published tables do.
    PaperCompat,
    /// Everything, Class D included.
    All,
}

impl Mode {
    pub fn admits(self, class: RootClass) -> bool {
        match self {
            Mode::Strict => class == RootClass::A,
            Mode::PaperCompat => class != RootClass::D,
            Mode::All => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOptions {
    /// Real search interval.
    pub interval: (f64, f64),
    pub panels_per_unit: usize,
    /// Acceptance threshold on |residual|.
    pub tolerance: f64,
    /// Merge distance, separately in real and imaginary part.
    pub dedup: f64,
    pub branches: Vec<BranchStrategy>,
    pub max_roots: usize,
    pub mode: Mode,
    /// Largest |Im E| kept for complex roots.
    pub max_imag: f64,
    /// Smallest |Im E| for a root to count as complex.
    pub min_imag: f64,
}

impl SearchOptions {
    /// Defaults: [−M−20, M+20], 2000 panels per unit, tolerance 1e−10, all 8 branches.
    pub fn for_spec(spec: &ProblemSpec, mode: Mode) -> Self {
        let m = spec.physical.mass.abs();
        Self {
            interval: (-m - 20.0, m + 20.0),
            panels_per_unit: 2000,
            tolerance: 1e-10,
            dedup: 1e-8,
            branches: BranchStrategy::all().to_vec(),
            max_roots: 64,
            mode,
            max_imag: 20.0,
            min_imag: 1e-6,
        }
    }
}

fn eval(spec: &ProblemSpec, branch: &BranchStrategy, e: f64) -> Option<C64> {
    residual(C64::new(e, 0.0), spec, branch).ok().filter(|z| z.re.is_finite() && z.im.is_finite())
}

/// Bisects on one component of the residual inside a sign-change bracket.
fn bisect(spec: &ProblemSpec, branch: &BranchStrategy, mut lo: f64, mut hi: f64, take_im: bool) -> Option<f64> {
    let comp = |z: C64| if take_im { z.im } else { z.re };
    let mut flo = comp(eval(spec, branch, lo)?);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = comp(eval(spec, branch, mid)?);
        if fm == 0.0 {
            return Some(mid);
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Real roots of the residual on one branch, by dense sign-change scan of
/// the real and imaginary parts followed by bisection. A candidate is kept
/// only if the full complex residual is below tolerance there, which rejects
/// pole crossings and brackets where the other component does not vanish.
pub fn real_roots_on_branch(spec: &ProblemSpec, branch: &BranchStrategy, opts: &SearchOptions) -> Vec<ClassifiedRoot> {
    let (lo, hi) = opts.interval;
    let panels = (((hi - lo) * opts.panels_per_unit as f64).ceil() as usize).max(1);
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::new();
    let mut prev: Option<(f64, C64)> = None;
    for i in 0..=panels {
        let e = lo + i as f64 * h;
        let cur = eval(spec, branch, e).map(|z| (e, z));
        if let (Some((e0, z0)), Some((e1, z1))) = (prev, cur) {
            for take_im in [false, true] {
                let (a, b) = if take_im { (z0.im, z1.im) } else { (z0.re, z1.re) };
                if a == 0.0 && b == 0.0 {
                    continue;
                }
                if (a < 0.0) != (b < 0.0) || a == 0.0 {
                    if let Some(root) = bisect(spec, branch, e0, e1, take_im) {
                        if let Some(z) = eval(spec, branch, root) {
                            if z.norm() < opts.tolerance {
                                out.push(ClassifiedRoot {
                                    energy: C64::new(root, 0.0),
                                    branch: *branch,
                                    residual_norm: z.norm(),
                                    root_class: RootClass::of_real_root(branch),
                                });
                            }
                        }
                    }
                }
            }
        }
        prev = cur;
    }
    out
}

/// Damped complex Newton iteration with a central-difference derivative.
pub fn complex_newton(spec: &ProblemSpec, branch: &BranchStrategy, start: C64, tol: f64) -> Option<(C64, f64)> {
    let f = |z: C64| residual(z, spec, branch).ok().filter(|w| w.re.is_finite() && w.im.is_finite());
    let mut z = start;
    let mut fz = f(z)?;
    for _ in 0..80 {
        if fz.norm() < tol * 1e-3 {
            break;
        }
        let h = 1e-7 * z.norm().max(1.0);
        let d = (f(z + h)? - f(z - h)?) / (2.0 * h);
        if d.norm() == 0.0 || !d.re.is_finite() {
            return None;
        }
        let mut step = fz / d;
        if step.norm() > 2.0 {
            step *= 2.0 / step.norm();
        }
        // backtrack while the residual grows
        let mut lambda = 1.0;
        loop {
            let trial = z - step * lambda;
            if let Some(ft) = f(trial) {
                if ft.norm() < fz.norm() || lambda < 1e-3 {
                    z = trial;
                    fz = ft;
                    break;
                }
            }
            lambda *= 0.5;
            if lambda < 1e-4 {
                return None;
            }
        }
        if (step * lambda).norm() < 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    let norm = fz.norm();
    (norm < tol).then_some((z, norm))
}

/// Complex roots (upper half plane) of one principal branch by multistart Newton.
fn complex_roots_on_branch(spec: &ProblemSpec, branch: &BranchStrategy, opts: &SearchOptions) -> Vec<ClassifiedRoot> {
    let (lo, hi) = opts.interval;
    let mut out = Vec::new();
    let steps = (hi - lo).ceil() as usize;
    for i in 0..=steps {
        let x = lo + i as f64;
        for y in [0.25, 1.0, 3.0, 8.0] {
            if let Some((z, norm)) = complex_newton(spec, branch, C64::new(x, y), opts.tolerance) {
                let z = if z.im < 0.0 { z.conj() } else { z };
                if z.im > opts.min_imag && z.im <= opts.max_imag && z.re >= lo && z.re <= hi {
                    out.push(ClassifiedRoot { energy: z, branch: *branch, residual_norm: norm, root_class: RootClass::C });
                }
            }
        }
    }
    out
}

/// All three roots of the squared oscillator cubic, each attributed to the
/// right-hand sign whose principal residual vanishes there.
fn cubic_path(spec: &ProblemSpec, opts: &SearchOptions) -> Vec<ClassifiedRoot> {
    let Ok(coeffs) = squared_polynomial_drso(spec) else { return Vec::new() };
    let mut out = Vec::new();
    for z in cubic_roots(coeffs) {
        if z.im < 0.0 {
            continue;
        }
        let complex = z.im > opts.min_imag;
        let mut best: Option<(BranchStrategy, f64)> = None;
        for sign in [Sign::Plus, Sign::Minus] {
            let branch = BranchStrategy::with_rhs(sign);
            if !opts.branches.contains(&branch) {
                continue;
            }
            if let Ok(w) = residual(z, spec, &branch) {
                if best.is_none_or(|(_, r)| w.norm() < r) {
                    best = Some((branch, w.norm()));
                }
            }
        }
        let Some((branch, norm)) = best else { continue };
        let energy = if complex { z } else { C64::new(z.re, 0.0) };
        let root_class = if complex { RootClass::C } else { RootClass::of_real_root(&branch) };
        if norm < opts.tolerance.max(1e-9 * z.norm().max(1.0)) {
            out.push(ClassifiedRoot { energy, branch, residual_norm: norm, root_class });
        }
    }
    out
}

/// Merges roots that agree within `dedup` in both real and imaginary part,
/// keeping the more canonical class and then the smaller residual.
pub(crate) fn dedup_roots(mut roots: Vec<ClassifiedRoot>, dedup: f64) -> Vec<ClassifiedRoot> {
    roots.sort_by(|a, b| {
        a.energy.re.total_cmp(&b.energy.re).then(a.energy.im.total_cmp(&b.energy.im))
    });
    let mut out: Vec<ClassifiedRoot> = Vec::new();
    for r in roots {
        if let Some(same) = out.iter_mut().find(|o| {
            (o.energy.re - r.energy.re).abs() < dedup && (o.energy.im - r.energy.im).abs() < dedup
        }) {
            if (r.root_class, r.residual_norm) < (same.root_class, same.residual_norm) {
                *same = r;
            }
        } else {
            out.push(r);
        }
    }
    out
}

/// Finds and classifies roots of the spectral condition of `spec`.
///
/// Real roots come from a sign-change scan on every requested branch; the
/// oscillator with a = b = 0 takes its principal roots from the exact cubic
/// instead. Complex roots come from multistart Newton on the two principal,
/// σ_inner = +1 branches. Output is sorted by real part.
pub fn find_roots(spec: &ProblemSpec, opts: &SearchOptions) -> Vec<ClassifiedRoot> {
    let oscillator = matches!(spec.potential, PotentialKind::Oscillator { .. });
    let exact_cubic = oscillator && spec.ring.a == 0.0 && spec.ring.b == 0.0;
    let mut all = Vec::new();
    for branch in &opts.branches {
        // σ_inner has no meaning for the oscillator; skip the duplicates
        if oscillator && branch.sigma_inner == Sign::Minus {
            continue;
        }
        let class = RootClass::of_real_root(branch);
        if !opts.mode.admits(class) {
            continue;
        }
        if exact_cubic && branch.sqrt_mode == SqrtMode::Principal {
            continue;
        }
        all.extend(real_roots_on_branch(spec, branch, opts));
    }
    if exact_cubic {
        all.extend(cubic_path(spec, opts));
    } else if opts.mode.admits(RootClass::C) {
        for sign in [Sign::Plus, Sign::Minus] {
            let branch = BranchStrategy::with_rhs(sign);
            if opts.branches.contains(&branch) {
                all.extend(complex_roots_on_branch(spec, &branch, opts));
            }
        }
    }
    let mut roots: Vec<_> = dedup_roots(all, opts.dedup).into_iter().filter(|r| opts.mode.admits(r.root_class)).collect();
    roots.truncate(opts.max_roots);
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{QuantumNumbers, SymmetryKind};

    fn contains(roots: &[ClassifiedRoot], e: f64, class: RootClass, tol: f64) -> bool {
        roots.iter().any(|r| (r.reported() - e).abs() < tol && r.root_class == class)
    }

    #[test]
    fn pseudospin_kratzer_ground_row() {
        let spec = ProblemSpec::reference(SymmetryKind::Pseudospin, true, 0.0, 0.0, QuantumNumbers::new(0, 0, 0));
        let roots = find_roots(&spec, &SearchOptions::for_spec(&spec, Mode::PaperCompat));
        assert!(contains(&roots, -0.361711704, RootClass::A, 1e-6));
        assert!(contains(&roots, 1.666666667, RootClass::B, 1e-6));
    }

    #[test]
    fn strict_mode_keeps_only_class_a() {
        let spec = ProblemSpec::reference(SymmetryKind::Spin, false, 0.0, 0.0, QuantumNumbers::new(0, 0, 0));
        let roots = find_roots(&spec, &SearchOptions::for_spec(&spec, Mode::Strict));
        assert_eq!(roots.len(), 1);
        assert!((roots[0].reported() + 0.424764518).abs() < 1e-6);
    }

    #[test]
    fn dedup_prefers_canonical_class() {
        let mk = |re: f64, class, res| ClassifiedRoot {
            energy: C64::new(re, 0.0),
            branch: BranchStrategy::canonical(),
            residual_norm: res,
            root_class: class,
        };
        let merged = dedup_roots(vec![mk(1.0, RootClass::D, 1e-15), mk(1.0 + 1e-10, RootClass::A, 1e-12)], 1e-8);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged[0].root_class, RootClass::A);
    }
}
