//! Real-coefficient cubic roots: one real root by bracketing, deflation to a
//! quadratic, then Newton polishing of every root on the original cubic.

use num_complex::Complex64 as C64;

fn eval(c: &[f64; 4], z: C64) -> (C64, C64) {
    let [c3, c2, c1, c0] = *c;
    let p = ((z * c3 + c2) * z + c1) * z + c0;
    let dp = (z * (3.0 * c3) + 2.0 * c2) * z + c1;
    (p, dp)
}

fn polish(c: &[f64; 4], mut z: C64) -> C64 {
    for _ in 0..8 {
        let (p, dp) = eval(c, z);
        if dp.norm() == 0.0 {
            break;
        }
        let step = p / dp;
        z -= step;
        if step.norm() <= 1e-16 * z.norm().max(1.0) {
            break;
        }
    }
    z
}

/// Roots of c3 x³ + c2 x² + c1 x + c0 (c3 ≠ 0), sorted by real part then
/// imaginary part. Conjugate pairs are returned exactly conjugate.
pub fn cubic_roots(c: [f64; 4]) -> [C64; 3] {
    let [c3, c2, c1, c0] = c;
    let (b, cc, d) = (c2 / c3, c1 / c3, c0 / c3);
    let f = |x: f64| ((x + b) * x + cc) * x + d;
    let bound = 1.0 + b.abs().max(cc.abs()).max(d.abs());
    let (mut lo, mut hi) = (-bound, bound);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * mid.abs().max(1.0) {
            break;
        }
    }
    let r0 = polish(&c, C64::new(0.5 * (lo + hi), 0.0)).re;
    // x² + q1 x + q0 from synthetic division
    let q1 = b + r0;
    let q0 = cc + r0 * q1;
    let disc = q1 * q1 - 4.0 * q0;
    let (r1, r2) = if disc >= 0.0 {
        let s = disc.sqrt();
        let t = -0.5 * (q1 + q1.signum() * s);
        let x1 = if t != 0.0 { q0 / t } else { 0.0 };
        (polish(&c, C64::new(t, 0.0)), polish(&c, C64::new(x1, 0.0)))
    } else {
        let z = polish(&c, C64::new(-0.5 * q1, 0.5 * (-disc).sqrt()));
        let z = C64::new(z.re, z.im.abs());
        (z.conj(), z)
    };
    let mut roots = [C64::new(r0, 0.0), r1, r2];
    roots.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    roots
}
