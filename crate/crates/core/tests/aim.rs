use drs_dirac::aim::{
    aim_delta, aim_eigenvalue, aim_exact_angular, aim_exact_kratzer, aim_series, angular_problem, general_eigenfunction,
    kratzer_problem, oscillator_problem, AimProblem, AimSearch, Jet,
};
use num_complex::Complex64 as C64;
use proptest::prelude::*;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

#[test]
fn oscillator_levels_match_exact_ladder() {
    for ell in [0.0, 1.0] {
        for n in 0..=3 {
            let exact = 2.0 * n as f64 + ell + 1.5;
            let p = oscillator_problem(ell, 40);
            let eig = aim_eigenvalue(&p, &AimSearch::around(exact + 0.3, 0.9)).unwrap();
            assert!((eig.value - exact).abs() < 1e-8, "l={ell} n={n}: {eig:?}");
            assert!(eig.k <= 40);
        }
    }
}

#[test]
fn kratzer_first_lines() {
    // c = −γDr = 6, ζ = 3: κ = 2 then 1.5
    let p = kratzer_problem(3.0, 6.0, 20);
    let k0 = aim_eigenvalue(&p, &AimSearch::around(2.1, 0.2)).unwrap();
    assert!((k0.value - 2.0).abs() < 1e-10);
    let k1 = aim_eigenvalue(&p, &AimSearch::around(1.45, 0.2)).unwrap();
    assert!((k1.value - 1.5).abs() < 1e-10);
    // the first δ already terminates the ground line
    assert!(aim_delta(&p, 2.0, 1).unwrap().abs() < 1e-12);
}

#[test]
fn kratzer_table_parameters() {
    let zeta = 2.5258;
    // γ̃ D_e r_e at the pseudospin ground root, a = b = 0
    let gdr = -0.3617126647856243 * 15.0 * 0.4;
    let exact = aim_exact_kratzer(c(zeta), c(gdr), 0).unwrap().re;
    let p = kratzer_problem(zeta, -gdr, 30);
    let eig = aim_eigenvalue(&p, &AimSearch::around(exact * 1.05, 0.1)).unwrap();
    assert!((eig.value - exact).abs() < 1e-8);
}

#[test]
fn angular_line_gives_twice_eta_plus_p() {
    for (eta, p, np) in [(0.25, 0.5, 0u32), (0.75, 0.8, 0), (0.6, 0.55, 1), (1.1, 0.9, 2)] {
        let want = 2.0 * (eta + p + np as f64);
        let prob = angular_problem(eta, p, 30);
        let eig = aim_eigenvalue(&prob, &AimSearch::around(want + 0.2, 0.6)).unwrap();
        assert!((eig.value - want).abs() < 1e-8, "{eta} {p} {np}: {eig:?}");
        assert!(aim_exact_angular(c(eta), c(p), c(eig.value), np).norm() < 1e-8);
    }
}

#[test]
fn rescaling_does_not_move_the_root() {
    let mut p = oscillator_problem(1.0, 30);
    let a = aim_eigenvalue(&p, &AimSearch::around(4.6, 0.5)).unwrap();
    p.rescale = false;
    let b = aim_eigenvalue(&p, &AimSearch::around(4.6, 0.5)).unwrap();
    assert!((a.value - b.value).abs() < 1e-10);
}

#[test]
fn first_delta_root_invariant_under_common_scaling() {
    // δ₁ is homogeneous of degree two in (λ₀, s₀), so its roots survive a common factor
    for factor in [0.5, 3.0, -2.0] {
        let base = oscillator_problem(0.0, 4);
        let scaled = AimProblem::new(
            Box::new(move |e, x| {
                let (l, s) = (base.coefficients)(e, x);
                (l.scale(factor), s.scale(factor))
            }),
            1.0,
            4,
        );
        let search = AimSearch { k_min: 1, ..AimSearch::around(1.5, 1.0) };
        let r0 = drs_dirac::aim::delta_root_near(&oscillator_problem(0.0, 4), 1, &search, 1.5).unwrap();
        let r1 = drs_dirac::aim::delta_root_near(&scaled, 1, &search, 1.5).unwrap();
        assert!((r0 - r1).abs() < 1e-12);
    }
}

/// Polynomial in x with global coefficients; an independent differentiation route.
#[derive(Clone, Debug)]
struct Poly(Vec<f64>);

impl Poly {
    fn d(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }
    fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly((0..n).map(|i| self.0.get(i).unwrap_or(&0.0) + o.0.get(i).unwrap_or(&0.0)).collect())
    }
    fn mul(&self, o: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + o.0.len()];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in o.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
    fn at(&self, x: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }
    fn jet(&self, x: &Jet) -> Jet {
        let mut acc = Jet::constant(0.0, x.order());
        for c in self.0.iter().rev() {
            acc = &(&acc * x) + *c;
        }
        acc
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn exact_kratzer_matches_numeric_root(zeta in 1.0f64..4.0, gdr in -10.0f64..-1.0, n in 0u32..=3) {
        let exact = aim_exact_kratzer(c(zeta), c(gdr), n).unwrap().re;
        let spacing = -gdr / ((zeta + n as f64) * (zeta + n as f64 + 1.0));
        // expand around the peak of the asymptotic level-n profile r^{ζ+n} e^{−κr}
        let x0 = (zeta + n as f64).powi(2) / -gdr;
        let p = kratzer_problem(zeta, -gdr, 30).with_x0(x0);
        let eig = aim_eigenvalue(&p, &AimSearch::around(exact + 0.1 * spacing, 0.4 * spacing)).unwrap();
        prop_assert!((eig.value - exact).abs() < 1e-8, "{} vs {}", eig.value, exact);
    }

    #[test]
    fn recurrence_matches_polynomial_differentiation(
        l in prop::collection::vec(-2.0f64..2.0, 1..4),
        s in prop::collection::vec(-2.0f64..2.0, 1..4),
        x0 in -1.0f64..1.0,
        rescale in any::<bool>(),
    ) {
        let (lp, sp) = (Poly(l), Poly(s));
        let (lj, sj) = (lp.clone(), sp.clone());
        let mut prob = AimProblem::new(Box::new(move |_, x| (lj.jet(x), sj.jet(x))), x0, 4);
        prob.rescale = rescale;
        let series = aim_series(&prob, 0.0);
        let (mut lk, mut sk) = (lp.clone(), sp.clone());
        for k in 1..=4 {
            let nl = lk.d().add(&sk).add(&lp.mul(&lk));
            let ns = sk.d().add(&sp.mul(&lk));
            lk = nl;
            sk = ns;
            let scale = series.log_scale[k].exp();
            let jl = &series.lambdas[k];
            let js = &series.ss[k];
            // value and first derivative at x0
            for (jet, poly) in [(jl, &lk), (js, &sk)] {
                let v = poly.at(x0);
                let dv = poly.d().at(x0);
                prop_assert!((jet.coefficients()[0] * scale - v).abs() <= 1e-9 * (1.0 + v.abs()));
                prop_assert!((jet.coefficients()[1] * scale - dv).abs() <= 1e-9 * (1.0 + dv.abs()));
            }
        }
    }
}

#[test]
fn general_eigenfunction_solves_its_normal_form() {
    // Solve the normal form for W at one point and check it is constant elsewhere.
    let (a, b, m, big_n) = (0.8, 1.0, 0.3, 0);
    for n in 1..=3u32 {
        let y = |x: f64| general_eigenfunction(a, b, m, big_n, n, x).unwrap();
        let w_at = |x: f64| {
            let h = 1e-4;
            let (ym, y0, yp) = (y(x - h), y(x), y(x + h));
            let d1 = (yp - ym) / (2.0 * h);
            let d2 = (yp - 2.0 * y0 + ym) / (h * h);
            let np1 = x.powi(big_n + 1);
            let denom = 1.0 - b * x.powi(big_n + 2);
            let drift = 2.0 * (a * np1 / denom - (m + 1.0) / x);
            (drift * d1 - d2) * denom / (x.powi(big_n) * y0)
        };
        let w1 = w_at(0.31);
        let w2 = w_at(0.57);
        assert!((w1 - w2).abs() < 1e-5 * (1.0 + w1.abs()), "n={n}: {w1} vs {w2}");
    }
}
