//! Property tests for the algebraic and dynamical invariants.

use std::f64::consts::PI;

use adsolve::manifold::{diagonalize, solve_psi_with, PsiMethod};
use adsolve::particular::substitution_residual;
use adsolve::*;
use proptest::prelude::*;

fn complex(bound: f64) -> impl Strategy<Value = C64> {
    (-bound..bound, -bound..bound).prop_map(|(re, im)| C64::new(re, im))
}

fn polar(r_lo: f64, r_hi: f64) -> impl Strategy<Value = C64> {
    (r_lo..r_hi, -PI..PI).prop_map(|(r, th)| C64::from_polar(r, th))
}

fn series(order: usize, bound: f64) -> impl Strategy<Value = Series1> {
    prop::collection::vec(complex(bound), order).prop_map(Series1::from_coeffs)
}

fn poly2(max_degree: u32) -> impl Strategy<Value = Poly2> {
    let monomials: Vec<(u32, u32)> = (2..=max_degree)
        .flat_map(|d| (0..=d).map(move |i| (i, d - i)))
        .collect();
    let n = monomials.len();
    prop::collection::vec(complex(1.0), n).prop_map(move |cs| {
        let mut g =
            Poly2::from_terms(monomials.iter().zip(cs).map(|(&(i, j), c)| (i, j, c))).unwrap();
        if g.is_zero() {
            g.add_term(0, 2, C64::new(1.0, 0.0)).unwrap();
        }
        g
    })
}

/// Equations with one root inside and one outside the unit circle.
fn saddle_equation() -> impl Strategy<Value = EquationSpec> {
    (polar(0.2, 0.7), polar(1.6, 3.5), poly2(3))
        .prop_map(|(l1, l2, g)| EquationSpec::from_roots(l1, l2, g).unwrap())
}

fn close(a: &Series1, b: &Series1, tol: f64) -> bool {
    let scale = a.max_abs().max(b.max_abs()).max(1.0);
    a.sub(b).max_abs() <= tol * scale
}

/// `[z^k] h` for a polynomial `h` of degree below `m`, by an `m`-point DFT on
/// the unit circle.
fn dft_coeff(h: &dyn Fn(C64) -> C64, m: usize, k: usize) -> C64 {
    (0..m)
        .map(|j| {
            let w = C64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64);
            h(w) * w.powu(k as u32).inv()
        })
        .sum::<C64>()
        / m as f64
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn mul_commutes_and_associates(a in series(8, 2.0), b in series(8, 2.0), c in series(8, 2.0)) {
        prop_assert!(close(&mul1(&a, &b, 8), &mul1(&b, &a, 8), 1e-13));
        let left = mul1(&mul1(&a, &b, 8), &c, 8);
        let right = mul1(&a, &mul1(&b, &c, 8), 8);
        prop_assert!(close(&left, &right, 1e-12));
    }

    #[test]
    fn compose_identity_and_linearity(a in series(7, 1.0), b in series(7, 1.0), inner in series(7, 1.0)) {
        let id = Series1::monomial(1, C64::new(1.0, 0.0), 7);
        prop_assert!(close(&compose1(&a, &id, 7), &a, 1e-14));
        prop_assert!(close(&compose1(&id, &inner, 7), &inner, 1e-14));
        let sum = compose1(&a.add(&b), &inner, 7);
        let parts = compose1(&a, &inner, 7).add(&compose1(&b, &inner, 7));
        prop_assert!(close(&sum, &parts, 1e-12));
    }

    #[test]
    fn compose_matches_dft(outer in series(5, 1.0), inner in series(5, 1.0)) {
        let n = 5;
        let composed = compose1(&outer, &inner, n);
        let h = |z: C64| outer.eval(inner.eval(z));
        for k in 1..=n {
            let expected = dft_coeff(&h, n * n + 1, k);
            prop_assert!((composed.coeff(k) - expected).norm() <= 1e-11 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn poly2_on_series_matches_dft(g in poly2(3), u in series(6, 1.0), v in series(6, 1.0)) {
        let n = 6;
        let out = eval_poly2_on_series(&g, &u, &v, n);
        let h = |z: C64| g.eval(u.eval(z), v.eval(z));
        for k in 1..=n {
            let expected = dft_coeff(&h, 3 * n + 1, k);
            prop_assert!((out.coeff(k) - expected).norm() <= 1e-11 * expected.norm().max(1.0));
        }
    }

    #[test]
    fn roots_reconstructed(l1 in polar(0.05, 5.0), l2 in polar(0.05, 5.0), g in poly2(2)) {
        prop_assume!((l1.norm() - l2.norm()).abs() > 1e-6);
        prop_assume!((l1.norm() - 1.0).abs() > 1e-3 || (l2.norm() - 1.0).abs() > 1e-3);
        let spec = EquationSpec::from_roots(l1, l2, g).unwrap();
        let ch = characteristic_roots(&spec).unwrap();
        let (small, large) = if l1.norm() < l2.norm() { (l1, l2) } else { (l2, l1) };
        prop_assert!((ch.lambda1 - small).norm() <= 1e-12 * small.norm().max(1.0) * large.norm().max(1.0));
        prop_assert!((ch.lambda2 - large).norm() <= 1e-12 * large.norm().max(1.0));
        prop_assert!(ch.lambda1.norm() <= ch.lambda2.norm());
    }

    #[test]
    fn resonance_scan_monotone_in_k_max(l1 in polar(0.2, 0.9), k in 2usize..6, k_lo in 2usize..10, extra in 0usize..20) {
        // lambda1 = lambda2^k with |lambda2| < 1 is a genuine resonance.
        let l2 = l1.powf(1.0 / k as f64);
        let spec = EquationSpec::from_roots(l1, l2, Poly2::from_terms([(0, 2, C64::new(1.0, 0.0))]).unwrap()).unwrap();
        let ch = characteristic_roots(&spec).unwrap();
        let low = detect_resonance(&ch, k_lo, 1e-9);
        let high = detect_resonance(&ch, k_lo + extra, 1e-9);
        for e in &low.entries {
            prop_assert!(high.entries.contains(e));
        }
        prop_assert!(low.entries.len() <= high.entries.len());
        if k_lo >= k {
            prop_assert!(high.entries.iter().any(|e| e.k == k));
        }
    }

    #[test]
    fn homogeneity(spec in saddle_equation(), c in polar(0.1, 2.0)) {
        let ch = characteristic_roots(&spec).unwrap();
        for m in [RootIndex::First, RootIndex::Second] {
            let lambda = ch.lambda(m);
            let Ok(base) = solve_coefficients(&spec, lambda, C64::new(1.0, 0.0), 10) else { continue };
            let scaled = solve_coefficients(&spec, lambda, c, 10).unwrap();
            for k in 1..=10 {
                let expected = c.powu(k as u32) * base.coeff(k);
                prop_assert!((scaled.coeff(k) - expected).norm() <= 1e-10 * expected.norm().max(1e-300));
            }
        }
    }

    #[test]
    fn substitution_identity(spec in saddle_equation()) {
        let ch = characteristic_roots(&spec).unwrap();
        for m in [RootIndex::First, RootIndex::Second] {
            let lambda = ch.lambda(m);
            let Ok(a) = solve_coefficients(&spec, lambda, C64::new(1.0, 0.0), 12) else { continue };
            let r = substitution_residual(&spec, lambda, &a);
            for k in 1..=12 {
                let scale = a.coeff(k).norm() * spec.char_poly(lambda.powu(k as u32)).norm();
                prop_assert!(r.coeff(k).norm() <= 1e-10 * scale.max(1e-300) + 1e-13, "k = {}", k);
            }
        }
    }

    #[test]
    fn transform_round_trip_and_conjugacy(spec in saddle_equation(), u in complex(0.5), w in complex(0.5)) {
        let ch = characteristic_roots(&spec).unwrap();
        for which in [Transform::P, Transform::Q] {
            let sys = diagonalize(&spec, &ch, which, 3).unwrap();
            let (x, y) = sys.from_original(u, w);
            let (u2, w2) = sys.to_original(x, y);
            prop_assert!((u2 - u).norm() + (w2 - w).norm() <= 1e-12);
            // One step of the equation is one step of the diagonal map.
            let (x1, y1) = sys.from_original(w, spec.f(u, w));
            let scale = 1.0 + x1.norm() + y1.norm();
            prop_assert!((sys.x_map(x, y) - x1).norm() <= 1e-11 * scale);
            prop_assert!((sys.y_map(x, y) - y1).norm() <= 1e-11 * scale);
        }
    }

    #[test]
    fn manifold_invariance(spec in saddle_equation(), theta in -PI..PI) {
        let ch = characteristic_roots(&spec).unwrap();
        let sys = diagonalize(&spec, &ch, Transform::P, 10).unwrap();
        let psi = solve_psi(&sys, 10).unwrap();
        // Invariance error shrinks like |x|^11.
        let radius = 0.5 * psi.radius().min(1.0);
        let gap = |r: f64| {
            let x = C64::from_polar(r, theta);
            let y = psi.eval(x).unwrap();
            let x1 = sys.x_map(x, y);
            (psi.eval(x1).unwrap_or(C64::new(f64::NAN, 0.0)) - sys.y_map(x, y)).norm()
        };
        let (big, small) = (gap(radius * 0.2), gap(radius * 0.1));
        prop_assume!(big.is_finite() && big > 1e-13);
        prop_assert!(small <= big * 2f64.powi(-8), "gap {:e} -> {:e}", big, small);
    }

    #[test]
    fn sweeps_agree_with_order_by_order(spec in saddle_equation()) {
        let ch = characteristic_roots(&spec).unwrap();
        for which in [Transform::P, Transform::Q] {
            let sys = diagonalize(&spec, &ch, which, 8).unwrap();
            let a = solve_psi_with(&sys, 8, PsiMethod::OrderByOrder).unwrap();
            let b = solve_psi_with(&sys, 8, PsiMethod::Sweeps).unwrap();
            prop_assert!(close(&a.gammas, &b.gammas, 1e-9));
        }
    }

    #[test]
    fn backstep_round_trip(spec in saddle_equation(), s in complex(0.01), w in complex(0.01)) {
        let ctx = BacksteppingContext::estimate(&spec, 1.0).unwrap();
        prop_assume!(ctx.rho >= 0.05);
        let z = spec.f(s, w);
        prop_assume!(z.norm() <= ctx.rho);
        let back = implicit_backstep(&spec, &ctx, w, z).unwrap();
        prop_assert!((back - s).norm() <= 1e-10 * (1.0 + s.norm()));
    }
}

fn f1() -> EquationSpec {
    EquationSpec::new(
        C64::new(-3.5, 0.0),
        C64::new(1.5, 0.0),
        Poly2::from_terms([(0, 2, C64::new(1.0, 0.0))]).unwrap(),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn periodicity_transport(re in 0.0..1.0f64, im in -0.05..0.05f64, n in 1i32..4) {
        let spec = f1();
        let ch = characteristic_roots(&spec).unwrap();
        let pi = PeriodicFunction::new(vec![(1, C64::new(0.05, 0.0)), (0, C64::new(0.02, 0.0))]).unwrap();
        let gen = assemble_general(&spec, &ch, RootIndex::First, &SolveOptions::default(), 16, pi.clone()).unwrap();
        let shifted = assemble_general(&spec, &ch, RootIndex::First, &SolveOptions::default(), 16, pi.shifted(n as f64)).unwrap();
        let t = C64::new(2.0 + re, im);
        let a = gen.eval(t).unwrap();
        let b = shifted.eval(t).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
    }

    #[test]
    fn constant_pi_is_time_shift(shift in -0.4..0.4f64, re in 0.0..1.0f64, im in -0.1..0.1f64) {
        let spec = f1();
        let ch = characteristic_roots(&spec).unwrap();
        let c = C64::new(shift, 0.0);
        let opts = SolveOptions::default();
        let shifted = assemble_general(&spec, &ch, RootIndex::First, &opts, 16, PeriodicFunction::constant(c)).unwrap();
        let plain = assemble_general(&spec, &ch, RootIndex::First, &opts, 16, PeriodicFunction::zero()).unwrap();
        let t = C64::new(2.0 + re, im);
        let a = shifted.eval(t).unwrap();
        let b = plain.eval(t + c).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1e-300));
    }
}
