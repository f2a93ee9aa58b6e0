// Diagonalized pair form and the invariant manifold `y = Psi(x)`.
//
// `cargo run --example invariant_manifold`

use adsolve::manifold::{solve_psi_with, PsiMethod};
use adsolve::{characteristic_roots, diagonalize, EquationSpec, Poly2, Transform, C64};

fn main() {
    let c = |re: f64| C64::new(re, 0.0);
    let spec = EquationSpec::new(
        c(-3.5),
        c(1.5),
        Poly2::from_terms([(0, 2, c(1.0))]).unwrap(),
    )
    .unwrap();
    let chars = characteristic_roots(&spec).unwrap();
    for which in [Transform::P, Transform::Q] {
        let sys = diagonalize(&spec, &chars, which, 12).unwrap();
        println!("{which:?}: lam_x = {}, lam_y = {}", sys.lam_x, sys.lam_y);
        for (i, j, coef) in sys.c.terms() {
            println!("  c_{i}{j} = {:.6}", coef.re);
        }
        let psi = solve_psi_with(&sys, 12, PsiMethod::OrderByOrder).unwrap();
        let sweeps = solve_psi_with(&sys, 12, PsiMethod::Sweeps).unwrap();
        println!(
            "  gamma2 = {:.12}, gamma3 = {:.12}",
            psi.gamma(2).re,
            psi.gamma(3).re
        );
        println!(
            "  radius {:.4}, functional residual {:e}, sweeps differ by {:e}",
            psi.radius(),
            psi.functional_residual().max_abs(),
            psi.gammas.sub(&sweeps.gammas).max_abs()
        );
        // Invariance of the graph under one step of the map.
        // Keep X(x, y) well inside the radius as well.
        let x = c(0.2 * psi.radius() / sys.lam_x.norm().max(1.0));
        let y = psi.eval(x).unwrap();
        let gap = psi.eval(sys.x_map(x, y)).unwrap() - sys.y_map(x, y);
        println!("  |Psi(X) - Y| at x = {:.4}: {:e}", x.re, gap.norm());
    }
}
