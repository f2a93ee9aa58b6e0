// Particular solutions `u(t) = sum a_n lambda^{n t}` on both roots.
//
// `cargo run --example particular_series`

use adsolve::{
    characteristic_roots, solve_particular, EquationSpec, Poly2, RootIndex, SolveOptions, C64,
};

fn main() {
    let c = |re: f64| C64::new(re, 0.0);
    let spec = EquationSpec::new(
        c(-3.5),
        c(1.5),
        Poly2::from_terms([(0, 2, c(1.0))]).unwrap(),
    )
    .unwrap();
    let chars = characteristic_roots(&spec).unwrap();
    for m in [RootIndex::First, RootIndex::Second] {
        let sol = solve_particular(&spec, &chars, m, &SolveOptions::default()).unwrap();
        println!(
            "root {m}: lambda = {}, validated radius eta = {}",
            sol.lambda, sol.eta
        );
        for n in 1..=5 {
            println!("  a{n} = {:.12}", sol.coeffs.coeff(n).re);
        }
        // One step of the equation, taken inside the sector: a case ii
        // solution decays backward, so its window ends at the sample point.
        let mut t = sol.sector().point_at(c(0.25 * sol.eta));
        if !sol.sector().decays_forward() {
            t -= 2.0;
        }
        let (u0, u1, u2) = (
            sol.eval(t).unwrap(),
            sol.eval(t + 1.0).unwrap(),
            sol.eval(t + 2.0).unwrap(),
        );
        println!(
            "  t = {t:.4}: u = {u0:.6}, |u(t+2) - f(u(t), u(t+1))| = {:e}",
            (u2 - spec.f(u0, u1)).norm()
        );
    }
}
