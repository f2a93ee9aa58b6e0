// The two resonant branches: a forced stride series and a two-parameter family.
//
// `cargo run --example resonant_branches`

use adsolve::particular::Branch;
use adsolve::{
    characteristic_roots, residual_scan, solve_particular, solve_resonant, EquationSpec, Poly2,
    RootIndex, ScanConfig, SolveOptions, C64,
};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn main() {
    let opts = SolveOptions {
        order: 12,
        ..SolveOptions::default()
    };

    // lambda2^2 = lambda1 with a nonzero numerator: a_{2,1} is forced to zero.
    let spec = EquationSpec::new(
        c(-0.75),
        c(0.125),
        Poly2::from_terms([(0, 2, c(1.0))]).unwrap(),
    )
    .unwrap();
    let chars = characteristic_roots(&spec).unwrap();
    let stride =
        solve_resonant(&spec, &chars, RootIndex::Second, 2, c(1.0), c(0.0), &opts).unwrap();
    let u1 = solve_particular(&spec, &chars, RootIndex::First, &opts).unwrap();
    if let Branch::ResonantStride { k, c_star } = stride.branch {
        println!(
            "stride branch: k = {k}, C* = {c_star}, stride = {}",
            stride.stride
        );
    }
    let gap = (1..=12)
        .map(|n| (stride.coeffs.coeff(n) - u1.coeffs.coeff(n)).norm())
        .fold(0.0, f64::max);
    println!("  max difference to u1 after reindexing: {gap:e}");

    // Same roots, g = xy - 2y^2: the numerator vanishes and a_{2,2} is free.
    let g = Poly2::from_terms([(1, 1, c(1.0)), (0, 2, c(-2.0))]).unwrap();
    let spec = EquationSpec::new(c(-0.75), c(0.125), g).unwrap();
    let chars = characteristic_roots(&spec).unwrap();
    for a_second in [c(0.0), c(0.5), c(-1.0)] {
        let sol =
            solve_resonant(&spec, &chars, RootIndex::Second, 2, c(1.0), a_second, &opts).unwrap();
        let report = residual_scan(&spec, &sol, &sol.sector(), &ScanConfig::default());
        println!(
            "free branch a2 = {a_second}: a3 = {:.6}, scan residual {:e}, passed {}",
            sol.coeffs.coeff(3),
            report.max_residual,
            report.passed
        );
    }
}
