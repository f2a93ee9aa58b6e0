// Independent checks: residual scan with decay slope and the iteration oracle.
//
// `cargo run --example verification`

use adsolve::{
    characteristic_roots, iteration_oracle, residual_scan, solve_particular, BacksteppingContext,
    EquationSpec, Poly2, RootIndex, ScanConfig, SolveOptions, C64,
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
    let ctx = BacksteppingContext::estimate(&spec, 1.0).unwrap();
    println!("backstep box rho = {}, K = {}", ctx.rho, ctx.k_const);

    for m in [RootIndex::First, RootIndex::Second] {
        let sol = solve_particular(&spec, &chars, m, &SolveOptions::default()).unwrap();
        let report = residual_scan(&spec, &sol, &sol.sector(), &ScanConfig::default());
        let t0 = sol.sector().point_at(c(0.25 * sol.eta));
        let report = report.with_oracle(iteration_oracle(&spec, &sol, &ctx, t0, 20).unwrap());
        println!("root {m}:\n{}", report.to_key_values());
    }

    // Away from the validated radius the truncation error shows its |lambda^t|^(N+1) shape.
    for order in [8, 12, 16] {
        let opts = SolveOptions {
            order,
            ..SolveOptions::default()
        };
        let sol = solve_particular(&spec, &chars, RootIndex::First, &opts)
            .unwrap()
            .with_eta(6.0);
        let report = residual_scan(&spec, &sol, &sol.sector(), &ScanConfig::default());
        println!(
            "N = {order}: slope {:.3} (expected about {})",
            report.bound_slope.unwrap_or(f64::NAN),
            order + 1
        );
    }
}
