// Characteristic roots, case flags and the resonance scan.
//
// `cargo run --example roots_and_resonance`

use adsolve::particular::classify_resonance;
use adsolve::{characteristic_roots, detect_resonance, EquationSpec, Poly2, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

fn main() {
    let y_squared = Poly2::from_terms([(0, 2, c(1.0))]).unwrap();
    let equations = [
        (
            "saddle",
            EquationSpec::new(c(-3.5), c(1.5), y_squared.clone()).unwrap(),
        ),
        (
            "resonant",
            EquationSpec::new(c(-0.75), c(0.125), y_squared).unwrap(),
        ),
    ];
    for (name, spec) in equations {
        let chars = characteristic_roots(&spec).unwrap();
        println!(
            "{name}: lambda1 = {}, lambda2 = {}, case i: {}, case ii: {}",
            chars.lambda1, chars.lambda2, chars.case_i_available, chars.case_ii_available
        );
        let report = detect_resonance(&chars, 64, 1e-9);
        for e in &report.entries {
            let branch = classify_resonance(&spec, &chars, e.m, e.k);
            println!(
                "  lambda{}^{} hits the other root (relevant: {}): {branch:?}",
                e.m, e.k, e.relevant
            );
        }
        if report.is_empty() {
            println!("  no resonance up to k = {}", report.k_max_scanned);
        }
    }
}
