// General solutions `Upsilon(t)` parameterized by a period-1 function.
//
// `cargo run --example general_solution`

use adsolve::{
    assemble_general, characteristic_roots, EquationSpec, PeriodicFunction, Poly2, RootIndex,
    SolveOptions, C64,
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
    let pi = PeriodicFunction::new(vec![(1, c(0.05)), (0, c(0.02))]).unwrap();
    for m in [RootIndex::First, RootIndex::Second] {
        let gen =
            assemble_general(&spec, &chars, m, &SolveOptions::default(), 16, pi.clone()).unwrap();
        let t0 = gen
            .particular
            .sector()
            .point_at(c(0.25 * gen.particular.eta));
        println!(
            "root {m}: decays with step {}, t0 = {t0:.4}",
            gen.decay_step()
        );
        // Windows of three steps, moved along the decay direction.
        let step = gen.decay_step();
        let start = t0 + (step - 1.0);
        for t in [start, start + 0.3 * step, start + 0.6 * step] {
            let u = [t, t + 1.0, t + 2.0].map(|s| gen.eval(s).unwrap());
            println!(
                "  Upsilon({t:.2}) = {:.8}, step residual {:e}",
                u[0],
                (u[2] - spec.f(u[0], u[1])).norm()
            );
        }
        let ratios = gen.ratio_limit_check(t0, 40).unwrap();
        for n in [1, 10, 40] {
            println!("  r_{n} = {:.12}", ratios[n - 1]);
        }
    }
}
