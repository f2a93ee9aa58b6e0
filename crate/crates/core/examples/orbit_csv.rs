// Drives the CLI pipeline from code: builds a config, prints it and the orbit CSV.
//
// `cargo run --example orbit_csv`

use adsolve::cli::{parse_config, run, Subcommand};

const CONFIG: &str = "\
[equation]
alpha = -3.5,0
beta = 1.5,0
b = 0 2 1 0
[solve]
N = 16
[general]
m = 1
pi = 1 0.05 0
grid_base = 2,0
grid_direction = 0.25,0
grid_count = 5
";

fn main() {
    let cfg = parse_config(CONFIG).unwrap();
    println!("canonical config:\n{}", cfg.to_text());
    let outcome = run(&cfg, Subcommand::OrbitCsv).unwrap();
    print!("{}", outcome.text);
}
