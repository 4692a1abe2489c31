//! Quad-curl solve on the L-shaped domain with constant load: successive
//! differences across nested refinements show how grading toward the
//! reentrant corner (κ < 0.5) restores the convergence orders that uniform
//! refinement (κ = 0.5) loses to the corner singularity.
//!
//! ```sh
//! cargo run --release --example lshape_graded_study
//! ```

use h2curl::cli::{run, Command, RunConfig};

fn main() {
    for kappa in [0.5, 0.245] {
        println!(
            "κ = {kappa}{}",
            if kappa == 0.5 { " (uniform refinement)" } else { " (graded toward the corner)" }
        );
        let out = run(&RunConfig {
            command: Command::SolveLshape {
                k: 4,
                kappa,
                levels: 5,
            },
            markdown: true,
        })
        .expect("L-shape study should run");
        println!("{}", out.text);
    }
}
