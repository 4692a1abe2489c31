//! Closed-form global space sizes of the mixed method (M1 on rectangles,
//! M2 on triangles) and the extra degrees of freedom Δ1/Δ2 an
//! auxiliary-variable mixed scheme would need on the same meshes.
//!
//! ```sh
//! cargo run --example dof_comparison
//! ```

use h2curl::cli::{run, Command, RunConfig};

fn main() {
    for n in [4usize, 10, 20] {
        let out = run(&RunConfig {
            command: Command::DofTable {
                k_min: 2,
                k_max: 5,
                n,
            },
            markdown: true,
        })
        .expect("table should build");
        println!("N = {n}:\n{}", out.text);
    }
}
