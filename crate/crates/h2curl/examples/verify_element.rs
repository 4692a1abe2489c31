//! Build the reference elements, verify duality and edge-trace
//! determination, and cross-check the published lowest-order bases.
//!
//! ```sh
//! cargo run --example verify_element
//! ```

use h2curl::cli::{run, Command, RunConfig, Shape};

fn main() {
    for (shape, k) in [(Shape::Rect, 3), (Shape::Rect, 4), (Shape::Tri, 4), (Shape::Tri, 5)] {
        let out = run(&RunConfig {
            command: Command::VerifyElement { shape, k },
            markdown: false,
        })
        .expect("element verification should run");
        println!("{}", out.text);
    }
}
