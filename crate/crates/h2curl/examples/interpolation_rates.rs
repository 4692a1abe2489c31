//! Interpolation convergence of the manufactured divergence-free field on
//! uniform meshes: L² and curl errors decay like h^k, curl-curl like
//! h^(k-1).
//!
//! ```sh
//! cargo run --release --example interpolation_rates
//! ```

use std::sync::Arc;

use h2curl::analysis::{error_norms, rates, SinCubedStream};
use h2curl::fespace::H2CurlSpace;
use h2curl::mesh::{uniform_rect_mesh, uniform_tri_mesh};

fn study(name: &str, k: usize, meshes: &[h2curl::mesh::Mesh2D]) {
    let exact = SinCubedStream;
    let mut hs = Vec::new();
    let mut errs: Vec<[f64; 3]> = Vec::new();
    println!("{name}, order {k}:");
    println!("{:>10} {:>14} {:>14} {:>14}", "h", "l2", "curl", "curlcurl");
    for mesh in meshes {
        let space = H2CurlSpace::new(Arc::new(mesh.clone()), k).unwrap();
        let u_h = space.interpolate(&exact);
        let r = error_norms(&space, &u_h, &exact);
        println!(
            "{:>10.4e} {:>14.6e} {:>14.6e} {:>14.6e}",
            r.h, r.l2, r.curl, r.curlcurl
        );
        hs.push(r.h);
        errs.push([r.l2, r.curl, r.curlcurl]);
    }
    for (j, label) in ["l2", "curl", "curlcurl"].iter().enumerate() {
        let e: Vec<f64> = errs.iter().map(|r| r[j]).collect();
        let rr = rates(&e, &hs).unwrap();
        let pretty: Vec<String> = rr.iter().map(|r| format!("{r:.3}")).collect();
        println!("  {label} rates: [{}]", pretty.join(", "));
    }
    println!();
}

fn main() {
    let rect: Vec<_> = [4, 8, 16, 32].iter().map(|&n| uniform_rect_mesh(n)).collect();
    study("rectangles", 3, &rect);
    let tri: Vec<_> = [4, 8, 16, 32].iter().map(|&n| uniform_tri_mesh(n)).collect();
    study("triangles", 4, &tri);
}
