//! H²(curl)-conforming finite elements in two dimensions.
//!
//! This crate builds curl-curl-conforming elements on rectangles (order `k >= 3`)
//! and triangles (order `k >= 4`), the associated interpolation operator, and a
//! mixed saddle-point solver for the fourth-order quad-curl problem
//!
//! ```text
//! (curl)^4 u = f,   div u = 0   in Ω,
//! u × n = 0,  curl u = 0        on ∂Ω.
//! ```
//!
//! The main pieces:
//!
//! * [`poly`] — exact bivariate polynomial arithmetic and the reference-cell
//!   polynomial spaces,
//! * [`quadrature`] — Gauss rules on intervals, rectangles and triangles with
//!   certified exactness degrees,
//! * [`refelem`] — reference elements: degrees of freedom, dual bases,
//!   unisolvence and trace checks, and the published lowest-order bases as a
//!   verification oracle,
//! * [`mesh`] — structured meshes of the unit square and graded triangulations
//!   of an L-shaped domain,
//! * [`fespace`] — global H²(curl) and H¹ spaces, degree-of-freedom maps and
//!   the interpolation operator,
//! * [`assembly`] — sparse assembly and a direct solver for the mixed system,
//! * [`analysis`] — error norms, convergence rates, manufactured solutions and
//!   space-size formulas,
//! * [`cli`] — the experiment driver behind the `h2curl` binary.
//!
//! The `examples/` directory contains one runnable example per capability; the
//! acceptance suite in `tests/acceptance.rs` checks the headline numerical
//! properties end to end.

pub mod analysis;
pub mod assembly;
pub mod cli;
pub mod fespace;
pub mod mesh;
pub mod poly;
pub mod quadrature;
pub mod refelem;

pub use analysis::{dof_counts, error_norms, rates, successive_diff, ErrorReport};
pub use assembly::{assemble, solve, SaddleSystem};
pub use fespace::{FeFunction, H1Space, H2CurlSpace};
pub use mesh::{graded_lshape_mesh, uniform_rect_mesh, uniform_tri_mesh, Mesh2D};
pub use poly::{Poly2D, VecPoly2D};
pub use refelem::{build_rect_element, build_tri_element, ReferenceElement};
