//! Shared helpers for the integration tests: finite-difference oracles that
//! stay independent of the library's polynomial calculus, random affine
//! maps, and random smooth fields.
#![allow(dead_code)] // each test binary uses its own subset

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use h2curl::mesh::AffineMap;
use h2curl::poly::VecPoly2D;
use h2curl::refelem::{CellShape, ReferenceElement, VectorField};

/// Fourth-order central difference of a scalar function along one axis.
pub fn fd_partial(f: &dyn Fn([f64; 2]) -> f64, x: [f64; 2], axis: usize, h: f64) -> f64 {
    let ev = |d: f64| {
        let mut y = x;
        y[axis] += d;
        f(y)
    };
    (-ev(2.0 * h) + 8.0 * ev(h) - 8.0 * ev(-h) + ev(-2.0 * h)) / (12.0 * h)
}

/// Scalar curl of a vector function by finite differences.
pub fn fd_scalar_curl(f: &dyn Fn([f64; 2]) -> [f64; 2], x: [f64; 2], h: f64) -> f64 {
    fd_partial(&|y| f(y)[1], x, 0, h) - fd_partial(&|y| f(y)[0], x, 1, h)
}

/// Vector curl of a scalar function by finite differences.
pub fn fd_vector_curl(s: &dyn Fn([f64; 2]) -> f64, x: [f64; 2], h: f64) -> [f64; 2] {
    [fd_partial(s, x, 1, h), -fd_partial(s, x, 0, h)]
}

/// `(curl)⁴` of a vector field composed purely from finite differences.
pub fn fd_curl4(u: &dyn Fn([f64; 2]) -> [f64; 2], x: [f64; 2], h: f64) -> [f64; 2] {
    let c1 = move |y: [f64; 2]| fd_scalar_curl(u, y, h);
    let c2 = move |y: [f64; 2]| fd_vector_curl(&c1, y, h);
    let c3 = move |y: [f64; 2]| fd_scalar_curl(&c2, y, h);
    fd_vector_curl(&c3, x, h)
}

/// Random nonsingular affine map with positive determinant in a moderate
/// range.
pub fn random_affine(rng: &mut ChaCha8Rng) -> AffineMap {
    loop {
        let b = [
            [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)],
            [rng.gen_range(-1.2..1.2), rng.gen_range(-1.2..1.2)],
        ];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        if det > 0.25 && det < 4.0 {
            return AffineMap {
                b_mat: b,
                offset: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                det,
            };
        }
    }
}

/// A smooth non-polynomial field with closed-form curl: a random polynomial
/// member of the local space plus a trigonometric part.
pub struct SmoothField {
    pub poly: VecPoly2D,
    pub amp: f64,
    pub wave: [f64; 4],
}

impl SmoothField {
    pub fn random(el: &ReferenceElement, rng: &mut ChaCha8Rng) -> Self {
        let mut poly = VecPoly2D::zero();
        for phi in &el.dual_basis {
            poly = poly.add(&phi.scale(rng.gen_range(-0.5..0.5)));
        }
        SmoothField {
            poly,
            amp: rng.gen_range(0.2..1.0),
            wave: [
                rng.gen_range(0.5..2.0),
                rng.gen_range(0.5..2.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            ],
        }
    }
}

impl VectorField for SmoothField {
    fn value(&self, x: [f64; 2]) -> [f64; 2] {
        let p = self.poly.eval(x);
        let [a, b, c, d] = self.wave;
        [
            p[0] + self.amp * (a * x[0] + b * x[1] + c).sin(),
            p[1] + self.amp * (a * x[0] - b * x[1] + d).cos(),
        ]
    }
    fn curl(&self, x: [f64; 2]) -> f64 {
        let c0 = self.poly.scalar_curl().eval(x[0], x[1]);
        let [a, b, c, d] = self.wave;
        c0 + self.amp * (-a * (a * x[0] - b * x[1] + d).sin() - b * (a * x[0] + b * x[1] + c).cos())
    }
}

/// Deterministic RNG for a named test.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Interior sample points of a reference cell.
pub fn interior_points(shape: CellShape, n: usize) -> Vec<[f64; 2]> {
    let mut pts = Vec::with_capacity(n);
    let mut r = rng(99);
    while pts.len() < n {
        let p = match shape {
            CellShape::Rect => [r.gen_range(-0.95..0.95), r.gen_range(-0.95..0.95)],
            CellShape::Tri => {
                let a: f64 = r.gen_range(0.02..0.9);
                let b: f64 = r.gen_range(0.02..0.9);
                if a + b > 0.96 {
                    continue;
                }
                [a, b]
            }
        };
        pts.push(p);
    }
    pts
}
