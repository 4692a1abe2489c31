//! Error norms against closed-form solutions, convergence-rate estimation,
//! successive-solution differences on nested meshes, a manufactured solution
//! for the unit square, and closed-form space-size formulas.

use rayon::prelude::*;
use thiserror::Error;

use crate::fespace::{FeFunction, H2CurlSpace};
use crate::quadrature::{rect_rule, tri_rule, CellRule};
use crate::refelem::{CellShape, VectorField};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("convergence rate undefined: error entry {index} is zero")]
    UndefinedRate { index: usize },
    #[error("need at least two entries with strictly decreasing mesh sizes")]
    BadSequence,
    #[error("meshes are not nested (fine mesh carries no parent map)")]
    NotNested,
}

/// L² errors of a discrete field against a closed-form solution.
#[derive(Debug, Clone, Copy)]
pub struct ErrorReport {
    pub l2: f64,
    pub curl: f64,
    pub curlcurl: f64,
    pub h: f64,
    pub n_dofs: usize,
}

/// A solution known in closed form down to its second curl.
pub trait ExactVectorField: VectorField {
    fn curl_curl(&self, x: [f64; 2]) -> [f64; 2];
}

/// Divergence-free manufactured solution on the unit square built from the
/// stream function `ψ = sin³(πx) sin³(πy)`: `u = (∂ψ/∂y, -∂ψ/∂x)`. It
/// satisfies `u × n = 0` and `curl u = 0` on the boundary, and
/// `(curl)⁴ u = load`.
#[derive(Debug, Clone, Copy, Default)]
pub struct SinCubedStream;

const PI: f64 = std::f64::consts::PI;

/// Derivatives of g(t) = sin³(πt) up to fifth order.
fn g(n: usize, t: f64) -> f64 {
    let s = (PI * t).sin();
    let c = (PI * t).cos();
    match n {
        0 => s * s * s,
        1 => 3.0 * PI * s * s * c,
        2 => PI * PI * (6.0 * s - 9.0 * s * s * s),
        3 => PI.powi(3) * c * (6.0 - 27.0 * s * s),
        4 => PI.powi(4) * (81.0 * s * s * s - 60.0 * s),
        5 => PI.powi(5) * c * (243.0 * s * s - 60.0),
        _ => unreachable!("derivative order {n}"),
    }
}

impl SinCubedStream {
    /// The source `(curl)⁴ u`.
    pub fn load(&self, x: [f64; 2]) -> [f64; 2] {
        [
            g(4, x[0]) * g(1, x[1]) + 2.0 * g(2, x[0]) * g(3, x[1]) + g(0, x[0]) * g(5, x[1]),
            -(g(5, x[0]) * g(0, x[1]) + 2.0 * g(3, x[0]) * g(2, x[1]) + g(1, x[0]) * g(4, x[1])),
        ]
    }

    /// Field that evaluates the source term.
    pub fn load_field(&self) -> LoadField {
        LoadField(*self)
    }
}

impl VectorField for SinCubedStream {
    fn value(&self, x: [f64; 2]) -> [f64; 2] {
        [g(0, x[0]) * g(1, x[1]), -g(1, x[0]) * g(0, x[1])]
    }
    fn curl(&self, x: [f64; 2]) -> f64 {
        -(g(2, x[0]) * g(0, x[1]) + g(0, x[0]) * g(2, x[1]))
    }
}

impl ExactVectorField for SinCubedStream {
    fn curl_curl(&self, x: [f64; 2]) -> [f64; 2] {
        [
            -(g(2, x[0]) * g(1, x[1]) + g(0, x[0]) * g(3, x[1])),
            g(3, x[0]) * g(0, x[1]) + g(1, x[0]) * g(2, x[1]),
        ]
    }
}

/// The quad-curl source of [`SinCubedStream`] as a standalone field.
#[derive(Debug, Clone, Copy)]
pub struct LoadField(SinCubedStream);

impl VectorField for LoadField {
    fn value(&self, x: [f64; 2]) -> [f64; 2] {
        self.0.load(x)
    }
    fn curl(&self, _x: [f64; 2]) -> f64 {
        unimplemented!("the load enters only through moments")
    }
}

/// High-order rule for error norms: exact to degree 2k+6 on the reference
/// cell, so quadrature error stays below discretization error.
pub fn error_rule(shape: CellShape, k: usize) -> CellRule {
    match shape {
        CellShape::Rect => rect_rule(k + 4),
        CellShape::Tri => tri_rule(2 * k + 6).expect("supported order"),
    }
}

/// L² errors of `u_h` against an exact solution in value, curl and
/// curl-curl.
pub fn error_norms(
    space: &H2CurlSpace,
    u_h: &FeFunction,
    exact: &(dyn ExactVectorField + Sync),
) -> ErrorReport {
    let rule = error_rule(space.element.shape, space.element.k);
    let table = space.dual_basis_table(&rule.points);
    // per-cell sums are combined sequentially in cell order so results do
    // not depend on the thread count
    let locals: Vec<[f64; 3]> = (0..space.mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let map = space.cell_map(c);
            let det = map.det;
            let samples = space.eval_table(u_h, c, &table);
            let mut local = [0.0f64; 3];
            for (q, s) in samples.iter().enumerate() {
                let w = rule.weights[q] * det;
                let x = map.apply(rule.points[q]);
                let ev = exact.value(x);
                let ec = exact.curl(x);
                let ecc = exact.curl_curl(x);
                local[0] +=
                    w * ((s.value[0] - ev[0]).powi(2) + (s.value[1] - ev[1]).powi(2));
                local[1] += w * (s.curl - ec).powi(2);
                local[2] += w
                    * ((s.curl_curl[0] - ecc[0]).powi(2) + (s.curl_curl[1] - ecc[1]).powi(2));
            }
            local
        })
        .collect();
    let acc = locals
        .iter()
        .fold([0.0f64; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    ErrorReport {
        l2: acc[0].sqrt(),
        curl: acc[1].sqrt(),
        curlcurl: acc[2].sqrt(),
        h: space.mesh.mesh_size(),
        n_dofs: space.n_dofs(),
    }
}

/// Successive rates `log(e_i/e_{i+1}) / log(h_i/h_{i+1})`.
pub fn rates(errors: &[f64], hs: &[f64]) -> Result<Vec<f64>, AnalysisError> {
    if errors.len() != hs.len() || errors.len() < 2 || hs.windows(2).any(|w| w[1] >= w[0]) {
        return Err(AnalysisError::BadSequence);
    }
    if let Some(i) = errors.iter().position(|&e| e == 0.0) {
        return Err(AnalysisError::UndefinedRate { index: i });
    }
    Ok(errors
        .windows(2)
        .zip(hs.windows(2))
        .map(|(e, h)| (e[0] / e[1]).ln() / (h[0] / h[1]).ln())
        .collect())
}

/// Least-squares slope of log(error) against log(h).
pub fn regression_slope(errors: &[f64], hs: &[f64]) -> f64 {
    let n = errors.len() as f64;
    let xs: Vec<f64> = hs.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|e| e.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Relative differences between solutions on consecutive nested meshes.
#[derive(Debug, Clone, Copy)]
pub struct DiffReport {
    pub l2: f64,
    pub curl: f64,
    pub curlcurl: f64,
}

/// Relative L² differences `‖u_c - u_f‖ / ‖u_f‖` (value, curl, curl-curl),
/// evaluated on the fine mesh with the coarse field located through the
/// parent map.
pub fn successive_diff(
    coarse: &H2CurlSpace,
    u_c: &FeFunction,
    fine: &H2CurlSpace,
    u_f: &FeFunction,
) -> Result<DiffReport, AnalysisError> {
    let parents = fine
        .mesh
        .parent_cells
        .as_ref()
        .ok_or(AnalysisError::NotNested)?;
    if parents.len() != fine.mesh.n_cells() || parents.iter().any(|&p| p >= coarse.mesh.n_cells())
    {
        return Err(AnalysisError::NotNested);
    }
    let rule = error_rule(fine.element.shape, fine.element.k);
    let table = fine.dual_basis_table(&rule.points);
    let locals: Vec<[f64; 6]> = (0..fine.mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let map = fine.cell_map(c);
            let det = map.det;
            let parent = parents[c];
            let pmap = coarse.cell_map(parent);
            let samples = fine.eval_table(u_f, c, &table);
            let mut local = [0.0f64; 6];
            for (q, s) in samples.iter().enumerate() {
                let w = rule.weights[q] * det;
                let x = map.apply(rule.points[q]);
                let sc = coarse.eval(u_c, parent, pmap.inverse_apply(x));
                local[0] += w
                    * ((s.value[0] - sc.value[0]).powi(2) + (s.value[1] - sc.value[1]).powi(2));
                local[1] += w * (s.curl - sc.curl).powi(2);
                local[2] += w
                    * ((s.curl_curl[0] - sc.curl_curl[0]).powi(2)
                        + (s.curl_curl[1] - sc.curl_curl[1]).powi(2));
                local[3] += w * (s.value[0] * s.value[0] + s.value[1] * s.value[1]);
                local[4] += w * s.curl * s.curl;
                local[5] +=
                    w * (s.curl_curl[0] * s.curl_curl[0] + s.curl_curl[1] * s.curl_curl[1]);
            }
            local
        })
        .collect();
    let acc = locals.iter().fold([0.0f64; 6], |a, b| {
        [
            a[0] + b[0],
            a[1] + b[1],
            a[2] + b[2],
            a[3] + b[3],
            a[4] + b[4],
            a[5] + b[5],
        ]
    });
    Ok(DiffReport {
        l2: (acc[0] / acc[3]).sqrt(),
        curl: (acc[1] / acc[4]).sqrt(),
        curlcurl: (acc[2] / acc[5]).sqrt(),
    })
}

/// Closed-form global DOF counts for the mixed method and the size gap to
/// the auxiliary-variable mixed scheme, in the comparison-table order
/// convention (its k is this library's element order minus one).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DofCounts {
    /// mixed-method total on N² uniform rectangles
    pub m1: i64,
    /// extra DOFs the auxiliary-variable scheme needs on rectangles
    pub delta1: i64,
    /// mixed-method total on 2N² uniform triangles
    pub m2: i64,
    /// extra DOFs the auxiliary-variable scheme needs on triangles
    pub delta2: i64,
}

pub fn dof_counts(k: usize, n: usize) -> DofCounts {
    let (k, n) = (k as i64, n as i64);
    DofCounts {
        m1: 2 * (n + 1) * (n + 1) + 6 * k * (n + 1) * n + (3 * k * k - 2 * k) * n * n,
        delta1: 2 * n * n * (k * k - 2 * k - 1) - 4 * n - 1,
        m2: 2 * (n + 1) * (n + 1) + 3 * k * (3 * n * n + 2 * n) + (3 * k * k - 5 * k) * n * n,
        delta2: 2 * n * n * (k * k - k - 4) - 8 * n - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fespace::H2CurlSpace;
    use crate::mesh::{uniform_rect_mesh, uniform_tri_mesh};
    use std::sync::Arc;

    #[test]
    fn manufactured_value_at_sample_point() {
        let s = SinCubedStream;
        let v = s.value([0.5, 0.25]);
        let expect = 3.0 * std::f64::consts::SQRT_2 * PI / 4.0;
        assert!((v[0] - expect).abs() < 1e-14, "{} vs {expect}", v[0]);
    }

    #[test]
    fn manufactured_divergence_free() {
        // central finite differences of the closed form
        let s = SinCubedStream;
        let h = 1e-5;
        for i in 0..100 {
            let x = [
                0.05 + 0.9 * ((i * 37) % 100) as f64 / 100.0,
                0.05 + 0.9 * ((i * 61) % 100) as f64 / 100.0,
            ];
            let dudx = (s.value([x[0] + h, x[1]])[0] - s.value([x[0] - h, x[1]])[0]) / (2.0 * h);
            let dvdy = (s.value([x[0], x[1] + h])[1] - s.value([x[0], x[1] - h])[1]) / (2.0 * h);
            assert!((dudx + dvdy).abs() < 1e-6);
        }
    }

    #[test]
    fn manufactured_boundary_conditions() {
        let s = SinCubedStream;
        for t in [0.0, 0.13, 0.5, 0.77, 1.0] {
            for x in [[t, 0.0], [t, 1.0], [0.0, t], [1.0, t]] {
                let v = s.value(x);
                // both components vanish on the boundary (stronger than u×n=0)
                assert!(v[0].abs() < 1e-13 && v[1].abs() < 1e-13);
                assert!(s.curl(x).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn rates_examples() {
        let r = rates(&[1e-3, 1.25e-4], &[1.0, 0.5]).unwrap();
        assert!((r[0] - 3.0).abs() < 1e-12);
        let r = rates(&[0.5, 0.5, 0.5], &[1.0, 0.5, 0.25]).unwrap();
        assert!(r.iter().all(|&x| x.abs() < 1e-12));
        assert_eq!(
            rates(&[1.0, 0.0], &[1.0, 0.5]),
            Err(AnalysisError::UndefinedRate { index: 1 })
        );
        assert_eq!(rates(&[1.0], &[1.0]), Err(AnalysisError::BadSequence));
        // exact power law recovered by regression too
        let hs = [0.5, 0.25, 0.125];
        let errs: Vec<f64> = hs.iter().map(|&h: &f64| 3.7 * h.powf(2.5)).collect();
        assert!((regression_slope(&errs, &hs) - 2.5).abs() < 1e-12);
    }

    #[test]
    fn dof_count_examples() {
        let d = dof_counts(2, 2);
        assert_eq!(d.m1, 18 + 72 + 32);
        let d = dof_counts(3, 2);
        assert_eq!(d.delta1, 16 - 8 - 1);
        let d = dof_counts(3, 3);
        assert_eq!(d.delta2, 36 - 24 - 1);
        // positivity claims: delta1 > 0 for k >= 3, N >= 2; delta2 > 0 for
        // k >= 3, N >= 3
        for k in 3..=5 {
            for n in 2..=10 {
                assert!(dof_counts(k, n).delta1 > 0);
            }
            for n in 3..=10 {
                assert!(dof_counts(k, n).delta2 > 0);
            }
        }
    }

    #[test]
    fn built_space_totals_match_closed_forms() {
        // vector + scalar totals against M1/M2 with the table convention
        // k_table = k - 1
        for (k, n) in [(3usize, 2usize), (4, 4), (3, 8)] {
            let mesh = Arc::new(uniform_rect_mesh(n));
            let v = H2CurlSpace::new(mesh.clone(), k).unwrap();
            let s = crate::fespace::H1Space::new(mesh, k).unwrap();
            let total = (v.n_dofs() + s.n_dofs()) as i64;
            assert_eq!(total, dof_counts(k - 1, n).m1, "rect k={k} N={n}");
        }
        for (k, n) in [(4usize, 2usize), (5, 3)] {
            let mesh = Arc::new(uniform_tri_mesh(n));
            let v = H2CurlSpace::new(mesh.clone(), k).unwrap();
            let s = crate::fespace::H1Space::new(mesh, k).unwrap();
            let total = (v.n_dofs() + s.n_dofs()) as i64;
            assert_eq!(total, dof_counts(k - 1, n).m2, "tri k={k} N={n}");
        }
    }

    #[test]
    fn error_norm_of_interpolant_is_finite_and_positive() {
        let mesh = Arc::new(uniform_rect_mesh(2));
        let space = H2CurlSpace::new(mesh, 3).unwrap();
        let exact = SinCubedStream;
        let u_h = space.interpolate(&exact);
        let report = error_norms(&space, &u_h, &exact);
        // interpolant of a non-polynomial field: errors nonzero, below the
        // field scale (‖u‖ ≈ 1.86 on this very coarse mesh)
        assert!(report.l2 > 0.0 && report.l2 < 2.0);
        assert!(report.curlcurl > 0.0);
        assert_eq!(report.n_dofs, space.n_dofs());
        assert!((report.h - 0.5).abs() < 1e-15);
    }

    struct SelfField<'a> {
        space: &'a H2CurlSpace,
    }

    impl crate::refelem::VectorField for SelfField<'_> {
        fn value(&self, x: [f64; 2]) -> [f64; 2] {
            let xhat = self.space.cell_map(0).inverse_apply(x);
            self.space.eval(&self.u(), 0, xhat).value
        }
        fn curl(&self, x: [f64; 2]) -> f64 {
            let xhat = self.space.cell_map(0).inverse_apply(x);
            self.space.eval(&self.u(), 0, xhat).curl
        }
    }

    impl ExactVectorField for SelfField<'_> {
        fn curl_curl(&self, x: [f64; 2]) -> [f64; 2] {
            let xhat = self.space.cell_map(0).inverse_apply(x);
            self.space.eval(&self.u(), 0, xhat).curl_curl
        }
    }

    impl SelfField<'_> {
        fn u(&self) -> crate::fespace::FeFunction {
            let mut f = crate::fespace::FeFunction::zeros(self.space.n_dofs());
            for (i, c) in f.coeffs.iter_mut().enumerate() {
                *c = ((i * 7 + 3) % 11) as f64 / 11.0 - 0.4;
            }
            f
        }
    }

    #[test]
    fn error_norm_against_itself_vanishes() {
        // one-cell mesh: comparing a discrete field against its own
        // evaluation gives zero in all three norms
        let mesh = Arc::new(uniform_rect_mesh(1));
        let space = H2CurlSpace::new(mesh, 3).unwrap();
        let field = SelfField { space: &space };
        let u_h = field.u();
        let norms = crate::assembly::field_norms(
            &space,
            &u_h,
            &space.dual_basis_table(&error_rule(crate::refelem::CellShape::Rect, 3).points),
            &error_rule(crate::refelem::CellShape::Rect, 3),
        );
        let report = error_norms(&space, &u_h, &field);
        assert!(report.l2 <= 1e-12 * norms[0].max(1.0));
        assert!(report.curl <= 1e-12 * norms[1].max(1.0));
        assert!(report.curlcurl <= 1e-12 * norms[2].max(1.0));
    }
}
