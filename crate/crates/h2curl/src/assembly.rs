//! Assembly and direct solution of the mixed quad-curl system
//!
//! ```text
//! (curl curl u, curl curl v) + (v, ∇p) = (f, v)   for all v in V_h⁰,
//! (u, ∇q) = 0                                      for all q in S_h⁰,
//! ```
//!
//! discretized as the symmetric indefinite block system `[[A, Bᵀ],[B, 0]]`.
//! Boundary conditions are imposed by eliminating constrained rows and
//! columns before factorization. Element contributions are computed in
//! parallel; the global scatter runs in a fixed cell order, so assembled
//! values do not depend on the thread count.

use faer::prelude::*;
use faer::sparse::{SparseColMat, Triplet};
use rayon::prelude::*;
use thiserror::Error;

use crate::fespace::{BasisTable, FeFunction, H1Space, H2CurlSpace};
use crate::quadrature::{rect_rule, tri_rule, CellRule};
use crate::refelem::{CellShape, VectorField};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("vector and scalar spaces live on different meshes")]
    MeshMismatch,
    #[error("sparse factorization failed: {0}")]
    Factorization(String),
    #[error("solver residual {residual:.3e} exceeds {limit:.1e}; the reduced system looks singular")]
    BadResidual { residual: f64, limit: f64 },
}

/// Compressed sparse row matrix with sorted, unique column indices per row.
#[derive(Debug, Clone)]
pub struct CsrMatrix {
    pub nrows: usize,
    pub ncols: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl CsrMatrix {
    /// Build from triplets, summing duplicates.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut entries: Vec<(usize, usize, f64)> = triplets.to_vec();
        entries.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut cols: Vec<usize> = Vec::with_capacity(entries.len());
        let mut vals: Vec<f64> = Vec::with_capacity(entries.len());
        let mut counts = vec![0usize; nrows];
        let mut prev: Option<(usize, usize)> = None;
        for &(r, c, v) in &entries {
            if prev == Some((r, c)) {
                *vals.last_mut().unwrap() += v;
            } else {
                cols.push(c);
                vals.push(v);
                counts[r] += 1;
                prev = Some((r, c));
            }
        }
        let mut row_ptr = vec![0usize; nrows + 1];
        for r in 0..nrows {
            row_ptr[r + 1] = row_ptr[r] + counts[r];
        }
        CsrMatrix {
            nrows,
            ncols,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        let lo = self.row_ptr[r];
        let hi = self.row_ptr[r + 1];
        match self.cols[lo..hi].binary_search(&c) {
            Ok(i) => self.vals[lo + i],
            Err(_) => 0.0,
        }
    }

    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for r in 0..self.nrows {
            let mut acc = 0.0;
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.vals[i] * x[self.cols[i]];
            }
            y[r] = acc;
        }
    }

    /// `y += s * Aᵀ x`.
    pub fn matvec_transpose_add(&self, x: &[f64], s: f64, y: &mut [f64]) {
        debug_assert_eq!(x.len(), self.nrows);
        debug_assert_eq!(y.len(), self.ncols);
        for r in 0..self.nrows {
            let xr = s * x[r];
            if xr == 0.0 {
                continue;
            }
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                y[self.cols[i]] += self.vals[i] * xr;
            }
        }
    }

    /// Largest absolute deviation from symmetry.
    pub fn symmetry_defect(&self) -> f64 {
        assert_eq!(self.nrows, self.ncols);
        let mut worst: f64 = 0.0;
        for r in 0..self.nrows {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                worst = worst.max((self.vals[i] - self.get(self.cols[i], r)).abs());
            }
        }
        worst
    }

    pub fn inf_norm(&self) -> f64 {
        (0..self.nrows)
            .map(|r| {
                self.vals[self.row_ptr[r]..self.row_ptr[r + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    /// Coordinate-format text dump (`i j value` per line).
    pub fn dump_coo(&self, mut w: impl std::io::Write) -> std::io::Result<()> {
        for r in 0..self.nrows {
            for i in self.row_ptr[r]..self.row_ptr[r + 1] {
                writeln!(w, "{} {} {:.17e}", r, self.cols[i], self.vals[i])?;
            }
        }
        Ok(())
    }
}

/// The reduced saddle-point system after boundary elimination.
pub struct SaddleSystem {
    /// curl-curl block on free vector DOFs (symmetric).
    pub a: CsrMatrix,
    /// constraint block: rows are free scalar DOFs, columns free vector DOFs.
    pub b: CsrMatrix,
    /// load vector on free vector DOFs.
    pub rhs_f: Vec<f64>,
    /// free (unconstrained) global indices of the vector space.
    pub free_v: Vec<usize>,
    /// free global indices of the scalar space.
    pub free_s: Vec<usize>,
    /// total DOF counts of the parent spaces.
    pub n_v_total: usize,
    pub n_s_total: usize,
}

/// Solved fields together with the achieved block-system residual.
pub struct SolveResult {
    pub u: FeFunction,
    pub p: FeFunction,
    pub residual: f64,
}

fn assembly_rule(shape: CellShape, k: usize) -> CellRule {
    match shape {
        CellShape::Rect => rect_rule(k + 2),
        CellShape::Tri => tri_rule(2 * k + 2).expect("supported order"),
    }
}

fn load_rule(shape: CellShape, k: usize) -> CellRule {
    match shape {
        CellShape::Rect => rect_rule(k + 4),
        CellShape::Tri => tri_rule(2 * k + 6).expect("supported order"),
    }
}

struct CellContribution {
    a: Vec<f64>,   // nv_loc × nv_loc
    b: Vec<f64>,   // ns_loc × nv_loc
    rhs: Vec<f64>, // nv_loc
}

/// Assemble the mixed system for `(curl curl u, curl curl v) + (v, ∇p) = (f, v)`.
///
/// The load term uses a higher-order rule than the bilinear forms so that
/// quadrature of non-polynomial data stays below the discretization error.
pub fn assemble(
    vspace: &H2CurlSpace,
    sspace: &H1Space,
    f: &(dyn VectorField + Sync),
) -> Result<SaddleSystem, SolveError> {
    if !std::sync::Arc::ptr_eq(&vspace.mesh, &sspace.mesh) {
        return Err(SolveError::MeshMismatch);
    }
    let mesh = &vspace.mesh;
    let shape = vspace.element.shape;
    let k = vspace.element.k;
    let rule = assembly_rule(shape, k);
    let frule = load_rule(shape, k);
    let vtable = vspace.dual_basis_table(&rule.points);
    let vtable_load = vspace.dual_basis_table(&frule.points);
    // scalar basis gradients at the assembly points
    let ns_loc = sspace.element.basis.len();
    let mut sgrad: Vec<Vec<[f64; 2]>> = Vec::with_capacity(ns_loc);
    for b in &sspace.element.basis {
        let g = b.grad();
        sgrad.push(rule.points.iter().map(|&p| g.eval(p)).collect());
    }
    let nv_loc = vspace.element.n_dofs();

    let contributions: Vec<CellContribution> = (0..mesh.n_cells())
        .into_par_iter()
        .map(|c| {
            let map = vspace.cell_map(c);
            let det = map.det;
            // A: (1/det³) Σ w (B ĉĉ_i)·(B ĉĉ_j)
            let nq = rule.points.len();
            let mut bcc = vec![[0.0f64; 2]; nv_loc * nq];
            for j in 0..nv_loc {
                for q in 0..nq {
                    bcc[j * nq + q] = map.apply_mat(vtable.curl_curl[j][q]);
                }
            }
            let mut a = vec![0.0f64; nv_loc * nv_loc];
            for i in 0..nv_loc {
                for j in i..nv_loc {
                    let mut acc = 0.0;
                    for q in 0..nq {
                        let bi = bcc[i * nq + q];
                        let bj = bcc[j * nq + q];
                        acc += rule.weights[q] * (bi[0] * bj[0] + bi[1] * bj[1]);
                    }
                    let v = acc / (det * det * det);
                    a[i * nv_loc + j] = v;
                    a[j * nv_loc + i] = v;
                }
            }
            // B: Σ w det (B^{-T} v̂_j)·(B^{-T} ∇̂ψ̂_m)
            let mut bmat = vec![0.0f64; ns_loc * nv_loc];
            for q in 0..nq {
                let w = rule.weights[q] * det;
                let pushed_v: Vec<[f64; 2]> = (0..nv_loc)
                    .map(|j| map.inv_transpose_apply(vtable.value[j][q]))
                    .collect();
                for m in 0..ns_loc {
                    let gp = map.inv_transpose_apply(sgrad[m][q]);
                    for (j, pv) in pushed_v.iter().enumerate() {
                        bmat[m * nv_loc + j] += w * (pv[0] * gp[0] + pv[1] * gp[1]);
                    }
                }
            }
            // rhs: Σ w det f(F x̂)·(B^{-T} v̂_i) with the load rule
            let mut rhs = vec![0.0f64; nv_loc];
            for (q, &p) in frule.points.iter().enumerate() {
                let w = frule.weights[q] * det;
                let fv = f.value(map.apply(p));
                for (i, r) in rhs.iter_mut().enumerate() {
                    let pv = map.inv_transpose_apply(vtable_load.value[i][q]);
                    *r += w * (fv[0] * pv[0] + fv[1] * pv[1]);
                }
            }
            CellContribution { a, b: bmat, rhs }
        })
        .collect();

    // reduced index maps
    let n_v = vspace.n_dofs();
    let n_s = sspace.n_dofs();
    let mut v_red = vec![usize::MAX; n_v];
    let mut free_v = Vec::new();
    for g in 0..n_v {
        if !vspace.dof_map.boundary_dofs[g] {
            v_red[g] = free_v.len();
            free_v.push(g);
        }
    }
    let mut s_red = vec![usize::MAX; n_s];
    let mut free_s = Vec::new();
    for g in 0..n_s {
        if !sspace.dof_map.boundary_dofs[g] {
            s_red[g] = free_s.len();
            free_s.push(g);
        }
    }

    // deterministic scatter in cell order
    let mut a_trip = Vec::new();
    let mut b_trip = Vec::new();
    let mut rhs = vec![0.0f64; free_v.len()];
    for (c, contrib) in contributions.iter().enumerate() {
        let vmap = &vspace.dof_map.cell_to_global[c];
        let smap = &sspace.dof_map.cell_to_global[c];
        for (i, &(gi, si)) in vmap.iter().enumerate() {
            let ri = v_red[gi];
            if ri == usize::MAX {
                continue;
            }
            rhs[ri] += si * contrib.rhs[i];
            for (j, &(gj, sj)) in vmap.iter().enumerate() {
                let rj = v_red[gj];
                if rj == usize::MAX {
                    continue;
                }
                let v = si * sj * contrib.a[i * nv_loc + j];
                if v != 0.0 {
                    a_trip.push((ri, rj, v));
                }
            }
        }
        for (m, &(gm, _)) in smap.iter().enumerate() {
            let rm = s_red[gm];
            if rm == usize::MAX {
                continue;
            }
            for (j, &(gj, sj)) in vmap.iter().enumerate() {
                let rj = v_red[gj];
                if rj == usize::MAX {
                    continue;
                }
                let v = sj * contrib.b[m * nv_loc + j];
                if v != 0.0 {
                    b_trip.push((rm, rj, v));
                }
            }
        }
    }

    Ok(SaddleSystem {
        a: CsrMatrix::from_triplets(free_v.len(), free_v.len(), &a_trip),
        b: CsrMatrix::from_triplets(free_s.len(), free_v.len(), &b_trip),
        rhs_f: rhs,
        free_v,
        free_s,
        n_v_total: n_v,
        n_s_total: n_s,
    })
}

impl SaddleSystem {
    pub fn n_free_v(&self) -> usize {
        self.free_v.len()
    }

    pub fn n_free_s(&self) -> usize {
        self.free_s.len()
    }

    /// Apply the full block operator `[[A, Bᵀ],[B, 0]]`.
    pub fn block_matvec(&self, z: &[f64], out: &mut [f64]) {
        let nv = self.n_free_v();
        debug_assert_eq!(z.len(), nv + self.n_free_s());
        debug_assert_eq!(out.len(), z.len());
        self.a.matvec(&z[..nv], &mut out[..nv]);
        self.b.matvec_transpose_add(&z[nv..], 1.0, &mut out[..nv]);
        self.b.matvec(&z[..nv], &mut out[nv..]);
    }

    /// Restrict a full-length vector-space coefficient vector to free DOFs.
    pub fn restrict_v(&self, full: &[f64]) -> Vec<f64> {
        self.free_v.iter().map(|&g| full[g]).collect()
    }
}

/// Direct sparse LU solve of the block system.
///
/// Graded meshes give the curl-curl block a huge dynamic range (entries
/// scale like det(B)⁻³), so the system is symmetrically equilibrated before
/// factorization and polished by iterative refinement. The reported
/// residual is the backward error `‖b - Kz‖ / (‖K‖·‖z‖ + ‖b‖)`.
pub fn solve(sys: &SaddleSystem) -> Result<SolveResult, SolveError> {
    let nv = sys.n_free_v();
    let ns = sys.n_free_s();
    let n = nv + ns;

    // row infinity norms of the block operator (symmetric, so row = column)
    let mut row_abs = vec![0.0f64; n];
    for r in 0..sys.a.nrows {
        for i in sys.a.row_ptr[r]..sys.a.row_ptr[r + 1] {
            row_abs[r] += sys.a.vals[i].abs();
        }
    }
    for r in 0..sys.b.nrows {
        for i in sys.b.row_ptr[r]..sys.b.row_ptr[r + 1] {
            let v = sys.b.vals[i].abs();
            row_abs[nv + r] += v;
            row_abs[sys.b.cols[i]] += v;
        }
    }
    let k_norm = row_abs.iter().fold(0.0f64, |m, &v| m.max(v));
    let scale: Vec<f64> = row_abs
        .iter()
        .map(|&s| if s > 0.0 { 1.0 / s.sqrt() } else { 1.0 })
        .collect();

    let mut triplets: Vec<Triplet<usize, usize, f64>> =
        Vec::with_capacity(sys.a.nnz() + 2 * sys.b.nnz());
    for r in 0..sys.a.nrows {
        for i in sys.a.row_ptr[r]..sys.a.row_ptr[r + 1] {
            let c = sys.a.cols[i];
            triplets.push(Triplet::new(r, c, scale[r] * scale[c] * sys.a.vals[i]));
        }
    }
    for r in 0..sys.b.nrows {
        for i in sys.b.row_ptr[r]..sys.b.row_ptr[r + 1] {
            let c = sys.b.cols[i];
            let v = scale[nv + r] * scale[c] * sys.b.vals[i];
            triplets.push(Triplet::new(nv + r, c, v)); // B
            triplets.push(Triplet::new(c, nv + r, v)); // Bᵀ
        }
    }
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|e| SolveError::Factorization(format!("{e:?}")))?;

    let mut rhs = vec![0.0f64; n];
    rhs[..nv].copy_from_slice(&sys.rhs_f);
    let rhs_norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
    let scaled_rhs = Mat::from_fn(n, 1, |i, _| scale[i] * rhs[i]);
    let sol = lu.solve(&scaled_rhs);
    let mut z: Vec<f64> = (0..n).map(|i| scale[i] * sol[(i, 0)]).collect();

    // refinement sweeps against the unscaled block operator
    let mut residual = f64::INFINITY;
    for _ in 0..4 {
        let mut kz = vec![0.0f64; n];
        sys.block_matvec(&z, &mut kz);
        let r: Vec<f64> = (0..n).map(|i| rhs[i] - kz[i]).collect();
        let r_norm = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        let z_norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        residual = r_norm / (k_norm * z_norm + rhs_norm).max(1e-300);
        if residual < 1e-15 {
            break;
        }
        let r_mat = Mat::from_fn(n, 1, |i, _| scale[i] * r[i]);
        let dz = lu.solve(&r_mat);
        for i in 0..n {
            z[i] += scale[i] * dz[(i, 0)];
        }
    }
    if !residual.is_finite() || residual > 1e-10 {
        return Err(SolveError::BadResidual {
            residual,
            limit: 1e-10,
        });
    }

    let mut u = FeFunction::zeros(sys.n_v_total);
    for (r, &g) in sys.free_v.iter().enumerate() {
        u.coeffs[g] = z[r];
    }
    let mut p = FeFunction::zeros(sys.n_s_total);
    for (r, &g) in sys.free_s.iter().enumerate() {
        p.coeffs[g] = z[nv + r];
    }
    Ok(SolveResult { u, p, residual })
}

/// Coefficient vector of the interpolated gradient of a scalar function:
/// curl nodes vanish, edge moments integrate the tangential derivative, and
/// interior moments are cell-local integrals. All evaluations stay within
/// single cells, so no global point location is needed.
pub fn discrete_gradient(vspace: &H2CurlSpace, sspace: &H1Space, q: &FeFunction) -> FeFunction {
    let k = vspace.element.k;
    let mut coeffs = vec![0.0; vspace.n_dofs()];
    let enoff = vspace.mesh.n_vertices();
    let emoff = enoff + vspace.mesh.n_edges() * (k - 2);
    let ioff = emoff + vspace.mesh.n_edges() * k;
    let style = vspace.element.options().edge_moments;
    let edge_rule = crate::quadrature::gauss_interval(k + 2);
    for (e, &[a, b]) in vspace.mesh.edges.iter().enumerate() {
        let cell = vspace.edge_cells(e)[0];
        let map = vspace.cell_map(cell);
        let va = vspace.mesh.vertices[a];
        let vb = vspace.mesh.vertices[b];
        let mid = [0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1])];
        let half = [0.5 * (vb[0] - va[0]), 0.5 * (vb[1] - va[1])];
        let hlen = (half[0] * half[0] + half[1] * half[1]).sqrt();
        let tau = [half[0] / hlen, half[1] / hlen];
        for m in 0..k {
            let qc = crate::refelem::edge_test_coeffs(style, m);
            let mut acc = 0.0;
            for (&t, &w) in edge_rule.nodes.iter().zip(&edge_rule.weights) {
                let x = [mid[0] + t * half[0], mid[1] + t * half[1]];
                let xhat = map.inverse_apply(x);
                let (_, grad) = sspace.eval(q, cell, xhat);
                let qt = qc.iter().rev().fold(0.0, |acc2, &c| acc2 * t + c);
                acc += w * (grad[0] * tau[0] + grad[1] * tau[1]) * qt;
            }
            coeffs[emoff + e * k + m] = acc * hlen;
        }
    }
    let n_int = vspace.element.n_interior_dofs;
    for c in 0..vspace.mesh.n_cells() {
        let map = vspace.cell_map(c);
        for dof in &vspace.element.dofs {
            if let crate::refelem::DofFunctional::InteriorMoment { index, test } = dof {
                let val = vspace.element.cell_rule().integrate(|xhat| {
                    let (_, grad) = sspace.eval(q, c, xhat);
                    let gp = map.transpose_apply(grad);
                    let t = test.eval(xhat);
                    gp[0] * t[0] + gp[1] * t[1]
                });
                coeffs[ioff + c * n_int + index] = val;
            }
        }
    }
    FeFunction { coeffs }
}

/// L² norms of a finite element field, its curl, and curl-curl.
pub fn field_norms(
    space: &H2CurlSpace,
    f: &FeFunction,
    table: &BasisTable,
    rule: &CellRule,
) -> [f64; 3] {
    let mut acc = [0.0f64; 3];
    for c in 0..space.mesh.n_cells() {
        let det = space.cell_map(c).det;
        let samples = space.eval_table(f, c, table);
        for (q, s) in samples.iter().enumerate() {
            let w = rule.weights[q] * det;
            acc[0] += w * (s.value[0] * s.value[0] + s.value[1] * s.value[1]);
            acc[1] += w * s.curl * s.curl;
            acc[2] += w * (s.curl_curl[0] * s.curl_curl[0] + s.curl_curl[1] * s.curl_curl[1]);
        }
    }
    [acc[0].sqrt(), acc[1].sqrt(), acc[2].sqrt()]
}
