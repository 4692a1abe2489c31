//! Global finite element spaces on a mesh: the H²(curl)-conforming vector
//! space built from the reference elements through the covariant map
//! `u ∘ F = B^{-T} û`, and the scalar H¹ Lagrange space used as the mixed
//! multiplier space.
//!
//! Degree-of-freedom sharing: curl point values are single-valued at mesh
//! nodes (the per-cell `det B` factor of the mapped node functionals is
//! folded into the local scale factors), tangential moments are taken in the
//! global edge orientation (cells whose local edge runs backwards pick up a
//! parity sign), and interior moments stay cell-local.

use std::sync::Arc;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::mesh::{AffineMap, CellKind, Mesh2D, MeshError};
use crate::poly::{scalar_p_basis, scalar_q_basis, Poly2D, VecPoly2D};
use crate::refelem::{
    build_rect_element, build_tri_element, edge_test_coeffs, CellShape, DofFunctional,
    ElementError, NodeLoc, ReferenceElement, VectorField,
};

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Element(#[from] ElementError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error("mesh kind {mesh:?} does not match the requested element family")]
    KindMismatch { mesh: CellKind },
    #[error("scalar space order must be >= 1, got {0}")]
    BadScalarOrder(usize),
    #[error("cell {cell} is inverted (det B = {det:.3e})")]
    InvertedCell { cell: usize, det: f64 },
}

/// Scalar counterpart of [`VectorField`].
pub trait ScalarField {
    fn value(&self, x: [f64; 2]) -> f64;
}

impl<F: Fn([f64; 2]) -> f64> ScalarField for F {
    fn value(&self, x: [f64; 2]) -> f64 {
        self(x)
    }
}

/// Coefficients of a finite element function, indexed by global DOFs of the
/// space it was built on.
#[derive(Debug, Clone)]
pub struct FeFunction {
    pub coeffs: Vec<f64>,
}

impl FeFunction {
    pub fn zeros(n: usize) -> Self {
        FeFunction {
            coeffs: vec![0.0; n],
        }
    }
}

/// Global numbering with per-cell scale factors and boundary flags.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub n_global: usize,
    /// `cell_to_global[c][j] = (global index, scale)`: the local coefficient
    /// of basis function `j` on cell `c` is `scale * global_coefficient`.
    pub cell_to_global: Vec<Vec<(usize, f64)>>,
    pub boundary_dofs: Vec<bool>,
}

impl DofMap {
    pub fn n_boundary(&self) -> usize {
        self.boundary_dofs.iter().filter(|b| **b).count()
    }
}

/// Values of one local basis function at a point, pushed to a physical cell.
#[derive(Debug, Clone, Copy)]
pub struct FieldSample {
    pub value: [f64; 2],
    pub curl: f64,
    pub curl_curl: [f64; 2],
}

/// Reference-cell basis values tabulated at a fixed point set.
pub struct BasisTable {
    pub points: Vec<[f64; 2]>,
    /// `[j][q]` layout.
    pub value: Vec<Vec<[f64; 2]>>,
    pub curl: Vec<Vec<f64>>,
    pub curl_curl: Vec<Vec<[f64; 2]>>,
}

impl BasisTable {
    pub fn new(basis: &[VecPoly2D], points: &[[f64; 2]]) -> Self {
        let mut value = Vec::with_capacity(basis.len());
        let mut curl = Vec::with_capacity(basis.len());
        let mut curl_curl = Vec::with_capacity(basis.len());
        for b in basis {
            let c = b.scalar_curl();
            let cc = c.vector_curl();
            value.push(points.iter().map(|&p| b.eval(p)).collect());
            curl.push(points.iter().map(|&p| c.eval(p[0], p[1])).collect());
            curl_curl.push(points.iter().map(|&p| cc.eval(p)).collect());
        }
        BasisTable {
            points: points.to_vec(),
            value,
            curl,
            curl_curl,
        }
    }
}

/// Push reference samples to a physical cell: values transform covariantly,
/// curls scale by 1/det B, curl-curls by B/det B².
pub fn push_sample(map: &AffineMap, value: [f64; 2], curl: f64, curl_curl: [f64; 2]) -> FieldSample {
    let v = map.inv_transpose_apply(value);
    let c = curl / map.det;
    let cc = map.apply_mat(curl_curl);
    FieldSample {
        value: v,
        curl: c,
        curl_curl: [cc[0] / (map.det * map.det), cc[1] / (map.det * map.det)],
    }
}

/// The pullback `û = B^T (u ∘ F)` of a physical field; its curl satisfies
/// `curl û = det(B) · (curl u) ∘ F`.
pub struct PullbackField<'a> {
    pub map: &'a AffineMap,
    pub field: &'a dyn VectorField,
}

impl VectorField for PullbackField<'_> {
    fn value(&self, xhat: [f64; 2]) -> [f64; 2] {
        self.map.transpose_apply(self.field.value(self.map.apply(xhat)))
    }
    fn curl(&self, xhat: [f64; 2]) -> f64 {
        self.map.det * self.field.curl(self.map.apply(xhat))
    }
}

/// H²(curl)-conforming space V_h (with V_h⁰ boundary data recorded in the
/// DOF map).
pub struct H2CurlSpace {
    pub mesh: Arc<Mesh2D>,
    pub element: ReferenceElement,
    pub dof_map: DofMap,
    maps: Vec<AffineMap>,
    /// cells adjacent to each edge
    edge_cells: Vec<Vec<usize>>,
    n_vertex_dofs: usize,
    n_edge_node_dofs: usize,
    n_edge_moment_dofs: usize,
}

impl H2CurlSpace {
    pub fn new(mesh: Arc<Mesh2D>, k: usize) -> Result<Self, SpaceError> {
        let element = match mesh.kind {
            CellKind::Quad => build_rect_element(k)?,
            CellKind::Tri => build_tri_element(k)?,
        };
        let maps = cell_maps(&mesh)?;
        let n_v = mesh.n_vertices();
        let n_e = mesh.n_edges();
        let n_c = mesh.n_cells();
        let slots = k - 2;
        let n_int = element.n_interior_dofs;
        let voff = 0;
        let enoff = voff + n_v;
        let emoff = enoff + n_e * slots;
        let ioff = emoff + n_e * k;
        let n_global = ioff + n_c * n_int;

        let mut cell_to_global = Vec::with_capacity(n_c);
        for c in 0..n_c {
            let det = maps[c].det;
            let mut row = Vec::with_capacity(element.n_dofs());
            for dof in &element.dofs {
                row.push(match dof {
                    DofFunctional::NodeCurl { loc, .. } => match loc {
                        NodeLoc::Vertex(v) => (voff + mesh.cells[c][*v], det),
                        NodeLoc::EdgeNode { edge, slot } => {
                            let (e, sign) = mesh.cell_edges[c][*edge];
                            let sg = if sign > 0 { *slot } else { slots - 1 - *slot };
                            (enoff + e * slots + sg, det)
                        }
                    },
                    DofFunctional::EdgeMoment { edge, degree, .. } => {
                        let (e, sign) = mesh.cell_edges[c][*edge];
                        let scale = if sign > 0 {
                            1.0
                        } else if degree % 2 == 0 {
                            -1.0
                        } else {
                            1.0
                        };
                        (emoff + e * k + degree, scale)
                    }
                    DofFunctional::InteriorMoment { index, .. } => {
                        (ioff + c * n_int + index, 1.0)
                    }
                });
            }
            cell_to_global.push(row);
        }

        let mut boundary_dofs = vec![false; n_global];
        for (v, &b) in mesh.boundary_vertices.iter().enumerate() {
            if b {
                boundary_dofs[voff + v] = true;
            }
        }
        for (e, &b) in mesh.boundary_edges.iter().enumerate() {
            if b {
                for s in 0..slots {
                    boundary_dofs[enoff + e * slots + s] = true;
                }
                for m in 0..k {
                    boundary_dofs[emoff + e * k + m] = true;
                }
            }
        }

        let edge_cells = edge_adjacency(&mesh);
        Ok(H2CurlSpace {
            mesh,
            element,
            dof_map: DofMap {
                n_global,
                cell_to_global,
                boundary_dofs,
            },
            maps,
            edge_cells,
            n_vertex_dofs: n_v,
            n_edge_node_dofs: n_e * slots,
            n_edge_moment_dofs: n_e * k,
        })
    }

    pub fn k(&self) -> usize {
        self.element.k
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_map.n_global
    }

    pub fn cell_map(&self, c: usize) -> &AffineMap {
        &self.maps[c]
    }

    pub fn edge_cells(&self, e: usize) -> &[usize] {
        &self.edge_cells[e]
    }

    /// Interpolate a smooth field: curl point values at mesh nodes,
    /// tangential moments on globally oriented edges, interior moments per
    /// cell. Exact on fields whose restriction lies in the local space.
    pub fn interpolate(&self, u: &dyn VectorField) -> FeFunction {
        let k = self.element.k;
        let slots = k - 2;
        let mut coeffs = vec![0.0; self.n_dofs()];
        for (v, p) in self.mesh.vertices.iter().enumerate() {
            coeffs[v] = u.curl(*p);
        }
        let enoff = self.n_vertex_dofs;
        let emoff = enoff + self.n_edge_node_dofs;
        let style = self.element.options().edge_moments;
        let edge_rule = crate::quadrature::gauss_interval(k + 2);
        for (e, &[a, b]) in self.mesh.edges.iter().enumerate() {
            let va = self.mesh.vertices[a];
            let vb = self.mesh.vertices[b];
            for s in 0..slots {
                let t = (s + 1) as f64 / (k - 1) as f64;
                let p = [va[0] + t * (vb[0] - va[0]), va[1] + t * (vb[1] - va[1])];
                coeffs[enoff + e * slots + s] = u.curl(p);
            }
            let mid = [0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1])];
            let half = [0.5 * (vb[0] - va[0]), 0.5 * (vb[1] - va[1])];
            let hlen = (half[0] * half[0] + half[1] * half[1]).sqrt();
            let tau = [half[0] / hlen, half[1] / hlen];
            for m in 0..k {
                let q = edge_test_coeffs(style, m);
                let mut acc = 0.0;
                for (&t, &w) in edge_rule.nodes.iter().zip(&edge_rule.weights) {
                    let x = [mid[0] + t * half[0], mid[1] + t * half[1]];
                    let val = u.value(x);
                    let qt = q.iter().rev().fold(0.0, |acc2, &c| acc2 * t + c);
                    acc += w * (val[0] * tau[0] + val[1] * tau[1]) * qt;
                }
                coeffs[emoff + e * k + m] = acc * hlen;
            }
        }
        let ioff = emoff + self.n_edge_moment_dofs;
        let n_int = self.element.n_interior_dofs;
        for c in 0..self.mesh.n_cells() {
            let map = &self.maps[c];
            for dof in &self.element.dofs {
                if let DofFunctional::InteriorMoment { index, test } = dof {
                    let val = self.element.cell_rule().integrate(|xhat| {
                        let x = map.apply(xhat);
                        let v = map.transpose_apply(u.value(x));
                        let t = test.eval(xhat);
                        v[0] * t[0] + v[1] * t[1]
                    });
                    coeffs[ioff + c * n_int + index] = val;
                }
            }
        }
        FeFunction { coeffs }
    }

    /// Local coefficients of `f` on a cell (global coefficients times the
    /// per-cell scale factors).
    pub fn local_coeffs(&self, f: &FeFunction, c: usize) -> Vec<f64> {
        self.dof_map.cell_to_global[c]
            .iter()
            .map(|&(g, s)| s * f.coeffs[g])
            .collect()
    }

    /// Evaluate value, curl and curl-curl of `f` at a reference point of a
    /// cell.
    pub fn eval(&self, f: &FeFunction, c: usize, xhat: [f64; 2]) -> FieldSample {
        let local = self.local_coeffs(f, c);
        let mut value = [0.0; 2];
        let mut curl = 0.0;
        let mut curl_curl = [0.0; 2];
        for (j, phi) in self.element.dual_basis.iter().enumerate() {
            let w = local[j];
            if w == 0.0 {
                continue;
            }
            let v = phi.eval(xhat);
            value[0] += w * v[0];
            value[1] += w * v[1];
            let cpoly = phi.scalar_curl();
            curl += w * cpoly.eval(xhat[0], xhat[1]);
            let cc = cpoly.vector_curl().eval(xhat);
            curl_curl[0] += w * cc[0];
            curl_curl[1] += w * cc[1];
        }
        push_sample(&self.maps[c], value, curl, curl_curl)
    }

    /// Evaluate `f` at every point of a reference table on one cell.
    pub fn eval_table(&self, f: &FeFunction, c: usize, table: &BasisTable) -> Vec<FieldSample> {
        let local = self.local_coeffs(f, c);
        let map = &self.maps[c];
        (0..table.points.len())
            .map(|q| {
                let mut value = [0.0; 2];
                let mut curl = 0.0;
                let mut curl_curl = [0.0; 2];
                for (j, &w) in local.iter().enumerate() {
                    if w == 0.0 {
                        continue;
                    }
                    value[0] += w * table.value[j][q][0];
                    value[1] += w * table.value[j][q][1];
                    curl += w * table.curl[j][q];
                    curl_curl[0] += w * table.curl_curl[j][q][0];
                    curl_curl[1] += w * table.curl_curl[j][q][1];
                }
                push_sample(map, value, curl, curl_curl)
            })
            .collect()
    }

    pub fn dual_basis_table(&self, points: &[[f64; 2]]) -> BasisTable {
        BasisTable::new(&self.element.dual_basis, points)
    }

    /// Sample the tangential-trace and curl-trace jumps of a global basis
    /// function across an interior edge.
    pub fn edge_jumps(&self, g: usize, e: usize, samples: usize) -> (f64, f64) {
        let cells = &self.edge_cells[e];
        assert_eq!(cells.len(), 2, "edge {e} is not interior");
        let [a, b] = self.mesh.edges[e];
        let va = self.mesh.vertices[a];
        let vb = self.mesh.vertices[b];
        let len = ((vb[0] - va[0]).powi(2) + (vb[1] - va[1]).powi(2)).sqrt();
        let tau = [(vb[0] - va[0]) / len, (vb[1] - va[1]) / len];
        let mut f = FeFunction::zeros(self.n_dofs());
        f.coeffs[g] = 1.0;
        let mut max_tan: f64 = 0.0;
        let mut max_curl: f64 = 0.0;
        for s in 0..samples {
            let t = (s as f64 + 0.5) / samples as f64;
            let x = [va[0] + t * (vb[0] - va[0]), va[1] + t * (vb[1] - va[1])];
            let mut traces = Vec::with_capacity(2);
            for &c in cells {
                let xhat = self.maps[c].inverse_apply(x);
                let sample = self.eval(&f, c, xhat);
                traces.push((
                    sample.value[0] * tau[0] + sample.value[1] * tau[1],
                    sample.curl,
                ));
            }
            max_tan = max_tan.max((traces[0].0 - traces[1].0).abs());
            max_curl = max_curl.max((traces[0].1 - traces[1].1).abs());
        }
        (max_tan, max_curl)
    }

    /// Global DOF indices with support on a cell.
    pub fn cell_globals(&self, c: usize) -> &[(usize, f64)] {
        &self.dof_map.cell_to_global[c]
    }
}

/// Apply the physical degrees of freedom of one cell to a field: mapped node
/// functionals carry `det B`, edge moments use the physical tangent and
/// arclength, interior moments the contravariant test transform
/// `q ∘ F = B q̂ / det B`.
pub fn local_dofs_physical(
    element: &ReferenceElement,
    map: &AffineMap,
    u: &dyn VectorField,
) -> Vec<f64> {
    let edge_rule = crate::quadrature::gauss_interval(element.k + 2);
    element
        .dofs
        .iter()
        .map(|dof| match dof {
            DofFunctional::NodeCurl { point, .. } => map.det * u.curl(map.apply(*point)),
            DofFunctional::EdgeMoment { edge, q, .. } => {
                let (mid_hat, half_hat) = element.shape.edge_chart(*edge);
                let mid = map.apply(mid_hat);
                let end = map.apply([mid_hat[0] + half_hat[0], mid_hat[1] + half_hat[1]]);
                let half = [end[0] - mid[0], end[1] - mid[1]];
                let hlen = (half[0] * half[0] + half[1] * half[1]).sqrt();
                let tau = [half[0] / hlen, half[1] / hlen];
                let mut acc = 0.0;
                for (&t, &w) in edge_rule.nodes.iter().zip(&edge_rule.weights) {
                    let x = [mid[0] + t * half[0], mid[1] + t * half[1]];
                    let val = u.value(x);
                    let qt = q.iter().rev().fold(0.0, |a, &c| a * t + c);
                    acc += w * (val[0] * tau[0] + val[1] * tau[1]) * qt;
                }
                acc * hlen
            }
            DofFunctional::InteriorMoment { test, .. } => {
                let sign = map.det.signum();
                element.cell_rule().integrate(|xhat| {
                    let x = map.apply(xhat);
                    let v = u.value(x);
                    let q = map.apply_mat(test.eval(xhat));
                    sign * (v[0] * q[0] + v[1] * q[1])
                })
            }
        })
        .collect()
}

/// Interpolate a field on one physical cell; returns local dual-basis
/// coefficients (equal to the physical DOF values).
pub fn local_interpolate(
    element: &ReferenceElement,
    map: &AffineMap,
    u: &dyn VectorField,
) -> Vec<f64> {
    let pullback = PullbackField { map, field: u };
    element.apply_dofs(&pullback)
}

/// Where a scalar Lagrange node sits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScalarNodeLoc {
    Vertex(usize),
    EdgeNode { edge: usize, slot: usize },
    Interior(usize),
}

/// Nodal scalar reference element of order `k` (Q_k on the square, P_k on
/// the triangle) on the uniform lattice.
pub struct ScalarElement {
    pub shape: CellShape,
    pub k: usize,
    pub nodes: Vec<[f64; 2]>,
    pub node_loc: Vec<ScalarNodeLoc>,
    pub basis: Vec<Poly2D>,
}

pub fn build_scalar_element(shape: CellShape, k: usize) -> Result<ScalarElement, SpaceError> {
    if k < 1 {
        return Err(SpaceError::BadScalarOrder(k));
    }
    let mut nodes = Vec::new();
    let mut node_loc = Vec::new();
    let mut interior = 0usize;
    match shape {
        CellShape::Rect => {
            // vertices, then edge nodes, then interior, matching the global
            // numbering scheme
            let coord = |i: usize| -1.0 + 2.0 * i as f64 / k as f64;
            let mut push = |i: usize, j: usize, loc: ScalarNodeLoc| {
                nodes.push([coord(i), coord(j)]);
                node_loc.push(loc);
            };
            push(0, 0, ScalarNodeLoc::Vertex(0));
            push(k, 0, ScalarNodeLoc::Vertex(1));
            push(k, k, ScalarNodeLoc::Vertex(2));
            push(0, k, ScalarNodeLoc::Vertex(3));
            for s in 1..k {
                push(s, 0, ScalarNodeLoc::EdgeNode { edge: 0, slot: s - 1 });
            }
            for s in 1..k {
                push(k, s, ScalarNodeLoc::EdgeNode { edge: 1, slot: s - 1 });
            }
            for s in 1..k {
                push(s, k, ScalarNodeLoc::EdgeNode { edge: 2, slot: s - 1 });
            }
            for s in 1..k {
                push(0, s, ScalarNodeLoc::EdgeNode { edge: 3, slot: s - 1 });
            }
            for i in 1..k {
                for j in 1..k {
                    push(i, j, ScalarNodeLoc::Interior(interior));
                    interior += 1;
                }
            }
        }
        CellShape::Tri => {
            let coord = |i: usize| i as f64 / k as f64;
            let mut push = |i: usize, j: usize, loc: ScalarNodeLoc| {
                nodes.push([coord(i), coord(j)]);
                node_loc.push(loc);
            };
            push(0, 0, ScalarNodeLoc::Vertex(0));
            push(k, 0, ScalarNodeLoc::Vertex(1));
            push(0, k, ScalarNodeLoc::Vertex(2));
            for s in 1..k {
                push(s, 0, ScalarNodeLoc::EdgeNode { edge: 0, slot: s - 1 });
            }
            for s in 1..k {
                // hypotenuse from (1,0) to (0,1); slot counts along it
                push(k - s, s, ScalarNodeLoc::EdgeNode { edge: 1, slot: s - 1 });
            }
            for s in 1..k {
                push(0, k - s, ScalarNodeLoc::EdgeNode { edge: 2, slot: s - 1 });
            }
            for i in 1..k {
                for j in 1..k {
                    if i + j < k {
                        push(i, j, ScalarNodeLoc::Interior(interior));
                        interior += 1;
                    }
                }
            }
        }
    }
    let mono = match shape {
        CellShape::Rect => scalar_q_basis(k),
        CellShape::Tri => scalar_p_basis(k),
    };
    let n = mono.len();
    assert_eq!(n, nodes.len());
    let mut v = DMatrix::<f64>::zeros(n, n);
    for (j, b) in mono.iter().enumerate() {
        for (i, p) in nodes.iter().enumerate() {
            v[(i, j)] = b.eval(p[0], p[1]);
        }
    }
    let ident = DMatrix::<f64>::identity(n, n);
    let lu = v.clone().lu();
    let mut c = lu
        .solve(&ident)
        .unwrap_or_else(|| panic!("lattice Vandermonde singular for {shape:?} k={k}"));
    for _ in 0..2 {
        let r = &ident - &v * &c;
        c += &c * r;
    }
    let mut basis = Vec::with_capacity(n);
    for j in 0..n {
        let mut acc = Poly2D::zero();
        for (m, b) in mono.iter().enumerate() {
            if c[(m, j)] != 0.0 {
                acc = acc.add(&b.scale(c[(m, j)]));
            }
        }
        basis.push(acc);
    }
    Ok(ScalarElement {
        shape,
        k,
        nodes,
        node_loc,
        basis,
    })
}

/// Scalar H¹ Lagrange space S_h of order `k` (S_h⁰ boundary data in the DOF
/// map).
pub struct H1Space {
    pub mesh: Arc<Mesh2D>,
    pub element: ScalarElement,
    pub dof_map: DofMap,
    maps: Vec<AffineMap>,
    /// physical coordinates of every global node
    pub node_coords: Vec<[f64; 2]>,
}

impl H1Space {
    pub fn new(mesh: Arc<Mesh2D>, k: usize) -> Result<Self, SpaceError> {
        let shape = match mesh.kind {
            CellKind::Quad => CellShape::Rect,
            CellKind::Tri => CellShape::Tri,
        };
        let element = build_scalar_element(shape, k)?;
        let maps = cell_maps(&mesh)?;
        let n_v = mesh.n_vertices();
        let n_e = mesh.n_edges();
        let n_c = mesh.n_cells();
        let slots = k - 1;
        let n_int = element
            .node_loc
            .iter()
            .filter(|l| matches!(l, ScalarNodeLoc::Interior(_)))
            .count();
        let enoff = n_v;
        let ioff = enoff + n_e * slots;
        let n_global = ioff + n_c * n_int;
        let mut cell_to_global = Vec::with_capacity(n_c);
        let mut node_coords = vec![[f64::NAN; 2]; n_global];
        for c in 0..n_c {
            let map = &maps[c];
            let mut row = Vec::with_capacity(element.nodes.len());
            for (ln, loc) in element.node_loc.iter().enumerate() {
                let g = match loc {
                    ScalarNodeLoc::Vertex(v) => mesh.cells[c][*v],
                    ScalarNodeLoc::EdgeNode { edge, slot } => {
                        let (e, sign) = mesh.cell_edges[c][*edge];
                        let sg = if sign > 0 { *slot } else { slots - 1 - *slot };
                        enoff + e * slots + sg
                    }
                    ScalarNodeLoc::Interior(i) => ioff + c * n_int + i,
                };
                node_coords[g] = map.apply(element.nodes[ln]);
                row.push((g, 1.0));
            }
            cell_to_global.push(row);
        }
        let mut boundary_dofs = vec![false; n_global];
        for (v, &b) in mesh.boundary_vertices.iter().enumerate() {
            if b {
                boundary_dofs[v] = true;
            }
        }
        for (e, &b) in mesh.boundary_edges.iter().enumerate() {
            if b {
                for s in 0..slots {
                    boundary_dofs[enoff + e * slots + s] = true;
                }
            }
        }
        Ok(H1Space {
            mesh,
            element,
            dof_map: DofMap {
                n_global,
                cell_to_global,
                boundary_dofs,
            },
            maps,
            node_coords,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.dof_map.n_global
    }

    pub fn k(&self) -> usize {
        self.element.k
    }

    pub fn cell_map(&self, c: usize) -> &AffineMap {
        &self.maps[c]
    }

    /// Nodal interpolation: coefficients are point values at the global
    /// nodes.
    pub fn interpolate_nodal(&self, w: &dyn ScalarField) -> FeFunction {
        FeFunction {
            coeffs: self.node_coords.iter().map(|&p| w.value(p)).collect(),
        }
    }

    /// Value and physical gradient at a reference point of a cell.
    pub fn eval(&self, f: &FeFunction, c: usize, xhat: [f64; 2]) -> (f64, [f64; 2]) {
        let map = &self.maps[c];
        let mut value = 0.0;
        let mut grad_hat = [0.0; 2];
        for (j, &(g, _)) in self.dof_map.cell_to_global[c].iter().enumerate() {
            let w = f.coeffs[g];
            if w == 0.0 {
                continue;
            }
            let b = &self.element.basis[j];
            value += w * b.eval(xhat[0], xhat[1]);
            let gb = b.grad().eval(xhat);
            grad_hat[0] += w * gb[0];
            grad_hat[1] += w * gb[1];
        }
        (value, map.inv_transpose_apply(grad_hat))
    }
}

fn cell_maps(mesh: &Mesh2D) -> Result<Vec<AffineMap>, SpaceError> {
    (0..mesh.n_cells())
        .map(|c| {
            let m = mesh.affine_map(c)?;
            if m.det <= 0.0 {
                return Err(SpaceError::InvertedCell { cell: c, det: m.det });
            }
            Ok(m)
        })
        .collect()
}

fn edge_adjacency(mesh: &Mesh2D) -> Vec<Vec<usize>> {
    let mut adj = vec![Vec::new(); mesh.n_edges()];
    for (c, ce) in mesh.cell_edges.iter().enumerate() {
        for &(e, _) in ce {
            adj[e].push(c);
        }
    }
    adj
}
