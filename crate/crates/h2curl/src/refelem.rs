//! Reference elements for the H²(curl)-conforming family.
//!
//! An element is the triple (cell, local space, degree-of-freedom set). The
//! degrees of freedom are curl point values at vertex/edge nodes, tangential
//! moments on edges, and interior moments against a fixed test space. The
//! dual basis is recovered by inverting the generalized Vandermonde matrix
//! `V[i][j] = dof_i(basis_j)`.

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::poly::{vector_basis, PolyError, SpaceSpec, VecPoly2D};
use crate::quadrature::{gauss_interval, legendre_coeffs, rect_rule, tri_rule, CellRule, GaussRule1D};

#[derive(Debug, Error)]
pub enum ElementError {
    #[error(transparent)]
    Space(#[from] PolyError),
    #[error("degree-of-freedom set is not unisolvent (inverse residual {residual:.3e})")]
    UnisolvenceFailure { residual: f64 },
    #[error("basis table mismatch: {summary}")]
    BasisTableMismatch {
        summary: String,
        offending_rows: Vec<usize>,
        max_error: f64,
    },
}

/// Reference cell shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellShape {
    /// The square (-1,1)².
    Rect,
    /// The triangle with vertices (0,0), (1,0), (0,1).
    Tri,
}

impl CellShape {
    pub fn vertices(&self) -> &'static [[f64; 2]] {
        match self {
            CellShape::Rect => &[[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]],
            CellShape::Tri => &[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
        }
    }

    /// Local edges as vertex-index pairs; the local tangent points from the
    /// first to the second vertex. Rectangle tangents point along +x/+y,
    /// triangle tangents run counterclockwise.
    pub fn edges(&self) -> &'static [[usize; 2]] {
        match self {
            CellShape::Rect => &[[0, 1], [1, 2], [3, 2], [0, 3]],
            CellShape::Tri => &[[0, 1], [1, 2], [2, 0]],
        }
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices().len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges().len()
    }

    pub fn min_order(&self) -> usize {
        match self {
            CellShape::Rect => 3,
            CellShape::Tri => 4,
        }
    }

    /// Midpoint and half-extent vector of a local edge: `x(t) = mid + t·half`
    /// for `t ∈ [-1, 1]`.
    pub fn edge_chart(&self, edge: usize) -> ([f64; 2], [f64; 2]) {
        let [a, b] = self.edges()[edge];
        let va = self.vertices()[a];
        let vb = self.vertices()[b];
        let mid = [0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1])];
        let half = [0.5 * (vb[0] - va[0]), 0.5 * (vb[1] - va[1])];
        (mid, half)
    }
}

/// Where a curl node sits on the cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeLoc {
    Vertex(usize),
    /// `slot` counts the k-2 interior nodes along the local edge direction.
    EdgeNode { edge: usize, slot: usize },
}

/// One degree of freedom of the reference element.
#[derive(Debug, Clone)]
pub enum DofFunctional {
    /// Point value of the scalar curl.
    NodeCurl { point: [f64; 2], loc: NodeLoc },
    /// `∫_e u·τ q(t) ds` with `q` given by monomial coefficients in the
    /// symmetric edge parameter `t ∈ (-1,1)` and `ds` reference arclength.
    EdgeMoment {
        edge: usize,
        degree: usize,
        q: Vec<f64>,
    },
    /// `∫_K u·test dV`.
    InteriorMoment { index: usize, test: VecPoly2D },
}

/// Anything with point-evaluable values and scalar curl.
pub trait VectorField {
    fn value(&self, x: [f64; 2]) -> [f64; 2];
    fn curl(&self, x: [f64; 2]) -> f64;
}

/// A polynomial field with its curl precomputed.
pub struct PolyField {
    pub field: VecPoly2D,
    curl: crate::poly::Poly2D,
}

impl PolyField {
    pub fn new(field: VecPoly2D) -> Self {
        let curl = field.scalar_curl();
        PolyField { field, curl }
    }
}

impl VectorField for PolyField {
    fn value(&self, x: [f64; 2]) -> [f64; 2] {
        self.field.eval(x)
    }
    fn curl(&self, x: [f64; 2]) -> f64 {
        self.curl.eval(x[0], x[1])
    }
}

/// A field defined by closures for value and curl.
pub struct FnField<F, G>
where
    F: Fn([f64; 2]) -> [f64; 2],
    G: Fn([f64; 2]) -> f64,
{
    pub value: F,
    pub curl: G,
}

impl<F, G> VectorField for FnField<F, G>
where
    F: Fn([f64; 2]) -> [f64; 2],
    G: Fn([f64; 2]) -> f64,
{
    fn value(&self, x: [f64; 2]) -> [f64; 2] {
        (self.value)(x)
    }
    fn curl(&self, x: [f64; 2]) -> f64 {
        (self.curl)(x)
    }
}

/// How edge-moment test polynomials are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeMomentStyle {
    /// `q_m(t) = (scale·t)^m`; the published rectangle basis uses scale 1,
    /// the published triangle basis scale 1/2.
    CenteredMonomial { scale: f64 },
    /// Legendre polynomials `P_m(t)`.
    Legendre,
}

/// Knobs for element construction; the public builders pick per-shape
/// defaults that reproduce the published lowest-order bases (rectangle)
/// and keep the Vandermonde inversion well conditioned (triangle).
#[derive(Debug, Clone, Copy)]
pub struct ElementOptions {
    pub edge_moments: EdgeMomentStyle,
    /// Scale interior test fields to unit L² norm on the reference cell.
    pub normalize_interior: bool,
}

impl ElementOptions {
    pub fn default_for(shape: CellShape) -> Self {
        match shape {
            CellShape::Rect => ElementOptions {
                edge_moments: EdgeMomentStyle::CenteredMonomial { scale: 1.0 },
                normalize_interior: false,
            },
            CellShape::Tri => ElementOptions {
                edge_moments: EdgeMomentStyle::Legendre,
                normalize_interior: true,
            },
        }
    }
}

/// Unisolvence report: Vandermonde condition number and the worst duality
/// defect `max |dof_i(phi_j) - δ_ij|` recomputed by quadrature.
#[derive(Debug, Clone, Copy)]
pub struct UnisolvenceReport {
    pub cond: f64,
    pub max_offdiag: f64,
}

/// A fully built reference element.
#[derive(Debug, Clone)]
pub struct ReferenceElement {
    pub shape: CellShape,
    pub k: usize,
    pub dofs: Vec<DofFunctional>,
    pub dual_basis: Vec<VecPoly2D>,
    pub vandermonde_cond: f64,
    pub n_node_dofs: usize,
    pub n_edge_moment_dofs: usize,
    pub n_interior_dofs: usize,
    options: ElementOptions,
    edge_rule: GaussRule1D,
    cell_rule: CellRule,
}

/// Build the rectangle element of order `k >= 3` on (-1,1)².
pub fn build_rect_element(k: usize) -> Result<ReferenceElement, ElementError> {
    build_element(CellShape::Rect, k, ElementOptions::default_for(CellShape::Rect))
}

/// Build the triangle element of order `k >= 4` on (0,0),(1,0),(0,1).
pub fn build_tri_element(k: usize) -> Result<ReferenceElement, ElementError> {
    build_element(CellShape::Tri, k, ElementOptions::default_for(CellShape::Tri))
}

/// Coefficients (in the symmetric edge parameter) of the degree-`m` edge
/// test polynomial for the given style.
pub fn edge_test_coeffs(style: EdgeMomentStyle, m: usize) -> Vec<f64> {
    match style {
        EdgeMomentStyle::CenteredMonomial { scale } => {
            let mut q = vec![0.0; m + 1];
            q[m] = scale.powi(m as i32);
            q
        }
        EdgeMomentStyle::Legendre => legendre_coeffs(m),
    }
}

fn interior_space(shape: CellShape, k: usize) -> SpaceSpec {
    match shape {
        CellShape::Rect => SpaceSpec::RectInterior { k },
        CellShape::Tri => SpaceSpec::TriInterior { k },
    }
}

fn primal_space(shape: CellShape, k: usize) -> SpaceSpec {
    match shape {
        CellShape::Rect => SpaceSpec::RectPrimal { k },
        CellShape::Tri => SpaceSpec::TriPrimal { k },
    }
}

/// Build an element with explicit options. Exposed so diagnostics can probe
/// alternative degree-of-freedom conventions.
pub fn build_element(
    shape: CellShape,
    k: usize,
    options: ElementOptions,
) -> Result<ReferenceElement, ElementError> {
    let basis = vector_basis(primal_space(shape, k))?;
    let cell_rule = match shape {
        CellShape::Rect => rect_rule(k + 2),
        CellShape::Tri => tri_rule(2 * k + 2).expect("2k+2 <= 20 for supported orders"),
    };
    let edge_rule = gauss_interval(k + 2);

    let mut dofs = Vec::new();
    // curl nodes: vertices first, then the k-2 uniform interior nodes per edge
    for (v, p) in shape.vertices().iter().enumerate() {
        dofs.push(DofFunctional::NodeCurl {
            point: *p,
            loc: NodeLoc::Vertex(v),
        });
    }
    for (e, [a, b]) in shape.edges().iter().enumerate() {
        let va = shape.vertices()[*a];
        let vb = shape.vertices()[*b];
        for slot in 0..k - 2 {
            let t = (slot + 1) as f64 / (k - 1) as f64;
            dofs.push(DofFunctional::NodeCurl {
                point: [va[0] + t * (vb[0] - va[0]), va[1] + t * (vb[1] - va[1])],
                loc: NodeLoc::EdgeNode { edge: e, slot },
            });
        }
    }
    let n_node_dofs = dofs.len();
    for e in 0..shape.n_edges() {
        for m in 0..k {
            dofs.push(DofFunctional::EdgeMoment {
                edge: e,
                degree: m,
                q: edge_test_coeffs(options.edge_moments, m),
            });
        }
    }
    let n_edge_moment_dofs = dofs.len() - n_node_dofs;
    let interior = vector_basis(interior_space(shape, k))?;
    let n_interior_dofs = interior.len();
    for (i, test) in interior.into_iter().enumerate() {
        let test = if options.normalize_interior {
            let norm2 = cell_rule.integrate(|p| {
                let v = test.eval(p);
                v[0] * v[0] + v[1] * v[1]
            });
            test.scale(1.0 / norm2.sqrt())
        } else {
            test
        };
        dofs.push(DofFunctional::InteriorMoment { index: i, test });
    }
    debug_assert_eq!(dofs.len(), basis.len());

    let mut el = ReferenceElement {
        shape,
        k,
        dofs,
        dual_basis: Vec::new(),
        vandermonde_cond: 0.0,
        n_node_dofs,
        n_edge_moment_dofs,
        n_interior_dofs,
        options,
        edge_rule,
        cell_rule,
    };
    let (dual, cond) = el.invert_vandermonde(&basis)?;
    el.dual_basis = dual;
    el.vandermonde_cond = cond;
    Ok(el)
}

impl ReferenceElement {
    pub fn n_dofs(&self) -> usize {
        self.dofs.len()
    }

    pub fn options(&self) -> ElementOptions {
        self.options
    }

    pub fn cell_rule(&self) -> &CellRule {
        &self.cell_rule
    }

    /// Apply one degree of freedom to a field. Exact for polynomials up to
    /// the built-in quadrature exactness (≥ 2k+2).
    pub fn apply_dof(&self, dof: &DofFunctional, u: &dyn VectorField) -> f64 {
        match dof {
            DofFunctional::NodeCurl { point, .. } => u.curl(*point),
            DofFunctional::EdgeMoment { edge, q, .. } => {
                let (mid, half) = self.shape.edge_chart(*edge);
                let hlen = (half[0] * half[0] + half[1] * half[1]).sqrt();
                let tau = [half[0] / hlen, half[1] / hlen];
                let mut acc = 0.0;
                for (&t, &w) in self.edge_rule.nodes.iter().zip(&self.edge_rule.weights) {
                    let x = [mid[0] + t * half[0], mid[1] + t * half[1]];
                    let v = u.value(x);
                    let qt = q.iter().rev().fold(0.0, |a, &c| a * t + c);
                    acc += w * (v[0] * tau[0] + v[1] * tau[1]) * qt;
                }
                acc * hlen
            }
            DofFunctional::InteriorMoment { test, .. } => self.cell_rule.integrate(|p| {
                let v = u.value(p);
                let t = test.eval(p);
                v[0] * t[0] + v[1] * t[1]
            }),
        }
    }

    /// Apply every degree of freedom to a field.
    pub fn apply_dofs(&self, u: &dyn VectorField) -> Vec<f64> {
        self.dofs.iter().map(|d| self.apply_dof(d, u)).collect()
    }

    fn invert_vandermonde(
        &self,
        basis: &[VecPoly2D],
    ) -> Result<(Vec<VecPoly2D>, f64), ElementError> {
        let n = basis.len();
        let mut v = DMatrix::<f64>::zeros(n, n);
        for (j, b) in basis.iter().enumerate() {
            let field = PolyField::new(b.clone());
            for i in 0..n {
                v[(i, j)] = self.apply_dof(&self.dofs[i], &field);
            }
        }
        let ident = DMatrix::<f64>::identity(n, n);
        let lu = v.clone().lu();
        let mut c = match lu.solve(&ident) {
            Some(c) => c,
            None => return Err(ElementError::UnisolvenceFailure { residual: f64::INFINITY }),
        };
        // two steps of iterative refinement push the inverse to the
        // representation floor
        for _ in 0..2 {
            let r = &ident - &v * &c;
            c += &c * r;
        }
        let residual = (&v * &c - &ident).abs().max();
        if !residual.is_finite() || residual > 1e-6 {
            return Err(ElementError::UnisolvenceFailure { residual });
        }
        let cond = mat_norm1(&v) * mat_norm1(&c);
        let mut dual = Vec::with_capacity(n);
        for j in 0..n {
            let mut acc = VecPoly2D::zero();
            for (m, b) in basis.iter().enumerate() {
                let w = c[(m, j)];
                if w != 0.0 {
                    acc = acc.add(&b.scale(w));
                }
            }
            dual.push(acc);
        }
        Ok((dual, cond))
    }

    /// Recompute `dof_i(phi_j)` by quadrature and report the condition number
    /// together with the worst deviation from the identity.
    pub fn verify_unisolvence(&self) -> UnisolvenceReport {
        let n = self.n_dofs();
        let mut max_offdiag: f64 = 0.0;
        for (j, phi) in self.dual_basis.iter().enumerate() {
            let field = PolyField::new(phi.clone());
            for i in 0..n {
                let m = self.apply_dof(&self.dofs[i], &field);
                let target = if i == j { 1.0 } else { 0.0 };
                max_offdiag = max_offdiag.max((m - target).abs());
            }
        }
        UnisolvenceReport {
            cond: self.vandermonde_cond,
            max_offdiag,
        }
    }

    /// Indices of all degrees of freedom associated with a local edge: the
    /// curl nodes on it (including its two endpoints) and its moments.
    pub fn edge_associated_dofs(&self, edge: usize) -> Vec<usize> {
        let [a, b] = self.shape.edges()[edge];
        self.dofs
            .iter()
            .enumerate()
            .filter(|(_, d)| match d {
                DofFunctional::NodeCurl { loc, .. } => match loc {
                    NodeLoc::Vertex(v) => *v == a || *v == b,
                    NodeLoc::EdgeNode { edge: e, .. } => *e == edge,
                },
                DofFunctional::EdgeMoment { edge: e, .. } => *e == edge,
                DofFunctional::InteriorMoment { .. } => false,
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Draw `trials` random members of the local space with all DOFs tied to
    /// `edge` set to zero, and return the largest sampled magnitude of
    /// `u·τ` and `curl u` along that edge. Theory says it must vanish.
    pub fn verify_trace_determination(&self, edge: usize, trials: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let zeroed = self.edge_associated_dofs(edge);
        let (mid, half) = self.shape.edge_chart(edge);
        let hlen = (half[0] * half[0] + half[1] * half[1]).sqrt();
        let tau = [half[0] / hlen, half[1] / hlen];
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let mut coeffs: Vec<f64> = (0..self.n_dofs()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for &i in &zeroed {
                coeffs[i] = 0.0;
            }
            let mut u = VecPoly2D::zero();
            for (j, c) in coeffs.iter().enumerate() {
                if *c != 0.0 {
                    u = u.add(&self.dual_basis[j].scale(*c));
                }
            }
            let curl = u.scalar_curl();
            for s in 0..20 {
                let t = -1.0 + 2.0 * (s as f64 + 0.5) / 20.0;
                let x = [mid[0] + t * half[0], mid[1] + t * half[1]];
                let v = u.eval(x);
                worst = worst.max((v[0] * tau[0] + v[1] * tau[1]).abs());
                worst = worst.max(curl.eval(x[0], x[1]).abs());
            }
        }
        worst
    }

    /// Check a published basis table against this element's DOFs: the matrix
    /// `M[i][j] = dof_i(table_j)` must be a permutation matrix. Returns the
    /// recovered permutation (`perm[i]` = table index dual to DOF `i`).
    pub fn verify_basis_table(
        &self,
        table: &[VecPoly2D],
        tol: f64,
    ) -> Result<BasisTableMatch, ElementError> {
        let n = self.n_dofs();
        if table.len() != n {
            return Err(ElementError::BasisTableMismatch {
                summary: format!("table has {} functions, element has {n} DOFs", table.len()),
                offending_rows: Vec::new(),
                max_error: f64::INFINITY,
            });
        }
        let mut m = vec![vec![0.0; n]; n];
        for (j, f) in table.iter().enumerate() {
            let field = PolyField::new(f.clone());
            for (i, row) in m.iter_mut().enumerate() {
                row[j] = self.apply_dof(&self.dofs[i], &field);
            }
        }
        let mut perm = vec![0usize; n];
        let mut max_error: f64 = 0.0;
        let mut offending = Vec::new();
        for (i, row) in m.iter().enumerate() {
            let (jmax, _) = row
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
                .expect("nonempty row");
            perm[i] = jmax;
            let mut row_err: f64 = 0.0;
            for (j, &v) in row.iter().enumerate() {
                let target = if j == jmax { 1.0 } else { 0.0 };
                row_err = row_err.max((v - target).abs());
            }
            max_error = max_error.max(row_err);
            if row_err > tol {
                offending.push(i);
            }
        }
        let mut sorted = perm.clone();
        sorted.sort_unstable();
        let bijection = sorted == (0..n).collect::<Vec<_>>();
        if offending.is_empty() && bijection {
            Ok(BasisTableMatch {
                permutation: perm,
                max_error,
            })
        } else {
            Err(ElementError::BasisTableMismatch {
                summary: format!(
                    "{} of {n} rows deviate beyond {tol:.1e} (max {max_error:.3e}); nearest row-wise assignment {} a bijection",
                    offending.len(),
                    if bijection { "is" } else { "is not" }
                ),
                offending_rows: offending,
                max_error,
            })
        }
    }
}

/// Successful basis-table verification.
#[derive(Debug, Clone)]
pub struct BasisTableMatch {
    /// `permutation[i]` is the table index matching DOF `i`.
    pub permutation: Vec<usize>,
    pub max_error: f64,
}

fn mat_norm1(m: &DMatrix<f64>) -> f64 {
    let mut best: f64 = 0.0;
    for j in 0..m.ncols() {
        let s: f64 = (0..m.nrows()).map(|i| m[(i, j)].abs()).sum();
        best = best.max(s);
    }
    best
}

pub mod published {
    //! The published lowest-order dual bases, shipped in exact rational form
    //! as an independent verification oracle.

    use crate::poly::{Poly2D, VecPoly2D};

    const RECT_TABLE: &str = include_str!("../data/rect_k3_dual_basis.txt");
    const TRI_TABLE: &str = include_str!("../data/tri_k4_dual_basis.txt");

    fn parse(table: &str) -> Vec<VecPoly2D> {
        let mut terms: Vec<Vec<(usize, usize, usize, f64)>> = Vec::new();
        for line in table.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace();
            let idx: usize = it.next().unwrap().parse().unwrap();
            let comp: usize = it.next().unwrap().parse().unwrap();
            let i: usize = it.next().unwrap().parse().unwrap();
            let j: usize = it.next().unwrap().parse().unwrap();
            let frac = it.next().unwrap();
            let (num, den) = frac.split_once('/').unwrap();
            let c = num.parse::<f64>().unwrap() / den.parse::<f64>().unwrap();
            while terms.len() < idx {
                terms.push(Vec::new());
            }
            terms[idx - 1].push((comp, i, j, c));
        }
        terms
            .into_iter()
            .map(|t| {
                let xs: Vec<(usize, usize, f64)> = t
                    .iter()
                    .filter(|e| e.0 == 1)
                    .map(|e| (e.1, e.2, e.3))
                    .collect();
                let ys: Vec<(usize, usize, f64)> = t
                    .iter()
                    .filter(|e| e.0 == 2)
                    .map(|e| (e.1, e.2, e.3))
                    .collect();
                VecPoly2D::new(Poly2D::from_terms(&xs), Poly2D::from_terms(&ys))
            })
            .collect()
    }

    /// The 24 published basis functions of the lowest-order rectangle element.
    pub fn rect_lowest_order() -> Vec<VecPoly2D> {
        parse(RECT_TABLE)
    }

    /// The 24 published basis functions of the lowest-order triangle element.
    pub fn tri_lowest_order() -> Vec<VecPoly2D> {
        parse(TRI_TABLE)
    }
}
