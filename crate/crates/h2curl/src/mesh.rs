//! Structured meshes: uniform rectangles and triangles on the unit square,
//! and graded triangulations of the L-shaped domain with refinement toward
//! the reentrant corner.

use std::collections::BTreeMap;
use std::io::Write;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("grading parameter must lie in (0, 0.5], got {0}")]
    BadGrading(f64),
    #[error("cell {cell} is degenerate (|det B| = {det:.3e})")]
    SingularMap { cell: usize, det: f64 },
    #[error("cell {cell} is not an axis-aligned rectangle or parallelogram")]
    NonAffineCell { cell: usize },
    #[error("mesh audit failed: {0}")]
    AuditFailure(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellKind {
    Quad,
    Tri,
}

/// A conforming 2-D mesh with globally oriented edges.
///
/// Edges store the lower vertex index first; the global tangent points from
/// the lower to the higher index. `cell_edges[c][le]` pairs the global edge
/// id with +1 when the cell's local edge direction agrees with the global
/// one and -1 otherwise.
#[derive(Debug, Clone)]
pub struct Mesh2D {
    pub kind: CellKind,
    pub vertices: Vec<[f64; 2]>,
    pub cells: Vec<Vec<usize>>,
    pub edges: Vec<[usize; 2]>,
    pub cell_edges: Vec<Vec<(usize, i8)>>,
    pub boundary_vertices: Vec<bool>,
    pub boundary_edges: Vec<bool>,
    /// For refined meshes: the parent cell (previous level) of each cell.
    pub parent_cells: Option<Vec<usize>>,
}

/// Per-cell affine map `F(x̂) = B x̂ + b` from the reference cell.
#[derive(Debug, Clone, Copy)]
pub struct AffineMap {
    pub b_mat: [[f64; 2]; 2],
    pub offset: [f64; 2],
    pub det: f64,
}

impl AffineMap {
    pub fn apply(&self, xhat: [f64; 2]) -> [f64; 2] {
        [
            self.b_mat[0][0] * xhat[0] + self.b_mat[0][1] * xhat[1] + self.offset[0],
            self.b_mat[1][0] * xhat[0] + self.b_mat[1][1] * xhat[1] + self.offset[1],
        ]
    }

    pub fn inverse_apply(&self, x: [f64; 2]) -> [f64; 2] {
        let rx = x[0] - self.offset[0];
        let ry = x[1] - self.offset[1];
        [
            (self.b_mat[1][1] * rx - self.b_mat[0][1] * ry) / self.det,
            (-self.b_mat[1][0] * rx + self.b_mat[0][0] * ry) / self.det,
        ]
    }

    /// `B^{-T} v` — pushes covariant vector components forward.
    pub fn inv_transpose_apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            (self.b_mat[1][1] * v[0] - self.b_mat[1][0] * v[1]) / self.det,
            (-self.b_mat[0][1] * v[0] + self.b_mat[0][0] * v[1]) / self.det,
        ]
    }

    /// `B^T v` — pulls physical vector components back.
    pub fn transpose_apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.b_mat[0][0] * v[0] + self.b_mat[1][0] * v[1],
            self.b_mat[0][1] * v[0] + self.b_mat[1][1] * v[1],
        ]
    }

    pub fn apply_mat(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.b_mat[0][0] * v[0] + self.b_mat[0][1] * v[1],
            self.b_mat[1][0] * v[0] + self.b_mat[1][1] * v[1],
        ]
    }
}

/// Local edges of a cell in the same order as the reference shapes:
/// quads (0,1),(1,2),(3,2),(0,3); triangles (0,1),(1,2),(2,0).
fn local_edges(kind: CellKind) -> &'static [[usize; 2]] {
    match kind {
        CellKind::Quad => &[[0, 1], [1, 2], [3, 2], [0, 3]],
        CellKind::Tri => &[[0, 1], [1, 2], [2, 0]],
    }
}

fn finish_mesh(
    kind: CellKind,
    vertices: Vec<[f64; 2]>,
    cells: Vec<Vec<usize>>,
    parent_cells: Option<Vec<usize>>,
) -> Mesh2D {
    // deterministic global edge numbering: sorted unique (lo, hi) pairs
    let mut edge_ids: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for cell in &cells {
        for le in local_edges(kind) {
            let (a, b) = (cell[le[0]], cell[le[1]]);
            let key = (a.min(b), a.max(b));
            edge_ids.entry(key).or_default();
        }
    }
    for (i, (_, id)) in edge_ids.iter_mut().enumerate() {
        *id = i;
    }
    let mut edges = vec![[0usize; 2]; edge_ids.len()];
    for (&(a, b), &id) in &edge_ids {
        edges[id] = [a, b];
    }
    let mut edge_cell_count = vec![0usize; edges.len()];
    let mut cell_edges = Vec::with_capacity(cells.len());
    for cell in &cells {
        let mut ce = Vec::with_capacity(local_edges(kind).len());
        for le in local_edges(kind) {
            let (a, b) = (cell[le[0]], cell[le[1]]);
            let key = (a.min(b), a.max(b));
            let id = edge_ids[&key];
            edge_cell_count[id] += 1;
            ce.push((id, if a < b { 1 } else { -1 }));
        }
        cell_edges.push(ce);
    }
    let boundary_edges: Vec<bool> = edge_cell_count.iter().map(|&c| c == 1).collect();
    let mut boundary_vertices = vec![false; vertices.len()];
    for (e, &is_b) in boundary_edges.iter().enumerate() {
        if is_b {
            boundary_vertices[edges[e][0]] = true;
            boundary_vertices[edges[e][1]] = true;
        }
    }
    Mesh2D {
        kind,
        vertices,
        cells,
        edges,
        cell_edges,
        boundary_vertices,
        boundary_edges,
        parent_cells,
    }
}

/// Build a mesh from explicit vertices and cells (counterclockwise vertex
/// order). Edges, orientations and boundary flags are derived.
pub fn mesh_from_cells(kind: CellKind, vertices: Vec<[f64; 2]>, cells: Vec<Vec<usize>>) -> Mesh2D {
    finish_mesh(kind, vertices, cells, None)
}

/// Partition (0,1)² into N² axis-aligned squares.
pub fn uniform_rect_mesh(n: usize) -> Mesh2D {
    assert!(n >= 1);
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    finish_mesh(CellKind::Quad, vertices, cells, None)
}

/// Partition (0,1)² into 2N² triangles of regular pattern, splitting each
/// square along the lower-left-to-upper-right diagonal.
pub fn uniform_tri_mesh(n: usize) -> Mesh2D {
    assert!(n >= 1);
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push([i as f64 * h, j as f64 * h]);
        }
    }
    let vid = |i: usize, j: usize| j * (n + 1) + i;
    let mut cells = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            cells.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)]);
            cells.push(vec![vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)]);
        }
    }
    finish_mesh(CellKind::Tri, vertices, cells, None)
}

const LSHAPE_CORNER: [f64; 2] = [0.5, 0.5];

/// Coarsest triangulation of the L-shape (0,1)² minus [0.5,1)×(0,0.5]: the
/// three half-unit squares, each split by the diagonal through the reentrant
/// corner, so all six triangles touch the corner.
pub fn lshape_base_mesh() -> Mesh2D {
    let vertices = vec![
        [0.0, 0.0],
        [0.5, 0.0],
        [0.0, 0.5],
        [0.5, 0.5],
        [1.0, 0.5],
        [0.0, 1.0],
        [0.5, 1.0],
        [1.0, 1.0],
    ];
    let cells = vec![
        vec![0, 1, 3],
        vec![0, 3, 2],
        vec![2, 3, 5],
        vec![3, 6, 5],
        vec![3, 4, 7],
        vec![3, 7, 6],
    ];
    finish_mesh(CellKind::Tri, vertices, cells, None)
}

/// One graded 4-way refinement sweep of a triangle mesh. Edges touching the
/// `corner` vertex are split at ratio `kappa` measured from the corner; all
/// other edges at their midpoint. `kappa = 0.5` is uniform refinement.
pub fn graded_refine(mesh: &Mesh2D, corner: [f64; 2], kappa: f64) -> Result<Mesh2D, MeshError> {
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(MeshError::BadGrading(kappa));
    }
    assert_eq!(mesh.kind, CellKind::Tri);
    let is_corner = |v: [f64; 2]| {
        (v[0] - corner[0]).abs() < 1e-12 && (v[1] - corner[1]).abs() < 1e-12
    };
    let mut vertices = mesh.vertices.clone();
    // one new vertex per edge
    let mut edge_point = vec![0usize; mesh.edges.len()];
    for (e, &[a, b]) in mesh.edges.iter().enumerate() {
        let va = mesh.vertices[a];
        let vb = mesh.vertices[b];
        let p = if is_corner(va) {
            [va[0] + kappa * (vb[0] - va[0]), va[1] + kappa * (vb[1] - va[1])]
        } else if is_corner(vb) {
            [vb[0] + kappa * (va[0] - vb[0]), vb[1] + kappa * (va[1] - vb[1])]
        } else {
            [0.5 * (va[0] + vb[0]), 0.5 * (va[1] + vb[1])]
        };
        edge_point[e] = vertices.len();
        vertices.push(p);
    }
    let mut cells = Vec::with_capacity(4 * mesh.cells.len());
    let mut parents = Vec::with_capacity(4 * mesh.cells.len());
    for (c, cell) in mesh.cells.iter().enumerate() {
        let (v0, v1, v2) = (cell[0], cell[1], cell[2]);
        let m01 = edge_point[mesh.cell_edges[c][0].0];
        let m12 = edge_point[mesh.cell_edges[c][1].0];
        let m20 = edge_point[mesh.cell_edges[c][2].0];
        cells.push(vec![v0, m01, m20]);
        cells.push(vec![v1, m12, m01]);
        cells.push(vec![v2, m20, m12]);
        cells.push(vec![m01, m12, m20]);
        parents.extend_from_slice(&[c, c, c, c]);
    }
    Ok(finish_mesh(CellKind::Tri, vertices, cells, Some(parents)))
}

/// Graded L-shape triangulation: level 1 is the six-triangle base mesh,
/// each further level refines 4-way with grading `kappa` toward the
/// reentrant corner. Meshes are nested across levels.
pub fn graded_lshape_mesh(level: usize, kappa: f64) -> Result<Mesh2D, MeshError> {
    if !(kappa > 0.0 && kappa <= 0.5) {
        return Err(MeshError::BadGrading(kappa));
    }
    assert!(level >= 1);
    let mut mesh = lshape_base_mesh();
    for _ in 1..level {
        mesh = graded_refine(&mesh, LSHAPE_CORNER, kappa)?;
    }
    Ok(mesh)
}

impl Mesh2D {
    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Longest edge length.
    pub fn mesh_size(&self) -> f64 {
        self.edges
            .iter()
            .map(|&[a, b]| {
                let va = self.vertices[a];
                let vb = self.vertices[b];
                ((vb[0] - va[0]).powi(2) + (vb[1] - va[1]).powi(2)).sqrt()
            })
            .fold(0.0, f64::max)
    }

    pub fn cell_signed_area(&self, c: usize) -> f64 {
        let cell = &self.cells[c];
        let n = cell.len();
        let mut a = 0.0;
        for i in 0..n {
            let p = self.vertices[cell[i]];
            let q = self.vertices[cell[(i + 1) % n]];
            a += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * a
    }

    /// Affine map from the reference cell. Quads map from (-1,1)² and must be
    /// parallelograms (the generators only produce axis-aligned rectangles);
    /// triangles map from (0,0),(1,0),(0,1).
    pub fn affine_map(&self, c: usize) -> Result<AffineMap, MeshError> {
        let cell = &self.cells[c];
        let v: Vec<[f64; 2]> = cell.iter().map(|&i| self.vertices[i]).collect();
        let map = match self.kind {
            CellKind::Quad => {
                let ex = [0.5 * (v[1][0] - v[0][0]), 0.5 * (v[1][1] - v[0][1])];
                let ey = [0.5 * (v[3][0] - v[0][0]), 0.5 * (v[3][1] - v[0][1])];
                // opposite corner must close the parallelogram
                let close = [v[0][0] + 2.0 * ex[0] + 2.0 * ey[0], v[0][1] + 2.0 * ex[1] + 2.0 * ey[1]];
                let scale = (ex[0].abs() + ex[1].abs() + ey[0].abs() + ey[1].abs()).max(1e-300);
                if (close[0] - v[2][0]).abs() + (close[1] - v[2][1]).abs() > 1e-10 * scale {
                    return Err(MeshError::NonAffineCell { cell: c });
                }
                AffineMap {
                    b_mat: [[ex[0], ey[0]], [ex[1], ey[1]]],
                    offset: [v[0][0] + ex[0] + ey[0], v[0][1] + ex[1] + ey[1]],
                    det: ex[0] * ey[1] - ex[1] * ey[0],
                }
            }
            CellKind::Tri => {
                let e1 = [v[1][0] - v[0][0], v[1][1] - v[0][1]];
                let e2 = [v[2][0] - v[0][0], v[2][1] - v[0][1]];
                AffineMap {
                    b_mat: [[e1[0], e2[0]], [e1[1], e2[1]]],
                    offset: v[0],
                    det: e1[0] * e2[1] - e1[1] * e2[0],
                }
            }
        };
        let cell_scale = v
            .iter()
            .flat_map(|p| p.iter())
            .fold(0.0f64, |m, &x| m.max(x.abs()))
            .max(1.0);
        if map.det.abs() < 1e-14 * cell_scale * cell_scale {
            return Err(MeshError::SingularMap { cell: c, det: map.det });
        }
        Ok(map)
    }

    /// Structural audit: positive orientation, two cells per interior edge and
    /// one per boundary edge, and Euler's relation V - E + F = 1.
    pub fn audit(&self) -> Result<(), MeshError> {
        for c in 0..self.n_cells() {
            if self.cell_signed_area(c) <= 0.0 {
                return Err(MeshError::AuditFailure(format!(
                    "cell {c} has nonpositive area {}",
                    self.cell_signed_area(c)
                )));
            }
        }
        let mut count = vec![0usize; self.n_edges()];
        for ce in &self.cell_edges {
            for &(e, _) in ce {
                count[e] += 1;
            }
        }
        for (e, &n) in count.iter().enumerate() {
            let expected = if self.boundary_edges[e] { 1 } else { 2 };
            if n != expected {
                return Err(MeshError::AuditFailure(format!(
                    "edge {e} is shared by {n} cells, expected {expected}"
                )));
            }
        }
        let euler =
            self.n_vertices() as isize - self.n_edges() as isize + self.n_cells() as isize;
        if euler != 1 {
            return Err(MeshError::AuditFailure(format!(
                "Euler characteristic V - E + F = {euler}, expected 1"
            )));
        }
        Ok(())
    }

    /// Plain-text dump: `v x y` per vertex, `c i j k [l]` per cell.
    pub fn dump(&self, mut w: impl Write) -> std::io::Result<()> {
        for v in &self.vertices {
            writeln!(w, "v {:.17} {:.17}", v[0], v[1])?;
        }
        for c in &self.cells {
            let ids: Vec<String> = c.iter().map(|i| i.to_string()).collect();
            writeln!(w, "c {}", ids.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_mesh_counts() {
        let m = uniform_rect_mesh(2);
        assert_eq!(m.n_vertices(), 9);
        assert_eq!(m.n_cells(), 4);
        assert_eq!(m.n_edges(), 12);
        m.audit().unwrap();
        let m = uniform_rect_mesh(40);
        assert_eq!(m.n_vertices(), 1681);
        assert_eq!(m.n_cells(), 1600);
        assert_eq!(m.n_edges(), 2 * 40 * 41);
    }

    #[test]
    fn rect_mesh_affine_map() {
        let m = uniform_rect_mesh(1);
        let map = m.affine_map(0).unwrap();
        assert_eq!(map.b_mat, [[0.5, 0.0], [0.0, 0.5]]);
        assert_eq!(map.offset, [0.5, 0.5]);
        assert!((map.det - 0.25).abs() < 1e-15);
        assert_eq!(map.apply([-1.0, -1.0]), [0.0, 0.0]);
        assert_eq!(map.apply([1.0, 1.0]), [1.0, 1.0]);
    }

    #[test]
    fn tri_mesh_counts() {
        let m = uniform_tri_mesh(2);
        assert_eq!(m.n_vertices(), 9);
        assert_eq!(m.n_cells(), 8);
        assert_eq!(m.n_edges(), 16);
        m.audit().unwrap();
        let m1 = uniform_tri_mesh(1);
        assert_eq!(m1.n_cells(), 2);
        let interior: usize = m1.boundary_edges.iter().filter(|b| !**b).count();
        assert_eq!(interior, 1);
        assert_eq!(uniform_tri_mesh(10).n_cells(), 200);
    }

    #[test]
    fn tri_reference_map_identity() {
        // a cell congruent to the reference triangle maps with B = I
        let m = uniform_tri_mesh(1);
        // second cell of the unit square is (0,0),(1,1),(0,1); first is
        // (0,0),(1,0),(1,1): use a custom check via a 1-cell h=1 mesh instead
        let map = m.affine_map(0).unwrap();
        assert!((map.det - 1.0).abs() < 1e-15);
        // triangle ((0,0),(h,0),(0,h)) has det h²
        let mh = uniform_tri_mesh(4);
        let map = mh.affine_map(1).unwrap(); // (0,0),(1/4,1/4),(0,1/4) variant
        assert!((map.det.abs() - 1.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn lshape_base() {
        let m = lshape_base_mesh();
        assert_eq!(m.n_cells(), 6);
        assert_eq!(m.n_vertices(), 8);
        m.audit().unwrap();
        // every cell touches the reentrant corner (vertex 3)
        for c in &m.cells {
            assert!(c.contains(&3));
        }
    }

    #[test]
    fn graded_refinement_counts_and_nesting() {
        for &kappa in &[0.5, 0.245] {
            let mut prev = graded_lshape_mesh(1, kappa).unwrap();
            for level in 2..=4 {
                let m = graded_lshape_mesh(level, kappa).unwrap();
                m.audit().unwrap();
                assert_eq!(m.n_cells(), 4 * prev.n_cells());
                // nesting: previous level's vertices appear unchanged as a prefix
                for (i, v) in prev.vertices.iter().enumerate() {
                    assert_eq!(m.vertices[i], *v);
                }
                prev = m;
            }
        }
    }

    #[test]
    fn graded_corner_edge_lengths() {
        let kappa = 0.245;
        for level in 1..=3usize {
            let m = graded_lshape_mesh(level, kappa).unwrap();
            let corner = m
                .vertices
                .iter()
                .position(|v| *v == LSHAPE_CORNER)
                .unwrap();
            let expect = 0.5 * (2.0f64).sqrt().max(0.0); // longest initial corner edge
            let mut max_len: f64 = 0.0;
            for &[a, b] in &m.edges {
                if a == corner || b == corner {
                    let va = m.vertices[a];
                    let vb = m.vertices[b];
                    let len = ((vb[0] - va[0]).powi(2) + (vb[1] - va[1]).powi(2)).sqrt();
                    max_len = max_len.max(len);
                }
            }
            let predicted = expect * kappa.powi(level as i32 - 1);
            assert!(
                (max_len - predicted).abs() < 1e-12,
                "level {level}: {max_len} vs {predicted}"
            );
        }
    }

    #[test]
    fn graded_half_kappa_is_uniform() {
        // kappa = 0.5 reproduces uniform 4-way refinement: compare vertex sets
        let m = graded_lshape_mesh(3, 0.5).unwrap();
        let cell_count = m.n_cells();
        assert_eq!(cell_count, 6 * 16);
        // all cells similar with equal area per original half-square
        let total: f64 = (0..cell_count).map(|c| m.cell_signed_area(c)).sum();
        assert!((total - 0.75).abs() < 1e-12);
        let a0 = m.cell_signed_area(0);
        for c in 0..cell_count {
            assert!((m.cell_signed_area(c) - a0).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_range_validated() {
        assert!(matches!(
            graded_lshape_mesh(2, 0.0),
            Err(MeshError::BadGrading(_))
        ));
        assert!(matches!(
            graded_lshape_mesh(2, 0.6),
            Err(MeshError::BadGrading(_))
        ));
    }

    #[test]
    fn audit_sweep() {
        for n in [1, 2, 3, 8, 16, 64] {
            uniform_rect_mesh(n).audit().unwrap();
            uniform_tri_mesh(n).audit().unwrap();
        }
        for &kappa in &[0.5, 0.245] {
            for level in 1..=5 {
                graded_lshape_mesh(level, kappa).unwrap().audit().unwrap();
            }
        }
    }

    #[test]
    fn dump_format() {
        let m = uniform_tri_mesh(1);
        let mut buf = Vec::new();
        m.dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("v 0"));
        assert!(text.contains("\nc 0 1 3"));
    }
}
