//! Dense bivariate polynomials and the reference-cell polynomial spaces.
//!
//! Everything here is exact polynomial arithmetic on monomial coefficients;
//! no sampling is involved. Degrees stay small (≲ 10), so dense storage is
//! the right tool.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PolyError {
    #[error("element order {k} is below the minimum {min} for {shape}")]
    OrderTooLow {
        shape: &'static str,
        k: usize,
        min: usize,
    },
}

/// Axis selector for partial derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
}

/// A bivariate polynomial Σ c_{ij} x^i y^j stored as a dense coefficient grid.
///
/// `coeffs[i * ny + j]` is the coefficient of `x^i y^j`; `nx`/`ny` are the
/// number of rows/columns (max degree + 1). Trailing all-zero rows and
/// columns are trimmed so degree bounds stay tight.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2D {
    nx: usize,
    ny: usize,
    coeffs: Vec<f64>,
}

impl Poly2D {
    pub fn zero() -> Self {
        Poly2D {
            nx: 1,
            ny: 1,
            coeffs: vec![0.0],
        }
    }

    pub fn constant(c: f64) -> Self {
        Poly2D {
            nx: 1,
            ny: 1,
            coeffs: vec![c],
        }
    }

    /// The monomial `c x^i y^j`.
    pub fn monomial(i: usize, j: usize, c: f64) -> Self {
        let (nx, ny) = (i + 1, j + 1);
        let mut coeffs = vec![0.0; nx * ny];
        coeffs[i * ny + j] = c;
        Poly2D { nx, ny, coeffs }.trimmed()
    }

    pub fn from_terms(terms: &[(usize, usize, f64)]) -> Self {
        let nx = terms.iter().map(|t| t.0 + 1).max().unwrap_or(1);
        let ny = terms.iter().map(|t| t.1 + 1).max().unwrap_or(1);
        let mut coeffs = vec![0.0; nx * ny];
        for &(i, j, c) in terms {
            coeffs[i * ny + j] += c;
        }
        Poly2D { nx, ny, coeffs }.trimmed()
    }

    /// A 1-D polynomial in x (`coeffs[i]` multiplies `x^i`).
    pub fn in_x(coeffs_1d: &[f64]) -> Self {
        let nx = coeffs_1d.len().max(1);
        let mut coeffs = vec![0.0; nx];
        coeffs[..coeffs_1d.len()].copy_from_slice(coeffs_1d);
        Poly2D { nx, ny: 1, coeffs }.trimmed()
    }

    pub fn coeff(&self, i: usize, j: usize) -> f64 {
        if i < self.nx && j < self.ny {
            self.coeffs[i * self.ny + j]
        } else {
            0.0
        }
    }

    /// Max degrees `(dx, dy)` in x and y.
    pub fn degrees(&self) -> (usize, usize) {
        (self.nx - 1, self.ny - 1)
    }

    pub fn total_degree(&self) -> usize {
        let mut d = 0;
        for i in 0..self.nx {
            for j in 0..self.ny {
                if self.coeffs[i * self.ny + j] != 0.0 {
                    d = d.max(i + j);
                }
            }
        }
        d
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.coeffs.iter().all(|c| c.abs() <= tol)
    }

    pub fn max_coeff(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    /// Evaluate by nested Horner: outer in x, inner in y.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for i in (0..self.nx).rev() {
            let row = &self.coeffs[i * self.ny..(i + 1) * self.ny];
            let mut ry = 0.0;
            for &c in row.iter().rev() {
                ry = ry * y + c;
            }
            acc = acc * x + ry;
        }
        acc
    }

    /// Exact partial derivative; the degree along `axis` drops by one.
    pub fn partial(&self, axis: Axis) -> Poly2D {
        match axis {
            Axis::X => {
                if self.nx == 1 {
                    return Poly2D::zero();
                }
                let (nx, ny) = (self.nx - 1, self.ny);
                let mut coeffs = vec![0.0; nx * ny];
                for i in 1..self.nx {
                    for j in 0..ny {
                        coeffs[(i - 1) * ny + j] = self.coeffs[i * ny + j] * i as f64;
                    }
                }
                Poly2D { nx, ny, coeffs }.trimmed()
            }
            Axis::Y => {
                if self.ny == 1 {
                    return Poly2D::zero();
                }
                let (nx, ny) = (self.nx, self.ny - 1);
                let mut coeffs = vec![0.0; nx * ny];
                for i in 0..nx {
                    for j in 1..self.ny {
                        coeffs[i * ny + (j - 1)] = self.coeffs[i * self.ny + j] * j as f64;
                    }
                }
                Poly2D { nx, ny, coeffs }.trimmed()
            }
        }
    }

    pub fn add(&self, other: &Poly2D) -> Poly2D {
        let nx = self.nx.max(other.nx);
        let ny = self.ny.max(other.ny);
        let mut coeffs = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                coeffs[i * ny + j] = self.coeff(i, j) + other.coeff(i, j);
            }
        }
        Poly2D { nx, ny, coeffs }.trimmed()
    }

    pub fn sub(&self, other: &Poly2D) -> Poly2D {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Poly2D {
        Poly2D {
            nx: self.nx,
            ny: self.ny,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
        .trimmed()
    }

    pub fn mul(&self, other: &Poly2D) -> Poly2D {
        let nx = self.nx + other.nx - 1;
        let ny = self.ny + other.ny - 1;
        let mut coeffs = vec![0.0; nx * ny];
        for i1 in 0..self.nx {
            for j1 in 0..self.ny {
                let c1 = self.coeffs[i1 * self.ny + j1];
                if c1 == 0.0 {
                    continue;
                }
                for i2 in 0..other.nx {
                    for j2 in 0..other.ny {
                        coeffs[(i1 + i2) * ny + (j1 + j2)] += c1 * other.coeffs[i2 * other.ny + j2];
                    }
                }
            }
        }
        Poly2D { nx, ny, coeffs }.trimmed()
    }

    /// Gradient as a vector polynomial `(∂p/∂x, ∂p/∂y)`.
    pub fn grad(&self) -> VecPoly2D {
        VecPoly2D {
            x: self.partial(Axis::X),
            y: self.partial(Axis::Y),
        }
    }

    /// The 2-D vector curl of a scalar: `(∂s/∂y, -∂s/∂x)`.
    pub fn vector_curl(&self) -> VecPoly2D {
        VecPoly2D {
            x: self.partial(Axis::Y),
            y: self.partial(Axis::X).scale(-1.0),
        }
    }

    pub fn laplacian(&self) -> Poly2D {
        self.partial(Axis::X)
            .partial(Axis::X)
            .add(&self.partial(Axis::Y).partial(Axis::Y))
    }

    fn trimmed(mut self) -> Poly2D {
        let mut nx = self.nx;
        while nx > 1 && (0..self.ny).all(|j| self.coeffs[(nx - 1) * self.ny + j] == 0.0) {
            nx -= 1;
        }
        let mut ny = self.ny;
        while ny > 1 && (0..nx).all(|i| self.coeffs[i * self.ny + ny - 1] == 0.0) {
            ny -= 1;
        }
        if nx == self.nx && ny == self.ny {
            return self;
        }
        let mut coeffs = vec![0.0; nx * ny];
        for i in 0..nx {
            for j in 0..ny {
                coeffs[i * ny + j] = self.coeffs[i * self.ny + j];
            }
        }
        self.nx = nx;
        self.ny = ny;
        self.coeffs = coeffs;
        self
    }
}

/// A polynomial vector field with independent component degrees.
#[derive(Debug, Clone, PartialEq)]
pub struct VecPoly2D {
    pub x: Poly2D,
    pub y: Poly2D,
}

impl VecPoly2D {
    pub fn zero() -> Self {
        VecPoly2D {
            x: Poly2D::zero(),
            y: Poly2D::zero(),
        }
    }

    pub fn new(x: Poly2D, y: Poly2D) -> Self {
        VecPoly2D { x, y }
    }

    pub fn eval(&self, p: [f64; 2]) -> [f64; 2] {
        [self.x.eval(p[0], p[1]), self.y.eval(p[0], p[1])]
    }

    /// The 2-D scalar curl `∂u_y/∂x - ∂u_x/∂y`.
    pub fn scalar_curl(&self) -> Poly2D {
        self.y.partial(Axis::X).sub(&self.x.partial(Axis::Y))
    }

    /// `curl(curl u)` as a vector polynomial.
    pub fn curl_curl(&self) -> VecPoly2D {
        self.scalar_curl().vector_curl()
    }

    pub fn add(&self, other: &VecPoly2D) -> VecPoly2D {
        VecPoly2D {
            x: self.x.add(&other.x),
            y: self.y.add(&other.y),
        }
    }

    pub fn scale(&self, s: f64) -> VecPoly2D {
        VecPoly2D {
            x: self.x.scale(s),
            y: self.y.scale(s),
        }
    }

    /// Pointwise dot product as a scalar polynomial.
    pub fn dot(&self, other: &VecPoly2D) -> Poly2D {
        self.x.mul(&other.x).add(&self.y.mul(&other.y))
    }

    pub fn max_coeff(&self) -> f64 {
        self.x.max_coeff().max(self.y.max_coeff())
    }
}

/// Polynomial spaces used by the reference elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpaceSpec {
    /// Q_{k-1,k} × Q_{k,k-1} on the reference square, `k >= 3`.
    RectPrimal { k: usize },
    /// R_k = (P_{k-1})² ⊕ Φ_k on the reference triangle, `k >= 4`.
    TriPrimal { k: usize },
    /// Interior test space on the square: Q_{k-2}·x ∪ curl(Q̃_{k-3}).
    RectInterior { k: usize },
    /// Interior test space on the triangle:
    /// (P_{k-5})² ⊕ P̃_{k-5}·x ⊕ P̃_{k-4}·x ⊕ P̃_{k-3}·x.
    TriInterior { k: usize },
}

/// Basis of Φ_k: the homogeneous degree-k fields orthogonal to the position
/// vector, spanned by `x^a y^b (y, -x)` with `a + b = k - 1`.
pub fn phi_k_basis(k: usize) -> Vec<VecPoly2D> {
    let mut out = Vec::with_capacity(k);
    for a in 0..k {
        let b = k - 1 - a;
        out.push(VecPoly2D {
            x: Poly2D::monomial(a, b + 1, 1.0),
            y: Poly2D::monomial(a + 1, b, -1.0),
        });
    }
    out
}

/// Monomial basis of the scalar tensor space Q_k.
pub fn scalar_q_basis(k: usize) -> Vec<Poly2D> {
    let mut out = Vec::with_capacity((k + 1) * (k + 1));
    for i in 0..=k {
        for j in 0..=k {
            out.push(Poly2D::monomial(i, j, 1.0));
        }
    }
    out
}

/// Monomial basis of the scalar total-degree space P_k, graded by degree.
pub fn scalar_p_basis(k: usize) -> Vec<Poly2D> {
    let mut out = Vec::with_capacity((k + 1) * (k + 2) / 2);
    for d in 0..=k {
        for i in 0..=d {
            out.push(Poly2D::monomial(i, d - i, 1.0));
        }
    }
    out
}

/// A linearly independent spanning set of the requested vector space.
pub fn vector_basis(spec: SpaceSpec) -> Result<Vec<VecPoly2D>, PolyError> {
    match spec {
        SpaceSpec::RectPrimal { k } => {
            if k < 3 {
                return Err(PolyError::OrderTooLow {
                    shape: "rectangle",
                    k,
                    min: 3,
                });
            }
            let mut out = Vec::with_capacity(2 * k * (k + 1));
            for i in 0..k {
                for j in 0..=k {
                    out.push(VecPoly2D {
                        x: Poly2D::monomial(i, j, 1.0),
                        y: Poly2D::zero(),
                    });
                }
            }
            for i in 0..=k {
                for j in 0..k {
                    out.push(VecPoly2D {
                        x: Poly2D::zero(),
                        y: Poly2D::monomial(i, j, 1.0),
                    });
                }
            }
            Ok(out)
        }
        SpaceSpec::TriPrimal { k } => {
            if k < 4 {
                return Err(PolyError::OrderTooLow {
                    shape: "triangle",
                    k,
                    min: 4,
                });
            }
            let mut out = Vec::with_capacity(k * (k + 2));
            for p in scalar_p_basis(k - 1) {
                out.push(VecPoly2D {
                    x: p.clone(),
                    y: Poly2D::zero(),
                });
                out.push(VecPoly2D {
                    x: Poly2D::zero(),
                    y: p,
                });
            }
            out.extend(phi_k_basis(k));
            Ok(out)
        }
        SpaceSpec::RectInterior { k } => {
            if k < 3 {
                return Err(PolyError::OrderTooLow {
                    shape: "rectangle",
                    k,
                    min: 3,
                });
            }
            let mut out = Vec::new();
            // Q_{k-2} · x
            for i in 0..k - 1 {
                for j in 0..k - 1 {
                    out.push(VecPoly2D {
                        x: Poly2D::monomial(i + 1, j, 1.0),
                        y: Poly2D::monomial(i, j + 1, 1.0),
                    });
                }
            }
            // curl of Q_{k-3} monomials without the constant term
            for i in 0..k.saturating_sub(2) {
                for j in 0..k.saturating_sub(2) {
                    if i == 0 && j == 0 {
                        continue;
                    }
                    out.push(Poly2D::monomial(i, j, 1.0).vector_curl());
                }
            }
            Ok(out)
        }
        SpaceSpec::TriInterior { k } => {
            if k < 4 {
                return Err(PolyError::OrderTooLow {
                    shape: "triangle",
                    k,
                    min: 4,
                });
            }
            let mut out = Vec::new();
            if k >= 5 {
                for p in scalar_p_basis(k - 5) {
                    out.push(VecPoly2D {
                        x: p.clone(),
                        y: Poly2D::zero(),
                    });
                    out.push(VecPoly2D {
                        x: Poly2D::zero(),
                        y: p,
                    });
                }
            }
            for d in [k as isize - 5, k as isize - 4, k as isize - 3] {
                if d < 0 {
                    continue;
                }
                let d = d as usize;
                for i in 0..=d {
                    out.push(VecPoly2D {
                        x: Poly2D::monomial(i + 1, d - i, 1.0),
                        y: Poly2D::monomial(i, d - i + 1, 1.0),
                    });
                }
            }
            Ok(out)
        }
    }
}

/// Dimension of the requested space (length of [`vector_basis`]).
pub fn space_dim(spec: SpaceSpec) -> Result<usize, PolyError> {
    Ok(vector_basis(spec)?.len())
}
