//! Gauss quadrature on intervals, rectangles and triangles with certified
//! polynomial exactness degrees.

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum QuadratureError {
    #[error("triangle rules support exactness degree <= {max}, requested {requested}")]
    UnsupportedDegree { requested: usize, max: usize },
}

/// Gauss–Legendre rule on (-1, 1).
#[derive(Debug, Clone)]
pub struct GaussRule1D {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Integrates polynomials up to this degree exactly.
    pub exact_degree: usize,
}

/// Quadrature rule on a 2-D reference cell.
#[derive(Debug, Clone)]
pub struct CellRule {
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    pub exact_degree: usize,
}

impl CellRule {
    pub fn integrate(&self, mut f: impl FnMut([f64; 2]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(*p))
            .sum()
    }
}

/// Evaluate the Legendre polynomial P_n and its derivative at `t`.
pub fn legendre_with_deriv(n: usize, t: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p_prev, mut p) = (1.0, t);
    for m in 1..n {
        let m = m as f64;
        let p_next = ((2.0 * m + 1.0) * t * p - m * p_prev) / (m + 1.0);
        p_prev = p;
        p = p_next;
    }
    // derivative from the standard identity (endpoints handled separately)
    let dp = if (t * t - 1.0).abs() < 1e-14 {
        let nf = n as f64;
        t.powi(n as i32 + 1) * nf * (nf + 1.0) / 2.0
    } else {
        (n as f64) * (t * p - p_prev) / (t * t - 1.0)
    };
    (p, dp)
}

/// Value of the Legendre polynomial P_n at `t`.
pub fn legendre_value(n: usize, t: f64) -> f64 {
    legendre_with_deriv(n, t).0
}

/// Monomial coefficients of P_n via the three-term recurrence.
pub fn legendre_coeffs(n: usize) -> Vec<f64> {
    let mut prev = vec![1.0];
    if n == 0 {
        return prev;
    }
    let mut cur = vec![0.0, 1.0];
    for m in 1..n {
        let mf = m as f64;
        let mut next = vec![0.0; m + 2];
        for (i, &c) in cur.iter().enumerate() {
            next[i + 1] += (2.0 * mf + 1.0) / (mf + 1.0) * c;
        }
        for (i, &c) in prev.iter().enumerate() {
            next[i] -= mf / (mf + 1.0) * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// Gauss–Legendre rule with `n` points, exact for degree `2n - 1`.
///
/// Nodes are found by Newton iteration on P_n starting from the Chebyshev
/// estimates, converged to machine precision.
pub fn gauss_interval(n: usize) -> GaussRule1D {
    assert!(n >= 1, "need at least one quadrature point");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        // Chebyshev initial guess, refined by Newton
        let mut t = -((std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos());
        for _ in 0..60 {
            let (p, dp) = legendre_with_deriv(n, t);
            let dt = p / dp;
            t -= dt;
            if dt.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, t);
        nodes[i] = t;
        weights[i] = 2.0 / ((1.0 - t * t) * dp * dp);
    }
    // symmetrize to kill the last rounding bit
    for i in 0..n / 2 {
        let a = 0.5 * (nodes[i] - nodes[n - 1 - i]);
        nodes[i] = a;
        nodes[n - 1 - i] = -a;
        let w = 0.5 * (weights[i] + weights[n - 1 - i]);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    GaussRule1D {
        nodes,
        weights,
        exact_degree: 2 * n - 1,
    }
}

/// Tensor-product Gauss rule on (-1,1)², exact for Q_{2n-1}.
pub fn rect_rule(n: usize) -> CellRule {
    let g = gauss_interval(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (i, &x) in g.nodes.iter().enumerate() {
        for (j, &y) in g.nodes.iter().enumerate() {
            points.push([x, y]);
            weights.push(g.weights[i] * g.weights[j]);
        }
    }
    CellRule {
        points,
        weights,
        exact_degree: g.exact_degree,
    }
}

const TRI_MAX_DEGREE: usize = 20;

/// Rule on the reference triangle (0,0), (1,0), (0,1), exact for total degree
/// `degree`.
///
/// Built by collapsing a tensor Gauss rule through the map
/// `x = u(1-v), y = v` whose Jacobian `(1-v)` raises the v-degree by one;
/// `n = ceil((degree+2)/2)` points per axis make the collapsed rule exact.
/// All weights stay positive.
pub fn tri_rule(degree: usize) -> Result<CellRule, QuadratureError> {
    if degree > TRI_MAX_DEGREE {
        return Err(QuadratureError::UnsupportedDegree {
            requested: degree,
            max: TRI_MAX_DEGREE,
        });
    }
    let n = (degree + 2).div_ceil(2);
    let g = gauss_interval(n);
    let mut points = Vec::with_capacity(n * n);
    let mut weights = Vec::with_capacity(n * n);
    for (i, &a) in g.nodes.iter().enumerate() {
        for (j, &b) in g.nodes.iter().enumerate() {
            let u = 0.5 * (a + 1.0);
            let v = 0.5 * (b + 1.0);
            points.push([u * (1.0 - v), v]);
            weights.push(g.weights[i] * g.weights[j] * 0.25 * (1.0 - v));
        }
    }
    Ok(CellRule {
        points,
        weights,
        exact_degree: degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int_1d(rule: &GaussRule1D, f: impl Fn(f64) -> f64) -> f64 {
        rule.nodes
            .iter()
            .zip(&rule.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }

    #[test]
    fn gauss_interval_examples() {
        let g2 = gauss_interval(2);
        assert!(int_1d(&g2, |x| x.powi(3)).abs() < 1e-14);
        assert!((int_1d(&g2, |x| x * x) - 2.0 / 3.0).abs() < 1e-14);
        let g5 = gauss_interval(5);
        assert!(int_1d(&g5, |x| x.powi(9)).abs() < 1e-14);
        assert!((int_1d(&g5, |x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn rect_rule_examples() {
        let r3 = rect_rule(3);
        assert!((r3.integrate(|p| p[0].powi(4) * p[1].powi(4)) - 4.0 / 25.0).abs() < 1e-14);
        assert!((r3.integrate(|_| 1.0) - 4.0).abs() < 1e-14);
        let r4 = rect_rule(4);
        assert!(r4.integrate(|p| p[0].powi(7) * p[1].powi(7)).abs() < 1e-14);
    }

    #[test]
    fn tri_rule_examples() {
        let r = tri_rule(6).unwrap();
        assert!((r.integrate(|_| 1.0) - 0.5).abs() < 1e-14);
        assert!((r.integrate(|p| p[0]) - 1.0 / 6.0).abs() < 1e-14);
        // closed form: ∫ x^a y^b = a! b! / (a+b+2)!
        assert!((r.integrate(|p| p[0].powi(3) * p[1].powi(2)) - 1.0 / 420.0).abs() < 1e-15);
    }

    #[test]
    fn tri_rule_rejects_high_degree() {
        assert!(matches!(
            tri_rule(21),
            Err(QuadratureError::UnsupportedDegree { .. })
        ));
    }

    /// a! b! / (a+b+2)!
    fn tri_monomial_exact(a: usize, b: usize) -> f64 {
        let fact = |n: usize| (1..=n).map(|i| i as f64).product::<f64>();
        fact(a) * fact(b) / fact(a + b + 2)
    }

    #[test]
    fn exactness_audit() {
        // every shipped rule integrates every monomial up to its exactness
        // degree to 1e-12 relative
        for n in 1..=12 {
            let g = gauss_interval(n);
            assert!(g.weights.iter().all(|&w| w > 0.0));
            for d in 0..=g.exact_degree {
                let exact = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                let got = int_1d(&g, |x| x.powi(d as i32));
                assert!(
                    (got - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
                    "1d n={n} degree={d}"
                );
            }
        }
        for n in 1..=9 {
            let r = rect_rule(n);
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let one_dim = |d: usize| if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            for a in 0..=r.exact_degree {
                for b in 0..=r.exact_degree {
                    let exact = one_dim(a) * one_dim(b);
                    let got = r.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!(
                        (got - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
                        "rect n={n} ({a},{b})"
                    );
                }
            }
        }
        for degree in (2..=20).step_by(2) {
            let r = tri_rule(degree).unwrap();
            assert!(r.weights.iter().all(|&w| w > 0.0));
            let sum: f64 = r.weights.iter().sum();
            assert!((sum - 0.5).abs() < 1e-13);
            for a in 0..=degree {
                for b in 0..=(degree - a) {
                    let exact = tri_monomial_exact(a, b);
                    let got = r.integrate(|p| p[0].powi(a as i32) * p[1].powi(b as i32));
                    assert!(
                        (got - exact).abs() <= 1e-12 * (1.0 + exact.abs()),
                        "tri degree={degree} ({a},{b}): {got} vs {exact}"
                    );
                }
            }
        }
    }

    #[test]
    fn legendre_coeffs_match_recurrence_values() {
        for n in 0..=8 {
            let c = legendre_coeffs(n);
            for &t in &[-0.9, -0.3, 0.0, 0.5, 1.0] {
                let horner = c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci);
                assert!((horner - legendre_value(n, t)).abs() < 1e-13);
            }
        }
    }
}
