//! Quadrature rules on the reference triangle.
//!
//! Points are barycentric `(l1, l2, l3)`; weights sum to one, so an integral
//! over a physical triangle is `area * Σ w f(l1 a + l2 b + l3 c)`.

use std::f64::consts::PI;

use crate::geometry::Vec3;

#[derive(Debug, Clone, PartialEq)]
pub struct TriangleRule {
    pub points: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
}

impl TriangleRule {
    /// Symmetric 3-point rule, exact for quadratics.
    pub fn three_point() -> Self {
        let (a, b) = (2.0 / 3.0, 1.0 / 6.0);
        Self { points: vec![[a, b, b], [b, a, b], [b, b, a]], weights: vec![1.0 / 3.0; 3] }
    }

    /// Symmetric 6-point rule (Dunavant), exact for quartics.
    pub fn six_point() -> Self {
        let (a, wa) = (0.445_948_490_915_965, 0.223_381_589_678_011);
        let (b, wb) = (0.091_576_213_509_771, 0.109_951_743_655_322);
        let (a1, b1) = (1.0 - 2.0 * a, 1.0 - 2.0 * b);
        Self {
            points: vec![[a1, a, a], [a, a1, a], [a, a, a1], [b1, b, b], [b, b1, b], [b, b, b1]],
            weights: vec![wa, wa, wa, wb, wb, wb],
        }
    }

    /// Collapsed Gauss–Legendre product rule with `n²` points, exact for
    /// polynomials of degree `2n - 2`. Used for reference integrals.
    pub fn collapsed_gauss(n: usize) -> Self {
        let (x, w) = gauss_legendre(n);
        let mut points = Vec::with_capacity(n * n);
        let mut weights = Vec::with_capacity(n * n);
        for i in 0..n {
            let u = 0.5 * (x[i] + 1.0);
            for j in 0..n {
                let v = 0.5 * (x[j] + 1.0);
                // (u, v) in the unit square -> (s, t) = (u, v(1-u)).
                let (s, t) = (u, v * (1.0 - u));
                points.push([1.0 - s - t, s, t]);
                // Jacobian (1-u), square measure 1/4, normalized by triangle area 1/2.
                weights.push(w[i] * w[j] * 0.25 * (1.0 - u) * 2.0);
            }
        }
        Self { points, weights }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Physical points of the rule on the triangle `v`.
    pub fn map(&self, v: &[Vec3; 3]) -> Vec<Vec3> {
        self.points.iter().map(|l| v[0] * l[0] + v[1] * l[1] + v[2] * l[2]).collect()
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}
