//! Regular spherical vector waves and the projection matrix `S`.
//!
//! Waves use real (even/odd) spherical harmonics. With
//! `A₁ = (θ̂ ∂_φY/sinθ − φ̂ ∂_θY)/√(l(l+1))`,
//! `A₂ = (θ̂ ∂_θY + φ̂ ∂_φY/sinθ)/√(l(l+1))` and `A₃ = r̂ Y`, the regular
//! waves at `x = kr` are
//!
//! * `u₁ = j_l(x) A₁`
//! * `u₂ = ((x j_l)'/x) A₂ + √(l(l+1)) (j_l/x) A₃`.
//!
//! These satisfy `(I + ∇∇/k²) sin(kR)/(4πR) = k Σ_α u_α(kr₁) u_α(kr₂)ᵀ`, so
//! `S_αp = k√Z₀ ∫ ψ_p · u_α dA` factors the radiation matrix exactly:
//! `Re Z = SᴴS`. All entries of `S` are real; it is stored complex to match
//! the operator file format.

pub mod functions;

use std::fmt::Write as _;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::config::AssemblyConfig;
use crate::geometry::{TriangleMesh, Vec3};
use crate::mom::BasisSet;
use crate::quadrature::TriangleRule;
use functions::{legendre_table, spherical_bessel};

#[derive(Debug, Error, PartialEq)]
pub enum SphericalError {
    #[error("truncation order must be at least 1, got {0}")]
    BadOrder(usize),
    #[error("wavenumber must be positive, got {0}")]
    BadWavenumber(f64),
    #[error("basis is defined on {basis} triangles but the mesh has {mesh}")]
    Mismatch { basis: usize, mesh: usize },
    #[error("malformed mode ordering header: {0}")]
    Header(String),
}

/// One regular wave: polarization `tau` (1 = TE, 2 = TM), degree `l` and
/// signed order `m`. Negative `m` selects the odd (`sin |m|φ`) harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SphericalMode {
    pub tau: u8,
    pub l: usize,
    pub m: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphericalModeSet {
    order: usize,
    modes: Vec<SphericalMode>,
}

/// Enumerates modes τ-major, then `l = 1..=L`, then `m = −l..=l`.
pub fn mode_index_map(order: usize) -> Result<SphericalModeSet, SphericalError> {
    if order < 1 {
        return Err(SphericalError::BadOrder(order));
    }
    let mut modes = Vec::with_capacity(2 * order * (order + 2));
    for tau in 1..=2u8 {
        for l in 1..=order {
            for m in -(l as i64)..=(l as i64) {
                modes.push(SphericalMode { tau, l, m });
            }
        }
    }
    Ok(SphericalModeSet { order, modes })
}

impl SphericalModeSet {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[SphericalMode] {
        &self.modes
    }

    /// Row of `(τ, l, m)` in the canonical ordering.
    pub fn index(order: usize, mode: SphericalMode) -> usize {
        (mode.tau as usize - 1) * order * (order + 2) + (mode.l * mode.l - 1) + (mode.m + mode.l as i64) as usize
    }

    /// Sidecar text listing the row ordering of `S`.
    pub fn header(&self) -> String {
        let mut out = format!("SPHMODES1\n{} {}\n", self.order, self.modes.len());
        for (alpha, mode) in self.modes.iter().enumerate() {
            let _ = writeln!(out, "{alpha} {} {} {}", mode.tau, mode.l, mode.m);
        }
        out
    }

    pub fn parse_header(text: &str) -> Result<Self, SphericalError> {
        let bad = |msg: &str| SphericalError::Header(msg.to_string());
        let mut lines = text.lines();
        if lines.next() != Some("SPHMODES1") {
            return Err(bad("missing SPHMODES1 magic"));
        }
        let counts: Vec<usize> = lines
            .next()
            .ok_or_else(|| bad("missing count line"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| bad("bad count line")))
            .collect::<Result<_, _>>()?;
        let [order, count] = counts[..] else { return Err(bad("bad count line")) };
        let mut modes = Vec::with_capacity(count);
        for (alpha, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = (|| {
                let [a, tau, l, m] = fields[..] else { return None };
                Some((a.parse::<usize>().ok()?, tau.parse().ok()?, l.parse().ok()?, m.parse().ok()?))
            })();
            let (a, tau, l, m) = parsed.ok_or_else(|| SphericalError::Header(format!("bad row {alpha}")))?;
            if a != alpha {
                return Err(SphericalError::Header(format!("row {alpha} is labeled {a}")));
            }
            modes.push(SphericalMode { tau, l, m });
        }
        let set = Self { order, modes };
        if mode_index_map(order)? != set || set.len() != count {
            return Err(bad("ordering does not match the canonical enumeration"));
        }
        Ok(set)
    }
}

/// `L = ⌈ka + 7 (ka)^{1/3}⌉ + 2`, at least 4.
pub fn truncation_order(ka: f64) -> usize {
    let l = (ka + 7.0 * ka.cbrt()).ceil() as usize + 2;
    l.max(4)
}

/// Regular waves of every mode at `x = k r`, in Cartesian components.
pub fn regular_waves(modes: &SphericalModeSet, x: &Vec3) -> Vec<[f64; 3]> {
    let order = modes.order;
    let radius = x.norm();
    let rho = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let (sin_t, cos_t) = if radius > 0.0 { (rho / radius, x[2] / radius) } else { (0.0, 1.0) };
    let phi = if rho > 0.0 { x[1].atan2(x[0]) } else { 0.0 };
    let (sin_p, cos_p) = phi.sin_cos();
    let r_hat = [sin_t * cos_p, sin_t * sin_p, cos_t];
    let t_hat = [cos_t * cos_p, cos_t * sin_p, -sin_t];
    let p_hat = [-sin_p, cos_p, 0.0];

    let leg = legendre_table(order, cos_t, sin_t);
    let bes = spherical_bessel(order, radius);
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();

    modes
        .modes
        .iter()
        .map(|mode| {
            let l = mode.l;
            let am = mode.m.unsigned_abs() as usize;
            let mf = am as f64;
            // Azimuthal factor and its derivative.
            let (az, daz) = if mode.m == 0 {
                (1.0 / (2.0 * std::f64::consts::PI).sqrt(), 0.0)
            } else if mode.m > 0 {
                let (s, c) = (mf * phi).sin_cos();
                (c * inv_sqrt_pi, -mf * s * inv_sqrt_pi)
            } else {
                let (s, c) = (mf * phi).sin_cos();
                (s * inv_sqrt_pi, mf * c * inv_sqrt_pi)
            };
            let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
            let y_theta = leg.dp[l][am] * az;
            let y_phi = if am == 0 { 0.0 } else { leg.q[l][am] * daz };
            let mut out = [0.0; 3];
            if mode.tau == 1 {
                let radial = bes.j[l] * norm;
                for d in 0..3 {
                    out[d] = radial * (t_hat[d] * y_phi - p_hat[d] * y_theta);
                }
            } else {
                let tangential = bes.riccati_derivative_over_x(l) * norm;
                let normal = ((l * (l + 1)) as f64).sqrt() * bes.j_over_x[l] * leg.p[l][am] * az;
                for d in 0..3 {
                    out[d] = tangential * (t_hat[d] * y_theta + p_hat[d] * y_phi) + normal * r_hat[d];
                }
            }
            out
        })
        .collect()
}

/// `S_αp = k√Z₀ ∫ ψ_p · u_α(kr) dA`, integrated with the same rule as the
/// well-separated pairs of `Z` and with `Z₀` taken from `config`. Returned
/// as `N_s × N_b`.
pub fn assemble_s(
    mesh: &TriangleMesh,
    basis: &BasisSet,
    k: f64,
    modes: &SphericalModeSet,
    config: &AssemblyConfig,
) -> Result<DMatrix<Complex64>, SphericalError> {
    if !(k > 0.0 && k.is_finite()) {
        return Err(SphericalError::BadWavenumber(k));
    }
    if basis.num_triangles() != mesh.triangles().len() {
        return Err(SphericalError::Mismatch { basis: basis.num_triangles(), mesh: mesh.triangles().len() });
    }
    let rule = match config.far_points {
        3 => TriangleRule::three_point(),
        _ => TriangleRule::six_point(),
    };
    let ns = modes.len();
    let prefactor = k * config.z0.sqrt();
    let columns: Vec<Vec<(usize, Vec<f64>)>> = (0..mesh.triangles().len())
        .into_par_iter()
        .map(|t| {
            let locals = basis.on_triangle(t);
            if locals.is_empty() {
                return Vec::new();
            }
            let area = mesh.triangle_area(t);
            let mut acc: Vec<(usize, Vec<f64>)> = locals.iter().map(|a| (a.function, vec![0.0; ns])).collect();
            for (r, w) in rule.map(&mesh.vertices(t)).iter().zip(&rule.weights) {
                let waves = regular_waves(modes, &(r * k));
                for (a, (_, column)) in locals.iter().zip(acc.iter_mut()) {
                    let psi = basis.evaluate(mesh, a, r) * (w * area * prefactor);
                    for (entry, u) in column.iter_mut().zip(&waves) {
                        *entry += psi[0] * u[0] + psi[1] * u[1] + psi[2] * u[2];
                    }
                }
            }
            acc
        })
        .collect();
    let mut s = DMatrix::<Complex64>::zeros(ns, basis.len());
    for (p, column) in columns.into_iter().flatten() {
        for (alpha, v) in column.into_iter().enumerate() {
            s[(alpha, p)].re += v;
        }
    }
    Ok(s)
}

/// `R_r = SᴴS`, returned as its real symmetric part.
pub fn radiation_matrix(s: &DMatrix<Complex64>) -> DMatrix<f64> {
    let gram = s.adjoint() * s;
    let mut r = gram.map(|c| c.re);
    let rt = r.transpose();
    r += rt;
    r *= 0.5;
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{make_canonical, GeometryParams, Resolution, Shape};
    use crate::mom::{assemble_z, build_rwg};
    use std::f64::consts::PI;

    #[test]
    fn mode_counts() {
        assert_eq!(mode_index_map(1).unwrap().len(), 6);
        assert_eq!(mode_index_map(2).unwrap().len(), 16);
        assert_eq!(mode_index_map(10).unwrap().len(), 240);
        assert_eq!(mode_index_map(0), Err(SphericalError::BadOrder(0)));
    }

    #[test]
    fn index_formula_matches_enumeration() {
        let set = mode_index_map(7).unwrap();
        for (alpha, &mode) in set.modes().iter().enumerate() {
            assert_eq!(SphericalModeSet::index(7, mode), alpha);
        }
    }

    #[test]
    fn header_round_trip() {
        let set = mode_index_map(3).unwrap();
        assert_eq!(SphericalModeSet::parse_header(&set.header()).unwrap(), set);
        let broken = set.header().replace("\n4 1 2 -1\n", "\n4 1 2 1\n");
        assert!(SphericalModeSet::parse_header(&broken).is_err());
    }

    #[test]
    fn truncation_rule() {
        assert_eq!(truncation_order(0.01), 4);
        assert_eq!(truncation_order(0.56), 9);
        assert_eq!(truncation_order(1.0), 10);
    }

    /// `(I + ∇∇/k²) sin(kR)/(4πR)` in closed form, for `k = 1`.
    fn dyadic_reference(r1: &Vec3, r2: &Vec3) -> [[f64; 3]; 3] {
        let d = r1 - r2;
        let r = d.norm();
        let (s, c) = r.sin_cos();
        let f = s / (4.0 * PI * r);
        let f1 = (r * c - s) / (4.0 * PI * r * r);
        let f2 = (-r * r * s - 2.0 * r * c + 2.0 * s) / (4.0 * PI * r * r * r);
        let mut g = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                let rr = d[i] * d[j] / (r * r);
                let delta = if i == j { 1.0 } else { 0.0 };
                g[i][j] = (f + f1 / r) * delta + (f2 - f1 / r) * rr;
            }
        }
        g
    }

    #[test]
    fn waves_factor_the_green_dyadic() {
        let set = mode_index_map(30).unwrap();
        let points = [
            (Vec3::new(0.3, -0.2, 0.5), Vec3::new(-0.4, 0.1, 0.2)),
            (Vec3::new(0.0, 0.0, 0.7), Vec3::new(0.5, 0.5, -0.1)),
            (Vec3::new(0.0, 0.0, 0.0), Vec3::new(1.1, -0.3, 0.4)),
            (Vec3::new(-0.9, 0.2, -0.3), Vec3::new(0.0, 0.0, -0.8)),
        ];
        for (r1, r2) in points {
            let u1 = regular_waves(&set, &r1);
            let u2 = regular_waves(&set, &r2);
            let reference = dyadic_reference(&r1, &r2);
            for i in 0..3 {
                for j in 0..3 {
                    let sum: f64 = u1.iter().zip(&u2).map(|(a, b)| a[i] * b[j]).sum();
                    assert!((sum - reference[i][j]).abs() < 1e-12, "{i}{j}: {sum} vs {}", reference[i][j]);
                }
            }
        }
    }

    fn plate(nx: usize, ny: usize) -> TriangleMesh {
        make_canonical(&GeometryParams::new(Shape::Plate { length: 1.0, aspect: 0.5 }, Resolution::Grid { nx, ny }))
            .unwrap()
    }

    #[test]
    fn real_part_of_z_factors_through_s() {
        let mesh = plate(10, 5);
        let basis = build_rwg(&mesh).unwrap();
        let a = mesh.circumscribing_radius();
        for ka in [0.3, 1.0] {
            let k = ka / a;
            let set = mode_index_map(truncation_order(ka)).unwrap();
            let s = assemble_s(&mesh, &basis, k, &set, &AssemblyConfig::default()).unwrap();
            let rr = radiation_matrix(&s);
            let z = assemble_z(&mesh, &basis, k, &AssemblyConfig::default()).unwrap().z;
            let re = z.map(|c| c.re);
            let rel = (&re - &rr).norm() / re.norm();
            assert!(rel < 1e-3, "ka={ka}: {rel}");
        }
    }

    #[test]
    fn truncation_is_converged() {
        let mesh = plate(6, 3);
        let basis = build_rwg(&mesh).unwrap();
        let ka = 1.0;
        let k = ka / mesh.circumscribing_radius();
        let l = truncation_order(ka);
        let rr = |order| {
            radiation_matrix(
                &assemble_s(&mesh, &basis, k, &mode_index_map(order).unwrap(), &AssemblyConfig::default()).unwrap(),
            )
        };
        let (base, doubled) = (rr(l), rr(2 * l));
        assert!((&base - &doubled).norm() / doubled.norm() < 1e-6);
    }

    #[test]
    fn s_scales_with_root_impedance_and_is_real() {
        let mesh = plate(4, 2);
        let basis = build_rwg(&mesh).unwrap();
        let set = mode_index_map(4).unwrap();
        let with_z0 = |z0| AssemblyConfig { z0, ..AssemblyConfig::default() };
        let s1 = assemble_s(&mesh, &basis, 2.0, &set, &with_z0(100.0)).unwrap();
        let s4 = assemble_s(&mesh, &basis, 2.0, &set, &with_z0(400.0)).unwrap();
        assert!((&s4 - &s1 * Complex64::new(2.0, 0.0)).norm() <= 1e-13 * s4.norm());
        assert!(s1.iter().all(|c| c.im == 0.0));
        assert_eq!(assemble_s(&mesh, &basis, -1.0, &set, &with_z0(100.0)), Err(SphericalError::BadWavenumber(-1.0)));
    }

    #[test]
    fn radiation_matrix_is_psd_with_bounded_rank() {
        use rand::{Rng, SeedableRng};
        let mesh = plate(6, 3);
        let basis = build_rwg(&mesh).unwrap();
        let set = mode_index_map(2).unwrap();
        let s = assemble_s(&mesh, &basis, 3.0, &set, &AssemblyConfig::default()).unwrap();
        let rr = radiation_matrix(&s);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let x = nalgebra::DVector::<f64>::from_fn(basis.len(), |_, _| rng.random_range(-1.0..1.0));
            assert!((x.transpose() * &rr * &x)[(0, 0)] >= -1e-12 * rr.norm() * x.norm_squared());
        }
        let eig = rr.clone().symmetric_eigen();
        let max = eig.eigenvalues.amax();
        let rank = eig.eigenvalues.iter().filter(|&&v| v > 1e-9 * max).count();
        assert!(rank <= set.len().min(basis.len()));
    }

    #[test]
    fn gram_is_invariant_under_row_permutation() {
        let mesh = plate(4, 2);
        let basis = build_rwg(&mesh).unwrap();
        let set = mode_index_map(4).unwrap();
        let s = assemble_s(&mesh, &basis, 1.5, &set, &AssemblyConfig::default()).unwrap();
        let n = s.nrows();
        let permuted = DMatrix::from_fn(n, s.ncols(), |i, j| s[((i * 7 + 3) % n, j)]);
        assert!((radiation_matrix(&s) - radiation_matrix(&permuted)).norm() < 1e-12 * radiation_matrix(&s).norm());
    }
}
