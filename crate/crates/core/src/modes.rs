//! Radiation modes, characteristic-mode strengths and effective mode counts.
//!
//! Radiation modes are the eigenpairs of `R_r I = ρ R_Ω I`. With
//! `R_Ω = LLᴴ` and `R_r = SᴴS` they follow from the SVD of `S L⁻ᴴ`:
//! `ρ_n = σ_n²` and `I_n = L⁻ᴴ v_n`, so that `I_nᴴ R_Ω I_n = 1`.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::config::{RANK_CUTOFF, TIE_WINDOW};
use crate::linalg::{cholesky_hermitian, min_eigenvalue, CMatrix, CVector};

#[derive(Debug, Error, PartialEq)]
pub enum ModeError {
    #[error("loss matrix is not positive definite (smallest eigenvalue {smallest:e})")]
    NotPositiveDefinite { smallest: f64 },
    #[error("operator shapes disagree: {0}")]
    Shape(String),
    #[error("radiation efficiency must lie in (0, 1), got {0}")]
    BadEfficiency(f64),
    #[error("area and wavenumber must be positive, got A = {area}, k = {k}")]
    BadNormalizer { area: f64, k: f64 },
    #[error("radiation matrix is numerically zero")]
    ZeroRadiation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    Radiation,
    Characteristic,
}

impl ModeKind {
    pub fn name(self) -> &'static str {
        match self {
            ModeKind::Radiation => "radiation",
            ModeKind::Characteristic => "characteristic",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ModeSpectrum {
    pub kind: ModeKind,
    /// Mode strengths, descending.
    pub rho: Vec<f64>,
    /// Mode currents as columns, normalized to `Iᴴ R_Ω I = 1` with the
    /// largest-magnitude entry real and positive.
    pub currents: CMatrix,
    /// Characteristic eigenvalues `λ_n` (characteristic modes only).
    pub eigenvalues: Option<Vec<f64>>,
    /// Dimension of the subspace the modes were solved in.
    pub subspace_dim: usize,
}

impl ModeSpectrum {
    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// Keeps the first `count` modes.
    pub fn truncate(&mut self, count: usize) {
        let count = count.min(self.rho.len());
        self.rho.truncate(count);
        self.currents = self.currents.columns(0, count).into_owned();
        if let Some(ev) = self.eigenvalues.as_mut() {
            ev.truncate(count);
        }
    }
}

/// Radiation modes of `(SᴴS, R_Ω)` by the Cholesky/SVD route. `r_omega`
/// must be Hermitian positive definite; at most `min(N_s, N_b)` modes are
/// returned, or `count` if smaller.
pub fn radiation_modes(s: &CMatrix, r_omega: &CMatrix, count: Option<usize>) -> Result<ModeSpectrum, ModeError> {
    let nb = r_omega.nrows();
    if r_omega.ncols() != nb || s.ncols() != nb {
        return Err(ModeError::Shape(format!(
            "S is {}x{}, R_omega is {}x{}",
            s.nrows(),
            s.ncols(),
            r_omega.nrows(),
            r_omega.ncols()
        )));
    }
    let l = cholesky_hermitian(r_omega)
        .ok_or_else(|| ModeError::NotPositiveDefinite { smallest: hermitian_min_eigenvalue(r_omega) })?;
    // X = S L⁻ᴴ, i.e. Xᴴ = L⁻¹ Sᴴ.
    let mut xh = s.adjoint();
    l.solve_lower_triangular_mut(&mut xh);
    let x = xh.adjoint();
    let svd = x.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let mut modes: Vec<(f64, CVector)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &sigma)| {
            let mut current = v_t.row(i).adjoint();
            l.adjoint().solve_upper_triangular_mut(&mut current);
            (sigma * sigma, current)
        })
        .collect();
    let limit = count.unwrap_or(usize::MAX).min(s.nrows().min(nb));
    order_modes(&mut modes, s);
    modes.truncate(limit);
    Ok(assemble_spectrum(ModeKind::Radiation, modes, None, nb))
}

/// Same as [`radiation_modes`] for a real loss matrix, factored in real
/// arithmetic. The SVD is real as well when `S` has no imaginary part.
pub fn radiation_modes_real(
    s: &CMatrix,
    r_omega: &DMatrix<f64>,
    count: Option<usize>,
) -> Result<ModeSpectrum, ModeError> {
    let nb = r_omega.nrows();
    if r_omega.ncols() != nb || s.ncols() != nb {
        return Err(ModeError::Shape(format!(
            "S is {}x{}, R_omega is {}x{}",
            s.nrows(),
            s.ncols(),
            r_omega.nrows(),
            r_omega.ncols()
        )));
    }
    let chol = r_omega
        .clone()
        .cholesky()
        .ok_or_else(|| ModeError::NotPositiveDefinite { smallest: min_eigenvalue(r_omega) })?;
    let l = chol.l();
    let solve = |m: DMatrix<f64>| {
        let mut m = m;
        l.solve_lower_triangular_mut(&mut m);
        m
    };
    // Xᴴ = L⁻¹ Sᴴ, with Sᴴ = Sᵀ_re − j Sᵀ_im.
    let xh_re = solve(s.map(|c| c.re).transpose());
    let real_s = s.iter().all(|c| c.im == 0.0);
    let (sigmas, rows): (Vec<f64>, Vec<CVector>) = if real_s {
        let svd = xh_re.transpose().svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let rows =
            (0..svd.singular_values.len()).map(|i| v_t.row(i).transpose().map(|x| Complex64::new(x, 0.0))).collect();
        (svd.singular_values.iter().cloned().collect(), rows)
    } else {
        let xh_im = solve(s.map(|c| -c.im).transpose());
        let xh = CMatrix::from_fn(nb, s.nrows(), |i, j| Complex64::new(xh_re[(i, j)], xh_im[(i, j)]));
        let svd = xh.adjoint().svd(false, true);
        let v_t = svd.v_t.expect("right singular vectors requested");
        let rows = (0..svd.singular_values.len()).map(|i| v_t.row(i).adjoint()).collect();
        (svd.singular_values.iter().cloned().collect(), rows)
    };
    let lt = l.transpose();
    let mut modes: Vec<(f64, CVector)> = sigmas
        .into_iter()
        .zip(rows)
        .map(|(sigma, v)| {
            let mut re = v.map(|c| c.re);
            let mut im = v.map(|c| c.im);
            lt.solve_upper_triangular_mut(&mut re);
            lt.solve_upper_triangular_mut(&mut im);
            let current = CVector::from_fn(nb, |i, _| Complex64::new(re[i], im[i]));
            (sigma * sigma, current)
        })
        .collect();
    let limit = count.unwrap_or(usize::MAX).min(s.nrows().min(nb));
    order_modes(&mut modes, s);
    modes.truncate(limit);
    Ok(assemble_spectrum(ModeKind::Radiation, modes, None, nb))
}

fn hermitian_min_eigenvalue(m: &CMatrix) -> f64 {
    let n = m.nrows();
    // Real symmetric embedding [[A, -B], [B, A]] of A + jB has the same
    // eigenvalues, each twice.
    let embed = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
        let c = m[(i % n, j % n)];
        match (i < n, j < n) {
            (true, true) | (false, false) => c.re,
            (true, false) => -c.im,
            (false, true) => c.im,
        }
    });
    min_eigenvalue(&embed)
}

/// Sorts descending by strength; near-ties are ordered by the index of the
/// largest far-field coefficient `|S I|`, then phases are fixed.
fn order_modes(modes: &mut [(f64, CVector)], s: &CMatrix) {
    modes.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal));
    let mut start = 0;
    while start < modes.len() {
        let mut end = start + 1;
        while end < modes.len() && (modes[start].0 - modes[end].0).abs() <= TIE_WINDOW * modes[start].0.abs() {
            end += 1;
        }
        if end - start > 1 {
            modes[start..end].sort_by_key(|(_, current)| dominant_index(&(s * current)));
        }
        start = end;
    }
    for (_, current) in modes.iter_mut() {
        fix_phase(current);
    }
}

fn dominant_index(v: &CVector) -> usize {
    let mut best = (0, -1.0);
    for (i, c) in v.iter().enumerate() {
        if c.norm() > best.1 * (1.0 + 1e-12) {
            best = (i, c.norm());
        }
    }
    best.0
}

fn fix_phase(current: &mut CVector) {
    let i = dominant_index(current);
    let c = current[i];
    if c.norm() > 0.0 {
        *current *= c.conj() / c.norm();
        current[i] = Complex64::new(current[i].norm(), 0.0);
    }
}

fn assemble_spectrum(
    kind: ModeKind,
    modes: Vec<(f64, CVector)>,
    eigenvalues: Option<Vec<f64>>,
    subspace_dim: usize,
) -> ModeSpectrum {
    let nb = modes.first().map_or(0, |m| m.1.len());
    let mut currents = CMatrix::zeros(nb, modes.len());
    let mut rho = Vec::with_capacity(modes.len());
    for (j, (value, current)) in modes.into_iter().enumerate() {
        rho.push(value.max(0.0));
        currents.set_column(j, &current);
    }
    ModeSpectrum { kind, rho, currents, eigenvalues, subspace_dim }
}

/// `ρ = Iᴴ R_r I / Iᴴ R_Ω I`.
pub fn rayleigh_strength(current: &CVector, r_r: &DMatrix<f64>, r_omega: &DMatrix<f64>) -> f64 {
    let quad = |m: &DMatrix<f64>| {
        let re = current.map(|c| c.re);
        let im = current.map(|c| c.im);
        (re.transpose() * m * &re)[(0, 0)] + (im.transpose() * m * &im)[(0, 0)]
    };
    quad(r_r) / quad(r_omega)
}

/// Lossless characteristic modes `X I = λ R_r I` (`X = Im Z`), solved in the
/// range of `R_r` where its eigenvalues exceed `RANK_CUTOFF` times the
/// largest, and ranked by their strength [`rayleigh_strength`].
pub fn characteristic_modes(
    z: &CMatrix,
    r_r: &DMatrix<f64>,
    r_omega: &DMatrix<f64>,
) -> Result<ModeSpectrum, ModeError> {
    let nb = r_r.nrows();
    if z.shape() != (nb, nb) || r_omega.shape() != (nb, nb) {
        return Err(ModeError::Shape(format!(
            "Z is {}x{}, R_r is {nb}x{nb}, R_omega is {}x{}",
            z.nrows(),
            z.ncols(),
            r_omega.nrows(),
            r_omega.ncols()
        )));
    }
    let eig = r_r.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().copied().fold(0.0, f64::max);
    if max <= 0.0 {
        return Err(ModeError::ZeroRadiation);
    }
    let keep: Vec<usize> = (0..nb).filter(|&i| eig.eigenvalues[i] > RANK_CUTOFF * max).collect();
    let w = DMatrix::from_fn(nb, keep.len(), |i, j| eig.eigenvectors[(i, keep[j])] / eig.eigenvalues[keep[j]].sqrt());
    let x = z.map(|c| c.im);
    let mut reduced = w.transpose() * x * &w;
    let rt = reduced.transpose();
    reduced = (reduced + rt) * 0.5;
    let inner = reduced.symmetric_eigen();
    let mut modes: Vec<(f64, f64, CVector)> = (0..keep.len())
        .map(|j| {
            let real = &w * inner.eigenvectors.column(j);
            let mut current = real.map(|v| Complex64::new(v, 0.0));
            let loss = (real.transpose() * r_omega * &real)[(0, 0)];
            current /= Complex64::new(loss.sqrt(), 0.0);
            fix_phase(&mut current);
            (rayleigh_strength(&current, r_r, r_omega), inner.eigenvalues[j], current)
        })
        .collect();
    modes.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(Ordering::Equal).then(a.1.abs().total_cmp(&b.1.abs())));
    let eigenvalues = modes.iter().map(|m| m.1).collect();
    let modes = modes.into_iter().map(|(rho, _, current)| (rho, current)).collect();
    Ok(assemble_spectrum(ModeKind::Characteristic, modes, Some(eigenvalues), keep.len()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeCount {
    /// Number of modes with `ρ > η/(1−η)`.
    pub count: usize,
    pub threshold: f64,
    /// `k²A/(2π) = 2πA/λ²`.
    pub normalizer: f64,
    pub normalized: f64,
}

/// `k²A/(2π)`.
pub fn dof_normalizer(area: f64, k: f64) -> Result<f64, ModeError> {
    if !(area > 0.0 && k > 0.0 && area.is_finite() && k.is_finite()) {
        return Err(ModeError::BadNormalizer { area, k });
    }
    Ok(k * k * area / (2.0 * PI))
}

pub fn efficiency_threshold(eta: f64) -> Result<f64, ModeError> {
    if !(eta > 0.0 && eta < 1.0) {
        return Err(ModeError::BadEfficiency(eta));
    }
    Ok(eta / (1.0 - eta))
}

pub fn count_effective_modes(rho: &[f64], eta: f64, area: f64, k: f64) -> Result<ModeCount, ModeError> {
    let threshold = efficiency_threshold(eta)?;
    let normalizer = dof_normalizer(area, k)?;
    let count = rho.iter().filter(|&&r| r > threshold).count();
    Ok(ModeCount { count, threshold, normalizer, normalized: count as f64 / normalizer })
}

/// CSV table `n,rho,rho_normalized,kind` for one or more spectra, with
/// strengths divided by `reference`.
pub fn mode_table(spectra: &[&ModeSpectrum], reference: f64) -> String {
    let mut out = String::from("n,rho,rho_normalized,kind\n");
    for spectrum in spectra {
        for (n, rho) in spectrum.rho.iter().enumerate() {
            let _ = writeln!(out, "{},{:e},{:e},{}", n + 1, rho, rho / reference, spectrum.kind.name());
        }
    }
    out
}

/// Far-field overlap `(S I_m)ᴴ (S I_n)` of all mode pairs.
pub fn far_field_gram(s: &CMatrix, spectrum: &ModeSpectrum) -> CMatrix {
    let f = s * &spectrum.currents;
    f.adjoint() * f
}

/// `I_mᴴ M I_n` of all mode pairs.
pub fn current_gram(m: &CMatrix, spectrum: &ModeSpectrum) -> CMatrix {
    spectrum.currents.adjoint() * m * &spectrum.currents
}

pub fn column(spectrum: &ModeSpectrum, n: usize) -> DVector<Complex64> {
    spectrum.currents.column(n).into_owned()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::to_complex;
    use proptest::prelude::*;

    #[test]
    fn diagonal_toy_pencil() {
        let s = to_complex(&DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 1.0]));
        let spec = radiation_modes_real(&s, &DMatrix::identity(2, 2), None).unwrap();
        assert!((spec.rho[0] - 4.0).abs() < 1e-14 && (spec.rho[1] - 1.0).abs() < 1e-14);
        assert!((spec.currents[(0, 0)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!((spec.currents[(1, 1)] - Complex64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn not_positive_definite_names_smallest_eigenvalue() {
        let s = to_complex(&DMatrix::identity(2, 2));
        let r = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -0.5]);
        match radiation_modes_real(&s, &r, None) {
            Err(ModeError::NotPositiveDefinite { smallest }) => assert!((smallest + 0.5).abs() < 1e-12),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ties_are_ordered_by_far_field_index() {
        let s = to_complex(&DMatrix::from_row_slice(3, 3, &[0.0, 1.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 3.0]));
        let spec = radiation_modes_real(&s, &DMatrix::identity(3, 3), None).unwrap();
        assert_eq!(spec.rho, vec![9.0, 1.0, 1.0]);
        // Mode with far field on row 0 (current on column 1) comes first.
        assert!(spec.currents[(1, 1)].norm() > 0.99);
        assert!(spec.currents[(0, 2)].norm() > 0.99);
    }

    fn random_problem(seed: u64, ns: usize, nb: usize) -> (CMatrix, DMatrix<f64>) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let s =
            CMatrix::from_fn(ns, nb, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = DMatrix::from_fn(nb, nb, |_, _| rng.random_range(-1.0..1.0));
        let r = &a * a.transpose() + DMatrix::identity(nb, nb) * 0.5;
        (s, r)
    }

    /// Dense generalized eigensolve `L⁻¹ R_r L⁻ᵀ` as an independent oracle.
    fn generalized_oracle(s: &CMatrix, r_omega: &DMatrix<f64>) -> Vec<f64> {
        let rr = s.adjoint() * s;
        let l = to_complex(&r_omega.clone().cholesky().unwrap().l());
        let linv = l.try_inverse().unwrap();
        let m = &linv * rr * linv.adjoint();
        let n = m.nrows();
        let embed = DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let c = m[(i % n, j % n)];
            match (i < n, j < n) {
                (true, true) | (false, false) => c.re,
                (true, false) => -c.im,
                (false, true) => c.im,
            }
        });
        let mut ev: Vec<f64> = embed.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        ev.into_iter().step_by(2).collect()
    }

    #[test]
    fn svd_route_matches_generalized_eigensolve() {
        for (seed, ns, nb) in [(1, 4, 7), (2, 9, 5), (3, 6, 6)] {
            let (s, r) = random_problem(seed, ns, nb);
            let spec = radiation_modes_real(&s, &r, None).unwrap();
            let oracle = generalized_oracle(&s, &r);
            assert_eq!(spec.len(), ns.min(nb));
            for (a, b) in spec.rho.iter().zip(&oracle) {
                assert!((a - b).abs() < 1e-10 * oracle[0], "{a} vs {b}");
            }
        }
    }

    #[test]
    fn modes_are_orthogonal_in_loss_and_far_field() {
        let (s, r) = random_problem(4, 6, 10);
        let spec = radiation_modes_real(&s, &r, None).unwrap();
        let loss = current_gram(&to_complex(&r), &spec);
        let far = far_field_gram(&s, &spec);
        for i in 0..spec.len() {
            for j in 0..spec.len() {
                let expected_loss = if i == j { 1.0 } else { 0.0 };
                assert!((loss[(i, j)].re - expected_loss).abs() < 1e-10 && loss[(i, j)].im.abs() < 1e-10);
                let expected_far = if i == j { spec.rho[i] } else { 0.0 };
                assert!((far[(i, j)] - Complex64::new(expected_far, 0.0)).norm() < 1e-9 * spec.rho[0]);
            }
        }
    }

    #[test]
    fn count_limits_modes() {
        let (s, r) = random_problem(5, 6, 10);
        assert_eq!(radiation_modes_real(&s, &r, Some(2)).unwrap().len(), 2);
    }

    #[test]
    fn real_and_complex_factorizations_agree() {
        let (s, r) = random_problem(6, 5, 8);
        for s in [s.map(|c| Complex64::new(c.re, 0.0)), s] {
            let a = radiation_modes_real(&s, &r, None).unwrap();
            let b = radiation_modes(&s, &to_complex(&r), None).unwrap();
            for (x, y) in a.rho.iter().zip(&b.rho) {
                assert!((x - y).abs() < 1e-12 * a.rho[0]);
            }
            assert!((&a.currents - &b.currents).norm() < 1e-9 * b.currents.norm());
        }
    }

    #[test]
    fn characteristic_strengths_are_bounded_by_radiation_modes() {
        use rand::{Rng, SeedableRng};
        let (s, r) = random_problem(6, 5, 8);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(60);
        let x = DMatrix::from_fn(8, 8, |_, _| rng.random_range(-1.0..1.0));
        let x = &x + x.transpose();
        let real_s = s.map(|c| Complex64::new(c.re, 0.0));
        let rr = (real_s.adjoint() * &real_s).map(|c| c.re);
        let z = CMatrix::from_fn(8, 8, |i, j| Complex64::new(rr[(i, j)], x[(i, j)]));
        let cm = characteristic_modes(&z, &rr, &r).unwrap();
        let rad = radiation_modes_real(&real_s, &r, None).unwrap();
        assert_eq!(cm.subspace_dim, 5);
        for rho in &cm.rho {
            assert!(*rho <= rad.rho[0] * (1.0 + 1e-10));
        }
        // Characteristic currents diagonalize X on the range of R_r.
        let currents = cm.currents.map(|c| c.re);
        let xr = currents.transpose() * &x * &currents;
        let rrr = currents.transpose() * &rr * &currents;
        for i in 0..cm.len() {
            for j in 0..cm.len() {
                if i != j {
                    assert!(xr[(i, j)].abs() < 1e-8 * xr.amax());
                    assert!(rrr[(i, j)].abs() < 1e-8 * rrr.amax());
                }
            }
        }
    }

    #[test]
    fn counting() {
        let rho = [100.0, 10.0, 1.0, 0.1];
        assert_eq!(efficiency_threshold(0.5).unwrap(), 1.0);
        assert_eq!(count_effective_modes(&rho, 0.5, 1.0, 1.0).unwrap().count, 2);
        assert_eq!(count_effective_modes(&rho, 1e-12, 1.0, 1.0).unwrap().count, 4);
        assert!(count_effective_modes(&rho, 1.0, 1.0, 1.0).is_err());
        assert!(count_effective_modes(&rho, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn normalizer() {
        let a = 0.7;
        let k = 1.0 / a;
        assert!((dof_normalizer(4.0 * PI * a * a, k).unwrap() - 2.0).abs() < 1e-14);
        let l = 1.3;
        assert!((dof_normalizer(l * l / 2.0, 2.0).unwrap() - 4.0 * l * l / (4.0 * PI)).abs() < 1e-14);
        assert!(dof_normalizer(0.0, 1.0).is_err());
    }

    #[test]
    fn csv_table() {
        let spec = ModeSpectrum {
            kind: ModeKind::Radiation,
            rho: vec![4.0, 1.0],
            currents: CMatrix::zeros(1, 2),
            eigenvalues: None,
            subspace_dim: 1,
        };
        assert_eq!(
            mode_table(&[&spec], 4.0),
            "n,rho,rho_normalized,kind\n1,4e0,1e0,radiation\n2,1e0,2.5e-1,radiation\n"
        );
    }

    proptest! {
        #[test]
        fn count_is_monotone(rho in prop::collection::vec(0.0f64..100.0, 0..20), e1 in 0.01f64..0.99, e2 in 0.01f64..0.99, extra in 0.0f64..100.0) {
            let (lo, hi) = if e1 < e2 { (e1, e2) } else { (e2, e1) };
            let c_lo = count_effective_modes(&rho, lo, 1.0, 1.0).unwrap().count;
            let c_hi = count_effective_modes(&rho, hi, 1.0, 1.0).unwrap().count;
            prop_assert!(c_hi <= c_lo);
            let mut more = rho.clone();
            more.push(extra);
            prop_assert!(count_effective_modes(&more, lo, 1.0, 1.0).unwrap().count >= c_lo);
        }

        #[test]
        fn rayleigh_quotient_is_bounded(seed in 0u64..1000) {
            use rand::{Rng, SeedableRng};
            let (s, r) = random_problem(seed, 4, 6);
            let real_s = s.map(|c| Complex64::new(c.re, 0.0));
            let rr = (real_s.adjoint() * &real_s).map(|c| c.re);
            let spec = radiation_modes_real(&real_s, &r, None).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed + 1);
            let i = CVector::from_fn(6, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            prop_assert!(rayleigh_strength(&i, &rr, &r) <= spec.rho[0] * (1.0 + 1e-10));
            let top = column(&spec, 0);
            prop_assert!((rayleigh_strength(&top, &rr, &r) - spec.rho[0]).abs() <= 1e-9 * spec.rho[0]);
        }

        #[test]
        fn scaling_loss_scales_strengths(seed in 0u64..200, c in 0.1f64..10.0) {
            let (s, r) = random_problem(seed, 5, 5);
            let a = radiation_modes_real(&s, &r, None).unwrap();
            let b = radiation_modes_real(&s, &(&r * c), None).unwrap();
            for (x, y) in a.rho.iter().zip(&b.rho) {
                prop_assert!((x / c - y).abs() <= 1e-9 * a.rho[0]);
            }
        }
    }
}
