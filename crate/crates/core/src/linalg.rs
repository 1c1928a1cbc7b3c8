//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

pub fn to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

pub fn one_norm<T: nalgebra::ComplexField<RealField = f64>>(m: &DMatrix<T>) -> f64 {
    (0..m.ncols()).map(|j| m.column(j).iter().map(|x| x.clone().modulus()).sum::<f64>()).fold(0.0, f64::max)
}

/// Lower Cholesky factor of a Hermitian matrix, or `None` if a pivot is not
/// real and positive.
pub fn cholesky_hermitian(a: &CMatrix) -> Option<CMatrix> {
    let l = a.clone().cholesky()?.l();
    let ok = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re > 0.0 && d.re.is_finite() && d.im.abs() <= 1e-12 * d.re
    });
    ok.then_some(l)
}

/// Smallest eigenvalue of a real symmetric matrix.
pub fn min_eigenvalue(m: &DMatrix<f64>) -> f64 {
    m.clone().symmetric_eigen().eigenvalues.iter().copied().fold(f64::INFINITY, f64::min)
}

/// Hager–Higham estimate of `‖A⁻¹‖₁` given solvers for `A x = b` and
/// `Aᴴ x = b`.
pub fn inverse_one_norm_estimate(
    n: usize,
    solve: impl Fn(&CVector) -> CVector,
    solve_adjoint: impl Fn(&CVector) -> CVector,
) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let l1 = |v: &CVector| v.iter().map(|c| c.norm()).sum::<f64>();
    let mut x = CVector::from_element(n, Complex64::new(1.0 / n as f64, 0.0));
    let mut estimate = 0.0;
    let mut last = usize::MAX;
    for _ in 0..5 {
        let y = solve(&x);
        estimate = l1(&y);
        let xi = y.map(|c| if c.norm() > 0.0 { c / c.norm() } else { Complex64::new(1.0, 0.0) });
        let z = solve_adjoint(&xi);
        let (j, zmax) = z.iter().enumerate().fold(
            (0, 0.0),
            |(bj, bm), (i, c)| {
                if c.norm() > bm {
                    (i, c.norm())
                } else {
                    (bj, bm)
                }
            },
        );
        if zmax <= z.dotc(&x).re || j == last {
            break;
        }
        last = j;
        x = CVector::zeros(n);
        x[j] = Complex64::new(1.0, 0.0);
    }
    let denom = if n > 1 { (n - 1) as f64 } else { 1.0 };
    let alt = CVector::from_fn(n, |i, _| {
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        Complex64::new(sign * (1.0 + i as f64 / denom), 0.0)
    });
    let alt_estimate = 2.0 * l1(&solve(&alt)) / (3.0 * n as f64);
    estimate.max(alt_estimate)
}

/// Estimated 1-norm condition number of a square complex matrix via LU.
/// Returns infinity for an exactly singular factorization.
pub fn condition_estimate(a: &CMatrix) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 1.0;
    }
    let lu = a.clone().lu();
    if !lu.is_invertible() {
        return f64::INFINITY;
    }
    let adjoint = a.adjoint().lu();
    let est = inverse_one_norm_estimate(
        n,
        |b| lu.solve(b).unwrap_or_else(|| CVector::from_element(n, Complex64::new(f64::INFINITY, 0.0))),
        |b| adjoint.solve(b).unwrap_or_else(|| CVector::from_element(n, Complex64::new(f64::INFINITY, 0.0))),
    );
    one_norm(a) * est
}

/// Largest relative deviation from Hermitian symmetry, `‖A − Aᴴ‖_F / ‖A‖_F`.
pub fn hermitian_defect(a: &CMatrix) -> f64 {
    let norm = a.norm();
    if norm == 0.0 {
        0.0
    } else {
        (a - a.adjoint()).norm() / norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
        CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    fn exact_condition(a: &CMatrix) -> f64 {
        let inv = a.clone().try_inverse().unwrap();
        one_norm(a) * one_norm(&inv)
    }

    #[test]
    fn estimate_is_a_tight_lower_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for n in [1, 2, 5, 20] {
            for _ in 0..10 {
                let a = random_matrix(n, &mut rng);
                let exact = exact_condition(&a);
                let est = condition_estimate(&a);
                assert!(est <= exact * (1.0 + 1e-10), "{est} > {exact}");
                assert!(est >= exact / 10.0, "{est} << {exact}");
            }
        }
    }

    #[test]
    fn near_singular_matrix_has_large_condition() {
        let mut a = CMatrix::identity(4, 4);
        a[(3, 3)] = Complex64::new(1e-12, 0.0);
        assert!(condition_estimate(&a) > 1e11);
        a[(3, 3)] = Complex64::new(0.0, 0.0);
        assert_eq!(condition_estimate(&a), f64::INFINITY);
    }

    #[test]
    fn cholesky_rejects_indefinite_matrices() {
        let mut a = CMatrix::identity(3, 3);
        a[(0, 1)] = Complex64::new(0.2, 0.3);
        a[(1, 0)] = Complex64::new(0.2, -0.3);
        let l = cholesky_hermitian(&a).unwrap();
        assert!((&l * l.adjoint() - &a).norm() < 1e-14);
        a[(2, 2)] = Complex64::new(-0.1, 0.0);
        assert!(cholesky_hermitian(&a).is_none());
    }

    #[test]
    fn hermitian_defect_detects_asymmetry() {
        let mut a = CMatrix::identity(2, 2);
        assert_eq!(hermitian_defect(&a), 0.0);
        a[(0, 1)] = Complex64::new(0.0, 1.0);
        a[(1, 0)] = Complex64::new(0.0, -1.0);
        assert!(hermitian_defect(&a) < 1e-15);
        a[(1, 0)] = Complex64::new(0.0, 1.0);
        assert!(hermitian_defect(&a) > 0.1);
    }
}
