//! Normalized associated Legendre functions and spherical Bessel functions.

/// Legendre table at one angle, for `0 ≤ m ≤ l ≤ order`.
///
/// `p[l][m]` is `P̄_l^m(cos θ)` normalized so that `∫₋₁¹ (P̄_l^m)² dx = 1`
/// (no Condon–Shortley phase), `q[l][m] = P̄_l^m / sin θ` for `m ≥ 1`
/// (finite on the axis), and `dp[l][m] = dP̄_l^m/dθ`.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub p: Vec<Vec<f64>>,
    pub q: Vec<Vec<f64>>,
    pub dp: Vec<Vec<f64>>,
}

pub fn legendre_table(order: usize, cos_theta: f64, sin_theta: f64) -> LegendreTable {
    let (x, s) = (cos_theta, sin_theta);
    let mut p = vec![vec![0.0; order + 1]; order + 1];
    let mut q = vec![vec![0.0; order + 1]; order + 1];
    let mut dp = vec![vec![0.0; order + 1]; order + 1];

    // Diagonal seeds, normalized at every step.
    let mut pmm = 1.0 / 2f64.sqrt();
    let mut qmm = (0.75f64).sqrt();
    for m in 0..=order {
        if m >= 1 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            if m >= 2 {
                qmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            }
        }
        upward(&mut p, m, pmm, x, order);
        if m >= 1 {
            upward(&mut q, m, qmm, x, order);
        }
    }
    for l in 0..=order {
        for m in 0..=l {
            dp[l][m] = if m == 0 {
                if l == 0 {
                    0.0
                } else {
                    -((l * (l + 1)) as f64).sqrt() * p[l][1]
                }
            } else {
                let below = if l > m { q[l - 1][m] } else { 0.0 };
                let (lf, mf) = (l as f64, m as f64);
                lf * x * q[l][m] - ((2.0 * lf + 1.0) * (lf * lf - mf * mf) / (2.0 * lf - 1.0)).sqrt() * below
            };
        }
    }
    LegendreTable { p, q, dp }
}

fn upward(table: &mut [Vec<f64>], m: usize, diagonal: f64, x: f64, order: usize) {
    table[m][m] = diagonal;
    if m < order {
        table[m + 1][m] = ((2 * m + 3) as f64).sqrt() * x * diagonal;
    }
    for l in (m + 2)..=order {
        let (lf, mf) = (l as f64, m as f64);
        let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
        let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
        table[l][m] = a * (x * table[l - 1][m] - b * table[l - 2][m]);
    }
}

/// Spherical Bessel values for `l = 0..=order`: `j[l] = j_l(x)` and
/// `j_over_x[l] = j_l(x)/x` (finite at `x = 0` for `l ≥ 1`; entry 0 is
/// left at zero).
#[derive(Debug, Clone)]
pub struct BesselTable {
    pub j: Vec<f64>,
    pub j_over_x: Vec<f64>,
}

impl BesselTable {
    /// `(x j_l(x))'/x`, for `l ≥ 1`.
    pub fn riccati_derivative_over_x(&self, l: usize) -> f64 {
        self.j[l - 1] - l as f64 * self.j_over_x[l]
    }
}

pub fn spherical_bessel(order: usize, x: f64) -> BesselTable {
    assert!(x >= 0.0, "spherical Bessel argument must be non-negative");
    let mut j = vec![0.0; order + 1];
    let mut j_over_x = vec![0.0; order + 1];
    if x < 1.0 {
        // Power series: j_l(x) = x^l/(2l+1)!! Σ_k (−x²/2)^k / (k! Π_{i=1..k}(2l+2i+1)).
        let mut lead = 1.0; // x^{l-1}/(2l+1)!! for l ≥ 1
        for l in 0..=order {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..40 {
                term *= -0.5 * x * x / (k as f64 * (2 * l + 2 * k + 1) as f64);
                sum += term;
                if term.abs() < 1e-17 * sum.abs() {
                    break;
                }
            }
            if l == 0 {
                j[0] = sum;
            } else {
                lead *= if l == 1 { 1.0 / 3.0 } else { x / (2 * l + 1) as f64 };
                j_over_x[l] = lead * sum;
                j[l] = x * j_over_x[l];
            }
        }
        return BesselTable { j, j_over_x };
    }
    // Miller's downward recurrence normalized with Σ (2l+1) j_l² = 1.
    let start = order.max(x.ceil() as usize) + 40;
    let mut above = 0.0;
    let mut current = 1.0;
    let mut norm = 0.0;
    for l in (0..=start).rev() {
        if l <= order {
            j[l] = current;
        }
        norm += (2 * l + 1) as f64 * current * current;
        let below = (2 * l + 1) as f64 / x * current - above;
        above = current;
        current = below;
        if current.abs() > 1e100 {
            let scale = 1e-100;
            current *= scale;
            above *= scale;
            norm *= scale * scale;
            for v in j.iter_mut() {
                *v *= scale;
            }
        }
    }
    let scale = 1.0 / norm.sqrt();
    // Fix the overall sign with the closed form of j₀.
    let sign = if (j[0] >= 0.0) == (x.sin() / x >= 0.0) { 1.0 } else { -1.0 };
    for l in 0..=order {
        j[l] *= sign * scale;
        j_over_x[l] = if l == 0 { 0.0 } else { j[l] / x };
    }
    BesselTable { j, j_over_x }
}
