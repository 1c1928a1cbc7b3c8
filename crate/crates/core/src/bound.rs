//! Dual upper bound on the spectral efficiency of a lossy radiator.
//!
//! In the radiation-mode basis both the radiated and the dissipated power
//! constraints are diagonal, and for a multiplier `ν` on the efficiency
//! constraint the problem collapses to parallel channels with gains
//!
//! * radiated normalization: `σ² = (ν + η⁻¹ − 1)ρ / (1 + νρ)`
//! * dissipated normalization: `σ² = (ν + 1 − η)ρ / (1 + ν(1 + ρ))`
//!
//! Water-filling over these gains gives `C(ν)`, an upper bound for every
//! admissible `ν`. The bound reported is the minimum over a search in `ν`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::config::RANK_CUTOFF;
use crate::linalg::{hermitian_defect, CMatrix};
use crate::modes::{ModeKind, ModeSpectrum};

#[derive(Debug, Error, PartialEq)]
pub enum BoundError {
    #[error("radiation efficiency must lie in (0, 1], got {0}")]
    BadEfficiency(f64),
    #[error("SNR must be positive and finite, got {0}")]
    BadSnr(f64),
    #[error("port limit must be at least 1")]
    BadPorts,
    #[error("search tolerance must lie in (0, 1), got {0}")]
    BadTolerance(f64),
    #[error("eigenvalues must be finite and non-negative, got {0}")]
    BadRho(f64),
    #[error("no radiating mode: all eigenvalues are zero")]
    NoRadiation,
    #[error("empty gain list")]
    EmptyGains,
    #[error("channel gains must be finite and some must be positive")]
    BadGains,
    #[error("nu = {nu} is outside the admissible interval (nu0 = {nu0}, inf]")]
    NuOutOfDomain { nu: f64, nu0: f64 },
    #[error("unknown normalization '{0}' (expected radiated or dissipated)")]
    UnknownNormalization(String),
    #[error("operator shapes disagree: {0}")]
    Shape(String),
    #[error("covariance violates a constraint: {0}")]
    Constraint(String),
}

/// Which power the unit-power constraint refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// Unit radiated power; dissipated power at most `η⁻¹ − 1`.
    Radiated,
    /// Unit total (radiated plus ohmic) power; ohmic part at most `1 − η`.
    Dissipated,
}

impl Normalization {
    pub fn name(self) -> &'static str {
        match self {
            Normalization::Radiated => "radiated",
            Normalization::Dissipated => "dissipated",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Normalization {
    type Err = BoundError;
    fn from_str(s: &str) -> Result<Self, BoundError> {
        match s.to_ascii_lowercase().as_str() {
            "radiated" => Ok(Normalization::Radiated),
            "dissipated" => Ok(Normalization::Dissipated),
            _ => Err(BoundError::UnknownNormalization(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundConfig {
    pub normalization: Normalization,
    /// Radiation efficiency in (0, 1].
    pub eta: f64,
    /// SNR at unit power.
    pub gamma: f64,
    /// Keep only the `ports` strongest modes.
    pub ports: Option<usize>,
    /// Relative tolerance of the golden-section refinement in `ν`.
    pub nu_tol: f64,
}

impl BoundConfig {
    pub fn new(normalization: Normalization, eta: f64, gamma: f64) -> Self {
        Self { normalization, eta, gamma, ports: None, nu_tol: 1e-6 }
    }

    pub fn with_ports(mut self, ports: Option<usize>) -> Self {
        self.ports = ports;
        self
    }

    pub fn validate(&self) -> Result<(), BoundError> {
        check_eta(self.eta)?;
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(BoundError::BadSnr(self.gamma));
        }
        if self.ports == Some(0) {
            return Err(BoundError::BadPorts);
        }
        if !(self.nu_tol > 0.0 && self.nu_tol < 1.0) {
            return Err(BoundError::BadTolerance(self.nu_tol));
        }
        Ok(())
    }
}

fn check_eta(eta: f64) -> Result<(), BoundError> {
    if eta > 0.0 && eta <= 1.0 {
        Ok(())
    } else {
        Err(BoundError::BadEfficiency(eta))
    }
}

/// Lower end of the admissible multipliers: the gains are positive and
/// finite for every `ν > nu0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NuInterval {
    pub nu0: f64,
    pub normalization: Normalization,
}

impl NuInterval {
    pub fn contains(&self, nu: f64) -> bool {
        nu > self.nu0 && !nu.is_nan()
    }
}

pub fn nu_lower_limit(rho_max: f64, eta: f64, normalization: Normalization) -> Result<NuInterval, BoundError> {
    check_eta(eta)?;
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(BoundError::BadRho(rho_max));
    }
    let nu0 = match normalization {
        Normalization::Radiated => (-1.0 / rho_max).max(1.0 - 1.0 / eta),
        Normalization::Dissipated => (-1.0 / (1.0 + rho_max)).max(eta - 1.0),
    };
    Ok(NuInterval { nu0, normalization })
}

fn gain(rho: f64, nu: f64, eta: f64, normalization: Normalization) -> f64 {
    if rho <= 0.0 {
        return 0.0;
    }
    match (normalization, nu.is_infinite()) {
        (Normalization::Radiated, true) => 1.0,
        (Normalization::Dissipated, true) => rho / (1.0 + rho),
        (Normalization::Radiated, false) => (nu + 1.0 / eta - 1.0) * rho / (1.0 + nu * rho),
        (Normalization::Dissipated, false) => (nu + 1.0 - eta) * rho / (1.0 + nu * (1.0 + rho)),
    }
}

/// Channel gains `σ_n²(ν)`. `ν = f64::INFINITY` selects the analytic limit.
pub fn channel_gains(rho: &[f64], nu: f64, eta: f64, normalization: Normalization) -> Result<Vec<f64>, BoundError> {
    if let Some(&bad) = rho.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(BoundError::BadRho(bad));
    }
    let rho_max = rho.iter().cloned().fold(0.0, f64::max);
    if rho_max == 0.0 {
        return Err(BoundError::NoRadiation);
    }
    let interval = nu_lower_limit(rho_max, eta, normalization)?;
    if !(interval.contains(nu) && nu != f64::NEG_INFINITY) {
        return Err(BoundError::NuOutOfDomain { nu, nu0: interval.nu0 });
    }
    Ok(rho.iter().map(|&r| gain(r, nu, eta, normalization)).collect())
}

/// Power allocation over parallel channels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Allocation {
    /// Power per channel, in input order; sums to one.
    pub powers: Vec<f64>,
    /// Common level `P_n + 1/(γσ_n²)` of the active channels.
    pub water_level: f64,
    pub active: Vec<bool>,
    /// Spectral efficiency in bits/s/Hz.
    pub capacity: f64,
}

impl Allocation {
    pub fn active_count(&self) -> usize {
        self.active.iter().filter(|a| **a).count()
    }
}

/// Exact water-filling of unit power over channels with gains `σ²` at SNR
/// `γ`. Channels with zero gain receive no power.
pub fn water_fill(gains: &[f64], gamma: f64) -> Result<Allocation, BoundError> {
    if gains.is_empty() {
        return Err(BoundError::EmptyGains);
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(BoundError::BadSnr(gamma));
    }
    if gains.iter().any(|g| !(g.is_finite() && *g >= 0.0)) || gains.iter().all(|g| *g == 0.0) {
        return Err(BoundError::BadGains);
    }
    let mut order: Vec<(usize, f64)> =
        gains.iter().enumerate().filter(|(_, g)| **g > 0.0).map(|(i, g)| (i, 1.0 / (gamma * g))).collect();
    order.sort_by(|a, b| a.1.total_cmp(&b.1));

    let mut sum = 0.0;
    let mut chosen = (1, 1.0 + order[0].1);
    for (m, &(_, g)) in order.iter().enumerate() {
        sum += g;
        let mu = (1.0 + sum) / (m + 1) as f64;
        if mu > g {
            chosen = (m + 1, mu);
        }
    }
    let (active_count, mu) = chosen;
    let mut powers = vec![0.0; gains.len()];
    let mut active = vec![false; gains.len()];
    let mut capacity = 0.0;
    for &(i, g) in &order[..active_count] {
        powers[i] = mu - g;
        active[i] = true;
        capacity += (mu / g).log2();
    }
    Ok(Allocation { powers, water_level: mu, active, capacity })
}

/// `Σ log₂(1 + γσ_n²/N)`: unit power split equally over the `N` channels.
pub fn equal_power_capacity(gains: &[f64], gamma: f64) -> Result<f64, BoundError> {
    if gains.is_empty() {
        return Err(BoundError::EmptyGains);
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(BoundError::BadSnr(gamma));
    }
    let n = gains.len() as f64;
    Ok(gains.iter().map(|g| (1.0 + gamma * g / n).log2()).sum())
}

/// Equal power over `n` ideal (unit-gain) channels: `n log₂(1 + γ/n)`.
pub fn ideal_channels_capacity(n: usize, gamma: f64) -> Result<f64, BoundError> {
    equal_power_capacity(&vec![1.0; n], gamma)
}

/// Eigenvalues entering the bound: sorted descending, cut to the port limit,
/// with numerically zero values removed.
pub fn retained_modes(rho: &[f64], ports: Option<usize>) -> Result<Vec<f64>, BoundError> {
    if rho.is_empty() {
        return Err(BoundError::EmptyGains);
    }
    let rho_max = rho.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(rho_max > 0.0 && rho_max.is_finite()) {
        return Err(if rho_max.is_nan() || rho_max.is_infinite() {
            BoundError::BadRho(rho_max)
        } else {
            BoundError::NoRadiation
        });
    }
    let cutoff = RANK_CUTOFF * rho_max;
    if let Some(&bad) = rho.iter().find(|r| r.is_nan() || **r < -cutoff) {
        return Err(BoundError::BadRho(bad));
    }
    let mut sorted: Vec<f64> = rho.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    if let Some(n) = ports {
        if n == 0 {
            return Err(BoundError::BadPorts);
        }
        sorted.truncate(n);
    }
    sorted.retain(|r| *r > cutoff);
    Ok(sorted)
}

/// Water-filling at a single multiplier `ν` over the retained modes.
pub fn capacity_at(rho: &[f64], nu: f64, config: &BoundConfig) -> Result<Allocation, BoundError> {
    config.validate()?;
    let kept = retained_modes(rho, config.ports)?;
    let gains = channel_gains(&kept, nu, config.eta, config.normalization)?;
    water_fill(&gains, config.gamma)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    /// Minimized bound in bits/s/Hz.
    pub c_star: f64,
    /// Minimizing multiplier; `f64::INFINITY` for the analytic endpoint.
    pub nu_star: f64,
    pub allocation: Allocation,
    pub interval: NuInterval,
    /// Retained eigenvalues, descending; `allocation` is indexed alike.
    pub rho: Vec<f64>,
    pub eta: f64,
    pub gamma: f64,
    pub normalization: Normalization,
    pub ports: Option<usize>,
    /// Set when no current reaches the requested efficiency, i.e. the
    /// strongest mode has `ρ < η/(1 − η)`; the bound then tends to zero.
    pub infeasible: bool,
    pub warnings: Vec<String>,
    /// Every evaluated `(ν, C(ν))`.
    pub trace: Vec<(f64, f64)>,
}

impl BoundResult {
    pub fn modes_used(&self) -> usize {
        self.rho.len()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "C_star": self.c_star,
            "nu_star": nu_value(self.nu_star),
            "nu0": self.interval.nu0,
            "eta": self.eta,
            "gamma": self.gamma,
            "normalization": self.normalization.name(),
            "ports": self.ports,
            "modes_used": self.modes_used(),
            "active_modes": self.allocation.active_count(),
            "water_level": self.allocation.water_level,
            "P_n": self.allocation.powers,
            "infeasible": self.infeasible,
            "warnings": self.warnings,
        })
    }
}

fn nu_value(nu: f64) -> Value {
    if nu.is_infinite() {
        Value::String("inf".into())
    } else {
        json!(nu)
    }
}

/// Formats `ν` for text output, writing `inf` for the analytic endpoint.
pub fn format_nu(nu: f64) -> String {
    if nu.is_infinite() {
        "inf".into()
    } else {
        format!("{nu:e}")
    }
}

const GRID_POINTS: usize = 64;
const GRID_SPAN: f64 = 1e6;

/// Minimizes `C(ν)` over `(ν₀, ∞]`: a log-spaced grid of offsets from `ν₀`
/// plus the analytic endpoint, then golden-section refinement around the
/// best grid point. The result is the smallest value evaluated.
pub fn dual_bound(rho: &[f64], config: &BoundConfig) -> Result<BoundResult, BoundError> {
    config.validate()?;
    let kept = retained_modes(rho, config.ports)?;
    let (eta, norm) = (config.eta, config.normalization);
    let rho_max = kept[0];
    let interval = nu_lower_limit(rho_max, eta, norm)?;
    let base = BoundResult {
        c_star: f64::INFINITY,
        nu_star: f64::INFINITY,
        allocation: Allocation { powers: vec![], water_level: 0.0, active: vec![], capacity: 0.0 },
        interval,
        rho: kept.clone(),
        eta,
        gamma: config.gamma,
        normalization: norm,
        ports: config.ports,
        infeasible: rho_max * (1.0 - eta) < eta,
        warnings: vec![],
        trace: vec![],
    };

    if eta == 1.0 && norm == Normalization::Radiated {
        let allocation = water_fill(&vec![1.0; kept.len()], config.gamma)?;
        return Ok(BoundResult {
            c_star: allocation.capacity,
            trace: vec![(f64::INFINITY, allocation.capacity)],
            allocation,
            infeasible: false,
            warnings: vec![format!(
                "eta = 1 with radiated normalization allows no loss; using {} unit-gain channels",
                kept.len()
            )],
            ..base
        });
    }

    let nu0 = interval.nu0;
    let eval =
        |nu: f64| -> Result<Allocation, BoundError> { water_fill(&channel_gains(&kept, nu, eta, norm)?, config.gamma) };
    let mut trace: Vec<(f64, f64)> = Vec::with_capacity(GRID_POINTS + 80);
    let mut best: Option<(f64, Allocation)> = None;
    let mut record = |nu: f64, trace: &mut Vec<(f64, f64)>| -> Result<f64, BoundError> {
        let a = eval(nu)?;
        let c = a.capacity;
        trace.push((nu, c));
        if best.as_ref().is_none_or(|(_, b)| c < b.capacity) {
            best = Some((nu, a));
        }
        Ok(c)
    };

    let eps = 1e-9 * (1.0 + nu0.abs());
    let (s0, s1) = (eps.ln(), GRID_SPAN.ln());
    let grid: Vec<f64> = (0..GRID_POINTS).map(|i| s0 + (s1 - s0) * i as f64 / (GRID_POINTS - 1) as f64).collect();
    let mut values = Vec::with_capacity(GRID_POINTS + 1);
    for &s in &grid {
        values.push(record(nu0 + s.exp(), &mut trace)?);
    }
    values.push(record(f64::INFINITY, &mut trace)?);

    let i_min = (0..values.len()).min_by(|&a, &b| values[a].total_cmp(&values[b])).unwrap_or(0);
    let tol = config.nu_tol;
    if i_min == GRID_POINTS {
        // Refine between the last grid point and the endpoint in t = 1/offset.
        let t_hi = (-grid[GRID_POINTS - 1]).exp();
        golden(0.0, t_hi, tol * t_hi, |t| {
            if t == 0.0 {
                record(f64::INFINITY, &mut trace)
            } else {
                record(nu0 + 1.0 / t, &mut trace)
            }
        })?;
    } else {
        let lo = grid[i_min.saturating_sub(1)];
        let hi = grid[(i_min + 1).min(GRID_POINTS - 1)];
        golden(lo, hi, tol, |s| record(nu0 + s.exp(), &mut trace))?;
    }

    let (nu_star, allocation) = best.expect("at least one evaluation");
    let mut warnings = vec![];
    if base.infeasible {
        warnings.push(format!(
            "strongest mode rho = {rho_max:e} is below eta/(1 - eta) = {:e}; the efficiency constraint cannot be met",
            eta / (1.0 - eta)
        ));
    }
    Ok(BoundResult { c_star: allocation.capacity, nu_star, allocation, trace, warnings, ..base })
}

fn golden(
    mut a: f64,
    mut b: f64,
    tol: f64,
    mut f: impl FnMut(f64) -> Result<f64, BoundError>,
) -> Result<(), BoundError> {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let mut fc = f(c)?;
    let mut fd = f(d)?;
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d)?;
        }
    }
    Ok(())
}

/// Which configuration field a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Eta,
    Gamma,
}

impl FromStr for SweepParam {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "eta" => Ok(SweepParam::Eta),
            "gamma" => Ok(SweepParam::Gamma),
            _ => Err(format!("unknown sweep parameter '{s}' (expected eta or gamma)")),
        }
    }
}

/// Bounds for each value of `param`, in input order.
pub fn sweep(
    rho: &[f64],
    base: &BoundConfig,
    param: SweepParam,
    values: &[f64],
) -> Result<Vec<BoundResult>, BoundError> {
    values
        .par_iter()
        .map(|&v| {
            let mut config = *base;
            match param {
                SweepParam::Eta => config.eta = v,
                SweepParam::Gamma => config.gamma = v,
            }
            dual_bound(rho, &config)
        })
        .collect()
}

pub fn sweep_csv(results: &[BoundResult]) -> String {
    let mut out = String::from("eta,gamma,normalization,ports,nu_star,C_star,active_modes,infeasible\n");
    for r in results {
        out += &format!(
            "{:e},{:e},{},{},{},{:e},{},{}\n",
            r.eta,
            r.gamma,
            r.normalization,
            r.ports.map(|p| p.to_string()).unwrap_or_default(),
            format_nu(r.nu_star),
            r.c_star,
            r.allocation.active_count(),
            r.infeasible
        );
    }
    out
}

fn mode_power_scale(rho: f64, nu: f64, eta: f64, normalization: Normalization) -> f64 {
    match (normalization, nu.is_infinite()) {
        (Normalization::Radiated, true) => 1.0 / rho,
        (Normalization::Dissipated, true) => 1.0 / (1.0 + rho),
        (Normalization::Radiated, false) => (nu + 1.0 / eta - 1.0) / (1.0 + nu * rho),
        (Normalization::Dissipated, false) => (nu + 1.0 - eta) / (1.0 + nu * (1.0 + rho)),
    }
}

/// Power `q_n` fed to each retained radiation mode (currents normalized to
/// unit ohmic loss) by the dual-optimal allocation. For a finite minimizer
/// the multiplier is first polished until the normalization holds exactly;
/// the powers are then rescaled onto it.
pub fn optimal_mode_powers(result: &BoundResult) -> Result<Vec<f64>, BoundError> {
    let (eta, norm) = (result.eta, result.normalization);
    let powers_at = |nu: f64| -> Result<Vec<f64>, BoundError> {
        let gains = channel_gains(&result.rho, nu, eta, norm)?;
        let a = water_fill(&gains, result.gamma)?;
        Ok(result.rho.iter().zip(&a.powers).map(|(&r, &p)| p * mode_power_scale(r, nu, eta, norm)).collect())
    };
    let unit_power = |q: &[f64]| -> f64 {
        result
            .rho
            .iter()
            .zip(q)
            .map(|(&r, &q)| match norm {
                Normalization::Radiated => r * q,
                Normalization::Dissipated => (1.0 + r) * q,
            })
            .sum()
    };
    let residual = |nu: f64| -> Result<f64, BoundError> { Ok(unit_power(&powers_at(nu)?) - 1.0) };

    let mut nu = result.nu_star;
    if nu.is_finite() && !(result.eta == 1.0 && norm == Normalization::Radiated) {
        let below = result.trace.iter().map(|t| t.0).filter(|v| *v < nu).fold(result.interval.nu0, f64::max);
        let above = result.trace.iter().map(|t| t.0).filter(|v| *v > nu && v.is_finite()).fold(f64::INFINITY, f64::min);
        if below > result.interval.nu0 && above.is_finite() {
            let (mut lo, mut hi) = (below, above);
            let (rlo, rhi) = (residual(lo)?, residual(hi)?);
            if rlo.signum() != rhi.signum() {
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if residual(mid)?.signum() == rlo.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                nu = 0.5 * (lo + hi);
            }
        }
    }
    let q = if result.eta == 1.0 && norm == Normalization::Radiated {
        result.allocation.powers.iter().zip(&result.rho).map(|(p, r)| p / r).collect()
    } else {
        powers_at(nu)?
    };
    let total = unit_power(&q);
    Ok(q.into_iter().map(|x| x / total).collect())
}

/// Covariance `Σ q_n I_n I_nᴴ` built from the dual-optimal mode powers and
/// the radiation-mode currents of `spectrum`.
pub fn optimal_covariance(result: &BoundResult, spectrum: &ModeSpectrum) -> Result<CMatrix, BoundError> {
    if spectrum.kind != ModeKind::Radiation {
        return Err(BoundError::Shape("covariance reconstruction needs radiation modes".into()));
    }
    let m = result.modes_used();
    if spectrum.len() < m || spectrum.rho[..m].iter().zip(&result.rho).any(|(a, b)| (a - b).abs() > 1e-12 * b.abs()) {
        return Err(BoundError::Shape("spectrum does not match the retained eigenvalues".into()));
    }
    let q = optimal_mode_powers(result)?;
    let n = spectrum.currents.nrows();
    let mut p = CMatrix::zeros(n, n);
    for (i, &qi) in q.iter().enumerate() {
        let col = spectrum.currents.column(i);
        p += col * col.adjoint() * Complex64::new(qi, 0.0);
    }
    Ok(p)
}

/// Constraint values of a covariance `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovariancePowers {
    /// `Tr(S P Sᴴ)`.
    pub radiated: f64,
    /// `Tr(R_Ω P)`.
    pub dissipated: f64,
}

pub fn covariance_powers(p: &CMatrix, s: &CMatrix, r_omega: &DMatrix<f64>) -> Result<CovariancePowers, BoundError> {
    let n = p.nrows();
    if p.ncols() != n || s.ncols() != n || r_omega.shape() != (n, n) {
        return Err(BoundError::Shape(format!(
            "P {}x{}, S {}x{}, R_omega {}x{}",
            p.nrows(),
            p.ncols(),
            s.nrows(),
            s.ncols(),
            r_omega.nrows(),
            r_omega.ncols()
        )));
    }
    let sps = s * p * s.adjoint();
    let radiated = sps.trace().re;
    let dissipated = r_omega.iter().zip(p.transpose().iter()).map(|(r, q)| r * q.re).sum();
    Ok(CovariancePowers { radiated, dissipated })
}

const CONSTRAINT_TOL: f64 = 1e-8;

/// `log₂ det(1 + γ S P Sᴴ)` for a covariance satisfying the constraints of
/// `config`; infeasible covariances are rejected.
pub fn primal_capacity(
    p: &CMatrix,
    s: &CMatrix,
    r_omega: &DMatrix<f64>,
    config: &BoundConfig,
) -> Result<f64, BoundError> {
    config.validate()?;
    let pw = covariance_powers(p, s, r_omega)?;
    let scale = p.trace().re.abs().max(f64::MIN_POSITIVE);
    if hermitian_defect(p) > CONSTRAINT_TOL {
        return Err(BoundError::Constraint("P is not Hermitian".into()));
    }
    let herm = (p + p.adjoint()) * Complex64::new(0.5, 0.0);
    let smallest = herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    if smallest < -CONSTRAINT_TOL * scale {
        return Err(BoundError::Constraint(format!("P has a negative eigenvalue {smallest:e}")));
    }
    let eta = config.eta;
    let (unit, budget, name) = match config.normalization {
        Normalization::Radiated => (pw.radiated, 1.0 / eta - 1.0, "radiated"),
        Normalization::Dissipated => (pw.radiated + pw.dissipated, 1.0 - eta, "total"),
    };
    if (unit - 1.0).abs() > CONSTRAINT_TOL {
        return Err(BoundError::Constraint(format!("{name} power is {unit}, expected 1")));
    }
    if pw.dissipated > budget + CONSTRAINT_TOL {
        return Err(BoundError::Constraint(format!("ohmic loss {} exceeds the budget {budget}", pw.dissipated)));
    }
    let m = s.nrows();
    let mut g = s * &herm * s.adjoint() * Complex64::new(config.gamma, 0.0);
    for i in 0..m {
        g[(i, i)] += Complex64::new(1.0, 0.0);
    }
    let g = (&g + g.adjoint()) * Complex64::new(0.5, 0.0);
    let l = g.cholesky().ok_or_else(|| BoundError::Constraint("I + γSPSᴴ is not positive definite".into()))?;
    Ok(2.0 * l.l_dirty().diagonal().iter().take(m).map(|d| d.re.ln()).sum::<f64>() / std::f64::consts::LN_2)
}
