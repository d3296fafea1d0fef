//! Excitation probability, interference visibility, negativity and the
//! multi-run feasibility estimate.

use nalgebra::{Matrix4, SymmetricEigen, Vector4};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::eigen::{overlap_j_abs2, J_ABS2_INTEGRAL};
use crate::error::{Error, Result};
use crate::fock::coherent_overlap;
use crate::kgrid::KGrid;
use crate::model::{Model, NEWTON_G};
use crate::perturbation::evolve;

/// Short-time constant from a Gaussian approximation of the `|J_k|^2` peak.
pub const GAUSSIAN_SADDLE_CONSTANT: f64 = 1.495_177_565_605_240_2;

/// `(sin(theta t / 2) / theta)^2`, equal to `t^2 / 4` at `theta = 0`.
pub fn sinc_kernel(theta: f64, t: f64) -> f64 {
    let x = 0.5 * theta * t;
    let s = if x.abs() < 1e-8 { 1.0 - x * x / 6.0 } else { x.sin() / x };
    0.25 * t * t * s * s
}

/// Energy-conservation kernel `Delta_k(t)` with `omega_k - omega_res = k^2 - k_res^2`.
pub fn delta_kernel(k: f64, t: f64, model: &Model) -> f64 {
    sinc_kernel(k * k - model.k_res * model.k_res, t)
}

/// Evaluation route for the excitation probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PexMethod {
    /// Quadrature of `|J_k|^2 Delta_k(t)` on a resonance-refined grid.
    Numeric,
    /// Late-time linear law with `|J_{k_res}|^2 = pi / 4`.
    GoldenRule,
    /// Early-time saddle around k = 0 with the exact weight `∫|J_k|^2 dk`.
    SaddleShort,
    /// Late-time delta-function limit with the exact `|J_{k_res}|^2`.
    SaddleLong,
}

impl PexMethod {
    pub const ALL: [PexMethod; 4] = [
        PexMethod::Numeric,
        PexMethod::GoldenRule,
        PexMethod::SaddleShort,
        PexMethod::SaddleLong,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PexMethod::Numeric => "numeric",
            PexMethod::GoldenRule => "golden_rule",
            PexMethod::SaddleShort => "saddle_short",
            PexMethod::SaddleLong => "saddle_long",
        }
    }
}

/// Position of `t` relative to the saturation time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `t <= 0.3 t_sat`.
    Quadratic,
    Crossover,
    /// `t >= 3 t_sat`.
    Linear,
}

impl Regime {
    pub fn classify(t: f64, t_sat: f64) -> Self {
        if t <= 0.3 * t_sat {
            Regime::Quadratic
        } else if t >= 3.0 * t_sat {
            Regime::Linear
        } else {
            Regime::Crossover
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PexResult {
    pub t: f64,
    pub value: f64,
    pub method: PexMethod,
    pub regime: Regime,
}

fn warn_if_overflow(value: f64, what: &str) {
    if value > 1.0 {
        log::warn!("{what} = {value:.3e} exceeds 1; first-order perturbation theory has broken down");
    }
}

/// `g^2 |alpha|^2 ∫|J_k|^2 Delta_k(t) dk` on a caller-supplied grid.
pub fn pex_numeric_on(model: &Model, t: f64, grid: &KGrid) -> Result<f64> {
    grid.check_resolves(model.k_res, t)?;
    let s = grid.integrate(|k| overlap_j_abs2(k) * delta_kernel(k, t, model));
    Ok(model.g * model.g * model.alpha.norm_sqr() * s)
}

/// Quadrature route on the default refined grid.
pub fn pex_numeric(model: &Model, t: f64) -> Result<f64> {
    pex_numeric_on(model, t, &KGrid::for_resonance(model.k_res, t))
}

fn coupling_weight(model: &Model) -> f64 {
    model.g * model.g * model.alpha.norm_sqr()
}

/// `pi^2 g^2 |alpha|^2 t / (8 k_res)`.
pub fn pex_golden_rule(model: &Model, t: f64) -> f64 {
    PI * PI * coupling_weight(model) * t / (8.0 * model.k_res)
}

/// `Delta_0(t) = sin^2(k_res^2 t / 2) / k_res^4`.
pub fn delta_zero(model: &Model, t: f64) -> f64 {
    sinc_kernel(-model.k_res * model.k_res, t)
}

/// Short-time saddle: the `|J_k|^2` peak integrated exactly against `Delta_0(t)`.
pub fn pex_saddle_short(model: &Model, t: f64) -> f64 {
    coupling_weight(model) * J_ABS2_INTEGRAL * delta_zero(model, t)
}

/// Short-time saddle with the Gaussian constant `sqrt(pi^3 / (4 + pi^2))`; comparison only.
pub fn pex_saddle_short_gaussian(model: &Model, t: f64) -> f64 {
    coupling_weight(model) * GAUSSIAN_SADDLE_CONSTANT * delta_zero(model, t)
}

/// Long-time saddle `(pi/2) g^2 |alpha|^2 t |J_{k_res}|^2 / k_res`.
pub fn pex_saddle_long(model: &Model, t: f64) -> f64 {
    0.5 * PI * coupling_weight(model) * t * overlap_j_abs2(model.k_res) / model.k_res
}

/// Long-time saddle with `|J_{k_res}|^2` set to 1; comparison only.
pub fn pex_saddle_long_unit_j(model: &Model, t: f64) -> f64 {
    0.5 * PI * coupling_weight(model) * t / model.k_res
}

/// Excitation probability by the requested route.
pub fn pex(model: &Model, t: f64, method: PexMethod) -> Result<PexResult> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "time must be finite and non-negative",
        });
    }
    let value = match method {
        PexMethod::Numeric => pex_numeric(model, t)?,
        PexMethod::GoldenRule => {
            if t < model.t_sat {
                log::warn!("golden rule used at t = {t:.3} below t_sat = {:.3}", model.t_sat);
            }
            pex_golden_rule(model, t)
        }
        PexMethod::SaddleShort => pex_saddle_short(model, t),
        PexMethod::SaddleLong => pex_saddle_long(model, t),
    };
    warn_if_overflow(value, "P_ex");
    Ok(PexResult {
        t,
        value,
        method,
        regime: Regime::classify(t, model.t_sat),
    })
}

/// Continuum probability of the full first-order state, off-resonant terms included.
pub fn pex_offres_included(model: &Model, t: f64) -> Result<f64> {
    let grid = KGrid::for_resonance(model.k_res, t);
    let state = evolve(model, t, true, &grid)?;
    let p = state.excited_norm_sqr()?;
    warn_if_overflow(p, "P_ex with off-resonant terms");
    Ok(p)
}

/// `|<alpha e^{-i Omega_1 t} | alpha e^{-i Omega_0 t}>|`.
pub fn coherent_visibility(model: &Model, t: f64) -> f64 {
    let a0 = model.alpha * Complex64::from_polar(1.0, -model.omega0 * t);
    let a1 = model.alpha * Complex64::from_polar(1.0, -model.omega1 * t);
    coherent_overlap(a1, a0).norm()
}

/// `exp(-2 |alpha|^2 sin^2((Omega_1 - Omega_0) t / 2))`.
pub fn visibility_closed_form(model: &Model, t: f64) -> f64 {
    let s = (0.5 * (model.omega1 - model.omega0) * t).sin();
    (-2.0 * model.alpha.norm_sqr() * s * s).exp()
}

/// Qubit interference visibility, optionally conditioned on detecting the particle.
pub fn visibility(model: &Model, t: f64, detected: bool, include_offres: bool) -> Result<f64> {
    if !detected {
        return Ok(coherent_visibility(model, t));
    }
    if !include_offres {
        // Only branch 1 carries an excited component.
        return Ok(0.0);
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let grid = KGrid::for_resonance(model.k_res, t);
    let state = evolve(model, t, true, &grid)?;
    let n0 = state.excited_overlap(0, 0)?.re;
    let n1 = state.excited_overlap(1, 1)?.re;
    if n0 + n1 == 0.0 {
        return Ok(0.0);
    }
    Ok(2.0 * state.excited_overlap(0, 1)?.norm() / (n0 + n1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativityMethod {
    PartialTranspose,
    ClosedForm,
    /// Schmidt spectrum of the full first-order state, off-resonant terms included.
    Schmidt,
}

/// Negativity of a normalised two-qubit pure state with amplitudes ordered
/// `(b e0, b e1, ex e0, ex e1)`, transposing the first factor.
pub fn partial_transpose_negativity(psi: [Complex64; 4]) -> f64 {
    let v = Vector4::from_column_slice(&psi);
    let norm = v.norm();
    if norm == 0.0 {
        return 0.0;
    }
    let v = v / Complex64::new(norm, 0.0);
    let rho: Matrix4<Complex64> = v * v.adjoint();
    let pt = Matrix4::from_fn(|r, c| {
        let (i, j) = (r / 2, r % 2);
        let (k, l) = (c / 2, c % 2);
        rho[(2 * k + j, 2 * i + l)]
    });
    let eig = SymmetricEigen::new(pt);
    eig.eigenvalues.iter().filter(|&&e| e < 0.0).map(|e| -e).sum()
}

/// Particle-versus-rest negativity.
pub fn negativity(model: &Model, t: f64, method: NegativityMethod) -> Result<f64> {
    if method == NegativityMethod::Schmidt {
        let grid = KGrid::for_resonance(model.k_res, t);
        return evolve(model, t, true, &grid)?.schmidt_negativity();
    }
    let p = pex_numeric(model, t)?;
    match method {
        NegativityMethod::Schmidt => unreachable!(),
        NegativityMethod::ClosedForm => Ok((0.5 * p).sqrt()),
        NegativityMethod::PartialTranspose => {
            let bound = Complex64::from_polar(std::f64::consts::FRAC_1_SQRT_2, t);
            let zero = Complex64::new(0.0, 0.0);
            // The normalised excited direction absorbs the phase of g alpha c_k.
            let ex = Complex64::new(p.sqrt(), 0.0);
            Ok(partial_transpose_negativity([bound, bound, zero, ex]))
        }
    }
}

/// Inputs of the multi-run estimate, in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeasibilityInput {
    /// m / M.
    pub mass_ratio: f64,
    /// M / d^3, kg m^-3.
    pub density: f64,
    pub alpha_abs: f64,
    /// |omega_b|, rad/s.
    pub omega_b: f64,
    /// Oscillator frequency; defaults to |omega_b|.
    #[serde(default)]
    pub omega0: Option<f64>,
    /// Duration of one run, s.
    pub tau1: f64,
    /// Total experiment time, s.
    pub t_tot: f64,
    /// Resonant wavenumber; defaults to the tuning `pi / (|omega_b| tau1)`.
    #[serde(default)]
    pub k_res: Option<f64>,
    #[serde(default = "default_g")]
    pub newton_g: f64,
}

fn default_g() -> f64 {
    NEWTON_G
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityReport {
    pub per_run: f64,
    /// t_tot / tau1, not rounded.
    pub n_runs: f64,
    /// `1 - (1 - per_run)^N`.
    pub total: f64,
    /// `N per_run`, the small-probability limit.
    pub total_linear: f64,
    pub k_res: f64,
    /// Saturation time in seconds.
    pub t_sat: f64,
    pub g: f64,
    /// True when tau1 < t_sat and the short-time law was used.
    pub short_run: bool,
    pub input: FeasibilityInput,
}

/// Total excitation probability accumulated over `t_tot / tau1` runs.
pub fn feasibility(input: &FeasibilityInput) -> Result<FeasibilityReport> {
    let checks: [(&'static str, f64); 5] = [
        ("mass_ratio", input.mass_ratio),
        ("density", input.density),
        ("omega_b", input.omega_b),
        ("tau1", input.tau1),
        ("G", input.newton_g),
    ];
    for (name, value) in checks {
        if !(value.is_finite() && value > 0.0) {
            return Err(Error::InvalidParameter {
                name,
                value,
                reason: "must be finite and strictly positive",
            });
        }
    }
    if !(input.t_tot.is_finite() && input.t_tot >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "t_tot",
            value: input.t_tot,
            reason: "must be finite and non-negative",
        });
    }
    let omega0 = input.omega0.unwrap_or(input.omega_b);
    let k_res = input.k_res.unwrap_or(PI / (input.omega_b * input.tau1));
    // g^2 = 2 G^2 (m/M) (M/d^3)^2 / (|omega_b|^3 Omega0) after eliminating L and sigma_y.
    let g2 = 2.0 * input.newton_g.powi(2) * input.mass_ratio * input.density.powi(2) / (input.omega_b.powi(3) * omega0);
    let g = g2.sqrt();
    let tau = input.omega_b * input.tau1;
    let t_sat = PI / (k_res * input.omega_b);
    let a2 = input.alpha_abs * input.alpha_abs;
    let short_run = input.tau1 < t_sat * (1.0 - 1e-9);
    let per_run = if short_run {
        log::warn!(
            "run duration {:.3e} s is shorter than t_sat = {t_sat:.3e} s; using the short-time law",
            input.tau1
        );
        g2 * a2 * J_ABS2_INTEGRAL * sinc_kernel(-k_res * k_res, tau)
    } else {
        PI * PI * g2 * a2 * tau / (8.0 * k_res)
    };
    let n_runs = input.t_tot / input.tau1;
    let total = if per_run >= 1.0 {
        1.0
    } else {
        -(n_runs * (-per_run).ln_1p()).exp_m1()
    };
    let total_linear = n_runs * per_run;
    warn_if_overflow(total_linear, "N P_ex");
    Ok(FeasibilityReport {
        per_run,
        n_runs,
        total,
        total_linear,
        k_res,
        t_sat,
        g,
        short_run,
        input: *input,
    })
}

/// Best single-run duration, `t_sat`, in internal units.
pub fn optimal_run_duration(model: &Model) -> f64 {
    model.t_sat
}

/// Best single-run duration in seconds.
pub fn optimal_run_duration_si(model: &Model) -> f64 {
    model.to_si_time(model.t_sat)
}
