//! Physical (SI) parameters and the dimensionless model derived from them.
//!
//! Internally every physics routine works with hbar = 1 and |omega_b| = 1, so
//! times are measured in units of 1/|omega_b| and frequencies as multiples of
//! |omega_b|. The bound-state energy omega_b is negative; only its magnitude is
//! stored and the sign is applied where it enters (`omega_k - omega_b = k^2 + 1`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

/// CODATA 2018 Newton constant, m^3 kg^-1 s^-2.
pub const NEWTON_G: f64 = 6.674_30e-11;
/// CODATA 2018 reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Coupling above which first-order results are flagged as unreliable.
pub const WEAK_COUPLING_LIMIT: f64 = 1e-2;

/// Minimum ratios d/L and d/sigma_y for the bilinear expansion of 1/|d + x - y|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleThresholds {
    pub d_over_width: f64,
    pub d_over_sigma_y: f64,
}

impl Default for ScaleThresholds {
    fn default() -> Self {
        Self {
            d_over_width: 1e3,
            d_over_sigma_y: 1e3,
        }
    }
}

fn default_g() -> f64 {
    NEWTON_G
}

fn default_hbar() -> f64 {
    HBAR
}

/// Experimental parameters in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicalConfig {
    /// Trapped particle mass, kg.
    pub m: f64,
    /// Oscillator mass, kg.
    #[serde(rename = "M")]
    pub big_m: f64,
    /// Separation between the particle and the oscillator, m.
    pub d: f64,
    /// Width of the 1/cosh^2 well, m.
    #[serde(rename = "L")]
    pub width: f64,
    /// Oscillator base angular frequency, rad/s.
    #[serde(rename = "Omega0")]
    pub omega0: f64,
    /// High-branch angular frequency, rad/s. May be filled in from a cavity.
    #[serde(rename = "Omega1", default)]
    pub omega1: Option<f64>,
    /// Coherent amplitude as `[re, im]`.
    pub alpha: Complex64,
    #[serde(rename = "G", default = "default_g")]
    pub newton_g: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
    #[serde(default)]
    pub thresholds: ScaleThresholds,
}

impl PhysicalConfig {
    /// |omega_b| = hbar / (2 m L^2), rad/s.
    pub fn omega_b_abs(&self) -> f64 {
        self.hbar / (2.0 * self.m * self.width * self.width)
    }

    /// Oscillator ground-state length (M Omega0 / hbar)^(-1/2), m.
    pub fn sigma_y(&self) -> f64 {
        (self.hbar / (self.big_m * self.omega0)).sqrt()
    }

    fn check_positive(&self) -> Result<()> {
        let fields: [(&'static str, f64); 7] = [
            ("m", self.m),
            ("M", self.big_m),
            ("d", self.d),
            ("L", self.width),
            ("Omega0", self.omega0),
            ("G", self.newton_g),
            ("hbar", self.hbar),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        if let Some(w1) = self.omega1 {
            if !(w1.is_finite() && w1 > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "Omega1",
                    value: w1,
                    reason: "must be finite and strictly positive",
                });
            }
        }
        if !(self.alpha.re.is_finite() && self.alpha.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: self.alpha.norm(),
                reason: "must be finite",
            });
        }
        Ok(())
    }
}

/// The dimensionless model every physics operation consumes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Model {
    /// |omega_b| in rad/s; 1.0 for models built directly in internal units.
    pub omega_b_abs: f64,
    /// Dimensionless gravitational coupling.
    pub g: f64,
    /// Oscillator length scale in metres, when the model came from SI inputs.
    pub sigma_y: Option<f64>,
    /// Omega0 / |omega_b|.
    pub omega0: f64,
    /// Omega1 / |omega_b|.
    pub omega1: f64,
    pub alpha: Complex64,
    /// Resonant wavenumber sqrt(Omega1 - 1).
    pub k_res: f64,
    /// Saturation time pi / k_res in units of 1/|omega_b|.
    pub t_sat: f64,
    /// omega_{k_res} = Omega1 - 1 in units of |omega_b|.
    pub omega_res: f64,
}

impl Model {
    /// Builds a model directly in internal units (|omega_b| = 1).
    pub fn dimensionless(g: f64, omega0: f64, omega1: f64, alpha: Complex64) -> Result<Self> {
        Self::from_parts(1.0, g, None, omega0, omega1, alpha)
    }

    fn from_parts(
        omega_b_abs: f64,
        g: f64,
        sigma_y: Option<f64>,
        omega0: f64,
        omega1: f64,
        alpha: Complex64,
    ) -> Result<Self> {
        if !(g.is_finite() && g >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "g",
                value: g,
                reason: "coupling must be finite and non-negative",
            });
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha.norm(),
                reason: "must be finite",
            });
        }
        if !(omega0.is_finite() && omega1.is_finite() && omega0 > 0.0 && omega0 < 1.0 && omega1 > 1.0) {
            return Err(Error::ResonanceOrdering {
                omega0: omega0 * omega_b_abs,
                omega_b: omega_b_abs,
                omega1: omega1 * omega_b_abs,
            });
        }
        if g > WEAK_COUPLING_LIMIT {
            log::warn!("g = {g:.3e} exceeds {WEAK_COUPLING_LIMIT}; first-order results are unreliable");
        }
        let omega_res = omega1 - 1.0;
        let k_res = omega_res.sqrt();
        Ok(Self {
            omega_b_abs,
            g,
            sigma_y,
            omega0,
            omega1,
            alpha,
            k_res,
            t_sat: PI / k_res,
            omega_res,
        })
    }

    /// Copy of the model with a different coupling.
    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::from_parts(self.omega_b_abs, g, self.sigma_y, self.omega0, self.omega1, self.alpha)
    }

    /// Copy of the model with a different coherent amplitude.
    pub fn with_alpha(&self, alpha: Complex64) -> Result<Self> {
        Self::from_parts(self.omega_b_abs, self.g, self.sigma_y, self.omega0, self.omega1, alpha)
    }

    /// Oscillator frequency of qubit branch 0 or 1 (internal units).
    pub fn branch_frequency(&self, branch: usize) -> f64 {
        if branch == 0 {
            self.omega0
        } else {
            self.omega1
        }
    }

    /// Converts seconds to internal time.
    pub fn to_internal_time(&self, t_si: f64) -> f64 {
        self.omega_b_abs * t_si
    }

    /// Converts internal time to seconds.
    pub fn to_si_time(&self, tau: f64) -> f64 {
        tau / self.omega_b_abs
    }
}

/// Derives the dimensionless model from SI parameters.
pub fn derive_model(cfg: &PhysicalConfig) -> Result<Model> {
    cfg.check_positive()?;
    let omega1 = cfg.omega1.ok_or(Error::MissingParameter("Omega1"))?;
    let omega_b = cfg.omega_b_abs();
    if !(cfg.omega0 < omega_b && omega_b < omega1) {
        return Err(Error::ResonanceOrdering {
            omega0: cfg.omega0,
            omega_b,
            omega1,
        });
    }
    let sigma_y = cfg.sigma_y();
    let d_over_l = cfg.d / cfg.width;
    if d_over_l < cfg.thresholds.d_over_width {
        return Err(Error::ScaleSeparation {
            what: "d/L",
            ratio: d_over_l,
            required: cfg.thresholds.d_over_width,
        });
    }
    let d_over_s = cfg.d / sigma_y;
    if d_over_s < cfg.thresholds.d_over_sigma_y {
        return Err(Error::ScaleSeparation {
            what: "d/sigma_y",
            ratio: d_over_s,
            required: cfg.thresholds.d_over_sigma_y,
        });
    }
    let e_b = cfg.hbar * omega_b;
    let g = 2.0 * cfg.newton_g * cfg.m * cfg.big_m * cfg.width * sigma_y / (e_b * cfg.d.powi(3));
    Model::from_parts(
        omega_b,
        g,
        Some(sigma_y),
        cfg.omega0 / omega_b,
        omega1 / omega_b,
        cfg.alpha,
    )
}

/// tau = |omega_b| t for SI time `t_si`.
pub fn dimensionless_time(cfg: &PhysicalConfig, t_si: f64) -> f64 {
    cfg.omega_b_abs() * t_si
}

/// Inverse of [`dimensionless_time`].
pub fn si_time(cfg: &PhysicalConfig, tau: f64) -> f64 {
    tau / cfg.omega_b_abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Picks m, L so that |omega_b| = `omega_b` and returns a config that
    /// satisfies every invariant.
    pub(crate) fn lab_config(omega_b: f64, omega1_rel: f64) -> PhysicalConfig {
        let m = 1e-20;
        let width = (HBAR / (2.0 * m * omega_b)).sqrt();
        PhysicalConfig {
            m,
            big_m: 1e-3,
            d: 1e-1,
            width,
            omega0: 0.8 * omega_b,
            omega1: Some(omega1_rel * omega_b),
            alpha: Complex64::new(0.5, 0.0),
            newton_g: NEWTON_G,
            hbar: HBAR,
            thresholds: ScaleThresholds::default(),
        }
    }

    #[test]
    fn resonant_wavenumber_examples() {
        let m = derive_model(&lab_config(1.0, 1.01)).unwrap();
        assert_relative_eq!(m.k_res, 0.1, max_relative = 1e-12);
        let m = derive_model(&lab_config(1.0, 1.5)).unwrap();
        assert_relative_eq!(m.k_res, 0.5f64.sqrt(), max_relative = 1e-12);
        assert_relative_eq!(m.t_sat * m.k_res, PI, max_relative = 1e-15);
    }

    #[test]
    fn twelve_hour_run_sets_tiny_wavenumber() {
        let tau1 = 12.0 * 3600.0;
        let k_res = PI / (1.0 * tau1);
        assert!((k_res - 7.3e-5).abs() / 7.3e-5 < 0.01);
    }

    #[test]
    fn ordering_violation_is_rejected() {
        let mut cfg = lab_config(1.0, 0.9);
        cfg.omega0 = 0.9;
        assert!(matches!(derive_model(&cfg), Err(Error::ResonanceOrdering { .. })));
        assert!(matches!(
            Model::dimensionless(1e-3, 0.9, 0.9, Complex64::new(0.5, 0.0)),
            Err(Error::ResonanceOrdering { .. })
        ));
    }

    #[test]
    fn scale_separation_is_enforced() {
        let mut cfg = lab_config(1.0, 1.2);
        cfg.d = cfg.width * 10.0;
        assert!(matches!(
            derive_model(&cfg),
            Err(Error::ScaleSeparation { what: "d/L", .. })
        ));
        let mut cfg = lab_config(1.0, 1.2);
        cfg.big_m = 1e-40;
        cfg.d = cfg.width * 1e4;
        assert!(matches!(
            derive_model(&cfg),
            Err(Error::ScaleSeparation { what: "d/sigma_y", .. })
        ));
    }

    #[test]
    fn missing_high_frequency_is_reported() {
        let mut cfg = lab_config(1.0, 1.2);
        cfg.omega1 = None;
        assert_eq!(derive_model(&cfg), Err(Error::MissingParameter("Omega1")));
    }

    #[test]
    fn coupling_matches_definition() {
        let cfg = lab_config(2.0, 1.2);
        let model = derive_model(&cfg).unwrap();
        let sigma = (HBAR / (cfg.big_m * cfg.omega0)).sqrt();
        let expect = 2.0 * NEWTON_G * cfg.m * cfg.big_m * cfg.width * sigma / (HBAR * 2.0 * cfg.d.powi(3));
        assert_relative_eq!(model.g, expect, max_relative = 1e-14);
        assert_relative_eq!(model.omega_b_abs, 2.0, max_relative = 1e-14);
        assert_relative_eq!(model.omega_res, 0.2, max_relative = 1e-12);
    }

    #[test]
    fn time_conversion_examples() {
        let cfg = lab_config(1.0, 1.2);
        assert_relative_eq!(dimensionless_time(&cfg, 31.4159), 31.4159, max_relative = 1e-14);
        assert_eq!(si_time(&cfg, 0.0), 0.0);
        let cfg2 = lab_config(2.0, 1.2);
        assert_relative_eq!(dimensionless_time(&cfg2, 1.0), 2.0, max_relative = 1e-14);
        let t = 123.456;
        assert_relative_eq!(si_time(&cfg2, dimensionless_time(&cfg2, t)), t, max_relative = 1e-15);
    }

    #[test]
    fn mass_rescaling_leaves_dimensionless_model_unchanged() {
        let base = lab_config(1.0, 1.3);
        let m0 = derive_model(&base).unwrap();
        for lambda in [0.5, 3.0, 17.0] {
            let mut cfg = base.clone();
            cfg.m *= lambda;
            cfg.big_m *= lambda;
            // |omega_b| fixed: L ~ m^-1/2; g fixed: d^3 ~ m M L sigma_y ~ lambda.
            cfg.width /= lambda.sqrt();
            cfg.d *= lambda.cbrt();
            let m1 = derive_model(&cfg).unwrap();
            assert_relative_eq!(m1.g, m0.g, max_relative = 1e-12);
            assert_relative_eq!(m1.omega_b_abs, m0.omega_b_abs, max_relative = 1e-12);
            assert_relative_eq!(m1.omega0, m0.omega0, max_relative = 1e-12);
            assert_relative_eq!(m1.omega1, m0.omega1, max_relative = 1e-12);
            assert_relative_eq!(m1.k_res, m0.k_res, max_relative = 1e-12);
            assert_relative_eq!(m1.t_sat, m0.t_sat, max_relative = 1e-12);
            assert_eq!(m1.alpha, m0.alpha);
        }
    }

    #[test]
    fn resonant_wavenumber_vanishes_monotonically_at_threshold() {
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-6] {
            let m = Model::dimensionless(0.0, 0.5, 1.0 + eps, Complex64::new(0.5, 0.0)).unwrap();
            assert!(m.k_res < last);
            last = m.k_res;
        }
        assert!(last < 1.1e-3);
    }
}
