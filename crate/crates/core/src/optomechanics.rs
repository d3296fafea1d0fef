//! Single-photon optomechanical preparation of the frequency-superposed
//! oscillator, and its subsequent first-order gravitational evolution.
//!
//! Branch 0 (no photon) keeps the bare frequency Omega_0. With the photon
//! present, radiation pressure stiffens the oscillator to Omega_1 and shifts
//! its equilibrium by lambda_0 in coherent-amplitude units.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fock::coherent_overlap;
use crate::kgrid::KGrid;
use crate::model::{Model, PhysicalConfig, HBAR};
use crate::perturbation::{evolve_branches, BranchDrive, EvolvedState};

/// Speed of light, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
/// Relative tolerance on the cavity mode number.
pub const MODE_TOLERANCE: f64 = 1e-6;

fn default_hbar() -> f64 {
    HBAR
}

/// Cavity and oscillator parameters, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CavityConfig {
    /// Cavity length, m.
    pub ell: f64,
    /// Photon angular frequency, rad/s.
    pub omega_c: f64,
    /// Mode number with `omega_c = pi c n / ell`; inferred when absent.
    #[serde(default)]
    pub mode: Option<u64>,
    /// Oscillator (mirror) mass, kg.
    #[serde(rename = "M")]
    pub big_m: f64,
    #[serde(rename = "Omega0")]
    pub omega0: f64,
    pub alpha: Complex64,
    /// Start of the preparation, s (not after 0).
    #[serde(default)]
    pub t_ini: f64,
    #[serde(default = "default_hbar")]
    pub hbar: f64,
}

impl CavityConfig {
    /// Oscillator ground-state length `sqrt(hbar / (M Omega_0))`.
    pub fn sigma_y(&self) -> f64 {
        (self.hbar / (self.big_m * self.omega0)).sqrt()
    }

    /// Checks positivity, `t_ini <= 0` and the integer mode condition.
    pub fn validate(&self) -> Result<()> {
        let fields: [(&'static str, f64); 5] = [
            ("ell", self.ell),
            ("omega_c", self.omega_c),
            ("M", self.big_m),
            ("Omega0", self.omega0),
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
        if !(self.t_ini.is_finite() && self.t_ini <= 0.0) {
            return Err(Error::InvalidParameter {
                name: "t_ini",
                value: self.t_ini,
                reason: "preparation must start at or before t = 0",
            });
        }
        let mode = self.omega_c * self.ell / (PI * SPEED_OF_LIGHT);
        let n = self.mode.map_or(mode.round(), |n| n as f64);
        if n < 1.0 || (mode - n).abs() > MODE_TOLERANCE * n {
            return Err(Error::CavityMode { mode });
        }
        Ok(())
    }
}

/// `lambda_0 = (omega_c / Omega_0) (1 / ell) sqrt(hbar / (2 M Omega_0))`.
pub fn lambda0(cav: &CavityConfig) -> f64 {
    cav.omega_c / (cav.omega0 * cav.ell) * (cav.hbar / (2.0 * cav.big_m * cav.omega0)).sqrt()
}

/// `omega_c sigma_y / (2 Omega_0 ell)`, the same coupling written through the oscillator width.
pub fn lambda0_short_form(cav: &CavityConfig) -> f64 {
    cav.omega_c * cav.sigma_y() / (2.0 * cav.omega0 * cav.ell)
}

/// `Omega_1 = sqrt(Omega_0^2 + hbar omega_c / (M ell^2))` and lambda_0.
pub fn derive_frequencies(cav: &CavityConfig) -> Result<(f64, f64)> {
    cav.validate()?;
    let stiff = cav.hbar * cav.omega_c / (cav.big_m * cav.ell * cav.ell);
    Ok(((cav.omega0 * cav.omega0 + stiff).sqrt(), lambda0(cav)))
}

/// Physical configuration whose oscillator is the cavity mirror.
pub fn with_cavity(cfg: &PhysicalConfig, cav: &CavityConfig) -> Result<PhysicalConfig> {
    let (omega1, _) = derive_frequencies(cav)?;
    let mut out = cfg.clone();
    out.big_m = cav.big_m;
    out.omega0 = cav.omega0;
    out.alpha = cav.alpha;
    out.omega1 = Some(omega1);
    Ok(out)
}

/// Squeezed coherent state parameters of one branch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezedCoherentParams {
    pub branch: usize,
    pub alpha: Complex64,
    pub zeta: Complex64,
    pub phase: f64,
    pub lambda0: f64,
}

/// Both branches at time `t` (seconds) after the preparation started at `t_ini`.
pub fn squeezed_trajectory(cav: &CavityConfig, t: f64) -> Result<[SqueezedCoherentParams; 2]> {
    let (omega1, lam) = derive_frequencies(cav)?;
    if t < cav.t_ini {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "time precedes the start of the preparation",
        });
    }
    let (w0, a) = (cav.omega0, cav.alpha);
    let dt = t - cav.t_ini;
    let r = omega1 / w0;
    let rot = Complex64::from_polar(1.0, -omega1 * dt);
    let alpha1 = r.sqrt() * (rot * a + (1.0 - rot) * lam / (r * r));
    let zeta1 = Complex64::from_polar(r.sqrt().ln(), -2.0 * omega1 * dt);
    let phase1 = -0.5 * omega1 * dt + r.powf(-1.5) * lam * (alpha1 * (1.0 - rot)).im;
    Ok([
        SqueezedCoherentParams {
            branch: 0,
            alpha: a * Complex64::from_polar(1.0, -w0 * dt),
            zeta: Complex64::new(0.0, 0.0),
            phase: -0.5 * w0 * dt,
            lambda0: lam,
        },
        SqueezedCoherentParams {
            branch: 1,
            alpha: alpha1,
            zeta: zeta1,
            phase: phase1,
            lambda0: lam,
        },
    ])
}

/// Limit `Omega_1 -> Omega_0` amplitudes: `(e^{-i Omega_0 dt} alpha, e^{-i Omega_1 dt}(alpha - lambda_0) + lambda_0)`.
pub fn long_time_state(cav: &CavityConfig, t: f64) -> Result<(Complex64, Complex64)> {
    let (omega1, lam) = derive_frequencies(cav)?;
    let dt = t - cav.t_ini;
    Ok((
        cav.alpha * Complex64::from_polar(1.0, -cav.omega0 * dt),
        Complex64::from_polar(1.0, -omega1 * dt) * (cav.alpha - lam) + lam,
    ))
}

/// First-order state when branch 1 starts displaced by lambda_0 (internal units).
pub fn gravity_evolved_optomech(
    model: &Model,
    lambda0: f64,
    t: f64,
    include_offres: bool,
    kgrid: &KGrid,
) -> Result<EvolvedState> {
    kgrid.check_resolves(model.k_res, t)?;
    let drives = [
        BranchDrive {
            omega: model.omega0,
            alpha: model.alpha,
            lambda: Complex64::new(0.0, 0.0),
        },
        BranchDrive {
            omega: model.omega1,
            alpha: model.alpha,
            lambda: Complex64::new(lambda0, 0.0),
        },
    ];
    Ok(evolve_branches(drives, model.g, t, include_offres, kgrid))
}

/// Undetected visibility with the displaced branch, optionally keeping the branch phases.
pub fn optomech_visibility(model: &Model, lambda0: f64, t: f64, phases: Option<(f64, f64)>) -> f64 {
    let a0 = model.alpha * Complex64::from_polar(1.0, -model.omega0 * t);
    let a1 = Complex64::from_polar(1.0, -model.omega1 * t) * (model.alpha - lambda0) + lambda0;
    let (p0, p1) = phases.unwrap_or((0.0, 0.0));
    (Complex64::from_polar(1.0, p0 - p1) * coherent_overlap(a1, a0)).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::pex_numeric_on;
    use crate::perturbation::evolve;
    use approx::assert_abs_diff_eq;

    /// A 1 cm cavity at mode 20000, mirror frequency 1 rad/s.
    pub(crate) fn cavity(big_m: f64) -> CavityConfig {
        let ell = 1e-2;
        let n = 20_000u64;
        CavityConfig {
            ell,
            omega_c: PI * SPEED_OF_LIGHT * n as f64 / ell,
            mode: Some(n),
            big_m,
            omega0: 1.0,
            alpha: Complex64::new(0.5, 0.1),
            t_ini: -3.0,
            hbar: HBAR,
        }
    }

    #[test]
    fn no_radiation_pressure_keeps_frequency() {
        let mut cav = cavity(1e-3);
        cav.hbar = 0.0;
        assert!(derive_frequencies(&cav).is_err());
        let cav = cavity(1e-15);
        let stiff = cav.hbar * cav.omega_c / (cav.big_m * cav.ell * cav.ell);
        let (w1, _) = derive_frequencies(&cav).unwrap();
        assert!(w1 > cav.omega0);
        assert_abs_diff_eq!(w1 * w1 - cav.omega0 * cav.omega0, stiff, epsilon = 1e-12 * stiff);
    }

    #[test]
    fn mode_number_is_checked() {
        let mut cav = cavity(1e-3);
        cav.omega_c *= 1.0 + 1e-4;
        assert!(matches!(derive_frequencies(&cav), Err(Error::CavityMode { .. })));
        cav.mode = None;
        cav.omega_c = PI * SPEED_OF_LIGHT * 20_000.5 / cav.ell;
        assert!(matches!(derive_frequencies(&cav), Err(Error::CavityMode { .. })));
        let mut ok = cavity(1e-3);
        ok.mode = None;
        assert!(derive_frequencies(&ok).is_ok());
    }

    #[test]
    fn coupling_forms_differ_by_root_two() {
        for m in [1e-3, 1e-9, 2.5e-14] {
            let cav = cavity(m);
            assert_abs_diff_eq!(lambda0(&cav) / lambda0_short_form(&cav), 2f64.sqrt(), epsilon = 1e-12);
        }
    }

    #[test]
    fn trajectory_at_start() {
        let cav = cavity(1e-9);
        let (w1, _) = derive_frequencies(&cav).unwrap();
        let [b0, b1] = squeezed_trajectory(&cav, cav.t_ini).unwrap();
        assert_eq!(b0.alpha, cav.alpha);
        assert_abs_diff_eq!(
            (b1.alpha - (w1 / cav.omega0).sqrt() * cav.alpha).norm(),
            0.0,
            epsilon = 1e-15
        );
        assert!(squeezed_trajectory(&cav, cav.t_ini - 1.0).is_err());
    }

    #[test]
    fn squeezing_by_branch() {
        let cav = cavity(1e-9);
        let (w1, _) = derive_frequencies(&cav).unwrap();
        for t in [-3.0, -1.0, 0.0, 2.5, 40.0] {
            let [b0, b1] = squeezed_trajectory(&cav, t).unwrap();
            assert_eq!(b0.zeta.norm(), 0.0);
            assert_abs_diff_eq!(b0.alpha.norm(), cav.alpha.norm(), epsilon = 1e-15);
            assert_abs_diff_eq!(b1.zeta.norm(), (w1 / cav.omega0).sqrt().ln(), epsilon = 1e-15);
        }
    }

    #[test]
    fn limit_state_examples() {
        let mut cav = cavity(1e-9);
        let (w1, lam) = derive_frequencies(&cav).unwrap();
        let t = cav.t_ini + 2.0 * PI / w1;
        let (_, a1) = long_time_state(&cav, t).unwrap();
        assert_abs_diff_eq!((a1 - cav.alpha).norm(), 0.0, epsilon = 1e-10);
        assert!(lam > 0.0);
        cav.omega_c = 0.0;
        assert!(long_time_state(&cav, 1.0).is_err());
    }

    #[test]
    fn full_trajectory_approaches_limit() {
        // Choose omega_c so that Omega_1 / Omega_0 = 1.001.
        let mut cav = cavity(1e-9);
        let target = 1.001f64;
        let stiff = (target * target - 1.0) * cav.omega0 * cav.omega0;
        let omega_c = stiff * cav.big_m * cav.ell * cav.ell / cav.hbar;
        let n = (omega_c * cav.ell / (PI * SPEED_OF_LIGHT)).round();
        cav.mode = Some(n as u64);
        cav.omega_c = PI * SPEED_OF_LIGHT * n / cav.ell;
        let (w1, lam) = derive_frequencies(&cav).unwrap();
        assert!((w1 / cav.omega0 - target).abs() < 1e-6);
        // Fixed (Omega_1 - Omega_0) dt = 1.
        let t = cav.t_ini + 1.0 / (w1 - cav.omega0);
        let [_, b1] = squeezed_trajectory(&cav, t).unwrap();
        let (_, lim) = long_time_state(&cav, t).unwrap();
        let scale = cav.alpha.norm() + lam;
        assert!((b1.alpha - lim).norm() / scale <= 0.01);
    }

    fn model() -> Model {
        Model::dimensionless(1e-3, 0.8, 1.2, Complex64::new(0.5, 0.0)).unwrap()
    }

    #[test]
    fn zero_coupling_reduces_to_plain_evolution() {
        let m = model();
        let t = 3.0 * m.t_sat;
        let grid = KGrid::for_resonance(m.k_res, t);
        for offres in [false, true] {
            let a = gravity_evolved_optomech(&m, 0.0, t, offres, &grid).unwrap();
            let b = evolve(&m, t, offres, &grid).unwrap();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn displaced_branch_rescales_resonant_term() {
        let m = model();
        let t = 3.0 * m.t_sat;
        let grid = KGrid::for_resonance(m.k_res, t);
        let lam = 0.2;
        let s = gravity_evolved_optomech(&m, lam, t, false, &grid).unwrap();
        let base = pex_numeric_on(&m, t, &grid).unwrap();
        let ratio = ((m.alpha - lam) / m.alpha).norm_sqr();
        assert!((s.resonant_norm_sqr() / base - ratio).abs() < 1e-12);
        let s = gravity_evolved_optomech(&m, m.alpha.re, t, true, &grid).unwrap();
        assert!(s.resonant.amplitude.iter().all(|a| a.norm() == 0.0));
    }

    #[test]
    fn branch_populations_stay_balanced() {
        let m = model();
        let t = 2.0 * m.t_sat;
        let s = gravity_evolved_optomech(&m, 0.3, t, true, &KGrid::for_resonance(m.k_res, t)).unwrap();
        for q in 0..2 {
            assert_abs_diff_eq!(s.zeroth_overlap(q, q).unwrap().re, 0.5, epsilon = 1e-12);
            assert!(s.excited_overlap(q, q).unwrap().re < 10.0 * m.g * m.g);
        }
    }

    #[test]
    fn dropped_phases_do_not_change_visibility() {
        let m = model();
        let cav = cavity(1e-9);
        for t in [0.0, 1.3, 8.0] {
            let [b0, b1] = squeezed_trajectory(&cav, t).unwrap();
            let with = optomech_visibility(&m, 0.2, t, Some((b0.phase, b1.phase)));
            let without = optomech_visibility(&m, 0.2, t, None);
            assert_abs_diff_eq!(with, without, epsilon = 1e-12);
        }
    }
}
