//! Brute-force propagation of the particle-oscillator Schrödinger equation on
//! a position grid, one 2D (X, Y) array per qubit branch.
//!
//! The Hamiltonian of branch q is
//! `Omega_q (P_y^2 + Y^2)/2 + P_x^2 - 2/cosh^2 X + g X Y`,
//! evolved with a Strang split-operator step. The grid knows nothing about
//! eigenstates beyond the bound-state profile used for the initial condition
//! and the projection in [`measure`].

mod measure;
mod propagate;
mod snapshot;

pub use measure::{branch_moments, measure, Measurement};
pub use propagate::{propagate, run_series, sn_propagate, sn_run_series, Propagator, SnDrive};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::eigen::eval_bound;
use crate::error::{Error, Result};
use crate::model::Model;

/// Total times above which [`AbsorberMode::Auto`] switches the mask on.
pub const ABSORBER_AUTO_TIME: f64 = 20.0;
/// Largest allowed `dt * E_max`.
pub const STEP_LIMIT: f64 = 0.05;
/// Norm drift that triggers [`Error::IntegratorDrift`] without an absorber.
pub const DRIFT_LIMIT: f64 = 1e-6;
/// Largest bound-state density allowed at the X boundary.
pub const EDGE_DENSITY_LIMIT: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AbsorberMode {
    /// On when the run is longer than [`ABSORBER_AUTO_TIME`].
    Auto,
    On,
    Off,
}

/// Cosine-ramp imaginary potential on the outer part of the X range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Absorber {
    /// Fraction of the half-range covered by the ramp at each end.
    pub width_fraction: f64,
    /// Peak absorption rate.
    pub strength: f64,
    pub mode: AbsorberMode,
}

impl Default for Absorber {
    fn default() -> Self {
        Self {
            width_fraction: 0.15,
            strength: 1.0,
            mode: AbsorberMode::Auto,
        }
    }
}

/// Discretisation of the (X, Y) plane and of time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    /// X runs over `[-x_max, x_max)`.
    pub x_max: f64,
    pub nx: usize,
    pub y_max: f64,
    pub ny: usize,
    pub dt: f64,
    pub absorber: Absorber,
    /// Qubit branches to propagate.
    pub branches: Vec<usize>,
    /// Largest wavenumber expected to carry excited probability; sets the
    /// kinetic part of the step-size bound and the X extent check.
    pub k_cut: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            x_max: 120.0,
            nx: 1024,
            y_max: 10.0,
            ny: 64,
            dt: 1e-3,
            absorber: Absorber::default(),
            branches: vec![0, 1],
            k_cut: 3.0,
        }
    }
}

fn axis(half: f64, n: usize) -> Vec<f64> {
    let h = 2.0 * half / n as f64;
    (0..n).map(|i| -half + h * i as f64).collect()
}

/// Angular wavenumbers in FFT order.
fn wavenumbers(half: f64, n: usize) -> Vec<f64> {
    let dk = PI / half;
    (0..n)
        .map(|j| if j < n / 2 { j as f64 } else { j as f64 - n as f64 } * dk)
        .collect()
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if n < 2 || !n.is_power_of_two() {
                return Err(Error::Config(format!("{name} = {n} must be a power of two >= 2")));
            }
        }
        for (name, v) in [
            ("x_max", self.x_max),
            ("y_max", self.y_max),
            ("dt", self.dt),
            ("k_cut", self.k_cut),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} = {v} must be finite and positive")));
            }
        }
        let a = &self.absorber;
        if !(a.width_fraction > 0.0 && a.width_fraction < 1.0 && a.strength >= 0.0) {
            return Err(Error::Config(format!(
                "absorber width fraction {} must lie in (0, 1) and strength {} must be non-negative",
                a.width_fraction, a.strength
            )));
        }
        let mut b = self.branches.clone();
        b.sort_unstable();
        b.dedup();
        if b.is_empty() || b.len() != self.branches.len() || b.iter().any(|&q| q > 1) {
            return Err(Error::Config(format!(
                "branch list {:?} must be non-empty, distinct and drawn from {{0, 1}}",
                self.branches
            )));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.x_max / self.nx as f64
    }

    pub fn dy(&self) -> f64 {
        2.0 * self.y_max / self.ny as f64
    }

    pub fn x_nodes(&self) -> Vec<f64> {
        axis(self.x_max, self.nx)
    }

    pub fn y_nodes(&self) -> Vec<f64> {
        axis(self.y_max, self.ny)
    }

    pub(crate) fn kx(&self) -> Vec<f64> {
        wavenumbers(self.x_max, self.nx)
    }

    pub(crate) fn ky(&self) -> Vec<f64> {
        wavenumbers(self.y_max, self.ny)
    }

    /// Energy range actually populated: well depth, kinetic energy up to
    /// `k_cut` and the oscillator out to six widths beyond the coherent orbit.
    pub fn energy_bound(&self, model: &Model) -> f64 {
        let omega_max = self
            .branches
            .iter()
            .map(|&q| model.branch_frequency(q))
            .fold(0.0, f64::max);
        let reach = 2f64.sqrt() * model.alpha.norm() + 6.0;
        2.0 + self.k_cut * self.k_cut + 0.5 * omega_max * reach * reach
    }

    pub fn check_step(&self, model: &Model, dt: f64) -> Result<()> {
        let product = dt * self.energy_bound(model);
        if product > STEP_LIMIT {
            return Err(Error::StepSize {
                product,
                limit: STEP_LIMIT,
            });
        }
        Ok(())
    }

    /// Y extent is required; the X extent only warns because the absorber
    /// removes what would otherwise wrap around.
    pub fn check_extent(&self, model: &Model, tau_end: f64) -> Result<()> {
        let edge = eval_bound(self.x_max).powi(2);
        if edge > EDGE_DENSITY_LIMIT {
            return Err(Error::GridExtent(format!(
                "bound-state density {edge:.3e} at X = {} exceeds {EDGE_DENSITY_LIMIT:.0e}",
                self.x_max
            )));
        }
        let y_need = model.alpha.norm() * 2f64.sqrt() * 4.0 + 6.0;
        if self.y_max < y_need {
            return Err(Error::GridExtent(format!(
                "y_max = {} is below {y_need:.3} required by |alpha| = {}",
                self.y_max,
                model.alpha.norm()
            )));
        }
        let x_need = 4.0 + 2.0 * self.k_cut * tau_end;
        if self.x_max < x_need {
            log::warn!(
                "x_max = {} is below 4 + 2 k_cut tau = {x_need:.1}; fast components reach the boundary{}",
                self.x_max,
                if self.absorber_active(tau_end) {
                    " and are absorbed"
                } else {
                    " and wrap around"
                }
            );
        }
        Ok(())
    }

    pub fn absorber_active(&self, tau_end: f64) -> bool {
        match self.absorber.mode {
            AbsorberMode::On => true,
            AbsorberMode::Off => false,
            AbsorberMode::Auto => tau_end > ABSORBER_AUTO_TIME,
        }
    }

    /// Absorption rate W(X) >= 0 on the grid.
    pub(crate) fn absorption_rate(&self) -> Vec<f64> {
        let inner = self.x_max * (1.0 - self.absorber.width_fraction);
        let ramp = self.x_max - inner;
        self.x_nodes()
            .into_iter()
            .map(|x| {
                let d = x.abs() - inner;
                if d > 0.0 {
                    self.absorber.strength * (0.5 * PI * d / ramp).sin().powi(2)
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Bound-state profile sampled on the X axis, normalised on the grid.
    pub fn bound_profile(&self) -> Vec<f64> {
        let mut b: Vec<f64> = self.x_nodes().into_iter().map(eval_bound).collect();
        let n = (b.iter().map(|v| v * v).sum::<f64>() * self.dx()).sqrt();
        b.iter_mut().for_each(|v| *v /= n);
        b
    }
}

/// One qubit branch: amplitudes row-major `[ix][iy]`.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchField {
    pub branch: usize,
    pub omega: f64,
    pub psi: Vec<Complex64>,
}

/// The full state: every propagated branch on a shared grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridWavefunction {
    pub spec: GridSpec,
    pub tau: f64,
    pub fields: Vec<BranchField>,
}

impl GridWavefunction {
    pub fn norm_sqr(&self) -> f64 {
        let cell = self.spec.dx() * self.spec.dy();
        self.fields
            .iter()
            .map(|f| f.psi.iter().map(Complex64::norm_sqr).sum::<f64>() * cell)
            .sum()
    }

    pub fn field(&self, branch: usize) -> Option<&BranchField> {
        self.fields.iter().find(|f| f.branch == branch)
    }
}

/// Particle-only state for the mean-field mode.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleWavefunction {
    pub spec: GridSpec,
    pub tau: f64,
    pub psi: Vec<Complex64>,
}

impl ParticleWavefunction {
    pub fn norm_sqr(&self) -> f64 {
        self.psi.iter().map(Complex64::norm_sqr).sum::<f64>() * self.spec.dx()
    }

    /// `1 - |<b|psi>|^2`.
    pub fn excitation(&self) -> f64 {
        let b = self.spec.bound_profile();
        let proj: Complex64 = b.iter().zip(&self.psi).map(|(&u, &p)| u * p).sum::<Complex64>() * self.spec.dx();
        1.0 - proj.norm_sqr()
    }
}

/// Coherent-state wavefunction in Y with ground-state width 1.
fn coherent_profile(y: &[f64], alpha: Complex64, dy: f64) -> Vec<Complex64> {
    let (y0, p0) = (2f64.sqrt() * alpha.re, 2f64.sqrt() * alpha.im);
    let mut phi: Vec<Complex64> = y
        .iter()
        .map(|&v| Complex64::from_polar((-0.5 * (v - y0).powi(2)).exp(), p0 * v))
        .collect();
    let n = (phi.iter().map(Complex64::norm_sqr).sum::<f64>() * dy).sqrt();
    phi.iter_mut().for_each(|v| *v /= n);
    phi
}

/// Bound particle times the coherent oscillator, weight `1/sqrt 2` per branch.
pub fn initial_state(model: &Model, spec: &GridSpec) -> Result<GridWavefunction> {
    spec.validate()?;
    spec.check_extent(model, 0.0)?;
    let b = spec.bound_profile();
    let phi = coherent_profile(&spec.y_nodes(), model.alpha, spec.dy());
    let w = if spec.branches.len() == 2 { FRAC_1_SQRT_2 } else { 1.0 };
    let psi: Vec<Complex64> = b.iter().flat_map(|&u| phi.iter().map(move |&p| p * (u * w))).collect();
    let fields = spec
        .branches
        .iter()
        .map(|&q| BranchField {
            branch: q,
            omega: model.branch_frequency(q),
            psi: psi.clone(),
        })
        .collect();
    Ok(GridWavefunction {
        spec: spec.clone(),
        tau: 0.0,
        fields,
    })
}

/// Bound particle alone for the mean-field mode.
pub fn sn_initial_state(spec: &GridSpec) -> Result<ParticleWavefunction> {
    spec.validate()?;
    let edge = eval_bound(spec.x_max).powi(2);
    if edge > EDGE_DENSITY_LIMIT {
        return Err(Error::GridExtent(format!(
            "bound-state density {edge:.3e} at X = {} exceeds {EDGE_DENSITY_LIMIT:.0e}",
            spec.x_max
        )));
    }
    Ok(ParticleWavefunction {
        spec: spec.clone(),
        tau: 0.0,
        psi: spec
            .bound_profile()
            .into_iter()
            .map(|v| Complex64::new(v, 0.0))
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn model(g: f64) -> Model {
        Model::dimensionless(g, 0.8, 1.2, Complex64::new(0.5, 0.0)).unwrap()
    }

    pub(crate) fn small_spec() -> GridSpec {
        GridSpec {
            x_max: 40.0,
            nx: 512,
            y_max: 10.0,
            ny: 64,
            ..GridSpec::default()
        }
    }

    #[test]
    fn initial_state_examples() {
        let m = Model::dimensionless(1e-3, 0.8, 1.2, Complex64::new(0.5, 0.3)).unwrap();
        let s = initial_state(&m, &small_spec()).unwrap();
        let cell = s.spec.dx() * s.spec.dy();
        for f in &s.fields {
            let n: f64 = f.psi.iter().map(Complex64::norm_sqr).sum::<f64>() * cell;
            assert_abs_diff_eq!(n, 0.5, epsilon = 1e-10);
        }
        let (x, y) = branch_moments(&s, 1).unwrap();
        assert_abs_diff_eq!(x, 0.0, epsilon = 1e-10);
        assert_abs_diff_eq!(y, 2f64.sqrt() * 0.5, epsilon = 1e-6);
        let meas = measure(&s);
        assert_abs_diff_eq!(meas.p_ex, 0.0, epsilon = 1e-8);
        assert_abs_diff_eq!(meas.visibility, 1.0, epsilon = 1e-12);
        assert!(meas.negativity.abs() < 1e-6, "{}", meas.negativity);
    }

    #[test]
    fn narrow_grid_is_rejected() {
        let spec = GridSpec {
            x_max: 10.0,
            ..small_spec()
        };
        assert!(matches!(initial_state(&model(1e-3), &spec), Err(Error::GridExtent(_))));
        let spec = GridSpec {
            y_max: 5.0,
            ..small_spec()
        };
        assert!(matches!(initial_state(&model(1e-3), &spec), Err(Error::GridExtent(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::default().validate().is_ok());
        for bad in [
            GridSpec {
                nx: 1000,
                ..GridSpec::default()
            },
            GridSpec {
                dt: 0.0,
                ..GridSpec::default()
            },
            GridSpec {
                branches: vec![],
                ..GridSpec::default()
            },
            GridSpec {
                branches: vec![1, 1],
                ..GridSpec::default()
            },
            GridSpec {
                branches: vec![2],
                ..GridSpec::default()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn default_step_respects_energy_bound() {
        let m = model(1e-3);
        let s = GridSpec::default();
        assert!(s.check_step(&m, s.dt).is_ok());
        assert!(matches!(s.check_step(&m, 10.0 * s.dt), Err(Error::StepSize { .. })));
    }

    #[test]
    fn absorber_profile() {
        let s = small_spec();
        let w = s.absorption_rate();
        let x = s.x_nodes();
        for (xi, wi) in x.iter().zip(&w) {
            if xi.abs() < 0.85 * s.x_max - 1e-9 {
                assert_eq!(*wi, 0.0);
            }
            assert!(*wi >= 0.0 && *wi <= s.absorber.strength + 1e-15);
        }
        assert_abs_diff_eq!(w[0], s.absorber.strength, epsilon = 1e-12);
        assert!(s.absorber_active(25.0) && !s.absorber_active(10.0));
    }
}
