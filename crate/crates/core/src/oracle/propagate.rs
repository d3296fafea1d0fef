use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use super::{measure, sn_initial_state, GridSpec, GridWavefunction, Measurement, ParticleWavefunction, DRIFT_LIMIT};
use crate::eigen::sech;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::observables::coherent_visibility;
use crate::schrodinger_newton::sn_mean_displacement;

/// Rows handed to one worker per FFT pass.
const ROWS_PER_TASK: usize = 32;

/// Which part of `<Y>(t)` drives the particle in the mean-field mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SnDrive {
    /// Both oscillator tones, as the mean field actually is.
    #[default]
    Full,
    /// Only the resonant `Omega_1` tone.
    ResonantTone,
}

struct BranchOps {
    branch: usize,
    kin_y: Vec<Complex64>,
    pot_half: Vec<Complex64>,
    pot_full: Vec<Complex64>,
}

/// Precomputed phases and FFT plans for one step size.
pub struct Propagator {
    nx: usize,
    ny: usize,
    dt: f64,
    fft_x: Arc<dyn Fft<f64>>,
    ifft_x: Arc<dyn Fft<f64>>,
    fft_y: Arc<dyn Fft<f64>>,
    ifft_y: Arc<dyn Fft<f64>>,
    kin_x: Vec<Complex64>,
    ops: Vec<BranchOps>,
}

/// Forward transform, pointwise multiply, inverse transform, row by row.
fn filter_rows(fwd: &Arc<dyn Fft<f64>>, inv: &Arc<dyn Fft<f64>>, data: &mut [Complex64], mult: &[Complex64]) {
    let n = mult.len();
    let scratch_len = fwd.get_inplace_scratch_len().max(inv.get_inplace_scratch_len());
    data.par_chunks_mut(n * ROWS_PER_TASK).for_each_init(
        || vec![Complex64::default(); scratch_len],
        |scratch, chunk| {
            fwd.process_with_scratch(chunk, scratch);
            for row in chunk.chunks_mut(n) {
                row.iter_mut().zip(mult).for_each(|(v, m)| *v *= m);
            }
            inv.process_with_scratch(chunk, scratch);
        },
    );
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    for (r, row) in src.chunks(cols).enumerate() {
        for (c, v) in row.iter().enumerate() {
            dst[c * rows + r] = *v;
        }
    }
}

fn multiply(psi: &mut [Complex64], phase: &[Complex64]) {
    psi.par_iter_mut().zip(phase).for_each(|(v, p)| *v *= p);
}

fn kinetic_phase(k: &[f64], scale: f64, dt: f64) -> Vec<Complex64> {
    let norm = 1.0 / k.len() as f64;
    k.iter()
        .map(|&kk| Complex64::from_polar(norm, -dt * scale * kk * kk))
        .collect()
}

impl Propagator {
    pub fn new(model: &Model, spec: &GridSpec, dt: f64, absorbing: bool) -> Result<Self> {
        spec.validate()?;
        spec.check_step(model, dt)?;
        let (nx, ny) = (spec.nx, spec.ny);
        let mut planner = FftPlanner::new();
        let x = spec.x_nodes();
        let y = spec.y_nodes();
        let absorb = if absorbing {
            spec.absorption_rate()
        } else {
            vec![0.0; nx]
        };
        let ops = spec
            .branches
            .iter()
            .map(|&q| {
                let omega = model.branch_frequency(q);
                let pot = |h: f64| -> Vec<Complex64> {
                    x.iter()
                        .zip(&absorb)
                        .flat_map(|(&xi, &w)| {
                            let well = -2.0 * sech(xi).powi(2);
                            y.iter().map(move |&yj| {
                                let v = well + model.g * xi * yj + 0.5 * omega * yj * yj;
                                Complex64::from_polar((-w * h).exp(), -v * h)
                            })
                        })
                        .collect()
                };
                BranchOps {
                    branch: q,
                    kin_y: kinetic_phase(&spec.ky(), 0.5 * omega, dt),
                    pot_half: pot(0.5 * dt),
                    pot_full: pot(dt),
                }
            })
            .collect();
        Ok(Self {
            nx,
            ny,
            dt,
            fft_x: planner.plan_fft_forward(nx),
            ifft_x: planner.plan_fft_inverse(nx),
            fft_y: planner.plan_fft_forward(ny),
            ifft_y: planner.plan_fft_inverse(ny),
            kin_x: kinetic_phase(&spec.kx(), 1.0, dt),
            ops,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    fn kinetic(&self, psi: &mut [Complex64], buf: &mut [Complex64], kin_y: &[Complex64]) {
        filter_rows(&self.fft_y, &self.ifft_y, psi, kin_y);
        transpose(psi, buf, self.nx, self.ny);
        filter_rows(&self.fft_x, &self.ifft_x, buf, &self.kin_x);
        transpose(buf, psi, self.ny, self.nx);
    }

    /// Advances every branch by `steps` Strang steps; adjacent potential
    /// half-steps are merged.
    pub fn advance(&self, state: &mut GridWavefunction, steps: usize) {
        if steps == 0 {
            return;
        }
        state.fields.par_iter_mut().for_each(|f| {
            let ops = self
                .ops
                .iter()
                .find(|o| o.branch == f.branch)
                .expect("propagator built for a different branch list");
            let mut buf = vec![Complex64::default(); f.psi.len()];
            multiply(&mut f.psi, &ops.pot_half);
            for s in 0..steps {
                self.kinetic(&mut f.psi, &mut buf, &ops.kin_y);
                multiply(&mut f.psi, if s + 1 == steps { &ops.pot_half } else { &ops.pot_full });
            }
        });
        state.tau += steps as f64 * self.dt;
    }
}

/// Number of steps and the step size that lands exactly on `span`.
fn stepping(span: f64, dt: f64) -> (usize, f64) {
    if span <= 0.0 {
        return (0, dt);
    }
    let n = (span / dt - 1e-9).ceil().max(1.0) as usize;
    (n, span / n as f64)
}

fn check_drift(before: f64, after: f64, absorbing: bool) -> Result<()> {
    let drift = (after - before).abs();
    if !absorbing && drift > DRIFT_LIMIT {
        return Err(Error::IntegratorDrift {
            drift,
            limit: DRIFT_LIMIT,
        });
    }
    Ok(())
}

/// Evolves `state` to `t_end` with the exact grid Hamiltonian.
pub fn propagate(state: &GridWavefunction, t_end: f64, model: &Model) -> Result<GridWavefunction> {
    if t_end.is_nan() || t_end < state.tau {
        return Err(Error::Config(format!(
            "t_end = {t_end} precedes the state time {}",
            state.tau
        )));
    }
    let spec = &state.spec;
    spec.check_extent(model, t_end)?;
    let absorbing = spec.absorber_active(t_end);
    let (n, dt) = stepping(t_end - state.tau, spec.dt);
    let p = Propagator::new(model, spec, dt, absorbing)?;
    let mut out = state.clone();
    let before = out.norm_sqr();
    p.advance(&mut out, n);
    out.tau = t_end;
    check_drift(before, out.norm_sqr(), absorbing)?;
    Ok(out)
}

/// Propagates from the initial state through `times` (ascending), measuring
/// at each and handing every sampled state to `observe`.
pub fn run_series<F>(model: &Model, spec: &GridSpec, times: &[f64], mut observe: F) -> Result<Vec<Measurement>>
where
    F: FnMut(&GridWavefunction) -> Result<()>,
{
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Config("sample times must be non-negative and ascending".into()));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    spec.check_extent(model, t_end)?;
    let absorbing = spec.absorber_active(t_end);
    let mut state = super::initial_state(model, spec)?;
    let n0 = state.norm_sqr();
    let mut cached: Option<Propagator> = None;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let (n, dt) = stepping(t - state.tau, spec.dt);
        if n > 0 {
            if cached.as_ref().is_none_or(|p| p.dt() != dt) {
                cached = Some(Propagator::new(model, spec, dt, absorbing)?);
            }
            cached.as_ref().unwrap().advance(&mut state, n);
        }
        state.tau = t;
        check_drift(n0, state.norm_sqr(), absorbing)?;
        observe(&state)?;
        out.push(measure(&state));
    }
    Ok(out)
}

/// `<Y>(t)` seen by the particle for the chosen drive.
pub fn sn_drive_value(model: &Model, t: f64, drive: SnDrive) -> f64 {
    match drive {
        SnDrive::Full => sn_mean_displacement(model, t),
        SnDrive::ResonantTone => {
            (model.alpha * Complex64::from_polar(1.0, -model.omega1 * t)).re * std::f64::consts::FRAC_1_SQRT_2
        }
    }
}

struct SnStepper {
    dt: f64,
    fft: Arc<dyn Fft<f64>>,
    ifft: Arc<dyn Fft<f64>>,
    kin: Vec<Complex64>,
    x: Vec<f64>,
    well: Vec<f64>,
    absorb: Vec<f64>,
    scratch_len: usize,
}

impl SnStepper {
    fn new(spec: &GridSpec, dt: f64, absorbing: bool) -> Self {
        let mut planner = FftPlanner::new();
        let fft = planner.plan_fft_forward(spec.nx);
        let ifft = planner.plan_fft_inverse(spec.nx);
        let scratch_len = fft.get_inplace_scratch_len().max(ifft.get_inplace_scratch_len());
        let x = spec.x_nodes();
        Self {
            dt,
            kin: kinetic_phase(&spec.kx(), 1.0, dt),
            well: x.iter().map(|&v| -2.0 * sech(v).powi(2)).collect(),
            absorb: if absorbing {
                spec.absorption_rate()
            } else {
                vec![0.0; spec.nx]
            },
            x,
            fft,
            ifft,
            scratch_len,
        }
    }

    /// Strang steps with the drive evaluated at each step midpoint.
    fn advance(&self, state: &mut ParticleWavefunction, steps: usize, model: &Model, drive: SnDrive) {
        let mut scratch = vec![Complex64::default(); self.scratch_len];
        let h = 0.5 * self.dt;
        for s in 0..steps {
            let tm = state.tau + (s as f64 + 0.5) * self.dt;
            let f = model.g * sn_drive_value(model, tm, drive);
            let half: Vec<Complex64> = self
                .x
                .iter()
                .zip(&self.well)
                .zip(&self.absorb)
                .map(|((&x, &v), &w)| Complex64::from_polar((-w * h).exp(), -(v + f * x) * h))
                .collect();
            multiply(&mut state.psi, &half);
            self.fft.process_with_scratch(&mut state.psi, &mut scratch);
            multiply(&mut state.psi, &self.kin);
            self.ifft.process_with_scratch(&mut state.psi, &mut scratch);
            multiply(&mut state.psi, &half);
        }
        state.tau += steps as f64 * self.dt;
    }
}

/// Mean-field mode: the particle alone, driven by `g <Y>(t) X`.
pub fn sn_propagate(
    state: &ParticleWavefunction,
    t_end: f64,
    model: &Model,
    drive: SnDrive,
) -> Result<ParticleWavefunction> {
    if t_end.is_nan() || t_end < state.tau {
        return Err(Error::Config(format!(
            "t_end = {t_end} precedes the state time {}",
            state.tau
        )));
    }
    let spec = &state.spec;
    let absorbing = spec.absorber_active(t_end);
    let (n, dt) = stepping(t_end - state.tau, spec.dt);
    spec.check_step(model, dt)?;
    let mut out = state.clone();
    let before = out.norm_sqr();
    SnStepper::new(spec, dt, absorbing).advance(&mut out, n, model, drive);
    out.tau = t_end;
    check_drift(before, out.norm_sqr(), absorbing)?;
    Ok(out)
}

/// Mean-field counterpart of [`run_series`]. The oscillator is untouched,
/// so V is the coherent overlap and N vanishes.
pub fn sn_run_series(model: &Model, spec: &GridSpec, times: &[f64], drive: SnDrive) -> Result<Vec<Measurement>> {
    if times.windows(2).any(|w| w[1] < w[0]) || times.first().is_some_and(|&t| t < 0.0) {
        return Err(Error::Config("sample times must be non-negative and ascending".into()));
    }
    let t_end = times.last().copied().unwrap_or(0.0);
    let absorbing = spec.absorber_active(t_end);
    let mut state = sn_initial_state(spec)?;
    let n0 = state.norm_sqr();
    let mut cached: Option<SnStepper> = None;
    let mut out = Vec::with_capacity(times.len());
    for &t in times {
        let (n, dt) = stepping(t - state.tau, spec.dt);
        if n > 0 {
            if cached.as_ref().is_none_or(|p| p.dt != dt) {
                spec.check_step(model, dt)?;
                cached = Some(SnStepper::new(spec, dt, absorbing));
            }
            cached.as_ref().unwrap().advance(&mut state, n, model, drive);
        }
        state.tau = t;
        let norm = state.norm_sqr();
        check_drift(n0, norm, absorbing)?;
        let v = coherent_visibility(model, t);
        out.push(Measurement {
            tau: t,
            norm,
            p_ex: state.excitation(),
            visibility: v,
            visibility_detected: v,
            negativity: 0.0,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{branch_moments, initial_state, tests::small_spec, AbsorberMode};
    use super::*;
    use approx::assert_abs_diff_eq;

    fn model(g: f64) -> Model {
        Model::dimensionless(g, 0.8, 1.2, Complex64::new(0.5, 0.2)).unwrap()
    }

    fn diff_norm(a: &GridWavefunction, b: &GridWavefunction) -> f64 {
        let cell = a.spec.dx() * a.spec.dy();
        a.fields
            .iter()
            .zip(&b.fields)
            .map(|(f, h)| f.psi.iter().zip(&h.psi).map(|(u, v)| (u - v).norm_sqr()).sum::<f64>())
            .sum::<f64>()
            .sqrt()
            * cell.sqrt()
    }

    #[test]
    fn uncoupled_bound_state_is_stationary() {
        let m = model(0.0);
        let spec = GridSpec {
            x_max: 30.0,
            nx: 256,
            ny: 32,
            absorber: super::super::Absorber {
                mode: AbsorberMode::Off,
                ..Default::default()
            },
            ..small_spec()
        };
        let s = run_series(&m, &spec, &[10.0, 25.0, 50.0], |_| Ok(())).unwrap();
        for r in s {
            assert!(r.p_ex.abs() < 1e-6, "{r:?}");
            assert_abs_diff_eq!(r.norm, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn uncoupled_oscillator_follows_coherent_orbit() {
        let m = model(0.0);
        let spec = small_spec();
        let mut state = initial_state(&m, &spec).unwrap();
        let a = m.alpha;
        for t in [0.7, 2.9, 6.3] {
            state = propagate(&state, t, &m).unwrap();
            for q in [0, 1] {
                let (_, y) = branch_moments(&state, q).unwrap();
                let expect = 2f64.sqrt() * (a * Complex64::from_polar(1.0, -m.branch_frequency(q) * t)).re;
                assert_abs_diff_eq!(y, expect, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn strang_splitting_is_second_order() {
        let m = model(1e-2);
        let base = GridSpec {
            x_max: 30.0,
            nx: 256,
            ny: 64,
            ..small_spec()
        };
        let t = 0.5;
        let run = |dt: f64| {
            let s = GridSpec { dt, ..base.clone() };
            propagate(&initial_state(&m, &s).unwrap(), t, &m).unwrap()
        };
        let (a, b, c) = (run(1e-3), run(5e-4), run(2.5e-4));
        let ratio = diff_norm(&a, &b) / diff_norm(&b, &c);
        assert!((ratio - 4.0).abs() < 0.4, "ratio {ratio}");
    }

    #[test]
    fn unitary_without_absorber() {
        let m = model(1e-2);
        let spec = GridSpec {
            absorber: super::super::Absorber {
                mode: AbsorberMode::Off,
                ..Default::default()
            },
            ..small_spec()
        };
        let s = propagate(&initial_state(&m, &spec).unwrap(), 5.0, &m).unwrap();
        assert_abs_diff_eq!(s.norm_sqr(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn absorber_never_adds_norm() {
        let m = model(5e-2);
        let spec = GridSpec {
            x_max: 20.0,
            nx: 256,
            absorber: super::super::Absorber {
                mode: AbsorberMode::On,
                strength: 5.0,
                ..Default::default()
            },
            ..small_spec()
        };
        let times: Vec<f64> = (1..=8).map(|i| 2.5 * i as f64).collect();
        let s = run_series(&m, &spec, &times, |_| Ok(())).unwrap();
        for w in s.windows(2) {
            assert!(w[1].norm <= w[0].norm + 1e-14);
        }
    }

    #[test]
    fn coarse_step_is_rejected() {
        let m = model(1e-3);
        let spec = GridSpec {
            dt: 0.01,
            ..small_spec()
        };
        let s = initial_state(&m, &spec).unwrap();
        assert!(matches!(propagate(&s, 1.0, &m), Err(Error::StepSize { .. })));
        assert!(matches!(propagate(&s, -1.0, &m), Err(Error::Config(_))));
    }

    #[test]
    fn mean_field_uncoupled_is_stationary() {
        let m = model(0.0);
        let spec = small_spec();
        let s = sn_initial_state(&spec).unwrap();
        let e = sn_propagate(&s, 15.0, &m, SnDrive::Full).unwrap();
        assert!(e.excitation().abs() < 1e-8);
        assert_abs_diff_eq!(e.norm_sqr(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn worker_count_does_not_change_results() {
        let m = model(1e-2);
        let spec = GridSpec {
            x_max: 30.0,
            nx: 256,
            ny: 64,
            ..small_spec()
        };
        let s0 = initial_state(&m, &spec).unwrap();
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let a = one.install(|| propagate(&s0, 1.0, &m).unwrap());
        let b = three.install(|| propagate(&s0, 1.0, &m).unwrap());
        assert_eq!(a, b);
        assert_eq!(measure(&a), measure(&b));
    }
}
