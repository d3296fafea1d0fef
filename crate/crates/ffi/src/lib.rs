//! C interface to the ge-sim library.
//!
//! Models and grid oracles are opaque heap handles created by `*_new`
//! functions and released by the matching `*_free`. Every fallible call
//! returns a [`GeStatus`]; on failure [`ge_last_error_message`] describes the
//! cause until the next call on the same thread. Results are written through
//! out-pointers, which are left untouched on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe, UnwindSafe};
use std::ptr;

use ge_sim::observables::{self, FeasibilityInput, NegativityMethod, PexMethod};
use ge_sim::oracle::{self, AbsorberMode, GridSpec, GridWavefunction};
use ge_sim::schrodinger_newton::sn_pex;
use ge_sim::{derive_model, Error, Model, PhysicalConfig};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ResonanceOrdering = 3,
    ScaleSeparation = 4,
    Quadrature = 5,
    Truncation = 6,
    StepSize = 7,
    IntegratorDrift = 8,
    GridExtent = 9,
    CavityMode = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GePexMethod {
    Numeric = 0,
    GoldenRule = 1,
    SaddleShort = 2,
    SaddleLong = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeNegativityMethod {
    PartialTranspose = 0,
    ClosedForm = 1,
    Schmidt = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeAbsorberMode {
    Auto = 0,
    On = 1,
    Off = 2,
}

/// Opaque handle to a validated model.
pub struct GeModel(Model);

/// Opaque handle to a grid wavefunction and the model that drives it.
pub struct GeOracle {
    model: Model,
    state: GridWavefunction,
}

/// Grid parameters; obtain defaults from [`ge_grid_spec_default`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeGridSpec {
    pub x_max: f64,
    pub nx: usize,
    pub y_max: f64,
    pub ny: usize,
    pub dt: f64,
    pub absorber_mode: GeAbsorberMode,
    pub absorber_width_fraction: f64,
    pub absorber_strength: f64,
    /// Propagate only branch 0, only branch 1, or (when false) both.
    pub single_branch: bool,
    pub branch: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeMeasurement {
    pub tau: f64,
    pub norm: f64,
    pub p_ex: f64,
    pub visibility: f64,
    pub visibility_detected: f64,
    pub negativity: f64,
}

/// Multi-run feasibility inputs in SI units. Zero `omega0` or `k_res` selects
/// the defaults |omega_b| and the run-length tuning.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeFeasibilityInput {
    pub mass_ratio: f64,
    pub density: f64,
    pub alpha_abs: f64,
    pub omega_b: f64,
    pub omega0: f64,
    pub tau1: f64,
    pub t_tot: f64,
    pub k_res: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeFeasibilityReport {
    pub per_run: f64,
    pub n_runs: f64,
    pub total: f64,
    pub total_linear: f64,
    pub k_res: f64,
    pub t_sat: f64,
    pub g: f64,
    pub short_run: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GeStatus {
    match e {
        Error::ResonanceOrdering { .. } => GeStatus::ResonanceOrdering,
        Error::ScaleSeparation { .. } => GeStatus::ScaleSeparation,
        Error::QuadratureResolution(_) => GeStatus::Quadrature,
        Error::Truncation { .. } => GeStatus::Truncation,
        Error::StepSize { .. } => GeStatus::StepSize,
        Error::IntegratorDrift { .. } => GeStatus::IntegratorDrift,
        Error::GridExtent(_) => GeStatus::GridExtent,
        Error::CavityMode { .. } => GeStatus::CavityMode,
        Error::InvalidParameter { .. } | Error::MissingParameter(_) | Error::Config(_) | Error::Io(_) => {
            GeStatus::InvalidArgument
        }
    }
}

/// Runs `f`, recording errors and panics for [`ge_last_error_message`].
fn guard<F>(f: F) -> GeStatus
where
    F: FnOnce() -> Result<(), (GeStatus, String)> + UnwindSafe,
{
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(f) {
        Ok(Ok(())) => GeStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            GeStatus::Panic
        }
    }
}

fn lib<T>(r: ge_sim::Result<T>) -> Result<T, (GeStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GeStatus, String) {
    (GeStatus::NullPointer, format!("{what} is null"))
}

unsafe fn model_ref<'a>(m: *const GeModel) -> Result<&'a Model, (GeStatus, String)> {
    m.as_ref().map(|m| &m.0).ok_or_else(|| null("model"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), (GeStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(v);
    Ok(())
}

/// Message for the last failure on this thread, or null after a success.
/// The pointer stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn ge_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ge_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a model in internal units (|omega_b| = 1).
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_model_new(
    g: f64,
    omega0: f64,
    omega1: f64,
    alpha_re: f64,
    alpha_im: f64,
    out: *mut *mut GeModel,
) -> GeStatus {
    guard(|| {
        let m = lib(Model::dimensionless(
            g,
            omega0,
            omega1,
            Complex64::new(alpha_re, alpha_im),
        ))?;
        write(out, Box::into_raw(Box::new(GeModel(m))))
    })
}

/// Builds a model from a JSON object of SI inputs
/// (`m`, `M`, `d`, `L`, `Omega0`, `Omega1`, `alpha`, optional `G`, `hbar`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_model_from_si_json(json: *const c_char, out: *mut *mut GeModel) -> GeStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (GeStatus::InvalidArgument, e.to_string()))?;
        let cfg: PhysicalConfig = serde_json::from_str(text).map_err(|e| (GeStatus::InvalidArgument, e.to_string()))?;
        let m = lib(derive_model(&cfg))?;
        write(out, Box::into_raw(Box::new(GeModel(m))))
    })
}

/// # Safety
/// `model` must come from a `ge_model_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ge_model_free(model: *mut GeModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// Resonant wavenumber and saturation time of `model`.
///
/// # Safety
/// `model` must be a live handle; outputs must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_model_resonance(model: *const GeModel, k_res: *mut f64, t_sat: *mut f64) -> GeStatus {
    guard(|| {
        let m = model_ref(model)?;
        if t_sat.is_null() {
            return Err(null("t_sat"));
        }
        write(k_res, m.k_res)?;
        write(t_sat, m.t_sat)
    })
}

/// Excitation probability at dimensionless time `t`.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_pex(model: *const GeModel, t: f64, method: GePexMethod, out: *mut f64) -> GeStatus {
    guard(|| {
        let m = model_ref(model)?;
        let method = match method {
            GePexMethod::Numeric => PexMethod::Numeric,
            GePexMethod::GoldenRule => PexMethod::GoldenRule,
            GePexMethod::SaddleShort => PexMethod::SaddleShort,
            GePexMethod::SaddleLong => PexMethod::SaddleLong,
        };
        write(out, lib(observables::pex(m, t, method))?.value)
    })
}

/// Excitation probability under mean-field gravity.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_sn_pex(model: *const GeModel, t: f64, out: *mut f64) -> GeStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, lib(sn_pex(m, t))?)
    })
}

/// Qubit interference visibility.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_visibility(
    model: *const GeModel,
    t: f64,
    detected: bool,
    include_offres: bool,
    out: *mut f64,
) -> GeStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, lib(observables::visibility(m, t, detected, include_offres))?)
    })
}

/// Particle versus (qubit, oscillator) negativity.
///
/// # Safety
/// `model` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_negativity(
    model: *const GeModel,
    t: f64,
    method: GeNegativityMethod,
    out: *mut f64,
) -> GeStatus {
    guard(|| {
        let m = model_ref(model)?;
        let method = match method {
            GeNegativityMethod::PartialTranspose => NegativityMethod::PartialTranspose,
            GeNegativityMethod::ClosedForm => NegativityMethod::ClosedForm,
            GeNegativityMethod::Schmidt => NegativityMethod::Schmidt,
        };
        write(out, lib(observables::negativity(m, t, method))?)
    })
}

/// # Safety
/// `input` must be readable and `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_feasibility(input: *const GeFeasibilityInput, out: *mut GeFeasibilityReport) -> GeStatus {
    guard(|| {
        let i = input.as_ref().ok_or_else(|| null("input"))?;
        let opt = |v: f64| (v != 0.0).then_some(v);
        let r = lib(observables::feasibility(&FeasibilityInput {
            mass_ratio: i.mass_ratio,
            density: i.density,
            alpha_abs: i.alpha_abs,
            omega_b: i.omega_b,
            omega0: opt(i.omega0),
            tau1: i.tau1,
            t_tot: i.t_tot,
            k_res: opt(i.k_res),
            newton_g: ge_sim::model::NEWTON_G,
        }))?;
        write(
            out,
            GeFeasibilityReport {
                per_run: r.per_run,
                n_runs: r.n_runs,
                total: r.total,
                total_linear: r.total_linear,
                k_res: r.k_res,
                t_sat: r.t_sat,
                g: r.g,
                short_run: r.short_run,
            },
        )
    })
}

/// Default oracle grid.
#[no_mangle]
pub extern "C" fn ge_grid_spec_default() -> GeGridSpec {
    let d = GridSpec::default();
    GeGridSpec {
        x_max: d.x_max,
        nx: d.nx,
        y_max: d.y_max,
        ny: d.ny,
        dt: d.dt,
        absorber_mode: GeAbsorberMode::Auto,
        absorber_width_fraction: d.absorber.width_fraction,
        absorber_strength: d.absorber.strength,
        single_branch: false,
        branch: 0,
    }
}

fn grid_spec(s: &GeGridSpec) -> GridSpec {
    let mut spec = GridSpec {
        x_max: s.x_max,
        nx: s.nx,
        y_max: s.y_max,
        ny: s.ny,
        dt: s.dt,
        ..GridSpec::default()
    };
    spec.absorber.mode = match s.absorber_mode {
        GeAbsorberMode::Auto => AbsorberMode::Auto,
        GeAbsorberMode::On => AbsorberMode::On,
        GeAbsorberMode::Off => AbsorberMode::Off,
    };
    spec.absorber.width_fraction = s.absorber_width_fraction;
    spec.absorber.strength = s.absorber_strength;
    if s.single_branch {
        spec.branches = vec![s.branch];
    }
    spec
}

/// Prepares the initial grid state `|b> (|alpha>_0 + |alpha>_1) / sqrt 2`.
/// A null `spec` selects the default grid.
///
/// # Safety
/// `model` must be a live handle, `spec` null or readable, `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_oracle_new(
    model: *const GeModel,
    spec: *const GeGridSpec,
    out: *mut *mut GeOracle,
) -> GeStatus {
    guard(|| {
        let m = *model_ref(model)?;
        let spec = spec.as_ref().map_or_else(GridSpec::default, grid_spec);
        let state = lib(oracle::initial_state(&m, &spec))?;
        write(out, Box::into_raw(Box::new(GeOracle { model: m, state })))
    })
}

/// # Safety
/// `oracle` must come from [`ge_oracle_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn ge_oracle_free(oracle: *mut GeOracle) {
    if !oracle.is_null() {
        drop(Box::from_raw(oracle));
    }
}

/// Propagates the state forward to dimensionless time `tau_end`.
///
/// # Safety
/// `oracle` must be a live handle not shared with another thread.
#[no_mangle]
pub unsafe extern "C" fn ge_oracle_advance(oracle: *mut GeOracle, tau_end: f64) -> GeStatus {
    // The state is replaced only after a successful propagation, so a panic
    // leaves the handle usable.
    guard(AssertUnwindSafe(|| {
        let o = oracle.as_mut().ok_or_else(|| null("oracle"))?;
        o.state = lib(oracle::propagate(&o.state, tau_end, &o.model))?;
        Ok(())
    }))
}

/// # Safety
/// `oracle` must be a live handle; `out` valid for writes.
#[no_mangle]
pub unsafe extern "C" fn ge_oracle_measure(oracle: *const GeOracle, out: *mut GeMeasurement) -> GeStatus {
    guard(|| {
        let o = oracle.as_ref().ok_or_else(|| null("oracle"))?;
        let m = oracle::measure(&o.state);
        write(
            out,
            GeMeasurement {
                tau: m.tau,
                norm: m.norm,
                p_ex: m.p_ex,
                visibility: m.visibility,
                visibility_detected: m.visibility_detected,
                negativity: m.negativity,
            },
        )
    })
}
