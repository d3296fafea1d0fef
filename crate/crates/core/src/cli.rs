//! Mode dispatch behind the `ge-sim` binary.
//!
//! Each mode turns a [`RunConfig`] into files held in memory; writing them is
//! a separate step so that runs can be compared byte for byte.

use std::fs;
use std::path::{Path, PathBuf};

use crate::acceptance;
use crate::config::{Mode, RunConfig};
use crate::eigen::{bound_norm, bound_scattering_overlap, dipole_overlap_quadrature, overlap_j, BoxRule};
use crate::error::{Error, Result};
use crate::kgrid::KGrid;
use crate::model::Model;
use crate::observables::{
    coherent_visibility, feasibility, negativity, pex, pex_numeric, pex_offres_included, visibility,
    visibility_closed_form, NegativityMethod,
};
use crate::optomechanics::{derive_frequencies, gravity_evolved_optomech, lambda0_short_form, optomech_visibility};
use crate::oracle::{run_series, sn_run_series, write_snapshot};
use crate::schrodinger_newton::{sn_pex, sn_pex_full, sn_visibility};
use crate::series::{config_hash, SeriesTable};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_PHYSICS: i32 = 3;
pub const EXIT_VALIDATION: i32 = 4;

/// Worker-count override for the data-parallel kernels.
pub const THREADS_ENV: &str = "GE_SIM_THREADS";

/// Files produced by one run, not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub mode: Mode,
    pub hash: String,
    pub files: Vec<(String, Vec<u8>)>,
    /// Lines for standard output.
    pub report: Vec<String>,
    /// False when a validation criterion failed.
    pub passed: bool,
}

fn label(name: &str, model: &Model, several: bool) -> String {
    if several {
        format!("{name}[omega1={}]", model.omega1)
    } else {
        name.to_string()
    }
}

fn sweep_times(cfg: &RunConfig, model: &Model) -> Result<Vec<f64>> {
    cfg.sweep
        .as_ref()
        .ok_or_else(|| Error::Config("no sweep block".into()))?
        .internal_times(model)
}

fn eigen_table(cfg: &RunConfig) -> Result<SeriesTable> {
    let e = cfg.eigen;
    let rule = BoxRule::default();
    let norm = bound_norm(&rule);
    let mut t = SeriesTable::new([
        "k",
        "J_re",
        "J_im",
        "J_abs2",
        "J_quadrature_re",
        "J_quadrature_im",
        "J_abs_error",
        "bound_overlap_abs",
        "bound_norm",
    ]);
    for i in 0..e.n_points {
        let k = e.k_min + (e.k_max - e.k_min) * i as f64 / (e.n_points - 1) as f64;
        let j = overlap_j(k);
        let q = dipole_overlap_quadrature(k, &rule);
        let b = bound_scattering_overlap(k, &rule);
        t.push(vec![
            k,
            j.re,
            j.im,
            j.norm_sqr(),
            q.re,
            q.im,
            (j - q).norm(),
            b.norm(),
            norm,
        ])?;
    }
    Ok(t)
}

fn pex_table(cfg: &RunConfig, models: &[Model]) -> Result<SeriesTable> {
    let several = models.len() > 1;
    let mut cols = vec!["tau".to_string()];
    for m in models {
        cols.push(label("t_over_tsat", m, several));
        for method in &cfg.methods.pex {
            cols.push(label(&format!("pex_{}", method.name()), m, several));
        }
        if cfg.methods.include_offres {
            cols.push(label("pex_offres_included", m, several));
        }
    }
    let mut t = SeriesTable::new(cols);
    for tau in sweep_times(cfg, &models[0])? {
        let mut row = vec![tau];
        for m in models {
            row.push(tau / m.t_sat);
            for &method in &cfg.methods.pex {
                row.push(pex(m, tau, method)?.value);
            }
            if cfg.methods.include_offres {
                row.push(pex_offres_included(m, tau)?);
            }
        }
        t.push(row)?;
    }
    Ok(t)
}

fn visibility_table(cfg: &RunConfig, models: &[Model]) -> Result<SeriesTable> {
    let several = models.len() > 1;
    let offres = cfg.methods.include_offres;
    let mut cols = vec!["tau".to_string()];
    for m in models {
        cols.push(label("V_undetected", m, several));
        cols.push(label("V_closed_form", m, several));
        cols.push(label("V_detected", m, several));
        if offres {
            cols.push(label("V_detected_offres", m, several));
        }
    }
    let mut t = SeriesTable::new(cols);
    for tau in sweep_times(cfg, &models[0])? {
        let mut row = vec![tau];
        for m in models {
            row.push(visibility(m, tau, false, false)?);
            row.push(visibility_closed_form(m, tau));
            row.push(visibility(m, tau, true, false)?);
            if offres {
                row.push(visibility(m, tau, true, true)?);
            }
        }
        t.push(row)?;
    }
    Ok(t)
}

fn negativity_table(cfg: &RunConfig, models: &[Model]) -> Result<SeriesTable> {
    let several = models.len() > 1;
    let offres = cfg.methods.include_offres;
    let mut cols = vec!["tau".to_string()];
    for m in models {
        cols.push(label("pex_numeric", m, several));
        cols.push(label("N_closed_form", m, several));
        cols.push(label("N_partial_transpose", m, several));
        if offres {
            cols.push(label("N_schmidt_offres", m, several));
        }
    }
    let mut t = SeriesTable::new(cols);
    for tau in sweep_times(cfg, &models[0])? {
        let mut row = vec![tau];
        for m in models {
            row.push(pex_numeric(m, tau)?);
            row.push(negativity(m, tau, NegativityMethod::ClosedForm)?);
            row.push(negativity(m, tau, NegativityMethod::PartialTranspose)?);
            if offres {
                row.push(negativity(m, tau, NegativityMethod::Schmidt)?);
            }
        }
        t.push(row)?;
    }
    Ok(t)
}

fn sn_table(cfg: &RunConfig, models: &[Model]) -> Result<SeriesTable> {
    let several = models.len() > 1;
    let mut cols = vec!["tau".to_string()];
    for m in models {
        for c in [
            "pex_quantised",
            "pex_sn",
            "pex_sn_full",
            "pex_ratio",
            "V_sn",
            "V_quantised_detected",
        ] {
            cols.push(label(c, m, several));
        }
    }
    let mut t = SeriesTable::new(cols);
    for tau in sweep_times(cfg, &models[0])? {
        let mut row = vec![tau];
        for m in models {
            let (q, s) = (pex_numeric(m, tau)?, sn_pex(m, tau)?);
            row.push(q);
            row.push(s);
            row.push(sn_pex_full(m, tau)?);
            row.push(if q > 0.0 { s / q } else { f64::NAN });
            row.push(sn_visibility(m, tau, true));
            row.push(visibility(m, tau, true, cfg.methods.include_offres)?);
        }
        t.push(row)?;
    }
    Ok(t)
}

fn optomech_table(cfg: &RunConfig, model: &Model) -> Result<SeriesTable> {
    let cav = cfg
        .cavity
        .as_ref()
        .ok_or_else(|| Error::Config("no cavity block".into()))?;
    let (omega1, lam) = derive_frequencies(cav)?;
    let lam_short = lambda0_short_form(cav);
    let mut t = SeriesTable::new([
        "tau",
        "omega1_over_omega0",
        "lambda0",
        "lambda0_short_form",
        "V_displaced",
        "V_undisplaced",
        "pex_displaced",
        "pex_undisplaced",
    ]);
    for tau in sweep_times(cfg, model)? {
        let grid = KGrid::for_resonance(model.k_res, tau);
        let state = gravity_evolved_optomech(model, lam, tau, false, &grid)?;
        t.push(vec![
            tau,
            omega1 / cav.omega0,
            lam,
            lam_short,
            optomech_visibility(model, lam, tau, None),
            coherent_visibility(model, tau),
            state.resonant_norm_sqr(),
            pex_numeric(model, tau)?,
        ])?;
    }
    Ok(t)
}

fn oracle_run(cfg: &RunConfig, model: &Model, files: &mut Vec<(String, Vec<u8>)>) -> Result<SeriesTable> {
    let times = sweep_times(cfg, model)?;
    let o = &cfg.oracle;
    let rows = if o.mean_field {
        sn_run_series(model, &o.grid, &times, o.drive)?
    } else {
        let mut index = 0usize;
        run_series(model, &o.grid, &times, |state| {
            if o.snapshots {
                let mut buf = Vec::new();
                write_snapshot(state, &mut buf)?;
                files.push((format!("snapshot_{index:04}.bin"), buf));
            }
            index += 1;
            Ok(())
        })?
    };
    let mut t = SeriesTable::new(["tau", "norm", "P_ex", "V", "V_detected", "N"]);
    for r in rows {
        t.push(vec![
            r.tau,
            r.norm,
            r.p_ex,
            r.visibility,
            r.visibility_detected,
            r.negativity,
        ])?;
    }
    Ok(t)
}

fn feasibility_table(cfg: &RunConfig) -> Result<SeriesTable> {
    let input = cfg
        .feasibility
        .as_ref()
        .ok_or_else(|| Error::Config("no feasibility block".into()))?;
    let r = feasibility(input)?;
    let mut t = SeriesTable::new([
        "per_run",
        "n_runs",
        "total",
        "total_linear",
        "k_res",
        "t_sat_s",
        "g",
        "short_run",
    ]);
    t.push(vec![
        r.per_run,
        r.n_runs,
        r.total,
        r.total_linear,
        r.k_res,
        r.t_sat,
        r.g,
        if r.short_run { 1.0 } else { 0.0 },
    ])?;
    Ok(t)
}

/// Runs `mode` entirely in memory.
pub fn execute(mode: Mode, cfg: &RunConfig) -> Result<RunOutput> {
    cfg.validate(mode)?;
    let hash = config_hash(cfg.canonical_json().as_bytes());
    let stem = cfg.output.stem.clone().unwrap_or_else(|| mode.name().to_string());
    let mut files = Vec::new();
    let mut report = Vec::new();
    let mut passed = true;
    let table = match mode {
        Mode::Eigen => eigen_table(cfg)?,
        Mode::Feasibility => feasibility_table(cfg)?,
        Mode::Validate => {
            let results = acceptance::run_all();
            let mut t = SeriesTable::new(["criterion", "passed"]);
            for r in &results {
                report.push(r.line());
                t.push(vec![r.id as f64, if r.passed { 1.0 } else { 0.0 }])?;
            }
            passed = results.iter().all(|r| r.passed);
            t
        }
        _ => {
            let models = cfg.models()?;
            match mode {
                Mode::Pex => pex_table(cfg, &models)?,
                Mode::Visibility => visibility_table(cfg, &models)?,
                Mode::Negativity => negativity_table(cfg, &models)?,
                Mode::Sn => sn_table(cfg, &models)?,
                Mode::Optomech => optomech_table(cfg, &models[0])?,
                Mode::Oracle => {
                    if models.len() != 1 {
                        return Err(Error::Config("oracle mode takes a single omega1".into()));
                    }
                    oracle_run(cfg, &models[0], &mut files)?
                }
                Mode::Eigen | Mode::Feasibility | Mode::Validate => unreachable!(),
            }
        }
    };
    let csv = table.to_csv_string(&hash, mode.name()).into_bytes();
    files.insert(0, (format!("{stem}.csv"), csv));
    Ok(RunOutput {
        mode,
        hash,
        files,
        report,
        passed,
    })
}

/// Writes every file of `out` under `dir`, creating it if needed.
pub fn write_outputs(out: &RunOutput, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::Config(format!("cannot create {}: {e}", dir.display())))?;
    out.files
        .iter()
        .map(|(name, bytes)| {
            let p = dir.join(name);
            fs::write(&p, bytes).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display())))?;
            Ok(p)
        })
        .collect()
}

/// Loads the configuration named on the command line.
pub fn load_config(mode: Mode, config: Option<&Path>, preset: Option<&str>) -> Result<RunConfig> {
    match (config, preset) {
        (Some(_), Some(_)) => Err(Error::Config("give either --config or --preset, not both".into())),
        (Some(p), None) => {
            let text = fs::read_to_string(p).map_err(|e| Error::Config(format!("cannot read {}: {e}", p.display())))?;
            RunConfig::from_json(&text)
        }
        (None, Some(name)) => RunConfig::preset(name),
        (None, None) if mode == Mode::Validate => RunConfig::from_json(r#"{"version": 1}"#),
        (None, None) => Err(Error::Config("--config or --preset is required".into())),
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_config() {
        EXIT_CONFIG
    } else {
        EXIT_PHYSICS
    }
}

/// Reads [`THREADS_ENV`]; `None` when unset.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::Config(format!(
                "{THREADS_ENV} = {v:?} is not a positive integer"
            ))),
        },
    }
}

/// Full command: load, run, write, report. Returns the process exit code.
pub fn run(mode: Mode, config: Option<&Path>, out_dir: Option<&Path>, preset: Option<&str>) -> i32 {
    let result = load_config(mode, config, preset).and_then(|cfg| {
        let dir = out_dir
            .map(Path::to_path_buf)
            .or_else(|| cfg.output.dir.clone())
            .unwrap_or_else(|| PathBuf::from("."));
        let out = execute(mode, &cfg)?;
        let written = write_outputs(&out, &dir)?;
        Ok((out, written))
    });
    match result {
        Ok((out, written)) => {
            for line in &out.report {
                println!("{line}");
            }
            for p in written {
                log::info!("wrote {}", p.display());
            }
            if out.passed {
                EXIT_OK
            } else {
                EXIT_VALIDATION
            }
        }
        Err(e) => {
            eprintln!("ge-sim {mode}: {e}");
            exit_code(&e)
        }
    }
}
