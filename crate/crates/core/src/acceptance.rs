//! The acceptance suite behind `ge-sim validate`.
//!
//! Each criterion runs its checks at the stated tolerances and reports the
//! measured numbers next to the targets.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use crate::cli::execute;
use crate::config::{Mode, RunConfig};
use crate::eigen::{bound_norm, bound_scattering_overlap, dipole_overlap_quadrature, overlap_j, BoxRule};
use crate::error::Result;
use crate::kgrid::KGrid;
use crate::model::{Model, HBAR};
use crate::observables::{
    feasibility, negativity, pex_numeric, pex_offres_included, pex_saddle_long, pex_saddle_short, visibility,
    visibility_closed_form, FeasibilityInput, NegativityMethod,
};
use crate::optomechanics::{
    derive_frequencies, gravity_evolved_optomech, lambda0, lambda0_short_form, long_time_state, squeezed_trajectory,
    CavityConfig, SPEED_OF_LIGHT,
};
use crate::oracle::{run_series, sn_run_series, GridSpec, SnDrive};
use crate::perturbation::evolve;
use crate::schrodinger_newton::{sn_pex, sn_visibility};

/// One measured quantity against its target.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub what: String,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub elapsed: Duration,
}

impl CriterionResult {
    /// `PASS [n] name (elapsed)` followed by failing checks.
    pub fn line(&self) -> String {
        let mut s = format!(
            "{} [{}] {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.elapsed.as_secs_f64()
        );
        for c in &self.checks {
            let _ = write!(s, "\n    {} {}", if c.passed { "ok  " } else { "FAIL" }, c.what);
        }
        s
    }
}

struct Checks(Vec<Check>);

impl Checks {
    fn new() -> Self {
        Checks(Vec::new())
    }

    fn add(&mut self, passed: bool, what: String) {
        self.0.push(Check { what, passed });
    }

    /// Folds an error into a failed check.
    fn attempt<T>(&mut self, what: &str, r: Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.add(false, format!("{what}: {e}"));
                None
            }
        }
    }
}

fn finish(id: u32, name: &'static str, start: Instant, limit: Option<f64>, mut checks: Checks) -> CriterionResult {
    let elapsed = start.elapsed();
    if let Some(limit) = limit {
        let secs = elapsed.as_secs_f64();
        checks.add(secs < limit, format!("runtime {secs:.2} s < {limit} s"));
    }
    CriterionResult {
        id,
        name,
        passed: checks.0.iter().all(|c| c.passed),
        checks: checks.0,
        elapsed,
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn model(g: f64, omega1: f64) -> Model {
    Model::dimensionless(g, 0.8, omega1, Complex64::new(0.5, 0.0)).expect("valid acceptance model")
}

pub fn criterion_1() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let rule = BoxRule::default();
    let n = bound_norm(&rule);
    c.add((n - 1.0).abs() <= 1e-10, format!("<b|b> = {n:.15} within 1e-10 of 1"));
    for k in [0.1, 0.5, 1.0, 2.0] {
        let o = bound_scattering_overlap(k, &rule).norm();
        c.add(o < 1e-8, format!("|<b|k>| = {o:.2e} < 1e-8 at k = {k}"));
    }
    let worst = (0..=60)
        .map(|i| {
            let k = -3.0 + 0.1 * i as f64;
            (overlap_j(k) - dipole_overlap_quadrature(k, &rule)).norm()
        })
        .fold(0.0, f64::max);
    c.add(
        worst <= 1e-6,
        format!("max |J_closed - J_quadrature| = {worst:.2e} <= 1e-6 on [-3, 3]"),
    );
    finish(1, "eigensystem", start, Some(10.0), c)
}

pub fn criterion_2() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let ms = [model(1e-3, 1.01), model(1e-3, 1.5)];
    for m in &ms {
        let w1 = m.omega1;
        let mut crossover = None;
        let mut last_short_better = None;
        for f in [0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 5.0, 10.0] {
            let t = f * m.t_sat;
            let Some(p) = c.attempt("numeric P_ex", pex_numeric(m, t)) else {
                continue;
            };
            let (es, el) = (rel(pex_saddle_short(m, t), p), rel(pex_saddle_long(m, t), p));
            if f <= 0.3 {
                c.add(
                    es <= 0.05,
                    format!(
                        "Omega1 = {w1}: t = {f} t_sat short-time saddle off by {:.2}% (<= 5%)",
                        100.0 * es
                    ),
                );
            }
            if f >= 3.0 {
                c.add(
                    el <= 0.05,
                    format!(
                        "Omega1 = {w1}: t = {f} t_sat long-time saddle off by {:.2}% (<= 5%)",
                        100.0 * el
                    ),
                );
            }
            let short_better = es < el;
            if last_short_better == Some(true) && !short_better && crossover.is_none() {
                crossover = Some(f);
            }
            last_short_better = Some(short_better);
        }
        let ok = crossover.is_some_and(|f| (0.3..=3.0).contains(&f));
        c.add(
            ok,
            format!("Omega1 = {w1}: saddle crossover at {crossover:?} t_sat, within [0.3, 3]"),
        );
    }
    for t in [100.0, 300.0, 1000.0] {
        if let (Some(a), Some(b)) = (
            c.attempt("P_ex", pex_numeric(&ms[0], t)),
            c.attempt("P_ex", pex_numeric(&ms[1], t)),
        ) {
            c.add(a > b, format!("tau = {t}: P_ex(1.01) = {a:.3e} > P_ex(1.50) = {b:.3e}"));
        }
    }
    finish(2, "excitation curves against saddle-point forms", start, Some(60.0), c)
}

pub fn criterion_3() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    for w1 in [1.01, 1.2, 1.5] {
        let m = model(1e-3, w1);
        for f in [5.0, 10.0, 20.0] {
            let t = f * m.t_sat;
            if let (Some(a), Some(b)) = (
                c.attempt("P_ex", pex_numeric(&m, t)),
                c.attempt("P_ex", pex_numeric(&m, 2.0 * t)),
            ) {
                let r = b / a;
                c.add(
                    (r - 2.0).abs() <= 0.06,
                    format!("Omega1 = {w1}: P(2t)/P(t) = {r:.4} at t = {f} t_sat (2 +- 3%)"),
                );
            }
        }
        for f in [0.05, 0.1] {
            let t = f * m.t_sat;
            if let (Some(a), Some(b)) = (
                c.attempt("P_ex", pex_numeric(&m, t)),
                c.attempt("P_ex", pex_numeric(&m, 2.0 * t)),
            ) {
                let r = b / a;
                c.add(
                    (r - 4.0).abs() <= 0.08,
                    format!("Omega1 = {w1}: P(2t)/P(t) = {r:.4} at t = {f} t_sat (4 +- 2%)"),
                );
            }
        }
    }
    finish(3, "golden-rule linearity and early quadratic growth", start, None, c)
}

pub fn criterion_4() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let fig2 = Model::dimensionless(1e-3, 0.7, 1.2, Complex64::new(0.5, 0.0)).expect("valid model");
    for m in [fig2, model(1e-3, 1.2)] {
        let worst = (0..400)
            .map(|i| {
                let t = 0.1 * i as f64;
                (visibility(&m, t, false, false).unwrap_or(f64::NAN) - visibility_closed_form(&m, t)).abs()
            })
            .fold(0.0, f64::max);
        c.add(
            worst <= 1e-12,
            format!("Omega0 = {}: max |V - closed form| = {worst:.2e} <= 1e-12", m.omega0),
        );
        let zero = (1..20).all(|i| visibility(&m, 2.0 * i as f64, true, false) == Ok(0.0));
        c.add(zero, "detected V = 0 exactly without off-resonant terms".into());
    }
    // The detected visibility oscillates on the off-resonant beats; its
    // envelope is the maximum over consecutive windows of 10 t_sat, sampled
    // every 0.1 t_sat.
    let m = model(1e-3, 1.2);
    let mut maxima = Vec::new();
    let mut worst: f64 = 0.0;
    for w in [10.0, 20.0, 30.0] {
        let mut best: f64 = 0.0;
        for j in 0..100 {
            let t = (w + 0.1 * j as f64) * m.t_sat;
            if let Some(v) = c.attempt("detected V", visibility(&m, t, true, true)) {
                best = best.max(v);
            }
        }
        worst = worst.max(best);
        maxima.push(best);
    }
    c.add(
        worst < 0.2,
        format!("max detected V = {worst:.4} < 0.2 over [10, 40) t_sat"),
    );
    let decreasing = maxima.windows(2).all(|p| p[1] < p[0]);
    c.add(decreasing, format!("window maxima of detected V {maxima:.4?} decrease"));
    finish(4, "interference visibility", start, None, c)
}

pub fn criterion_5() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    for w1 in [1.01, 1.2, 1.5] {
        let m = model(1e-3, w1);
        for f in [0.5, 3.0] {
            let t = f * m.t_sat;
            let (Some(p), Some(nc), Some(np)) = (
                c.attempt("P_ex", pex_numeric(&m, t)),
                c.attempt("N", negativity(&m, t, NegativityMethod::ClosedForm)),
                c.attempt("N", negativity(&m, t, NegativityMethod::PartialTranspose)),
            ) else {
                continue;
            };
            c.add(
                rel(2.0 * nc * nc, p) <= 1e-12,
                format!(
                    "Omega1 = {w1}, t = {f} t_sat: 2N^2 = {:.6e} vs P_ex = {p:.6e}",
                    2.0 * nc * nc
                ),
            );
            let d = (np - nc).abs();
            c.add(
                d <= 5.0 * p,
                format!("|N_pt - N_closed| = {d:.2e} <= 5 P_ex = {:.2e}", 5.0 * p),
            );
        }
    }
    finish(5, "negativity identity", start, None, c)
}

pub fn criterion_6() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let m = model(1e-3, 1.2);
    for f in [0.3, 1.0, 3.0, 10.0] {
        let t = f * m.t_sat;
        if let (Some(s), Some(q)) = (c.attempt("sn_pex", sn_pex(&m, t)), c.attempt("pex", pex_numeric(&m, t))) {
            let r = s / q;
            c.add(
                (r - 0.5).abs() <= 1e-9,
                format!("sn_pex / pex = {r:.12} at t = {f} t_sat"),
            );
        }
    }
    let t = 4.0 * m.t_sat;
    let (pre, post) = (sn_visibility(&m, t, false), sn_visibility(&m, t, true));
    c.add(
        (pre - post).abs() <= 1e-15,
        format!("mean-field V before {pre:.15} and after {post:.15} detection"),
    );
    let q = visibility(&m, t, true, false);
    c.add(
        q == Ok(0.0) && post > 0.0,
        format!("quantised detected V = {q:?} while mean-field V = {post:.4}"),
    );
    finish(6, "mean-field discriminator", start, None, c)
}

pub fn criterion_7() -> CriterionResult {
    criterion_7_with(&GridSpec::default())
}

/// Oracle cross-validation on a given grid.
pub fn criterion_7_with(spec: &GridSpec) -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let m = model(1e-3, 1.2);
    let t = 3.0 * m.t_sat;
    let grid = c.attempt("grid propagation", run_series(&m, spec, &[t], |_| Ok(())));
    let sn = c.attempt("mean-field propagation", sn_run_series(&m, spec, &[t], SnDrive::Full));
    let first_order = c.attempt("first-order P_ex", pex_offres_included(&m, t));
    let resonant = c.attempt("resonant P_ex", pex_numeric(&m, t));
    let n_first = c.attempt("first-order N", negativity(&m, t, NegativityMethod::Schmidt));
    if let (Some(g), Some(p), Some(pr), Some(n)) = (grid.as_ref().map(|g| g[0]), first_order, resonant, n_first) {
        let e = rel(g.p_ex, p);
        c.add(
            e <= 0.10,
            format!(
                "grid P_ex = {:.6e} vs first-order {p:.6e}: {:.3}% (<= 10%); resonant term alone {pr:.6e} ({:.1}%)",
                g.p_ex,
                100.0 * e,
                100.0 * rel(g.p_ex, pr)
            ),
        );
        let v = visibility_closed_form(&m, t);
        let ev = rel(g.visibility, v);
        c.add(
            ev <= 0.01,
            format!("grid V = {:.8} vs {v:.8}: {:.4}% (<= 1%)", g.visibility, 100.0 * ev),
        );
        let en = rel(g.negativity, n);
        c.add(
            en <= 0.15,
            format!(
                "grid N = {:.6e} vs first-order {n:.6e}: {:.2}% (<= 15%); sqrt(P_res/2) = {:.6e}",
                g.negativity,
                100.0 * en,
                (0.5 * pr).sqrt()
            ),
        );
        if let Some(s) = sn.as_ref().map(|s| s[0]) {
            let r = s.p_ex / g.p_ex;
            c.add(
                (r - 0.5).abs() <= 0.075,
                format!("grid mean-field / quantised P_ex = {r:.4} (0.5 +- 15%)"),
            );
        }
    }
    finish(7, "grid oracle cross-validation", start, Some(300.0), c)
}

/// Reference inputs: M/d^3 = 20 g/cm^3, one 12 h run per slot for a year.
pub fn feasibility_point() -> FeasibilityInput {
    FeasibilityInput {
        mass_ratio: 1.0,
        density: 2e4,
        alpha_abs: 0.7,
        omega_b: 1.0,
        omega0: None,
        tau1: 12.0 * 3600.0,
        t_tot: 365.25 * 86400.0,
        k_res: None,
        newton_g: crate::model::NEWTON_G,
    }
}

pub fn criterion_8() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    if let Some(r) = c.attempt("feasibility", feasibility(&feasibility_point())) {
        c.add(
            (0.8..=1.0).contains(&r.total_linear),
            format!(
                "total N p = {:.4} in [0.8, 1.0] (compound 1 - (1 - p)^N = {:.4})",
                r.total_linear, r.total
            ),
        );
        let e = rel(r.per_run, 1.3e-3);
        c.add(
            e <= 0.10,
            format!("per-run P = {:.4e}, {:.2}% from 0.13% (<= 10%)", r.per_run, 100.0 * e),
        );
        let ek = rel(r.k_res, 7.3e-5);
        c.add(
            ek <= 0.05,
            format!("k_res = {:.4e}, {:.2}% from 7.3e-5 (<= 5%)", r.k_res, 100.0 * ek),
        );
    }
    finish(8, "multi-run feasibility point", start, Some(1.0), c)
}

/// Cavity whose radiation pressure raises the mirror frequency by `ratio`.
pub fn tuned_cavity(ratio: f64) -> CavityConfig {
    let (ell, big_m, omega0) = (1e-2, 1e-9, 1.0);
    let stiff = (ratio * ratio - 1.0) * omega0 * omega0;
    let n = (stiff * big_m * ell * ell / HBAR * ell / (PI * SPEED_OF_LIGHT)).round();
    CavityConfig {
        ell,
        omega_c: PI * SPEED_OF_LIGHT * n / ell,
        mode: Some(n as u64),
        big_m,
        omega0,
        alpha: Complex64::new(0.5, 0.1),
        t_ini: -3.0,
        hbar: HBAR,
    }
}

pub fn criterion_9() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let cav = tuned_cavity(1.001);
    let (a, b) = (lambda0(&cav), lambda0_short_form(&cav));
    c.add(
        rel(a, b) <= 1e-12,
        format!("lambda0 forms {a:.6e} and {b:.6e}, ratio {:.12}", a / b),
    );
    if let Some((w1, lam)) = c.attempt("cavity", derive_frequencies(&cav)) {
        let t = cav.t_ini + 1.0 / (w1 - cav.omega0);
        if let (Some([_, b1]), Some((_, lim))) = (
            c.attempt("trajectory", squeezed_trajectory(&cav, t)),
            c.attempt("limit", long_time_state(&cav, t)),
        ) {
            let e = (b1.alpha - lim).norm() / (cav.alpha.norm() + lam);
            c.add(
                e <= 0.01,
                format!(
                    "Omega1/Omega0 = {:.6}: full trajectory vs limit state {:.3}% (<= 1%)",
                    w1 / cav.omega0,
                    100.0 * e
                ),
            );
        }
    }
    let m = model(1e-3, 1.2);
    let t = 3.0 * m.t_sat;
    let grid = KGrid::for_resonance(m.k_res, t);
    let same =
        (|| -> Result<bool> { Ok(gravity_evolved_optomech(&m, 0.0, t, true, &grid)? == evolve(&m, t, true, &grid)?) })(
        );
    c.add(
        same == Ok(true),
        "lambda0 = 0 reproduces the undisplaced first-order state field for field".into(),
    );
    if let Some(s) = c.attempt(
        "displaced state",
        gravity_evolved_optomech(&m, m.alpha.re, t, true, &grid),
    ) {
        let zero = s.resonant.amplitude.iter().all(|a| a.norm() == 0.0);
        c.add(zero, "alpha = lambda0 removes the resonant term".into());
    }
    finish(9, "optomechanical preparation", start, None, c)
}

/// Small configurations covering every tabulating mode.
pub fn determinism_configs() -> Vec<(Mode, RunConfig)> {
    let mut out: Vec<(Mode, RunConfig)> = ["fig2", "fig5", "eq24"]
        .iter()
        .map(|p| {
            let c = RunConfig::preset(p).expect("embedded preset");
            (c.mode.expect("preset mode"), c)
        })
        .collect();
    let base = r#"{"version": 1, "model": {"dimensionless": {"g": 1e-3, "omega0": 0.8, "omega1": 1.2, "alpha": [0.5, 0.1]}},
        "sweep": {"t_start": 0.5, "t_end": 20.0, "n_points": 6}, "methods": {"include_offres": true}"#;
    for mode in [Mode::Negativity, Mode::Sn] {
        out.push((mode, RunConfig::from_json(&format!("{base}}}")).expect("valid config")));
    }
    let oracle = format!(r#"{base}, "oracle": {{"grid": {{"x_max": 40.0, "nx": 256, "y_max": 10.0, "ny": 32}}}}}}"#);
    out.push((
        Mode::Oracle,
        RunConfig::from_json(&oracle.replace("\"t_end\": 20.0", "\"t_end\": 2.0")).expect("valid config"),
    ));
    let eigen = r#"{"version": 1, "eigen": {"k_min": -1.0, "k_max": 1.0, "n_points": 5}}"#;
    out.push((Mode::Eigen, RunConfig::from_json(eigen).expect("valid config")));
    out
}

type Files = Vec<(String, Vec<u8>)>;

pub fn criterion_10() -> CriterionResult {
    let start = Instant::now();
    let mut c = Checks::new();
    let pools: Vec<rayon::ThreadPool> = [1, 3]
        .iter()
        .map(|&n| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .expect("thread pool")
        })
        .collect();
    for (mode, cfg) in determinism_configs() {
        let runs: Vec<Result<Files>> = [&pools[0], &pools[0], &pools[1]]
            .iter()
            .map(|p| p.install(|| execute(mode, &cfg).map(|o| o.files)))
            .collect();
        match (&runs[0], &runs[1], &runs[2]) {
            (Ok(a), Ok(b), Ok(d)) => c.add(
                a == b && a == d,
                format!(
                    "{mode}: {} file(s) byte-identical across repeats and 1 vs 3 workers",
                    a.len()
                ),
            ),
            _ => c.add(false, format!("{mode}: run failed")),
        }
    }
    finish(10, "determinism", start, None, c)
}

pub fn run_all() -> Vec<CriterionResult> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(),
        criterion_7(),
        criterion_8(),
        criterion_9(),
        criterion_10(),
    ]
}
