//! Grid oracle against the perturbative modules on reduced grids.

use ge_sim::observables::{pex_offres_included, visibility};
use ge_sim::oracle::{run_series, sn_run_series, Absorber, AbsorberMode, GridSpec, SnDrive};
use ge_sim::schrodinger_newton::{sn_pex, sn_pex_full};
use ge_sim::Model;
use num_complex::Complex64;

fn model(g: f64) -> Model {
    Model::dimensionless(g, 0.8, 1.2, Complex64::new(0.5, 0.0)).unwrap()
}

fn reduced() -> GridSpec {
    GridSpec {
        x_max: 60.0,
        nx: 512,
        ..GridSpec::default()
    }
}

#[test]
fn first_order_gap_shrinks_with_coupling() {
    let gap = |g: f64| {
        let m = model(g);
        let t = m.t_sat;
        let grid = run_series(&m, &reduced(), &[t], |_| Ok(())).unwrap()[0];
        let p = pex_offres_included(&m, t).unwrap();
        ((grid.p_ex - p) / p).abs()
    };
    let (big, small) = (gap(1e-2), gap(1e-3));
    assert!(small < big, "gap {small:.3e} at g = 1e-3 vs {big:.3e} at 1e-2");
    assert!(small < 1e-3);
}

#[test]
fn doubling_x_nodes_keeps_excitation() {
    let m = model(1e-3);
    let t = m.t_sat;
    let coarse = run_series(&m, &reduced(), &[t], |_| Ok(())).unwrap()[0];
    let fine = GridSpec { nx: 1024, ..reduced() };
    let fine = run_series(&m, &fine, &[t], |_| Ok(())).unwrap()[0];
    assert!(((fine.p_ex - coarse.p_ex) / coarse.p_ex).abs() < 0.01);
}

#[test]
fn detected_visibility_matches_first_order() {
    let m = model(1e-3);
    let t = m.t_sat;
    let grid = run_series(&m, &reduced(), &[t], |_| Ok(())).unwrap()[0];
    let pert = visibility(&m, t, true, true).unwrap();
    assert!(
        ((grid.visibility_detected - pert) / pert).abs() < 0.02,
        "{} vs {pert}",
        grid.visibility_detected
    );
}

#[test]
fn norm_is_conserved_over_ten_saturation_times() {
    let m = model(1e-3);
    let spec = GridSpec {
        x_max: 60.0,
        nx: 256,
        ny: 32,
        absorber: Absorber {
            mode: AbsorberMode::Off,
            ..Absorber::default()
        },
        ..GridSpec::default()
    };
    let r = run_series(&m, &spec, &[10.0 * m.t_sat], |_| Ok(())).unwrap()[0];
    assert!((r.norm - 1.0).abs() < 1e-6, "{}", r.norm);
}

#[test]
fn mean_field_grid_reproduces_perturbation() {
    let m = model(1e-3);
    let t = 3.0 * m.t_sat;
    let r = sn_run_series(&m, &GridSpec::default(), &[t], SnDrive::Full).unwrap()[0];
    let resonant = sn_pex(&m, t).unwrap();
    assert!(((r.p_ex - resonant) / resonant).abs() < 0.10);
    let full = sn_pex_full(&m, t).unwrap();
    assert!(((r.p_ex - full) / full).abs() < 1e-3);
    assert_eq!(r.negativity, 0.0);
}

#[test]
fn off_resonant_tone_matters_less_with_time() {
    let m = model(1e-3);
    let times: Vec<f64> = [1.0, 4.0, 12.0].iter().map(|f| f * m.t_sat).collect();
    let spec = GridSpec::default();
    let full = sn_run_series(&m, &spec, &times, SnDrive::Full).unwrap();
    let tone = sn_run_series(&m, &spec, &times, SnDrive::ResonantTone).unwrap();
    let gaps: Vec<f64> = full
        .iter()
        .zip(&tone)
        .map(|(a, b)| (a.p_ex / b.p_ex - 1.0).abs())
        .collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{gaps:?}");
}
