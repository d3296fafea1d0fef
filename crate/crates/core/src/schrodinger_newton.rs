//! Mean-field counterfactual: the particle feels only the expectation value of
//! the oscillator position, so it is excited without becoming entangled.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::Result;
use crate::kgrid::KGrid;
use crate::model::Model;
use crate::observables::coherent_visibility;
use crate::perturbation::transition_amplitude;

/// `<Y>(t) = Re[alpha (e^{-i Omega_0 t} + e^{-i Omega_1 t})] / sqrt 2`.
pub fn sn_mean_displacement(model: &Model, t: f64) -> f64 {
    let z = Complex64::from_polar(1.0, -model.omega0 * t) + Complex64::from_polar(1.0, -model.omega1 * t);
    (model.alpha * z).re * FRAC_1_SQRT_2
}

/// Product state `particle ⊗ (qubit, oscillator)` at first order in g.
#[derive(Debug, Clone, PartialEq)]
pub struct SNEvolvedState {
    pub t: f64,
    pub kgrid: KGrid,
    /// Coefficient of `|b>`.
    pub bound: Complex64,
    /// `(g alpha / 2) e^{-ik^2 t} c_k(Omega_1)` on the grid.
    pub resonant: Vec<Complex64>,
    /// Whole first-order continuum amplitude, resonant part included.
    pub continuum: Vec<Complex64>,
    /// Qubit branch weights and coherent amplitudes, untouched by the particle.
    pub branches: [(Complex64, Complex64); 2],
}

/// First-order particle state driven by `g <Y>(t) X`.
pub fn sn_evolve(model: &Model, t: f64, kgrid: &KGrid) -> Result<SNEvolvedState> {
    kgrid.check_resolves(model.k_res, t)?;
    let (g, a) = (model.g, model.alpha);
    let resonant: Vec<Complex64> = kgrid
        .nodes
        .par_iter()
        .map(|&k| 0.5 * g * a * Complex64::from_polar(1.0, -k * k * t) * transition_amplitude(k, model.omega1, t))
        .collect();
    let continuum = kgrid
        .nodes
        .par_iter()
        .zip(&resonant)
        .map(|(&k, &r)| {
            let rest = a * transition_amplitude(k, model.omega0, t)
                + a.conj() * (transition_amplitude(k, -model.omega0, t) + transition_amplitude(k, -model.omega1, t));
            r + 0.5 * g * Complex64::from_polar(1.0, -k * k * t) * rest
        })
        .collect();
    let w = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let branches = [0, 1].map(|q| (w, a * Complex64::from_polar(1.0, -model.branch_frequency(q) * t)));
    Ok(SNEvolvedState {
        t,
        kgrid: kgrid.clone(),
        bound: Complex64::from_polar(1.0, t),
        resonant,
        continuum,
        branches,
    })
}

impl SNEvolvedState {
    fn weighted_norm(&self, amps: &[Complex64]) -> f64 {
        amps.iter()
            .zip(&self.kgrid.weights)
            .map(|(a, &w)| a.norm_sqr() * w)
            .sum()
    }

    pub fn resonant_norm_sqr(&self) -> f64 {
        self.weighted_norm(&self.resonant)
    }

    pub fn continuum_norm_sqr(&self) -> f64 {
        self.weighted_norm(&self.continuum)
    }

    /// Negativity between the particle and the rest, from the singular values
    /// of the (particle level) x (qubit branch) amplitude matrix.
    pub fn negativity(&self) -> f64 {
        // Columns: particle amplitude times each branch weight; the oscillator
        // states are orthogonal through the qubit label.
        let col = |q: usize| -> Vec<Complex64> {
            let w = self.branches[q].0;
            std::iter::once(self.bound * w)
                .chain(
                    self.continuum
                        .iter()
                        .zip(&self.kgrid.weights)
                        .map(|(c, &dk)| c * w * dk.sqrt()),
                )
                .collect()
        };
        let (c0, c1) = (col(0), col(1));
        let dot = |x: &[Complex64], y: &[Complex64]| -> Complex64 { x.iter().zip(y).map(|(a, b)| a.conj() * b).sum() };
        let (g00, g11, g01) = (dot(&c0, &c0).re, dot(&c1, &c1).re, dot(&c0, &c1));
        let tr = g00 + g11;
        let det = (g00 * g11 - g01.norm_sqr()).max(0.0);
        // For a normalised pure state N = sigma_1 sigma_2 = sqrt(det) / tr.
        det.sqrt() / tr
    }
}

/// `P_ex` from the resonant mean-field term; half the quantised value.
pub fn sn_pex(model: &Model, t: f64) -> Result<f64> {
    let grid = KGrid::for_resonance(model.k_res, t);
    Ok(sn_evolve(model, t, &grid)?.resonant_norm_sqr())
}

/// `P_ex` with the off-resonant mean-field terms included.
pub fn sn_pex_full(model: &Model, t: f64) -> Result<f64> {
    let grid = KGrid::for_resonance(model.k_res, t);
    Ok(sn_evolve(model, t, &grid)?.continuum_norm_sqr())
}

/// Visibility under mean-field gravity; detection of the particle does not change it.
pub fn sn_visibility(model: &Model, t: f64, _detected: bool) -> f64 {
    coherent_visibility(model, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::{pex_numeric, visibility};
    use crate::perturbation::evolve;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn model(g: f64) -> Model {
        Model::dimensionless(g, 0.8, 1.2, Complex64::new(0.5, 0.0)).unwrap()
    }

    #[test]
    fn mean_displacement_examples() {
        let m = model(1e-3);
        assert_abs_diff_eq!(sn_mean_displacement(&m, 0.0), 2f64.sqrt() * 0.5, epsilon = 1e-15);
        let m0 = m.with_alpha(Complex64::new(0.0, 0.0)).unwrap();
        assert_eq!(sn_mean_displacement(&m0, 3.7), 0.0);
        let mc = Model::dimensionless(1e-3, 0.5, 1.0 + 0.0 + 0.5 + 0.5, Complex64::new(0.3, 0.2)).unwrap();
        let period = 2.0 * PI / 0.5;
        for t in [0.3, 4.1, 17.0] {
            assert_abs_diff_eq!(
                sn_mean_displacement(&mc, t),
                sn_mean_displacement(&mc, t + period),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn no_coupling_means_free_evolution() {
        let m = model(0.0);
        let s = sn_evolve(&m, 5.0, &KGrid::for_resonance(m.k_res, 5.0)).unwrap();
        assert!(s.continuum.iter().all(|c| c.norm() == 0.0));
        assert_eq!(s.bound, Complex64::from_polar(1.0, 5.0));
        assert_eq!(sn_pex(&m, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn resonant_coefficient_is_half_the_quantised_one() {
        let m = model(1e-3);
        let t = 2.5 * m.t_sat;
        let grid = KGrid::for_resonance(m.k_res, t);
        let sn = sn_evolve(&m, t, &grid).unwrap();
        let q = evolve(&m, t, false, &grid).unwrap();
        for (a, b) in sn.resonant.iter().zip(&q.resonant.amplitude) {
            if b.norm() > 1e-14 {
                // The quantised amplitude carries the 1/sqrt 2 branch weight.
                let ratio = a / (b * 2f64.sqrt());
                assert!((ratio - 0.5).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn probability_is_half_the_quantised_one() {
        let m = model(1e-3);
        for f in [0.2, 1.0, 5.0, 12.0] {
            let t = f * m.t_sat;
            let r = sn_pex(&m, t).unwrap() / pex_numeric(&m, t).unwrap();
            assert_abs_diff_eq!(r, 0.5, epsilon = 1e-9);
        }
    }

    #[test]
    fn product_state_has_no_negativity() {
        let m = model(1e-2);
        let t = 3.0 * m.t_sat;
        let s = sn_evolve(&m, t, &KGrid::for_resonance(m.k_res, t)).unwrap();
        assert!(s.continuum_norm_sqr() > 0.0);
        assert!(s.negativity() < 1e-7, "{}", s.negativity());
    }

    #[test]
    fn visibility_ignores_detection() {
        let m = model(1e-3);
        assert_eq!(sn_visibility(&m, 7.3, true), sn_visibility(&m, 7.3, false));
        assert_eq!(sn_visibility(&m, 0.0, true), 1.0);
        let m2 = Model::dimensionless(1e-3, 0.8, 1.3, Complex64::new(0.5, 0.0)).unwrap();
        assert_abs_diff_eq!(sn_visibility(&m2, PI / 0.5, true), 0.606_530_66, epsilon = 1e-8);
    }

    #[test]
    fn discriminator_between_quantised_and_mean_field_gravity() {
        let m = model(1e-3);
        let t = 4.0 * m.t_sat;
        let floor = (-2.0 * m.alpha.norm_sqr()).exp();
        assert_eq!(visibility(&m, t, true, false).unwrap(), 0.0);
        let pre = sn_visibility(&m, t, false);
        let post = sn_visibility(&m, t, true);
        assert_eq!(pre, post);
        assert!(post > floor && floor > 0.0);
    }
}
