//! Closed-form eigenstates of the reflectionless well `P^2 - 2 / cosh^2 X`.
//!
//! The well has a single bound state `1 / (sqrt 2 cosh X)` at energy -1 and a
//! delta-normalised continuum `(tanh X - i k) e^{ikX} / (sqrt(2 pi) (1 - i k))`
//! at energy `k^2`. Improper integrals over X are replaced by a finite box
//! `[-x_max, x_max]`; the truncation error scales as `e^{-x_max}`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::kgrid::KGrid;
use crate::quadrature::{integrate_complex, integrate_real, BOX_PANEL_ORDER};

/// Default half-width of the real-space box.
pub const BOX_HALF_WIDTH: f64 = 40.0;

/// Bound-state energy in internal units.
pub const BOUND_ENERGY: f64 = -1.0;

/// Exact value of the integral of |J_k|^2 over the whole k axis.
pub const J_ABS2_INTEGRAL: f64 = PI * PI / 12.0;

/// Overflow-free 1/cosh.
pub fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// Bound-state amplitude `1 / (sqrt 2 cosh X)`.
pub fn eval_bound(x: f64) -> f64 {
    FRAC_1_SQRT_2 * sech(x)
}

/// Scattering-state amplitude at wavenumber `k`.
pub fn eval_scattering(k: f64, x: f64) -> Complex64 {
    let num = Complex64::new(x.tanh(), -k);
    let den = Complex64::new(1.0, -k) * (2.0 * PI).sqrt();
    num / den * Complex64::from_polar(1.0, k * x)
}

/// Dipole matrix element `J_k = <k| X |b>`.
pub fn overlap_j(k: f64) -> Complex64 {
    let s = 0.5 * PI.sqrt() * sech(0.5 * PI * k);
    Complex64::new(s, 0.0) / Complex64::new(1.0, k)
}

/// `|J_k|^2 = (pi / 4) / ((1 + k^2) cosh^2(k pi / 2))`.
pub fn overlap_j_abs2(k: f64) -> f64 {
    let s = sech(0.5 * PI * k);
    0.25 * PI * s * s / (1.0 + k * k)
}

/// Real-space quadrature box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxRule {
    pub half_width: f64,
    pub panels: usize,
}

impl Default for BoxRule {
    fn default() -> Self {
        // 160 panels of 64 points: ~10^4 nodes over [-40, 40].
        Self {
            half_width: BOX_HALF_WIDTH,
            panels: 160,
        }
    }
}

impl BoxRule {
    fn real<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        integrate_real(f, -self.half_width, self.half_width, self.panels, BOX_PANEL_ORDER)
    }

    fn complex<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        integrate_complex(f, -self.half_width, self.half_width, self.panels, BOX_PANEL_ORDER)
    }
}

/// `<b|b>` by quadrature.
pub fn bound_norm(rule: &BoxRule) -> f64 {
    rule.real(|x| eval_bound(x).powi(2))
}

/// `<b|k>` by quadrature.
pub fn bound_scattering_overlap(k: f64, rule: &BoxRule) -> Complex64 {
    rule.complex(|x| eval_scattering(k, x) * eval_bound(x))
}

/// `<k| X |b>` by quadrature, the independent route to [`overlap_j`].
pub fn dipole_overlap_quadrature(k: f64, rule: &BoxRule) -> Complex64 {
    rule.complex(|x| eval_scattering(k, x).conj() * (x * eval_bound(x)))
}

/// Sifts `test_fn` with the box-truncated continuum overlap:
/// returns `sum_k' w_k' <k'|k>_box f(k')`, which tends to `f(k)`.
///
/// The box overlap oscillates in `k'` with period `2 pi / x_max`; the grid must
/// place several nodes per period or the sum is meaningless.
pub fn delta_normalization_check<F: Fn(f64) -> f64>(k: f64, test_fn: F, grid: &KGrid, rule: &BoxRule) -> Result<f64> {
    let period = 2.0 * PI / rule.half_width;
    let gap = grid.max_spacing();
    if gap > period / 8.0 {
        return Err(Error::QuadratureResolution(format!(
            "k-grid spacing {gap:.3e} exceeds 1/8 of the overlap period {period:.3e}"
        )));
    }
    let (xs, wx) = crate::quadrature::composite_rule(-rule.half_width, rule.half_width, rule.panels, BOX_PANEL_ORDER);
    let psi_k: Vec<Complex64> = xs.iter().map(|&x| eval_scattering(k, x)).collect();
    let mut total = 0.0;
    for (&kp, &wk) in grid.nodes.iter().zip(&grid.weights) {
        let f = test_fn(kp);
        if f == 0.0 {
            continue;
        }
        let overlap: Complex64 = xs
            .iter()
            .zip(&wx)
            .zip(&psi_k)
            .map(|((&x, &w), &p)| eval_scattering(kp, x).conj() * p * w)
            .sum();
        total += wk * f * overlap.re;
    }
    Ok(total)
}

/// Samples of the bound state on `[x_min, x_max]`.
pub fn bound_samples(x_min: f64, x_max: f64, n: usize) -> Vec<(f64, Complex64)> {
    linspace(x_min, x_max, n)
        .map(|x| (x, Complex64::new(eval_bound(x), 0.0)))
        .collect()
}

/// Samples of the scattering state at wavenumber `k`.
pub fn scattering_samples(k: f64, x_min: f64, x_max: f64, n: usize) -> Vec<(f64, Complex64)> {
    linspace(x_min, x_max, n).map(|x| (x, eval_scattering(k, x))).collect()
}

fn linspace(a: f64, b: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (b - a) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| a + step * i as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bound_state_values() {
        assert_abs_diff_eq!(eval_bound(0.0), 0.5f64.sqrt(), epsilon = 1e-15);
        assert_eq!(eval_bound(3.0), eval_bound(-3.0));
        assert!(eval_bound(0.0) > eval_bound(0.1));
        assert_abs_diff_eq!(bound_norm(&BoxRule::default()), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn scattering_state_values() {
        assert_eq!(eval_scattering(0.0, 0.0).norm(), 0.0);
        let far = eval_scattering(1.0, 50.0).norm();
        assert_abs_diff_eq!(far, 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-6);
        for &k in &[0.1, 0.5, 1.0, 2.0] {
            assert!(bound_scattering_overlap(k, &BoxRule::default()).norm() < 1e-8);
        }
    }

    #[test]
    fn parity_of_scattering_states() {
        for &(k, x) in &[(0.3, 1.2), (1.7, -0.4), (2.5, 3.3)] {
            assert_abs_diff_eq!(
                eval_scattering(k, -x).norm(),
                eval_scattering(-k, x).norm(),
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn dipole_element_examples() {
        assert_abs_diff_eq!(overlap_j(0.0).re, 0.886_226_925_452_758, epsilon = 1e-15);
        assert_abs_diff_eq!(overlap_j(1.7).norm(), overlap_j(-1.7).norm(), epsilon = 1e-16);
        let q = dipole_overlap_quadrature(0.3, &BoxRule::default());
        assert_abs_diff_eq!((q - overlap_j(0.3)).norm(), 0.0, epsilon = 1e-6);
        for &k in &[-2.0, 0.0, 0.7, 3.0] {
            assert_abs_diff_eq!(overlap_j(k).norm_sqr(), overlap_j_abs2(k), epsilon = 1e-15);
        }
        assert!(overlap_j_abs2(3.0) / overlap_j_abs2(0.0) < 1e-3);
    }

    #[test]
    fn total_dipole_weight_is_pi_squared_over_twelve() {
        let v = integrate_real(overlap_j_abs2, -30.0, 30.0, 600, 12);
        assert_abs_diff_eq!(v, J_ABS2_INTEGRAL, epsilon = 1e-13);
    }

    #[test]
    fn sifting_examples() {
        let grid = KGrid::uniform(4.0, 800);
        let rule = BoxRule::default();
        let gauss = |c: f64| move |k: f64| (-(k - c) * (k - c) / (2.0 * 0.04)).exp();
        let v = delta_normalization_check(0.5, gauss(0.5), &grid, &rule).unwrap();
        assert!((v - 1.0).abs() < 0.02, "sifted {v}");
        assert_eq!(delta_normalization_check(0.5, |_| 0.0, &grid, &rule).unwrap(), 0.0);
        let off = delta_normalization_check(0.5, gauss(2.0), &grid, &rule).unwrap();
        assert!(off.abs() < 1e-6, "sifted {off}");
    }

    #[test]
    fn sifting_rejects_coarse_grid() {
        let grid = KGrid::uniform(4.0, 8);
        assert!(matches!(
            delta_normalization_check(0.5, |k| k, &grid, &BoxRule::default()),
            Err(Error::QuadratureResolution(_))
        ));
    }
}
