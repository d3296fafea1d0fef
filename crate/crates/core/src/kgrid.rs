//! Wavenumber quadrature grids for integrals over the scattering continuum.
//!
//! The excitation kernel `sin^2(theta t / 2) / theta^2` with
//! `theta = k^2 - k_res^2` oscillates in k with local period `pi / (|k| t)`,
//! so panels shrink as 1/t wherever the amplitude is still significant.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature::reference_rule;

/// Half-span of the background grid; |J_k|^2 < 1e-9 beyond it.
pub const K_SPAN: f64 = 8.0;
/// Gauss–Legendre points per panel.
pub const PANEL_ORDER: usize = 12;
/// Above this |k| the integrand is below 1e-12 of its peak and oscillations are not tracked.
const K_OSCILLATION_CUTOFF: f64 = 6.0;
/// Largest panel anywhere on the grid.
const BACKGROUND_PANEL: f64 = 0.1;
/// Minimum nodes per sinc lobe inside a refinement window.
pub const NODES_PER_LOBE: f64 = 20.0;

/// Refinement window around one of the resonance peaks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub center: f64,
    pub half_width: f64,
}

/// A symmetric quadrature rule over wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct KGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub span: f64,
    pub windows: Vec<Window>,
    /// Time the grid was refined for (0 when untuned).
    pub t: f64,
}

/// Half-width 12 pi / t of the refinement windows around +/- k_res.
pub fn window_half_width(t: f64) -> f64 {
    if t > 0.0 {
        12.0 * PI / t
    } else {
        f64::INFINITY
    }
}

/// Width in k of one lobe of the excitation kernel at the resonance.
pub fn lobe_width(k_res: f64, t: f64) -> f64 {
    if t > 0.0 && k_res > 0.0 {
        PI / (k_res * t)
    } else {
        f64::INFINITY
    }
}

impl KGrid {
    /// Equal panels over `[-span, span]`, no refinement.
    pub fn uniform(span: f64, panels_per_side: usize) -> Self {
        let h = span / panels_per_side as f64;
        let edges: Vec<f64> = (0..=panels_per_side).map(|i| h * i as f64).collect();
        Self::from_positive_edges(&edges, span, Vec::new(), 0.0)
    }

    /// Grid that resolves the excitation kernel at time `t` around `+/- k_res`.
    pub fn for_resonance(k_res: f64, t: f64) -> Self {
        let span = K_SPAN;
        let mut edges = vec![0.0];
        let mut k = 0.0;
        let window = window_half_width(t);
        while k < span {
            let mut h = BACKGROUND_PANEL;
            if t > 0.0 {
                if k < K_OSCILLATION_CUTOFF {
                    // Half a local oscillation period per panel.
                    h = h.min(0.5 * PI / (k.max(1e-3) * t));
                }
                // Any panel reaching into the window is refined, not only
                // those starting inside it.
                if k < k_res + window && k + h > k_res - window {
                    h = h.min(0.4 * lobe_width(k_res, t));
                }
            }
            k = (k + h).min(span);
            edges.push(k);
        }
        let windows = if t > 0.0 {
            vec![
                Window {
                    center: -k_res,
                    half_width: window,
                },
                Window {
                    center: k_res,
                    half_width: window,
                },
            ]
        } else {
            Vec::new()
        };
        Self::from_positive_edges(&edges, span, windows, t)
    }

    fn from_positive_edges(edges: &[f64], span: f64, windows: Vec<Window>, t: f64) -> Self {
        let rule = reference_rule(PANEL_ORDER);
        let mut pos_nodes = Vec::with_capacity(edges.len() * PANEL_ORDER);
        let mut pos_weights = Vec::with_capacity(edges.len() * PANEL_ORDER);
        for pair in edges.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
            for &(x, w) in rule.iter() {
                pos_nodes.push(mid + half * x);
                pos_weights.push(half * w);
            }
        }
        let mut nodes: Vec<f64> = pos_nodes.iter().rev().map(|k| -k).collect();
        let mut weights: Vec<f64> = pos_weights.iter().rev().copied().collect();
        nodes.extend_from_slice(&pos_nodes);
        weights.extend_from_slice(&pos_weights);
        Self {
            nodes,
            weights,
            span,
            windows,
            t,
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Weighted sum of `f` over the nodes, accumulated in node order.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&k, &w)| w * f(k)).sum()
    }

    /// Largest gap between neighbouring nodes.
    pub fn max_spacing(&self) -> f64 {
        self.nodes.windows(2).map(|p| p[1] - p[0]).fold(0.0, f64::max)
    }

    /// Checks that the grid resolves the resonance peaks at `+/- k_res` at time `t`.
    pub fn check_resolves(&self, k_res: f64, t: f64) -> Result<()> {
        if t <= 0.0 {
            return Ok(());
        }
        if k_res + 1.0 > self.span {
            return Err(Error::QuadratureResolution(format!(
                "k_res = {k_res} lies outside the grid span {}",
                self.span
            )));
        }
        let lobe = lobe_width(k_res, t);
        let half = window_half_width(t).min(3.0 * lobe);
        for center in [-k_res, k_res] {
            let count = self.nodes.iter().filter(|&&k| (k - center).abs() <= half).count() as f64;
            let needed = NODES_PER_LOBE * 2.0 * half / lobe;
            if count < needed {
                return Err(Error::QuadratureResolution(format!(
                    "{count} nodes within {half:.3e} of k = {center:.4}; need {needed:.0} \
                     ({NODES_PER_LOBE} per lobe of width {lobe:.3e})"
                )));
            }
        }
        Ok(())
    }
}
