use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::GridWavefunction;

/// Observables read off a grid state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Measurement {
    pub tau: f64,
    /// Remaining norm; below 1 once the absorber has removed outgoing flux.
    pub norm: f64,
    /// `1 - sum_branches int dY |int dX psi_b(X) psi(X, Y)|^2`; absorbed
    /// probability counts as excited.
    pub p_ex: f64,
    /// `2 |<psi_1|psi_0>|`.
    pub visibility: f64,
    /// Cross-branch visibility after projecting out the bound component.
    pub visibility_detected: f64,
    /// Particle versus (qubit, oscillator) negativity of the normalised state.
    pub negativity: f64,
}

/// Per-branch `<X>` and `<Y>`, normalised within the branch.
pub fn branch_moments(state: &GridWavefunction, branch: usize) -> Option<(f64, f64)> {
    let f = state.field(branch)?;
    let (x, y) = (state.spec.x_nodes(), state.spec.y_nodes());
    let ny = state.spec.ny;
    let (mut n, mut mx, mut my) = (0.0, 0.0, 0.0);
    for (i, row) in f.psi.chunks(ny).enumerate() {
        for (j, v) in row.iter().enumerate() {
            let p = v.norm_sqr();
            n += p;
            mx += p * x[i];
            my += p * y[j];
        }
    }
    Some((mx / n, my / n))
}

fn inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(u, v)| u.conj() * v).sum()
}

pub fn measure(state: &GridWavefunction) -> Measurement {
    let spec = &state.spec;
    let (nx, ny) = (spec.nx, spec.ny);
    let (dx, dy) = (spec.dx(), spec.dy());
    let cell = dx * dy;
    let bound = spec.bound_profile();
    let norm = state.norm_sqr();

    // Bound-state projection of every Y column, per branch.
    let proj: Vec<Vec<Complex64>> = state
        .fields
        .iter()
        .map(|f| {
            let mut p = vec![Complex64::default(); ny];
            for (row, &b) in f.psi.chunks(ny).zip(&bound) {
                p.iter_mut().zip(row).for_each(|(acc, v)| *acc += v * b);
            }
            p.iter_mut().for_each(|v| *v *= dx);
            p
        })
        .collect();
    let bound_weight: f64 = proj.iter().flatten().map(Complex64::norm_sqr).sum::<f64>() * dy;

    let (f0, f1) = (state.field(0), state.field(1));
    let visibility = match (f0, f1) {
        (Some(a), Some(b)) => 2.0 * inner(&b.psi, &a.psi).norm() * cell,
        _ => 0.0,
    };

    let excited: Vec<Vec<Complex64>> = state
        .fields
        .iter()
        .zip(&proj)
        .map(|(f, p)| {
            f.psi
                .chunks(ny)
                .zip(&bound)
                .flat_map(|(row, &b)| row.iter().zip(p).map(move |(v, pj)| v - pj * b))
                .collect()
        })
        .collect();
    let visibility_detected = match (
        state.fields.iter().position(|f| f.branch == 0),
        state.fields.iter().position(|f| f.branch == 1),
    ) {
        (Some(i0), Some(i1)) => {
            let (e0, e1) = (&excited[i0], &excited[i1]);
            let n0 = inner(e0, e0).re;
            let n1 = inner(e1, e1).re;
            if n0 + n1 > 0.0 {
                2.0 * inner(e1, e0).norm() / (n0 + n1)
            } else {
                0.0
            }
        }
        _ => 0.0,
    };

    // Amplitude matrix: X index by (branch, Y index).
    let cols = ny * state.fields.len();
    let scale = (cell / norm).sqrt();
    let m = DMatrix::from_fn(nx, cols, |i, c| state.fields[c / ny].psi[i * ny + c % ny] * scale);
    let sv = m.svd(false, false).singular_values;
    let s: f64 = sv.iter().sum();
    let negativity = 0.5 * (s * s - 1.0);

    Measurement {
        tau: state.tau,
        norm,
        p_ex: 1.0 - bound_weight,
        visibility,
        visibility_detected,
        negativity,
    }
}
