//! First-order evolution of particle, qubit and oscillator under `g X Y`.
//!
//! Branch `q` of the qubit sets the oscillator frequency `Omega_q`. Writing
//! `F(theta) = (1 - e^{i theta t}) / theta` and `c_k(Omega) = J_k F(k^2 + 1 - Omega) / sqrt 2`,
//! the Schrödinger-picture state at first order is
//!
//! ```text
//! (1/sqrt 2) sum_q |q> [ e^{it} |b>|beta_q>
//!     + g ∫dk e^{-ik^2 t} |k> ( (alpha - lambda_q) c_k(Omega_q) |beta_q>
//!                              + e^{-i Omega_q t} c_k(-Omega_q) (a^dag - lambda_q^*) |beta_q>
//!                              + 2 Re(lambda_q) c_k(0) |beta_q> ) ]
//! ```
//!
//! with `beta_q = lambda_q + (alpha - lambda_q) e^{-i Omega_q t}`. The equilibrium
//! shift `lambda_q` is zero except for the radiation-pressure displaced branch
//! of the optomechanical preparation. Only the branch-1 `c_k(Omega_1)` term can
//! hit the energy-conserving denominator; the others are off-resonant.

use nalgebra::{DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::FRAC_1_SQRT_2;

use crate::eigen::overlap_j;
use crate::error::Result;
use crate::fock::{n_max_for, FockVector};
use crate::kgrid::KGrid;
use crate::model::Model;

/// Below this |theta| the detuning factor switches to its Taylor series.
pub const SINGULAR_THRESHOLD: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// `(1 - e^{i theta t}) / theta`, regular at `theta = 0`.
pub fn detuning_factor(theta: f64, t: f64) -> Complex64 {
    if theta.abs() < SINGULAR_THRESHOLD {
        // -i t + theta t^2 / 2 + i theta^2 t^3 / 6
        Complex64::new(0.5 * theta * t * t, -t + theta * theta * t * t * t / 6.0)
    } else {
        let half = 0.5 * theta * t;
        -2.0 * I * half.sin() * Complex64::from_polar(1.0, half) / theta
    }
}

/// `c_k(Omega) = J_k (1 - e^{i(k^2 + 1 - Omega) t}) / (sqrt 2 (k^2 + 1 - Omega))`.
pub fn transition_amplitude(k: f64, omega: f64, t: f64) -> Complex64 {
    overlap_j(k) * FRAC_1_SQRT_2 * detuning_factor(k * k + 1.0 - omega, t)
}

/// Particle level: the bound state or the scattering state at wavenumber k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Level {
    Bound,
    Continuum(f64),
}

/// Interaction-picture amplitude of `|level>|n>` within qubit branch `branch`.
///
/// At first order the `|k>|n>` amplitude is
/// `g [ alpha c_k(Omega) <n|alpha> + c_k(-Omega) <n| a^dag |alpha> ]`;
/// `<n| a^dag |alpha> = (n / alpha) <n|alpha>` is evaluated as
/// `sqrt(n) <n-1|alpha>` so that alpha = 0 is regular.
pub fn coefficient(level: Level, n: usize, branch: usize, t: f64, model: &Model) -> Complex64 {
    let alpha = model.alpha;
    let coherent = |m: usize| -> Complex64 {
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        for j in 1..=m {
            c = c * alpha / (j as f64).sqrt();
        }
        c
    };
    match level {
        Level::Bound => coherent(n),
        Level::Continuum(k) => {
            let omega = model.branch_frequency(branch);
            let lowered = alpha * coherent(n) * transition_amplitude(k, omega, t);
            let raised = if n == 0 {
                Complex64::new(0.0, 0.0)
            } else {
                (n as f64).sqrt() * coherent(n - 1) * transition_amplitude(k, -omega, t)
            };
            model.g * (lowered + raised)
        }
    }
}

/// Oscillator state attached to a term of the evolved state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OscSector {
    /// `|beta>`.
    Coherent { beta: Complex64 },
    /// `(a^dag - shift^*) |beta>`.
    Raised { beta: Complex64, shift: Complex64 },
}

impl OscSector {
    pub fn beta(&self) -> Complex64 {
        match *self {
            OscSector::Coherent { beta } | OscSector::Raised { beta, .. } => beta,
        }
    }

    /// Truncated number-basis representation.
    pub fn to_fock(&self, n_max: usize, omega: f64) -> Result<FockVector> {
        match *self {
            OscSector::Coherent { beta } => FockVector::coherent(beta, n_max, omega),
            OscSector::Raised { beta, shift } => FockVector::raised_coherent(beta, shift, n_max, omega),
        }
    }

    /// Truncation that keeps this sector's tail below the Fock tolerance.
    pub fn n_max(&self) -> usize {
        n_max_for(self.beta()) + 1
    }
}

/// `|b>` term of one qubit branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ZerothTerm {
    pub branch: usize,
    /// `e^{it} / sqrt 2`.
    pub amplitude: Complex64,
    pub sector: OscSector,
}

/// Continuum term `∫dk amplitude(k) |k> ⊗ sector` of one qubit branch.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuumTerm {
    pub branch: usize,
    /// The Omega in `c_k(Omega)`.
    pub omega: f64,
    /// Scalar multiplying `e^{-ik^2 t} c_k(Omega)`, including the 1/sqrt 2 branch weight.
    pub prefactor: Complex64,
    pub sector: OscSector,
    /// Full amplitude on each k-grid node.
    pub amplitude: Vec<Complex64>,
}

/// First-order state on a k-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolvedState {
    pub t: f64,
    pub g: f64,
    pub omegas: [f64; 2],
    pub kgrid: KGrid,
    pub zeroth: [ZerothTerm; 2],
    /// Branch-1 term through `c_k(Omega_1)`.
    pub resonant: ContinuumTerm,
    /// Remaining first-order terms; empty unless requested.
    pub offres: Vec<ContinuumTerm>,
}

/// Oscillator parameters of one qubit branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BranchDrive {
    pub omega: f64,
    pub alpha: Complex64,
    /// Equilibrium shift of the oscillator in coherent-amplitude units.
    pub lambda: Complex64,
}

impl BranchDrive {
    pub fn beta_at(&self, t: f64) -> Complex64 {
        self.lambda + (self.alpha - self.lambda) * Complex64::from_polar(1.0, -self.omega * t)
    }
}

fn continuum_term(
    branch: usize,
    omega: f64,
    prefactor: Complex64,
    sector: OscSector,
    grid: &KGrid,
    t: f64,
) -> ContinuumTerm {
    let amplitude = grid
        .nodes
        .par_iter()
        .map(|&k| prefactor * Complex64::from_polar(1.0, -k * k * t) * transition_amplitude(k, omega, t))
        .collect();
    ContinuumTerm {
        branch,
        omega,
        prefactor,
        sector,
        amplitude,
    }
}

pub(crate) fn evolve_branches(
    drives: [BranchDrive; 2],
    g: f64,
    t: f64,
    include_offres: bool,
    grid: &KGrid,
) -> EvolvedState {
    let w = FRAC_1_SQRT_2;
    let zero = Complex64::new(0.0, 0.0);
    let bound_phase = Complex64::from_polar(w, t);
    let zeroth = [0, 1].map(|q| ZerothTerm {
        branch: q,
        amplitude: bound_phase,
        sector: OscSector::Coherent {
            beta: drives[q].beta_at(t),
        },
    });

    let mut resonant = None;
    let mut offres = Vec::new();
    for (q, d) in drives.iter().enumerate() {
        let beta = d.beta_at(t);
        let lowered = continuum_term(
            q,
            d.omega,
            w * g * (d.alpha - d.lambda),
            OscSector::Coherent { beta },
            grid,
            t,
        );
        if q == 1 {
            resonant = Some(lowered);
        } else if include_offres {
            offres.push(lowered);
        }
        if include_offres {
            let phase = Complex64::from_polar(1.0, -d.omega * t);
            offres.push(continuum_term(
                q,
                -d.omega,
                w * g * phase,
                OscSector::Raised { beta, shift: d.lambda },
                grid,
                t,
            ));
            if d.lambda != zero {
                offres.push(continuum_term(
                    q,
                    0.0,
                    Complex64::new(w * g * 2.0 * d.lambda.re, 0.0),
                    OscSector::Coherent { beta },
                    grid,
                    t,
                ));
            }
        }
    }

    EvolvedState {
        t,
        g,
        omegas: [drives[0].omega, drives[1].omega],
        kgrid: grid.clone(),
        zeroth,
        resonant: resonant.expect("branch 1 always present"),
        offres,
    }
}

/// First-order state at time `t`. The grid must resolve the resonance at `t`.
pub fn evolve(model: &Model, t: f64, include_offres: bool, kgrid: &KGrid) -> Result<EvolvedState> {
    kgrid.check_resolves(model.k_res, t)?;
    let zero = Complex64::new(0.0, 0.0);
    let drives = [0, 1].map(|q| BranchDrive {
        omega: model.branch_frequency(q),
        alpha: model.alpha,
        lambda: zero,
    });
    Ok(evolve_branches(drives, model.g, t, include_offres, kgrid))
}

impl EvolvedState {
    /// Resonant and off-resonant terms together.
    pub fn continuum_terms(&self) -> impl Iterator<Item = &ContinuumTerm> {
        std::iter::once(&self.resonant).chain(&self.offres)
    }

    fn branch_terms(&self, branch: usize) -> Vec<&ContinuumTerm> {
        self.continuum_terms().filter(|c| c.branch == branch).collect()
    }

    fn fock_sectors(&self, terms: &[&ContinuumTerm], n_max: usize) -> Result<Vec<FockVector>> {
        terms
            .iter()
            .map(|c| c.sector.to_fock(n_max, self.omegas[c.branch]))
            .collect()
    }

    fn common_n_max(&self) -> usize {
        self.continuum_terms()
            .map(|c| c.sector.n_max())
            .chain(self.zeroth.iter().map(|z| z.sector.n_max()))
            .max()
            .unwrap_or(0)
    }

    /// `∫dk a_i(k)^* b_j(k)` for every pair of terms.
    fn k_overlaps(&self, left: &[&ContinuumTerm], right: &[&ContinuumTerm]) -> Vec<Vec<Complex64>> {
        let w = &self.kgrid.weights;
        left.iter()
            .map(|a| {
                right
                    .iter()
                    .map(|b| {
                        a.amplitude
                            .iter()
                            .zip(&b.amplitude)
                            .zip(w)
                            .map(|((x, y), &w)| x.conj() * y * w)
                            .sum()
                    })
                    .collect()
            })
            .collect()
    }

    /// `<ex_p | ex_q>` of the continuum parts of branches p and q, sectors in the truncated Fock basis.
    pub fn excited_overlap(&self, p: usize, q: usize) -> Result<Complex64> {
        let n_max = self.common_n_max();
        let left = self.branch_terms(p);
        let right = self.branch_terms(q);
        let lf = self.fock_sectors(&left, n_max)?;
        let rf = self.fock_sectors(&right, n_max)?;
        let ks = self.k_overlaps(&left, &right);
        let mut total = Complex64::new(0.0, 0.0);
        for (i, a) in lf.iter().enumerate() {
            for (j, b) in rf.iter().enumerate() {
                total += ks[i][j] * a.inner(b);
            }
        }
        Ok(total)
    }

    /// Total continuum probability, all first-order terms included.
    pub fn excited_norm_sqr(&self) -> Result<f64> {
        Ok(self.excited_overlap(0, 0)?.re + self.excited_overlap(1, 1)?.re)
    }

    /// Norm^2 of the resonant term alone.
    pub fn resonant_norm_sqr(&self) -> f64 {
        let s = self.resonant.sector;
        let sector_norm = match s {
            OscSector::Coherent { .. } => 1.0,
            OscSector::Raised { beta, shift } => 1.0 + (beta - shift).norm_sqr(),
        };
        sector_norm
            * self
                .resonant
                .amplitude
                .iter()
                .zip(&self.kgrid.weights)
                .map(|(a, &w)| a.norm_sqr() * w)
                .sum::<f64>()
    }

    /// `<b-part of branch p | b-part of branch q>`.
    pub fn zeroth_overlap(&self, p: usize, q: usize) -> Result<Complex64> {
        let n_max = self.common_n_max();
        let a = &self.zeroth[p];
        let b = &self.zeroth[q];
        let fa = a.sector.to_fock(n_max, self.omegas[p])?;
        let fb = b.sector.to_fock(n_max, self.omegas[q])?;
        Ok(a.amplitude.conj() * b.amplitude * fa.inner(&fb))
    }

    /// Squared norm of the whole state; `1 + O(g^2)`.
    pub fn norm_sqr(&self) -> Result<f64> {
        Ok(self.zeroth_overlap(0, 0)?.re + self.zeroth_overlap(1, 1)?.re + self.excited_norm_sqr()?)
    }

    /// Particle versus (qubit, oscillator) negativity of the normalised
    /// first-order state, from the spectrum of the reduced density matrix on
    /// the (branch, Fock) side.
    pub fn schmidt_negativity(&self) -> Result<f64> {
        let n_max = self.common_n_max();
        let dim = n_max + 1;
        let terms: Vec<&ContinuumTerm> = self.continuum_terms().collect();
        let embed = |branch: usize, f: &FockVector, scale: Complex64| -> DVector<Complex64> {
            let mut v = DVector::zeros(2 * dim);
            for (n, c) in f.coeffs.iter().enumerate() {
                v[branch * dim + n] = c * scale;
            }
            v
        };
        let mut bound = DVector::zeros(2 * dim);
        for z in &self.zeroth {
            bound += embed(z.branch, &z.sector.to_fock(n_max, self.omegas[z.branch])?, z.amplitude);
        }
        let one = Complex64::new(1.0, 0.0);
        let vs: Vec<DVector<Complex64>> = terms
            .iter()
            .zip(self.fock_sectors(&terms, n_max)?)
            .map(|(c, f)| embed(c.branch, &f, one))
            .collect();
        let ks = self.k_overlaps(&terms, &terms);
        let mut rho = &bound * bound.adjoint();
        for (i, vi) in vs.iter().enumerate() {
            for (j, vj) in vs.iter().enumerate() {
                rho += vi * vj.adjoint() * ks[i][j].conj();
            }
        }
        let tr = rho.trace().re;
        let eig = SymmetricEigen::new(rho).eigenvalues;
        let s: f64 = eig.iter().map(|&e| (e.max(0.0) / tr).sqrt()).sum();
        Ok(0.5 * (s * s - 1.0))
    }

    /// Grid node where the resonant amplitude is largest.
    pub fn resonant_peak_k(&self) -> f64 {
        let (i, _) = self
            .resonant
            .amplitude
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, a)| {
                let v = a.norm_sqr();
                if v > best.1 {
                    (i, v)
                } else {
                    best
                }
            });
        self.kgrid.nodes[i]
    }
}
