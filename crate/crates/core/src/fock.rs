//! Truncated number-basis vectors for the oscillator.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tolerated probability mass beyond the truncation.
pub const TAIL_LIMIT: f64 = 1e-12;

/// Truncation `ceil(|alpha|^2 + 10 sqrt(|alpha|^2 + 1) + 10)` for amplitude `alpha`.
pub fn n_max_for(alpha: Complex64) -> usize {
    let a2 = alpha.norm_sqr();
    (a2 + 10.0 * (a2 + 1.0).sqrt() + 10.0).ceil() as usize
}

/// Coefficients `e^{-|beta|^2/2} beta^n / sqrt(n!)` for n = 0..=n_max.
fn coherent_coefficients(beta: Complex64, n_max: usize) -> Vec<Complex64> {
    let mut c = Vec::with_capacity(n_max + 1);
    let mut cur = Complex64::new((-0.5 * beta.norm_sqr()).exp(), 0.0);
    c.push(cur);
    for n in 1..=n_max {
        cur = cur * beta / (n as f64).sqrt();
        c.push(cur);
    }
    c
}

/// Probability mass of a coherent state beyond `n_max`.
pub fn coherent_tail(beta: Complex64, n_max: usize) -> f64 {
    let a2 = beta.norm_sqr();
    let mut p = (-a2).exp();
    for n in 1..=n_max {
        p *= a2 / n as f64;
    }
    // p is now the Poisson weight at n_max; sum the remaining terms.
    let mut tail = 0.0;
    let mut n = n_max;
    loop {
        n += 1;
        p *= a2 / n as f64;
        tail += p;
        if p < 1e-30 || p < tail * 1e-17 {
            break;
        }
    }
    tail
}

/// Coefficients over `|0>, ..., |n_max>` with a frequency tag.
#[derive(Debug, Clone, PartialEq)]
pub struct FockVector {
    pub coeffs: Vec<Complex64>,
    pub omega: f64,
}

impl FockVector {
    /// Coherent state `|beta>`, failing if the truncation drops more than [`TAIL_LIMIT`].
    pub fn coherent(beta: Complex64, n_max: usize, omega: f64) -> Result<Self> {
        let tail = coherent_tail(beta, n_max);
        if tail > TAIL_LIMIT {
            return Err(Error::Truncation {
                n_max,
                tail,
                limit: TAIL_LIMIT,
            });
        }
        Ok(Self {
            coeffs: coherent_coefficients(beta, n_max),
            omega,
        })
    }

    /// `(a^dag - shift^*) |beta>`; norm^2 is `1 + |beta - shift|^2`.
    pub fn raised_coherent(beta: Complex64, shift: Complex64, n_max: usize, omega: f64) -> Result<Self> {
        let base = Self::coherent(beta, n_max, omega)?;
        let mut coeffs = vec![Complex64::new(0.0, 0.0); n_max + 1];
        for (n, c) in coeffs.iter_mut().enumerate().skip(1) {
            *c = base.coeffs[n - 1] * (n as f64).sqrt();
        }
        for (c, b) in coeffs.iter_mut().zip(&base.coeffs) {
            *c -= shift.conj() * b;
        }
        Ok(Self { coeffs, omega })
    }

    pub fn n_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// `<self|other>` over the common truncation.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Mass in the top occupation, a cheap truncation diagnostic.
    pub fn edge_mass(&self) -> f64 {
        self.coeffs.last().map_or(0.0, |c| c.norm_sqr())
    }
}

/// `<n| Y |n'>` with `Y = (a + a^dag) / sqrt 2`.
pub fn ladder_element(n: usize, n_prime: usize) -> f64 {
    let s = if n + 1 == n_prime {
        (n_prime as f64).sqrt()
    } else if n == n_prime + 1 {
        (n_prime as f64 + 1.0).sqrt()
    } else {
        0.0
    };
    s * std::f64::consts::FRAC_1_SQRT_2
}

/// Closed-form overlap `<beta|gamma>` of coherent states.
pub fn coherent_overlap(beta: Complex64, gamma: Complex64) -> Complex64 {
    (-0.5 * beta.norm_sqr() - 0.5 * gamma.norm_sqr() + beta.conj() * gamma).exp()
}
