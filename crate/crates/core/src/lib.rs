//! Simulation of gravity-induced excitation of a trapped particle by a
//! frequency-superposed oscillator.

pub mod acceptance;
pub mod cli;
pub mod config;
pub mod eigen;
pub mod error;
pub mod fock;
pub mod kgrid;
pub mod model;
pub mod observables;
pub mod optomechanics;
pub mod oracle;
pub mod perturbation;
pub mod quadrature;
pub mod schrodinger_newton;
pub mod series;

pub use error::{Error, Result};
pub use model::{derive_model, Model, PhysicalConfig};
