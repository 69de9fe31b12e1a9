//! Phase-space toolkit for Gaussian states of continuous-variable systems.
//!
//! The crate covers covariance-matrix algebra ([`phasespace`]), the purity
//! parametrization and entanglement classification of two-mode states
//! ([`twomode`]), symmetric multimode states and unitary localization of
//! block entanglement ([`multimode`]), entanglement-sharing analysis through
//! the contangle ([`sharing`]), and optimal continuous-variable teleportation
//! networks ([`teleport`]).
//!
//! Everything is a pure function of its inputs; the only randomness is the
//! explicitly seeded restart source of the Gaussian-roof optimizer.

pub mod error;
pub mod phasespace;
pub mod twomode;
pub mod multimode;
pub mod sharing;
pub mod teleport;

pub use error::{Error, Result};
