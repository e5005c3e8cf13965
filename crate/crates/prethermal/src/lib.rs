//! Numerical laboratory for prethermalization under aperiodic drives.
//!
//! The crate is organised bottom-up:
//!
//! * [`drives`] generates step sequences (Thue-Morse, random multipolar,
//!   Fibonacci) and continuous multi-tone drives.
//! * [`spectra`] computes discrete Fourier spectra, Riesz products and
//!   near-origin envelopes with power-law and class fits.
//! * [`arithmetic`] implements frequency labels, depth functions, penalties
//!   and small-divisor functions.
//! * [`linres`] evaluates linear-response heating rates by quadrature and by
//!   the Laplace method.
//! * [`fer`] runs the discrete Fer rotating-frame recursion on a qubit and
//!   the Mori-Magnus block recursion.
//! * [`flow`] builds κ-sequence plans and the resulting lifetime bounds.
//! * [`evolve`] performs exact unitary evolution of small spin chains.
//! * [`validate`] bundles the acceptance checks used by the CLI and tests.

pub mod arithmetic;
pub mod drives;
pub mod error;
pub mod evolve;
pub mod fer;
pub mod fit;
pub mod flow;
pub mod io;
pub mod linres;
pub mod quad;
pub mod spectra;
pub mod validate;

pub use error::{Error, Result};
