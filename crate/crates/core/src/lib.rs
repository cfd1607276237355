//! Morse theory of the `syst` functions on the moduli space of once-punctured
//! hyperbolic tori.
//!
//! Points of Teichmüller space are trace triples on the Markov surface
//! ([`torus`]). [`syst`] evaluates the smoothed systole
//! `−T log Σ e^{−l_γ/T}` with certified truncation; [`eutactic`] classifies
//! minimal-gradient configurations; [`critical`] locates critical points;
//! [`wp`] approximates the Weil–Petersson pairing; [`flow`] integrates gradient
//! flows; [`homology`] computes Morse homology.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the linear
//! programs also run over exact rationals ([`Field`]).

pub mod critical;
pub mod error;
pub mod eutactic;
pub mod flow;
pub mod homology;
pub mod linalg;
pub mod lp;
pub mod scalar;
pub mod torus;
pub mod wp;

pub use error::{Error, Result};
pub use scalar::{Field, Real};

pub type MarkovPoint64 = torus::MarkovPoint<f64>;
pub type MarkovPoint32 = torus::MarkovPoint<f32>;
pub type GeodesicEntry64 = torus::GeodesicEntry<f64>;
pub type CriticalPoint64 = critical::CriticalPoint<f64>;
pub type PairingMatrix64 = wp::PairingMatrix<f64>;
pub type VectorConfig64 = eutactic::VectorConfig<f64>;
pub type EutClass64 = eutactic::EutClass<f64>;
pub type Trajectory64 = flow::Trajectory<f64>;
pub mod syst;
