//! Bands, masses and wave-packet dynamics of a one-dimensional polaritonic
//! crystal: a chain of coupled cavities, each holding one two-level atom.
//!
//! All quantities are SI: angular frequencies in rad/s, lengths in m, masses
//! in kg. The wave-packet module works in normalised units, see [`packet`].

pub mod bands;
pub mod cli;
pub mod degeneracy;
pub mod error;
pub mod io;
pub mod oracle;
pub mod packet;
pub mod params;

pub use error::{Error, Result};
pub use params::CrystalParams;
