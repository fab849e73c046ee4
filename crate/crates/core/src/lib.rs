//! Numerical model of a flux-tunable hybrid-mode coupler: a coplanar-waveguide
//! resonator interrupted by a SQUID, capacitively coupled to two transmons.

pub mod dynamics;
pub mod error;
pub mod io;
pub mod model;
pub mod modes;
pub mod optimize;
pub mod params;
pub mod quadrature;
pub mod quantization;
pub mod sweeps;
pub mod units;

pub use error::{Error, Result};
pub use params::{DeviceParams, FluxBias, FluxConvention};
