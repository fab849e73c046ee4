//! Circuit Hamiltonian in a truncated Fock basis, spectra and time evolution.

pub mod chevron;
pub mod eigen;
pub mod evolve;
pub mod hamiltonian;
pub mod phase;
pub mod tracking;
pub mod xx;
pub mod zz;
