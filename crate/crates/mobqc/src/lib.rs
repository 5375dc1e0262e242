//! Simulator and verification harness for measurement-only blind quantum
//! computing on four-qubit cluster states.
//!
//! A client that can only measure single qubits delegates computation to a
//! server that prepares entangled resource states and streams the qubits over
//! a one-way channel. Because information flows in one direction only, the
//! server learns nothing about the client's program; the client in turn can
//! interleave trap tests with computation to catch a server that deviates
//! from the agreed resource.
//!
//! The crate provides:
//!
//! - [`sim`] — exact state-vector and density-matrix simulation of small
//!   registers (gates, projective measurement in arbitrary local bases,
//!   partial trace, fidelity);
//! - [`graph`] — graph-state construction and stabilizer witnesses, with the
//!   four-qubit linear and star clusters as named resources;
//! - [`mbqc`] — measurement patterns, byproduct-correction frames and the
//!   four tabulated two-qubit entangling gates on the star cluster;
//! - [`protocol`] — the two-party session engine with transcripts that make
//!   blindness a checkable property;
//! - [`verify`] — trap tests for both resources, exact detection
//!   probabilities against a parameterized adversary family, and n-round
//!   amplification;
//! - [`noise`] — Kraus channels and single-parameter calibration against a
//!   target state fidelity;
//! - [`tomo`] — over-complete local-Pauli state tomography with physical
//!   projection and fidelity maximization over local unitaries.

pub mod error;
pub mod graph;
pub mod mbqc;
pub mod noise;
pub mod protocol;
pub mod rng;
pub mod sim;
pub mod tomo;
pub mod verify;

pub use error::{Error, Result};
pub use sim::{DensityMatrix, MeasurementBasis, Outcome, QuantumState, StateVector};
