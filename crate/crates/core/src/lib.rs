//! Classical spoofing of the linear cross-entropy benchmark (XEB) on shallow
//! random circuits.
//!
//! The crate has three layers:
//!
//! * [`skeleton`], [`gates`] and [`statevector`] describe layered 2-qubit
//!   circuits and simulate them exactly (the oracle for `q_C`);
//! * [`spoofer`] samples from the light-cone spoofing distribution and scores
//!   it in closed form, and [`pauli_chain`] evaluates the Haar average of that
//!   score exactly;
//! * [`bounds`] and [`experiment`] hold the closed-form bounds and the
//!   reproducible Monte Carlo campaigns driven by the CLI.
//!
//! Qubits are 0-based in the API and 1-based in JSON files and CLI output.

pub mod bounds;
pub mod error;
pub mod experiment;
pub mod gates;
pub mod pauli_chain;
pub mod seed;
pub mod skeleton;
pub mod spoofer;
pub mod statevector;

pub use error::{Result, XebError};
pub use gates::{haar_sample, Pauli, Unitary2Q};
pub use skeleton::{build_1d_brickwork, build_2d_grid, LightCone, Skeleton};
pub use spoofer::{closed_form_fidelity, plan, sample, spoof_pdf, SpoofPlan};
pub use statevector::{simulate, Circuit, OutputDistribution, StateVector};
