//! Population transfer in a driven two-level system by a sudden sign flip of
//! the detuning at the peak of a smooth coupling pulse, and its extension to
//! the SU(2)-symmetric three-state chain.
//!
//! The crate has two halves that are meant to be checked against each other:
//!
//! * a numerical route ([`integrator`], [`two_level`], [`su2_chain`]) that
//!   integrates the Schrödinger equation for the diabatic Hamiltonian, and
//! * a closed-form route ([`stepwise`]) that treats the evolution as adiabatic
//!   on either side of the jump with one sudden rotation of the adiabatic basis
//!   at `t = 0`.
//!
//! Units: `ħ = 1`. Times are naturally measured in units of the pulse width
//! `T` and frequencies in units of `1/T`, but nothing in the library assumes
//! `T = 1`.

pub mod error;
pub mod integrator;
pub mod linalg;
pub mod pulse;
pub mod stepwise;
pub mod su2_chain;
pub mod sweep;
pub mod two_level;

pub use error::{Error, Result};
pub use integrator::{IntegrationSpec, Method, Side, TrajectoryPoint};
pub use linalg::{CMatrix, StateVector, C64};
pub use pulse::{DetuningProfile, DriveProfile, PulseShape, ShapeKind};
pub use stepwise::{CayleyKlein, JumpAngles, PhasePair};
pub use su2_chain::{Propagator3, TransitionTable};
pub use two_level::AdiabaticSnapshot;
