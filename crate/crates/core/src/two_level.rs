//! Driven two-level system: diabatic Hamiltonian, adiabatic-frame
//! diagnostics and numerically exact final populations.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Hamiltonian, IntegrationSpec, Side};
use crate::linalg::{self, CMatrix, StateVector};
use crate::pulse::DriveProfile;

/// `H(t) = 1/2 [[-Delta, Omega], [Omega, Delta]]`.
pub fn hamiltonian_2(drive: &DriveProfile, t: f64) -> CMatrix<2> {
    hamiltonian_2_limit(drive, t, Side::Left)
}

fn hamiltonian_2_limit(drive: &DriveProfile, t: f64, side: Side) -> CMatrix<2> {
    let omega = drive.rabi(t);
    let delta = drive.detuning_at(t, side);
    linalg::from_real([[-0.5 * delta, 0.5 * omega], [0.5 * omega, 0.5 * delta]])
}

/// The two-level Hamiltonian of a drive, usable by the integrator.
#[derive(Debug, Clone, Copy)]
pub struct TwoLevel<'a>(pub &'a DriveProfile);

impl Hamiltonian<2> for TwoLevel<'_> {
    fn matrix(&self, t: f64, side: Side) -> CMatrix<2> {
        hamiltonian_2_limit(self.0, t, side)
    }
}

/// Mixing angle `theta` with `tan 2 theta = Omega / Delta`, on the branch
/// `theta = atan2(Omega, Delta) / 2`, which lies in `[0, pi/2]` for
/// `Omega >= 0`.
pub fn mixing_angle(omega: f64, delta: f64) -> Result<f64> {
    if !(omega.is_finite() && delta.is_finite()) {
        return Err(Error::NonFinite { context: "mixing angle input", value: omega + delta });
    }
    if omega < 0.0 {
        return Err(Error::invalid("omega", format!("must be non-negative, got {omega}")));
    }
    if omega == 0.0 && delta == 0.0 {
        return Err(Error::UndefinedMixingAngle);
    }
    Ok(0.5 * omega.atan2(delta))
}

/// `R(theta)`, whose columns are the adiabatic states `|+>`, `|->`.
pub fn rotation_matrix(theta: f64) -> [[f64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    [[c, -s], [s, c]]
}

/// Instantaneous adiabatic-frame quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticSnapshot {
    pub t: f64,
    /// `sqrt(Omega^2 + Delta^2)`
    pub epsilon: f64,
    pub theta: f64,
    pub theta_dot: f64,
    /// `|theta_dot| / epsilon`; adiabatic following needs this `<< 1`.
    pub adiabaticity_ratio: f64,
}

/// Adiabatic diagnostics at `t`, with analytic derivatives of the pulse and
/// detuning. Fails at the jump of an ideal step, where `dDelta/dt` is a delta
/// function; use [`adiabatic_snapshot_limit`] for the one-sided values there.
pub fn adiabatic_snapshot(drive: &DriveProfile, t: f64) -> Result<AdiabaticSnapshot> {
    let delta_dot = drive.detuning.derivative(t)?;
    snapshot(drive, t, Side::Left, delta_dot)
}

/// One-sided snapshot; at an ideal step `dDelta/dt = 0` on either side.
pub fn adiabatic_snapshot_limit(drive: &DriveProfile, t: f64, side: Side) -> Result<AdiabaticSnapshot> {
    let delta_dot = match drive.detuning.derivative(t) {
        Err(Error::DerivativeAtJump) => 0.0,
        other => other?,
    };
    snapshot(drive, t, side, delta_dot)
}

fn snapshot(drive: &DriveProfile, t: f64, side: Side, delta_dot: f64) -> Result<AdiabaticSnapshot> {
    let omega = drive.rabi(t);
    let delta = drive.detuning_at(t, side);
    let omega_dot = drive.rabi_derivative(t)?;
    let theta = mixing_angle(omega, delta)?;
    let epsilon = omega.hypot(delta);
    let theta_dot = 0.5 * (delta * omega_dot - omega * delta_dot) / (epsilon * epsilon);
    Ok(AdiabaticSnapshot {
        t,
        epsilon,
        theta,
        theta_dot,
        adiabaticity_ratio: theta_dot.abs() / epsilon,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoLevelOutcome {
    pub p1: f64,
    pub p2: f64,
    pub final_state: StateVector<2>,
    /// Numerical `U(t_end, t_start)` in the diabatic basis.
    pub propagator: CMatrix<2>,
}

/// Integrates the two-level Schrödinger equation and returns final diabatic
/// populations together with the full propagator.
pub fn simulate_final_populations(
    drive: &DriveProfile,
    spec: &IntegrationSpec,
    initial: &StateVector<2>,
) -> Result<TwoLevelOutcome> {
    initial.check_normalized(1e-10)?;
    let propagator = integrator::build_propagator(&TwoLevel(drive), spec)?;
    let final_state = StateVector(linalg::mat_vec(&propagator, &initial.0));
    let [p1, p2] = final_state.populations();
    Ok(TwoLevelOutcome { p1, p2, final_state, propagator })
}

/// `theta(0-) + theta(0+)`, which equals `pi/2` for the symmetric step.
pub fn jump_angle_sum(drive: &DriveProfile) -> Result<f64> {
    let om = drive.rabi(0.0);
    let before = mixing_angle(om, drive.detuning_at(0.0, Side::Left))?;
    let after = mixing_angle(om, drive.detuning_at(0.0, Side::Right))?;
    Ok(before + after)
}

/// Asymptotic angles: `theta -> 0` as `t -> -inf`, `theta -> pi/2` as
/// `t -> +inf` for the sign-flip detuning.
pub fn asymptotic_rotations() -> ([[f64; 2]; 2], [[f64; 2]; 2]) {
    (rotation_matrix(0.0), rotation_matrix(FRAC_PI_2))
}
