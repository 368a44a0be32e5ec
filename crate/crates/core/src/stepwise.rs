//! Adiabatic–sudden model of the sign-jump protocol.
//!
//! Before and after `t = 0` the state follows the adiabatic eigenstates and
//! only picks up the dynamical phases `delta_-`, `delta_+`. At the jump the
//! adiabatic basis is rotated by `delta_theta = theta(0-) - theta(0+)`.
//! Transforming back with the asymptotic rotations `R(-inf) = 1`,
//! `R(+inf) = R(pi/2)` gives the diabatic propagator
//!
//! ```text
//! U = [[ a, b], [-b*, a*]],  a = -e^{i(d- - d+)} sin(dtheta),  b = -e^{-i(d- + d+)} cos(dtheta)
//! ```
//!
//! so that `P2 = |b|^2 = cos^2(dtheta) = Omega0^2 / (Omega0^2 + Delta0^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Side};
use crate::linalg::{self, CMatrix, C64, ZERO};
use crate::pulse::DriveProfile;
use crate::two_level::{asymptotic_rotations, mixing_angle};

const PHASE_QUADRATURE_TOLERANCE: f64 = 1e-12;

/// Half the accumulated adiabatic phases before and after the jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhasePair {
    /// `alpha_- / 2`, with `alpha_- = int_{t_i}^0 epsilon dt`
    pub delta_minus: f64,
    /// `alpha_+ / 2`, with `alpha_+ = int_0^{t_f} epsilon dt`
    pub delta_plus: f64,
}

impl PhasePair {
    pub fn zero() -> Self {
        Self { delta_minus: 0.0, delta_plus: 0.0 }
    }
}

/// Mixing angles just before and after the jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpAngles {
    pub theta_minus: f64,
    pub theta_plus: f64,
    /// `theta_minus - theta_plus`
    pub delta_theta: f64,
}

impl JumpAngles {
    pub fn from_angles(theta_minus: f64, theta_plus: f64) -> Self {
        Self { theta_minus, theta_plus, delta_theta: theta_minus - theta_plus }
    }
}

/// Cayley–Klein parameters of an SU(2) propagator `[[a, b], [-b*, a*]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CayleyKlein {
    pub a: C64,
    pub b: C64,
}

impl CayleyKlein {
    /// Checks `|a|^2 + |b|^2 = 1` to `1e-9`.
    pub fn new(a: C64, b: C64) -> Result<Self> {
        let ck = Self { a, b };
        let n = ck.norm_sqr();
        if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
            return Err(Error::CayleyKleinNorm { norm_sqr: n });
        }
        Ok(ck)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a.norm_sqr() + self.b.norm_sqr()
    }

    /// Reads `a = U11`, `b = U12` off a numerical 2x2 propagator after removing
    /// the global phase, i.e. dividing by `sqrt(det U)`.
    pub fn from_propagator(u: &CMatrix<2>) -> Result<Self> {
        let det = linalg::det2(u);
        if !(det.norm().is_finite() && det.norm() > 0.5) {
            return Err(Error::Inconsistent(format!("propagator determinant {det} is not unimodular")));
        }
        let root = det.sqrt();
        Self::new(u[0][0] / root, u[0][1] / root)
    }

    pub fn matrix(&self) -> CMatrix<2> {
        [[self.a, self.b], [-self.b.conj(), self.a.conj()]]
    }

    /// `|U21|^2 = |b|^2`, the `|1> -> |2>` probability.
    pub fn transition_probability(&self) -> f64 {
        self.b.norm_sqr()
    }
}

/// `delta_-`, `delta_+` from the splitting `epsilon(t)` integrated over
/// `[t_start, 0]` and `[0, t_end]`.
pub fn accumulate_phases(drive: &DriveProfile, t_start: f64, t_end: f64) -> Result<PhasePair> {
    if !(t_start < 0.0 && 0.0 < t_end) {
        return Err(Error::invalid(
            "window",
            format!("phase accumulation needs t_start < 0 < t_end, got [{t_start}, {t_end}]"),
        ));
    }
    let before = integrator::quadrature(
        |t| drive.splitting(t, Side::Left),
        t_start,
        0.0,
        PHASE_QUADRATURE_TOLERANCE,
    )?;
    let after = integrator::quadrature(
        |t| drive.splitting(t, Side::Right),
        0.0,
        t_end,
        PHASE_QUADRATURE_TOLERANCE,
    )?;
    Ok(PhasePair { delta_minus: 0.5 * before, delta_plus: 0.5 * after })
}

/// `theta(0-)`, `theta(0+)` for an ideal detuning step.
pub fn jump_angles(drive: &DriveProfile) -> Result<JumpAngles> {
    if !drive.detuning.is_step() {
        return Err(Error::invalid(
            "tau_jump",
            "jump angles are defined for an ideal step (tau_jump = 0)",
        ));
    }
    let om = drive.rabi(0.0);
    let theta_minus = mixing_angle(om, drive.detuning_at(0.0, Side::Left))?;
    let theta_plus = mixing_angle(om, drive.detuning_at(0.0, Side::Right))?;
    Ok(JumpAngles::from_angles(theta_minus, theta_plus))
}

fn phase_diag(delta: f64) -> CMatrix<2> {
    [[C64::from_polar(1.0, delta), ZERO], [ZERO, C64::from_polar(1.0, -delta)]]
}

/// Adiabatic-basis propagator: phases after, jump rotation, phases before.
pub fn piecewise_propagator_adiabatic(phases: &PhasePair, angles: &JumpAngles) -> CMatrix<2> {
    let (s, c) = angles.delta_theta.sin_cos();
    let jump = linalg::from_real([[c, -s], [s, c]]);
    linalg::mat_mul(
        &phase_diag(phases.delta_plus),
        &linalg::mat_mul(&jump, &phase_diag(phases.delta_minus)),
    )
}

/// Diabatic propagator `R(t_f) U_ad R(t_i)^T` with the asymptotic rotations.
pub fn diabatic_propagator(phases: &PhasePair, angles: &JumpAngles) -> CMatrix<2> {
    let (r_i, r_f) = asymptotic_rotations();
    let r_i_t = linalg::from_real([[r_i[0][0], r_i[1][0]], [r_i[0][1], r_i[1][1]]]);
    linalg::mat_mul(
        &linalg::from_real(r_f),
        &linalg::mat_mul(&piecewise_propagator_adiabatic(phases, angles), &r_i_t),
    )
}

pub fn cayley_klein(phases: &PhasePair, angles: &JumpAngles) -> CayleyKlein {
    let (s, c) = angles.delta_theta.sin_cos();
    let (dm, dp) = (phases.delta_minus, phases.delta_plus);
    CayleyKlein {
        a: -C64::from_polar(1.0, dm - dp) * s,
        b: -C64::from_polar(1.0, -(dm + dp)) * c,
    }
}

/// Cayley–Klein parameters of the adiabatic–sudden model for a drive over
/// `[t_start, t_end]`.
pub fn model_cayley_klein(drive: &DriveProfile, t_start: f64, t_end: f64) -> Result<CayleyKlein> {
    let phases = accumulate_phases(drive, t_start, t_end)?;
    let angles = jump_angles(drive)?;
    Ok(cayley_klein(&phases, &angles))
}

/// Final `|2>` population of the model: `Omega0^2 / (Omega0^2 + Delta0^2)`.
///
/// Both `cos^2(delta_theta)` and the ratio form are evaluated and must agree.
pub fn analytic_p2(omega0: f64, delta0: f64) -> Result<f64> {
    if !(omega0.is_finite() && omega0 >= 0.0) {
        return Err(Error::invalid("omega0", format!("must be non-negative, got {omega0}")));
    }
    if !(delta0.is_finite() && delta0 > 0.0) {
        return Err(Error::invalid("delta0", format!("must be positive, got {delta0}")));
    }
    let angles = JumpAngles::from_angles(mixing_angle(omega0, delta0)?, mixing_angle(omega0, -delta0)?);
    let from_angle = angles.delta_theta.cos().powi(2);
    let ratio = omega0 * omega0 / (omega0 * omega0 + delta0 * delta0);
    if (from_angle - ratio).abs() > 1e-12 {
        return Err(Error::Inconsistent(format!(
            "cos^2(delta_theta) = {from_angle} but Omega0^2/(Omega0^2+Delta0^2) = {ratio}"
        )));
    }
    Ok(ratio)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::DriveProfile;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, SQRT_2};

    fn drive(om: f64, de: f64) -> DriveProfile {
        DriveProfile::gaussian_step(1.0, om, de).unwrap()
    }

    /// Plain trapezoid rule on `n` intervals.
    fn trapezoid(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let inner: f64 = (1..n).map(|k| g(a + k as f64 * h)).sum();
        h * (0.5 * (g(a) + g(b)) + inner)
    }

    #[test]
    fn phases_without_pulse() {
        let p = accumulate_phases(&drive(0.0, 5.0), -20.0, 20.0).unwrap();
        assert!((p.delta_minus - 50.0).abs() < 1e-10);
        assert!((p.delta_plus - 50.0).abs() < 1e-10);
    }

    #[test]
    fn phases_symmetric_and_match_trapezoid() {
        let d = drive(5.0, 5.0);
        let p = accumulate_phases(&d, -20.0, 20.0).unwrap();
        assert!((p.delta_minus - p.delta_plus).abs() < 1e-10);
        let oracle = 0.5 * trapezoid(|t| d.splitting(t, Side::Left), -20.0, 0.0, 1_000_000);
        assert!(((p.delta_minus - oracle) / oracle).abs() < 1e-6, "{} vs {oracle}", p.delta_minus);
    }

    #[test]
    fn phases_need_window_around_zero() {
        assert!(accumulate_phases(&drive(1.0, 1.0), 0.5, 2.0).is_err());
    }

    #[test]
    fn jump_angles_examples() {
        let a = jump_angles(&drive(2.0, 2.0)).unwrap();
        assert!((a.theta_minus - FRAC_PI_8).abs() < 1e-15);
        assert!((a.theta_plus - 3.0 * FRAC_PI_8).abs() < 1e-15);
        assert!((a.delta_theta + FRAC_PI_4).abs() < 1e-15);

        assert!(jump_angles(&drive(1e6, 1.0)).unwrap().delta_theta.abs() < 1e-5);
        let weak = jump_angles(&drive(1e-8, 1.0)).unwrap();
        assert!((weak.delta_theta + FRAC_PI_2).abs() < 1e-7);
        assert!(weak.delta_theta.cos().powi(2) < 1e-15);

        assert!(matches!(jump_angles(&drive(0.0, 0.0)), Err(Error::UndefinedMixingAngle)));
        let smooth = DriveProfile::new(
            drive(1.0, 1.0).shape,
            1.0,
            crate::pulse::DetuningProfile::new(1.0, 0.1).unwrap(),
        )
        .unwrap();
        assert!(jump_angles(&smooth).is_err());
    }

    #[test]
    fn piecewise_examples() {
        let id = piecewise_propagator_adiabatic(&PhasePair::zero(), &JumpAngles::from_angles(0.3, 0.3));
        assert!(linalg::max_abs_diff(&id, &linalg::identity()) < 1e-15);

        let phases = PhasePair { delta_minus: 1.3, delta_plus: -0.4 };
        let u = piecewise_propagator_adiabatic(&phases, &JumpAngles::from_angles(0.2, 0.2));
        let expect = phase_diag(0.9);
        assert!(linalg::max_abs_diff(&u, &expect) < 1e-15);
    }

    #[test]
    fn cayley_klein_substitution() {
        let ck = cayley_klein(&PhasePair::zero(), &JumpAngles::from_angles(FRAC_PI_8, 3.0 * FRAC_PI_8));
        assert!((ck.a - C64::new(SQRT_2 / 2.0, 0.0)).norm() < 1e-15);
        assert!((ck.b - C64::new(-SQRT_2 / 2.0, 0.0)).norm() < 1e-15);

        let ck = model_cayley_klein(&drive(4.0, 4.0), -20.0, 20.0).unwrap();
        assert!((ck.a.norm_sqr() - 0.5).abs() < 1e-12);
        assert!((ck.b.norm_sqr() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn from_propagator_removes_global_phase() {
        let ck = CayleyKlein::new(C64::new(0.6, 0.0), C64::new(0.0, 0.8)).unwrap();
        let phase = C64::from_polar(1.0, 0.37);
        let u = ck.matrix().map(|row| row.map(|z| z * phase));
        let back = CayleyKlein::from_propagator(&u).unwrap();
        assert!((back.a - ck.a).norm() < 1e-14 && (back.b - ck.b).norm() < 1e-14);
        assert!(CayleyKlein::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0)).is_err());
    }

    #[test]
    fn analytic_p2_examples() {
        assert!((analytic_p2(3.0, 3.0).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(analytic_p2(0.0, 2.0).unwrap(), 0.0);
        assert!((analytic_p2(10.0, 5.0).unwrap() - 0.8).abs() < 1e-15);
        assert!(analytic_p2(1.0, 0.0).is_err());
        assert!(analytic_p2(-1.0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn ck_normalized_and_phase_independent(
            dm in -50.0f64..50.0, dp in -50.0f64..50.0,
            om in 0.01f64..10.0, de in 0.01f64..10.0,
        ) {
            let angles = jump_angles(&drive(om, de)).unwrap();
            let ck = cayley_klein(&PhasePair { delta_minus: dm, delta_plus: dp }, &angles);
            let ck0 = cayley_klein(&PhasePair::zero(), &angles);
            prop_assert!((ck.norm_sqr() - 1.0).abs() < 1e-12);
            prop_assert!((ck.transition_probability() - ck0.transition_probability()).abs() < 1e-14);
            prop_assert!((ck.a.norm() - ck0.a.norm()).abs() < 1e-14);
        }

        #[test]
        fn cos2_identity(om in 1e-6f64..10.0, de in 1e-6f64..10.0) {
            let a = jump_angles(&drive(om, de)).unwrap();
            let ratio = om * om / (om * om + de * de);
            prop_assert!((a.delta_theta.cos().powi(2) - ratio).abs() < 1e-12);
            prop_assert!((a.theta_plus - (FRAC_PI_2 - a.theta_minus)).abs() < 1e-15);
        }

        #[test]
        fn diabatic_propagator_matches_ck(
            dm in -20.0f64..20.0, dp in -20.0f64..20.0,
            om in 0.01f64..10.0, de in 0.01f64..10.0,
        ) {
            let phases = PhasePair { delta_minus: dm, delta_plus: dp };
            let angles = jump_angles(&drive(om, de)).unwrap();
            let u = diabatic_propagator(&phases, &angles);
            let ck = cayley_klein(&phases, &angles);
            prop_assert!(linalg::max_abs_diff(&u, &ck.matrix()) < 1e-12);
            prop_assert!((u[1][0].norm_sqr() - analytic_p2(om, de).unwrap()).abs() < 1e-12);
            prop_assert!((linalg::det2(&piecewise_propagator_adiabatic(&phases, &angles)).norm() - 1.0).abs() < 1e-12);
        }
    }
}
