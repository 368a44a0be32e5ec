//! SU(2)-symmetric three-state chain driven by the same coupling and
//! detuning as the two-level system.
//!
//! With `H3 = -Delta J_z + Omega J_x` in the spin-1 representation, the
//! propagator is the Majorana lift of the two-level Cayley–Klein pair:
//!
//! ```text
//!        [  a^2        sqrt2 a b      b^2     ]
//! U3 =   [ -sqrt2 a b*  |a|^2-|b|^2  sqrt2 a* b ]
//!        [  b*^2       -sqrt2 a* b*   a*^2    ]
//! ```
//!
//! The lower-left corner is `+b*^2`: it is the `|dd>` component of
//! `(U|u>) (x) (U|u>)` with `U|u> = a|u> - b*|d>`. The opposite sign would make
//! the first two columns non-orthogonal.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::{self, Hamiltonian, IntegrationSpec, Side};
use crate::linalg::{self, CMatrix, StateVector, C64};
use crate::pulse::DriveProfile;
use crate::stepwise::CayleyKlein;
use crate::two_level::TwoLevel;

/// `H3 = [[-Delta, Omega/sqrt2, 0], [Omega/sqrt2, 0, Omega/sqrt2], [0, Omega/sqrt2, Delta]]`
/// (no factor 1/2, unlike the two-level Hamiltonian).
pub fn hamiltonian_3(drive: &DriveProfile, t: f64) -> CMatrix<3> {
    hamiltonian_3_limit(drive, t, Side::Left)
}

fn hamiltonian_3_limit(drive: &DriveProfile, t: f64, side: Side) -> CMatrix<3> {
    let c = drive.rabi(t) * FRAC_1_SQRT_2;
    let d = drive.detuning_at(t, side);
    linalg::from_real([[-d, c, 0.0], [c, 0.0, c], [0.0, c, d]])
}

#[derive(Debug, Clone, Copy)]
pub struct ThreeLevel<'a>(pub &'a DriveProfile);

impl Hamiltonian<3> for ThreeLevel<'_> {
    fn matrix(&self, t: f64, side: Side) -> CMatrix<3> {
        hamiltonian_3_limit(self.0, t, side)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Propagator3 {
    pub matrix: CMatrix<3>,
}

impl Propagator3 {
    /// `P_{i -> j} = |U_{ji}|^2`.
    pub fn transition_table(&self) -> TransitionTable {
        let m = linalg::squared_moduli(&self.matrix);
        TransitionTable { probabilities: std::array::from_fn(|i| std::array::from_fn(|j| m[j][i])) }
    }

    pub fn unitarity_defect(&self) -> f64 {
        linalg::unitarity_defect(&self.matrix)
    }
}

/// `probabilities[i][j]` is the probability to end in `|j+1>` when starting in
/// `|i+1>`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransitionTable {
    pub probabilities: [[f64; 3]; 3],
}

impl TransitionTable {
    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.probabilities[from - 1][to - 1]
    }

    pub fn row(&self, from: usize) -> [f64; 3] {
        self.probabilities[from - 1]
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn stochasticity_defect(&self) -> f64 {
        let p = &self.probabilities;
        (0..3)
            .flat_map(|k| {
                let row: f64 = p[k].iter().sum();
                let col: f64 = (0..3).map(|i| p[i][k]).sum();
                [(row - 1.0).abs(), (col - 1.0).abs()]
            })
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &TransitionTable) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..3 {
            for j in 0..3 {
                worst = worst.max((self.probabilities[i][j] - other.probabilities[i][j]).abs());
            }
        }
        worst
    }
}

/// Lifts a two-level Cayley–Klein pair to the spin-1 propagator.
pub fn majorana_u3(ck: &CayleyKlein) -> Result<Propagator3> {
    let n = ck.norm_sqr();
    if !n.is_finite() || (n - 1.0).abs() > 1e-9 {
        return Err(Error::CayleyKleinNorm { norm_sqr: n });
    }
    let (a, b) = (ck.a, ck.b);
    let (ac, bc) = (a.conj(), b.conj());
    let middle = C64::new(a.norm_sqr() - b.norm_sqr(), 0.0);
    Ok(Propagator3 {
        matrix: [
            [a * a, a * b * SQRT_2, b * b],
            [-(a * bc) * SQRT_2, middle, ac * b * SQRT_2],
            [bc * bc, -(ac * bc) * SQRT_2, ac * ac],
        ],
    })
}

fn s2_c2(omega0: f64, delta0: f64) -> Result<(f64, f64)> {
    if !(omega0.is_finite() && omega0 >= 0.0) {
        return Err(Error::invalid("omega0", format!("must be non-negative, got {omega0}")));
    }
    if !(delta0.is_finite() && delta0 > 0.0) {
        return Err(Error::invalid("delta0", format!("must be positive, got {delta0}")));
    }
    let total = omega0 * omega0 + delta0 * delta0;
    Ok((delta0 * delta0 / total, omega0 * omega0 / total))
}

/// Transition probabilities of the adiabatic–sudden model for the chain, with
/// `s^2 = Delta0^2/(Omega0^2+Delta0^2)` and `c^2 = Omega0^2/(Omega0^2+Delta0^2)`.
pub fn analytic_transition_table(omega0: f64, delta0: f64) -> Result<TransitionTable> {
    let (s2, c2) = s2_c2(omega0, delta0)?;
    let mixed = 2.0 * s2 * c2;
    Ok(TransitionTable {
        probabilities: [
            [s2 * s2, mixed, c2 * c2],
            [mixed, (s2 - c2) * (s2 - c2), mixed],
            [c2 * c2, mixed, s2 * s2],
        ],
    })
}

/// Leading-order expansion of the analytic table for `Omega0 >> Delta0`.
/// Only meaningful in that limit.
pub fn strong_coupling_table(omega0: f64, delta0: f64) -> Result<TransitionTable> {
    s2_c2(omega0, delta0)?;
    if omega0 == 0.0 {
        return Err(Error::invalid("omega0", "strong-coupling expansion needs omega0 > 0"));
    }
    let r2 = (delta0 / omega0).powi(2);
    Ok(TransitionTable {
        probabilities: [
            [0.0, 2.0 * r2, 1.0 - 2.0 * r2],
            [2.0 * r2, 1.0 - 4.0 * r2, 2.0 * r2],
            [1.0 - 2.0 * r2, 2.0 * r2, 0.0],
        ],
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThreeLevelOutcome {
    pub populations: [f64; 3],
    pub propagator: Propagator3,
}

/// Integrates the chain from basis state `|initial_index>` (1-based).
pub fn simulate_three_level(
    drive: &DriveProfile,
    spec: &IntegrationSpec,
    initial_index: usize,
) -> Result<ThreeLevelOutcome> {
    let psi0 = StateVector::<3>::basis(initial_index)?;
    let matrix = integrator::build_propagator(&ThreeLevel(drive), spec)?;
    let populations = StateVector(linalg::mat_vec(&matrix, &psi0.0)).populations();
    Ok(ThreeLevelOutcome { populations, propagator: Propagator3 { matrix } })
}

/// Numerical two-level Cayley–Klein pair of a drive.
pub fn numeric_cayley_klein(drive: &DriveProfile, spec: &IntegrationSpec) -> Result<CayleyKlein> {
    let u2 = integrator::build_propagator(&TwoLevel(drive), spec)?;
    CayleyKlein::from_propagator(&u2)
}

/// Elementwise distance between the integrated three-level propagator and the
/// Majorana lift of the integrated two-level one.
pub fn majorana_residual(drive: &DriveProfile, spec: &IntegrationSpec) -> Result<f64> {
    let lifted = majorana_u3(&numeric_cayley_klein(drive, spec)?)?;
    let direct = integrator::build_propagator(&ThreeLevel(drive), spec)?;
    Ok(linalg::max_abs_diff(&lifted.matrix, &direct))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ZERO;
    use crate::stepwise;
    use nalgebra::Matrix3;
    use proptest::prelude::*;

    fn drive(om: f64, de: f64) -> DriveProfile {
        DriveProfile::gaussian_step(1.0, om, de).unwrap()
    }

    fn ck(a: C64, b: C64) -> CayleyKlein {
        CayleyKlein::new(a, b).unwrap()
    }

    #[test]
    fn hamiltonian_3_structure() {
        let h = hamiltonian_3(&drive(0.0, 2.0), -1.0);
        assert_eq!(h.map(|r| r.map(|z| z.re)), [[-2.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 2.0]]);
        for t in [-3.0, 0.0, 0.4] {
            assert_eq!(linalg::trace(&hamiltonian_3(&drive(3.0, 1.0), t)).norm(), 0.0);
        }
    }

    #[test]
    fn hamiltonian_3_spectrum_is_spin_one_ladder() {
        // Brute-force symmetric eigensolve as the oracle.
        for (om, de) in [(0.7, 2.1), (5.0, 5.0), (9.3, 0.4), (1.0, 0.0f64)] {
            let d = drive(om, de.max(1e-300));
            let h = hamiltonian_3(&d, -0.0);
            let m = Matrix3::from_fn(|i, j| h[i][j].re);
            let mut ev: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
            ev.sort_by(f64::total_cmp);
            let e = om.hypot(de);
            assert!((ev[0] + e).abs() < 1e-12 && ev[1].abs() < 1e-12 && (ev[2] - e).abs() < 1e-12, "{ev:?}");
        }
    }

    #[test]
    fn lift_of_identity_and_flip() {
        let id = majorana_u3(&ck(C64::new(1.0, 0.0), ZERO)).unwrap();
        assert!(linalg::max_abs_diff(&id.matrix, &linalg::identity()) < 1e-15);

        let flip = majorana_u3(&ck(ZERO, C64::new(1.0, 0.0))).unwrap().matrix;
        let expect = linalg::from_real([[0.0, 0.0, 1.0], [0.0, -1.0, 0.0], [1.0, 0.0, 0.0]]);
        assert!(linalg::max_abs_diff(&flip, &expect) < 1e-15);

        assert!(majorana_u3(&CayleyKlein { a: C64::new(1.0, 0.0), b: C64::new(0.1, 0.0) }).is_err());
    }

    #[test]
    fn analytic_table_examples() {
        let t = analytic_transition_table(2.0, 2.0).unwrap();
        assert_eq!(t.row(1), [0.25, 0.5, 0.25]);
        assert_eq!(t.row(2), [0.5, 0.0, 0.5]);

        let t = analytic_transition_table(10.0, 1.0).unwrap();
        assert!((t.get(1, 3) - (100.0f64 / 101.0).powi(2)).abs() < 1e-15);
        assert!((t.get(1, 3) - 0.98030).abs() < 1e-5);
        assert!((t.get(1, 2) - 0.01960).abs() < 1e-5);
        assert!((t.get(1, 1) - 0.00010).abs() < 1e-5);

        assert!(analytic_transition_table(1.0, 0.0).is_err());
    }

    #[test]
    fn middle_state_protection_at_strong_coupling() {
        for ratio in [10.0, 20.0, 50.0, 200.0] {
            let t = analytic_transition_table(ratio, 1.0).unwrap();
            assert!(t.get(2, 2) >= 1.0 - 4.0 / (ratio * ratio) - 1e-9);
        }
    }

    #[test]
    fn no_pulse_keeps_populations() {
        let spec = IntegrationSpec::default();
        for k in 1..=3 {
            let out = simulate_three_level(&drive(0.0, 3.0), &spec, k).unwrap();
            assert!((out.populations[k - 1] - 1.0).abs() < 1e-9);
        }
        assert!(simulate_three_level(&drive(0.0, 3.0), &spec, 4).is_err());
    }

    #[test]
    fn majorana_exact_for_one_drive() {
        let spec = IntegrationSpec::default();
        let r = majorana_residual(&drive(3.3, 1.7), &spec).unwrap();
        assert!(r < 1e-6, "{r}");
    }

    #[test]
    fn middle_state_start_at_equal_parameters() {
        let out = simulate_three_level(&drive(5.0, 5.0), &IntegrationSpec::default(), 2).unwrap();
        assert!(out.populations[1].abs() < 0.02, "{:?}", out.populations);
    }

    fn unit_pair() -> impl Strategy<Value = CayleyKlein> {
        (0.0f64..std::f64::consts::FRAC_PI_2, -3.2f64..3.2, -3.2f64..3.2).prop_map(|(chi, pa, pb)| CayleyKlein {
            a: C64::from_polar(chi.cos(), pa),
            b: C64::from_polar(chi.sin(), pb),
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn lift_is_unitary_with_fixed_corners(pair in unit_pair()) {
            let u = majorana_u3(&pair).unwrap();
            prop_assert!(u.unitarity_defect() < 1e-12);
            prop_assert!(u.matrix[1][1].im.abs() <= 1e-12);
            prop_assert!((u.matrix[0][2] - pair.b * pair.b).norm() < 1e-15);
            prop_assert!((u.matrix[2][0] - pair.b.conj() * pair.b.conj()).norm() < 1e-15);
            prop_assert!(u.transition_table().stochasticity_defect() < 1e-12);
        }

        #[test]
        fn analytic_table_is_squared_lift(om in 0.01f64..10.0, de in 0.01f64..10.0, dm in -9.0f64..9.0, dp in -9.0f64..9.0) {
            let angles = stepwise::jump_angles(&drive(om, de)).unwrap();
            let pair = stepwise::cayley_klein(&stepwise::PhasePair { delta_minus: dm, delta_plus: dp }, &angles);
            let lifted = majorana_u3(&pair).unwrap().transition_table();
            let table = analytic_transition_table(om, de).unwrap();
            prop_assert!(lifted.max_abs_diff(&table) < 1e-12);
            prop_assert!(table.stochasticity_defect() < 1e-12);
            let mut mirrored = table.row(1);
            mirrored.reverse();
            prop_assert_eq!(table.row(3), mirrored);
            let mixed = table.get(1, 2);
            prop_assert!([table.get(2, 1), table.get(2, 3), table.get(3, 2)].iter().all(|&p| (p - mixed).abs() < 1e-15));
        }
    }
}
