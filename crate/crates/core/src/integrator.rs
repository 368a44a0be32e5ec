//! Time propagation of the Schrödinger equation `i dpsi/dt = H(t) psi`
//! (`ħ = 1`) and adaptive quadrature.
//!
//! The stepper is the Dormand–Prince 5(4) pair with local extrapolation and a
//! fixed-step classic RK4 fallback. A Hamiltonian may be discontinuous at
//! `t = 0`; with [`IntegrationSpec::split_at_zero`] the window is cut there and
//! each half is integrated with the one-sided limits of `H`, so no step ever
//! straddles the jump.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, StateVector, C64, I};

/// Which one-sided limit to take when `H` is evaluated exactly at a
/// discontinuity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// A time-dependent Hermitian matrix.
///
/// `side` only matters at a discontinuity of `H`; implementations without one
/// may ignore it.
pub trait Hamiltonian<const N: usize> {
    fn matrix(&self, t: f64, side: Side) -> CMatrix<N>;
}

impl<const N: usize, F> Hamiltonian<N> for F
where
    F: Fn(f64) -> CMatrix<N>,
{
    fn matrix(&self, t: f64, _side: Side) -> CMatrix<N> {
        self(t)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Dormand–Prince 5(4) with error control.
    Adaptive,
    /// Classic RK4 with constant step `step`.
    Fixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSpec {
    pub t_start: f64,
    pub t_end: f64,
    /// Initial step in adaptive mode, the step in fixed mode.
    pub step: f64,
    /// Local error target per unit time (adaptive mode): an accepted step of
    /// length `h` has an estimated local error of at most `tolerance * |h|`.
    pub tolerance: f64,
    pub split_at_zero: bool,
    pub method: Method,
}

impl Default for IntegrationSpec {
    fn default() -> Self {
        Self {
            t_start: -20.0,
            t_end: 20.0,
            step: 1e-2,
            tolerance: 1e-10,
            split_at_zero: true,
            method: Method::Adaptive,
        }
    }
}

impl IntegrationSpec {
    /// Default settings over `[-20 T, 20 T]` for a pulse of width `T`.
    pub fn for_width(width: f64) -> Self {
        Self { t_start: -20.0 * width, t_end: 20.0 * width, ..Self::default() }
    }

    pub fn window(t_start: f64, t_end: f64) -> Self {
        Self { t_start, t_end, ..Self::default() }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }

    pub fn fixed_step(mut self, step: f64) -> Self {
        self.method = Method::Fixed;
        self.step = step;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_start.is_finite() && self.t_end.is_finite()) {
            return Err(Error::invalid("window", "endpoints must be finite"));
        }
        if self.t_start >= self.t_end {
            return Err(Error::invalid(
                "window",
                format!("t_start ({}) must be less than t_end ({})", self.t_start, self.t_end),
            ));
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::invalid("step", format!("must be positive, got {}", self.step)));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::invalid(
                "tolerance",
                format!("must be positive, got {}", self.tolerance),
            ));
        }
        Ok(())
    }

    /// Segment boundaries in integration order.
    fn boundaries(&self, forward: bool) -> Vec<f64> {
        let mut b = vec![self.t_start];
        if self.split_at_zero && self.t_start < 0.0 && 0.0 < self.t_end {
            b.push(0.0);
        }
        b.push(self.t_end);
        if !forward {
            b.reverse();
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint<const N: usize> {
    pub t: f64,
    pub state: StateVector<N>,
    pub populations: [f64; N],
}

#[derive(Debug, Clone, PartialEq)]
pub struct Propagation<const N: usize> {
    pub state: StateVector<N>,
    /// Every accepted step, present only when requested.
    pub trajectory: Option<Vec<TrajectoryPoint<N>>>,
    pub steps: usize,
}

/// Objects that can be advanced by `d/dt y = -i H y`.
trait Amplitudes<const N: usize>: Copy {
    fn derivative(h: &CMatrix<N>, y: &Self) -> Self;
    /// `self + sum_k c_k x_k`
    fn combine(&self, terms: &[(f64, &Self)]) -> Self;
    fn max_abs_diff(&self, other: &Self) -> f64;
}

impl<const N: usize> Amplitudes<N> for [C64; N] {
    fn derivative(h: &CMatrix<N>, y: &Self) -> Self {
        linalg::mat_vec(h, y).map(|z| -I * z)
    }

    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = *self;
        for (c, x) in terms {
            for (o, xi) in out.iter_mut().zip(x.iter()) {
                *o += *xi * *c;
            }
        }
        out
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.iter().zip(other).map(|(a, b)| (a - b).norm()).fold(0.0, linalg::nan_max)
    }
}

impl<const N: usize> Amplitudes<N> for CMatrix<N> {
    fn derivative(h: &CMatrix<N>, y: &Self) -> Self {
        linalg::mat_mul(h, y).map(|row| row.map(|z| -I * z))
    }

    fn combine(&self, terms: &[(f64, &Self)]) -> Self {
        let mut out = *self;
        for (c, x) in terms {
            for (orow, xrow) in out.iter_mut().zip(x.iter()) {
                for (o, xi) in orow.iter_mut().zip(xrow.iter()) {
                    *o += *xi * *c;
                }
            }
        }
        out
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        linalg::max_abs_diff(self, other)
    }
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// b - b_hat (error weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

struct Segment<'h, const N: usize, H: Hamiltonian<N> + ?Sized> {
    ham: &'h H,
    a: f64,
    b: f64,
    mid: f64,
}

impl<'h, const N: usize, H: Hamiltonian<N> + ?Sized> Segment<'h, N, H> {
    fn new(ham: &'h H, a: f64, b: f64) -> Self {
        Self { ham, a, b, mid: 0.5 * (a + b) }
    }

    /// `H` evaluated with the limit taken from inside the segment.
    fn h(&self, t: f64) -> CMatrix<N> {
        let side = if t < self.mid { Side::Right } else { Side::Left };
        self.ham.matrix(t, side)
    }

    fn checked_h(&self, t: f64) -> Result<CMatrix<N>> {
        let h = self.h(t);
        let scale = h.iter().flatten().map(|z| z.norm()).fold(1.0, f64::max);
        if !scale.is_finite() {
            return Err(Error::NonFinite { context: "Hamiltonian element", value: scale });
        }
        let dev = linalg::hermiticity_defect(&h);
        if dev > 1e-12 * scale {
            return Err(Error::NotHermitian { t, deviation: dev });
        }
        Ok(h)
    }
}

fn integrate<const N: usize, Y, H>(
    ham: &H,
    y0: Y,
    spec: &IntegrationSpec,
    forward: bool,
    mut observe: impl FnMut(f64, &Y),
) -> Result<(Y, usize)>
where
    Y: Amplitudes<N>,
    H: Hamiltonian<N> + ?Sized,
{
    spec.validate()?;
    let bounds = spec.boundaries(forward);
    let mut y = y0;
    let mut steps = 0;
    observe(bounds[0], &y);
    for w in bounds.windows(2) {
        let seg = Segment::new(ham, w[0], w[1]);
        let (y_end, n) = match spec.method {
            Method::Adaptive => dopri_segment(&seg, y, spec, &mut observe)?,
            Method::Fixed => rk4_segment(&seg, y, spec, &mut observe)?,
        };
        y = y_end;
        steps += n;
    }
    Ok((y, steps))
}

fn dopri_segment<const N: usize, Y, H>(
    seg: &Segment<'_, N, H>,
    y0: Y,
    spec: &IntegrationSpec,
    observe: &mut impl FnMut(f64, &Y),
) -> Result<(Y, usize)>
where
    Y: Amplitudes<N>,
    H: Hamiltonian<N> + ?Sized,
{
    let span = seg.b - seg.a;
    let dir = span.signum();
    // Error per unit step: a step of length h may contribute at most
    // `tolerance * |h|`, which keeps the global drift of the order of the
    // tolerance over a window of a few tens of time units.
    let tol_per_time = spec.tolerance;
    let mut t = seg.a;
    let mut y = y0;
    let mut h = spec.step.min(span.abs()) * dir;
    let mut k1 = Y::derivative(&seg.checked_h(t)?, &y);
    let mut accepted = 0;

    while t != seg.b {
        // Finish the segment when the remainder would be a sliver of a step.
        let last = (seg.b - t - h) * dir <= 1e-3 * h.abs();
        if last {
            h = seg.b - t;
        }
        if h.abs() < 1e-13 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }

        let f = |tt: f64, yy: &Y| Y::derivative(&seg.h(tt), yy);
        let k2 = f(t + C2 * h, &y.combine(&[(h * A21, &k1)]));
        let k3 = f(t + C3 * h, &y.combine(&[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = f(t + C4 * h, &y.combine(&[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)]));
        let k5 = f(
            t + C5 * h,
            &y.combine(&[(h * A51, &k1), (h * A52, &k2), (h * A53, &k3), (h * A54, &k4)]),
        );
        let t_new = if last { seg.b } else { t + h };
        let k6 = f(
            t_new,
            &y.combine(&[(h * A61, &k1), (h * A62, &k2), (h * A63, &k3), (h * A64, &k4), (h * A65, &k5)]),
        );
        let y_new = y.combine(&[(h * B1, &k1), (h * B3, &k3), (h * B4, &k4), (h * B5, &k5), (h * B6, &k6)]);
        let k7 = Y::derivative(&seg.checked_h(t_new)?, &y_new);
        let zero = y.combine(&[(-1.0, &y)]);
        let err_vec = zero.combine(&[
            (h * E1, &k1),
            (h * E3, &k3),
            (h * E4, &k4),
            (h * E5, &k5),
            (h * E6, &k6),
            (h * E7, &k7),
        ]);
        let err = err_vec.max_abs_diff(&zero);
        if !err.is_finite() {
            return Err(Error::NonFinite { context: "integrator error estimate", value: err });
        }

        let tol = tol_per_time * h.abs();
        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * (tol / err).powf(0.25)).clamp(MIN_FACTOR, MAX_FACTOR)
        };
        if err <= tol {
            t = t_new;
            y = y_new;
            k1 = k7;
            accepted += 1;
            observe(t, &y);
            h *= factor;
        } else {
            h *= factor.min(1.0);
        }
    }
    Ok((y, accepted))
}

fn rk4_segment<const N: usize, Y, H>(
    seg: &Segment<'_, N, H>,
    y0: Y,
    spec: &IntegrationSpec,
    observe: &mut impl FnMut(f64, &Y),
) -> Result<(Y, usize)>
where
    Y: Amplitudes<N>,
    H: Hamiltonian<N> + ?Sized,
{
    let span = seg.b - seg.a;
    let n = (span.abs() / spec.step).ceil().max(1.0) as usize;
    let h = span / n as f64;
    let mut y = y0;
    for i in 0..n {
        let t = seg.a + i as f64 * h;
        let t_next = if i + 1 == n { seg.b } else { seg.a + (i + 1) as f64 * h };
        let tm = t + 0.5 * h;
        let k1 = Y::derivative(&seg.checked_h(t)?, &y);
        let k2 = Y::derivative(&seg.h(tm), &y.combine(&[(0.5 * h, &k1)]));
        let k3 = Y::derivative(&seg.h(tm), &y.combine(&[(0.5 * h, &k2)]));
        let k4 = Y::derivative(&seg.h(t_next), &y.combine(&[(h, &k3)]));
        y = y.combine(&[(h / 6.0, &k1), (h / 3.0, &k2), (h / 3.0, &k3), (h / 6.0, &k4)]);
        observe(t_next, &y);
    }
    Ok((y, n))
}

fn check_initial<const N: usize>(psi0: &StateVector<N>) -> Result<()> {
    psi0.check_normalized(1e-9)
}

/// Propagates `psi0` from `spec.t_start` to `spec.t_end`.
pub fn propagate<const N: usize, H: Hamiltonian<N> + ?Sized>(
    ham: &H,
    psi0: &StateVector<N>,
    spec: &IntegrationSpec,
    record_trajectory: bool,
) -> Result<Propagation<N>> {
    run_state(ham, psi0, spec, record_trajectory, true)
}

/// Propagates `psi_end`, given at `spec.t_end`, backwards to `spec.t_start`.
pub fn propagate_backward<const N: usize, H: Hamiltonian<N> + ?Sized>(
    ham: &H,
    psi_end: &StateVector<N>,
    spec: &IntegrationSpec,
) -> Result<Propagation<N>> {
    run_state(ham, psi_end, spec, false, false)
}

fn run_state<const N: usize, H: Hamiltonian<N> + ?Sized>(
    ham: &H,
    psi0: &StateVector<N>,
    spec: &IntegrationSpec,
    record_trajectory: bool,
    forward: bool,
) -> Result<Propagation<N>> {
    check_initial(psi0)?;
    let mut trajectory = record_trajectory.then(Vec::new);
    let (amps, steps) = integrate(ham, psi0.0, spec, forward, |t, y: &[C64; N]| {
        if let Some(traj) = trajectory.as_mut() {
            let state = StateVector(*y);
            traj.push(TrajectoryPoint { t, state, populations: state.populations() });
        }
    })?;
    Ok(Propagation { state: StateVector(amps), trajectory, steps })
}

/// Diabatic-basis propagator `U(t_end, t_start)`; column `j` is the
/// propagated basis state `|j+1>`.
pub fn build_propagator<const N: usize, H: Hamiltonian<N> + ?Sized>(
    ham: &H,
    spec: &IntegrationSpec,
) -> Result<CMatrix<N>> {
    let (u, _) = integrate(ham, linalg::identity::<N>(), spec, true, |_, _: &CMatrix<N>| {})?;
    Ok(u)
}

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1].
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.000_000_000_000_000_000_000_000_000_000_000,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

const MAX_QUAD_DEPTH: u32 = 60;

fn gauss_kronrod(g: &impl Fn(f64) -> f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let sample = |x: f64| -> Result<f64> {
        let v = g(x);
        if v.is_finite() {
            Ok(v)
        } else {
            Err(Error::NonFinite { context: "quadrature integrand", value: v })
        }
    };
    let fc = sample(center)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = sample(center - dx)? + sample(center + dx)?;
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).abs()))
}

/// Adaptive Gauss–Kronrod (7, 15) integral of `g` over `[a, b]` to absolute
/// accuracy `tolerance`.
///
/// The integrand is never sampled at the endpoints, so a jump exactly at `a`
/// or `b` is harmless.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn quadrature(g: impl Fn(f64) -> f64, a: f64, b: f64, tolerance: f64) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("quadrature interval", format!("[{a}, {b}] not finite")));
    }
    if !(tolerance > 0.0) {
        return Err(Error::invalid("tolerance", format!("must be positive, got {tolerance}")));
    }
    if a == b {
        return Ok(0.0);
    }
    let (value, err) = gauss_kronrod(&g, a, b)?;
    refine(&g, a, b, value, err, tolerance, 0)
}

fn refine(
    g: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    value: f64,
    err: f64,
    tolerance: f64,
    depth: u32,
) -> Result<f64> {
    if err <= tolerance.max(50.0 * f64::EPSILON * value.abs()) {
        return Ok(value);
    }
    if depth >= MAX_QUAD_DEPTH {
        return Err(Error::QuadratureFailed { a, b });
    }
    let m = 0.5 * (a + b);
    let (lv, le) = gauss_kronrod(g, a, m)?;
    let (rv, re) = gauss_kronrod(g, m, b)?;
    Ok(refine(g, a, m, lv, le, 0.5 * tolerance, depth + 1)?
        + refine(g, m, b, rv, re, 0.5 * tolerance, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{from_real, ZERO};
    use std::f64::consts::PI;

    fn rabi_h(omega: f64, delta: f64) -> impl Fn(f64) -> CMatrix<2> {
        move |_t| from_real([[-0.5 * delta, 0.5 * omega], [0.5 * omega, 0.5 * delta]])
    }

    /// Closed-form detuned Rabi population, used as the independent oracle.
    fn rabi_p2(omega: f64, delta: f64, t: f64) -> f64 {
        let eps = omega.hypot(delta);
        (omega / eps).powi(2) * (0.5 * eps * t).sin().powi(2)
    }

    #[test]
    fn resonant_pi_pulse() {
        let spec = IntegrationSpec::window(0.0, 1.0);
        let psi0 = StateVector::basis(1).unwrap();
        let out = propagate(&rabi_h(PI, 0.0), &psi0, &spec, false).unwrap();
        let p = out.state.populations();
        assert!(p[0].abs() < 1e-9 && (p[1] - 1.0).abs() < 1e-9, "{p:?}");
    }

    #[test]
    fn diagonal_evolution_phase() {
        let d0 = 3.0;
        let t = 1.7;
        let spec = IntegrationSpec::window(0.0, t);
        let psi0 = StateVector::basis(1).unwrap();
        let out = propagate(&rabi_h(0.0, d0), &psi0, &spec, false).unwrap();
        let expect = C64::from_polar(1.0, 0.5 * d0 * t);
        assert!((out.state[0] - expect).norm() < 1e-9);
        assert!(out.state[1].norm() < 1e-15);
    }

    #[test]
    fn detuned_rabi_matches_formula() {
        let t_end = 2.0 * PI / 2f64.sqrt();
        let oracle = rabi_p2(1.0, 1.0, t_end);
        assert!(oracle.abs() < 1e-15);
        let spec = IntegrationSpec::window(0.0, t_end);
        let psi0 = StateVector::basis(1).unwrap();
        let p2 = propagate(&rabi_h(1.0, 1.0), &psi0, &spec, false).unwrap().state.populations()[1];
        assert!((p2 - oracle).abs() < 1e-9, "{p2}");

        for &t_end in &[0.3, 1.1, 2.9, 7.5] {
            let spec = IntegrationSpec::window(0.0, t_end);
            let p2 = propagate(&rabi_h(2.3, -0.7), &psi0, &spec, false).unwrap().state.populations()[1];
            assert!((p2 - rabi_p2(2.3, -0.7, t_end)).abs() < 1e-9);
        }
    }

    #[test]
    fn diagonal_propagator() {
        let (d0, t) = (2.0, 0.8);
        let u = build_propagator(&rabi_h(0.0, d0), &IntegrationSpec::window(0.0, t)).unwrap();
        let expect = [
            [C64::from_polar(1.0, 0.5 * d0 * t), ZERO],
            [ZERO, C64::from_polar(1.0, -0.5 * d0 * t)],
        ];
        assert!(linalg::max_abs_diff(&u, &expect) < 1e-9);
    }

    #[test]
    fn rk4_has_fourth_order_convergence() {
        let psi0 = StateVector::basis(1).unwrap();
        let t_end = 2.0;
        let exact = rabi_p2(2.0, 1.0, t_end);
        let err = |h: f64| {
            let spec = IntegrationSpec::window(0.0, t_end).fixed_step(h);
            let p2 = propagate(&rabi_h(2.0, 1.0), &psi0, &spec, false).unwrap().state.populations()[1];
            (p2 - exact).abs()
        };
        let (e1, e2, e3) = (err(0.1), err(0.05), err(0.025));
        let r1 = e1 / e2;
        let r2 = e2 / e3;
        assert!((r1 - 16.0).abs() < 3.0 && (r2 - 16.0).abs() < 3.0, "{r1} {r2}");
    }

    #[test]
    fn forward_then_backward_returns_initial_state() {
        struct Jump;
        impl Hamiltonian<2> for Jump {
            fn matrix(&self, t: f64, side: Side) -> CMatrix<2> {
                let om = 3.0 * (-0.5 * t * t).exp();
                let de = if t < 0.0 || (t == 0.0 && side == Side::Left) { 2.0 } else { -2.0 };
                from_real([[-0.5 * de, 0.5 * om], [0.5 * om, 0.5 * de]])
            }
        }
        let h = Jump;
        let spec = IntegrationSpec::window(-8.0, 8.0);
        let psi0 = StateVector::basis(1).unwrap();
        let fwd = propagate(&h, &psi0, &spec, false).unwrap();
        let back = propagate_backward(&h, &fwd.state, &spec).unwrap();
        let dev = back.state.0.max_abs_diff(&psi0.0);
        assert!(dev < 100.0 * spec.tolerance, "{dev}");
    }

    #[test]
    fn trajectory_only_when_requested() {
        let psi0 = StateVector::basis(1).unwrap();
        let spec = IntegrationSpec::window(-1.0, 1.0);
        let none = propagate(&rabi_h(1.0, 1.0), &psi0, &spec, false).unwrap();
        assert!(none.trajectory.is_none());
        let some = propagate(&rabi_h(1.0, 1.0), &psi0, &spec, true).unwrap();
        let traj = some.trajectory.unwrap();
        assert_eq!(traj.len(), some.steps + 1);
        assert_eq!(traj[0].t, -1.0);
        assert_eq!(traj.last().unwrap().t, 1.0);
        assert!(traj.iter().any(|p| p.t == 0.0));
        for p in &traj {
            assert!((p.populations.iter().sum::<f64>() - 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn rejects_non_hermitian() {
        let h = |_t: f64| [[ZERO, C64::new(1.0, 0.0)], [ZERO, ZERO]];
        let psi0 = StateVector::basis(1).unwrap();
        let err = propagate(&h, &psi0, &IntegrationSpec::window(0.0, 1.0), false).unwrap_err();
        assert!(matches!(err, Error::NotHermitian { .. }));
    }

    #[test]
    fn rejects_bad_spec_and_state() {
        let psi0 = StateVector::basis(1).unwrap();
        let h = rabi_h(1.0, 0.0);
        assert!(propagate(&h, &psi0, &IntegrationSpec::window(1.0, 0.0), false).is_err());
        let bad = IntegrationSpec { tolerance: 0.0, ..IntegrationSpec::default() };
        assert!(propagate(&h, &psi0, &bad, false).is_err());
        let unnormalized = StateVector([C64::new(1.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(matches!(
            propagate(&h, &unnormalized, &IntegrationSpec::default(), false),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn step_underflow_reports_time() {
        // Finite everywhere, but the level splitting reaches 1e30 at t = 1.5.
        let h = |t: f64| {
            let w = 1.0 / ((t - 1.5).powi(2) + 1e-30);
            from_real([[w, 0.0], [0.0, -w]])
        };
        let psi0 = StateVector([C64::new(0.6, 0.0), C64::new(0.8, 0.0)]);
        let spec = IntegrationSpec::window(1.0, 2.0);
        match propagate(&h, &psi0, &spec, false) {
            Err(Error::StepUnderflow { t }) => assert!((t - 1.5).abs() < 0.01, "{t}"),
            other => panic!("expected step underflow, got {other:?}"),
        }
    }

    #[test]
    fn quadrature_examples() {
        let v = quadrature(|_| 5.0, -20.0, 0.0, 1e-12).unwrap();
        assert!((v - 100.0).abs() < 1e-12);
        let g = quadrature(|t: f64| (-0.5 * t * t).exp(), -20.0, 20.0, 1e-12).unwrap();
        assert!((g - (2.0 * PI).sqrt()).abs() < 1e-11);
        assert!(quadrature(|t: f64| 1.0 / t, 0.0, 1.0, 1e-10).is_err());
        assert!(quadrature(|_| f64::NAN, 0.0, 1.0, 1e-10).is_err());
    }
}
