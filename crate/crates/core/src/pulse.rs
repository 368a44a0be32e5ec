//! Coupling and detuning profiles.
//!
//! The coupling is `Omega(t) = Omega0 * f(t)` with a peak-normalised, even
//! envelope `f`. The detuning has constant magnitude and flips sign at the
//! pulse peak, either as an ideal step or through a `tanh` ramp of width
//! `tau_jump`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::Side;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    /// `exp(-t^2 / 2T^2)`
    Gaussian,
    /// `sech(t / T)`
    Sech,
    /// `1 / (1 + (t/T)^2)`
    Lorentzian,
}

impl ShapeKind {
    pub const ALL: [ShapeKind; 3] = [ShapeKind::Gaussian, ShapeKind::Sech, ShapeKind::Lorentzian];

    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Gaussian => "gaussian",
            ShapeKind::Sech => "sech",
            ShapeKind::Lorentzian => "lorentzian",
        }
    }
}

impl std::str::FromStr for ShapeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gaussian" => Ok(ShapeKind::Gaussian),
            "sech" => Ok(ShapeKind::Sech),
            "lorentzian" => Ok(ShapeKind::Lorentzian),
            other => Err(Error::invalid(
                "shape",
                format!("unknown shape `{other}` (expected gaussian, sech or lorentzian)"),
            )),
        }
    }
}

impl std::fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Peak-normalised pulse envelope of width `T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseShape {
    kind: ShapeKind,
    width: f64,
}

impl PulseShape {
    pub fn new(kind: ShapeKind, width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::invalid("width", format!("must be positive and finite, got {width}")));
        }
        Ok(Self { kind, width })
    }

    pub fn gaussian(width: f64) -> Result<Self> {
        Self::new(ShapeKind::Gaussian, width)
    }

    pub fn kind(&self) -> ShapeKind {
        self.kind
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    /// Envelope value `f(t)`; `f(0) = 1`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "pulse shape time", value: t });
        }
        Ok(self.value(t))
    }

    pub(crate) fn value(&self, t: f64) -> f64 {
        let x = t / self.width;
        match self.kind {
            ShapeKind::Gaussian => (-0.5 * x * x).exp(),
            ShapeKind::Sech => 1.0 / x.cosh(),
            ShapeKind::Lorentzian => 1.0 / (1.0 + x * x),
        }
    }

    /// Analytic `df/dt`.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "pulse shape time", value: t });
        }
        let w = self.width;
        let x = t / w;
        let f = self.value(t);
        Ok(match self.kind {
            ShapeKind::Gaussian => -(x / w) * f,
            ShapeKind::Sech => -(x.tanh() / w) * f,
            ShapeKind::Lorentzian => -(2.0 * x / w) * f * f,
        })
    }
}

/// Detuning of magnitude `Delta0` that is `+Delta0` before the pulse peak and
/// `-Delta0` after it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetuningProfile {
    magnitude: f64,
    smoothing_time: f64,
}

impl DetuningProfile {
    /// `smoothing_time = 0` gives the ideal step.
    pub fn new(magnitude: f64, smoothing_time: f64) -> Result<Self> {
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::invalid(
                "delta0",
                format!("must be non-negative and finite, got {magnitude}"),
            ));
        }
        if !(smoothing_time.is_finite() && smoothing_time >= 0.0) {
            return Err(Error::invalid(
                "tau_jump",
                format!("must be non-negative and finite, got {smoothing_time}"),
            ));
        }
        Ok(Self { magnitude, smoothing_time })
    }

    pub fn step(magnitude: f64) -> Result<Self> {
        Self::new(magnitude, 0.0)
    }

    pub fn magnitude(&self) -> f64 {
        self.magnitude
    }

    pub fn smoothing_time(&self) -> f64 {
        self.smoothing_time
    }

    pub fn is_step(&self) -> bool {
        self.smoothing_time == 0.0
    }

    /// `Delta(t)`. For the ideal step the value at exactly `t = 0` is the left
    /// limit `+Delta0`.
    pub fn evaluate(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "detuning time", value: t });
        }
        Ok(self.value(t))
    }

    pub(crate) fn value(&self, t: f64) -> f64 {
        self.value_limit(t, Side::Left)
    }

    /// One-sided limit of `Delta` at `t`; only differs from [`Self::evaluate`]
    /// at the jump of an ideal step.
    pub fn value_limit(&self, t: f64, side: Side) -> f64 {
        let d0 = self.magnitude;
        if self.is_step() {
            if t < 0.0 || (t == 0.0 && side == Side::Left) {
                d0
            } else {
                -d0
            }
        } else {
            -d0 * (t / self.smoothing_time).tanh()
        }
    }

    /// `dDelta/dt`: zero on either side of an ideal step, undefined at it.
    pub fn derivative(&self, t: f64) -> Result<f64> {
        if !t.is_finite() {
            return Err(Error::NonFinite { context: "detuning time", value: t });
        }
        if self.is_step() {
            if t == 0.0 {
                return Err(Error::DerivativeAtJump);
            }
            return Ok(0.0);
        }
        let tau = self.smoothing_time;
        let sech = 1.0 / (t / tau).cosh();
        Ok(-self.magnitude / tau * sech * sech)
    }
}

/// Complete control fields for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveProfile {
    pub shape: PulseShape,
    peak_rabi: f64,
    pub detuning: DetuningProfile,
}

impl DriveProfile {
    pub fn new(shape: PulseShape, peak_rabi: f64, detuning: DetuningProfile) -> Result<Self> {
        if !(peak_rabi.is_finite() && peak_rabi >= 0.0) {
            return Err(Error::invalid(
                "omega0",
                format!("must be non-negative and finite, got {peak_rabi}"),
            ));
        }
        Ok(Self { shape, peak_rabi, detuning })
    }

    /// Gaussian pulse with an ideal detuning step.
    pub fn gaussian_step(width: f64, omega0: f64, delta0: f64) -> Result<Self> {
        Self::new(PulseShape::gaussian(width)?, omega0, DetuningProfile::step(delta0)?)
    }

    pub fn peak_rabi(&self) -> f64 {
        self.peak_rabi
    }

    pub fn rabi(&self, t: f64) -> f64 {
        self.peak_rabi * self.shape.value(t)
    }

    pub fn rabi_derivative(&self, t: f64) -> Result<f64> {
        Ok(self.peak_rabi * self.shape.derivative(t)?)
    }

    pub fn detuning_at(&self, t: f64, side: Side) -> f64 {
        self.detuning.value_limit(t, side)
    }

    /// Eigenenergy splitting `sqrt(Omega^2 + Delta^2)`.
    pub fn splitting(&self, t: f64, side: Side) -> f64 {
        self.rabi(t).hypot(self.detuning_at(t, side))
    }

    /// `sqrt(Omega0^2 + Delta0^2)`, the splitting just either side of an ideal
    /// jump. Used as the reference rate for the sudden condition.
    pub fn peak_splitting(&self) -> f64 {
        self.peak_rabi.hypot(self.detuning.magnitude())
    }
}
