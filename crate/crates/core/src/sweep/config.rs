//! Run configuration: a flat `key: value` text format.
//!
//! ```text
//! # comment
//! system: two_level            # two_level | three_level
//! shape: gaussian              # gaussian | sech | lorentzian
//! width: 1                     # pulse width T
//! omega0: 0.1:10:0.1           # Omega0*T values: list and/or start:stop:step ranges
//! delta0: 5                    # Delta0*T values
//! window: -20, 20              # t_start/T, t_end/T
//! tolerance: 1e-10
//! tau_jump: 0                  # detuning ramp time / T (0 = ideal step)
//! initial_state: 1
//! outputs: final_populations, residual_map
//! ```
//!
//! Only the first `:` of a line separates key and value. Keys may appear at
//! most once; unknown keys are rejected.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrator::IntegrationSpec;
use crate::pulse::{DetuningProfile, DriveProfile, PulseShape, ShapeKind};

pub const VALID_KEYS: [&str; 10] = [
    "system",
    "shape",
    "width",
    "omega0",
    "delta0",
    "window",
    "tolerance",
    "tau_jump",
    "initial_state",
    "outputs",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum System {
    TwoLevel,
    ThreeLevel,
}

impl System {
    pub fn dimension(self) -> usize {
        match self {
            System::TwoLevel => 2,
            System::ThreeLevel => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            System::TwoLevel => "two_level",
            System::ThreeLevel => "three_level",
        }
    }
}

impl FromStr for System {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "two_level" => Ok(System::TwoLevel),
            "three_level" => Ok(System::ThreeLevel),
            other => Err(Error::Config(format!(
                "system: unknown value `{other}` (expected two_level or three_level)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputKind {
    FinalPopulations,
    Trajectory,
    ResidualMap,
    AnalyticOverlay,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::FinalPopulations => "final_populations",
            OutputKind::Trajectory => "trajectory",
            OutputKind::ResidualMap => "residual_map",
            OutputKind::AnalyticOverlay => "analytic_overlay",
        }
    }
}

impl FromStr for OutputKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "final_populations" => Ok(OutputKind::FinalPopulations),
            "trajectory" => Ok(OutputKind::Trajectory),
            "residual_map" => Ok(OutputKind::ResidualMap),
            "analytic_overlay" => Ok(OutputKind::AnalyticOverlay),
            other => Err(Error::Config(format!(
                "outputs: unknown kind `{other}` (expected final_populations, trajectory, residual_map or analytic_overlay)"
            ))),
        }
    }
}

/// Ordered list of strictly positive parameter values (in units of `1/T`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid(Vec<f64>);

impl Grid {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Config("grid must not be empty".into()));
        }
        if let Some(bad) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("grid values must be positive and finite, got {bad}")));
        }
        Ok(Self(values))
    }

    /// `start:stop:step` range, stop included when it lies on the lattice.
    pub fn range(start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::Config(format!("range step must be positive, got {step}")));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(Error::Config(format!("invalid range {start}:{stop}:{step}")));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // Rounded to 12 significant digits so that 0.1:10:0.1 yields 0.3, not
        // 0.30000000000000004.
        let values = (0..n).map(|i| round_sig(start + i as f64 * step, 12)).collect();
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

fn round_sig(x: f64, digits: usize) -> f64 {
    format!("{:.*e}", digits - 1, x).parse().unwrap_or(x)
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut values = Vec::new();
        for item in s.split(',').map(str::trim) {
            if item.is_empty() {
                return Err(Error::Config(format!("empty item in grid `{s}`")));
            }
            if item.contains(':') {
                let parts: Vec<&str> = item.split(':').map(str::trim).collect();
                let [a, b, c] = parts.as_slice() else {
                    return Err(Error::Config(format!("range `{item}` must be start:stop:step")));
                };
                let r = Grid::range(parse_f64("range", a)?, parse_f64("range", b)?, parse_f64("range", c)?)?;
                values.extend(r.0);
            } else {
                values.push(parse_f64("grid", item)?);
            }
        }
        Grid::new(values)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v:?}")?;
        }
        Ok(())
    }
}

fn parse_f64(field: &str, s: &str) -> Result<f64> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("{field}: `{s}` is not a number")))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub system: System,
    pub shape: ShapeKind,
    /// Pulse width `T`.
    pub width: f64,
    /// `Omega0 * T` values.
    pub omega0: Grid,
    /// `Delta0 * T` values.
    pub delta0: Grid,
    /// `(t_start / T, t_end / T)`.
    pub window: (f64, f64),
    pub tolerance: f64,
    /// Detuning ramp time in units of `T`; 0 is the ideal step.
    pub tau_jump: f64,
    pub initial_state: usize,
    pub outputs: Vec<OutputKind>,
}

impl Default for RunConfig {
    fn default() -> Self {
        let axis = Grid::range(0.1, 10.0, 0.1).expect("default grid");
        Self {
            system: System::TwoLevel,
            shape: ShapeKind::Gaussian,
            width: 1.0,
            omega0: axis.clone(),
            delta0: axis,
            window: (-20.0, 20.0),
            tolerance: 1e-10,
            tau_jump: 0.0,
            initial_state: 1,
            outputs: vec![OutputKind::FinalPopulations],
        }
    }
}

impl RunConfig {
    /// Defaults for a single-detuning cut at `Delta0 T = 5`.
    pub fn fig1() -> Self {
        Self { delta0: Grid(vec![5.0]), ..Self::default() }
    }

    /// Defaults for the three-level table at `Omega0 T = 8`, `Delta0 T = 2`.
    pub fn table3() -> Self {
        Self {
            system: System::ThreeLevel,
            omega0: Grid(vec![8.0]),
            delta0: Grid(vec![2.0]),
            ..Self::default()
        }
    }

    /// Defaults for one run at `Omega0 T = Delta0 T = 5`.
    pub fn single() -> Self {
        Self { omega0: Grid(vec![5.0]), delta0: Grid(vec![5.0]), ..Self::default() }
    }

    /// Parses `text` with [`RunConfig::default`] as the base.
    pub fn parse(text: &str) -> Result<Self> {
        Self::parse_onto(Self::default(), text)
    }

    /// Applies the keys in `text` on top of `base` and validates the result.
    pub fn parse_onto(base: Self, text: &str) -> Result<Self> {
        let mut cfg = base;
        let mut seen: Vec<String> = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once(':') else {
                return Err(Error::Config(format!("line {}: expected `key: value`, got `{line}`", lineno + 1)));
            };
            let key = key.trim();
            if seen.iter().any(|k| k == key) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value.trim())?;
            seen.push(key.to_string());
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its textual value, without cross-field validation.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let field_err = |e: Error| match e {
            Error::Config(msg) if msg.starts_with(key) => Error::Config(msg),
            Error::Config(msg) => Error::Config(format!("{key}: {msg}")),
            Error::InvalidParameter { reason, .. } => Error::Config(format!("{key}: {reason}")),
            other => other,
        };
        match key {
            "system" => self.system = value.parse()?,
            "shape" => self.shape = value.parse().map_err(field_err)?,
            "width" => self.width = parse_f64(key, value)?,
            "omega0" => self.omega0 = value.parse().map_err(field_err)?,
            "delta0" => self.delta0 = value.parse().map_err(field_err)?,
            "window" => {
                let parts: Vec<&str> = value.split(',').collect();
                let [a, b] = parts.as_slice() else {
                    return Err(Error::Config(format!("window: expected `t_start, t_end`, got `{value}`")));
                };
                self.window = (parse_f64(key, a)?, parse_f64(key, b)?);
            }
            "tolerance" => self.tolerance = parse_f64(key, value)?,
            "tau_jump" => self.tau_jump = parse_f64(key, value)?,
            "initial_state" => {
                self.initial_state = value
                    .parse()
                    .map_err(|_| Error::Config(format!("initial_state: `{value}` is not a positive integer")))?
            }
            "outputs" => {
                self.outputs = value
                    .split(',')
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(str::parse)
                    .collect::<Result<_>>()?
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown key `{other}`; valid keys are: {}",
                    VALID_KEYS.join(", ")
                )))
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(Error::Config(format!("width: must be positive, got {}", self.width)));
        }
        let (a, b) = self.window;
        if !(a.is_finite() && b.is_finite() && a < 0.0 && 0.0 < b) {
            return Err(Error::Config(format!("window: must contain 0, got ({a}, {b})")));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::Config(format!("tolerance: must be positive, got {}", self.tolerance)));
        }
        if !(self.tau_jump.is_finite() && self.tau_jump >= 0.0) {
            return Err(Error::Config(format!("tau_jump: must be non-negative, got {}", self.tau_jump)));
        }
        let dim = self.system.dimension();
        if !(1..=dim).contains(&self.initial_state) {
            return Err(Error::Config(format!(
                "initial_state: must be in 1..={dim} for {}, got {}",
                self.system.name(),
                self.initial_state
            )));
        }
        Grid::new(self.omega0.0.clone()).map_err(|e| Error::Config(format!("omega0: {e}")))?;
        Grid::new(self.delta0.0.clone()).map_err(|e| Error::Config(format!("delta0: {e}")))?;
        Ok(())
    }

    /// Text form accepted by [`RunConfig::parse`].
    pub fn emit(&self) -> String {
        let mut s = String::new();
        let outputs: Vec<&str> = self.outputs.iter().map(|o| o.name()).collect();
        let _ = writeln!(s, "system: {}", self.system.name());
        let _ = writeln!(s, "shape: {}", self.shape);
        let _ = writeln!(s, "width: {:?}", self.width);
        let _ = writeln!(s, "omega0: {}", self.omega0);
        let _ = writeln!(s, "delta0: {}", self.delta0);
        let _ = writeln!(s, "window: {:?}, {:?}", self.window.0, self.window.1);
        let _ = writeln!(s, "tolerance: {:?}", self.tolerance);
        let _ = writeln!(s, "tau_jump: {:?}", self.tau_jump);
        let _ = writeln!(s, "initial_state: {}", self.initial_state);
        let _ = writeln!(s, "outputs: {}", outputs.join(", "));
        s
    }

    /// Drive for one grid node, in absolute units.
    pub fn drive(&self, omega0_t: f64, delta0_t: f64) -> Result<DriveProfile> {
        let t = self.width;
        DriveProfile::new(
            PulseShape::new(self.shape, t)?,
            omega0_t / t,
            DetuningProfile::new(delta0_t / t, self.tau_jump * t)?,
        )
    }

    pub fn integration_spec(&self) -> IntegrationSpec {
        IntegrationSpec {
            t_start: self.window.0 * self.width,
            t_end: self.window.1 * self.width,
            tolerance: self.tolerance,
            ..IntegrationSpec::default()
        }
    }
}

/// Reads and parses a config file on top of `base`.
pub fn parse_config_file(path: &std::path::Path, base: RunConfig) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    RunConfig::parse_onto(base, &text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.system, System::TwoLevel);
        assert_eq!(c.shape, ShapeKind::Gaussian);
        assert_eq!(c.window, (-20.0, 20.0));
        assert_eq!(c.tolerance, 1e-10);
        assert_eq!(c.tau_jump, 0.0);
        assert_eq!(c.omega0.len(), 100);
    }

    #[test]
    fn range_arithmetic() {
        let c = RunConfig::parse("omega0: 0.1:10:0.1").unwrap();
        let v = c.omega0.values();
        assert_eq!(v.len(), 100);
        assert_eq!(v[0], 0.1);
        assert_eq!(v[2], 0.3);
        assert_eq!(v[99], 10.0);
        let g: Grid = "1, 2:3:0.5, 7".parse().unwrap();
        assert_eq!(g.values(), &[1.0, 2.0, 2.5, 3.0, 7.0]);
    }

    #[test]
    fn validation_errors_name_the_field() {
        let e = RunConfig::parse("delta0: -3").unwrap_err().to_string();
        assert!(e.contains("delta0"), "{e}");
        let e = RunConfig::parse("speed: 3").unwrap_err().to_string();
        assert!(e.contains("unknown key `speed`") && e.contains("omega0"), "{e}");
        let e = RunConfig::parse("window: 1, 20").unwrap_err().to_string();
        assert!(e.contains("window"), "{e}");
        let e = RunConfig::parse("initial_state: 3").unwrap_err().to_string();
        assert!(e.contains("initial_state"), "{e}");
        assert!(RunConfig::parse("system: three_level\ninitial_state: 3").is_ok());
        assert!(RunConfig::parse("tolerance: 0").is_err());
        assert!(RunConfig::parse("tau_jump: -1").is_err());
        assert!(RunConfig::parse("omega0: 1\nomega0: 2").is_err());
        assert!(RunConfig::parse("omega0 1").is_err());
        assert!(RunConfig::parse("shape: square").unwrap_err().to_string().contains("shape"));
        assert!(RunConfig::parse("outputs: plots").is_err());
    }

    #[test]
    fn comments_and_blank_lines() {
        let c = RunConfig::parse("# cut\n\nshape: sech   # pulse\ndelta0: 5\n").unwrap();
        assert_eq!(c.shape, ShapeKind::Sech);
        assert_eq!(c.delta0.values(), &[5.0]);
    }

    #[test]
    fn drive_uses_width_units() {
        let c = RunConfig::parse("width: 2\ntau_jump: 0.5").unwrap();
        let d = c.drive(4.0, 6.0).unwrap();
        assert_eq!(d.peak_rabi(), 2.0);
        assert_eq!(d.detuning.magnitude(), 3.0);
        assert_eq!(d.detuning.smoothing_time(), 1.0);
        let spec = c.integration_spec();
        assert_eq!((spec.t_start, spec.t_end), (-40.0, 40.0));
    }

    fn configs() -> impl Strategy<Value = RunConfig> {
        (
            prop::sample::select(vec![System::TwoLevel, System::ThreeLevel]),
            prop::sample::select(ShapeKind::ALL.to_vec()),
            0.1f64..5.0,
            prop::collection::vec(1e-3f64..20.0, 1..6),
            prop::collection::vec(1e-3f64..20.0, 1..6),
            (-50.0f64..-1e-3, 1e-3f64..50.0),
            1e-14f64..1e-4,
            0.0f64..1.0,
            prop::collection::vec(
                prop::sample::select(vec![
                    OutputKind::FinalPopulations,
                    OutputKind::Trajectory,
                    OutputKind::ResidualMap,
                    OutputKind::AnalyticOverlay,
                ]),
                0..4,
            ),
        )
            .prop_map(|(system, shape, width, om, de, window, tolerance, tau_jump, outputs)| RunConfig {
                system,
                shape,
                width,
                omega0: Grid(om),
                delta0: Grid(de),
                window,
                tolerance,
                tau_jump,
                initial_state: 1,
                outputs,
            })
    }

    proptest! {
        #[test]
        fn emit_parse_round_trip(cfg in configs()) {
            let back = RunConfig::parse(&cfg.emit()).unwrap();
            prop_assert_eq!(back, cfg);
        }
    }
}
