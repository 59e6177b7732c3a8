//! JSON run configuration.
//!
//! ```json
//! {
//!   "equation": "burgers",
//!   "initial_condition": { "preset": "sine" },
//!   "m0": 32,
//!   "m_max": 512,
//!   "t_end": 0.9
//! }
//! ```
//!
//! Everything else has a default. Unknown keys are rejected.

use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::diagnostics::NLS_FLUX_WEIGHT;
use crate::dynamics::{Equation, GammaSupport};
use crate::error::{Error, Result};
use crate::integrator::Scheme;
use crate::refinement::{DriverConfig, StepperSettings, Strategy, ThresholdMode};
use crate::sample;
use crate::spectral::{ModeBand, SpectralField};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    /// Refine whenever the monitor crosses the threshold.
    #[default]
    Adaptive,
    /// Keep the initial band. With `reduced_model` this is a t-model run
    /// alongside its full reference.
    Fixed,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NRule {
    #[default]
    Half,
}

/// Initial condition presets. `coefficients` lists `[k, re, im]` triples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialCondition {
    /// `amplitude * sin x`.
    Sine {
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// `amplitude * exp(i k x)`.
    PlaneWave {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "one_i")]
        k: i64,
    },
    /// `amplitude * (1 + epsilon cos x)`.
    Modulated {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "tenth")]
        epsilon: f64,
    },
    /// Real field with random coefficients on `|k| <= k_max`, drawn from `seed`.
    Random {
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default = "four")]
        k_max: i64,
    },
    Coefficients { modes: Vec<(i64, f64, f64)> },
}

fn one() -> f64 {
    1.0
}
fn one_i() -> i64 {
    1
}
fn tenth() -> f64 {
    0.1
}
fn four() -> i64 {
    4
}

impl InitialCondition {
    pub fn field(&self, band: ModeBand, seed: u64) -> Result<SpectralField> {
        let c = Complex64::new;
        let key = "initial_condition";
        let check = |k: i64| {
            if band.contains(k) && k != band.nyquist() {
                Ok(())
            } else {
                Err(Error::config(key, format!("wavenumber {k} is outside the band of M = {}", band.size())))
            }
        };
        match *self {
            InitialCondition::Sine { amplitude } => {
                check(1)?;
                SpectralField::from_modes(band, &[(1, c(0.0, -0.5 * amplitude)), (-1, c(0.0, 0.5 * amplitude))])
            }
            InitialCondition::PlaneWave { amplitude, k } => {
                check(k)?;
                SpectralField::single_mode(band, k, c(amplitude, 0.0))
            }
            InitialCondition::Modulated { amplitude, epsilon } => {
                check(1)?;
                let side = c(0.5 * amplitude * epsilon, 0.0);
                SpectralField::from_modes(band, &[(0, c(amplitude, 0.0)), (1, side), (-1, side)])
            }
            InitialCondition::Random { amplitude, k_max } => {
                Ok(sample::random_real(band, k_max, amplitude, &mut sample::rng(seed)))
            }
            InitialCondition::Coefficients { ref modes } => {
                let mut list = Vec::with_capacity(modes.len());
                for &(k, re, im) in modes {
                    check(k)?;
                    list.push((k, c(re, im)));
                }
                SpectralField::from_modes(band, &list)
            }
        }
    }
}

/// A number that may be `+inf`, written as the string `"inf"` in JSON.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FloatOrInf(pub f64);

impl Default for FloatOrInf {
    fn default() -> Self {
        FloatOrInf(1e-3)
    }
}

impl Serialize for FloatOrInf {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() && self.0 > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for FloatOrInf {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(x) => Ok(FloatOrInf(x)),
            Raw::Text(s) if matches!(s.as_str(), "inf" | "+inf" | "infinity" | "Infinity") => {
                Ok(FloatOrInf(f64::INFINITY))
            }
            Raw::Text(s) => Err(serde::de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StepperSection {
    pub scheme: Option<Scheme>,
    pub dt: Option<f64>,
    pub adapt: bool,
    pub tol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl: f64,
}

impl Default for StepperSection {
    fn default() -> Self {
        let s = StepperSettings::default();
        Self {
            scheme: s.scheme,
            dt: s.dt,
            adapt: s.adapt,
            tol: s.tol,
            dt_min: s.dt_min,
            dt_max: s.dt_max,
            cfl: s.cfl,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: Equation,
    #[serde(default)]
    pub scenario: Scenario,
    #[serde(default)]
    pub strategy: Strategy,
    pub initial_condition: InitialCondition,
    pub m0: usize,
    /// Defaults to `m0` for fixed runs and `8 m0` for adaptive ones.
    #[serde(default)]
    pub m_max: Option<usize>,
    #[serde(default)]
    pub n_rule: NRule,
    #[serde(default)]
    pub threshold: FloatOrInf,
    #[serde(default)]
    pub threshold_mode: ThresholdMode,
    #[serde(default = "default_growth")]
    pub growth: usize,
    /// Defaults to ten steps at the current step size.
    #[serde(default)]
    pub cooldown: Option<f64>,
    /// Extra time to run after the band limit is reached; `"inf"` runs to `t_end`.
    #[serde(default = "zero_grace")]
    pub grace: FloatOrInf,
    #[serde(default = "default_weight")]
    pub nls_weight: f64,
    #[serde(default)]
    pub gamma_support: GammaSupport,
    #[serde(default)]
    pub stepper: StepperSection,
    pub t_end: f64,
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_stride")]
    pub sample_stride: usize,
    #[serde(default)]
    pub spectrum_times: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

fn default_growth() -> usize {
    2
}
fn zero_grace() -> FloatOrInf {
    FloatOrInf(0.0)
}
fn default_weight() -> f64 {
    NLS_FLUX_WEIGHT
}
fn default_stride() -> usize {
    1
}

/// Parses and validates a JSON config document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = serde_json::from_str(text)?;
    cfg.driver_config()?;
    Ok(cfg)
}

impl RunConfig {
    pub fn m_max(&self) -> usize {
        self.m_max.unwrap_or(match self.scenario {
            Scenario::Adaptive => 8 * self.m0,
            Scenario::Fixed => self.m0,
        })
    }

    /// Resolves presets and defaults into driver input, checking every constraint.
    pub fn driver_config(&self) -> Result<DriverConfig> {
        if !self.m0.is_multiple_of(2) {
            return Err(Error::config("m0", format!("M must be even, got {}", self.m0)));
        }
        if self.m0 < 4 || !self.m0.is_multiple_of(4) {
            return Err(Error::config("m0", format!("M must be a multiple of 4 so that N = M/2 is even, got {}", self.m0)));
        }
        if !(self.threshold.0 > 0.0) {
            return Err(Error::config("threshold", format!("must be positive, got {}", self.threshold.0)));
        }
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("t_end", format!("must be a finite nonnegative time, got {}", self.t_end)));
        }
        let st = &self.stepper;
        if let Some(dt) = st.dt {
            if !(dt > 0.0) {
                return Err(Error::config("stepper.dt", format!("must be positive, got {dt}")));
            }
        }
        for (key, v) in [("stepper.tol", st.tol), ("stepper.dt_min", st.dt_min), ("stepper.dt_max", st.dt_max), ("stepper.cfl", st.cfl)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive, got {v}")));
            }
        }
        if st.dt_min > st.dt_max {
            return Err(Error::config("stepper.dt_min", "must not exceed dt_max"));
        }
        if self.spectrum_times.iter().any(|t| !(*t >= 0.0 && *t <= self.t_end)) {
            return Err(Error::config("spectrum_times", "every time must lie in [0, t_end]"));
        }
        let band = ModeBand::new(self.m0).map_err(|e| Error::config("m0", e.to_string()))?;
        let initial = self.initial_condition.field(band, self.seed)?;
        if !initial.is_finite() {
            return Err(Error::config("initial_condition", "coefficients must be finite"));
        }
        let cfg = DriverConfig {
            equation: self.equation,
            initial,
            strategy: self.strategy,
            refine: self.scenario == Scenario::Adaptive,
            threshold: self.threshold.0,
            threshold_mode: self.threshold_mode,
            growth: self.growth,
            m_max: self.m_max(),
            cooldown: self.cooldown,
            grace: self.grace.0,
            stepper: StepperSettings {
                scheme: st.scheme,
                dt: st.dt,
                adapt: st.adapt,
                tol: st.tol,
                dt_min: st.dt_min,
                dt_max: st.dt_max,
                cfl: st.cfl,
            },
            t_end: self.t_end,
            nls_weight: self.nls_weight,
            gamma_support: self.gamma_support,
            sample_stride: self.sample_stride,
            spectrum_times: self.spectrum_times.clone(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
