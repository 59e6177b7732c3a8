//! Time stepping for the full and reduced systems.
//!
//! The memory term makes the reduced right-hand side non-autonomous, so every
//! stage is evaluated at its own memory-clock value `tau + c_i dt`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Closure, Equation, ModelSpec};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;
use crate::transform::to_grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Classical RK4 on the whole right-hand side.
    Rk4,
    /// Integrating-factor (Lawson) RK4: the diagonal linear part is propagated exactly.
    IfRk4,
}

impl Scheme {
    pub fn default_for(equation: Equation) -> Self {
        match equation {
            Equation::Burgers => Scheme::Rk4,
            Equation::CriticalNls => Scheme::IfRk4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperConfig {
    pub scheme: Scheme,
    pub dt: f64,
    /// Step-doubling error control.
    pub adapt: bool,
    /// Local error tolerance, relative to the largest coefficient.
    pub tol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_coeff: f64,
}

impl StepperConfig {
    pub fn fixed(scheme: Scheme, dt: f64) -> Self {
        Self {
            scheme,
            dt,
            adapt: false,
            tol: 1e-10,
            dt_min: dt.min(1e-12),
            dt_max: dt.max(0.1),
            cfl_coeff: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if !(self.dt.is_finite() && self.dt >= 0.0) {
            return bad(format!("dt must be a finite nonnegative time, got {}", self.dt));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt_max) {
            return bad(format!("need 0 < dt_min <= dt_max, got {} and {}", self.dt_min, self.dt_max));
        }
        if self.dt > 0.0 && (self.dt < self.dt_min || self.dt > self.dt_max) {
            return bad(format!("dt = {} outside [{}, {}]", self.dt, self.dt_min, self.dt_max));
        }
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.cfl_coeff > 0.0) {
            return bad(format!("cfl_coeff must be positive, got {}", self.cfl_coeff));
        }
        Ok(())
    }
}

/// A point on a trajectory: the field, physical time `t` and memory clock `tau`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub field: SpectralField,
    pub t: f64,
    /// Time since the reduced model was last (re)initialized; `0 <= tau <= t`.
    pub tau: f64,
    pub spec: ModelSpec,
}

impl SimState {
    pub fn new(field: SpectralField, spec: ModelSpec) -> Result<Self> {
        Self::at(field, spec, 0.0, 0.0)
    }

    pub fn at(field: SpectralField, spec: ModelSpec, t: f64, tau: f64) -> Result<Self> {
        spec.band().ensure_same_size(&field.band())?;
        if !field.band().zero_nyquist() {
            return Err(Error::InvalidInput("state fields need the zero-Nyquist band policy".into()));
        }
        if !(tau >= 0.0 && tau <= t + 1e-12 * t.abs().max(1.0)) {
            return Err(Error::InvalidInput(format!("need 0 <= tau <= t, got tau = {tau}, t = {t}")));
        }
        if spec.closure == Closure::TModel {
            field.ensure_resolved_support(&spec.partition)?;
        }
        Ok(Self { field, t, tau, spec })
    }

    /// `(1/2) ||u||^2`.
    pub fn energy(&self) -> f64 {
        0.5 * self.field.l2_norm_sq()
    }
}

/// Initial step from the CFL-like rules: `cfl / (M max|u|)` for Burgers;
/// `cfl (2 pi / M)^2` capped by `cfl / max|u|^4` for NLS.
pub fn cfl_dt(field: &SpectralField, equation: Equation, cfl: f64) -> f64 {
    let m = field.band().size() as f64;
    let umax = to_grid(field, 2 * field.band().size())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    match equation {
        Equation::Burgers => {
            if umax > 0.0 {
                cfl / (m * umax)
            } else {
                f64::INFINITY
            }
        }
        Equation::CriticalNls => {
            let linear = cfl * (2.0 * std::f64::consts::PI / m).powi(2);
            let nonlinear = if umax > 0.0 { cfl / umax.powi(4) } else { f64::INFINITY };
            linear.min(nonlinear)
        }
    }
}

fn failure(state: &SimState, reason: impl Into<String>) -> Error {
    Error::IntegrationFailure {
        t: state.t,
        reason: reason.into(),
        last_good: Box::new(state.clone()),
    }
}

/// One step of size `dt`, no error control.
pub fn step_with(state: &SimState, dt: f64, scheme: Scheme) -> Result<SimState> {
    step_to(state, dt, state.t + dt, scheme)
}

/// One step that lands exactly on `t_new`.
pub fn step_until(state: &SimState, t_new: f64, scheme: Scheme) -> Result<SimState> {
    step_to(state, t_new - state.t, t_new, scheme)
}

/// One step of `cfg.dt`.
pub fn step(state: &SimState, cfg: &StepperConfig) -> Result<SimState> {
    step_with(state, cfg.dt, cfg.scheme)
}

fn step_to(state: &SimState, dt: f64, t_new: f64, scheme: Scheme) -> Result<SimState> {
    if dt == 0.0 {
        return Ok(state.clone());
    }
    let spec = &state.spec;
    let w = &state.field;
    let tau = state.tau;
    let half = 0.5 * dt;
    let one = Complex64::new(1.0, 0.0);

    let field = match scheme {
        Scheme::Rk4 => {
            let f = |x: &SpectralField, s: f64| spec.evaluate(x, tau + s).map(|e| e.rhs);
            let k1 = f(w, 0.0)?;
            let k2 = f(&w.axpy(half.into(), &k1)?, half)?;
            let k3 = f(&w.axpy(half.into(), &k2)?, half)?;
            let k4 = f(&w.axpy(dt.into(), &k3)?, dt)?;
            let incr = SpectralField::from_fn(w.band(), |k| {
                (k1.get(k) + 2.0 * k2.get(k) + 2.0 * k3.get(k) + k4.get(k)) * (dt / 6.0)
            });
            w.axpy(one, &incr)?
        }
        Scheme::IfRk4 => {
            let nl = |x: &SpectralField, s: f64| spec.evaluate_nonlinear(x, tau + s).map(|e| e.rhs);
            let e_half = |x: &SpectralField| x.map(|k, c| c * (spec.linear_symbol(k) * half).exp());
            let a = nl(w, 0.0)?;
            let b = nl(&e_half(&w.axpy(half.into(), &a)?), half)?;
            let c = nl(&e_half(w).axpy(half.into(), &b)?, half)?;
            let ew = e_half(w);
            let eew = e_half(&ew);
            let d = nl(&eew.axpy(dt.into(), &e_half(&c))?, dt)?;
            let ea = e_half(&e_half(&a));
            let ebc = e_half(&(&b + &c));
            let incr = SpectralField::from_fn(w.band(), |k| {
                (ea.get(k) + 2.0 * ebc.get(k) + d.get(k)) * (dt / 6.0)
            });
            eew.axpy(one, &incr)?
        }
    };
    if !field.is_finite() {
        return Err(failure(state, "non-finite coefficients"));
    }
    let field = if spec.closure == Closure::TModel {
        field.project(&spec.partition, crate::spectral::Part::Resolved)?
    } else {
        field
    };
    Ok(SimState {
        field,
        t: t_new,
        tau: tau + (t_new - state.t),
        spec: *spec,
    })
}

/// Step-size controller around [`step_with`].
#[derive(Debug, Clone)]
pub struct Stepper {
    cfg: StepperConfig,
    dt: f64,
}

impl Stepper {
    pub fn new(cfg: StepperConfig) -> Result<Self> {
        cfg.validate()?;
        if cfg.dt <= 0.0 {
            return Err(Error::InvalidInput("stepper needs a positive dt".into()));
        }
        Ok(Self { cfg, dt: cfg.dt })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn config(&self) -> &StepperConfig {
        &self.cfg
    }

    /// Replaces the working step, clamped to `[dt_min, dt_max]`.
    pub fn reset_dt(&mut self, dt: f64) {
        self.dt = dt.clamp(self.cfg.dt_min, self.cfg.dt_max);
    }

    /// Takes one accepted step that does not pass `t_limit`.
    pub fn advance(&mut self, state: &SimState, t_limit: f64) -> Result<SimState> {
        loop {
            let remaining = t_limit - state.t;
            if remaining <= 0.0 {
                return Ok(state.clone());
            }
            let (h, t_new) = if self.dt >= remaining {
                (remaining, t_limit)
            } else {
                (self.dt, state.t + self.dt)
            };
            if !self.cfg.adapt {
                return step_to(state, h, t_new, self.cfg.scheme);
            }

            let attempt = (|| -> Result<(SimState, f64)> {
                let full = step_to(state, h, t_new, self.cfg.scheme)?;
                let mid = step_to(state, 0.5 * h, state.t + 0.5 * h, self.cfg.scheme)?;
                let two = step_to(&mid, 0.5 * h, t_new, self.cfg.scheme)?;
                let scale = two.field.max_abs().max(f64::MIN_POSITIVE);
                let err = full.field.max_diff(&two.field)? / scale;
                Ok((two, err))
            })();
            match attempt {
                Ok((two, err)) if err <= self.cfg.tol => {
                    if err < self.cfg.tol / 32.0 && h == self.dt {
                        self.dt = (2.0 * self.dt).min(self.cfg.dt_max);
                    }
                    return Ok(two);
                }
                Ok(_) | Err(Error::IntegrationFailure { .. }) => {
                    self.dt = 0.5 * h;
                    if self.dt < self.cfg.dt_min {
                        return Err(failure(state, format!("step size fell below dt_min = {}", self.cfg.dt_min)));
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }
}

/// Advances to exactly `t_end`, calling `observer` after every accepted step.
pub fn advance_to(
    state: &SimState,
    t_end: f64,
    cfg: &StepperConfig,
    observer: &mut dyn FnMut(&SimState),
) -> Result<SimState> {
    if t_end < state.t {
        return Err(Error::InvalidInput(format!("t_end = {t_end} is before t = {}", state.t)));
    }
    if t_end == state.t {
        return Ok(state.clone());
    }
    let mut stepper = Stepper::new(*cfg)?;
    let mut cur = state.clone();
    while cur.t < t_end {
        cur = stepper.advance(&cur, t_end)?;
        observer(&cur);
    }
    Ok(cur)
}
