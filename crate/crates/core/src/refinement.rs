//! Flux-triggered spectral refinement.
//!
//! The full system is advanced on `F ∪ G`. A monitor measures the rate at
//! which the resolved modes `F` lose energy to `G`, either from a t-model
//! trajectory carried along with the full one (`ReducedModel`) or directly
//! from the projection `Pu` of the full solution (`ProjectedFull`). When the
//! rate crosses the threshold the band is multiplied by `growth`, the old
//! full band becomes the new `F`, and the memory clock restarts.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{projected_gamma, spectrum, tail_fraction, TimeSeriesRecord, NLS_FLUX_WEIGHT};
use crate::dynamics::{Closure, Equation, GammaSupport, ModelSpec};
use crate::error::{Error, Result};
use crate::integrator::{cfl_dt, step_until, Scheme, SimState, Stepper, StepperConfig};
use crate::spectral::{ModeBand, Part, Partition, SpectralField};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Co-integrate the t-model and monitor `tau ||Gamma(v)||^2`.
    ReducedModel,
    /// Monitor `tau ||(I-P) B[Pu, ...]||^2` from the full solution.
    #[default]
    ProjectedFull,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMode {
    /// Flux divided by `(1/2)||state on F||^2`.
    #[default]
    Relative,
    Absolute,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonitorSample {
    pub t: f64,
    pub tau: f64,
    pub strategy: Strategy,
    pub flux: f64,
    pub rel_flux: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

impl MonitorSample {
    fn new(t: f64, tau: f64, strategy: Strategy, flux: f64, resolved_energy: f64, m: usize) -> Self {
        let rel_flux = if resolved_energy > 0.0 { flux / resolved_energy } else { 0.0 };
        Self {
            t,
            tau,
            strategy,
            flux,
            rel_flux,
            m,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementPolicy {
    /// May be `+inf`, which disables refinement.
    pub threshold: f64,
    pub mode: ThresholdMode,
    pub growth: usize,
    pub m_max: usize,
    /// Minimum time between events.
    pub cooldown: f64,
}

impl RefinementPolicy {
    pub fn validate(&self, m0: usize) -> Result<()> {
        if !(self.threshold > 0.0) {
            return Err(Error::config("threshold", format!("must be positive, got {}", self.threshold)));
        }
        if self.growth < 2 {
            return Err(Error::config("growth", format!("must be at least 2, got {}", self.growth)));
        }
        let mut m = m0;
        while m < self.m_max {
            m *= self.growth;
        }
        if m != self.m_max {
            return Err(Error::config(
                "m_max",
                format!("must equal M0 = {m0} times a power of growth = {}, got {}", self.growth, self.m_max),
            ));
        }
        if !(self.cooldown >= 0.0) {
            return Err(Error::config("cooldown", "must be nonnegative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementEvent {
    pub t: f64,
    pub m_before: usize,
    pub m_after: usize,
    pub trigger: MonitorSample,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Continue,
    Refine,
    /// Threshold crossed but the band cannot grow any further.
    AtLimit,
}

/// Flux of a co-integrated t-model state, at its own memory clock.
pub fn monitor_reduced(v: &SimState) -> Result<MonitorSample> {
    if v.spec.closure != Closure::TModel {
        return Err(Error::InvalidInput("reduced monitor needs a t-model state".into()));
    }
    let flux = crate::dynamics::flux_of(&v.field, v.tau, &v.spec)?;
    Ok(MonitorSample::new(
        v.t,
        v.tau,
        Strategy::ReducedModel,
        flux,
        v.energy(),
        v.field.band().size(),
    ))
}

/// Flux computed from `Pu`, using `u.tau` as the memory clock. The NLS value
/// carries `nls_weight` (1664 by default); Burgers is unweighted.
pub fn monitor_projected(u: &SimState, p: &Partition, nls_weight: f64) -> Result<MonitorSample> {
    if u.spec.closure != Closure::FullGalerkin {
        return Err(Error::InvalidInput("projected monitor needs a full-Galerkin state".into()));
    }
    let pu = u.field.project(p, Part::Resolved)?;
    let flux = if u.tau == 0.0 {
        0.0
    } else {
        let weight = match u.spec.equation {
            Equation::Burgers => 1.0,
            Equation::CriticalNls => nls_weight,
        };
        weight * u.tau * projected_gamma(&pu, p, u.spec.equation)?.l2_norm_sq()
    };
    Ok(MonitorSample::new(
        u.t,
        u.tau,
        Strategy::ProjectedFull,
        flux,
        0.5 * pu.l2_norm_sq(),
        u.field.band().size(),
    ))
}

pub fn check(sample: &MonitorSample, policy: &RefinementPolicy, last_event: Option<f64>) -> Decision {
    let value = match policy.mode {
        ThresholdMode::Relative => sample.rel_flux,
        ThresholdMode::Absolute => sample.flux,
    };
    if !(value > policy.threshold) {
        return Decision::Continue;
    }
    if sample.m * policy.growth > policy.m_max {
        return Decision::AtLimit;
    }
    match last_event {
        Some(te) if sample.t - te < policy.cooldown => Decision::Continue,
        _ => Decision::Refine,
    }
}

/// Grows the band by `policy.growth`, zero-padding `u` and restarting its memory clock.
pub fn refine(
    u: &SimState,
    p: &Partition,
    policy: &RefinementPolicy,
    trigger: MonitorSample,
) -> Result<(SimState, Partition, RefinementEvent)> {
    let m = p.m();
    let m_new = m * policy.growth;
    if m_new > policy.m_max {
        return Err(Error::InvalidInput(format!("refining M = {m} would exceed M_max = {}", policy.m_max)));
    }
    let band = ModeBand::new(m_new)?;
    let p_new = Partition::new(band)?;
    let field = u.field.prolong(band)?;
    let spec = ModelSpec {
        partition: p_new,
        ..u.spec
    };
    let state = SimState::at(field, spec, u.t, 0.0)?;
    let event = RefinementEvent {
        t: u.t,
        m_before: m,
        m_after: m_new,
        trigger,
    };
    Ok((state, p_new, event))
}

/// Fresh t-model watchdog `v = Pu` with the memory clock at zero.
pub fn reinitialize_watchdog(u: &SimState, p: &Partition) -> Result<SimState> {
    let v = u.field.project(p, Part::Resolved)?;
    let spec = ModelSpec {
        closure: Closure::TModel,
        partition: *p,
        ..u.spec
    };
    SimState::at(v, spec, u.t, 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepperSettings {
    /// Defaults to RK4 for Burgers and IFRK4 for NLS.
    pub scheme: Option<Scheme>,
    /// Fixed step; `None` derives it from the CFL rule and recomputes it after each refinement.
    pub dt: Option<f64>,
    pub adapt: bool,
    pub tol: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl: f64,
}

impl Default for StepperSettings {
    fn default() -> Self {
        Self {
            scheme: None,
            dt: None,
            adapt: false,
            tol: 1e-9,
            dt_min: 1e-10,
            dt_max: 1e-2,
            cfl: 1.0,
        }
    }
}

impl StepperSettings {
    fn resolve(&self, field: &SpectralField, equation: Equation) -> StepperConfig {
        let dt = self
            .dt
            .unwrap_or_else(|| cfl_dt(field, equation, self.cfl).clamp(self.dt_min, self.dt_max));
        StepperConfig {
            scheme: self.scheme.unwrap_or_else(|| Scheme::default_for(equation)),
            dt,
            adapt: self.adapt,
            tol: self.tol,
            dt_min: self.dt_min.min(dt),
            dt_max: self.dt_max.max(dt),
            cfl_coeff: self.cfl,
        }
    }
}

/// Everything the adaptive driver needs, already validated and resolved to fields.
#[derive(Debug, Clone, PartialEq)]
pub struct DriverConfig {
    pub equation: Equation,
    pub initial: SpectralField,
    pub strategy: Strategy,
    /// `false` keeps the band fixed (monitors are still recorded).
    pub refine: bool,
    pub threshold: f64,
    pub threshold_mode: ThresholdMode,
    pub growth: usize,
    pub m_max: usize,
    /// `None` means ten steps at the current step size.
    pub cooldown: Option<f64>,
    /// Time to keep running after the band limit is hit; `+inf` runs to `t_end`.
    pub grace: f64,
    pub stepper: StepperSettings,
    pub t_end: f64,
    pub nls_weight: f64,
    pub gamma_support: GammaSupport,
    /// Record every n-th accepted step in the series.
    pub sample_stride: usize,
    pub spectrum_times: Vec<f64>,
}

impl DriverConfig {
    /// Defaults: relative threshold 1e-3, growth 2, projected monitor, `M_max = 8 M0`.
    pub fn new(equation: Equation, initial: SpectralField, t_end: f64) -> Self {
        let m0 = initial.band().size();
        Self {
            equation,
            initial,
            strategy: Strategy::ProjectedFull,
            refine: true,
            threshold: 1e-3,
            threshold_mode: ThresholdMode::Relative,
            growth: 2,
            m_max: 8 * m0,
            cooldown: None,
            grace: 0.0,
            stepper: StepperSettings::default(),
            t_end,
            nls_weight: NLS_FLUX_WEIGHT,
            gamma_support: GammaSupport::Truncated,
            sample_stride: 1,
            spectrum_times: Vec::new(),
        }
    }

    fn policy(&self, dt: f64) -> RefinementPolicy {
        RefinementPolicy {
            threshold: self.threshold,
            mode: self.threshold_mode,
            growth: self.growth,
            m_max: self.m_max,
            cooldown: self.cooldown.unwrap_or(10.0 * dt),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m0 = self.initial.band().size();
        Partition::new(self.initial.band())?;
        self.policy(0.0).validate(m0)?;
        if !(self.t_end >= 0.0 && self.t_end.is_finite()) {
            return Err(Error::config("t_end", "must be a finite nonnegative time"));
        }
        if !(self.grace >= 0.0) {
            return Err(Error::config("grace", "must be nonnegative"));
        }
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride", "must be at least 1"));
        }
        if !(self.nls_weight > 0.0) {
            return Err(Error::config("nls_weight", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Completed,
    AtLimit,
    BlowUp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSnapshot {
    pub t: f64,
    pub entries: Vec<(i64, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub outcome: Outcome,
    /// Last accepted full state (the last good one on blow-up).
    pub final_state: SimState,
    pub watchdog: Option<SimState>,
    pub events: Vec<RefinementEvent>,
    /// One per accepted step plus the initial instant; strategy as configured.
    pub samples: Vec<MonitorSample>,
    pub series: Vec<TimeSeriesRecord>,
    pub spectra: Vec<SpectrumSnapshot>,
    pub initial_energy: f64,
    pub failure: Option<String>,
    /// Time at which the band limit was hit.
    pub limit_time: Option<f64>,
}

struct Observation {
    monitor: MonitorSample,
    record: TimeSeriesRecord,
}

fn observe(u: &SimState, v: Option<&SimState>, p: &Partition, cfg: &DriverConfig) -> Result<Observation> {
    let projected = monitor_projected(u, p, cfg.nls_weight)?;
    let (reduced, err_sq) = match v {
        Some(v) => {
            let r = monitor_reduced(v)?;
            let pu = u.field.project(p, Part::Resolved)?;
            (Some(r), Some((&v.field - &pu).l2_norm_sq()))
        }
        None => (None, None),
    };
    let monitor = match cfg.strategy {
        Strategy::ProjectedFull => projected,
        Strategy::ReducedModel => reduced.expect("watchdog present for reduced strategy"),
    };
    let record = TimeSeriesRecord {
        t: u.t,
        energy: u.energy(),
        flux_reduced: reduced.map(|r| r.flux),
        flux_projected: Some(projected.flux),
        err_sq,
        tail_fraction: tail_fraction(&u.field),
        m: u.field.band().size(),
    };
    Ok(Observation { monitor, record })
}

/// Runs the refine-and-continue loop to `t_end`, the band limit (plus grace),
/// or an integration failure.
pub fn run_driver(cfg: &DriverConfig) -> Result<RunResult> {
    cfg.validate()?;
    let mut p = Partition::new(cfg.initial.band())?;
    let spec = ModelSpec {
        equation: cfg.equation,
        closure: Closure::FullGalerkin,
        partition: p,
        gamma_support: cfg.gamma_support,
    };
    let mut u = SimState::new(cfg.initial.clone(), spec)?;
    let mut v = match cfg.strategy {
        Strategy::ReducedModel => Some(reinitialize_watchdog(&u, &p)?),
        Strategy::ProjectedFull => None,
    };
    let mut stepper = Stepper::new(cfg.stepper.resolve(&u.field, cfg.equation))?;
    let scheme = stepper.config().scheme;

    let mut samples = Vec::new();
    let mut series = Vec::new();
    let mut spectra = Vec::new();
    let mut events: Vec<RefinementEvent> = Vec::new();
    let mut limit_time: Option<f64> = None;
    let mut failure = None;
    let initial_energy = u.energy();

    let mut spectrum_times: Vec<f64> = cfg
        .spectrum_times
        .iter()
        .copied()
        .filter(|&s| s >= 0.0 && s <= cfg.t_end)
        .collect();
    spectrum_times.sort_by(f64::total_cmp);
    spectrum_times.dedup();
    let mut next_spectrum = 0;
    let snapshot = |u: &SimState, next: &mut usize, spectra: &mut Vec<SpectrumSnapshot>| {
        while *next < spectrum_times.len() && spectrum_times[*next] <= u.t {
            if spectrum_times[*next] == u.t {
                spectra.push(SpectrumSnapshot {
                    t: u.t,
                    entries: spectrum(&u.field),
                });
            }
            *next += 1;
        }
    };

    let first = observe(&u, v.as_ref(), &p, cfg)?;
    samples.push(first.monitor);
    series.push(first.record);
    snapshot(&u, &mut next_spectrum, &mut spectra);

    let mut steps = 0usize;
    loop {
        let deadline = limit_time.map_or(cfg.t_end, |t| (t + cfg.grace).min(cfg.t_end));
        if u.t >= deadline {
            break;
        }
        let target = spectrum_times
            .get(next_spectrum)
            .map_or(deadline, |&s| s.min(deadline));

        let advanced = stepper.advance(&u, target).and_then(|nu| match &v {
            Some(w) => step_until(w, nu.t, scheme).map(|nw| (nu, Some(nw))),
            None => Ok((nu, None)),
        });
        let (nu, nv) = match advanced {
            Ok(pair) => pair,
            Err(Error::IntegrationFailure { reason, t, .. }) => {
                failure = Some(format!("t = {t}: {reason}"));
                break;
            }
            Err(e) => return Err(e),
        };
        u = nu;
        v = nv;
        steps += 1;

        let obs = observe(&u, v.as_ref(), &p, cfg)?;
        samples.push(obs.monitor);
        if steps.is_multiple_of(cfg.sample_stride) {
            series.push(obs.record);
        }
        snapshot(&u, &mut next_spectrum, &mut spectra);

        if !cfg.refine || limit_time.is_some() {
            continue;
        }
        let policy = cfg.policy(stepper.dt());
        match check(&obs.monitor, &policy, events.last().map(|e| e.t)) {
            Decision::Continue => {}
            Decision::AtLimit => limit_time = Some(u.t),
            Decision::Refine => {
                let (nu, np, event) = refine(&u, &p, &policy, obs.monitor)?;
                u = nu;
                p = np;
                if v.is_some() {
                    v = Some(reinitialize_watchdog(&u, &p)?);
                }
                if cfg.stepper.dt.is_none() {
                    stepper.reset_dt(cfl_dt(&u.field, cfg.equation, cfg.stepper.cfl));
                }
                events.push(event);
            }
        }
    }

    if series.last().map(|r| r.t) != Some(u.t) {
        series.push(observe(&u, v.as_ref(), &p, cfg)?.record);
    }
    let outcome = if failure.is_some() {
        Outcome::BlowUp
    } else if limit_time.is_some() {
        Outcome::AtLimit
    } else {
        Outcome::Completed
    };
    Ok(RunResult {
        outcome,
        final_state: u,
        watchdog: v,
        events,
        samples,
        series,
        spectra,
        initial_energy,
        failure,
        limit_time,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sine(m: usize) -> SpectralField {
        SpectralField::from_modes(ModeBand::new(m).unwrap(), &[(1, c(0.0, -0.5)), (-1, c(0.0, 0.5))]).unwrap()
    }

    fn policy() -> RefinementPolicy {
        RefinementPolicy {
            threshold: 1e-3,
            mode: ThresholdMode::Relative,
            growth: 2,
            m_max: 512,
            cooldown: 0.0,
        }
    }

    fn sample(rel_flux: f64, m: usize) -> MonitorSample {
        MonitorSample {
            t: 0.5,
            tau: 0.5,
            strategy: Strategy::ProjectedFull,
            flux: rel_flux,
            rel_flux,
            m,
        }
    }

    #[test]
    fn reduced_monitor_examples() {
        let p = Partition::new(ModeBand::new(8).unwrap()).unwrap();
        let spec = ModelSpec::tmodel(Equation::Burgers, p);
        let v = SimState::at(sine(8), spec, 1.0, 1.0).unwrap();
        let s = monitor_reduced(&v).unwrap();
        assert!((s.flux - PI / 8.0).abs() < 1e-14);
        assert!((s.rel_flux - (PI / 8.0) / (PI / 2.0)).abs() < 1e-14);
        let v0 = SimState::at(sine(8), spec, 1.0, 0.0).unwrap();
        assert_eq!(monitor_reduced(&v0).unwrap().flux, 0.0);
        let wide = Partition::new(ModeBand::new(16).unwrap()).unwrap();
        let quiet = SimState::at(sine(16), ModelSpec::tmodel(Equation::Burgers, wide), 1.0, 1.0).unwrap();
        assert!(monitor_reduced(&quiet).unwrap().flux < 1e-28);
        let full = SimState::new(sine(8), ModelSpec::full(Equation::Burgers, p)).unwrap();
        assert!(monitor_reduced(&full).is_err());
    }

    #[test]
    fn projected_monitor_examples() {
        let p = Partition::new(ModeBand::new(8).unwrap()).unwrap();
        let spec = ModelSpec::full(Equation::Burgers, p);
        let u = SimState::at(sine(8), spec, 1.0, 1.0).unwrap();
        assert!((monitor_projected(&u, &p, NLS_FLUX_WEIGHT).unwrap().flux - PI / 8.0).abs() < 1e-14);
        let u0 = SimState::at(sine(8), spec, 1.0, 0.0).unwrap();
        assert_eq!(monitor_projected(&u0, &p, NLS_FLUX_WEIGHT).unwrap().flux, 0.0);
        let wide = Partition::new(ModeBand::new(16).unwrap()).unwrap();
        let quiet = SimState::at(sine(16), ModelSpec::full(Equation::Burgers, wide), 1.0, 1.0).unwrap();
        assert!(monitor_projected(&quiet, &wide, NLS_FLUX_WEIGHT).unwrap().flux < 1e-28);
        let v = SimState::new(sine(8), ModelSpec::tmodel(Equation::Burgers, p)).unwrap();
        assert!(monitor_projected(&v, &p, NLS_FLUX_WEIGHT).is_err());
    }

    #[test]
    fn check_rules() {
        let pol = policy();
        assert_eq!(check(&sample(1e-4, 64), &pol, None), Decision::Continue);
        assert_eq!(check(&sample(2e-3, 64), &pol, None), Decision::Refine);
        assert_eq!(check(&sample(2e-3, 512), &pol, None), Decision::AtLimit);
        let cool = RefinementPolicy { cooldown: 1.0, ..pol };
        assert_eq!(check(&sample(2e-3, 64), &cool, Some(0.0)), Decision::Continue);
        let abs = RefinementPolicy { mode: ThresholdMode::Absolute, ..pol };
        let mut s = sample(0.0, 64);
        s.flux = 2e-3;
        assert_eq!(check(&s, &abs, None), Decision::Refine);
        let never = RefinementPolicy { threshold: f64::INFINITY, ..pol };
        assert_eq!(check(&sample(1e30, 64), &never, None), Decision::Continue);
    }

    #[test]
    fn refine_doubles_and_preserves() {
        let band = ModeBand::new(32).unwrap();
        let p = Partition::new(band).unwrap();
        let f = SpectralField::from_fn(band, |k| c(1.0 / (1.0 + (k * k) as f64), 0.0));
        let u = SimState::at(f.clone(), ModelSpec::full(Equation::Burgers, p), 0.3, 0.3).unwrap();
        let pol = policy();
        let (u2, p2, ev) = refine(&u, &p, &pol, sample(1.0, 32)).unwrap();
        assert_eq!((ev.m_before, ev.m_after, p2.m(), p2.n()), (32, 64, 64, 32));
        assert_eq!(u2.field.l2_norm_sq(), f.l2_norm_sq());
        assert_eq!(u2.tau, 0.0);
        assert_eq!(u2.t, 0.3);
        let w = reinitialize_watchdog(&u2, &p2).unwrap();
        assert_eq!(w.field, u2.field.project(&p2, Part::Resolved).unwrap());
        assert_eq!(w.tau, 0.0);

        let (u3, p3, _) = refine(&u2, &p2, &pol, sample(1.0, 64)).unwrap();
        assert_eq!(p3.m(), 128);
        assert_eq!(u3.field.truncate(band).unwrap(), f);

        let top = Partition::new(ModeBand::new(512).unwrap()).unwrap();
        let big = SimState::new(SpectralField::zeros(top.band()), ModelSpec::full(Equation::Burgers, top)).unwrap();
        assert!(refine(&big, &top, &pol, sample(1.0, 512)).is_err());
    }

    #[test]
    fn policy_validation() {
        let pol = policy();
        assert!(pol.validate(32).is_ok());
        assert!(RefinementPolicy { threshold: 0.0, ..pol }.validate(32).is_err());
        assert!(RefinementPolicy { growth: 1, ..pol }.validate(32).is_err());
        assert!(RefinementPolicy { m_max: 500, ..pol }.validate(32).is_err());
    }

    #[test]
    fn infinite_threshold_never_refines() {
        let mut cfg = DriverConfig::new(Equation::Burgers, sine(32), 0.3);
        cfg.threshold = f64::INFINITY;
        let r = run_driver(&cfg).unwrap();
        assert!(r.events.is_empty());
        assert_eq!(r.outcome, Outcome::Completed);
        assert_eq!(r.final_state.t, 0.3);
        assert_eq!(r.final_state.field.band().size(), 32);
    }

    #[test]
    fn tiny_amplitude_never_refines() {
        let mut cfg = DriverConfig::new(Equation::Burgers, sine(32).scale_re(1e-4), 2.0);
        cfg.stepper.dt = Some(1e-2);
        let r = run_driver(&cfg).unwrap();
        assert!(r.events.is_empty());
        assert!(r.samples.iter().all(|s| s.rel_flux < 1e-3));
    }

    #[test]
    fn spectra_land_on_requested_times() {
        let mut cfg = DriverConfig::new(Equation::Burgers, sine(16), 0.2);
        cfg.spectrum_times = vec![0.0, 0.05, 0.123];
        cfg.refine = false;
        let r = run_driver(&cfg).unwrap();
        let times: Vec<f64> = r.spectra.iter().map(|s| s.t).collect();
        assert_eq!(times, vec![0.0, 0.05, 0.123]);
        assert!(r.series.windows(2).all(|w| w[0].t < w[1].t));
    }
}
