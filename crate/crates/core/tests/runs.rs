use std::f64::consts::PI;
use std::fs;

use num_complex::Complex64;

use mzrefine::config::parse_config;
use mzrefine::dynamics::{Equation, ModelSpec};
use mzrefine::harness::{self, RunSummary};
use mzrefine::integrator::{advance_to, Scheme, SimState, StepperConfig};
use mzrefine::refinement::{run_driver, DriverConfig, Outcome, Strategy};
use mzrefine::spectral::{ModeBand, Partition, SpectralField};

fn sine(m: usize) -> SpectralField {
    SpectralField::from_modes(
        ModeBand::new(m).unwrap(),
        &[(1, Complex64::new(0.0, -0.5)), (-1, Complex64::new(0.0, 0.5))],
    )
    .unwrap()
}

fn full(field: SpectralField, eq: Equation) -> SimState {
    let p = Partition::new(field.band()).unwrap();
    SimState::new(field, ModelSpec::full(eq, p)).unwrap()
}

#[test]
fn step_doubling_agrees_with_small_fixed_step() {
    let u0 = full(sine(256), Equation::Burgers);
    let fixed = advance_to(&u0, 0.5, &StepperConfig::fixed(Scheme::Rk4, 1e-4), &mut |_| {}).unwrap();
    let cfg = StepperConfig {
        adapt: true,
        tol: 1e-10,
        dt: 1e-3,
        dt_min: 1e-8,
        dt_max: 1e-2,
        ..StepperConfig::fixed(Scheme::Rk4, 1e-3)
    };
    let mut steps = 0;
    let adaptive = advance_to(&u0, 0.5, &cfg, &mut |_| steps += 1).unwrap();
    assert_eq!(adaptive.t, 0.5);
    let diff = (&adaptive.field - &fixed.field).l2_norm_sq().sqrt();
    assert!(diff <= 1e-7, "diff {diff:e} after {steps} steps");
}

#[test]
fn rk4_order_on_plane_wave() {
    // small band and moderate amplitude keep the modulational instability weak
    let band = ModeBand::new(8).unwrap();
    let a = 1.5f64;
    let omega = a.powi(4) - 1.0;
    let exact = SpectralField::single_mode(band, 1, Complex64::from_polar(a, omega)).unwrap();
    let u0 = full(SpectralField::single_mode(band, 1, Complex64::new(a, 0.0)).unwrap(), Equation::CriticalNls);
    let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
        .iter()
        .map(|&dt| {
            let u = advance_to(&u0, 1.0, &StepperConfig::fixed(Scheme::Rk4, dt), &mut |_| {}).unwrap();
            u.field.max_diff(&exact).unwrap()
        })
        .collect();
    for w in errs.windows(2) {
        let ratio = w[0] / w[1];
        assert!((8.0..=32.0).contains(&ratio), "errors {errs:?}");
    }
}

fn max_energy_increase(v0: &SimState, t_end: f64, cfg: &StepperConfig) -> (f64, f64) {
    let mut last = v0.energy();
    let mut worst: f64 = 0.0;
    advance_to(v0, t_end, cfg, &mut |s| {
        worst = worst.max((s.energy() - last) / last);
        last = s.energy();
    })
    .unwrap();
    (worst, last)
}

#[test]
fn tmodel_energy_is_monotone() {
    let p = Partition::new(ModeBand::new(32).unwrap()).unwrap();
    // The unpaired mode -N/2 of F makes the Burgers t-model drift away from a
    // real field; past t ~ 1.5 on this band that breaks monotonicity.
    let v0 = SimState::new(sine(32), ModelSpec::tmodel(Equation::Burgers, p)).unwrap();
    let (worst, last) = max_energy_increase(&v0, 1.2, &StepperConfig::fixed(Scheme::Rk4, 1e-3));
    assert!(worst <= 1e-9, "largest relative increase {worst:e}");
    assert!(last < v0.energy());

    let modulated = SpectralField::from_modes(
        p.band(),
        &[(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(0.3, 0.0)), (-1, Complex64::new(0.3, 0.0))],
    )
    .unwrap();
    let w0 = SimState::new(modulated, ModelSpec::tmodel(Equation::CriticalNls, p)).unwrap();
    let (worst, last) = max_energy_increase(&w0, 1.0, &StepperConfig::fixed(Scheme::IfRk4, 1e-3));
    assert!(worst <= 1e-9, "largest relative increase {worst:e}");
    assert!(last < w0.energy());
}

#[test]
fn runs_are_deterministic() {
    let mut cfg = DriverConfig::new(Equation::Burgers, sine(32), 0.8);
    cfg.strategy = Strategy::ReducedModel;
    cfg.m_max = 128;
    let a = run_driver(&cfg).unwrap();
    let b = run_driver(&cfg).unwrap();
    assert_eq!(a.series, b.series);
    assert_eq!(a.events, b.events);
    assert_eq!(a.final_state, b.final_state);
}

#[test]
fn burgers_sine_refines_before_shock() {
    let mut cfg = DriverConfig::new(Equation::Burgers, sine(32), 0.99);
    cfg.m_max = 512;
    let r = run_driver(&cfg).unwrap();
    assert!(!r.events.is_empty());
    assert!(r.events[0].t < 1.0);
    for w in r.events.windows(2) {
        assert!(w[1].t > w[0].t);
        assert_eq!(w[1].m_before, w[0].m_after);
    }
    for e in &r.events {
        assert_eq!(e.m_after, 2 * e.m_before);
        assert!(e.m_after <= 512);
    }
}

#[test]
fn refinement_events_respect_cooldown() {
    let mut cfg = DriverConfig::new(Equation::Burgers, sine(16), 1.2);
    cfg.m_max = 1024;
    cfg.cooldown = Some(0.05);
    cfg.threshold = 1e-6;
    let r = run_driver(&cfg).unwrap();
    assert!(r.events.len() >= 2);
    for w in r.events.windows(2) {
        assert!(w[1].t - w[0].t >= 0.05);
    }
}

#[test]
fn band_limit_stops_the_run() {
    let mut cfg = DriverConfig::new(Equation::Burgers, sine(32), 1.5);
    cfg.m_max = 64;
    let r = run_driver(&cfg).unwrap();
    assert_eq!(r.outcome, Outcome::AtLimit);
    let t_lim = r.limit_time.unwrap();
    assert_eq!(r.final_state.t, t_lim);
    assert!(t_lim < 1.5);

    cfg.grace = 0.05;
    let r = run_driver(&cfg).unwrap();
    assert_eq!(r.outcome, Outcome::AtLimit);
    assert!((r.final_state.t - (t_lim + 0.05)).abs() < 1e-12);
}

#[test]
fn blow_up_is_an_outcome() {
    // A steep NLS pulse with a step-size floor the solver cannot respect.
    let band = ModeBand::new(32).unwrap();
    let f = SpectralField::from_fn(band, |k| Complex64::new(3.0 * (-0.1 * (k * k) as f64).exp(), 0.0));
    let mut cfg = DriverConfig::new(Equation::CriticalNls, f, 1.0);
    cfg.refine = false;
    cfg.m_max = 32;
    cfg.stepper.adapt = true;
    cfg.stepper.tol = 1e-12;
    cfg.stepper.dt = Some(1e-2);
    cfg.stepper.dt_min = 1e-4;
    let r = run_driver(&cfg).unwrap();
    assert_eq!(r.outcome, Outcome::BlowUp);
    assert!(r.failure.is_some());
    assert!(r.final_state.field.is_finite());
    assert!(r.final_state.t < 1.0);
}

#[test]
fn plane_wave_keeps_error_constant_while_flux_is_zero() {
    let band = ModeBand::new(32).unwrap();
    let u0 = SpectralField::single_mode(band, 1, Complex64::new(1.0, 0.0)).unwrap();
    let mut cfg = DriverConfig::new(Equation::CriticalNls, u0, 1.0);
    cfg.strategy = Strategy::ReducedModel;
    cfg.refine = false;
    cfg.m_max = 32;
    cfg.stepper.dt = Some(1e-3);
    let r = run_driver(&cfg).unwrap();
    let scale = 2.0 * r.initial_energy;
    for row in &r.series {
        assert!(row.flux_reduced.unwrap() <= 1e-20);
        assert!(row.flux_projected.unwrap() <= 1e-20);
        assert!(row.err_sq.unwrap() <= 1e-10 * scale);
        assert!((row.energy - r.initial_energy).abs() <= 1e-10 * r.initial_energy);
    }
}

fn run_in(dir: &std::path::Path, text: &str) -> RunSummary {
    harness::run(&parse_config(text).unwrap(), dir).unwrap().0
}

fn read_series(dir: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rdr = csv::Reader::from_path(dir.join("series.csv")).unwrap();
    let header = rdr.headers().unwrap().iter().map(String::from).collect();
    let rows = rdr.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn burgers_run_writes_consistent_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("b");
    let text = r#"{"equation":"burgers","initial_condition":{"preset":"sine"},"m0":32,"m_max":512,
        "t_end":0.95,"spectrum_times":[0.25,0.5],"stepper":{"dt":1e-3}}"#;
    let s = run_in(&dir, text);
    assert_eq!(s.outcome, Outcome::Completed);
    assert!((s.initial_norm_sq - PI).abs() <= 1e-12);

    let (header, rows) = read_series(&dir);
    assert_eq!(header, ["t", "energy", "flux_reduced", "flux_projected", "err_sq", "tail_fraction", "M"]);
    let ts: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let ms: Vec<usize> = rows.iter().map(|r| r[6].parse().unwrap()).collect();
    assert!(ts.windows(2).all(|w| w[0] < w[1]));
    assert!(ms.windows(2).all(|w| w[0] <= w[1]));
    assert!(rows.iter().all(|r| r[2].is_empty() && r[4].is_empty()));
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), PI / 2.0);

    let events: Vec<serde_json::Value> = fs::read_to_string(dir.join("events.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(!events.is_empty());
    for w in events.windows(2) {
        assert!(w[1]["t"].as_f64() > w[0]["t"].as_f64());
        assert_eq!(w[1]["M_before"], w[0]["M_after"]);
    }
    for e in &events {
        assert_eq!(e["M_after"].as_u64().unwrap(), 2 * e["M_before"].as_u64().unwrap());
        assert_eq!(e["strategy"], "projected_full");
        for key in ["flux", "rel_flux"] {
            assert!(e[key].as_f64().unwrap() > 0.0);
        }
    }

    let spectrum = fs::read_to_string(dir.join("spectrum_0.25.csv")).unwrap();
    assert!(spectrum.starts_with("k,esq\n"));
    assert!(dir.join("spectrum_0.5.csv").exists());
    let result: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("result.json")).unwrap()).unwrap();
    assert_eq!(result["outcome"], "completed");
    assert_eq!(result["provenance"]["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn plane_wave_run_has_no_events_and_flat_energy() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{"equation":"nls","initial_condition":{"preset":"plane_wave","amplitude":1,"k":1},"m0":32,"t_end":1,
        "stepper":{"dt":1e-3},"sample_stride":50}"#;
    let s = run_in(tmp.path(), text);
    assert_eq!(s.outcome.exit_code(), 0);
    assert_eq!(s.events, 0);
    assert_eq!(fs::read_to_string(tmp.path().join("events.jsonl")).unwrap(), "");
    let (_, rows) = read_series(tmp.path());
    let e0: f64 = rows[0][1].parse().unwrap();
    for r in &rows {
        let e: f64 = r[1].parse().unwrap();
        assert!((e - e0).abs() <= 1e-10 * e0);
    }
}

#[test]
fn infinite_threshold_gives_empty_events() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{"equation":"burgers","initial_condition":{"preset":"sine"},"m0":32,"t_end":0.9,"threshold":"inf"}"#;
    let s = run_in(tmp.path(), text);
    assert_eq!(s.events, 0);
    assert_eq!(s.m_final, 32);
    assert_eq!(fs::read_to_string(tmp.path().join("events.jsonl")).unwrap(), "");
}

#[test]
fn outputs_are_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let text = r#"{"equation":"burgers","initial_condition":{"preset":"random","amplitude":0.5,"k_max":3},"seed":11,
        "strategy":"reduced_model","m0":16,"m_max":64,"t_end":0.6,"grace":"inf","spectrum_times":[0.6]}"#;
    run_in(&tmp.path().join("a"), text);
    run_in(&tmp.path().join("b"), text);
    for f in ["series.csv", "events.jsonl", "spectrum_0.6.csv", "result.json"] {
        assert_eq!(
            fs::read(tmp.path().join("a").join(f)).unwrap(),
            fs::read(tmp.path().join("b").join(f)).unwrap(),
            "{f} differs"
        );
    }
}
