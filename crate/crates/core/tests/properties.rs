use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use mzrefine::diagnostics::decay_identity_residual;
use mzrefine::dynamics::{burgers_full_rhs, flux_of, nls_full_rhs, Equation, ModelSpec};
use mzrefine::integrator::SimState;
use mzrefine::oracle::{burgers_tmodel_fourier, direct_conv_oracle, nls_tmodel_fourier, ConvKind, DEFAULT_GUARD};
use mzrefine::refinement::{monitor_projected, monitor_reduced, refine, reinitialize_watchdog, RefinementPolicy, ThresholdMode};
use mzrefine::sample::{random_field, random_real, random_real_resolved, random_resolved, rng};
use mzrefine::spectral::{ModeBand, Part, Partition, SpectralField};
use mzrefine::transform::{conv2, conv5, to_grid};

fn band(m: usize) -> ModeBand {
    ModeBand::new(m).unwrap()
}

fn rel(a: &SpectralField, b: &SpectralField) -> f64 {
    a.max_diff(b).unwrap() / b.max_abs().max(1e-300)
}

fn m_choice(max_log2: u32) -> impl Strategy<Value = usize> {
    (3..=max_log2).prop_map(|e| 1usize << e)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn parseval_matches_trapezoid(m in m_choice(6), seed in any::<u64>()) {
        let f = random_field(band(m), &mut rng(seed));
        let len = 2 * m;
        let grid = to_grid(&f, len);
        let quad: f64 = grid.iter().map(|z| z.norm_sqr()).sum::<f64>() * 2.0 * PI / len as f64;
        prop_assert!((quad - f.l2_norm_sq()).abs() <= 1e-10 * f.l2_norm_sq());
    }

    #[test]
    fn inner_is_norm_and_conjugate_symmetric(m in m_choice(6), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (f, g) = (random_field(band(m), &mut r), random_field(band(m), &mut r));
        prop_assert!((f.inner(&f).unwrap().re - f.l2_norm_sq()).abs() <= 1e-12 * f.l2_norm_sq());
        prop_assert!((f.inner(&g).unwrap() - g.inner(&f).unwrap().conj()).norm() <= 1e-12 * f.l2_norm_sq().max(g.l2_norm_sq()));
    }

    #[test]
    fn conv2_matches_oracle_and_is_symmetric(m in m_choice(5), seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b) = (random_field(band(m), &mut r), random_field(band(m), &mut r));
        let ab = conv2(&a, &b).unwrap();
        prop_assert!(rel(&ab, &direct_conv_oracle(ConvKind::Quadratic, &[&a, &b], DEFAULT_GUARD).unwrap()) <= 1e-12);
        prop_assert!(rel(&conv2(&b, &a).unwrap(), &ab) <= 1e-14);
    }

    #[test]
    fn conv2_preserves_reality(m in m_choice(6), seed in any::<u64>()) {
        let mut r = rng(seed);
        let kmax = m as i64 / 2 - 1;
        let a = random_real(band(m), kmax, 1.0, &mut r);
        let b = random_real(band(m), kmax, 1.0, &mut r);
        let c = conv2(&a, &b).unwrap();
        // the unpaired -M/2 output has no partner inside the band
        let paired = c.map(|k, z| if k == -(m as i64) / 2 { Complex64::new(0.0, 0.0) } else { z });
        prop_assert!(paired.hermitian_defect() <= 1e-13 * c.max_abs());
    }

    #[test]
    fn conv5_matches_oracle(m in m_choice(4), seed in any::<u64>()) {
        let mut r = rng(seed);
        let z: Vec<SpectralField> = (0..5).map(|_| random_field(band(m), &mut r)).collect();
        let refs: Vec<&SpectralField> = z.iter().collect();
        let fft = conv5([&z[0], &z[1], &z[2], &z[3], &z[4]]).unwrap();
        prop_assert!(rel(&fft, &direct_conv_oracle(ConvKind::Quintic, &refs, DEFAULT_GUARD).unwrap()) <= 1e-12);
    }

    #[test]
    fn conv5_slotwise_homogeneous(slot in 0usize..5, re in -2.0..2.0f64, im in -2.0..2.0f64, seed in any::<u64>()) {
        let mut r = rng(seed);
        let z: Vec<SpectralField> = (0..5).map(|_| random_field(band(16), &mut r)).collect();
        let c = Complex64::new(re, im);
        let base = conv5([&z[0], &z[1], &z[2], &z[3], &z[4]]).unwrap();
        let mut scaled = z.clone();
        scaled[slot] = z[slot].scale(c);
        let out = conv5([&scaled[0], &scaled[1], &scaled[2], &scaled[3], &scaled[4]]).unwrap();
        let factor = if slot % 2 == 1 { c.conj() } else { c };
        let expected = base.scale(factor);
        prop_assert!(out.max_diff(&expected).unwrap() <= 1e-12 * base.max_abs() * c.norm().max(1.0));
    }

    #[test]
    fn projections_idempotent_complementary_orthogonal(m in (2u32..=6).prop_map(|e| 4usize << e), seed in any::<u64>()) {
        let p = Partition::new(band(m)).unwrap();
        let f = random_field(p.band(), &mut rng(seed));
        let pf = f.project(&p, Part::Resolved).unwrap();
        let qf = f.project(&p, Part::Unresolved).unwrap();
        prop_assert_eq!(&pf.project(&p, Part::Resolved).unwrap(), &pf);
        prop_assert_eq!(&qf.project(&p, Part::Unresolved).unwrap(), &qf);
        prop_assert_eq!(&(&pf + &qf), &f);
        prop_assert!(pf.inner(&qf).unwrap().norm() == 0.0);
    }

    #[test]
    fn prolong_preserves_norm_and_truncates_back(m in m_choice(6), seed in any::<u64>()) {
        let f = random_field(band(m), &mut rng(seed));
        let g = f.prolong(band(2 * m)).unwrap();
        prop_assert_eq!(g.l2_norm_sq(), f.l2_norm_sq());
        prop_assert_eq!(&g.truncate(band(m)).unwrap(), &f);
        prop_assert!(f.prolong(band(m / 2)).is_err());
    }

    #[test]
    fn full_systems_conserve_at_rhs_level(m in m_choice(6), seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = random_real(band(m), m as i64 / 2 - 1, 1.0, &mut r);
        let rate = u.inner(&burgers_full_rhs(&u).unwrap().rhs).unwrap().re;
        prop_assert!(rate.abs() <= 1e-10 * u.l2_norm_sq());
        let w = random_field(band(m), &mut r).scale_re(0.5);
        let rate = w.inner(&nls_full_rhs(&w).unwrap().rhs).unwrap().re;
        prop_assert!(rate.abs() <= 1e-10 * w.l2_norm_sq());
    }

    #[test]
    fn decay_identity_and_nonnegative_flux(m in (2u32..=5).prop_map(|e| 4usize << e), tau in 0.0..3.0f64, seed in any::<u64>()) {
        let p = Partition::new(band(m)).unwrap();
        let mut r = rng(seed);
        for (eq, v) in [
            (Equation::Burgers, random_real_resolved(&p, 1.0, &mut r)),
            (Equation::CriticalNls, random_resolved(&p, 0.5, &mut r)),
        ] {
            let spec = ModelSpec::tmodel(eq, p);
            prop_assert!(flux_of(&v, tau, &spec).unwrap() >= 0.0);
            let s = SimState::at(v, spec, tau, tau).unwrap();
            prop_assert!(decay_identity_residual(&s).unwrap() <= 1e-10);
        }
    }

    #[test]
    fn fourier_and_pde_forms_agree(m in (2u32..=4).prop_map(|e| 4usize << e), tau in 0.0..2.0f64, seed in any::<u64>()) {
        let p = Partition::new(band(m)).unwrap();
        let mut r = rng(seed);
        let v = random_real_resolved(&p, 1.0, &mut r);
        let pde = ModelSpec::tmodel(Equation::Burgers, p).evaluate(&v, tau).unwrap().rhs;
        prop_assert!(rel(&burgers_tmodel_fourier(&v, &p, tau).unwrap(), &pde) <= 1e-12);
        if m <= 16 {
            let w = random_resolved(&p, 0.5, &mut r);
            let pde = ModelSpec::tmodel(Equation::CriticalNls, p).evaluate(&w, tau).unwrap().rhs;
            let fourier = nls_tmodel_fourier(&w, &p, tau, p.band()).unwrap();
            prop_assert!(fourier.max_diff(&pde).unwrap() <= 1e-12 * pde.max_abs().max(1.0));
        }
    }

    #[test]
    fn monitors_agree_when_watchdog_equals_pu(m in (2u32..=5).prop_map(|e| 4usize << e), tau in 0.0..2.0f64, seed in any::<u64>()) {
        let p = Partition::new(band(m)).unwrap();
        let mut r = rng(seed);
        for (eq, u) in [
            (Equation::Burgers, random_real(p.band(), m as i64 / 2 - 1, 1.0, &mut r)),
            (Equation::CriticalNls, random_field(p.band(), &mut r).scale_re(0.3)),
        ] {
            let us = SimState::at(u, ModelSpec::full(eq, p), tau, tau).unwrap();
            let v = reinitialize_watchdog(&us, &p).unwrap();
            let v = SimState::at(v.field, v.spec, tau, tau).unwrap();
            let a = monitor_reduced(&v).unwrap().flux;
            let b = monitor_projected(&us, &p, 1.0).unwrap().flux;
            prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300));
        }
    }

    #[test]
    fn refinement_preserves_state(e in 2u32..=5, seed in any::<u64>()) {
        let m = 4usize << e;
        let p = Partition::new(band(m)).unwrap();
        let u = random_real(p.band(), m as i64 / 2 - 1, 1.0, &mut rng(seed));
        let s = SimState::at(u.clone(), ModelSpec::full(Equation::Burgers, p), 0.4, 0.2).unwrap();
        let policy = RefinementPolicy { threshold: 1e-3, mode: ThresholdMode::Relative, growth: 2, m_max: 512, cooldown: 0.0 };
        let trigger = monitor_projected(&s, &p, 1.0).unwrap();
        let (s2, p2, ev) = refine(&s, &p, &policy, trigger).unwrap();
        prop_assert_eq!(ev.m_after, 2 * ev.m_before);
        prop_assert_eq!(p2.n(), m);
        prop_assert_eq!(s2.field.l2_norm_sq(), u.l2_norm_sq());
        prop_assert_eq!(&s2.field.truncate(p.band()).unwrap(), &u);
        prop_assert_eq!(s2.tau, 0.0);
    }
}
