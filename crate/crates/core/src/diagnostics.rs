//! Identity checks behind the t-model error analysis, error measurement
//! against a reference run, and spectrum/time-series extraction.
//!
//! The identities are checked at the level of right-hand sides: both sides
//! are exact in continuous time, so residuals should sit at roundoff. Where
//! possible the two sides are computed by different routes (spectral
//! convolutions on one side, physical-space quadrature after integrating by
//! parts on the other).

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{Closure, Equation};
use crate::error::{Error, Result};
use crate::integrator::SimState;
use crate::spectral::{Part, Partition, SpectralField};
use crate::transform::{padded_len, to_grid};

/// Denominator floor for normalized residuals.
pub const RESIDUAL_FLOOR: f64 = 1e-30;

/// Default weight on the NLS projected flux.
pub const NLS_FLUX_WEIGHT: f64 = 1664.0;

/// One row of the run time series. `None` marks a quantity the run did not compute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRecord {
    pub t: f64,
    /// `(1/2) ||u||^2` of the full solution.
    pub energy: f64,
    pub flux_reduced: Option<f64>,
    pub flux_projected: Option<f64>,
    /// `||v - Pu||^2` when a reduced trajectory is carried along.
    pub err_sq: Option<f64>,
    pub tail_fraction: f64,
    #[serde(rename = "M")]
    pub m: usize,
}

fn quadrature(values: impl Iterator<Item = Complex64>, len: usize) -> Complex64 {
    values.sum::<Complex64>() * (2.0 * PI / len as f64)
}

fn ensure_tmodel(s: &SimState) -> Result<()> {
    if s.spec.closure == Closure::TModel {
        Ok(())
    } else {
        Err(Error::InvalidInput("expected a t-model state".into()))
    }
}

fn ensure_full(s: &SimState) -> Result<()> {
    if s.spec.closure == Closure::FullGalerkin {
        Ok(())
    } else {
        Err(Error::InvalidInput("expected a full-Galerkin state".into()))
    }
}

/// `|Re (v, v_t) + tau ||Gamma||^2| / max(tau ||Gamma||^2, floor)`.
pub fn decay_identity_residual(v: &SimState) -> Result<f64> {
    ensure_tmodel(v)?;
    let eval = v.spec.evaluate(&v.field, v.tau)?;
    let rate = v.field.inner(&eval.rhs)?.re;
    Ok((rate + eval.flux).abs() / eval.flux.max(RESIDUAL_FLOOR))
}

/// Both sides of the error-evolution identity and the terms of its right side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorIdentity {
    /// `Re (v - Pu, v_t - P u_t)` from the right-hand-side functions.
    pub lhs: f64,
    /// Sum of `terms`.
    pub rhs: f64,
    /// Burgers: Markov difference, memory. NLS: Laplacian, Markov difference, `3i` memory, `2i` memory.
    pub terms: Vec<f64>,
    pub residual: f64,
}

/// Evaluates `d/dt (1/2)||v - Pu||^2` two ways. `v` is a t-model state, `u`
/// a full state on the same partition; `v.tau` is used as the memory clock.
pub fn error_identity(v: &SimState, u: &SimState) -> Result<ErrorIdentity> {
    ensure_tmodel(v)?;
    ensure_full(u)?;
    if v.spec.partition != u.spec.partition || v.spec.equation != u.spec.equation {
        return Err(Error::InvalidInput("reduced and full states use different partitions or equations".into()));
    }
    let p = v.spec.partition;
    let pu = u.field.project(&p, Part::Resolved)?;
    let w = &v.field - &pu;

    let vt = v.spec.evaluate(&v.field, v.tau)?;
    let ut = u.spec.evaluate(&u.field, u.tau)?.rhs.project(&p, Part::Resolved)?;
    let lhs = w.inner(&(&vt.rhs - &ut))?.re;

    let terms = match v.spec.equation {
        Equation::Burgers => burgers_error_terms(&w, &v.field, &u.field, &vt.gamma, v.tau),
        Equation::CriticalNls => nls_error_terms(&w, &v.field, &u.field, &vt.gamma, v.tau),
    };
    let rhs: f64 = terms.iter().sum();
    let scale = terms.iter().map(|x| x.abs()).sum::<f64>().max(lhs.abs()).max(RESIDUAL_FLOOR);
    Ok(ErrorIdentity {
        lhs,
        rhs,
        residual: (lhs - rhs).abs() / scale,
        terms,
    })
}

/// Normalized residual of [`error_identity`].
pub fn error_identity_residual(v: &SimState, u: &SimState) -> Result<f64> {
    error_identity(v, u).map(|e| e.residual)
}

// (w, B[a, a]) = -(w_x, a^2 / 2) and (w, P d/dx(v Gamma)) = -(w_x, v Gamma), by quadrature.
fn burgers_error_terms(
    w: &SpectralField,
    v: &SpectralField,
    u: &SpectralField,
    gamma: &SpectralField,
    tau: f64,
) -> Vec<f64> {
    let len = padded_len(w.band().size(), 3);
    let wx = to_grid(&w.derivative(), len);
    let gv = to_grid(v, len);
    let gu = to_grid(u, len);
    let gg = to_grid(gamma, len);
    let w_bvv = -quadrature((0..len).map(|j| wx[j].conj() * gv[j] * gv[j] * 0.5), len);
    let w_buu = -quadrature((0..len).map(|j| wx[j].conj() * gu[j] * gu[j] * 0.5), len);
    let w_mem = -quadrature((0..len).map(|j| wx[j].conj() * gv[j] * gg[j]), len);
    vec![-(w_bvv - w_buu).re, -tau * w_mem.re]
}

fn nls_error_terms(
    w: &SpectralField,
    v: &SpectralField,
    u: &SpectralField,
    gamma: &SpectralField,
    tau: f64,
) -> Vec<f64> {
    let i = Complex64::new(0.0, 1.0);
    let laplacian: f64 = 2.0
        * PI
        * w.iter()
            .map(|(k, c)| (c.conj() * i * (-((k * k) as f64)) * c).re)
            .sum::<f64>();

    let len = padded_len(gamma.band().size().max(u.band().size()), 5);
    let gw = to_grid(w, len);
    let gv = to_grid(v, len);
    let gu = to_grid(u, len);
    let gg = to_grid(gamma, len);
    let quint = |z: Complex64| z * z.norm_sqr() * z.norm_sqr();
    let markov = i * quadrature((0..len).map(|j| gw[j].conj() * (quint(gv[j]) - quint(gu[j]))), len);
    let three = 3.0 * i * tau * quadrature((0..len).map(|j| gw[j].conj() * gg[j] * gv[j].norm_sqr().powi(2)), len);
    let two = 2.0
        * i
        * tau
        * quadrature(
            (0..len).map(|j| gw[j].conj() * gg[j].conj() * gv[j] * gv[j] * gv[j].norm_sqr()),
            len,
        );
    vec![laplacian, markov.re, three.re, two.re]
}

/// `||v - P u_ref||_2`, with `u_ref` truncated onto `v`'s band first.
pub fn error_vs_reference(v: &SimState, u_ref: &SimState) -> Result<f64> {
    let band = v.field.band();
    if u_ref.field.band().size() < band.size() {
        return Err(Error::BandMismatch {
            expected: band.size(),
            found: u_ref.field.band().size(),
        });
    }
    let p = v.spec.partition;
    let pu = u_ref.field.truncate(band)?.project(&p, Part::Resolved)?;
    Ok((&v.field - &pu).l2_norm_sq().sqrt())
}

/// The two inhomogeneous drivers of the error bound, evaluated on a full solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriverTerms {
    /// `||Qu||^2`.
    pub unresolved_sq: f64,
    /// `tau ||(I-P) B[Pu, Pu]||^2` (Burgers) or `weight tau ||(I-P) B[Pu x5]||^2` (NLS).
    pub projected_flux: f64,
}

pub fn driver_terms(u: &SimState, p: &Partition, tau: f64, nls_weight: f64) -> Result<DriverTerms> {
    ensure_full(u)?;
    if tau < 0.0 {
        return Err(Error::NegativeTau(tau));
    }
    let unresolved_sq = u.field.project(p, Part::Unresolved)?.l2_norm_sq();
    let pu = u.field.project(p, Part::Resolved)?;
    let gamma_sq = projected_gamma(&pu, p, u.spec.equation)?.l2_norm_sq();
    let weight = match u.spec.equation {
        Equation::Burgers => 1.0,
        Equation::CriticalNls => nls_weight,
    };
    Ok(DriverTerms {
        unresolved_sq,
        projected_flux: weight * tau * gamma_sq,
    })
}

/// `(I-P)` applied to the nonlinear term of `Pu`.
pub(crate) fn projected_gamma(pu: &SpectralField, p: &Partition, equation: Equation) -> Result<SpectralField> {
    match equation {
        Equation::Burgers => crate::dynamics::burgers_gamma(pu, p),
        Equation::CriticalNls => crate::dynamics::nls_gamma(pu, p, crate::dynamics::GammaSupport::Truncated),
    }
}

/// `(k, |f_k|^2)` in wavenumber order.
pub fn spectrum(f: &SpectralField) -> Vec<(i64, f64)> {
    f.iter().map(|(k, c)| (k, c.norm_sqr())).collect()
}

/// Share of `sum |f_k|^2` carried by `|k| > M/3`; zero for the zero field.
pub fn tail_fraction(f: &SpectralField) -> f64 {
    let cut = f.band().size() as f64 / 3.0;
    let (mut tail, mut total) = (0.0, 0.0);
    for (k, c) in f.iter() {
        let e = c.norm_sqr();
        total += e;
        if (k.abs() as f64) > cut {
            tail += e;
        }
    }
    if total > 0.0 {
        tail / total
    } else {
        0.0
    }
}
