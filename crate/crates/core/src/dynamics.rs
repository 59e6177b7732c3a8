//! Right-hand sides of the full Galerkin systems and their t-model closures.
//!
//! Burgers: `u_t + u u_x = 0`, with `B[u, U] = d/dx (u U / 2)`.
//! Critical focusing NLS: `i u_t + u_xx + |u|^4 u = 0`.
//!
//! The t-model evolves `v` on the resolved modes `F` only. Its memory term is
//! built from the flux field `Gamma`, the part of the nonlinear term of `v`
//! that lands in `G`, and is multiplied by the memory clock `tau`. Along a
//! t-model trajectory `d/dt (1/2)||v||^2 = -tau ||Gamma||^2`; that rate is the
//! refinement monitor.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{ModeBand, Part, Partition, SpectralField};
use crate::transform::{from_grid, padded_len, quintic_product, to_grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Equation {
    Burgers,
    #[serde(alias = "nls")]
    CriticalNls,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    FullGalerkin,
    TModel,
}

/// Extent of `G` used for the NLS flux field.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GammaSupport {
    /// `G` is the full band minus `F`; quintic content beyond the band is dropped.
    #[default]
    Truncated,
    /// `G` reaches every wavenumber the quintic of `v` can produce (band `5N`).
    Extended,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub equation: Equation,
    pub closure: Closure,
    /// For a full-Galerkin model the partition's band is the state band and
    /// the split is only used by monitors and diagnostics.
    pub partition: Partition,
    #[serde(default)]
    pub gamma_support: GammaSupport,
}

/// A right-hand side evaluation together with the flux field it produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsEval {
    pub rhs: SpectralField,
    /// Zero for full-Galerkin models.
    pub gamma: SpectralField,
    /// `tau * ||gamma||^2`, zero for full-Galerkin models.
    pub flux: f64,
}

impl ModelSpec {
    pub fn full(equation: Equation, partition: Partition) -> Self {
        Self {
            equation,
            closure: Closure::FullGalerkin,
            partition,
            gamma_support: GammaSupport::Truncated,
        }
    }

    pub fn tmodel(equation: Equation, partition: Partition) -> Self {
        Self {
            equation,
            closure: Closure::TModel,
            partition,
            gamma_support: GammaSupport::Truncated,
        }
    }

    pub fn band(&self) -> ModeBand {
        self.partition.band()
    }

    /// Full right-hand side at memory clock `tau`.
    pub fn evaluate(&self, field: &SpectralField, tau: f64) -> Result<RhsEval> {
        match (self.equation, self.closure) {
            (Equation::Burgers, Closure::FullGalerkin) => burgers_full_rhs(field),
            (Equation::Burgers, Closure::TModel) => burgers_tmodel_rhs(field, &self.partition, tau),
            (Equation::CriticalNls, Closure::FullGalerkin) => nls_full_rhs(field),
            (Equation::CriticalNls, Closure::TModel) => {
                nls_tmodel_rhs(field, &self.partition, tau, self.gamma_support)
            }
        }
    }

    /// Right-hand side minus the diagonal linear part (see [`Self::linear_symbol`]).
    pub fn evaluate_nonlinear(&self, field: &SpectralField, tau: f64) -> Result<RhsEval> {
        match self.equation {
            Equation::Burgers => self.evaluate(field, tau),
            Equation::CriticalNls => {
                let mut eval = self.evaluate(field, tau)?;
                eval.rhs = eval.rhs.axpy(Complex64::new(-1.0, 0.0), &linear_part(field, self))?;
                Ok(eval)
            }
        }
    }

    /// Diagonal linear operator `L_k`: zero for Burgers, `-i k^2` for NLS.
    pub fn linear_symbol(&self, k: i64) -> Complex64 {
        match self.equation {
            Equation::Burgers => Complex64::new(0.0, 0.0),
            Equation::CriticalNls => Complex64::new(0.0, -((k * k) as f64)),
        }
    }

    /// Flux field of `field` regardless of closure.
    pub fn gamma(&self, field: &SpectralField) -> Result<SpectralField> {
        match self.equation {
            Equation::Burgers => burgers_gamma(field, &self.partition),
            Equation::CriticalNls => nls_gamma(field, &self.partition, self.gamma_support),
        }
    }
}

fn linear_part(field: &SpectralField, spec: &ModelSpec) -> SpectralField {
    field.map(|k, c| spec.linear_symbol(k) * c)
}

fn ensure_tau(tau: f64) -> Result<()> {
    if tau >= 0.0 {
        Ok(())
    } else {
        Err(Error::NegativeTau(tau))
    }
}

/// `B[a, b]_k = (ik/2) sum_{p+q=k} a_p b_q`, on the relaxed band.
pub fn burgers_b(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    let prod = crate::transform::conv2(a, b)?;
    Ok(prod.map(|k, c| c * Complex64::new(0.0, k as f64 / 2.0)))
}

/// Quadratic product `a b` on the grid, returned as coefficients on `band` (relaxed).
fn quadratic(ga: &[Complex64], gb: &[Complex64], band: ModeBand) -> SpectralField {
    from_grid(ga.iter().zip(gb).map(|(x, y)| x * y).collect(), band.relaxed())
}

pub fn burgers_full_rhs(u: &SpectralField) -> Result<RhsEval> {
    let band = u.band();
    let b = burgers_b(u, u)?;
    Ok(RhsEval {
        rhs: b.scale_re(-1.0).with_band(band.strict())?,
        gamma: SpectralField::zeros(band.relaxed()),
        flux: 0.0,
    })
}

/// `Gamma = -(I - P) B[v, v]`.
pub fn burgers_gamma(v: &SpectralField, p: &Partition) -> Result<SpectralField> {
    v.ensure_resolved_support(p)?;
    Ok(burgers_b(v, v)?.project(p, Part::Unresolved)?.scale_re(-1.0))
}

/// `v_t = -P B[v, v] - tau P (B[v, Gamma] + B[Gamma, v])`.
pub fn burgers_tmodel_rhs(v: &SpectralField, p: &Partition, tau: f64) -> Result<RhsEval> {
    ensure_tau(tau)?;
    let band = p.band();
    band.ensure_same_size(&v.band())?;
    v.ensure_resolved_support(p)?;

    let len = padded_len(band.size(), 2);
    let gv = to_grid(v, len);
    let vv = quadratic(&gv, &gv, band);
    // B[v, v]
    let bvv = vv.map(|k, c| c * Complex64::new(0.0, k as f64 / 2.0));
    let gamma = bvv.project(p, Part::Unresolved)?.scale_re(-1.0);
    let markov = bvv.project(p, Part::Resolved)?.scale_re(-1.0);

    let rhs = if tau > 0.0 {
        // B[v, G] + B[G, v] = d/dx (v Gamma)
        let gg = to_grid(&gamma, len);
        let memory = quadratic(&gv, &gg, band)
            .derivative()
            .project(p, Part::Resolved)?
            .scale_re(-tau);
        &markov + &memory
    } else {
        markov
    };
    let flux = tau * gamma.l2_norm_sq();
    Ok(RhsEval {
        rhs: rhs.with_band(band.strict())?,
        gamma,
        flux,
    })
}

/// `rhs_k = -i k^2 u_k + i sum u u* u u* u`.
pub fn nls_full_rhs(u: &SpectralField) -> Result<RhsEval> {
    let band = u.band();
    let quintic = crate::transform::conv5([u; 5])?;
    let i = Complex64::new(0.0, 1.0);
    let rhs = SpectralField::from_fn(band.strict(), |k| {
        Complex64::new(0.0, -((k * k) as f64)) * u.get(k) + i * quintic.get(k)
    });
    Ok(RhsEval {
        rhs,
        gamma: SpectralField::zeros(band.relaxed()),
        flux: 0.0,
    })
}

/// Band on which the NLS flux field lives.
fn nls_gamma_band(p: &Partition, support: GammaSupport) -> Result<ModeBand> {
    Ok(match support {
        GammaSupport::Truncated => p.band().relaxed(),
        GammaSupport::Extended => ModeBand::with_policy(5 * p.n(), false)?,
    })
}

/// `Gamma = i (I - P) B[v, v, v, v, v]` on the chosen extent of `G`.
pub fn nls_gamma(v: &SpectralField, p: &Partition, support: GammaSupport) -> Result<SpectralField> {
    p.band().ensure_same_size(&v.band())?;
    v.ensure_resolved_support(p)?;
    let work = nls_gamma_band(p, support)?;
    let wide = v.prolong(work)?;
    let g = to_grid(&wide, padded_len(work.size(), 5));
    let q = from_grid(quintic_product(&[g.clone(), g.clone(), g.clone(), g.clone(), g]), work);
    let i = Complex64::new(0.0, 1.0);
    Ok(q.map(|k, c| if p.in_resolved(k) { Complex64::new(0.0, 0.0) } else { i * c }))
}

/// `v_t = i v_xx + i P B[v,v,v,v,v] + 3 i tau P B[Gamma,v,v,v,v] + 2 i tau P B[v,Gamma,v,v,v]`.
pub fn nls_tmodel_rhs(v: &SpectralField, p: &Partition, tau: f64, support: GammaSupport) -> Result<RhsEval> {
    ensure_tau(tau)?;
    let band = p.band();
    band.ensure_same_size(&v.band())?;
    v.ensure_resolved_support(p)?;

    let work = nls_gamma_band(p, support)?;
    let len = padded_len(work.size(), 5);
    let wide = v.prolong(work)?;
    let gv = to_grid(&wide, len);
    let i = Complex64::new(0.0, 1.0);

    let modsq: Vec<f64> = gv.iter().map(|z| z.norm_sqr()).collect();
    let quintic = from_grid(
        gv.iter().zip(&modsq).map(|(z, m)| z * (m * m)).collect(),
        work,
    );
    let gamma = quintic.map(|k, c| if p.in_resolved(k) { Complex64::new(0.0, 0.0) } else { i * c });

    let nonlinear = if tau > 0.0 {
        let gg = to_grid(&gamma, len);
        // i |v|^4 v + 3 i tau Gamma |v|^4 + 2 i tau conj(Gamma) v^2 |v|^2
        let mixed = gv
            .iter()
            .zip(&gg)
            .zip(&modsq)
            .map(|((z, g), m)| 3.0 * tau * g * (m * m) + 2.0 * tau * g.conj() * z * z * m)
            .collect();
        let memory = from_grid(mixed, work);
        &quintic + &memory
    } else {
        quintic
    };

    let rhs = SpectralField::from_fn(band.strict(), |k| {
        if p.in_resolved(k) {
            Complex64::new(0.0, -((k * k) as f64)) * v.get(k) + i * nonlinear.get(k)
        } else {
            Complex64::new(0.0, 0.0)
        }
    });
    let flux = tau * gamma.l2_norm_sq();
    Ok(RhsEval { rhs, gamma, flux })
}

/// `tau ||Gamma(v)||^2`: minus the rate of change of `(1/2)||v||^2` under the t-model.
pub fn flux_of(v: &SpectralField, tau: f64, spec: &ModelSpec) -> Result<f64> {
    ensure_tau(tau)?;
    if tau == 0.0 {
        return Ok(0.0);
    }
    Ok(tau * spec.gamma(v)?.l2_norm_sq())
}
