//! Literal nested-summation evaluations, used to check the FFT paths.
//!
//! Everything here is deliberately naive: loops over index tuples with the
//! constraint solved for the last index. Cost is `O(M^3)` for the quadratic
//! sum and `O(M^5)` for the quintic one, hence the size guard.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::spectral::{ModeBand, Partition, SpectralField};

/// Largest band the oracle accepts unless told otherwise.
pub const DEFAULT_GUARD: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvKind {
    Quadratic,
    Quintic,
}

/// Direct-summation counterpart of [`crate::transform::conv2`] / [`crate::transform::conv5`].
///
/// `fields` holds two fields for the quadratic sum and five for the quintic one.
pub fn direct_conv_oracle(kind: ConvKind, fields: &[&SpectralField], guard: usize) -> Result<SpectralField> {
    let need = match kind {
        ConvKind::Quadratic => 2,
        ConvKind::Quintic => 5,
    };
    if fields.len() != need {
        return Err(Error::InvalidInput(format!(
            "{kind:?} oracle needs {need} fields, got {}",
            fields.len()
        )));
    }
    let band = fields[0].band();
    for f in &fields[1..] {
        band.ensure_same_size(&f.band())?;
    }
    if band.size() > guard {
        return Err(Error::BandTooLarge { m: band.size(), limit: guard });
    }
    let out = match kind {
        ConvKind::Quadratic => quadratic_sum(fields[0], fields[1], band, Execution::default()),
        ConvKind::Quintic => {
            let z = [fields[0], fields[1], fields[2], fields[3], fields[4]];
            quintic_sum(z, band, |_| true, Execution::default())
        }
    };
    Ok(SpectralField::from_raw(band.relaxed(), out))
}

fn quadratic_sum(a: &SpectralField, b: &SpectralField, band: ModeBand, exec: Execution) -> Vec<Complex64> {
    exec.map(band.size(), |i| {
        let k = band.wavenumber(i);
        let mut s = Complex64::new(0.0, 0.0);
        for p in band.wavenumbers() {
            let q = k - p;
            if band.contains(q) {
                s += a.get(p) * b.get(q);
            }
        }
        s
    })
}

/// Quintic sum for every output in `band`, with `k1..k5` restricted to wavenumbers
/// where `allowed` holds (and to each field's own band).
fn quintic_sum(
    z: [&SpectralField; 5],
    band: ModeBand,
    allowed: impl Fn(i64) -> bool + Sync,
    exec: Execution,
) -> Vec<Complex64> {
    let ks: Vec<i64> = band.wavenumbers().filter(|&k| allowed(k)).collect();
    exec.map(band.size(), |i| {
        let k = band.wavenumber(i);
        let mut s = Complex64::new(0.0, 0.0);
        for &k1 in &ks {
            let a1 = z[0].get(k1);
            for &k2 in &ks {
                let a2 = a1 * z[1].get(k2).conj();
                for &k3 in &ks {
                    let a3 = a2 * z[2].get(k3);
                    for &k4 in &ks {
                        let k5 = k - k1 + k2 - k3 + k4;
                        if band.contains(k5) && allowed(k5) {
                            s += a3 * z[3].get(k4).conj() * z[4].get(k5);
                        }
                    }
                }
            }
        }
        s
    })
}

/// Burgers t-model right-hand side evaluated mode by mode from the Fourier form:
/// a Markov sum over `F` plus `tau` times the two memory sums, whose inner
/// sums `-(iq/2) sum_{r+s=q} v_r v_s` are taken over `r, s` in `F` for `q` in `G`.
pub fn burgers_tmodel_fourier(v: &SpectralField, p: &Partition, tau: f64) -> Result<SpectralField> {
    let band = p.band();
    band.ensure_same_size(&v.band())?;
    if band.size() > DEFAULT_GUARD * 4 {
        return Err(Error::BandTooLarge { m: band.size(), limit: DEFAULT_GUARD * 4 });
    }
    let f: Vec<i64> = p.resolved().collect();
    let half_ik = |k: i64| Complex64::new(0.0, -(k as f64) / 2.0);

    // inner(q) = -(iq/2) sum_{r+s=q, r,s in F} v_r v_s, for q in G
    let inner = |q: i64| -> Complex64 {
        let mut s = Complex64::new(0.0, 0.0);
        for &r in &f {
            if p.in_resolved(q - r) {
                s += v.get(r) * v.get(q - r);
            }
        }
        half_ik(q) * s
    };
    let g: Vec<(i64, Complex64)> = p.unresolved().map(|q| (q, inner(q))).collect();

    Ok(SpectralField::from_fn(band, |k| {
        if !p.in_resolved(k) {
            return Complex64::new(0.0, 0.0);
        }
        let mut markov = Complex64::new(0.0, 0.0);
        for &pp in &f {
            if p.in_resolved(k - pp) {
                markov += v.get(pp) * v.get(k - pp);
            }
        }
        let mut first = Complex64::new(0.0, 0.0);
        let mut second = Complex64::new(0.0, 0.0);
        for &(q, rq) in &g {
            let pp = k - q;
            if p.in_resolved(pp) {
                // p in F, q in G
                first += v.get(pp) * rq;
                // p in G (the index q here), partner in F
                second += rq * v.get(pp);
            }
        }
        half_ik(k) * markov + tau * (half_ik(k) * first + half_ik(k) * second)
    }))
}

/// NLS t-model right-hand side from the Fourier form: `-ik^2 v_k`, the Markov
/// quintic sum over `F`, and `tau` times the `3i` (unconjugated slot in `G`)
/// and `2i` (conjugated slot in `G`) memory sums with
/// `R_q = i sum_{F^5} v v* v v* v` for `q` in `G`.
///
/// `gamma_band` sets the extent of `G`: the partition's band for the
/// truncated flux field, a wider band for the extended one.
pub fn nls_tmodel_fourier(
    v: &SpectralField,
    p: &Partition,
    tau: f64,
    gamma_band: ModeBand,
) -> Result<SpectralField> {
    let band = p.band();
    band.ensure_same_size(&v.band())?;
    if band.size() > 32 {
        return Err(Error::BandTooLarge { m: band.size(), limit: 32 });
    }
    let i = Complex64::new(0.0, 1.0);
    let f: Vec<i64> = p.resolved().collect();
    let in_f = |k: i64| p.in_resolved(k);

    // R on G: quintic of v over F^5, landing outside F but inside gamma_band.
    let wide = v.prolong(gamma_band.relaxed())?;
    let r_full = quintic_sum([&wide; 5], gamma_band, in_f, Execution::default());
    let r = SpectralField::from_fn(gamma_band.relaxed(), |k| {
        if in_f(k) {
            Complex64::new(0.0, 0.0)
        } else {
            i * r_full[gamma_band.index(k).unwrap()]
        }
    });

    Ok(SpectralField::from_fn(band, |k| {
        if !in_f(k) {
            return Complex64::new(0.0, 0.0);
        }
        let linear = -i * (k * k) as f64 * v.get(k);
        let mut markov = Complex64::new(0.0, 0.0);
        let mut three = Complex64::new(0.0, 0.0);
        let mut two = Complex64::new(0.0, 0.0);
        for &a in &f {
            for &b in &f {
                for &c in &f {
                    for &d in &f {
                        // markov: k1..k4 = a..d, k5 solved
                        let k5 = k - a + b - c + d;
                        if in_f(k5) {
                            markov += v.get(a) * v.get(b).conj() * v.get(c) * v.get(d).conj() * v.get(k5);
                        }
                        // 3i term: k2..k5 = a..d in F, k1 in G
                        let k1 = k + a - b + c - d;
                        if !in_f(k1) && gamma_band.contains(k1) {
                            three += r.get(k1) * v.get(a).conj() * v.get(b) * v.get(c).conj() * v.get(d);
                        }
                        // 2i term: k1 = a, k3..k5 = b..d in F, k2 in G
                        let k2 = a + b - c + d - k;
                        if !in_f(k2) && gamma_band.contains(k2) {
                            two += v.get(a) * r.get(k2).conj() * v.get(b) * v.get(c).conj() * v.get(d);
                        }
                    }
                }
            }
        }
        linear + i * markov + tau * (3.0 * i * three + 2.0 * i * two)
    }))
}
