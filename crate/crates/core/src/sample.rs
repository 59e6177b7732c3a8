//! Seeded random fields for property runs and validation batches.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::spectral::{ModeBand, Partition, SpectralField};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn normal_ish<R: Rng>(rng: &mut R) -> f64 {
    rng.gen_range(-1.0..1.0)
}

/// Complex coefficients uniform in the unit square on every allowed mode.
pub fn random_field<R: Rng>(band: ModeBand, rng: &mut R) -> SpectralField {
    SpectralField::from_fn(band, |_| Complex64::new(normal_ish(rng), normal_ish(rng)))
}

/// Complex field supported on `F`, coefficients scaled by `amplitude`.
pub fn random_resolved<R: Rng>(p: &Partition, amplitude: f64, rng: &mut R) -> SpectralField {
    SpectralField::from_fn(p.band(), |k| {
        if p.in_resolved(k) {
            Complex64::new(normal_ish(rng), normal_ish(rng)) * amplitude
        } else {
            Complex64::new(0.0, 0.0)
        }
    })
}

/// Real (Hermitian) field with modes `|k| <= k_max`.
pub fn random_real<R: Rng>(band: ModeBand, k_max: i64, amplitude: f64, rng: &mut R) -> SpectralField {
    let k_max = k_max.min(band.k_max());
    let pos: Vec<Complex64> = (0..=k_max)
        .map(|k| {
            if k == 0 {
                Complex64::new(normal_ish(rng), 0.0)
            } else {
                Complex64::new(normal_ish(rng), normal_ish(rng))
            }
        })
        .collect();
    SpectralField::from_fn(band, |k| {
        if k.abs() > k_max {
            Complex64::new(0.0, 0.0)
        } else if k >= 0 {
            pos[k as usize] * amplitude
        } else {
            pos[(-k) as usize].conj() * amplitude
        }
    })
}

/// Real field supported on `F` (the unpaired mode `-N/2` stays zero).
pub fn random_real_resolved<R: Rng>(p: &Partition, amplitude: f64, rng: &mut R) -> SpectralField {
    random_real(p.band(), p.resolved_max(), amplitude, rng)
}
