//! Wavenumber bands, the resolved/unresolved split and spectral fields.
//!
//! A field on a band of size `M` stores one complex coefficient per
//! wavenumber `k` in `[-M/2, M/2 - 1]`, indexed by `k + M/2`. This is the
//! only layout the rest of the crate sees; transform order is handled in
//! [`crate::transform`].

use std::f64::consts::PI;
use std::ops::{Add, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A symmetric-ish Fourier band `[-M/2, M/2 - 1]`.
///
/// With `zero_nyquist` set, the mode `k = -M/2` (which has no conjugate
/// partner inside the band) carries an exact zero in every field built on
/// this band. State bands always use that policy; intermediate products
/// such as convolution outputs and the unresolved flux field live on the
/// relaxed variant of the same band.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModeBand {
    m: usize,
    zero_nyquist: bool,
}

impl ModeBand {
    pub fn new(m: usize) -> Result<Self> {
        Self::with_policy(m, true)
    }

    pub fn with_policy(m: usize, zero_nyquist: bool) -> Result<Self> {
        if m < 4 {
            return Err(Error::InvalidBand(format!("M must be at least 4, got {m}")));
        }
        if !m.is_multiple_of(2) {
            return Err(Error::InvalidBand(format!("M must be even, got {m}")));
        }
        Ok(Self { m, zero_nyquist })
    }

    /// Same size, Nyquist policy off.
    pub fn relaxed(&self) -> Self {
        Self {
            m: self.m,
            zero_nyquist: false,
        }
    }

    /// Same size, Nyquist policy on.
    pub fn strict(&self) -> Self {
        Self {
            m: self.m,
            zero_nyquist: true,
        }
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn zero_nyquist(&self) -> bool {
        self.zero_nyquist
    }

    pub fn k_min(&self) -> i64 {
        -(self.m as i64 / 2)
    }

    pub fn k_max(&self) -> i64 {
        self.m as i64 / 2 - 1
    }

    pub fn nyquist(&self) -> i64 {
        self.k_min()
    }

    pub fn contains(&self, k: i64) -> bool {
        k >= self.k_min() && k <= self.k_max()
    }

    pub fn index(&self, k: i64) -> Option<usize> {
        self.contains(k).then(|| (k - self.k_min()) as usize)
    }

    pub fn wavenumber(&self, index: usize) -> i64 {
        index as i64 + self.k_min()
    }

    pub fn wavenumbers(&self) -> impl Iterator<Item = i64> + Clone {
        self.k_min()..=self.k_max()
    }

    /// Two bands are compatible when they index the same wavenumbers.
    pub fn ensure_same_size(&self, other: &ModeBand) -> Result<()> {
        if self.m == other.m {
            Ok(())
        } else {
            Err(Error::BandMismatch {
                expected: self.m,
                found: other.m,
            })
        }
    }
}

/// Which side of a [`Partition`] to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Part {
    /// Resolved modes `F = [-N/2, N/2 - 1]`.
    Resolved,
    /// Buffer modes `G`: the full band minus `F`.
    Unresolved,
}

/// Split of a band of size `M` into `F` (size `N = M/2`) and `G`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    band: ModeBand,
    n: usize,
}

impl Partition {
    pub fn new(band: ModeBand) -> Result<Self> {
        let n = band.size() / 2;
        if !n.is_multiple_of(2) {
            return Err(Error::InvalidBand(format!(
                "N = M/2 must be even, got M = {}",
                band.size()
            )));
        }
        Ok(Self { band, n })
    }

    pub fn for_resolved(n: usize) -> Result<Self> {
        Self::new(ModeBand::new(2 * n)?)
    }

    pub fn band(&self) -> ModeBand {
        self.band
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.band.size()
    }

    pub fn resolved_min(&self) -> i64 {
        -(self.n as i64 / 2)
    }

    pub fn resolved_max(&self) -> i64 {
        self.n as i64 / 2 - 1
    }

    pub fn in_resolved(&self, k: i64) -> bool {
        k >= self.resolved_min() && k <= self.resolved_max()
    }

    pub fn in_unresolved(&self, k: i64) -> bool {
        self.band.contains(k) && !self.in_resolved(k)
    }

    pub fn contains(&self, part: Part, k: i64) -> bool {
        match part {
            Part::Resolved => self.in_resolved(k),
            Part::Unresolved => self.in_unresolved(k),
        }
    }

    pub fn resolved(&self) -> impl Iterator<Item = i64> + Clone {
        self.resolved_min()..=self.resolved_max()
    }

    pub fn unresolved(&self) -> impl Iterator<Item = i64> + Clone + '_ {
        self.band.wavenumbers().filter(move |&k| !self.in_resolved(k))
    }
}

/// Complex Fourier coefficients `f_k` of `f(x) = sum_k f_k e^{ikx}` on `[0, 2pi)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralField {
    band: ModeBand,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    /// Validating constructor: length, finiteness and the Nyquist policy are checked.
    pub fn new(band: ModeBand, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != band.size() {
            return Err(Error::InvalidInput(format!(
                "expected {} coefficients, got {}",
                band.size(),
                coeffs.len()
            )));
        }
        if let Some(i) = coeffs.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::InvalidInput(format!(
                "non-finite coefficient at k = {}",
                band.wavenumber(i)
            )));
        }
        if band.zero_nyquist() && coeffs[0] != Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidInput(format!(
                "Nyquist mode k = {} must be zero",
                band.nyquist()
            )));
        }
        Ok(Self { band, coeffs })
    }

    /// Builds a field without validation, zeroing the Nyquist mode if the band asks for it.
    pub(crate) fn from_raw(band: ModeBand, mut coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), band.size());
        if band.zero_nyquist() {
            coeffs[0] = Complex64::new(0.0, 0.0);
        }
        Self { band, coeffs }
    }

    pub fn zeros(band: ModeBand) -> Self {
        Self {
            band,
            coeffs: vec![Complex64::new(0.0, 0.0); band.size()],
        }
    }

    pub fn from_fn(band: ModeBand, mut f: impl FnMut(i64) -> Complex64) -> Self {
        Self::from_raw(band, band.wavenumbers().map(&mut f).collect())
    }

    /// Field with the listed modes set (repeated wavenumbers accumulate).
    pub fn from_modes(band: ModeBand, modes: &[(i64, Complex64)]) -> Result<Self> {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); band.size()];
        for &(k, c) in modes {
            let i = band
                .index(k)
                .ok_or_else(|| Error::InvalidInput(format!("wavenumber {k} outside band M = {}", band.size())))?;
            coeffs[i] += c;
        }
        Self::new(band, coeffs)
    }

    pub fn single_mode(band: ModeBand, k: i64, c: Complex64) -> Result<Self> {
        Self::from_modes(band, &[(k, c)])
    }

    pub fn band(&self) -> ModeBand {
        self.band
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient at `k`, zero outside the band.
    pub fn get(&self, k: i64) -> Complex64 {
        self.band
            .index(k)
            .map_or(Complex64::new(0.0, 0.0), |i| self.coeffs[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.band.wavenumbers().zip(self.coeffs.iter().copied())
    }

    pub fn map(&self, mut f: impl FnMut(i64, Complex64) -> Complex64) -> Self {
        Self::from_raw(self.band, self.iter().map(|(k, c)| f(k, c)).collect())
    }

    /// Same coefficients re-labelled onto `band` (same size, possibly different policy).
    pub fn with_band(&self, band: ModeBand) -> Result<Self> {
        self.band.ensure_same_size(&band)?;
        Ok(Self::from_raw(band, self.coeffs.clone()))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map(|_, z| z * c)
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.map(|_, z| z * s)
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: Complex64, other: &SpectralField) -> Result<Self> {
        self.band.ensure_same_size(&other.band)?;
        Ok(Self::from_raw(
            self.band,
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + c * b)
                .collect(),
        ))
    }

    /// Spectral derivative: multiplies `f_k` by `ik`.
    pub fn derivative(&self) -> Self {
        self.map(|k, c| c * Complex64::new(0.0, k as f64))
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest deviation from `f_{-k} = conj(f_k)` over pairs inside the band.
    /// The Nyquist mode must vanish for a real field.
    pub fn hermitian_defect(&self) -> f64 {
        let mut worst = self.get(self.band.nyquist()).norm();
        for k in 1..=self.band.k_max() {
            worst = worst.max((self.get(-k) - self.get(k).conj()).norm());
        }
        worst.max(self.get(0).im.abs())
    }

    /// `2 pi sum_k |f_k|^2`.
    pub fn l2_norm_sq(&self) -> f64 {
        2.0 * PI * self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>()
    }

    /// `(f, g) = int conj(f) g dx = 2 pi sum_k conj(f_k) g_k`.
    pub fn inner(&self, other: &SpectralField) -> Result<Complex64> {
        self.band.ensure_same_size(&other.band)?;
        let s: Complex64 = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(s * (2.0 * PI))
    }

    /// Keeps the coefficients of one side of the partition.
    pub fn project(&self, p: &Partition, part: Part) -> Result<Self> {
        self.band.ensure_same_size(&p.band())?;
        Ok(self.map(|k, c| {
            if p.contains(part, k) {
                c
            } else {
                Complex64::new(0.0, 0.0)
            }
        }))
    }

    /// Largest coefficient outside `F`.
    pub fn unresolved_max(&self, p: &Partition) -> Result<f64> {
        self.band.ensure_same_size(&p.band())?;
        Ok(self
            .iter()
            .filter(|&(k, _)| !p.in_resolved(k))
            .map(|(_, c)| c.norm())
            .fold(0.0, f64::max))
    }

    pub fn ensure_resolved_support(&self, p: &Partition) -> Result<()> {
        let leak = self.unresolved_max(p)?;
        if leak > 0.0 {
            Err(Error::SupportViolation(leak))
        } else {
            Ok(())
        }
    }

    /// Zero-pads into a band at least as large. The new band's policy is used.
    pub fn prolong(&self, new_band: ModeBand) -> Result<Self> {
        if new_band.size() < self.band.size() {
            return Err(Error::ShrinkingBand {
                from: self.band.size(),
                to: new_band.size(),
            });
        }
        Ok(Self::from_fn(new_band, |k| self.get(k)))
    }

    /// Drops every mode outside a band no larger than this one.
    pub fn truncate(&self, new_band: ModeBand) -> Result<Self> {
        if new_band.size() > self.band.size() {
            return Err(Error::InvalidInput(format!(
                "cannot truncate M = {} to larger M = {}",
                self.band.size(),
                new_band.size()
            )));
        }
        Ok(Self::from_fn(new_band, |k| self.get(k)))
    }

    /// `max_k |f_k - g_k|`.
    pub fn max_diff(&self, other: &SpectralField) -> Result<f64> {
        self.band.ensure_same_size(&other.band)?;
        Ok(self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

impl Add for &SpectralField {
    type Output = SpectralField;

    /// Panics on band mismatch; use [`SpectralField::axpy`] for a checked sum.
    fn add(self, rhs: Self) -> SpectralField {
        self.axpy(Complex64::new(1.0, 0.0), rhs)
            .expect("band mismatch in field addition")
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: Self) -> SpectralField {
        self.axpy(Complex64::new(-1.0, 0.0), rhs)
            .expect("band mismatch in field subtraction")
    }
}
