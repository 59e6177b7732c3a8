//! Grid transforms and alias-free truncated convolutions.
//!
//! `to_grid` evaluates `f(x_j) = sum_k f_k e^{i k x_j}` at `x_j = 2 pi j / L`;
//! `from_grid` recovers the band's coefficients from `L` samples. When every
//! product formed on the grid is band-limited to `|k| < L - M/2`, the
//! recovered coefficients equal the exact truncated convolution sums.

use std::cell::RefCell;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::spectral::{ModeBand, SpectralField};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn inverse_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

fn forward_plan(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

/// Grid length for products of `degree` band-limited factors on a band of size `m`:
/// at least `(degree + 1) M / 2`, rounded up to a power of two.
pub fn padded_len(m: usize, degree: usize) -> usize {
    ((degree + 1) * m).div_ceil(2).next_power_of_two()
}

/// Samples `f` on `len` equispaced points. `len` must be at least the band size.
pub fn to_grid(f: &SpectralField, len: usize) -> Vec<Complex64> {
    assert!(len >= f.band().size(), "grid shorter than band");
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    for (k, c) in f.iter() {
        buf[k.rem_euclid(len as i64) as usize] = c;
    }
    inverse_plan(len).process(&mut buf);
    buf
}

/// Coefficients on `band` of the trigonometric interpolant of `values`.
pub fn from_grid(mut values: Vec<Complex64>, band: ModeBand) -> SpectralField {
    let len = values.len();
    assert!(len >= band.size(), "grid shorter than band");
    forward_plan(len).process(&mut values);
    let scale = 1.0 / len as f64;
    SpectralField::from_fn(band, |k| values[k.rem_euclid(len as i64) as usize] * scale)
}

/// `result_k = sum_{p+q=k} a_p b_q`, truncated to the band.
///
/// The output lives on the relaxed band (the Nyquist entry is kept).
pub fn conv2(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    a.band().ensure_same_size(&b.band())?;
    let len = padded_len(a.band().size(), 2);
    let ga = to_grid(a, len);
    let gb = to_grid(b, len);
    let prod = ga.iter().zip(&gb).map(|(x, y)| x * y).collect();
    Ok(from_grid(prod, a.band().relaxed()))
}

/// `result_k = sum_{k1-k2+k3-k4+k5=k} z1_{k1} conj(z2_{k2}) z3_{k3} conj(z4_{k4}) z5_{k5}`,
/// truncated to the band. The output lives on the relaxed band.
pub fn conv5(z: [&SpectralField; 5]) -> Result<SpectralField> {
    let band = z[0].band();
    for f in &z[1..] {
        band.ensure_same_size(&f.band())?;
    }
    let len = padded_len(band.size(), 5);
    let grids: Vec<Vec<Complex64>> = z.iter().map(|f| to_grid(f, len)).collect();
    Ok(from_grid(quintic_product(&grids), band.relaxed()))
}

/// Pointwise `g1 conj(g2) g3 conj(g4) g5`.
pub(crate) fn quintic_product(g: &[Vec<Complex64>]) -> Vec<Complex64> {
    (0..g[0].len())
        .map(|j| g[0][j] * g[1][j].conj() * g[2][j] * g[3][j].conj() * g[4][j])
        .collect()
}
