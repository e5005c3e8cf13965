//! Discrete Fourier spectra of step sequences, Riesz products and near-origin envelopes.
//!
//! Frequencies are angular frequencies per step, `Ω_k = 2πk/N`. Rescaling by the drive
//! speed λ is left to callers.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::drives::StepSequence;
use crate::error::{Error, Result};
use crate::fit::{fit_line, separable_fit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    OneOverN,
    Unnormalized,
}

/// Spectrum over the bins `k = 1..N-1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub value: Vec<Complex64>,
    pub normalization: Normalization,
    pub n: usize,
}

impl Spectrum {
    pub fn len(&self) -> usize {
        self.omega.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega.is_empty()
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        self.value.iter().map(|v| v.norm()).collect()
    }
}

/// `f(Ω_k) = (1/N) Σ_m s̃_m e^{-iΩ_k m}` for a sequence.
pub fn dft(seq: &StepSequence, subtract_mean: bool) -> Result<Spectrum> {
    dft_real(&seq.to_f64(), subtract_mean)
}

/// Same transform for an arbitrary real series.
pub fn dft_real(x: &[f64], subtract_mean: bool) -> Result<Spectrum> {
    let n = x.len();
    if n < 2 {
        return Err(Error::Parameter(format!("dft needs at least 2 samples, got {n}")));
    }
    let mean = if subtract_mean { x.iter().sum::<f64>() / n as f64 } else { 0.0 };
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v - mean, 0.0)).collect();
    if n.is_power_of_two() {
        FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    } else {
        buf = direct_dft(&buf);
    }
    let scale = 1.0 / n as f64;
    Ok(Spectrum {
        omega: (1..n).map(|k| TAU * k as f64 / n as f64).collect(),
        value: buf[1..].iter().map(|v| v * scale).collect(),
        normalization: Normalization::OneOverN,
        n,
    })
}

fn direct_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    // Twiddle table indexed by (k·m) mod n keeps the phases exact for long inputs.
    let tw: Vec<Complex64> = (0..n).map(|j| Complex64::from_polar(1.0, -TAU * j as f64 / n as f64)).collect();
    (0..n)
        .map(|k| {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut idx = 0usize;
            for v in x {
                acc += v * tw[idx];
                idx += k;
                if idx >= n {
                    idx -= n;
                }
            }
            acc
        })
        .collect()
}

/// Unnormalized Thue-Morse spectrum `∏_{j<r} (1 − e^{−i 2^j Ω})`.
///
/// The sign of the exponent matches the forward transform in [`dft`], so
/// `N·dft(thue_morse_word(r))` reproduces this product on the grid.
pub fn riesz_product(r: u32, omega: f64) -> Complex64 {
    (0..r).fold(Complex64::new(1.0, 0.0), |acc, j| {
        let phase = ((1u64 << j) as f64 * omega).rem_euclid(TAU);
        acc * (Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -phase))
    })
}

/// [`riesz_product`] at the grid frequency `Ω = 2πk/n`, with `2^j k mod n`
/// reduced in integers so the phases carry no amplified rounding error.
pub fn riesz_product_on_grid(r: u32, k: u64, n: u64) -> Complex64 {
    let mut phase_index = k % n.max(1);
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..r {
        let phase = TAU * phase_index as f64 / n as f64;
        acc *= Complex64::new(1.0, 0.0) - Complex64::from_polar(1.0, -phase);
        phase_index = (phase_index * 2) % n;
    }
    acc
}

/// `2^{r(r−1)/2} |Ω|^r`, an upper bound on `|riesz_product(r, Ω)|`.
pub fn riesz_bound(r: u32, omega: f64) -> f64 {
    let r = f64::from(r);
    (r * (r - 1.0) / 2.0 * std::f64::consts::LN_2 + r * omega.abs().ln()).exp()
}

/// Log-binned median envelope of `|f(Ω)|` near the origin.
#[derive(Debug, Clone, PartialEq)]
pub struct Envelope {
    /// `(bin centre, median magnitude)` for each non-empty bin.
    pub points: Vec<(f64, f64)>,
    pub omega_max: f64,
    pub bins: usize,
    pub edges: Vec<f64>,
}

impl Envelope {
    /// Drops the lowest `fraction` of points and any point whose magnitude is at or below `floor`.
    pub fn trimmed(&self, fraction: f64, floor: f64) -> Envelope {
        let skip = (self.points.len() as f64 * fraction) as usize;
        Envelope {
            points: self.points.iter().skip(skip).copied().filter(|p| p.1 > floor).collect(),
            ..self.clone()
        }
    }
}

/// Default upper edge of the envelope window.
pub const DEFAULT_OMEGA_MAX: f64 = PI / 8.0;
/// Default envelope resolution.
pub const DEFAULT_BINS_PER_DECADE: f64 = 24.0;
/// Fraction of low-frequency bins dropped for random-signed drives.
pub const RANDOM_SIGN_TRIM: f64 = 0.1;

/// Number of bins giving `per_decade` bins per decade between the lowest grid frequency and `omega_max`.
pub fn bins_for_resolution(spec: &Spectrum, omega_max: f64, per_decade: f64) -> usize {
    let lo = spec.omega.first().copied().unwrap_or(omega_max);
    ((omega_max / lo).log10() * per_decade).ceil().max(4.0) as usize
}

fn median(v: &mut [f64]) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Medians of `|f|` in `bins` log-spaced bins between the lowest frequency and `omega_max`.
pub fn binned_median_envelope(spec: &Spectrum, omega_max: f64, bins: usize) -> Result<Envelope> {
    if !(omega_max > 0.0 && omega_max <= PI) {
        return Err(Error::Parameter(format!("omega_max must lie in (0, pi], got {omega_max}")));
    }
    if bins < 4 {
        return Err(Error::Parameter(format!("need at least 4 bins, got {bins}")));
    }
    let sel: Vec<(f64, f64)> = spec
        .omega
        .iter()
        .zip(&spec.value)
        .filter(|(w, _)| **w > 0.0 && **w <= omega_max)
        .map(|(w, v)| (*w, v.norm()))
        .collect();
    let lo = sel.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    if sel.is_empty() {
        return Err(Error::EmptyEnvelope { omega_max });
    }
    let hi = omega_max * (1.0 + 1e-12);
    let ratio = (hi / lo).ln();
    let edges: Vec<f64> = (0..=bins).map(|i| lo * (ratio * i as f64 / bins as f64).exp()).collect();
    let mut buckets: Vec<Vec<f64>> = vec![Vec::new(); bins];
    for (w, m) in sel {
        let i = if ratio > 0.0 { ((w / lo).ln() / ratio * bins as f64) as usize } else { 0 };
        buckets[i.min(bins - 1)].push(m);
    }
    let points = buckets
        .iter_mut()
        .enumerate()
        .filter(|(_, b)| !b.is_empty())
        .map(|(i, b)| ((edges[i] * edges[i + 1]).sqrt(), median(b)))
        .collect();
    Ok(Envelope { points, omega_max, bins, edges })
}

/// Log-log power-law fit `M ≈ e^{intercept} Ω^{slope}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLawFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

fn log_points(env: &Envelope) -> (Vec<f64>, Vec<f64>) {
    env.points.iter().filter(|p| p.1 > 0.0 && p.0 > 0.0).map(|p| (p.0.ln(), p.1.ln())).unzip()
}

pub fn fit_power_law(env: &Envelope) -> Result<PowerLawFit> {
    let (x, y) = log_points(env);
    if x.len() < 3 {
        return Err(Error::Fit(format!("power-law fit needs 3 positive points, got {}", x.len())));
    }
    let f = fit_line(&x, &y)?;
    Ok(PowerLawFit { slope: f.slope, intercept: f.intercept, rms_residual: f.rms_residual })
}

/// Functional forms used to classify near-origin suppression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassForm {
    /// `ln M = c + b ln Ω`
    Poly,
    /// `ln M = c − β |ln Ω|^b`, `b > 1`
    Quasipoly,
    /// `ln M = c − β Ω^{−b}`, `b > 0`
    StretchExpt,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassFit {
    pub b_hat: f64,
    pub rms_residual: f64,
    pub at_boundary: bool,
}

/// Search bracket for the exponent in [`fit_suppression_class`].
pub const CLASS_B_MAX: f64 = 8.0;

pub fn fit_suppression_class(env: &Envelope, form: ClassForm) -> Result<ClassFit> {
    let (x, y) = log_points(env);
    if x.len() < 4 {
        return Err(Error::Fit(format!("class fit needs 4 positive points, got {}", x.len())));
    }
    match form {
        ClassForm::Poly => {
            let f = fit_line(&x, &y)?;
            Ok(ClassFit { b_hat: f.slope, rms_residual: f.rms_residual, at_boundary: false })
        }
        ClassForm::Quasipoly => {
            let f = separable_fit(&x, &y, |b, lw| vec![1.0, -lw.abs().powf(b)], 1.0 + 1e-4, CLASS_B_MAX)?;
            Ok(ClassFit { b_hat: f.beta, rms_residual: f.rms_residual, at_boundary: f.at_boundary })
        }
        ClassForm::StretchExpt => {
            let f = separable_fit(&x, &y, |b, lw| vec![1.0, -(-b * lw).exp()], 1e-3, CLASS_B_MAX)?;
            Ok(ClassFit { b_hat: f.beta, rms_residual: f.rms_residual, at_boundary: f.at_boundary })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drives::{fibonacci_word, thue_morse_word, StepSequence};

    fn env_from(points: Vec<(f64, f64)>) -> Envelope {
        Envelope { points, omega_max: 1.0, bins: 0, edges: vec![] }
    }

    fn spectrum_from(entries: &[(f64, f64)]) -> Spectrum {
        Spectrum {
            omega: entries.iter().map(|e| e.0).collect(),
            value: entries.iter().map(|e| Complex64::new(e.1, 0.0)).collect(),
            normalization: Normalization::OneOverN,
            n: 0,
        }
    }

    #[test]
    fn dft_examples() {
        let s = StepSequence::custom(&[1, -1], 1.0).unwrap();
        let f = dft(&s, false).unwrap();
        assert_eq!(f.len(), 1);
        assert!((f.omega[0] - PI).abs() < 1e-15);
        assert!((f.value[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);

        let c = StepSequence::custom(&[1, 1, 1, 1], 1.0).unwrap();
        assert!(dft(&c, true).unwrap().value.iter().all(|v| v.norm() == 0.0));

        assert!(dft(&StepSequence::custom(&[1], 1.0).unwrap(), false).is_err());
    }

    #[test]
    fn fft_and_direct_agree() {
        let x: Vec<f64> = thue_morse_word(6).unwrap().to_f64();
        let fast = dft_real(&x, true).unwrap();
        let buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        let slow = direct_dft(&buf);
        for (k, v) in fast.value.iter().enumerate() {
            assert!((v * 64.0 - slow[k + 1]).norm() < 1e-10);
        }
    }

    #[test]
    fn parseval_on_fibonacci() {
        let s = fibonacci_word(14).unwrap();
        let f = dft(&s, true).unwrap();
        let mean = s.mean();
        let energy: f64 = s.to_f64().iter().map(|v| (v - mean).powi(2)).sum();
        let spec: f64 = f.value.iter().map(|v| v.norm_sqr()).sum::<f64>() * f.n as f64;
        assert!(((energy - spec) / energy).abs() < 1e-9);
    }

    #[test]
    fn riesz_examples() {
        assert!((riesz_product(1, PI) - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        assert!(riesz_product(2, PI).norm() < 1e-15);
        assert!(riesz_product(1, 0.0).norm() == 0.0);
        assert!((riesz_bound(1, 0.1) - 0.1).abs() < 1e-15);
        assert!((riesz_bound(3, 0.1) - 0.008).abs() < 1e-15);
        assert!((riesz_bound(2, 1.0) - 2.0).abs() < 1e-14);
    }

    #[test]
    fn envelope_examples() {
        let e = binned_median_envelope(&spectrum_from(&[(0.1, 0.5)]), 1.0, 4).unwrap();
        assert_eq!(e.points.len(), 1);
        assert_eq!(e.points[0].1, 0.5);

        let e = binned_median_envelope(&spectrum_from(&[(0.1, 1.0), (0.11, 3.0), (0.9, 7.0)]), 1.0, 4).unwrap();
        assert_eq!(e.points[0].1, 2.0);
        // centres are geometric means of the edges
        assert!((e.points[0].0 - (e.edges[0] * e.edges[1]).sqrt()).abs() < 1e-15);

        assert!(matches!(
            binned_median_envelope(&spectrum_from(&[(2.0, 1.0)]), 1.0, 4),
            Err(Error::EmptyEnvelope { .. })
        ));
        assert!(binned_median_envelope(&spectrum_from(&[(0.1, 1.0)]), 1.0, 3).is_err());
    }

    #[test]
    fn power_law_examples() {
        let w: Vec<f64> = (1..20).map(|i| 0.01 * i as f64).collect();
        let f = fit_power_law(&env_from(w.iter().map(|&x| (x, x * x)).collect())).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12 && f.rms_residual < 1e-12);
        let f = fit_power_law(&env_from(w.iter().map(|&x| (x, 3.0 * x)).collect())).unwrap();
        assert!((f.slope - 1.0).abs() < 1e-12 && (f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit_power_law(&env_from(vec![(0.1, 1.0), (0.2, 0.0), (0.3, 1.0)])).is_err());
    }

    #[test]
    fn class_fit_recovers_synthetic_forms() {
        let w: Vec<f64> = (0..40).map(|i| 10f64.powf(-3.0 + 2.5 * i as f64 / 39.0)).collect();
        let qp = env_from(w.iter().map(|&x| (x, (-(1.0 / x).ln().powi(2)).exp())).collect());
        let f = fit_suppression_class(&qp, ClassForm::Quasipoly).unwrap();
        assert!((f.b_hat - 2.0).abs() < 0.05, "{f:?}");

        let w: Vec<f64> = (0..40).map(|i| 0.05 + 0.02 * i as f64).collect();
        let se = env_from(w.iter().map(|&x| (x, (-1.0 / x).exp())).collect());
        let f = fit_suppression_class(&se, ClassForm::StretchExpt).unwrap();
        assert!((f.b_hat - 1.0).abs() < 0.05, "{f:?}");
    }
}
