//! Linear-response heating rates.
//!
//! The rate is `(g²/λ) ∫₀^∞ e^{−φ(Ω)} dΩ` with `φ(Ω) = Ω/J + 2p(Ω/λ)`, using
//! the Kubo spectral function `e^{−Ω/J}`. Everything is carried in log space
//! because the rates underflow long before the interesting λ range ends.

use std::f64::consts::TAU;

use crate::arithmetic::SuppressionClass;
use crate::error::{Error, Result};
use crate::fit::{fit_line, fit_offset_power, separable_fit};
use crate::quad::integrate;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeatingParams {
    pub class: SuppressionClass,
    pub j: f64,
    pub lambda: f64,
    pub g: f64,
}

impl HeatingParams {
    pub fn new(class: SuppressionClass, j: f64, lambda: f64, g: f64) -> Result<HeatingParams> {
        for (name, v) in [("J", j), ("lambda", lambda), ("g", g)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        class.validate()?;
        Ok(HeatingParams { class, j, lambda, g })
    }

    pub fn phi(&self, omega: f64) -> f64 {
        omega / self.j + 2.0 * self.class.p(omega / self.lambda)
    }

    /// Analytic `φ''(Ω)`.
    pub fn phi_second(&self, omega: f64) -> f64 {
        match self.class {
            SuppressionClass::Poly(b) => 2.0 * b / (omega * omega),
            SuppressionClass::StretchExpt(b) => 2.0 * b * (b + 1.0) * self.lambda.powf(b) * omega.powf(-b - 2.0),
            SuppressionClass::Quasipoly(b) => {
                let l = (self.lambda / omega).ln();
                if l <= 0.0 {
                    return 0.0;
                }
                2.0 * b / (omega * omega) * l.powf(b - 2.0) * ((b - 1.0) + l)
            }
        }
    }

    fn ln_prefactor(&self) -> f64 {
        2.0 * self.g.ln() - self.lambda.ln()
    }
}

/// Minimum of `φ`, with the curvature there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Saddle {
    pub omega0: f64,
    pub phi0: f64,
    pub phi2: f64,
}

const FIXED_POINT_MAX_ITER: usize = 10_000;

pub fn saddle_point(p: &HeatingParams) -> Result<Saddle> {
    let omega0 = match p.class {
        SuppressionClass::Poly(b) => {
            if b == 0.0 {
                return Ok(Saddle { omega0: 0.0, phi0: 0.0, phi2: 0.0 });
            }
            2.0 * b * p.j
        }
        SuppressionClass::StretchExpt(b) => (2.0 * b * p.j).powf(1.0 / (b + 1.0)) * p.lambda.powf(b / (b + 1.0)),
        SuppressionClass::Quasipoly(b) => {
            // Ω = 2bJ [ln(λ/Ω)]^{b−1}, damped fixed point
            let mut om = 2.0 * b * p.j;
            let mut converged = false;
            for _ in 0..FIXED_POINT_MAX_ITER {
                let l = (p.lambda / om).ln();
                if l < 1.0 {
                    return Err(Error::Solver(format!(
                        "quasipolynomial saddle requires lambda >= e*Omega0 (lambda = {}, Omega = {om})",
                        p.lambda
                    )));
                }
                let next = 0.5 * om + 0.5 * 2.0 * b * p.j * l.powf(b - 1.0);
                let done = ((next - om) / om).abs() < 1e-12;
                om = next;
                if done {
                    converged = true;
                    break;
                }
            }
            if !converged {
                return Err(Error::Solver("quasipolynomial saddle iteration did not converge".into()));
            }
            om
        }
    };
    Ok(Saddle { omega0, phi0: p.phi(omega0), phi2: p.phi_second(omega0) })
}

/// `ln ∫_{lo}^{hi} e^{−(φ(Ω)−shift)} dΩ` evaluated in `u = ln Ω` with extra break points.
pub fn ln_integral_exp_neg(
    phi: impl Fn(f64) -> f64,
    shift: f64,
    lo: f64,
    hi: f64,
    interior: &[f64],
    rel_tol: f64,
) -> Result<f64> {
    let mut breaks = vec![lo.ln()];
    let mut inner: Vec<f64> = interior.iter().copied().filter(|&w| w > lo && w < hi).map(f64::ln).collect();
    inner.sort_by(f64::total_cmp);
    breaks.extend(inner);
    breaks.push(hi.ln());
    let r = integrate(|u| (u - (phi(u.exp()) - shift)).exp(), &breaks, rel_tol, 4000)?;
    if !(r.value > 0.0) {
        return Err(Error::Quadrature { achieved: f64::NAN, requested: rel_tol });
    }
    Ok(r.value.ln())
}

/// Gaussian (Laplace) estimate `√(2π/φ'') e^{−φ0}` in log form.
pub fn ln_laplace_integral(phi0: f64, phi2: f64) -> Result<f64> {
    if !(phi2 > 0.0) {
        return Err(Error::Saddle { phi2 });
    }
    Ok(0.5 * (TAU / phi2).ln() - phi0)
}

/// Lower integration limit relative to J; contributes below `1e−14` of the rate.
const OMEGA_LO_FACTOR: f64 = 1e-14;
/// Extra decay budget past the saddle for the upper limit `J(φ0 + 50)`.
const TAIL_BUDGET: f64 = 50.0;

/// `ln` of the quadrature heating rate.
pub fn ln_heating_quadrature(p: &HeatingParams, rel_tol: f64) -> Result<f64> {
    if !(rel_tol > 1e-12 && rel_tol < 1e-2) {
        return Err(Error::Parameter(format!("rel_tol must lie in (1e-12, 1e-2), got {rel_tol}")));
    }
    let s = saddle_point(p)?;
    let hi = p.j * (s.phi0 + TAIL_BUDGET);
    let lo = p.j * OMEGA_LO_FACTOR;
    let mut interior = vec![s.omega0];
    if let SuppressionClass::Quasipoly(_) = p.class {
        interior.push(p.lambda);
    }
    let ln_i = ln_integral_exp_neg(|w| p.phi(w), s.phi0, lo, hi, &interior, rel_tol)?;
    Ok(p.ln_prefactor() + ln_i - s.phi0)
}

pub fn heating_quadrature(p: &HeatingParams, rel_tol: f64) -> Result<f64> {
    ln_heating_quadrature(p, rel_tol).map(f64::exp)
}

/// Tolerance used when the Poly class falls back to quadrature.
pub const POLY_FALLBACK_TOL: f64 = 1e-10;

/// `ln` of the Laplace-method heating rate; Poly uses the quadrature value.
pub fn ln_laplace_heating(p: &HeatingParams) -> Result<f64> {
    if let SuppressionClass::Poly(_) = p.class {
        return ln_heating_quadrature(p, POLY_FALLBACK_TOL);
    }
    let s = saddle_point(p)?;
    Ok(p.ln_prefactor() + ln_laplace_integral(s.phi0, s.phi2)?)
}

pub fn laplace_heating(p: &HeatingParams) -> Result<f64> {
    ln_laplace_heating(p).map(f64::exp)
}

/// Heating time, kept in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauStar {
    pub ln_tau: f64,
    /// True when `e^{ln_tau}` does not fit in an `f64`.
    pub overflow: bool,
}

impl TauStar {
    pub fn value(&self) -> Option<f64> {
        (!self.overflow).then(|| self.ln_tau.exp())
    }
}

pub fn tau_star_lrt(p: &HeatingParams) -> Result<TauStar> {
    let ln_tau = -ln_laplace_heating(p)?;
    Ok(TauStar { ln_tau, overflow: !ln_tau.exp().is_finite() })
}

/// One row of a λ sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrtPoint {
    pub lambda: f64,
    pub ln_rate_quadrature: f64,
    pub ln_rate_laplace: f64,
    pub omega0: f64,
    pub phi0: f64,
    pub ln_tau_star: f64,
}

pub fn lrt_point(class: SuppressionClass, j: f64, g: f64, lambda: f64, rel_tol: f64) -> Result<LrtPoint> {
    let p = HeatingParams::new(class, j, lambda, g)?;
    let s = saddle_point(&p)?;
    let lq = ln_heating_quadrature(&p, rel_tol)?;
    let ll = ln_laplace_heating(&p)?;
    Ok(LrtPoint { lambda, ln_rate_quadrature: lq, ln_rate_laplace: ll, omega0: s.omega0, phi0: s.phi0, ln_tau_star: -ll })
}

/// Growth exponent of `ln τ*` in the variable natural to each class.
///
/// * Poly: slope of `ln τ*` against `ln λ`.
/// * StretchExpt: `β` in `ln τ* ≈ a + c λ^β`.
/// * Quasipoly: `β` in `ln τ* ≈ a + c₁ ℓ + c₂ ℓ^β` with `ℓ = ln(λ/Ω₀)`; the linear
///   term absorbs the `Ω₀/J` part of `φ₀`.
pub fn lrt_exponent(class: SuppressionClass, points: &[LrtPoint]) -> Result<f64> {
    let tau: Vec<f64> = points.iter().map(|p| p.ln_tau_star).collect();
    match class {
        SuppressionClass::Poly(_) => {
            let x: Vec<f64> = points.iter().map(|p| p.lambda.ln()).collect();
            Ok(fit_line(&x, &tau)?.slope)
        }
        SuppressionClass::StretchExpt(_) => {
            let x: Vec<f64> = points.iter().map(|p| p.lambda).collect();
            Ok(fit_offset_power(&x, &tau, 0.05, 2.0)?.beta)
        }
        SuppressionClass::Quasipoly(_) => {
            let ell: Vec<f64> = points.iter().map(|p| (p.lambda / p.omega0).ln()).collect();
            Ok(separable_fit(&ell, &tau, |b, l| vec![1.0, l, l.powf(b)], 1.05, 5.0)?.beta)
        }
    }
}
