//! κ-sequence renormalization plans and the lifetime bounds they imply.
//!
//! A plan is a decreasing ladder `κ_0 > κ_1 > … > κ_{q*}` together with a bound
//! `r_q` on the drive-norm ratio of each step. The lifetime bound is
//! `ln τ* = −Σ_q ln r_q`; it is always evaluated in log space.

use crate::arithmetic::SuppressionClass;
use crate::error::{Error, Result};
use crate::fit::{fit_line, separable_fit};

/// Default ADHH prefactor scale for stretched-exponential plans.
pub const DEFAULT_STRETCH_C: f64 = 144.0;

/// Class-specific constants of a plan.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanConstants {
    Poly {
        epsilon: f64,
    },
    Stretch {
        c: f64,
        c2: f64,
        mu: f64,
        /// `(c″J/λ)^{b/(b+1)}`
        step_scale: f64,
    },
    Quasipoly {
        a: f64,
        c: f64,
        delta: f64,
        k_prime: f64,
        c_log: f64,
        b_const: f64,
        k_dprime: f64,
        k_base: f64,
        x0: f64,
        k_total: f64,
        x: f64,
        n: usize,
    },
}

impl PlanConstants {
    /// Named view of the constants, for reports.
    pub fn named(&self) -> Vec<(&'static str, f64)> {
        match *self {
            PlanConstants::Poly { epsilon } => vec![("epsilon", epsilon)],
            PlanConstants::Stretch { c, c2, mu, step_scale } => {
                vec![("c", c), ("c2", c2), ("mu", mu), ("step_scale", step_scale)]
            }
            PlanConstants::Quasipoly { a, c, delta, k_prime, c_log, b_const, k_dprime, k_base, x0, k_total, x, n } => vec![
                ("A", a),
                ("c", c),
                ("Delta", delta),
                ("K_prime", k_prime),
                ("C_log", c_log),
                ("B", b_const),
                ("K_dprime", k_dprime),
                ("K_base", k_base),
                ("X0", x0),
                ("K", k_total),
                ("x", x),
                ("n", n as f64),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaPlan {
    pub class: SuppressionClass,
    pub kappa0: f64,
    pub j: f64,
    pub lambda: f64,
    /// `κ_0, …, κ_{q*}`
    pub kappa: Vec<f64>,
    /// `κ′_q` for `q < q*` (polynomial plans only).
    pub kappa_prime: Vec<f64>,
    pub q_star: usize,
    pub lambda_min: f64,
    pub thresholds: Vec<(&'static str, f64)>,
    pub constants: PlanConstants,
    /// `r_q` for `q < q*`.
    pub r_bounds: Vec<f64>,
    pub valid: bool,
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Parameter(format!("{name} must be positive and finite, got {v}")))
    }
}

/// Polynomial plan: gaps `1/b` for the divisor and `ε = 1/(2b²)` for the ADHH step.
pub fn plan_poly(b: u32, kappa0: f64, j: f64, lambda: f64) -> Result<KappaPlan> {
    if b < 2 {
        return Err(Error::Parameter(format!("polynomial plans need b >= 2, got {b}")));
    }
    positive("J", j)?;
    positive("lambda", lambda)?;
    if !(kappa0 >= 1.0) {
        return Err(Error::Parameter(format!("polynomial plans need kappa0 >= 1, got {kappa0}")));
    }
    let bf = f64::from(b);
    let eps = 1.0 / (2.0 * bf * bf);
    let q_star = (b - 1) as usize;
    let kappa_prime: Vec<f64> = (0..q_star).map(|q| kappa0 - (q as f64 + 1.0) / bf - q as f64 * eps).collect();
    let mut kappa = vec![kappa0];
    kappa.extend(kappa_prime.iter().map(|kp| kp - eps));
    let lambda_min = 1152.0 * bf.powi(3) * j;
    let mut plan = KappaPlan {
        class: SuppressionClass::Poly(bf),
        kappa0,
        j,
        lambda,
        kappa,
        kappa_prime,
        q_star,
        lambda_min,
        thresholds: vec![("1152 b^3 J", lambda_min)],
        constants: PlanConstants::Poly { epsilon: eps },
        r_bounds: vec![],
        valid: lambda >= lambda_min,
    };
    plan.r_bounds = (0..q_star).map(|q| step_ratio_bound(&plan, q, j, lambda)).collect::<Result<_>>()?;
    Ok(plan)
}

/// Stretched-exponential plan on the reference curve
/// `κ_q = [κ_1^μ − μ C (q−1)]^{1/μ}`, `μ = (2b+1)/(b+1)`, `C = (c″J/λ)^{b/(b+1)}`.
pub fn plan_stretch(b: f64, kappa0: f64, j: f64, lambda: f64, c: f64) -> Result<KappaPlan> {
    for (name, v) in [("b", b), ("kappa0", kappa0), ("J", j), ("lambda", lambda), ("c", c)] {
        positive(name, v)?;
    }
    let mu = (2.0 * b + 1.0) / (b + 1.0);
    let c2 = 2f64.powf(1.0 / mu + 1.0) * c;
    let step_scale = (c2 * j / lambda).powf(b / (b + 1.0));
    let k1 = kappa0 / 2.0;
    let k_star = kappa0 / 4.0;
    let q_star = ((k1.powf(mu) - k_star.powf(mu)) / (mu * step_scale) + 1.0).floor() as usize;
    if q_star > 10_000_000 {
        return Err(Error::Capacity { what: "stretch plan length", requested: q_star as u64, cap: 10_000_000 });
    }
    let mut kappa = vec![kappa0];
    kappa.extend((1..=q_star).map(|q| (k1.powf(mu) - mu * step_scale * (q as f64 - 1.0)).powf(1.0 / mu)));
    let t1 = 2f64.powf(3.0 + 1.0 / b) * c * j / kappa0.powf(2.0 + 1.0 / b);
    let t2 = (2f64.powf(mu) * mu / k1).powf((b + 1.0) / b) * c2 * j / k1;
    let lambda_min = t1.max(t2);
    let mut plan = KappaPlan {
        class: SuppressionClass::StretchExpt(b),
        kappa0,
        j,
        lambda,
        kappa,
        kappa_prime: vec![],
        q_star,
        lambda_min,
        thresholds: vec![("initial step", t1), ("reference curve", t2)],
        constants: PlanConstants::Stretch { c, c2, mu, step_scale },
        r_bounds: vec![],
        valid: lambda >= lambda_min,
    };
    plan.r_bounds = (0..q_star).map(|q| step_ratio_bound(&plan, q, j, lambda)).collect::<Result<_>>()?;
    Ok(plan)
}

/// Quasipolynomial plan with `n` uniform steps of size `Δ/n` from `κ_1 = κ0/2` down to `κ* = κ0/4`.
pub fn plan_quasipoly(b: f64, kappa0: f64, j: f64, lambda: f64) -> Result<KappaPlan> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(Error::Parameter(format!("quasipolynomial plans need b > 1, got {b}")));
    }
    positive("kappa0", kappa0)?;
    positive("J", j)?;
    positive("lambda", lambda)?;
    let c_b = SuppressionClass::Quasipoly(b).c_b();
    let e = 1.0 / (b - 1.0);
    let a = 2f64.powf(e) * c_b;
    let c = (6.0 * kappa0).max(288.0);
    let delta = kappa0 / 4.0;
    let k_prime = delta / (4.0 * a).powf(b - 1.0);
    let c_log = (b - 1.0) * ((4.0 * (b - 1.0)).ln() - 1.0);
    let b_const = (32.0 * c * k_prime / (kappa0 * kappa0)).ln() + c_log + std::f64::consts::LN_2;
    let k_dprime = k_prime / 2f64.powf(b + 2.0);
    let k_base = 8.0 * c / (kappa0 * kappa0) * (2f64.powf(2.0 * e) * c_b / kappa0.powf(e)).exp();
    let x0 = 2f64.max((2.0 / k_prime).powf(e));
    let k_total = k_base.max((b_const + x0).exp()).max((2.0 * b_const).exp());
    let lambda_min = k_total * j;
    let x = (lambda / j).ln() - b_const;
    let n = if x > 0.0 { (k_prime * x.powf(b - 1.0)).floor() as usize } else { 0 };
    if n > 10_000_000 {
        return Err(Error::Capacity { what: "quasipolynomial plan length", requested: n as u64, cap: 10_000_000 });
    }
    let mut kappa = vec![kappa0];
    if n > 0 {
        kappa.extend((1..=n + 1).map(|q| delta + delta * (1.0 - (q as f64 - 1.0) / n as f64)));
    }
    let q_star = kappa.len() - 1;
    let mut plan = KappaPlan {
        class: SuppressionClass::Quasipoly(b),
        kappa0,
        j,
        lambda,
        kappa,
        kappa_prime: vec![],
        q_star,
        lambda_min,
        thresholds: vec![("K_base J", k_base * j), ("e^(B+X0) J", (b_const + x0).exp() * j), ("e^(2B) J", (2.0 * b_const).exp() * j)],
        constants: PlanConstants::Quasipoly { a, c, delta, k_prime, c_log, b_const, k_dprime, k_base, x0, k_total, x, n },
        r_bounds: vec![],
        valid: lambda >= lambda_min && n >= 1,
    };
    plan.r_bounds = (0..q_star).map(|q| step_ratio_bound(&plan, q, j, lambda)).collect::<Result<_>>()?;
    Ok(plan)
}

fn quasipoly_ratio(a: f64, c: f64, b: f64, j: f64, lambda: f64, kappa_next: f64, delta: f64) -> f64 {
    2.0 * c * j / lambda * (a / delta.powf(1.0 / (b - 1.0))).exp() / (kappa_next * delta)
}

/// Bound on `‖V^{(q+1)}‖_{κ_{q+1}} / ‖V^{(q)}‖_{κ_q}` for step `q` of a plan at the given `J`, `λ`.
pub fn step_ratio_bound(plan: &KappaPlan, q: usize, j: f64, lambda: f64) -> Result<f64> {
    if q >= plan.q_star {
        return Err(Error::Parameter(format!("step {q} outside plan with q* = {}", plan.q_star)));
    }
    let (k, k_next) = (plan.kappa[q], plan.kappa[q + 1]);
    let delta = k - k_next;
    Ok(match (&plan.constants, plan.class) {
        (PlanConstants::Poly { epsilon }, SuppressionClass::Poly(b)) => 288.0 * b * j / (epsilon * lambda),
        (PlanConstants::Stretch { c, .. }, SuppressionClass::StretchExpt(b)) => {
            c * j / (lambda * k_next * delta.powf((b + 1.0) / b))
        }
        (PlanConstants::Quasipoly { a, c, .. }, SuppressionClass::Quasipoly(b)) => {
            quasipoly_ratio(*a, *c, b, j, lambda, k_next, delta)
        }
        _ => unreachable!("plan constants always match the class"),
    })
}

/// `ln τ* = −Σ_q ln r_q` for a valid plan.
pub fn tau_star_np(plan: &KappaPlan) -> Result<f64> {
    if !plan.valid {
        return Err(Error::InvalidPlan { lambda: plan.lambda, lambda_min: plan.lambda_min });
    }
    Ok(-plan.r_bounds.iter().map(|r| r.ln()).sum::<f64>())
}

/// `−Σ_{q>=1} ln r_q` for the inner quasipolynomial steps with custom spacings summing to `Δ`.
pub fn quasipoly_inner_gain(plan: &KappaPlan, spacings: &[f64]) -> Result<f64> {
    let (PlanConstants::Quasipoly { a, c, delta, .. }, SuppressionClass::Quasipoly(b)) = (&plan.constants, plan.class)
    else {
        return Err(Error::Parameter("not a quasipolynomial plan".into()));
    };
    let total: f64 = spacings.iter().sum();
    if (total - delta).abs() > 1e-9 * delta || spacings.iter().any(|s| !(*s > 0.0)) {
        return Err(Error::Parameter(format!("spacings must be positive and sum to {delta}")));
    }
    let mut kappa = plan.kappa0 / 2.0;
    Ok(spacings
        .iter()
        .map(|&d| {
            kappa -= d;
            -quasipoly_ratio(*a, *c, b, plan.j, plan.lambda, kappa, d).ln()
        })
        .sum())
}

/// Result of the ADHH iteration bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdhhBound {
    pub bound: f64,
    pub hypothesis_ok: bool,
}

/// `18‖A‖‖O‖/(κ′(κ−κ′))` with the hypothesis `3‖A‖ <= κ − κ′`.
pub fn adhh_bound(kappa: f64, kappa_prime: f64, norm_a: f64, norm_o: f64) -> Result<AdhhBound> {
    if !(kappa_prime > 0.0 && kappa_prime < kappa) {
        return Err(Error::Parameter(format!("need 0 < kappa' < kappa, got kappa = {kappa}, kappa' = {kappa_prime}")));
    }
    let gap = kappa - kappa_prime;
    Ok(AdhhBound {
        bound: 18.0 * norm_a * norm_o / (kappa_prime * gap),
        hypothesis_ok: 3.0 * norm_a <= gap + 1e-15,
    })
}

/// Principal branch of the Lambert W function on `[−1/e, ∞)`.
pub fn lambert_w(x: f64) -> Result<f64> {
    let branch = -1.0 / std::f64::consts::E;
    if !(x >= branch) || !x.is_finite() {
        return Err(Error::Parameter(format!("lambert_w needs x >= -1/e, got {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let mut w = if x > std::f64::consts::E {
        let l = x.ln();
        l - l.ln()
    } else if x > 0.0 {
        x / (1.0 + x).sqrt().max(1.0) * 0.9
    } else {
        let p = (2.0 * (std::f64::consts::E * x + 1.0)).sqrt();
        -1.0 + p - p * p / 3.0
    };
    for _ in 0..100 {
        let ew = w.exp();
        let f = w * ew - x;
        if f.abs() <= 1e-12 * x.abs() {
            return Ok(w);
        }
        let newton = w - f / (ew * (w + 1.0));
        let residual = |v: f64| (v * v.exp() - x).abs();
        w = if newton.is_finite() && newton > -1.0 && residual(newton) < f.abs() {
            newton
        } else {
            // Halley step
            let wp1 = w + 1.0;
            w - f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1))
        };
    }
    Err(Error::Solver(format!("lambert_w did not converge for x = {x}")))
}

/// `dκ/dq` along the continuous flow.
pub fn beta_function(class: SuppressionClass, kappa: f64, j: f64, lambda: f64) -> Result<f64> {
    positive("kappa", kappa)?;
    positive("lambda", lambda)?;
    positive("J", j)?;
    class.validate()?;
    Ok(match class {
        SuppressionClass::Poly(b) => -1.0 / b,
        SuppressionClass::StretchExpt(b) => -(j / (lambda * kappa)).powf(b / (b + 1.0)),
        SuppressionClass::Quasipoly(b) => {
            let w = lambert_w((lambda * kappa / j).powf(1.0 / (b - 1.0)))?;
            -w.powf(1.0 - b)
        }
    })
}

/// One row of a non-perturbative λ sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NpPoint {
    pub lambda: f64,
    pub q_star: usize,
    pub ln_tau_star: Option<f64>,
    pub valid: bool,
}

/// Builds the class plan at `lambda`; `b` is rounded for the polynomial class.
pub fn build_plan(class: SuppressionClass, kappa0: f64, j: f64, lambda: f64, stretch_c: f64) -> Result<KappaPlan> {
    match class {
        SuppressionClass::Poly(b) => {
            if b.fract() != 0.0 || b < 2.0 {
                return Err(Error::Parameter(format!("polynomial plans need an integer b >= 2, got {b}")));
            }
            plan_poly(b as u32, kappa0, j, lambda)
        }
        SuppressionClass::StretchExpt(b) => plan_stretch(b, kappa0, j, lambda, stretch_c),
        SuppressionClass::Quasipoly(b) => plan_quasipoly(b, kappa0, j, lambda),
    }
}

pub fn np_point(class: SuppressionClass, kappa0: f64, j: f64, lambda: f64, stretch_c: f64) -> Result<NpPoint> {
    let plan = build_plan(class, kappa0, j, lambda, stretch_c)?;
    Ok(NpPoint { lambda, q_star: plan.q_star, ln_tau_star: tau_star_np(&plan).ok(), valid: plan.valid })
}

/// Growth exponent of `ln τ*` over the valid points of a sweep.
///
/// * Poly: slope of `ln τ*` against `ln λ`.
/// * StretchExpt: `β` in `ln τ* ≈ a + c₁ ln λ + c₂ λ^β`; the log term carries the first step.
/// * Quasipoly: `β` in `ln τ* ≈ a + c L^β` with `L = ln λ`.
pub fn np_exponent(class: SuppressionClass, points: &[NpPoint]) -> Result<f64> {
    let (x, y): (Vec<f64>, Vec<f64>) =
        points.iter().filter(|p| p.valid).filter_map(|p| p.ln_tau_star.map(|t| (p.lambda, t))).unzip();
    if x.len() < 4 {
        return Err(Error::Fit(format!("need at least 4 valid sweep points, got {}", x.len())));
    }
    match class {
        SuppressionClass::Poly(_) => {
            let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            Ok(fit_line(&lx, &y)?.slope)
        }
        SuppressionClass::StretchExpt(_) => {
            Ok(separable_fit(&x, &y, |b, l| vec![1.0, l.ln(), l.powf(b)], 0.05, 2.0)?.beta)
        }
        SuppressionClass::Quasipoly(_) => {
            let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
            Ok(separable_fit(&lx, &y, |b, l| vec![1.0, l.powf(b)], 1.0, 6.0)?.beta)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn poly_plan_examples() {
        let p = plan_poly(3, 1.0, 1.0, 1e6).unwrap();
        assert_eq!(p.constants, PlanConstants::Poly { epsilon: 1.0 / 18.0 });
        assert_eq!(p.q_star, 2);
        assert!((p.kappa[2] - 2.0 / 9.0).abs() < 1e-15);
        assert!(p.kappa[2] >= 1.0 / 6.0);

        let lmin = 1152.0 * 8.0;
        let p = plan_poly(2, 1.0, 1.0, lmin).unwrap();
        assert!(p.valid && p.r_bounds[0] <= 0.5 + 1e-15);
        let p2 = plan_poly(2, 1.0, 1.0, 2.0 * lmin).unwrap();
        assert!(p2.r_bounds[0] <= 0.25 + 1e-15);
        let far = plan_poly(2, 1.0, 1.0, 1e12).unwrap();
        assert!((far.r_bounds[0] * 1e12 - p.r_bounds[0] * lmin).abs() < 1e-6);
        assert!(plan_poly(1, 1.0, 1.0, 1e6).is_err());
        assert!(!plan_poly(2, 1.0, 1.0, lmin * 0.99).unwrap().valid);
    }

    #[test]
    fn stretch_plan_examples() {
        let p = plan_stretch(1.0, 1.0, 1.0, 1e7, 1.0).unwrap();
        assert!(matches!(p.constants, PlanConstants::Stretch { mu, .. } if (mu - 1.5).abs() < 1e-15));
        let big = plan_stretch(1e6, 1.0, 1.0, 1e7, 1.0).unwrap();
        assert!(matches!(big.constants, PlanConstants::Stretch { mu, .. } if (1.0 / mu - 0.5).abs() < 1e-6));
        let q1 = plan_stretch(1.0, 1.0, 1.0, 1e12, 1.0).unwrap().q_star as f64;
        let q4 = plan_stretch(1.0, 1.0, 1.0, 4e12, 1.0).unwrap().q_star as f64;
        assert!((q4 / q1 - 2.0).abs() < 0.01, "{}", q4 / q1);
    }

    #[test]
    fn stretch_boundary_ratio() {
        let p0 = plan_stretch(1.0, 1.0, 1.0, 1.0, DEFAULT_STRETCH_C).unwrap();
        let p = plan_stretch(1.0, 1.0, 1.0, p0.lambda_min, DEFAULT_STRETCH_C).unwrap();
        assert!(p.valid);
        assert!(p.r_bounds.iter().all(|&r| r <= 0.5 + 1e-9), "{:?}", p.r_bounds);
    }

    #[test]
    fn stretch_curve_is_concave() {
        let p = plan_stretch(1.0, 1.0, 1.0, 1e9, DEFAULT_STRETCH_C).unwrap();
        for q in 2..p.q_star {
            let (a, b) = (p.kappa[q - 1] - p.kappa[q], p.kappa[q] - p.kappa[q + 1]);
            assert!(a <= b + 1e-15);
        }
    }

    #[test]
    fn quasipoly_constants() {
        let p = plan_quasipoly(2.0, 1.0, 1.0, 1e12).unwrap();
        let PlanConstants::Quasipoly { k_prime, k_dprime, b_const, k_total, .. } = p.constants else { panic!() };
        assert!((k_prime - 0.125).abs() < 1e-15);
        assert!((k_dprime - 1.0 / 128.0).abs() < 1e-15);
        assert!((b_const - 8.128).abs() < 1e-3, "{b_const}");
        assert!((k_total / 3.0e10 - 1.0).abs() < 0.05, "{k_total}");
    }

    #[test]
    fn quasipoly_spacing_telescopes() {
        let p = plan_quasipoly(2.0, 1.0, 1.0, 1e14).unwrap();
        let sum: f64 = p.kappa.windows(2).skip(1).map(|w| w[0] - w[1]).sum();
        assert!((sum - 0.25).abs() < 1e-14);
        assert!((p.kappa[p.q_star] - 0.25).abs() < 1e-14);
    }

    #[test]
    fn quasipoly_step_count_near_threshold() {
        let b = 2.0;
        let p = plan_quasipoly(b, 1.0, 1.0, 1e12).unwrap();
        let PlanConstants::Quasipoly { k_prime, b_const, x0, .. } = p.constants else { panic!() };
        let x = x0 * 1.0001;
        let q = plan_quasipoly(b, 1.0, 1.0, (x + b_const).exp()).unwrap();
        let PlanConstants::Quasipoly { n, .. } = q.constants else { panic!() };
        assert!(n >= 2 && n as f64 >= k_prime * x.powf(b - 1.0) / 2.0);
    }

    #[test]
    fn quasipoly_per_step_bound() {
        for lambda in [1e11, 1e14, 1e20, 1e30] {
            let p = plan_quasipoly(2.0, 1.0, 1.0, lambda).unwrap();
            assert!(p.valid);
            let PlanConstants::Quasipoly { x, .. } = p.constants else { panic!() };
            for r in &p.r_bounds[1..] {
                assert!(*r <= 0.5 * (-x / 2.0).exp(), "{r} at lambda {lambda}");
            }
        }
    }

    #[test]
    fn uniform_spacing_beats_random_spacings() {
        let p = plan_quasipoly(2.0, 1.0, 1.0, 1e30).unwrap();
        let PlanConstants::Quasipoly { n, delta, .. } = p.constants else { panic!() };
        let uniform = quasipoly_inner_gain(&p, &vec![delta / n as f64; n]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let w: Vec<f64> = (0..n).map(|_| rng.gen_range(0.2..1.0)).collect();
            let s: f64 = w.iter().sum();
            let spacing: Vec<f64> = w.iter().map(|x| x / s * delta).collect();
            assert!(quasipoly_inner_gain(&p, &spacing).unwrap() <= uniform + 1e-9);
        }
    }

    #[test]
    fn adhh_examples() {
        let a = adhh_bound(1.0, 0.5, 0.1, 1.0).unwrap();
        assert!((a.bound - 7.2).abs() < 1e-12 && a.hypothesis_ok);
        assert_eq!(adhh_bound(1.0, 0.5, 0.0, 1.0).unwrap().bound, 0.0);
        let a = adhh_bound(1.0, 0.9, 0.05, 1.0).unwrap();
        assert!(!a.hypothesis_ok && a.bound > 0.0);
        assert!(adhh_bound(1.0, 1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn lambert_w_values() {
        assert!((lambert_w(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-12);
        for x in [-0.3, -0.01, 1e-8, 0.5, 1.0, 10.0, 1e5, 1e100] {
            let w = lambert_w(x).unwrap();
            assert!((w * w.exp() - x).abs() <= 1e-12 * x.abs(), "{x}");
        }
        assert!(lambert_w(-1.0).is_err());
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_function(SuppressionClass::Poly(4.0), 0.3, 1.0, 10.0).unwrap(), -0.25);
        let s = beta_function(SuppressionClass::StretchExpt(1.0), 0.5, 1.0, 100.0).unwrap();
        assert!((s + (1.0f64 / 50.0).sqrt()).abs() < 1e-12 && (s + 0.1414).abs() < 1e-4);
        let q = beta_function(SuppressionClass::Quasipoly(2.0), 1.0, 1.0, std::f64::consts::E).unwrap();
        assert!((q + 1.0).abs() < 1e-12);
    }

    #[test]
    fn tau_star_requires_validity() {
        let p = plan_poly(3, 1.0, 1.0, 10.0).unwrap();
        assert!(matches!(tau_star_np(&p), Err(Error::InvalidPlan { .. })));
    }

    proptest! {
        #[test]
        fn plans_satisfy_invariants(b in 0.5f64..3.0, k0 in 0.5f64..2.0, j in 0.5f64..2.0, boost in 0.0f64..4.0) {
            let base = plan_stretch(b, k0, j, 1.0, DEFAULT_STRETCH_C).unwrap();
            let p = plan_stretch(b, k0, j, base.lambda_min * 10f64.powf(boost), DEFAULT_STRETCH_C).unwrap();
            prop_assert!(p.valid);
            prop_assert!(p.kappa.windows(2).all(|w| w[1] < w[0]));
            prop_assert!(p.kappa[p.q_star] >= k0 / 4.0 - 1e-12);
            prop_assert!(p.r_bounds.iter().all(|&r| r <= 0.5 + 1e-9));
        }

        #[test]
        fn quasipoly_plans_satisfy_invariants(b in 1.5f64..3.0, k0 in 0.5f64..2.0, boost in 0.0f64..20.0) {
            let base = plan_quasipoly(b, k0, 1.0, 1.0).unwrap();
            let lambda = (base.lambda_min.ln() + boost).exp();
            let p = plan_quasipoly(b, k0, 1.0, lambda).unwrap();
            prop_assert!(p.valid);
            prop_assert!(p.kappa.windows(2).all(|w| w[1] < w[0]));
            prop_assert!(p.kappa[p.q_star] >= k0 / 4.0 - 1e-12);
            prop_assert!(p.r_bounds.iter().all(|&r| r <= 0.5 + 1e-9), "{:?}", p.r_bounds);
        }

        #[test]
        fn poly_plans_satisfy_invariants(b in 2u32..8, boost in 0.0f64..6.0) {
            let lambda = 1152.0 * f64::from(b).powi(3) * 10f64.powf(boost);
            let p = plan_poly(b, 1.0, 1.0, lambda).unwrap();
            prop_assert!(p.valid);
            prop_assert!(p.kappa.windows(2).all(|w| w[1] < w[0]));
            prop_assert!(p.kappa[p.q_star] >= 1.0 / (2.0 * f64::from(b)));
            prop_assert!(p.r_bounds.iter().all(|&r| r <= 0.5 + 1e-12));
        }
    }
}
