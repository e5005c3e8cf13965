//! Frequency labels, depth functions, penalty functions and small-divisor estimates.
//!
//! Labels use exact `i128` arithmetic with checked operations. Factorial
//! labels are limited to `k <= 20`, which keeps every intermediate well inside
//! the integer range.

use std::fmt;

use num_integer::Integer;
use rand::Rng;

use crate::error::{Error, Result};

/// Largest factorial index representable by [`FactorialRational`].
pub const MAX_FACTORIAL_K: u32 = 20;
/// Largest dyadic depth representable by [`Dyadic`].
pub const MAX_DYADIC_DEPTH: u32 = 100;
/// Absolute tolerance used when testing subadditivity.
pub const SUBADDITIVITY_TOL: f64 = 1e-12;

fn overflow(what: &'static str) -> Error {
    Error::Capacity { what, requested: u64::MAX, cap: i128::MAX as u64 }
}

/// Dyadic rational `num / 2^depth` kept in lowest terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Dyadic {
    num: i128,
    depth: u32,
}

impl Dyadic {
    pub fn new(mut num: i128, mut depth: u32) -> Result<Dyadic> {
        while depth > 0 && num % 2 == 0 {
            num /= 2;
            depth -= 1;
        }
        if depth > MAX_DYADIC_DEPTH {
            return Err(Error::Capacity { what: "dyadic depth", requested: depth.into(), cap: MAX_DYADIC_DEPTH.into() });
        }
        Ok(Dyadic { num, depth })
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    /// Dyadic depth `d(μ)`, the exponent of the reduced denominator.
    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn checked_add(&self, other: &Dyadic) -> Result<Dyadic> {
        let d = self.depth.max(other.depth);
        let lift = |x: &Dyadic| {
            1i128.checked_shl(d - x.depth).and_then(|s| x.num.checked_mul(s)).ok_or_else(|| overflow("dyadic numerator"))
        };
        let n = lift(self)?.checked_add(lift(other)?).ok_or_else(|| overflow("dyadic numerator"))?;
        Dyadic::new(n, d)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / 2f64.powi(self.depth as i32)
    }
}

fn factorial_i128(k: u32) -> i128 {
    (1..=i128::from(k)).product()
}

/// Factorial rational `num / k!` with minimal `k >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FactorialRational {
    num: i128,
    k: u32,
}

impl FactorialRational {
    pub fn new(mut num: i128, mut k: u32) -> Result<FactorialRational> {
        if k == 0 {
            k = 1;
        }
        if k > MAX_FACTORIAL_K {
            return Err(Error::Capacity { what: "factorial index", requested: k.into(), cap: MAX_FACTORIAL_K.into() });
        }
        while k > 1 && num % i128::from(k) == 0 {
            num /= i128::from(k);
            k -= 1;
        }
        Ok(FactorialRational { num, k })
    }

    pub fn numerator(&self) -> i128 {
        self.num
    }

    /// Factorial depth `ℓ(μ)`.
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn checked_add(&self, other: &FactorialRational) -> Result<FactorialRational> {
        let k = self.k.max(other.k);
        let kf = factorial_i128(k);
        let lift = |x: &FactorialRational| x.num.checked_mul(kf / factorial_i128(x.k)).ok_or_else(|| overflow("factorial numerator"));
        let n = lift(self)?.checked_add(lift(other)?).ok_or_else(|| overflow("factorial numerator"))?;
        FactorialRational::new(n, k)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / factorial_i128(self.k) as f64
    }
}

/// Element of one of the three label groups.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FrequencyLabel {
    IntVec(Vec<i64>),
    Dyadic(Dyadic),
    Factorial(FactorialRational),
}

/// Physical context needed to turn a label into a frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelContext {
    pub omega: Vec<f64>,
    pub lambda: f64,
}

impl FrequencyLabel {
    pub fn group(&self) -> &'static str {
        match self {
            FrequencyLabel::IntVec(_) => "intvec",
            FrequencyLabel::Dyadic(_) => "dyadic",
            FrequencyLabel::Factorial(_) => "factorial",
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            FrequencyLabel::IntVec(n) => n.iter().all(|&c| c == 0),
            FrequencyLabel::Dyadic(d) => d.num == 0,
            FrequencyLabel::Factorial(f) => f.num == 0,
        }
    }

    /// `n·ω`, `2πλ·k/2^r` or `2πλ·n/k!`.
    pub fn omega(&self, ctx: &LabelContext) -> Result<f64> {
        let tau = std::f64::consts::TAU;
        match self {
            FrequencyLabel::IntVec(n) => {
                if n.len() != ctx.omega.len() {
                    return Err(Error::Domain(format!("label dimension {} vs omega dimension {}", n.len(), ctx.omega.len())));
                }
                Ok(n.iter().zip(&ctx.omega).map(|(&c, w)| c as f64 * w).sum())
            }
            FrequencyLabel::Dyadic(d) => Ok(tau * ctx.lambda * d.to_f64()),
            FrequencyLabel::Factorial(f) => Ok(tau * ctx.lambda * f.to_f64()),
        }
    }

    pub fn checked_add(&self, other: &FrequencyLabel) -> Result<FrequencyLabel> {
        match (self, other) {
            (FrequencyLabel::IntVec(a), FrequencyLabel::IntVec(b)) if a.len() == b.len() => {
                let v = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| x.checked_add(*y).ok_or_else(|| overflow("integer label")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(FrequencyLabel::IntVec(v))
            }
            (FrequencyLabel::Dyadic(a), FrequencyLabel::Dyadic(b)) => Ok(FrequencyLabel::Dyadic(a.checked_add(b)?)),
            (FrequencyLabel::Factorial(a), FrequencyLabel::Factorial(b)) => {
                Ok(FrequencyLabel::Factorial(a.checked_add(b)?))
            }
            _ => Err(Error::Domain(format!("cannot add {} label to {} label", self.group(), other.group()))),
        }
    }

    /// L1 norm of an integer-vector label.
    fn l1(&self) -> Option<f64> {
        match self {
            FrequencyLabel::IntVec(n) => Some(n.iter().map(|c| c.unsigned_abs() as f64).sum()),
            _ => None,
        }
    }

    /// Parses the textual form produced by `Display`.
    pub fn parse(s: &str) -> Result<FrequencyLabel> {
        let bad = || Error::Parse(format!("unrecognised label '{s}'"));
        let s = s.trim();
        if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let v = inner
                .split_whitespace()
                .map(|t| t.parse::<i64>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return Ok(FrequencyLabel::IntVec(v));
        }
        let (num, den) = s.split_once('/').ok_or_else(bad)?;
        let num: i128 = num.parse().map_err(|_| bad())?;
        if let Some(k) = den.strip_suffix('!') {
            return Ok(FrequencyLabel::Factorial(FactorialRational::new(num, k.parse().map_err(|_| bad())?)?));
        }
        let r = den.strip_prefix("2^").ok_or_else(bad)?;
        Ok(FrequencyLabel::Dyadic(Dyadic::new(num, r.parse().map_err(|_| bad())?)?))
    }
}

impl fmt::Display for FrequencyLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FrequencyLabel::IntVec(n) => {
                let parts: Vec<String> = n.iter().map(i64::to_string).collect();
                write!(f, "[{}]", parts.join(" "))
            }
            FrequencyLabel::Dyadic(d) => write!(f, "{}/2^{}", d.num, d.depth),
            FrequencyLabel::Factorial(x) => write!(f, "{}/{}!", x.num, x.k),
        }
    }
}

fn reduce(num: i128, den: i128) -> Result<(i128, i128)> {
    if den == 0 {
        return Err(Error::Domain("zero denominator".into()));
    }
    let g = num.gcd(&den);
    let s = if den < 0 { -1 } else { 1 };
    Ok((s * num / g, s * den / g))
}

/// `d(μ) = min{r : 2^r μ ∈ ℤ}` for `μ = num/den`.
pub fn dyadic_depth(num: i128, den: i128) -> Result<u32> {
    let (_, den) = reduce(num, den)?;
    if den & (den - 1) != 0 {
        return Err(Error::Domain(format!("{num}/{den} is not a dyadic rational")));
    }
    Ok(den.trailing_zeros())
}

/// Search cap for [`factorial_depth`]; beyond it the denominator has a huge prime factor.
pub const FACTORIAL_DEPTH_SEARCH_CAP: u64 = 1_000_000;

/// `ℓ(μ) = min{k >= 1 : k! μ ∈ ℤ}` for `μ = num/den`.
pub fn factorial_depth(num: i128, den: i128) -> Result<u32> {
    let (_, mut den) = reduce(num, den)?;
    let mut k: i128 = 1;
    while den != 1 {
        k += 1;
        if k as u64 > FACTORIAL_DEPTH_SEARCH_CAP {
            return Err(Error::Capacity {
                what: "factorial depth search",
                requested: k as u64,
                cap: FACTORIAL_DEPTH_SEARCH_CAP,
            });
        }
        den /= den.gcd(&k);
    }
    Ok(k as u32)
}

/// Resonance penalty on frequency labels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Penalty {
    /// `ln(1 + |n|_1)`
    QfLog,
    /// `[ln(k_b + |n|_1)]^b` with `k_b = e^{b−1}/b`
    QfLogPowB(f64),
    /// `|n|_1^α`
    QfNormAlpha(f64),
    /// `d(μ)`
    DyadicLinear,
    /// `d(μ)^2`
    DyadicSquare,
    /// `b ln(ℓ!)`
    FactorialBLogFact(f64),
    /// `(ln ℓ!)^b`
    FactorialLogFactPowB(f64),
    /// `(ℓ!)^b`
    FactorialFactPowB(f64),
}

/// Cluster constant of the alternative (unshifted) quasipolynomial penalty route; not used by default.
pub const QUASIPOLY_CLUSTER_CONSTANT: f64 = 0.634;

impl Penalty {
    pub fn name(&self) -> String {
        match self {
            Penalty::QfLog => "qf_log".into(),
            Penalty::QfLogPowB(b) => format!("qf_logpow_b{b}"),
            Penalty::QfNormAlpha(a) => format!("qf_norm_alpha{a}"),
            Penalty::DyadicLinear => "dyadic_linear".into(),
            Penalty::DyadicSquare => "dyadic_square".into(),
            Penalty::FactorialBLogFact(b) => format!("factorial_blogfact_b{b}"),
            Penalty::FactorialLogFactPowB(b) => format!("factorial_logfactpow_b{b}"),
            Penalty::FactorialFactPowB(b) => format!("factorial_factpow_b{b}"),
        }
    }

    fn group(&self) -> &'static str {
        match self {
            Penalty::QfLog | Penalty::QfLogPowB(_) | Penalty::QfNormAlpha(_) => "intvec",
            Penalty::DyadicLinear | Penalty::DyadicSquare => "dyadic",
            _ => "factorial",
        }
    }
}

/// `k_b = e^{b−1}/b`.
pub fn shift_k_b(b: f64) -> f64 {
    (b - 1.0).exp() / b
}

/// Evaluates `p(label)`; zero labels map to zero.
pub fn penalty_value(p: &Penalty, label: &FrequencyLabel) -> Result<f64> {
    if p.group() != label.group() {
        return Err(Error::Domain(format!("penalty {} does not apply to {} labels", p.name(), label.group())));
    }
    if label.is_zero() {
        return Ok(0.0);
    }
    let lnfact = |k: u32| (1..=k).map(|i| f64::from(i).ln()).sum::<f64>();
    let v = match (p, label) {
        (Penalty::QfLog, l) => (1.0 + l.l1().unwrap_or(0.0)).ln(),
        (Penalty::QfLogPowB(b), l) => (shift_k_b(*b) + l.l1().unwrap_or(0.0)).ln().powf(*b),
        (Penalty::QfNormAlpha(a), l) => l.l1().unwrap_or(0.0).powf(*a),
        (Penalty::DyadicLinear, FrequencyLabel::Dyadic(d)) => f64::from(d.depth()),
        (Penalty::DyadicSquare, FrequencyLabel::Dyadic(d)) => f64::from(d.depth()).powi(2),
        (Penalty::FactorialBLogFact(b), FrequencyLabel::Factorial(f)) => b * lnfact(f.k()),
        (Penalty::FactorialLogFactPowB(b), FrequencyLabel::Factorial(f)) => lnfact(f.k()).powf(*b),
        (Penalty::FactorialFactPowB(b), FrequencyLabel::Factorial(f)) => lnfact(f.k()).exp().powf(*b),
        _ => unreachable!("group checked above"),
    };
    Ok(v)
}

/// Outcome of a subadditivity test.
#[derive(Debug, Clone, PartialEq)]
pub enum Subadditivity {
    Holds { trials: usize },
    Counterexample { label1: FrequencyLabel, label2: FrequencyLabel, lhs: f64, rhs: f64 },
}

impl Subadditivity {
    pub fn holds(&self) -> bool {
        matches!(self, Subadditivity::Holds { .. })
    }

    /// CSV row `family,label1,label2,lhs,rhs` for a counterexample.
    pub fn csv_row(&self, p: &Penalty) -> Option<String> {
        match self {
            Subadditivity::Counterexample { label1, label2, lhs, rhs } => Some(format!(
                "{},{},{},{},{}",
                p.name(),
                label1,
                label2,
                crate::io::fmt_f64(*lhs),
                crate::io::fmt_f64(*rhs)
            )),
            Subadditivity::Holds { .. } => None,
        }
    }
}

/// Tests `p(μ1+μ2) <= p(μ1)+p(μ2) + 1e−12` on up to `trials` pairs from `pairs`.
pub fn check_subadditivity(
    p: &Penalty,
    pairs: impl IntoIterator<Item = (FrequencyLabel, FrequencyLabel)>,
    trials: usize,
) -> Result<Subadditivity> {
    let mut done = 0;
    for (a, b) in pairs.into_iter().take(trials) {
        let lhs = penalty_value(p, &a.checked_add(&b)?)?;
        let rhs = penalty_value(p, &a)? + penalty_value(p, &b)?;
        done += 1;
        if lhs > rhs + SUBADDITIVITY_TOL {
            return Ok(Subadditivity::Counterexample { label1: a, label2: b, lhs, rhs });
        }
    }
    Ok(Subadditivity::Holds { trials: done })
}

/// Endless stream of random integer-vector label pairs with entries in `[-max, max]`.
pub fn random_intvec_pairs<R: Rng>(mut rng: R, dim: usize, max: i64) -> impl Iterator<Item = (FrequencyLabel, FrequencyLabel)> {
    std::iter::from_fn(move || {
        let mut draw = || FrequencyLabel::IntVec((0..dim).map(|_| rng.gen_range(-max..=max)).collect());
        Some((draw(), draw()))
    })
}

/// Endless stream of random dyadic label pairs `n/2^r` with `r <= max_depth`, `|n| <= 2^max_depth`.
pub fn random_dyadic_pairs<R: Rng>(mut rng: R, max_depth: u32) -> impl Iterator<Item = (FrequencyLabel, FrequencyLabel)> {
    let span = 1i128 << max_depth;
    std::iter::from_fn(move || {
        let mut draw = || {
            let r = rng.gen_range(0..=max_depth);
            let n = rng.gen_range(-span..=span);
            FrequencyLabel::Dyadic(Dyadic::new(n, r).expect("depth below cap"))
        };
        Some((draw(), draw()))
    })
}

/// Endless stream of random factorial label pairs `n/k!` with `k <= max_k`.
pub fn random_factorial_pairs<R: Rng>(mut rng: R, max_k: u32) -> impl Iterator<Item = (FrequencyLabel, FrequencyLabel)> {
    std::iter::from_fn(move || {
        let mut draw = || {
            let k = rng.gen_range(1..=max_k);
            let span = factorial_i128(k) * 4;
            FrequencyLabel::Factorial(FactorialRational::new(rng.gen_range(-span..=span), k).expect("k below cap"))
        };
        Some((draw(), draw()))
    })
}

/// Suppression class of a drive's near-origin spectral weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SuppressionClass {
    Poly(f64),
    Quasipoly(f64),
    StretchExpt(f64),
}

/// Value of a small-divisor function, which may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divisor {
    Finite(f64),
    Infinite,
}

impl Divisor {
    pub fn finite(self) -> Option<f64> {
        match self {
            Divisor::Finite(v) => Some(v),
            Divisor::Infinite => None,
        }
    }
}

impl SuppressionClass {
    pub fn b(&self) -> f64 {
        match *self {
            SuppressionClass::Poly(b) | SuppressionClass::Quasipoly(b) | SuppressionClass::StretchExpt(b) => b,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            SuppressionClass::Poly(_) => "poly",
            SuppressionClass::Quasipoly(_) => "quasipoly",
            SuppressionClass::StretchExpt(_) => "stretch",
        }
    }

    /// Penalty `p(x)` at reduced frequency `x = Ω/λ > 0`.
    pub fn p(&self, x: f64) -> f64 {
        match *self {
            SuppressionClass::Poly(b) => -b * x.ln(),
            SuppressionClass::Quasipoly(b) => {
                if x >= 1.0 {
                    0.0
                } else {
                    (-x.ln()).powf(b)
                }
            }
            SuppressionClass::StretchExpt(b) => x.powf(-b),
        }
    }

    /// Suppression law `f(x) = e^{−p(x)}`.
    pub fn f(&self, x: f64) -> f64 {
        (-self.p(x)).exp()
    }

    /// Smallest admissible κ gap: `1/b` for Poly, zero otherwise.
    pub fn min_gap(&self) -> f64 {
        match *self {
            SuppressionClass::Poly(b) => 1.0 / b,
            _ => 0.0,
        }
    }

    /// Constant `c_b` of the small-divisor function (1 for Poly).
    pub fn c_b(&self) -> f64 {
        match *self {
            SuppressionClass::Poly(_) => 1.0,
            SuppressionClass::Quasipoly(b) => (b - 1.0) / b.powf(b / (b - 1.0)),
            SuppressionClass::StretchExpt(b) => (1.0 / (b * std::f64::consts::E)).powf(1.0 / b),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let b = self.b();
        let ok = match self {
            SuppressionClass::Poly(_) => b >= 0.0,
            SuppressionClass::Quasipoly(_) => b > 1.0,
            SuppressionClass::StretchExpt(_) => b > 0.0,
        };
        if ok && b.is_finite() {
            Ok(())
        } else {
            Err(Error::Parameter(format!("b = {b} outside the valid range of the {} class", self.name())))
        }
    }

    /// Small-divisor function `h(δκ)`.
    pub fn small_divisor_h(&self, delta_kappa: f64) -> Result<Divisor> {
        if !(delta_kappa > 0.0) {
            return Err(Error::Parameter(format!("delta_kappa must be positive, got {delta_kappa}")));
        }
        self.validate()?;
        Ok(match *self {
            SuppressionClass::Poly(b) => {
                if delta_kappa * b >= 1.0 - 1e-12 {
                    Divisor::Finite(1.0)
                } else {
                    Divisor::Infinite
                }
            }
            SuppressionClass::Quasipoly(b) => Divisor::Finite((self.c_b() / delta_kappa.powf(1.0 / (b - 1.0))).exp()),
            SuppressionClass::StretchExpt(b) => Divisor::Finite(self.c_b() / delta_kappa.powf(1.0 / b)),
        })
    }
}

/// Free-function form of [`SuppressionClass::small_divisor_h`].
pub fn small_divisor_h(class: &SuppressionClass, delta_kappa: f64) -> Result<Divisor> {
    class.small_divisor_h(delta_kappa)
}

/// Brute-force `max_x e^{−δκ p(x)}/x` over a grid (λ = 1).
pub fn small_divisor_sup_oracle(class: &SuppressionClass, delta_kappa: f64, grid: &[f64]) -> f64 {
    grid.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| (-delta_kappa * class.p(x) - x.ln()).exp())
        .fold(0.0, f64::max)
}

/// `count` log-spaced points on `[lo, hi]`.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..count).map(|i| (a + (b - a) * i as f64 / (count - 1).max(1) as f64).exp()).collect()
}

/// Empirical Diophantine constant `min |n·ω| |n|_1^γ / |ω|` over the box
/// `0 < max_i |n_i| <= n_max` (one representative per `±n` pair).
pub fn diophantine_margin(omega: &[f64], gamma: f64, n_max: u32) -> Result<f64> {
    let norm = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    if n_max == 0 || norm == 0.0 {
        return Err(Error::Parameter("need n_max >= 1 and a non-zero omega".into()));
    }
    let side = 2 * u64::from(n_max) + 1;
    let count = u32::try_from(omega.len())
        .ok()
        .and_then(|d| side.checked_pow(d))
        .filter(|&c| c <= crate::drives::MAX_COMPONENTS)
        .ok_or(Error::Capacity {
            what: "diophantine scan points",
            requested: u64::MAX,
            cap: crate::drives::MAX_COMPONENTS,
        })?;
    let n_max = i64::from(n_max);
    let mut best = f64::INFINITY;
    let mut n = vec![0i64; omega.len()];
    for mut idx in 0..count {
        for c in n.iter_mut() {
            *c = (idx % side) as i64 - n_max;
            idx /= side;
        }
        if n.iter().find(|&&c| c != 0).map_or(true, |&c| c < 0) {
            continue;
        }
        let dot: f64 = n.iter().zip(omega).map(|(&c, w)| c as f64 * w).sum();
        let l1: f64 = n.iter().map(|c| c.unsigned_abs() as f64).sum();
        best = best.min(dot.abs() * l1.powf(gamma) / norm);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dy(n: i128, r: u32) -> FrequencyLabel {
        FrequencyLabel::Dyadic(Dyadic::new(n, r).unwrap())
    }

    #[test]
    fn depth_examples() {
        assert_eq!(dyadic_depth(1, 2).unwrap(), 1);
        assert_eq!(dyadic_depth(2, 4).unwrap(), 1);
        assert_eq!(dyadic_depth(3, 8).unwrap(), 3);
        assert_eq!(dyadic_depth(5, 1).unwrap(), 0);
        assert!(matches!(dyadic_depth(1, 3), Err(Error::Domain(_))));
        assert_eq!(factorial_depth(7, 1).unwrap(), 1);
        assert_eq!(factorial_depth(1, 2).unwrap(), 2);
        assert_eq!(factorial_depth(1, 6).unwrap(), 3);
        assert_eq!(factorial_depth(1, 5).unwrap(), 5);
        assert_eq!(factorial_depth(1, 8).unwrap(), 4);
    }

    #[test]
    fn labels_reduce_and_add() {
        let a = Dyadic::new(4, 3).unwrap();
        assert_eq!((a.numerator(), a.depth()), (1, 1));
        let f = FactorialRational::new(4, 3).unwrap(); // 4/6 = 2/3 needs 3!
        assert_eq!(f.k(), 3);
        let g = FactorialRational::new(3, 3).unwrap(); // 3/6 = 1/2
        assert_eq!((g.numerator(), g.k()), (1, 2));
        let s = FactorialRational::new(1, 2).unwrap().checked_add(&FactorialRational::new(1, 2).unwrap()).unwrap();
        assert_eq!((s.numerator(), s.k()), (1, 1));
        assert!(dy(1, 1).checked_add(&FrequencyLabel::IntVec(vec![1])).is_err());
    }

    #[test]
    fn label_text_round_trip() {
        for l in [
            FrequencyLabel::IntVec(vec![1, -2, 0]),
            dy(3, 4),
            FrequencyLabel::Factorial(FactorialRational::new(5, 7).unwrap()),
        ] {
            assert_eq!(FrequencyLabel::parse(&l.to_string()).unwrap(), l);
        }
    }

    #[test]
    fn label_frequencies() {
        let ctx = LabelContext { omega: vec![1.0, 2.0], lambda: 1.0 };
        assert_eq!(FrequencyLabel::IntVec(vec![1, 3]).omega(&ctx).unwrap(), 7.0);
        let tau = std::f64::consts::TAU;
        assert!((dy(1, 2).omega(&ctx).unwrap() - tau / 4.0).abs() < 1e-15);
    }

    #[test]
    fn penalty_examples() {
        let f3 = FrequencyLabel::Factorial(FactorialRational::new(1, 3).unwrap());
        assert!((penalty_value(&Penalty::FactorialBLogFact(2.0), &f3).unwrap() - 2.0 * 6f64.ln()).abs() < 1e-12);
        assert_eq!(penalty_value(&Penalty::DyadicLinear, &dy(3, 0)).unwrap(), 0.0);
        let one = FrequencyLabel::IntVec(vec![1]);
        let v = penalty_value(&Penalty::QfLogPowB(2.0), &one).unwrap();
        assert!((v - (std::f64::consts::E / 2.0 + 1.0).ln().powi(2)).abs() < 1e-12);
        assert!((v - 0.73667).abs() < 1e-5);
        assert_eq!(penalty_value(&Penalty::QfLogPowB(2.0), &FrequencyLabel::IntVec(vec![0])).unwrap(), 0.0);
        assert!(penalty_value(&Penalty::DyadicLinear, &one).is_err());
    }

    #[test]
    fn subadditivity_examples() {
        let one = FrequencyLabel::IntVec(vec![1]);
        let out = check_subadditivity(&Penalty::QfNormAlpha(2.0), [(one.clone(), one)], 1).unwrap();
        match out {
            Subadditivity::Counterexample { lhs, rhs, .. } => assert_eq!((lhs, rhs), (4.0, 2.0)),
            _ => panic!("expected counterexample"),
        }
        let exhaustive = (-100i64..=100).flat_map(|a| {
            (-100i64..=100)
                .filter(move |b| (a + b).abs() <= 100)
                .map(move |b| (FrequencyLabel::IntVec(vec![a]), FrequencyLabel::IntVec(vec![b])))
        });
        assert!(check_subadditivity(&Penalty::QfLog, exhaustive, usize::MAX).unwrap().holds());
        let rng = ChaCha8Rng::seed_from_u64(11);
        let out = check_subadditivity(&Penalty::DyadicSquare, random_dyadic_pairs(rng, 30), 100_000).unwrap();
        assert_eq!(out, Subadditivity::Holds { trials: 100_000 });
    }

    #[test]
    fn small_divisor_examples() {
        assert_eq!(SuppressionClass::Poly(3.0).small_divisor_h(1.0 / 3.0).unwrap(), Divisor::Finite(1.0));
        assert_eq!(SuppressionClass::Poly(3.0).small_divisor_h(0.3).unwrap(), Divisor::Infinite);
        let q = SuppressionClass::Quasipoly(2.0).small_divisor_h(1.0).unwrap().finite().unwrap();
        assert!((q - 0.25f64.exp()).abs() < 1e-12 && (q - 1.2840).abs() < 1e-4);
        let s = SuppressionClass::StretchExpt(1.0).small_divisor_h(0.5).unwrap().finite().unwrap();
        assert!((s - 2.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(SuppressionClass::StretchExpt(1.0).small_divisor_h(0.0).is_err());
    }

    #[test]
    fn oracle_examples() {
        let grid = log_grid(1e-4, 10.0, 20_000);
        let o = small_divisor_sup_oracle(&SuppressionClass::StretchExpt(1.0), 0.5, &grid);
        assert!((o / 0.7358 - 1.0).abs() < 0.05);
        let o = small_divisor_sup_oracle(&SuppressionClass::Quasipoly(2.0), 1.0, &grid);
        assert!((o / 0.25f64.exp() - 1.0).abs() < 0.05);
        let o = small_divisor_sup_oracle(&SuppressionClass::Poly(2.0), 0.5, &grid);
        assert!(o <= 1.0 + 1e-9);
    }

    #[test]
    fn diophantine_examples() {
        assert_eq!(diophantine_margin(&[1.0], 1.0, 10).unwrap(), 1.0);
        assert_eq!(diophantine_margin(&[1.0, 2.0], 1.0, 2).unwrap(), 0.0);
        let phi = (5f64.sqrt() - 1.0) / 2.0;
        let a = diophantine_margin(&[1.0, phi], 1.0, 20).unwrap();
        let b = diophantine_margin(&[1.0, phi], 1.0, 50).unwrap();
        assert!(b > 0.0 && b <= a);
    }
}
