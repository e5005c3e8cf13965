//! Drive generators: binary substitution words and multi-tone continuous drives.
//!
//! Symbols map to signs as `0 -> +1`, `1 -> -1`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arithmetic::{FactorialRational, FrequencyLabel};
use crate::error::{param, Error, Result};

/// Largest Thue-Morse / n-RMD block depth accepted.
pub const MAX_DEPTH: u32 = 26;
/// Largest Fibonacci iteration count accepted (length F(38) ≈ 3.9e7).
pub const MAX_FIB_ITERATIONS: u32 = 36;
/// Largest total sequence length accepted.
pub const MAX_LEN: u64 = 1 << 28;
/// Largest number of components in a quasi-Floquet drive.
pub const MAX_COMPONENTS: u64 = 1_000_000;
/// Largest factorial index (matches the exact label arithmetic).
pub const MAX_FACTORIAL_K: u32 = 20;

/// A single drive sign, always `+1` or `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Sign(i8);

impl Sign {
    pub const PLUS: Sign = Sign(1);
    pub const MINUS: Sign = Sign(-1);

    pub fn new(v: i64) -> Result<Sign> {
        match v {
            1 => Ok(Sign::PLUS),
            -1 => Ok(Sign::MINUS),
            other => param(format!("drive sign must be +1 or -1, got {other}")),
        }
    }

    pub fn value(self) -> i8 {
        self.0
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.0)
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;
    fn neg(self) -> Sign {
        Sign(-self.0)
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        Sign(self.0 * rhs.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    ThueMorse,
    Rmd,
    Fibonacci,
    Custom,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::ThueMorse => "thue_morse",
            Rule::Rmd => "rmd",
            Rule::Fibonacci => "fibonacci",
            Rule::Custom => "custom",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Provenance {
    pub rule: Rule,
    /// Substitution depth (Thue-Morse, n-RMD) or iteration count (Fibonacci).
    pub depth: u32,
    pub block_signs: Vec<Sign>,
}

/// Finite ±1 drive sequence with step duration `dt` (= 1/λ).
#[derive(Debug, Clone, PartialEq)]
pub struct StepSequence {
    values: Vec<Sign>,
    dt: f64,
    provenance: Provenance,
}

impl StepSequence {
    /// Wraps an arbitrary list of ±1 integers.
    pub fn custom(values: &[i64], dt: f64) -> Result<StepSequence> {
        let values = values.iter().map(|&v| Sign::new(v)).collect::<Result<Vec<_>>>()?;
        StepSequence::from_signs(values, Provenance { rule: Rule::Custom, depth: 0, block_signs: vec![] })
            .with_dt(dt)
    }

    fn from_signs(values: Vec<Sign>, provenance: Provenance) -> StepSequence {
        StepSequence { values, dt: 1.0, provenance }
    }

    /// Returns the same sequence with a different step duration.
    pub fn with_dt(mut self, dt: f64) -> Result<StepSequence> {
        if !(dt.is_finite() && dt > 0.0) {
            return param(format!("dt must be positive and finite, got {dt}"));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn signs(&self) -> &[Sign] {
        &self.values
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn to_i8(&self) -> Vec<i8> {
        self.values.iter().map(|s| s.value()).collect()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values.iter().map(|s| s.as_f64()).collect()
    }

    pub fn mean(&self) -> f64 {
        let sum: i64 = self.values.iter().map(|s| i64::from(s.value())).sum();
        sum as f64 / self.values.len().max(1) as f64
    }
}

fn thue_morse_signs(depth: u32) -> Vec<Sign> {
    // s_m = (-1)^{popcount(m)}
    (0u64..1 << depth)
        .map(|m| if m.count_ones() % 2 == 0 { Sign::PLUS } else { Sign::MINUS })
        .collect()
}

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_DEPTH {
        return Err(Error::Capacity { what: "depth", requested: depth.into(), cap: MAX_DEPTH.into() });
    }
    Ok(())
}

/// Thue-Morse word of length `2^depth`.
pub fn thue_morse_word(depth: u32) -> Result<StepSequence> {
    check_depth(depth)?;
    Ok(StepSequence::from_signs(
        thue_morse_signs(depth),
        Provenance { rule: Rule::ThueMorse, depth, block_signs: vec![] },
    ))
}

/// Random multipolar drive: depth-`r` Thue-Morse blocks multiplied by `block_signs`.
pub fn rmd_sequence(r: u32, block_signs: &[Sign]) -> Result<StepSequence> {
    check_depth(r)?;
    if block_signs.is_empty() {
        return param("block_signs must be non-empty");
    }
    let total = (block_signs.len() as u64) << r;
    if total > MAX_LEN {
        return Err(Error::Capacity { what: "sequence length", requested: total, cap: MAX_LEN });
    }
    let block = thue_morse_signs(r);
    let mut values = Vec::with_capacity(total as usize);
    for &b in block_signs {
        values.extend(block.iter().map(|&s| s * b));
    }
    Ok(StepSequence::from_signs(
        values,
        Provenance { rule: Rule::Rmd, depth: r, block_signs: block_signs.to_vec() },
    ))
}

/// Independent uniform ±1 block signs from a seeded ChaCha stream.
pub fn random_block_signs(count: usize, seed: u64) -> Vec<Sign> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| if rng.gen::<bool>() { Sign::PLUS } else { Sign::MINUS }).collect()
}

/// Fibonacci word `W_n` with `W_0 = "0"`, `W_1 = "01"`, `W_{n+1} = W_n W_{n-1}`.
pub fn fibonacci_word(iterations: u32) -> Result<StepSequence> {
    if iterations > MAX_FIB_ITERATIONS {
        return Err(Error::Capacity {
            what: "fibonacci iterations",
            requested: iterations.into(),
            cap: MAX_FIB_ITERATIONS.into(),
        });
    }
    let mut prev = vec![Sign::PLUS];
    let mut cur = vec![Sign::PLUS, Sign::MINUS];
    if iterations == 0 {
        cur = prev.clone();
    } else {
        for _ in 1..iterations {
            let mut next = Vec::with_capacity(cur.len() + prev.len());
            next.extend_from_slice(&cur);
            next.extend_from_slice(&prev);
            prev = std::mem::replace(&mut cur, next);
        }
    }
    Ok(StepSequence::from_signs(
        cur,
        Provenance { rule: Rule::Fibonacci, depth: iterations, block_signs: vec![] },
    ))
}

/// One spectral component of a continuous drive.
#[derive(Debug, Clone, PartialEq)]
pub struct Component {
    pub label: FrequencyLabel,
    pub freq: f64,
    pub amp: f64,
    pub phase: f64,
}

/// Continuous drive `V(t) = Σ amp_k sin(freq_k t + phase_k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousDrive {
    pub components: Vec<Component>,
    pub lambda: f64,
}

/// Amplitude laws for the factorial drive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecayLaw {
    /// `(k!)^{-b}`
    PolyB(f64),
    /// `exp(-(ln k!)^b)`
    QuasipolyB(f64),
    /// `exp(-(k!)^b)`
    StretchB(f64),
}

fn factorial_f64(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// Factorial drive with components at `λ/k!`, `k = 1..=k_max`.
pub fn factorial_drive(law: DecayLaw, k_max: u32, lambda: f64) -> Result<ContinuousDrive> {
    if k_max == 0 {
        return param("k_max must be at least 1");
    }
    if k_max > MAX_FACTORIAL_K {
        return Err(Error::Capacity { what: "k_max", requested: k_max.into(), cap: MAX_FACTORIAL_K.into() });
    }
    if !(lambda.is_finite() && lambda > 0.0) {
        return param(format!("lambda must be positive, got {lambda}"));
    }
    match law {
        DecayLaw::PolyB(b) if !(b > 1.0) => return param(format!("PolyB requires b > 1, got {b}")),
        DecayLaw::QuasipolyB(b) if !(b > 1.0) => return param(format!("QuasipolyB requires b > 1, got {b}")),
        DecayLaw::StretchB(b) if !(b > 0.0) => return param(format!("StretchB requires b > 0, got {b}")),
        _ => {}
    }
    let components = (1..=k_max)
        .map(|k| {
            let kf = factorial_f64(k);
            let amp = match law {
                DecayLaw::PolyB(b) => kf.powf(-b),
                DecayLaw::QuasipolyB(b) => (-kf.ln().powf(b)).exp(),
                DecayLaw::StretchB(b) => (-kf.powf(b)).exp(),
            };
            Ok(Component {
                label: FrequencyLabel::Factorial(FactorialRational::new(1, k)?),
                freq: lambda / kf,
                amp,
                phase: 0.0,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ContinuousDrive { components, lambda })
}

/// Fourier amplitude laws for quasi-periodic drives, in terms of `|n|_1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FourierDecay {
    PolyAlpha(f64),
    LogSq,
    ExpAlpha(f64),
}

impl FourierDecay {
    fn amplitude(self, norm: f64) -> f64 {
        match self {
            FourierDecay::PolyAlpha(a) => norm.powf(-a),
            FourierDecay::LogSq => (-norm.ln().powi(2)).exp(),
            FourierDecay::ExpAlpha(a) => (-norm.powf(a)).exp(),
        }
    }
}

/// Integer vectors with `0 < |n|_1 <= n_max`, one per `±n` pair (first non-zero entry positive),
/// ordered by `|n|_1` and then lexicographically descending.
pub fn half_lattice(dim: usize, n_max: u32) -> Result<Vec<Vec<i64>>> {
    let side = 2 * u64::from(n_max) + 1;
    let count = (0..dim).try_fold(1u64, |acc, _| acc.checked_mul(side)).unwrap_or(u64::MAX);
    if count > MAX_COMPONENTS * 4 {
        return Err(Error::Capacity { what: "lattice points", requested: count, cap: MAX_COMPONENTS * 4 });
    }
    let n_max = i64::from(n_max);
    let mut out = Vec::new();
    let mut cur = vec![0i64; dim];
    fn rec(i: usize, budget: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if i == cur.len() {
            if let Some(first) = cur.iter().find(|&&c| c != 0) {
                if *first > 0 {
                    out.push(cur.clone());
                }
            }
            return;
        }
        for c in (-budget..=budget).rev() {
            cur[i] = c;
            rec(i + 1, budget - c.abs(), cur, out);
        }
        cur[i] = 0;
    }
    rec(0, n_max, &mut cur, &mut out);
    out.sort_by_key(|n| n.iter().map(|c| c.abs()).sum::<i64>());
    if out.len() as u64 > MAX_COMPONENTS {
        return Err(Error::Capacity { what: "components", requested: out.len() as u64, cap: MAX_COMPONENTS });
    }
    Ok(out)
}

/// Quasi-periodic drive with components `n·ω` for `0 < |n|_1 <= n_max`.
///
/// `±n` produce the same sine up to sign, so only one representative of each pair is kept.
pub fn quasi_floquet_drive(omega: &[f64], decay: FourierDecay, n_max: u32) -> Result<ContinuousDrive> {
    if omega.is_empty() || omega.iter().any(|w| !w.is_finite()) {
        return param("omega must be a non-empty finite vector");
    }
    if n_max == 0 {
        return param("n_max must be at least 1");
    }
    let components = half_lattice(omega.len(), n_max)?
        .into_iter()
        .map(|n| {
            let norm = n.iter().map(|c| c.abs() as f64).sum::<f64>();
            let freq = n.iter().zip(omega).map(|(&c, w)| c as f64 * w).sum();
            Component { label: FrequencyLabel::IntVec(n), freq, amp: decay.amplitude(norm), phase: 0.0 }
        })
        .collect();
    Ok(ContinuousDrive { components, lambda: 1.0 })
}

/// Evaluates the drive on a time grid.
pub fn sample(drive: &ContinuousDrive, t_grid: &[f64]) -> Vec<f64> {
    t_grid
        .iter()
        .map(|&t| drive.components.iter().map(|c| c.amp * (c.freq * t + c.phase).sin()).sum())
        .collect()
}
