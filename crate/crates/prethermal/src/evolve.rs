//! Exact unitary evolution of small spin-1/2 chains under ±1 step drives.
//!
//! Basis states are bit strings; bit `i` set means site `i` points down, so
//! index 0 is the all-up product state. Every matrix in the fixture is real
//! symmetric, so both step Hamiltonians `D ± gV` are diagonalized once and the
//! state is carried in the eigenbasis of the current step Hamiltonian.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::drives::StepSequence;
use crate::error::{Error, Result};

pub const MAX_SITES: usize = 12;
/// Norm drift beyond this aborts the evolution.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// `Σ σz_i σz_{i+1}`
    Zz,
    /// `Σ σz_i`
    FieldZ,
    /// `Σ σx_i`
    FieldX,
}

impl Coupling {
    pub fn name(self) -> &'static str {
        match self {
            Coupling::Zz => "zz",
            Coupling::FieldZ => "z",
            Coupling::FieldX => "x",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub l: usize,
    pub d_terms: Vec<(Coupling, f64)>,
    /// Amplitude of the uniform x-field drive `V = g Σ σx_i`.
    pub g: f64,
    pub periodic: bool,
}

impl ChainSpec {
    /// `D = Σ σzσz + 0.9 Σ σz + 0.8 Σ σx`, open boundary.
    pub fn mixed_field_ising(l: usize, g: f64) -> ChainSpec {
        ChainSpec {
            l,
            d_terms: vec![(Coupling::Zz, 1.0), (Coupling::FieldZ, 0.9), (Coupling::FieldX, 0.8)],
            g,
            periodic: false,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.l
    }

    /// `J = Σ |strength|` over the static terms (1 if there are none).
    pub fn energy_scale(&self) -> f64 {
        let j: f64 = self.d_terms.iter().map(|(_, s)| s.abs()).sum();
        if j > 0.0 {
            j
        } else {
            1.0
        }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=MAX_SITES).contains(&self.l) {
            return Err(Error::Capacity { what: "chain sites", requested: self.l as u64, cap: MAX_SITES as u64 });
        }
        if !self.g.is_finite() || self.d_terms.iter().any(|(_, s)| !s.is_finite()) {
            return Err(Error::Parameter("chain strengths must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Chain {
    pub spec: ChainSpec,
    pub d: DMatrix<f64>,
    /// `g Σ σx_i`
    pub v: DMatrix<f64>,
}

fn z_sign(state: usize, site: usize) -> f64 {
    if state >> site & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn add_term(m: &mut DMatrix<f64>, l: usize, periodic: bool, coupling: Coupling, strength: f64) {
    let bonds = if periodic && l > 2 { l } else { l - 1 };
    for s in 0..m.nrows() {
        match coupling {
            Coupling::Zz => {
                for i in 0..bonds {
                    m[(s, s)] += strength * z_sign(s, i) * z_sign(s, (i + 1) % l);
                }
            }
            Coupling::FieldZ => {
                for i in 0..l {
                    m[(s, s)] += strength * z_sign(s, i);
                }
            }
            Coupling::FieldX => {
                for i in 0..l {
                    m[(s ^ (1 << i), s)] += strength;
                }
            }
        }
    }
}

pub fn build_chain(spec: ChainSpec) -> Result<Chain> {
    spec.validate()?;
    let n = spec.dim();
    let mut d = DMatrix::zeros(n, n);
    for &(coupling, strength) in &spec.d_terms {
        add_term(&mut d, spec.l, spec.periodic, coupling, strength);
    }
    let mut v = DMatrix::zeros(n, n);
    add_term(&mut v, spec.l, spec.periodic, Coupling::FieldX, spec.g);
    Ok(Chain { spec, d, v })
}

/// Computational basis state `|index⟩` as (real, imaginary) parts.
pub fn basis_state(dim: usize, index: usize) -> Result<(DVector<f64>, DVector<f64>)> {
    if index >= dim {
        return Err(Error::Parameter(format!("basis index {index} outside dimension {dim}")));
    }
    let mut re = DVector::zeros(dim);
    re[index] = 1.0;
    Ok((re, DVector::zeros(dim)))
}

/// Eigendecompositions of `D + gV` and `D − gV` and the change of basis between them.
#[derive(Debug, Clone)]
pub struct StepPropagators {
    pub q_plus: DMatrix<f64>,
    pub q_minus: DMatrix<f64>,
    pub e_plus: DVector<f64>,
    pub e_minus: DVector<f64>,
    /// `Q₋ᵀ Q₊`, mapping +basis coordinates to −basis coordinates.
    pub plus_to_minus: DMatrix<f64>,
    /// Both signs share one Hamiltonian (zero drive), so no basis change is needed.
    pub shared: bool,
}

impl StepPropagators {
    pub fn new(chain: &Chain) -> StepPropagators {
        let plus = SymmetricEigen::new(&chain.d + &chain.v);
        // An absent drive leaves a single step Hamiltonian
        let shared = chain.v.iter().all(|&x| x == 0.0);
        let minus = if shared { plus.clone() } else { SymmetricEigen::new(&chain.d - &chain.v) };
        let plus_to_minus = minus.eigenvectors.transpose() * &plus.eigenvectors;
        StepPropagators {
            q_plus: plus.eigenvectors,
            q_minus: minus.eigenvectors,
            e_plus: plus.eigenvalues,
            e_minus: minus.eigenvalues,
            plus_to_minus,
            shared,
        }
    }

    fn basis(&self, positive: bool) -> (&DMatrix<f64>, &DVector<f64>) {
        if positive {
            (&self.q_plus, &self.e_plus)
        } else {
            (&self.q_minus, &self.e_minus)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTrajectory {
    pub times: Vec<f64>,
    pub energy_density: Vec<f64>,
    /// Infinite-temperature energy density `tr D / (J L 2^L)`.
    pub e_infinity: f64,
    pub max_norm_drift: f64,
}

/// Energy density `⟨D⟩/(J L)` of a state given as (real, imaginary) parts.
pub fn energy_density(chain: &Chain, re: &DVector<f64>, im: &DVector<f64>) -> f64 {
    let e = re.dot(&(&chain.d * re)) + im.dot(&(&chain.d * im));
    e / (chain.spec.energy_scale() * chain.spec.l as f64)
}

/// `⟨D⟩/(JL)` from eigenbasis coordinates: `⟨D ± gV⟩` from the eigenvalue
/// weights, minus the drive term evaluated in the computational basis.
fn eigenbasis_energy_density(chain: &Chain, props: &StepPropagators, positive: bool, re: &DVector<f64>, im: &DVector<f64>) -> f64 {
    let (q, e) = props.basis(positive);
    let h: f64 = e.iter().zip(re.iter().zip(im.iter())).map(|(e, (a, b))| e * (a * a + b * b)).sum();
    let drive = if chain.spec.g == 0.0 {
        0.0
    } else {
        let (pr, pi) = (q * re, q * im);
        pr.dot(&(&chain.v * &pr)) + pi.dot(&(&chain.v * &pi))
    };
    let sign = if positive { 1.0 } else { -1.0 };
    (h - sign * drive) / (chain.spec.energy_scale() * chain.spec.l as f64)
}

/// Evolves `state0` through the step sequence, recording every `record_every` steps.
pub fn evolve_step_drive(
    chain: &Chain,
    seq: &StepSequence,
    dt: f64,
    state0: &(DVector<f64>, DVector<f64>),
    record_every: usize,
) -> Result<EnergyTrajectory> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::Parameter(format!("dt must be positive, got {dt}")));
    }
    if record_every == 0 {
        return Err(Error::Parameter("record_every must be at least 1".into()));
    }
    let (re0, im0) = state0;
    let n = chain.d.nrows();
    if re0.len() != n || im0.len() != n {
        return Err(Error::Parameter(format!("state has dimension {}, chain has {n}", re0.len())));
    }
    let norm0 = (re0.norm_squared() + im0.norm_squared()).sqrt();
    if (norm0 - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition(format!("initial state has norm {norm0}")));
    }
    let props = StepPropagators::new(chain);
    let e_infinity = chain.d.trace() / (chain.spec.energy_scale() * chain.spec.l as f64 * n as f64);
    let mut traj = EnergyTrajectory {
        times: vec![0.0],
        energy_density: vec![energy_density(chain, re0, im0)],
        e_infinity,
        max_norm_drift: 0.0,
    };
    let Some(first) = seq.signs().first() else {
        return Ok(traj);
    };
    let mut positive = first.value() > 0;
    let (q, _) = props.basis(positive);
    let mut re = q.tr_mul(re0);
    let mut im = q.tr_mul(im0);
    for (step, s) in seq.signs().iter().enumerate() {
        let now_positive = s.value() > 0;
        if now_positive != positive && !props.shared {
            if now_positive {
                re = props.plus_to_minus.tr_mul(&re);
                im = props.plus_to_minus.tr_mul(&im);
            } else {
                re = &props.plus_to_minus * &re;
                im = &props.plus_to_minus * &im;
            }
            positive = now_positive;
        }
        let (_, e) = props.basis(positive);
        for k in 0..n {
            let (sin, cos) = (-e[k] * dt).sin_cos();
            let (a, b) = (re[k], im[k]);
            re[k] = a * cos - b * sin;
            im[k] = a * sin + b * cos;
        }
        let done = step + 1;
        if done % record_every == 0 || done == seq.len() {
            let drift = ((re.norm_squared() + im.norm_squared()).sqrt() - 1.0).abs();
            traj.max_norm_drift = traj.max_norm_drift.max(drift);
            if drift > NORM_DRIFT_LIMIT {
                return Err(Error::NormDrift { drift, step: done });
            }
            traj.times.push(done as f64 * dt);
            traj.energy_density.push(eigenbasis_energy_density(chain, &props, positive, &re, &im));
        }
    }
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeatingTime {
    Reached(f64),
    NotReached,
}

impl HeatingTime {
    pub fn time(self) -> Option<f64> {
        match self {
            HeatingTime::Reached(t) => Some(t),
            HeatingTime::NotReached => None,
        }
    }
}

/// First recorded time at which the energy density has moved the fraction
/// `threshold_fraction` of the way from its initial value to `e_infinity`.
pub fn heating_time(traj: &EnergyTrajectory, threshold_fraction: f64) -> Result<HeatingTime> {
    if !(threshold_fraction > 0.0 && threshold_fraction < 1.0) {
        return Err(Error::Parameter(format!("threshold fraction must lie in (0, 1), got {threshold_fraction}")));
    }
    let Some(&e0) = traj.energy_density.first() else {
        return Ok(HeatingTime::NotReached);
    };
    let gap = traj.e_infinity - e0;
    if gap.abs() < 1e-14 {
        return Ok(HeatingTime::NotReached);
    }
    let target = e0 + threshold_fraction * gap;
    Ok(traj
        .times
        .iter()
        .zip(&traj.energy_density)
        .find(|(_, &e)| (e - target) * gap.signum() >= 0.0)
        .map_or(HeatingTime::NotReached, |(&t, _)| HeatingTime::Reached(t)))
}
