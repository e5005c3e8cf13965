//! Discrete Fer recursion for a driven qubit.
//!
//! Step Hamiltonians `H_n = Jσz + g s_n σx` act for `Δt` each. One iteration
//! splits `H_n = D + V_n`, integrates the generator `A_{n+1} − A_n = −iΔt V_n`
//! with `A_0 = 0`, and moves to the frame `P_n = e^{A_n}`:
//!
//! `H'_n = (i/Δt) log(P†_{n+1} e^{−iΔt H_n} P_n)`.
//!
//! The logarithm is evaluated exactly, so the frame change holds to rounding.
//! Generators are anti-Hermitian; they are stored as Hermitian `K_n` with
//! `A_n = −i K_n`.

mod mori_magnus;
mod su2;

pub use mori_magnus::{
    block_expansion, block_hamiltonian, mori_magnus_terms, MoriMagnusTable, DEFAULT_DT_FIT,
};
pub use su2::{max_abs_diff, principal_log_su2, Axis, Mat2, Su2Operator};

use crate::drives::StepSequence;
use crate::error::{Error, Result};
use crate::spectra::{binned_median_envelope, bins_for_resolution, dft_real, fit_power_law, PowerLawFit, Spectrum};

/// Largest `Δt ‖H_n‖` accepted by [`fer_iterate`].
pub const BRANCH_GUARD: f64 = 2.0;
/// Envelope bins whose median falls below this are treated as numerical floor.
pub const SPECTRAL_FLOOR: f64 = 1e3 * f64::MIN_POSITIVE;

/// Dressed qubit problem after `q` Fer iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct FerState {
    pub q: usize,
    pub d: Su2Operator,
    pub v: Vec<Su2Operator>,
    pub dt: f64,
}

impl FerState {
    /// Splits step Hamiltonians into their mean and zero-mean remainder.
    pub fn from_hamiltonians(h: &[Su2Operator], dt: f64, q: usize) -> FerState {
        let d = Su2Operator::mean(h);
        FerState { q, d, v: h.iter().map(|x| *x - d).collect(), dt }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    pub fn hamiltonians(&self) -> Vec<Su2Operator> {
        self.v.iter().map(|v| self.d + *v).collect()
    }

    /// `max_n ‖V_n‖`.
    pub fn max_drive_norm(&self) -> f64 {
        self.v.iter().map(Su2Operator::norm).fold(0.0, f64::max)
    }

    /// Largest `|V_n·e|` over steps for each Pauli axis `(x, y, z)`.
    pub fn max_components(&self) -> [f64; 3] {
        let m = |a: Axis| self.v.iter().map(|v| v.component(a).abs()).fold(0.0, f64::max);
        [m(Axis::X), m(Axis::Y), m(Axis::Z)]
    }

    /// Series of one Pauli coefficient of the drive.
    pub fn series(&self, axis: Axis) -> Vec<f64> {
        self.v.iter().map(|v| v.component(axis)).collect()
    }
}

/// `H_n = Jσz + g s_n σx`, split into mean and drive.
pub fn step_hamiltonians(seq: &StepSequence, j: f64, g: f64) -> Result<FerState> {
    if seq.is_empty() || !j.is_finite() || !g.is_finite() {
        return Err(Error::Parameter("need a non-empty sequence and finite J, g".into()));
    }
    let h: Vec<Su2Operator> = seq.signs().iter().map(|s| Su2Operator::new(0.0, g * s.as_f64(), 0.0, j)).collect();
    Ok(FerState::from_hamiltonians(&h, seq.dt(), 0))
}

/// Cumulative generator `K_n = Δt Σ_{m<n} V_m` for `n = 0..=N`, with `A_n = −iK_n`.
pub fn solve_generator(state: &FerState) -> Result<Vec<Su2Operator>> {
    let scale = state.v.iter().map(Su2Operator::max_abs_coefficient).fold(1.0, f64::max);
    let mean = Su2Operator::mean(&state.v);
    if mean.max_abs_coefficient() > 1e-12 * scale {
        return Err(Error::Precondition(format!("drive has non-zero mean {mean:?}")));
    }
    let mut k = Vec::with_capacity(state.v.len() + 1);
    let mut acc = Su2Operator::ZERO;
    k.push(acc);
    for v in &state.v {
        acc += *v * state.dt;
        k.push(acc);
    }
    Ok(k)
}

fn check_branch(state: &FerState) -> Result<()> {
    let worst = state.hamiltonians().iter().map(|h| h.norm() * state.dt).fold(0.0, f64::max);
    if worst > BRANCH_GUARD {
        return Err(Error::Branch { phase: worst });
    }
    Ok(())
}

/// One exact Fer iteration.
pub fn fer_iterate(state: &FerState) -> Result<FerState> {
    check_branch(state)?;
    let k = solve_generator(state)?;
    let dt = state.dt;
    let frames: Vec<Mat2> = k.iter().map(|kn| kn.propagator(1.0)).collect();
    let dressed = state
        .hamiltonians()
        .iter()
        .enumerate()
        .map(|(n, h)| {
            let m = frames[n + 1].adjoint() * h.propagator(dt) * frames[n];
            principal_log_su2(&m).map(|x| x * (1.0 / dt))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FerState::from_hamiltonians(&dressed, dt, state.q + 1))
}

/// Second-order expansion of [`fer_iterate`], for comparison only:
/// `H'_n ≈ D + (i/2)[K_n + K_{n+1}, H_n] + (i/2)[V_n, K_n]`.
pub fn fer_iterate_truncated(state: &FerState) -> Result<FerState> {
    let k = solve_generator(state)?;
    let dressed: Vec<Su2Operator> = state
        .hamiltonians()
        .iter()
        .enumerate()
        .map(|(n, h)| {
            let ksum = k[n] + k[n + 1];
            state.d + ksum.i_commutator(h) * 0.5 + state.v[n].i_commutator(&k[n]) * 0.5
        })
        .collect();
    Ok(FerState::from_hamiltonians(&dressed, state.dt, state.q + 1))
}

/// Time-ordered product `e^{−iΔtH_{N−1}} ⋯ e^{−iΔtH_0}`.
pub fn time_ordered_propagator(h: &[Su2Operator], dt: f64) -> Mat2 {
    h.iter().fold(Mat2::identity(), |u, hn| hn.propagator(dt) * u)
}

/// `‖U'(T) − P†_N U(T) P_0‖` (entry-wise max) for consecutive iterations.
pub fn frame_change_defect(before: &FerState, after: &FerState) -> Result<f64> {
    let k = solve_generator(before)?;
    let bare = time_ordered_propagator(&before.hamiltonians(), before.dt);
    let dressed = time_ordered_propagator(&after.hamiltonians(), after.dt);
    let p0 = k[0].propagator(1.0);
    let pn = k[k.len() - 1].propagator(1.0);
    Ok(max_abs_diff(&dressed, &(pn.adjoint() * bare * p0)))
}

/// Ratio of the largest σy coefficient to the largest σx or σz coefficient.
pub fn sigma_y_dominance(state: &FerState) -> f64 {
    let [x, y, z] = state.max_components();
    y / x.max(z)
}

/// Axis plotted at iteration `q`: x for even `q`, y for odd `q`.
pub fn plotting_axis(q: usize) -> Axis {
    if q % 2 == 0 {
        Axis::X
    } else {
        Axis::Y
    }
}

/// Mean-subtracted spectrum of one Pauli coefficient of the drive.
pub fn dressed_spectrum(state: &FerState, axis: Axis) -> Result<Spectrum> {
    if state.len() < 4 {
        return Err(Error::Parameter(format!("need at least 4 steps, got {}", state.len())));
    }
    dft_real(&state.series(axis), true)
}

/// Near-origin power law of the dressed spectrum with the usual trimming.
pub fn dressed_slope(state: &FerState, axis: Axis, omega_max: f64, per_decade: f64, trim: f64) -> Result<PowerLawFit> {
    let spec = dressed_spectrum(state, axis)?;
    let bins = bins_for_resolution(&spec, omega_max, per_decade);
    let env = binned_median_envelope(&spec, omega_max, bins)?.trimmed(trim, SPECTRAL_FLOOR);
    fit_power_law(&env)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drives::{rmd_sequence, thue_morse_word, StepSequence};
    use crate::spectra::dft;
    use num_complex::Complex64;

    #[test]
    fn step_hamiltonian_examples() {
        let s = StepSequence::custom(&[1, -1], 1.0).unwrap();
        let st = step_hamiltonians(&s, 1.0, 0.5).unwrap();
        assert_eq!(st.d, Su2Operator::new(0.0, 0.0, 0.0, 1.0));
        assert_eq!(st.v, vec![Su2Operator::new(0.0, 0.5, 0.0, 0.0), Su2Operator::new(0.0, -0.5, 0.0, 0.0)]);

        let s = StepSequence::custom(&[1], 1.0).unwrap();
        let st = step_hamiltonians(&s, 1.0, 1.0).unwrap();
        assert_eq!(st.d, Su2Operator::new(0.0, 1.0, 0.0, 1.0));
        assert_eq!(st.v, vec![Su2Operator::ZERO]);

        let st = step_hamiltonians(&thue_morse_word(4).unwrap(), 1.0, 0.0).unwrap();
        assert!(st.v.iter().all(|v| *v == Su2Operator::ZERO));
    }

    #[test]
    fn generator_examples() {
        let v = Su2Operator::new(0.0, 0.5, 0.1, 0.0);
        let st = FerState { q: 0, d: Su2Operator::ZERO, v: vec![v, -v], dt: 0.1 };
        let k = solve_generator(&st).unwrap();
        assert_eq!(k[0], Su2Operator::ZERO);
        assert!((k[1] - v * 0.1).max_abs_coefficient() < 1e-16);
        assert!(k[2].max_abs_coefficient() < 1e-16);

        let zero = FerState { q: 0, d: Su2Operator::ZERO, v: vec![Su2Operator::ZERO; 5], dt: 0.1 };
        assert!(solve_generator(&zero).unwrap().iter().all(|x| *x == Su2Operator::ZERO));

        let biased = FerState { q: 0, d: Su2Operator::ZERO, v: vec![v, v], dt: 0.1 };
        assert!(matches!(solve_generator(&biased), Err(Error::Precondition(_))));
    }

    #[test]
    fn generator_obeys_frequency_domain_relation() {
        let seq = thue_morse_word(3).unwrap().with_dt(0.05).unwrap();
        let st = step_hamiltonians(&seq, 1.0, 0.3).unwrap();
        let k = solve_generator(&st).unwrap();
        let kx: Vec<f64> = k[..st.len()].iter().map(|x| x.cx).collect();
        let kt = crate::spectra::dft_real(&kx, false).unwrap();
        let vt = dft(&seq, false).unwrap();
        for i in 0..kt.len() {
            let w = kt.omega[i];
            // Ã = −iK̃ = −iΔt Ṽ / (e^{iΩ} − 1)
            let expected = vt.value[i] * 0.3 * 0.05 / (Complex64::from_polar(1.0, w) - 1.0);
            assert!((kt.value[i] - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn zero_drive_is_a_fixed_point() {
        let h = vec![Su2Operator::new(0.1, 0.2, 0.0, 1.0); 8];
        let st = FerState::from_hamiltonians(&h, 0.05, 0);
        let next = fer_iterate(&st).unwrap();
        assert!((next.d - st.d).max_abs_coefficient() < 1e-13);
        assert!(next.max_drive_norm() < 1e-13);
    }

    #[test]
    fn first_dressed_drive_is_sigma_y() {
        let seq = thue_morse_word(8).unwrap().with_dt(0.05).unwrap();
        let st = step_hamiltonians(&seq, 1.0, 0.1).unwrap();
        let next = fer_iterate(&st).unwrap();
        assert!(sigma_y_dominance(&next) >= 3.0, "{:?}", next.max_components());
    }

    #[test]
    fn frame_change_is_exact() {
        let seq = thue_morse_word(9).unwrap().with_dt(0.05).unwrap();
        let mut st = step_hamiltonians(&seq, 1.0, 0.2).unwrap();
        for _ in 0..3 {
            let next = fer_iterate(&st).unwrap();
            assert!(frame_change_defect(&st, &next).unwrap() < 1e-9);
            st = next;
        }
    }

    #[test]
    fn truncated_agrees_to_leading_order() {
        let seq = rmd_sequence(3, &crate::drives::random_block_signs(32, 5)).unwrap().with_dt(0.02).unwrap();
        let st = step_hamiltonians(&seq, 1.0, 0.05).unwrap();
        let exact = fer_iterate(&st).unwrap();
        let approx = fer_iterate_truncated(&st).unwrap();
        let scale = exact.max_drive_norm();
        let err = exact.v.iter().zip(&approx.v).map(|(a, b)| (*a - *b).norm()).fold(0.0, f64::max);
        assert!(err < 0.05 * scale, "{err} vs {scale}");
    }

    #[test]
    fn branch_guard_rejects_large_steps() {
        let seq = thue_morse_word(3).unwrap().with_dt(3.0).unwrap();
        let st = step_hamiltonians(&seq, 1.0, 0.1).unwrap();
        assert!(matches!(fer_iterate(&st), Err(Error::Branch { .. })));
    }

    #[test]
    fn bare_spectrum_is_scaled_thue_morse() {
        let seq = thue_morse_word(6).unwrap();
        let st = step_hamiltonians(&seq, 1.0, 0.25).unwrap();
        let a = dressed_spectrum(&st, Axis::X).unwrap();
        let b = dft(&seq, true).unwrap();
        for (x, y) in a.value.iter().zip(&b.value) {
            assert!((x - y * 0.25).norm() < 1e-14);
        }
    }
}
