//! Mori-Magnus recursion for Thue-Morse blocks.
//!
//! The depth-`m` block with overall sign `±` has an effective Hamiltonian
//! `H^{(±)}_m(τ) = Σ_j τ^j h^{(±)}_{m,j}` in `τ = 2^m Δt`. For `m < r`,
//! `h_{r,m} = 2^{−m(r−m)} (h^{(+)}_{m,m} + h^{(−)}_{m,m}) / 2`.

use super::su2::{principal_log_su2, Su2Operator};
use crate::drives::thue_morse_word;
use crate::error::{Error, Result};
use crate::fit::lstsq;

/// Default fitting steps: 12 log-spaced values on `[1e−3, 1e−2]`.
pub const DEFAULT_DT_FIT: [f64; 12] = [
    1.0e-3,
    1.232846739442066e-3,
    1.519911082952934e-3,
    1.873817422860384e-3,
    2.310129700083159e-3,
    2.848035868435802e-3,
    3.511191734215131e-3,
    4.328761281083057e-3,
    5.336699231206307e-3,
    6.579332246575682e-3,
    8.111308307896872e-3,
    1.0e-2,
];

/// Largest order supported by [`mori_magnus_terms`].
pub const MAX_ORDER: usize = 3;
/// Fits whose scaled design matrix is worse conditioned than this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Effective Hamiltonian `(i/(2^depth Δt)) log U` of one signed Thue-Morse block.
pub fn block_hamiltonian(d: &Su2Operator, v_amp: &Su2Operator, depth: u32, sign: f64, dt: f64) -> Result<Su2Operator> {
    let seq = thue_morse_word(depth)?;
    let u = seq
        .signs()
        .iter()
        .fold(super::Mat2::identity(), |u, s| (*d + *v_amp * (sign * s.as_f64())).propagator(dt) * u);
    let tau = f64::from(1u32 << depth) * dt;
    Ok(principal_log_su2(&u)? * (1.0 / tau))
}

/// Polynomial coefficients `h_j`, `j = 0..=degree`, of the block Hamiltonian in `τ = 2^depth Δt`.
pub fn block_expansion(
    d: &Su2Operator,
    v_amp: &Su2Operator,
    depth: u32,
    sign: f64,
    dt_fit: &[f64],
    degree: usize,
) -> Result<Vec<Su2Operator>> {
    if dt_fit.len() <= degree {
        return Err(Error::Parameter(format!("{} fit points cannot determine degree {degree}", dt_fit.len())));
    }
    let scale = f64::from(1u32 << depth);
    let taus: Vec<f64> = dt_fit.iter().map(|dt| dt * scale).collect();
    let tau_max = taus.iter().copied().fold(0.0, f64::max);
    let rows: Vec<Vec<f64>> = taus.iter().map(|t| (0..=degree).map(|j| (t / tau_max).powi(j as i32)).collect()).collect();
    let hs = dt_fit.iter().map(|&dt| block_hamiltonian(d, v_amp, depth, sign, dt)).collect::<Result<Vec<_>>>()?;
    let mut coeffs = vec![[0.0; 4]; degree + 1];
    for comp in 0..4 {
        let y: Vec<f64> = hs.iter().map(|h| h.coefficients()[comp]).collect();
        let sol = lstsq(&rows, &y)?;
        if sol.condition > MAX_CONDITION {
            return Err(Error::Conditioning { condition: sol.condition });
        }
        for (j, c) in sol.coefficients.iter().enumerate() {
            coeffs[j][comp] = c / tau_max.powi(j as i32);
        }
    }
    Ok(coeffs.iter().map(|c| Su2Operator::new(c[0], c[1], c[2], c[3])).collect())
}

/// Recursion table `h[r'][m]` for `r' = 1..=r`, `m = 0..=min(m_max, r'−1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MoriMagnusTable {
    pub r: u32,
    pub m_max: usize,
    pub degree: usize,
    /// `h^{(+)}_{m,m}` for `m = 0..=m_max`.
    pub base_plus: Vec<Su2Operator>,
    /// `h^{(−)}_{m,m}` for `m = 0..=m_max`.
    pub base_minus: Vec<Su2Operator>,
    /// `h[r'][m]`; row 0 is empty.
    pub h: Vec<Vec<Su2Operator>>,
}

impl MoriMagnusTable {
    pub fn get(&self, r: u32, m: usize) -> Option<&Su2Operator> {
        self.h.get(r as usize).and_then(|row| row.get(m))
    }
}

/// Builds the Mori-Magnus table from fitted base data.
pub fn mori_magnus_terms(
    d: &Su2Operator,
    v_amp: &Su2Operator,
    r: u32,
    m_max: usize,
    dt_fit: &[f64],
) -> Result<MoriMagnusTable> {
    if m_max > MAX_ORDER || (r as usize) < m_max || r > 20 {
        return Err(Error::Parameter(format!("need m_max <= {MAX_ORDER} and m_max <= r <= 20 (r = {r}, m_max = {m_max})")));
    }
    if dt_fit.len() < m_max + 2 {
        return Err(Error::Parameter(format!("need at least {} fit steps, got {}", m_max + 2, dt_fit.len())));
    }
    let (lo, hi) = dt_fit.iter().fold((f64::INFINITY, 0.0f64), |(a, b), &x| (a.min(x), b.max(x)));
    if !(lo > 0.0 && hi / lo >= 10.0 * (1.0 - 1e-12)) {
        return Err(Error::Parameter("fit steps must be positive and span a decade".into()));
    }
    let degree = (dt_fit.len() - 1).min(m_max + 5);
    let mut base_plus = Vec::with_capacity(m_max + 1);
    let mut base_minus = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        base_plus.push(block_expansion(d, v_amp, m as u32, 1.0, dt_fit, degree)?[m]);
        base_minus.push(block_expansion(d, v_amp, m as u32, -1.0, dt_fit, degree)?[m]);
    }
    let h = (0..=r)
        .map(|rr| {
            (0..=m_max.min((rr as usize).saturating_sub(1)))
                .filter(|_| rr > 0)
                .map(|m| {
                    let k = (m * (rr as usize - m)) as i32;
                    (base_plus[m] + base_minus[m]) * (0.5 * 2f64.powi(-k))
                })
                .collect()
        })
        .collect();
    Ok(MoriMagnusTable { r, m_max, degree, base_plus, base_minus, h })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d() -> Su2Operator {
        Su2Operator::new(0.0, 0.0, 0.0, 1.0)
    }

    fn v(g: f64) -> Su2Operator {
        Su2Operator::new(0.0, g, 0.0, 0.0)
    }

    #[test]
    fn default_grid_is_log_spaced() {
        let g = crate::arithmetic::log_grid(1e-3, 1e-2, 12);
        for (a, b) in g.iter().zip(DEFAULT_DT_FIT) {
            assert!((a / b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn zeroth_order_is_static_part() {
        let t = mori_magnus_terms(&d(), &v(0.5), 4, 2, &DEFAULT_DT_FIT).unwrap();
        for r in 1..=4 {
            assert!((*t.get(r, 0).unwrap() - d()).max_abs_coefficient() < 1e-9);
        }
    }

    #[test]
    fn static_hamiltonian_has_no_corrections() {
        let t = mori_magnus_terms(&d(), &v(0.0), 3, 2, &DEFAULT_DT_FIT).unwrap();
        for r in 1..=3u32 {
            for m in 1..(r as usize).min(3) {
                assert!(t.get(r, m).unwrap().max_abs_coefficient() < 1e-8);
            }
        }
    }

    #[test]
    fn recursion_matches_direct_block_at_order_one() {
        let t = mori_magnus_terms(&d(), &v(0.5), 3, 1, &DEFAULT_DT_FIT).unwrap();
        let direct = block_expansion(&d(), &v(0.5), 3, 1.0, &DEFAULT_DT_FIT, t.degree).unwrap()[1];
        assert!((*t.get(3, 1).unwrap() - direct).max_abs_coefficient() < 1e-6);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(mori_magnus_terms(&d(), &v(0.5), 2, 4, &DEFAULT_DT_FIT).is_err());
        assert!(mori_magnus_terms(&d(), &v(0.5), 1, 2, &DEFAULT_DT_FIT).is_err());
        assert!(mori_magnus_terms(&d(), &v(0.5), 3, 2, &DEFAULT_DT_FIT[..3]).is_err());
        assert!(mori_magnus_terms(&d(), &v(0.5), 3, 1, &[1e-3, 2e-3, 3e-3]).is_err());
    }
}
