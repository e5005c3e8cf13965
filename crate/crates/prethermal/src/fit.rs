//! Least-squares helpers shared by the spectral, heating and flow analyses.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Ordinary least-squares straight line `y = slope·x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms_residual: f64,
}

pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::Fit(format!("line fit needs >= 2 paired points, got {} and {}", x.len(), y.len())));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("all abscissae coincide".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum::<f64>() / n).sqrt();
    Ok(LineFit { slope, intercept, rms_residual: rms })
}

/// Solution of a dense linear least-squares problem.
#[derive(Debug, Clone, PartialEq)]
pub struct LstsqSolution {
    pub coefficients: Vec<f64>,
    pub rms_residual: f64,
    pub condition: f64,
}

/// Minimises `‖A c − y‖₂` through an SVD; `rows[i]` is row `i` of `A`.
pub fn lstsq(rows: &[Vec<f64>], y: &[f64]) -> Result<LstsqSolution> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 || n == 0 || m != y.len() || m < n {
        return Err(Error::Fit(format!("least squares needs m >= n > 0 (m = {m}, n = {n})")));
    }
    let a = DMatrix::from_fn(m, n, |i, j| rows[i][j]);
    let b = DVector::from_column_slice(y);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let condition = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    let c = svd.solve(&b, smax * 1e-15).map_err(|e| Error::Fit(e.to_string()))?;
    let resid = &a * &c - &b;
    Ok(LstsqSolution {
        coefficients: c.iter().copied().collect(),
        rms_residual: (resid.norm_squared() / m as f64).sqrt(),
        condition,
    })
}

/// Golden-section minimisation of a unimodal function on `[lo, hi]`.
pub fn golden_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - inv_phi * (hi - lo);
    let mut d = lo + inv_phi * (hi - lo);
    let mut fc = f(c);
    let mut fd = f(d);
    while (hi - lo).abs() > tol * (1.0 + c.abs()) {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - inv_phi * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + inv_phi * (hi - lo);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Result of a fit that is linear in some coefficients and non-linear in one parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparableFit {
    pub beta: f64,
    pub coefficients: Vec<f64>,
    pub rms_residual: f64,
    /// True when the optimum sits on an end of the search bracket.
    pub at_boundary: bool,
}

/// Fits `y ≈ Σ_j c_j φ_j(β, x)` over `β ∈ [lo, hi]` by a grid scan followed by golden refinement.
pub fn separable_fit(
    x: &[f64],
    y: &[f64],
    basis: impl Fn(f64, f64) -> Vec<f64>,
    lo: f64,
    hi: f64,
) -> Result<SeparableFit> {
    let solve = |beta: f64| -> Option<LstsqSolution> {
        let rows: Vec<Vec<f64>> = x.iter().map(|&xi| basis(beta, xi)).collect();
        if rows.iter().flatten().any(|v| !v.is_finite()) {
            return None;
        }
        lstsq(&rows, y).ok().filter(|s| s.rms_residual.is_finite())
    };
    let cost = |beta: f64| solve(beta).map_or(f64::INFINITY, |s| s.rms_residual);
    const GRID: usize = 400;
    let step = (hi - lo) / GRID as f64;
    let (mut best_i, mut best_c) = (0usize, f64::INFINITY);
    for i in 0..=GRID {
        let c = cost(lo + step * i as f64);
        if c < best_c {
            best_c = c;
            best_i = i;
        }
    }
    if !best_c.is_finite() {
        return Err(Error::Fit(format!("no finite residual for beta in [{lo}, {hi}]")));
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    let (beta, _) = golden_min(cost, a, b, 1e-10);
    let sol = solve(beta).ok_or_else(|| Error::Fit(format!("refinement failed at beta = {beta}")))?;
    Ok(SeparableFit {
        beta,
        coefficients: sol.coefficients,
        rms_residual: sol.rms_residual,
        at_boundary: best_i == 0 || best_i == GRID,
    })
}

/// Fits `y ≈ a + c·x^β` and returns β; used for stretched-exponential growth laws.
pub fn fit_offset_power(x: &[f64], y: &[f64], lo: f64, hi: f64) -> Result<SeparableFit> {
    separable_fit(x, y, |b, xi| vec![1.0, xi.powf(b)], lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn line_recovers_exact_data() {
        let x: Vec<f64> = (0..10).map(f64::from).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v - 2.0).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 3.0).abs() < 1e-12 && (f.intercept + 2.0).abs() < 1e-12);
        assert!(f.rms_residual < 1e-12);
    }

    #[test]
    fn lstsq_polynomial() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 / 19.0).collect();
        let rows: Vec<Vec<f64>> = x.iter().map(|&t| vec![1.0, t, t * t]).collect();
        let y: Vec<f64> = x.iter().map(|&t| 1.0 - 2.0 * t + 0.5 * t * t).collect();
        let s = lstsq(&rows, &y).unwrap();
        for (c, e) in s.coefficients.iter().zip([1.0, -2.0, 0.5]) {
            assert!((c - e).abs() < 1e-10);
        }
    }

    #[test]
    fn golden_finds_parabola_minimum() {
        let (x, _) = golden_min(|x| (x - 1.3).powi(2), -5.0, 5.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-8);
    }

    #[test]
    fn offset_power_recovers_exponent() {
        let x: Vec<f64> = (1..30).map(|i| 100.0 * 1.2f64.powi(i)).collect();
        let y: Vec<f64> = x.iter().map(|v| 4.0 + 2.5 * v.powf(0.37)).collect();
        let f = fit_offset_power(&x, &y, 0.05, 2.0).unwrap();
        assert!((f.beta - 0.37).abs() < 1e-6, "{f:?}");
    }
}
