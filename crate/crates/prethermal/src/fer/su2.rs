use std::f64::consts::PI;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::Matrix2;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Mat2 = Matrix2<Complex64>;

/// Hermitian qubit operator `c0 I + cx σx + cy σy + cz σz`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Su2Operator {
    pub c0: f64,
    pub cx: f64,
    pub cy: f64,
    pub cz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Su2Operator {
    pub const ZERO: Su2Operator = Su2Operator { c0: 0.0, cx: 0.0, cy: 0.0, cz: 0.0 };

    pub fn new(c0: f64, cx: f64, cy: f64, cz: f64) -> Su2Operator {
        Su2Operator { c0, cx, cy, cz }
    }

    pub fn component(&self, axis: Axis) -> f64 {
        match axis {
            Axis::X => self.cx,
            Axis::Y => self.cy,
            Axis::Z => self.cz,
        }
    }

    pub fn coefficients(&self) -> [f64; 4] {
        [self.c0, self.cx, self.cy, self.cz]
    }

    pub fn bloch_radius(&self) -> f64 {
        (self.cx * self.cx + self.cy * self.cy + self.cz * self.cz).sqrt()
    }

    /// Operator norm `|c0| + |c⃗|`.
    pub fn norm(&self) -> f64 {
        self.c0.abs() + self.bloch_radius()
    }

    pub fn max_abs_coefficient(&self) -> f64 {
        self.coefficients().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `i[self, other]`, which for Pauli vectors equals `−2 (a⃗ × b⃗)·σ⃗`.
    pub fn i_commutator(&self, o: &Su2Operator) -> Su2Operator {
        Su2Operator::new(
            0.0,
            -2.0 * (self.cy * o.cz - self.cz * o.cy),
            -2.0 * (self.cz * o.cx - self.cx * o.cz),
            -2.0 * (self.cx * o.cy - self.cy * o.cx),
        )
    }

    pub fn to_matrix(&self) -> Mat2 {
        Mat2::new(c(self.c0 + self.cz, 0.0), c(self.cx, -self.cy), c(self.cx, self.cy), c(self.c0 - self.cz, 0.0))
    }

    /// `e^{−i t H}` in closed form.
    pub fn propagator(&self, t: f64) -> Mat2 {
        let r = self.bloch_radius();
        let (s, co) = (t * r).sin_cos();
        // sin(tr)/r, continuous at r = 0
        let sr = if r > 0.0 { s / r } else { t };
        let ph = Complex64::from_polar(1.0, -t * self.c0);
        let m = Mat2::new(
            c(co, -sr * self.cz),
            c(-sr * self.cy, -sr * self.cx),
            c(sr * self.cy, -sr * self.cx),
            c(co, sr * self.cz),
        );
        m * ph
    }

    pub fn mean(ops: &[Su2Operator]) -> Su2Operator {
        let n = ops.len().max(1) as f64;
        ops.iter().fold(Su2Operator::ZERO, |a, b| a + *b) * (1.0 / n)
    }
}

impl Add for Su2Operator {
    type Output = Su2Operator;
    fn add(self, o: Su2Operator) -> Su2Operator {
        Su2Operator::new(self.c0 + o.c0, self.cx + o.cx, self.cy + o.cy, self.cz + o.cz)
    }
}

impl AddAssign for Su2Operator {
    fn add_assign(&mut self, o: Su2Operator) {
        *self = *self + o;
    }
}

impl Sub for Su2Operator {
    type Output = Su2Operator;
    fn sub(self, o: Su2Operator) -> Su2Operator {
        self + (-o)
    }
}

impl Neg for Su2Operator {
    type Output = Su2Operator;
    fn neg(self) -> Su2Operator {
        self * -1.0
    }
}

impl Mul<f64> for Su2Operator {
    type Output = Su2Operator;
    fn mul(self, k: f64) -> Su2Operator {
        Su2Operator::new(self.c0 * k, self.cx * k, self.cy * k, self.cz * k)
    }
}

/// Largest entry-wise modulus of `A − B`.
pub fn max_abs_diff(a: &Mat2, b: &Mat2) -> f64 {
    (a - b).iter().fold(0.0, |m, z| m.max(z.norm()))
}

/// Tolerance on `U†U − I` accepted by [`principal_log_su2`].
pub const UNITARITY_TOL: f64 = 1e-10;
/// Eigenphases closer than this to ±π are rejected as ambiguous.
pub const BRANCH_MARGIN: f64 = 1e-9;

/// Hermitian `H` with `e^{−iH} = U` and eigenvalues in `(−π, π)`.
///
/// `U = e^{iα}(cos θ I − i sin θ n̂·σ⃗)`; the two lifts of `α` (differing by π)
/// are tried and the one whose eigenphases `α ± θ` are smallest is kept.
pub fn principal_log_su2(u: &Mat2) -> Result<Su2Operator> {
    let defect = max_abs_diff(&(u.adjoint() * u), &Mat2::identity());
    if defect > UNITARITY_TOL {
        return Err(Error::Precondition(format!("matrix is not unitary (|U'U - I| = {defect:e})")));
    }
    let alpha0 = 0.5 * u.determinant().arg();
    let mut best: Option<(f64, Su2Operator)> = None;
    for alpha in [alpha0, alpha0 - PI.copysign(alpha0)] {
        let w = u * Complex64::from_polar(1.0, -alpha);
        let cos_t = 0.5 * (w[(0, 0)] + w[(1, 1)]).re;
        // w = cos θ I − i sin θ n·σ: read sin θ n_k from the σ_k components
        let snx = -0.5 * (w[(0, 1)] + w[(1, 0)]).im;
        let sny = 0.5 * (w[(1, 0)] - w[(0, 1)]).re;
        let snz = -0.5 * (w[(0, 0)] - w[(1, 1)]).im;
        let s = (snx * snx + sny * sny + snz * snz).sqrt();
        let theta = s.atan2(cos_t);
        let f = if s > 1e-300 { theta / s } else { 1.0 };
        let h = Su2Operator::new(-alpha, f * snx, f * sny, f * snz);
        let worst = alpha.abs() + theta;
        if best.as_ref().map_or(true, |(b, _)| worst < *b) {
            best = Some((worst, h));
        }
    }
    let (worst, h) = best.expect("two candidates evaluated");
    if worst >= PI - BRANCH_MARGIN {
        return Err(Error::Branch { phase: worst });
    }
    Ok(h)
}
