//! Operator norms and eigenphases of small matrices.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::cmatrix::solve;
use super::{CMatrix, RepError};

const MAX_ITERATIONS: usize = 100_000;
const CONVERGENCE: f64 = 1e-12;

/// Largest singular value.
///
/// Power iteration on `A = M M*`, accelerated by repeated squaring: after `t`
/// rounds the iterate is `A^(2^t)` applied to the standard basis, and the
/// Rayleigh quotient of its largest column converges to the top eigenvalue.
pub fn op_norm(m: &CMatrix) -> Result<f64, RepError> {
    let d = m.dim();
    if d == 0 {
        return Ok(0.0);
    }
    let a = m.mul(&m.adjoint());
    let scale = a.trace().re;
    if scale <= 0.0 {
        return Ok(0.0);
    }
    let mut p = a.scale_re(1.0 / scale);
    let mut last = f64::NAN;
    for _ in 0..MAX_ITERATIONS {
        let lambda = top_rayleigh(&a, &p);
        if (lambda - last).abs() <= CONVERGENCE * lambda.max(1.0) {
            let norm = lambda.max(0.0).sqrt();
            debug_assert!(m.frobenius_sq() <= d as f64 * norm * norm * (1.0 + 1e-9) + 1e-12);
            return Ok(norm);
        }
        last = lambda;
        p = p.mul(&p);
        let t = p.trace().re;
        if !(t > 0.0) {
            // fully converged to something tiny; keep the last estimate
            return Ok(last.max(0.0).sqrt());
        }
        p = p.scale_re(1.0 / t);
    }
    Err(RepError::NoConvergence)
}

/// Rayleigh quotient of `a` at the largest column of `p`.
fn top_rayleigh(a: &CMatrix, p: &CMatrix) -> f64 {
    let d = a.dim();
    let col = (0..d)
        .max_by(|&x, &y| col_norm(p, x).total_cmp(&col_norm(p, y)))
        .expect("nonempty");
    let v: Vec<Complex64> = (0..d).map(|r| p.get(r, col)).collect();
    let av = a.mul_vec(&v);
    let num: Complex64 = v.iter().zip(&av).map(|(x, y)| x.conj() * y).sum();
    let den: f64 = v.iter().map(|x| x.norm_sqr()).sum();
    num.re / den
}

fn col_norm(p: &CMatrix, c: usize) -> f64 {
    (0..p.dim()).map(|r| p.get(r, c).norm_sqr()).sum()
}

/// Unitarity tolerance accepted by [`eigenphases`].
pub const UNITARY_TOL: f64 = 1e-8;

/// Coefficients `c_0..c_d` (with `c_d = 1`) of `det(zI - M)`, by Faddeev–LeVerrier.
pub fn char_poly(m: &CMatrix) -> Vec<Complex64> {
    let d = m.dim();
    let mut coeffs = vec![Complex64::new(0.0, 0.0); d + 1];
    coeffs[d] = Complex64::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(d);
    for k in 1..=d {
        mk = m.mul(&mk.add(&CMatrix::identity(d).scale(coeffs[d + 1 - k])));
        coeffs[d - k] = -mk.trace() / k as f64;
    }
    coeffs
}

/// Roots of a monic polynomial of degree at most 4 in closed form.
pub fn roots_closed_form(c: &[Complex64]) -> Vec<Complex64> {
    let deg = c.len() - 1;
    let z = Complex64::new(0.0, 0.0);
    match deg {
        0 => vec![],
        1 => vec![-c[0]],
        2 => quadratic(c[1], c[0]),
        3 => cubic(c[2], c[1], c[0]),
        4 => quartic(c[3], c[2], c[1], c[0]),
        _ => vec![z; deg],
    }
}

/// z^2 + b z + c.
fn quadratic(b: Complex64, c: Complex64) -> Vec<Complex64> {
    let disc = (b * b - 4.0 * c).sqrt();
    // avoid cancellation
    let q = if (b.conj() * disc).re >= 0.0 { -(b + disc) / 2.0 } else { -(b - disc) / 2.0 };
    if q.norm() == 0.0 {
        return vec![q, q];
    }
    vec![q, c / q]
}

/// z^3 + a z^2 + b z + c, by Cardano.
fn cubic(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let disc = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let mut u3 = -q / 2.0 + disc;
    if u3.norm() < (-q / 2.0 - disc).norm() {
        u3 = -q / 2.0 - disc;
    }
    let omega = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
    if u3.norm() < 1e-300 {
        return vec![shift; 3];
    }
    let u = u3.cbrt();
    (0..3)
        .map(|k| {
            let uk = u * omega.powi(k);
            uk - p / (3.0 * uk) + shift
        })
        .collect()
}

/// z^4 + a z^3 + b z^2 + c z + d, by Ferrari.
fn quartic(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Vec<Complex64> {
    // depressed: y^4 + p y^2 + q y + r with z = y - a/4
    let a2 = a * a;
    let p = b - 3.0 * a2 / 8.0;
    let q = c - a * b / 2.0 + a2 * a / 8.0;
    let r = d - a * c / 4.0 + a2 * b / 16.0 - 3.0 * a2 * a2 / 256.0;
    let shift = -a / 4.0;
    let ys = if q.norm() < 1e-14 {
        // biquadratic
        quadratic(p, r).into_iter().flat_map(|s| {
            let t = s.sqrt();
            [t, -t]
        }).collect::<Vec<_>>()
    } else {
        // resolvent cubic for m: 8m^3 + 8p m^2 + (2p^2 - 8r) m - q^2 = 0
        let ms = cubic(p, p * p / 4.0 - r, -q * q / 8.0);
        let m = ms.into_iter().max_by(|x, y| x.norm().total_cmp(&y.norm())).expect("three roots");
        let s = (2.0 * m).sqrt();
        let mut out = Vec::with_capacity(4);
        for sign in [1.0, -1.0] {
            // y^2 -+ s y + (p/2 + m +- q/(2s))
            let cst = p / 2.0 + m + sign * q / (2.0 * s);
            out.extend(quadratic(-sign * s, cst));
        }
        out
    };
    ys.into_iter().map(|y| y + shift).collect()
}

/// Polish an approximate eigenvalue of `m` by inverse iteration and a Rayleigh quotient.
fn refine(m: &CMatrix, approx: Complex64) -> Complex64 {
    let d = m.dim();
    let shifted = m.sub(&CMatrix::identity(d).scale(approx));
    let mut v: Vec<Complex64> = (0..d).map(|i| Complex64::new(1.0 + 0.37 * i as f64, 0.11 * i as f64 - 0.5)).collect();
    for _ in 0..3 {
        v = solve(&shifted, &v);
        let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        if !n.is_finite() || n == 0.0 {
            return approx;
        }
        v.iter_mut().for_each(|x| *x /= n);
    }
    let mv = m.mul_vec(&v);
    let rq: Complex64 = v.iter().zip(&mv).map(|(x, y)| x.conj() * y).sum();
    if (rq - approx).norm() < 1e-3 {
        rq
    } else {
        approx
    }
}

/// Phase of a unit complex number in turns, in (-1/2, 1/2].
pub fn phase_turns(z: Complex64) -> f64 {
    let t = z.arg() / (2.0 * PI);
    if t <= -0.5 {
        0.5
    } else {
        t
    }
}

/// Eigenphases in turns of a unitary matrix of dimension at most 4, sorted.
///
/// Roots of the characteristic polynomial in closed form, each polished
/// against the matrix itself so repeated eigenvalues stay accurate.
pub fn eigenphases(m: &CMatrix) -> Result<Vec<f64>, RepError> {
    let res = m.unitarity_residual();
    if res > UNITARY_TOL {
        return Err(RepError::NotUnitary { residual: res });
    }
    if m.dim() > 4 {
        return Err(RepError::DimensionTooLarge { dim: m.dim(), limit: 4 });
    }
    let roots = roots_closed_form(&char_poly(m));
    let mut phases: Vec<f64> = roots.into_iter().map(|z| phase_turns(refine(m, z))).collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

#[derive(Clone, Copy, Debug, Serialize, PartialEq)]
pub struct HalfSumCheck {
    /// ||(I + M)/2||_op
    pub norm: f64,
    /// cos(pi theta)
    pub bound: f64,
    /// 1 - (2 pi theta)^2 / 8, the polynomial surrogate in radians; reported, not asserted.
    pub surrogate: f64,
    pub pass: bool,
}

/// Slack when comparing a measured eigenphase with the claimed minimum.
const PHASE_SLACK: f64 = 1e-9;

/// Norm of the average of `I` and a unitary whose eigenphases all have
/// magnitude at least `theta` turns, against the sharp bound cos(pi theta).
pub fn half_sum_norm_check(m: &CMatrix, theta: f64) -> Result<HalfSumCheck, RepError> {
    let phases = eigenphases(m)?;
    if let Some(&bad) = phases.iter().find(|t| t.abs() < theta - PHASE_SLACK) {
        return Err(RepError::PhaseTooSmall { phase: bad, theta });
    }
    let norm = op_norm(&CMatrix::identity(m.dim()).add(m).scale_re(0.5))?;
    let bound = (PI * theta).cos();
    let rad = 2.0 * PI * theta;
    Ok(HalfSumCheck { norm, bound, surrogate: 1.0 - rad * rad / 8.0, pass: norm <= bound + 1e-9 })
}
