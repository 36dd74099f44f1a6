//! One-dimensional bisection and a small damped Newton solver.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Bisection on `[lo, hi]`; the endpoints must bracket a sign change.
pub fn bisect(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::RootFinding(format!("no sign change on [{lo}, {hi}]: f = {flo}, {fhi}")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Debug)]
pub struct NewtonOutcome {
    pub x: Vec<f64>,
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton for `F(x) = 0` with a central-difference Jacobian.
/// Steps are halved until the residual norm decreases; `clamp` keeps iterates in the domain.
pub fn damped_newton(
    f: impl Fn(&[f64]) -> Vec<f64>,
    x0: &[f64],
    clamp: impl Fn(&mut [f64]),
    tol: f64,
    max_iter: usize,
) -> NewtonOutcome {
    let n = x0.len();
    let mut x = x0.to_vec();
    let mut r = f(&x);
    let mut it = 0;
    while it < max_iter && norm(&r) > tol {
        it += 1;
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1e-3);
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[j] += h;
            xm[j] -= h;
            let (fp, fm) = (f(&xp), f(&xm));
            for i in 0..n {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_iterator(n, r.iter().map(|v| -v));
        let Some(step) = jac.lu().solve(&rhs) else { break };
        let base = norm(&r);
        let mut t = 1.0;
        let mut accepted = false;
        while t > 1e-10 {
            let mut cand: Vec<f64> = x.iter().zip(step.iter()).map(|(a, d)| a + t * d).collect();
            clamp(&mut cand);
            let rc = f(&cand);
            if rc.iter().all(|v| v.is_finite()) && norm(&rc) < base {
                x = cand;
                r = rc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    let converged = norm(&r) <= tol;
    NewtonOutcome { x, residuals: r, iterations: it, converged }
}
