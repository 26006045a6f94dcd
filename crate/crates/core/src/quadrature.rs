//! Gauss-Laguerre and Gauss-Hermite rules.
//!
//! Nodes come from the Golub-Welsch Jacobi matrix and are polished by Newton
//! steps on a rescaled polynomial recurrence. Weights are evaluated from the
//! classical closed forms through the same rescaled recurrences, which keeps
//! their *relative* accuracy at far nodes where eigenvector-based weights
//! degrade; log-weights are kept alongside so that integrands with large
//! polynomial moments can be assembled entirely in log space.

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Value and derivative of the Laguerre polynomial `L_n` with a running log
/// scale, so magnitudes up to `exp(t/2)`-type growth never overflow.
fn laguerre_scaled(n: usize, t: f64) -> (f64, f64, f64) {
    const LIMIT: f64 = 1e140;
    let mut l0 = 1.0f64;
    let mut l1 = 1.0 - t;
    let mut log_scale = 0.0f64;
    if n == 0 {
        return (l0, 0.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let l2 = ((2.0 * kf + 1.0 - t) * l1 - kf * l0) / (kf + 1.0);
        l0 = l1;
        l1 = l2;
        let m = l0.abs().max(l1.abs());
        if m > LIMIT {
            l0 /= LIMIT;
            l1 /= LIMIT;
            log_scale += LIMIT.ln();
        }
    }
    // t L_n'(t) = n L_n(t) - n L_{n-1}(t)
    let dl = if t != 0.0 { (n as f64) * (l1 - l0) / t } else { -(n as f64) };
    (l1, dl, log_scale)
}

/// Gauss-Laguerre nodes for the weight `e^{-t}` on `[0, inf)`, with weights
/// returned in log form. `sum(exp(ln_w)) = 1` to ~1e-12.
pub fn gauss_laguerre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 {
        return Err(Error::InvalidDimension("gauss_laguerre needs n >= 1".into()));
    }
    if n == 1 {
        return Ok((vec![1.0], vec![0.0]));
    }
    // Jacobi matrix: diag 2k+1, offdiag k
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jac[(k, k)] = 2.0 * k as f64 + 1.0;
        if k + 1 < n {
            jac[(k, k + 1)] = (k + 1) as f64;
            jac[(k + 1, k)] = (k + 1) as f64;
        }
    }
    let eig = nalgebra::SymmetricEigen::try_new(jac, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("Laguerre Jacobi eigensolve failed".into()))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    // Newton polish on L_n
    for t in nodes.iter_mut() {
        for _ in 0..4 {
            let (l, dl, _) = laguerre_scaled(n, *t);
            let step = l / dl;
            *t -= step;
            if step.abs() <= 1e-15 * t.abs() {
                break;
            }
        }
    }
    // w_k = t_k / ((n+1)^2 L_{n+1}(t_k)^2), evaluated in log form; the set is
    // then rescaled so the zeroth moment sum(w) = 1 holds exactly
    let np1 = (n + 1) as f64;
    let mut ln_weights: Vec<f64> = nodes
        .iter()
        .map(|&t| {
            let (l, _, log_scale) = laguerre_scaled(n + 1, t);
            t.ln() - 2.0 * (l.abs().ln() + log_scale) - 2.0 * np1.ln()
        })
        .collect();
    let total: f64 = ln_weights.iter().map(|lw| lw.exp()).sum();
    let correction = total.ln();
    for lw in ln_weights.iter_mut() {
        *lw -= correction;
    }
    Ok((nodes, ln_weights))
}

/// Hermite polynomial `H_n` (physicists') and derivative, log-rescaled.
fn hermite_scaled(n: usize, x: f64) -> (f64, f64, f64) {
    const LIMIT: f64 = 1e140;
    let mut h0 = 1.0f64;
    let mut h1 = 2.0 * x;
    let mut log_scale = 0.0f64;
    if n == 0 {
        return (h0, 0.0, 0.0);
    }
    for k in 1..n {
        let h2 = 2.0 * x * h1 - 2.0 * (k as f64) * h0;
        h0 = h1;
        h1 = h2;
        let m = h0.abs().max(h1.abs());
        if m > LIMIT {
            h0 /= LIMIT;
            h1 /= LIMIT;
            log_scale += LIMIT.ln();
        }
    }
    (h1, 2.0 * (n as f64) * h0, log_scale)
}

/// Gauss-Hermite nodes and plain weights for the weight `e^{-x^2}` on the
/// real line. `sum(w) = sqrt(pi)`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n < 1 {
        return Err(Error::InvalidDimension("gauss_hermite needs n >= 1".into()));
    }
    if n == 1 {
        return Ok((vec![0.0], vec![std::f64::consts::PI.sqrt()]));
    }
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n - 1 {
        let b = ((k + 1) as f64 / 2.0).sqrt();
        jac[(k, k + 1)] = b;
        jac[(k + 1, k)] = b;
    }
    let eig = nalgebra::SymmetricEigen::try_new(jac, f64::EPSILON, 0)
        .ok_or_else(|| Error::Numeric("Hermite Jacobi eigensolve failed".into()))?;
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for x in nodes.iter_mut() {
        for _ in 0..4 {
            let (h, dh, _) = hermite_scaled(n, *x);
            let step = h / dh;
            *x -= step;
            if step.abs() <= 1e-15 * (1.0 + x.abs()) {
                break;
            }
        }
    }
    // w_i = 2^{n-1} n! sqrt(pi) / (n^2 H_{n-1}(x_i)^2)
    use statrs::function::gamma::ln_gamma;
    let nf = n as f64;
    let ln_pref = (nf - 1.0) * 2.0f64.ln() + ln_gamma(nf + 1.0)
        + 0.5 * std::f64::consts::PI.ln()
        - 2.0 * nf.ln();
    let mut weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let (h, _, log_scale) = hermite_scaled(n - 1, x);
            (ln_pref - 2.0 * (h.abs().ln() + log_scale)).exp()
        })
        .collect();
    let total: f64 = weights.iter().sum();
    let correction = std::f64::consts::PI.sqrt() / total;
    for w in weights.iter_mut() {
        *w *= correction;
    }
    Ok((nodes, weights))
}

/// Polar-coordinate quadrature of `d^2z/pi = (1/2pi) dt dtheta` after
/// `t = r^2`: Gauss-Laguerre in `t` against `e^{-t}` and `angular_count`
/// equispaced angles.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    radial_nodes: Vec<f64>,
    radial_ln_weights: Vec<f64>,
    angular_count: usize,
}

impl QuadratureRule {
    pub fn new(radial_count: usize, angular_count: usize) -> Result<Self> {
        if radial_count < 1 || angular_count < 1 {
            return Err(Error::InvalidDimension(
                "quadrature rule needs radial_count >= 1 and angular_count >= 1".into(),
            ));
        }
        let (radial_nodes, radial_ln_weights) = gauss_laguerre(radial_count)?;
        let rule = QuadratureRule { radial_nodes, radial_ln_weights, angular_count };
        let sum: f64 = rule.radial_ln_weights.iter().map(|lw| lw.exp()).sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::Numeric(format!(
                "Laguerre weights sum to {sum}, expected 1 within 1e-12"
            )));
        }
        Ok(rule)
    }

    /// Sizing rule making monomials exact: `n_r >= dim + radial_degree` and
    /// `M >= 2 (dim + angular_harmonic) + 1`.
    pub fn sized_for(dim: usize, radial_degree: usize, angular_harmonic: usize) -> Result<Self> {
        Self::new(dim + radial_degree, 2 * (dim + angular_harmonic) + 1)
    }

    pub fn radial_count(&self) -> usize {
        self.radial_nodes.len()
    }

    pub fn angular_count(&self) -> usize {
        self.angular_count
    }

    /// Radial nodes in `t = r^2`.
    pub fn radial_nodes(&self) -> &[f64] {
        &self.radial_nodes
    }

    pub fn radial_ln_weights(&self) -> &[f64] {
        &self.radial_ln_weights
    }

    pub fn radial_weights(&self) -> Vec<f64> {
        self.radial_ln_weights.iter().map(|lw| lw.exp()).collect()
    }

    pub fn angles(&self) -> Vec<f64> {
        let m = self.angular_count as f64;
        (0..self.angular_count)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / m)
            .collect()
    }
}
