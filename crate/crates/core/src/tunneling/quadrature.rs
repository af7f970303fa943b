//! Composite Gauss–Legendre quadrature with panel doubling.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Nodes and weights on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Roots of P_n by Newton iteration from the Chebyshev-like initial guess.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_lo^hi f split into `panels` equal pieces.
    pub fn composite(&self, f: &impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
        let h = (hi - lo) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let a = lo + p as f64 * h;
            let mid = a + 0.5 * h;
            let half = 0.5 * h;
            let s: f64 = self
                .nodes
                .iter()
                .zip(&self.weights)
                .map(|(&x, &w)| w * f(mid + half * x))
                .sum();
            total += half * s;
        }
        total
    }
}

/// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

const ORDER: usize = 20;
const MAX_PANELS: usize = 1 << 12;

/// Doubles the panel count until two successive estimates agree to `rel_tol`.
/// If the panel limit is reached first, the last estimate is still returned
/// when its change is within `accept_tol`.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, lo: f64, hi: f64, rel_tol: f64, accept_tol: f64) -> Result<f64> {
    let rule = GaussLegendre::new(ORDER);
    let mut panels = 2;
    let mut prev = rule.composite(&f, lo, hi, panels);
    let mut change = f64::INFINITY;
    while panels < MAX_PANELS {
        panels *= 2;
        let next = rule.composite(&f, lo, hi, panels);
        change = (next - prev).abs();
        let scale = next.abs().max(f64::MIN_POSITIVE);
        if change <= rel_tol * scale || change == 0.0 {
            return Ok(next);
        }
        prev = next;
    }
    let rel = change / prev.abs().max(f64::MIN_POSITIVE);
    if rel <= accept_tol {
        Ok(prev)
    } else {
        Err(Error::QuadratureNotConverged { change: rel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_symmetric() {
        for n in [1, 2, 5, 20, 33] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "n={n}");
            for i in 0..n {
                assert!((g.nodes()[i] + g.nodes()[n - 1 - i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let g = GaussLegendre::new(5);
        // ∫_{-1}^{1} x^8 dx = 2/9
        let v = g.composite(&|x: f64| x.powi(8), -1.0, 1.0, 1);
        assert!((v - 2.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_smooth_integrand() {
        let v = integrate_adaptive(|x: f64| x.sin(), 0.0, PI, 1e-12, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-12);
    }
}
