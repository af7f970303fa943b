//! Ordinary least squares for a straight line.

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LinearFit {
    pub slope: f64,
    pub intercept: f64,
}

/// Fits y = slope·x + intercept. Uses centred sums; `x` must contain at
/// least two distinct values.
pub fn linear_fit(x: &[f64], y: &[f64]) -> LinearFit {
    assert_eq!(x.len(), y.len(), "x and y lengths differ");
    assert!(x.len() >= 2, "need at least two points");
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (sxy, sxx) = x.iter().zip(y).fold((0.0, 0.0), |(sxy, sxx), (&xi, &yi)| {
        let dx = xi - mx;
        (sxy + dx * (yi - my), sxx + dx * dx)
    });
    let slope = sxy / sxx;
    LinearFit { slope, intercept: my - slope * mx }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_exact_line() {
        let x: Vec<f64> = (0..10).map(|i| i as f64 * 0.3 + 1.0).collect();
        let y: Vec<f64> = x.iter().map(|v| -2.5 * v + 4.0).collect();
        let f = linear_fit(&x, &y);
        assert!((f.slope + 2.5).abs() < 1e-14);
        assert!((f.intercept - 4.0).abs() < 1e-13);
    }
}
