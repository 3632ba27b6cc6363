//! Gauss–Legendre rules used to discretize continuous frequency bands.

use crate::error::{Result, SegalError};

/// Nodes and weights of the `count`-point Gauss–Legendre rule on `[a, b]`,
/// nodes in increasing order.
pub fn gauss_legendre(a: f64, b: f64, count: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if count == 0 {
        return Err(SegalError::InvalidSpec(
            "quadrature needs at least one node".into(),
        ));
    }
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(SegalError::InvalidSpec(format!(
            "quadrature interval [{a}, {b}] must be finite with a < b"
        )));
    }

    let (ref_nodes, ref_weights) = reference_rule(count);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let nodes = ref_nodes.iter().map(|x| mid + half * x).collect();
    let weights = ref_weights.iter().map(|w| half * w).collect();
    Ok((nodes, weights))
}

/// Rule on [-1, 1]: Newton iteration on P_n from the Chebyshev initial guess.
fn reference_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                let (_, d) = legendre_with_derivative(n, x);
                dp = d;
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}
