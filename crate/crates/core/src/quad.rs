//! Adaptive composite quadrature.
//!
//! Each panel is integrated with the double-exponential rule from the
//! `quadrature` crate; panels whose error estimate exceeds their share of the
//! tolerance are bisected.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 60;

/// ∫_a^b f(x) dx to `rel_tol` relative to ∫|f|, so that cancelling
/// integrands (overlaps) still terminate.
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return integrate(f, b, a, rel_tol).map(|v| -v);
    }
    let coarse = quadrature::integrate(|x| f(x).abs(), a, b, 1e-6).integral;
    let floor = 1e-300_f64.max(1e-15 * coarse.abs());
    let target = (rel_tol * coarse.abs()).max(floor);
    panel(&f, a, b, target, b - a, 0)
}

fn panel<F>(f: &F, a: f64, b: f64, target: f64, total_width: f64, depth: u32) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    // Width-proportional share, relaxed for deep panels so that integrable
    // endpoint singularities (self-similar under bisection) terminate.
    let depth_share = target / (4.0 * f64::from(depth + 1).powi(2));
    let share = (target * (b - a) / total_width).max(depth_share);
    let out = quadrature::integrate(f, a, b, share);
    // The second test accepts panels already at round-off level.
    if out.error_estimate <= share || out.error_estimate <= 16.0 * f64::EPSILON * out.integral.abs() {
        return Ok(out.integral);
    }
    if depth >= MAX_DEPTH {
        return Err(Error::Quadrature { a, b, tol: share });
    }
    let mid = 0.5 * (a + b);
    Ok(panel(f, a, mid, target, total_width, depth + 1)? + panel(f, mid, b, target, total_width, depth + 1)?)
}

/// Cumulative integrals F(x_i) = ∫_{x_0}^{x_i} f, one panel per grid interval.
pub fn cumulative<F>(f: F, grid: &[f64], rel_tol: f64) -> Result<Vec<f64>>
where
    F: Fn(f64) -> f64,
{
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    if let Some(&first) = grid.first() {
        out.push(0.0);
        let mut prev = first;
        for &x in &grid[1..] {
            acc += integrate(&f, prev, x, rel_tol)?;
            out.push(acc);
            prev = x;
        }
    }
    Ok(out)
}

/// Composite trapezoid rule on a (possibly non-uniform) grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xw, yw)| 0.5 * (xw[1] - xw[0]) * (yw[0] + yw[1]))
        .sum()
}

/// Composite Simpson rule on a uniform grid; an odd number of intervals is
/// closed with the 3/8 rule on the last three.
pub fn simpson_uniform(h: f64, y: &[f64]) -> f64 {
    let n = y.len().saturating_sub(1);
    match n {
        0 => 0.0,
        1 => 0.5 * h * (y[0] + y[1]),
        2 => h / 3.0 * (y[0] + 4.0 * y[1] + y[2]),
        _ => {
            let even = if n % 2 == 0 { n } else { n - 3 };
            let mut total = 0.0;
            for i in (0..even).step_by(2) {
                total += y[i] + 4.0 * y[i + 1] + y[i + 2];
            }
            total *= h / 3.0;
            if even < n {
                let t = &y[even..];
                total += 3.0 * h / 8.0 * (t[0] + 3.0 * t[1] + 3.0 * t[2] + t[3]);
            }
            total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-12).unwrap();
        assert!((v - 8.0).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫_0^1 x^{-1/2} dx = 2
        let v = integrate(|x| x.powf(-0.5), 0.0, 1.0, 1e-10).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_exact_for_cubics() {
        for n in [2usize, 3, 6, 7] {
            let h = 2.0 / n as f64;
            let y: Vec<f64> = (0..=n).map(|i| (h * i as f64).powi(3)).collect();
            assert!((simpson_uniform(h, &y) - 4.0).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn decaying_tail() {
        // ∫_0^60 x² e^{-x} dx ≈ 2
        let v = integrate(|x| x * x * (-x).exp(), 0.0, 60.0, 1e-12).unwrap();
        assert!((v - 2.0).abs() < 1e-10);
    }

    #[test]
    fn reversed_and_cumulative() {
        let v = integrate(|x| x, 1.0, 0.0, 1e-12).unwrap();
        assert!((v + 0.5).abs() < 1e-14);
        let grid = [0.0, 0.5, 1.0, 2.0];
        let c = cumulative(|x| 2.0 * x, &grid, 1e-12).unwrap();
        for (x, v) in grid.iter().zip(&c) {
            assert!((v - x * x).abs() < 1e-12);
        }
    }
}
