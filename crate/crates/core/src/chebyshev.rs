//! Chebyshev interpolants on a symmetric interval [−R, R].
//!
//! Nodes are the first-kind (Gauss) points, which never include the origin.

use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq)]
pub struct Chebyshev {
    half_width: f64,
    coeffs: Vec<f64>,
}

/// First-kind nodes on [−R, R], ordered from +R down to −R.
pub fn nodes(n: usize, half_width: f64) -> Vec<f64> {
    (0..n)
        .map(|j| half_width * (PI * (j as f64 + 0.5) / n as f64).cos())
        .collect()
}

impl Chebyshev {
    /// Interpolates the samples `values[j] = f(nodes(n, R)[j])`.
    pub fn from_values(values: &[f64], half_width: f64) -> Self {
        let n = values.len();
        let coeffs = (0..n)
            .map(|k| {
                let s: f64 = values
                    .iter()
                    .enumerate()
                    .map(|(j, &v)| v * (PI * k as f64 * (j as f64 + 0.5) / n as f64).cos())
                    .sum();
                let scale = if k == 0 { 1.0 } else { 2.0 };
                scale * s / n as f64
            })
            .collect();
        Self { half_width, coeffs }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(f: F, n: usize, half_width: f64) -> Self {
        let vals: Vec<f64> = nodes(n, half_width).into_iter().map(f).collect();
        Self::from_values(&vals, half_width)
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Clenshaw evaluation.
    pub fn eval(&self, x: f64) -> f64 {
        let t = x / self.half_width;
        let (mut b1, mut b2) = (0.0, 0.0);
        for &c in self.coeffs.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + c;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + self.coeffs.first().copied().unwrap_or(0.0)
    }

    pub fn derivative(&self) -> Self {
        let n = self.coeffs.len();
        if n < 2 {
            return Self {
                half_width: self.half_width,
                coeffs: vec![0.0],
            };
        }
        let mut d = vec![0.0; n + 1];
        for k in (1..n).rev() {
            d[k - 1] = d[k + 1] + 2.0 * k as f64 * self.coeffs[k];
        }
        d.truncate(n - 1);
        d[0] *= 0.5;
        for c in &mut d {
            *c /= self.half_width;
        }
        Self {
            half_width: self.half_width,
            coeffs: d,
        }
    }

    /// Antiderivative normalized to vanish at x = 0.
    pub fn integral(&self) -> Self {
        let n = self.coeffs.len();
        let c = |k: usize| self.coeffs.get(k).copied().unwrap_or(0.0);
        let mut out = vec![0.0; n + 1];
        for k in 1..=n {
            let prev = if k == 1 { 2.0 * c(0) } else { c(k - 1) };
            out[k] = (prev - c(k + 1)) / (2.0 * k as f64) * self.half_width;
        }
        let mut result = Self {
            half_width: self.half_width,
            coeffs: out,
        };
        let at_zero = result.eval(0.0);
        result.coeffs[0] -= at_zero;
        result
    }

    /// Truncates the series at its noise plateau. The last quarter of the
    /// coefficients estimates the noise level; the series counts as resolved
    /// when that level is at most `resolution` times the largest coefficient
    /// (or below `floor`), and coefficients under ten times the noise are
    /// dropped. Returns `None` for an unresolved series.
    pub fn chop(&self, resolution: f64, floor: f64) -> Option<Self> {
        if self.coeffs.iter().any(|c| !c.is_finite()) {
            return None;
        }
        let n = self.coeffs.len();
        let max = self.coeffs.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
        let noise = self.coeffs[n - n / 4..]
            .iter()
            .fold(0.0_f64, |m, c| m.max(c.abs()));
        if noise > resolution * max && noise > floor {
            return None;
        }
        let cut = (10.0 * noise).max(floor);
        let keep = self
            .coeffs
            .iter()
            .rposition(|c| c.abs() > cut)
            .map_or(1, |i| i + 1);
        Some(Self {
            half_width: self.half_width,
            coeffs: self.coeffs[..keep].to_vec(),
        })
    }
}
