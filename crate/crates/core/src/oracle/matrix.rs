//! Finite-difference discretization of the reduced radial equation on a
//! uniform grid, solved by Sturm-sequence bisection.
//!
//! H_ii = 1/h² + W_eff(ρ_i), H_{i,i±1} = −1/(2h²), Dirichlet walls at 0 and R.

use super::{RadialPotential, W_EFF_FLOOR};

pub(crate) struct Tridiagonal {
    pub diag: Vec<f64>,
    pub off: f64,
}

impl Tridiagonal {
    pub fn build(pot: &dyn RadialPotential, l: u32, rho_max: f64, intervals: usize) -> Self {
        let h = rho_max / intervals as f64;
        let ll = f64::from(l * (l + 1));
        let diag = (1..intervals)
            .map(|i| {
                let x = h * i as f64;
                1.0 / (h * h) + effective(pot, ll, x)
            })
            .collect();
        Self {
            diag,
            off: -0.5 / (h * h),
        }
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let off2 = self.off * self.off;
        let mut count = 0;
        let mut q = 1.0;
        for (i, &d) in self.diag.iter().enumerate() {
            q = if i == 0 { d - x } else { d - x - off2 / q };
            if q == 0.0 {
                q = -f64::EPSILON * (d.abs() + self.off.abs());
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    pub fn gershgorin(&self) -> (f64, f64) {
        let r = 2.0 * self.off.abs();
        let lo = self.diag.iter().fold(f64::INFINITY, |m, &d| m.min(d)) - r;
        let hi = self.diag.iter().fold(f64::NEG_INFINITY, |m, &d| m.max(d)) + r;
        (lo, hi)
    }

    /// The `index`-th eigenvalue (0-based) bisected to full precision.
    pub fn eigenvalue(&self, index: usize, max_iter: usize) -> Option<f64> {
        let (mut lo, mut hi) = self.gershgorin();
        if index >= self.diag.len() {
            return None;
        }
        for _ in 0..max_iter.max(200) {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(0.5 * (lo + hi))
    }

    /// Eigenvector for a converged eigenvalue by inverse iteration.
    pub fn eigenvector(&self, eigenvalue: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = eigenvalue + 1e-12 * eigenvalue.abs().max(1.0);
        let mut x = vec![1.0; n];
        for _ in 0..3 {
            x = self.solve_shifted(shift, &x);
            let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            for v in &mut x {
                *v /= norm;
            }
        }
        x
    }

    /// Solves (H − σ)y = b by Gaussian elimination with partial pivoting.
    fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.diag.len();
        // Row i holds columns i, i+1, i+2 after pivoting (upper band width 2).
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut rhs = b.to_vec();
        let mut cur = [self.diag[0] - sigma, if n > 1 { self.off } else { 0.0 }, 0.0];
        for i in 0..n {
            if i + 1 < n {
                let next = [
                    self.off,
                    self.diag[i + 1] - sigma,
                    if i + 2 < n { self.off } else { 0.0 },
                ];
                // candidate rows: cur = [a_ii, a_i,i+1, a_i,i+2], next = [a_{i+1,i}, a_{i+1,i+1}, a_{i+1,i+2}]
                let (piv, other, swapped) = if next[0].abs() > cur[0].abs() {
                    (next, cur, true)
                } else {
                    (cur, next, false)
                };
                if swapped {
                    rhs.swap(i, i + 1);
                }
                let p = if piv[0] == 0.0 { f64::MIN_POSITIVE } else { piv[0] };
                let factor = other[0] / p;
                u0[i] = p;
                u1[i] = piv[1];
                u2[i] = piv[2];
                rhs[i + 1] -= factor * rhs[i];
                cur = [other[1] - factor * piv[1], other[2] - factor * piv[2], 0.0];
            } else {
                u0[i] = if cur[0] == 0.0 { f64::MIN_POSITIVE } else { cur[0] };
                u1[i] = 0.0;
                u2[i] = 0.0;
            }
        }
        let mut y = vec![0.0; n];
        for i in (0..n).rev() {
            let mut s = rhs[i];
            if i + 1 < n {
                s -= u1[i] * y[i + 1];
            }
            if i + 2 < n {
                s -= u2[i] * y[i + 2];
            }
            y[i] = s / u0[i];
        }
        y
    }
}

pub(crate) fn effective(pot: &dyn RadialPotential, ll: f64, x: f64) -> f64 {
    let w = pot.value(x) + ll / (2.0 * x * x);
    if w.is_finite() {
        w
    } else {
        W_EFF_FLOOR
    }
}

/// Eigenvalue and interior eigenvector (u_1..u_{n−1}) on `intervals` cells.
pub(crate) fn solve_level(
    pot: &dyn RadialPotential,
    l: u32,
    index: usize,
    rho_max: f64,
    intervals: usize,
    max_iter: usize,
    want_vector: bool,
) -> Option<(f64, Vec<f64>)> {
    let t = Tridiagonal::build(pot, l, rho_max, intervals);
    let e = t.eigenvalue(index, max_iter)?;
    let v = if want_vector { t.eigenvector(e) } else { Vec::new() };
    Some((e, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::Profile;

    #[test]
    fn sturm_count_matches_particle_in_box() {
        // free particle in a box of length π: eigenvalues k²/2, k = 1, 2, ...
        let pot = Profile::PowerLaw { coefficient: 0.0, n: 2 };
        let t = Tridiagonal::build(&pot, 0, std::f64::consts::PI, 4000);
        assert_eq!(t.sturm_count(0.49), 0);
        assert_eq!(t.sturm_count(0.51), 1);
        assert_eq!(t.sturm_count(4.49), 2);
        let e2 = t.eigenvalue(2, 200).unwrap();
        assert!((e2 - 4.5).abs() < 1e-5);
    }

    #[test]
    fn eigenvector_has_expected_nodes() {
        let pot = Profile::PowerLaw { coefficient: 0.0, n: 2 };
        let t = Tridiagonal::build(&pot, 0, 1.0, 500);
        let e = t.eigenvalue(3, 200).unwrap();
        let v = t.eigenvector(e);
        let changes = v.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
        assert_eq!(changes, 3);
    }
}
