//! Exact Coulomb bound states from the algebraic order-by-order system.
//!
//! Substituting R = P(ρ)·e^{−b₀ρ} with P a finite polynomial into the reduced
//! radial equation and matching powers of the coupling gives
//!
//! ```text
//! b₀² + 2ε̂ = 0
//! 1 − b₀N = 0
//! (k(k+1) − L(L+1)) a_k + (2/N)(N−k) a_{k−1} = 0,   0 < k < N
//! L(L+1) a₀ = 0
//! ```
//!
//! so ε̂ = −1/(2N²), b₀ = 1/N and the a_k follow by recursion from a_L.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{int_pow, AnalyticState, EnergySeries, QuantumNumbers};

/// E_N = −g⁴m/(2N²).
pub fn coulomb_energy(n: u32, g: f64, m: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidParameter("principal quantum number N must be >= 1".into()));
    }
    Ok(-int_pow(g, 4) * m / (2.0 * f64::from(n) * f64::from(n)))
}

/// Reduced energy ε̂_N = −1/(2N²).
pub fn reduced_energy(n: u32) -> f64 {
    -1.0 / (2.0 * f64::from(n) * f64::from(n))
}

fn rational(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Exact coefficients a_L, …, a_{N−1} relative to a_L = 1.
pub fn coefficients_exact(n: u32, l: u32) -> Result<Vec<BigRational>> {
    if n < 1 {
        return Err(Error::InvalidParameter("principal quantum number N must be >= 1".into()));
    }
    if l >= n {
        return Err(Error::NoCoulombState { n, l });
    }
    let (n, l) = (i64::from(n), i64::from(l));
    let mut out = vec![BigRational::one()];
    for k in (l + 1)..n {
        // L(L+1) − k(k+1) < 0 for k > L
        let factor = rational(2 * (n - k), n * (l * (l + 1) - k * (k + 1)));
        let next = out.last().cloned().unwrap_or_else(BigRational::zero) * factor;
        out.push(next);
    }
    Ok(out)
}

/// Relative coefficients as floats (a_L = 1).
pub fn coulomb_coefficients(n: u32, l: u32) -> Result<Vec<f64>> {
    Ok(coefficients_exact(n, l)?
        .iter()
        .map(|c| c.to_f64().unwrap_or(f64::NAN))
        .collect())
}

fn factorial(k: u64) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// ∫₀^∞ P(ρ)² ρ² e^{−2ρ/N} dρ in closed form, with P relative to a_L = 1:
/// Σ_{i,j} a_i a_j (i+j+2)! (N/2)^{i+j+3}.
pub fn norm_integral_exact(n: u32, l: u32) -> Result<BigRational> {
    let coeffs = coefficients_exact(n, l)?;
    let half_n = rational(i64::from(n), 2);
    let mut total = BigRational::zero();
    for (i, ai) in coeffs.iter().enumerate() {
        for (j, aj) in coeffs.iter().enumerate() {
            let power = 2 * l as usize + i + j;
            let fac = BigRational::from_integer(factorial(power as u64 + 2));
            let scale = num_traits::pow(half_n.clone(), power + 3);
            total += ai * aj * fac * scale;
        }
    }
    Ok(total)
}

/// Builds the normalized analytic state for (N, L).
pub fn coulomb_state(qn: QuantumNumbers) -> Result<AnalyticState> {
    let (n, l) = (qn.n(), qn.l());
    let poly = coulomb_coefficients(n, l)?;
    let integral = norm_integral_exact(n, l)?;
    let norm = 1.0 / integral.to_f64().unwrap_or(f64::NAN).sqrt();
    Ok(AnalyticState {
        qn,
        b0: 1.0 / f64::from(n),
        poly,
        energy: EnergySeries::new(num_rational::Rational64::from(4), vec![reduced_energy(n)])?,
        norm,
    })
}

/// Radial evaluator R(r) in physical units, normalized ∫R² r² dr = 1.
#[derive(Debug, Clone)]
pub struct CoulombWavefunction {
    state: AnalyticState,
    g: f64,
    m: f64,
}

pub fn coulomb_wavefunction(state: &AnalyticState, g: f64, m: f64) -> CoulombWavefunction {
    CoulombWavefunction {
        state: state.clone(),
        g,
        m,
    }
}

impl CoulombWavefunction {
    fn inverse_length(&self) -> f64 {
        self.g * self.g * self.m
    }

    /// R(r) = (g²m)^{3/2} · R̂(g²m r).
    pub fn eval(&self, r: f64) -> f64 {
        let k = self.inverse_length();
        k.powf(1.5) * self.state.radial(k * r)
    }

    /// Exponent S(r) = b₀ g² m r.
    pub fn exponent(&self, r: f64) -> f64 {
        self.state.b0 * self.inverse_length() * r
    }

    /// (R, dR/dr, d²R/dr²) evaluated analytically.
    pub fn derivatives(&self, r: f64) -> (f64, f64, f64) {
        let k = self.inverse_length();
        let (p, dp, ddp) = self.reduced_derivatives(k * r);
        let scale = k.powf(1.5);
        (scale * p, scale * k * dp, scale * k * k * ddp)
    }

    /// (R̂, R̂′, R̂″) in the reduced variable.
    pub fn reduced_derivatives(&self, rho: f64) -> (f64, f64, f64) {
        let s = &self.state;
        let l = s.qn.l() as i32;
        let (mut p, mut dp, mut ddp) = (0.0, 0.0, 0.0);
        for (i, &a) in s.poly.iter().enumerate() {
            let k = l + i as i32;
            let kf = f64::from(k);
            p += a * rho.powi(k);
            if k >= 1 {
                dp += a * kf * rho.powi(k - 1);
            }
            if k >= 2 {
                ddp += a * kf * (kf - 1.0) * rho.powi(k - 2);
            }
        }
        let e = s.norm * (-s.b0 * rho).exp();
        let b = s.b0;
        (e * p, e * (dp - b * p), e * (ddp - 2.0 * b * dp + b * b * p))
    }

    pub fn state(&self) -> &AnalyticState {
        &self.state
    }
}

/// Residual of R̂″ + (2/ρ)R̂′ + 2(ε̂ + 1/ρ)R̂ − L(L+1)R̂/ρ².
pub fn reduced_ode_residual(wf: &CoulombWavefunction, rho: f64) -> f64 {
    let (r, dr, ddr) = wf.reduced_derivatives(rho);
    let s = wf.state();
    let eps = s.energy.coefficients[0];
    let ll = f64::from(s.qn.l() * (s.qn.l() + 1));
    ddr + 2.0 * dr / rho + 2.0 * (eps + 1.0 / rho) * r - ll * r / (rho * rho)
}

/// Residuals of the four lines of the order-by-order system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrderResiduals {
    /// b₀²·m + 2ε (with m = 1 in reduced units).
    pub energy: f64,
    /// 1 − b₀N.
    pub slope: f64,
    /// (k(k+1) − L(L+1))a_k + (2/N)(N−k)a_{k−1}, 0 < k < N, relative to the term size.
    pub recursion: Vec<f64>,
    /// L(L+1)a₀.
    pub origin: f64,
}

impl OrderResiduals {
    pub fn max_abs(&self) -> f64 {
        self.recursion
            .iter()
            .fold(self.energy.abs().max(self.slope.abs()).max(self.origin.abs()), |m, r| {
                m.max(r.abs())
            })
    }
}

/// Evaluates all four lines of the system for a given state.
pub fn order_residuals(state: &AnalyticState) -> OrderResiduals {
    let n = state.qn.n();
    let l = state.qn.l();
    let nf = f64::from(n);
    let ll = f64::from(l * (l + 1));
    let eps = state.energy.coefficients[0];
    let recursion = (1..n as usize)
        .map(|k| {
            let kf = k as f64;
            let t1 = (kf * (kf + 1.0) - ll) * state.coefficient(k);
            let t2 = 2.0 / nf * (nf - kf) * state.coefficient(k - 1);
            let scale = t1.abs().max(t2.abs());
            if scale == 0.0 {
                0.0
            } else {
                (t1 + t2) / scale
            }
        })
        .collect();
    OrderResiduals {
        energy: state.b0 * state.b0 + 2.0 * eps,
        slope: 1.0 - state.b0 * nf,
        recursion,
        origin: ll * state.coefficient(0),
    }
}

/// Residuals for the constructed (N, L) state.
pub fn coulomb_order_equations(n: u32, l: u32) -> Result<OrderResiduals> {
    let qn = QuantumNumbers::new(n, l, 0).map_err(|_| Error::NoCoulombState { n, l })?;
    Ok(order_residuals(&coulomb_state(qn)?))
}

/// Extends the recursion one step past k = N−1; the natural truncation makes
/// this exactly zero.
pub fn next_coefficient(n: u32, l: u32) -> Result<BigRational> {
    let coeffs = coefficients_exact(n, l)?;
    let k = i64::from(n);
    let (n, l) = (i64::from(n), i64::from(l));
    let last = coeffs.last().cloned().unwrap_or_else(BigRational::zero);
    Ok(last * rational(2 * (n - k), n * (l * (l + 1) - k * (k + 1))))
}

/// Degeneracy Σ_{L=0}^{N−1}(2L+1).
pub fn degeneracy(n: u32) -> u32 {
    (0..n).map(|l| 2 * l + 1).sum()
}

/// True when the leading coefficient a_L is positive (sign convention).
pub fn leading_positive(state: &AnalyticState) -> bool {
    state.poly.first().is_some_and(|a| *a > 0.0) && state.norm > 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn state(n: u32, l: u32) -> AnalyticState {
        coulomb_state(QuantumNumbers::new(n, l, 0).unwrap()).unwrap()
    }

    #[test]
    fn energies_closed_form() {
        let (g, m) = (1.3_f64, 0.8);
        let e = int_pow(g, 4) * m;
        assert_eq!(coulomb_energy(1, g, m).unwrap(), -e / 2.0);
        assert_eq!(coulomb_energy(2, g, m).unwrap(), -e / 8.0);
        assert_eq!(coulomb_energy(3, g, m).unwrap(), -e / 18.0);
        assert!(coulomb_energy(0, g, m).is_err());
    }

    #[test]
    fn coefficient_ratios() {
        let c = coefficients_exact(2, 0).unwrap();
        assert_eq!(c[1].clone() / c[0].clone(), rational(-1, 2));
        let c = coefficients_exact(3, 1).unwrap();
        assert_eq!(c[1].clone() / c[0].clone(), rational(-1, 6));
        assert_eq!(coefficients_exact(1, 0).unwrap().len(), 1);
    }

    #[test]
    fn s_wave_recursion_matches_l0_form() {
        // a_k = −2(N−k)/(N k (k+1)) a_{k−1} for L = 0
        let n = 5;
        let c = coefficients_exact(n, 0).unwrap();
        for k in 1..n as i64 {
            let expected = c[(k - 1) as usize].clone()
                * rational(-2 * (i64::from(n) - k), i64::from(n) * k * (k + 1));
            assert_eq!(c[k as usize], expected);
        }
    }

    #[test]
    fn no_state_for_l_ge_n() {
        assert!(matches!(coefficients_exact(2, 2), Err(Error::NoCoulombState { .. })));
        assert!(matches!(coulomb_order_equations(3, 4), Err(Error::NoCoulombState { .. })));
    }

    #[test]
    fn natural_truncation() {
        for n in 1..8 {
            for l in 0..n {
                assert!(next_coefficient(n, l).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn ground_state_is_pure_exponential() {
        let s = state(1, 0);
        assert_eq!(s.poly, vec![1.0]);
        assert_eq!(s.b0, 1.0);
        // R = 2 e^{−ρ}
        assert!((s.norm - 2.0).abs() < 1e-15);
        let wf = coulomb_wavefunction(&s, 1.5, 2.0);
        assert!((wf.exponent(0.7) - 1.5 * 1.5 * 2.0 * 0.7).abs() < 1e-14);
    }

    #[test]
    fn normalization_by_quadrature() {
        for (n, l) in [(1, 0), (2, 0), (2, 1), (3, 1), (4, 3)] {
            let wf = coulomb_wavefunction(&state(n, l), 1.2, 0.9);
            let k = 1.2 * 1.2 * 0.9;
            let upper = 60.0 * f64::from(n) / k;
            let v = crate::quad::integrate(|r| wf.eval(r).powi(2) * r * r, 0.0, upper, 1e-13).unwrap();
            assert!((v - 1.0).abs() < 1e-11, "N={n} L={l}: {v}");
        }
    }

    #[test]
    fn boundary_behavior() {
        let wf = coulomb_wavefunction(&state(3, 1), 1.0, 1.0);
        assert_eq!(wf.eval(0.0), 0.0);
        assert!(wf.eval(400.0).abs() < 1e-40);
        let wf = coulomb_wavefunction(&state(2, 0), 1.0, 1.0);
        assert!(wf.eval(0.0) > 0.0);
    }

    #[test]
    fn order_equations_vanish() {
        let r = coulomb_order_equations(2, 1).unwrap();
        assert_eq!(r.max_abs(), 0.0);
        let r = coulomb_order_equations(5, 3).unwrap();
        assert!(r.max_abs() < 1e-14);
    }

    #[test]
    fn corrupted_coefficient_detected() {
        let mut s = state(4, 1);
        s.poly[1] *= 1.01;
        let r = order_residuals(&s);
        assert!(r.recursion.iter().any(|x| x.abs() > 1e-3));
    }

    #[test]
    fn ode_residual_small_on_log_grid() {
        for (n, l) in [(1, 0), (2, 1), (3, 0), (4, 2), (6, 5)] {
            let wf = coulomb_wavefunction(&state(n, l), 1.0, 1.0);
            let grid: Vec<f64> = (0..=400).map(|i| 1e-4 * (5e5f64).powf(i as f64 / 400.0)).collect();
            let peak = grid.iter().fold(0.0_f64, |m, &x| m.max(wf.eval(x).abs()));
            for &x in &grid {
                let r = reduced_ode_residual(&wf, x);
                assert!(r.abs() < 1e-10 * peak, "N={n} L={l} rho={x}: {r}");
            }
        }
    }

    #[test]
    fn orthogonal_within_l() {
        let a = coulomb_wavefunction(&state(2, 1), 1.0, 1.0);
        let b = coulomb_wavefunction(&state(4, 1), 1.0, 1.0);
        let v = crate::quad::integrate(|r| a.eval(r) * b.eval(r) * r * r, 0.0, 300.0, 1e-12).unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn node_counts() {
        for (n, l) in [(1, 0), (3, 0), (3, 2), (5, 1)] {
            let wf = coulomb_wavefunction(&state(n, l), 1.0, 1.0);
            let vals: Vec<f64> = (1..20000).map(|i| wf.eval(i as f64 * 0.005)).collect();
            let nodes = vals.windows(2).filter(|w| w[0] * w[1] < 0.0).count();
            assert_eq!(nodes, (n - l - 1) as usize);
        }
    }

    #[test]
    fn degeneracy_is_n_squared() {
        for n in 1..10 {
            assert_eq!(degeneracy(n), n * n);
        }
    }
}
