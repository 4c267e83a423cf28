//! Order-by-order solution of ψ = e^{−S}, S = g·S₀ + S₁ + g^{−1}S₂ + …,
//! E = g·E₀ + E₁ + g^{−1}E₂ + … for V = g²·v with a harmonic-like minimum at
//! the origin.
//!
//! With y_k = S_k′ the hierarchy is
//!
//! ```text
//! y₀² = 2m·v
//! y₀·y_k = ½(∇²S_{k−1} − Σ_{i+j=k; i,j≥1} y_i y_j) − m·E_{k−1} =: N_k − m·E_{k−1}
//! ```
//!
//! where ∇²S = y′ + (d−1)y/r. Since y₀(0) = 0, E_{k−1} = lim_{r→0} N_k/m.
//!
//! Each y_k (k ≥ 1) is odd in r, so it is stored as the even function
//! q_k = y_k/r, interpolated on Chebyshev nodes of [−R, R]. This makes
//! y_k′ = q_k + r·q_k′ and y_k/r = q_k available at the origin without
//! cancellation.

use serde::{Deserialize, Serialize};

use crate::chebyshev::Chebyshev;
use crate::error::{Error, Result};
use crate::model::PowerLawPotential;
use crate::quad;

/// q_k counts as regular at the origin when its Chebyshev tail sits below
/// RESOLUTION times its largest coefficient, or below NOISE_FLOOR·m².
const RESOLUTION: f64 = 1e-6;
const NOISE_FLOOR: f64 = 1e-12;

/// Coupling-stripped potential v(r) = V/g², evaluated for r ≥ 0.
pub trait HierarchyProfile: Sync {
    fn value(&self, r: f64) -> f64;

    /// v′(r); a five-point stencil unless overridden.
    fn derivative(&self, r: f64) -> f64 {
        let h = 1e-3 * r.abs().max(1e-6);
        (self.value(r - 2.0 * h) - 8.0 * self.value(r - h) + 8.0 * self.value(r + h)
            - self.value(r + 2.0 * h))
            / (12.0 * h)
    }

    /// v(r)/r².
    fn value_over_r2(&self, r: f64) -> f64 {
        self.value(r) / (r * r)
    }

    /// v′(r)/r.
    fn derivative_over_r(&self, r: f64) -> f64 {
        self.derivative(r) / r
    }
}

/// v(r) = Σ_j c_j r^{2j}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvenPolynomial {
    pub coeffs: Vec<f64>,
}

impl EvenPolynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        Self { coeffs }
    }

    /// ½m³r² (with the coupling stripped).
    pub fn harmonic_3d(m: f64) -> Self {
        Self::new(vec![0.0, 0.5 * m * m * m])
    }

    /// m³x², the one-dimensional oscillator profile.
    pub fn harmonic_1d(m: f64) -> Self {
        Self::new(vec![0.0, m * m * m])
    }

    /// m⁵r⁴.
    pub fn quartic(m: f64) -> Self {
        Self::new(vec![0.0, 0.0, m.powi(5)])
    }

    fn horner(coeffs: &[f64], t: f64) -> f64 {
        coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

impl HierarchyProfile for EvenPolynomial {
    fn value(&self, r: f64) -> f64 {
        Self::horner(&self.coeffs, r * r)
    }

    fn derivative(&self, r: f64) -> f64 {
        r * self.derivative_over_r(r)
    }

    fn value_over_r2(&self, r: f64) -> f64 {
        if self.coeffs.len() < 2 {
            return 0.0;
        }
        // exact when c₀ = 0, which solve_order0 enforces
        Self::horner(&self.coeffs[1..], r * r)
    }

    fn derivative_over_r(&self, r: f64) -> f64 {
        let d: Vec<f64> = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &c)| 2.0 * j as f64 * c)
            .collect();
        Self::horner(&d, r * r)
    }
}

impl HierarchyProfile for PowerLawPotential {
    fn value(&self, r: f64) -> f64 {
        self.stripped_value(r.abs())
    }
}

/// Spatial dimension of the problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dim {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "3")]
    Three,
}

impl Dim {
    pub fn value(self) -> f64 {
        match self {
            Dim::One => 1.0,
            Dim::Three => 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HierarchyConfig {
    /// Outer radius in units of 1/m.
    pub r_max: f64,
    /// Innermost nonzero radius relative to r_max.
    pub r_min: f64,
    /// Points of the output grid.
    pub n_grid: usize,
    /// Chebyshev nodes per order.
    pub cheb_nodes: usize,
    /// Largest accepted spread of the two origin extrapolations, relative to
    /// max(|m·E|, m²).
    pub regularity_tol: f64,
    /// Relative tolerance of the S₀ quadrature.
    pub quad_tol: f64,
}

impl Default for HierarchyConfig {
    fn default() -> Self {
        Self {
            r_max: 2.0,
            r_min: 1e-9,
            n_grid: 400,
            cheb_nodes: 128,
            regularity_tol: 1e-6,
            quad_tol: 1e-10,
        }
    }
}

impl HierarchyConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::InvalidParameter(s.into()));
        if !(self.r_max > 0.0) {
            return bad("r_max must be > 0");
        }
        if !(self.r_min > 0.0 && self.r_min < 1e-2) {
            return bad("r_min must lie in (0, 1e-2)");
        }
        if self.n_grid < 16 {
            return bad("n_grid must be >= 16");
        }
        if self.cheb_nodes < 16 {
            return bad("cheb_nodes must be >= 16");
        }
        Ok(())
    }
}

/// Radial grid: 0, then r₀, 2r₀, 4r₀, 8r₀, then geometric up to r_max.
pub fn log_grid(r_max: f64, r_min_rel: f64, n: usize) -> Vec<f64> {
    let r0 = r_min_rel * r_max;
    let mut grid = vec![0.0, r0, 2.0 * r0, 4.0 * r0, 8.0 * r0];
    let rest = n.saturating_sub(grid.len()).max(1);
    let ratio = (r_max / (8.0 * r0)).powf(1.0 / rest as f64);
    for i in 1..=rest {
        grid.push(8.0 * r0 * ratio.powi(i as i32));
    }
    if let Some(last) = grid.last_mut() {
        *last = r_max;
    }
    grid
}

/// One order of the solution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyOrder {
    pub order: usize,
    /// E_{order−1} (absent for order 0), in energy units.
    pub energy: Option<f64>,
    /// Spread of the two origin extrapolations that fixed `energy`.
    pub regularity_residual: f64,
    /// Whether S′_order stays finite at the origin.
    pub origin_finite: bool,
    /// S_order on the grid, S(0) = 0; empty when `origin_finite` is false.
    pub s: Vec<f64>,
    /// S′_order on the grid; empty when `origin_finite` is false.
    pub ds: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HierarchyResult {
    pub dim: Dim,
    pub mass: f64,
    pub grid: Vec<f64>,
    pub orders: Vec<HierarchyOrder>,
    pub max_order: usize,
    pub regularity_residuals: Vec<f64>,
}

impl HierarchyResult {
    /// E_i for i = 0, 1, … as far as solved.
    pub fn energies(&self) -> Vec<f64> {
        self.orders.iter().filter_map(|o| o.energy).collect()
    }
}

/// Incremental solver. Orders must be added in sequence.
pub struct Hierarchy<P> {
    profile: P,
    mass: f64,
    dim: Dim,
    cfg: HierarchyConfig,
    half_width: f64,
    /// q_k = y_k/r for k ≥ 1 (index k − 1), with derivatives.
    q: Vec<(Chebyshev, Chebyshev)>,
    result: HierarchyResult,
}

impl<P: HierarchyProfile> Hierarchy<P> {
    pub fn new(profile: P, mass: f64, dim: Dim, cfg: HierarchyConfig) -> Result<Self> {
        cfg.validate()?;
        if !(mass > 0.0 && mass.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass m must be > 0, got {mass}")));
        }
        let half_width = cfg.r_max / mass;
        let grid = log_grid(half_width, cfg.r_min, cfg.n_grid);
        Ok(Self {
            profile,
            mass,
            dim,
            cfg,
            half_width,
            q: Vec::new(),
            result: HierarchyResult {
                dim,
                mass,
                grid,
                orders: Vec::new(),
                max_order: 0,
                regularity_residuals: Vec::new(),
            },
        })
    }

    pub fn result(&self) -> &HierarchyResult {
        &self.result
    }

    pub fn into_result(self) -> HierarchyResult {
        self.result
    }

    /// q₀ = √(2m·v/r²).
    fn q0(&self, r: f64) -> f64 {
        (2.0 * self.mass * self.profile.value_over_r2(r.abs())).sqrt()
    }

    /// y₀′ = m·v′/y₀ = m·(v′/r)/q₀.
    fn dy0(&self, r: f64) -> f64 {
        self.mass * self.profile.derivative_over_r(r.abs()) / self.q0(r)
    }

    fn q_at(&self, k: usize, r: f64) -> (f64, f64) {
        let (q, dq) = &self.q[k - 1];
        (q.eval(r), dq.eval(r))
    }

    /// N_k(r) for k ≥ 1.
    fn source(&self, k: usize, r: f64) -> f64 {
        let d1 = self.dim.value() - 1.0;
        if k == 1 {
            return 0.5 * (self.dy0(r) + d1 * self.q0(r));
        }
        let (q, dq) = self.q_at(k - 1, r);
        let laplacian = q + r * dq + d1 * q;
        let mut products = 0.0;
        for i in 1..k {
            products += self.q_at(i, r).0 * self.q_at(k - i, r).0;
        }
        0.5 * (laplacian - r * r * products)
    }

    /// Extrapolates N_k to the origin in t = r² through grid points
    /// 1..4 and 2..5; returns (value, spread).
    fn origin_limit(&self, k: usize) -> (f64, f64) {
        let g = &self.result.grid;
        let pts: Vec<(f64, f64)> = (1..=4).map(|i| (g[i] * g[i], self.source(k, g[i]))).collect();
        // Written as f₀ + Σ wᵢ(fᵢ − f₀) (the weights sum to one) so that a
        // constant source is reproduced exactly.
        let extrapolate = |p: &[(f64, f64)]| -> f64 {
            let base = p[0].1;
            let mut total = base;
            for (i, &(ti, fi)) in p.iter().enumerate() {
                let mut w = 1.0;
                for (j, &(tj, _)) in p.iter().enumerate() {
                    if i != j {
                        w *= tj / (tj - ti);
                    }
                }
                total += w * (fi - base);
            }
            total
        };
        let a = extrapolate(&pts[0..3]);
        let b = extrapolate(&pts[1..4]);
        (a, (a - b).abs())
    }

    /// S₀(r) = ∫₀^r √(2m·v) dr′ on the grid.
    pub fn solve_order0(&mut self) -> Result<&HierarchyOrder> {
        if !self.result.orders.is_empty() {
            return Err(Error::InvalidParameter("order 0 already solved".into()));
        }
        let grid = self.result.grid.clone();
        let v0 = self.profile.value(0.0);
        let scale = grid
            .iter()
            .map(|&r| self.profile.value(r).abs())
            .fold(0.0_f64, f64::max);
        if v0.abs() > 1e-14 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::NonzeroMinimum(v0));
        }
        for &r in &grid {
            let v = self.profile.value(r);
            if v < 0.0 || !v.is_finite() {
                return Err(Error::NegativePotential { r, value: v });
            }
        }
        let m = self.mass;
        let y0 = |r: f64| (2.0 * m * self.profile.value(r).max(0.0)).sqrt();
        let s = quad::cumulative(y0, &grid, self.cfg.quad_tol)?;
        let ds = grid.iter().map(|&r| y0(r)).collect();
        self.push(HierarchyOrder {
            order: 0,
            energy: None,
            regularity_residual: 0.0,
            origin_finite: true,
            s,
            ds,
        });
        Ok(self.result.orders.last().expect("just pushed"))
    }

    /// E₀ from origin regularity and S₁.
    pub fn solve_order1(&mut self) -> Result<&HierarchyOrder> {
        self.solve_order_k(1)
    }

    /// E_{k−1} and S_k, given orders 0..k−1.
    pub fn solve_order_k(&mut self, k: usize) -> Result<&HierarchyOrder> {
        if k == 0 {
            return self.solve_order0();
        }
        if self.result.orders.len() != k {
            return Err(Error::InvalidParameter(format!(
                "order {k} requested but {} orders are solved",
                self.result.orders.len()
            )));
        }
        if let Some(prev) = self.result.orders.last() {
            if !prev.origin_finite {
                return Err(Error::SingularOrder { order: prev.order });
            }
        }
        if k == 1 && !(self.q0(0.0) > 0.0 || self.q0(self.result.grid[1]) > 0.0) {
            return Err(Error::RegularityUnattainable {
                order: 0,
                spread: f64::INFINITY,
            });
        }
        let m = self.mass;
        let (limit, spread) = self.origin_limit(k);
        let scale = limit.abs().max(m * m);
        if !(spread <= self.cfg.regularity_tol * scale) {
            return Err(Error::RegularityUnattainable { order: k - 1, spread });
        }
        let energy = limit / m;
        let n = self.cfg.cheb_nodes;
        let qk = Chebyshev::from_fn(
            |r| (self.source(k, r) - limit) / (r * r * self.q0(r)),
            n,
            self.half_width,
        );
        let chopped = qk.chop(RESOLUTION, NOISE_FLOOR * m * m);
        let origin_finite = chopped.is_some();
        let (s, ds) = if let Some(qk) = chopped {
            let dqk = qk.derivative();
            let sk = Chebyshev::from_fn(|r| r * qk.eval(r), n + 1, self.half_width).integral();
            let grid = &self.result.grid;
            let s = grid.iter().map(|&r| sk.eval(r)).collect();
            let ds = grid.iter().map(|&r| r * qk.eval(r)).collect();
            self.q.push((qk, dqk));
            (s, ds)
        } else {
            (Vec::new(), Vec::new())
        };
        self.push(HierarchyOrder {
            order: k,
            energy: Some(energy),
            regularity_residual: spread,
            origin_finite,
            s,
            ds,
        });
        Ok(self.result.orders.last().expect("just pushed"))
    }

    fn push(&mut self, order: HierarchyOrder) {
        self.result.max_order = order.order;
        self.result.regularity_residuals.push(order.regularity_residual);
        self.result.orders.push(order);
    }

    /// Σ_{i<through} g^{1−i}·E_i.
    pub fn energy(&self, g: f64, through: usize) -> f64 {
        self.result
            .energies()
            .iter()
            .take(through)
            .enumerate()
            .map(|(i, &e)| g.powi(1 - i as i32) * e)
            .sum()
    }

    /// (H − E)ψ/ψ for the truncation S₀..S_K, E₀..E_{K−1} at coupling g:
    /// −(1/2m)(S′² − ∇²S) + g²v − E.
    pub fn equation_residual(&self, g: f64, order: usize, r: f64) -> f64 {
        let order = order.min(self.q.len());
        let d1 = self.dim.value() - 1.0;
        let r = r.abs();
        let y0 = r * self.q0(r);
        let mut ds = g * y0;
        let mut lap = g * (self.dy0(r) + d1 * self.q0(r));
        for k in 1..=order {
            let (q, dq) = self.q_at(k, r);
            let w = g.powi(1 - k as i32);
            ds += w * r * q;
            lap += w * (q + r * dq + d1 * q);
        }
        -(ds * ds - lap) / (2.0 * self.mass) + g * g * self.profile.value(r) - self.energy(g, order)
    }

    /// sup of |equation_residual| over r ∈ [0, span/√(g)·(1/m)].
    pub fn max_residual(&self, g: f64, order: usize, span: f64) -> f64 {
        let top = (span / (g.sqrt() * self.mass)).min(self.half_width);
        (0..=400)
            .map(|i| self.equation_residual(g, order, top * i as f64 / 400.0).abs())
            .fold(0.0, f64::max)
    }
}

/// Solves orders 0..=max_order.
pub fn solve<P: HierarchyProfile>(
    profile: P,
    mass: f64,
    dim: Dim,
    max_order: usize,
    cfg: HierarchyConfig,
) -> Result<Hierarchy<P>> {
    let mut h = Hierarchy::new(profile, mass, dim, cfg)?;
    h.solve_order0()?;
    for k in 1..=max_order {
        h.solve_order_k(k)?;
    }
    Ok(h)
}

/// Rejects potentials the hierarchy cannot treat before any work is done.
pub fn check_power_law(pot: &PowerLawPotential) -> Result<()> {
    if pot.n < 0 {
        return Err(Error::InvalidParameter(
            "Coulomb-like potentials are unbounded at the origin; use the coulomb or yukawa solvers".into(),
        ));
    }
    if *pot.k.numer() != 2 * *pot.k.denom() {
        return Err(Error::InvalidParameter(
            "the hierarchy needs V = g²·v (k = 2)".into(),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> HierarchyConfig {
        HierarchyConfig::default()
    }

    #[test]
    fn one_dimensional_oscillator() {
        let m = 1.3;
        let h = solve(EvenPolynomial::harmonic_1d(m), m, Dim::One, 3, cfg()).unwrap();
        let r = h.result();
        let e = r.energies();
        assert!((e[0] - m / 2f64.sqrt()).abs() < 1e-12);
        for (k, o) in r.orders.iter().enumerate().skip(1) {
            if k >= 2 {
                assert!(o.energy.unwrap().abs() < 1e-10, "E_{} = {:?}", k - 1, o.energy);
            }
            assert!(o.s.iter().all(|s| s.abs() < 1e-10));
        }
        for (&x, &s) in r.grid.iter().zip(&r.orders[0].s) {
            let exact = m * m * x * x / 2f64.sqrt();
            assert!((s - exact).abs() < 1e-10 * exact.max(1e-300), "{x}: {s} vs {exact}");
        }
    }

    #[test]
    fn three_dimensional_oscillator() {
        let m = 0.7;
        let h = solve(EvenPolynomial::harmonic_3d(m), m, Dim::Three, 2, cfg()).unwrap();
        let e = h.result().energies();
        assert!((e[0] - 1.5 * m).abs() < 1e-12);
        assert!(e[1].abs() < 1e-10);
        for (&x, &s) in h.result().grid.iter().zip(&h.result().orders[0].s) {
            assert!((s - 0.5 * m * m * x * x).abs() <= 1e-10 * (0.5 * m * m * x * x));
        }
    }

    #[test]
    fn zero_profile_gives_zero_s0() {
        let mut h = Hierarchy::new(EvenPolynomial::new(vec![0.0]), 1.0, Dim::Three, cfg()).unwrap();
        let o = h.solve_order0().unwrap();
        assert!(o.s.iter().all(|&s| s == 0.0));
        assert!(h.solve_order1().is_err());
    }

    #[test]
    fn rejects_bad_profiles() {
        let mut h = Hierarchy::new(EvenPolynomial::new(vec![0.1, 1.0]), 1.0, Dim::Three, cfg()).unwrap();
        assert!(matches!(h.solve_order0(), Err(Error::NonzeroMinimum(_))));
        let mut h = Hierarchy::new(EvenPolynomial::new(vec![0.0, -1.0]), 1.0, Dim::Three, cfg()).unwrap();
        assert!(matches!(h.solve_order0(), Err(Error::NegativePotential { .. })));
        let coulomb = PowerLawPotential::coulomb(1.0, 1.0).unwrap();
        assert!(check_power_law(&coulomb).is_err());
    }

    #[test]
    fn linear_minimum_is_not_regular() {
        let linear = PowerLawPotential::linear(1.0, 1.0).unwrap();
        check_power_law(&linear).unwrap();
        let mut h = Hierarchy::new(linear, 1.0, Dim::Three, cfg()).unwrap();
        h.solve_order0().unwrap();
        assert!(matches!(h.solve_order1(), Err(Error::RegularityUnattainable { order: 0, .. })));
    }

    #[test]
    fn quartic_leading_order() {
        let mut h = Hierarchy::new(EvenPolynomial::quartic(1.0), 1.0, Dim::Three, cfg()).unwrap();
        h.solve_order0().unwrap();
        let o = h.solve_order1().unwrap().clone();
        assert!(o.energy.unwrap().abs() < 1e-8);
        assert!(o.regularity_residual < 1e-8);
        assert!(!o.origin_finite);
        assert!(matches!(h.solve_order_k(2), Err(Error::SingularOrder { order: 1 })));
    }

    #[test]
    fn anharmonic_first_correction() {
        // v = x²/2 + c x⁴ in 1D: E₀ = 1/2, E₁ = 3c/4
        let c = 0.3;
        let h = solve(EvenPolynomial::new(vec![0.0, 0.5, c]), 1.0, Dim::One, 2, cfg()).unwrap();
        let e = h.result().energies();
        assert!((e[0] - 0.5).abs() < 1e-12);
        assert!((e[1] - 0.75 * c).abs() < 1e-10, "{}", e[1]);
    }

    #[test]
    fn anharmonic_matches_rayleigh_schrodinger() {
        // known series for x²/2 + c x⁴: 1/2 + 3c/4 − 21c²/8 + 333c³/16 − 30885c⁴/128
        let c = 0.1_f64;
        let h = solve(EvenPolynomial::new(vec![0.0, 0.5, c]), 1.0, Dim::One, 5, cfg()).unwrap();
        let e = h.result().energies();
        let known = [
            0.5,
            0.75 * c,
            -21.0 / 8.0 * c * c,
            333.0 / 16.0 * c.powi(3),
            -30885.0 / 128.0 * c.powi(4),
        ];
        for (i, (&got, &want)) in e.iter().zip(&known).enumerate() {
            assert!(((got - want) / want).abs() < 1e-5, "E_{i} = {got}, want {want}");
        }
    }

    #[test]
    fn residual_gains_one_power_per_order() {
        for dim in [Dim::One, Dim::Three] {
            let h = solve(EvenPolynomial::new(vec![0.0, 0.5, 0.3]), 1.0, dim, 5, cfg()).unwrap();
            for k in 1..=5 {
                let slope = (h.max_residual(10.0, k, 3.0) / h.max_residual(100.0, k, 3.0)).log10();
                assert!((slope - (k as f64 - 1.0)).abs() < 0.05, "{dim:?} K={k} slope {slope}");
            }
        }
    }

    #[test]
    fn grid_shape() {
        let g = log_grid(2.0, 1e-9, 50);
        assert_eq!(g.len(), 50);
        assert_eq!(g[0], 0.0);
        assert_eq!(g[2], 2.0 * g[1]);
        assert_eq!(*g.last().unwrap(), 2.0);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
