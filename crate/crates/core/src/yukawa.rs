//! Perturbative Yukawa states: the ground state to third order in the
//! screening λ = α/(g²m) and the N = 2 pair (2s, 2p) to first order.
//!
//! Everything is evaluated in the reduced variable ρ = g²m·r; the exponent
//! corrections are integrals of the scaled variable t = λρ = α·r.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coulomb;
use crate::error::{Error, Result};
use crate::model::{EnergySeries, ScreenedPotential};
use crate::oracle::{self, Profile, SolverConfig};
use crate::quad;

const QUAD_TOL: f64 = 1e-12;

/// Reduced ground-state energy coefficients of 1, λ, λ², λ³.
pub const GROUND_COEFFICIENTS: [f64; 4] = [-0.5, 1.0, -0.75, 0.5];

/// Integrand of the ground-state exponent correction, (1 − e^{−t})/t − 1.
pub fn ground_integrand(t: f64) -> f64 {
    if t < 1e-3 {
        return t * (-0.5 + t * (1.0 / 6.0 + t * (-1.0 / 24.0 + t / 120.0)));
    }
    -(-t).exp_m1() / t - 1.0
}

/// F(x) = ∫₀^x ((1 − e^{−t})/t − 1) dt by adaptive quadrature.
pub fn ground_correction(x: f64) -> Result<f64> {
    quad::integrate(ground_integrand, 0.0, x, QUAD_TOL)
}

/// F(x) from its Taylor series Σ_{k≥2} (−1)^{k+1} x^k/(k·k!), for small x.
pub fn ground_correction_series(x: f64, terms: usize) -> f64 {
    let mut total = 0.0;
    let mut power_over_fact = x; // x^k / k!
    for k in 2..=terms.max(2) + 1 {
        power_over_fact *= x / k as f64;
        let sign = if k % 2 == 0 { -1.0 } else { 1.0 };
        total += sign * power_over_fact / k as f64;
    }
    total
}

/// Ground state to third order in λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YukawaGroundState {
    pub pot: ScreenedPotential,
    pub energy: EnergySeries,
}

impl YukawaGroundState {
    pub fn new(pot: ScreenedPotential) -> Result<Self> {
        pot.validate()?;
        Ok(Self {
            pot,
            energy: EnergySeries::new(Rational64::from(4), GROUND_COEFFICIENTS.to_vec())?,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.pot.lambda()
    }

    /// Reduced energy ε̂ truncated at `order`.
    pub fn reduced_energy(&self, order: usize) -> Result<f64> {
        Ok(self.energy.truncated(order)?.reduced(self.lambda()))
    }

    /// Reduced exponent Ŝ(ρ) = ρ + F(λρ) (order 1) or ρ (order 0).
    pub fn reduced_exponent(&self, rho: f64, order: usize) -> Result<f64> {
        match order {
            0 => Ok(rho),
            1 => {
                let lambda = self.lambda();
                if lambda == 0.0 {
                    Ok(rho)
                } else {
                    Ok(rho + ground_correction(lambda * rho)?)
                }
            }
            _ => Err(Error::SeriesOrder {
                requested: order,
                max: 1,
            }),
        }
    }

    /// R̂(ρ) = c·e^{−Ŝ(ρ)} with ∫R̂²ρ²dρ = 1. At λ = 0 this is the Coulomb 1s
    /// state with its closed-form normalization.
    pub fn reduced_wavefunction(&self) -> Result<ReducedGround> {
        let lambda = self.lambda();
        let norm = if lambda == 0.0 {
            let integral = coulomb::norm_integral_exact(1, 0)?;
            1.0 / num_traits::ToPrimitive::to_f64(&integral).unwrap_or(f64::NAN).sqrt()
        } else {
            // Ŝ ~ ρ(1 − λ) asymptotically, so the tail decays at rate 2(1 − λ) at worst.
            let decay = (1.0 - lambda).max(0.05);
            let upper = 60.0 / decay;
            let integral = quad::integrate(
                |rho| {
                    let s = self.reduced_exponent(rho, 1).unwrap_or(f64::INFINITY);
                    rho * rho * (-2.0 * s).exp()
                },
                0.0,
                upper,
                QUAD_TOL,
            )?;
            1.0 / integral.sqrt()
        };
        Ok(ReducedGround {
            state: self.clone(),
            norm,
        })
    }
}

/// Normalized reduced ground-state radial function.
#[derive(Debug, Clone)]
pub struct ReducedGround {
    state: YukawaGroundState,
    norm: f64,
}

impl ReducedGround {
    pub fn norm(&self) -> f64 {
        self.norm
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        let s = self.state.reduced_exponent(rho, 1)?;
        Ok(self.norm * (-s).exp())
    }
}

/// E = g⁴m(−½ + λ − ¾λ² + ½λ³), truncated at `order` (at most 3).
pub fn yukawa_ground_energy(pot: &ScreenedPotential, order: usize) -> Result<f64> {
    if order > 3 {
        return Err(Error::SeriesOrder {
            requested: order,
            max: 3,
        });
    }
    let state = YukawaGroundState::new(*pot)?;
    Ok(state
        .energy
        .truncated(order)?
        .evaluate(pot.g, pot.m, pot.lambda()))
}

/// S(r) = g²m·r + α·I(r) with I(r) = ∫₀^r ((1 − e^{−αr′})/(αr′) − 1) dr′.
pub fn yukawa_ground_s(pot: &ScreenedPotential, r: f64, order: usize) -> Result<f64> {
    let (rho, _) = crate::model::reduce_coulomb_like(pot, r);
    YukawaGroundState::new(*pot)?.reduced_exponent(rho, order)
}

/// Combined N = 2 integrand without the constant, (1 − 2e^{−t})/t + 1/(e^t − 1).
///
/// The two 1/t poles cancel; below t = 1e-3 the Taylor series is used.
pub fn excited_kernel(t: f64) -> f64 {
    if t < 1e-3 {
        1.5 + kernel_series_tail(t)
    } else {
        (1.0 - 2.0 * (-t).exp()) / t + 1.0 / t.exp_m1()
    }
}

/// kernel(t) − 3/2 for small t.
fn kernel_series_tail(t: f64) -> f64 {
    t * (-11.0 / 12.0 + t * (1.0 / 3.0 + t * (-61.0 / 720.0 + t / 60.0)))
}

/// L² + L + 6.
pub fn excited_constant(l: u32) -> f64 {
    f64::from(l * l + l + 6)
}

/// The N = 2 integrand h(t) = kernel(t) − (L² + L + 6)/4.
pub fn excited_integrand(t: f64, l: u32) -> f64 {
    let c = excited_constant(l) / 4.0;
    if t < 1e-3 {
        (1.5 - c) + kernel_series_tail(t)
    } else {
        excited_kernel(t) - c
    }
}

/// G(x) = ∫₀^x h(t) dt by adaptive quadrature.
pub fn excited_correction(x: f64, l: u32) -> Result<f64> {
    quad::integrate(|t| excited_integrand(t, l), 0.0, x, QUAD_TOL)
}

/// Screening above which the first-order N = 2 state is not normalizable:
/// Ŝ ~ ρ(1 − λ(L² + L + 6)/2)/2 at large ρ.
pub fn excited_normalizable_limit(l: u32) -> f64 {
    2.0 / excited_constant(l)
}

fn check_excited_l(l: u32) -> Result<()> {
    if l > 1 {
        return Err(Error::ExcitedSeriesL(l));
    }
    Ok(())
}

/// The N = 2, L ∈ {0, 1} state to first order in λ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct YukawaExcitedState {
    pub pot: ScreenedPotential,
    #[serde(rename = "L")]
    pub l: u32,
    pub energy: EnergySeries,
}

impl YukawaExcitedState {
    pub fn new(pot: ScreenedPotential, l: u32) -> Result<Self> {
        check_excited_l(l)?;
        pot.validate()?;
        let energy = EnergySeries::new(
            Rational64::from(4),
            vec![-0.125, excited_constant(l) / 8.0],
        )?;
        Ok(Self { pot, l, energy })
    }

    pub fn lambda(&self) -> f64 {
        self.pot.lambda()
    }

    /// Leading energy coefficient E₀ = −m/8 (of g⁴).
    pub fn e0(&self) -> f64 {
        -self.pot.m / 8.0
    }

    /// Leading exponent slope dS₀/dr = m/2 (of g²).
    pub fn ds0_dr(&self) -> f64 {
        self.pot.m / 2.0
    }

    /// First-order energy coefficient E₁ = (6 + L(L+1))α/8 (of g²).
    pub fn e1(&self) -> f64 {
        excited_constant(self.l) * self.pot.alpha / 8.0
    }

    /// b₀ = 1 − L.
    pub fn b0(&self) -> f64 {
        1.0 - f64::from(self.l)
    }

    /// b₁(r) = −(m/2α)(1 − e^{−αr}) (of g²); requires α > 0.
    pub fn b1(&self, r: f64) -> Result<f64> {
        if self.pot.alpha == 0.0 {
            return Err(Error::UseCoulomb);
        }
        Ok(self.pot.m / (2.0 * self.pot.alpha) * (-self.pot.alpha * r).exp_m1())
    }

    /// E = g⁴m·ε̂ with ε̂ = −(1/8)(1 − λ(L² + L + 6)) at order 1.
    pub fn reduced_energy(&self, order: usize) -> Result<f64> {
        Ok(self.energy.truncated(order)?.reduced(self.lambda()))
    }

    /// Reduced polynomial shape (1 − L) − (1 − e^{−λρ})/(2λ); the λ = 0
    /// limit (1 − L) − ρ/2 is used when λ = 0.
    pub fn reduced_polynomial_shape(&self, rho: f64) -> f64 {
        let lambda = self.lambda();
        let b1 = if lambda == 0.0 {
            rho / 2.0
        } else {
            -(-lambda * rho).exp_m1() / (2.0 * lambda)
        };
        self.b0() - b1
    }

    /// Ŝ(ρ) = ρ/2 + G(λρ).
    pub fn reduced_exponent(&self, rho: f64) -> Result<f64> {
        let lambda = self.lambda();
        if lambda == 0.0 {
            return Ok(rho / 2.0);
        }
        Ok(rho / 2.0 + excited_correction(lambda * rho, self.l)?)
    }

    /// Radius of the 2s node, where (1 − e^{−λρ}) = 2λ: ρ = −ln(1 − 2λ)/λ.
    pub fn reduced_node(&self) -> Option<f64> {
        let lambda = self.lambda();
        if self.l != 0 || lambda >= 0.5 {
            return None;
        }
        if lambda == 0.0 {
            return Some(2.0);
        }
        Some(-(-2.0 * lambda).ln_1p() / lambda)
    }
}

/// Normalized reduced N = 2 radial function R̂ = a₀·shape(ρ)·e^{−Ŝ(ρ)}.
#[derive(Debug, Clone)]
pub struct ReducedExcited {
    state: YukawaExcitedState,
    a0: f64,
}

impl ReducedExcited {
    /// a₀, signed so that R̂ > 0 near the origin.
    pub fn a0(&self) -> f64 {
        self.a0
    }

    pub fn eval(&self, rho: f64) -> Result<f64> {
        let s = self.state.reduced_exponent(rho)?;
        Ok(self.a0 * self.state.reduced_polynomial_shape(rho) * (-s).exp())
    }

    pub fn state(&self) -> &YukawaExcitedState {
        &self.state
    }
}

/// Panels per unit of the decay length in the normalization integral.
const NORM_PANELS: usize = 40;

/// Builds the normalized reduced N = 2 radial function.
pub fn yukawa_excited_wavefunction(pot: &ScreenedPotential, l: u32) -> Result<ReducedExcited> {
    let state = YukawaExcitedState::new(*pot, l)?;
    let lambda = state.lambda();
    if lambda == 0.0 {
        return Err(Error::UseCoulomb);
    }
    let limit = excited_normalizable_limit(l);
    if lambda >= limit {
        return Err(Error::NotNormalizable { lambda, limit });
    }
    let decay = 0.5 * (1.0 - lambda / limit);
    let upper = 70.0 / decay;
    let grid: Vec<f64> = (0..=NORM_PANELS * 70)
        .map(|i| upper * i as f64 / (NORM_PANELS * 70) as f64)
        .collect();
    let g_vals = quad::cumulative(|rho| excited_integrand(lambda * rho, l) * lambda, &grid, QUAD_TOL)?;
    let slope = |rho: f64| excited_integrand(lambda * rho, l) * lambda;
    let mut integral = 0.0;
    for (w, gw) in grid.windows(2).zip(g_vals.windows(2)) {
        let (a, b, h) = (w[0], w[1], w[1] - w[0]);
        let (ga, gb) = (gw[0], gw[1]);
        let (da, db) = (slope(a) * h, slope(b) * h);
        // Cubic Hermite interpolation of G from exact values and slopes.
        integral += quad::integrate(
            |rho| {
                let t = (rho - a) / h;
                let (t2, t3) = (t * t, t * t * t);
                let g = (2.0 * t3 - 3.0 * t2 + 1.0) * ga
                    + (t3 - 2.0 * t2 + t) * da
                    + (-2.0 * t3 + 3.0 * t2) * gb
                    + (t3 - t2) * db;
                let p = state.reduced_polynomial_shape(rho);
                rho * rho * p * p * (-2.0 * (rho / 2.0 + g)).exp()
            },
            a,
            b,
            QUAD_TOL,
        )?;
    }
    let magnitude = 1.0 / integral.sqrt();
    let a0 = if l == 0 { magnitude } else { -magnitude };
    Ok(ReducedExcited { state, a0 })
}

/// E = −(g⁴m/8)(1 − λ(L² + L + 6)) truncated at `order` (at most 1).
pub fn yukawa_excited_energy(pot: &ScreenedPotential, l: u32, order: usize) -> Result<f64> {
    check_excited_l(l)?;
    if order > 1 {
        return Err(Error::SeriesOrder {
            requested: order,
            max: 1,
        });
    }
    let state = YukawaExcitedState::new(*pot, l)?;
    Ok(state
        .energy
        .truncated(order)?
        .evaluate(pot.g, pot.m, pot.lambda()))
}

/// States covered by the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum YukawaLevel {
    #[serde(rename = "1s")]
    S1,
    #[serde(rename = "2s")]
    S2,
    #[serde(rename = "2p")]
    P2,
}

impl YukawaLevel {
    pub const ALL: [YukawaLevel; 3] = [YukawaLevel::S1, YukawaLevel::S2, YukawaLevel::P2];

    pub fn label(self) -> &'static str {
        match self {
            YukawaLevel::S1 => "1s",
            YukawaLevel::S2 => "2s",
            YukawaLevel::P2 => "2p",
        }
    }

    pub fn n(self) -> u32 {
        match self {
            YukawaLevel::S1 => 1,
            _ => 2,
        }
    }

    pub fn l(self) -> u32 {
        match self {
            YukawaLevel::P2 => 1,
            _ => 0,
        }
    }

    pub fn radial_nodes(self) -> usize {
        (self.n() - self.l() - 1) as usize
    }

    /// Highest-order reduced series value: order 3 for 1s, order 1 for N = 2.
    pub fn series_energy(self, lambda: f64) -> Result<f64> {
        let pot = ScreenedPotential::from_lambda(1.0, lambda, 1.0)?;
        match self {
            YukawaLevel::S1 => YukawaGroundState::new(pot)?.reduced_energy(3),
            _ => YukawaExcitedState::new(pot, self.l())?.reduced_energy(1),
        }
    }

    pub fn coulomb_energy(self) -> f64 {
        coulomb::reduced_energy(self.n())
    }
}

impl std::str::FromStr for YukawaLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1s" => Ok(YukawaLevel::S1),
            "2s" => Ok(YukawaLevel::S2),
            "2p" => Ok(YukawaLevel::P2),
            other => Err(Error::InvalidParameter(format!(
                "unknown state {other:?}; expected 1s, 2s or 2p"
            ))),
        }
    }
}

/// One (λ, state) row; energies are reduced (scaled by g⁴m).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub lambda: f64,
    pub state: YukawaLevel,
    pub analytic: f64,
    pub oracle: Option<f64>,
    pub coulomb: f64,
    /// |analytic − oracle|/|oracle|.
    pub deviation: Option<f64>,
    /// |coulomb − oracle|/|oracle|.
    pub coulomb_deviation: Option<f64>,
    /// Reason the oracle value is missing.
    pub note: Option<String>,
}

/// Series vs. oracle vs. Coulomb for every (λ, state), ordered by λ then state.
///
/// A missing bound state becomes a hole in the row; any other oracle failure
/// is returned as an error.
pub fn comparison_table(
    lambdas: &[f64],
    states: &[YukawaLevel],
    cfg: &SolverConfig,
) -> Result<Vec<ComparisonRow>> {
    let jobs: Vec<(f64, YukawaLevel)> = lambdas
        .iter()
        .flat_map(|&lambda| states.iter().map(move |&s| (lambda, s)))
        .collect();
    jobs.par_iter()
        .map(|&(lambda, state)| comparison_row(lambda, state, cfg))
        .collect()
}

fn comparison_row(lambda: f64, state: YukawaLevel, cfg: &SolverConfig) -> Result<ComparisonRow> {
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::InvalidParameter(format!("lambda must be >= 0, got {lambda}")));
    }
    let analytic = state.series_energy(lambda)?;
    let coulomb = state.coulomb_energy();
    let profile = Profile::yukawa(lambda);
    let (oracle, note) = match oracle::solve_bound_state(&profile, state.l(), state.radial_nodes(), cfg) {
        Ok(s) => (Some(s.eigenvalue), None),
        Err(Error::NoBoundState { detail, .. }) => (None, Some(format!("no bound state: {detail}"))),
        Err(e) => return Err(e),
    };
    let rel = |x: f64| oracle.map(|o| (x - o).abs() / o.abs());
    Ok(ComparisonRow {
        lambda,
        state,
        analytic,
        oracle,
        coulomb,
        deviation: rel(analytic),
        coulomb_deviation: rel(coulomb),
        note,
    })
}
