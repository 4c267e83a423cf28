//! Independent numerical solver for the reduced radial equation
//!
//! ```text
//! −½ u″ + [W(ρ) + L(L+1)/(2ρ²)] u = ε u,   u(0) = 0,  u(∞) = 0
//! ```
//!
//! Two discretizations with unrelated error profiles are provided:
//! a uniform-grid finite-difference matrix solved by Sturm bisection (with one
//! Richardson step in the grid spacing), and adaptive-RK shooting with
//! node-count bracketing and turning-point matching.

mod matrix;
mod shooting;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::GridState;
use crate::quad;

/// Substitute for W_eff where it is not finite (only ever touched at ρ → 0).
pub(crate) const W_EFF_FLOOR: f64 = 1e300;

/// Potential profile in the oracle's working variable.
pub trait RadialPotential: Sync {
    fn value(&self, x: f64) -> f64;

    /// Energy above which the spectrum is continuous (∞ for confining potentials).
    fn continuum_threshold(&self) -> f64 {
        f64::INFINITY
    }

    /// Characteristic length of the low-lying states.
    fn length_hint(&self) -> f64 {
        1.0
    }
}

/// Built-in profiles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    /// W(x) = −charge · e^{−screening·x} / x. The reduced Yukawa problem is
    /// `charge = 1, screening = λ`.
    Screened { charge: f64, screening: f64 },
    /// W(x) = coefficient · x^n.
    PowerLaw { coefficient: f64, n: i32 },
}

impl Profile {
    /// Reduced Yukawa/Coulomb profile −e^{−λρ}/ρ.
    pub fn yukawa(lambda: f64) -> Self {
        Profile::Screened {
            charge: 1.0,
            screening: lambda,
        }
    }
}

impl RadialPotential for Profile {
    fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Screened { charge, screening } => -charge * (-screening * x).exp() / x,
            Profile::PowerLaw { coefficient, n } => coefficient * x.powi(n),
        }
    }

    fn continuum_threshold(&self) -> f64 {
        match *self {
            Profile::Screened { .. } => 0.0,
            Profile::PowerLaw { coefficient, n } if n < 0 || coefficient <= 0.0 => 0.0,
            Profile::PowerLaw { .. } => f64::INFINITY,
        }
    }

    fn length_hint(&self) -> f64 {
        match *self {
            Profile::Screened { charge, .. } => 1.0 / charge,
            Profile::PowerLaw { coefficient, n } if coefficient != 0.0 && n != -2 => {
                coefficient.abs().powf(-1.0 / f64::from(n + 2))
            }
            Profile::PowerLaw { .. } => 1.0,
        }
    }
}

/// Wraps an arbitrary closure as a profile.
pub struct Custom<F> {
    pub f: F,
    pub threshold: f64,
    pub length: f64,
}

impl<F: Fn(f64) -> f64 + Sync> RadialPotential for Custom<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn continuum_threshold(&self) -> f64 {
        self.threshold
    }
    fn length_hint(&self) -> f64 {
        self.length
    }
}

/// Solver settings. `rho_max = None` selects the box automatically.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub rho_max: Option<f64>,
    pub n_points: usize,
    /// Largest grid spacing, in units of the potential's length hint.
    pub max_spacing: f64,
    pub eig_tol: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rho_max: None,
            n_points: 2000,
            max_spacing: 0.01,
            eig_tol: 1e-9,
            max_iter: 200,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_points < 1000 {
            return Err(Error::InvalidParameter(format!(
                "n_points must be >= 1000, got {}",
                self.n_points
            )));
        }
        if !(self.eig_tol > 0.0 && self.eig_tol <= 1e-8) {
            return Err(Error::InvalidParameter(format!(
                "eig_tol must lie in (0, 1e-8], got {}",
                self.eig_tol
            )));
        }
        if !(self.max_spacing > 0.0) {
            return Err(Error::InvalidParameter("max_spacing must be > 0".into()));
        }
        if let Some(r) = self.rho_max {
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::InvalidParameter(format!("rho_max must be > 0, got {r}")));
            }
        }
        Ok(())
    }

    fn intervals(&self, pot: &dyn RadialPotential, rho_max: f64) -> usize {
        let by_spacing = (rho_max / (self.max_spacing * pot.length_hint())).ceil() as usize;
        self.n_points.max(by_spacing)
    }
}

/// Amplitude ratio allowed in the outer tenth of the box.
const TAIL_LIMIT: f64 = 1e-10;
const MAX_BOX_GROWTH: usize = 14;

fn tail_ratio(u: &[f64]) -> f64 {
    let peak = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let start = u.len() - u.len() / 10;
    let tail = u[start..].iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        1.0
    } else {
        tail / peak
    }
}

fn no_state(l: u32, nodes: usize, detail: String) -> Error {
    Error::NoBoundState { l, nodes, detail }
}

/// Picks a box large enough that the state has decayed below 1e−10 of its
/// peak over the outer tenth, growing from a size set by the length hint.
pub fn select_box(pot: &dyn RadialPotential, l: u32, nodes: usize, cfg: &SolverConfig) -> Result<f64> {
    cfg.validate()?;
    if let Some(r) = cfg.rho_max {
        return Ok(r);
    }
    let hint = pot.length_hint();
    let level = (nodes + l as usize + 1) as f64;
    let mut r = 6.0 * hint * level * level.sqrt();
    let threshold = pot.continuum_threshold();
    for _ in 0..MAX_BOX_GROWTH {
        let intervals = ((r / (0.05 * hint)).ceil() as usize).max(600);
        let (e, v) = matrix::solve_level(pot, l, nodes, r, intervals, cfg.max_iter, true)
            .ok_or_else(|| no_state(l, nodes, "grid too small for requested state".into()))?;
        if e < threshold && tail_ratio(&v) < 0.1 * TAIL_LIMIT {
            return Ok(r);
        }
        r *= if e < threshold { 1.4 } else { 2.0 };
    }
    Err(no_state(
        l,
        nodes,
        format!("no state below threshold {threshold} with a decayed tail up to rho_max = {r:.4e}"),
    ))
}

/// Richardson-extrapolated finite-difference eigenpair on a fixed box.
fn matrix_state(
    pot: &dyn RadialPotential,
    l: u32,
    nodes: usize,
    rho_max: f64,
    cfg: &SolverConfig,
) -> Result<GridState> {
    let n1 = cfg.intervals(pot, rho_max);
    let fail = || no_state(l, nodes, "grid too small for requested state".into());
    let (e1, v1) = matrix::solve_level(pot, l, nodes, rho_max, n1, cfg.max_iter, true).ok_or_else(fail)?;
    let (e2, v2) =
        matrix::solve_level(pot, l, nodes, rho_max, 2 * n1, cfg.max_iter, true).ok_or_else(fail)?;
    let eigenvalue = (4.0 * e2 - e1) / 3.0;

    let h = rho_max / n1 as f64;
    let grid: Vec<f64> = (0..=n1).map(|i| h * i as f64).collect();
    let coarse = normalized_with_walls(&v1, &grid);
    let fine_grid: Vec<f64> = (0..=2 * n1).map(|i| 0.5 * h * i as f64).collect();
    let fine = normalized_with_walls(&v2, &fine_grid);
    let mut u: Vec<f64> = (0..=n1)
        .map(|i| (4.0 * fine[2 * i] - coarse[i]) / 3.0)
        .collect();
    let norm = quad::simpson_uniform(h, &u.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    for x in &mut u {
        *x /= norm;
    }
    let state = GridState {
        nodes: node_count(&u),
        grid,
        u,
        eigenvalue,
        l,
    };
    if state.nodes != nodes {
        return Err(Error::NotConverged {
            iterations: 0,
            detail: format!("eigenvector has {} nodes, expected {nodes}", state.nodes),
        });
    }
    Ok(state)
}

/// Pads interior values with the Dirichlet zeros, normalizes ∫u² = 1 and
/// fixes the sign so that u > 0 next to the origin.
fn normalized_with_walls(interior: &[f64], grid: &[f64]) -> Vec<f64> {
    let mut u = Vec::with_capacity(interior.len() + 2);
    u.push(0.0);
    u.extend_from_slice(interior);
    u.push(0.0);
    let h = grid[1] - grid[0];
    let norm = quad::simpson_uniform(h, &u.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    let peak = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let sign = u
        .iter()
        .find(|v| v.abs() > 1e-8 * peak)
        .map(|v| v.signum())
        .unwrap_or(1.0);
    u.iter().map(|x| sign * x / norm).collect()
}

/// Solves for the bound state with `nodes` radial nodes and orbital number `l`.
///
/// The eigenvalue comes from the finite-difference matrix; the box is
/// checked post hoc and extended once if the tail has not decayed.
pub fn solve_bound_state(
    pot: &dyn RadialPotential,
    l: u32,
    nodes: usize,
    cfg: &SolverConfig,
) -> Result<GridState> {
    let rho_max = select_box(pot, l, nodes, cfg)?;
    let state = matrix_state(pot, l, nodes, rho_max, cfg)?;
    let threshold = pot.continuum_threshold();
    let ok = |s: &GridState| tail_ratio(&s.u) < TAIL_LIMIT && s.eigenvalue < threshold;
    if ok(&state) {
        return Ok(state);
    }
    let state = matrix_state(pot, l, nodes, 1.5 * rho_max, cfg)?;
    if ok(&state) {
        return Ok(state);
    }
    Err(no_state(
        l,
        nodes,
        format!(
            "eigenvalue {} with boundary amplitude ratio {:.2e} at rho_max = {}",
            state.eigenvalue,
            tail_ratio(&state.u),
            1.5 * rho_max
        ),
    ))
}

/// Shooting eigenvalue on the box [0, rho_max].
pub fn shooting_eigenvalue(
    pot: &dyn RadialPotential,
    l: u32,
    nodes: usize,
    rho_max: f64,
    cfg: &SolverConfig,
) -> Result<f64> {
    cfg.validate()?;
    let rtol = (cfg.eig_tol * 1e-3).max(1e-13);
    let e = shooting::Shooter::new(pot, l, rho_max, rtol).eigenvalue(
        nodes,
        pot.continuum_threshold(),
        cfg.max_iter,
    )?;
    if e >= pot.continuum_threshold() {
        return Err(no_state(l, nodes, format!("shooting eigenvalue {e} above threshold")));
    }
    Ok(e)
}

/// Both oracle routes for one state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub state: GridState,
    pub matrix: f64,
    pub shooting: f64,
    pub relative_difference: f64,
    pub rho_max: f64,
}

pub fn cross_check(
    pot: &dyn RadialPotential,
    l: u32,
    nodes: usize,
    cfg: &SolverConfig,
) -> Result<CrossCheck> {
    let state = solve_bound_state(pot, l, nodes, cfg)?;
    let rho_max = *state.grid.last().unwrap_or(&0.0);
    let shooting = shooting_eigenvalue(pot, l, nodes, rho_max, cfg)?;
    let matrix = state.eigenvalue;
    Ok(CrossCheck {
        relative_difference: (matrix - shooting).abs() / matrix.abs().max(f64::MIN_POSITIVE),
        state,
        matrix,
        shooting,
        rho_max,
    })
}

/// ⟨f⟩ = ∫u² f dρ over the state's grid (Simpson on uniform grids).
pub fn expectation_value<F: Fn(f64) -> f64>(state: &GridState, f: F) -> Result<f64> {
    let hint = state
        .grid
        .get(1)
        .copied()
        .unwrap_or(1.0)
        .max(f64::MIN_POSITIVE);
    let probes = [1e-2 * hint, 1e-4 * hint, 1e-6 * hint];
    let weights: Vec<f64> = probes.iter().map(|&x| (f(x) * x * x).abs()).collect();
    if weights[1] > 10.0 * weights[0] && weights[2] > 10.0 * weights[1] {
        return Err(Error::SingularObservable);
    }
    let integrand: Vec<f64> = state
        .grid
        .iter()
        .zip(&state.u)
        .map(|(&x, &u)| if u == 0.0 { 0.0 } else { u * u * f(x) })
        .collect();
    let n = state.grid.len();
    if n > 2 {
        let h = (state.grid[n - 1] - state.grid[0]) / (n - 1) as f64;
        let uniform = state
            .grid
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h);
        if uniform {
            return Ok(quad::simpson_uniform(h, &integrand));
        }
    }
    Ok(quad::trapezoid(&state.grid, &integrand))
}

/// Strict sign changes of `u`, ignoring exact zeros (walls).
pub fn node_count(u: &[f64]) -> usize {
    let peak = u.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let floor = 1e-12 * peak;
    let mut count = 0;
    let mut last = 0.0_f64;
    for &v in u {
        if v.abs() <= floor {
            continue;
        }
        if last != 0.0 && v.signum() != last {
            count += 1;
        }
        last = v.signum();
    }
    count
}
