use clap::{Args, ValueEnum};
use flz_core::coulomb::{coefficients_exact, coulomb_state, coulomb_wavefunction, reduced_energy};
use flz_core::hierarchy::{self, Dim, EvenPolynomial};
use flz_core::model::{int_pow, ratio_str, PowerLawPotential, QuantumNumbers, ScreenedPotential};
use flz_core::oracle::{self, Profile, RadialPotential};
use flz_core::scaling::{
    g_factor_exponent, oracle_profile, verify_factorization_with_exponent, verify_radius_mapping,
};
use flz_core::yukawa::{
    comparison_table, yukawa_excited_wavefunction, YukawaGroundState, YukawaLevel,
};
use flz_core::Error;
use num_rational::Rational64;
use serde::Serialize;

use crate::output::{Cell, Table};
use crate::{CliError, Config, Outcome, PotentialKind};

const FACTORIZATION_TOL: f64 = 1e-5;
const VIRIAL_TOL: f64 = 1e-5;
const RADIUS_MAP_TOL: f64 = 1e-6;

type CmdResult = Result<Outcome, CliError>;

fn core<T>(r: flz_core::Result<T>) -> Result<T, CliError> {
    r.map_err(CliError::from_core)
}

/// Inclusive integer range: `3`, `1..4`. A reversed range is empty.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Range {
    pub lo: u32,
    pub hi: u32,
}

impl Range {
    fn iter(self) -> std::ops::RangeInclusive<u32> {
        self.lo..=self.hi
    }

    fn is_empty(self) -> bool {
        self.hi < self.lo
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let num = |t: &str| {
        t.trim()
            .parse::<u32>()
            .map_err(|e| format!("bad range bound {t:?}: {e}"))
    };
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(Range { lo: num(a)?, hi: num(b)? })
        }
        None => {
            let v = num(s)?;
            Ok(Range { lo: v, hi: v })
        }
    }
}

fn parse_rational(s: &str) -> Result<Rational64, String> {
    ratio_str::parse(s)
}

fn parse_dim(s: &str) -> Result<Dim, String> {
    match s.trim() {
        "1" => Ok(Dim::One),
        "3" => Ok(Dim::Three),
        other => Err(format!("dimension must be 1 or 3, got {other:?}")),
    }
}

fn parse_level(s: &str) -> Result<YukawaLevel, String> {
    s.parse::<YukawaLevel>().map_err(|e| e.to_string())
}

/// Parameters of a general power law `± strength · g^k m (m r)^n`.
#[derive(Debug, Args, Serialize)]
pub struct PowerLawArgs {
    /// r-exponent n (powerlaw only).
    #[arg(long = "n", allow_negative_numbers = true)]
    pub exponent: Option<i32>,
    /// g-exponent k as a rational such as `2` or `4/3` (powerlaw only).
    #[arg(long, value_parser = parse_rational, default_value = "2")]
    #[serde(with = "ratio_str")]
    pub k: Rational64,
    /// Positive prefactor (powerlaw only).
    #[arg(long, default_value_t = 1.0)]
    pub strength: f64,
}

fn power_law(kind: PotentialKind, p: &PowerLawArgs, g: f64, m: f64) -> Result<PowerLawPotential, CliError> {
    core(match kind {
        PotentialKind::Coulomb => PowerLawPotential::coulomb(g, m),
        PotentialKind::Harmonic => PowerLawPotential::harmonic(g, m),
        PotentialKind::Linear => PowerLawPotential::linear(g, m),
        PotentialKind::Powerlaw => {
            let n = p
                .exponent
                .ok_or_else(|| CliError::Usage("--potential powerlaw needs --n".into()))?;
            let sign = if n > 0 { 1 } else { -1 };
            PowerLawPotential::with_strength(sign, p.k, n, m, g, p.strength)
        }
        PotentialKind::Yukawa => {
            return Err(CliError::Usage("yukawa is not a power law".into()));
        }
    })
}

// ---------------------------------------------------------------- spectrum

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialKind,
    /// Principal quantum numbers, e.g. `1..3`.
    #[arg(long = "N", value_parser = parse_range, default_value = "1")]
    pub n: Range,
    /// Orbital quantum numbers; all allowed values when omitted.
    #[arg(long = "L", value_parser = parse_range)]
    pub l: Option<Range>,
    /// Screening λ = α/(g²m) (yukawa only).
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    #[command(flatten)]
    pub power: PowerLawArgs,
}

pub fn spectrum(a: &SpectrumArgs, cfg: &Config) -> CmdResult {
    let mut table = Table::new(&["N", "L", "eps_hat", "E", "source", "note"]);
    if !a.n.is_empty() && a.n.lo < 1 {
        return Err(CliError::Usage("N must be >= 1".into()));
    }
    let (g, m) = (cfg.g, cfg.m);
    let pot = match a.potential {
        PotentialKind::Yukawa => None,
        kind => Some(power_law(kind, &a.power, g, m)?),
    };
    if a.potential == PotentialKind::Yukawa && !(a.lambda >= 0.0 && a.lambda.is_finite()) {
        return Err(CliError::Usage(format!("lambda must be >= 0, got {}", a.lambda)));
    }
    for n in a.n.iter() {
        for l in 0..n {
            if a.l.is_some_and(|r| !r.iter().contains(&l)) {
                continue;
            }
            let nodes = (n - l - 1) as usize;
            let row = match a.potential {
                PotentialKind::Coulomb => {
                    let eps = reduced_energy(n);
                    vec![eps.into(), (eps * int_pow(g, 4) * m).into(), "exact".into(), Cell::Empty]
                }
                PotentialKind::Harmonic => {
                    let eps = f64::from(2 * n - l) - 0.5;
                    vec![eps.into(), (eps * g * m).into(), "exact".into(), Cell::Empty]
                }
                PotentialKind::Yukawa => {
                    match oracle::solve_bound_state(&Profile::yukawa(a.lambda), l, nodes, &cfg.solver) {
                        Ok(s) => vec![
                            s.eigenvalue.into(),
                            (s.eigenvalue * int_pow(g, 4) * m).into(),
                            "oracle".into(),
                            Cell::Empty,
                        ],
                        Err(Error::NoBoundState { .. }) => {
                            vec![Cell::Empty, Cell::Empty, "oracle".into(), "no bound state".into()]
                        }
                        Err(e) => return Err(CliError::from_core(e)),
                    }
                }
                _ => {
                    let pot = pot.expect("power law built above");
                    let profile = oracle_profile(&pot, g);
                    match oracle::solve_bound_state(&profile, l, nodes, &cfg.solver) {
                        Ok(s) => {
                            let e = m * s.eigenvalue;
                            vec![(e / pot.energy_scale()).into(), e.into(), "oracle".into(), Cell::Empty]
                        }
                        Err(Error::NoBoundState { .. }) => {
                            vec![Cell::Empty, Cell::Empty, "oracle".into(), "no bound state".into()]
                        }
                        Err(e) => return Err(CliError::from_core(e)),
                    }
                }
            };
            let mut full = vec![n.into(), l.into()];
            full.extend(row);
            table.push(full);
        }
    }
    Ok(Outcome { name: "spectrum", table, passed: true })
}

// ----------------------------------------------------------------- compare

#[derive(Debug, Args, Serialize)]
pub struct CompareArgs {
    /// Screening values λ = α/(g²m), comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    pub lambda: Vec<f64>,
    /// Subset of 1s, 2s, 2p.
    #[arg(long, value_delimiter = ',', value_parser = parse_level, default_value = "1s,2s,2p")]
    pub states: Vec<YukawaLevel>,
}

pub fn compare(a: &CompareArgs, cfg: &Config) -> CmdResult {
    if let Some(bad) = a.lambda.iter().find(|l| !(**l >= 0.0 && l.is_finite())) {
        return Err(CliError::Usage(format!("lambda must be >= 0, got {bad}")));
    }
    let rows = core(comparison_table(&a.lambda, &a.states, &cfg.solver))?;
    let mut table = Table::new(&[
        "lambda",
        "state",
        "analytic",
        "oracle",
        "coulomb",
        "deviation",
        "coulomb_deviation",
        "note",
    ]);
    for r in rows {
        table.push(vec![
            r.lambda.into(),
            r.state.label().into(),
            r.analytic.into(),
            r.oracle.into(),
            r.coulomb.into(),
            r.deviation.into(),
            r.coulomb_deviation.into(),
            r.note.into(),
        ]);
    }
    Ok(Outcome { name: "compare", table, passed: true })
}

// ----------------------------------------------------------- scaling-check

#[derive(Debug, Args, Serialize)]
pub struct ScalingArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialKind,
    /// Couplings, comma separated (at least two distinct).
    #[arg(long = "couplings", value_delimiter = ',', default_value = "1,2,5")]
    pub couplings: Vec<f64>,
    #[arg(long = "N", default_value_t = 1)]
    pub n: u32,
    #[arg(long = "L", default_value_t = 0)]
    pub l: u32,
    #[command(flatten)]
    pub power: PowerLawArgs,
    /// Replaces the g-factor exponent (negative control).
    #[arg(long, hide = true, value_parser = parse_rational)]
    #[serde(skip)]
    pub exponent_override: Option<Rational64>,
}

pub fn scaling_check(a: &ScalingArgs, cfg: &Config) -> CmdResult {
    let pot = power_law(a.potential, &a.power, cfg.g, cfg.m)?;
    let qn = core(QuantumNumbers::new(a.n, a.l, 0))?;
    let exponent = a.exponent_override.unwrap_or_else(|| g_factor_exponent(&pot));
    let rep = core(verify_factorization_with_exponent(&pot, qn, &a.couplings, &cfg.solver, exponent))?;
    let map = core(verify_radius_mapping(&pot, qn, a.couplings[0], a.couplings[1], &cfg.solver))?;
    let mut table = Table::new(&["check", "g", "value", "tolerance", "status"]);
    let status = |ok: bool| Cell::from(if ok { "PASS" } else { "FAIL" });
    for e in &rep.entries {
        table.push(vec!["epsilon".into(), e.g.into(), e.epsilon.into(), Cell::Empty, "info".into()]);
        table.push(vec![
            "virial_ratio".into(),
            e.g.into(),
            e.virial_ratio.into(),
            VIRIAL_TOL.into(),
            status(e.virial_deviation < VIRIAL_TOL),
        ]);
    }
    let spread_ok = rep.max_spread < FACTORIZATION_TOL;
    let map_ok = map.max_deviation < RADIUS_MAP_TOL;
    table.push(vec![
        format!("factorization_spread (exponent {})", exponent).into(),
        Cell::Empty,
        rep.max_spread.into(),
        FACTORIZATION_TOL.into(),
        status(spread_ok),
    ]);
    table.push(vec![
        "radius_mapping".into(),
        Cell::Empty,
        map.max_deviation.into(),
        RADIUS_MAP_TOL.into(),
        status(map_ok),
    ]);
    let passed = spread_ok && map_ok && rep.max_virial_deviation() < VIRIAL_TOL;
    Ok(Outcome { name: "scaling-check", table, passed })
}

// --------------------------------------------------------------- hierarchy

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HierarchyProfileKind {
    /// m³x² in 1D, ½m³r² in 3D.
    Harmonic,
    /// m⁵r⁴.
    Quartic,
    /// ½m³r² + c·m⁵r⁴.
    Anharmonic,
    /// Σ_j c_j r^{2j} from --coeffs.
    Polynomial,
}

#[derive(Debug, Args, Serialize)]
pub struct HierarchyArgs {
    #[arg(long, value_enum, default_value = "harmonic")]
    pub profile: HierarchyProfileKind,
    #[arg(long, value_parser = parse_dim, default_value = "3")]
    pub dim: Dim,
    /// Highest S order to build.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Quartic coefficient of the anharmonic profile.
    #[arg(long, default_value_t = 0.1)]
    pub c: f64,
    /// Coefficients of r^0, r^2, r^4, … (polynomial profile).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub coeffs: Vec<f64>,
}

pub fn hierarchy(a: &HierarchyArgs, cfg: &Config) -> CmdResult {
    let m = cfg.m;
    let profile = match a.profile {
        HierarchyProfileKind::Harmonic => match a.dim {
            Dim::One => EvenPolynomial::harmonic_1d(m),
            Dim::Three => EvenPolynomial::harmonic_3d(m),
        },
        HierarchyProfileKind::Quartic => EvenPolynomial::quartic(m),
        HierarchyProfileKind::Anharmonic => EvenPolynomial::new(vec![0.0, 0.5 * m * m * m, a.c * m.powi(5)]),
        HierarchyProfileKind::Polynomial => {
            if a.coeffs.is_empty() {
                return Err(CliError::Usage("--profile polynomial needs --coeffs".into()));
            }
            EvenPolynomial::new(a.coeffs.clone())
        }
    };
    let h = core(hierarchy::solve(profile, m, a.dim, a.order, cfg.hierarchy))?;
    let res = h.result();
    let energies = res.energies();
    let mut table = Table::new(&["order", "E", "regularity_residual", "r", "S", "dS"]);
    for o in &res.orders {
        let e: Cell = energies.get(o.order).copied().into();
        let resid: Cell = res
            .orders
            .get(o.order + 1)
            .map(|next| next.regularity_residual)
            .into();
        if o.s.is_empty() {
            table.push(vec![o.order.into(), e, resid, Cell::Empty, Cell::Empty, Cell::Empty]);
            continue;
        }
        for ((&r, &s), &ds) in res.grid.iter().zip(&o.s).zip(&o.ds) {
            table.push(vec![o.order.into(), e.clone(), resid.clone(), r.into(), s.into(), ds.into()]);
        }
    }
    Ok(Outcome { name: "hierarchy", table, passed: true })
}

// ------------------------------------------------------------ oracle solve

#[derive(Debug, Args, Serialize)]
pub struct OracleArgs {
    #[arg(long, value_enum)]
    pub potential: PotentialKind,
    #[arg(long = "L", default_value_t = 0)]
    pub l: u32,
    /// Radial node count.
    #[arg(long, default_value_t = 0)]
    pub nodes: usize,
    /// Screening λ (yukawa only).
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Emit the normalized u(ρ) instead of the eigenvalue summary.
    #[arg(long)]
    pub wavefunction: bool,
    #[command(flatten)]
    pub power: PowerLawArgs,
}

pub fn oracle_solve(a: &OracleArgs, cfg: &Config) -> CmdResult {
    let (g, m) = (cfg.g, cfg.m);
    let (profile, scale): (Box<dyn RadialPotential>, f64) = match a.potential {
        PotentialKind::Coulomb => (Box::new(Profile::yukawa(0.0)), int_pow(g, 4) * m),
        PotentialKind::Yukawa => {
            let pot = core(ScreenedPotential::from_lambda(g, a.lambda, m))?;
            (Box::new(Profile::yukawa(pot.lambda())), pot.energy_scale())
        }
        kind => {
            let pot = power_law(kind, &a.power, g, m)?;
            (Box::new(oracle_profile(&pot, g)), m)
        }
    };
    let check = core(oracle::cross_check(profile.as_ref(), a.l, a.nodes, &cfg.solver))?;
    if a.wavefunction {
        let mut table = Table::new(&["rho", "u"]);
        for (&x, &u) in check.state.grid.iter().zip(&check.state.u) {
            table.push(vec![x.into(), u.into()]);
        }
        return Ok(Outcome { name: "oracle-solve", table, passed: true });
    }
    let mut table = Table::new(&[
        "L",
        "nodes",
        "eigenvalue",
        "E",
        "shooting",
        "relative_difference",
        "rho_max",
    ]);
    table.push(vec![
        a.l.into(),
        a.nodes.into(),
        check.matrix.into(),
        (check.matrix * scale).into(),
        check.shooting.into(),
        check.relative_difference.into(),
        check.rho_max.into(),
    ]);
    Ok(Outcome { name: "oracle-solve", table, passed: true })
}

// ------------------------------------------------------------ wavefunction

#[derive(Debug, Args, Serialize)]
pub struct WavefunctionArgs {
    /// coulomb or yukawa.
    #[arg(long, value_enum)]
    pub potential: PotentialKind,
    #[arg(long = "N", default_value_t = 1)]
    pub n: u32,
    #[arg(long = "L", default_value_t = 0)]
    pub l: u32,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Last reduced radius of the grid.
    #[arg(long, default_value_t = 40.0)]
    pub extent: f64,
    #[arg(long, default_value_t = 401)]
    pub points: usize,
    /// Adds the oracle's radial function for comparison.
    #[arg(long)]
    pub oracle: bool,
}

pub fn wavefunction(a: &WavefunctionArgs, cfg: &Config) -> CmdResult {
    let qn = core(QuantumNumbers::new(a.n, a.l, 0))?;
    if a.points < 2 || !(a.extent > 0.0) {
        return Err(CliError::Usage("need --points >= 2 and --extent > 0".into()));
    }
    let lambda = match a.potential {
        PotentialKind::Coulomb => 0.0,
        PotentialKind::Yukawa => a.lambda,
        _ => return Err(CliError::Usage("wavefunction supports coulomb and yukawa".into())),
    };
    let pot = core(ScreenedPotential::from_lambda(cfg.g, lambda, cfg.m))?;
    let analytic: Box<dyn Fn(f64) -> Result<f64, CliError>> = if lambda == 0.0 {
        let wf = coulomb_wavefunction(&core(coulomb_state(qn))?, 1.0, 1.0);
        Box::new(move |rho| Ok(wf.eval(rho)))
    } else {
        match (a.n, a.l) {
            (1, 0) => {
                let wf = core(core(YukawaGroundState::new(pot))?.reduced_wavefunction())?;
                Box::new(move |rho| core(wf.eval(rho)))
            }
            (2, l) => {
                let wf = core(yukawa_excited_wavefunction(&pot, l))?;
                Box::new(move |rho| core(wf.eval(rho)))
            }
            _ => {
                return Err(CliError::Usage(
                    "screened states are available for 1s, 2s and 2p only".into(),
                ))
            }
        }
    };
    let state = if a.oracle {
        Some(core(oracle::solve_bound_state(
            &Profile::yukawa(lambda),
            a.l,
            qn.radial_nodes(),
            &cfg.solver,
        ))?)
    } else {
        None
    };
    let mut headers = vec!["rho", "R"];
    if state.is_some() {
        headers.push("R_oracle");
    }
    let mut table = Table::new(&headers);
    let step = a.extent / (a.points - 1) as f64;
    for i in 0..a.points {
        let rho = step * i as f64;
        let mut row = vec![Cell::from(rho), Cell::from(analytic(rho)?)];
        if let Some(s) = &state {
            let inside = rho <= *s.grid.last().unwrap_or(&0.0);
            row.push(if inside { s.radial_interp(rho).into() } else { Cell::Empty });
        }
        table.push(row);
    }
    Ok(Outcome { name: "wavefunction", table, passed: true })
}

// ----------------------------------------------------------------- coulomb

#[derive(Debug, Args, Serialize)]
pub struct CoulombArgs {
    #[arg(long = "N", value_parser = parse_range, default_value = "1..3")]
    pub n: Range,
    #[arg(long = "L", value_parser = parse_range)]
    pub l: Option<Range>,
}

pub fn coulomb(a: &CoulombArgs, cfg: &Config) -> CmdResult {
    if !a.n.is_empty() && a.n.lo < 1 {
        return Err(CliError::Usage("N must be >= 1".into()));
    }
    let mut table = Table::new(&["N", "L", "eps_hat", "E", "b0", "norm", "coefficients"]);
    for n in a.n.iter() {
        for l in 0..n {
            if a.l.is_some_and(|r| !r.iter().contains(&l)) {
                continue;
            }
            let state = core(coulomb_state(core(QuantumNumbers::new(n, l, 0))?))?;
            let exact: Vec<String> = core(coefficients_exact(n, l))?.iter().map(|c| c.to_string()).collect();
            let eps = reduced_energy(n);
            table.push(vec![
                n.into(),
                l.into(),
                eps.into(),
                (eps * int_pow(cfg.g, 4) * cfg.m).into(),
                state.b0.into(),
                state.norm.into(),
                exact.join(";").into(),
            ]);
        }
    }
    Ok(Outcome { name: "coulomb", table, passed: true })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3").unwrap(), Range { lo: 3, hi: 3 });
        assert_eq!(parse_range("1..4").unwrap(), Range { lo: 1, hi: 4 });
        assert_eq!(parse_range("1..=4").unwrap(), Range { lo: 1, hi: 4 });
        assert!(parse_range("2..1").unwrap().is_empty());
        assert!(parse_range("a..2").is_err());
    }

    #[test]
    fn dims_and_levels() {
        assert_eq!(parse_dim("1").unwrap(), Dim::One);
        assert!(parse_dim("2").is_err());
        assert_eq!(parse_level("2p").unwrap(), YukawaLevel::P2);
        assert!(parse_level("3d").is_err());
    }
}
