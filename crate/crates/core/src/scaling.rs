//! Coupling-constant factorization and scale transformations of power-law
//! potentials.
//!
//! Under r → a·r, g → b·g with b^{2k/(n+2)} = b^k a^n = a^{−2} the radial
//! equation is unchanged up to an overall factor, so E(g) = g^{2k/(n+2)}·ε and
//! the radial function depends on r and g only through s = g^k (mr)^{n+2}.
//!
//! The numerical checks run the oracle in the variable x = m·r, where the
//! radial equation reads −½u″ + [sign·strength·g^k·x^n + L(L+1)/(2x²)]u = (E/m)u.

use num_rational::Rational64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{int_pow, pow_rational, ratio_str, GridState, PowerLawPotential, QuantumNumbers};
use crate::oracle::{self, Profile, SolverConfig};

/// A radius/coupling rescaling (r, g) → (a·r, b·g).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalePair {
    pub a: f64,
    pub b: f64,
}

impl ScalePair {
    /// The three expressions b^{2k/(n+2)}, b^k·a^n and a^{−2}.
    pub fn constraint_values(&self, pot: &PowerLawPotential) -> [f64; 3] {
        [
            pow_rational(self.b, g_factor_exponent(pot)),
            pow_rational(self.b, pot.k) * int_pow(self.a, i64::from(pot.n)),
            int_pow(self.a, -2),
        ]
    }

    /// Largest relative disagreement among the three constraint values.
    pub fn constraint_spread(&self, pot: &PowerLawPotential) -> f64 {
        let v = self.constraint_values(pot);
        let max = v.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x));
        let min = v.iter().fold(f64::INFINITY, |m, &x| m.min(x));
        (max - min) / min.abs()
    }
}

/// 2k/(n+2), exact.
pub fn g_factor_exponent(pot: &PowerLawPotential) -> Rational64 {
    pot.g_exponent()
}

/// The pair with radius factor `a`: b = a^{−(n+2)/k}.
pub fn scale_pair_from_a(pot: &PowerLawPotential, a: f64) -> Result<ScalePair> {
    if *pot.k.numer() == 0 {
        return Err(Error::ScaleTransformationUndefined);
    }
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::InvalidParameter(format!("scale factor a must be > 0, got {a}")));
    }
    let exponent = -Rational64::from(i64::from(pot.n) + 2) / pot.k;
    Ok(ScalePair {
        a,
        b: pow_rational(a, exponent),
    })
}

/// s = g^k (m r)^{n+2}.
pub fn scaling_variable(pot: &PowerLawPotential, r: f64) -> f64 {
    pow_rational(pot.g, pot.k) * int_pow(pot.m * r, i64::from(pot.n) + 2)
}

/// Radius at which the g2 radial function equals the g1 one at `r`:
/// (g1/g2)^{k/(n+2)}·r.
pub fn map_radius(pot: &PowerLawPotential, r: f64, g1: f64, g2: f64) -> f64 {
    let exponent = pot.k / Rational64::from(i64::from(pot.n) + 2);
    pow_rational(g1 / g2, exponent) * r
}

/// Oracle profile in x = m·r for coupling `g`.
pub fn oracle_profile(pot: &PowerLawPotential, g: f64) -> Profile {
    Profile::PowerLaw {
        coefficient: f64::from(pot.sign) * pot.strength * pow_rational(g, pot.k),
        n: pot.n,
    }
}

/// Per-coupling line of a factorization report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationEntry {
    pub g: f64,
    /// E(g) in energy units.
    pub energy: f64,
    /// ε = E/g^{2k/(n+2)}.
    pub epsilon: f64,
    /// ⟨V⟩/E.
    pub virial_ratio: f64,
    /// |⟨V⟩/E − 2/(n+2)|.
    pub virial_deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub qn: QuantumNumbers,
    /// Exponent used to strip the coupling.
    #[serde(with = "ratio_str")]
    pub exponent: Rational64,
    pub virial_expected: f64,
    pub entries: Vec<FactorizationEntry>,
    /// Largest pairwise relative difference of the ε values.
    pub max_spread: f64,
}

impl FactorizationReport {
    pub fn max_virial_deviation(&self) -> f64 {
        self.entries
            .iter()
            .fold(0.0, |m, e| m.max(e.virial_deviation))
    }
}

/// Solves the state at each coupling and checks E·g^{−2k/(n+2)} = const and
/// ⟨V⟩/E = 2/(n+2).
pub fn verify_factorization(
    pot: &PowerLawPotential,
    qn: QuantumNumbers,
    g_list: &[f64],
    cfg: &SolverConfig,
) -> Result<FactorizationReport> {
    verify_factorization_with_exponent(pot, qn, g_list, cfg, g_factor_exponent(pot))
}

/// As [`verify_factorization`] but strips the coupling with an arbitrary
/// exponent (a wrong exponent must show up as a spread).
pub fn verify_factorization_with_exponent(
    pot: &PowerLawPotential,
    qn: QuantumNumbers,
    g_list: &[f64],
    cfg: &SolverConfig,
    exponent: Rational64,
) -> Result<FactorizationReport> {
    pot.validate()?;
    let mut distinct = g_list.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InvalidParameter(
            "factorization check needs at least two distinct couplings".into(),
        ));
    }
    let virial_expected = 2.0 / f64::from(pot.n + 2);
    let entries: Vec<FactorizationEntry> = g_list
        .par_iter()
        .map(|&g| {
            let at_g = |e: Error| Error::AtCoupling {
                g,
                source: Box::new(e),
            };
            let p = pot.with_coupling(g).map_err(at_g)?;
            let profile = oracle_profile(&p, g);
            let state = oracle::solve_bound_state(&profile, qn.l(), qn.radial_nodes(), cfg).map_err(at_g)?;
            let energy = p.m * state.eigenvalue;
            let w = oracle::expectation_value(&state, |x| oracle::RadialPotential::value(&profile, x))
                .map_err(at_g)?;
            let virial_ratio = w / state.eigenvalue;
            Ok(FactorizationEntry {
                g,
                energy,
                epsilon: energy / pow_rational(g, exponent),
                virial_ratio,
                virial_deviation: (virial_ratio - virial_expected).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let mut max_spread = 0.0_f64;
    for (i, a) in entries.iter().enumerate() {
        for b in &entries[i + 1..] {
            let scale = a.epsilon.abs().max(b.epsilon.abs());
            max_spread = max_spread.max((a.epsilon - b.epsilon).abs() / scale);
        }
    }
    Ok(FactorizationReport {
        qn,
        exponent,
        virial_expected,
        entries,
        max_spread,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusMappingReport {
    pub g1: f64,
    pub g2: f64,
    /// (g1/g2)^{k/(n+2)}.
    pub factor: f64,
    pub points: usize,
    /// sup |R̃_{g1}(r) − R̃_{g2}(map_radius(r))| with R̃ = R/max|R|.
    pub max_deviation: f64,
}

/// The value of R = u/x with the largest magnitude (signed), skipping x = 0.
fn signed_peak(state: &GridState) -> f64 {
    state
        .grid
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0.0)
        .map(|(i, _)| state.radial_at(i))
        .fold(0.0_f64, |m, v| if v.abs() > m.abs() { v } else { m })
}

/// Compares the radial functions at two couplings through the radius map,
/// after normalizing each to unit sup-norm.
pub fn verify_radius_mapping(
    pot: &PowerLawPotential,
    qn: QuantumNumbers,
    g1: f64,
    g2: f64,
    cfg: &SolverConfig,
) -> Result<RadiusMappingReport> {
    let solve = |g: f64| -> Result<GridState> {
        let p = pot.with_coupling(g)?;
        oracle::solve_bound_state(&oracle_profile(&p, g), qn.l(), qn.radial_nodes(), cfg)
            .map_err(|e| Error::AtCoupling { g, source: Box::new(e) })
    };
    let (s1, s2) = rayon::join(|| solve(g1), || solve(g2));
    let (s1, s2) = (s1?, s2?);
    let factor = map_radius(pot, 1.0, g1, g2);
    let (p1, p2) = (signed_peak(&s1), signed_peak(&s2));
    let inner = s2.grid.get(1).copied().unwrap_or(0.0);
    let outer = s2.grid.last().copied().unwrap_or(0.0);
    let mut max_deviation = 0.0_f64;
    let mut points = 0;
    for (i, &x) in s1.grid.iter().enumerate() {
        let mapped = factor * x;
        if x <= 0.0 || mapped < inner || mapped > outer {
            continue;
        }
        let r1 = s1.radial_at(i) / p1;
        let r2 = s2.radial_interp(mapped) / p2;
        max_deviation = max_deviation.max((r1 - r2).abs());
        points += 1;
    }
    Ok(RadiusMappingReport {
        g1,
        g2,
        factor,
        points,
        max_deviation,
    })
}
