//! Domain types shared by every solver.
//!
//! Natural units (ħ = c = 1) are used throughout. Coulomb-like problems are
//! reduced with ρ = g²·m·r and ε̂ = E/(g⁴·m); power-law problems with the
//! length scale 1/(m·g^{k/(n+2)}) and energy scale m·g^{2k/(n+2)}.

use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `x^n` by binary exponentiation. Unlike `powi`, the result does not depend
/// on how the call site was optimized, which keeps closed forms bit-identical
/// across modules.
pub fn int_pow(x: f64, n: i64) -> f64 {
    let mut base = if n < 0 { 1.0 / x } else { x };
    let mut e = n.unsigned_abs();
    let mut acc = 1.0;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    acc
}

/// Evaluates `x^p` for a rational exponent, exactly repeated multiplication
/// when `p` is integral.
pub fn pow_rational(x: f64, p: Rational64) -> f64 {
    if p.is_integer() {
        int_pow(x, *p.numer())
    } else {
        x.powf(p.to_f64().unwrap_or(f64::NAN))
    }
}

/// Serializes a [`Rational64`] as `"p"` or `"p/q"`.
pub mod ratio_str {
    use num_rational::Rational64;
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational64, s: S) -> Result<S::Ok, S::Error> {
        if r.is_integer() {
            s.serialize_str(&r.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational64, D::Error> {
        let text = String::deserialize(d)?;
        parse(&text).map_err(de::Error::custom)
    }

    pub fn parse(text: &str) -> Result<Rational64, String> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (text, "1"),
        };
        let num: i64 = num.parse().map_err(|e| format!("bad rational {text:?}: {e}"))?;
        let den: i64 = den.parse().map_err(|e| format!("bad rational {text:?}: {e}"))?;
        if den == 0 {
            return Err(format!("bad rational {text:?}: zero denominator"));
        }
        Ok(Rational64::new(num, den))
    }
}

/// Power-law central potential `V(r) = sign · strength · g^k · m · (m r)^n`.
///
/// `strength` is a positive prefactor (1 unless stated) so that, e.g., the
/// oscillator `½ g² m³ r²` is representable with `k = 2, n = 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawPotential {
    pub sign: i8,
    #[serde(with = "ratio_str")]
    pub k: Rational64,
    pub n: i32,
    pub m: f64,
    pub g: f64,
    #[serde(default = "one")]
    pub strength: f64,
}

fn one() -> f64 {
    1.0
}

impl PowerLawPotential {
    pub fn new(sign: i8, k: Rational64, n: i32, m: f64, g: f64) -> Result<Self> {
        Self::with_strength(sign, k, n, m, g, 1.0)
    }

    pub fn with_strength(
        sign: i8,
        k: Rational64,
        n: i32,
        m: f64,
        g: f64,
        strength: f64,
    ) -> Result<Self> {
        let pot = Self {
            sign,
            k,
            n,
            m,
            g,
            strength,
        };
        pot.validate()?;
        Ok(pot)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        if !(self.g > 0.0 && self.g.is_finite()) {
            return bad(format!("coupling g must be > 0, got {}", self.g));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return bad(format!("mass m must be > 0, got {}", self.m));
        }
        if !(self.strength > 0.0 && self.strength.is_finite()) {
            return bad(format!("strength must be > 0, got {}", self.strength));
        }
        if self.n < -1 {
            return bad(format!("exponent n must be >= -1, got {}", self.n));
        }
        if self.n == 0 {
            return bad("exponent n = 0 is a constant potential without bound states".into());
        }
        let expected = if self.n > 0 { 1 } else { -1 };
        if self.sign != expected {
            return bad(format!(
                "sign must be {expected:+} for n = {}, got {}",
                self.n, self.sign
            ));
        }
        Ok(())
    }

    /// Coulomb member: `V = −g²/r` (k = 2, n = −1).
    pub fn coulomb(g: f64, m: f64) -> Result<Self> {
        Self::new(-1, Rational64::from_integer(2), -1, m, g)
    }

    /// Three-dimensional oscillator `V = ½ g² m³ r²`.
    pub fn harmonic(g: f64, m: f64) -> Result<Self> {
        Self::with_strength(1, Rational64::from_integer(2), 2, m, g, 0.5)
    }

    /// Linear confinement `V = g² m² r`.
    pub fn linear(g: f64, m: f64) -> Result<Self> {
        Self::new(1, Rational64::from_integer(2), 1, m, g)
    }

    pub fn with_coupling(&self, g: f64) -> Result<Self> {
        let mut p = *self;
        p.g = g;
        p.validate()?;
        Ok(p)
    }

    /// V(r) in energy units.
    pub fn value(&self, r: f64) -> f64 {
        f64::from(self.sign)
            * self.strength
            * pow_rational(self.g, self.k)
            * self.m
            * (self.m * r).powi(self.n)
    }

    /// v = V/g², the coupling-stripped profile used by the hierarchy (k = 2).
    pub fn stripped_value(&self, r: f64) -> f64 {
        self.value(r) / (self.g * self.g)
    }

    /// Potential in reduced units, `sign · strength · ρ^n`.
    pub fn reduced_value(&self, rho: f64) -> f64 {
        f64::from(self.sign) * self.strength * rho.powi(self.n)
    }

    /// The g-factor exponent 2k/(n+2).
    pub fn g_exponent(&self) -> Rational64 {
        self.k * Rational64::new(2, i64::from(self.n) + 2)
    }

    /// Energy unit `m · g^{2k/(n+2)}`: E = energy_scale · ε̂.
    pub fn energy_scale(&self) -> f64 {
        self.m * pow_rational(self.g, self.g_exponent())
    }

    /// Length unit: r = length_scale · ρ.
    pub fn length_scale(&self) -> f64 {
        1.0 / (self.m * pow_rational(self.g, self.k / Rational64::from(i64::from(self.n) + 2)))
    }
}

/// Yukawa potential `V(r) = −g² e^{−αr}/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScreenedPotential {
    pub g: f64,
    pub alpha: f64,
    pub m: f64,
}

impl ScreenedPotential {
    pub fn new(g: f64, alpha: f64, m: f64) -> Result<Self> {
        let pot = Self { g, alpha, m };
        pot.validate()?;
        Ok(pot)
    }

    /// Builds the potential with the given dimensionless screening λ = α/(g²m).
    pub fn from_lambda(g: f64, lambda: f64, m: f64) -> Result<Self> {
        Self::new(g, lambda * g * g * m, m)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter(format!("coupling g must be > 0, got {}", self.g)));
        }
        if !(self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::InvalidParameter(format!("mass m must be > 0, got {}", self.m)));
        }
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "screening alpha must be >= 0, got {}",
                self.alpha
            )));
        }
        Ok(())
    }

    /// λ = α/(g²m).
    pub fn lambda(&self) -> f64 {
        self.alpha / (self.g * self.g * self.m)
    }

    /// Evaluated in the same operation order as the Coulomb member so that
    /// α = 0 agrees with it bit for bit.
    pub fn value(&self, r: f64) -> f64 {
        -(self.g * self.g) * self.m * (self.m * r).powi(-1) * (-self.alpha * r).exp()
    }

    /// Reduced potential `−e^{−λρ}/ρ`.
    pub fn reduced_value(&self, rho: f64) -> f64 {
        -(-self.lambda() * rho).exp() / rho
    }

    /// g⁴·m.
    pub fn energy_scale(&self) -> f64 {
        int_pow(self.g, 4) * self.m
    }

    /// The Coulomb member of the power-law family, available when α = 0.
    pub fn as_coulomb(&self) -> Option<PowerLawPotential> {
        if self.alpha == 0.0 {
            PowerLawPotential::coulomb(self.g, self.m).ok()
        } else {
            None
        }
    }
}

/// Maps a physical radius to (ρ, λ) for a Coulomb-like potential.
pub fn reduce_coulomb_like(pot: &ScreenedPotential, r: f64) -> (f64, f64) {
    (pot.g * pot.g * pot.m * r, pot.lambda())
}

/// Inverse of the radial reduction: ρ → r.
pub fn unreduce_radius(pot: &ScreenedPotential, rho: f64) -> f64 {
    rho / (pot.g * pot.g * pot.m)
}

pub fn reduce_energy(pot: &ScreenedPotential, energy: f64) -> f64 {
    energy / pot.energy_scale()
}

pub fn unreduce_energy(pot: &ScreenedPotential, reduced: f64) -> f64 {
    reduced * pot.energy_scale()
}

/// Bound-state label (N, L, M).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantumNumbers {
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "L")]
    l: u32,
    #[serde(rename = "M")]
    m: i32,
}

impl QuantumNumbers {
    pub fn new(n: u32, l: u32, m: i32) -> Result<Self> {
        let err = |reason| Err(Error::InvalidQuantumNumbers { n, l, m, reason });
        if n < 1 {
            return err("N must be >= 1");
        }
        if l >= n {
            return err("L must satisfy 0 <= L <= N-1");
        }
        if m.unsigned_abs() > l {
            return err("M must satisfy |M| <= L");
        }
        Ok(Self { n, l, m })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    /// Radial node count N − L − 1.
    pub fn radial_nodes(&self) -> usize {
        (self.n - self.l - 1) as usize
    }

    /// Spectroscopic label such as `2p`.
    pub fn label(&self) -> String {
        const LETTERS: &[u8] = b"spdfghik";
        let letter = LETTERS
            .get(self.l as usize)
            .map(|&c| (c as char).to_string())
            .unwrap_or_else(|| format!("[L={}]", self.l));
        format!("{}{}", self.n, letter)
    }
}

/// Truncated series E = g^{g_power} · m · Σ_j c_j λ^j.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergySeries {
    #[serde(with = "ratio_str")]
    pub g_power: Rational64,
    pub coefficients: Vec<f64>,
    pub truncation_order: usize,
}

impl EnergySeries {
    pub fn new(g_power: Rational64, coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter("energy series needs at least one coefficient".into()));
        }
        let truncation_order = coefficients.len() - 1;
        Ok(Self {
            g_power,
            coefficients,
            truncation_order,
        })
    }

    /// Keeps terms up to and including λ^order.
    pub fn truncated(&self, order: usize) -> Result<Self> {
        if order > self.truncation_order {
            return Err(Error::SeriesOrder {
                requested: order,
                max: self.truncation_order,
            });
        }
        Self::new(self.g_power, self.coefficients[..=order].to_vec())
    }

    /// Σ_j c_j λ^j by Horner's rule; at λ = 0 this is exactly c₀.
    pub fn reduced(&self, lambda: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * lambda + c)
    }

    pub fn evaluate(&self, g: f64, m: f64, lambda: f64) -> f64 {
        pow_rational(g, self.g_power) * m * self.reduced(lambda)
    }
}

/// Closed-form radial state `R(ρ) = norm · Σ_i poly[i] ρ^{L+i} · e^{−b0 ρ}`
/// in reduced units. `poly[0]` (that is a_L) is 1; `norm > 0` fixes the unit
/// L² norm ∫R²ρ²dρ = 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticState {
    pub qn: QuantumNumbers,
    pub b0: f64,
    pub poly: Vec<f64>,
    pub energy: EnergySeries,
    pub norm: f64,
}

impl AnalyticState {
    /// Reduced radial function R(ρ).
    pub fn radial(&self, rho: f64) -> f64 {
        self.norm * self.polynomial(rho) * (-self.b0 * rho).exp()
    }

    /// P(ρ) = Σ_i poly[i] ρ^{L+i}.
    pub fn polynomial(&self, rho: f64) -> f64 {
        let inner = self.poly.iter().rev().fold(0.0, |acc, &a| acc * rho + a);
        inner * rho.powi(self.qn.l() as i32)
    }

    /// Coefficient a_k of ρ^k, zero below L.
    pub fn coefficient(&self, k: usize) -> f64 {
        let l = self.qn.l() as usize;
        if k < l {
            0.0
        } else {
            self.poly.get(k - l).copied().unwrap_or(0.0)
        }
    }
}

/// Numerically computed radial eigenpair for u = ρR on a grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridState {
    pub grid: Vec<f64>,
    pub u: Vec<f64>,
    pub eigenvalue: f64,
    #[serde(rename = "L")]
    pub l: u32,
    pub nodes: usize,
}

impl GridState {
    /// R = u/ρ at grid index `i` (the origin uses the one-sided limit).
    pub fn radial_at(&self, i: usize) -> f64 {
        if self.grid[i] > 0.0 {
            self.u[i] / self.grid[i]
        } else if self.l == 0 && self.grid.len() > i + 3 {
            // quadratic extrapolation of u/r from the first three interior points
            let xs = &self.grid[i + 1..i + 4];
            (0..3)
                .map(|j| {
                    let w: f64 = (0..3)
                        .filter(|&q| q != j)
                        .map(|q| xs[q] / (xs[q] - xs[j]))
                        .product();
                    w * self.u[i + 1 + j] / xs[j]
                })
                .sum()
        } else {
            0.0
        }
    }

    /// Cubic interpolation of u at an arbitrary radius (zero outside the grid).
    pub fn u_at(&self, rho: f64) -> f64 {
        let n = self.grid.len();
        if n < 4 || rho < self.grid[0] || rho > self.grid[n - 1] {
            return 0.0;
        }
        let i = match self
            .grid
            .binary_search_by(|x| x.partial_cmp(&rho).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(i) => return self.u[i],
            Err(i) => i.saturating_sub(1),
        };
        let start = i.saturating_sub(1).min(n - 4);
        let xs = &self.grid[start..start + 4];
        let ys = &self.u[start..start + 4];
        let mut total = 0.0;
        for j in 0..4 {
            let mut w = 1.0;
            for q in 0..4 {
                if q != j {
                    w *= (rho - xs[q]) / (xs[j] - xs[q]);
                }
            }
            total += w * ys[j];
        }
        total
    }

    /// Reduced radial function R(ρ) = u(ρ)/ρ by interpolation.
    pub fn radial_interp(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return self.radial_at(0);
        }
        self.u_at(rho) / rho
    }
}

/// Relative difference |a − b| / max(|b|, tiny).
pub fn relative_difference(a: f64, b: f64) -> f64 {
    let scale = b.abs().max(f64::MIN_POSITIVE);
    (a - b).abs() / scale
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduce_identity_scaling() {
        let pot = ScreenedPotential::new(1.0, 0.0, 1.0).unwrap();
        assert_eq!(reduce_coulomb_like(&pot, 3.0), (3.0, 0.0));
    }

    #[test]
    fn reduce_arithmetic() {
        let pot = ScreenedPotential::new(2.0, 0.4, 1.0).unwrap();
        let (rho, lambda) = reduce_coulomb_like(&pot, 1.0);
        assert_eq!(rho, 4.0);
        assert!((lambda - 0.1).abs() < 1e-15);
    }

    #[test]
    fn coulomb_ground_unreduces_to_half_g4m() {
        let pot = ScreenedPotential::new(1.7, 0.0, 2.5).unwrap();
        let e = unreduce_energy(&pot, -0.5);
        assert_eq!(e, -0.5 * int_pow(1.7, 4) * 2.5);
    }

    #[test]
    fn zero_screening_is_coulomb_member() {
        let pot = ScreenedPotential::new(1.3, 0.0, 0.7).unwrap();
        let c = pot.as_coulomb().unwrap();
        assert_eq!((c.sign, c.n, c.k), (-1, -1, Rational64::from(2)));
        for r in [0.1, 1.0, 7.5] {
            assert_eq!(pot.value(r), c.value(r));
        }
        assert!(ScreenedPotential::new(1.3, 0.1, 0.7).unwrap().as_coulomb().is_none());
    }

    #[test]
    fn power_law_sign_rule() {
        assert!(PowerLawPotential::new(1, Rational64::from(2), -1, 1.0, 1.0).is_err());
        assert!(PowerLawPotential::new(-1, Rational64::from(2), 2, 1.0, 1.0).is_err());
        assert!(PowerLawPotential::new(1, Rational64::from(2), -2, 1.0, 1.0).is_err());
        assert!(PowerLawPotential::new(-1, Rational64::from(2), -1, 0.0, 1.0).is_err());
        assert!(PowerLawPotential::new(-1, Rational64::from(2), -1, 1.0, -1.0).is_err());
    }

    #[test]
    fn power_law_reduction_consistent() {
        let pot = PowerLawPotential::harmonic(3.0, 2.0).unwrap();
        let r = 0.37;
        let rho = r / pot.length_scale();
        let lhs = pot.value(r);
        let rhs = pot.energy_scale() * pot.reduced_value(rho);
        assert!((lhs - rhs).abs() < 1e-13 * lhs.abs());
    }

    #[test]
    fn quantum_numbers_reject_bad_labels() {
        assert!(QuantumNumbers::new(0, 0, 0).is_err());
        assert!(QuantumNumbers::new(2, 2, 0).is_err());
        assert!(QuantumNumbers::new(3, 1, 2).is_err());
        assert!(QuantumNumbers::new(3, 1, -2).is_err());
        let q = QuantumNumbers::new(3, 2, -2).unwrap();
        assert_eq!(q.radial_nodes(), 0);
        assert_eq!(q.label(), "3d");
    }

    #[test]
    fn series_truncation_zero_is_constant() {
        let s = EnergySeries::new(Rational64::from(4), vec![-0.5, 1.0, -0.75, 0.5]).unwrap();
        assert_eq!(s.truncation_order, 3);
        let t = s.truncated(0).unwrap();
        for lambda in [0.0, 0.1, 0.9, 3.0] {
            assert_eq!(t.reduced(lambda), -0.5);
        }
        assert_eq!(s.evaluate(2.0, 3.0, 0.0), 16.0 * 3.0 * -0.5);
        assert!(s.truncated(4).is_err());
    }

    #[test]
    fn json_field_names() {
        let q = QuantumNumbers::new(2, 1, 0).unwrap();
        let v = serde_json::to_value(q).unwrap();
        assert_eq!(v, serde_json::json!({"N": 2, "L": 1, "M": 0}));
        let p = PowerLawPotential::coulomb(1.0, 1.0).unwrap();
        let v = serde_json::to_value(p).unwrap();
        assert_eq!(v["k"], "2");
        let s = EnergySeries::new(Rational64::new(2, 3), vec![1.0]).unwrap();
        let v = serde_json::to_value(&s).unwrap();
        assert_eq!(v["g_power"], "2/3");
        let back: EnergySeries = serde_json::from_value(v).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn rational_parse() {
        assert_eq!(ratio_str::parse("3/2").unwrap(), Rational64::new(3, 2));
        assert_eq!(ratio_str::parse(" -4 ").unwrap(), Rational64::from(-4));
        assert!(ratio_str::parse("1/0").is_err());
    }
}
