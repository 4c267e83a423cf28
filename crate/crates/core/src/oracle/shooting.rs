//! Outward/inward shooting with an adaptive Dormand–Prince 5(4) integrator.
//!
//! The eigenvalue is first bracketed by counting nodes of the outward
//! solution, then refined by bisection on the log-derivative mismatch at the
//! outermost classical turning point.

use super::matrix::effective;
use super::RadialPotential;
use crate::error::{Error, Result};

const RESCALE: f64 = 1e150;

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Result of integrating u'' = 2(W_eff − ε)u between two radii.
#[derive(Debug, Clone, Copy)]
struct Trajectory {
    u: f64,
    du: f64,
    nodes: usize,
}

struct Integrator<'a> {
    pot: &'a dyn RadialPotential,
    ll: f64,
    energy: f64,
    rtol: f64,
}

impl Integrator<'_> {
    fn rhs(&self, x: f64, y: [f64; 2]) -> [f64; 2] {
        [y[1], 2.0 * (effective(self.pot, self.ll, x) - self.energy) * y[0]]
    }

    /// Integrates from `x0` to `x1` (either direction), counting sign changes of u.
    fn run(&self, x0: f64, x1: f64, y0: [f64; 2], initial_step: f64) -> Result<Trajectory> {
        let dir = (x1 - x0).signum();
        let mut x = x0;
        let mut y = y0;
        let mut h = initial_step.abs().min((x1 - x0).abs()) * dir;
        let mut nodes = 0;
        let mut runmax = [y[0].abs(), y[1].abs()];
        let mut k = [[0.0; 2]; 7];
        k[0] = self.rhs(x, y);
        let mut steps = 0usize;
        while (x1 - x) * dir > 0.0 {
            steps += 1;
            if steps > 5_000_000 {
                return Err(Error::NotConverged {
                    iterations: steps,
                    detail: "shooting integrator step limit".into(),
                });
            }
            if (x + h - x1) * dir > 0.0 {
                h = x1 - x;
            }
            for s in 1..7 {
                let mut yi = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    yi[0] += h * A[s][j] * kj[0];
                    yi[1] += h * A[s][j] * kj[1];
                }
                k[s] = self.rhs(x + C[s] * h, yi);
            }
            let mut y5 = y;
            let mut err = [0.0; 2];
            for s in 0..7 {
                y5[0] += h * B5[s] * k[s][0];
                y5[1] += h * B5[s] * k[s][1];
                err[0] += h * (B5[s] - B4[s]) * k[s][0];
                err[1] += h * (B5[s] - B4[s]) * k[s][1];
            }
            let mut ratio = 0.0_f64;
            for c in 0..2 {
                let scale =
                    self.rtol * (y[c].abs().max(y5[c].abs()) + 1e-3 * runmax[c]) + f64::MIN_POSITIVE;
                ratio = ratio.max((err[c] / scale).abs());
            }
            if ratio <= 1.0 || h.abs() < 1e-14 * x.abs().max(1e-300) {
                if y5[0] * y[0] < 0.0 {
                    nodes += 1;
                }
                x += h;
                y = y5;
                k[0] = k[6];
                runmax[0] = runmax[0].max(y[0].abs());
                runmax[1] = runmax[1].max(y[1].abs());
                if y[0].abs() > RESCALE || y[1].abs() > RESCALE {
                    let s = 1.0 / RESCALE;
                    y = [y[0] * s, y[1] * s];
                    for kk in &mut k {
                        kk[0] *= s;
                        kk[1] *= s;
                    }
                    runmax = [runmax[0] * s, runmax[1] * s];
                }
                let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
                h *= grow;
            } else {
                h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(Trajectory {
            u: y[0],
            du: y[1],
            nodes,
        })
    }
}

pub(crate) struct Shooter<'a> {
    pot: &'a dyn RadialPotential,
    l: u32,
    rho_max: f64,
    rtol: f64,
    start: f64,
}

impl<'a> Shooter<'a> {
    pub fn new(pot: &'a dyn RadialPotential, l: u32, rho_max: f64, rtol: f64) -> Self {
        let start = 1e-6 * pot.length_hint();
        Self {
            pot,
            l,
            rho_max,
            rtol,
            start,
        }
    }

    fn integrator(&self, energy: f64) -> Integrator<'_> {
        Integrator {
            pot: self.pot,
            ll: f64::from(self.l * (self.l + 1)),
            energy,
            rtol: self.rtol,
        }
    }

    /// Series start u ≈ ρ^{L+1}(1 − Zρ/(L+1)), with Z read off the potential.
    fn origin_values(&self) -> [f64; 2] {
        let x = self.start;
        let lp1 = f64::from(self.l + 1);
        let z = -x * self.pot.value(x);
        let c1 = -z / lp1;
        let u = x.powi(self.l as i32 + 1) * (1.0 + c1 * x);
        let du = x.powi(self.l as i32) * (lp1 + (lp1 + 1.0) * c1 * x);
        [u, du]
    }

    fn outward(&self, energy: f64, to: f64) -> Result<Trajectory> {
        self.integrator(energy)
            .run(self.start, to, self.origin_values(), self.start * 0.1)
    }

    fn inward(&self, energy: f64, to: f64) -> Result<Trajectory> {
        let ll = f64::from(self.l * (self.l + 1));
        let w = effective(self.pot, ll, self.rho_max);
        let kappa = (2.0 * (w - energy)).max(1e-12).sqrt();
        let u = 1e-20;
        self.integrator(energy)
            .run(self.rho_max, to, [u, -kappa * u], 1e-3 * self.rho_max)
    }

    pub fn count_nodes(&self, energy: f64) -> Result<usize> {
        Ok(self.outward(energy, self.rho_max)?.nodes)
    }

    /// Outermost radius where W_eff crosses `energy` (the matching point).
    fn turning_point(&self, energy: f64) -> f64 {
        let ll = f64::from(self.l * (self.l + 1));
        let samples = 4000;
        let dx = (self.rho_max - self.start) / samples as f64;
        for i in (1..samples).rev() {
            let x = self.start + dx * i as f64;
            if effective(self.pot, ll, x) < energy {
                return x.clamp(0.05 * self.rho_max, 0.7 * self.rho_max);
            }
        }
        0.5 * self.rho_max
    }

    /// Log-derivative mismatch at the matching point.
    fn mismatch(&self, energy: f64, matching: f64) -> Result<f64> {
        let out = self.outward(energy, matching)?;
        let inn = self.inward(energy, matching)?;
        Ok(out.du / out.u - inn.du / inn.u)
    }

    /// Eigenvalue of the state with `nodes` radial nodes.
    pub fn eigenvalue(&self, nodes: usize, threshold: f64, max_iter: usize) -> Result<f64> {
        let no_state = |detail: String| Error::NoBoundState {
            l: self.l,
            nodes,
            detail,
        };
        // Lower bracket: below the minimum of W_eff no solution has nodes.
        let ll = f64::from(self.l * (self.l + 1));
        let mut lo = (1..2000)
            .map(|i| {
                let x = self.rho_max * (i as f64 / 2000.0);
                effective(self.pot, ll, x.max(1e-2 * self.pot.length_hint()))
            })
            .fold(f64::INFINITY, f64::min);
        let mut guard = 0;
        while self.count_nodes(lo)? > nodes {
            lo -= lo.abs().max(1.0);
            guard += 1;
            if guard > 60 {
                return Err(no_state("lower bracket not found".into()));
            }
        }
        let mut hi = if threshold.is_finite() {
            threshold
        } else {
            effective(self.pot, ll, self.rho_max)
        };
        if self.count_nodes(hi)? <= nodes {
            return Err(no_state(format!(
                "fewer than {} nodes below energy {hi}",
                nodes + 1
            )));
        }
        let mut iter = 0;
        while (hi - lo) > 1e-7 * hi.abs().max(lo.abs()).max(1e-3) {
            iter += 1;
            if iter > max_iter {
                return Err(Error::NotConverged {
                    iterations: iter,
                    detail: "node-count bisection".into(),
                });
            }
            let mid = 0.5 * (lo + hi);
            if self.count_nodes(mid)? > nodes {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let matching = self.turning_point(0.5 * (lo + hi));
        let f_lo = self.mismatch(lo, matching)?;
        let f_hi = self.mismatch(hi, matching)?;
        if f_lo.is_finite() && f_hi.is_finite() && f_lo * f_hi < 0.0 {
            let (mut a, mut b, mut fa) = (lo, hi, f_lo);
            while (b - a) > 1e-14 * a.abs().max(b.abs()).max(1e-300) {
                iter += 1;
                if iter > max_iter + 200 {
                    break;
                }
                let mid = 0.5 * (a + b);
                if mid <= a || mid >= b {
                    break;
                }
                let fm = self.mismatch(mid, matching)?;
                if fm * fa > 0.0 {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            return Ok(0.5 * (a + b));
        }
        // Fall back to node-count bisection to full precision.
        while (hi - lo) > 1e-14 * hi.abs().max(lo.abs()) {
            iter += 1;
            if iter > max_iter + 200 {
                return Err(Error::NotConverged {
                    iterations: iter,
                    detail: "node-count refinement".into(),
                });
            }
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_nodes(mid)? > nodes {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}
