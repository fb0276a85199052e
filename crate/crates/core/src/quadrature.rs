//! Scalar functionals of a potential: the three moment integrals of |V⁻|,
//! the extremum σ = sup r|V⁻|^{1/2}, and the half-phase points p and q.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrate::integrate;
use crate::potential::RadialPotential;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative accuracy of each integral.
    pub rel_tol: f64,
    /// Absolute width of the final bracket for p and q.
    pub root_width: f64,
    /// Log-grid points used to seed the σ search.
    pub sigma_scan: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-8,
            root_width: 1e-10,
            sigma_scan: 512,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    /// ∫ r |V⁻| dr
    pub moment_rv: f64,
    /// ∫ |V⁻|^{1/2} dr
    pub action: f64,
    /// ∫ r² |V⁻|^{3/2} dr
    pub lieb_moment: f64,
    /// sup r |V⁻|^{1/2}
    pub sigma: f64,
    /// Radius where σ is attained (left limit for discontinuous profiles).
    pub sigma_at: f64,
    /// ∫₀^p |V|^{1/2} = π/2
    pub p: f64,
    /// ∫_q^∞ |V|^{1/2} = π/2
    pub q: f64,
    pub p_q_valid: bool,
}

impl Functionals {
    pub fn zero() -> Self {
        Self {
            moment_rv: 0.0,
            action: 0.0,
            lieb_moment: 0.0,
            sigma: 0.0,
            sigma_at: 0.0,
            p: 0.0,
            q: 0.0,
            p_q_valid: false,
        }
    }
}

pub fn compute_functionals(pot: &RadialPotential) -> Result<Functionals> {
    compute_functionals_with(pot, &QuadratureConfig::default())
}

pub fn compute_functionals_with(pot: &RadialPotential, cfg: &QuadratureConfig) -> Result<Functionals> {
    pot.validate()?;
    if pot.is_null() {
        return Ok(Functionals::zero());
    }
    let scale = pot.length_scale();
    let (sigma, sigma_at) = sigma(pot, cfg);
    if sigma == 0.0 {
        return Ok(Functionals::zero());
    }
    let r_end = integration_end(pot, sigma);
    let layout = Layout::new(pot, scale, r_end);

    let moment_rv = layout.integrate(pot, cfg, "r|V|", |r, w| r * w)?;
    let lieb_moment = layout.integrate(pot, cfg, "r^2|V|^{3/2}", |r, w| r * r * w * w.sqrt())?;
    let action_profile = ActionProfile::new(pot, &layout, cfg)?;
    let action = action_profile.total;

    let mut out = Functionals {
        moment_rv,
        action,
        lieb_moment,
        sigma,
        sigma_at,
        p: 0.0,
        q: 0.0,
        p_q_valid: false,
    };
    if action >= PI {
        let p = action_profile.solve(pot, cfg, FRAC_PI_2);
        let q = action_profile.solve(pot, cfg, action - FRAC_PI_2);
        out.p = p;
        out.q = q;
        out.p_q_valid = p < q;
    }
    Ok(out)
}

/// Cumulative action Φ(r) = ∫₀^r |V⁻|^{1/2}.
pub fn cumulative_action(pot: &RadialPotential, r: f64) -> Result<f64> {
    pot.validate()?;
    if r <= 0.0 || pot.is_null() {
        return Ok(0.0);
    }
    let cfg = QuadratureConfig::default();
    let (sigma, _) = sigma(pot, &cfg);
    let layout = Layout::new(pot, pot.length_scale(), integration_end(pot, sigma).max(r));
    let profile = ActionProfile::new(pot, &layout, &cfg)?;
    Ok(profile.phi(pot, &cfg, r))
}

/// Radius past which every integrand is negligible: r|V⁻|^{1/2} < 1e-16·σ.
fn integration_end(pot: &RadialPotential, sigma: f64) -> f64 {
    let scale = pot.length_scale();
    if let Some(end) = pot.support_end() {
        return end;
    }
    let mut r = scale;
    let mut n = 0;
    while r * pot.depth(r).sqrt() >= 1e-16 * sigma && n < 5000 {
        r *= 1.05;
        n += 1;
    }
    r
}

/// Contiguous integration pieces; the first starts at the origin and is
/// integrated under r = t², which removes the r^{-1/2} endpoint singularity
/// of |V|^{1/2} for Coulomb-like cores.
struct Layout {
    edges: Vec<f64>,
}

impl Layout {
    fn new(pot: &RadialPotential, scale: f64, r_end: f64) -> Self {
        let mut edges: Vec<f64> = pot
            .breakpoints()
            .into_iter()
            .filter(|&b| b > 0.0 && b < r_end)
            .collect();
        if edges.first().is_none_or(|&b| b > scale) && scale < r_end {
            edges.insert(0, scale);
        }
        // Split long exponential tails so the adaptive rule starts well.
        let mut extra = Vec::new();
        let mut r = edges.last().copied().unwrap_or(scale) * 2.0;
        while r < r_end {
            extra.push(r);
            r *= 2.0;
        }
        edges.extend(extra);
        edges.push(r_end);
        edges.insert(0, 0.0);
        edges.dedup();
        Self { edges }
    }

    fn pieces(&self) -> impl Iterator<Item = (usize, f64, f64)> + '_ {
        self.edges.windows(2).enumerate().map(|(i, w)| (i, w[0], w[1]))
    }

    fn integrate<F>(&self, pot: &RadialPotential, cfg: &QuadratureConfig, what: &str, f: F) -> Result<f64>
    where
        F: Fn(f64, f64) -> f64,
    {
        let mut total = 0.0;
        for (i, a, b) in self.pieces() {
            total += piece_integral(pot, cfg, i == 0, a, b, &f);
        }
        if !total.is_finite() {
            return Err(Error::Divergent(format!("{what} integral is not finite")));
        }
        Ok(total)
    }
}

fn piece_integral<F>(pot: &RadialPotential, cfg: &QuadratureConfig, origin: bool, a: f64, b: f64, f: &F) -> f64
where
    F: Fn(f64, f64) -> f64,
{
    let tol = cfg.rel_tol * 1e-2;
    if origin {
        let g = |t: f64| {
            let r = t * t;
            if r <= 0.0 {
                0.0
            } else {
                2.0 * t * f(r, pot.depth(r))
            }
        };
        integrate(g, a.sqrt(), b.sqrt(), tol, 0.0).value
    } else {
        let g = |r: f64| f(r, pot.depth(r));
        integrate(g, a, b, tol, 0.0).value
    }
}

struct ActionProfile {
    edges: Vec<f64>,
    /// Φ at each edge.
    cumulative: Vec<f64>,
    total: f64,
}

impl ActionProfile {
    fn new(pot: &RadialPotential, layout: &Layout, cfg: &QuadratureConfig) -> Result<Self> {
        let mut cumulative = vec![0.0];
        let mut acc = 0.0;
        let f = |_: f64, w: f64| w.sqrt();
        for (i, a, b) in layout.pieces() {
            acc += piece_integral(pot, cfg, i == 0, a, b, &f);
            cumulative.push(acc);
        }
        if !acc.is_finite() {
            return Err(Error::Divergent("|V|^{1/2} integral is not finite".into()));
        }
        Ok(Self {
            edges: layout.edges.clone(),
            cumulative,
            total: acc,
        })
    }

    fn phi(&self, pot: &RadialPotential, cfg: &QuadratureConfig, r: f64) -> f64 {
        if r >= *self.edges.last().unwrap() {
            return self.total;
        }
        let k = self.edges.partition_point(|&e| e <= r) - 1;
        let f = |_: f64, w: f64| w.sqrt();
        self.cumulative[k] + piece_integral(pot, cfg, k == 0, self.edges[k], r, &f)
    }

    /// Smallest r with Φ(r) = target, by bisection on the monotone Φ.
    fn solve(&self, pot: &RadialPotential, cfg: &QuadratureConfig, target: f64) -> f64 {
        let k = self
            .cumulative
            .iter()
            .position(|&c| c >= target)
            .unwrap_or(self.cumulative.len() - 1)
            .max(1);
        let (mut lo, mut hi) = (self.edges[k - 1], self.edges[k]);
        loop {
            let width = cfg.root_width.min(1e-12 * hi.abs()).max(4.0 * f64::EPSILON * hi);
            if hi - lo <= width {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.phi(pot, cfg, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// σ = sup r|V⁻(r)|^{1/2}: log-grid scan, then golden-section refinement.
fn sigma(pot: &RadialPotential, cfg: &QuadratureConfig) -> (f64, f64) {
    let scale = pot.length_scale();
    let s = |r: f64| r * pot.depth(r).sqrt();
    let lo = 1e-6 * scale;
    let hi = pot.negligible_beyond(scale, 1e-14).max(2.0 * scale);
    let n = cfg.sigma_scan.max(8);
    let step = (hi / lo).ln() / (n - 1) as f64;
    let grid: Vec<f64> = (0..n).map(|i| lo * (step * i as f64).exp()).collect();
    let vals: Vec<f64> = grid.iter().map(|&r| s(r)).collect();
    let (imax, _) = vals
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });

    let a = grid[imax.saturating_sub(1)].ln();
    let b = grid[(imax + 1).min(n - 1)].ln();
    let (mut best_r, mut best) = golden_max(|x| s(x.exp()), a, b);
    best_r = best_r.exp();
    if vals[imax] > best {
        best = vals[imax];
        best_r = grid[imax];
    }
    // One-sided limits at discontinuities.
    for b in pot.breakpoints() {
        let left = b * (-pot.value_left(b)).max(0.0).sqrt();
        let right = s(b);
        for v in [left, right] {
            if v > best {
                best = v;
                best_r = b;
            }
        }
    }
    (best, best_r)
}

fn golden_max<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let inv_phi = (5.0_f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let x = 0.5 * (a + b);
    (x, f(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn yukawa_closed_forms() {
        let g = 3.0;
        let fx = compute_functionals(&RadialPotential::yukawa(g, 1.0).unwrap()).unwrap();
        assert_relative_eq!(fx.moment_rv, g * g, max_relative = 1e-8);
        assert_relative_eq!(fx.action, g * (2.0 * PI).sqrt(), max_relative = 1e-8);
        let lieb = PI.sqrt() / 2.0 * (2.0_f64 / 3.0).powf(1.5) * g.powi(3);
        assert_relative_eq!(fx.lieb_moment, lieb, max_relative = 1e-8);
        assert_relative_eq!(fx.sigma, g * (-0.5_f64).exp(), max_relative = 1e-10);
        assert_relative_eq!(fx.sigma_at, 1.0, max_relative = 1e-4);
    }

    #[test]
    fn square_well_closed_forms() {
        let g = 4.0;
        let fx = compute_functionals(&RadialPotential::square_well(g, 1.0).unwrap()).unwrap();
        assert_relative_eq!(fx.moment_rv, g * g / 2.0, max_relative = 1e-10);
        assert_relative_eq!(fx.action, g, max_relative = 1e-10);
        assert_relative_eq!(fx.sigma, g, max_relative = 1e-12);
        assert!(fx.p_q_valid);
        assert_relative_eq!(fx.p, PI / (2.0 * g), max_relative = 1e-9);
        assert_relative_eq!(fx.q, 1.0 - PI / (2.0 * g), max_relative = 1e-9);
    }

    #[test]
    fn null_potential_is_all_zero() {
        let fx = compute_functionals(&RadialPotential::yukawa(0.0, 1.0).unwrap()).unwrap();
        assert_eq!(fx, Functionals::zero());
        assert!(!fx.p_q_valid);
    }

    #[test]
    fn weak_potential_has_no_half_phase_points() {
        let fx = compute_functionals(&RadialPotential::yukawa(1.0, 1.0).unwrap()).unwrap();
        assert!(fx.action < PI);
        assert!(!fx.p_q_valid);
    }

    #[test]
    fn cumulative_action_matches_erf_form() {
        // Φ(r) = g√(2π)·erf(√(r/2)) for Yukawa with R = 1; check against the
        // half-way point erf(x) = 1/2 at x = 0.476936276204470.
        let g = 2.0;
        let pot = RadialPotential::yukawa(g, 1.0).unwrap();
        let x: f64 = 0.476936276204470;
        let r = 2.0 * x * x;
        let phi = cumulative_action(&pot, r).unwrap();
        assert_relative_eq!(phi, 0.5 * g * (2.0 * PI).sqrt(), max_relative = 1e-9);
    }
}
