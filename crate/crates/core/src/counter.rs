//! Exact spectral ground truth for radial problems.
//!
//! Bound states are counted from the zero-energy regular solution written
//! in Prüfer form, `k·u = ρ sin θ`, `u' = ρ cos θ` with `k = 1/R`. The angle
//! only ever crosses multiples of π upwards, so the node count is read off
//! the final angle without tracking the (possibly enormous) amplitude.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::Stepper;
use crate::potential::RadialPotential;
use crate::susy::PartnerProfile;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Levels within `threshold_eps / R²` of zero are not counted.
    pub threshold_eps: f64,
    /// Inner radius of every integration, in units of R.
    pub r_min_factor: f64,
    /// The zero-energy integration stops once R·r·|V| drops below this.
    pub tail_cut: f64,
    /// Bound-state integrations extend to κ·r_max ≥ this value.
    pub kappa_rmax: f64,
    /// Relative accuracy of polished levels.
    pub level_rel_tol: f64,
    /// Census gives up above this angular momentum.
    pub max_l: u32,
    pub grid_per_decade: usize,
    /// Linear grid spacing beyond R, in units of R.
    pub grid_linear_step: f64,
    pub grid_max_points: usize,
}

impl Default for CounterConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-12,
            threshold_eps: 1e-8,
            r_min_factor: 1e-6,
            tail_cut: 1e-12,
            kappa_rmax: 35.0,
            level_rel_tol: 1e-9,
            max_l: 2000,
            grid_per_decade: 200,
            grid_linear_step: 1.0 / 40.0,
            grid_max_points: 40_000,
        }
    }
}

/// U(r) whose small-r behaviour is `α(α+1)/r²` for a core index α.
#[derive(Debug, Clone)]
pub struct EffectivePotential {
    profile: Profile,
    core_index: f64,
    tail_index: f64,
    scale: f64,
    label: String,
}

#[derive(Debug, Clone)]
enum Profile {
    Centrifugal { potential: RadialPotential, l: u32 },
    Partner(Arc<PartnerProfile>),
}

impl EffectivePotential {
    /// V(r) + l(l+1)/r².
    pub fn centrifugal(potential: &RadialPotential, l: u32) -> Self {
        Self {
            label: format!("{potential} l={l}"),
            scale: potential.length_scale(),
            core_index: l as f64,
            tail_index: l as f64,
            profile: Profile::Centrifugal {
                potential: potential.clone(),
                l,
            },
        }
    }

    pub(crate) fn partner(profile: Arc<PartnerProfile>, core_index: f64, tail_index: f64, scale: f64, label: String) -> Self {
        Self {
            profile: Profile::Partner(profile),
            core_index,
            tail_index,
            scale,
            label,
        }
    }

    /// U(r).
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        let a = self.core_index;
        a * (a + 1.0) / (r * r) + self.remainder(r)
    }

    /// U(r) − α(α+1)/r².
    #[inline]
    pub fn remainder(&self, r: f64) -> f64 {
        match &self.profile {
            Profile::Centrifugal { potential, .. } => potential.value(r),
            Profile::Partner(p) => p.remainder(r),
        }
    }

    pub fn core_index(&self) -> f64 {
        self.core_index
    }

    /// λ with U(r) ≈ λ(λ+1)/r² at large r.
    pub fn tail_index(&self) -> f64 {
        self.tail_index
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// The angular momentum, for effective potentials of centrifugal form.
    pub fn angular_momentum(&self) -> Option<u32> {
        match &self.profile {
            Profile::Centrifugal { l, .. } => Some(*l),
            Profile::Partner(_) => None,
        }
    }

    pub fn potential(&self) -> Option<&RadialPotential> {
        match &self.profile {
            Profile::Centrifugal { potential, .. } => Some(potential),
            Profile::Partner(_) => None,
        }
    }

    /// Radius past which U(r) = λ(λ+1)/r² for counting purposes.
    fn outer_radius(&self, cfg: &CounterConfig) -> Result<f64> {
        match &self.profile {
            Profile::Centrifugal { potential, .. } => {
                let r = potential.negligible_beyond(self.scale, cfg.tail_cut).max(2.0 * self.scale);
                if self.scale * r * potential.depth(r) >= cfg.tail_cut {
                    return Err(Error::PhaseNotConverged {
                        r_max: r,
                        detail: "potential tail does not fall off".into(),
                    });
                }
                Ok(r)
            }
            Profile::Partner(p) => Ok(p.outer_radius()),
        }
    }

    /// Integration end for the regular solution at energy `e` ≤ 0.
    pub(crate) fn radius_for(&self, e: f64, cfg: &CounterConfig) -> Result<f64> {
        let outer = self.outer_radius(cfg)?;
        if e >= 0.0 {
            return Ok(outer);
        }
        let kappa = (-e).sqrt();
        let lam = self.tail_index;
        let r = outer
            .max(cfg.kappa_rmax / kappa)
            .max(10.0 * (lam * (lam + 1.0)).sqrt() / kappa);
        if r > 1e9 * self.scale {
            return Err(Error::PhaseNotConverged {
                r_max: r,
                detail: format!("energy {e:e} too close to threshold"),
            });
        }
        Ok(r)
    }

    fn r_min(&self, cfg: &CounterConfig) -> f64 {
        cfg.r_min_factor * self.scale
    }
}

impl fmt::Display for EffectivePotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label)
    }
}

/// Log-derivative of the solution decaying at infinity for
/// `U = λ(λ+1)/r²` at energy `-κ²`.
///
/// For integer λ this is exact: `r·k_λ(κr) ∝ e^{-κr} Σ_j a_j (κr)^{-j}`.
pub(crate) fn decaying_log_derivative(kappa: f64, lambda: f64, r: f64) -> f64 {
    if kappa == 0.0 {
        return -lambda / r;
    }
    let l = lambda.round();
    if (lambda - l).abs() < 1e-9 && l <= 60.0 {
        let l = l as usize;
        let z = kappa * r;
        let (mut p, mut dp) = (1.0, 0.0);
        let mut a = 1.0;
        let mut zj = 1.0;
        for j in 1..=l {
            a *= ((l + j) * (l + 1 - j)) as f64 / (2 * j) as f64;
            zj /= z;
            p += a * zj;
            dp -= j as f64 * a * zj / r;
        }
        -kappa + dp / p
    } else {
        -kappa - lambda * (lambda + 1.0) / (2.0 * kappa * r * r)
    }
}

fn prufer_rhs(eff: &EffectivePotential, energy: f64, k: f64) -> impl FnMut(f64, &[f64; 1]) -> [f64; 1] + '_ {
    move |r, th| {
        let (s, c) = th[0].sin_cos();
        [k * c * c + (energy - eff.value(r)) / k * s * s]
    }
}

/// Prüfer angle of the regular solution at `r_out`.
fn outward_angle(eff: &EffectivePotential, energy: f64, r_out: f64, cfg: &CounterConfig) -> Result<f64> {
    let k = 1.0 / eff.scale;
    let r0 = eff.r_min(cfg);
    let th0 = (k * r0 / (eff.core_index + 1.0)).atan();
    let mut st = Stepper::new(cfg.rtol, cfg.atol);
    st.h = 0.05 * r0;
    let mut f = prufer_rhs(eff, energy, k);
    Ok(st.run(&mut f, r0, [th0], r_out)?[0])
}

/// Prüfer angle at `r_in` of the solution decaying beyond `r_max`.
fn inward_angle(eff: &EffectivePotential, energy: f64, r_in: f64, r_max: f64, cfg: &CounterConfig) -> Result<f64> {
    let k = 1.0 / eff.scale;
    let kappa = (-energy).max(0.0).sqrt();
    let wd = decaying_log_derivative(kappa, eff.tail_index, r_max);
    let th0 = k.atan2(wd);
    let mut st = Stepper::new(cfg.rtol, cfg.atol);
    st.h = 0.01 * eff.scale;
    let mut f = prufer_rhs(eff, energy, k);
    Ok(st.run(&mut f, r_max, [th0], r_in)?[0])
}

/// Number of eigenvalues strictly below `energy` (≤ 0).
pub fn count_below(eff: &EffectivePotential, energy: f64) -> Result<usize> {
    count_below_with(eff, energy, &CounterConfig::default())
}

pub fn count_below_with(eff: &EffectivePotential, energy: f64, cfg: &CounterConfig) -> Result<usize> {
    let r_max = eff.radius_for(energy, cfg)?;
    let th = outward_angle(eff, energy, r_max, cfg)?;
    let mut n = (th / PI).floor().max(0.0) as usize;
    // A further node lies beyond r_max iff the growing tail component has
    // the opposite sign to u.
    let k = 1.0 / eff.scale;
    let (s, c) = th.sin_cos();
    let (u, du) = (s / k, c);
    let wd = decaying_log_derivative((-energy).max(0.0).sqrt(), eff.tail_index, r_max);
    if u * (du - wd * u) < 0.0 {
        n += 1;
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateCount {
    pub count: usize,
    /// A level sits within the threshold window and was not counted.
    pub threshold_sensitive: bool,
}

pub fn count_states(eff: &EffectivePotential) -> Result<StateCount> {
    count_states_with(eff, &CounterConfig::default())
}

pub fn count_states_with(eff: &EffectivePotential, cfg: &CounterConfig) -> Result<StateCount> {
    let at_zero = count_below_with(eff, 0.0, cfg)?;
    let eps = cfg.threshold_eps / (eff.scale * eff.scale);
    let below = count_below_with(eff, -eps, cfg)?;
    Ok(StateCount {
        count: below.min(at_zero),
        threshold_sensitive: below != at_zero,
    })
}

/// Lowest `k` eigenvalues (fewer if fewer exist), ascending.
pub fn solve_levels(eff: &EffectivePotential, k: usize) -> Result<Vec<f64>> {
    solve_levels_with(eff, k, &CounterConfig::default())
}

pub fn solve_levels_with(eff: &EffectivePotential, k: usize, cfg: &CounterConfig) -> Result<Vec<f64>> {
    let total = count_states_with(eff, cfg)?.count;
    let wanted = k.min(total);
    if wanted == 0 {
        return Ok(Vec::new());
    }
    let scale2 = eff.scale * eff.scale;
    let e_hi = -cfg.threshold_eps / scale2;
    let mut samples: Vec<(f64, usize)> = vec![(e_hi, total)];
    let mut e_lo = -1.0 / scale2;
    let mut tries = 0;
    loop {
        let c = count_below_with(eff, e_lo, cfg)?;
        samples.push((e_lo, c));
        if c == 0 {
            break;
        }
        e_lo *= 4.0;
        tries += 1;
        if tries > 80 {
            return Err(Error::Integration("no lower energy bracket found".into()));
        }
    }

    let mut levels = Vec::with_capacity(wanted);
    for n in 0..wanted {
        let (mut a, mut b) = bracket(&samples, n);
        while b - a > 1e-6 * b.abs() {
            let mid = 0.5 * (a + b);
            let c = count_below_with(eff, mid, cfg)?;
            samples.push((mid, c));
            (a, b) = bracket(&samples, n);
        }
        let e = match polish(eff, a, b, cfg) {
            Ok(e) if e > a && e < b => e,
            _ => {
                while b - a > 1e-13 * b.abs() {
                    let mid = 0.5 * (a + b);
                    let c = count_below_with(eff, mid, cfg)?;
                    samples.push((mid, c));
                    (a, b) = bracket(&samples, n);
                }
                0.5 * (a + b)
            }
        };
        levels.push(e);
    }
    Ok(levels)
}

/// Tightest known (a, b) with count(a) ≤ n < count(b).
fn bracket(samples: &[(f64, usize)], n: usize) -> (f64, f64) {
    let a = samples
        .iter()
        .filter(|s| s.1 <= n)
        .map(|s| s.0)
        .fold(f64::NEG_INFINITY, f64::max);
    let b = samples
        .iter()
        .filter(|s| s.1 > n)
        .map(|s| s.0)
        .fold(f64::INFINITY, f64::min);
    (a, b)
}

/// Outermost radius where the classically allowed region at `energy` ends.
fn turning_point(eff: &EffectivePotential, energy: f64, r_max: f64, cfg: &CounterConfig) -> f64 {
    let lo = 100.0 * eff.r_min(cfg);
    let mut r = r_max;
    while r > lo {
        if eff.value(r) < energy {
            return r.clamp(lo, 0.5 * r_max);
        }
        r *= 0.995;
    }
    0.5 * r_max
}

/// Secular refinement inside a bracket holding exactly one level: the
/// Prüfer mismatch between the regular and the decaying solution at the
/// turning point crosses a multiple of π there.
fn polish(eff: &EffectivePotential, a: f64, b: f64, cfg: &CounterConfig) -> Result<f64> {
    let r_max = eff.radius_for(b, cfg)?;
    let r_m = turning_point(eff, 0.5 * (a + b), r_max, cfg);
    let mismatch = |e: f64| -> Result<f64> {
        Ok(outward_angle(eff, e, r_m, cfg)? - inward_angle(eff, e, r_m, r_max, cfg)?)
    };
    let da = mismatch(a)?;
    let db = mismatch(b)?;
    let target = (da / PI).ceil() * PI;
    if !(da < target && target < db && db < target + PI) {
        return Err(Error::Integration("mismatch does not bracket a single level".into()));
    }
    brent(|e| mismatch(e).map(|d| d - target), a, b, da - target, db - target, cfg.level_rel_tol * 1e-4)
}

/// Brent's method on a sign-changing bracket.
pub(crate) fn brent<F>(mut f: F, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    if fa * fb > 0.0 {
        return Err(Error::Integration("root not bracketed".into()));
    }
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut bisected = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() <= rel_tol * b.abs() + 1e-300 {
            return Ok(b);
        }
        let mut s = if fa != fc && fb != fc {
            a * fb * fc / ((fa - fb) * (fa - fc)) + b * fa * fc / ((fb - fa) * (fb - fc)) + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let lo = (3.0 * a + b) / 4.0;
        let out_of_range = !((s > lo.min(b)) && (s < lo.max(b)));
        let tol = rel_tol * b.abs();
        if out_of_range
            || (bisected && (s - b).abs() >= (b - c).abs() / 2.0)
            || (!bisected && (s - b).abs() >= (c - d).abs() / 2.0)
            || (bisected && (b - c).abs() < tol)
            || (!bisected && (c - d).abs() < tol)
        {
            s = 0.5 * (a + b);
            bisected = true;
        } else {
            bisected = false;
        }
        let fs = f(s)?;
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    Ok(b)
}

/// The nodeless lowest eigenfunction on a radial grid.
#[derive(Debug, Clone)]
pub struct GroundState {
    pub energy: f64,
    pub core_index: f64,
    pub radii: Vec<f64>,
    /// W(r) − (α+1)/r = d/dr ln(u₀/r^{α+1}).
    pub log_slope: Vec<f64>,
    /// Derivative of `log_slope`, from the Riccati equation.
    pub log_slope_prime: Vec<f64>,
    /// u₀ normalised to ∫u₀² = 1.
    pub u: Vec<f64>,
    pub matching_radius: f64,
    pub matching_residual: f64,
    tail_index: f64,
}

impl GroundState {
    pub fn kappa(&self) -> f64 {
        (-self.energy).sqrt()
    }

    /// Superpotential W = u₀'/u₀ on the grid.
    pub fn superpotential(&self) -> Vec<f64> {
        let a1 = self.core_index + 1.0;
        self.radii.iter().zip(&self.log_slope).map(|(r, y)| y + a1 / r).collect()
    }

    pub fn node_count(&self) -> usize {
        self.u.windows(2).filter(|w| w[0] * w[1] < 0.0).count()
    }

    pub fn r_end(&self) -> f64 {
        *self.radii.last().unwrap()
    }

    /// d/dr ln(u₀/r^{α+1}) anywhere: Hermite interpolation on the grid,
    /// the exact free tail beyond it.
    pub(crate) fn log_slope_at(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.log_slope[0];
        }
        if r >= self.radii[n - 1] {
            return decaying_log_derivative(self.kappa(), self.tail_index, r) - (self.core_index + 1.0) / r;
        }
        let i = self.radii.partition_point(|&x| x <= r) - 1;
        let h = self.radii[i + 1] - self.radii[i];
        let t = (r - self.radii[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.log_slope[i]
            + (t3 - 2.0 * t2 + t) * h * self.log_slope_prime[i]
            + (-2.0 * t3 + 3.0 * t2) * self.log_slope[i + 1]
            + (t3 - t2) * h * self.log_slope_prime[i + 1]
    }
}

/// Riccati right-hand side for y = W − (α+1)/r:
/// y' = Q − E₀ − y² − 2(α+1)y/r with Q = U − α(α+1)/r².
#[inline]
pub(crate) fn log_slope_rhs(eff: &EffectivePotential, e0: f64, r: f64, y: f64) -> f64 {
    eff.remainder(r) - e0 - y * y - 2.0 * (eff.core_index + 1.0) * y / r
}

/// Log grid from r_min to R, then linear to `r_end`.
pub(crate) fn radial_grid(scale: f64, r_min: f64, r_end: f64, cfg: &CounterConfig) -> Vec<f64> {
    let mut grid = Vec::new();
    let decades = (scale / r_min).log10();
    let n_log = ((decades * cfg.grid_per_decade as f64).ceil() as usize).max(1);
    let step = (scale / r_min).ln() / n_log as f64;
    for i in 0..n_log {
        grid.push(r_min * (step * i as f64).exp());
    }
    let budget = cfg.grid_max_points.saturating_sub(n_log).max(100);
    let h = (cfg.grid_linear_step * scale).max((r_end - scale) / budget as f64);
    let n_lin = ((r_end - scale) / h).ceil().max(1.0) as usize;
    let h = (r_end - scale) / n_lin as f64;
    for i in 0..=n_lin {
        grid.push(scale + h * i as f64);
    }
    grid
}

pub fn ground_state_wavefunction(eff: &EffectivePotential) -> Result<GroundState> {
    ground_state_with(eff, &CounterConfig::default())
}

pub fn ground_state_with(eff: &EffectivePotential, cfg: &CounterConfig) -> Result<GroundState> {
    let e0 = *solve_levels_with(eff, 1, cfg)?.first().ok_or(Error::NoBoundState)?;
    let r_end = eff.radius_for(e0, cfg)?;
    ground_state_on_grid(eff, e0, r_end, cfg)
}

/// Builds the ground state for a known E₀ on a grid reaching `r_end`.
pub(crate) fn ground_state_on_grid(eff: &EffectivePotential, e0: f64, r_end: f64, cfg: &CounterConfig) -> Result<GroundState> {
    let radii = radial_grid(eff.scale, eff.r_min(cfg), r_end, cfg);
    let n = radii.len();
    let a1 = eff.core_index + 1.0;
    let kappa = (-e0).sqrt();
    let r_turn = turning_point(eff, e0, r_end, cfg);
    let i_m = radii.partition_point(|&r| r <= r_turn).clamp(1, n - 2);

    let shoot = |e: f64| shoot_log_slope(eff, e, &radii, i_m);
    let mismatch = |y: &[f64], y_in: f64| (y[i_m] - y_in) / (y[i_m] + a1 / radii[i_m]).abs().max(kappa);

    // Secant refinement of E₀ on the matching mismatch, so the two halves join smoothly.
    let (mut e0, (mut y, y_in)) = (e0, shoot(e0)?);
    let mut f0 = mismatch(&y, y_in);
    let mut e_prev = e0 * (1.0 + 1e-9);
    let mut f_prev = shoot(e_prev).map_or(f0, |(y, yi)| mismatch(&y, yi));
    for _ in 0..8 {
        if f0 == 0.0 || f0 == f_prev {
            break;
        }
        let e_new = e0 - f0 * (e0 - e_prev) / (f0 - f_prev);
        if !e_new.is_finite() || (e_new - e0).abs() > 1e-6 * e0.abs() {
            break;
        }
        let Ok((y_new, yi_new)) = shoot(e_new) else { break };
        let f_new = mismatch(&y_new, yi_new);
        if f_new.abs() >= f0.abs() {
            break;
        }
        (e_prev, f_prev) = (e0, f0);
        (e0, y, f0) = (e_new, y_new, f_new);
        if (e0 - e_prev).abs() <= 1e-15 * e0.abs() {
            break;
        }
    }
    let residual = f0.abs();
    if residual > 1e-6 || !residual.is_finite() {
        return Err(Error::MatchingFailed {
            r: radii[i_m],
            residual,
        });
    }

    let yp: Vec<f64> = radii.iter().zip(&y).map(|(&r, &v)| log_slope_rhs(eff, e0, r, v)).collect();

    // ln u = (α+1) ln r + ∫ y, integrated with the cubic Hermite rule.
    let mut log_u = vec![a1 * radii[0].ln(); n];
    let mut acc = 0.0;
    for i in 1..n {
        let h = radii[i] - radii[i - 1];
        acc += 0.5 * h * (y[i - 1] + y[i]) + h * h / 12.0 * (yp[i - 1] - yp[i]);
        log_u[i] = a1 * radii[i].ln() + acc;
    }
    let peak = log_u.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut u: Vec<f64> = log_u.iter().map(|l| (l - peak).exp()).collect();
    // ∫u², with (u²)' = 2u²W.
    let w: Vec<f64> = radii.iter().zip(&y).map(|(r, v)| v + a1 / r).collect();
    let mut norm = u[0] * u[0] * radii[0] / (2.0 * a1 + 1.0);
    for i in 1..n {
        let h = radii[i] - radii[i - 1];
        let (f0, f1) = (u[i - 1] * u[i - 1], u[i] * u[i]);
        let (d0, d1) = (2.0 * f0 * w[i - 1], 2.0 * f1 * w[i]);
        norm += 0.5 * h * (f0 + f1) + h * h / 12.0 * (d0 - d1);
    }
    let s = norm.sqrt();
    u.iter_mut().for_each(|v| *v /= s);

    Ok(GroundState {
        energy: e0,
        core_index: eff.core_index,
        matching_radius: radii[i_m],
        matching_residual: residual,
        radii,
        log_slope: y,
        log_slope_prime: yp,
        u,
        tail_index: eff.tail_index,
    })
}

/// Integrates y outward to `radii[i_m]` and inward from the tail down to it.
/// Returns y on the grid (outward value at `i_m`) and the inward value there.
fn shoot_log_slope(eff: &EffectivePotential, e0: f64, radii: &[f64], i_m: usize) -> Result<(Vec<f64>, f64)> {
    let n = radii.len();
    let a1 = eff.core_index + 1.0;
    let kappa = (-e0).sqrt();
    let mut rhs = |r: f64, y: &[f64; 1]| [log_slope_rhs(eff, e0, r, y[0])];
    let mut y = vec![0.0; n];

    // Outward from deep inside the core, where y ≈ rQ/(2(α+1)).
    let r_start = 1e-3 * radii[0];
    let y_start = r_start * eff.remainder(r_start) / (2.0 * a1);
    let mut st = Stepper::new(1e-12, 1e-13 / eff.scale);
    st.h = 0.05 * r_start;
    let mut cur = st.run(&mut rhs, r_start, [y_start], radii[0])?;
    y[0] = cur[0];
    for i in 1..=i_m {
        cur = st.run(&mut rhs, radii[i - 1], cur, radii[i])?;
        y[i] = cur[0];
    }

    // Inward from the tail; the decaying solution attracts.
    let mut st = Stepper::new(1e-12, 1e-13 / eff.scale);
    st.h = 0.01 * eff.scale;
    let mut cur = [decaying_log_derivative(kappa, eff.tail_index, radii[n - 1]) - a1 / radii[n - 1]];
    y[n - 1] = cur[0];
    for i in (i_m..n - 1).rev() {
        cur = st.run(&mut rhs, radii[i + 1], cur, radii[i])?;
        if i > i_m {
            y[i] = cur[0];
        }
    }
    Ok((y, cur[0]))
}

/// Per-ℓ counts and the degeneracy-weighted total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelCensus {
    /// (ℓ, N_ℓ) for every ℓ with N_ℓ > 0.
    pub per_l: Vec<(u32, usize)>,
    /// Σ (2ℓ+1) N_ℓ
    pub total: usize,
    /// Largest ℓ with a bound state.
    pub l_max_found: Option<u32>,
    pub threshold_sensitive: bool,
}

impl LevelCensus {
    pub fn n_l(&self, l: u32) -> usize {
        self.per_l.iter().find(|(k, _)| *k == l).map_or(0, |(_, n)| *n)
    }

    pub fn s_wave(&self) -> usize {
        self.n_l(0)
    }
}

pub fn census(pot: &RadialPotential) -> Result<LevelCensus> {
    census_with(pot, &CounterConfig::default())
}

pub fn census_with(pot: &RadialPotential, cfg: &CounterConfig) -> Result<LevelCensus> {
    pot.validate()?;
    let mut out = LevelCensus {
        per_l: Vec::new(),
        total: 0,
        l_max_found: None,
        threshold_sensitive: false,
    };
    if pot.is_null() {
        return Ok(out);
    }
    for l in 0..=cfg.max_l {
        let eff = EffectivePotential::centrifugal(pot, l);
        let sc = count_states_with(&eff, cfg).map_err(|e| Error::Census {
            l,
            source: Box::new(e),
        })?;
        out.threshold_sensitive |= sc.threshold_sensitive;
        if sc.count == 0 {
            return Ok(out);
        }
        out.per_l.push((l, sc.count));
        out.total += (2 * l as usize + 1) * sc.count;
        out.l_max_found = Some(l);
    }
    Err(Error::Census {
        l: cfg.max_l,
        source: Box::new(Error::Integration("bound states persist at the largest angular momentum".into())),
    })
}
