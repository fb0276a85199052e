//! Supersymmetric partner construction and the ℓ-ladder checks.
//!
//! For an effective potential U₀ with ground state u₀ and energy E₀, the
//! superpotential W = u₀'/u₀ solves W' + W² = U₀ − E₀ and the partner
//! U₁ = U₀ − 2W' = 2W² + 2E₀ − U₀ carries the same spectrum minus E₀.
//! Everything is evaluated through y = W − (α+1)/r, which stays finite at
//! the origin, so no 1/r² cancellation enters the partner or the
//! log-convexity test.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::counter::{
    census_with, count_states_with, ground_state_on_grid, log_slope_rhs, solve_levels_with, CounterConfig,
    EffectivePotential, GroundState,
};
use crate::error::{Error, Result};
use crate::potential::RadialPotential;

/// Evaluates the partner remainder U₁ − (α+2)(α+1)/r² anywhere.
#[derive(Debug)]
pub struct PartnerProfile {
    original: EffectivePotential,
    ground: GroundState,
}

impl PartnerProfile {
    pub(crate) fn remainder(&self, r: f64) -> f64 {
        let e0 = self.ground.energy;
        let y = self.ground.log_slope_at(r);
        let dy = log_slope_rhs(&self.original, e0, r, y);
        self.original.remainder(r) - 2.0 * dy
    }

    pub(crate) fn outer_radius(&self) -> f64 {
        self.ground.r_end()
    }
}

/// An effective potential together with its SUSY partner.
#[derive(Debug, Clone)]
pub struct SusyPair {
    pub original: EffectivePotential,
    pub partner: EffectivePotential,
    /// All bound levels of the original, ascending.
    pub original_levels: Vec<f64>,
    /// min over the grid of W' + (α+1)/r² = d²/dr² ln(u₀/r^{α+1}).
    pub log_convexity_min: f64,
    /// Tolerance on the sign conditions, 10⁻⁶·|E₀|.
    pub tol_cond: f64,
    profile: Arc<PartnerProfile>,
}

impl SusyPair {
    pub fn ground(&self) -> &GroundState {
        &self.profile.ground
    }

    pub fn ground_energy(&self) -> f64 {
        self.profile.ground.energy
    }

    pub fn radii(&self) -> &[f64] {
        &self.profile.ground.radii
    }

    pub fn superpotential(&self) -> Vec<f64> {
        self.profile.ground.superpotential()
    }

    /// Max relative Riccati defect of W on the grid.
    pub fn riccati_residual(&self) -> f64 {
        riccati_residual(&self.original, &self.profile.ground)
    }
}

pub fn build_pair(eff: &EffectivePotential) -> Result<SusyPair> {
    build_pair_with(eff, &CounterConfig::default())
}

pub fn build_pair_with(eff: &EffectivePotential, cfg: &CounterConfig) -> Result<SusyPair> {
    let levels = solve_levels_with(eff, usize::MAX, cfg)?;
    let (&e0, &shallowest) = match (levels.first(), levels.last()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::NoBoundState),
    };
    let r_end = eff.radius_for(shallowest, cfg)?;
    let ground = ground_state_on_grid(eff, e0, r_end, cfg)?;
    let log_convexity_min = ground.log_slope_prime.iter().cloned().fold(f64::INFINITY, f64::min);
    let profile = Arc::new(PartnerProfile {
        original: eff.clone(),
        ground,
    });
    let partner = EffectivePotential::partner(
        profile.clone(),
        eff.core_index() + 1.0,
        eff.tail_index(),
        eff.scale(),
        format!("partner of {}", eff.label()),
    );
    Ok(SusyPair {
        original: eff.clone(),
        partner,
        original_levels: levels,
        log_convexity_min,
        tol_cond: 1e-6 * e0.abs(),
        profile,
    })
}

/// W on the ground-state grid.
#[derive(Debug, Clone)]
pub struct Superpotential {
    pub energy: f64,
    pub radii: Vec<f64>,
    pub w: Vec<f64>,
    pub riccati_residual: f64,
}

pub fn superpotential(eff: &EffectivePotential) -> Result<Superpotential> {
    let cfg = CounterConfig::default();
    let gs = crate::counter::ground_state_with(eff, &cfg)?;
    Ok(Superpotential {
        energy: gs.energy,
        riccati_residual: riccati_residual(eff, &gs),
        w: gs.superpotential(),
        radii: gs.radii,
    })
}

/// Integrated Riccati defect per grid interval, relative to the size of
/// the terms: |ΔW − ∫(U₀ − E₀ − W²)| / (h·(W² + |U₀ − E₀| + 1/R²)).
fn riccati_residual(eff: &EffectivePotential, gs: &GroundState) -> f64 {
    // 3-point Gauss–Legendre on each interval.
    const X: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
    const WT: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
    let a1 = gs.core_index + 1.0;
    let e0 = gs.energy;
    let floor = 1.0 / (eff.scale() * eff.scale());
    let w_at = |r: f64| gs.log_slope_at(r) + a1 / r;
    let mut worst = 0.0_f64;
    for win in gs.radii.windows(2) {
        let (a, b) = (win[0], win[1]);
        let (c, h) = (0.5 * (a + b), b - a);
        let mut integral = 0.0;
        let mut size = 0.0_f64;
        for (x, wt) in X.iter().zip(WT) {
            let r = c + 0.5 * h * x;
            let w = w_at(r);
            let drive = eff.value(r) - e0;
            integral += 0.5 * h * wt * (drive - w * w);
            size = size.max(w * w + drive.abs());
        }
        let defect = (w_at(b) - w_at(a)) - integral;
        let rel = defect.abs() / (h * (size + floor));
        worst = worst.max(rel);
    }
    worst
}

pub fn partner_potential(eff: &EffectivePotential) -> Result<EffectivePotential> {
    Ok(build_pair(eff)?.partner)
}

/// (min over the grid of d²/dr² ln(u₀/r^{α+1}), min ≥ −tol).
pub fn check_log_convexity(pair: &SusyPair) -> (f64, bool) {
    (pair.log_convexity_min, pair.log_convexity_min >= -pair.tol_cond)
}

/// U₁ ≤ V + (ℓ+1)(ℓ+2)/r² pointwise on the grid, with U₁ = 2W² + 2E₀ − U₀.
pub fn check_domination(pair: &SusyPair) -> Result<bool> {
    let l = pair.original.angular_momentum().ok_or(Error::NotCentrifugal)?;
    let pot = pair.original.potential().ok_or(Error::NotCentrifugal)?;
    let next = ((l + 1) * (l + 2)) as f64;
    let e0 = pair.ground_energy();
    let gs = pair.ground();
    for (&r, w) in gs.radii.iter().zip(gs.superpotential()) {
        let u0 = pair.original.value(r);
        let u1 = 2.0 * w * w + 2.0 * e0 - u0;
        let bound = pot.value(r) + next / (r * r);
        // Floating-point slack on the cancelling 1/r² terms.
        let slack = pair.tol_cond + 1e-10 * (w * w + u0.abs());
        if u1 > bound + slack {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartnerSpectrumReport {
    pub original_levels: Vec<f64>,
    pub partner_levels: Vec<f64>,
    pub partner_count: usize,
    /// |E_partner,i − E_original,i+1| / |E_original,i+1|
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    pub count_matches: bool,
    pub passed: bool,
}

pub fn verify_partner_spectrum(pair: &SusyPair) -> Result<PartnerSpectrumReport> {
    verify_partner_spectrum_with(pair, &CounterConfig::default())
}

pub fn verify_partner_spectrum_with(pair: &SusyPair, cfg: &CounterConfig) -> Result<PartnerSpectrumReport> {
    let partner_count = count_states_with(&pair.partner, cfg)?.count;
    let partner_levels = solve_levels_with(&pair.partner, usize::MAX, cfg)?;
    let expected = &pair.original_levels[1..];
    let residuals: Vec<f64> = partner_levels
        .iter()
        .zip(expected)
        .map(|(p, o)| ((p - o) / o).abs())
        .collect();
    let max_residual = residuals.iter().cloned().fold(0.0, f64::max);
    let count_matches = partner_count + 1 == pair.original_levels.len() && partner_levels.len() == expected.len();
    Ok(PartnerSpectrumReport {
        original_levels: pair.original_levels.clone(),
        partner_levels,
        partner_count,
        passed: count_matches && max_residual <= 1e-5,
        residuals,
        max_residual,
        count_matches,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rung {
    pub l: u32,
    pub n_l: usize,
    pub n_next: usize,
    /// N_{ℓ+1} ≤ N_ℓ − 1
    pub decreases: bool,
    /// N_ℓ ≤ N₀ − ℓ
    pub within_s_wave_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderReport {
    pub per_l: Vec<(u32, usize)>,
    pub rungs: Vec<Rung>,
    pub holds: bool,
}

pub fn verify_ladder(pot: &RadialPotential) -> Result<LadderReport> {
    verify_ladder_with(pot, &CounterConfig::default())
}

pub fn verify_ladder_with(pot: &RadialPotential, cfg: &CounterConfig) -> Result<LadderReport> {
    let class = pot.classify()?;
    if !class.laplacian_negative {
        return Err(Error::LadderInapplicable(format!(
            "{pot} violates (rV)'' <= 0 near r = {}",
            class.violation_witness.unwrap_or(f64::NAN)
        )));
    }
    let census = census_with(pot, cfg)?;
    let n0 = census.s_wave();
    let rungs: Vec<Rung> = census
        .per_l
        .iter()
        .map(|&(l, n_l)| {
            let n_next = census.n_l(l + 1);
            Rung {
                l,
                n_l,
                n_next,
                decreases: n_next < n_l,
                within_s_wave_bound: n_l + l as usize <= n0,
            }
        })
        .collect();
    Ok(LadderReport {
        holds: rungs.iter().all(|r| r.decreases && r.within_s_wave_bound),
        per_l: census.per_l,
        rungs,
    })
}

/// All SUSY checks for one angular momentum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RungCheck {
    pub l: u32,
    pub ground_energy: f64,
    pub riccati_residual: f64,
    pub log_convexity_min: f64,
    pub log_convexity_holds: bool,
    pub dominated: bool,
    pub spectrum: PartnerSpectrumReport,
}

impl RungCheck {
    pub fn passed(&self) -> bool {
        self.riccati_residual < 1e-6 && self.log_convexity_holds && self.dominated && self.spectrum.passed
    }
}

pub fn check_rung(pot: &RadialPotential, l: u32, cfg: &CounterConfig) -> Result<RungCheck> {
    let pair = build_pair_with(&EffectivePotential::centrifugal(pot, l), cfg)?;
    let (log_convexity_min, log_convexity_holds) = check_log_convexity(&pair);
    Ok(RungCheck {
        l,
        ground_energy: pair.ground_energy(),
        riccati_residual: pair.riccati_residual(),
        log_convexity_min,
        log_convexity_holds,
        dominated: check_domination(&pair)?,
        spectrum: verify_partner_spectrum_with(&pair, cfg)?,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SusySuiteReport {
    pub rungs: Vec<RungCheck>,
    /// Absent when the potential fails (rV)'' <= 0.
    pub ladder: Option<LadderReport>,
    pub passed: bool,
}

/// Checks every bound angular momentum and, where it applies, the ladder.
pub fn verify_suite(pot: &RadialPotential, cfg: &CounterConfig) -> Result<SusySuiteReport> {
    let census = census_with(pot, cfg)?;
    let rungs = census
        .per_l
        .iter()
        .map(|&(l, _)| check_rung(pot, l, cfg))
        .collect::<Result<Vec<_>>>()?;
    let ladder = match verify_ladder_with(pot, cfg) {
        Ok(rep) => Some(rep),
        Err(Error::LadderInapplicable(_)) => None,
        Err(e) => return Err(e),
    };
    let passed = rungs.iter().all(RungCheck::passed) && ladder.as_ref().is_none_or(|l| l.holds);
    Ok(SusySuiteReport { rungs, ladder, passed })
}
