//! Analytic limits on the number of bound states.
//!
//! Each formula is a plain function of [`Functionals`]; [`evaluate`] gathers
//! them into a [`BoundsReport`] and records why a bound does not apply
//! instead of dropping it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::counter::LevelCensus;
use crate::error::{Error, Result};
use crate::potential::{PotentialClassification, RadialPotential};
use crate::quadrature::{compute_functionals, Functionals};

const TWO_OVER_PI: f64 = 2.0 / std::f64::consts::PI;
const PI: f64 = std::f64::consts::PI;

/// Lieb's constant in N ≤ C ∫ r²|V|^{3/2}.
pub const LIEB_CONSTANT: f64 = 1.458;

/// A cap on the largest binding angular momentum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LBound {
    /// No angular momentum can bind, not even ℓ = 0.
    NoBinding,
    Max(u32),
}

impl LBound {
    /// Integer part of a real cap; negative values mean nothing binds.
    pub fn from_real(x: f64) -> Self {
        if x >= 0.0 {
            LBound::Max(x.floor() as u32)
        } else {
            LBound::NoBinding
        }
    }

    pub fn value(self) -> Option<u32> {
        match self {
            LBound::NoBinding => None,
            LBound::Max(l) => Some(l),
        }
    }

    pub fn min(self, other: Self) -> Self {
        match (self, other) {
            (LBound::Max(a), LBound::Max(b)) => LBound::Max(a.min(b)),
            _ => LBound::NoBinding,
        }
    }
}

impl fmt::Display for LBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LBound::NoBinding => f.write_str("no-binding"),
            LBound::Max(l) => write!(f, "{l}"),
        }
    }
}

/// A real-valued bound with its integer part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bound {
    pub value: f64,
    pub floor: i64,
}

impl Bound {
    pub fn new(value: f64) -> Self {
        Self {
            value,
            floor: value.floor() as i64,
        }
    }
}

/// A value, or the reason it was not computed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gated<T> {
    Applicable(T),
    Inapplicable(String),
}

impl<T: Copy> Gated<T> {
    pub fn get(&self) -> Option<T> {
        match self {
            Gated::Applicable(v) => Some(*v),
            Gated::Inapplicable(_) => None,
        }
    }

    pub fn reason(&self) -> Option<&str> {
        match self {
            Gated::Applicable(_) => None,
            Gated::Inapplicable(r) => Some(r),
        }
    }

    fn and_then<U>(&self, f: impl FnOnce(T) -> Gated<U>) -> Gated<U> {
        match self {
            Gated::Applicable(v) => f(*v),
            Gated::Inapplicable(r) => Gated::Inapplicable(r.clone()),
        }
    }
}

impl<T> From<Result<T>> for Gated<T> {
    fn from(r: Result<T>) -> Self {
        match r {
            Ok(v) => Gated::Applicable(v),
            Err(Error::Inapplicable(why)) => Gated::Inapplicable(why),
            Err(e) => Gated::Inapplicable(e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerLBounds {
    pub l: u32,
    pub bargmann: f64,
    pub cms_sqrt: Gated<f64>,
    pub cms_linear: Gated<f64>,
    pub lower_limit: Gated<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub per_l: Vec<PerLBounds>,
    pub n0_upper: Gated<Bound>,
    pub l_plus: LBound,
    pub l_plusplus: Gated<LBound>,
    /// The L actually used in the total bound.
    pub total_upper_l: Option<LBound>,
    pub total_upper: Gated<Bound>,
    /// Set when some summand (2ℓ+1)(N₀⁺ − ℓ) with ℓ ≤ L is negative.
    pub total_upper_negative_summand: bool,
    pub neat_total: Gated<Bound>,
    /// The looser (N₀⁺ + 1)³/3.
    pub neat_total_loose: Gated<f64>,
    pub drastic_total: Gated<Bound>,
    pub lieb_total: f64,
    /// An estimate of the total, not a bound.
    pub asymptotic_total: f64,
}

impl BoundsReport {
    pub fn at(&self, l: u32) -> Option<&PerLBounds> {
        self.per_l.iter().find(|b| b.l == l)
    }

    /// Short tags for every bound that was not applied.
    pub fn flags(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(b) = self.at(0) {
            if b.cms_sqrt.get().is_none() {
                out.push("cms_inapplicable".to_string());
            }
            if b.lower_limit.get().is_none() {
                out.push("lower_inapplicable".to_string());
            }
        }
        let named: [(&str, bool); 5] = [
            ("n0_upper", self.n0_upper.get().is_none()),
            ("l_plusplus", self.l_plusplus.get().is_none()),
            ("total_upper", self.total_upper.get().is_none()),
            ("neat_total", self.neat_total.get().is_none()),
            ("drastic_total", self.drastic_total.get().is_none()),
        ];
        out.extend(named.iter().filter(|(_, off)| *off).map(|(n, _)| format!("{n}_inapplicable")));
        if self.l_plus == LBound::NoBinding {
            out.push("no_binding".to_string());
        }
        if self.total_upper_negative_summand {
            out.push("total_negative_summand".to_string());
        }
        out
    }
}

impl BoundsReport {
    /// Every applicable bound contradicted by an exact census.
    pub fn violations(&self, census: &LevelCensus) -> Vec<String> {
        let mut out = Vec::new();
        let mut upper = |name: &str, bound: Option<f64>, exact: usize| {
            if let Some(b) = bound {
                if b < exact as f64 {
                    out.push(format!("{name} = {b} < {exact}"));
                }
            }
        };
        for b in &self.per_l {
            let n = census.n_l(b.l);
            upper(&format!("bargmann[{}]", b.l), Some(b.bargmann), n);
            upper(&format!("cms_sqrt[{}]", b.l), b.cms_sqrt.get(), n);
            upper(&format!("cms_linear[{}]", b.l), b.cms_linear.get(), n);
        }
        upper("n0_upper", self.n0_upper.get().map(|b| b.value), census.s_wave());
        for (name, b) in [
            ("total_upper", &self.total_upper),
            ("neat_total", &self.neat_total),
            ("drastic_total", &self.drastic_total),
        ] {
            upper(name, b.get().map(|b| b.value), census.total);
        }
        upper("lieb_total", Some(self.lieb_total), census.total);
        for b in &self.per_l {
            if let Some(low) = b.lower_limit.get() {
                let n = census.n_l(b.l);
                if low >= n as f64 {
                    out.push(format!("lower_limit[{}] = {low} >= {n}", b.l));
                }
            }
        }
        if let Some(found) = census.l_max_found {
            let caps = [("l_plus", Some(self.l_plus)), ("l_plusplus", self.l_plusplus.get())];
            for (name, cap) in caps {
                match cap {
                    Some(LBound::Max(l)) if l >= found => {}
                    Some(cap) => out.push(format!("{name} = {cap} below l = {found}")),
                    None => {}
                }
            }
        }
        out
    }
}

pub fn bargmann(fx: &Functionals, l: u32) -> f64 {
    fx.moment_rv / (2 * l + 1) as f64
}

pub fn cms_upper(fx: &Functionals, l: u32) -> f64 {
    let l = l as f64;
    TWO_OVER_PI * fx.action + 1.0 - (1.0 + TWO_OVER_PI * TWO_OVER_PI * l * (l + 1.0)).sqrt()
}

pub fn cms_linear(fx: &Functionals, l: u32) -> f64 {
    TWO_OVER_PI * fx.action - TWO_OVER_PI * l as f64 + 1.0 - 1.0 / PI
}

fn depth_ratio_log(fx: &Functionals, pot: &RadialPotential) -> Result<f64> {
    if !fx.p_q_valid {
        return Err(Error::Inapplicable(
            "half-phase points p < q do not exist (action below pi)".into(),
        ));
    }
    let (vp, vq) = (pot.depth(fx.p), pot.depth(fx.q));
    if !(vp > 0.0 && vq > 0.0) {
        return Err(Error::Inapplicable("potential vanishes at a half-phase point".into()));
    }
    Ok((vp / vq).ln())
}

/// N_ℓ exceeds this value.
pub fn lower_limit(fx: &Functionals, pot: &RadialPotential, l: u32) -> Result<f64> {
    let ln_v = depth_ratio_log(fx, pot)?;
    let l = l as f64;
    Ok(fx.action / PI - ln_v / (4.0 * PI) - l / PI * (fx.q / fx.p).ln() - 1.5)
}

pub fn upper_n0(fx: &Functionals, pot: &RadialPotential) -> Result<f64> {
    let ln_v = depth_ratio_log(fx, pot)?;
    Ok(fx.action / PI + ln_v / (4.0 * PI) + 0.5)
}

pub fn l_plus(fx: &Functionals) -> LBound {
    LBound::from_real(fx.sigma - 0.5)
}

pub fn l_plusplus(n0_upper: f64) -> LBound {
    LBound::from_real(n0_upper - 1.0)
}

/// Σ_{ℓ≤L} (2ℓ+1)(N₀⁺ − ℓ) in closed form.
pub fn total_upper(n0_upper: f64, l: LBound) -> f64 {
    match l {
        LBound::NoBinding => 0.0,
        LBound::Max(l) => {
            let l = l as f64;
            n0_upper * (l + 1.0) * (l + 1.0) - l * (l + 1.0) * (4.0 * l + 5.0) / 6.0
        }
    }
}

pub fn neat_total(n0_upper: f64) -> f64 {
    n0_upper * (n0_upper + 1.0) * (2.0 * n0_upper + 1.0) / 6.0
}

pub fn neat_total_loose(n0_upper: f64) -> f64 {
    (n0_upper + 1.0).powi(3) / 3.0
}

pub fn drastic_total(fx: &Functionals, n0_upper: f64) -> f64 {
    let s = 2.0 * fx.sigma + 1.0;
    0.25 * s * s * n0_upper
}

pub fn lieb_total(fx: &Functionals) -> f64 {
    LIEB_CONSTANT * fx.lieb_moment
}

pub fn asymptotic_total(fx: &Functionals) -> f64 {
    2.0 / (3.0 * PI) * fx.lieb_moment
}

/// Computes functionals and classification, then every bound.
pub fn evaluate_potential(pot: &RadialPotential) -> Result<(Functionals, BoundsReport)> {
    let fx = compute_functionals(pot)?;
    let class = pot.classify()?;
    let report = evaluate(pot, &fx, &class);
    Ok((fx, report))
}

pub fn evaluate(pot: &RadialPotential, fx: &Functionals, class: &PotentialClassification) -> BoundsReport {
    let monotone = class.is_monotone_nondecreasing;
    let laplacian = class.laplacian_negative;
    fn not_monotone<T>() -> Gated<T> {
        Gated::Inapplicable("potential is not monotone non-decreasing".to_string())
    }
    let not_laplacian = || match class.violation_witness {
        Some(r) => format!("(rV)'' > 0 near r = {r:.6e}"),
        None => "(rV)'' <= 0 fails".to_string(),
    };

    let lp = l_plus(fx);
    let per_l = (0..=lp.value().unwrap_or(0))
        .map(|l| {
            let gate = |v: f64| if monotone { Gated::Applicable(v) } else { not_monotone() };
            PerLBounds {
                l,
                bargmann: bargmann(fx, l),
                cms_sqrt: gate(cms_upper(fx, l)),
                cms_linear: gate(cms_linear(fx, l)),
                lower_limit: if monotone { lower_limit(fx, pot, l).into() } else { not_monotone() },
            }
        })
        .collect();

    let n0: Gated<f64> = if monotone { upper_n0(fx, pot).into() } else { not_monotone() };
    let lpp = if laplacian { n0.and_then(|n| Gated::Applicable(l_plusplus(n))) } else { Gated::Inapplicable(not_laplacian()) };

    // The total bound sums N_ℓ ≤ N₀⁺ − ℓ, which is the ladder theorem.
    let (total, total_l, negative_summand) = match (n0.get(), &lpp) {
        (Some(n), Gated::Applicable(lpp)) => {
            let l = lp.min(*lpp);
            let neg = l.value().is_some_and(|l| l as f64 > n);
            (Gated::Applicable(Bound::new(total_upper(n, l))), Some(l), neg)
        }
        (_, gate) => (Gated::Inapplicable(gate.reason().unwrap_or_default().to_string()), None, false),
    };
    let neat = if laplacian { n0.and_then(|n| Gated::Applicable(Bound::new(neat_total(n)))) } else { Gated::Inapplicable(not_laplacian()) };
    let neat_loose = if laplacian { n0.and_then(|n| Gated::Applicable(neat_total_loose(n))) } else { Gated::Inapplicable(not_laplacian()) };

    BoundsReport {
        per_l,
        n0_upper: n0.and_then(|n| Gated::Applicable(Bound::new(n))),
        l_plus: lp,
        l_plusplus: lpp,
        total_upper_l: total_l,
        total_upper: total,
        total_upper_negative_summand: negative_summand,
        neat_total: neat,
        neat_total_loose: neat_loose,
        drastic_total: n0.and_then(|n| Gated::Applicable(Bound::new(drastic_total(fx, n)))),
        lieb_total: lieb_total(fx),
        asymptotic_total: asymptotic_total(fx),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn yukawa(g: f64) -> (RadialPotential, Functionals, BoundsReport) {
        let pot = RadialPotential::yukawa(g, 1.0).unwrap();
        let (fx, rep) = evaluate_potential(&pot).unwrap();
        (pot, fx, rep)
    }

    #[test]
    fn yukawa_g4_values() {
        let (pot, fx, rep) = yukawa(4.0);
        assert_relative_eq!(bargmann(&fx, 0), 16.0, max_relative = 1e-8);
        assert_relative_eq!(bargmann(&fx, 1), 16.0 / 3.0, max_relative = 1e-8);
        assert_relative_eq!(cms_upper(&fx, 0), TWO_OVER_PI * 10.026513098524, max_relative = 1e-8);
        assert_relative_eq!(cms_upper(&fx, 1), 6.0382, epsilon = 1e-3);
        assert_relative_eq!(lower_limit(&fx, &pot, 0).unwrap(), 1.221552377177, max_relative = 1e-7);
        assert_relative_eq!(lower_limit(&fx, &pot, 1).unwrap(), -0.0322515502, epsilon = 1e-7);
        assert_relative_eq!(rep.n0_upper.get().unwrap().value, 4.161524109246, max_relative = 1e-8);
        assert_eq!(rep.l_plus, LBound::Max(1));
        assert_eq!(rep.l_plusplus.get(), Some(LBound::Max(3)));
        assert_relative_eq!(rep.total_upper.get().unwrap().value, 13.646096437, max_relative = 1e-8);
        assert_eq!(rep.total_upper.get().unwrap().floor, 13);
        assert_relative_eq!(rep.neat_total.get().unwrap().value, 33.376212763, max_relative = 1e-8);
        assert_relative_eq!(rep.drastic_total.get().unwrap().value, 35.631775501, max_relative = 1e-8);
        assert_relative_eq!(rep.lieb_total, 45.013786844, max_relative = 1e-8);
        assert_relative_eq!(rep.asymptotic_total, 6.551592760, max_relative = 1e-8);
        assert!(!rep.total_upper_negative_summand);
        assert!(rep.flags().is_empty());
    }

    #[test]
    fn yukawa_g30_caps() {
        let (_, _, rep) = yukawa(30.0);
        assert_relative_eq!(rep.n0_upper.get().unwrap().value, 25.574109799, max_relative = 1e-7);
        assert_eq!(rep.l_plus, LBound::Max(17));
        assert_eq!(rep.l_plusplus.get(), Some(LBound::Max(24)));
        assert_relative_eq!(rep.total_upper.get().unwrap().value / 27000.0, 0.1690004287, max_relative = 1e-7);
    }

    #[test]
    fn square_well_closed_forms() {
        let pot = RadialPotential::square_well(4.0, 1.0).unwrap();
        let (fx, rep) = evaluate_potential(&pot).unwrap();
        assert_relative_eq!(lower_limit(&fx, &pot, 0).unwrap(), 4.0 / PI - 1.5, epsilon = 1e-9);
        assert_relative_eq!(rep.n0_upper.get().unwrap().value, 4.0 / PI + 0.5, epsilon = 1e-9);
        assert!(rep.l_plusplus.get().is_none());
        assert!(rep.total_upper.get().is_none());
        assert!(rep.neat_total.get().is_none());
        assert!(rep.drastic_total.get().is_some());
        assert!(rep.flags().contains(&"total_upper_inapplicable".to_string()));
    }

    #[test]
    fn null_potential() {
        let pot = RadialPotential::yukawa(0.0, 1.0).unwrap();
        let (fx, rep) = evaluate_potential(&pot).unwrap();
        assert_eq!(bargmann(&fx, 0), 0.0);
        assert_eq!(cms_upper(&fx, 0), 0.0);
        assert_eq!(rep.lieb_total, 0.0);
        assert_eq!(rep.asymptotic_total, 0.0);
        assert_eq!(rep.l_plus, LBound::NoBinding);
        assert!(rep.at(0).unwrap().lower_limit.get().is_none());
        assert!(matches!(lower_limit(&fx, &pot, 0), Err(Error::Inapplicable(_))));
    }

    #[test]
    fn trivial_identities() {
        assert_eq!(total_upper(3.7, LBound::Max(0)), 3.7);
        assert_eq!(total_upper(3.7, LBound::NoBinding), 0.0);
        assert_eq!(neat_total(1.0), 1.0);
        assert_eq!(l_plusplus(1.0), LBound::Max(0));
        let mut fx = Functionals::zero();
        fx.sigma = 0.3;
        assert_eq!(l_plus(&fx), LBound::NoBinding);
        fx.sigma = 0.5;
        assert_eq!(drastic_total(&fx, 1.0), 1.0);
        assert_eq!(l_plus(&fx), LBound::Max(0));
    }

    #[test]
    fn negative_summand_is_flagged() {
        // L = 5 with N₀⁺ = 3 puts negative terms in the sum.
        assert!(total_upper(3.0, LBound::Max(5)) < total_upper(3.0, LBound::Max(3)));
    }
}
