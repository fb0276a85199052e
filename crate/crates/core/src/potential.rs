//! Central potentials: built-in attractive families and tabulated profiles.
//!
//! Units follow ħ = 2m = 1, so the radial equation reads `u'' = [U(r) - E] u`
//! and potentials carry units of 1/length².

use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative tolerance for finite-difference classification of tables.
pub const TOL_CLASS_TABLE: f64 = 1e-4;
/// Default absolute tolerance on the last tabulated |V| for the zero tail.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Yukawa,
    Hulthen,
    SquareWell,
    Exponential,
    Tabulated,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Yukawa => "yukawa",
            Family::Hulthen => "hulthen",
            Family::SquareWell => "squarewell",
            Family::Exponential => "exponential",
            Family::Tabulated => "table",
        }
    }

    pub fn parse(name: &str) -> Option<Family> {
        match name.to_ascii_lowercase().as_str() {
            "yukawa" => Some(Family::Yukawa),
            "hulthen" | "hulthén" => Some(Family::Hulthen),
            "squarewell" | "square" | "square-well" | "square_well" => Some(Family::SquareWell),
            "exponential" | "exp" => Some(Family::Exponential),
            "table" | "tabulated" => Some(Family::Tabulated),
            _ => None,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A central potential V(r).
///
/// Built-in families are parameterised by a dimensionless strength `g`
/// (with V ∝ g²) and a range `R`. Tabulated profiles carry their samples.
#[derive(Debug, Clone)]
pub struct RadialPotential {
    family: Family,
    strength: f64,
    range: f64,
    table: Option<Arc<Table>>,
}

impl RadialPotential {
    pub fn new(family: Family, strength: f64, range: f64) -> Result<Self> {
        if family == Family::Tabulated {
            return Err(Error::InvalidPotential(
                "tabulated potentials are built from samples".into(),
            ));
        }
        if !(strength.is_finite() && strength >= 0.0) {
            return Err(Error::InvalidPotential(format!(
                "strength g must be finite and non-negative, got {strength}"
            )));
        }
        if !(range.is_finite() && range > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "range R must be finite and positive, got {range}"
            )));
        }
        Ok(Self {
            family,
            strength,
            range,
            table: None,
        })
    }

    pub fn yukawa(g: f64, range: f64) -> Result<Self> {
        Self::new(Family::Yukawa, g, range)
    }

    pub fn hulthen(g: f64, range: f64) -> Result<Self> {
        Self::new(Family::Hulthen, g, range)
    }

    pub fn square_well(g: f64, range: f64) -> Result<Self> {
        Self::new(Family::SquareWell, g, range)
    }

    pub fn exponential(g: f64, range: f64) -> Result<Self> {
        Self::new(Family::Exponential, g, range)
    }

    pub fn tabulated(table: Table) -> Self {
        Self {
            family: Family::Tabulated,
            strength: 1.0,
            range: 1.0,
            table: Some(Arc::new(table)),
        }
    }

    /// Samples a built-in family on `n` log-spaced radii in `[r_lo, r_hi]`.
    pub fn sample(&self, r_lo: f64, r_hi: f64, n: usize) -> Result<Table> {
        if n < 2 || !(r_lo > 0.0 && r_hi > r_lo) {
            return Err(Error::InvalidPotential(format!(
                "cannot sample on [{r_lo}, {r_hi}] with {n} points"
            )));
        }
        let step = (r_hi / r_lo).ln() / (n - 1) as f64;
        let points = (0..n)
            .map(|i| {
                let r = if i == n - 1 { r_hi } else { r_lo * (step * i as f64).exp() };
                (r, self.value(r))
            })
            .collect();
        Table::new(points, DEFAULT_TAIL_TOL)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    /// Strength g (1 for tables).
    pub fn strength(&self) -> f64 {
        self.strength
    }

    /// Range R (1 for tables).
    pub fn range(&self) -> f64 {
        self.range
    }

    pub fn table(&self) -> Option<&Table> {
        self.table.as_deref()
    }

    /// Length used to build radial grids.
    pub fn length_scale(&self) -> f64 {
        self.range
    }

    pub fn is_null(&self) -> bool {
        match &self.table {
            Some(t) => t.values.iter().all(|&v| v == 0.0),
            None => self.strength == 0.0,
        }
    }

    /// Returns a copy with every value multiplied by `lambda` (> 0).
    ///
    /// For families this rescales g by √λ, for tables it scales the samples.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(Error::InvalidPotential(format!(
                "scale factor must be positive, got {lambda}"
            )));
        }
        match &self.table {
            Some(t) => {
                let points = t.radii.iter().zip(&t.values).map(|(&r, &v)| (r, lambda * v)).collect();
                Ok(Self::tabulated(Table::new(points, t.tail_tol * lambda)?))
            }
            None => Self::new(self.family, self.strength * lambda.sqrt(), self.range),
        }
    }

    /// V(r), checked.
    pub fn evaluate(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::NonPositiveRadius(r));
        }
        if let Some(t) = &self.table {
            let last = *t.radii.last().unwrap();
            if r > last && !t.tail_ok() {
                return Err(Error::BeyondTable {
                    r,
                    last,
                    tail: t.values.last().unwrap().abs(),
                    tol: t.tail_tol,
                });
            }
        }
        Ok(self.value(r))
    }

    /// Negative part min(V(r), 0), checked.
    pub fn negative_part(&self, r: f64) -> Result<f64> {
        self.evaluate(r).map(|v| v.min(0.0))
    }

    /// Errors if the potential cannot be evaluated on all of (0, ∞).
    pub fn validate(&self) -> Result<()> {
        if let Some(t) = &self.table {
            if !t.tail_ok() {
                let last = *t.radii.last().unwrap();
                return Err(Error::BeyondTable {
                    r: last,
                    last,
                    tail: t.values.last().unwrap().abs(),
                    tol: t.tail_tol,
                });
            }
        }
        Ok(())
    }

    /// Unchecked V(r) for r > 0. Tables return 0 beyond the last sample.
    #[inline]
    pub(crate) fn value(&self, r: f64) -> f64 {
        let g2 = self.strength * self.strength;
        let a = self.range;
        match self.family {
            Family::Yukawa => -g2 / (r * a) * (-r / a).exp(),
            Family::Hulthen => {
                // e^{-x}/(1 - e^{-x}) = 1/expm1(x)
                -g2 / (a * a) / (r / a).exp_m1()
            }
            Family::SquareWell => {
                if r < a {
                    -g2 / (a * a)
                } else {
                    0.0
                }
            }
            Family::Exponential => -g2 / (a * a) * (-r / a).exp(),
            Family::Tabulated => self.table.as_ref().unwrap().interpolate(r),
        }
    }

    /// |V⁻(r)| = max(-V(r), 0).
    #[inline]
    pub(crate) fn depth(&self, r: f64) -> f64 {
        (-self.value(r)).max(0.0)
    }

    /// Left limit V(r⁻); differs from `value` only at discontinuities.
    pub(crate) fn value_left(&self, r: f64) -> f64 {
        match self.family {
            Family::SquareWell if r == self.range => {
                -self.strength * self.strength / (self.range * self.range)
            }
            _ => self.value(r),
        }
    }

    /// Radii where V or its derivative is not smooth.
    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self.family {
            Family::SquareWell => vec![self.range],
            Family::Tabulated => self.table.as_ref().unwrap().radii.clone(),
            _ => Vec::new(),
        }
    }

    /// Radius beyond which V vanishes identically, if any.
    pub(crate) fn support_end(&self) -> Option<f64> {
        match self.family {
            Family::SquareWell => Some(self.range),
            Family::Tabulated => self.table.as_ref().map(|t| *t.radii.last().unwrap()),
            _ if self.strength == 0.0 => Some(0.0),
            _ => None,
        }
    }

    /// Smallest radius (≥ `from`) with `scale · r · |V(r)| < tol` for all larger r.
    ///
    /// All supported profiles are eventually monotone in r|V|, so a
    /// geometric scan from the outer edge of the interesting region suffices.
    pub(crate) fn negligible_beyond(&self, from: f64, tol: f64) -> f64 {
        if let Some(end) = self.support_end() {
            return end.max(from);
        }
        let scale = self.length_scale();
        let mut r = from.max(scale);
        let mut steps = 0;
        while scale * r * self.depth(r) >= tol && steps < 4000 {
            r *= 1.05;
            steps += 1;
        }
        r
    }

    pub fn classify(&self) -> Result<PotentialClassification> {
        classify(self)
    }
}

impl fmt::Display for RadialPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.table {
            Some(t) => write!(f, "table[{} samples]", t.radii.len()),
            None => write!(f, "{}:g={},R={}", self.family, self.strength, self.range),
        }
    }
}

/// Ordered (r, V) samples with monotonicity-preserving cubic interpolation.
#[derive(Debug, Clone)]
pub struct Table {
    radii: Vec<f64>,
    values: Vec<f64>,
    slopes: Vec<f64>,
    /// Power-law exponent used below the first sample.
    head_exponent: f64,
    tail_tol: f64,
}

impl Table {
    pub fn new(points: Vec<(f64, f64)>, tail_tol: f64) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::TooFewSamples(points.len()));
        }
        let (radii, values): (Vec<f64>, Vec<f64>) = points.into_iter().unzip();
        if radii[0] <= 0.0 {
            return Err(Error::InvalidPotential("tabulated radii must be positive".into()));
        }
        if radii.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPotential(
                "tabulated radii must be strictly increasing".into(),
            ));
        }
        if radii.iter().chain(&values).any(|x| !x.is_finite()) {
            return Err(Error::InvalidPotential("non-finite tabulated sample".into()));
        }
        let slopes = pchip_slopes(&radii, &values);
        let head_exponent = {
            let (v0, v1) = (values[0], values[1]);
            if v0 != 0.0 && v0.signum() == v1.signum() {
                let k = (v1 / v0).ln() / (radii[1] / radii[0]).ln();
                k.clamp(-1.9, 0.0)
            } else {
                0.0
            }
        };
        Ok(Self {
            radii,
            values,
            slopes,
            head_exponent,
            tail_tol,
        })
    }

    /// Parses the two-column `r value` text format ('#' starts a comment).
    pub fn parse(text: &str, tail_tol: f64) -> Result<Self> {
        let mut points = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split_whitespace();
            let mut next = || -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::Spec(format!("line {}: expected two columns", lineno + 1)))?
                    .parse::<f64>()
                    .map_err(|e| Error::Spec(format!("line {}: {e}", lineno + 1)))
            };
            let r = next()?;
            let v = next()?;
            points.push((r, v));
        }
        Self::new(points, tail_tol)
    }

    pub fn from_file(path: impl AsRef<Path>, tail_tol: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text, tail_tol)
    }

    pub fn radii(&self) -> &[f64] {
        &self.radii
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.radii.len()
    }

    pub fn is_empty(&self) -> bool {
        self.radii.is_empty()
    }

    pub fn tail_tol(&self) -> f64 {
        self.tail_tol
    }

    fn tail_ok(&self) -> bool {
        self.values.last().unwrap().abs() <= self.tail_tol
    }

    fn interpolate(&self, r: f64) -> f64 {
        let n = self.radii.len();
        if r <= self.radii[0] {
            return self.values[0] * (r / self.radii[0]).powf(self.head_exponent);
        }
        if r > self.radii[n - 1] {
            return 0.0;
        }
        let i = match self.radii.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => return self.values[i],
            Err(i) => i - 1,
        };
        let h = self.radii[i + 1] - self.radii[i];
        let t = (r - self.radii[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.values[i]
            + h10 * h * self.slopes[i]
            + h01 * self.values[i + 1]
            + h11 * h * self.slopes[i + 1]
    }
}

/// Fritsch–Carlson slopes (the PCHIP recipe): shape preserving, no overshoot.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
    let mut d = vec![0.0; n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b <= 0.0 {
            d[k] = 0.0;
        } else {
            let w1 = 2.0 * h[k] + h[k - 1];
            let w2 = h[k] + 2.0 * h[k - 1];
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d[0] = pchip_end(h[0], h[1], delta[0], delta[1]);
    d[n - 1] = pchip_end(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn pchip_end(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Shape flags of a potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialClassification {
    pub is_monotone_nondecreasing: bool,
    pub is_everywhere_nonpositive: bool,
    /// (rV)'' ≤ 0 everywhere, distributional jumps included.
    pub laplacian_negative: bool,
    /// A radius where one of the criteria fails.
    pub violation_witness: Option<f64>,
}

pub fn classify(pot: &RadialPotential) -> Result<PotentialClassification> {
    if let Some(t) = pot.table() {
        return classify_table(t);
    }
    let all_good = PotentialClassification {
        is_monotone_nondecreasing: true,
        is_everywhere_nonpositive: true,
        laplacian_negative: true,
        violation_witness: None,
    };
    if pot.is_null() {
        return Ok(all_good);
    }
    let a = pot.range();
    Ok(match pot.family() {
        // (rV)'' = -(g²/R³) e^{-r/R} for Yukawa; Hulthén gives
        // -(g²/R³) f''(r/R) with f(x) = x/(eˣ - 1) convex.
        Family::Yukawa | Family::Hulthen => all_good,
        // (rV)'' = (g²/R³)(2 - r/R) e^{-r/R} > 0 on (0, 2R).
        Family::Exponential => PotentialClassification {
            laplacian_negative: false,
            violation_witness: Some(a),
            ..all_good
        },
        // (rV)' jumps from -g²/R² to 0 at r = R.
        Family::SquareWell => PotentialClassification {
            laplacian_negative: false,
            violation_witness: Some(a),
            ..all_good
        },
        Family::Tabulated => unreachable!(),
    })
}

fn classify_table(t: &Table) -> Result<PotentialClassification> {
    let n = t.radii.len();
    if n < 4 {
        return Err(Error::TooFewSamples(n));
    }
    let r = &t.radii;
    let v = &t.values;
    let vscale = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let tol = TOL_CLASS_TABLE;
    let mut witness = None;

    let mut monotone = true;
    for i in 0..n - 1 {
        if v[i + 1] - v[i] < -tol * vscale {
            monotone = false;
            witness.get_or_insert(r[i]);
            break;
        }
    }
    let mut nonpositive = true;
    if let Some(i) = v.iter().position(|&x| x > tol * vscale) {
        nonpositive = false;
        witness.get_or_insert(r[i]);
    }

    // Chord slopes of rV; any increase is a positive (distributional)
    // second derivative.
    let f: Vec<f64> = r.iter().zip(v).map(|(r, v)| r * v).collect();
    let slopes: Vec<f64> = (0..n - 1).map(|i| (f[i + 1] - f[i]) / (r[i + 1] - r[i])).collect();
    let sscale = slopes.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let mut worst: Option<(f64, f64)> = None;
    for i in 1..slopes.len() {
        let jump = slopes[i] - slopes[i - 1];
        if jump > tol * sscale && worst.is_none_or(|(w, _)| jump > w) {
            worst = Some((jump, r[i]));
        }
    }
    let laplacian_negative = worst.is_none();
    if let Some((_, at)) = worst {
        witness.get_or_insert(at);
    }

    Ok(PotentialClassification {
        is_monotone_nondecreasing: monotone,
        is_everywhere_nonpositive: nonpositive,
        laplacian_negative,
        violation_witness: witness,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn family_formulas() {
        let y = RadialPotential::yukawa(1.0, 1.0).unwrap();
        assert_relative_eq!(y.evaluate(1.0).unwrap(), -(-1.0_f64).exp(), max_relative = 1e-15);
        let sw = RadialPotential::square_well(2.0, 1.0).unwrap();
        assert_eq!(sw.evaluate(0.5).unwrap(), -4.0);
        assert_eq!(sw.evaluate(1.5).unwrap(), 0.0);
        assert_eq!(sw.negative_part(1.5).unwrap(), 0.0);
    }

    #[test]
    fn hulthen_coulomb_origin() {
        let h = RadialPotential::hulthen(2.0, 1.0).unwrap();
        // e^{-r}/(1-e^{-r}) = 1/r - 1/2 + r/12 + ...
        for &r in &[1e-3, 1e-5, 1e-7] {
            let v = h.evaluate(r).unwrap();
            assert!((v + 4.0 / r - 2.0).abs() < 1e-2, "r={r} v={v}");
        }
    }

    #[test]
    fn rejects_non_positive_radius() {
        let y = RadialPotential::yukawa(1.0, 1.0).unwrap();
        assert!(matches!(y.evaluate(0.0), Err(Error::NonPositiveRadius(_))));
        assert!(matches!(y.evaluate(-1.0), Err(Error::NonPositiveRadius(_))));
    }

    #[test]
    fn table_tail_policy() {
        let pts = vec![(0.1, -3.0), (0.5, -2.0), (1.0, -1.0), (2.0, -0.5)];
        let t = Table::new(pts.clone(), 1e-8).unwrap();
        let pot = RadialPotential::tabulated(t);
        assert!(matches!(pot.evaluate(3.0), Err(Error::BeyondTable { .. })));
        assert!(pot.evaluate(1.5).is_ok());
        let t = Table::new(pts, 1.0).unwrap();
        assert_eq!(RadialPotential::tabulated(t).evaluate(3.0).unwrap(), 0.0);
    }

    #[test]
    fn pchip_has_no_overshoot() {
        let pts = vec![(0.1, -5.0), (0.2, -5.0), (0.3, -1.0), (0.4, 0.0), (0.5, 0.0)];
        let pot = RadialPotential::tabulated(Table::new(pts, 1e-8).unwrap());
        let mut prev = f64::NEG_INFINITY;
        for i in 0..=400 {
            let r = 0.1 + 0.4 * i as f64 / 400.0;
            let v = pot.value(r);
            assert!((-5.0 - 1e-12..=1e-12).contains(&v), "r={r} v={v}");
            assert!(v >= prev - 1e-12);
            prev = v;
        }
    }

    #[test]
    fn parse_two_column_text() {
        let text = "# r V\n0.1 -2\n0.2 -1.5 # inline\n\n0.4 -0.5\n0.8 0\n";
        let t = Table::parse(text, 1e-8).unwrap();
        assert_eq!(t.radii(), &[0.1, 0.2, 0.4, 0.8]);
        assert!(Table::parse("0.1 -1\n0.1 -2\n", 1e-8).is_err());
        assert!(Table::parse("0.1\n", 1e-8).is_err());
    }

    #[test]
    fn classify_families() {
        let c = RadialPotential::yukawa(3.0, 2.0).unwrap().classify().unwrap();
        assert!(c.is_monotone_nondecreasing && c.is_everywhere_nonpositive && c.laplacian_negative);
        let c = RadialPotential::hulthen(3.0, 1.0).unwrap().classify().unwrap();
        assert!(c.laplacian_negative);
        let c = RadialPotential::exponential(2.0, 1.0).unwrap().classify().unwrap();
        assert!(!c.laplacian_negative);
        assert!(c.violation_witness.unwrap() < 2.0);
        let c = RadialPotential::square_well(2.0, 1.0).unwrap().classify().unwrap();
        assert!(!c.laplacian_negative && c.is_monotone_nondecreasing);
        assert_eq!(c.violation_witness, Some(1.0));
    }

    #[test]
    fn classify_table_needs_four_samples() {
        let t = Table::new(vec![(0.1, -1.0), (0.2, -0.5), (0.3, 0.0)], 1e-8).unwrap();
        assert!(matches!(classify_table(&t), Err(Error::TooFewSamples(3))));
    }

    #[test]
    fn hulthen_rv_is_concave() {
        // f(x) = x/(e^x - 1): second differences of -f must be negative.
        let h = RadialPotential::hulthen(1.0, 1.0).unwrap();
        let f = |r: f64| r * h.value(r);
        let d = 1e-3;
        for i in 1..2000 {
            let r = i as f64 * 0.01;
            assert!(f(r + d) - 2.0 * f(r) + f(r - d) < 0.0, "r={r}");
        }
    }
}
