//! Potential spec strings, parameter sweeps and persisted reports.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundsReport, LBound};
use crate::counter::{census_with, CounterConfig, LevelCensus};
use crate::error::{Error, Result};
use crate::potential::{Family, RadialPotential, Table, DEFAULT_TAIL_TOL};
use crate::quadrature::{compute_functionals_with, QuadratureConfig};
use crate::susy::verify_suite;

/// Number of per-ℓ count columns in the CSV.
pub const CSV_L_COLUMNS: u32 = 9;

pub const CSV_FILE: &str = "sweep.csv";
pub const JSON_FILE: &str = "sweep.json";

/// Every bound a sweep can evaluate, by column name.
pub const BOUND_NAMES: [&str; 11] = [
    "bargmann_0",
    "cms_0",
    "lower_0",
    "n0_upper",
    "l_plus",
    "l_plusplus",
    "total_upper",
    "neat_total",
    "drastic_total",
    "lieb_total",
    "asymptotic_total",
];

/// Parses `family:key=value,...` or `table:PATH`.
///
/// Keys are `g` (or `g2` for g²) and `R`; `R` defaults to 1.
pub fn parse_potential_spec(spec: &str) -> Result<RadialPotential> {
    let (head, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Spec(format!("expected family:key=value, got {spec:?}")))?;
    let family = Family::parse(head.trim()).ok_or_else(|| Error::Spec(format!("unknown family {head:?}")))?;
    if family == Family::Tabulated {
        return Ok(RadialPotential::tabulated(Table::from_file(rest.trim(), DEFAULT_TAIL_TOL)?));
    }
    let (mut g, mut range) = (None, 1.0);
    for pair in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (k, v) = pair
            .split_once('=')
            .ok_or_else(|| Error::Spec(format!("expected key=value, got {pair:?}")))?;
        let v: f64 = v.trim().parse().map_err(|_| Error::Spec(format!("not a number: {v:?}")))?;
        match k.trim() {
            "g" => g = Some(v),
            "g2" | "g^2" => {
                if v < 0.0 {
                    return Err(Error::Spec(format!("g2 must be non-negative, got {v}")));
                }
                g = Some(v.sqrt())
            }
            "R" | "r" | "range" => range = v,
            other => return Err(Error::Spec(format!("unknown key {other:?}"))),
        }
    }
    let g = g.ok_or_else(|| Error::Spec(format!("missing strength g in {spec:?}")))?;
    RadialPotential::new(family, g, range)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepConfig {
    pub family: Family,
    pub range: f64,
    pub g_min: f64,
    pub g_max: f64,
    pub steps: usize,
    pub spacing: Spacing,
    /// Explicit strengths; overrides the min/max/steps grid.
    pub points: Option<Vec<f64>>,
    /// Bound columns to fill; `None` means all of them.
    pub bounds: Option<Vec<String>>,
    pub census: bool,
    pub susy: bool,
    pub output_dir: Option<PathBuf>,
    pub quadrature: QuadratureConfig,
    pub counter: CounterConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            family: Family::Yukawa,
            range: 1.0,
            g_min: 1.0,
            g_max: 6.0,
            steps: 11,
            spacing: Spacing::Linear,
            points: None,
            bounds: None,
            census: true,
            susy: false,
            output_dir: None,
            quadrature: QuadratureConfig::default(),
            counter: CounterConfig::default(),
        }
    }
}

impl SweepConfig {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.family == Family::Tabulated {
            return Err(Error::Config("sweeps need a parametric family".into()));
        }
        if !(self.range > 0.0 && self.range.is_finite()) {
            return Err(Error::Config(format!("range must be positive, got {}", self.range)));
        }
        match &self.points {
            Some(p) if p.is_empty() => return Err(Error::Config("points is empty".into())),
            Some(p) if p.iter().any(|g| !(g.is_finite() && *g >= 0.0)) => {
                return Err(Error::Config("points must be finite and non-negative".into()))
            }
            Some(_) => {}
            None => {
                if self.steps == 0 {
                    return Err(Error::Config("steps must be at least 1".into()));
                }
                if !(self.g_min <= self.g_max && self.g_min >= 0.0 && self.g_max.is_finite()) {
                    return Err(Error::Config(format!("need 0 <= g_min <= g_max, got {} and {}", self.g_min, self.g_max)));
                }
                if self.spacing == Spacing::Log && self.g_min <= 0.0 {
                    return Err(Error::Config("log spacing needs g_min > 0".into()));
                }
            }
        }
        for name in self.bounds.iter().flatten() {
            if !BOUND_NAMES.contains(&name.as_str()) {
                return Err(Error::Config(format!("unknown bound {name:?}")));
            }
        }
        Ok(())
    }

    pub fn strengths(&self) -> Vec<f64> {
        if let Some(p) = &self.points {
            return p.clone();
        }
        if self.steps == 1 {
            return vec![self.g_min];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let t = i as f64 / n;
                match self.spacing {
                    Spacing::Linear => self.g_min + t * (self.g_max - self.g_min),
                    Spacing::Log => self.g_min * (self.g_max / self.g_min).powf(t),
                }
            })
            .collect()
    }

    fn wants(&self, bound: &str) -> bool {
        self.bounds.as_ref().is_none_or(|b| b.iter().any(|n| n == bound))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusyCheck {
    pub passed: bool,
    pub rungs: usize,
    pub ladder_checked: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub family: Family,
    pub g: f64,
    pub range: f64,
    /// N_ℓ for ℓ = 0, 1, ... up to the last bound ℓ.
    pub counts: Option<Vec<usize>>,
    pub total_n: Option<usize>,
    pub bargmann_0: Option<f64>,
    pub cms_0: Option<f64>,
    pub lower_0: Option<f64>,
    pub n0_upper: Option<f64>,
    pub l_plus: Option<LBound>,
    pub l_plusplus: Option<LBound>,
    pub total_upper: Option<f64>,
    pub neat_total: Option<f64>,
    pub drastic_total: Option<f64>,
    pub lieb_total: Option<f64>,
    pub asymptotic_total: Option<f64>,
    pub flags: Vec<String>,
    /// Bounds contradicted by the census; empty when sound.
    pub violations: Vec<String>,
    pub susy: Option<SusyCheck>,
    pub error: Option<String>,
    pub elapsed_ms: f64,
}

impl SweepRow {
    fn empty(index: usize, family: Family, g: f64, range: f64) -> Self {
        Self {
            index,
            family,
            g,
            range,
            counts: None,
            total_n: None,
            bargmann_0: None,
            cms_0: None,
            lower_0: None,
            n0_upper: None,
            l_plus: None,
            l_plusplus: None,
            total_upper: None,
            neat_total: None,
            drastic_total: None,
            lieb_total: None,
            asymptotic_total: None,
            flags: Vec::new(),
            violations: Vec::new(),
            susy: None,
            error: None,
            elapsed_ms: 0.0,
        }
    }

    pub fn n_l(&self, l: usize) -> Option<usize> {
        self.counts.as_ref().map(|c| c.get(l).copied().unwrap_or(0))
    }

    /// Real-valued column by name.
    pub fn value(&self, name: &str) -> Option<f64> {
        match name {
            "bargmann_0" => self.bargmann_0,
            "cms_0" => self.cms_0,
            "lower_0" => self.lower_0,
            "n0_upper" => self.n0_upper,
            "total_upper" => self.total_upper,
            "neat_total" => self.neat_total,
            "drastic_total" => self.drastic_total,
            "lieb_total" => self.lieb_total,
            "asymptotic_total" => self.asymptotic_total,
            _ => None,
        }
    }

    fn fill_bounds(&mut self, rep: &BoundsReport, cfg: &SweepConfig) {
        let pick = |name: &str, v: Option<f64>| if cfg.wants(name) { v } else { None };
        let zero = rep.at(0);
        self.bargmann_0 = pick("bargmann_0", zero.map(|b| b.bargmann));
        self.cms_0 = pick("cms_0", zero.and_then(|b| b.cms_sqrt.get()));
        self.lower_0 = pick("lower_0", zero.and_then(|b| b.lower_limit.get()));
        self.n0_upper = pick("n0_upper", rep.n0_upper.get().map(|b| b.value));
        self.l_plus = cfg.wants("l_plus").then_some(rep.l_plus);
        self.l_plusplus = if cfg.wants("l_plusplus") { rep.l_plusplus.get() } else { None };
        self.total_upper = pick("total_upper", rep.total_upper.get().map(|b| b.value));
        self.neat_total = pick("neat_total", rep.neat_total.get().map(|b| b.value));
        self.drastic_total = pick("drastic_total", rep.drastic_total.get().map(|b| b.value));
        self.lieb_total = pick("lieb_total", Some(rep.lieb_total));
        self.asymptotic_total = pick("asymptotic_total", Some(rep.asymptotic_total));
        if cfg.bounds.as_ref().is_none_or(|b| !b.is_empty()) {
            self.flags.extend(rep.flags());
        }
    }

    fn fill_census(&mut self, census: &LevelCensus) {
        let top = census.l_max_found.map_or(0, |l| l + 1);
        self.counts = Some((0..top).map(|l| census.n_l(l)).collect());
        self.total_n = Some(census.total);
        if census.threshold_sensitive {
            self.flags.push("threshold".into());
        }
    }
}

fn evaluate_point(index: usize, g: f64, cfg: &SweepConfig) -> SweepRow {
    let start = Instant::now();
    let mut row = SweepRow::empty(index, cfg.family, g, cfg.range);
    if let Err(e) = fill_row(&mut row, cfg) {
        row.error = Some(e.to_string());
        row.flags.push("error".into());
    }
    row.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    row
}

fn fill_row(row: &mut SweepRow, cfg: &SweepConfig) -> Result<()> {
    let pot = RadialPotential::new(cfg.family, row.g, cfg.range)?;
    let fx = compute_functionals_with(&pot, &cfg.quadrature)?;
    let report = bounds::evaluate(&pot, &fx, &pot.classify()?);
    row.fill_bounds(&report, cfg);
    if cfg.census {
        let census = census_with(&pot, &cfg.counter)?;
        row.fill_census(&census);
        row.violations = report.violations(&census);
        if !row.violations.is_empty() {
            row.flags.push("unsound".into());
        }
    }
    if cfg.susy {
        let suite = verify_suite(&pot, &cfg.counter)?;
        if !suite.passed {
            row.flags.push("susy_failed".into());
        }
        row.susy = Some(SusyCheck {
            passed: suite.passed,
            rungs: suite.rungs.len(),
            ladder_checked: suite.ladder.is_some(),
        });
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
}

/// Runs every sweep point (concurrently) and writes the report if an
/// output directory is configured. Failures are recorded per row.
pub fn run_sweep(cfg: &SweepConfig) -> Result<SweepReport> {
    cfg.validate()?;
    let rows: Vec<SweepRow> = cfg
        .strengths()
        .into_par_iter()
        .enumerate()
        .map(|(i, g)| evaluate_point(i, g, cfg))
        .collect();
    let report = SweepReport {
        config: cfg.clone(),
        rows,
    };
    if let Some(dir) = &cfg.output_dir {
        write_report(&report, dir)?;
    }
    Ok(report)
}

fn csv_header() -> Vec<String> {
    let mut h: Vec<String> = ["family", "g", "R"].map(String::from).into();
    h.extend((0..CSV_L_COLUMNS).map(|l| format!("N_{l}")));
    h.push("total_N".into());
    h.extend(BOUND_NAMES.map(String::from));
    h.push("flags".into());
    h
}

fn fmt_f(v: Option<f64>) -> String {
    v.map_or_else(String::new, |v| format!("{v:.11e}"))
}

fn fmt_l(v: Option<LBound>) -> String {
    v.map_or_else(String::new, |v| v.to_string())
}

fn csv_record(row: &SweepRow) -> Vec<String> {
    let mut rec = vec![row.family.to_string(), fmt_f(Some(row.g)), fmt_f(Some(row.range))];
    rec.extend((0..CSV_L_COLUMNS as usize).map(|l| row.n_l(l).map_or_else(String::new, |n| n.to_string())));
    rec.push(row.total_n.map_or_else(String::new, |n| n.to_string()));
    for name in BOUND_NAMES {
        rec.push(match name {
            "l_plus" => fmt_l(row.l_plus),
            "l_plusplus" => fmt_l(row.l_plusplus),
            _ => fmt_f(row.value(name)),
        });
    }
    rec.push(row.flags.join(";"));
    rec
}

/// CSV bytes for a set of rows; identical rows give identical bytes.
pub fn to_csv(rows: &[SweepRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(csv_header())?;
    for row in rows {
        w.write_record(csv_record(row))?;
    }
    w.into_inner().map_err(|e| Error::Report(e.to_string()))
}

pub fn write_report(report: &SweepReport, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join(CSV_FILE), to_csv(&report.rows)?)?;
    fs::write(dir.join(JSON_FILE), serde_json::to_string_pretty(report)?)?;
    Ok(())
}

pub fn read_report(dir: &Path) -> Result<SweepReport> {
    let path = dir.join(JSON_FILE);
    let text = fs::read_to_string(&path).map_err(|e| Error::Report(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::Report(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicCoefficient {
    pub bound: String,
    pub g: f64,
    /// value/g³ at the largest g
    pub coefficient: f64,
    /// (g, value/g³) in increasing g.
    pub trend: Vec<(f64, f64)>,
    pub monotone_decreasing: bool,
}

/// value/g³ at the largest g, plus the trend over the sweep.
pub fn cubic_coefficient(rows: &[SweepRow], bound: &str) -> Result<CubicCoefficient> {
    let trend: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.g > 0.0)
        .filter_map(|r| r.value(bound).map(|v| (r.g, v / r.g.powi(3))))
        .collect();
    if trend.len() < 3 {
        return Err(Error::Report(format!("{bound}: need at least 3 rows with values, got {}", trend.len())));
    }
    if trend.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::Report("rows must have strictly increasing g".into()));
    }
    let &(g, coefficient) = trend.last().unwrap();
    Ok(CubicCoefficient {
        bound: bound.to_string(),
        g,
        coefficient,
        monotone_decreasing: trend.windows(2).all(|w| w[1].1 <= w[0].1),
        trend,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Crossover {
    /// Smallest g where the total bound is strictly the least of the three.
    pub first_g: Option<f64>,
    /// Smallest g from which the total bound stays strictly the least.
    pub minimal_from: Option<f64>,
    /// For Yukawa sweeps: whether the total bound wins at every g ≥ 2.
    pub yukawa_claim_holds: Option<bool>,
    /// (g, total_upper, drastic_total, lieb_total) per row.
    pub points: Vec<(f64, f64, f64, f64)>,
}

pub fn crossover_check(rows: &[SweepRow]) -> Result<Crossover> {
    let mut points = Vec::with_capacity(rows.len());
    for r in rows {
        match (r.total_upper, r.drastic_total, r.lieb_total) {
            (Some(t), Some(d), Some(l)) => points.push((r.g, t, d, l)),
            _ => {
                return Err(Error::Report(format!(
                    "row g = {} lacks total_upper, drastic_total or lieb_total",
                    r.g
                )))
            }
        }
    }
    points.sort_by(|a, b| a.0.total_cmp(&b.0));
    let wins = |p: &(f64, f64, f64, f64)| p.1 < p.2 && p.1 < p.3;
    let first_g = points.iter().find(|p| wins(p)).map(|p| p.0);
    let minimal_from = points
        .iter()
        .rposition(|p| !wins(p))
        .map_or(points.first().map(|p| p.0), |i| points.get(i + 1).map(|p| p.0));
    let yukawa = rows.iter().all(|r| r.family == Family::Yukawa);
    Ok(Crossover {
        first_g,
        minimal_from,
        yukawa_claim_holds: yukawa.then(|| points.iter().filter(|p| p.0 >= 2.0).all(wins)),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_strings() {
        let p = parse_potential_spec("yukawa:g=4,R=2").unwrap();
        assert_eq!((p.family(), p.strength(), p.range()), (Family::Yukawa, 4.0, 2.0));
        let p = parse_potential_spec("hulthen:g2=6.25").unwrap();
        assert_eq!(p.strength(), 2.5);
        assert_eq!(parse_potential_spec("squarewell:g=3").unwrap().range(), 1.0);
        for bad in ["yukawa", "foo:g=1", "yukawa:R=1", "yukawa:g=x", "yukawa:h=1", "yukawa:g=1,R=-1"] {
            assert!(parse_potential_spec(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn strength_grids() {
        let cfg = SweepConfig::default();
        let g = cfg.strengths();
        assert_eq!(g.len(), 11);
        assert_eq!((g[0], g[6], g[10]), (1.0, 4.0, 6.0));
        let log = SweepConfig {
            g_min: 1.0,
            g_max: 100.0,
            steps: 3,
            spacing: Spacing::Log,
            ..Default::default()
        };
        let g = log.strengths();
        assert!((g[1] - 10.0).abs() < 1e-12 && (g[2] - 100.0).abs() < 1e-9);
    }

    #[test]
    fn config_validation() {
        let bad = [
            SweepConfig { steps: 0, ..Default::default() },
            SweepConfig { g_min: 3.0, g_max: 2.0, ..Default::default() },
            SweepConfig { bounds: Some(vec!["nope".into()]), ..Default::default() },
            SweepConfig { family: Family::Tabulated, ..Default::default() },
        ];
        for cfg in bad {
            assert!(matches!(cfg.validate(), Err(Error::Config(_))));
        }
        let parsed: SweepConfig = serde_json::from_str(r#"{"g_min": 2, "g_max": 3, "steps": 2}"#).unwrap();
        assert_eq!(parsed.strengths(), vec![2.0, 3.0]);
        assert!(serde_json::from_str::<SweepConfig>(r#"{"gmin": 2}"#).is_err());
    }

    #[test]
    fn crossover_needs_columns() {
        let row = SweepRow::empty(0, Family::Yukawa, 2.0, 1.0);
        assert!(crossover_check(&[row]).is_err());
    }

    #[test]
    fn cubic_needs_three_rows() {
        let mut row = SweepRow::empty(0, Family::Yukawa, 2.0, 1.0);
        row.lieb_total = Some(1.0);
        assert!(cubic_coefficient(&[row.clone(), row], "lieb_total").is_err());
    }
}
