//! End-to-end acceptance criteria. Prints one PASS/FAIL line per criterion.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use nbound::bounds::evaluate_potential;
use nbound::counter::{count_states, solve_levels, EffectivePotential};
use nbound::harness::{crossover_check, run_sweep, SweepConfig};
use nbound::susy::verify_suite;
use nbound::{census, compute_functionals, CounterConfig, Family, RadialPotential};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome, Duration);

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn yukawa(g: f64) -> RadialPotential {
    RadialPotential::yukawa(g, 1.0).unwrap()
}

/// Leading g³ coefficients of each total bound, each to ±0.001.
fn cubic_coefficients() -> Outcome {
    let expected = [
        ("asymptotic", 0.102),
        ("lieb", 0.703),
        ("drastic", 0.294),
        ("new", 0.145),
        ("neat", 0.169),
    ];
    let mut notes = Vec::new();
    for g in [1.0, 10.0, 100.0] {
        let fx = compute_functionals(&yukawa(g)).map_err(|e| e.to_string())?;
        let a = fx.action / (PI * g);
        let s = fx.sigma / g;
        let got = [
            2.0 / (3.0 * PI) * fx.lieb_moment / g.powi(3),
            1.458 * fx.lieb_moment / g.powi(3),
            s * s * a,
            a * s * s - 2.0 / 3.0 * s.powi(3),
            a.powi(3) / 3.0,
        ];
        for ((name, want), v) in expected.iter().zip(got) {
            if (v - want).abs() > 1e-3 {
                return Err(format!("{name} coefficient {v:.5} at g = {g}, expected {want}"));
            }
            if g == 100.0 {
                notes.push(format!("{name} {v:.5}"));
            }
        }
    }
    Ok(notes.join(", "))
}

/// value/g³ at g = 100 within 12% above the coefficient, decreasing over g = 10, 30, 100.
fn finite_g_convergence() -> Outcome {
    let coeffs = [("drastic_total", 0.294), ("total_upper", 0.145), ("neat_total", 0.169)];
    let mut series = vec![Vec::new(); 3];
    for g in [10.0, 30.0, 100.0] {
        let (_, rep) = evaluate_potential(&yukawa(g)).map_err(|e| e.to_string())?;
        let vals = [rep.drastic_total.get(), rep.total_upper.get(), rep.neat_total.get()];
        for (s, v) in series.iter_mut().zip(vals) {
            s.push(v.ok_or("bound inapplicable")?.value / g.powi(3));
        }
    }
    let mut notes = Vec::new();
    for ((name, c), s) in coeffs.iter().zip(&series) {
        let ratio = s[2] / c;
        if !(1.0..=1.12).contains(&ratio) {
            return Err(format!("{name}/g^3 = {:.5} at g = 100 is {ratio:.4} x {c}", s[2]));
        }
        if !(s[0] > s[1] && s[1] > s[2]) {
            return Err(format!("{name}/g^3 not decreasing: {s:?}"));
        }
        notes.push(format!("{name} {:.4}", s[2]));
    }
    Ok(notes.join(", "))
}

/// Hulthén counts and levels, square-well counts.
fn census_vs_oracles() -> Outcome {
    for g in [1.5_f64, 2.5, 3.5, 5.2] {
        let pot = RadialPotential::hulthen(g, 1.0).unwrap();
        let eff = EffectivePotential::centrifugal(&pot, 0);
        let n = count_states(&eff).map_err(|e| e.to_string())?.count;
        let want = g.ceil() as usize - 1;
        if n != want {
            return Err(format!("Hulthén g = {g}: N0 = {n}, expected {want}"));
        }
        let levels = solve_levels(&eff, n).map_err(|e| e.to_string())?;
        for (i, e) in levels.iter().enumerate() {
            let k = (i + 1) as f64;
            let exact = -((g * g - k * k) / (2.0 * k)).powi(2);
            if ((e - exact) / exact).abs() > 1e-8 {
                return Err(format!("Hulthén g = {g} level {}: {e} vs {exact}", i + 1));
            }
        }
    }
    let wells = [1.0, 2.0, 3.0, 4.0, 5.5, 7.0, 9.0, 12.0, 15.0, 19.5];
    for g in wells {
        let pot = RadialPotential::square_well(g, 1.0).unwrap();
        let n = count_states(&EffectivePotential::centrifugal(&pot, 0)).map_err(|e| e.to_string())?.count;
        let want = (g / PI + 0.5).floor() as usize;
        if n != want {
            return Err(format!("square well g = {g}: N0 = {n}, expected {want}"));
        }
    }
    Ok("4 Hulthén strengths, 10 square wells".into())
}

/// The total bound beats the drastic and Lieb bounds for g ≥ 2; one s-state at g = 1.9.
fn crossover() -> Outcome {
    let cfg = SweepConfig {
        points: Some(vec![2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 30.0, 100.0]),
        census: false,
        ..Default::default()
    };
    let rep = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let cx = crossover_check(&rep.rows).map_err(|e| e.to_string())?;
    if cx.minimal_from != Some(2.0) {
        return Err(format!("total bound minimal only from g = {:?}", cx.minimal_from));
    }
    let n0 = count_states(&EffectivePotential::centrifugal(&yukawa(1.9), 0)).map_err(|e| e.to_string())?.count;
    check(n0 == 1, format!("minimal for all g >= 2.0, N0(g=1.9) = {n0}"))
}

/// SUSY partner, log-convexity, domination and the ladder for Yukawa.
fn susy_ladder() -> Outcome {
    let cfg = CounterConfig::default();
    let mut rungs = 0;
    for g2 in [5.0_f64, 16.0, 30.0, 60.0] {
        let rep = verify_suite(&yukawa(g2.sqrt()), &cfg).map_err(|e| format!("g2 = {g2}: {e}"))?;
        for r in &rep.rungs {
            if !r.passed() {
                return Err(format!(
                    "g2 = {g2}, l = {}: riccati {:.2e}, log-convexity {:.2e}, dominated {}, partner residual {:.2e}, count ok {}",
                    r.l, r.riccati_residual, r.log_convexity_min, r.dominated, r.spectrum.max_residual, r.spectrum.count_matches
                ));
            }
        }
        match &rep.ladder {
            Some(l) if l.holds => {}
            other => return Err(format!("g2 = {g2}: ladder {other:?}")),
        }
        rungs += rep.rungs.len();
    }
    Ok(format!("{rungs} rungs verified"))
}

/// Every applicable bound respects the exact census.
fn soundness() -> Outcome {
    let matrix: [(Family, Vec<f64>); 4] = [
        (Family::Yukawa, [2.0_f64, 4.0, 8.0, 16.0, 30.0, 60.0].map(f64::sqrt).to_vec()),
        (Family::SquareWell, vec![1.0, 2.0, 3.0, 4.0, 6.0, 8.0]),
        (Family::Hulthen, vec![1.2, 1.5, 2.5, 3.5, 5.2, 7.3]),
        (Family::Exponential, vec![1.0, 2.0, 3.0, 5.0, 7.0, 10.0]),
    ];
    let mut points = 0;
    for (family, g) in matrix {
        let cfg = SweepConfig {
            family,
            points: Some(g),
            ..Default::default()
        };
        let rep = run_sweep(&cfg).map_err(|e| e.to_string())?;
        for row in &rep.rows {
            if let Some(e) = &row.error {
                return Err(format!("{family} g = {}: {e}", row.g));
            }
            if !row.violations.is_empty() {
                return Err(format!("{family} g = {}: {:?}", row.g, row.violations));
            }
        }
        points += rep.rows.len();
    }
    Ok(format!("{points} points, 0 violations"))
}

/// N0·π/action at strong coupling.
fn strong_coupling() -> Outcome {
    let pot = yukawa(30.0);
    let fx = compute_functionals(&pot).map_err(|e| e.to_string())?;
    let n0 = census(&pot).map_err(|e| e.to_string())?.s_wave();
    let ratio = n0 as f64 * PI / fx.action;
    check((0.85..=1.0).contains(&ratio), format!("N0 = {n0}, N0*pi/A = {ratio:.4}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("1 cubic coefficients", cubic_coefficients, Duration::from_secs(1)),
        ("2 finite-g convergence", finite_g_convergence, Duration::from_secs(1)),
        ("3 census vs analytic oracles", census_vs_oracles, Duration::from_secs(30)),
        ("4 crossover", crossover, Duration::from_secs(30)),
        ("5 SUSY ladder", susy_ladder, Duration::from_secs(60)),
        ("6 soundness sweep", soundness, Duration::from_secs(120)),
        ("7 strong coupling", strong_coupling, Duration::from_secs(30)),
    ];
    let mut failed = 0;
    for (name, run, budget) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if took > budget => Err(format!("{msg}; took {took:.2?}, budget {budget:?}")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("PASS criterion {name}: {msg} [{took:.2?}]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL criterion {name}: {msg} [{took:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
