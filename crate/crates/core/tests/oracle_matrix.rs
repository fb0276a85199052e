//! Exact counts against an independent zero-energy node counter.

use nbound::counter::{count_states, EffectivePotential};
use nbound::{Family, RadialPotential};

/// Fixed-step RK4 on the zero-energy regular solution, renormalised as it
/// grows. Nodes plus one if the solution at `r_max` is heading for a zero.
fn node_count(v: impl Fn(f64) -> f64, l: u32, r_max: f64, h: f64) -> usize {
    let ll = (l * (l + 1)) as f64;
    let f = |r: f64, y: [f64; 2]| [y[1], (v(r) + ll / (r * r)) * y[0]];
    let mut r: f64 = 1e-4;
    let mut y = [r.powi(l as i32 + 1), (l as f64 + 1.0) * r.powi(l as i32)];
    let mut nodes = 0;
    while r < r_max {
        let k1 = f(r, y);
        let k2 = f(r + h / 2.0, [y[0] + h / 2.0 * k1[0], y[1] + h / 2.0 * k1[1]]);
        let k3 = f(r + h / 2.0, [y[0] + h / 2.0 * k2[0], y[1] + h / 2.0 * k2[1]]);
        let k4 = f(r + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        let next = [
            y[0] + h / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
            y[1] + h / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        ];
        if next[0] * y[0] < 0.0 {
            nodes += 1;
        }
        y = next;
        r += h;
        let size = y[0].abs().max(y[1].abs());
        if size > 1e100 {
            y = [y[0] / size, y[1] / size];
        }
    }
    // Outside the well u ≈ A r^{ℓ+1} + B r^{-ℓ}; B/A < 0 means one more zero.
    if y[0] * (y[1] + l as f64 * y[0] / r) < 0.0 {
        nodes += 1;
    }
    nodes
}

fn closed_form(f: Family, g: f64, r: f64) -> f64 {
    let g2 = g * g;
    match f {
        Family::Yukawa => -g2 * (-r).exp() / r,
        Family::Hulthen => -g2 / r.exp_m1(),
        Family::SquareWell => {
            if r < 1.0 {
                -g2
            } else {
                0.0
            }
        }
        Family::Exponential => -g2 * (-r).exp(),
        Family::Tabulated => unreachable!(),
    }
}

#[test]
fn fifty_case_matrix() {
    let cases: Vec<(Family, f64, u32)> = [
        (Family::Yukawa, vec![1.0_f64, 5.0, 16.0, 30.0, 60.0].into_iter().map(f64::sqrt).collect::<Vec<_>>(), 4),
        (Family::Hulthen, vec![1.5, 2.5, 3.5, 5.2], 3),
        (Family::SquareWell, vec![2.0, 4.0, 9.0], 3),
        (Family::Exponential, vec![2.0, 4.0, 6.5], 3),
    ]
    .into_iter()
    .flat_map(|(f, gs, ls)| gs.into_iter().flat_map(move |g| (0..ls).map(move |l| (f, g, l))))
    .collect();
    assert_eq!(cases.len(), 50);
    let mut bad = Vec::new();
    for (f, g, l) in cases {
        let pot = RadialPotential::new(f, g, 1.0).unwrap();
        let ours = count_states(&EffectivePotential::centrifugal(&pot, l)).unwrap();
        assert!(!ours.threshold_sensitive, "{f} g={g} l={l} is too close to threshold");
        let r_max = if f == Family::SquareWell { 4.0 } else { 45.0 };
        let oracle = node_count(|r| closed_form(f, g, r), l, r_max, 2.5e-4);
        if ours.count != oracle {
            bad.push(format!("{f} g={g} l={l}: {} vs oracle {oracle}", ours.count));
        }
    }
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn yukawa_per_l_table() {
    let table: [(f64, &[usize]); 5] = [(1.0, &[]), (5.0, &[1]), (16.0, &[3, 1]), (30.0, &[4, 3, 1]), (60.0, &[6, 4, 3, 2])];
    for (g2, want) in table {
        let census = nbound::census(&RadialPotential::yukawa(g2.sqrt(), 1.0).unwrap()).unwrap();
        let got: Vec<usize> = census.per_l.iter().map(|&(_, n)| n).collect();
        assert_eq!(got, want, "g2 = {g2}");
    }
}
