mod common;

use std::f64::consts::PI;

use common::pinched_point;
use systolic_morse::torus::{slope_entry, tangent_frame, MarkovPoint, Slope};
use systolic_morse::wp::*;

fn diag(p: &MarkovPoint<f64>, s: Slope, trunc: usize) -> f64 {
    wp_pairing(p, s, s, trunc).unwrap().value
}

#[test]
fn pinching_family_follows_small_length_law() {
    let mut excess = Vec::new();
    for l in [0.2, 0.1, 0.05] {
        let v = diag(&pinched_point(l), Slope::INFINITY, 8);
        let lead = 2.0 / PI * l;
        assert!(v > lead, "l={l}");
        excess.push((l, v - lead));
    }
    let ratio = diag(&pinched_point(0.05), Slope::INFINITY, 8) / (2.0 / PI * 0.05);
    assert!((0.95..=1.05).contains(&ratio));
    // excess decays faster than l
    let (a, b) = (excess[0], excess[2]);
    let order = (a.1 / b.1).ln() / (a.0 / b.0).ln();
    assert!(order >= 1.5, "order {order}");
}

#[test]
fn diagonal_sums_increase_with_truncation() {
    let p = pinched_point(0.5);
    let mut last = 0.0;
    let mut increments = Vec::new();
    for trunc in 2..=10 {
        let v = diag(&p, Slope::INFINITY, trunc);
        assert!(v >= last);
        increments.push(v - last);
        last = v;
    }
    // shells shrink over every two steps (odd and even lengths alternate)
    for w in increments[1..].windows(3) {
        assert!(w[2] < w[0]);
    }
}

#[test]
fn pairing_is_symmetric() {
    let p = MarkovPoint::from_xy(2.6, 4.0, systolic_morse::torus::Branch::Lower).unwrap();
    let slopes = [Slope::INFINITY, Slope::ZERO, Slope::ONE, Slope::new(2, 1).unwrap(), Slope::new(-1, 3).unwrap()];
    for &a in &slopes {
        for &b in &slopes {
            let ab: f64 = wp_pairing(&p, a, b, 8).unwrap().value;
            let ba: f64 = wp_pairing(&p, b, a, 8).unwrap().value;
            assert!((ab - ba).abs() <= 1e-12 * ab.abs().max(1.0), "{a} {b}: {ab} {ba}");
        }
    }
}

#[test]
fn hexagonal_gram_is_positive_and_symmetric() {
    let p = MarkovPoint::<f64>::hexagonal();
    let g = pairing_matrix(&p, [Slope::INFINITY, Slope::ZERO], 12).unwrap();
    assert!(g.monotone_lower);
    let [[a, b], [_, d]] = g.gram;
    assert!(a > 0.0 && a * d - b * b > 0.0);
    assert!((a - d).abs() < 1e-9);
    // the three systole gradients sum to zero by symmetry
    assert!((b / a + 0.5).abs() < 2e-3, "{}", b / a);
}

#[test]
fn raising_matches_the_gram() {
    let p = MarkovPoint::<f64>::hexagonal();
    let g = pairing_matrix(&p, [Slope::INFINITY, Slope::ZERO], 8).unwrap();
    assert_eq!(wp_gradient(&p, &[0.0, 0.0], &g).unwrap(), [0.0, 0.0]);
    let frame = tangent_frame(&p).unwrap();
    let da = frame.components(&slope_entry(&p, Slope::INFINITY).d_length);
    let db = frame.components(&slope_entry(&p, Slope::ZERO).d_length);
    let v = wp_gradient(&p, &da, &g).unwrap();
    let pair = |c: &[f64; 2]| c[0] * v[0] + c[1] * v[1];
    assert!((pair(&da) - g.gram[0][0]).abs() < 1e-12);
    assert!((pair(&db) - g.gram[0][1]).abs() < 1e-12);
    let m = metric(&p, &g).unwrap();
    let norm2 = v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1]);
    assert!((norm2 - g.gram[0][0]).abs() < 1e-9);
}

#[test]
fn adaptive_raising_agrees_when_nothing_is_skipped() {
    let p = MarkovPoint::from_xy(2.6, 4.0, systolic_morse::torus::Branch::Lower).unwrap();
    let basis = [Slope::INFINITY, Slope::ZERO];
    let g = pairing_matrix(&p, basis, 8).unwrap();
    let c = [0.3, -0.7];
    let full: [f64; 2] = wp_gradient(&p, &c, &g).unwrap();
    let adaptive: [f64; 2] = wp_gradient_adaptive(&p, &c, basis, 8).unwrap();
    assert!((full[0] - adaptive[0]).abs() < 1e-12 && (full[1] - adaptive[1]).abs() < 1e-12);
}

#[test]
fn norms_obey_the_length_bound() {
    // |∇l|² ≤ c (l + l² e^{l/2}) with one constant across short and long curves
    let mut ratios = Vec::new();
    for l in [0.05, 0.2, 0.8] {
        ratios.push(diag(&pinched_point(l), Slope::INFINITY, 8) / (l + l * l * (l / 2.0).exp()));
    }
    let hex = MarkovPoint::<f64>::hexagonal();
    for s in [Slope::INFINITY, Slope::new(2, 1).unwrap(), Slope::new(3, 2).unwrap()] {
        let l = slope_entry(&hex, s).length;
        ratios.push(diag(&hex, s, 10) / (l + l * l * (l / 2.0).exp()));
    }
    let c = ratios.iter().copied().fold(0.0, f64::max);
    assert!(c < 1.0, "{ratios:?}");
    assert!(ratios.iter().all(|&r| r > 0.0));
}

#[test]
fn zero_truncation_is_rejected() {
    let p = MarkovPoint::<f64>::hexagonal();
    assert!(wp_pairing(&p, Slope::ZERO, Slope::ZERO, 0).is_err());
}
