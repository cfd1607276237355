//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use systolic_morse::linalg::{dot, norm, solve};
use systolic_morse::torus::{Branch, MarkovPoint};

pub type M2<T> = [[T; 2]; 2];

pub fn mul<T>(a: &M2<T>, b: &M2<T>) -> M2<T>
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// Letters of the Christoffel word of slope `(p, q)`, `q ≥ 0`: `true` is the
/// slope-0 generator, `false` the slope-∞ generator.
pub fn christoffel(p: i64, q: i64) -> Vec<bool> {
    let n = p.abs() + q;
    (1..=n).map(|i| (i * q).div_euclid(n) - ((i - 1) * q).div_euclid(n) == 1).collect()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// All reduced slopes `(p, q)` with `|p| + q ≤ n`.
pub fn slopes_up_to(n: i64) -> Vec<(i64, i64)> {
    let mut out = vec![(1, 0)];
    for q in 1..=n {
        for p in -(n - q)..=(n - q) {
            if gcd(p, q) == 1 {
                out.push((p, q));
            }
        }
    }
    out
}

/// Trace of the word for `(p, q)` given generator matrices and their inverses.
pub fn word_trace<T>(a: M2<T>, a_inv: M2<T>, b: M2<T>, p: i64, q: i64, one: T, zero: T) -> T
where
    T: Copy + std::ops::Mul<Output = T> + std::ops::Add<Output = T>,
{
    let a_use = if p < 0 { a_inv } else { a };
    let mut m = [[one, zero], [zero, one]];
    for is_b in christoffel(p, q) {
        m = mul(&m, if is_b { &b } else { &a_use });
    }
    m[0][0] + m[1][1]
}

/// `(slope, trace)` for all slopes of word length ≤ n at a real point, from
/// the representation `X = [[x, −1], [1, 0]]`, `Y = [[0, s], [−1/s, y]]`
/// with `s + 1/s = z`.
pub fn holonomy_traces(x: f64, y: f64, z: f64, n: i64) -> Vec<((i64, i64), f64)> {
    let s = (z + (z * z - 4.0).sqrt()) / 2.0;
    let a = [[x, -1.0], [1.0, 0.0]];
    let a_inv = [[0.0, 1.0], [-1.0, x]];
    let b = [[0.0, s], [-1.0 / s, y]];
    slopes_up_to(n)
        .into_iter()
        .map(|(p, q)| ((p, q), word_trace(a, a_inv, b, p, q, 1.0, 0.0)))
        .collect()
}

/// Exact integer traces at `(3, 3, 3)` from `A = [[1,1],[1,2]]`, `B = [[1,−1],[−1,2]]`.
pub fn hexagonal_integer_traces(n: i64) -> Vec<((i64, i64), i128)> {
    let a: M2<i128> = [[1, 1], [1, 2]];
    let a_inv: M2<i128> = [[2, -1], [-1, 1]];
    let b: M2<i128> = [[1, -1], [-1, 2]];
    slopes_up_to(n)
        .into_iter()
        .map(|(p, q)| ((p, q), word_trace(a, a_inv, b, p, q, 1, 0)))
        .collect()
}

/// Random point of the fundamental domain `x ≤ y ≤ z ≤ xy − z` with `x ≥ x_min`.
pub fn random_fd_point<R: Rng>(rng: &mut R, x_min: f64) -> MarkovPoint<f64> {
    loop {
        let x = rng.gen_range(x_min..3.0);
        let y = rng.gen_range(x..6.0);
        let Ok(p) = MarkovPoint::from_xy(x, y, Branch::Lower) else { continue };
        if p.z() >= p.y() && p.z() <= p.x() * p.y() - p.z() {
            return p;
        }
    }
}

/// Point with short slope-∞ geodesic of length `l` and `y = z`.
pub fn pinched_point(l: f64) -> MarkovPoint<f64> {
    let x = 2.0 * (l / 2.0).cosh();
    let y = x / (x - 2.0).sqrt();
    MarkovPoint::new(x, y, y).unwrap()
}

/// Classification computed by exhaustive circuit enumeration in exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HullKind {
    Interior,
    Boundary,
    Outside,
}

fn q(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

/// Kernel of the column set `cols` of the matrix `vecs` if it is one-dimensional.
fn kernel_vector(vecs: &[Vec<i64>], cols: &[usize]) -> Option<Vec<BigRational>> {
    let d = vecs[0].len();
    let k = cols.len();
    let mut m: Vec<Vec<BigRational>> = (0..d).map(|r| cols.iter().map(|&c| q(vecs[c][r])).collect()).collect();
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..d).find(|&r| !m[r][col].is_zero()) else { continue };
        m.swap(row, pr);
        let pv = m[row][col].clone();
        for c in 0..k {
            m[row][c] = m[row][c].clone() / pv.clone();
        }
        for r in 0..d {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                for c in 0..k {
                    let t = m[row][c].clone();
                    m[r][c] = m[r][c].clone() - f.clone() * t;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if k - pivots.len() != 1 {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
    let mut v = vec![BigRational::zero(); k];
    v[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        v[pc] = -m[r][free].clone();
    }
    Some(v)
}

/// Origin position relative to the convex hull of `vecs`, within their span.
///
/// The origin lies in the hull iff some circuit (minimal dependent subset)
/// has a kernel vector of one sign; it lies in the relative interior iff
/// such positive circuits cover every index.
pub fn circuit_hull_kind(vecs: &[Vec<i64>]) -> HullKind {
    let n = vecs.len();
    let d = vecs[0].len();
    let mut covered = vec![false; n];
    let mut any = false;
    for mask in 1u32..(1 << n) {
        let cols: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        if cols.len() > d + 1 {
            continue;
        }
        let Some(v) = kernel_vector(vecs, &cols) else { continue };
        if v.iter().any(|c| c.is_zero()) {
            continue; // not minimal
        }
        let all_pos = v.iter().all(|c| c.is_positive());
        let all_neg = v.iter().all(|c| c.is_negative());
        if all_pos || all_neg {
            any = true;
            for &c in &cols {
                covered[c] = true;
            }
        }
    }
    if !any {
        HullKind::Outside
    } else if covered.iter().all(|&c| c) {
        HullKind::Interior
    } else {
        HullKind::Boundary
    }
}

/// `max_{|τ|=1} min_i ⟨v_i, τ⟩` over a fine grid of the unit circle.
pub fn sphere_grid_minimax(vecs: &[[f64; 2]], steps: usize) -> f64 {
    (0..steps)
        .map(|k| {
            let th = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
            let t = [th.cos(), th.sin()];
            vecs.iter().map(|v| v[0] * t[0] + v[1] * t[1]).fold(f64::INFINITY, f64::min)
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Random integer configuration: dimension 2..=5, 1..=8 nonzero vectors with
/// entries in `[−3, 3]`.
pub fn random_int_config<R: Rng>(rng: &mut R) -> Vec<Vec<i64>> {
    let d = rng.gen_range(2..=5);
    let n = rng.gen_range(1..=8);
    (0..n)
        .map(|_| loop {
            let v: Vec<i64> = (0..d).map(|_| rng.gen_range(-3..=3)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

/// Random eutactic configuration: `k` Gaussian-ish vectors in dimension `d`
/// closed up by a negative positive combination of them.
pub fn random_eutactic_config<R: Rng>(rng: &mut R, d: usize, k: usize) -> Vec<Vec<f64>> {
    let mut vs: Vec<Vec<f64>> = (0..k).map(|_| (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
    let mut last = vec![0.0; d];
    for v in &vs {
        let a: f64 = rng.gen_range(0.2..1.0);
        for (l, x) in last.iter_mut().zip(v) {
            *l -= a * x;
        }
    }
    vs.push(last);
    vs
}

/// Smooth minimum of quadratic "length" functions `l_i(v) = 1 + ⟨g_i, v⟩ + ½|v|²`
/// with eutactic `{g_i}`, and its critical point by Newton.
pub fn model_critical(g: &[Vec<f64>], t: f64) -> Vec<f64> {
    let d = g[0].len();
    let mut v = vec![0.0; d];
    for _ in 0..100 {
        let ls: Vec<f64> = g.iter().map(|gi| 1.0 + dot(gi, &v) + 0.5 * dot(&v, &v)).collect();
        let m = ls.iter().copied().fold(f64::INFINITY, f64::min);
        let w: Vec<f64> = ls.iter().map(|l| (-(l - m) / t).exp()).collect();
        let s: f64 = w.iter().sum();
        let w: Vec<f64> = w.iter().map(|x| x / s).collect();
        let grads: Vec<Vec<f64>> = g.iter().map(|gi| gi.iter().zip(&v).map(|(a, b)| a + b).collect()).collect();
        let mut gbar = vec![0.0; d];
        for (wi, gi) in w.iter().zip(&grads) {
            for k in 0..d {
                gbar[k] += wi * gi[k];
            }
        }
        if norm(&gbar) < 1e-14 {
            break;
        }
        let mut h = vec![vec![0.0; d]; d];
        for (wi, gi) in w.iter().zip(&grads) {
            for a in 0..d {
                h[a][a] += wi;
                for b in 0..d {
                    h[a][b] -= wi * (gi[a] - gbar[a]) * (gi[b] - gbar[b]) / t;
                }
            }
        }
        let step = solve(&h, &gbar.iter().map(|x| -x).collect::<Vec<_>>()).unwrap();
        for k in 0..d {
            v[k] += step[k];
        }
    }
    v
}
