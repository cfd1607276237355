//! Farey-tree recursion for traces of simple closed curves.
//!
//! Around any Farey triangle `(a, b, c)` the trace of the vertex across edge
//! `{a, b}` is `t_a·t_b − t_c`. The walker is generic over the element carried
//! by the recursion: exact integers, plain floats, or [`Jet`]s.

use serde::{Serialize, Serializer};

use super::point::{constraint_gradient, MarkovPoint};
use super::slope::Slope;
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Default cap on visited tree nodes.
pub const NODE_CAP: usize = 5_000_000;

/// Element carried through the trace recursion.
pub trait TraceValue: Clone {
    type Key: PartialOrd + Copy;
    fn key(&self) -> Self::Key;
    /// `self · b − c`
    fn mul_sub(&self, b: &Self, c: &Self) -> Self;
}

impl TraceValue for i128 {
    type Key = i128;
    fn key(&self) -> i128 {
        *self
    }
    fn mul_sub(&self, b: &Self, c: &Self) -> Self {
        self * b - c
    }
}

impl TraceValue for f64 {
    type Key = f64;
    fn key(&self) -> f64 {
        *self
    }
    fn mul_sub(&self, b: &Self, c: &Self) -> Self {
        self * b - c
    }
}

impl TraceValue for f32 {
    type Key = f32;
    fn key(&self) -> f32 {
        *self
    }
    fn mul_sub(&self, b: &Self, c: &Self) -> Self {
        self * b - c
    }
}

/// Second-order jet in three variables: value, gradient and Hessian.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet<S> {
    pub v: S,
    pub d: Vec3<S>,
    pub h: Mat3<S>,
}

impl<S: Real> Jet<S> {
    pub fn constant(v: S) -> Self {
        Self { v, d: [S::zero(); 3], h: [[S::zero(); 3]; 3] }
    }

    /// The coordinate function `q_i` evaluated at `v`.
    pub fn variable(v: S, i: usize) -> Self {
        let mut j = Self::constant(v);
        j.d[i] = S::one();
        j
    }
}

impl<S: Real> TraceValue for Jet<S> {
    type Key = S;
    fn key(&self) -> S {
        self.v
    }
    fn mul_sub(&self, b: &Self, c: &Self) -> Self {
        let mut out = Self::constant(self.v * b.v - c.v);
        for i in 0..3 {
            out.d[i] = self.d[i] * b.v + self.v * b.d[i] - c.d[i];
            for j in 0..3 {
                out.h[i][j] = self.h[i][j] * b.v
                    + self.d[i] * b.d[j]
                    + self.d[j] * b.d[i]
                    + self.v * b.h[i][j]
                    - c.h[i][j];
            }
        }
        out
    }
}

/// All slopes whose trace key is at most `cutoff`, each exactly once.
///
/// `seeds` are the elements on slopes `∞, 0, 1`. A new vertex whose key
/// exceeds the cutoff and both parents prunes its subtree: with all traces
/// above 2 every descendant is strictly larger.
pub fn walk<E: TraceValue>(seeds: [E; 3], cutoff: E::Key, node_cap: usize) -> Result<Vec<(Slope, E)>> {
    let [ex, ey, ez] = seeds;
    let (si, s0, s1) = (Slope::INFINITY, Slope::ZERO, Slope::ONE);
    let mut out = Vec::new();
    for (s, e) in [(si, &ex), (s0, &ey), (s1, &ez)] {
        if e.key() <= cutoff {
            out.push((s, e.clone()));
        }
    }
    // (a, b, opposite)
    let mut stack: Vec<((Slope, E), (Slope, E), (Slope, E))> = vec![
        ((si, ex.clone()), (s0, ey.clone()), (s1, ez.clone())),
        ((s0, ey.clone()), (s1, ez.clone()), (si, ex.clone())),
        ((s1, ez), (si, ex), (s0, ey)),
    ];
    let mut visited = 0usize;
    while let Some((a, b, c)) = stack.pop() {
        visited += 1;
        if visited > node_cap {
            return Err(Error::NodeCapExceeded(node_cap));
        }
        let d_slope = a.0.across(b.0, c.0);
        let d = a.1.mul_sub(&b.1, &c.1);
        let dk = d.key();
        let ak = a.1.key();
        let bk = b.1.key();
        let parent_max = if ak > bk { ak } else { bk };
        if dk > cutoff && !(dk < parent_max) {
            continue;
        }
        if dk <= cutoff {
            out.push((d_slope, d.clone()));
        }
        let dd = (d_slope, d);
        stack.push((a.clone(), dd.clone(), b.clone()));
        stack.push((dd, b, a));
    }
    Ok(out)
}

/// Element on an arbitrary slope, by descending the Farey tree.
pub fn trace_of_slope<E: TraceValue>(seeds: [E; 3], target: Slope) -> E {
    let [ex, ey, ez] = seeds;
    let mut tri = [(Slope::INFINITY, ex), (Slope::ZERO, ey), (Slope::ONE, ez)];
    loop {
        if let Some(v) = tri.iter().find(|v| v.0 == target) {
            return v.1.clone();
        }
        // the edge {u, v} whose arc away from w holds the target
        let mut next = None;
        for k in 0..3 {
            let (u, v, w) = (&tri[k], &tri[(k + 1) % 3], &tri[(k + 2) % 3]);
            let inside = if Slope::cyclically_between(u.0, w.0, v.0) {
                Slope::cyclically_between(v.0, target, u.0)
            } else {
                Slope::cyclically_between(u.0, target, v.0)
            };
            if inside {
                let d = (u.0.across(v.0, w.0), u.1.mul_sub(&v.1, &w.1));
                next = Some([u.clone(), v.clone(), d]);
                break;
            }
        }
        tri = next.expect("target lies in one of the three arcs");
    }
}

/// One simple closed geodesic with its length differentials.
#[derive(Clone, Debug, PartialEq)]
pub struct GeodesicEntry<S> {
    pub slope: Slope,
    pub trace: S,
    pub length: S,
    pub d_trace: Vec3<S>,
    pub d_length: Vec3<S>,
    pub hess_length: Mat3<S>,
}

impl<S: Real> GeodesicEntry<S> {
    pub fn from_jet(slope: Slope, t: &Jet<S>) -> Self {
        let two = S::lit(2.0);
        let half = t.v / two;
        let sh2 = (half - S::one()) * (half + S::one());
        let sh = sh2.sqrt();
        let l1 = S::one() / sh;
        let l2 = -(t.v / S::lit(4.0)) / (sh2 * sh);
        let mut d_length = [S::zero(); 3];
        let mut hess_length = [[S::zero(); 3]; 3];
        for i in 0..3 {
            d_length[i] = l1 * t.d[i];
            for j in 0..3 {
                hess_length[i][j] = l2 * t.d[i] * t.d[j] + l1 * t.h[i][j];
            }
        }
        Self {
            slope,
            trace: t.v,
            length: two * half.acosh(),
            d_trace: t.d,
            d_length,
            hess_length,
        }
    }

    /// One JSON line: `{"slope":[p,q],"trace":…,"length":…,"d_length":[…]}`.
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }
}

#[derive(Serialize)]
struct GeodesicRecord<S> {
    slope: Slope,
    trace: S,
    length: S,
    d_length: Vec3<S>,
}

impl<S: Real> Serialize for GeodesicEntry<S> {
    fn serialize<Ser: Serializer>(&self, s: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        GeodesicRecord { slope: self.slope, trace: self.trace, length: self.length, d_length: self.d_length }
            .serialize(s)
    }
}

/// Jets of `x, y, z` in ambient coordinates.
pub fn ambient_seeds<S: Real>(p: &MarkovPoint<S>) -> [Jet<S>; 3] {
    let c = p.coords();
    [Jet::variable(c[0], 0), Jet::variable(c[1], 1), Jet::variable(c[2], 2)]
}

/// Jets of `x, y, z` in the chart `(x, y)`, with `z` implicit.
///
/// The third derivative slot is unused and stays zero.
pub fn chart_seeds<S: Real>(p: &MarkovPoint<S>) -> Result<[Jet<S>; 3]> {
    let (x, y, z) = (p.x(), p.y(), p.z());
    let g = constraint_gradient(&p.coords());
    let fz = g[2];
    if fz.abs() <= S::tol(1e-10) * (x * y).max(S::one()) {
        return Err(Error::BranchSingularity);
    }
    let two = S::lit(2.0);
    let zx = -g[0] / fz;
    let zy = -g[1] / fz;
    // second derivatives of z(x, y) from F(x, y, z(x, y)) = 0
    let zxx = -(two + two * (-y) * zx + two * zx * zx) / fz;
    let zyy = -(two + two * (-x) * zy + two * zy * zy) / fz;
    let zxy = -(-z + (-y) * zy + (-x) * zx + two * zx * zy) / fz;
    let mut jz = Jet::constant(z);
    jz.d = [zx, zy, S::zero()];
    jz.h[0][0] = zxx;
    jz.h[1][1] = zyy;
    jz.h[0][1] = zxy;
    jz.h[1][0] = zxy;
    Ok([Jet::variable(x, 0), Jet::variable(y, 1), jz])
}

fn entries_from<S: Real>(seeds: [Jet<S>; 3], length_cutoff: S) -> Result<Vec<GeodesicEntry<S>>> {
    if !(length_cutoff > S::zero()) {
        return Err(Error::CutoffTooSmall(length_cutoff.as_f64()));
    }
    let tc = super::point::trace_of_length(length_cutoff);
    let mut out: Vec<GeodesicEntry<S>> = walk(seeds, tc, NODE_CAP)?
        .iter()
        .map(|(s, j)| GeodesicEntry::from_jet(*s, j))
        .filter(|e| e.length <= length_cutoff)
        .collect();
    if out.is_empty() {
        return Err(Error::CutoffTooSmall(length_cutoff.as_f64()));
    }
    out.sort_by_key(|e| e.slope);
    Ok(out)
}

/// Every simple closed geodesic of length at most `length_cutoff`, sorted by
/// slope, with derivatives in ambient coordinates `(x, y, z)`.
pub fn enumerate_geodesics<S: Real>(p: &MarkovPoint<S>, length_cutoff: S) -> Result<Vec<GeodesicEntry<S>>> {
    entries_from(ambient_seeds(p), length_cutoff)
}

/// As [`enumerate_geodesics`], with derivatives in the chart `(x, y)`.
pub fn enumerate_geodesics_chart<S: Real>(p: &MarkovPoint<S>, length_cutoff: S) -> Result<Vec<GeodesicEntry<S>>> {
    entries_from(chart_seeds(p)?, length_cutoff)
}

/// Trace of a single slope at `p`.
pub fn slope_trace<S: Real>(p: &MarkovPoint<S>, s: Slope) -> S {
    trace_of_slope(ambient_seeds(p), s).v
}

/// Geodesic data of a single slope at `p`.
pub fn slope_entry<S: Real>(p: &MarkovPoint<S>, s: Slope) -> GeodesicEntry<S> {
    GeodesicEntry::from_jet(s, &trace_of_slope(ambient_seeds(p), s))
}

/// Shortest Farey neighbor of slope `a` at `p`.
///
/// Neighbors of `a` form the family `c + k·a`, whose traces satisfy
/// `t_{k+1} = t_a t_k − t_{k−1}` and are convex in `k`.
pub fn shortest_neighbor<S: Real>(p: &MarkovPoint<S>, a: Slope) -> GeodesicEntry<S> {
    let seeds = ambient_seeds(p);
    let ta = trace_of_slope(seeds, a);
    let c0 = a.neighbor();
    let cm = c0.diff(a);
    let mut cur = (c0, trace_of_slope(seeds, c0));
    let mut prev = (cm, trace_of_slope(seeds, cm));
    if prev.1.v < cur.1.v {
        std::mem::swap(&mut cur, &mut prev);
    }
    // walk away from `prev` while the trace decreases
    loop {
        let next = (cur.0.across(a, prev.0), ta.mul_sub(&cur.1, &prev.1));
        if next.1.v >= cur.1.v {
            return GeodesicEntry::from_jet(cur.0, &cur.1);
        }
        prev = cur;
        cur = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_traces_at_hexagonal_point() {
        let mut t: Vec<i128> = walk([3i128, 3, 3], 15, 1000).unwrap().into_iter().map(|(_, v)| v).collect();
        t.sort();
        assert_eq!(t, vec![3, 3, 3, 6, 6, 6, 15, 15, 15, 15, 15, 15]);
    }

    #[test]
    fn descent_agrees_with_walk() {
        let p = MarkovPoint::<f64>::from_xy(3.1, 3.4, super::super::Branch::Lower).unwrap();
        for (s, e) in walk(ambient_seeds(&p), 200.0, NODE_CAP).unwrap() {
            let d = trace_of_slope(ambient_seeds(&p), s);
            assert!((d.v - e.v).abs() <= 1e-12 * e.v, "{s}");
        }
    }

    #[test]
    fn shortest_neighbor_walks_the_twist_family() {
        let p = MarkovPoint::<f64>::from_xy(2.3, 5.0, super::super::Branch::Lower).unwrap();
        let all = enumerate_geodesics(&p, 12.0).unwrap();
        let best = all
            .iter()
            .filter(|e| e.slope.is_neighbor(Slope::new(7, 3).unwrap()))
            .map(|e| e.length)
            .fold(f64::INFINITY, f64::min);
        let got = shortest_neighbor(&p, Slope::new(7, 3).unwrap());
        assert!((got.length - best).abs() < 1e-9);
        assert!(got.slope.is_neighbor(Slope::new(7, 3).unwrap()));
    }

    #[test]
    fn six_geodesics_below_four() {
        let p = MarkovPoint::<f64>::hexagonal();
        let g = enumerate_geodesics(&p, 4.0).unwrap();
        assert_eq!(g.len(), 6);
        assert!(matches!(enumerate_geodesics(&p, 0.5), Err(Error::CutoffTooSmall(_))));
    }

    #[test]
    fn chart_fold_is_singular() {
        assert!(matches!(
            enumerate_geodesics_chart(&MarkovPoint::<f64>::square(), 3.0),
            Err(Error::BranchSingularity)
        ));
    }

    #[test]
    fn json_line_field_order() {
        let p = MarkovPoint::<f64>::hexagonal();
        let line = enumerate_geodesics(&p, 2.0).unwrap()[0].to_json_line();
        assert!(line.starts_with("{\"slope\":[-1,1],\"trace\":") || line.starts_with("{\"slope\":[0,1],\"trace\":"));
        assert!(line.contains("\"length\":") && line.contains("\"d_length\":["));
    }
}
