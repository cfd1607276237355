//! The smoothed systole `syst = −T log Σ_γ e^{−l_γ/T}` over simple closed
//! geodesics, with certified truncation of the sum.

mod nodal;

pub use nodal::*;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{bilinear3, dot3, norm3, Mat3, Vec3};
use crate::scalar::Real;
use crate::torus::{
    constraint_gradient, constraint_hessian, enumerate_geodesics, length_of_trace, shortest_neighbor, tangent_frame, GeodesicEntry,
    MarkovPoint, Slope, TangentFrame,
};

/// Lengths within this of the systole count as minimizers.
pub const EQUALITY_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SystParams<S> {
    #[serde(rename = "T")]
    pub t: S,
    /// Bound on the truncation error of the value.
    pub tail_tol: S,
    /// Largest enumeration length tried.
    pub cutoff_cap: S,
}

impl<S: Real> SystParams<S> {
    pub fn new(t: S) -> Result<Self> {
        let p = Self { t, tail_tol: S::tol(1e-12), cutoff_cap: S::lit(60.0) };
        p.validate()?;
        Ok(p)
    }

    pub fn with_tail_tol(mut self, tol: S) -> Result<Self> {
        self.tail_tol = tol;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t > S::zero() && self.t < S::one()) {
            return Err(Error::InvalidT(self.t.as_f64()));
        }
        if !(self.tail_tol > S::zero()) {
            return Err(Error::InvalidParams(format!("tail_tol = {}", self.tail_tol)));
        }
        if !(self.cutoff_cap > S::zero()) {
            return Err(Error::InvalidParams(format!("cutoff_cap = {}", self.cutoff_cap)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SystValue<S> {
    pub value: S,
    pub count: usize,
    pub cutoff_used: S,
    /// Bound on `|true − computed|` of the value.
    pub tail_bound: S,
}

/// `−T log Σ e^{−l_i/T}`, evaluated with a shift.
pub fn smooth_min<S: Real>(lengths: &[S], t: S) -> S {
    let m = lengths.iter().copied().fold(S::infinity(), S::min);
    let s: S = lengths.iter().map(|&l| (-(l - m) / t).exp()).sum();
    m - t * s.ln()
}

fn log_add_exp<S: Real>(a: S, b: S) -> S {
    let m = a.max(b);
    if m == S::neg_infinity() {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Systole and the slopes realizing it.
pub fn systole<S: Real>(p: &MarkovPoint<S>) -> (S, Vec<Slope>) {
    let seed = p.x().min(p.y()).min(p.z());
    let bound = length_of_trace(seed).unwrap_or(S::zero()) + S::lit(1e-6);
    let g = enumerate_geodesics(p, bound).expect("seed slopes lie below the bound");
    let sys = g.iter().map(|e| e.length).fold(S::infinity(), S::min);
    let tol = S::tol(EQUALITY_TOL);
    let minimizers = g.iter().filter(|e| e.length <= sys + tol).map(|e| e.slope).collect();
    (sys, minimizers)
}

/// Smallest length strictly above the systole (without multiplicity).
pub fn second_systole<S: Real>(p: &MarkovPoint<S>) -> S {
    let (sys, _) = systole(p);
    let tol = S::tol(EQUALITY_TOL);
    let mut cutoff = sys + S::lit(2.0);
    loop {
        let g = enumerate_geodesics(p, cutoff).expect("cutoff above systole");
        if let Some(l) = g.iter().map(|e| e.length).filter(|&l| l > sys + tol).reduce(S::min) {
            return l;
        }
        cutoff = cutoff + cutoff;
    }
}

/// Enumeration at an adaptively chosen cutoff with softmax weights.
#[derive(Clone, Debug)]
pub struct SystState<S> {
    pub point: MarkovPoint<S>,
    pub params: SystParams<S>,
    pub entries: Vec<GeodesicEntry<S>>,
    /// Normalized weights `e^{−l/T} / Σ e^{−l/T}`.
    pub weights: Vec<S>,
    pub value: S,
    pub sys: S,
    /// `sys − syst`, computed without cancellation.
    pub gap: S,
    pub cutoff_used: S,
    pub tail_bound: S,
    /// Bound on the norm of the dropped part of the ambient gradient.
    pub grad_tail_bound: S,
}

struct TailBounds<S> {
    log_dropped: S,
    log_dropped_grad: S,
}

/// Bounds on the dropped sums `Σ_{l > L} e^{−l/T}` and `Σ_{l > L} e^{−l/T} |∇l|`,
/// assuming at most `c_p e^n` geodesics with length in `[n, n+1)`.
fn tail_bounds<S: Real>(entries: &[GeodesicEntry<S>], cutoff: S, t: S) -> TailBounds<S> {
    let n0 = cutoff.floor().to_usize().unwrap_or(0);
    let mut counts = vec![0usize; n0 + 1];
    let mut grad_ratio = S::zero();
    for e in entries {
        let n = e.length.floor().to_usize().unwrap_or(0).min(n0);
        counts[n] += 1;
        grad_ratio = grad_ratio.max(norm3(&e.d_length) / (e.length + S::one()));
    }
    let c_fit = counts
        .iter()
        .enumerate()
        .map(|(n, &c)| S::lit(c as f64) * (-S::lit(n as f64)).exp())
        .fold(S::one(), S::max);
    let log_cp = (S::lit(4.0) * c_fit).ln();
    let log_gc = (S::lit(4.0) * grad_ratio.max(S::tol(1e-300))).ln();
    let inv_t = S::one() / t;
    let nf = S::lit(n0 as f64);
    let ratio = S::one() - inv_t; // log of the geometric ratio, negative
    let first = log_cp + nf - cutoff * inv_t;
    let rest = log_cp + (nf + S::one()) * ratio - (-(ratio.exp())).ln_1p();
    let log_dropped = log_add_exp(first, rest);
    // gradient: Σ_n c_p g_c (n + 2) e^{n − max(n, L)/T}
    let mut log_dropped_grad = S::neg_infinity();
    for k in 0..400 {
        let n = nf + S::lit(k as f64);
        let e = log_cp + log_gc + (n + S::lit(2.0)).ln() + n - n.max(cutoff) * inv_t;
        log_dropped_grad = log_add_exp(log_dropped_grad, e);
        if k > 8 && e < log_dropped_grad - S::lit(40.0) {
            break;
        }
    }
    TailBounds { log_dropped, log_dropped_grad }
}

impl<S: Real> SystState<S> {
    /// Enumerates with the cutoff raised until the value and gradient tail
    /// bounds both meet `tail_tol`.
    pub fn evaluate(p: &MarkovPoint<S>, params: &SystParams<S>) -> Result<Self> {
        params.validate()?;
        let seed = p.x().min(p.y()).min(p.z());
        let mut cutoff = length_of_trace(seed)? + S::one();
        loop {
            if cutoff > params.cutoff_cap {
                return Err(Error::CutoffCapExceeded(params.cutoff_cap.as_f64()));
            }
            let state = Self::at_cutoff(p, params, cutoff)?;
            if state.tail_bound <= params.tail_tol && state.grad_tail_bound <= params.tail_tol {
                return Ok(state);
            }
            cutoff = cutoff + S::lit(0.5);
        }
    }

    /// Evaluates at a fixed enumeration cutoff.
    pub fn at_cutoff(p: &MarkovPoint<S>, params: &SystParams<S>, cutoff: S) -> Result<Self> {
        params.validate()?;
        let t = params.t;
        let mut entries = enumerate_geodesics(p, cutoff)?;
        let sys = entries.iter().map(|e| e.length).fold(S::infinity(), S::min);
        let tol = S::tol(EQUALITY_TOL);
        let minimal: Vec<Slope> = entries.iter().filter(|e| e.length <= sys + tol).map(|e| e.slope).collect();
        if minimal.len() == entries.len() && minimal.len() == 1 {
            // keep the second systole so that syst < sys holds strictly
            entries.push(shortest_neighbor(p, minimal[0]));
            entries.sort_by_key(|e| e.slope);
        }
        let raw: Vec<S> = entries.iter().map(|e| (-(e.length - sys) / t).exp()).collect();
        let total: S = raw.iter().copied().sum();
        let weights: Vec<S> = raw.iter().map(|&w| w / total).collect();
        let first_min = entries.iter().position(|e| e.length == sys).unwrap_or(0);
        let rest: S = raw.iter().enumerate().filter(|(i, _)| *i != first_min).map(|(_, &w)| w).sum();
        let gap = t * rest.ln_1p();
        let value = sys - gap;
        let log_s = -sys / t + total.ln();
        let tb = tail_bounds(&entries, cutoff, t);
        let rel = (tb.log_dropped - log_s).exp();
        let tail_bound = t * rel;
        let mut grad = [S::zero(); 3];
        for (e, &w) in entries.iter().zip(&weights) {
            for i in 0..3 {
                grad[i] += w * e.d_length[i];
            }
        }
        let grad_tail_bound = (tb.log_dropped_grad - log_s).exp() + norm3(&grad) * rel;
        Ok(Self {
            point: *p,
            params: *params,
            entries,
            weights,
            value,
            sys,
            gap,
            cutoff_used: cutoff,
            tail_bound,
            grad_tail_bound,
        })
    }

    pub fn syst_value(&self) -> SystValue<S> {
        SystValue {
            value: self.value,
            count: self.entries.len(),
            cutoff_used: self.cutoff_used,
            tail_bound: self.tail_bound,
        }
    }

    /// Softmax-weighted average of the length differentials.
    pub fn ambient_gradient(&self) -> Vec3<S> {
        let mut g = [S::zero(); 3];
        for (e, &w) in self.entries.iter().zip(&self.weights) {
            for i in 0..3 {
                g[i] += w * e.d_length[i];
            }
        }
        g
    }

    /// Ambient Hessian of `syst` as a function of `(x, y, z)`.
    pub fn ambient_hessian(&self) -> Mat3<S> {
        let g = self.ambient_gradient();
        let inv_t = S::one() / self.params.t;
        let mut h = [[S::zero(); 3]; 3];
        for (e, &w) in self.entries.iter().zip(&self.weights) {
            let dev = [e.d_length[0] - g[0], e.d_length[1] - g[1], e.d_length[2] - g[2]];
            for i in 0..3 {
                for j in 0..3 {
                    h[i][j] += w * (e.hess_length[i][j] - inv_t * dev[i] * dev[j]);
                }
            }
        }
        h
    }

    /// Hessian of the restriction to the Markov surface, in `frame`.
    pub fn tangent_hessian(&self, frame: &TangentFrame<S>) -> [[S; 2]; 2] {
        let g = self.ambient_gradient();
        let q = self.point.coords();
        let n = constraint_gradient(&q);
        let lambda = dot3(&g, &n) / dot3(&n, &n);
        let hm = constraint_hessian(&q);
        let mut h = self.ambient_hessian();
        for i in 0..3 {
            for j in 0..3 {
                h[i][j] -= lambda * hm[i][j];
            }
        }
        let e = [frame.e1, frame.e2];
        let mut out = [[S::zero(); 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                out[a][b] = bilinear3(&h, &e[a], &e[b]);
            }
        }
        let off = (out[0][1] + out[1][0]) / S::lit(2.0);
        out[0][1] = off;
        out[1][0] = off;
        out
    }

    /// Systole minimizers among the enumerated entries.
    pub fn minimizers(&self) -> Vec<&GeodesicEntry<S>> {
        let tol = S::tol(EQUALITY_TOL);
        self.entries.iter().filter(|e| e.length <= self.sys + tol).collect()
    }

    /// Smallest enumerated length above the systole, if any.
    pub fn secsys(&self) -> Option<S> {
        let tol = S::tol(EQUALITY_TOL);
        self.entries.iter().map(|e| e.length).filter(|&l| l > self.sys + tol).reduce(S::min)
    }
}

/// `syst` at `p` with certified truncation.
pub fn syst_eval<S: Real>(p: &MarkovPoint<S>, params: &SystParams<S>) -> Result<SystValue<S>> {
    Ok(SystState::evaluate(p, params)?.syst_value())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct SystGradient<S> {
    pub ambient: Vec3<S>,
    pub tangent: [S; 2],
    pub frame: TangentFrame<S>,
    pub tail_bound: S,
}

/// Gradient of `syst`: ambient covector and tangent-frame components.
pub fn syst_grad<S: Real>(p: &MarkovPoint<S>, params: &SystParams<S>) -> Result<SystGradient<S>> {
    let st = SystState::evaluate(p, params)?;
    let frame = tangent_frame(p)?;
    let ambient = st.ambient_gradient();
    Ok(SystGradient { ambient, tangent: frame.components(&ambient), frame, tail_bound: st.grad_tail_bound })
}

/// Hessian of `syst` restricted to the Markov surface, in the tangent frame.
pub fn syst_hessian<S: Real>(p: &MarkovPoint<S>, params: &SystParams<S>) -> Result<[[S; 2]; 2]> {
    let st = SystState::evaluate(p, params)?;
    Ok(st.tangent_hessian(&tangent_frame(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_class_is_its_length() {
        assert!((smooth_min(&[1.7_f64], 0.1) - 1.7).abs() < 1e-15);
    }

    #[test]
    fn hexagonal_value() {
        let v = syst_eval(&MarkovPoint::<f64>::hexagonal(), &SystParams::new(0.1).unwrap()).unwrap();
        let expect = 1.9248473002384139 - 0.1 * 3f64.ln();
        assert!((v.value - expect).abs() < 1e-6);
        assert!(v.tail_bound <= 1e-12);
    }

    #[test]
    fn rejects_bad_t() {
        assert!(matches!(SystParams::new(1.0_f64), Err(Error::InvalidT(_))));
        assert!(matches!(SystParams::new(0.0_f64), Err(Error::InvalidT(_))));
    }

    #[test]
    fn systole_examples() {
        let (s, m) = systole(&MarkovPoint::<f64>::hexagonal());
        assert!((s - 1.9248473002384139).abs() < 1e-14);
        assert_eq!(m.len(), 3);
        let (s, m) = systole(&MarkovPoint::<f64>::square());
        assert!((s - 1.762747174039086).abs() < 1e-13);
        assert_eq!(m, vec![Slope::ZERO, Slope::INFINITY]);
        assert!((second_systole(&MarkovPoint::<f64>::square()) - 2.6339157938496336).abs() < 1e-12);
        assert!((second_systole(&MarkovPoint::<f64>::hexagonal()) - 3.5254943480781717).abs() < 1e-12);
    }
}
