//! Critical points of `syst` and the linearized field near eutactic points.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eutactic::{classify, eutactic_rank, minimal_gradients, EutKind, VectorConfig, RANK_TOL};
use crate::linalg::{dist3, norm, span_basis, sym2_eigen};
use crate::scalar::Real;
use crate::syst::{SystParams, SystState};
use crate::torus::{normalize_to_fundamental_domain, tangent_frame, MarkovPoint, TangentFrame};

/// Gradient norm accepted as critical.
pub const GRAD_TOL: f64 = 1e-10;
/// Smallest admissible Hessian eigenvalue magnitude.
pub const DEGENERACY_TOL: f64 = 1e-8;
pub const MAX_ITER: usize = 200;
/// Largest step, in tangent-frame coordinates.
const TRUST_RADIUS: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct CriticalPoint<S> {
    pub point: MarkovPoint<S>,
    #[serde(rename = "T")]
    pub t: S,
    pub grad_norm: S,
    pub hessian_eigs: [S; 2],
    pub index: usize,
    /// Nearest known eutactic point (normalized) and its coordinate distance
    /// to the normalized critical point.
    pub nearest_eutactic: Option<(MarkovPoint<S>, S)>,
}

/// The interior eutactic points of the moduli space, normalized.
pub fn eutactic_points<S: Real>() -> [MarkovPoint<S>; 2] {
    [MarkovPoint::hexagonal(), MarkovPoint::square()]
}

struct Local<S> {
    state: SystState<S>,
    frame: TangentFrame<S>,
    grad: [S; 2],
    gnorm: S,
}

fn local<S: Real>(p: &MarkovPoint<S>, params: &SystParams<S>) -> Result<Local<S>> {
    let state = SystState::evaluate(p, params)?;
    let frame = tangent_frame(p)?;
    let grad = frame.components(&state.ambient_gradient());
    let gnorm = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
    Ok(Local { state, frame, grad, gnorm })
}

/// Levenberg–Marquardt step for `g(q) = 0` with Jacobian `h`.
fn lm_step<S: Real>(h: &[[S; 2]; 2], g: &[S; 2], mu: S) -> [S; 2] {
    // (hᵀh + μ I) v = −hᵀ g, h symmetric
    let a = h[0][0] * h[0][0] + h[0][1] * h[1][0] + mu;
    let b = h[0][0] * h[0][1] + h[0][1] * h[1][1];
    let d = h[1][0] * h[0][1] + h[1][1] * h[1][1] + mu;
    let r0 = -(h[0][0] * g[0] + h[1][0] * g[1]);
    let r1 = -(h[0][1] * g[0] + h[1][1] * g[1]);
    let det = a * d - b * b;
    [(d * r0 - b * r1) / det, (a * r1 - b * r0) / det]
}

/// Locates a critical point of `syst` near `start`.
///
/// Damped Newton (Levenberg–Marquardt on the tangent gradient) with a trust
/// radius; each step is retracted to the Markov surface.
pub fn find_critical<S: Real>(start: &MarkovPoint<S>, params: &SystParams<S>) -> Result<CriticalPoint<S>> {
    params.validate()?;
    let mut p = *start;
    let mut cur = local(&p, params)?;
    let mut mu = S::zero();
    let radius = S::lit(TRUST_RADIUS);
    for _ in 0..MAX_ITER {
        if cur.gnorm < S::lit(GRAD_TOL) {
            return finish(p, params, &cur);
        }
        let h = cur.state.tangent_hessian(&cur.frame);
        let mut accepted = false;
        for _ in 0..40 {
            let mut v = lm_step(&h, &cur.grad, mu);
            let vn = (v[0] * v[0] + v[1] * v[1]).sqrt();
            if !vn.is_finite() {
                mu = (mu * S::lit(10.0)).max(S::lit(1e-12));
                continue;
            }
            if vn > radius {
                v = [v[0] * radius / vn, v[1] * radius / vn];
            }
            let next = cur.frame.step(&v).and_then(|q| local(&q, params).map(|l| (q, l)));
            match next {
                Ok((q, l)) if l.gnorm < cur.gnorm => {
                    p = q;
                    cur = l;
                    mu = mu * S::lit(0.1);
                    accepted = true;
                    break;
                }
                _ => mu = (mu * S::lit(10.0)).max(cur.gnorm * S::lit(1e-3)),
            }
        }
        if !accepted {
            break;
        }
    }
    if cur.gnorm < S::lit(GRAD_TOL) {
        return finish(p, params, &cur);
    }
    Err(Error::NoConvergence(format!("gradient norm {:e} after {MAX_ITER} iterations", cur.gnorm.as_f64())))
}

fn finish<S: Real>(p: MarkovPoint<S>, params: &SystParams<S>, cur: &Local<S>) -> Result<CriticalPoint<S>> {
    let h = cur.state.tangent_hessian(&cur.frame);
    let (eigs, _) = sym2_eigen(h[0][0], h[0][1], h[1][1]);
    let smallest = eigs[0].abs().min(eigs[1].abs());
    if smallest < S::lit(DEGENERACY_TOL) {
        return Err(Error::DegenerateHessian(smallest.as_f64()));
    }
    let normal = normalize_to_fundamental_domain(&p)?.point;
    let nearest_eutactic = eutactic_points::<S>()
        .into_iter()
        .map(|e| (e, dist3(&e.coords(), &normal.coords())))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    Ok(CriticalPoint {
        point: p,
        t: params.t,
        grad_norm: cur.gnorm,
        hessian_eigs: eigs,
        index: eigs.iter().filter(|&&e| e < S::zero()).count(),
        nearest_eutactic,
    })
}

/// One orbit of critical points found by [`census`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct CriticalOrbit<S> {
    /// Normalized representative.
    pub representative: CriticalPoint<S>,
    /// Number of seeds that converged into the orbit.
    pub hits: usize,
}

/// Result of running [`find_critical`] from many seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Census<S> {
    pub orbits: Vec<CriticalOrbit<S>>,
    /// Seeds whose search did not converge.
    pub failures: usize,
}

/// Runs [`find_critical`] from every seed in parallel and clusters the
/// results by normalized coordinates.
pub fn census<S: Real>(seeds: &[MarkovPoint<S>], params: &SystParams<S>, cluster_tol: S) -> Result<Census<S>> {
    let found: Vec<Result<CriticalPoint<S>>> = seeds.par_iter().map(|s| find_critical(s, params)).collect();
    let mut orbits: Vec<CriticalOrbit<S>> = Vec::new();
    let mut failures = 0;
    for r in found {
        let mut c = match r {
            Ok(c) => c,
            Err(e) if e.is_no_convergence() => {
                failures += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        c.point = normalize_to_fundamental_domain(&c.point)?.point;
        match orbits.iter_mut().find(|o| dist3(&o.representative.point.coords(), &c.point.coords()) < cluster_tol) {
            Some(o) => o.hits += 1,
            None => orbits.push(CriticalOrbit { representative: c, hits: 1 }),
        }
    }
    Ok(Census { orbits, failures })
}

/// Coordinate distance between `eutactic` and the critical point found from
/// it, for each `T`.
pub fn drift_curve<S: Real>(eutactic: &MarkovPoint<S>, t_list: &[S]) -> Result<Vec<(S, S, CriticalPoint<S>)>> {
    if classify(&minimal_gradients(eutactic)?)?.kind != EutKind::Eutactic {
        return Err(Error::NotEutactic);
    }
    if t_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("T list must be strictly decreasing".into()));
    }
    t_list
        .par_iter()
        .map(|&t| {
            let c = find_critical(eutactic, &SystParams::new(t)?)?;
            Ok((t, dist3(&c.point.coords(), &eutactic.coords()), c))
        })
        .collect()
}

/// Zero of `Φ_T(v) = Σ e^{−⟨v_i, v⟩/T} v_i` over the span of a eutactic configuration.
///
/// `Φ_T = −∇F` for the convex function `F(v) = T Σ e^{−⟨v_i, v⟩/T}`, which is
/// coercive on the span exactly when the configuration is eutactic, so Newton
/// with backtracking on `F` converges globally.
pub fn phi_zero_config<S: Real>(c: &VectorConfig<S>, t: S) -> Result<Vec<S>> {
    if t <= S::zero() {
        return Err(Error::InvalidT(t.as_f64()));
    }
    if classify(c)?.kind != EutKind::Eutactic {
        return Err(Error::NotEutactic);
    }
    let span = span_basis(c.vectors(), S::lit(RANK_TOL));
    let w: Vec<Vec<S>> = c.vectors().iter().map(|v| span.coords(v)).collect();
    let r = span.rank();
    let f = |u: &[S]| w.iter().map(|wi| (-crate::linalg::dot(wi, u) / t).exp()).sum::<S>() * t;
    let mut u = vec![S::zero(); r];
    let scale = w.iter().map(|wi| norm(wi)).fold(S::zero(), S::max);
    for _ in 0..200 {
        let mut g = vec![S::zero(); r];
        let mut h = vec![vec![S::zero(); r]; r];
        for wi in &w {
            let e = (-crate::linalg::dot(wi, &u) / t).exp();
            for a in 0..r {
                g[a] -= e * wi[a];
                for b in 0..r {
                    h[a][b] += e * wi[a] * wi[b] / t;
                }
            }
        }
        if norm(&g) <= S::tol(1e-13) * scale {
            break;
        }
        let neg: Vec<S> = g.iter().map(|&x| -x).collect();
        let Some(step) = crate::linalg::solve(&h, &neg) else {
            return Err(Error::NoConvergence("singular Hessian of the potential".into()));
        };
        let f0 = f(&u);
        let slope: S = crate::linalg::dot(&g, &step);
        let mut alpha = S::one();
        loop {
            let trial: Vec<S> = u.iter().zip(&step).map(|(&a, &b)| a + alpha * b).collect();
            // slack for rounding in F near the root
            let slack = S::lit(4.0) * S::epsilon() * f0.abs();
            if f(&trial) <= f0 + S::lit(1e-4) * alpha * slope + slack || alpha < S::lit(1e-12) {
                u = trial;
                break;
            }
            alpha = alpha * S::lit(0.5);
        }
    }
    Ok(span.lift(&u))
}

/// Zero of the linearized field at a eutactic point, in tangent-frame coordinates.
pub fn phi_zero<S: Real>(eutactic: &MarkovPoint<S>, t: S) -> Result<[S; 2]> {
    let v = phi_zero_config(&minimal_gradients(eutactic)?, t)?;
    Ok([v[0], v[1]])
}

/// Residual `|Φ_T(v)|` of a configuration at `v`.
pub fn phi_residual<S: Real>(c: &VectorConfig<S>, t: S, v: &[S]) -> S {
    let mut out = vec![S::zero(); c.dim()];
    for vi in c.vectors() {
        let e = (-crate::linalg::dot(vi, v) / t).exp();
        for (o, &x) in out.iter_mut().zip(vi) {
            *o += e * x;
        }
    }
    norm(&out)
}

/// Minimum tangent gradient norm over `samples` points of the annulus
/// `ρT ≤ |v| ≤ r_p` around `eutactic`, in tangent-frame coordinates.
///
/// Samples follow a golden-angle spiral through the annulus.
pub fn ring_regularity_scan<S: Real>(eutactic: &MarkovPoint<S>, t: S, rho: S, r_p: S, samples: usize) -> Result<S> {
    let params = SystParams::new(t)?;
    let inner = rho * t;
    if inner >= r_p {
        return Err(Error::Precondition(format!("inner radius {} not below outer radius {}", inner, r_p)));
    }
    if samples == 0 {
        return Err(Error::Precondition("no samples".into()));
    }
    let frame = tangent_frame(eutactic)?;
    let golden = S::PI() * (S::lit(3.0) - S::lit(5.0).sqrt());
    let norms: Result<Vec<S>> = (0..samples)
        .into_par_iter()
        .map(|k| {
            let s = (S::lit(k as f64) + S::lit(0.5)) / S::lit(samples as f64);
            let r = inner + (r_p - inner) * s;
            let th = golden * S::lit(k as f64);
            let q = frame.step(&[r * th.cos(), r * th.sin()])?;
            Ok(local(&q, &params)?.gnorm)
        })
        .collect();
    Ok(norms?.into_iter().fold(S::infinity(), S::min))
}

/// Morse index of the critical point near `p` and eutactic rank of `p`.
pub fn index_and_rank<S: Real>(p: &MarkovPoint<S>, params: &SystParams<S>) -> Result<(usize, usize)> {
    let c = find_critical(p, params)?;
    Ok((c.index, eutactic_rank(&minimal_gradients(p)?)))
}
