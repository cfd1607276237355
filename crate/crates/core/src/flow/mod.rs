//! Gradient flow of `syst` on the Markov surface.

mod output;

pub use output::*;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::critical::{eutactic_points, find_critical, CriticalPoint};
use crate::error::{Error, Result};
use crate::linalg::{axpy3, cross3, dist3, norm3, sub3, sym2_eigen, Vec3};
use crate::scalar::Real;
use crate::syst::{SystParams, SystState, EQUALITY_TOL};
use crate::torus::{normalize_to_fundamental_domain, retract, tangent_frame, MarkovPoint};
use crate::wp::{basis_coefficients, wp_basis, wp_raise};

/// Smallest admissible adaptive step.
pub const MIN_STEP: f64 = 1e-12;
/// Per-step slack allowed in the monotonicity of `syst`.
pub const MONOTONE_SLACK: f64 = 1e-9;
/// Offset of separatrix seeds from the critical point.
pub const SEPARATRIX_EPS: f64 = 1e-5;
/// Seeds on the circle of downhill directions of an index-2 point.
pub const FAN_SEEDS: usize = 36;
/// Samples with `l_min` below this enter the decay fit.
pub const DECAY_WINDOW: f64 = 0.2;
pub const DECAY_MIN_SAMPLES: usize = 20;
/// Largest truncation tried when a WP pairing sum has not converged.
const MAX_WP_TRUNC: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    Wp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Terminal {
    /// Index into the known critical orbits (0 hexagonal, 1 square).
    Critical { orbit: usize },
    Boundary,
    StepLimit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Sample<S> {
    pub t: S,
    pub point: MarkovPoint<S>,
    pub syst: S,
    pub l_min: S,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Trajectory<S> {
    pub samples: Vec<Sample<S>>,
    pub metric: Metric,
    pub direction: Direction,
    pub terminal: Terminal,
}

impl<S: Real> Trajectory<S> {
    pub fn last(&self) -> &Sample<S> {
        self.samples.last().expect("trajectories hold at least the start")
    }

    /// True if `syst` moves in the flow direction between consecutive samples,
    /// up to `slack` per step.
    pub fn is_monotone(&self, slack: S) -> bool {
        self.samples.windows(2).all(|w| match self.direction {
            Direction::Down => w[1].syst <= w[0].syst + slack,
            Direction::Up => w[1].syst >= w[0].syst - slack,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct FlowConfig<S> {
    pub metric: Metric,
    pub direction: Direction,
    /// Initial step.
    pub step: S,
    pub max_step: S,
    /// Local error tolerance per step, relative to the coordinate scale.
    pub tol: S,
    pub max_steps: usize,
    /// Gradient norm treated as critical.
    pub grad_tol: S,
    /// `l_min` treated as the boundary.
    pub boundary_length: S,
    /// Normalized coordinate distance treated as arrival at a critical orbit.
    pub critical_radius: S,
    /// Starting truncation of the WP pairing sums.
    pub wp_trunc: usize,
    /// Keep coordinates equal along the flow when they start equal.
    pub snap_symmetry: bool,
}

impl<S: Real> FlowConfig<S> {
    pub fn new(metric: Metric, direction: Direction) -> Self {
        Self {
            metric,
            direction,
            step: S::lit(0.01),
            // euclidean decay near the boundary is polynomial in flow time
            max_step: match metric {
                Metric::Wp => S::lit(0.25),
                Metric::Euclidean => S::lit(1e30),
            },
            tol: S::lit(1e-9),
            max_steps: 5000,
            grad_tol: S::lit(1e-9),
            boundary_length: S::lit(1e-4),
            critical_radius: S::lit(1e-6),
            wp_trunc: 8,
            snap_symmetry: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [self.step, self.max_step, self.tol, self.grad_tol, self.boundary_length, self.critical_radius];
        if positive.iter().any(|&v| !(v > S::zero())) || self.max_steps == 0 || self.wp_trunc == 0 {
            return Err(Error::InvalidParams("flow step, tolerances and caps must be positive".into()));
        }
        Ok(())
    }
}

/// Critical points of `syst` at `params.t` near the eutactic points, in the
/// order used by [`Terminal::Critical`].
pub fn known_orbits<S: Real>(params: &SystParams<S>) -> Result<Vec<CriticalPoint<S>>> {
    eutactic_points::<S>()
        .iter()
        .map(|e| {
            let mut c = find_critical(e, params)?;
            c.point = normalize_to_fundamental_domain(&c.point)?.point;
            Ok(c)
        })
        .collect()
}

/// Values the integrator needs at one point.
struct Field<S> {
    syst: S,
    l_min: S,
    /// Ambient velocity, already signed for the flow direction.
    velocity: Vec3<S>,
    grad_norm: S,
}

fn field<S: Real>(p: &MarkovPoint<S>, params: &SystParams<S>, cfg: &FlowConfig<S>) -> Result<Field<S>> {
    let st = SystState::evaluate(p, params)?;
    let frame = tangent_frame(p)?;
    let covector = frame.components(&st.ambient_gradient());
    let v = match cfg.metric {
        Metric::Euclidean => covector,
        Metric::Wp => {
            // split off the minimizer exactly so that the neighbor coefficient
            // carries only the (possibly underflowing) weights of the others;
            // ties go to the smallest slope so the basis does not flicker
            let tie = st.sys + S::tol(EQUALITY_TOL) * st.sys.max(S::one());
            let k = (0..st.entries.len())
                .filter(|&i| st.entries[i].length <= tie)
                .min_by_key(|&i| st.entries[i].slope)
                .expect("the systole is enumerated");
            let a = st.entries[k].slope;
            let [_, b] = wp_basis(p, a)?;
            let mut rest = [S::zero(); 3];
            for (i, (e, &w)) in st.entries.iter().zip(&st.weights).enumerate() {
                if i != k {
                    rest = axpy3(&rest, w, &e.d_length);
                }
            }
            let r = basis_coefficients(p, &[a, b], &frame.components(&rest))?;
            let c = [st.weights[k] + r[0], r[1]];
            let mut trunc = cfg.wp_trunc;
            loop {
                match wp_raise(p, [a, b], &c, trunc) {
                    Err(Error::NotConverged { .. }) if trunc < MAX_WP_TRUNC => trunc += 2,
                    r => break r?,
                }
            }
        }
    };
    // |∇syst|² = dsyst(∇syst) in either metric
    let grad_norm = (covector[0] * v[0] + covector[1] * v[1]).max(S::zero()).sqrt();
    let sign = match cfg.direction {
        Direction::Down => -S::one(),
        Direction::Up => S::one(),
    };
    let a = frame.ambient(&v);
    Ok(Field { syst: st.value, l_min: st.sys, velocity: [sign * a[0], sign * a[1], sign * a[2]], grad_norm })
}

/// Coordinate pairs that start equal and are kept equal.
fn symmetric_pairs<S: Real>(p: &MarkovPoint<S>) -> Vec<(usize, usize)> {
    let q = p.coords();
    let scale = q.iter().fold(S::one(), |m, &v| m.max(v.abs()));
    let mut out = Vec::new();
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if (q[i] - q[j]).abs() <= S::lit(1e-12) * scale {
            out.push((i, j));
        }
    }
    out
}

fn snap<S: Real>(mut q: Vec3<S>, pairs: &[(usize, usize)]) -> Vec3<S> {
    for &(i, j) in pairs {
        let m = (q[i] + q[j]) / S::lit(2.0);
        q[i] = m;
        q[j] = m;
    }
    q
}

fn project<S: Real>(q: Vec3<S>, pairs: &[(usize, usize)]) -> Result<MarkovPoint<S>> {
    retract(snap(q, pairs))
}

fn offset<S: Real>(p: &MarkovPoint<S>, v: &Vec3<S>, h: S) -> Vec3<S> {
    let c = p.coords();
    [c[0] + h * v[0], c[1] + h * v[1], c[2] + h * v[2]]
}

/// One classical RK4 step, retracting every stage onto the surface.
fn rk4<S: Real>(
    p: &MarkovPoint<S>,
    f0: &Field<S>,
    h: S,
    params: &SystParams<S>,
    cfg: &FlowConfig<S>,
    pairs: &[(usize, usize)],
) -> Result<MarkovPoint<S>> {
    let half = h / S::lit(2.0);
    let k1 = f0.velocity;
    let k2 = field(&project(offset(p, &k1, half), pairs)?, params, cfg)?.velocity;
    let k3 = field(&project(offset(p, &k2, half), pairs)?, params, cfg)?.velocity;
    let k4 = field(&project(offset(p, &k3, h), pairs)?, params, cfg)?.velocity;
    let mut k = [S::zero(); 3];
    for i in 0..3 {
        k[i] = (k1[i] + S::lit(2.0) * (k2[i] + k3[i]) + k4[i]) / S::lit(6.0);
    }
    project(offset(p, &k, h), pairs)
}

fn nearest_orbit<S: Real>(p: &MarkovPoint<S>, orbits: &[CriticalPoint<S>]) -> Result<Option<(usize, S)>> {
    let n = normalize_to_fundamental_domain(p)?.point;
    Ok(orbits
        .iter()
        .enumerate()
        .map(|(i, o)| (i, dist3(&o.point.coords(), &n.coords())))
        .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal)))
}

/// Integrates the gradient flow of `syst` from `start`.
///
/// Adaptive RK4 with step doubling; every stage and every accepted point is
/// retracted onto the Markov surface. A step is accepted only if its local
/// error is within `cfg.tol` and `syst` moves in the flow direction.
pub fn integrate<S: Real>(start: &MarkovPoint<S>, params: &SystParams<S>, cfg: &FlowConfig<S>) -> Result<Trajectory<S>> {
    integrate_with_orbits(start, params, cfg, &known_orbits(params)?)
}

/// [`integrate`] against precomputed critical orbits.
pub fn integrate_with_orbits<S: Real>(
    start: &MarkovPoint<S>,
    params: &SystParams<S>,
    cfg: &FlowConfig<S>,
    orbits: &[CriticalPoint<S>],
) -> Result<Trajectory<S>> {
    params.validate()?;
    cfg.validate()?;
    let pairs = if cfg.snap_symmetry { symmetric_pairs(start) } else { Vec::new() };
    let mut p = *start;
    let mut f = field(&p, params, cfg)?;
    let mut t = S::zero();
    let mut h = cfg.step;
    let mut samples = vec![Sample { t, point: p, syst: f.syst, l_min: f.l_min }];
    let slack = S::lit(MONOTONE_SLACK);
    let done = |p: &MarkovPoint<S>, f: &Field<S>| -> Result<Option<Terminal>> {
        if f.l_min < cfg.boundary_length {
            return Ok(Some(Terminal::Boundary));
        }
        if let Some((i, d)) = nearest_orbit(p, orbits)? {
            if d < cfg.critical_radius || (f.grad_norm < cfg.grad_tol && d < S::lit(1e-3)) {
                return Ok(Some(Terminal::Critical { orbit: i }));
            }
        }
        Ok(None)
    };
    for _ in 0..cfg.max_steps {
        if let Some(terminal) = done(&p, &f)? {
            return Ok(Trajectory { samples, metric: cfg.metric, direction: cfg.direction, terminal });
        }
        loop {
            if h < S::lit(MIN_STEP) {
                return Err(Error::StepCollapse(MIN_STEP));
            }
            let half = h / S::lit(2.0);
            let trial = rk4(&p, &f, h, params, cfg, &pairs).and_then(|full| {
                let mid = rk4(&p, &f, half, params, cfg, &pairs)?;
                let fm = field(&mid, params, cfg)?;
                let fine = rk4(&mid, &fm, half, params, cfg, &pairs)?;
                let ff = field(&fine, params, cfg)?;
                Ok((full, fine, ff))
            });
            let Ok((full, fine, ff)) = trial else {
                h = h / S::lit(4.0);
                continue;
            };
            let scale = norm3(&fine.coords()).max(S::one());
            let err = norm3(&sub3(&fine.coords(), &full.coords())) / (S::lit(15.0) * scale);
            let monotone = match cfg.direction {
                Direction::Down => ff.syst <= f.syst + slack,
                Direction::Up => ff.syst >= f.syst - slack,
            };
            let factor = if err > S::zero() {
                (S::lit(0.9) * (cfg.tol / err).powf(S::lit(0.2))).min(S::lit(2.0)).max(S::lit(0.2))
            } else {
                S::lit(2.0)
            };
            if err <= cfg.tol && monotone {
                p = fine;
                f = ff;
                t += h;
                samples.push(Sample { t, point: p, syst: f.syst, l_min: f.l_min });
                h = (h * factor).min(cfg.max_step);
                break;
            }
            h = h * factor.min(S::lit(0.5));
        }
    }
    let terminal = done(&p, &f)?.unwrap_or(Terminal::StepLimit);
    Ok(Trajectory { samples, metric: cfg.metric, direction: cfg.direction, terminal })
}

/// Integrates from every start in parallel.
pub fn integrate_many<S: Real>(
    starts: &[MarkovPoint<S>],
    params: &SystParams<S>,
    cfg: &FlowConfig<S>,
) -> Result<Vec<Trajectory<S>>> {
    let orbits = known_orbits(params)?;
    starts.par_iter().map(|s| integrate_with_orbits(s, params, cfg, &orbits)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct DecayFit<S> {
    /// Slope of `log l_min` against flow time.
    pub rate: S,
    pub intercept: S,
    pub r_squared: S,
    /// Root mean square residual of the fit.
    pub residual: S,
    pub samples: usize,
}

/// Least-squares fit of `log l_min` against `t` over the samples with
/// `l_min < 0.2` of a downward trajectory that reached the boundary.
pub fn boundary_decay_rate<S: Real>(traj: &Trajectory<S>) -> Result<DecayFit<S>> {
    if traj.direction != Direction::Down || traj.terminal != Terminal::Boundary {
        return Err(Error::Precondition("decay fit needs a downward trajectory ending at the boundary".into()));
    }
    let window: Vec<(S, S)> =
        traj.samples.iter().filter(|s| s.l_min < S::lit(DECAY_WINDOW)).map(|s| (s.t, s.l_min.ln())).collect();
    if window.len() < DECAY_MIN_SAMPLES {
        return Err(Error::InsufficientSamples { found: window.len(), needed: DECAY_MIN_SAMPLES });
    }
    let n = S::lit(window.len() as f64);
    let mt = window.iter().map(|w| w.0).sum::<S>() / n;
    let my = window.iter().map(|w| w.1).sum::<S>() / n;
    let stt = window.iter().map(|w| (w.0 - mt) * (w.0 - mt)).sum::<S>();
    let sty = window.iter().map(|w| (w.0 - mt) * (w.1 - my)).sum::<S>();
    let syy = window.iter().map(|w| (w.1 - my) * (w.1 - my)).sum::<S>();
    let rate = sty / stt;
    let intercept = my - rate * mt;
    let sse = window.iter().map(|w| (w.1 - intercept - rate * w.0).powi(2)).sum::<S>();
    let r_squared = if syy > S::zero() { S::one() - sse / syy } else { S::one() };
    Ok(DecayFit { rate, intercept, r_squared, residual: (sse / n).sqrt(), samples: window.len() })
}

/// Tangent direction, in frame components, of the locus where the pair of
/// coordinates equal at `p` stays equal.
fn symmetry_direction<S: Real>(p: &MarkovPoint<S>) -> Result<Option<[S; 2]>> {
    let Some(&(i, j)) = symmetric_pairs(p).first() else {
        return Ok(None);
    };
    let frame = tangent_frame(p)?;
    let mut e = [S::zero(); 3];
    e[i] = S::one();
    e[j] = -S::one();
    let d = cross3(&frame.normal, &e);
    let c = frame.components(&d);
    let n = (c[0] * c[0] + c[1] * c[1]).sqrt();
    Ok(Some([c[0] / n, c[1] / n]))
}

/// Downward trajectories leaving the critical point `high` along its
/// unstable directions.
///
/// Index 1 gives the two seeds `±ε e` on the negative eigenvector; index 2
/// gives a fan of 36 seeds on the circle of radius `ε`, starting on a
/// symmetry line when `high` lies on one.
pub fn separatrix_search<S: Real>(
    high: &CriticalPoint<S>,
    params: &SystParams<S>,
    cfg: &FlowConfig<S>,
) -> Result<Vec<Trajectory<S>>> {
    if high.index == 0 {
        return Err(Error::Precondition("separatrices need a critical point of index at least 1".into()));
    }
    let p = high.point;
    let frame = tangent_frame(&p)?;
    let h = SystState::evaluate(&p, params)?.tangent_hessian(&frame);
    let (_, vecs) = sym2_eigen(h[0][0], h[0][1], h[1][1]);
    let eps = S::lit(SEPARATRIX_EPS);
    let dirs: Vec<[S; 2]> = if high.index == 1 {
        // eigenvalues ascend, so the first eigenvector is the unstable one
        let e = vecs[0];
        vec![e, [-e[0], -e[1]]]
    } else {
        let base = match symmetry_direction(&p)? {
            Some(d) => d[1].atan2(d[0]),
            None => S::zero(),
        };
        (0..FAN_SEEDS)
            .map(|k| {
                let th = base + S::lit(2.0) * S::PI() * S::lit(k as f64) / S::lit(FAN_SEEDS as f64);
                [th.cos(), th.sin()]
            })
            .collect()
    };
    let seeds: Vec<MarkovPoint<S>> =
        dirs.iter().map(|d| frame.step(&[eps * d[0], eps * d[1]])).collect::<Result<_>>()?;
    let mut down = cfg.clone();
    down.direction = Direction::Down;
    integrate_many(&seeds, params, &down)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snapping_keeps_pairs_equal() {
        let q = snap([3.0_f64, 3.0 + 1e-9, 3.5], &[(0, 1)]);
        assert_eq!(q[0], q[1]);
        assert_eq!(symmetric_pairs(&MarkovPoint::<f64>::hexagonal()).len(), 3);
    }

    #[test]
    fn rejects_bad_config() {
        let mut c = FlowConfig::<f64>::new(Metric::Euclidean, Direction::Down);
        c.step = 0.0;
        assert!(c.validate().is_err());
    }
}
