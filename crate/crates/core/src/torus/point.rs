use serde::{Deserialize, Serialize};

use super::slope::Slope;
use crate::error::{Error, Result};
use crate::linalg::{cross3, dot3, norm3, scale3, sub3, Vec3};
use crate::scalar::Real;

/// Relative tolerance for the Markov residual after retraction.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Relative tolerance for accepting a user-supplied point.
pub const VALIDATION_TOL: f64 = 1e-10;
/// Newton iteration cap for retraction.
pub const RETRACT_MAX_ITER: usize = 50;
/// Iteration cap for normalization.
pub const NORMALIZE_MAX_ITER: usize = 10_000;

/// `x² + y² + z² − xyz`.
pub fn markov_residual<S: Real>(x: S, y: S, z: S) -> S {
    x * x + y * y + z * z - x * y * z
}

/// Scale against which the residual is measured.
fn residual_scale<S: Real>(q: &Vec3<S>) -> S {
    (q[0] * q[1] * q[2]).abs().max(S::one())
}

/// Gradient `(2x − yz, 2y − xz, 2z − xy)` of the Markov residual.
pub fn constraint_gradient<S: Real>(q: &Vec3<S>) -> Vec3<S> {
    let two = S::lit(2.0);
    [
        two * q[0] - q[1] * q[2],
        two * q[1] - q[0] * q[2],
        two * q[2] - q[0] * q[1],
    ]
}

/// Hessian of the Markov residual.
pub fn constraint_hessian<S: Real>(q: &Vec3<S>) -> [[S; 3]; 3] {
    let two = S::lit(2.0);
    [
        [two, -q[2], -q[1]],
        [-q[2], two, -q[0]],
        [-q[1], -q[0], two],
    ]
}

/// `2·arccosh(t/2)`.
pub fn length_of_trace<S: Real>(t: S) -> Result<S> {
    if !(t > S::lit(2.0)) {
        return Err(Error::NonHyperbolic(t.as_f64()));
    }
    Ok(S::lit(2.0) * (t / S::lit(2.0)).acosh())
}

/// Inverse of [`length_of_trace`].
pub fn trace_of_length<S: Real>(l: S) -> S {
    S::lit(2.0) * (l / S::lit(2.0)).cosh()
}

/// A point of Teichmüller space of the once-punctured torus: traces of the
/// slope-∞, slope-0 and slope-1 holonomies.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
#[serde(try_from = "[S; 3]", into = "[S; 3]")]
pub struct MarkovPoint<S> {
    x: S,
    y: S,
    z: S,
}

impl<S: Real> MarkovPoint<S> {
    /// Validates hyperbolicity and the Markov equation.
    pub fn new(x: S, y: S, z: S) -> Result<Self> {
        for t in [x, y, z] {
            if !(t > S::lit(2.0)) || !t.is_finite() {
                return Err(Error::NonHyperbolic(t.as_f64()));
            }
        }
        let q = [x, y, z];
        let r = markov_residual(x, y, z);
        if r.abs() > S::tol(VALIDATION_TOL) * residual_scale(&q) {
            return Err(Error::OffSurface {
                x: x.as_f64(),
                y: y.as_f64(),
                z: z.as_f64(),
                residual: r.as_f64(),
            });
        }
        Ok(Self { x, y, z })
    }

    /// Point with traces `x, y` and `z` from the chosen root of the Markov equation.
    pub fn from_xy(x: S, y: S, branch: Branch) -> Result<Self> {
        for t in [x, y] {
            if !(t > S::lit(2.0)) {
                return Err(Error::NonHyperbolic(t.as_f64()));
            }
        }
        let four = S::lit(4.0);
        let disc = x * x * y * y - four * (x * x + y * y);
        if disc < S::zero() {
            return Err(Error::NegativeDiscriminant { x: x.as_f64(), y: y.as_f64() });
        }
        let s = disc.sqrt();
        let xy = x * y;
        let two = S::lit(2.0);
        // the product of the roots is x² + y², so the small root is computed stably
        let upper = (xy + s) / two;
        let z = match branch {
            Branch::Upper => upper,
            Branch::Lower => (x * x + y * y) / upper,
        };
        if !(z > two) {
            return Err(Error::NonHyperbolic(z.as_f64()));
        }
        Self::new(x, y, z).or_else(|_| retract([x, y, z]))
    }

    pub fn x(&self) -> S {
        self.x
    }
    pub fn y(&self) -> S {
        self.y
    }
    pub fn z(&self) -> S {
        self.z
    }

    pub fn coords(&self) -> Vec3<S> {
        [self.x, self.y, self.z]
    }

    pub fn residual(&self) -> S {
        markov_residual(self.x, self.y, self.z)
    }

    pub fn constraint_gradient(&self) -> Vec3<S> {
        constraint_gradient(&self.coords())
    }

    /// Image under the Markov move `z ↦ xy − z`.
    pub fn markov_move(&self) -> Result<Self> {
        retract([self.x, self.y, self.x * self.y - self.z])
    }

    /// Image under a permutation of coordinates: output `i` is input `perm[i]`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let c = self.coords();
        Self { x: c[perm[0]], y: c[perm[1]], z: c[perm[2]] }
    }

    /// Converts to another scalar type.
    pub fn cast<R: Real>(&self) -> Result<MarkovPoint<R>> {
        retract([R::lit(self.x.as_f64()), R::lit(self.y.as_f64()), R::lit(self.z.as_f64())])
    }

    /// Hexagonal torus `(3, 3, 3)`.
    pub fn hexagonal() -> Self {
        let three = S::lit(3.0);
        Self { x: three, y: three, z: three }
    }

    /// Square torus `(2√2, 2√2, 4)`.
    pub fn square() -> Self {
        let r = S::lit(2.0) * S::SQRT_2();
        Self { x: r, y: r, z: S::lit(4.0) }
    }
}

impl<S: Real> TryFrom<[S; 3]> for MarkovPoint<S> {
    type Error = Error;
    fn try_from(v: [S; 3]) -> Result<Self> {
        MarkovPoint::new(v[0], v[1], v[2])
    }
}

impl<S: Real> From<MarkovPoint<S>> for [S; 3] {
    fn from(p: MarkovPoint<S>) -> Self {
        p.coords()
    }
}

/// Root of the Markov equation in `z` for fixed `x, y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

/// Newton projection onto the Markov surface along the constraint gradient.
pub fn retract<S: Real>(q_raw: Vec3<S>) -> Result<MarkovPoint<S>> {
    let mut q = q_raw;
    let tol = S::tol(RESIDUAL_TOL);
    for _ in 0..RETRACT_MAX_ITER {
        let r = markov_residual(q[0], q[1], q[2]);
        if !r.is_finite() {
            break;
        }
        if r.abs() <= tol * residual_scale(&q) {
            return MarkovPoint::new(q[0], q[1], q[2]);
        }
        let g = constraint_gradient(&q);
        let gg = dot3(&g, &g);
        if gg == S::zero() {
            return Err(Error::DegenerateConstraint);
        }
        q = sub3(&q, &scale3(&g, r / gg));
    }
    Err(Error::RetractionDiverged(RETRACT_MAX_ITER))
}

/// Orthonormal basis of the tangent plane of the Markov surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct TangentFrame<S> {
    pub point: MarkovPoint<S>,
    pub e1: Vec3<S>,
    pub e2: Vec3<S>,
    /// Unit normal, parallel to the constraint gradient.
    pub normal: Vec3<S>,
}

impl<S: Real> TangentFrame<S> {
    /// Frame components of an ambient covector.
    pub fn components(&self, covector: &Vec3<S>) -> [S; 2] {
        [dot3(covector, &self.e1), dot3(covector, &self.e2)]
    }

    /// Ambient vector with frame components `v`.
    pub fn ambient(&self, v: &[S; 2]) -> Vec3<S> {
        let mut out = [S::zero(); 3];
        for i in 0..3 {
            out[i] = v[0] * self.e1[i] + v[1] * self.e2[i];
        }
        out
    }

    /// Moves along the frame vector `v` and retracts.
    pub fn step(&self, v: &[S; 2]) -> Result<MarkovPoint<S>> {
        let d = self.ambient(v);
        let c = self.point.coords();
        retract([c[0] + d[0], c[1] + d[1], c[2] + d[2]])
    }
}

/// Tangent frame from Gram–Schmidt on the coordinate axes.
///
/// `e1` comes from the first axis whose projection has (within 1e−12) the
/// largest norm; `e2 = n × e1`.
pub fn tangent_frame<S: Real>(p: &MarkovPoint<S>) -> Result<TangentFrame<S>> {
    let g = p.constraint_gradient();
    let gn = norm3(&g);
    if !(gn > S::zero()) {
        return Err(Error::DegenerateConstraint);
    }
    let n = scale3(&g, S::one() / gn);
    let axes = [
        [S::one(), S::zero(), S::zero()],
        [S::zero(), S::one(), S::zero()],
        [S::zero(), S::zero(), S::one()],
    ];
    let proj: Vec<Vec3<S>> = axes.iter().map(|e| sub3(e, &scale3(&n, dot3(e, &n)))).collect();
    let norms: Vec<S> = proj.iter().map(norm3).collect();
    let best = norms.iter().fold(S::zero(), |a, &b| a.max(b));
    let k = norms
        .iter()
        .position(|&m| m >= best * (S::one() - S::tol(1e-12)))
        .unwrap_or(0);
    let mut e1 = scale3(&proj[k], S::one() / norms[k]);
    // one re-orthogonalization pass
    e1 = sub3(&e1, &scale3(&n, dot3(&e1, &n)));
    e1 = scale3(&e1, S::one() / norm3(&e1));
    let e2 = cross3(&n, &e1);
    Ok(TangentFrame { point: *p, e1, e2, normal: n })
}

/// Result of reducing a point modulo the mapping class group.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Normalized<S> {
    pub point: MarkovPoint<S>,
    pub moves: usize,
    pub sorts: usize,
    /// Original slopes whose traces became the normalized `(x, y, z)`.
    pub triangle: [Slope; 3],
}

/// Representative with `2 < x ≤ y ≤ z ≤ xy − z`.
pub fn normalize_to_fundamental_domain<S: Real>(p: &MarkovPoint<S>) -> Result<Normalized<S>> {
    let mut v = [(p.x, Slope::INFINITY), (p.y, Slope::ZERO), (p.z, Slope::ONE)];
    let mut moves = 0;
    let mut sorts = 0;
    let tol = S::tol(1e-12);
    for _ in 0..NORMALIZE_MAX_ITER {
        let before = v;
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        if v.iter().zip(before.iter()).any(|(a, b)| a.1 != b.1) {
            sorts += 1;
        }
        let (x, y, z) = (v[0].0, v[1].0, v[2].0);
        let moved = x * y - z;
        if z <= moved + tol * z {
            let point = MarkovPoint::new(x, y, z).or_else(|_| retract([x, y, z]))?;
            return Ok(Normalized { point, moves, sorts, triangle: [v[0].1, v[1].1, v[2].1] });
        }
        let c = v[0].1.across(v[1].1, v[2].1);
        v[2] = (moved, c);
        moves += 1;
    }
    Err(Error::NormalizationStalled(NORMALIZE_MAX_ITER))
}
