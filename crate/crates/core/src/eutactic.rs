//! Eutacticity of finite vector configurations.
//!
//! A configuration `{v_i}` is eutactic when the origin lies in the relative
//! interior of its convex hull (inside the span), semi-eutactic when it lies
//! on the relative boundary, and biased when it lies outside.
//!
//! Classification solves two linear programs: the largest uniform weight `t`
//! in a vanishing convex combination `Σ(t + s_i) v_i = 0`, and the largest
//! margin `m` of a functional with `⟨v_i, τ⟩ ≥ m` in a box. Floating results
//! with both margins under [`MARGIN`] are re-solved over exact rationals.

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, norm, span_basis, SpanBasis};
use crate::lp::{maximize, LpOutcome};
use crate::scalar::{Field, Real};
use crate::syst::systole;
use crate::torus::{slope_entry, tangent_frame, MarkovPoint};

/// Feasibility margin separating the three kinds in floating arithmetic.
pub const MARGIN: f64 = 1e-9;
/// Relative singular-value cutoff for the span.
pub const RANK_TOL: f64 = 1e-9;
/// Smallest admissible vector norm.
pub const ZERO_NORM: f64 = 1e-12;

/// A nonempty list of nonzero vectors of equal dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<S>>", into = "Vec<Vec<S>>")]
#[serde(bound(serialize = "S: Real", deserialize = "S: Real"))]
pub struct VectorConfig<S> {
    vectors: Vec<Vec<S>>,
}

impl<S: Real> VectorConfig<S> {
    pub fn new(vectors: Vec<Vec<S>>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::DegenerateInput("empty configuration".into()));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::DegenerateInput("zero-dimensional vectors".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::ShapeMismatch(format!("vector {i} has dimension {}, expected {dim}", v.len())));
            }
            if !(norm(v) > S::lit(ZERO_NORM)) {
                return Err(Error::DegenerateInput(format!("vector {i} is zero")));
            }
        }
        Ok(Self { vectors })
    }

    pub fn vectors(&self) -> &[Vec<S>] {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.vectors[0].len()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Subconfiguration on the given indices.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        Self::new(idx.iter().map(|&i| self.vectors[i].clone()).collect())
    }

    /// Image under the linear map `m` (rows act on column vectors).
    pub fn mapped(&self, m: &[Vec<S>]) -> Result<Self> {
        Self::new(self.vectors.iter().map(|v| m.iter().map(|row| dot(row, v)).collect()).collect())
    }

    fn span(&self) -> SpanBasis<S> {
        span_basis(&self.vectors, S::lit(RANK_TOL))
    }
}

impl<S: Real> TryFrom<Vec<Vec<S>>> for VectorConfig<S> {
    type Error = Error;
    fn try_from(v: Vec<Vec<S>>) -> Result<Self> {
        Self::new(v)
    }
}

impl<S> From<VectorConfig<S>> for Vec<Vec<S>> {
    fn from(c: VectorConfig<S>) -> Self {
        c.vectors
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EutKind {
    Eutactic,
    SemiEutactic,
    Biased,
}

impl std::fmt::Display for EutKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EutKind::Eutactic => "eutactic",
            EutKind::SemiEutactic => "semi_eutactic",
            EutKind::Biased => "biased",
        })
    }
}

/// Certificate for a classification.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
#[serde(bound(serialize = "S: Real", deserialize = "S: Real"))]
pub enum Witness<S> {
    /// Positive coefficients summing to one with `Σ a_i v_i = 0`.
    Eutactic { coeffs: Vec<S> },
    /// Nonnegative coefficients summing to one with `Σ a_i v_i = 0`, and a
    /// unit `τ` in the span vanishing on the face through the origin and
    /// positive on every other vector.
    SemiEutactic { coeffs: Vec<S>, tau: Vec<S> },
    /// Unit `τ` in the span with `⟨v_i, τ⟩ > 0` for every `i`.
    Biased { tau: Vec<S> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "S: Real", deserialize = "S: Real"))]
pub struct EutClass<S> {
    pub kind: EutKind,
    pub witness: Witness<S>,
}

impl<S: Real> EutClass<S> {
    /// Checks the witness against `c` to the given tolerance.
    pub fn verifies(&self, c: &VectorConfig<S>, tol: S) -> bool {
        let scale = c.vectors.iter().map(|v| norm(v)).fold(S::zero(), S::max);
        let combo_ok = |a: &[S], strict: bool| {
            if a.len() != c.len() {
                return false;
            }
            let sum: S = a.iter().copied().sum();
            let signs = a.iter().all(|&ai| if strict { ai > S::zero() } else { ai >= S::zero() });
            let mut r = vec![S::zero(); c.dim()];
            for (ai, v) in a.iter().zip(&c.vectors) {
                for (rk, &vk) in r.iter_mut().zip(v) {
                    *rk += *ai * vk;
                }
            }
            signs && (sum - S::one()).abs() <= tol && norm(&r) <= tol * scale
        };
        let tau_in_span = |tau: &[S]| {
            if tau.len() != c.dim() || (norm(tau) - S::one()).abs() > tol {
                return false;
            }
            let span = c.span();
            let back = span.lift(&span.coords(tau));
            norm(&back.iter().zip(tau).map(|(a, b)| *a - *b).collect::<Vec<_>>()) <= tol.sqrt()
        };
        let min_ip = |tau: &[S]| c.vectors.iter().map(|v| dot(v, tau)).fold(S::infinity(), S::min);
        match (&self.kind, &self.witness) {
            (EutKind::Eutactic, Witness::Eutactic { coeffs }) => combo_ok(coeffs, true),
            (EutKind::Biased, Witness::Biased { tau }) => tau_in_span(tau) && min_ip(tau) > S::zero(),
            (EutKind::SemiEutactic, Witness::SemiEutactic { coeffs, tau }) => {
                combo_ok(coeffs, false) && tau_in_span(tau) && min_ip(tau).abs() <= tol * scale
            }
            _ => false,
        }
    }
}

/// Arithmetic used by [`classify_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Backend {
    /// Floating LPs; ambiguous margins are an error.
    Float,
    /// Exact rational LPs on the given floating values.
    Exact,
    /// Floating LPs with exact fallback on ambiguity.
    Auto,
}

struct Margins<F> {
    /// Uniform weight and coefficients, when a vanishing combination exists.
    eut: Option<(F, Vec<F>)>,
    /// Separation margin and functional.
    sep: (F, Vec<F>),
}

fn vanishing_combination<F: Field>(w: &[Vec<F>]) -> Option<(F, Vec<F>)> {
    let n = w.len();
    let r = w[0].len();
    let mut a = Vec::with_capacity(r + 1);
    for k in 0..r {
        let mut row = Vec::with_capacity(n + 1);
        row.push(w.iter().fold(F::zero(), |acc, v| acc + v[k].clone()));
        row.extend(w.iter().map(|v| v[k].clone()));
        a.push(row);
    }
    let mut norm_row = vec![F::from_f64(n as f64).expect("small integer")];
    norm_row.extend((0..n).map(|_| F::one()));
    a.push(norm_row);
    let mut b = vec![F::zero(); r];
    b.push(F::one());
    let mut c = vec![F::zero(); n + 1];
    c[0] = F::one();
    let (x, t) = maximize(&a, &b, &c).optimal()?;
    let coeffs = (0..n).map(|i| x[0].clone() + x[i + 1].clone()).collect();
    Some((t, coeffs))
}

/// Box-constrained LP over `τ = τ⁺ − τ⁻`, `|τ_k| ≤ 1`: maximizes `m`
/// subject to `⟨w_i, τ⟩ ≥ m` where `with_margin[i]` and `⟨w_i, τ⟩ ≥ 0`
/// elsewhere.
fn box_functional<F: Field>(w: &[Vec<F>], with_margin: &[bool]) -> (F, Vec<F>) {
    let n = w.len();
    let r = w[0].len();
    // columns: τ⁺ (r), τ⁻ (r), m⁺, m⁻, slack (n), box slack (r)
    let width = 3 * r + 2 + n;
    let mut a = Vec::with_capacity(n + r);
    let mut b = Vec::with_capacity(n + r);
    for (i, v) in w.iter().enumerate() {
        let mut row = vec![F::zero(); width];
        for k in 0..r {
            row[k] = v[k].clone();
            row[r + k] = -v[k].clone();
        }
        if with_margin[i] {
            row[2 * r] = -F::one();
            row[2 * r + 1] = F::one();
        }
        row[2 * r + 2 + i] = -F::one();
        a.push(row);
        b.push(F::zero());
    }
    for k in 0..r {
        let mut row = vec![F::zero(); width];
        row[k] = F::one();
        row[r + k] = F::one();
        row[2 * r + 2 + n + k] = F::one();
        a.push(row);
        b.push(F::one());
    }
    let mut c = vec![F::zero(); width];
    c[2 * r] = F::one();
    c[2 * r + 1] = -F::one();
    let (x, value) = maximize(&a, &b, &c).optimal().expect("τ = 0 is feasible and the box is bounded");
    let tau = (0..r).map(|k| x[k].clone() - x[r + k].clone()).collect();
    (value, tau)
}

/// Indices carrying positive weight in some vanishing nonnegative combination.
fn face_indices(w: &[Vec<BigRational>]) -> Vec<bool> {
    let n = w.len();
    let r = w[0].len();
    let mut a: Vec<Vec<BigRational>> = (0..r).map(|k| w.iter().map(|v| v[k].clone()).collect()).collect();
    a.push(vec![BigRational::one(); n]);
    let mut b = vec![BigRational::zero(); r];
    b.push(BigRational::one());
    (0..n)
        .map(|i| {
            let mut cost = vec![BigRational::zero(); n];
            cost[i] = BigRational::one();
            matches!(maximize(&a, &b, &cost).optimal(), Some((_, v)) if v.is_positive())
        })
        .collect()
}

fn margins<F: Field>(w: &[Vec<F>]) -> Margins<F> {
    Margins { eut: vanishing_combination(w), sep: box_functional(w, &vec![true; w.len()]) }
}

fn normalize_sum<S: Real>(a: Vec<S>) -> Vec<S> {
    let s: S = a.iter().copied().sum();
    a.into_iter().map(|x| x / s).collect()
}

fn unit<S: Real>(v: Vec<S>) -> Vec<S> {
    let n = norm(&v);
    v.into_iter().map(|x| x / n).collect()
}

/// Unit-normalized span coordinates; scaling each vector does not change the kind.
fn float_coords<S: Real>(c: &VectorConfig<S>, span: &SpanBasis<S>) -> (Vec<Vec<f64>>, Vec<S>) {
    let mut scales = Vec::with_capacity(c.len());
    let w = c
        .vectors
        .iter()
        .map(|v| {
            let co = span.coords(v);
            let n = norm(&co);
            scales.push(n);
            co.iter().map(|&x| (x / n).as_f64()).collect()
        })
        .collect();
    (w, scales)
}

fn classify_float<S: Real>(c: &VectorConfig<S>) -> Result<EutClass<S>> {
    let span = c.span();
    let (w, scales) = float_coords(c, &span);
    let m = margins(&w);
    let lift = |tau: &[f64]| unit(span.lift(&tau.iter().map(|&x| S::lit(x)).collect::<Vec<_>>()));
    if let Some((t, a)) = &m.eut {
        if *t > MARGIN {
            // undo the unit scaling of the coordinates
            let coeffs = a.iter().zip(&scales).map(|(&ai, &s)| S::lit(ai) / s).collect();
            return Ok(EutClass { kind: EutKind::Eutactic, witness: Witness::Eutactic { coeffs: normalize_sum(coeffs) } });
        }
    }
    if m.sep.0 > MARGIN {
        return Ok(EutClass { kind: EutKind::Biased, witness: Witness::Biased { tau: lift(&m.sep.1) } });
    }
    Err(Error::ToleranceAmbiguous)
}

fn to_rational<S: Real>(v: S) -> BigRational {
    BigRational::from_float(v.as_f64()).expect("finite input")
}

fn from_rational<S: Real>(v: &BigRational) -> S {
    S::lit(Field::to_f64(v))
}

/// Ambient vectors scaled by their max-norm, as exact rationals.
fn exact_coords<S: Real>(c: &VectorConfig<S>) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let mut scales = Vec::with_capacity(c.len());
    let w = c
        .vectors
        .iter()
        .map(|v| {
            let q: Vec<BigRational> = v.iter().map(|&x| to_rational(x)).collect();
            let m = q.iter().map(|x| x.abs()).fold(BigRational::zero(), |a, b| if b > a { b } else { a });
            let out = q.iter().map(|x| x / &m).collect();
            scales.push(m);
            out
        })
        .collect();
    (w, scales)
}

fn classify_exact<S: Real>(c: &VectorConfig<S>) -> EutClass<S> {
    let span = c.span();
    let (w, scales) = exact_coords(c);
    let project = |tau: &[BigRational]| {
        let amb: Vec<S> = tau.iter().map(from_rational).collect();
        unit(span.lift(&span.coords(&amb)))
    };
    let rescale = |a: &[BigRational]| {
        let coeffs: Vec<BigRational> = a.iter().zip(&scales).map(|(ai, s)| ai / s).collect();
        let sum = coeffs.iter().fold(BigRational::zero(), |acc, x| acc + x);
        coeffs.iter().map(|x| from_rational::<S>(&(x / &sum))).collect::<Vec<S>>()
    };
    let m = margins(&w);
    match m.eut {
        Some((t, a)) if t.is_positive() => {
            EutClass { kind: EutKind::Eutactic, witness: Witness::Eutactic { coeffs: rescale(&a) } }
        }
        Some((_, a)) => {
            // origin on the relative boundary: separate the off-face vectors strictly
            let off: Vec<bool> = face_indices(&w).into_iter().map(|f| !f).collect();
            let (_, tau) = box_functional(&w, &off);
            EutClass { kind: EutKind::SemiEutactic, witness: Witness::SemiEutactic { coeffs: rescale(&a), tau: project(&tau) } }
        }
        None => EutClass { kind: EutKind::Biased, witness: Witness::Biased { tau: project(&m.sep.1) } },
    }
}

/// Classifies `c` with the default backend (floating with exact fallback).
pub fn classify<S: Real>(c: &VectorConfig<S>) -> Result<EutClass<S>> {
    classify_with(c, Backend::Auto)
}

pub fn classify_with<S: Real>(c: &VectorConfig<S>, backend: Backend) -> Result<EutClass<S>> {
    match backend {
        Backend::Float => classify_float(c),
        Backend::Exact => Ok(classify_exact(c)),
        Backend::Auto => match classify_float(c) {
            Err(Error::ToleranceAmbiguous) => Ok(classify_exact(c)),
            other => other,
        },
    }
}

/// `max_{|τ| = 1, τ ∈ span} min_i ⟨v_i, τ⟩`.
///
/// Negative exactly for eutactic, zero for semi-eutactic and positive for
/// biased configurations. For biased input an LP over `⟨v_i, τ⟩ ≥ m` is
/// refined by supporting hyperplanes of the unit ball; otherwise the value is
/// minus the distance from the origin to the relative boundary of the hull.
pub fn minimax_score<S: Real>(c: &VectorConfig<S>) -> Result<S> {
    let class = classify(c)?;
    let span = c.span();
    let w: Vec<Vec<f64>> = c.vectors.iter().map(|v| span.coords(v).iter().map(|x| x.as_f64()).collect()).collect();
    // an exact verdict below floating resolution keeps its sign
    Ok(S::lit(match class.kind {
        EutKind::SemiEutactic => 0.0,
        EutKind::Biased => ball_minimax(&w).max(f64::MIN_POSITIVE),
        EutKind::Eutactic => (-boundary_distance(&w)).min(-f64::MIN_POSITIVE),
    }))
}

/// Cutting-plane solution of `max_{|τ| ≤ 1} min_i ⟨w_i, τ⟩`.
fn ball_minimax(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    let r = w[0].len();
    let mut cuts: Vec<Vec<f64>> = Vec::new();
    for k in 0..r {
        for s in [1.0, -1.0] {
            let mut u = vec![0.0; r];
            u[k] = s;
            cuts.push(u);
        }
    }
    let mut best = f64::NEG_INFINITY;
    for _ in 0..500 {
        // columns: τ⁺ (r), τ⁻ (r), m⁺, m⁻, slack (n), cut slack (cuts)
        let width = 2 * r + 2 + n + cuts.len();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, v) in w.iter().enumerate() {
            let mut row = vec![0.0; width];
            for k in 0..r {
                row[k] = v[k];
                row[r + k] = -v[k];
            }
            row[2 * r] = -1.0;
            row[2 * r + 1] = 1.0;
            row[2 * r + 2 + i] = -1.0;
            a.push(row);
            b.push(0.0);
        }
        for (j, u) in cuts.iter().enumerate() {
            let mut row = vec![0.0; width];
            for k in 0..r {
                row[k] = u[k];
                row[r + k] = -u[k];
            }
            row[2 * r + 2 + n + j] = 1.0;
            a.push(row);
            b.push(1.0);
        }
        let mut cost = vec![0.0; width];
        cost[2 * r] = 1.0;
        cost[2 * r + 1] = -1.0;
        let LpOutcome::Optimal { x, value: upper } = maximize(&a, &b, &cost) else {
            break;
        };
        let tau: Vec<f64> = (0..r).map(|k| x[k] - x[r + k]).collect();
        let tn = norm(&tau);
        if tn == 0.0 {
            return 0.0;
        }
        let unit_tau: Vec<f64> = tau.iter().map(|t| t / tn).collect();
        let lower = w.iter().map(|v| dot(v, &unit_tau)).fold(f64::INFINITY, f64::min);
        best = best.max(lower);
        let repeated = cuts.iter().any(|u| dot(u, &unit_tau) > 1.0 - 1e-15);
        if upper - best <= 1e-11 * upper.abs().max(1.0) || repeated {
            break;
        }
        cuts.push(unit_tau);
    }
    best
}

fn det(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut d = 1.0;
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs())).expect("nonempty");
        if m[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            m.swap(piv, col);
            d = -d;
        }
        d *= m[col][col];
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for c in col..n {
                m[r][c] -= f * m[col][c];
            }
        }
    }
    d
}

/// Distance from the origin to the boundary of `conv(w)`, for full-dimensional `w`
/// containing the origin in its interior. Facets are found by enumerating
/// `r`-subsets whose hyperplane leaves every point on one side.
fn boundary_distance(w: &[Vec<f64>]) -> f64 {
    let n = w.len();
    let r = w[0].len();
    let scale = w.iter().map(|v| norm(v)).fold(0.0, f64::max);
    let mut best = f64::INFINITY;
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        // normal by cofactor expansion of the rows p_j − p_0
        let rows: Vec<Vec<f64>> = idx[1..].iter().map(|&j| w[j].iter().zip(&w[idx[0]]).map(|(a, b)| a - b).collect()).collect();
        let normal: Vec<f64> = (0..r)
            .map(|k| {
                let minor: Vec<Vec<f64>> =
                    rows.iter().map(|row| row.iter().enumerate().filter(|&(c, _)| c != k).map(|(_, &v)| v).collect()).collect();
                let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                if r == 1 {
                    1.0
                } else {
                    sign * det(minor)
                }
            })
            .collect();
        let nn = norm(&normal);
        if nn > 1e-12 * scale.powi(r as i32 - 1).max(1e-300) {
            let u: Vec<f64> = normal.iter().map(|x| x / nn).collect();
            let h = dot(&u, &w[idx[0]]);
            let side = w.iter().map(|v| dot(&u, v) - h);
            let tol = 1e-10 * scale;
            let (mut above, mut below) = (false, false);
            for s in side {
                above |= s > tol;
                below |= s < -tol;
            }
            if !(above && below) {
                best = best.min(h.abs());
            }
        }
        // next r-subset in lexicographic order
        let mut i = r;
        while i > 0 && idx[i - 1] == n - r + i - 1 {
            i -= 1;
        }
        if i == 0 {
            break;
        }
        idx[i - 1] += 1;
        for j in i..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
    best
}

/// Numerical rank of the configuration.
pub fn eutactic_rank<S: Real>(c: &VectorConfig<S>) -> usize {
    c.span().rank()
}

/// Indices maximizing `⟨v_j, τ⟩`, after projecting `τ` onto the span.
pub fn fan_j<S: Real>(c: &VectorConfig<S>, tau: &[S]) -> Result<Vec<usize>> {
    if tau.len() != c.dim() {
        return Err(Error::ShapeMismatch(format!("direction has dimension {}, expected {}", tau.len(), c.dim())));
    }
    let span = c.span();
    let proj = span.lift(&span.coords(tau));
    if norm(&proj) <= S::lit(ZERO_NORM) * norm(tau).max(S::one()) {
        return Err(Error::PerpendicularInput);
    }
    let ips: Vec<S> = c.vectors.iter().map(|v| dot(v, &proj)).collect();
    let max = ips.iter().copied().fold(S::neg_infinity(), S::max);
    let tol = S::tol(MARGIN) * max.abs().max(S::one());
    Ok((0..c.len()).filter(|&i| ips[i] >= max - tol).collect())
}

/// Splits a semi-eutactic configuration into the indices on the supporting
/// face through the origin (`I_e`) and the rest (`I_b`).
///
/// Index `i` belongs to `I_e` iff some vanishing nonnegative combination
/// gives it positive weight, decided by one exact LP per index.
pub fn semi_eutactic_split<S: Real>(c: &VectorConfig<S>) -> Result<(Vec<usize>, Vec<usize>)> {
    if classify(c)?.kind != EutKind::SemiEutactic {
        return Err(Error::NotSemiEutactic);
    }
    let (w, _) = exact_coords(c);
    let (ie, ib): (Vec<(usize, bool)>, Vec<(usize, bool)>) = face_indices(&w).into_iter().enumerate().partition(|&(_, f)| f);
    Ok((ie.into_iter().map(|p| p.0).collect(), ib.into_iter().map(|p| p.0).collect()))
}

/// Minimal length differentials at `p` in tangent-frame coordinates.
pub fn minimal_gradients<S: Real>(p: &MarkovPoint<S>) -> Result<VectorConfig<S>> {
    let frame = tangent_frame(p)?;
    let (_, slopes) = systole(p);
    VectorConfig::new(slopes.into_iter().map(|s| frame.components(&slope_entry(p, s).d_length).to_vec()).collect())
}

/// Eutacticity class and rank of the minimal gradients at `p`.
pub fn surface_classify<S: Real>(p: &MarkovPoint<S>) -> Result<(EutClass<S>, usize)> {
    let c = minimal_gradients(p)?;
    Ok((classify(&c)?, eutactic_rank(&c)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(v: &[&[f64]]) -> VectorConfig<f64> {
        VectorConfig::new(v.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn documented_kinds() {
        let c = cfg(&[&[1.0, 0.0], &[-1.0, 0.0]]);
        let k = classify(&c).unwrap();
        assert_eq!(k.witness, Witness::Eutactic { coeffs: vec![0.5, 0.5] });
        assert_eq!(classify(&cfg(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap().kind, EutKind::Biased);
        let semi = cfg(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]]);
        let k = classify(&semi).unwrap();
        assert_eq!(k.kind, EutKind::SemiEutactic);
        assert!(k.verifies(&semi, 1e-9));
        assert_eq!(classify_with(&semi, Backend::Float), Err(Error::ToleranceAmbiguous));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(VectorConfig::<f64>::new(vec![]), Err(Error::DegenerateInput(_))));
        assert!(matches!(VectorConfig::new(vec![vec![0.0, 0.0]]), Err(Error::DegenerateInput(_))));
        assert!(matches!(VectorConfig::new(vec![vec![1.0], vec![1.0, 2.0]]), Err(Error::ShapeMismatch(_))));
    }

    #[test]
    fn single_vector_is_biased() {
        let c = cfg(&[&[0.0, 3.0]]);
        let k = classify(&c).unwrap();
        assert_eq!(k.kind, EutKind::Biased);
        assert!(k.verifies(&c, 1e-9));
        assert_eq!(eutactic_rank(&c), 1);
    }

    #[test]
    fn scores() {
        let cross = cfg(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.0, -1.0]]);
        assert!((minimax_score(&cross).unwrap() + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let b = minimax_score(&cfg(&[&[1.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert!((b - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-10, "{b}");
        assert_eq!(minimax_score(&cfg(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0]])).unwrap(), 0.0);
    }

    #[test]
    fn fans_and_splits() {
        let cross = cfg(&[&[1.0, 0.0], &[0.0, 1.0], &[-1.0, 0.0], &[0.0, -1.0]]);
        assert_eq!(fan_j(&cross, &[1.0, 0.0]).unwrap(), vec![0]);
        assert_eq!(fan_j(&cross, &[1.0, 1.0]).unwrap(), vec![0, 1]);
        let line = cfg(&[&[1.0, 0.0], &[-2.0, 0.0]]);
        assert_eq!(fan_j(&line, &[0.0, 1.0]), Err(Error::PerpendicularInput));
        let c = cfg(&[&[1.0, 0.0], &[-1.0, 0.0], &[0.0, 1.0], &[0.5, 0.5]]);
        assert_eq!(semi_eutactic_split(&c).unwrap(), (vec![0, 1], vec![2, 3]));
        assert_eq!(semi_eutactic_split(&cross), Err(Error::NotSemiEutactic));
    }
}
