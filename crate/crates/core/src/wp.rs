//! Weil–Petersson pairings of length gradients.
//!
//! The pairing of two length gradients is the double-coset sum
//!
//! ```text
//! ⟨∇l_a, ∇l_b⟩ = (2/π) (l_a δ_ab + Σ_{⟨A⟩ g ⟨B⟩} R(u_g)),   R(u) = u ln|(u+1)/(u−1)| − 2,
//! ```
//!
//! where `u_g = |2 tr(A gBg⁻¹) − tr A tr B| / √((tr²A − 4)(tr²B − 4))` is the
//! hyperbolic cosine of the distance between the axes (or the cosine of their
//! angle when they cross). The sum runs over word-length shells of a free
//! basis `{X, Y}` of the fundamental group, with `X` the holonomy of `a` and
//! `Y` that of a Farey neighbor.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{inv2, mat2_vec};
use crate::scalar::Real;
use crate::torus::{shortest_neighbor, slope_entry, slope_trace, tangent_frame, MarkovPoint, Slope};

/// Relative size of the last shell above which a sum counts as unconverged.
pub const SHELL_TOL: f64 = 0.01;
/// Condition number above which two differentials count as parallel.
pub const BASIS_COND_MAX: f64 = 1e8;

type M2<S> = [[S; 2]; 2];

fn mul<S: Real>(a: &M2<S>, b: &M2<S>) -> M2<S> {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

fn inv<S: Real>(a: &M2<S>) -> M2<S> {
    [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]
}

fn tr<S: Real>(a: &M2<S>) -> S {
    a[0][0] + a[1][1]
}

/// `R(u) = u ln|(u+1)/(u−1)| − 2`, by its series for large `u`.
pub fn riera_kernel<S: Real>(u: S) -> S {
    let u = u.abs();
    if u > S::lit(8.0) {
        let inv2u = S::one() / (u * u);
        let mut term = inv2u;
        let mut sum = S::zero();
        let mut k = 1;
        while term > S::epsilon() * sum.max(S::min_positive_value()) || k == 1 {
            sum += term / S::lit((2 * k + 1) as f64);
            term = term * inv2u;
            k += 1;
        }
        S::lit(2.0) * sum
    } else {
        u * ((u + S::one()) / (u - S::one())).abs().ln() - S::lit(2.0)
    }
}

/// Generators `X`, `Y` of a holonomy with `tr X = x`, `tr Y = y`, `tr XY = z`.
fn generators<S: Real>(x: S, y: S, z: S) -> (M2<S>, M2<S>) {
    let s = (z + (z * z - S::lit(4.0)).sqrt()) / S::lit(2.0);
    ([[x, -S::one()], [S::one(), S::zero()]], [[S::zero(), s], [-S::one() / s, y]])
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Cosets {
    /// `⟨X⟩\Γ/⟨X⟩` without the trivial coset.
    Same,
    /// `⟨X⟩\Γ/⟨Y⟩`.
    Neighbors,
}

/// Letters: 0 = X, 1 = X⁻¹, 2 = Y, 3 = Y⁻¹.
fn inverse_letter(l: usize) -> usize {
    l ^ 1
}

/// Per-shell sums of `R(u_g)` for shells `0..=trunc`.
fn shell_sums<S: Real>(gens: &[M2<S>; 4], a: &M2<S>, b: &M2<S>, kind: Cosets, trunc: usize) -> Vec<S> {
    let ta = tr(a);
    let tb = tr(b);
    let denom = ((ta * ta - S::lit(4.0)) * (tb * tb - S::lit(4.0))).sqrt();
    let term = |g: &M2<S>| {
        let c = mul(&mul(g, b), &inv(g));
        let u = (S::lit(2.0) * tr(&mul(a, &c)) - ta * tb).abs() / denom;
        riera_kernel(u)
    };
    let admissible_last = |l: usize| match kind {
        Cosets::Same => l >= 2,
        Cosets::Neighbors => l < 2,
    };
    let mut shells = vec![S::zero(); trunc + 1];
    if kind == Cosets::Neighbors {
        shells[0] = term(&[[S::one(), S::zero()], [S::zero(), S::one()]]);
    }
    // words start with Y^±; each first letter is summed independently
    let per_first: Vec<Vec<S>> = [2usize, 3]
        .par_iter()
        .map(|&first| {
            let mut acc = vec![S::zero(); trunc + 1];
            let mut stack = vec![(gens[first], first, 1usize)];
            while let Some((g, last, len)) = stack.pop() {
                if admissible_last(last) {
                    acc[len] += term(&g);
                }
                if len < trunc {
                    for l in 0..4 {
                        if l != inverse_letter(last) {
                            stack.push((mul(&g, &gens[l]), l, len + 1));
                        }
                    }
                }
            }
            acc
        })
        .collect();
    for acc in per_first {
        for (s, v) in shells.iter_mut().zip(acc) {
            *s += v;
        }
    }
    shells
}

/// A truncated pairing and its convergence indicator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Pairing<S> {
    pub value: S,
    /// Contribution of the outermost word-length shell.
    pub last_shell: S,
    pub truncation: usize,
}

fn pairing_in_basis<S: Real>(p: &MarkovPoint<S>, a: Slope, b: Slope, trunc: usize) -> Result<Pairing<S>> {
    let same = a == b;
    let c = if same { a.neighbor() } else { b };
    let ta = slope_trace(p, a);
    let tc = slope_trace(p, c);
    let tac = slope_trace(p, a.sum(c));
    let (x, y) = generators(ta, tc, tac);
    let gens = [x, inv(&x), y, inv(&y)];
    let (b, kind) = if same { (x, Cosets::Same) } else { (y, Cosets::Neighbors) };
    let shells = shell_sums(&gens, &x, &b, kind, trunc);
    let la = slope_entry(p, a).length;
    let diag = if same { la } else { S::zero() };
    let scale = S::lit(2.0) / S::PI();
    let total = scale * (diag + shells.iter().copied().sum::<S>());
    let last_shell = scale * shells[trunc];
    // off-diagonal sums can nearly cancel, so compare against the shell magnitudes
    let magnitude = scale * (diag + shells.iter().map(|s| s.abs()).sum::<S>());
    if last_shell.abs() > S::lit(SHELL_TOL) * magnitude {
        return Err(Error::NotConverged { last_shell: last_shell.as_f64(), total: total.as_f64() });
    }
    Ok(Pairing { value: total, last_shell, truncation: trunc })
}

/// `⟨∇l_a, ∇l_b⟩_WP` summed over word-length shells up to `trunc`.
///
/// Equal or neighboring slopes are summed directly; other pairs go through
/// the metric built from the Gram matrix of the smaller slope and a neighbor.
pub fn wp_pairing<S: Real>(p: &MarkovPoint<S>, a: Slope, b: Slope, trunc: usize) -> Result<Pairing<S>> {
    if trunc == 0 {
        return Err(Error::InvalidParams("truncation must be at least 1".into()));
    }
    if a == b {
        return pairing_in_basis(p, a, a, trunc);
    }
    if a.is_neighbor(b) {
        // truncated shells depend on the order of the basis
        return pairing_in_basis(p, a.min(b), a.max(b), trunc);
    }
    // both orders use the basis of the smaller slope, so the result is symmetric
    let s = a.min(b);
    let g = pairing_matrix(p, [s, s.neighbor()], trunc)?;
    let minv = inverse_metric(p, &g)?;
    let (da, db) = (tangent_differential(p, a)?, tangent_differential(p, b)?);
    let value = bilinear2(&minv, &da, &db);
    let abs_shell = [[g.last_shell[0][0].abs(), g.last_shell[0][1].abs()], [g.last_shell[1][0].abs(), g.last_shell[1][1].abs()]];
    let e = differentials(p, &g.basis)?;
    let et_inv = inv2(&transpose(&e)).ok_or(Error::BasisDegenerate(f64::INFINITY))?;
    let (ca, cb) = (mat2_vec(&et_inv, &da), mat2_vec(&et_inv, &db));
    let last_shell = bilinear2(&abs_shell, &ca.map(|x| x.abs()), &cb.map(|x| x.abs()));
    Ok(Pairing { value, last_shell, truncation: trunc })
}

fn bilinear2<S: Real>(m: &M2<S>, u: &[S; 2], v: &[S; 2]) -> S {
    u[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + u[1] * (m[1][0] * v[0] + m[1][1] * v[1])
}

/// Inverse metric `E⁻¹ G E⁻ᵀ` in tangent-frame components.
pub fn inverse_metric<S: Real>(p: &MarkovPoint<S>, gram: &PairingMatrix<S>) -> Result<[[S; 2]; 2]> {
    let e = differentials(p, &gram.basis)?;
    let einv = inv2(&e).ok_or(Error::BasisDegenerate(f64::INFINITY))?;
    let eg = mul(&einv, &gram.gram);
    Ok(mul(&eg, &transpose(&einv)))
}

/// Metric `Eᵀ G⁻¹ E` in tangent-frame components.
pub fn metric<S: Real>(p: &MarkovPoint<S>, gram: &PairingMatrix<S>) -> Result<[[S; 2]; 2]> {
    let e = differentials(p, &gram.basis)?;
    let ginv = inv2(&gram.gram).ok_or(Error::BasisDegenerate(f64::INFINITY))?;
    Ok(mul(&mul(&transpose(&e), &ginv), &e))
}

/// Gram matrix of `{∇l_a, ∇l_b}` for Farey neighbors `a`, `b`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct PairingMatrix<S> {
    pub basis: [Slope; 2],
    pub gram: [[S; 2]; 2],
    pub last_shell: [[S; 2]; 2],
    pub truncation: usize,
    /// Every summed term past the crossing term is positive, so the
    /// truncated entries are lower bounds.
    pub monotone_lower: bool,
}

pub fn pairing_matrix<S: Real>(p: &MarkovPoint<S>, basis: [Slope; 2], trunc: usize) -> Result<PairingMatrix<S>> {
    let [a, b] = basis;
    if !a.is_neighbor(b) {
        return Err(Error::InvalidParams(format!("basis slopes {a} and {b} are not Farey neighbors")));
    }
    let aa = pairing_in_basis(p, a, a, trunc)?;
    let bb = pairing_in_basis(p, b, b, trunc)?;
    let ab = pairing_in_basis(p, a, b, trunc)?;
    let m = PairingMatrix {
        basis,
        gram: [[aa.value, ab.value], [ab.value, bb.value]],
        last_shell: [[aa.last_shell, ab.last_shell], [ab.last_shell, bb.last_shell]],
        truncation: trunc,
        monotone_lower: true,
    };
    let det = m.gram[0][0] * m.gram[1][1] - m.gram[0][1] * m.gram[0][1];
    if !(det > S::zero() && m.gram[0][0] > S::zero()) {
        return Err(Error::NotConverged { last_shell: m.last_shell[1][1].as_f64(), total: det.as_f64() });
    }
    Ok(m)
}

fn transpose<S: Real>(m: &M2<S>) -> M2<S> {
    [[m[0][0], m[1][0]], [m[0][1], m[1][1]]]
}

fn tangent_differential<S: Real>(p: &MarkovPoint<S>, s: Slope) -> Result<[S; 2]> {
    Ok(tangent_frame(p)?.components(&slope_entry(p, s).d_length))
}

/// Rows `dl_a`, `dl_b` in tangent-frame components.
///
/// The condition number is taken after scaling both rows to unit length, so
/// it measures only the angle between the differentials.
fn differentials<S: Real>(p: &MarkovPoint<S>, basis: &[Slope; 2]) -> Result<M2<S>> {
    let e = [tangent_differential(p, basis[0])?, tangent_differential(p, basis[1])?];
    let cond = basis_condition(p, basis)?;
    if !(cond <= S::lit(BASIS_COND_MAX)) {
        return Err(Error::BasisDegenerate(cond.as_f64()));
    }
    Ok(e)
}

/// `1 / |sin θ|` for the angle `θ` between `dl_a` and `dl_b`.
pub fn basis_condition<S: Real>(p: &MarkovPoint<S>, basis: &[Slope; 2]) -> Result<S> {
    let (a, b) = (tangent_differential(p, basis[0])?, tangent_differential(p, basis[1])?);
    Ok(a[0].hypot(a[1]) * b[0].hypot(b[1]) / (a[0] * b[1] - a[1] * b[0]).abs())
}

/// Basis `[a, b]` for raising covectors near the systole slope `a`: the
/// first of the shortest neighbor `n`, `n + a`, `n − a` whose condition is
/// within a factor 4 of the best.
pub fn wp_basis<S: Real>(p: &MarkovPoint<S>, a: Slope) -> Result<[Slope; 2]> {
    let n = shortest_neighbor(p, a).slope;
    let cands = [n, n.sum(a), n.diff(a)];
    let conds = cands.iter().map(|&b| basis_condition(p, &[a, b])).collect::<Result<Vec<S>>>()?;
    let best = conds.iter().copied().fold(S::infinity(), S::min);
    let k = conds.iter().position(|&c| c <= S::lit(4.0) * best).unwrap_or(0);
    Ok([a, cands[k]])
}

/// Coefficients `c` with `covector = c_a dl_a + c_b dl_b`.
pub fn basis_coefficients<S: Real>(p: &MarkovPoint<S>, basis: &[Slope; 2], covector: &[S; 2]) -> Result<[S; 2]> {
    let e = differentials(p, basis)?;
    let et_inv = inv2(&transpose(&e)).ok_or(Error::BasisDegenerate(f64::INFINITY))?;
    Ok(mat2_vec(&et_inv, covector))
}

/// WP gradient (tangent-frame components) of the covector with tangent-frame
/// components `covector`.
///
/// With `covector = c_a dl_a + c_b dl_b`, the vector is `Σ c_i ∇l_i`, whose
/// frame components are `E⁻¹ G c` for `E` the matrix of differentials.
pub fn wp_gradient<S: Real>(p: &MarkovPoint<S>, covector: &[S; 2], gram: &PairingMatrix<S>) -> Result<[S; 2]> {
    let e = differentials(p, &gram.basis)?;
    let einv = inv2(&e).ok_or(Error::BasisDegenerate(f64::INFINITY))?;
    let c = mat2_vec(&inv2(&transpose(&e)).ok_or(Error::BasisDegenerate(f64::INFINITY))?, covector);
    Ok(mat2_vec(&einv, &mat2_vec(&gram.gram, &c)))
}

/// WP gradient of `covector` in the basis of the systole slope `a` and its
/// shortest neighbor `b`; see [`wp_raise`].
pub fn wp_gradient_adaptive<S: Real>(
    p: &MarkovPoint<S>,
    covector: &[S; 2],
    basis: [Slope; 2],
    trunc: usize,
) -> Result<[S; 2]> {
    wp_raise(p, basis, &basis_coefficients(p, &basis, covector)?, trunc)
}

/// Frame components of `c_a ∇l_a + c_b ∇l_b`, skipping `⟨∇l_b, ∇l_b⟩` when
/// its contribution is negligible.
///
/// Near the boundary `⟨∇l_b, ∇l_b⟩` needs about `1/l_a` shells. It is
/// skipped when `|c_b| (l_b + l_b² e^{l_b/2}) ≤ 1e−16 |c_a| l_a`, the left
/// side bounding its contribution and the right side that of `⟨∇l_a, ∇l_a⟩`.
pub fn wp_raise<S: Real>(p: &MarkovPoint<S>, basis: [Slope; 2], c: &[S; 2], trunc: usize) -> Result<[S; 2]> {
    let e = differentials(p, &basis)?;
    let la = slope_entry(p, basis[0]).length;
    let lb = slope_entry(p, basis[1]).length;
    let aa = pairing_in_basis(p, basis[0], basis[0], trunc)?.value;
    let ab = pairing_in_basis(p, basis[0], basis[1], trunc)?.value;
    let bound_bb = lb + lb * lb * (lb / S::lit(2.0)).exp();
    let skip_bb = c[1].abs() * bound_bb <= S::lit(1e-16) * c[0].abs() * la;
    let bb = if skip_bb { S::zero() } else { pairing_in_basis(p, basis[1], basis[1], trunc)?.value };
    let gc = [aa * c[0] + ab * c[1], ab * c[0] + bb * c[1]];
    Ok(mat2_vec(&inv2(&e).ok_or(Error::BasisDegenerate(f64::INFINITY))?, &gc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_branches_agree() {
        for u in [8.0_f64 - 1e-9, 8.0 + 1e-9] {
            let direct = u * ((u + 1.0) / (u - 1.0)).ln() - 2.0;
            assert!((riera_kernel(u) - direct).abs() < 1e-13);
        }
        assert!((riera_kernel(100.0_f64) - 2.0 / (3.0 * 1e4)).abs() < 1e-8);
    }

    #[test]
    fn generators_realize_traces() {
        let (x, y) = generators(3.0_f64, 3.0, 3.0);
        assert_eq!(tr(&x), 3.0);
        assert!((tr(&y) - 3.0).abs() < 1e-15);
        assert!((tr(&mul(&x, &y)) - 3.0).abs() < 1e-12);
        assert!((tr(&mul(&x, &inv(&y))) - 6.0).abs() < 1e-12);
    }
}
