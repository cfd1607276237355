//! Small dense linear algebra on fixed-size arrays and short `Vec`s.

use crate::scalar::Real;

pub type Vec3<S> = [S; 3];
pub type Mat3<S> = [[S; 3]; 3];

pub fn dot3<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm3<S: Real>(a: &Vec3<S>) -> S {
    dot3(a, a).sqrt()
}

pub fn add3<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub3<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn scale3<S: Real>(a: &Vec3<S>, s: S) -> Vec3<S> {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// `a + s * b`
pub fn axpy3<S: Real>(a: &Vec3<S>, s: S, b: &Vec3<S>) -> Vec3<S> {
    [a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]]
}

pub fn cross3<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> Vec3<S> {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dist3<S: Real>(a: &Vec3<S>, b: &Vec3<S>) -> S {
    norm3(&sub3(a, b))
}

/// Quadratic form `uᵀ M v`.
pub fn bilinear3<S: Real>(m: &Mat3<S>, u: &Vec3<S>, v: &Vec3<S>) -> S {
    let mut acc = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            acc += u[i] * m[i][j] * v[j];
        }
    }
    acc
}

pub fn dot<S: Real>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn norm<S: Real>(a: &[S]) -> S {
    dot(a, a).sqrt()
}

/// Eigen-decomposition of the symmetric matrix `[[a, b], [b, c]]`.
///
/// Eigenvalues are returned in ascending order with unit eigenvectors.
pub fn sym2_eigen<S: Real>(a: S, b: S, c: S) -> ([S; 2], [[S; 2]; 2]) {
    let two = S::lit(2.0);
    let mean = (a + c) / two;
    let half_diff = (a - c) / two;
    let r = half_diff.hypot(b);
    let lo = mean - r;
    let hi = mean + r;
    if b == S::zero() {
        return if a <= c {
            ([a, c], [[S::one(), S::zero()], [S::zero(), S::one()]])
        } else {
            ([c, a], [[S::zero(), S::one()], [S::one(), S::zero()]])
        };
    }
    // eigenvector for hi: (b, hi - a) or (hi - c, b), whichever is larger
    let (u0, u1) = if (hi - a).abs() > (hi - c).abs() {
        (b, hi - a)
    } else {
        (hi - c, b)
    };
    let n = u0.hypot(u1);
    let vh = [u0 / n, u1 / n];
    let vl = [-vh[1], vh[0]];
    ([lo, hi], [vl, vh])
}

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
///
/// Returns ascending eigenvalues and the matching unit eigenvectors.
pub fn sym_eigen<S: Real>(m: &[Vec<S>]) -> (Vec<S>, Vec<Vec<S>>) {
    let n = m.len();
    let mut a: Vec<Vec<S>> = m.to_vec();
    let mut v: Vec<Vec<S>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { S::one() } else { S::zero() }).collect())
        .collect();
    for _sweep in 0..100 {
        let mut off = S::zero();
        let mut total = S::zero();
        for i in 0..n {
            for j in 0..n {
                let s = a[i][j] * a[i][j];
                total += s;
                if i != j {
                    off += s;
                }
            }
        }
        if off <= total * S::epsilon() * S::epsilon() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q] == S::zero() {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (S::lit(2.0) * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + S::one()).sqrt());
                let c = S::one() / (t * t + S::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let vkp = row[p];
                    let vkq = row[q];
                    row[p] = c * vkp - s * vkq;
                    row[q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
    let eigs = order.iter().map(|&i| a[i][i]).collect();
    let vecs = order.iter().map(|&i| (0..n).map(|k| v[k][i]).collect()).collect();
    (eigs, vecs)
}

/// Orthonormal basis of the span of a vector list, from a one-sided Jacobi SVD.
#[derive(Debug, Clone)]
pub struct SpanBasis<S> {
    /// Orthonormal basis vectors in ambient coordinates.
    pub basis: Vec<Vec<S>>,
    /// All singular values, descending.
    pub singular_values: Vec<S>,
}

impl<S: Real> SpanBasis<S> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of `v` in the basis.
    pub fn coords(&self, v: &[S]) -> Vec<S> {
        self.basis.iter().map(|b| dot(b, v)).collect()
    }

    /// Ambient vector with the given basis coordinates.
    pub fn lift(&self, c: &[S]) -> Vec<S> {
        let d = self.basis.first().map_or(0, |b| b.len());
        let mut out = vec![S::zero(); d];
        for (b, &ci) in self.basis.iter().zip(c) {
            for (o, &bk) in out.iter_mut().zip(b) {
                *o += ci * bk;
            }
        }
        out
    }
}

/// Span of `vectors`, keeping singular directions above `rel_tol` times the largest.
pub fn span_basis<S: Real>(vectors: &[Vec<S>], rel_tol: S) -> SpanBasis<S> {
    let mut cols: Vec<Vec<S>> = vectors.to_vec();
    let n = cols.len();
    for _sweep in 0..60 {
        let mut rotated = false;
        for i in 0..n {
            for j in (i + 1)..n {
                let alpha = dot(&cols[i], &cols[i]);
                let beta = dot(&cols[j], &cols[j]);
                let gamma = dot(&cols[i], &cols[j]);
                if gamma.abs() <= S::epsilon() * (alpha * beta).sqrt() || gamma == S::zero() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (S::lit(2.0) * gamma);
                let t = zeta.signum() / (zeta.abs() + (S::one() + zeta * zeta).sqrt());
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = c * t;
                let (ci, cj) = (cols[i].clone(), cols[j].clone());
                for k in 0..ci.len() {
                    cols[i][k] = c * ci[k] - s * cj[k];
                    cols[j][k] = s * ci[k] + c * cj[k];
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut pairs: Vec<(S, Vec<S>)> = cols.into_iter().map(|c| (norm(&c), c)).collect();
    pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let largest = pairs.first().map_or(S::zero(), |p| p.0);
    let singular_values = pairs.iter().map(|p| p.0).collect();
    let basis = pairs
        .into_iter()
        .filter(|(s, _)| *s > rel_tol * largest && *s > S::zero())
        .map(|(s, c)| c.into_iter().map(|x| x / s).collect())
        .collect();
    SpanBasis { basis, singular_values }
}

/// Solves `A x = b` by Gaussian elimination with partial pivoting.
pub fn solve<S: Real>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = b.len();
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, &bi)| {
            let mut r = row.clone();
            r.push(bi);
            r
        })
        .collect();
    let scale = a
        .iter()
        .flat_map(|r| r.iter())
        .fold(S::zero(), |acc, &x| acc.max(x.abs()));
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| {
            m[i][col]
                .abs()
                .partial_cmp(&m[j][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        })?;
        if m[piv][col].abs() <= scale * S::epsilon() * S::lit(16.0) {
            return None;
        }
        m.swap(col, piv);
        for r in (col + 1)..n {
            let f = m[r][col] / m[col][col];
            for k in col..=n {
                let t = m[col][k];
                m[r][k] -= f * t;
            }
        }
    }
    let mut x = vec![S::zero(); n];
    for r in (0..n).rev() {
        let mut acc = m[r][n];
        for k in (r + 1)..n {
            acc -= m[r][k] * x[k];
        }
        x[r] = acc / m[r][r];
    }
    Some(x)
}

/// Inverse of a 2×2 matrix, or `None` when singular.
pub fn inv2<S: Real>(m: &[[S; 2]; 2]) -> Option<[[S; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[0][1].abs()).max(m[1][0].abs()).max(m[1][1].abs());
    if det.abs() <= scale * scale * S::epsilon() {
        return None;
    }
    Some([[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]])
}

pub fn mat2_vec<S: Real>(m: &[[S; 2]; 2], v: &[S; 2]) -> [S; 2] {
    [m[0][0] * v[0] + m[0][1] * v[1], m[1][0] * v[0] + m[1][1] * v[1]]
}
