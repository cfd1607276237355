//! Integer Morse chain complexes and their homology.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integer matrix as rows.
pub type IntMatrix = Vec<Vec<i64>>;

/// A finite chain complex `C_top → … → C_1 → C_0` over the integers.
///
/// `boundaries[k − 1]` is `∂_k : C_k → C_{k−1}`, a `degrees[k−1] × degrees[k]`
/// matrix whose column `j` is the boundary of generator `j` of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MorseComplex {
    pub degrees: Vec<usize>,
    pub boundaries: Vec<IntMatrix>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub names: Vec<Vec<String>>,
}

/// An entry of `∂_k ∘ ∂_{k+1}` that is not zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// Degree `k` of the composite `∂_k ∘ ∂_{k+1}`.
    pub degree: usize,
    pub row: usize,
    pub col: usize,
    pub value: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyGroup {
    pub betti: usize,
    /// Invariant factors greater than 1.
    pub torsion: Vec<u64>,
}

impl std::fmt::Display for HomologyGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = Vec::new();
        match self.betti {
            0 => {}
            1 => parts.push("Z".into()),
            b => parts.push(format!("Z^{b}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join("+"))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyResult {
    pub fn bettis(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.betti).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating(self.groups.iter().map(|g| g.betti))
    }
}

impl std::fmt::Display for HomologyResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.groups.iter().enumerate().map(|(k, g)| format!("H{k}={g}")).collect();
        write!(f, "{}", parts.join(" "))
    }
}

fn alternating(v: impl Iterator<Item = usize>) -> i64 {
    v.enumerate().map(|(k, b)| if k % 2 == 0 { b as i64 } else { -(b as i64) }).sum()
}

fn mat_mul(a: &IntMatrix, b: &IntMatrix, inner: usize, cols: usize) -> Vec<Vec<i128>> {
    a.iter()
        .map(|row| (0..cols).map(|j| (0..inner).map(|k| row[k] as i128 * b[k][j] as i128).sum()).collect())
        .collect()
}

impl MorseComplex {
    pub fn new(degrees: Vec<usize>, boundaries: Vec<IntMatrix>) -> Result<Self> {
        let c = Self { degrees, boundaries, names: Vec::new() };
        c.check_shapes()?;
        Ok(c)
    }

    pub fn with_names(mut self, names: Vec<Vec<String>>) -> Result<Self> {
        if names.len() != self.degrees.len() || names.iter().zip(&self.degrees).any(|(n, &d)| n.len() != d) {
            return Err(Error::ShapeMismatch("generator names do not match the degree counts".into()));
        }
        self.names = names;
        Ok(self)
    }

    /// Highest degree.
    pub fn top(&self) -> usize {
        self.degrees.len().saturating_sub(1)
    }

    /// `∂_k` for `1 ≤ k ≤ top`.
    pub fn boundary(&self, k: usize) -> &IntMatrix {
        &self.boundaries[k - 1]
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating(self.degrees.iter().copied())
    }

    fn check_shapes(&self) -> Result<()> {
        if self.degrees.is_empty() {
            return Err(Error::ShapeMismatch("no degrees".into()));
        }
        if self.boundaries.len() != self.degrees.len() - 1 {
            return Err(Error::ShapeMismatch(format!(
                "{} boundary matrices for {} degrees",
                self.boundaries.len(),
                self.degrees.len()
            )));
        }
        for (i, m) in self.boundaries.iter().enumerate() {
            let (rows, cols) = (self.degrees[i], self.degrees[i + 1]);
            // an empty matrix may be written as [] whatever its column count
            let ok = m.len() == rows && m.iter().all(|r| r.len() == cols) || rows == 0 && m.is_empty();
            if !ok {
                return Err(Error::ShapeMismatch(format!("boundary {} must be {rows}×{cols}", i + 1)));
            }
        }
        Ok(())
    }

    /// Nonzero entries of every `∂_k ∘ ∂_{k+1}`, computed exactly.
    pub fn validate(&self) -> Result<Vec<Violation>> {
        self.check_shapes()?;
        let mut out = Vec::new();
        for k in 1..self.top() {
            let prod = mat_mul(self.boundary(k), self.boundary(k + 1), self.degrees[k], self.degrees[k + 1]);
            for (row, r) in prod.iter().enumerate() {
                for (col, &value) in r.iter().enumerate() {
                    if value != 0 {
                        out.push(Violation { degree: k, row, col, value: value.clamp(i64::MIN as i128, i64::MAX as i128) as i64 });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Integral homology from the Smith normal forms of the boundaries.
    pub fn homology(&self) -> Result<HomologyResult> {
        let violations = self.validate()?;
        if let Some(v) = violations.first() {
            return Err(Error::NotAComplex { degree: v.degree, entries: violations.len() });
        }
        let top = self.top();
        let invariants: Vec<Vec<BigInt>> = (1..=top).map(|k| smith_invariants(self.boundary(k))).collect();
        let rank = |k: usize| if k == 0 || k > top { 0 } else { invariants[k - 1].len() };
        let groups = (0..=top)
            .map(|k| {
                let torsion = if k < top {
                    invariants[k]
                        .iter()
                        .filter(|d| **d > BigInt::one())
                        .map(|d| u64::try_from(d).unwrap_or(u64::MAX))
                        .collect()
                } else {
                    Vec::new()
                };
                HomologyGroup { betti: self.degrees[k] - rank(k) - rank(k + 1), torsion }
            })
            .collect();
        Ok(HomologyResult { groups })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("complexes serialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        c.check_shapes()?;
        if !c.names.is_empty() {
            return c.clone().with_names(c.names);
        }
        Ok(c)
    }
}

/// Nonzero invariant factors of an integer matrix, in divisibility order.
pub fn smith_invariants(m: &IntMatrix) -> Vec<BigInt> {
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&v| BigInt::from(v)).collect()).collect();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut out = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        // pivot: smallest nonzero magnitude in the remaining block
        let Some((pi, pj)) = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by(|&(i, j), &(k, l)| a[i][j].abs().cmp(&a[k][l].abs()))
        else {
            break;
        };
        a.swap(t, pi);
        for r in a.iter_mut() {
            r.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..rows {
            let q = a[i][t].div_floor(&a[t][t]);
            if !q.is_zero() {
                for j in t..cols {
                    let d = &q * &a[t][j];
                    a[i][j] -= d;
                }
            }
            clean &= a[i][t].is_zero();
        }
        for j in t + 1..cols {
            let q = a[t][j].div_floor(&a[t][t]);
            if !q.is_zero() {
                for i in t..rows {
                    let d = &q * &a[i][t];
                    a[i][j] -= d;
                }
            }
            clean &= a[t][j].is_zero();
        }
        if !clean {
            continue;
        }
        // the pivot must divide the rest; otherwise fold an offending row in
        let offending = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&a[i][j] % &a[t][t]).is_zero()));
        if let Some(i) = offending {
            for j in t..cols {
                let v = a[i][j].clone();
                a[t][j] += v;
            }
            continue;
        }
        out.push(a[t][t].abs());
        t += 1;
    }
    out
}

/// The complex of the six-sheeted cover of the compactified moduli space of
/// once-punctured tori: maxima `α, β`, saddles `a₁, a₂, a₃`, minima `b₁, b₂, b₃`.
pub fn m11_cover_complex() -> MorseComplex {
    let d1 = vec![vec![0, -1, 1], vec![1, 0, -1], vec![-1, 1, 0]];
    let d2 = vec![vec![1, -1], vec![1, -1], vec![1, -1]];
    let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
    MorseComplex::new(vec![3, 3, 2], vec![d1, d2])
        .and_then(|c| c.with_names(vec![names(&["b1", "b2", "b3"]), names(&["a1", "a2", "a3"]), names(&["alpha", "beta"])]))
        .expect("fixture shapes are consistent")
}

/// A finite group acting on a complex by chain maps: one integer matrix per
/// group element and degree.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeckAction {
    pub elements: Vec<Vec<IntMatrix>>,
}

fn signed_permutation(n: usize, perm: &[usize], sign: i64) -> IntMatrix {
    let mut m = vec![vec![0; n]; n];
    for (i, &p) in perm.iter().enumerate() {
        m[p][i] = sign;
    }
    m
}

/// Deck action of `S₃` on [`m11_cover_complex`].
///
/// A permutation `σ` sends `b_i ↦ b_{σ(i)}`. Even `σ` send `a_i ↦ a_{σ(i)}`
/// and fix `α, β`; odd `σ` send `a_i ↦ −a_{σ(i)}` and swap `α ↔ β`.
pub fn m11_deck_action() -> DeckAction {
    let perms: [([usize; 3], bool); 6] = [
        ([0, 1, 2], true),
        ([1, 2, 0], true),
        ([2, 0, 1], true),
        ([0, 2, 1], false),
        ([2, 1, 0], false),
        ([1, 0, 2], false),
    ];
    let elements = perms
        .iter()
        .map(|&(p, even)| {
            let sign = if even { 1 } else { -1 };
            let top = if even { signed_permutation(2, &[0, 1], 1) } else { signed_permutation(2, &[1, 0], 1) };
            vec![signed_permutation(3, &p, 1), signed_permutation(3, &p, sign), top]
        })
        .collect();
    DeckAction { elements }
}

fn rational_rank(m: &[Vec<BigRational>]) -> usize {
    let mut a: Vec<Vec<BigRational>> = m.to_vec();
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).find(|&r| !a[r][c].is_zero()) else { continue };
        a.swap(rank, p);
        for r in 0..rows {
            if r != rank && !a[r][c].is_zero() {
                let f = &a[r][c] / &a[rank][c];
                for j in c..cols {
                    let d = &f * &a[rank][j];
                    a[r][j] -= d;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn to_rational(m: &[Vec<i128>]) -> Vec<Vec<BigRational>> {
    m.iter().map(|r| r.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()).collect()
}

/// Betti numbers of the invariant subcomplex over `ℚ`, which equal those of
/// the quotient by the transfer isomorphism.
///
/// With `P_k = Σ_g g_k` the averaging map,
/// `h_k = rank P_k − rank ∂_k P_k − rank ∂_{k+1} P_{k+1}`.
pub fn invariant_rational_homology(c: &MorseComplex, action: &DeckAction) -> Result<Vec<usize>> {
    let violations = c.validate()?;
    if let Some(v) = violations.first() {
        return Err(Error::NotAComplex { degree: v.degree, entries: violations.len() });
    }
    let top = c.top();
    for g in &action.elements {
        if g.len() != c.degrees.len() || g.iter().zip(&c.degrees).any(|(m, &n)| m.len() != n || m.iter().any(|r| r.len() != n)) {
            return Err(Error::ShapeMismatch("deck element does not match the degrees".into()));
        }
        for k in 1..=top {
            let lhs = mat_mul(c.boundary(k), &g[k], c.degrees[k], c.degrees[k]);
            let rhs = mat_mul(&g[k - 1], c.boundary(k), c.degrees[k - 1], c.degrees[k]);
            if lhs != rhs {
                return Err(Error::Precondition(format!("deck element does not commute with the boundary in degree {k}")));
            }
        }
    }
    let averaging: Vec<IntMatrix> = (0..=top)
        .map(|k| {
            let n = c.degrees[k];
            let mut p = vec![vec![0i64; n]; n];
            for g in &action.elements {
                for i in 0..n {
                    for j in 0..n {
                        p[i][j] += g[k][i][j];
                    }
                }
            }
            p
        })
        .collect();
    let wide = |m: &IntMatrix| m.iter().map(|r| r.iter().map(|&v| v as i128).collect()).collect::<Vec<Vec<i128>>>();
    let rank_p: Vec<usize> = averaging.iter().map(|p| rational_rank(&to_rational(&wide(p)))).collect();
    let rank_dp: Vec<usize> = (0..=top)
        .map(|k| {
            if k == 0 {
                0
            } else {
                rational_rank(&to_rational(&mat_mul(c.boundary(k), &averaging[k], c.degrees[k], c.degrees[k])))
            }
        })
        .collect();
    Ok((0..=top).map(|k| rank_p[k] - rank_dp[k] - if k < top { rank_dp[k + 1] } else { 0 }).collect())
}

/// Morse index of a nodal critical point assembled from components.
pub fn index_additivity(components: &[usize]) -> usize {
    components.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_of_two() {
        assert_eq!(smith_invariants(&vec![vec![2]]), vec![BigInt::from(2)]);
        assert_eq!(smith_invariants(&vec![vec![2, 0], vec![0, 3]]), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn fixture_columns() {
        let c = m11_cover_complex();
        let beta: Vec<i64> = c.boundary(2).iter().map(|r| r[1]).collect();
        assert_eq!(beta, vec![-1, -1, -1]);
        let a1: Vec<i64> = c.boundary(1).iter().map(|r| r[0]).collect();
        assert_eq!(a1, vec![0, 1, -1]);
    }
}
