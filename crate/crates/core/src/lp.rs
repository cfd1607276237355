//! Dense two-phase simplex over an ordered [`Field`].
//!
//! Solves `maximize cᵀx subject to A x = b, x ≥ 0` with Bland's rule, so it
//! terminates on degenerate problems and is exact over rationals.

use crate::scalar::Field;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome<F> {
    Optimal { x: Vec<F>, value: F },
    Infeasible,
    Unbounded,
}

impl<F: Field> LpOutcome<F> {
    pub fn optimal(self) -> Option<(Vec<F>, F)> {
        match self {
            LpOutcome::Optimal { x, value } => Some((x, value)),
            _ => None,
        }
    }
}

struct Tableau<F> {
    rows: Vec<Vec<F>>,
    basis: Vec<usize>,
    width: usize,
}

enum Step {
    Optimal,
    Unbounded,
}

impl<F: Field> Tableau<F> {
    fn rhs(&self, i: usize) -> &F {
        &self.rows[i][self.width]
    }

    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        for v in self.rows[r].iter_mut() {
            *v = v.clone() / p.clone();
        }
        let prow = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col].clone();
            if f.is_zero() {
                continue;
            }
            for (v, pv) in row.iter_mut().zip(prow.iter()) {
                *v = v.clone() - f.clone() * pv.clone();
            }
        }
        self.basis[r] = col;
    }

    fn run(&mut self, cost: &[F], allowed: &[bool]) -> Step {
        loop {
            let mut entering = None;
            for j in 0..self.width {
                if !allowed[j] || self.basis.contains(&j) {
                    continue;
                }
                let mut r = cost[j].clone();
                for (i, &bi) in self.basis.iter().enumerate() {
                    r = r - cost[bi].clone() * self.rows[i][j].clone();
                }
                if r.is_pos() {
                    entering = Some(j);
                    break;
                }
            }
            let Some(j) = entering else { return Step::Optimal };
            let mut leave: Option<(usize, F)> = None;
            for i in 0..self.rows.len() {
                let a = self.rows[i][j].clone();
                if !a.is_pos() {
                    continue;
                }
                let ratio = self.rhs(i).clone() / a;
                leave = match leave {
                    None => Some((i, ratio)),
                    Some((k, best)) => {
                        let diff = ratio.clone() - best.clone();
                        if diff.is_neg() || (diff.is_negligible() && self.basis[i] < self.basis[k]) {
                            Some((i, ratio))
                        } else {
                            Some((k, best))
                        }
                    }
                };
            }
            match leave {
                None => return Step::Unbounded,
                Some((i, _)) => self.pivot(i, j),
            }
        }
    }
}

/// Maximizes `cᵀx` subject to `A x = b`, `x ≥ 0`.
pub fn maximize<F: Field>(a: &[Vec<F>], b: &[F], c: &[F]) -> LpOutcome<F> {
    let m = a.len();
    let n = c.len();
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for i in 0..m {
        let neg = b[i].is_neg() || (F::is_exact() && b[i] < F::zero());
        let sign = |v: F| if neg { -v } else { v };
        let mut row: Vec<F> = a[i].iter().cloned().map(sign).collect();
        row.extend((0..m).map(|k| if k == i { F::one() } else { F::zero() }));
        row.push(sign(b[i].clone()));
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..width).collect(), width };

    let cost1: Vec<F> = (0..width).map(|j| if j < n { F::zero() } else { -F::one() }).collect();
    let all = vec![true; width];
    if let Step::Unbounded = t.run(&cost1, &all) {
        return LpOutcome::Infeasible;
    }
    let mut infeas = F::zero();
    for i in 0..t.rows.len() {
        if t.basis[i] >= n {
            infeas = infeas + t.rhs(i).clone();
        }
    }
    if infeas.is_pos() {
        return LpOutcome::Infeasible;
    }
    // drive zero-level artificials out of the basis; drop redundant rows
    let mut i = 0;
    while i < t.rows.len() {
        if t.basis[i] >= n {
            match (0..n).find(|&j| !t.rows[i][j].is_negligible()) {
                Some(j) => t.pivot(i, j),
                None => {
                    t.rows.remove(i);
                    t.basis.remove(i);
                    continue;
                }
            }
        }
        i += 1;
    }
    let cost2: Vec<F> = (0..width).map(|j| if j < n { c[j].clone() } else { F::zero() }).collect();
    let allowed: Vec<bool> = (0..width).map(|j| j < n).collect();
    if let Step::Unbounded = t.run(&cost2, &allowed) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![F::zero(); n];
    let mut value = F::zero();
    for (i, &bi) in t.basis.iter().enumerate() {
        if bi < n {
            x[bi] = t.rhs(i).clone();
            value = value + c[bi].clone() * t.rhs(i).clone();
        }
    }
    LpOutcome::Optimal { x, value }
}
