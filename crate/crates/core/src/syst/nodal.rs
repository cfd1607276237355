//! `syst` on nodal surfaces: `−T log(s + Σ_i e^{−syst(X_i)/T})`.

use serde::{Deserialize, Serialize};

use super::{SystParams, SystState};
use crate::error::{Error, Result};
use crate::linalg::sym_eigen;
use crate::scalar::Real;
use crate::torus::{tangent_frame, MarkovPoint};

/// Component of a nodal surface.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub enum NodalComponent<S> {
    /// A once-punctured torus, the node appearing as its puncture.
    Torus(MarkovPoint<S>),
    /// A thrice-punctured sphere: rigid, with no closed geodesics.
    Pants,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct NodalSurface<S> {
    pub nodes: usize,
    pub components: Vec<NodalComponent<S>>,
}

impl<S: Real> NodalSurface<S> {
    pub fn new(nodes: usize, components: Vec<NodalComponent<S>>) -> Result<Self> {
        if nodes == 0 {
            return Err(Error::InvalidParams("a nodal surface has at least one node".into()));
        }
        Ok(Self { nodes, components })
    }

    /// The maximally pinched once-punctured torus: one node, one pair of pants.
    pub fn m11_boundary() -> Self {
        Self { nodes: 1, components: vec![NodalComponent::Pants] }
    }

    fn tori(&self) -> Vec<MarkovPoint<S>> {
        self.components
            .iter()
            .filter_map(|c| match c {
                NodalComponent::Torus(p) => Some(*p),
                NodalComponent::Pants => None,
            })
            .collect()
    }
}

/// `−T log(s + Σ e^{−v_i/T})` for component values `v_i`.
pub fn nodal_formula<S: Real>(nodes: usize, values: &[S], t: S) -> Result<S> {
    if !(t > S::zero() && t < S::one()) {
        return Err(Error::InvalidT(t.as_f64()));
    }
    let log_s = S::lit(nodes as f64).ln();
    let exps: Vec<S> = values.iter().map(|&v| -v / t).collect();
    let m = exps.iter().copied().fold(log_s, S::max);
    let log_total = if m == log_s {
        let rest: S = exps.iter().map(|&e| (e - log_s).exp()).sum();
        log_s + rest.ln_1p()
    } else {
        let sum: S = exps.iter().map(|&e| (e - m).exp()).sum::<S>() + (log_s - m).exp();
        m + sum.ln()
    };
    Ok(-t * log_total)
}

/// `syst` of a nodal surface.
pub fn syst_nodal_eval<S: Real>(n: &NodalSurface<S>, t: S) -> Result<S> {
    let params = SystParams::new(t)?;
    let values = n
        .tori()
        .iter()
        .map(|p| SystState::evaluate(p, &params).map(|s| s.value))
        .collect::<Result<Vec<S>>>()?;
    nodal_formula(n.nodes, &values, t)
}

/// Which coordinates a block of the nodal Hessian covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodalBlock {
    /// Tangent frame of the torus component with this index among the tori.
    Component(usize),
    /// Real and imaginary parts of the plumbing coordinate of a node.
    Node(usize),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct NodalHessian<S> {
    pub matrix: Vec<Vec<S>>,
    pub blocks: Vec<(NodalBlock, std::ops::Range<usize>)>,
    pub eigenvalues: Vec<S>,
    pub index: usize,
}

/// Hessian at the nodal point of the local model
/// `F(q, w) = −T log(Σ_j e^{−|w_j|²/T} + Σ_i e^{−syst(q_i)/T})`,
/// where `q_i` moves in torus component `i` and `w_j ∈ ℂ` opens node `j`.
pub fn nodal_hessian<S: Real>(n: &NodalSurface<S>, params: &SystParams<S>) -> Result<NodalHessian<S>> {
    let t = params.t;
    let tori = n.tori();
    let mut grads = Vec::new();
    let mut hesses = Vec::new();
    let mut logs = Vec::new();
    for p in &tori {
        let st = SystState::evaluate(p, params)?;
        let f = tangent_frame(p)?;
        grads.push(f.components(&st.ambient_gradient()));
        hesses.push(st.tangent_hessian(&f));
        logs.push(-st.value / t);
    }
    let log_s = S::lit(n.nodes as f64).ln();
    let m = logs.iter().copied().fold(log_s, S::max);
    let log_total = m + (logs.iter().map(|&l| (l - m).exp()).sum::<S>() + (log_s - m).exp()).ln();
    let w: Vec<S> = logs.iter().map(|&l| (l - log_total).exp()).collect();
    let inv_total = (-log_total).exp();

    let dim = 2 * tori.len() + 2 * n.nodes;
    let mut h = vec![vec![S::zero(); dim]; dim];
    let mut blocks = Vec::new();
    let inv_t = S::one() / t;
    for i in 0..tori.len() {
        blocks.push((NodalBlock::Component(i), 2 * i..2 * i + 2));
        for j in 0..tori.len() {
            for a in 0..2 {
                for b in 0..2 {
                    let outer = grads[i][a] * grads[j][b];
                    h[2 * i + a][2 * j + b] = if i == j {
                        w[i] * hesses[i][a][b] - inv_t * w[i] * outer + inv_t * w[i] * w[i] * outer
                    } else {
                        inv_t * w[i] * w[j] * outer
                    };
                }
            }
        }
    }
    let off = 2 * tori.len();
    for k in 0..n.nodes {
        blocks.push((NodalBlock::Node(k), off + 2 * k..off + 2 * k + 2));
        for a in 0..2 {
            h[off + 2 * k + a][off + 2 * k + a] = S::lit(2.0) * inv_total;
        }
    }
    let (eigenvalues, _) = sym_eigen(&h);
    let index = eigenvalues.iter().filter(|&&e| e < S::zero()).count();
    Ok(NodalHessian { matrix: h, blocks, eigenvalues, index })
}

/// Value of the local model at component points `q` and node coordinates `w`.
pub fn nodal_model_value<S: Real>(q: &[MarkovPoint<S>], w: &[[S; 2]], params: &SystParams<S>) -> Result<S> {
    let t = params.t;
    let mut logs: Vec<S> = w.iter().map(|wj| -(wj[0] * wj[0] + wj[1] * wj[1]) / t).collect();
    for p in q {
        logs.push(-SystState::evaluate(p, params)?.value / t);
    }
    let m = logs.iter().copied().fold(S::neg_infinity(), S::max);
    Ok(-t * (m + logs.iter().map(|&l| (l - m).exp()).sum::<S>().ln()))
}
