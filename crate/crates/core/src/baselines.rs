//! Comparison samplers producing [`SamplingOperator`]s that plug into the
//! same measurement and reconstruction pipeline as the proposed sampler.

use nalgebra::{DMatrix, DVector};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::rng::seeded;
use crate::sampler::SamplingOperator;
use crate::spectral::{numerical_rank, singular_values, OrthoBasis};

fn selection_matrix(n: usize, nodes: &[usize], scale: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let mut phi = DMatrix::zeros(nodes.len(), n);
    for (t, &i) in nodes.iter().enumerate() {
        phi[(t, i)] = scale(i);
    }
    phi
}

/// `m` distinct nodes uniformly at random; rows are identity rows.
pub fn uniform_node_sampling(n: usize, m: usize, seed: u64) -> Result<SamplingOperator> {
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("cannot select {m} of {n} nodes")));
    }
    let mut rng = seeded(seed);
    let nodes = rand::seq::index::sample(&mut rng, n, m).into_vec();
    let phi = selection_matrix(n, &nodes, |_| 1.0);
    Ok(SamplingOperator::from_baseline(phi, "uniform", nodes, Some(seed)))
}

/// Node-selection probabilities `p_i ∝ ‖U_{i,S}‖²`.
pub fn support_energy(basis: &OrthoBasis, support: &[usize]) -> Result<Vec<f64>> {
    let us = basis.restrict(support)?;
    let energy: Vec<f64> = us.row_iter().map(|r| r.norm_squared()).collect();
    let total: f64 = energy.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return Err(Error::ZeroDistribution);
    }
    Ok(energy.into_iter().map(|e| e / total).collect())
}

/// `m` i.i.d. draws from the support-energy distribution; a draw of node
/// `i` contributes the row `e_iᵀ / sqrt(m p_i)`.
pub fn weighted_node_sampling(
    basis: &OrthoBasis,
    support: &[usize],
    m: usize,
    seed: u64,
) -> Result<SamplingOperator> {
    if support.is_empty() || m == 0 {
        return Err(Error::InvalidParameter("support and m must be nonempty".into()));
    }
    let probs = support_energy(basis, support)?;
    let dist = WeightedIndex::new(&probs).map_err(|_| Error::ZeroDistribution)?;
    let mut rng = seeded(seed);
    let nodes: Vec<usize> = (0..m).map(|_| dist.sample(&mut rng)).collect();
    let phi = selection_matrix(basis.n(), &nodes, |i| 1.0 / (m as f64 * probs[i]).sqrt());
    Ok(SamplingOperator::from_baseline(phi, "weighted", nodes, Some(seed)))
}

/// Greedy selection on the rows of `U_{|S}`: while the selected rows do
/// not reach full column rank, add the row maximizing the smallest
/// singular value of the stack; afterwards add the row minimizing
/// `‖(stack)⁺‖_F²`. Ties go to the lowest node index.
pub fn minpinv_greedy(basis: &OrthoBasis, support: &[usize], m: usize) -> Result<SamplingOperator> {
    let n = basis.n();
    if m == 0 || m > n {
        return Err(Error::InvalidParameter(format!("cannot select {m} of {n} nodes")));
    }
    if support.is_empty() {
        return Err(Error::InvalidParameter("support is empty".into()));
    }
    let us = basis.restrict(support)?;
    let k = support.len();
    let mut taken = vec![false; n];
    let mut nodes: Vec<usize> = Vec::with_capacity(m);
    let mut stack: Vec<f64> = Vec::with_capacity(m * k);

    while nodes.len() < m {
        let rows = nodes.len() + 1;
        if rows > 1 && numerical_rank(&DMatrix::from_row_slice(rows - 1, k, &stack))? == k {
            break;
        }
        let mut best: Option<(usize, f64)> = None;
        for c in (0..n).filter(|&c| !taken[c]) {
            let mut trial = stack.clone();
            trial.extend(us.row(c).iter());
            let s = singular_values(&DMatrix::from_row_slice(rows, k, &trial))?;
            let objective = s[rows.min(k) - 1];
            if best.is_none_or(|(_, b)| objective > b) {
                best = Some((c, objective));
            }
        }
        let (c, _) = best.expect("candidate pool is nonempty while below n");
        taken[c] = true;
        nodes.push(c);
        stack.extend(us.row(c).iter());
    }

    if nodes.len() < m {
        let s = DMatrix::from_row_slice(nodes.len(), k, &stack);
        let mut ginv = (s.transpose() * &s)
            .try_inverse()
            .ok_or_else(|| Error::InvalidParameter("selected rows lost full column rank".into()))?;
        while nodes.len() < m {
            // tr((G + rrᵀ)⁻¹) = tr(G⁻¹) − ‖G⁻¹r‖² / (1 + rᵀG⁻¹r)
            let mut best: Option<(usize, f64)> = None;
            for c in (0..n).filter(|&c| !taken[c]) {
                let r: DVector<f64> = us.row(c).transpose();
                let gr = &ginv * &r;
                let gain = gr.norm_squared() / (1.0 + r.dot(&gr));
                if best.is_none_or(|(_, b)| gain > b) {
                    best = Some((c, gain));
                }
            }
            let (c, _) = best.expect("candidate pool is nonempty while below n");
            let r: DVector<f64> = us.row(c).transpose();
            let gr = &ginv * &r;
            let denom = 1.0 + r.dot(&gr);
            ginv -= (&gr * gr.transpose()) / denom;
            taken[c] = true;
            nodes.push(c);
        }
    }

    let phi = selection_matrix(n, &nodes, |_| 1.0);
    Ok(SamplingOperator::from_baseline(phi, "minpinv", nodes, None))
}

/// Maximum-degree node, lowest index on ties.
pub fn default_observation_node(g: &Graph) -> usize {
    (0..g.n()).max_by(|&a, &b| g.degree(a).cmp(&g.degree(b)).then(b.cmp(&a))).unwrap_or(0)
}

/// Successive shifts observed at one node: row `ℓ` is row `node` of `Aˡ`
/// for the binary adjacency matrix.
pub fn successive_aggregations(g: &Graph, node: usize, m: usize) -> Result<SamplingOperator> {
    g.check_node(node)?;
    if m == 0 {
        return Err(Error::InvalidParameter("m must be at least 1".into()));
    }
    let n = g.n();
    let mut phi = DMatrix::zeros(m, n);
    let mut row = vec![0.0; n];
    row[node] = 1.0;
    for l in 0..m {
        for (j, v) in row.iter().enumerate() {
            phi[(l, j)] = *v;
        }
        // (r A)_j = Σ_{i : a_ij = 1} r_i
        row = (0..n).map(|j| g.neighbors(j).map(|i| row[i]).sum()).collect();
    }
    Ok(SamplingOperator::from_baseline(phi, "successive", vec![node; m], None))
}
