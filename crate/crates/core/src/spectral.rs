//! Laplacians, orthonormal sparsity bases and the dense linear-algebra
//! kernels shared by the samplers and solvers.
//!
//! Eigendecompositions are delegated to `nalgebra` and SVDs to `faer`
//! (nalgebra's SVD loses accuracy on some rank-deficient inputs); this module
//! adds ordering, deterministic handling of repeated eigenvalues, the rank
//! tolerance and the graph-basis coherence.

use std::io::Write;

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Singular values at or below `max(rows, cols) * σ_max * RANK_EPS` are
/// treated as zero.
pub const RANK_EPS: f64 = 1.0 / 35_184_372_088_832.0; // 2^-45

const ORTHO_TOL: f64 = 1e-10;
const SIGNIFICANT: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisOrdering {
    FrequencyIncreasing,
    Natural,
}

/// An `n × n` matrix with orthonormal columns (the sparsity atoms).
#[derive(Debug, Clone)]
pub struct OrthoBasis {
    u: DMatrix<f64>,
    eigenvalues: Option<Vec<f64>>,
    ordering: BasisOrdering,
    label: String,
}

impl OrthoBasis {
    pub fn new(
        u: DMatrix<f64>,
        eigenvalues: Option<Vec<f64>>,
        ordering: BasisOrdering,
        label: impl Into<String>,
    ) -> Result<Self> {
        if !u.is_square() || u.nrows() == 0 {
            return Err(Error::InvalidParameter(format!(
                "basis must be square and nonempty, got {}x{}",
                u.nrows(),
                u.ncols()
            )));
        }
        let dev = orthonormality_error(&u);
        if dev > ORTHO_TOL {
            return Err(Error::InvalidParameter(format!(
                "columns are not orthonormal (max |UᵀU - I| = {dev:e})"
            )));
        }
        if let Some(ev) = &eigenvalues {
            if ev.len() != u.ncols() {
                return Err(Error::DimensionMismatch { expected: u.ncols(), found: ev.len() });
            }
        }
        Ok(Self { u, eigenvalues, ordering, label: label.into() })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            u: DMatrix::identity(n, n),
            eigenvalues: None,
            ordering: BasisOrdering::Natural,
            label: "identity".into(),
        }
    }

    pub fn n(&self) -> usize {
        self.u.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.u
    }

    pub fn eigenvalues(&self) -> Option<&[f64]> {
        self.eigenvalues.as_deref()
    }

    pub fn ordering(&self) -> BasisOrdering {
        self.ordering
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// `‖U‖_MAX`, the largest entry magnitude.
    pub fn max_abs_entry(&self) -> f64 {
        self.u.amax()
    }

    /// Columns of `U` indexed by `support` (`U_{|S}`).
    pub fn restrict(&self, support: &[usize]) -> Result<DMatrix<f64>> {
        for &s in support {
            if s >= self.n() {
                return Err(Error::IndexOutOfRange { index: s, n: self.n() });
            }
        }
        Ok(self.u.select_columns(support))
    }

    /// Basis whose row `i` is row `order[i]` of this one.
    pub fn permute_rows(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n() {
            return Err(Error::DimensionMismatch { expected: self.n(), found: order.len() });
        }
        let u = self.u.select_rows(order);
        Self::new(u, self.eigenvalues.clone(), self.ordering, format!("{}-permuted", self.label))
    }

    /// Coefficients `Uᵀx`.
    pub fn analyze(&self, x: &DVector<f64>) -> DVector<f64> {
        self.u.tr_mul(x)
    }

    /// Signal `U x̂`.
    pub fn synthesize(&self, coefficients: &DVector<f64>) -> DVector<f64> {
        &self.u * coefficients
    }
}

pub fn orthonormality_error(u: &DMatrix<f64>) -> f64 {
    let gram = u.tr_mul(u);
    (gram - DMatrix::identity(u.ncols(), u.ncols())).amax()
}

/// Combinatorial `D − W` or normalized `D^{-1/2}(D − W)D^{-1/2}` Laplacian.
/// Isolated nodes give zero rows and columns in both variants.
pub fn laplacian(g: &Graph, normalized: bool) -> Result<DMatrix<f64>> {
    if g.is_directed() {
        return Err(Error::Directed);
    }
    let n = g.n();
    let mut degree = vec![0.0; n];
    for e in g.edges() {
        degree[e.source] += e.weight;
        degree[e.target] += e.weight;
    }
    let mut l = DMatrix::zeros(n, n);
    if normalized {
        for i in 0..n {
            if degree[i] > 0.0 {
                l[(i, i)] = 1.0;
            }
        }
        for e in g.edges() {
            let v = -e.weight / (degree[e.source] * degree[e.target]).sqrt();
            l[(e.source, e.target)] = v;
            l[(e.target, e.source)] = v;
        }
    } else {
        for i in 0..n {
            l[(i, i)] = degree[i];
        }
        for e in g.edges() {
            l[(e.source, e.target)] = -e.weight;
            l[(e.target, e.source)] = -e.weight;
        }
    }
    Ok(l)
}

/// Eigendecomposition of a symmetric matrix with ascending eigenvalues.
///
/// Eigenvectors of a numerically repeated eigenvalue are replaced by a
/// canonical orthonormal basis of their span: the projections of `e_0,
/// e_1, ...` onto the span, Gram–Schmidt orthogonalized in index order,
/// keeping the first ones that are not already spanned. Every vector is
/// then signed so its first significant entry is positive.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = a.nrows();
    if !a.is_square() {
        return Err(Error::InvalidParameter("matrix is not square".into()));
    }
    let eig = SymmetricEigen::try_new(a.clone(), f64::EPSILON, 1000 * n.max(1))
        .ok_or(Error::NonConvergence("symmetric eigensolver"))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = eig.eigenvectors.select_columns(&order);

    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let cluster_tol = 1e-9 * scale;
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[end] - values[end - 1] <= cluster_tol {
            end += 1;
        }
        canonicalize_span(&mut vectors, start, end);
        start = end;
    }
    Ok((values, vectors))
}

fn canonicalize_span(vectors: &mut DMatrix<f64>, start: usize, end: usize) {
    let n = vectors.nrows();
    let width = end - start;
    let span = vectors.columns(start, width).into_owned();
    let mut chosen: Vec<DVector<f64>> = Vec::with_capacity(width);
    for i in 0..n {
        if chosen.len() == width {
            break;
        }
        // P e_i = V (row i of V)ᵀ
        let mut w = &span * span.row(i).transpose();
        for _ in 0..2 {
            for c in &chosen {
                let dot = c.dot(&w);
                w.axpy(-dot, c, 1.0);
            }
        }
        let norm = w.norm();
        if norm > SIGNIFICANT {
            chosen.push(w / norm);
        }
    }
    if chosen.len() == width {
        for (k, c) in chosen.into_iter().enumerate() {
            vectors.set_column(start + k, &c);
        }
    }
    for k in start..end {
        let mut col = vectors.column_mut(k);
        if let Some(first) = col.iter().copied().find(|v| v.abs() > SIGNIFICANT) {
            if first < 0.0 {
                col.neg_mut();
            }
        }
    }
}

/// Graph Fourier basis: Laplacian eigenvectors by nondecreasing eigenvalue.
pub fn gft_basis(g: &Graph, normalized: bool) -> Result<OrthoBasis> {
    let l = laplacian(g, normalized)?;
    let (values, vectors) = symmetric_eigen(&l)?;
    let label = if normalized { "gft-normalized" } else { "gft-combinatorial" };
    Ok(OrthoBasis {
        u: vectors,
        eigenvalues: Some(values),
        ordering: BasisOrdering::FrequencyIncreasing,
        label: label.into(),
    })
}

/// Orthonormal DCT-II; column `k` is the frequency-`k` atom.
pub fn dct_basis(n: usize) -> Result<OrthoBasis> {
    if n == 0 {
        return Err(Error::InvalidParameter("DCT size must be at least 1".into()));
    }
    let nf = n as f64;
    let u = DMatrix::from_fn(n, n, |i, k| {
        let c = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        c * (std::f64::consts::PI * (2 * i + 1) as f64 * k as f64 / (2.0 * nf)).cos()
    });
    Ok(OrthoBasis { u, eigenvalues: None, ordering: BasisOrdering::Natural, label: "dct".into() })
}

/// Graph-basis coherence of a sampling set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoherenceReport {
    pub mu: f64,
    pub max_abs_entry: f64,
    pub max_closed_neighborhood: usize,
}

/// `µ = min(sqrt(|N̄*|) ‖U‖_MAX, 1)` with `|N̄*|` the largest closed
/// neighborhood among the sampling nodes of `g`.
pub fn graph_basis_coherence(
    g: &Graph,
    r: &[usize],
    basis: &OrthoBasis,
) -> Result<CoherenceReport> {
    if r.is_empty() {
        return Err(Error::EmptySamplingSet);
    }
    if basis.n() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), found: basis.n() });
    }
    let mut widest = 0;
    for &i in r {
        g.check_node(i)?;
        widest = widest.max(g.closed_nbhd_len(i));
    }
    let max_abs_entry = basis.max_abs_entry();
    let mu = ((widest as f64).sqrt() * max_abs_entry).min(1.0);
    Ok(CoherenceReport { mu, max_abs_entry, max_closed_neighborhood: widest })
}

fn to_faer(a: &DMatrix<f64>) -> Result<faer::Mat<f64>> {
    if a.is_empty() {
        return Err(Error::InvalidParameter("matrix is empty".into()));
    }
    Ok(faer::Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]))
}

fn rank_threshold(a: &DMatrix<f64>, sigma_max: f64) -> f64 {
    a.nrows().max(a.ncols()) as f64 * sigma_max * RANK_EPS
}

/// Singular values in decreasing order.
pub fn singular_values(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut s = to_faer(a)?
        .singular_values()
        .map_err(|_| Error::NonConvergence("singular value decomposition"))?;
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

pub fn numerical_rank(a: &DMatrix<f64>) -> Result<usize> {
    let s = singular_values(a)?;
    let tol = rank_threshold(a, s[0]);
    Ok(s.iter().filter(|&&v| v > tol).count())
}

/// `σ_max / σ_min` of a matrix with full numerical rank. Rank-deficient
/// matrices (including the zero matrix) report infinity.
pub fn condition_number(a: &DMatrix<f64>) -> Result<f64> {
    let s = singular_values(a)?;
    let tol = rank_threshold(a, s[0]);
    let full = a.nrows().min(a.ncols());
    match s.iter().rev().find(|&&v| v > tol) {
        Some(&smallest) if s.iter().filter(|&&v| v > tol).count() == full => Ok(s[0] / smallest),
        _ => Ok(f64::INFINITY),
    }
}

/// Moore–Penrose pseudoinverse via SVD with the rank tolerance.
pub fn pseudoinverse(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = to_faer(a)?
        .thin_svd()
        .map_err(|_| Error::NonConvergence("singular value decomposition"))?;
    let sv = d.S().column_vector();
    let sigma_max = (0..sv.nrows()).map(|k| sv[k]).fold(0.0, f64::max);
    let tol = rank_threshold(a, sigma_max);
    // A⁺ = V Σ⁺ Uᵀ
    let (u, v) = (d.U(), d.V());
    let mut pinv = DMatrix::zeros(a.ncols(), a.nrows());
    for k in (0..sv.nrows()).filter(|&k| sv[k] > tol) {
        let w = 1.0 / sv[k];
        for j in 0..a.nrows() {
            let uw = u[(j, k)] * w;
            for i in 0..a.ncols() {
                pinv[(i, j)] += v[(i, k)] * uw;
            }
        }
    }
    Ok(pinv)
}

/// Row-major CSV dump with 17 significant digits.
pub fn write_matrix_csv<W: Write>(a: &DMatrix<f64>, mut out: W) -> Result<()> {
    for i in 0..a.nrows() {
        let row: Vec<String> = (0..a.ncols()).map(|j| format!("{:.16e}", a[(i, j)])).collect();
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}

pub fn read_matrix_csv(text: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| {
                t.trim().parse::<f64>().map_err(|_| Error::Parse {
                    line: idx + 1,
                    msg: format!("invalid number `{t}`"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::DimensionMismatch { expected: first.len(), found: row.len() });
            }
        }
        rows.push(row);
    }
    let ncols = rows.first().map_or(0, Vec::len);
    Ok(DMatrix::from_row_iterator(rows.len(), ncols, rows.into_iter().flatten()))
}
