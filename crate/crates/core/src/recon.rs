//! Sparse test signals, reconstruction and error metrics.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, gaussian, seeded, tag_word, SeededRng};
use crate::sampler::SamplingOperator;
use crate::spectral::{numerical_rank, pseudoinverse, OrthoBasis};

/// Reconstructions below this MSE count as perfect.
pub const PERFECT_THRESHOLD_DB: f64 = -40.0;
/// Value reported for a zero error.
pub const MSE_FLOOR_DB: f64 = -400.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportModel {
    /// The first `k` basis atoms.
    Bandlimited,
    /// `k` atoms drawn uniformly without replacement.
    #[serde(alias = "random-support")]
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSignalSpec {
    pub support: Vec<usize>,
    /// Explicit coefficients on `support`; drawn from `seed` when absent.
    pub coefficients: Option<Vec<f64>>,
    pub model: SupportModel,
    pub seed: u64,
}

impl SparseSignalSpec {
    pub fn bandlimited(k: usize, seed: u64) -> Self {
        Self {
            support: (0..k).collect(),
            coefficients: None,
            model: SupportModel::Bandlimited,
            seed,
        }
    }

    pub fn random_support(n: usize, k: usize, seed: u64) -> Result<Self> {
        if k > n {
            return Err(Error::InvalidParameter(format!("sparsity {k} exceeds size {n}")));
        }
        let mut rng = seeded(derive_seed(seed, &[tag_word("support")]));
        let mut support = rand::seq::index::sample(&mut rng, n, k).into_vec();
        support.sort_unstable();
        Ok(Self { support, coefficients: None, model: SupportModel::Random, seed })
    }

    pub fn new(model: SupportModel, n: usize, k: usize, seed: u64) -> Result<Self> {
        match model {
            SupportModel::Bandlimited if k <= n => Ok(Self::bandlimited(k, seed)),
            SupportModel::Bandlimited => {
                Err(Error::InvalidParameter(format!("sparsity {k} exceeds size {n}")))
            }
            SupportModel::Random => Self::random_support(n, k, seed),
        }
    }

    pub fn k(&self) -> usize {
        self.support.len()
    }
}

#[derive(Debug, Clone)]
pub struct SparseSignal {
    /// Node-domain signal `x = U x̂`.
    pub x: DVector<f64>,
    /// Full coefficient vector `x̂`, zero off the support.
    pub coefficients: DVector<f64>,
    pub support: Vec<usize>,
}

/// `x = U_{|S} x̂_S`. Without explicit coefficients, `x̂_S` is standard
/// normal scaled to unit norm.
pub fn synthesize(basis: &OrthoBasis, spec: &SparseSignalSpec) -> Result<SparseSignal> {
    let n = basis.n();
    for &s in &spec.support {
        if s >= n {
            return Err(Error::IndexOutOfRange { index: s, n });
        }
    }
    let values: Vec<f64> = match &spec.coefficients {
        Some(c) if c.len() != spec.support.len() => {
            return Err(Error::DimensionMismatch { expected: spec.support.len(), found: c.len() });
        }
        Some(c) => c.clone(),
        None => {
            let mut rng = seeded(derive_seed(spec.seed, &[tag_word("coefficients")]));
            let raw: Vec<f64> = spec.support.iter().map(|_| gaussian(&mut rng)).collect();
            let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
            raw.into_iter().map(|v| v / norm).collect()
        }
    };
    let mut coefficients = DVector::zeros(n);
    for (&s, v) in spec.support.iter().zip(values) {
        coefficients[s] = v;
    }
    Ok(SparseSignal {
        x: basis.synthesize(&coefficients),
        coefficients,
        support: spec.support.clone(),
    })
}

/// `y = Φ (x + e)` with white Gaussian `e` of standard deviation `sigma`.
pub fn noisy_measurements(
    op: &SamplingOperator,
    x: &DVector<f64>,
    sigma: f64,
    rng: &mut SeededRng,
) -> Result<DVector<f64>> {
    if x.len() != op.n() {
        return Err(Error::DimensionMismatch { expected: op.n(), found: x.len() });
    }
    let noisy = DVector::from_fn(x.len(), |i, _| x[i] + sigma * gaussian(rng));
    Ok(op.phi() * noisy)
}

/// `10 log10(‖x* − x‖² / n)`, floored at [`MSE_FLOOR_DB`].
pub fn mse_db(x_star: &DVector<f64>, x: &DVector<f64>) -> Result<f64> {
    if x_star.len() != x.len() {
        return Err(Error::DimensionMismatch { expected: x.len(), found: x_star.len() });
    }
    if x.is_empty() {
        return Err(Error::InvalidParameter("empty signal".into()));
    }
    let err = (x_star - x).norm_squared() / x.len() as f64;
    if err == 0.0 {
        return Ok(MSE_FLOOR_DB);
    }
    Ok((10.0 * err.log10()).max(MSE_FLOOR_DB))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct SolverStats {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// `‖Ψ x̂* − y‖₂`.
    pub feasibility: f64,
    pub converged: bool,
    pub rank_deficient: bool,
}

#[derive(Debug, Clone)]
pub struct Reconstruction {
    pub x_star: DVector<f64>,
    pub xhat_star: DVector<f64>,
    pub stats: SolverStats,
}

impl Reconstruction {
    pub fn assess(self, x: &DVector<f64>) -> Result<ReconResult> {
        let mse = mse_db(&self.x_star, x)?;
        Ok(ReconResult {
            x_star: self.x_star,
            xhat_star: self.xhat_star,
            mse_db: mse,
            perfect: mse < PERFECT_THRESHOLD_DB,
            stats: self.stats,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ReconResult {
    pub x_star: DVector<f64>,
    pub xhat_star: DVector<f64>,
    pub mse_db: f64,
    pub perfect: bool,
    pub stats: SolverStats,
}

/// Least squares on a known support: `x̂*_S = (Φ U_{|S})⁺ y`.
pub fn ls_known_support(
    op: &SamplingOperator,
    basis: &OrthoBasis,
    support: &[usize],
    y: &DVector<f64>,
) -> Result<Reconstruction> {
    if y.len() != op.m() {
        return Err(Error::DimensionMismatch { expected: op.m(), found: y.len() });
    }
    if support.is_empty() {
        return Err(Error::InvalidParameter("support is empty".into()));
    }
    let psi_s = op.psi_restricted(basis, support)?;
    let coef = pseudoinverse(&psi_s)? * y;
    let mut xhat = DVector::zeros(basis.n());
    for (&s, v) in support.iter().zip(coef.iter()) {
        xhat[s] = *v;
    }
    let stats = SolverStats {
        iterations: 1,
        feasibility: (&psi_s * &coef - y).norm(),
        converged: true,
        rank_deficient: numerical_rank(&psi_s)? < support.len(),
        ..SolverStats::default()
    };
    Ok(Reconstruction { x_star: basis.synthesize(&xhat), xhat_star: xhat, stats })
}

/// Basis-pursuit solver settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BpParams {
    /// Augmented-Lagrangian penalty.
    pub rho: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Feasibility tolerance, relative to `max(1, ‖y‖)`.
    pub feas_tol: f64,
}

impl Default for BpParams {
    fn default() -> Self {
        Self { rho: 1.0, abs_tol: 1e-9, rel_tol: 1e-9, max_iter: 50_000, feas_tol: 1e-8 }
    }
}

fn soft_threshold(v: f64, t: f64) -> f64 {
    if v > t {
        v - t
    } else if v < -t {
        v + t
    } else {
        0.0
    }
}

/// Precomputed data for repeated basis-pursuit solves against one `Ψ`.
pub struct BasisPursuit {
    psi: DMatrix<f64>,
    psi_pinv: DMatrix<f64>,
    params: BpParams,
}

impl BasisPursuit {
    pub fn new(psi: DMatrix<f64>, params: BpParams) -> Result<Self> {
        if psi.nrows() > psi.ncols() {
            return Err(Error::InvalidParameter(format!(
                "basis pursuit needs m <= n, got {}x{}",
                psi.nrows(),
                psi.ncols()
            )));
        }
        if params.rho.is_nan() || params.rho <= 0.0 || params.max_iter == 0 {
            return Err(Error::InvalidParameter(
                "rho must be positive and max_iter nonzero".into(),
            ));
        }
        let psi_pinv = pseudoinverse(&psi)?;
        Ok(Self { psi, psi_pinv, params })
    }

    /// `min ‖x̂‖₁ s.t. Ψ x̂ = y` by alternating projection onto the
    /// constraint set and soft-thresholding, with a scaled dual update.
    /// The returned coefficients are the projected (feasible) iterate.
    /// Hitting the iteration cap is reported in the stats, not as an error.
    pub fn solve(&self, y: &DVector<f64>) -> Result<(DVector<f64>, SolverStats)> {
        let (m, n) = self.psi.shape();
        if y.len() != m {
            return Err(Error::DimensionMismatch { expected: m, found: y.len() });
        }
        let BpParams { rho, abs_tol, rel_tol, max_iter, .. } = self.params;
        let sqrt_n = (n as f64).sqrt();
        let offset = &self.psi_pinv * y;
        let mut x = offset.clone();
        let mut z = x.clone();
        let mut u = DVector::zeros(n);
        let mut v = DVector::zeros(n);
        let mut resid = DVector::zeros(m);
        let mut stats = SolverStats::default();

        for iter in 1..=max_iter {
            // x = Π(z − u), Π(v) = v − Ψ⁺(Ψv − y)
            v.copy_from(&z);
            v -= &u;
            resid.gemv(1.0, &self.psi, &v, 0.0);
            resid -= y;
            x.copy_from(&v);
            x.gemv(-1.0, &self.psi_pinv, &resid, 1.0);

            let mut dz2 = 0.0;
            let mut r2 = 0.0;
            for i in 0..n {
                let old = z[i];
                let zi = soft_threshold(x[i] + u[i], 1.0 / rho);
                z[i] = zi;
                u[i] += x[i] - zi;
                dz2 += (zi - old) * (zi - old);
                r2 += (x[i] - zi) * (x[i] - zi);
            }
            let primal = r2.sqrt();
            let dual = rho * dz2.sqrt();
            let eps_pri = sqrt_n * abs_tol + rel_tol * x.norm().max(z.norm());
            let eps_dual = sqrt_n * abs_tol + rel_tol * rho * u.norm();
            stats.iterations = iter;
            stats.primal_residual = primal;
            stats.dual_residual = dual;
            if primal <= eps_pri && dual <= eps_dual {
                stats.converged = true;
                break;
            }
        }
        stats.feasibility = (&self.psi * &x - y).norm();
        Ok((x, stats))
    }

    /// The sparse (thresholded) and feasible iterates agree at convergence;
    /// this exposes the feasibility check used by [`bp_l1`].
    pub fn is_feasible(&self, stats: &SolverStats, y: &DVector<f64>) -> bool {
        stats.feasibility <= self.params.feas_tol * y.norm().max(1.0)
    }
}

/// ℓ1 reconstruction with unknown support over the whole basis.
pub fn bp_l1(
    op: &SamplingOperator,
    basis: &OrthoBasis,
    y: &DVector<f64>,
    params: &BpParams,
) -> Result<Reconstruction> {
    let solver = BasisPursuit::new(op.psi(basis)?, *params)?;
    let (xhat, mut stats) = solver.solve(y)?;
    if !solver.is_feasible(&stats, y) {
        stats.converged = false;
    }
    Ok(Reconstruction { x_star: basis.synthesize(&xhat), xhat_star: xhat, stats })
}
