//! Least-squares VAR identification and AIC order selection.
//!
//! Input is assumed stationary; channel means are removed, nothing else.

use nalgebra::DMatrix;

use super::{TimeSeriesMatrix, VarModel};
use crate::error::{PirdError, Result};
use crate::linalg;

/// Regressors beyond this condition number are treated as rank deficient.
const MAX_CONDITION: f64 = 1e12;

/// Cross-product matrix of `[z(t−1) … z(t−P) | z(t)]` over rows
/// `t = P..L`. Every order `p ≤ P` reuses its leading blocks, so all AIC
/// candidates share one pass over the data and one effective sample.
struct LaggedGram {
    gram: DMatrix<f64>,
    q: usize,
    max_lag: usize,
    rows: usize,
}

impl LaggedGram {
    fn new(data: &DMatrix<f64>, max_lag: usize) -> Self {
        let (l, q) = data.shape();
        let rows = l - max_lag;
        let cols = (max_lag + 1) * q;
        let w = DMatrix::from_fn(rows, cols, |r, c| {
            let t = r + max_lag;
            let (block, ch) = (c / q, c % q);
            if block < max_lag {
                data[(t - block - 1, ch)]
            } else {
                data[(t, ch)]
            }
        });
        Self { gram: w.tr_mul(&w), q, max_lag, rows }
    }

    /// Coefficients and residual covariance for order `p`.
    fn solve(&self, p: usize) -> Result<(Vec<DMatrix<f64>>, DMatrix<f64>)> {
        let q = self.q;
        let y0 = self.max_lag * q;
        let gyy = self.gram.view((y0, y0), (q, q)).into_owned();
        let n = self.rows as f64;
        if p == 0 {
            return Ok((Vec::new(), linalg::symmetrize(&(gyy / n))));
        }
        let k = p * q;
        let gxx = self.gram.view((0, 0), (k, k)).into_owned();
        let gxy = self.gram.view((0, y0), (k, q)).into_owned();

        let eig = gxx.clone().symmetric_eigenvalues();
        let (lo, hi) = eig
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| (lo.min(v), hi.max(v.abs())));
        let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
        if !(cond <= MAX_CONDITION) {
            return Err(PirdError::Estimation(format!(
                "regressor matrix for order {p} is rank deficient (condition number {cond:e})"
            )));
        }
        let chol = gxx.cholesky().ok_or_else(|| {
            PirdError::Estimation(format!("normal equations for order {p} are not positive definite"))
        })?;
        let b = chol.solve(&gxy);
        let resid = (gyy - gxy.transpose() * &b) / n;
        // Block k of B holds A_kᵀ.
        let coeffs = (0..p)
            .map(|lag| b.view((lag * q, 0), (q, q)).transpose())
            .collect();
        Ok((coeffs, linalg::symmetrize(&resid)))
    }
}

fn check_spd(sigma: &DMatrix<f64>) -> Result<()> {
    let min = linalg::min_eigenvalue_sym(sigma);
    let scale = sigma.trace() / sigma.nrows() as f64;
    if min > 1e-12 * scale {
        Ok(())
    } else {
        Err(PirdError::Estimation(format!(
            "residual covariance is singular (smallest eigenvalue {min:e}); constant or collinear channels?"
        )))
    }
}

/// Ordinary least-squares VAR(p) fit with residual covariance `EᵀE/(L−p)`.
pub fn fit_ols(ts: &TimeSeriesMatrix, p: usize) -> Result<VarModel> {
    let l = ts.len();
    let q = ts.n_channels();
    if l <= p * q + 1 || l - p <= p * q {
        return Err(PirdError::Argument(format!(
            "{l} samples are too few for a VAR({p}) on {q} channels"
        )));
    }
    let data = ts.demeaned();
    let gram = LaggedGram::new(data.samples(), p);
    let (coeffs, sigma) = gram.solve(p)?;
    check_spd(&sigma)?;
    VarModel::new(coeffs, sigma, ts.fs(), ts.names().to_vec())
}

/// Outcome of AIC order selection.
#[derive(Clone, Debug)]
pub struct OrderSelection {
    /// Minimizer of the AIC curve.
    pub best_order: usize,
    /// `aic[i]` is AIC(p = i + 1).
    pub aic: Vec<f64>,
}

/// `AIC(p) = ln det Σ̂(p) + 2 p Q² / L_eff` for `p = 1..=p_max`, with every
/// order fitted on the same `L_eff = L − p_max` samples.
pub fn select_order_aic(ts: &TimeSeriesMatrix, p_max: usize) -> Result<OrderSelection> {
    let l = ts.len();
    let q = ts.n_channels();
    if p_max == 0 {
        return Err(PirdError::Argument("maximum order must be at least 1".into()));
    }
    if l <= p_max * q + 1 || l - p_max <= p_max * q {
        return Err(PirdError::Argument(format!(
            "maximum order {p_max} is infeasible for {l} samples of {q} channels"
        )));
    }
    let data = ts.demeaned();
    let gram = LaggedGram::new(data.samples(), p_max);
    let l_eff = gram.rows as f64;
    let mut aic = Vec::with_capacity(p_max);
    for p in 1..=p_max {
        let (_, sigma) = gram.solve(p)?;
        let log_det = linalg::log_det_spd(&sigma).ok_or_else(|| {
            PirdError::Estimation(format!("residual covariance for order {p} is not positive definite"))
        })?;
        aic.push(log_det + 2.0 * (p * q * q) as f64 / l_eff);
    }
    let best_order = aic
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
        .0
        + 1;
    Ok(OrderSelection { best_order, aic })
}
