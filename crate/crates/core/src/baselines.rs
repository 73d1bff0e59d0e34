//! Reference decompositions: the zero-lag Gaussian PID, transfer entropy
//! from VAR sub-models, the PID of transfer entropies, and the additive
//! split of the mutual information rate into directed and instantaneous
//! parts.
//!
//! Sub-models are never fitted to data. The innovation covariance of any
//! channel subset is obtained from the exact autocovariance sequence of the
//! full model with the multivariate Levinson (Whittle) recursion.

use nalgebra::DMatrix;

use crate::error::{PirdError, Result};
use crate::linalg;
use crate::spectral::check_channels;
use crate::var::VarModel;

/// Upper bound on the sub-model order reached by adaptive extension.
pub const MAX_SUBMODEL_ORDER: usize = 4096;

/// Adaptive extension stops once doubling the order changes the log
/// determinant of the innovation covariance by less than this.
const ORDER_TOL: f64 = 1e-12;

/// Default starting order for sub-models of `model`: `max(32, 8p)`.
pub fn default_submodel_order(model: &VarModel) -> usize {
    (8 * model.order()).max(32)
}

/// Gaussian mutual information `½ ln(σ²_T |Σ_S| / |Σ_[TS]|)` between one
/// channel and a group of channels of a covariance matrix.
pub fn gaussian_mi(cov: &DMatrix<f64>, target: usize, sources: &[usize]) -> Result<f64> {
    if !cov.is_square() {
        return Err(PirdError::Argument("covariance must be square".into()));
    }
    let sources = check_channels(cov.nrows(), target, sources)?;
    if !linalg::is_symmetric(cov, 1e-10) || cov.clone().cholesky().is_none() {
        return Err(PirdError::Argument("covariance is not symmetric positive definite".into()));
    }
    let mut joint = vec![target];
    joint.extend_from_slice(&sources);
    let ld = |idx: &[usize]| {
        linalg::log_det_spd(&linalg::submatrix(cov, idx))
            .ok_or_else(|| PirdError::Numerical("covariance block is not positive definite".into()))
    };
    Ok(0.5 * (cov[(target, target)].ln() + ld(&sources)? - ld(&joint)?))
}

/// Minimum-mutual-information PID of one target against single sources.
#[derive(Clone, Debug, PartialEq)]
pub struct MmiPid {
    pub joint: f64,
    pub marginals: Vec<f64>,
    pub unique: Vec<f64>,
    pub redundancy: f64,
    pub synergy: f64,
}

impl MmiPid {
    fn from_terms(joint: f64, marginals: Vec<f64>) -> Self {
        let redundancy = marginals.iter().copied().fold(f64::INFINITY, f64::min);
        let unique: Vec<f64> = marginals.iter().map(|m| m - redundancy).collect();
        let synergy = joint - redundancy - unique.iter().sum::<f64>();
        Self { joint, marginals, unique, redundancy, synergy }
    }
}

/// Zero-lag PID on the stationary covariance.
pub type StaticPidResult = MmiPid;

/// PID applied to transfer entropies.
pub type TePidResult = MmiPid;

fn check_multi_source(n: usize) -> Result<()> {
    if n < 2 {
        return Err(PirdError::Argument(format!("PID needs at least 2 sources, got {n}")));
    }
    Ok(())
}

fn check_distinct(sources: &[usize]) -> Result<()> {
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    if s.len() != sources.len() {
        return Err(PirdError::Argument("source channels must be distinct".into()));
    }
    Ok(())
}

/// MMI PID of `I(Y(t); X_1(t), …, X_M(t))` computed from `Γ_0`.
pub fn static_pid(model: &VarModel, target: usize, sources: &[usize]) -> Result<StaticPidResult> {
    check_multi_source(sources.len())?;
    check_distinct(sources)?;
    let g0 = model.zero_lag_covariance()?;
    let joint = gaussian_mi(&g0, target, sources)?;
    let marginals = sources
        .iter()
        .map(|&s| gaussian_mi(&g0, target, &[s]))
        .collect::<Result<Vec<_>>>()?;
    Ok(MmiPid::from_terms(joint, marginals))
}

/// One-step prediction error covariance of the channels `idx` predicted
/// from their own past.
///
/// With `order = Some(q)` the sub-model has exactly order `q`. With `None`
/// the order starts at [`default_submodel_order`] and doubles until the log
/// determinant settles or [`MAX_SUBMODEL_ORDER`] is reached.
pub fn submodel_innovation(model: &VarModel, idx: &[usize], order: Option<usize>) -> Result<DMatrix<f64>> {
    if idx.is_empty() || idx.iter().any(|&i| i >= model.dim()) {
        return Err(PirdError::Argument(format!("invalid channel subset {idx:?}")));
    }
    if order == Some(0) {
        return Err(PirdError::Argument("sub-model order must be at least 1".into()));
    }
    model.ensure_stable()?;
    // A white model is its own best predictor for every subset.
    if model.order() == 0 {
        return Ok(linalg::submatrix(model.sigma(), idx));
    }
    let first = order.unwrap_or_else(|| default_submodel_order(model));
    let gammas = model.autocovariance_sequence(first)?;
    let sub: Vec<DMatrix<f64>> = gammas.iter().map(|g| linalg::block(g, idx, idx)).collect();
    let mut lev = Levinson::new(sub[0].clone());
    lev.advance_to(&sub, first)?;
    if order.is_some() {
        return Ok(lev.v_f.clone());
    }

    let mut prev = log_det(&lev.v_f)?;
    let mut current = first;
    while current < MAX_SUBMODEL_ORDER {
        let next = (2 * current).min(MAX_SUBMODEL_ORDER);
        let gammas = model.autocovariance_sequence(next)?;
        let sub: Vec<DMatrix<f64>> = gammas.iter().map(|g| linalg::block(g, idx, idx)).collect();
        lev.advance_to(&sub, next)?;
        let ld = log_det(&lev.v_f)?;
        current = next;
        if (prev - ld).abs() < ORDER_TOL {
            break;
        }
        prev = ld;
    }
    Ok(lev.v_f.clone())
}

fn log_det(m: &DMatrix<f64>) -> Result<f64> {
    linalg::log_det_spd(m).ok_or_else(|| {
        PirdError::Estimation("sub-model innovation covariance lost positive definiteness".into())
    })
}

/// Whittle's multivariate Levinson recursion on a block autocovariance
/// sequence `Γ_k = E[z(t) z(t−k)ᵀ]`.
struct Levinson {
    fwd: Vec<DMatrix<f64>>,
    bwd: Vec<DMatrix<f64>>,
    v_f: DMatrix<f64>,
    v_b: DMatrix<f64>,
}

impl Levinson {
    fn new(gamma0: DMatrix<f64>) -> Self {
        Self { fwd: Vec::new(), bwd: Vec::new(), v_f: gamma0.clone(), v_b: gamma0 }
    }

    fn order(&self) -> usize {
        self.fwd.len()
    }

    fn advance_to(&mut self, gammas: &[DMatrix<f64>], order: usize) -> Result<()> {
        while self.order() < order {
            self.step(gammas)?;
        }
        Ok(())
    }

    fn step(&mut self, gammas: &[DMatrix<f64>]) -> Result<()> {
        let m = self.order();
        let mut delta = gammas[m + 1].clone();
        for (k, a) in self.fwd.iter().enumerate() {
            delta -= a * &gammas[m - k];
        }
        let inv = |v: &DMatrix<f64>, what: &str| {
            v.clone().cholesky().map(|c| c.inverse()).ok_or_else(|| {
                PirdError::Estimation(format!(
                    "{what} prediction error covariance is singular at sub-model order {}",
                    m + 1
                ))
            })
        };
        let a_new = &delta * inv(&self.v_b, "backward")?;
        let b_new = delta.transpose() * inv(&self.v_f, "forward")?;
        let fwd: Vec<DMatrix<f64>> = (0..m).map(|j| &self.fwd[j] - &a_new * &self.bwd[m - 1 - j]).collect();
        let bwd: Vec<DMatrix<f64>> = (0..m).map(|j| &self.bwd[j] - &b_new * &self.fwd[m - 1 - j]).collect();
        self.v_f = linalg::symmetrize(&(&self.v_f - &a_new * delta.transpose()));
        self.v_b = linalg::symmetrize(&(&self.v_b - &b_new * &delta));
        self.fwd = fwd;
        self.bwd = bwd;
        self.fwd.push(a_new);
        self.bwd.push(b_new);
        Ok(())
    }
}

/// `½ ln(|Σ_reduced[T,T]| / |Σ_full[T,T]|)`: information carried from the
/// past of `sources` to the present of `targets`, given the pasts of
/// `targets` and `given`.
pub fn conditional_transfer_entropy(
    model: &VarModel,
    sources: &[usize],
    targets: &[usize],
    given: &[usize],
    order: Option<usize>,
) -> Result<f64> {
    let dim = model.dim();
    let mut all: Vec<usize> = targets.iter().chain(sources).chain(given).copied().collect();
    if sources.is_empty() || targets.is_empty() {
        return Err(PirdError::Argument("transfer entropy needs nonempty sources and targets".into()));
    }
    if let Some(bad) = all.iter().find(|&&i| i >= dim) {
        return Err(PirdError::Argument(format!("channel {bad} out of range (dim {dim})")));
    }
    all.sort_unstable();
    let n = all.len();
    all.dedup();
    if all.len() != n {
        return Err(PirdError::Argument(
            "sources, targets and conditioning channels must be disjoint".into(),
        ));
    }

    let full: Vec<usize> = targets.iter().chain(sources).chain(given).copied().collect();
    let reduced: Vec<usize> = targets.iter().chain(given).copied().collect();
    let t: Vec<usize> = (0..targets.len()).collect();
    let v_full = submodel_innovation(model, &full, order)?;
    let v_red = submodel_innovation(model, &reduced, order)?;
    let ld_full = log_det(&linalg::submatrix(&v_full, &t))?;
    let ld_red = log_det(&linalg::submatrix(&v_red, &t))?;
    Ok(0.5 * (ld_red - ld_full))
}

/// Transfer entropy from `sources` to `target`, conditioned on every other
/// channel of the model.
pub fn transfer_entropy(model: &VarModel, sources: &[usize], target: usize, order: Option<usize>) -> Result<f64> {
    let srcs = check_channels(model.dim(), target, sources)?;
    let given: Vec<usize> = (0..model.dim()).filter(|i| *i != target && !srcs.contains(i)).collect();
    conditional_transfer_entropy(model, &srcs, &[target], &given, order)
}

/// Gaussian MI of the innovations of `target` and `sources`.
pub fn instantaneous_info(model: &VarModel, sources: &[usize], target: usize) -> Result<f64> {
    let srcs = check_channels(model.dim(), target, sources)?;
    model.ensure_stable()?;
    let s = model.sigma();
    let mut joint = vec![target];
    joint.extend_from_slice(&srcs);
    let ld = |idx: &[usize]| {
        linalg::log_det_spd(&linalg::submatrix(s, idx))
            .ok_or_else(|| PirdError::Numerical("innovation covariance block is not positive definite".into()))
    };
    Ok(0.5 * (s[(target, target)].ln() + ld(&srcs)? - ld(&joint)?))
}

/// PID of the joint transfer entropy into `target` with MMI redundancy.
///
/// Marginal terms are bivariate by default (source `m` and the target
/// only); `conditioned` instead conditions each on the remaining sources.
pub fn te_pid(
    model: &VarModel,
    target: usize,
    sources: &[usize],
    order: Option<usize>,
    conditioned: bool,
) -> Result<TePidResult> {
    check_multi_source(sources.len())?;
    check_distinct(sources)?;
    check_channels(model.dim(), target, sources)?;
    let joint = conditional_transfer_entropy(model, sources, &[target], &[], order)?;
    let marginals = sources
        .iter()
        .map(|&s| {
            let given: Vec<usize> = if conditioned {
                sources.iter().copied().filter(|&o| o != s).collect()
            } else {
                Vec::new()
            };
            conditional_transfer_entropy(model, &[s], &[target], &given, order)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MmiPid::from_terms(joint, marginals))
}

/// Terms of `I_{Y;X} = T_{X→Y} + T_{Y→X} + I_{X·Y}` for the sub-process
/// made of `target` and `sources`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MirSplit {
    pub te_to_target: f64,
    pub te_from_target: f64,
    pub instantaneous: f64,
}

impl MirSplit {
    pub fn total(&self) -> f64 {
        self.te_to_target + self.te_from_target + self.instantaneous
    }
}

pub fn mir_split(model: &VarModel, target: usize, sources: &[usize], order: Option<usize>) -> Result<MirSplit> {
    let srcs = check_channels(model.dim(), target, sources)?;
    let te_to_target = conditional_transfer_entropy(model, &srcs, &[target], &[], order)?;
    let te_from_target = conditional_transfer_entropy(model, &[target], &srcs, &[], order)?;
    let mut joint = vec![target];
    joint.extend_from_slice(&srcs);
    let v = submodel_innovation(model, &joint, order)?;
    let rest: Vec<usize> = (1..joint.len()).collect();
    let ld = |idx: &[usize]| log_det(&linalg::submatrix(&v, idx));
    let instantaneous = 0.5 * (v[(0, 0)].ln() + ld(&rest)? - ld(&(0..joint.len()).collect::<Vec<_>>())?);
    Ok(MirSplit { te_to_target, te_from_target, instantaneous })
}
