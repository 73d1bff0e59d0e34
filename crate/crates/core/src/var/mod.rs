//! Vector autoregressive processes.
//!
//! `Z(t) = Σ_{k=1..p} A_k Z(t−k) + U(t)` with white innovations of covariance
//! `Σ_U`. Channel 0 is conventionally the target `Y`, channels `1..=M` the
//! sources, but nothing here depends on that.

mod estimate;
mod scenario;
mod series;
mod simulate;

pub use estimate::{fit_ols, select_order_aic, OrderSelection};
pub use scenario::{poles_to_coeffs, Scenario};
pub use series::TimeSeriesMatrix;
pub use simulate::simulate;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{PirdError, Result};
use crate::linalg;

/// Default stability margin: the companion spectral radius must stay below
/// `1 − DEFAULT_STABILITY_EPS`.
pub const DEFAULT_STABILITY_EPS: f64 = 1e-6;

/// Default channel labels: `Y, X1, X2, …`.
pub fn default_names(dim: usize) -> Vec<String> {
    (0..dim)
        .map(|i| if i == 0 { "Y".to_string() } else { format!("X{i}") })
        .collect()
}

/// Parameters of a VAR(p) process.
#[derive(Clone, Debug, PartialEq)]
pub struct VarModel {
    coeffs: Vec<DMatrix<f64>>,
    sigma: DMatrix<f64>,
    fs: f64,
    names: Vec<String>,
}

impl VarModel {
    /// Validates shapes and requires `sigma` symmetric positive definite.
    pub fn new(
        coeffs: Vec<DMatrix<f64>>,
        sigma: DMatrix<f64>,
        fs: f64,
        names: Vec<String>,
    ) -> Result<Self> {
        let q = sigma.nrows();
        if q == 0 || !sigma.is_square() {
            return Err(PirdError::Argument("innovation covariance must be square and nonempty".into()));
        }
        if let Some(k) = coeffs.iter().position(|a| a.shape() != (q, q)) {
            return Err(PirdError::Argument(format!(
                "lag-{} coefficient matrix is {:?}, expected {q}×{q}",
                k + 1,
                coeffs[k].shape()
            )));
        }
        if names.len() != q {
            return Err(PirdError::Argument(format!("{} channel names for {q} channels", names.len())));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(PirdError::Argument(format!("sampling frequency must be positive, got {fs}")));
        }
        let finite = sigma.iter().chain(coeffs.iter().flat_map(|a| a.iter())).all(|v| v.is_finite());
        if !finite {
            return Err(PirdError::Argument("model parameters must be finite".into()));
        }
        if !linalg::is_symmetric(&sigma, 1e-10) {
            return Err(PirdError::Argument("innovation covariance is not symmetric".into()));
        }
        let sigma = linalg::symmetrize(&sigma);
        let min_eig = linalg::min_eigenvalue_sym(&sigma);
        if min_eig <= 0.0 {
            return Err(PirdError::Argument(format!(
                "innovation covariance is not positive definite (smallest eigenvalue {min_eig:e})"
            )));
        }
        Ok(Self { coeffs, sigma, fs, names })
    }

    /// Model with unit sampling rate and default channel names.
    pub fn from_parts(coeffs: Vec<DMatrix<f64>>, sigma: DMatrix<f64>) -> Result<Self> {
        let q = sigma.nrows();
        Self::new(coeffs, sigma, 1.0, default_names(q))
    }

    pub fn dim(&self) -> usize {
        self.sigma.nrows()
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Lag matrices `A_1..A_p`.
    pub fn coeffs(&self) -> &[DMatrix<f64>] {
        &self.coeffs
    }

    pub fn sigma(&self) -> &DMatrix<f64> {
        &self.sigma
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn with_fs(mut self, fs: f64) -> Result<Self> {
        if !(fs.is_finite() && fs > 0.0) {
            return Err(PirdError::Argument(format!("sampling frequency must be positive, got {fs}")));
        }
        self.fs = fs;
        Ok(self)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self> {
        if names.len() != self.dim() {
            return Err(PirdError::Argument(format!(
                "{} channel names for {} channels",
                names.len(),
                self.dim()
            )));
        }
        self.names = names;
        Ok(self)
    }

    pub fn channel_index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    /// `pQ × pQ` companion matrix.
    pub fn companion(&self) -> DMatrix<f64> {
        linalg::companion(&self.coeffs, self.dim())
    }

    pub fn spectral_radius(&self) -> f64 {
        linalg::spectral_radius(&self.companion())
    }

    /// `1 − ρ(companion)`.
    pub fn stability_margin(&self) -> f64 {
        1.0 - self.spectral_radius()
    }

    pub fn is_stable(&self, eps: f64) -> bool {
        self.order() == 0 || self.spectral_radius() < 1.0 - eps
    }

    pub(crate) fn ensure_stable(&self) -> Result<()> {
        if self.is_stable(DEFAULT_STABILITY_EPS) {
            Ok(())
        } else {
            Err(PirdError::Instability(format!(
                "companion spectral radius {:.9} is not below 1 − {DEFAULT_STABILITY_EPS:e}",
                self.spectral_radius()
            )))
        }
    }

    /// Stationary covariance of the stacked state `[Z(t); …; Z(t−p+1)]`,
    /// from the discrete Lyapunov equation `Γ̄ = Ā Γ̄ Āᵀ + Σ̄` solved as a dense
    /// `(pQ)² × (pQ)²` linear system.
    pub fn state_covariance(&self) -> Result<DMatrix<f64>> {
        self.ensure_stable()?;
        let q = self.dim();
        if self.order() == 0 {
            return Ok(self.sigma.clone());
        }
        let n = self.order() * q;
        let a = self.companion();
        let mut sigma_bar = DMatrix::zeros(n, n);
        sigma_bar.view_mut((0, 0), (q, q)).copy_from(&self.sigma);

        // vec(A X Aᵀ) = (A ⊗ A) vec(X) for column-major vec.
        let system = DMatrix::identity(n * n, n * n) - a.kronecker(&a);
        let rhs = nalgebra::DVector::from_column_slice(sigma_bar.as_slice());
        let sol = system.lu().solve(&rhs).ok_or_else(|| {
            PirdError::Numerical("singular Lyapunov system for the state covariance".into())
        })?;
        let gamma = DMatrix::from_column_slice(n, n, sol.as_slice());
        Ok(linalg::symmetrize(&gamma))
    }

    /// Zero-lag covariance `Γ_0 = E[Z(t) Z(t)ᵀ]`.
    pub fn zero_lag_covariance(&self) -> Result<DMatrix<f64>> {
        let q = self.dim();
        Ok(self.state_covariance()?.view((0, 0), (q, q)).into_owned())
    }

    /// `Γ_0..=Γ_K` with `Γ_k = E[Z(t) Z(t−k)ᵀ]`.
    ///
    /// Lags below `p` come from the state covariance; later lags follow the
    /// Yule–Walker recursion `Γ_k = Σ_j A_j Γ_{k−j}`.
    pub fn autocovariance_sequence(&self, max_lag: usize) -> Result<Vec<DMatrix<f64>>> {
        let q = self.dim();
        let p = self.order();
        let state = self.state_covariance()?;
        let mut gammas: Vec<DMatrix<f64>> = Vec::with_capacity(max_lag + 1);
        for k in 0..=max_lag {
            let g = if k < p.max(1) {
                if p == 0 {
                    state.clone()
                } else {
                    state.view((0, k * q), (q, q)).into_owned()
                }
            } else {
                let mut g = DMatrix::zeros(q, q);
                for (j, a) in self.coeffs.iter().enumerate() {
                    g += a * &gammas[k - j - 1];
                }
                g
            };
            gammas.push(g);
        }
        Ok(gammas)
    }

    /// Random stable model with companion spectral radius exactly
    /// `radius` (< 1). Coefficients are Gaussian then rescaled lag-wise,
    /// `A_k ← A_k (radius/ρ)^k`, which scales every companion eigenvalue
    /// by `radius/ρ`. The innovation covariance is a random well-conditioned
    /// SPD matrix.
    pub fn random_stable(dim: usize, order: usize, radius: f64, seed: u64) -> Result<Self> {
        if dim == 0 || !(0.0..1.0).contains(&radius) {
            return Err(PirdError::Argument(format!(
                "random model needs dim ≥ 1 and radius in [0,1), got {dim}, {radius}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let normal = |rng: &mut ChaCha8Rng| -> f64 { rng.sample(StandardNormal) };
        let mut coeffs: Vec<DMatrix<f64>> = (0..order)
            .map(|_| DMatrix::from_fn(dim, dim, |_, _| 0.5 * normal(&mut rng)))
            .collect();
        if order > 0 {
            let rho = linalg::spectral_radius(&linalg::companion(&coeffs, dim));
            if rho > 0.0 {
                let scale = radius / rho;
                for (k, a) in coeffs.iter_mut().enumerate() {
                    *a *= scale.powi(k as i32 + 1);
                }
            }
        }
        let b = DMatrix::from_fn(dim, dim, |_, _| normal(&mut rng));
        let sigma = &b * b.transpose() / dim as f64 + DMatrix::identity(dim, dim) * 0.2;
        let sigma = linalg::symmetrize(&sigma);
        Self::from_parts(coeffs, sigma)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&VarModelDoc::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: VarModelDoc = serde_json::from_str(text)?;
        doc.into_model()
    }
}

/// JSON document for a [`VarModel`]; matrices are flattened row-major.
#[derive(Debug, Serialize, Deserialize)]
struct VarModelDoc {
    dim: usize,
    order: usize,
    fs: f64,
    names: Vec<String>,
    coeffs: Vec<Vec<f64>>,
    sigma: Vec<f64>,
}

fn row_major(m: &DMatrix<f64>) -> Vec<f64> {
    m.transpose().as_slice().to_vec()
}

impl From<&VarModel> for VarModelDoc {
    fn from(m: &VarModel) -> Self {
        Self {
            dim: m.dim(),
            order: m.order(),
            fs: m.fs,
            names: m.names.clone(),
            coeffs: m.coeffs.iter().map(row_major).collect(),
            sigma: row_major(&m.sigma),
        }
    }
}

impl VarModelDoc {
    fn into_model(self) -> Result<VarModel> {
        let q = self.dim;
        let bad = |what: &str| PirdError::Format(format!("model document: {what}"));
        if self.coeffs.len() != self.order {
            return Err(bad("coeffs length does not match order"));
        }
        if self.sigma.len() != q * q || self.coeffs.iter().any(|c| c.len() != q * q) {
            return Err(bad("matrix sizes do not match dim"));
        }
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| DMatrix::from_row_slice(q, q, c))
            .collect();
        let sigma = DMatrix::from_row_slice(q, q, &self.sigma);
        VarModel::new(coeffs, sigma, self.fs, self.names).map_err(|e| match e {
            PirdError::Argument(msg) => PirdError::Format(format!("model document: {msg}")),
            other => other,
        })
    }
}
