use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{TimeSeriesMatrix, VarModel};
use crate::error::{PirdError, Result};
use crate::linalg;

/// Draws `n` samples of the process after discarding `burn_in` warm-up
/// samples. Innovations are `Σ_U^{1/2} ε` with the symmetric square root;
/// output is a pure function of `(model, n, burn_in, seed)`.
pub fn simulate(model: &VarModel, n: usize, burn_in: usize, seed: u64) -> Result<TimeSeriesMatrix> {
    if n == 0 {
        return Err(PirdError::Argument("simulation length must be at least 1".into()));
    }
    model.ensure_stable()?;
    let q = model.dim();
    let p = model.order();
    let root = linalg::sym_sqrt(model.sigma())?;
    // Row-major copies for the inner loop.
    let root: Vec<f64> = root.transpose().as_slice().to_vec();
    let coeffs: Vec<Vec<f64>> = model
        .coeffs()
        .iter()
        .map(|a| a.transpose().as_slice().to_vec())
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let total = n + burn_in;
    // Pad with p zero rows of history.
    let mut z = vec![0.0; (total + p) * q];
    let mut eps = vec![0.0; q];
    for t in p..total + p {
        for e in eps.iter_mut() {
            *e = rng.sample(StandardNormal);
        }
        let (past, rest) = z.split_at_mut(t * q);
        let now = &mut rest[..q];
        for i in 0..q {
            let mut v: f64 = (0..q).map(|j| root[i * q + j] * eps[j]).sum();
            for (k, a) in coeffs.iter().enumerate() {
                let lagged = &past[(t - k - 1) * q..(t - k) * q];
                v += (0..q).map(|j| a[i * q + j] * lagged[j]).sum::<f64>();
            }
            now[i] = v;
        }
    }
    let start = (p + burn_in) * q;
    let samples = DMatrix::from_row_slice(n, q, &z[start..]);
    TimeSeriesMatrix::new(samples, model.fs(), model.names().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::Scenario;

    #[test]
    fn deterministic_given_seed() {
        let m = Scenario::Sim3.build().unwrap();
        let a = simulate(&m, 500, 100, 42).unwrap();
        let b = simulate(&m, 500, 100, 42).unwrap();
        let c = simulate(&m, 500, 100, 43).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn white_noise_covariance() {
        let m = VarModel::from_parts(vec![], DMatrix::identity(3, 3)).unwrap();
        let n = 200_000;
        let ts = simulate(&m, n, 0, 1).unwrap();
        let x = ts.samples();
        let cov = x.transpose() * x / n as f64;
        let tol = 5.0 / (n as f64).sqrt();
        for i in 0..3 {
            for j in 0..3 {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((cov[(i, j)] - target).abs() < tol, "{cov}");
            }
        }
    }

    #[test]
    fn ar1_stationary_variance() {
        let m = VarModel::from_parts(vec![DMatrix::from_element(1, 1, 0.5)], DMatrix::identity(1, 1))
            .unwrap();
        let n = 1_000_000;
        let ts = simulate(&m, n, 1000, 9).unwrap();
        let var = ts.samples().iter().map(|v| v * v).sum::<f64>() / n as f64;
        assert!((var / (4.0 / 3.0) - 1.0).abs() < 0.01, "{var}");
    }

    #[test]
    fn refuses_unstable_models() {
        let m = VarModel::from_parts(vec![DMatrix::from_element(1, 1, 1.01)], DMatrix::identity(1, 1))
            .unwrap();
        assert!(matches!(simulate(&m, 10, 0, 0), Err(PirdError::Instability(_))));
        let ok = Scenario::Sim3.build().unwrap();
        assert!(simulate(&ok, 0, 0, 0).is_err());
    }

    #[test]
    fn lyapunov_matches_long_simulation() {
        let m = Scenario::Sim3.build().unwrap();
        let g0 = m.zero_lag_covariance().unwrap();
        let n = 400_000;
        let ts = simulate(&m, n, 2000, 5).unwrap();
        let x = ts.samples();
        let cov = x.transpose() * x / n as f64;
        for i in 0..4 {
            assert!((cov[(i, i)] / g0[(i, i)] - 1.0).abs() < 0.01, "{cov} vs {g0}");
        }
    }
}
