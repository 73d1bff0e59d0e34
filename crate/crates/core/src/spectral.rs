//! Parametric spectra of VAR processes and spectral mutual information rates.
//!
//! Frequencies are normalized circular frequencies `ω = 2πf/fs` sampled on
//! `[0, π]`. Spectra of real processes are even in `ω`, so the two-sided
//! integral `(1/2π)∫_{−π}^{π}` is evaluated as `(1/π)∫_0^π`.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{PirdError, Result};
use crate::linalg;
use crate::var::VarModel;

pub const DEFAULT_GRID_POINTS: usize = 2049;

/// Joint-determinant magnitude below which the spectral MIR is undefined.
pub const DET_FLOOR: f64 = 1e-300;

/// Relative size of an imaginary determinant residue that is discarded.
const HERMITIAN_RESIDUE: f64 = 1e-10;

/// Uniform grid of `n_points` frequencies spanning `[0, π]` inclusive.
#[derive(Clone, Debug, PartialEq)]
pub struct FrequencyGrid {
    fs: f64,
    omegas: Vec<f64>,
}

impl FrequencyGrid {
    pub fn new(n_points: usize, fs: f64) -> Result<Self> {
        if n_points < 2 {
            return Err(PirdError::Argument(format!("frequency grid needs ≥ 2 points, got {n_points}")));
        }
        if !(fs.is_finite() && fs > 0.0) {
            return Err(PirdError::Argument(format!("sampling frequency must be positive, got {fs}")));
        }
        let step = PI / (n_points - 1) as f64;
        let mut omegas: Vec<f64> = (0..n_points).map(|i| i as f64 * step).collect();
        omegas[n_points - 1] = PI;
        Ok(Self { fs, omegas })
    }

    pub fn len(&self) -> usize {
        self.omegas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omegas.is_empty()
    }

    pub fn fs(&self) -> f64 {
        self.fs
    }

    pub fn omegas(&self) -> &[f64] {
        &self.omegas
    }

    pub fn hz(&self) -> Vec<f64> {
        self.omegas.iter().map(|w| self.omega_to_hz(*w)).collect()
    }

    pub fn omega_to_hz(&self, omega: f64) -> f64 {
        omega * self.fs / (2.0 * PI)
    }

    pub fn hz_to_omega(&self, f: f64) -> f64 {
        2.0 * PI * f / self.fs
    }
}

/// A frequency band in Hz.
#[derive(Clone, Debug, PartialEq)]
pub struct Band {
    pub label: String,
    pub lo: f64,
    pub hi: f64,
}

impl Band {
    pub fn new(label: impl Into<String>, lo: f64, hi: f64) -> Result<Self> {
        let label = label.into();
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && lo < hi) {
            return Err(PirdError::Argument(format!("band {label}: need 0 ≤ lo < hi, got [{lo}, {hi}]")));
        }
        Ok(Self { label, lo, hi })
    }

    /// `[0, fs/2]`, labelled `FULL`.
    pub fn full(fs: f64) -> Self {
        Self { label: "FULL".into(), lo: 0.0, hi: fs / 2.0 }
    }

    /// Parses `"LF:0.04-0.15,HF:0.15-0.4"`.
    pub fn parse_list(list: &str) -> Result<Vec<Band>> {
        list.split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|item| {
                let bad = || PirdError::Argument(format!("malformed band {item:?}, expected LABEL:LO-HI"));
                let (label, range) = item.split_once(':').ok_or_else(bad)?;
                let (lo, hi) = range.split_once('-').ok_or_else(bad)?;
                let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
                let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
                Band::new(label.trim(), lo, hi)
            })
            .collect()
    }

    pub fn check_nyquist(&self, fs: f64) -> Result<()> {
        let nyquist = fs / 2.0;
        if self.hi > nyquist * (1.0 + 1e-12) {
            return Err(PirdError::Argument(format!(
                "band {} [{}, {}] Hz exceeds the Nyquist frequency {nyquist} Hz",
                self.label, self.lo, self.hi
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Band {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}-{}Hz]", self.label, self.lo, self.hi)
    }
}

/// Per-frequency `Q × Q` cross-spectral density matrices.
#[derive(Clone, Debug)]
pub struct SpectralMatrix {
    grid: FrequencyGrid,
    mats: Vec<DMatrix<Complex64>>,
}

impl SpectralMatrix {
    pub fn new(grid: FrequencyGrid, mats: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if mats.len() != grid.len() {
            return Err(PirdError::Argument(format!(
                "{} spectral matrices for {} grid points",
                mats.len(),
                grid.len()
            )));
        }
        let q = mats.first().map(|m| m.nrows()).unwrap_or(0);
        if q == 0 || mats.iter().any(|m| m.shape() != (q, q)) {
            return Err(PirdError::Argument("spectral matrices must be square with a common size".into()));
        }
        Ok(Self { grid, mats })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn mats(&self) -> &[DMatrix<Complex64>] {
        &self.mats
    }

    pub fn dim(&self) -> usize {
        self.mats[0].nrows()
    }

    /// Adds `δ · tr(P(ω))/Q` to every diagonal entry.
    pub fn with_diagonal_loading(&self, delta: f64) -> Result<Self> {
        if !(delta.is_finite() && delta >= 0.0) {
            return Err(PirdError::Argument(format!("diagonal loading must be ≥ 0, got {delta}")));
        }
        let q = self.dim();
        let mats = self
            .mats
            .iter()
            .map(|m| {
                let load = delta * m.trace().re / q as f64;
                let mut out = m.clone();
                for i in 0..q {
                    out[(i, i)] += Complex64::new(load, 0.0);
                }
                out
            })
            .collect();
        Ok(Self { grid: self.grid.clone(), mats })
    }

    /// Checks Hermitian symmetry, real positive diagonal and positive
    /// semi-definiteness at every grid point.
    pub fn check_invariants(&self) -> Result<()> {
        for (m, &w) in self.mats.iter().zip(self.grid.omegas()) {
            let f = self.grid.omega_to_hz(w);
            let scale = m.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let herm = (m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
            if herm > 1e-10 * scale {
                return Err(PirdError::Numerical(format!("PSD not Hermitian at {f} Hz")));
            }
            for i in 0..m.nrows() {
                let d = m[(i, i)];
                if !(d.re > 0.0) || d.im.abs() > 1e-10 * d.re {
                    return Err(PirdError::Numerical(format!("non-positive auto-spectrum at {f} Hz")));
                }
            }
            let trace = m.trace().re;
            let min = m.clone().symmetric_eigenvalues().min();
            if min < -1e-10 * trace {
                return Err(PirdError::Numerical(format!("PSD indefinite at {f} Hz (eigenvalue {min:e})")));
            }
        }
        Ok(())
    }

    /// Debug dump: per frequency, row-major `[re, im]` pairs.
    pub fn to_debug_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Dump<'a> {
            fs: f64,
            dim: usize,
            omegas: &'a [f64],
            mats: Vec<Vec<[f64; 2]>>,
        }
        let mats = self
            .mats
            .iter()
            .map(|m| m.transpose().iter().map(|z| [z.re, z.im]).collect())
            .collect();
        let dump = Dump { fs: self.grid.fs(), dim: self.dim(), omegas: self.grid.omegas(), mats };
        Ok(serde_json::to_string(&dump)?)
    }
}

/// A real function sampled on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProfile {
    grid: FrequencyGrid,
    values: Vec<f64>,
}

impl SpectralProfile {
    pub fn new(grid: FrequencyGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(PirdError::Argument(format!(
                "{} profile values for {} grid points",
                values.len(),
                grid.len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(PirdError::Numerical(format!(
                "non-finite profile value at {} Hz",
                grid.omega_to_hz(grid.omegas()[i])
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn constant(grid: FrequencyGrid, value: f64) -> Result<Self> {
        let n = grid.len();
        Self::new(grid, vec![value; n])
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn from_parts_unchecked(grid: FrequencyGrid, values: Vec<f64>) -> Self {
        Self { grid, values }
    }

    /// Writes `f_hz,value` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["f_hz", "value"])?;
        for (f, v) in self.grid.hz().iter().zip(&self.values) {
            w.write_record([format!("{f:?}"), format!("{v:?}")])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn check_grid_matches(model: &VarModel, grid: &FrequencyGrid) -> Result<()> {
    if (model.fs() - grid.fs()).abs() > 1e-12 * model.fs() {
        return Err(PirdError::Argument(format!(
            "grid sampling rate {} Hz differs from the model's {} Hz",
            grid.fs(),
            model.fs()
        )));
    }
    Ok(())
}

fn transfer_at(model: &VarModel, omega: f64) -> Option<DMatrix<Complex64>> {
    let q = model.dim();
    let mut a = DMatrix::<Complex64>::identity(q, q);
    for (k, ak) in model.coeffs().iter().enumerate() {
        let phase = Complex64::from_polar(1.0, -omega * (k + 1) as f64);
        a -= ak.map(|v| Complex64::new(v, 0.0)) * phase;
    }
    a.try_inverse().filter(|h| h.iter().all(|z| z.re.is_finite() && z.im.is_finite()))
}

/// `H(ω) = [I − Σ_k A_k e^{−jωk}]^{−1}` at every grid point.
pub fn transfer_function(model: &VarModel, grid: &FrequencyGrid) -> Result<Vec<DMatrix<Complex64>>> {
    model.ensure_stable()?;
    check_grid_matches(model, grid)?;
    grid.omegas()
        .par_iter()
        .map(|&w| {
            transfer_at(model, w).ok_or_else(|| {
                PirdError::Numerical(format!(
                    "I − A(ω) is singular at {} Hz",
                    grid.omega_to_hz(w)
                ))
            })
        })
        .collect()
}

/// `P(ω) = H(ω) Σ_U H(ω)*`, symmetrized to exact Hermitian form.
pub fn psd_from_var(model: &VarModel, grid: &FrequencyGrid) -> Result<SpectralMatrix> {
    let hs = transfer_function(model, grid)?;
    let sigma = model.sigma().map(|v| Complex64::new(v, 0.0));
    let mats = hs
        .par_iter()
        .map(|h| {
            let p = h * &sigma * h.adjoint();
            (&p + p.adjoint()).scale(0.5)
        })
        .collect();
    SpectralMatrix::new(grid.clone(), mats)
}

fn real_det(m: &DMatrix<Complex64>, what: &str, f_hz: f64) -> Result<f64> {
    let d = linalg::complex_det(m);
    if !(d.re.is_finite() && d.im.is_finite()) {
        return Err(PirdError::Numerical(format!("non-finite {what} determinant at {f_hz} Hz")));
    }
    if d.im.abs() > HERMITIAN_RESIDUE * d.re.abs().max(f64::MIN_POSITIVE) && d.im.abs() > DET_FLOOR {
        return Err(PirdError::Numerical(format!(
            "{what} determinant has imaginary part {:e} at {f_hz} Hz (matrix not Hermitian)",
            d.im
        )));
    }
    Ok(d.re)
}

/// Validates `target ∉ sources`, indices in range, and returns sorted,
/// deduplicated sources.
pub(crate) fn check_channels(dim: usize, target: usize, sources: &[usize]) -> Result<Vec<usize>> {
    if sources.is_empty() {
        return Err(PirdError::Argument("source set must be nonempty".into()));
    }
    if target >= dim {
        return Err(PirdError::Argument(format!("target channel {target} out of range (dim {dim})")));
    }
    let mut s = sources.to_vec();
    s.sort_unstable();
    s.dedup();
    if let Some(bad) = s.iter().find(|&&i| i >= dim) {
        return Err(PirdError::Argument(format!("source channel {bad} out of range (dim {dim})")));
    }
    if s.contains(&target) {
        return Err(PirdError::Argument(format!("target channel {target} is also a source")));
    }
    Ok(s)
}

/// Spectral MIR between one target channel and a group of source channels:
/// `i(ω) = ½ ln( |P_S(ω)| P_T(ω) / |P_[TS](ω)| )`.
pub fn spectral_mir(psd: &SpectralMatrix, target: usize, sources: &[usize]) -> Result<SpectralProfile> {
    let sources = check_channels(psd.dim(), target, sources)?;
    let mut joint = Vec::with_capacity(sources.len() + 1);
    joint.push(target);
    joint.extend_from_slice(&sources);
    let grid = psd.grid();

    let values = psd
        .mats()
        .par_iter()
        .zip(grid.omegas().par_iter())
        .map(|(m, &w)| {
            let f = grid.omega_to_hz(w);
            let det_joint = real_det(&linalg::submatrix(m, &joint), "joint", f)?;
            if det_joint.abs() <= DET_FLOOR {
                return Err(PirdError::Numerical(format!(
                    "joint spectral matrix is singular at {f} Hz (|det| = {det_joint:e})"
                )));
            }
            let det_src = real_det(&linalg::submatrix(m, &sources), "source", f)?;
            let p_t = m[(target, target)].re;
            let ratio = det_src * p_t / det_joint;
            if !(ratio > 0.0) || !ratio.is_finite() {
                return Err(PirdError::Numerical(format!(
                    "spectral determinant ratio {ratio:e} is not positive at {f} Hz"
                )));
            }
            Ok(0.5 * ratio.ln())
        })
        .collect::<Result<Vec<f64>>>()?;
    SpectralProfile::new(grid.clone(), values)
}

/// `(1/π) ∫_0^π i(ω) dω` by the composite trapezoid rule.
pub fn integrate_full(profile: &SpectralProfile) -> f64 {
    let w = profile.grid().omegas();
    let v = profile.values();
    let sum: f64 = (0..w.len() - 1).map(|i| (w[i + 1] - w[i]) * (v[i] + v[i + 1])).sum();
    0.5 * sum / PI
}

/// Trapezoid integral of the piecewise-linear profile over a band, with
/// linear interpolation at the band edges, normalized like
/// [`integrate_full`].
pub fn integrate_band(profile: &SpectralProfile, band: &Band) -> Result<f64> {
    let grid = profile.grid();
    band.check_nyquist(grid.fs())?;
    let a = grid.hz_to_omega(band.lo);
    let b = grid.hz_to_omega(band.hi).min(PI);
    let w = grid.omegas();
    let v = profile.values();
    let mut sum = 0.0;
    for i in 0..w.len() - 1 {
        let (w0, w1) = (w[i], w[i + 1]);
        let lo = w0.max(a);
        let hi = w1.min(b);
        if hi <= lo {
            continue;
        }
        let at = |x: f64| {
            if x == w0 {
                v[i]
            } else if x == w1 {
                v[i + 1]
            } else {
                v[i] + (v[i + 1] - v[i]) * (x - w0) / (w1 - w0)
            }
        };
        sum += (hi - lo) * (at(lo) + at(hi));
    }
    Ok(0.5 * sum / PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::var::Scenario;
    use approx::assert_relative_eq;

    fn ar1(a: f64) -> VarModel {
        VarModel::from_parts(vec![DMatrix::from_element(1, 1, a)], DMatrix::identity(1, 1)).unwrap()
    }

    fn grid(n: usize) -> FrequencyGrid {
        FrequencyGrid::new(n, 1.0).unwrap()
    }

    #[test]
    fn grid_endpoints() {
        let g = grid(5);
        assert_eq!(g.omegas()[0], 0.0);
        assert_eq!(*g.omegas().last().unwrap(), PI);
        assert!(g.omegas().windows(2).all(|w| w[0] < w[1]));
        assert_relative_eq!(*g.hz().last().unwrap(), 0.5);
        assert!(FrequencyGrid::new(1, 1.0).is_err());
    }

    #[test]
    fn transfer_function_cases() {
        let white = VarModel::from_parts(vec![DMatrix::zeros(2, 2)], DMatrix::identity(2, 2)).unwrap();
        for h in transfer_function(&white, &grid(9)).unwrap() {
            assert_eq!(h, DMatrix::identity(2, 2));
        }
        let h = transfer_function(&ar1(0.5), &grid(9)).unwrap();
        assert_relative_eq!(h[0][(0, 0)].norm_sqr(), 4.0, epsilon = 1e-14);

        let m = Scenario::Sim3.build().unwrap();
        let h = transfer_function(&m, &grid(9)).unwrap();
        let at_pi = h.last().unwrap();
        assert!(at_pi.iter().all(|z| z.im.abs() < 1e-12));
    }

    #[test]
    fn transfer_function_refuses_unstable() {
        assert!(matches!(transfer_function(&ar1(1.0), &grid(9)), Err(PirdError::Instability(_))));
        let g2 = FrequencyGrid::new(9, 2.0).unwrap();
        assert!(transfer_function(&ar1(0.3), &g2).is_err());
    }

    #[test]
    fn psd_closed_forms() {
        let p = psd_from_var(&ar1(0.5), &grid(3)).unwrap();
        assert_relative_eq!(p.mats()[0][(0, 0)].re, 4.0, epsilon = 1e-13);
        assert_relative_eq!(p.mats()[2][(0, 0)].re, 1.0 / 2.25, epsilon = 1e-13);

        let white = VarModel::from_parts(vec![], DMatrix::identity(3, 3)).unwrap();
        let p = psd_from_var(&white, &grid(5)).unwrap();
        assert!(p.mats().iter().all(|m| *m == DMatrix::identity(3, 3)));
    }

    #[test]
    fn wiener_khinchin_against_lyapunov() {
        for m in [
            ar1(0.5),
            Scenario::Sim1 { c: 0.6 }.build().unwrap(),
            Scenario::Sim3.build().unwrap(),
        ] {
            let g0 = m.zero_lag_covariance().unwrap();
            let psd = psd_from_var(&m, &grid(DEFAULT_GRID_POINTS)).unwrap();
            for i in 0..m.dim() {
                let diag: Vec<f64> = psd.mats().iter().map(|p| p[(i, i)].re).collect();
                let prof = SpectralProfile::new(psd.grid().clone(), diag).unwrap();
                let var = integrate_full(&prof);
                assert!((var / g0[(i, i)] - 1.0).abs() < 1e-3, "{var} vs {}", g0[(i, i)]);
            }
        }
    }

    #[test]
    fn psd_invariants_hold_for_benchmarks() {
        for s in [Scenario::Sim1 { c: 0.8 }, Scenario::Sim2 { c: 0.4 }, Scenario::Sim3] {
            let m = s.build().unwrap();
            psd_from_var(&m, &grid(257)).unwrap().check_invariants().unwrap();
        }
    }

    #[test]
    fn mir_of_independent_blocks_is_zero() {
        let sigma = DMatrix::from_row_slice(3, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.5, 2.0]);
        let mut a = DMatrix::zeros(3, 3);
        a[(0, 0)] = 0.4;
        a[(1, 2)] = 0.3;
        let m = VarModel::from_parts(vec![a], sigma).unwrap();
        let psd = psd_from_var(&m, &grid(65)).unwrap();
        let i = spectral_mir(&psd, 0, &[1, 2]).unwrap();
        assert!(i.values().iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn sim1_flat_profiles() {
        let m = Scenario::Sim1 { c: 0.0 }.build().unwrap();
        let psd = psd_from_var(&m, &grid(65)).unwrap();
        let single = spectral_mir(&psd, 0, &[1]).unwrap();
        let joint = spectral_mir(&psd, 0, &[1, 2]).unwrap();
        let i_single = -0.5 * (1.0f64 - 0.64).ln();
        let i_joint = 0.5 * (0.36f64 / 0.104).ln();
        assert!(single.values().iter().all(|v| (v - i_single).abs() < 1e-12));
        assert!(joint.values().iter().all(|v| (v - i_joint).abs() < 1e-12));
        assert_relative_eq!(integrate_full(&joint), i_joint, epsilon = 1e-12);
    }

    #[test]
    fn channel_checks() {
        let m = Scenario::Sim3.build().unwrap();
        let psd = psd_from_var(&m, &grid(9)).unwrap();
        assert!(spectral_mir(&psd, 0, &[0, 1]).is_err());
        assert!(spectral_mir(&psd, 0, &[]).is_err());
        assert!(spectral_mir(&psd, 0, &[7]).is_err());
        assert!(spectral_mir(&psd, 9, &[1]).is_err());
    }

    #[test]
    fn singular_psd_is_reported() {
        // Perfectly correlated innovations make the joint block singular.
        let g = grid(5);
        let one = Complex64::new(1.0, 0.0);
        let mats = vec![DMatrix::from_element(2, 2, one); 5];
        let psd = SpectralMatrix::new(g, mats).unwrap();
        let err = spectral_mir(&psd, 0, &[1]).unwrap_err();
        assert!(matches!(err, PirdError::Numerical(ref msg) if msg.contains("Hz")), "{err}");
        let loaded = psd.with_diagonal_loading(0.1).unwrap();
        assert!(spectral_mir(&loaded, 0, &[1]).is_ok());
    }

    #[test]
    fn integration_rules() {
        let g = grid(101);
        let c = SpectralProfile::constant(g.clone(), 0.7).unwrap();
        assert_relative_eq!(integrate_full(&c), 0.7, epsilon = 1e-14);
        let half = Band::new("lo", 0.0, 0.25).unwrap();
        assert_relative_eq!(integrate_band(&c, &half).unwrap(), 0.35, epsilon = 1e-14);
        assert_relative_eq!(
            integrate_band(&c, &Band::full(1.0)).unwrap(),
            integrate_full(&c),
            epsilon = 1e-15
        );
        assert!(integrate_band(&c, &Band::new("x", 0.1, 0.6).unwrap()).is_err());
    }

    #[test]
    fn band_partition_sums_to_full() {
        let m = Scenario::Sim3.build().unwrap();
        let psd = psd_from_var(&m, &grid(DEFAULT_GRID_POINTS)).unwrap();
        let prof = spectral_mir(&psd, 0, &[1]).unwrap();
        let edges = [0.0, 0.04, 0.1234567, 0.15, 0.4, 0.5];
        let total: f64 = edges
            .windows(2)
            .map(|e| integrate_band(&prof, &Band::new("b", e[0], e[1]).unwrap()).unwrap())
            .sum();
        assert!((total - integrate_full(&prof)).abs() < 1e-9);
    }

    #[test]
    fn band_parsing() {
        let bands = Band::parse_list("LF:0.04-0.15, HF:0.15-0.4").unwrap();
        assert_eq!(bands.len(), 2);
        assert_eq!(bands[1], Band::new("HF", 0.15, 0.4).unwrap());
        assert!(Band::parse_list("LF:0.2-0.1").is_err());
        assert!(Band::parse_list("LF0.1-0.2").is_err());
    }

    #[test]
    fn debug_dump_shape() {
        let m = Scenario::Sim2 { c: 0.2 }.build().unwrap();
        let psd = psd_from_var(&m, &grid(3)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&psd.to_debug_json().unwrap()).unwrap();
        assert_eq!(v["mats"].as_array().unwrap().len(), 3);
        assert_eq!(v["mats"][0].as_array().unwrap().len(), 9);
    }
}
