//! Benchmark VAR systems.
//!
//! * `sim1(c)`: three processes where `c` trades zero-lag correlation
//!   (`Σ_U` off-diagonals `0.8 − c`) for lagged coupling `X1 → Y` (lag 1),
//!   `X2 → Y` (lag 2) and resonances in both sources.
//! * `sim2(c)`: three processes whose lag-1 couplings move from
//!   sources→target (`c = 0`) to target→sources (`c = 0.8`); `Σ_U = I`.
//! * `sim3`: four processes, `Y ← X1, X3`, `X1 → X2`, unit couplings,
//!   `X1, X2` resonant at 0.3 Hz and `X3` at 0.1 Hz.

use std::fmt;

use nalgebra::DMatrix;

use super::VarModel;
use crate::error::{PirdError, Result};

/// AR(2) coefficients of a complex-conjugate pole pair with modulus `rho`
/// at frequency `f`: `a1 = 2ρ cos(2πf/fs)`, `a2 = −ρ²`.
pub fn poles_to_coeffs(rho: f64, f: f64, fs: f64) -> Result<(f64, f64)> {
    if !(fs > 0.0) {
        return Err(PirdError::Argument(format!("sampling frequency must be positive, got {fs}")));
    }
    if rho >= 1.0 {
        return Err(PirdError::Instability(format!("pole modulus {rho} is not below 1")));
    }
    if !(rho >= 0.0) {
        return Err(PirdError::Argument(format!("pole modulus must be non-negative, got {rho}")));
    }
    if !(0.0..=fs / 2.0).contains(&f) {
        return Err(PirdError::Argument(format!("pole frequency {f} outside [0, {}]", fs / 2.0)));
    }
    let a1 = 2.0 * rho * (2.0 * std::f64::consts::PI * f / fs).cos();
    Ok((a1, -rho * rho))
}

/// Parameterized benchmark system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scenario {
    Sim1 { c: f64 },
    Sim2 { c: f64 },
    Sim3,
}

const C_MAX: f64 = 0.8;

impl Scenario {
    /// Parses an id (`sim1`, `sim2`, `sim3`); `c` is required by sim1/sim2.
    pub fn from_id(id: &str, c: Option<f64>) -> Result<Self> {
        let need_c = || {
            c.ok_or_else(|| PirdError::Argument(format!("scenario {id} needs parameter c")))
        };
        let s = match id.to_ascii_lowercase().as_str() {
            "sim1" => Scenario::Sim1 { c: need_c()? },
            "sim2" => Scenario::Sim2 { c: need_c()? },
            "sim3" => Scenario::Sim3,
            other => {
                return Err(PirdError::Argument(format!(
                    "unknown scenario {other:?} (expected sim1, sim2 or sim3)"
                )))
            }
        };
        s.validate()?;
        Ok(s)
    }

    pub fn id(&self) -> &'static str {
        match self {
            Scenario::Sim1 { .. } => "sim1",
            Scenario::Sim2 { .. } => "sim2",
            Scenario::Sim3 => "sim3",
        }
    }

    pub fn c(&self) -> Option<f64> {
        match *self {
            Scenario::Sim1 { c } | Scenario::Sim2 { c } => Some(c),
            Scenario::Sim3 => None,
        }
    }

    fn validate(&self) -> Result<()> {
        match self.c() {
            Some(c) if !(0.0..=C_MAX + 1e-12).contains(&c) => Err(PirdError::Argument(format!(
                "{}: c = {c} outside [0, {C_MAX}]",
                self.id()
            ))),
            _ => Ok(()),
        }
    }

    pub fn build(&self) -> Result<VarModel> {
        self.validate()?;
        match *self {
            Scenario::Sim1 { c } => sim1(c.min(C_MAX)),
            Scenario::Sim2 { c } => sim2(c.min(C_MAX)),
            Scenario::Sim3 => sim3(),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.c() {
            Some(c) => write!(f, "{}(c={c})", self.id()),
            None => write!(f, "{}", self.id()),
        }
    }
}

fn names(q: usize) -> Vec<String> {
    super::default_names(q)
}

fn sim1(c: f64) -> Result<VarModel> {
    let q = 3;
    let mut a = vec![DMatrix::zeros(q, q); 4];
    a[0][(0, 1)] = c;
    a[1][(0, 2)] = c;

    let (a11, a12) = poles_to_coeffs(c, 0.1, 1.0)?;
    a[0][(1, 1)] = a11;
    a[1][(1, 1)] = a12;

    // (1 − α1 z − α2 z²)(1 − β1 z − β2 z²) = 1 − Σ a_k z^k
    let (al1, al2) = poles_to_coeffs(c, 0.1, 1.0)?;
    let (be1, be2) = poles_to_coeffs(1.125 * c, 0.3, 1.0)?;
    a[0][(2, 2)] = al1 + be1;
    a[1][(2, 2)] = al2 + be2 - al1 * be1;
    a[2][(2, 2)] = -(al1 * be2 + al2 * be1);
    a[3][(2, 2)] = -al2 * be2;

    let off = 0.8 - c;
    let sigma = DMatrix::from_fn(q, q, |i, j| if i == j { 1.0 } else { off });
    VarModel::new(a, sigma, 1.0, names(q))
}

fn sim2(c: f64) -> Result<VarModel> {
    let q = 3;
    let mut a1 = DMatrix::zeros(q, q);
    a1[(0, 1)] = 0.8 - c;
    a1[(0, 2)] = 1.6 - 2.0 * c;
    a1[(1, 0)] = c;
    a1[(2, 0)] = 2.0 * c;
    VarModel::new(vec![a1], DMatrix::identity(q, q), 1.0, names(q))
}

fn sim3() -> Result<VarModel> {
    let q = 4;
    let (r1, r2) = poles_to_coeffs(0.8, 0.3, 1.0)?;
    let (s1, s2) = poles_to_coeffs(0.9, 0.1, 1.0)?;
    let mut a1 = DMatrix::zeros(q, q);
    let mut a2 = DMatrix::zeros(q, q);
    a1[(0, 1)] = 1.0;
    a1[(0, 3)] = 1.0;
    a1[(1, 1)] = r1;
    a2[(1, 1)] = r2;
    a1[(2, 2)] = r1;
    a2[(2, 2)] = r2;
    a1[(2, 1)] = 1.0;
    a1[(3, 3)] = s1;
    a2[(3, 3)] = s2;
    VarModel::new(vec![a1, a2], DMatrix::identity(q, q), 1.0, names(q))
}
