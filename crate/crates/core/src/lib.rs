//! Partial information rate decomposition for vector autoregressive
//! processes.
//!
//! The pipeline goes from a [`VarModel`] (fitted or built from a benchmark
//! [`Scenario`]) to its power spectral density, spectral mutual information
//! rates, and the redundancy-lattice decomposition of the joint rate into
//! partial information rates, per frequency and integrated over bands.
//!
//! ```
//! use pird::{decompose, psd_from_var, CoarseRule, FrequencyGrid, Scenario};
//!
//! let model = Scenario::Sim1 { c: 0.0 }.build().unwrap();
//! let psd = psd_from_var(&model, &FrequencyGrid::new(257, model.fs()).unwrap()).unwrap();
//! let res = decompose(&psd, 0, &[1, 2], &[], CoarseRule::default()).unwrap();
//! assert!((res.coarse[0].redundancy - 0.5108256).abs() < 1e-6);
//! ```

pub mod baselines;
pub mod error;
pub mod export;
pub mod lattice;
pub mod linalg;
pub mod pird;
pub mod spectral;
pub mod var;

pub use nalgebra;

pub use baselines::{
    conditional_transfer_entropy, gaussian_mi, instantaneous_info, mir_split, static_pid, te_pid,
    transfer_entropy, MirSplit, MmiPid, StaticPidResult, TePidResult,
};
pub use error::{PirdError, Result};
pub use export::Units;
pub use lattice::{Atom, AtomGroup, RedundancyLattice};
pub use pird::{
    coarse_grained, decompose, smmi_redundancy_of_groups, smmi_redundancy_profile, spectral_pird, time_pird,
    CoarseProfiles, CoarseRule, CoarseTerms, DecompositionResult, SpectralPird, TimePird,
};
pub use spectral::{
    integrate_band, integrate_full, psd_from_var, spectral_mir, transfer_function, Band, FrequencyGrid,
    SpectralMatrix, SpectralProfile,
};
pub use var::{fit_ols, select_order_aic, simulate, OrderSelection, Scenario, TimeSeriesMatrix, VarModel};
