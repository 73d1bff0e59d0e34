//! Partial information rate decomposition with the spectral minimum-MIR
//! redundancy.
//!
//! For an atom `α = {α_1 … α_J}` the spectral redundancy is the pointwise
//! minimum `i∩_α(ω) = min_j i_{Y;X_{α_j}}(ω)`. Partial information rates
//! follow per frequency by Möbius inversion on the redundancy lattice, and
//! their time-domain (or band-limited) values by spectral integration.

use std::collections::HashMap;

use crate::error::{PirdError, Result};
use crate::lattice::{Atom, AtomGroup, RedundancyLattice};
use crate::spectral::{
    check_channels, integrate_band, integrate_full, spectral_mir, Band, FrequencyGrid, SpectralMatrix,
    SpectralProfile,
};

/// How unique, redundant and synergistic terms are formed from the lattice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CoarseRule {
    /// Sum atom partial rates by [`AtomGroup`]: unique to `m` are atoms whose
    /// only singleton element is `{m}`, redundant are atoms with at least two
    /// singleton elements, synergistic are atoms with none.
    #[default]
    AtomGroups,
    /// `r = min_m i_{Y;X_m}`, `u_m = i_{Y;X_m} − r`, `s = i_{Y;X} − r − Σ u_m`.
    BottomAtom,
}

impl std::str::FromStr for CoarseRule {
    type Err = PirdError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "atoms" | "atom-groups" => Ok(CoarseRule::AtomGroups),
            "bottom" | "bottom-atom" => Ok(CoarseRule::BottomAtom),
            other => Err(PirdError::Argument(format!(
                "unknown coarse rule {other:?} (expected atoms or bottom)"
            ))),
        }
    }
}

fn pointwise_min(profiles: &[&SpectralProfile]) -> SpectralProfile {
    let first = profiles[0];
    let values = (0..first.values().len())
        .map(|i| profiles.iter().map(|p| p.values()[i]).fold(f64::INFINITY, f64::min))
        .collect();
    SpectralProfile::from_parts_unchecked(first.grid().clone(), values)
}

fn check_sources(psd: &SpectralMatrix, target: usize, sources: &[usize]) -> Result<()> {
    let sorted = check_channels(psd.dim(), target, sources)?;
    if sorted.len() != sources.len() {
        return Err(PirdError::Argument("source channels must be distinct".into()));
    }
    Ok(())
}

/// SMMI redundancy of groups of channels: pointwise minimum of the spectral
/// MIRs between `target` and each group.
pub fn smmi_redundancy_of_groups(
    psd: &SpectralMatrix,
    target: usize,
    groups: &[Vec<usize>],
) -> Result<SpectralProfile> {
    if groups.is_empty() {
        return Err(PirdError::Argument("redundancy needs at least one source group".into()));
    }
    let profiles = groups
        .iter()
        .map(|g| spectral_mir(psd, target, g))
        .collect::<Result<Vec<_>>>()?;
    let refs: Vec<&SpectralProfile> = profiles.iter().collect();
    Ok(pointwise_min(&refs))
}

/// SMMI redundancy profile `i∩_α(ω)` for a lattice atom whose 1-based indices
/// refer to positions in `sources`.
pub fn smmi_redundancy_profile(
    psd: &SpectralMatrix,
    target: usize,
    sources: &[usize],
    atom: &Atom,
) -> Result<SpectralProfile> {
    check_sources(psd, target, sources)?;
    if atom.n_sources() != sources.len() {
        return Err(PirdError::Argument(format!(
            "atom {atom} is over {} sources but {} were given",
            atom.n_sources(),
            sources.len()
        )));
    }
    let groups: Vec<Vec<usize>> = atom
        .elements()
        .iter()
        .map(|el| el.iter().map(|&i| sources[i - 1]).collect())
        .collect();
    smmi_redundancy_of_groups(psd, target, &groups)
}

/// Frequency-resolved decomposition over the full lattice.
#[derive(Clone, Debug)]
pub struct SpectralPird {
    lattice: RedundancyLattice,
    target: usize,
    sources: Vec<usize>,
    grid: FrequencyGrid,
    /// Spectral MIR for each nonempty subset of source positions (1-based, sorted).
    subset_mir: HashMap<Vec<usize>, SpectralProfile>,
    redundancy: Vec<SpectralProfile>,
    partial: Vec<SpectralProfile>,
}

/// Computes every atom's SMMI redundancy profile and inverts the lattice at
/// each frequency.
pub fn spectral_pird(psd: &SpectralMatrix, target: usize, sources: &[usize]) -> Result<SpectralPird> {
    check_sources(psd, target, sources)?;
    let lattice = RedundancyLattice::enumerate(sources.len())?;
    let m = sources.len();

    let mut subset_mir = HashMap::new();
    for mask in 1usize..(1 << m) {
        let positions: Vec<usize> = (0..m).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect();
        let channels: Vec<usize> = positions.iter().map(|&i| sources[i - 1]).collect();
        let prof = spectral_mir(psd, target, &channels)?;
        subset_mir.insert(positions, prof);
    }

    let redundancy: Vec<SpectralProfile> = lattice
        .atoms()
        .iter()
        .map(|atom| {
            let els = atom.elements();
            let refs: Vec<&SpectralProfile> = els.iter().map(|e| &subset_mir[e]).collect();
            pointwise_min(&refs)
        })
        .collect();

    let n_freq = psd.grid().len();
    let n_atoms = lattice.len();
    let mut partial_values = vec![vec![0.0; n_freq]; n_atoms];
    let mut red = vec![0.0; n_atoms];
    let mut pi = vec![0.0; n_atoms];
    for k in 0..n_freq {
        for (a, r) in redundancy.iter().enumerate() {
            red[a] = r.values()[k];
        }
        lattice.invert_into(&red, &mut pi);
        for (a, v) in pi.iter().enumerate() {
            partial_values[a][k] = *v;
        }
    }
    let grid = psd.grid().clone();
    let partial = partial_values
        .into_iter()
        .map(|v| SpectralProfile::from_parts_unchecked(grid.clone(), v))
        .collect();

    Ok(SpectralPird {
        lattice,
        target,
        sources: sources.to_vec(),
        grid,
        subset_mir,
        redundancy,
        partial,
    })
}

/// Integrated (time-domain or band-limited) decomposition.
#[derive(Clone, Debug)]
pub struct TimePird {
    pub band: Band,
    /// Integral of each atom's spectral partial rate.
    pub partial: Vec<f64>,
    /// Integral of each atom's spectral redundancy.
    pub redundancy: Vec<f64>,
    /// Möbius inversion of the integrated redundancies.
    pub partial_from_redundancy: Vec<f64>,
    /// Integrated joint MIR `I_{Y;X}`.
    pub joint: f64,
}

impl TimePird {
    /// Largest per-atom disagreement between the two integration routes.
    pub fn route_gap(&self) -> f64 {
        self.partial
            .iter()
            .zip(&self.partial_from_redundancy)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl SpectralPird {
    pub fn lattice(&self) -> &RedundancyLattice {
        &self.lattice
    }

    pub fn target(&self) -> usize {
        self.target
    }

    /// Source channels; position `m − 1` is source `X_m` of the lattice.
    pub fn sources(&self) -> &[usize] {
        &self.sources
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn n_sources(&self) -> usize {
        self.sources.len()
    }

    /// `i∩_α(ω)` per atom, aligned with `lattice().atoms()`.
    pub fn redundancy(&self) -> &[SpectralProfile] {
        &self.redundancy
    }

    /// `iδ_α(ω)` per atom.
    pub fn partial(&self) -> &[SpectralProfile] {
        &self.partial
    }

    /// Spectral MIR of the target with the sources at 1-based positions.
    pub fn subset_mir(&self, positions: &[usize]) -> Option<&SpectralProfile> {
        let mut key = positions.to_vec();
        key.sort_unstable();
        key.dedup();
        self.subset_mir.get(&key)
    }

    /// `i_{Y;X_m}(ω)` for source position `m` (1-based).
    pub fn marginal(&self, m: usize) -> &SpectralProfile {
        &self.subset_mir[&vec![m]]
    }

    /// `i_{Y;X}(ω)` for all sources together.
    pub fn joint(&self) -> &SpectralProfile {
        let all: Vec<usize> = (1..=self.n_sources()).collect();
        &self.subset_mir[&all]
    }

    /// Per frequency, the position (in canonical element order) of the
    /// element attaining the atom's minimum; ties go to the first element.
    pub fn argmin_element(&self, atom_index: usize) -> Vec<usize> {
        let els = self.lattice.atom(atom_index).elements();
        let profiles: Vec<&SpectralProfile> = els.iter().map(|e| &self.subset_mir[e]).collect();
        (0..self.grid.len())
            .map(|k| {
                let mut best = 0;
                for (j, p) in profiles.iter().enumerate().skip(1) {
                    if p.values()[k] < profiles[best].values()[k] {
                        best = j;
                    }
                }
                best
            })
            .collect()
    }

    /// Full-axis decomposition.
    pub fn integrate(&self) -> TimePird {
        self.integrate_with(&Band::full(self.grid.fs()), integrate_full_band)
            .expect("full band is always valid")
    }

    /// Band-limited decomposition.
    pub fn integrate_band(&self, band: &Band) -> Result<TimePird> {
        self.integrate_with(band, integrate_band)
    }

    fn integrate_with(
        &self,
        band: &Band,
        integrate: impl Fn(&SpectralProfile, &Band) -> Result<f64>,
    ) -> Result<TimePird> {
        let partial = self.partial.iter().map(|p| integrate(p, band)).collect::<Result<Vec<_>>>()?;
        let redundancy = self.redundancy.iter().map(|p| integrate(p, band)).collect::<Result<Vec<_>>>()?;
        let partial_from_redundancy = self.lattice.invert(&redundancy)?;
        let joint = integrate(self.joint(), band)?;
        Ok(TimePird { band: band.clone(), partial, redundancy, partial_from_redundancy, joint })
    }

    /// Per-frequency coarse-grained profiles. Needs at least two sources.
    pub fn coarse_profiles(&self, rule: CoarseRule) -> Result<CoarseProfiles> {
        let m = self.n_sources();
        if m < 2 {
            return Err(PirdError::Argument(format!(
                "coarse-grained terms need at least 2 sources, got {m}"
            )));
        }
        let n = self.grid.len();
        let joint = self.joint().clone();
        let (unique, redundancy) = match rule {
            CoarseRule::BottomAtom => {
                let margins: Vec<&SpectralProfile> = (1..=m).map(|i| self.marginal(i)).collect();
                let r = pointwise_min(&margins);
                let unique: Vec<Vec<f64>> = margins
                    .iter()
                    .map(|p| (0..n).map(|k| p.values()[k] - r.values()[k]).collect())
                    .collect();
                (unique, r.values().to_vec())
            }
            CoarseRule::AtomGroups => {
                let mut unique = vec![vec![0.0; n]; m];
                let mut red = vec![0.0; n];
                for (atom, prof) in self.lattice.atoms().iter().zip(&self.partial) {
                    let dst = match atom.group() {
                        AtomGroup::Redundant => &mut red,
                        AtomGroup::Unique(i) => &mut unique[i - 1],
                        AtomGroup::Synergistic => continue,
                    };
                    for (d, v) in dst.iter_mut().zip(prof.values()) {
                        *d += v;
                    }
                }
                (unique, red)
            }
        };
        // Synergy closes the coarse identity exactly at every frequency.
        let synergy: Vec<f64> = (0..n)
            .map(|k| joint.values()[k] - redundancy[k] - unique.iter().map(|u| u[k]).sum::<f64>())
            .collect();
        let wrap = |v: Vec<f64>| SpectralProfile::from_parts_unchecked(self.grid.clone(), v);
        Ok(CoarseProfiles {
            rule,
            unique: unique.into_iter().map(wrap).collect(),
            redundancy: wrap(redundancy),
            synergy: wrap(synergy),
            joint,
        })
    }
}

fn integrate_full_band(p: &SpectralProfile, _: &Band) -> Result<f64> {
    Ok(integrate_full(p))
}

/// Time-domain part of the decomposition (full frequency axis).
pub fn time_pird(spectral: &SpectralPird) -> TimePird {
    spectral.integrate()
}

/// Spectral unique/redundant/synergistic rates.
#[derive(Clone, Debug)]
pub struct CoarseProfiles {
    pub rule: CoarseRule,
    pub unique: Vec<SpectralProfile>,
    pub redundancy: SpectralProfile,
    pub synergy: SpectralProfile,
    pub joint: SpectralProfile,
}

/// Integrated coarse-grained terms for one band.
#[derive(Clone, Debug, PartialEq)]
pub struct CoarseTerms {
    pub band: Band,
    pub unique: Vec<f64>,
    pub redundancy: f64,
    pub synergy: f64,
    /// `R − S`.
    pub delta: f64,
    pub joint: f64,
}

impl CoarseProfiles {
    /// Integrates over the full axis (`band = None`) or a band.
    pub fn integrate(&self, band: Option<&Band>) -> Result<CoarseTerms> {
        let fs = self.joint.grid().fs();
        let (band, f): (Band, Box<dyn Fn(&SpectralProfile) -> Result<f64>>) = match band {
            None => (Band::full(fs), Box::new(|p| Ok(integrate_full(p)))),
            Some(b) => {
                let b = b.clone();
                let bb = b.clone();
                (b, Box::new(move |p| integrate_band(p, &bb)))
            }
        };
        let unique = self.unique.iter().map(&f).collect::<Result<Vec<_>>>()?;
        let redundancy = f(&self.redundancy)?;
        let synergy = f(&self.synergy)?;
        Ok(CoarseTerms {
            band,
            unique,
            redundancy,
            synergy,
            delta: redundancy - synergy,
            joint: f(&self.joint)?,
        })
    }
}

/// Coarse-grained terms on the full axis followed by each requested band.
pub fn coarse_grained(
    psd: &SpectralMatrix,
    target: usize,
    sources: &[usize],
    bands: &[Band],
    rule: CoarseRule,
) -> Result<Vec<CoarseTerms>> {
    if sources.len() < 2 {
        return Err(PirdError::Argument(format!(
            "coarse-grained terms need at least 2 sources, got {}",
            sources.len()
        )));
    }
    let profiles = spectral_pird(psd, target, sources)?.coarse_profiles(rule)?;
    std::iter::once(profiles.integrate(None))
        .chain(bands.iter().map(|b| profiles.integrate(Some(b))))
        .collect()
}

/// Everything computed for one target/source configuration.
#[derive(Clone, Debug)]
pub struct DecompositionResult {
    pub spectral: SpectralPird,
    /// Full axis first, then the requested bands in order.
    pub time: Vec<TimePird>,
    /// `None` with a single source.
    pub coarse_profiles: Option<CoarseProfiles>,
    /// Aligned with `time`.
    pub coarse: Vec<CoarseTerms>,
}

pub fn decompose(
    psd: &SpectralMatrix,
    target: usize,
    sources: &[usize],
    bands: &[Band],
    rule: CoarseRule,
) -> Result<DecompositionResult> {
    for b in bands {
        b.check_nyquist(psd.grid().fs())?;
    }
    let spectral = spectral_pird(psd, target, sources)?;
    let mut time = vec![spectral.integrate()];
    for b in bands {
        time.push(spectral.integrate_band(b)?);
    }
    let (coarse_profiles, coarse) = if sources.len() >= 2 {
        let prof = spectral.coarse_profiles(rule)?;
        let mut terms = vec![prof.integrate(None)?];
        for b in bands {
            terms.push(prof.integrate(Some(b))?);
        }
        (Some(prof), terms)
    } else {
        (None, Vec::new())
    };
    Ok(DecompositionResult { spectral, time, coarse_profiles, coarse })
}
