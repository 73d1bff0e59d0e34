//! Tabular exports of a decomposition: `atoms.csv`, `coarse.csv` and the
//! long-form `profiles.csv`.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::baselines::MmiPid;
use crate::error::{PirdError, Result};
use crate::pird::DecompositionResult;

/// Unit for exported information values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    /// Multiplier applied to a value in nats.
    pub fn scale(self) -> f64 {
        match self {
            Units::Nats => 1.0,
            Units::Bits => 1.0 / std::f64::consts::LN_2,
        }
    }

    pub fn suffix(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}

impl std::str::FromStr for Units {
    type Err = PirdError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nats" => Ok(Units::Nats),
            "bits" => Ok(Units::Bits),
            other => Err(PirdError::Argument(format!("unknown units {other:?} (expected nats or bits)"))),
        }
    }
}

/// Formats with 12 significant digits.
pub fn fmt_sig(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v == 0.0 { "0".into() } else { format!("{v}") };
    }
    let mag = v.abs().log10().floor() as i32;
    if (-5..12).contains(&mag) {
        format!("{:.*}", (11 - mag) as usize, v)
    } else {
        format!("{v:.11e}")
    }
}

/// Writes `contents` to a temporary sibling, then renames it over `path`.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path
        .file_name()
        .ok_or_else(|| PirdError::Argument(format!("not a file path: {}", path.display())))?;
    let tmp = path.with_file_name(format!(".{}.tmp", name.to_string_lossy()));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

fn to_bytes(header: &[String], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| PirdError::Format(e.to_string()))
}

/// `atom, band, pi_<unit>, redundancy_<unit>`; one row per atom and band.
pub fn atoms_csv(result: &DecompositionResult, units: Units) -> Result<Vec<u8>> {
    let k = units.scale();
    let u = units.suffix();
    let header = vec!["atom".into(), "band".into(), format!("pi_{u}"), format!("redundancy_{u}")];
    let atoms = result.spectral.lattice().atoms();
    let mut rows = Vec::new();
    for t in &result.time {
        for (i, atom) in atoms.iter().enumerate() {
            rows.push(vec![
                atom.to_string(),
                t.band.label.clone(),
                fmt_sig(t.partial[i] * k),
                fmt_sig(t.redundancy[i] * k),
            ]);
        }
    }
    to_bytes(&header, rows)
}

fn pid_rows(prefix: &str, names: &[String], band: &str, pid: &MmiPid, k: f64) -> Vec<Vec<String>> {
    let mut rows: Vec<Vec<String>> = names
        .iter()
        .zip(&pid.unique)
        .map(|(n, u)| vec![format!("{prefix}U_{n}"), band.into(), fmt_sig(u * k)])
        .collect();
    for (term, v) in [
        ("R", pid.redundancy),
        ("S", pid.synergy),
        ("Delta", pid.redundancy - pid.synergy),
        ("JointMIR", pid.joint),
    ] {
        rows.push(vec![format!("{prefix}{term}"), band.into(), fmt_sig(v * k)]);
    }
    rows
}

/// `term, band, value_<unit>` with terms `U_<name>`, `R`, `S`, `Delta`,
/// `JointMIR`. Baseline PIDs follow on the full axis with their prefix.
pub fn coarse_csv(
    result: &DecompositionResult,
    source_names: &[String],
    baselines: &[(&str, &MmiPid)],
    units: Units,
) -> Result<Vec<u8>> {
    let k = units.scale();
    let header = vec!["term".into(), "band".into(), format!("value_{}", units.suffix())];
    let mut rows = Vec::new();
    for c in &result.coarse {
        let label = &c.band.label;
        for (n, u) in source_names.iter().zip(&c.unique) {
            rows.push(vec![format!("U_{n}"), label.clone(), fmt_sig(u * k)]);
        }
        for (term, v) in [("R", c.redundancy), ("S", c.synergy), ("Delta", c.delta), ("JointMIR", c.joint)] {
            rows.push(vec![term.into(), label.clone(), fmt_sig(v * k)]);
        }
    }
    if result.coarse.is_empty() {
        if let Some(t) = result.time.first() {
            rows.push(vec!["JointMIR".into(), t.band.label.clone(), fmt_sig(t.joint * k)]);
        }
    }
    for (prefix, pid) in baselines {
        rows.extend(pid_rows(&format!("{prefix}:"), source_names, "FULL", pid, k));
    }
    to_bytes(&header, rows)
}

/// Long form `f_hz, atom_or_term, value`: each atom's spectral partial
/// rate, then the coarse terms and each source's spectral MIR `MIR_<name>`.
pub fn profiles_csv(result: &DecompositionResult, source_names: &[String], units: Units) -> Result<Vec<u8>> {
    let k = units.scale();
    let sp = &result.spectral;
    let hz = sp.grid().hz();
    let mut series: Vec<(String, &[f64])> = sp
        .lattice()
        .atoms()
        .iter()
        .zip(sp.partial())
        .map(|(a, p)| (a.to_string(), p.values()))
        .collect();
    if let Some(c) = &result.coarse_profiles {
        for (n, u) in source_names.iter().zip(&c.unique) {
            series.push((format!("U_{n}"), u.values()));
        }
        series.push(("R".into(), c.redundancy.values()));
        series.push(("S".into(), c.synergy.values()));
    }
    series.push(("JointMIR".into(), sp.joint().values()));
    for (m, n) in source_names.iter().enumerate() {
        series.push((format!("MIR_{n}"), sp.marginal(m + 1).values()));
    }
    let header = vec!["f_hz".into(), "atom_or_term".into(), "value".into()];
    let mut rows = Vec::with_capacity(series.len() * hz.len());
    for (name, values) in &series {
        for (f, v) in hz.iter().zip(values.iter()) {
            rows.push(vec![fmt_sig(*f), name.clone(), fmt_sig(v * k)]);
        }
    }
    to_bytes(&header, rows)
}

/// Writes the three exports into `dir`, creating it if needed.
pub fn write_all(
    dir: &Path,
    result: &DecompositionResult,
    source_names: &[String],
    baselines: &[(&str, &MmiPid)],
    units: Units,
) -> Result<()> {
    if source_names.len() != result.spectral.n_sources() {
        return Err(PirdError::Argument(format!(
            "{} source names for {} sources",
            source_names.len(),
            result.spectral.n_sources()
        )));
    }
    fs::create_dir_all(dir)?;
    write_atomic(&dir.join("atoms.csv"), &atoms_csv(result, units)?)?;
    write_atomic(&dir.join("coarse.csv"), &coarse_csv(result, source_names, baselines, units)?)?;
    write_atomic(&dir.join("profiles.csv"), &profiles_csv(result, source_names, units)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pird::{decompose, CoarseRule};
    use crate::spectral::{psd_from_var, Band, FrequencyGrid};
    use crate::var::Scenario;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(0.510825623765990), "0.510825623766");
        assert_eq!(fmt_sig(-12.5), "-12.5000000000");
        assert_eq!(fmt_sig(1.5e-9), "1.50000000000e-9");
        let v = 0.1234567890123456;
        assert!((fmt_sig(v).parse::<f64>().unwrap() - v).abs() < 1e-12);
    }

    fn result() -> DecompositionResult {
        let m = Scenario::Sim1 { c: 0.0 }.build().unwrap();
        let psd = psd_from_var(&m, &FrequencyGrid::new(33, 1.0).unwrap()).unwrap();
        let bands = Band::parse_list("LO:0-0.25,HI:0.25-0.5").unwrap();
        decompose(&psd, 0, &[1, 2], &bands, CoarseRule::default()).unwrap()
    }

    #[test]
    fn coarse_rows_and_units() {
        let r = result();
        let names = vec!["X1".to_string(), "X2".to_string()];
        let nats = String::from_utf8(coarse_csv(&r, &names, &[], Units::Nats).unwrap()).unwrap();
        assert!(nats.starts_with("term,band,value_nats\n"));
        assert!(nats.contains("R,FULL,0.510825623766\n"), "{nats}");
        assert!(nats.contains("U_X1,LO,"));
        let bits = String::from_utf8(coarse_csv(&r, &names, &[], Units::Bits).unwrap()).unwrap();
        for (a, b) in nats.lines().skip(1).zip(bits.lines().skip(1)) {
            let va: f64 = a.rsplit(',').next().unwrap().parse().unwrap();
            let vb: f64 = b.rsplit(',').next().unwrap().parse().unwrap();
            assert!((va / std::f64::consts::LN_2 - vb).abs() < 1e-11);
        }
    }

    #[test]
    fn writes_three_files_atomically() {
        let r = result();
        let dir = tempfile::tempdir().unwrap();
        let names = vec!["X1".to_string(), "X2".to_string()];
        let pid = crate::baselines::static_pid(&Scenario::Sim1 { c: 0.0 }.build().unwrap(), 0, &[1, 2]).unwrap();
        write_all(dir.path(), &r, &names, &[("staticPID", &pid)], Units::Nats).unwrap();
        let atoms = fs::read_to_string(dir.path().join("atoms.csv")).unwrap();
        assert_eq!(atoms.lines().count(), 1 + 4 * 3);
        let coarse = fs::read_to_string(dir.path().join("coarse.csv")).unwrap();
        assert!(coarse.contains("staticPID:R,FULL,0.510825623766"));
        let profiles = fs::read_to_string(dir.path().join("profiles.csv")).unwrap();
        assert_eq!(profiles.lines().count(), 1 + 33 * (4 + 4 + 1 + 2));
        let leftovers: Vec<_> = fs::read_dir(dir.path())
            .unwrap()
            .filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().ends_with(".tmp"))
            .collect();
        assert!(leftovers.is_empty());
    }
}
