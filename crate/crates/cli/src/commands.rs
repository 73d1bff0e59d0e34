use std::fmt::Write as _;
use std::path::PathBuf;

use pird::baselines::MmiPid;
use pird::export::{self, fmt_sig, write_atomic, Units};
use pird::var::DEFAULT_STABILITY_EPS;
use pird::{
    decompose, fit_ols, psd_from_var, select_order_aic, simulate, static_pid, te_pid, Band, CoarseRule,
    CoarseTerms, FrequencyGrid, PirdError, Result, Scenario, TimeSeriesMatrix, VarModel,
};

use crate::config::{read_text, CommonArgs};

const DEFAULT_GRID: usize = 2049;
const DEFAULT_MAX_ORDER: usize = 10;
const DEFAULT_LENGTH: usize = 100_000;
const DEFAULT_SEED: u64 = 0;
const BURN_IN: usize = 1000;

fn out_dir(args: &CommonArgs) -> PathBuf {
    args.out.clone().unwrap_or_else(|| PathBuf::from("pird-out"))
}

fn units(args: &CommonArgs) -> Result<Units> {
    args.units.as_deref().map_or(Ok(Units::Nats), str::parse)
}

fn coarse_rule(args: &CommonArgs) -> Result<CoarseRule> {
    args.coarse_rule.as_deref().map_or(Ok(CoarseRule::default()), str::parse)
}

fn scenario(args: &CommonArgs) -> Result<Option<Scenario>> {
    args.scenario.as_deref().map(|id| Scenario::from_id(id, args.c)).transpose()
}

fn load_series(args: &CommonArgs) -> Result<TimeSeriesMatrix> {
    let fs = args.fs.unwrap_or(1.0);
    if let Some(path) = &args.input {
        let file = std::fs::File::open(path)
            .map_err(|e| PirdError::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        return TimeSeriesMatrix::read_csv(std::io::BufReader::new(file), fs);
    }
    if let Some(s) = scenario(args)? {
        let model = s.build()?;
        let model = match args.fs {
            Some(fs) => model.with_fs(fs)?,
            None => model,
        };
        return simulate(&model, args.length.unwrap_or(DEFAULT_LENGTH), BURN_IN, args.seed.unwrap_or(DEFAULT_SEED));
    }
    Err(PirdError::Argument("no data: pass --input or --scenario".into()))
}

/// Fits with the forced order or the AIC choice; the AIC curve is returned
/// only when selection ran.
fn fit_model(ts: &TimeSeriesMatrix, args: &CommonArgs) -> Result<(VarModel, Option<Vec<f64>>)> {
    let (model, aic) = match args.order {
        Some(p) => (fit_ols(ts, p)?, None),
        None => {
            let sel = select_order_aic(ts, args.max_order.unwrap_or(DEFAULT_MAX_ORDER))?;
            (fit_ols(ts, sel.best_order)?, Some(sel.aic))
        }
    };
    if !model.is_stable(DEFAULT_STABILITY_EPS) {
        return Err(PirdError::Instability(format!(
            "fitted VAR({}) has spectral radius {:.6}",
            model.order(),
            model.spectral_radius()
        )));
    }
    Ok((model, aic))
}

pub fn cmd_fit(args: CommonArgs) -> Result<()> {
    let ts = load_series(&args)?;
    let (model, aic) = fit_model(&ts, &args)?;
    let dir = out_dir(&args);
    std::fs::create_dir_all(&dir)?;
    write_atomic(&dir.join("model.json"), model.to_json()?.as_bytes())?;
    if let Some(aic) = aic {
        let mut s = String::from("order,aic\n");
        for (i, v) in aic.iter().enumerate() {
            writeln!(s, "{},{}", i + 1, fmt_sig(*v)).unwrap();
        }
        write_atomic(&dir.join("aic.csv"), s.as_bytes())?;
    }
    println!("selected order: {}", model.order());
    println!("stability margin: {}", fmt_sig(model.stability_margin()));
    Ok(())
}

pub fn cmd_simulate(args: CommonArgs) -> Result<()> {
    let s = scenario(&args)?.ok_or_else(|| PirdError::Argument("simulate needs --scenario".into()))?;
    let model = s.build()?;
    let model = match args.fs {
        Some(fs) => model.with_fs(fs)?,
        None => model,
    };
    let ts = simulate(&model, args.length.unwrap_or(DEFAULT_LENGTH), BURN_IN, args.seed.unwrap_or(DEFAULT_SEED))?;
    let path = args
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", s.id())));
    let mut buf = Vec::new();
    ts.write_csv(&mut buf)?;
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    write_atomic(&path, &buf)?;
    println!("wrote {} samples of {} channels to {}", ts.len(), ts.n_channels(), path.display());
    Ok(())
}

/// The model to decompose: a saved model, a scenario, or an inline fit.
fn obtain_model(args: &CommonArgs) -> Result<VarModel> {
    let model = if let Some(path) = &args.model {
        VarModel::from_json(&read_text(path)?)?
    } else if args.input.is_none() {
        scenario(args)?
            .ok_or_else(|| PirdError::Argument("pass --model, --input or --scenario".into()))?
            .build()?
    } else {
        return fit_model(&load_series(args)?, args).map(|(m, _)| m);
    };
    match args.fs {
        Some(fs) => model.with_fs(fs),
        None => Ok(model),
    }
}

fn resolve_channels(model: &VarModel, args: &CommonArgs) -> Result<(usize, Vec<usize>)> {
    let lookup = |name: &str| {
        model.channel_index(name).ok_or_else(|| {
            PirdError::Argument(format!("unknown channel {name:?}; available: {}", model.names().join(", ")))
        })
    };
    let target = match &args.target {
        Some(t) => lookup(t)?,
        None => 0,
    };
    let sources = match &args.sources {
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(lookup)
            .collect::<Result<Vec<_>>>()?,
        None => (0..model.dim()).filter(|&i| i != target).collect(),
    };
    if sources.contains(&target) {
        return Err(PirdError::Argument(format!("target {:?} is also listed as a source", model.names()[target])));
    }
    Ok((target, sources))
}

fn bands(args: &CommonArgs, fs: f64) -> Result<Vec<Band>> {
    let bands = match &args.bands {
        Some(s) => Band::parse_list(s)?,
        None => Vec::new(),
    };
    for b in &bands {
        b.check_nyquist(fs)?;
    }
    Ok(bands)
}

fn psd(model: &VarModel, args: &CommonArgs) -> Result<pird::SpectralMatrix> {
    let grid = FrequencyGrid::new(args.grid.unwrap_or(DEFAULT_GRID), model.fs())?;
    let psd = psd_from_var(model, &grid)?;
    match args.diag_load {
        Some(d) if d > 0.0 => psd.with_diagonal_loading(d),
        _ => Ok(psd),
    }
}

pub fn cmd_decompose(args: CommonArgs) -> Result<()> {
    let model = obtain_model(&args)?;
    let (target, sources) = resolve_channels(&model, &args)?;
    let bands = bands(&args, model.fs())?;
    let units = units(&args)?;
    let res = decompose(&psd(&model, &args)?, target, &sources, &bands, coarse_rule(&args)?)?;
    let names: Vec<String> = sources.iter().map(|&i| model.names()[i].clone()).collect();

    let mut baselines: Vec<(&str, MmiPid)> = Vec::new();
    if sources.len() >= 2 {
        baselines.push(("staticPID", static_pid(&model, target, &sources)?));
        baselines.push(("tePID", te_pid(&model, target, &sources, None, args.conditioned_te)?));
    }
    let refs: Vec<(&str, &MmiPid)> = baselines.iter().map(|(p, r)| (*p, r)).collect();
    let dir = out_dir(&args);
    export::write_all(&dir, &res, &names, &refs, units)?;

    let k = units.scale();
    println!("target {} <- {}", model.names()[target], names.join(", "));
    for c in &res.coarse {
        print_terms(c, &names, k, units);
    }
    if res.coarse.is_empty() {
        println!("FULL JointMIR = {} {}", fmt_sig(res.time[0].joint * k), units.suffix());
    }
    println!("wrote atoms.csv, coarse.csv, profiles.csv to {}", dir.display());
    Ok(())
}

fn print_terms(c: &CoarseTerms, names: &[String], k: f64, units: Units) {
    let mut line = format!("{}:", c.band.label);
    for (n, u) in names.iter().zip(&c.unique) {
        write!(line, " U_{n}={}", fmt_sig(u * k)).unwrap();
    }
    write!(
        line,
        " R={} S={} Delta={} JointMIR={} ({})",
        fmt_sig(c.redundancy * k),
        fmt_sig(c.synergy * k),
        fmt_sig(c.delta * k),
        fmt_sig(c.joint * k),
        units.suffix()
    )
    .unwrap();
    println!("{line}");
}

/// Parses `start:step:stop`; points are `start + i·step` up to `stop`.
pub fn parse_sweep(s: &str) -> Result<Vec<f64>> {
    let bad = || PirdError::Argument(format!("malformed sweep {s:?}, expected start:step:stop"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let [start, step, stop] = parts[..] else { return Err(bad()) };
    if !(step > 0.0) || stop < start {
        return Err(bad());
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| start + i as f64 * step).collect())
}

fn term_header(prefix: &str, names: &[String]) -> Vec<String> {
    names
        .iter()
        .map(|n| format!("{prefix}U_{n}"))
        .chain(["R", "S", "Delta", "JointMIR"].iter().map(|t| format!("{prefix}{t}")))
        .collect()
}

fn term_values(unique: &[f64], r: f64, s: f64, joint: f64, k: f64) -> Vec<String> {
    unique
        .iter()
        .chain([r, s, r - s, joint].iter())
        .map(|v| fmt_sig(v * k))
        .collect()
}

pub fn cmd_bench(args: CommonArgs) -> Result<()> {
    let id = args
        .scenario
        .clone()
        .ok_or_else(|| PirdError::Argument("bench needs --scenario (sim1, sim2 or sim3)".into()))?;
    let units = units(&args)?;
    let k = units.scale();
    let dir = out_dir(&args);
    std::fs::create_dir_all(&dir)?;
    let rule = coarse_rule(&args)?;

    match id.as_str() {
        "sim1" | "sim2" => {
            let cs = parse_sweep(args.sweep.as_deref().unwrap_or("0:0.05:0.8"))?;
            let base = if id == "sim1" { "staticPID_" } else { "tePID_" };
            let names = vec!["X1".to_string(), "X2".to_string()];
            let mut header = vec!["c".to_string()];
            header.extend(term_header("PIRD_", &names));
            header.extend(term_header(base, &names));
            let mut out = header.join(",") + "\n";
            for c in cs {
                let model = Scenario::from_id(&id, Some(c))?.build()?;
                let res = decompose(&psd(&model, &args)?, 0, &[1, 2], &[], rule)?;
                let t = &res.coarse[0];
                let b = if id == "sim1" {
                    static_pid(&model, 0, &[1, 2])?
                } else {
                    te_pid(&model, 0, &[1, 2], None, args.conditioned_te)?
                };
                let mut row = vec![fmt_sig(c)];
                row.extend(term_values(&t.unique, t.redundancy, t.synergy, t.joint, k));
                row.extend(term_values(&b.unique, b.redundancy, b.synergy, b.joint, k));
                out += &(row.join(",") + "\n");
            }
            let path = dir.join(format!("sweep_{id}.csv"));
            write_atomic(&path, out.as_bytes())?;
            println!("wrote {}", path.display());
        }
        "sim3" => {
            let model = Scenario::Sim3.build()?;
            let bands = match &args.bands {
                Some(_) => bands(&args, model.fs())?,
                None => Band::parse_list("B1:0.04-0.15,B2:0.15-0.4")?,
            };
            let res = decompose(&psd(&model, &args)?, 0, &[1, 2, 3], &bands, rule)?;
            let names: Vec<String> = (1..=3).map(|i| format!("X{i}")).collect();
            let mut out = std::iter::once("band".to_string())
                .chain(term_header("", &names))
                .collect::<Vec<_>>()
                .join(",")
                + "\n";
            for t in &res.coarse {
                let mut row = vec![t.band.label.clone()];
                row.extend(term_values(&t.unique, t.redundancy, t.synergy, t.joint, k));
                out += &(row.join(",") + "\n");
                print_terms(t, &names, k, units);
            }
            let path = dir.join("bands_sim3.csv");
            write_atomic(&path, out.as_bytes())?;
            export::write_all(&dir, &res, &names, &[], units)?;
            println!("wrote {} and atoms/coarse/profiles CSVs", path.display());
        }
        other => {
            return Err(PirdError::Argument(format!("unknown scenario {other:?} (expected sim1, sim2 or sim3)")))
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_grid() {
        let cs = parse_sweep("0:0.05:0.8").unwrap();
        assert_eq!(cs.len(), 17);
        assert_eq!(cs[0], 0.0);
        assert!((cs[16] - 0.8).abs() < 1e-12);
        assert!(parse_sweep("0:0:1").is_err());
        assert!(parse_sweep("1:0.1").is_err());
    }
}
