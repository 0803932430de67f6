//! Command-line front end.
//!
//! Options come from an optional `key = value` file (`--config`) and from
//! flags, flags winning. The fully resolved configuration is written back
//! as `config.txt` next to the outputs and embedded in `summary.json`;
//! passing that file to `--config` reproduces the run byte for byte. The
//! output directory and worker count are not part of it, since neither
//! affects results.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::averaging::{lyapunov_spectrum, rotation_and_digits};
use crate::config::{format_real_list, parse_real_list, KeyValues};
use crate::critical::eps_crit;
use crate::exec::{with_threads, Execution};
use crate::farey::{qmin_statistics, IrrationalityConfig};
use crate::maps::{parameter_catalog, CircleParams, OrbitSpec, Torus2Params, DEFAULT_TRANSIENT, DEFAULT_X0};
use crate::output::{mu_by_amplitude, read_records_csv, write_records_csv};
use crate::resonance::{
    classify_rotation_number, classify_rotation_vector, resonance_statistics, ResonanceBand, ResonanceConfig,
};
use crate::scan::{
    fit_points, fit_power_law, histogram_digits, linspace, proportions_by_amplitude, scan_circle,
    scan_torus_params, scan_torus_slice, Outcome, ScanConfig, ScanRecord,
};
use crate::{Error, Result};

/// Environment variable consulted when `--threads` is absent.
pub const THREADS_ENV: &str = "TORUS_SCAN_THREADS";

/// Version of the `summary.json` layout.
pub const SUMMARY_SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Subcommand {
    /// Circle-map sweep over (Ω, a)
    Scan1d,
    /// Two-torus sweep over random Ω and a range of ε
    Scan2d,
    /// Critical amplitude of a catalogued case
    Epscrit,
    /// Statistics of minimal denominators of random reals
    StatsFarey,
    /// Statistics of resonance orders of random 2-vectors
    StatsResonance,
    /// Power-law fit of μ(a) from a circle-map records file
    Fit,
    /// Rotation vector and class of a single orbit
    Orbit,
}

impl Subcommand {
    fn name(self) -> &'static str {
        match self {
            Subcommand::Scan1d => "scan1d",
            Subcommand::Scan2d => "scan2d",
            Subcommand::Epscrit => "epscrit",
            Subcommand::StatsFarey => "stats-farey",
            Subcommand::StatsResonance => "stats-resonance",
            Subcommand::Fit => "fit",
            Subcommand::Orbit => "orbit",
        }
    }
}

/// Classify orbits of circle and two-torus maps.
#[derive(Debug, Parser)]
#[command(name = "torus-scan", version)]
pub struct Cli {
    pub command: Subcommand,

    /// `key = value` file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: $TORUS_SCAN_THREADS, else all cores)
    #[arg(long)]
    pub threads: Option<usize>,

    /// Catalogued amplitude/phase set, 0..=7
    #[arg(long)]
    pub case: Option<usize>,
    /// Forcing amplitude ε (orbit)
    #[arg(long)]
    pub eps: Option<f64>,
    /// Drive Ω, one or two comma-separated components (orbit)
    #[arg(long)]
    pub omega: Option<String>,
    /// Circle-map amplitude a (orbit on the circle)
    #[arg(long)]
    pub a: Option<f64>,
    /// Comma-separated a values (scan1d)
    #[arg(long)]
    pub a_values: Option<String>,
    /// Evenly spaced a values as `min:max:count` (scan1d)
    #[arg(long)]
    pub a_range: Option<String>,
    /// Ω grid size (scan1d, scan2d slices)
    #[arg(long)]
    pub n_omega: Option<usize>,
    /// Comma-separated ε values (scan2d)
    #[arg(long)]
    pub eps_values: Option<String>,
    /// Number of ε values on [0, eps_max_factor·ε_crit] (scan2d)
    #[arg(long)]
    pub eps_count: Option<usize>,
    /// Upper end of the ε grid in units of ε_crit (scan2d)
    #[arg(long)]
    pub eps_max_factor: Option<f64>,
    /// Random drives per ε (scan2d)
    #[arg(long)]
    pub omega_samples: Option<usize>,
    /// Fix Ω₂ and put Ω₁ on an `n-omega` grid instead of random drives (scan2d)
    #[arg(long)]
    pub omega2: Option<f64>,
    /// Averaging length T
    #[arg(short = 'T', long)]
    pub steps: Option<usize>,
    /// Discarded iterates before averaging
    #[arg(long)]
    pub transient: Option<usize>,
    /// Initial point, comma-separated
    #[arg(long)]
    pub x0: Option<String>,
    /// Random seed
    #[arg(long)]
    pub seed: Option<u64>,
    /// Precision δ for denominators and resonance orders
    #[arg(long)]
    pub delta: Option<f64>,
    /// Log-band half-width s of the irrationality test
    #[arg(long)]
    pub s: Option<f64>,
    /// Digit cutoff D_T below which an orbit is chaotic
    #[arg(long)]
    pub min_digits: Option<f64>,
    /// Largest resonance order searched
    #[arg(long)]
    pub cap: Option<u64>,
    /// Band of typical resonance orders as `lo:hi`
    #[arg(long)]
    pub band: Option<String>,
    /// Also compute Lyapunov exponents
    #[arg(long)]
    pub lyapunov: Option<bool>,
    /// Number of random samples (stats-*)
    #[arg(short = 'n', long)]
    pub samples: Option<usize>,
    /// Records file to fit (fit)
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Fit both exponent terms (fit, scan1d)
    #[arg(long)]
    pub two_term: Option<bool>,
    /// Smallest a used in fits
    #[arg(long)]
    pub fit_min: Option<f64>,
    /// Largest a used in fits
    #[arg(long)]
    pub fit_max: Option<f64>,
    /// dig_T histogram bin width (scan1d)
    #[arg(long)]
    pub bin_width: Option<f64>,
}

const KEYS: &[&str] = &[
    "command", "case", "eps", "omega", "a", "a-values", "a-range", "n-omega", "eps-values", "eps-count",
    "eps-max-factor", "omega-samples", "omega2", "steps", "transient", "x0", "seed", "delta", "s", "min-digits", "cap",
    "band", "lyapunov", "samples", "input", "two-term", "fit-min", "fit-max", "bin-width",
];

impl Cli {
    /// Flags as key/value pairs.
    fn flag_values(&self) -> KeyValues {
        let mut kv = KeyValues::new();
        macro_rules! put {
            ($key:literal, $field:expr) => {
                if let Some(v) = &$field {
                    kv.set($key, v);
                }
            };
        }
        put!("case", self.case);
        put!("eps", self.eps.map(|v| format!("{v:?}")));
        put!("omega", self.omega);
        put!("a", self.a.map(|v| format!("{v:?}")));
        put!("a-values", self.a_values);
        put!("a-range", self.a_range);
        put!("n-omega", self.n_omega);
        put!("eps-values", self.eps_values);
        put!("eps-count", self.eps_count);
        put!("eps-max-factor", self.eps_max_factor.map(|v| format!("{v:?}")));
        put!("omega-samples", self.omega_samples);
        put!("omega2", self.omega2.map(|v| format!("{v:?}")));
        put!("steps", self.steps);
        put!("transient", self.transient);
        put!("x0", self.x0);
        put!("seed", self.seed);
        put!("delta", self.delta.map(|v| format!("{v:?}")));
        put!("s", self.s.map(|v| format!("{v:?}")));
        put!("min-digits", self.min_digits.map(|v| format!("{v:?}")));
        put!("cap", self.cap);
        put!("band", self.band);
        put!("lyapunov", self.lyapunov);
        put!("samples", self.samples);
        put!("input", self.input.as_ref().map(|p| p.display().to_string()));
        put!("two-term", self.two_term);
        put!("fit-min", self.fit_min.map(|v| format!("{v:?}")));
        put!("fit-max", self.fit_max.map(|v| format!("{v:?}")));
        put!("bin-width", self.bin_width.map(|v| format!("{v:?}")));
        kv
    }

    /// Merges the config file (if any) with the flags.
    pub fn merged_values(&self) -> Result<KeyValues> {
        let mut kv = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
                KeyValues::parse(&text)?
            }
            None => KeyValues::new(),
        };
        if let Some(cmd) = kv.get("command") {
            if cmd != self.command.name() {
                return Err(Error::invalid(format!(
                    "config file is for `{cmd}`, not `{}`",
                    self.command.name()
                )));
            }
        }
        let flags = self.flag_values();
        for k in flags.keys() {
            kv.set(k, flags.get(k).unwrap_or_default());
        }
        if let Some(bad) = kv.keys().find(|k| !KEYS.contains(k)) {
            return Err(Error::invalid(format!("unknown configuration key `{bad}`")));
        }
        Ok(kv)
    }

    pub fn threads(&self) -> Option<usize> {
        self.threads
            .or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.parse().ok()))
            .filter(|&n| n > 0)
    }
}

/// Fully resolved run parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Subcommand,
    pub values: KeyValues,
}

fn default_steps(cmd: Subcommand) -> usize {
    match cmd {
        Subcommand::Orbit => 1_000_000,
        _ => 100_000,
    }
}

fn parse_pair(text: &str, what: &str) -> Result<(f64, f64)> {
    let v: Vec<&str> = text.split(':').collect();
    if v.len() != 2 {
        return Err(Error::invalid(format!("{what} must look like `lo:hi`, got {text:?}")));
    }
    let p = |s: &str| s.trim().parse::<f64>().map_err(|_| Error::invalid(format!("bad {what} {text:?}")));
    Ok((p(v[0])?, p(v[1])?))
}

impl RunConfig {
    /// Fills defaults for every key relevant to `command`.
    pub fn resolve(command: Subcommand, given: &KeyValues) -> Result<Self> {
        let mut v = KeyValues::new();
        v.set("command", command.name());
        let copy_or = |v: &mut KeyValues, key: &str, default: String| {
            v.set(key, given.get(key).map(str::to_string).unwrap_or(default));
        };
        let two_d = matches!(command, Subcommand::Scan2d | Subcommand::Epscrit)
            || (command == Subcommand::Orbit && given.get("a").is_none());

        let classifies = matches!(command, Subcommand::Scan1d | Subcommand::Scan2d | Subcommand::Orbit);
        if classifies {
            copy_or(&mut v, "steps", default_steps(command).to_string());
            copy_or(&mut v, "transient", DEFAULT_TRANSIENT.to_string());
            let dim = if two_d { 2 } else { 1 };
            copy_or(&mut v, "x0", format_real_list(&vec![DEFAULT_X0; dim]));
            copy_or(&mut v, "min-digits", "9.0".into());
            copy_or(&mut v, "s", "1.6875".into());
        }
        if classifies || matches!(command, Subcommand::StatsFarey | Subcommand::StatsResonance) {
            copy_or(&mut v, "delta", "1e-9".into());
        }
        if two_d && classifies || command == Subcommand::StatsResonance {
            copy_or(&mut v, "cap", "3000".into());
            copy_or(&mut v, "band", "2.407:3.427".into());
        }
        match command {
            Subcommand::Scan1d => {
                if given.contains("a-values") {
                    copy_or(&mut v, "a-values", String::new());
                } else {
                    copy_or(&mut v, "a-range", "0.02:0.99:50".into());
                }
                copy_or(&mut v, "n-omega", "2000".into());
                copy_or(&mut v, "two-term", "true".into());
                copy_or(&mut v, "fit-min", "0.02".into());
                copy_or(&mut v, "fit-max", "0.99".into());
                copy_or(&mut v, "bin-width", "0.25".into());
            }
            Subcommand::Scan2d => {
                copy_or(&mut v, "case", "0".into());
                if given.contains("eps-values") {
                    copy_or(&mut v, "eps-values", String::new());
                } else {
                    copy_or(&mut v, "eps-count", "40".into());
                    copy_or(&mut v, "eps-max-factor", "1.2".into());
                }
                if given.contains("omega2") {
                    copy_or(&mut v, "omega2", String::new());
                    copy_or(&mut v, "n-omega", "200".into());
                } else {
                    copy_or(&mut v, "omega-samples", "500".into());
                    copy_or(&mut v, "seed", "1".into());
                }
                copy_or(&mut v, "lyapunov", "false".into());
            }
            Subcommand::Epscrit => copy_or(&mut v, "case", "0".into()),
            Subcommand::StatsFarey => {
                copy_or(&mut v, "samples", "100000".into());
                copy_or(&mut v, "seed", "1".into());
            }
            Subcommand::StatsResonance => {
                copy_or(&mut v, "samples", "10000".into());
                copy_or(&mut v, "seed", "1".into());
            }
            Subcommand::Fit => {
                let input = given
                    .get("input")
                    .ok_or_else(|| Error::invalid("fit needs --input <records.csv>"))?;
                v.set("input", input);
                copy_or(&mut v, "two-term", "true".into());
                copy_or(&mut v, "fit-min", "0.02".into());
                copy_or(&mut v, "fit-max", "0.99".into());
            }
            Subcommand::Orbit => {
                if two_d {
                    copy_or(&mut v, "case", "0".into());
                    copy_or(&mut v, "eps", "0.0".into());
                } else {
                    copy_or(&mut v, "a", "0.0".into());
                }
                let omega = given.get("omega").ok_or_else(|| Error::invalid("orbit needs --omega"))?;
                v.set("omega", omega);
                copy_or(&mut v, "lyapunov", two_d.to_string());
            }
        }
        let cfg = Self { command, values: v };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        // parse everything once so that bad values fail before any work
        let v = &self.values;
        for key in ["steps", "transient", "n-omega", "eps-count", "omega-samples", "samples", "case"] {
            v.parse_value::<usize>(key)?;
        }
        for key in ["eps", "a", "omega2", "eps-max-factor", "delta", "s", "min-digits", "fit-min", "fit-max", "bin-width"] {
            v.parse_value::<f64>(key)?;
        }
        for key in ["lyapunov", "two-term"] {
            v.parse_value::<bool>(key)?;
        }
        v.parse_value::<u64>("seed")?;
        v.parse_value::<u64>("cap")?;
        if v.parse_value::<usize>("steps")? == Some(0) {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if let Some(c) = v.parse_value::<usize>("case")? {
            parameter_catalog(c)?;
        }
        if let Some(s) = v.get("band") {
            let (lo, hi) = parse_pair(s, "band")?;
            ResonanceBand::from_log10_bounds(lo, hi)?;
        }
        if self.command == Subcommand::Scan1d && self.a_values()?.is_empty() {
            return Err(Error::invalid("no a values to scan"));
        }
        if let Some(x0) = v.get("x0") {
            parse_real_list(x0)?;
        }
        Ok(())
    }

    fn a_values(&self) -> Result<Vec<f64>> {
        if let Some(list) = self.values.get("a-values") {
            return parse_real_list(list);
        }
        let text = self.values.get("a-range").unwrap_or("0.02:0.99:50");
        let parts: Vec<&str> = text.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::invalid(format!("a-range must be `min:max:count`, got {text:?}")));
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| Error::invalid("bad a-range"))?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| Error::invalid("bad a-range"))?;
        let n: usize = parts[2].trim().parse().map_err(|_| Error::invalid("bad a-range"))?;
        Ok(linspace(lo, hi, n))
    }

    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<T> {
        self.values.require(key)
    }

    fn farey(&self) -> Result<IrrationalityConfig> {
        IrrationalityConfig::new(self.get("delta")?, self.get("s")?)
    }

    fn resonance(&self) -> Result<ResonanceConfig> {
        let (lo, hi) = parse_pair(self.values.get("band").unwrap_or("2.407:3.427"), "band")?;
        ResonanceConfig::new(self.get("delta")?, self.get("cap")?, ResonanceBand::from_log10_bounds(lo, hi)?)
    }

    fn spec<const D: usize>(&self) -> Result<OrbitSpec<D>> {
        let x0 = parse_real_list(self.values.get("x0").unwrap_or_default())?;
        if x0.len() != D {
            return Err(Error::invalid(format!("x0 needs {D} components, got {}", x0.len())));
        }
        OrbitSpec::new(std::array::from_fn(|i| x0[i]), self.get("transient")?, self.get("steps")?)
    }

    fn scan_config<const D: usize>(&self) -> Result<ScanConfig<D>> {
        Ok(ScanConfig {
            spec: self.spec()?,
            min_digits: self.get("min-digits")?,
            farey: self.farey()?,
            resonance: if D == 2 { self.resonance()? } else { ResonanceConfig::default() },
            lyapunov: self.values.parse_value("lyapunov")?.unwrap_or(false),
            exec: Execution::default(),
        })
    }
}

/// What a run produced.
#[derive(Clone, Debug)]
pub struct RunReport {
    pub summary: Value,
    /// Rows recorded as `error`.
    pub warnings: usize,
    pub files: Vec<PathBuf>,
    /// Human-readable lines for stdout.
    pub lines: Vec<String>,
}

fn failures(records: &[ScanRecord]) -> usize {
    records.iter().filter(|r| matches!(r.outcome, Outcome::Failed(_))).count()
}

fn write_file(dir: &Path, name: &str, contents: &[u8], files: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

fn parse_omega<const D: usize>(text: &str) -> Result<[f64; D]> {
    let v = parse_real_list(text)?;
    if v.len() != D {
        return Err(Error::invalid(format!("omega needs {D} components, got {}", v.len())));
    }
    Ok(std::array::from_fn(|i| v[i]))
}

/// Executes a resolved configuration, writing outputs into `out`.
pub fn run(cfg: &RunConfig, out: &Path) -> Result<RunReport> {
    fs::create_dir_all(out).map_err(|e| Error::invalid(format!("cannot create {}: {e}", out.display())))?;
    let mut files = Vec::new();
    let mut lines = Vec::new();
    let mut warnings = 0;
    let result: Value = match cfg.command {
        Subcommand::Scan1d => {
            let sc = cfg.scan_config::<1>()?;
            let a_values = cfg.a_values()?;
            let records = scan_circle(&a_values, cfg.get("n-omega")?, &sc)?;
            warnings = failures(&records);
            let mut csv = Vec::new();
            write_records_csv(&mut csv, &records).map_err(|e| Error::invalid(e.to_string()))?;
            write_file(out, "records.csv", &csv, &mut files)?;
            let props = proportions_by_amplitude(&records)?;
            let bin: f64 = cfg.get("bin-width")?;
            let n_omega: usize = cfg.get("n-omega")?;
            let per_a: Vec<Value> = props
                .iter()
                .zip(records.chunks(n_omega))
                .map(|((a, p), chunk)| {
                    let h = histogram_digits(chunk, bin).ok();
                    json!({ "a": a, "proportions": p, "digits": h })
                })
                .collect();
            for (a, p) in &props {
                lines.push(format!(
                    "a = {a:.4}  chaotic {:.4}  rational {:.4}  irrational {:.4}  dig16 {:.4}",
                    p.chaotic, p.periodic, p.nonresonant, p.max_digits
                ));
            }
            let pts = fit_points(&records, cfg.get("fit-min")?, cfg.get("fit-max")?)?;
            let fit = fit_power_law(&pts, cfg.get("two-term")?).ok();
            if let Some(f) = &fit {
                lines.push(format!("fit: p1 = {:.4}  p2 = {:.4}  rms = {:.5}", f.p1, f.p2, f.rms));
            }
            json!({ "by_amplitude": per_a, "fit": fit })
        }
        Subcommand::Scan2d => {
            let sc = cfg.scan_config::<2>()?;
            let case: usize = cfg.get("case")?;
            let base = parameter_catalog(case)?;
            let crit = eps_crit(&base)?;
            let eps_values = match cfg.values.get("eps-values") {
                Some(list) => parse_real_list(list)?,
                None => linspace(
                    0.0,
                    cfg.get::<f64>("eps-max-factor")? * crit.eps_crit,
                    cfg.get("eps-count")?,
                ),
            };
            let records = match cfg.values.parse_value::<f64>("omega2")? {
                Some(w2) => scan_torus_slice(&base, &eps_values, cfg.get("n-omega")?, w2, &sc)?,
                None => scan_torus_params(&base, &eps_values, cfg.get("omega-samples")?, cfg.get("seed")?, &sc)?,
            };
            warnings = failures(&records);
            let mut csv = Vec::new();
            write_records_csv(&mut csv, &records).map_err(|e| Error::invalid(e.to_string()))?;
            write_file(out, "records.csv", &csv, &mut files)?;
            let props = proportions_by_amplitude(&records)?;
            for (e, p) in &props {
                lines.push(format!(
                    "eps = {e:.4}  nonresonant {:.4}  resonant {:.4}  periodic {:.4}  chaotic {:.4}",
                    p.nonresonant, p.resonant, p.periodic, p.chaotic
                ));
            }
            let per_eps: Vec<Value> = props.iter().map(|(e, p)| json!({ "eps": e, "proportions": p })).collect();
            json!({ "case": case, "eps_crit": crit, "by_amplitude": per_eps })
        }
        Subcommand::Epscrit => {
            let case: usize = cfg.get("case")?;
            let crit = eps_crit(&parameter_catalog(case)?)?;
            lines.push(format!("case {case}: eps_crit = {:.6}", crit.eps_crit));
            json!({ "case": case, "eps_crit": crit })
        }
        Subcommand::StatsFarey => {
            let st = qmin_statistics(cfg.get("samples")?, cfg.get("delta")?, cfg.get("seed")?, Execution::default())?;
            lines.push(format!("<log10 qmin> = {:.4}  sigma = {:.4}", st.mean_log10, st.sigma));
            json!({ "farey": st })
        }
        Subcommand::StatsResonance => {
            let st = resonance_statistics(cfg.get("samples")?, cfg.get("seed")?, &cfg.resonance()?, Execution::default())?;
            lines.push(format!(
                "<log10 M> = {:.4}  sigma = {:.4}  misclassified {:.4} (below {:.4}, above {:.4})",
                st.mean_log10, st.sigma, st.misclassified_fraction, st.below_fraction, st.above_fraction
            ));
            json!({ "resonance": st })
        }
        Subcommand::Fit => {
            let path = PathBuf::from(cfg.values.get("input").unwrap_or_default());
            let file = fs::File::open(&path).map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))?;
            let rows = read_records_csv(BufReader::new(file))?;
            if rows.iter().any(|r| r.omega.len() != 1) {
                return Err(Error::invalid("fit expects a circle-map records file"));
            }
            let (lo, hi): (f64, f64) = (cfg.get("fit-min")?, cfg.get("fit-max")?);
            let pts: Vec<(f64, f64)> = mu_by_amplitude(&rows)
                .into_iter()
                .filter(|&(a, mu)| a >= lo && a <= hi && mu > 0.0)
                .collect();
            let fit = fit_power_law(&pts, cfg.get("two-term")?)?;
            lines.push(format!("p1 = {:.4}  p2 = {:.4}  rms = {:.5}  ({} points)", fit.p1, fit.p2, fit.rms, fit.points));
            json!({ "fit": fit })
        }
        Subcommand::Orbit => {
            if cfg.values.contains("case") {
                let spec = cfg.spec::<2>()?;
                let base = parameter_catalog(cfg.get("case")?)?;
                let p = Torus2Params::new(parse_omega(cfg.values.get("omega").unwrap_or_default())?, cfg.get("eps")?, base.amps, base.phases)?;
                let r = rotation_and_digits(&p, &spec)?;
                let sc = cfg.scan_config::<2>()?;
                let class = classify_rotation_vector(&r, &sc.threshold(), &sc.farey, &sc.resonance)?;
                let lyap = if sc.lyapunov { Some(lyapunov_spectrum(&p, &spec)?) } else { None };
                lines.push(format!("omega_T = ({:.14}, {:.14})  digT = {:.4}", r.omega[0], r.omega[1], r.digits));
                lines.push(describe(&class));
                if let Some(l) = &lyap {
                    lines.push(format!("lyapunov = ({:.4}, {:.4})", l.lambda1, l.lambda2));
                }
                json!({ "omega_t": r.omega, "digits": r.digits, "class": class, "lyapunov": lyap })
            } else {
                let spec = cfg.spec::<1>()?;
                let [w] = parse_omega::<1>(cfg.values.get("omega").unwrap_or_default())?;
                let p = CircleParams::new(w, cfg.get("a")?)?;
                let r = rotation_and_digits(&p, &spec)?;
                let sc = cfg.scan_config::<1>()?;
                let class = classify_rotation_number(&r, &sc.threshold(), &sc.farey)?;
                lines.push(format!("omega_T = {:.14}  digT = {:.4}", r.omega[0], r.digits));
                lines.push(describe(&class));
                json!({ "omega_t": r.omega, "digits": r.digits, "class": class })
            }
        }
    };
    let config_text = cfg.values.render();
    write_file(out, "config.txt", config_text.as_bytes(), &mut files)?;
    let summary = json!({
        "schema": SUMMARY_SCHEMA,
        "command": cfg.command,
        "config": config_text,
        "warnings": warnings,
        "result": result,
    });
    let mut text = serde_json::to_string_pretty(&summary).map_err(|e| Error::invalid(e.to_string()))?;
    text.push('\n');
    write_file(out, "summary.json", text.as_bytes(), &mut files)?;
    Ok(RunReport {
        summary,
        warnings,
        files,
        lines,
    })
}

fn describe(class: &crate::resonance::OrbitClass) -> String {
    match class.resonance() {
        Some(h) => format!(
            "class = {} (m = ({}, {}), n = {}, M = {})",
            class.label(),
            h.m[0],
            h.m[1],
            h.n,
            h.order
        ),
        None => format!("class = {}", class.label()),
    }
}

/// Parses flags, runs, and maps the outcome to a process exit code:
/// 0 on success (also when some rows failed), 2 on invalid configuration,
/// 1 on other errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let cfg = match cli.merged_values().and_then(|kv| RunConfig::resolve(cli.command, &kv)) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("torus-scan: {e}");
            return 2;
        }
    };
    let threads = cli.threads();
    match with_threads(threads, || run(&cfg, &cli.out)) {
        Ok(report) => {
            for l in &report.lines {
                println!("{l}");
            }
            if report.warnings > 0 {
                eprintln!("torus-scan: warning: {} orbits failed numerically (class `error`)", report.warnings);
            }
            0
        }
        Err(e @ Error::InvalidArgument(_)) => {
            eprintln!("torus-scan: {e}");
            2
        }
        Err(e) => {
            eprintln!("torus-scan: {e}");
            1
        }
    }
}
